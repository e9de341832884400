//! Brute-force ground truth over small finite felt spaces.
//!
//! Spaces are enumerated with nonzero off-diagonal entries so that
//! indiscernibility holds by construction; every such space is 0-complete,
//! so the fixed-point theorem applies to each (space, map) pair passing
//! the upper band condition. Any counterexample found here is a defect in this crate.

pub mod bands;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::axioms::{self, ContinuityOutcome};
use crate::contraction;
use crate::error::{FeltError, Result};
use crate::format::SpaceFile;
use crate::map::SelfMap;
use crate::report::Verdict;
use crate::solver;
use crate::space::{FeltSpace, FiniteSpace, Point};
use crate::tolerance::Tolerances;

pub const MAX_POINTS: usize = 4;
/// Ceiling on spaces × maps for exhaustive runs.
pub const MAX_CASES: u64 = 20_000_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnumerationConfig {
    pub n: usize,
    /// Distinct nonnegative distance values, ascending.
    pub alphabet: Vec<f64>,
    pub include_nonzero_diagonal: bool,
    pub seed: u64,
    pub trials: usize,
}

impl EnumerationConfig {
    pub fn new(n: usize, alphabet: &[f64]) -> Result<Self> {
        let mut values = alphabet.to_vec();
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(FeltError::InvalidArgument(format!(
                "alphabet values must be finite and nonnegative, got {bad}"
            )));
        }
        values.sort_by(f64::total_cmp);
        values.dedup();
        let cfg = Self {
            n,
            alphabet: values,
            include_nonzero_diagonal: true,
            seed: 0,
            trials: 0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_seed(mut self, seed: u64, trials: usize) -> Self {
        self.seed = seed;
        self.trials = trials;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > MAX_POINTS {
            return Err(FeltError::CapExceeded(format!(
                "n must lie in 1..={MAX_POINTS}, got {}",
                self.n
            )));
        }
        if self.alphabet.is_empty() {
            return Err(FeltError::InvalidArgument("alphabet is empty".into()));
        }
        Ok(())
    }

    fn off_diagonal_values(&self) -> Vec<f64> {
        self.alphabet
            .iter()
            .copied()
            .filter(|&v| v != 0.0)
            .collect()
    }

    fn diagonal_values(&self) -> Vec<f64> {
        if self.include_nonzero_diagonal {
            self.alphabet.clone()
        } else {
            vec![0.0]
        }
    }

    /// `|off|^(n(n-1)/2) × |diag|^n`.
    pub fn expected_space_count(&self) -> u64 {
        let off = self.off_diagonal_values().len() as u64;
        let diag = self.diagonal_values().len() as u64;
        let pairs = (self.n * (self.n - 1) / 2) as u32;
        off.pow(pairs) * diag.pow(self.n as u32)
    }

    pub fn map_count(&self) -> u64 {
        (self.n as u64).pow(self.n as u32)
    }
}

/// Parse a comma-separated alphabet such as `0,0.5,1`.
pub fn parse_alphabet(csv: &str) -> Result<Vec<f64>> {
    csv.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite() && *v >= 0.0)
                .ok_or_else(|| {
                    FeltError::InvalidArgument(format!(
                        "alphabet entry {t:?} is not a nonnegative decimal"
                    ))
                })
        })
        .collect()
}

/// Mixed-radix odometer, last digit fastest.
fn advance(digits: &mut [usize], radix: &[usize]) -> bool {
    for k in (0..digits.len()).rev() {
        digits[k] += 1;
        if digits[k] < radix[k] {
            return true;
        }
        digits[k] = 0;
    }
    false
}

/// Every symmetric matrix over the alphabet with nonzero off-diagonal
/// entries, in lexicographic order of (upper triangle row-major, diagonal).
pub struct SpaceEnumerator {
    n: usize,
    off: Vec<f64>,
    diag: Vec<f64>,
    digits: Vec<usize>,
    radix: Vec<usize>,
    index: u64,
    done: bool,
}

pub fn enumerate_spaces(cfg: &EnumerationConfig) -> Result<SpaceEnumerator> {
    cfg.validate()?;
    let off = cfg.off_diagonal_values();
    let diag = cfg.diagonal_values();
    let pairs = cfg.n * (cfg.n - 1) / 2;
    let mut radix = vec![off.len(); pairs];
    radix.extend(std::iter::repeat_n(diag.len(), cfg.n));
    Ok(SpaceEnumerator {
        n: cfg.n,
        done: radix.contains(&0),
        digits: vec![0; radix.len()],
        radix,
        off,
        diag,
        index: 0,
    })
}

impl Iterator for SpaceEnumerator {
    type Item = FiniteSpace;

    #[allow(clippy::needless_range_loop)]
    fn next(&mut self) -> Option<FiniteSpace> {
        if self.done {
            return None;
        }
        let n = self.n;
        let mut m = vec![vec![0.0; n]; n];
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                let v = self.off[self.digits[k]];
                m[i][j] = v;
                m[j][i] = v;
                k += 1;
            }
        }
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = self.diag[self.digits[k + i]];
        }
        let space = FiniteSpace::new(format!("enum:n={n}#{}", self.index), m)
            .expect("enumerated matrices are valid");
        self.index += 1;
        self.done = !advance(&mut self.digits, &self.radix);
        Some(space)
    }
}

/// All `n^n` index tables in lexicographic order.
pub fn enumerate_selfmaps(n: usize) -> Result<impl Iterator<Item = SelfMap>> {
    if n == 0 || n > MAX_POINTS {
        return Err(FeltError::CapExceeded(format!(
            "n must lie in 1..={MAX_POINTS}, got {n}"
        )));
    }
    Ok(tables(n)
        .enumerate()
        .map(|(k, t)| SelfMap::table(format!("map#{k}"), t)))
}

fn tables(n: usize) -> impl Iterator<Item = Vec<usize>> {
    let radix = vec![n; n];
    let mut digits = Some(vec![0usize; n]);
    std::iter::from_fn(move || {
        let cur = digits.take()?;
        let mut next = cur.clone();
        if advance(&mut next, &radix) {
            digits = Some(next);
        }
        Some(cur)
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Counterexample {
    pub case_index: u64,
    pub space: SpaceFile,
    pub start: Option<usize>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StressSummary {
    pub mode: String,
    pub n: usize,
    pub alphabet: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// (space, map) pairs examined.
    pub cases_total: u64,
    /// Pairs passing the upper band condition.
    pub cases_upper_band: u64,
    /// Orbits run: one per start point of each pair passing the upper band condition.
    pub orbits_total: u64,
    /// Orbits meeting the vanishing hypothesis.
    pub cases_hypothesis_met: u64,
    /// Orbits ending at a certified fixed point.
    pub cases_certified: u64,
    pub counterexamples: Vec<Counterexample>,
    /// Excluded from JSON so that repeated runs serialize identically.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl StressSummary {
    fn empty(mode: &str, cfg: &EnumerationConfig, seed: Option<u64>) -> Self {
        Self {
            mode: mode.to_string(),
            n: cfg.n,
            alphabet: cfg.alphabet.clone(),
            seed,
            cases_total: 0,
            cases_upper_band: 0,
            orbits_total: 0,
            cases_hypothesis_met: 0,
            cases_certified: 0,
            counterexamples: Vec::new(),
            wall_time: Duration::ZERO,
        }
    }

    pub fn is_clean(&self) -> bool {
        self.counterexamples.is_empty()
    }

    fn absorb(&mut self, t: Tally) {
        self.cases_total += t.cases;
        self.cases_upper_band += t.upper_band;
        self.orbits_total += t.orbits;
        self.cases_hypothesis_met += t.hypothesis_met;
        self.cases_certified += t.certified;
        self.counterexamples.extend(t.counterexamples);
    }
}

#[derive(Default)]
struct Tally {
    cases: u64,
    upper_band: u64,
    orbits: u64,
    hypothesis_met: u64,
    certified: u64,
    counterexamples: Vec<Counterexample>,
}

impl Tally {
    fn counterexample(
        &mut self,
        case_index: u64,
        space: &FiniteSpace,
        table: Option<&[usize]>,
        start: Option<usize>,
        reason: impl Into<String>,
    ) {
        self.counterexamples.push(Counterexample {
            case_index,
            space: SpaceFile::new(space, table),
            start,
            reason: reason.into(),
        });
    }
}

/// Runs `per_space` over every enumerated space in parallel and merges the
/// tallies in space order, so counterexamples come out sorted by case index.
fn run_grid<F>(cfg: &EnumerationConfig, mode: &str, per_space: F) -> Result<StressSummary>
where
    F: Fn(u64, &FiniteSpace, &mut Tally) + Sync,
{
    let started = Instant::now();
    let total = cfg.expected_space_count().saturating_mul(cfg.map_count());
    if total > MAX_CASES {
        return Err(FeltError::CapExceeded(format!(
            "{total} cases exceed the exhaustive ceiling of {MAX_CASES}"
        )));
    }
    let spaces: Vec<FiniteSpace> = enumerate_spaces(cfg)?.collect();
    if spaces.len() as u64 != cfg.expected_space_count() {
        return Err(FeltError::Precondition(format!(
            "enumerated {} spaces, closed form gives {}",
            spaces.len(),
            cfg.expected_space_count()
        )));
    }
    let tallies: Vec<Tally> = spaces
        .par_iter()
        .enumerate()
        .map(|(s, space)| {
            let mut t = Tally::default();
            per_space(s as u64 * cfg.map_count(), space, &mut t);
            t
        })
        .collect();
    let mut summary = StressSummary::empty(mode, cfg, None);
    for t in tallies {
        summary.absorb(t);
    }
    summary.wall_time = started.elapsed();
    Ok(summary)
}

/// Space-level axiom checks; returns the first failure.
fn axiom_failure(space: &FeltSpace, cfg: &EnumerationConfig) -> Option<String> {
    let tol = Tolerances::default();
    let checks = [
        axioms::check_indiscernibility(space, &tol),
        axioms::check_symmetry(space, &tol),
        axioms::zero_completeness_with(space, cfg.seed, 0),
    ];
    for c in checks {
        match c {
            Ok(r) if r.verdict.is_fail() => return Some(format!("{} failed", r.check)),
            Err(e) => return Some(e.to_string()),
            Ok(_) => {}
        }
    }
    let eps: Vec<f64> = cfg.alphabet.iter().copied().filter(|&v| v > 0.0).collect();
    if !eps.is_empty() {
        match axioms::check_felt_continuity(space, &eps, &tol) {
            Ok(out) => {
                if let Some(ContinuityOutcome::Failed { epsilon, .. }) =
                    out.iter().find(|o| o.certificate().is_none())
                {
                    return Some(format!("felt continuity failed at epsilon {epsilon}"));
                }
            }
            Err(e) => return Some(e.to_string()),
        }
    }
    None
}

/// Exhaustive check of the fixed-point theorem: for every (space, map) pair
/// passing the upper band condition, every orbit meeting the vanishing hypothesis must
/// end at a certified fixed point `x` with `p(x, x) = 0 = p(x, fx)`.
pub fn stress_theorem(cfg: &EnumerationConfig) -> Result<StressSummary> {
    let tol = Tolerances::default();
    run_grid(cfg, "stress", |base, fs, tally| {
        let n = fs.len();
        let space = FeltSpace::Finite(fs.clone());
        if let Some(reason) = axiom_failure(&space, cfg) {
            tally.cases += cfg.map_count();
            tally.counterexample(base, fs, None, None, reason);
            return;
        }
        for (m, table) in tables(n).enumerate() {
            let case = base + m as u64;
            tally.cases += 1;
            let map = SelfMap::table("f", table.clone());
            let c3 = match contraction::check_upper_band_finite(&space, &map) {
                Ok(c) => c,
                Err(e) => {
                    tally.counterexample(case, fs, Some(&table), None, e.to_string());
                    continue;
                }
            };
            if c3.report.verdict != Verdict::Pass {
                continue;
            }
            tally.upper_band += 1;
            for x0 in 0..n {
                tally.orbits += 1;
                let r = match solver::solve(&space, &map, &Point::Index(x0), &tol) {
                    Ok(r) => r,
                    Err(e) => {
                        tally.counterexample(case, fs, Some(&table), Some(x0), e.to_string());
                        continue;
                    }
                };
                if r.theorem_violation_candidate {
                    tally.counterexample(
                        case,
                        fs,
                        Some(&table),
                        Some(x0),
                        "theorem-violation flag fired under the upper band condition",
                    );
                }
                if !r.hypothesis_met {
                    continue;
                }
                tally.hypothesis_met += 1;
                let x = r.x_star.as_index().expect("finite orbit");
                let exact = fs.d(x, x) == 0.0 && fs.d(x, table[x]) == 0.0 && table[x] == x;
                if r.certified && exact {
                    tally.certified += 1;
                } else {
                    tally.counterexample(
                        case,
                        fs,
                        Some(&table),
                        Some(x0),
                        format!(
                            "orbit vanished at {x} without a certified fixed point \
                             (p(x,x) = {}, p(x,fx) = {})",
                            fs.d(x, x),
                            fs.d(x, table[x])
                        ),
                    );
                }
            }
        }
    })
}

/// Exhaustive comparison of the open and upper band deciders.
pub fn exhaustive_equivalence(cfg: &EnumerationConfig) -> Result<StressSummary> {
    run_grid(cfg, "equivalence", |base, fs, tally| {
        let space = FeltSpace::Finite(fs.clone());
        for (m, table) in tables(fs.len()).enumerate() {
            tally.cases += 1;
            let map = SelfMap::table("f", table.clone());
            compare_conditions(base + m as u64, fs, &space, &map, &table, tally);
        }
    })
}

/// Exhaustive comparison of the pairwise upper band decider with the
/// literal band-quantifier evaluation in [`bands`].
pub fn reduction_agreement(cfg: &EnumerationConfig) -> Result<StressSummary> {
    run_grid(cfg, "reduction", |base, fs, tally| {
        let space = FeltSpace::Finite(fs.clone());
        for (m, table) in tables(fs.len()).enumerate() {
            let case = base + m as u64;
            tally.cases += 1;
            let map = SelfMap::table("f", table.clone());
            let fast = contraction::check_upper_band_finite(&space, &map)
                .map(|c| c.report.verdict == Verdict::Pass);
            let literal = bands::upper_band_brute_force(fs, &table);
            match fast {
                Ok(v) if v == literal => tally.upper_band += v as u64,
                Ok(v) => tally.counterexample(
                    case,
                    fs,
                    Some(&table),
                    None,
                    format!("pairwise reduction says {v}, band brute force says {literal}"),
                ),
                Err(e) => tally.counterexample(case, fs, Some(&table), None, e.to_string()),
            }
        }
    })
}

fn compare_conditions(
    case: u64,
    fs: &FiniteSpace,
    space: &FeltSpace,
    map: &SelfMap,
    table: &[usize],
    tally: &mut Tally,
) {
    let c2 = contraction::check_open_band_finite(space, map).map(|r| r.verdict);
    let c3 = contraction::check_upper_band_finite(space, map).map(|c| c.report.verdict);
    match (c2, c3) {
        (Ok(a), Ok(b)) if a == b => tally.upper_band += (b == Verdict::Pass) as u64,
        (Ok(a), Ok(b)) => tally.counterexample(
            case,
            fs,
            Some(table),
            None,
            format!("open band verdict {a:?} disagrees with upper band verdict {b:?}"),
        ),
        (Err(e), _) | (_, Err(e)) => {
            tally.counterexample(case, fs, Some(table), None, e.to_string())
        }
    }
}

/// Seeded random (space, map) pairs; open and upper band verdicts must
/// agree on each.
#[allow(clippy::needless_range_loop)]
pub fn fuzz_equivalence(cfg: &EnumerationConfig) -> Result<StressSummary> {
    cfg.validate()?;
    let started = Instant::now();
    let mut summary = StressSummary::empty("fuzz", cfg, Some(cfg.seed));
    let off = cfg.off_diagonal_values();
    let diag = cfg.diagonal_values();
    if off.is_empty() && cfg.n > 1 && cfg.trials > 0 {
        return Err(FeltError::InvalidArgument(
            "alphabet needs a nonzero value for off-diagonal entries".into(),
        ));
    }
    let n = cfg.n;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut tally = Tally::default();
    for trial in 0..cfg.trials {
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            m[i][i] = diag[rng.gen_range(0..diag.len())];
            for j in i + 1..n {
                let v = off[rng.gen_range(0..off.len())];
                m[i][j] = v;
                m[j][i] = v;
            }
        }
        let table: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        let fs = FiniteSpace::new(format!("fuzz#{trial}"), m).expect("valid by construction");
        let space = FeltSpace::Finite(fs.clone());
        let map = SelfMap::table("f", table.clone());
        tally.cases += 1;
        compare_conditions(trial as u64, &fs, &space, &map, &table, &mut tally);
    }
    summary.absorb(tally);
    summary.wall_time = started.elapsed();
    Ok(summary)
}

impl StressSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("summaries always serialize")
    }
}
