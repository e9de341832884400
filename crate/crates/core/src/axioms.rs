//! Checkers for the felt metric axioms, 0-completeness and 0-continuity.
//!
//! Finite spaces are decided exactly by exhaustive scans; the first
//! violation in lexicographic order is the reported witness. Continuous
//! spaces are scanned over a [`Sampler`] and can at best earn
//! [`Verdict::PassSampled`](crate::report::Verdict::PassSampled).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{FeltError, Result};
use crate::map::SelfMap;
use crate::report::{CheckReport, Scope, Witness};
use crate::sample::Sampler;
use crate::space::{ContinuousSpace, FeltSpace, FiniteSpace, Point};
use crate::tolerance::Tolerances;

pub const INDISCERNIBILITY: &str = "indiscernibility";
pub const SYMMETRY: &str = "symmetry";
pub const FELT_CONTINUITY: &str = "felt_continuity";
pub const ZERO_COMPLETENESS: &str = "zero_completeness";
pub const ZERO_CONTINUITY: &str = "zero_continuity";

/// Candidate sequences simulated by [`check_zero_completeness_finite`].
pub const COMPLETENESS_SEQUENCES: usize = 1000;
/// Sequences driven toward the base point by [`check_zero_continuity`].
const CONTINUITY_SEQUENCES: usize = 64;
const CONTINUITY_TERMS: i32 = 60;

fn idx(i: usize) -> Point {
    Point::Index(i)
}

fn pt(c: &[f64]) -> Point {
    Point::Coords(c.to_vec())
}

/// `p(x, y) = 0` only when `x = y`. Self-distance may be positive.
pub fn check_indiscernibility(space: &FeltSpace, tol: &Tolerances) -> Result<CheckReport> {
    match space {
        FeltSpace::Finite(s) => {
            for i in 0..s.len() {
                for j in 0..s.len() {
                    if i != j && s.d(i, j) == 0.0 {
                        return Ok(CheckReport::fail(
                            INDISCERNIBILITY,
                            Witness::new(vec![idx(i), idx(j)], vec![0.0]),
                        ));
                    }
                }
            }
            Ok(CheckReport::pass(INDISCERNIBILITY).detail("scope", "exhaustive"))
        }
        FeltSpace::Continuous(s) => {
            let pairs = Sampler::new(s, tol)?.pairs();
            for (x, y) in &pairs {
                let separation = x
                    .iter()
                    .zip(y)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                let d = s.eval(x, y)?;
                if separation > tol.tol_zero && d < tol.tol_zero {
                    return Ok(CheckReport::fail(
                        INDISCERNIBILITY,
                        Witness::new(vec![pt(x), pt(y)], vec![d]),
                    ));
                }
            }
            Ok(CheckReport::pass_sampled(INDISCERNIBILITY).detail("pairs", pairs.len()))
        }
    }
}

/// `p(x, y) = p(y, x)`.
pub fn check_symmetry(space: &FeltSpace, tol: &Tolerances) -> Result<CheckReport> {
    match space {
        FeltSpace::Finite(s) => {
            for i in 0..s.len() {
                for j in i + 1..s.len() {
                    if s.d(i, j) != s.d(j, i) {
                        return Ok(CheckReport::fail(
                            SYMMETRY,
                            Witness::new(vec![idx(i), idx(j)], vec![s.d(i, j), s.d(j, i)]),
                        ));
                    }
                }
            }
            Ok(CheckReport::pass(SYMMETRY).detail("scope", "exhaustive"))
        }
        FeltSpace::Continuous(s) => {
            let pairs = Sampler::new(s, tol)?.pairs();
            for (x, y) in &pairs {
                let (a, b) = (s.eval(x, y)?, s.eval(y, x)?);
                if (a - b).abs() > tol.tol_zero {
                    return Ok(CheckReport::fail(
                        SYMMETRY,
                        Witness::new(vec![pt(x), pt(y)], vec![a, b]),
                    ));
                }
            }
            Ok(CheckReport::pass_sampled(SYMMETRY).detail("pairs", pairs.len()))
        }
    }
}

/// A δ for one ε in the felt continuity condition: whenever `p(z, y) < δ`,
/// `|p(z, x) - p(y, x)| < ε` for all `x`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaCertificate {
    pub epsilon: f64,
    pub delta: f64,
    pub scope: Scope,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ContinuityOutcome {
    Certified(DeltaCertificate),
    /// No positive δ exists (or none among the samples) for this ε.
    Failed {
        epsilon: f64,
        report: CheckReport,
    },
}

impl ContinuityOutcome {
    pub fn epsilon(&self) -> f64 {
        match self {
            ContinuityOutcome::Certified(c) => c.epsilon,
            ContinuityOutcome::Failed { epsilon, .. } => *epsilon,
        }
    }

    pub fn certificate(&self) -> Option<&DeltaCertificate> {
        match self {
            ContinuityOutcome::Certified(c) => Some(c),
            ContinuityOutcome::Failed { .. } => None,
        }
    }

    pub fn to_report(&self) -> CheckReport {
        match self {
            ContinuityOutcome::Certified(c) => {
                let r = match c.scope {
                    Scope::Sampled => CheckReport::pass_sampled(FELT_CONTINUITY),
                    _ => CheckReport::pass(FELT_CONTINUITY),
                };
                r.detail("epsilon", c.epsilon)
                    .detail("delta", c.delta)
                    .detail("scope", c.scope.to_string())
            }
            ContinuityOutcome::Failed { report, .. } => report.clone(),
        }
    }
}

/// Felt continuity, with δ uniform over all triples.
///
/// On a finite space the largest valid δ is
/// `min { p(z, y) : |p(z, x) - p(y, x)| >= ε }`; when no triple reaches ε
/// any δ works and `max(1, max p)` is reported, which keeps certified δ
/// nondecreasing in ε.
pub fn check_felt_continuity(
    space: &FeltSpace,
    epsilons: &[f64],
    tol: &Tolerances,
) -> Result<Vec<ContinuityOutcome>> {
    if epsilons.is_empty() {
        return Err(FeltError::InvalidArgument("no epsilons given".into()));
    }
    if let Some(e) = epsilons.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(FeltError::InvalidArgument(format!(
            "epsilon must be positive, got {e}"
        )));
    }
    match space {
        FeltSpace::Finite(s) => Ok(epsilons.iter().map(|&e| finite_delta(s, e)).collect()),
        FeltSpace::Continuous(s) => {
            let triples = Sampler::new(s, tol)?.triples();
            // (p(z,y), p(z,x), p(y,x)) per triple (x, y, z)
            let evaluated = triples
                .iter()
                .map(|[x, y, z]| Ok((s.eval(z, y)?, s.eval(z, x)?, s.eval(y, x)?)))
                .collect::<Result<Vec<_>>>()?;
            let ceiling = evaluated.iter().map(|t| t.0).fold(1.0, f64::max);
            Ok(epsilons
                .iter()
                .map(|&e| sampled_delta(&triples, &evaluated, e, ceiling, tol))
                .collect())
        }
    }
}

fn finite_delta(s: &FiniteSpace, epsilon: f64) -> ContinuityOutcome {
    let n = s.len();
    let mut best: Option<(f64, [usize; 3])> = None;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if (s.d(z, x) - s.d(y, x)).abs() >= epsilon {
                    let d = s.d(z, y);
                    if best.is_none_or(|(b, _)| d < b) {
                        best = Some((d, [x, y, z]));
                    }
                }
            }
        }
    }
    match best {
        None => {
            let ceiling = s.distance_values().last().copied().unwrap_or(0.0).max(1.0);
            ContinuityOutcome::Certified(DeltaCertificate {
                epsilon,
                delta: ceiling,
                scope: Scope::Exhaustive,
            })
        }
        Some((d, _)) if d > 0.0 => ContinuityOutcome::Certified(DeltaCertificate {
            epsilon,
            delta: d,
            scope: Scope::Exhaustive,
        }),
        Some((_, [x, y, z])) => ContinuityOutcome::Failed {
            epsilon,
            report: CheckReport::fail(
                FELT_CONTINUITY,
                Witness::new(
                    vec![idx(x), idx(y), idx(z)],
                    vec![s.d(z, y), s.d(z, x), s.d(y, x)],
                ),
            )
            .detail("epsilon", epsilon)
            .detail("scope", "exhaustive"),
        },
    }
}

fn sampled_delta(
    triples: &[[Vec<f64>; 3]],
    evaluated: &[(f64, f64, f64)],
    epsilon: f64,
    ceiling: f64,
    tol: &Tolerances,
) -> ContinuityOutcome {
    let mut best: Option<(f64, usize)> = None;
    for (k, &(zy, zx, yx)) in evaluated.iter().enumerate() {
        if (zx - yx).abs() >= epsilon + tol.tol_zero && best.is_none_or(|(b, _)| zy < b) {
            best = Some((zy, k));
        }
    }
    match best {
        Some((d, k)) if d < tol.tol_zero => {
            let [x, y, z] = &triples[k];
            let (zy, zx, yx) = evaluated[k];
            ContinuityOutcome::Failed {
                epsilon,
                report: CheckReport::fail(
                    FELT_CONTINUITY,
                    Witness::new(vec![pt(x), pt(y), pt(z)], vec![zy, zx, yx]),
                )
                .detail("epsilon", epsilon)
                .detail("scope", "sampled"),
            }
        }
        other => ContinuityOutcome::Certified(DeltaCertificate {
            epsilon,
            delta: other.map_or(ceiling, |(d, _)| d),
            scope: Scope::Sampled,
        }),
    }
}

/// 0-completeness of a finite space satisfying indiscernibility.
///
/// A sequence with `p(x_n, x_m) -> 0` is eventually constant at some `x` with
/// `p(x, x) = 0`, which is then its 0-limit, so the verdict is structural.
/// Seeded candidate sequences are simulated on top and any one meeting the
/// hypothesis without a 0-limit would turn the verdict into a failure.
pub fn check_zero_completeness_finite(space: &FeltSpace, tol: &Tolerances) -> Result<CheckReport> {
    zero_completeness_with(space, tol.seed, COMPLETENESS_SEQUENCES)
}

pub(crate) fn zero_completeness_with(
    space: &FeltSpace,
    seed: u64,
    sequences: usize,
) -> Result<CheckReport> {
    let s = space.as_finite().ok_or_else(|| {
        FeltError::Precondition("0-completeness is decided on finite spaces only".into())
    })?;
    if check_indiscernibility(space, &Tolerances::default())?
        .verdict
        .is_fail()
    {
        return Err(FeltError::Precondition(format!(
            "`{}` violates indiscernibility; the structural argument needs it",
            s.name()
        )));
    }
    let n = s.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hypothesis_met = 0usize;
    for _ in 0..sequences {
        let prefix = rng.gen_range(0..4);
        let mut seq: Vec<usize> = (0..prefix).map(|_| rng.gen_range(0..n)).collect();
        let tail_start = seq.len();
        let support: Vec<usize> = if rng.gen_bool(0.5) {
            vec![rng.gen_range(0..n)]
        } else {
            let k = rng.gen_range(1..=n.min(3));
            (0..k).map(|_| rng.gen_range(0..n)).collect()
        };
        seq.extend((0..12).map(|_| support[rng.gen_range(0..support.len())]));
        let tail = &seq[tail_start..];
        let cauchy = tail.iter().all(|&a| tail.iter().all(|&b| s.d(a, b) == 0.0));
        if !cauchy {
            continue;
        }
        hypothesis_met += 1;
        let has_limit = (0..n).any(|x| tail.iter().all(|&a| s.d(a, x) == 0.0));
        if !has_limit {
            let points = seq.iter().map(|&i| idx(i)).collect();
            let values = tail.windows(2).map(|w| s.d(w[0], w[1])).collect();
            return Ok(
                CheckReport::fail(ZERO_COMPLETENESS, Witness::new(points, values))
                    .detail("argument", "simulation"),
            );
        }
    }
    Ok(CheckReport::pass(ZERO_COMPLETENESS)
        .detail("argument", "structural")
        .detail("simulated_sequences", sequences)
        .detail("hypothesis_met", hypothesis_met))
}

/// 0-continuity of `map` at `x`.
///
/// Finite spaces: a sequence 0-converges to `x` exactly when it is eventually
/// inside `{y : p(y, x) = 0}`, so `f` is 0-continuous at `x` iff
/// `p(fy, fx) = 0` for every such `y`. Under indiscernibility this is
/// "`p(x, x) > 0` (vacuous) or `p(fx, fx) = 0`".
///
/// Continuous spaces: sequences `x + (u - x)·2^-k` are driven toward `x`
/// from sampled `u`; those whose tail window has `p(x_k, x) < tol_zero`
/// must also have `p(f x_k, f x) < tol_zero` there.
pub fn check_zero_continuity(
    space: &FeltSpace,
    map: &SelfMap,
    x: &Point,
    tol: &Tolerances,
) -> Result<CheckReport> {
    map.check_compatible(space)?;
    space.contains(x)?;
    match space {
        FeltSpace::Finite(s) => {
            let table = map.as_table().expect("compatible finite map is a table");
            let xi = x.as_index().expect("checked by contains");
            let fx = table[xi];
            let zero_set: Vec<usize> = (0..s.len()).filter(|&y| s.d(y, xi) == 0.0).collect();
            if zero_set.is_empty() {
                return Ok(CheckReport::pass(ZERO_CONTINUITY)
                    .detail("x", xi)
                    .detail("vacuous", true));
            }
            for &y in &zero_set {
                let d = s.d(table[y], fx);
                if d != 0.0 {
                    return Ok(CheckReport::fail(
                        ZERO_CONTINUITY,
                        Witness::new(vec![idx(y), idx(xi)], vec![s.d(y, xi), d]),
                    )
                    .detail("x", xi));
                }
            }
            Ok(CheckReport::pass(ZERO_CONTINUITY)
                .detail("x", xi)
                .detail("vacuous", false))
        }
        FeltSpace::Continuous(s) => sampled_zero_continuity(s, space, map, x, tol),
    }
}

fn sampled_zero_continuity(
    s: &ContinuousSpace,
    space: &FeltSpace,
    map: &SelfMap,
    x: &Point,
    tol: &Tolerances,
) -> Result<CheckReport> {
    let xc = x.coords().expect("checked by contains");
    let fx = map.apply_coords(space, xc)?;
    let mut sampler = Sampler::with_seed(s, CONTINUITY_SEQUENCES, tol.seed)?;
    let window = tol.window.min(CONTINUITY_TERMS as usize);
    let (lo, hi) = (s.domain().lower(), s.domain().upper());
    let mut converging = 0usize;
    for start in sampler.points().iter().skip(sampler.grid().len()) {
        // Tail: the first `window` consecutive terms within tol_zero of x.
        let mut tail: Vec<(Vec<f64>, f64)> = Vec::with_capacity(window);
        for k in 0..=CONTINUITY_TERMS {
            let t = 0.5f64.powi(k);
            let xk: Vec<f64> = xc
                .iter()
                .zip(start)
                .enumerate()
                .map(|(a, (&c, &u))| (c + (u - c) * t).clamp(lo[a], hi[a]))
                .collect();
            let d = s.eval(&xk, xc)?;
            if d < tol.tol_zero {
                tail.push((xk, d));
                if tail.len() == window {
                    break;
                }
            } else {
                tail.clear();
            }
        }
        if tail.len() < window {
            continue;
        }
        converging += 1;
        for (xk, d) in &tail {
            let img = s.eval(&map.apply_coords(space, xk)?, &fx)?;
            if img >= tol.tol_zero {
                return Ok(CheckReport::fail(
                    ZERO_CONTINUITY,
                    Witness::new(vec![pt(xk), x.clone()], vec![*d, img]),
                ));
            }
        }
    }
    Ok(CheckReport::pass_sampled(ZERO_CONTINUITY)
        .detail("sequences", CONTINUITY_SEQUENCES)
        .detail("zero_convergent", converging)
        .detail("vacuous", converging == 0))
}

/// Re-evaluates a failed report's witness and confirms the violation it
/// records. Used by tests and by the CLI's self-checks.
pub fn witness_reproduces(space: &FeltSpace, report: &CheckReport, tol: &Tolerances) -> bool {
    let Some(w) = &report.witness else {
        return false;
    };
    let d = |a: &Point, b: &Point| space.distance(a, b).ok();
    let zero = |v: f64| {
        if space.is_finite() {
            v == 0.0
        } else {
            v < tol.tol_zero
        }
    };
    match (report.check.as_str(), w.points.as_slice()) {
        (INDISCERNIBILITY, [x, y]) => x != y && d(x, y).is_some_and(zero),
        (SYMMETRY, [x, y]) => match (d(x, y), d(y, x)) {
            (Some(a), Some(b)) => {
                w.values == [a, b]
                    && if space.is_finite() {
                        a != b
                    } else {
                        (a - b).abs() > tol.tol_zero
                    }
            }
            _ => false,
        },
        (FELT_CONTINUITY, [x, y, z]) => {
            let eps = report.detail.get("epsilon").and_then(|v| v.as_f64());
            match (d(z, y), d(z, x), d(y, x), eps) {
                (Some(zy), Some(zx), Some(yx), Some(e)) => {
                    w.values == [zy, zx, yx] && zero(zy) && (zx - yx).abs() >= e
                }
                _ => false,
            }
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Verdict;

    fn finite(m: Vec<Vec<f64>>) -> FeltSpace {
        FiniteSpace::new("t", m).unwrap().into()
    }

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn indiscernibility_examples() {
        let r =
            check_indiscernibility(&finite(vec![vec![0.0, 0.0], vec![0.0, 0.0]]), &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.witness.as_ref().unwrap().points, vec![idx(0), idx(1)]);
        let r =
            check_indiscernibility(&finite(vec![vec![0.5, 1.0], vec![1.0, 0.0]]), &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        let maxpm = FeltSpace::builtin("maxpm:[0,1]").unwrap();
        let r = check_indiscernibility(&maxpm, &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::PassSampled);
        assert!(r.witness.is_none());
    }

    #[test]
    fn symmetry_examples() {
        let s = finite(vec![vec![0.0, 1.0], vec![2.0, 0.0]]);
        let r = check_symmetry(&s, &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.witness.as_ref().unwrap().values, vec![1.0, 2.0]);
        assert!(witness_reproduces(&s, &r, &tol()));
        let r = check_symmetry(&finite(vec![vec![0.0, 1.0], vec![1.0, 0.0]]), &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        let r = check_symmetry(&FeltSpace::builtin("euclid:[0,1]").unwrap(), &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::PassSampled);
    }

    #[test]
    fn continuity_on_euclid_and_maxpm() {
        let e = FeltSpace::builtin("euclid:[0,1]").unwrap();
        let out = check_felt_continuity(&e, &[0.1], &tol()).unwrap();
        let c = out[0].certificate().expect("certified");
        assert_eq!(c.scope, Scope::Sampled);
        assert!(c.delta >= 0.1, "delta {}", c.delta);

        let m = FeltSpace::builtin("maxpm:[0,1]").unwrap();
        let out = check_felt_continuity(&m, &[0.2], &tol()).unwrap();
        let c = out[0].certificate().expect("certified");
        assert!(c.delta >= 0.2, "delta {}", c.delta);
    }

    #[test]
    fn continuity_fails_without_indiscernibility() {
        // p(0,1) = 0 but the two points see point 2 differently.
        let s = finite(vec![
            vec![0.0, 0.0, 1.0],
            vec![0.0, 0.0, 2.0],
            vec![1.0, 2.0, 0.0],
        ]);
        let out = check_felt_continuity(&s, &[0.5], &tol()).unwrap();
        match &out[0] {
            ContinuityOutcome::Failed { report, .. } => {
                assert!(witness_reproduces(&s, report, &tol()));
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn continuity_rejects_bad_epsilons() {
        let s = finite(vec![vec![0.0]]);
        assert!(check_felt_continuity(&s, &[], &tol()).is_err());
        assert!(check_felt_continuity(&s, &[0.0], &tol()).is_err());
    }

    #[test]
    fn completeness_examples() {
        let r = check_zero_completeness_finite(&FeltSpace::builtin("discrete:3").unwrap(), &tol())
            .unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.detail["hypothesis_met"].as_u64().unwrap() > 0);
        let r = check_zero_completeness_finite(&finite(vec![vec![0.5]]), &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.detail["hypothesis_met"].as_u64(), Some(0));
        let r =
            check_zero_completeness_finite(&finite(vec![vec![0.0, 1.0], vec![1.0, 0.0]]), &tol())
                .unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn completeness_needs_indiscernibility() {
        let s = finite(vec![vec![0.0, 0.0], vec![0.0, 0.0]]);
        assert!(matches!(
            check_zero_completeness_finite(&s, &tol()),
            Err(FeltError::Precondition(_))
        ));
        let e = FeltSpace::builtin("euclid:[0,1]").unwrap();
        assert!(check_zero_completeness_finite(&e, &tol()).is_err());
    }

    #[test]
    fn zero_continuity_finite_rule() {
        let s = finite(vec![vec![0.5, 1.0], vec![1.0, 0.0]]);
        let to_zero = SelfMap::table("to0", vec![0, 0]);
        let r = check_zero_continuity(&s, &to_zero, &idx(0), &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.detail["vacuous"], true);
        // p(1,1) = 0 but p(f1, f1) = p(0,0) = 0.5
        let r = check_zero_continuity(&s, &to_zero, &idx(1), &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        let ident = SelfMap::identity(2);
        let r = check_zero_continuity(&s, &ident, &idx(1), &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.detail["vacuous"], false);
    }

    #[test]
    fn zero_continuity_cos() {
        let e = FeltSpace::builtin("euclid:[0,1]").unwrap();
        let cos = SelfMap::builtin("cos", &e).unwrap();
        let r = check_zero_continuity(&e, &cos, &Point::real(0.5), &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::PassSampled);
        assert!(r.detail["zero_convergent"].as_u64().unwrap() > 0);
    }

    #[test]
    fn zero_continuity_detects_a_jump() {
        let e = FeltSpace::builtin("euclid:[0,1]").unwrap();
        let step = SelfMap::scalar("step", |x| if x < 0.5 { 0.0 } else { 1.0 });
        let r = check_zero_continuity(&e, &step, &Point::real(0.5), &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
    }

    #[test]
    fn zero_continuity_half_on_maxpm() {
        let m = FeltSpace::builtin("maxpm:[0,2]").unwrap();
        let half = SelfMap::builtin("half", &m).unwrap();
        let r = check_zero_continuity(&m, &half, &Point::real(0.0), &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::PassSampled);
        assert_eq!(r.detail["vacuous"], false);
        let r = check_zero_continuity(&m, &half, &Point::real(1.0), &tol()).unwrap();
        assert_eq!(r.detail["vacuous"], true);
    }
}
