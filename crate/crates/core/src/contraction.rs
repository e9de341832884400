//! Band conditions on self-maps.
//!
//! The upper band condition: for each `α > 0` there is an `ε > 0` such that
//! `α <= p(y, x) < α + ε` implies `p(fy, fx) <= α`. The open band condition uses the
//! open band `α - ε < p(y, x) < α + ε` instead. On a finite space both reduce
//! to nonexpansiveness on pairs at positive distance, since a small enough
//! band isolates a single tabulated value.

use serde::Serialize;

use crate::error::{FeltError, Result};
use crate::map::SelfMap;
use crate::report::{CheckReport, Scope, Witness};
use crate::sample::Sampler;
use crate::space::{FeltSpace, FiniteSpace, Point};
use crate::tolerance::Tolerances;

pub const OPEN_BAND: &str = "open_band";
pub const UPPER_BAND: &str = "upper_band";
pub const BAND_EQUIVALENCE: &str = "band_equivalence";
pub const NONEXPANSIVE: &str = "nonexpansive";

/// Returned by [`banach_epsilon`] when `c = 0`, where every ε works.
pub const DEFAULT_EPSILON_MAX: f64 = 1e9;

/// Band widths tried by sampled checks, widest first.
pub const DEFAULT_EPSILON_GRID: [f64; 6] = [1.0, 0.5, 0.25, 0.1, 0.05, 0.02];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModulusLevel {
    pub alpha: f64,
    pub epsilon: f64,
    pub scope: Scope,
}

/// Recorded `α ↦ ε` assignments certifying the upper band condition at probed levels.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ModulusProfile {
    pub levels: Vec<ModulusLevel>,
}

impl ModulusProfile {
    pub fn epsilon_at(&self, alpha: f64) -> Option<f64> {
        self.levels
            .iter()
            .find(|l| l.alpha == alpha)
            .map(|l| l.epsilon)
    }
}

/// A Banach contraction factor `0 <= c < 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ContractionFactor(f64);

impl ContractionFactor {
    pub fn new(c: f64) -> Result<Self> {
        if (0.0..1.0).contains(&c) {
            Ok(Self(c))
        } else {
            Err(FeltError::InvalidArgument(format!(
                "contraction factor must lie in [0, 1), got {c}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// The largest ε with `c·(α + ε) <= α`, i.e. `α(1 - c)/c`.
pub fn banach_epsilon(c: ContractionFactor, alpha: f64) -> Result<f64> {
    banach_epsilon_capped(c, alpha, DEFAULT_EPSILON_MAX)
}

pub fn banach_epsilon_capped(c: ContractionFactor, alpha: f64, cap: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(FeltError::InvalidArgument(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    if cap.is_nan() || cap <= 0.0 {
        return Err(FeltError::InvalidArgument(format!(
            "epsilon cap must be positive, got {cap}"
        )));
    }
    let c = c.value();
    if c == 0.0 {
        Ok(cap)
    } else {
        Ok((alpha * (1.0 - c) / c).min(cap))
    }
}

/// A condition verdict and, on success, the certifying profile.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionOutcome {
    pub report: CheckReport,
    pub profile: Option<ModulusProfile>,
}

fn table_for<'a>(space: &'a FeltSpace, map: &'a SelfMap) -> Result<(&'a FiniteSpace, &'a [usize])> {
    map.check_compatible(space)?;
    match (space.as_finite(), map.as_table()) {
        (Some(s), Some(t)) => Ok((s, t)),
        _ => Err(FeltError::Precondition(format!(
            "`{}` is not a finite space",
            space.name()
        ))),
    }
}

fn pair_witness(s: &FiniteSpace, t: &[usize], y: usize, x: usize) -> Witness {
    Witness::new(
        vec![Point::Index(y), Point::Index(x)],
        vec![s.d(y, x), s.d(t[y], t[x])],
    )
}

/// Exact decision of the upper band condition on a finite space through the pairwise
/// reduction `p(fy, fx) <= p(y, x)` whenever `p(y, x) > 0`.
///
/// On success every positive tabulated value `α` gets `ε(α)` equal to the
/// gap to the next larger value, or 1 at the maximum.
pub fn check_upper_band_finite(space: &FeltSpace, map: &SelfMap) -> Result<ConditionOutcome> {
    let (s, t) = table_for(space, map)?;
    let n = s.len();
    for y in 0..n {
        for x in 0..n {
            let d = s.d(y, x);
            if d > 0.0 && s.d(t[y], t[x]) > d {
                return Ok(ConditionOutcome {
                    report: CheckReport::fail(UPPER_BAND, pair_witness(s, t, y, x))
                        .detail("alpha", d)
                        .detail("scope", "exhaustive"),
                    profile: None,
                });
            }
        }
    }
    let values: Vec<f64> = s
        .distance_values()
        .into_iter()
        .filter(|&v| v > 0.0)
        .collect();
    let levels = values
        .iter()
        .enumerate()
        .map(|(k, &alpha)| ModulusLevel {
            alpha,
            epsilon: values.get(k + 1).map_or(1.0, |next| next - alpha),
            scope: Scope::Exhaustive,
        })
        .collect();
    Ok(ConditionOutcome {
        report: CheckReport::pass(UPPER_BAND).detail("scope", "exhaustive"),
        profile: Some(ModulusProfile { levels }),
    })
}

/// Exact decision of the open band condition by a direct search over open bands.
///
/// Probes every positive tabulated value and every point strictly between
/// neighbouring values (and above the maximum). At each probe `α` the band
/// half-width stays below `α` and below half the distance to the nearest
/// other tabulated value, so the band holds at most the value `α` itself.
pub fn check_open_band_finite(space: &FeltSpace, map: &SelfMap) -> Result<CheckReport> {
    let (s, t) = table_for(space, map)?;
    let n = s.len();
    let mut marks = vec![0.0];
    marks.extend(s.distance_values());
    marks.dedup();
    let mut probes: Vec<f64> = Vec::new();
    for w in marks.windows(2) {
        probes.push((w[0] + w[1]) / 2.0);
        probes.push(w[1]);
    }
    probes.push(marks.last().copied().unwrap_or(0.0) + 1.0);
    probes.retain(|&a| a > 0.0);
    probes.sort_by(f64::total_cmp);

    for &alpha in &probes {
        let nearest_other = marks
            .iter()
            .filter(|&&m| m != alpha)
            .map(|&m| (m - alpha).abs())
            .fold(f64::INFINITY, f64::min);
        let eps = (alpha / 2.0).min(nearest_other / 2.0);
        for y in 0..n {
            for x in 0..n {
                let d = s.d(y, x);
                if alpha - eps < d && d < alpha + eps && s.d(t[y], t[x]) > alpha {
                    return Ok(CheckReport::fail(OPEN_BAND, pair_witness(s, t, y, x))
                        .detail("alpha", alpha)
                        .detail("epsilon", eps)
                        .detail("scope", "exhaustive"));
                }
            }
        }
    }
    Ok(CheckReport::pass(OPEN_BAND)
        .detail("probes", probes.len())
        .detail("scope", "exhaustive"))
}

/// Runs both finite deciders and passes iff their verdicts agree.
/// A disagreement is a defect in this crate, not in the input.
pub fn check_band_equivalence(space: &FeltSpace, map: &SelfMap) -> Result<CheckReport> {
    let c2 = check_open_band_finite(space, map)?;
    let c3 = check_upper_band_finite(space, map)?.report;
    let agree = c2.verdict == c3.verdict;
    let report = if agree {
        CheckReport::pass(BAND_EQUIVALENCE)
    } else {
        let witness = c3
            .witness
            .clone()
            .or_else(|| c2.witness.clone())
            .expect("one side failed with a witness");
        CheckReport::fail(BAND_EQUIVALENCE, witness)
    };
    Ok(report
        .detail(OPEN_BAND, serde_json::to_value(c2.verdict).unwrap())
        .detail(UPPER_BAND, serde_json::to_value(c3.verdict).unwrap()))
}

/// `p(fy, fx) <= p(y, x)` on all pairs with `p(y, x) > 0`; exact on finite
/// spaces, sampled (with `tol_zero` slack) on continuous ones.
pub fn nonexpansive_on_positive(
    space: &FeltSpace,
    map: &SelfMap,
    tol: &Tolerances,
) -> Result<CheckReport> {
    map.check_compatible(space)?;
    match space {
        FeltSpace::Finite(s) => {
            let t = map.as_table().expect("compatible finite map is a table");
            for y in 0..s.len() {
                for x in 0..s.len() {
                    let d = s.d(y, x);
                    if d > 0.0 && s.d(t[y], t[x]) > d {
                        return Ok(CheckReport::fail(NONEXPANSIVE, pair_witness(s, t, y, x)));
                    }
                }
            }
            Ok(CheckReport::pass(NONEXPANSIVE).detail("scope", "exhaustive"))
        }
        FeltSpace::Continuous(s) => {
            let pairs = Sampler::new(s, tol)?.pairs();
            for (y, x) in &pairs {
                let d = s.eval(y, x)?;
                if d <= tol.tol_zero {
                    continue;
                }
                let img = s.eval(&map.apply_coords(space, y)?, &map.apply_coords(space, x)?)?;
                if img > d + tol.tol_zero {
                    return Ok(CheckReport::fail(
                        NONEXPANSIVE,
                        Witness::new(
                            vec![Point::Coords(y.clone()), Point::Coords(x.clone())],
                            vec![d, img],
                        ),
                    ));
                }
            }
            Ok(CheckReport::pass_sampled(NONEXPANSIVE).detail("pairs", pairs.len()))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum LevelOutcome {
    /// The widest grid ε with no violation among the sampled band pairs.
    Accepted {
        #[serde(flatten)]
        level: ModulusLevel,
        band_pairs: usize,
    },
    /// Every grid ε had a violation; the witness is from the narrowest band.
    Violated {
        alpha: f64,
        epsilon: f64,
        witness: Witness,
    },
}

/// Per-level results of [`check_upper_band_sampled`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampledUpperBand {
    pub levels: Vec<LevelOutcome>,
    pub pairs: usize,
}

impl SampledUpperBand {
    pub fn profile(&self) -> ModulusProfile {
        ModulusProfile {
            levels: self
                .levels
                .iter()
                .filter_map(|l| match l {
                    LevelOutcome::Accepted { level, .. } => Some(level.clone()),
                    LevelOutcome::Violated { .. } => None,
                })
                .collect(),
        }
    }

    pub fn violations(&self) -> impl Iterator<Item = &LevelOutcome> {
        self.levels
            .iter()
            .filter(|l| matches!(l, LevelOutcome::Violated { .. }))
    }

    pub fn report(&self) -> CheckReport {
        let first_violation = self.levels.iter().find_map(|l| match l {
            LevelOutcome::Violated {
                alpha,
                epsilon,
                witness,
            } => Some((alpha, epsilon, witness)),
            LevelOutcome::Accepted { .. } => None,
        });
        let r = match first_violation {
            Some((alpha, epsilon, w)) => CheckReport::fail(UPPER_BAND, w.clone())
                .detail("alpha", *alpha)
                .detail("epsilon", *epsilon),
            None => CheckReport::pass_sampled(UPPER_BAND),
        };
        r.detail("levels", self.levels.len())
            .detail("violated_levels", self.violations().count())
            .detail("pairs", self.pairs)
            .detail("scope", "sampled")
    }
}

/// The upper band condition by sampling a continuous space.
///
/// For each `α` the grid is tried widest first; the first ε whose band
/// `[α, α + ε)` holds no sampled pair with `p(fy, fx) > α + tol_zero` is
/// accepted.
pub fn check_upper_band_sampled(
    space: &FeltSpace,
    map: &SelfMap,
    alphas: &[f64],
    epsilon_grid: &[f64],
    tol: &Tolerances,
) -> Result<SampledUpperBand> {
    map.check_compatible(space)?;
    let s = space.as_continuous().ok_or_else(|| {
        FeltError::Precondition("sampled the upper band condition needs a continuous space".into())
    })?;
    let positive = |v: &[f64], what: &str| -> Result<()> {
        if v.is_empty() {
            return Err(FeltError::InvalidArgument(format!("{what} is empty")));
        }
        if let Some(bad) = v.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
            return Err(FeltError::InvalidArgument(format!(
                "{what} entries must be positive, got {bad}"
            )));
        }
        Ok(())
    };
    positive(alphas, "alpha list")?;
    positive(epsilon_grid, "epsilon grid")?;
    let mut grid = epsilon_grid.to_vec();
    grid.sort_by(|a, b| b.total_cmp(a));
    grid.dedup();

    let pairs = Sampler::new(s, tol)?.pairs();
    let evaluated = pairs
        .iter()
        .map(|(y, x)| {
            let d = s.eval(y, x)?;
            let img = s.eval(&map.apply_coords(space, y)?, &map.apply_coords(space, x)?)?;
            Ok((d, img))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut levels = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let mut outcome = None;
        let mut last_violation = None;
        for &eps in &grid {
            let mut band = 0usize;
            let mut violation = None;
            for (k, &(d, img)) in evaluated.iter().enumerate() {
                if alpha <= d && d < alpha + eps {
                    band += 1;
                    if img > alpha + tol.tol_zero && violation.is_none() {
                        violation = Some(k);
                    }
                }
            }
            match violation {
                None => {
                    outcome = Some(LevelOutcome::Accepted {
                        level: ModulusLevel {
                            alpha,
                            epsilon: eps,
                            scope: Scope::Sampled,
                        },
                        band_pairs: band,
                    });
                    break;
                }
                Some(k) => last_violation = Some((eps, k)),
            }
        }
        levels.push(outcome.unwrap_or_else(|| {
            let (eps, k) = last_violation.expect("grid is nonempty");
            let (y, x) = &pairs[k];
            LevelOutcome::Violated {
                alpha,
                epsilon: eps,
                witness: Witness::new(
                    vec![Point::Coords(y.clone()), Point::Coords(x.clone())],
                    vec![evaluated[k].0, evaluated[k].1],
                ),
            }
        }));
    }
    Ok(SampledUpperBand {
        levels,
        pairs: pairs.len(),
    })
}

/// Deciles of the positive sampled distances, ascending and deduplicated.
pub fn probe_alphas(space: &FeltSpace, tol: &Tolerances) -> Result<Vec<f64>> {
    let s = space.as_continuous().ok_or_else(|| {
        FeltError::Precondition("alpha probes are drawn from continuous spaces".into())
    })?;
    let mut d = Sampler::new(s, tol)?
        .pairs()
        .iter()
        .map(|(y, x)| s.eval(y, x))
        .collect::<Result<Vec<_>>>()?;
    d.retain(|&v| v > tol.tol_zero);
    if d.is_empty() {
        return Ok(Vec::new());
    }
    d.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = (1..10).map(|k| d[(k * (d.len() - 1)) / 10]).collect();
    out.dedup();
    Ok(out)
}
