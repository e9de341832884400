//! Picard iteration with certification of the limit point.
//!
//! The orbit `x_0, f x_0, f² x_0, …` is run until the consecutive distances
//! `p(x_{n+1}, x_n)` vanish, the orbit revisits a state (finite spaces), or
//! the iteration cap is hit. The last iterate is then certified through
//! `p(x, fx) = 0` and `p(x, x) = 0`; on a felt metric the former forces
//! `fx = x`.

use serde::Serialize;

use crate::error::Result;
use crate::map::SelfMap;
use crate::space::{FeltSpace, Point};
use crate::tolerance::Tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// `window` consecutive steps below `tol_zero`, or on a finite space an
    /// exactly repeating tail whose steps are all zero.
    Vanished,
    MaxIter,
    /// A finite orbit re-entered a cycle with a positive step.
    CycleDetected,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitTrace {
    pub points: Vec<Point>,
    /// `consec[k] = p(points[k + 1], points[k])`.
    pub consec: Vec<f64>,
    /// `p(x_n, x_m)` over the last `window` iterates.
    pub pair_window: Vec<Vec<f64>>,
    pub stopped_reason: StopReason,
    /// For finite orbits that revisited a state: the index of the first
    /// visit. The last point equals `points[cycle_start]`.
    pub cycle_start: Option<usize>,
}

impl OrbitTrace {
    pub fn last(&self) -> &Point {
        self.points
            .last()
            .expect("orbits hold at least the start point")
    }

    pub fn iterations(&self) -> usize {
        self.consec.len()
    }

    /// Cycle length for finite orbits that revisited a state.
    pub fn period(&self) -> Option<usize> {
        self.cycle_start.map(|j| self.points.len() - 1 - j)
    }
}

pub fn picard_orbit(
    space: &FeltSpace,
    map: &SelfMap,
    x0: &Point,
    tol: &Tolerances,
) -> Result<OrbitTrace> {
    tol.validate()?;
    map.check_compatible(space)?;
    space.contains(x0)?;

    let mut visited: Vec<Option<usize>> = match space {
        FeltSpace::Finite(s) => vec![None; s.len()],
        FeltSpace::Continuous(_) => Vec::new(),
    };
    if let Some(i) = x0.as_index() {
        visited[i] = Some(0);
    }
    let mut points = vec![x0.clone()];
    let mut consec = Vec::new();
    let mut streak = 0usize;
    let mut stopped = StopReason::MaxIter;
    let mut cycle_start = None;

    while consec.len() < tol.max_iter {
        let cur = points.last().expect("nonempty");
        let next = map.apply(space, cur)?;
        let d = space.distance(&next, cur)?;
        consec.push(d);
        match next.as_index() {
            Some(i) => {
                points.push(next);
                if let Some(j) = visited[i] {
                    cycle_start = Some(j);
                    stopped = if consec[j..].iter().all(|&v| v == 0.0) {
                        StopReason::Vanished
                    } else {
                        StopReason::CycleDetected
                    };
                    break;
                }
                visited[i] = Some(points.len() - 1);
            }
            None => {
                points.push(next);
                if d < tol.tol_zero {
                    streak += 1;
                    if streak >= tol.window {
                        stopped = StopReason::Vanished;
                        refine(space, map, &mut points, &mut consec, tol.max_iter)?;
                        break;
                    }
                } else {
                    streak = 0;
                }
            }
        }
    }

    let w = tol.window.min(points.len());
    let tail = &points[points.len() - w..];
    let pair_window = tail
        .iter()
        .map(|a| tail.iter().map(|b| space.distance(a, b)).collect())
        .collect::<Result<Vec<Vec<f64>>>>()?;

    Ok(OrbitTrace {
        points,
        consec,
        pair_window,
        stopped_reason: stopped,
        cycle_start,
    })
}

/// Keeps iterating while each step is strictly shorter than the previous
/// one, so the last iterate settles where floating point stops moving it. A
/// step that fails to shrink is discarded.
fn refine(
    space: &FeltSpace,
    map: &SelfMap,
    points: &mut Vec<Point>,
    consec: &mut Vec<f64>,
    max_iter: usize,
) -> Result<()> {
    while consec.len() < max_iter {
        let cur = points.last().expect("nonempty");
        let next = map.apply(space, cur)?;
        let d = space.distance(&next, cur)?;
        let prev = *consec
            .last()
            .expect("refinement follows a vanishing window");
        if d >= prev {
            break;
        }
        points.push(next);
        consec.push(d);
    }
    Ok(())
}

/// Whether the orbit realized `lim p(x_{n+1}, x_n) = 0`.
pub fn vanishing_hypothesis(trace: &OrbitTrace) -> bool {
    trace.stopped_reason == StopReason::Vanished
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixedPointResult {
    pub x_star: Point,
    /// `p(x*, f x*)`.
    pub residual_fix: f64,
    /// `p(x*, x*)`.
    pub self_dist: f64,
    /// Last value of `|p(x_{n+1}, f x*) - p(x*, f x*)|` along the orbit.
    pub tail_residual: Option<f64>,
    pub certified: bool,
    pub hypothesis_met: bool,
    pub stopped_reason: Option<StopReason>,
    pub trace_len: usize,
    pub iterations: usize,
    pub final_consec: Option<f64>,
    /// The orbit's steps vanished below half of a positive fixed-point
    /// residual. Cannot happen when the upper band condition holds.
    pub theorem_violation_candidate: bool,
    #[serde(skip)]
    pub trace: Option<OrbitTrace>,
    #[serde(skip)]
    pub residuals: Vec<f64>,
}

fn within(space: &FeltSpace, v: f64, tol: &Tolerances) -> bool {
    if space.is_finite() {
        v == 0.0
    } else {
        v <= tol.tol_fixed
    }
}

/// Evaluates `p(x, fx)` and `p(x, x)`; certified when both vanish (exactly
/// on finite spaces, within `tol_fixed` otherwise).
pub fn verify_fixed_point(
    space: &FeltSpace,
    map: &SelfMap,
    x: &Point,
    tol: &Tolerances,
) -> Result<FixedPointResult> {
    let fx = map.apply(space, x)?;
    let residual_fix = space.distance(x, &fx)?;
    let self_dist = space.distance(x, x)?;
    Ok(FixedPointResult {
        x_star: x.clone(),
        residual_fix,
        self_dist,
        tail_residual: None,
        certified: within(space, residual_fix, tol) && within(space, self_dist, tol),
        hypothesis_met: false,
        stopped_reason: None,
        trace_len: 0,
        iterations: 0,
        final_consec: None,
        theorem_violation_candidate: false,
        trace: None,
        residuals: Vec::new(),
    })
}

/// `r_n = |p(x_{n+1}, f x*) - p(x*, f x*)|` for each recorded step.
pub fn residual_diagnostic(
    space: &FeltSpace,
    map: &SelfMap,
    trace: &OrbitTrace,
    x_star: &Point,
) -> Result<Vec<f64>> {
    let fx = map.apply(space, x_star)?;
    let base = space.distance(x_star, &fx)?;
    trace.points[1..]
        .iter()
        .map(|p| Ok((space.distance(p, &fx)? - base).abs()))
        .collect()
}

pub fn solve(
    space: &FeltSpace,
    map: &SelfMap,
    x0: &Point,
    tol: &Tolerances,
) -> Result<FixedPointResult> {
    let trace = picard_orbit(space, map, x0, tol)?;
    let hypothesis_met = vanishing_hypothesis(&trace);
    let x_star = trace.last().clone();
    let mut result = verify_fixed_point(space, map, &x_star, tol)?;
    let residuals = residual_diagnostic(space, map, &trace, &x_star)?;

    // β = residual_fix / 2: steps settling below β while p(x*, fx*) = 2β > 0
    // contradict the band condition.
    let beta = result.residual_fix / 2.0;
    let tail = &trace.consec[trace.consec.len().saturating_sub(tol.window)..];
    result.theorem_violation_candidate = hypothesis_met
        && !within(space, result.residual_fix, tol)
        && tail.iter().any(|&d| d < beta);

    result.certified &= hypothesis_met;
    result.hypothesis_met = hypothesis_met;
    result.tail_residual = residuals.last().copied();
    result.stopped_reason = Some(trace.stopped_reason);
    result.trace_len = trace.points.len();
    result.iterations = trace.iterations();
    result.final_consec = trace.consec.last().copied();
    result.residuals = residuals;
    result.trace = Some(trace);
    Ok(result)
}
