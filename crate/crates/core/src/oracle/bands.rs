//! Literal evaluation of the upper band condition on a finite space.
//!
//! Quantifiers are evaluated directly: for every `α` of a refinement grid
//! some `ε` from a candidate set must make the band implication hold on
//! every ordered pair. No pairwise reduction is used.

use crate::space::FiniteSpace;

/// `α` probes: every positive tabulated value, midpoints between
/// neighbouring values (with 0 as a mark), two points above the maximum, and
/// the dyadic grid `k/16` up to one past the ceiling of the maximum.
pub fn alpha_grid(space: &FiniteSpace) -> Vec<f64> {
    let marks = marks(space);
    let max = *marks.last().expect("marks hold 0");
    let mut alphas: Vec<f64> = marks.iter().copied().filter(|&v| v > 0.0).collect();
    alphas.extend(marks.windows(2).map(|w| (w[0] + w[1]) / 2.0));
    alphas.push(max + 0.5);
    alphas.push(max + 1.0);
    let top = (max.ceil() as usize + 1) * 16;
    alphas.extend((1..=top).map(|k| k as f64 / 16.0));
    alphas.sort_by(f64::total_cmp);
    alphas.dedup();
    alphas
}

/// `ε` candidates: 1, 1/2, 1/4, every gap between marks and its halvings,
/// and a quarter of the smallest gap between any probe and any mark.
pub fn epsilon_candidates(space: &FiniteSpace, alphas: &[f64]) -> Vec<f64> {
    let marks = marks(space);
    let mut eps = vec![1.0, 0.5, 0.25];
    for a in &marks {
        for b in &marks {
            let g = b - a;
            if g > 0.0 {
                eps.extend([g, g / 2.0, g / 4.0, g / 8.0]);
            }
        }
    }
    let tiny = alphas
        .iter()
        .flat_map(|a| marks.iter().map(move |m| (a - m).abs()))
        .filter(|&g| g > 0.0)
        .fold(f64::INFINITY, f64::min);
    if tiny.is_finite() {
        eps.push(tiny / 4.0);
    }
    eps.sort_by(f64::total_cmp);
    eps.dedup();
    eps
}

fn marks(space: &FiniteSpace) -> Vec<f64> {
    let mut m = vec![0.0];
    m.extend(space.distance_values());
    m.sort_by(f64::total_cmp);
    m.dedup();
    m
}

/// The upper band condition by direct quantifier evaluation over the grids above.
pub fn upper_band_brute_force(space: &FiniteSpace, table: &[usize]) -> bool {
    let n = space.len();
    let alphas = alpha_grid(space);
    let eps = epsilon_candidates(space, &alphas);
    alphas.iter().all(|&alpha| {
        eps.iter().any(|&e| {
            (0..n).all(|y| {
                (0..n).all(|x| {
                    let d = space.d(y, x);
                    !(alpha <= d && d < alpha + e) || space.d(table[y], table[x]) <= alpha
                })
            })
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_cover_values_and_gaps() {
        let s = FiniteSpace::new("t", vec![vec![0.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let a = alpha_grid(&s);
        assert!(a.contains(&0.5) && a.contains(&1.0) && a.contains(&0.25) && a.contains(&1.5));
        let e = epsilon_candidates(&s, &a);
        assert!(e[0] > 0.0 && e[0] < 1.0 / 16.0);
    }

    #[test]
    fn swap_and_expansion() {
        let two = FiniteSpace::new("t", vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(upper_band_brute_force(&two, &[1, 0]));
        let three = FiniteSpace::new(
            "t",
            vec![
                vec![0.0, 0.5, 1.0],
                vec![0.5, 0.0, 1.0],
                vec![1.0, 1.0, 0.0],
            ],
        )
        .unwrap();
        assert!(!upper_band_brute_force(&three, &[0, 2, 2]));
    }
}
