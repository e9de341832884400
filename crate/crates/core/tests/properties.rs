use proptest::prelude::*;

use feltfp_core::axioms;
use feltfp_core::contraction::{self, ContractionFactor};
use feltfp_core::oracle;
use feltfp_core::solver;
use feltfp_core::{FeltSpace, FiniteSpace, Point, SelfMap, Tolerances, Verdict};

const VALUES: [f64; 4] = [0.0, 0.5, 1.0, 2.0];

/// Arbitrary square matrix over `VALUES` (not necessarily a felt metric).
fn matrix(max_n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(
            prop::collection::vec(prop::sample::select(&VALUES[..]), n),
            n,
        )
    })
}

/// Symmetric matrix with nonzero off-diagonal entries plus a self-map.
fn felt_case(max_n: usize) -> impl Strategy<Value = (FiniteSpace, Vec<usize>)> {
    (1..=max_n).prop_flat_map(|n| {
        (
            prop::collection::vec(prop::sample::select(&VALUES[1..]), n * n),
            prop::collection::vec(prop::sample::select(&VALUES[..]), n),
            prop::collection::vec(0..n, n),
        )
            .prop_map(move |(off, diag, table)| {
                let mut m = vec![vec![0.0; n]; n];
                for i in 0..n {
                    m[i][i] = diag[i];
                    for j in i + 1..n {
                        m[i][j] = off[i * n + j];
                        m[j][i] = off[i * n + j];
                    }
                }
                (FiniteSpace::new("p", m).unwrap(), table)
            })
    })
}

proptest! {
    #[test]
    fn builtin_distances_are_symmetric_and_deterministic(x in 0.0f64..=1.0, y in 0.0f64..=1.0) {
        for name in ["euclid:[0,1]", "maxpm:[0,1]"] {
            let s = FeltSpace::builtin(name).unwrap();
            let (a, b) = (Point::real(x), Point::real(y));
            let d = s.distance(&a, &b).unwrap();
            prop_assert_eq!(d.to_bits(), s.distance(&a, &b).unwrap().to_bits());
            prop_assert_eq!(d, s.distance(&b, &a).unwrap());
        }
    }

    #[test]
    fn apply_n_is_iterated_apply(x in 0.0f64..=1.0, k in 0usize..40) {
        let s = FeltSpace::builtin("euclid:[0,1]").unwrap();
        let f = SelfMap::builtin("cos", &s).unwrap();
        let mut cur = Point::real(x);
        for _ in 0..k {
            cur = f.apply(&s, &cur).unwrap();
        }
        prop_assert_eq!(f.apply_n(&s, &Point::real(x), k).unwrap(), cur);
    }

    #[test]
    fn banach_epsilon_is_tight(c in 0.0f64..0.999, alpha in 1e-3f64..10.0) {
        let eps = contraction::banach_epsilon(ContractionFactor::new(c).unwrap(), alpha).unwrap();
        prop_assert!(eps > 0.0);
        prop_assert!(c * (alpha + eps) <= alpha + 1e-12);
        if c > 0.0 {
            // any noticeably wider band breaks the inequality
            prop_assert!(c * (alpha + eps * (1.0 + 1e-9) + 1e-12) > alpha);
        }
    }

    #[test]
    fn fail_witnesses_replay(m in matrix(4)) {
        let s: FeltSpace = FiniteSpace::new("p", m).unwrap().into();
        let tol = Tolerances::default();
        for r in [
            axioms::check_indiscernibility(&s, &tol).unwrap(),
            axioms::check_symmetry(&s, &tol).unwrap(),
        ] {
            if r.verdict == Verdict::Fail {
                prop_assert!(axioms::witness_reproduces(&s, &r, &tol), "{}", r);
            }
        }
        for o in axioms::check_felt_continuity(&s, &[0.5, 1.0], &tol).unwrap() {
            let r = o.to_report();
            if r.verdict == Verdict::Fail {
                prop_assert!(axioms::witness_reproduces(&s, &r, &tol), "{}", r);
            }
        }
    }

    #[test]
    fn certified_delta_is_monotone_in_epsilon(m in matrix(4)) {
        let s: FeltSpace = FiniteSpace::new("p", m).unwrap().into();
        let eps = [0.25, 0.5, 1.0, 1.5, 2.0, 3.0];
        let out = axioms::check_felt_continuity(&s, &eps, &Tolerances::default()).unwrap();
        let deltas: Vec<Option<f64>> = out.iter().map(|o| o.certificate().map(|c| c.delta)).collect();
        for w in deltas.windows(2) {
            if let (Some(a), Some(b)) = (w[0], w[1]) {
                prop_assert!(a <= b, "{:?}", deltas);
            }
        }
    }

    #[test]
    fn condition_witnesses_replay((s, t) in felt_case(4)) {
        let space: FeltSpace = s.clone().into();
        let map = SelfMap::table("f", t.clone());
        for r in [
            contraction::check_upper_band_finite(&space, &map).unwrap().report,
            contraction::check_open_band_finite(&space, &map).unwrap(),
        ] {
            if let Some(w) = &r.witness {
                let (y, x) = (w.points[0].as_index().unwrap(), w.points[1].as_index().unwrap());
                prop_assert_eq!(w.values.clone(), vec![s.d(y, x), s.d(t[y], t[x])]);
                prop_assert!(s.d(t[y], t[x]) > s.d(y, x) && s.d(y, x) > 0.0);
            }
        }
    }

    #[test]
    fn dominated_maps_inherit_the_upper_band((s, t) in felt_case(3)) {
        let space: FeltSpace = s.clone().into();
        let f = SelfMap::table("f", t.clone());
        prop_assume!(contraction::check_upper_band_finite(&space, &f).unwrap().report.verdict == Verdict::Pass);
        let n = s.len();
        for g in oracle::enumerate_selfmaps(n).unwrap() {
            let gt = g.as_table().unwrap();
            let dominated = (0..n).all(|y| (0..n).all(|x| s.d(gt[y], gt[x]) <= s.d(t[y], t[x])));
            if dominated {
                prop_assert_eq!(
                    contraction::check_upper_band_finite(&space, &g).unwrap().report.verdict,
                    Verdict::Pass
                );
            }
        }
    }

    #[test]
    fn upper_band_maps_never_raise_the_flag((s, t) in felt_case(4)) {
        let space: FeltSpace = s.into();
        let map = SelfMap::table("f", t);
        prop_assume!(contraction::check_upper_band_finite(&space, &map).unwrap().report.verdict == Verdict::Pass);
        for x0 in 0..space.as_finite().unwrap().len() {
            let r = solver::solve(&space, &map, &Point::Index(x0), &Tolerances::default()).unwrap();
            prop_assert!(!r.theorem_violation_candidate);
            prop_assert_eq!(r.hypothesis_met, r.certified);
        }
    }

    #[test]
    fn affine_orbits_contract_at_rate_c(c in 0.05f64..0.95, x0 in 0.0f64..=1.0) {
        let s = FeltSpace::builtin("euclid:[0,1]").unwrap();
        let b = (1.0 - c) / 2.0;
        let f = SelfMap::builtin(&format!("affine:{c},{b}"), &s).unwrap();
        let trace = solver::picard_orbit(&s, &f, &Point::real(x0), &Tolerances::default()).unwrap();
        for w in trace.consec.windows(2) {
            prop_assert!(w[1] <= c * w[0] + 1e-12);
        }
    }
}

#[test]
fn fuzz_reruns_are_identical() {
    let cfg = oracle::EnumerationConfig::new(3, &[0.0, 0.5, 1.0])
        .unwrap()
        .with_seed(42, 1000);
    let a = oracle::fuzz_equivalence(&cfg).unwrap();
    assert!(a.is_clean());
    assert_eq!(
        a.to_json(),
        oracle::fuzz_equivalence(&cfg).unwrap().to_json()
    );
}
