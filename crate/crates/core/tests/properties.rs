use nalgebra::DVector;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use svt_core::access::{distorted_sampler, exact_sampler, QueryVector, SparseQuery, VectorSample};
use svt_core::hamiltonian::{classify_scan, GlhDecision};
use svt_core::instances::{random_bounded_polynomial, random_sparse, random_unit_vector};
use svt_core::oracle::exact_svt_apply;
use svt_core::svt::svt_entry;
use svt_core::C64;

fn complex_vec(max: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..=max)
        .prop_map(|v| v.into_iter().map(|(re, im)| C64::new(re, im)).collect())
        .prop_filter("nonzero", |v: &Vec<C64>| v.iter().any(|z| z.norm() > 1e-3))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn distorted_probabilities_stay_in_band(v in complex_vec(24), zeta in 0.0f64..0.5, seed in any::<u64>()) {
        let q = QueryVector::new(v.clone()).unwrap();
        let norm = q.norm();
        let s = distorted_sampler(q, zeta, seed).unwrap();
        let mut total = 0.0;
        for (j, z) in v.iter().enumerate() {
            let p = s.probability(j + 1).unwrap();
            total += p;
            let exact = z.norm_sqr() / (norm * norm);
            prop_assert!(p >= (1.0 - zeta) * exact - 1e-12 && p <= (1.0 + zeta) * exact + 1e-12);
        }
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!((s.norm_estimate() - norm).abs() <= zeta * norm + 1e-12);
    }

    #[test]
    fn row_and_column_views_agree(rows in 1usize..20, cols in 1usize..20, s in 1usize..4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_sparse(&mut rng, rows, cols, s, 0.7).unwrap();
        let dense = a.to_dense();
        let mut seen = 0;
        for i in 1..=rows {
            for l in 1..=a.sparsity() {
                let Some((j, v)) = a.row_entry(i, l).unwrap() else { break };
                prop_assert_eq!(dense[(i - 1, j - 1)], v);
                seen += 1;
            }
            prop_assert!(a.row_entry(i, a.sparsity() + 1).is_err());
        }
        for j in 1..=cols {
            for l in 1..=a.sparsity() {
                let Some((i, v)) = a.col_entry(j, l).unwrap() else { break };
                prop_assert_eq!(dense[(i - 1, j - 1)], v);
            }
        }
        prop_assert_eq!(seen, a.nnz());
        let nnz = dense.iter().filter(|z| z.norm() > 0.0).count();
        prop_assert_eq!(nnz, a.nnz());
    }

    #[test]
    fn svt_entry_matches_oracle(n in 2usize..24, s in 1usize..4, d in 0usize..6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_sparse(&mut rng, n, n, s.min(n), 0.9).unwrap();
        let u = random_unit_vector(&mut rng, n).unwrap();
        let p = random_bounded_polynomial(&mut rng, d).unwrap();
        let want = exact_svt_apply(&a.to_dense(), &p, &DVector::from_column_slice(u.as_slice())).unwrap();
        let scale = want.camax().max(1e-300);
        for i in 1..=n {
            prop_assert!((svt_entry(&a, &u, &p, i).unwrap() - want[i - 1]).norm() <= 1e-10 * scale);
        }
    }

    #[test]
    fn basis_conversion_preserves_values(coeffs in prop::collection::vec(-1.0f64..1.0, 1..8), x in -1.0f64..1.0) {
        let p = svt_core::polynomial::EvenPolynomial::chebyshev(coeffs).unwrap();
        let m = p.to_monomial();
        let back = m.to_chebyshev();
        prop_assert!((p.eval(x) - m.eval(x)).abs() < 1e-9);
        prop_assert!((p.eval(x) - back.eval(x)).abs() < 1e-9);
        prop_assert!((p.eval(x) - p.eval(-x)).abs() < 1e-12);
    }

    #[test]
    fn monotone_scans_bracket_the_transition(r in 1usize..12, highs in 0usize..24) {
        let highs = highs.min(2 * r);
        let outcomes: Vec<GlhDecision> =
            (0..2 * r).map(|i| if i < highs { GlhDecision::High } else { GlhDecision::Low }).collect();
        let res = classify_scan(outcomes, r).unwrap();
        prop_assert!(-1.0 <= res.lo && res.lo < res.hi && res.hi <= 1.0);
        prop_assert!(res.hi - res.lo <= 2.0 / r as f64 + 1e-12);
        prop_assert!(res.lo <= res.estimate && res.estimate <= res.hi);
    }
}

#[test]
fn non_monotone_scan_is_inconsistent() {
    let o = vec![GlhDecision::Low, GlhDecision::High];
    assert!(matches!(classify_scan(o, 1), Err(svt_core::Error::Inconsistency(_))));
}

/// Pearson goodness-of-fit of the exact sampler against `|v_j|^2 / ||v||^2`,
/// at significance 0.001 per case.
#[test]
fn exact_sampler_passes_chi_squared() {
    let config = Config { cases: 24, failure_persistence: None, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner
        .run(&(complex_vec(16), any::<u64>()), |(v, seed)| {
            let q = QueryVector::new(v.clone()).unwrap();
            let norm2 = q.norm().powi(2);
            let s = exact_sampler(q).unwrap();
            let draws = 20_000;
            let mut counts = vec![0usize; v.len()];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..draws {
                counts[s.sample_index(&mut rng) - 1] += 1;
            }
            let mut stat = 0.0;
            let mut cells = 0;
            for (z, &c) in v.iter().zip(&counts) {
                let expected = draws as f64 * z.norm_sqr() / norm2;
                if expected == 0.0 {
                    prop_assert_eq!(c, 0);
                    continue;
                }
                stat += (c as f64 - expected).powi(2) / expected;
                cells += 1;
            }
            if cells > 1 {
                let p = 1.0 - ChiSquared::new((cells - 1) as f64).unwrap().cdf(stat);
                prop_assert!(p > 0.001, "chi2={stat} cells={cells} p={p}");
            }
            Ok(())
        })
        .unwrap();
}
