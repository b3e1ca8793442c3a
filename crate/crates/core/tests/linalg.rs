//! Spectral-operator behaviour against independent oracles (Jacobi
//! rotations, power iteration) plus the fractional-power identities.

mod common;

use bregman_rates::{LabError, SpectralOperator};
use ndarray::{array, Array1, Array2};
use proptest::prelude::*;

fn norm(v: &Array1<f64>) -> f64 {
    v.dot(v).sqrt()
}

#[test]
fn operator_norm_matches_power_iteration() {
    for (seed, m, n) in [(1u64, 6, 6), (2, 12, 5), (3, 4, 9), (4, 15, 15), (5, 20, 7)] {
        let a = common::seeded_matrix(seed, m, n);
        let op = SpectralOperator::factorize(a.clone()).unwrap();
        let oracle = common::power_iteration_norm(&a, 5000, seed ^ 0xabcd);
        let rel = (op.operator_norm() - oracle).abs() / oracle;
        assert!(rel < 1e-6, "seed {seed}: {} vs {oracle}", op.operator_norm());
    }
}

#[test]
fn factorization_reconstructs_the_matrix() {
    for (seed, m, n) in [(11u64, 8, 8), (12, 14, 6), (13, 5, 17)] {
        let a = common::seeded_matrix(seed, m, n);
        let op = SpectralOperator::factorize(a.clone()).unwrap();
        let r = op.rank();
        let mut rebuilt = Array2::<f64>::zeros((m, n));
        for k in 0..r {
            let sk = op.singular_values()[k];
            for i in 0..m {
                for j in 0..n {
                    rebuilt[[i, j]] += sk * op.left_vectors()[[i, k]] * op.right_vectors()[[j, k]];
                }
            }
        }
        let err = (&rebuilt - &a).iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(err <= 1e-10 * op.operator_norm(), "seed {seed}: err {err}");
    }
}

#[test]
fn fractional_apply_matches_jacobi_oracle() {
    for (seed, m, n) in [(21u64, 9, 6), (22, 6, 6), (23, 12, 10), (24, 7, 12)] {
        let a = common::seeded_matrix(seed, m, n);
        let gram = a.t().dot(&a);
        let op = SpectralOperator::factorize(a).unwrap();
        let u = common::seeded_vector(seed ^ 0x55, n, 1.0);
        for nu in [0.0, 0.17, 0.25, 0.5, 0.77, 1.0] {
            let got = op.fractional_gram_apply(nu, &u).unwrap();
            let want = common::sym_fractional_apply(&gram, nu, &u);
            let scale = 1.0 + norm(&want);
            let err = norm(&(&got - &want));
            assert!(err <= 1e-8 * scale, "seed {seed}, nu {nu}: err {err:.3e}");
        }
    }
}

#[test]
fn fractional_semigroup() {
    for (seed, m, n) in [(31u64, 8, 5), (32, 10, 10), (33, 5, 11)] {
        let op = SpectralOperator::factorize(common::seeded_matrix(seed, m, n)).unwrap();
        let u = common::seeded_vector(seed ^ 0x99, n, 1.0);
        for (n1, n2) in [(0.25, 0.25), (0.1, 0.6), (0.5, 0.5), (0.0, 0.4)] {
            let two_step = op
                .fractional_gram_apply(n1, &op.fractional_gram_apply(n2, &u).unwrap())
                .unwrap();
            let one_step = op.fractional_gram_apply(n1 + n2, &u).unwrap();
            let err = norm(&(&two_step - &one_step));
            assert!(
                err <= 1e-10 * (1.0 + norm(&one_step)),
                "seed {seed}, ({n1}, {n2}): err {err:.3e}"
            );
        }
    }
}

#[test]
fn gram_exponent_one_is_normal_product() {
    for (seed, m, n) in [(41u64, 7, 7), (42, 12, 4)] {
        let a = common::seeded_matrix(seed, m, n);
        let op = SpectralOperator::factorize(a).unwrap();
        let u = common::seeded_vector(seed ^ 0x77, n, 2.0);
        let spectral = op.fractional_gram_apply(1.0, &u).unwrap();
        let product = op.apply_adjoint(&op.apply(&u).unwrap()).unwrap();
        let err = norm(&(&spectral - &product));
        assert!(err <= 1e-10 * (1.0 + norm(&product)), "seed {seed}: {err:.3e}");
    }
}

#[test]
fn interchange_of_fractional_powers_through_the_operator() {
    // F (F*F)^ν = (FF*)^ν F holds exactly on the spectrum; checked for the
    // ν range both endpoints support.
    for (seed, m, n) in [(51u64, 9, 7), (52, 6, 13)] {
        let op = SpectralOperator::factorize(common::seeded_matrix(seed, m, n)).unwrap();
        let u = common::seeded_vector(seed ^ 0x33, n, 1.0);
        for nu in [0.0, 0.2, 0.35, 0.5] {
            let lhs = op.apply(&op.fractional_gram_apply(nu, &u).unwrap()).unwrap();
            let rhs = op.gram_power_factor(nu, &op.apply(&u).unwrap()).unwrap();
            let err = norm(&(&lhs - &rhs));
            assert!(err <= 1e-9 * (1.0 + norm(&rhs)), "seed {seed}, nu {nu}: {err:.3e}");
        }
    }
}

#[test]
fn rank_cutoff_is_relative() {
    let op = SpectralOperator::factorize(array![[5.0, 0.0], [0.0, 5e-16]]).unwrap();
    assert_eq!(op.rank(), 1);
    // The truncated direction is projected out even at ν = 0.
    let out = op.fractional_gram_apply(0.0, &array![1.0, 1.0]).unwrap();
    assert!((out[0] - 1.0).abs() < 1e-12 && out[1].abs() < 1e-12);
}

#[test]
fn adjoint_preimage_is_a_lagrange_witness() {
    for (seed, m, n) in [(61u64, 10, 6), (62, 5, 5), (63, 6, 14)] {
        let op = SpectralOperator::factorize(common::seeded_matrix(seed, m, n)).unwrap();
        let omega = common::seeded_vector(seed ^ 0x11, n, 1.0);
        for nu in [0.15, 0.5, 0.9] {
            let xi = op.fractional_gram_apply(nu, &omega).unwrap();
            let w = op.adjoint_preimage(&xi).unwrap();
            let back = op.apply_adjoint(&w).unwrap();
            let err = norm(&(&back - &xi));
            assert!(err <= 1e-8 * (1.0 + norm(&xi)), "seed {seed}, nu {nu}: {err:.3e}");
        }
    }
}

#[test]
fn dimension_errors_are_reported() {
    let op = SpectralOperator::factorize(common::seeded_matrix(71, 4, 3)).unwrap();
    let wrong = Array1::zeros(5);
    assert!(matches!(
        op.apply(&wrong),
        Err(LabError::DimensionError { expected: 3, got: 5 })
    ));
    assert!(matches!(
        op.apply_adjoint(&wrong),
        Err(LabError::DimensionError { expected: 4, got: 5 })
    ));
    assert!(matches!(
        op.fractional_gram_apply(0.5, &wrong),
        Err(LabError::DimensionError { expected: 3, got: 5 })
    ));
}

prop_compose! {
    fn dims_and_data()(m in 2usize..9, n in 2usize..9)
        (m in Just(m), n in Just(n),
         data in prop::collection::vec(-3.0f64..3.0, m * n),
         udata in prop::collection::vec(-2.0f64..2.0, n),
         nu in 0.0f64..0.5)
        -> (usize, usize, Vec<f64>, Vec<f64>, f64) {
        (m, n, data, udata, nu)
    }
}

proptest! {
    #[test]
    fn interpolation_inequality_holds((m, n, data, udata, nu) in dims_and_data()) {
        let a = Array2::from_shape_vec((m, n), data).unwrap();
        let op = SpectralOperator::factorize(a).unwrap();
        let u = Array1::from_vec(udata);
        let lhs = norm(&op.fractional_gram_apply(nu, &u).unwrap());
        let fu = norm(&op.apply(&u).unwrap());
        let rhs = fu.powf(2.0 * nu) * norm(&u).powf(1.0 - 2.0 * nu);
        // Tiny absolute floor guards the rhs = 0 corner (u in the kernel).
        prop_assert!(lhs <= rhs * (1.0 + 1e-9) + 1e-10 * (1.0 + norm(&u)));
    }

    #[test]
    fn norm_bound_for_fractional_images((m, n, data, udata, nu) in dims_and_data()) {
        // ‖(F*F)^ν u‖ ≤ σ_max^{2ν} ‖u‖.
        let a = Array2::from_shape_vec((m, n), data).unwrap();
        let op = SpectralOperator::factorize(a).unwrap();
        let u = Array1::from_vec(udata);
        let lhs = norm(&op.fractional_gram_apply(nu, &u).unwrap());
        let bound = op.operator_norm().powf(2.0 * nu) * norm(&u);
        prop_assert!(lhs <= bound * (1.0 + 1e-9) + 1e-12);
    }
}
