//! Regulariser behaviour against independent oracles (golden-section
//! minimization, dual coordinate descent) and the convexity/coconvexity
//! moduli the rate theory rests on.

mod common;

use bregman_rates::verify::bisection_prox_oracle;
use bregman_rates::{sym_bregman, RegulariserSpec};
use ndarray::{array, Array1};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn norm(v: &Array1<f64>) -> f64 {
    v.dot(v).sqrt()
}

/// Direct golden-section minimization of w ↦ ½(w−b)² + τ·(h/p)|w|^p.
/// Independent of both the library Newton solve and the bisection oracle;
/// argmin accuracy is roundoff-limited to ~√ε by function flatness.
fn golden_section_prox(b: f64, tau_h_over_p: f64, p: f64) -> f64 {
    let f = |w: f64| 0.5 * (w - b) * (w - b) + tau_h_over_p * w.abs().powf(p);
    let (mut lo, mut hi) = if b >= 0.0 { (0.0, b) } else { (b, 0.0) };
    let inv_phi = 0.618_033_988_749_894_9_f64;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..90 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn power_prox_matches_both_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let specs = [
        RegulariserSpec::PowerSum { p: 1.3, weight: 1.0 },
        RegulariserSpec::PowerSum { p: 1.5, weight: 0.5 },
        RegulariserSpec::PowerSum { p: 1.9, weight: 2.0 },
        RegulariserSpec::PowerSumHigh { p: 2.5, weight: 1.0 },
        RegulariserSpec::PowerSumHigh { p: 3.0, weight: 0.7 },
        RegulariserSpec::PowerSumHigh { p: 4.0, weight: 1.5 },
    ];
    for t in 0..300 {
        let spec = &specs[t % specs.len()];
        let (p, h) = match *spec {
            RegulariserSpec::PowerSum { p, weight }
            | RegulariserSpec::PowerSumHigh { p, weight } => (p, weight),
            _ => unreachable!(),
        };
        let b: f64 = 4.0 * rng.sample::<f64, _>(StandardNormal);
        let tau = 10f64.powf(rng.gen_range(-2.0..1.5));
        let got = spec.prox(&array![b], tau)[0];
        let root = bisection_prox_oracle(b, tau * h, p);
        assert!(
            (got - root).abs() <= 1e-10 * (1.0 + b.abs()),
            "bisection mismatch: p = {p}, b = {b}, tau = {tau}: {got} vs {root}"
        );
        let direct = golden_section_prox(b, tau * h / p, p);
        assert!(
            (got - direct).abs() <= 2e-6 * (1.0 + b.abs()),
            "golden-section mismatch: p = {p}, b = {b}, tau = {tau}: {got} vs {direct}"
        );
    }
}

#[test]
fn tv_prox_matches_dual_coordinate_descent() {
    for (seed, n, lam) in [
        (1u64, 5, 0.05),
        (2, 12, 0.3),
        (3, 30, 1.5),
        (4, 17, 0.8),
        (5, 8, 2.5),
    ] {
        let y = common::seeded_vector(seed, n, 1.0);
        let ys = y.as_slice().unwrap();
        let got = RegulariserSpec::TotalVariation1D.prox(&y, lam);
        let want = common::tv_prox_dual_cd(ys, lam, 200_000);
        let err = got
            .iter()
            .zip(&want)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(err <= 1e-7, "seed {seed}, n {n}, lam {lam}: max err {err:.3e}");
    }
}

#[test]
fn huber_coconvexity_vector_form() {
    // ⟨∇R(u) − ∇R(ũ), u − ũ⟩ ≥ ‖∇R(u) − ∇R(ũ)‖² with constant exactly 1;
    // the vector sums allow a relative roundoff slack.
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..500 {
        let gamma = 10f64.powf(rng.gen_range(-1.0..1.0));
        let spec = RegulariserSpec::Huber { gamma };
        let len = rng.gen_range(1..=12);
        let scale = 3.0 * gamma;
        let u = Array1::from_shape_fn(len, |_| scale * rng.sample::<f64, _>(StandardNormal));
        let ut = Array1::from_shape_fn(len, |_| scale * rng.sample::<f64, _>(StandardNormal));
        let du = &u - &ut;
        let dr = &spec.subgradient(&u).unwrap() - &spec.subgradient(&ut).unwrap();
        let lhs = du.dot(&dr);
        let rhs = dr.dot(&dr);
        assert!(
            lhs >= rhs - 1e-12 * (1.0 + lhs.abs()),
            "gamma {gamma}: {lhs} < {rhs}"
        );
    }
}

#[test]
fn power_sum_low_p_has_quadratic_modulus_on_balls() {
    // φ'' ≥ h(p−1)R^{p−2} on [−R, R] for p < 2, so the Bregman distance
    // dominates that multiple of ½‖ũ − u‖².
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let radius = 3.0f64;
    for &(p, h) in &[(1.3, 1.0), (1.7, 0.5), (1.5, 2.0)] {
        let spec = RegulariserSpec::PowerSum { p, weight: h };
        let modulus = 0.5 * h * (p - 1.0) * radius.powf(p - 2.0);
        for _ in 0..200 {
            let len = rng.gen_range(1..=6);
            let u = Array1::from_shape_fn(len, |_| rng.gen_range(-radius..radius));
            let ut = Array1::from_shape_fn(len, |_| rng.gen_range(-radius..radius));
            let xi = spec.subgradient(&u).unwrap();
            let d = spec.bregman(&ut, &u, &xi).unwrap();
            let dist2 = (&ut - &u).mapv(|x| x * x).sum();
            assert!(
                d >= 0.999_999 * modulus * dist2 - 1e-12,
                "p {p}, h {h}: D = {d} below modulus {modulus} * {dist2}"
            );
        }
    }
}

#[test]
fn power_sum_high_p_has_p_power_modulus() {
    // Scalar inequality D_φ(s, t) ≥ (h/p)·2^{1−p}·|s − t|^p for p ≥ 2
    // (verified to hold with at least 2× margin); sums pick up the usual
    // n^{1−p/2} norm-comparison factor.
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for &(p, h) in &[(2.5, 1.0), (3.0, 0.7), (4.0, 1.5)] {
        let spec = RegulariserSpec::PowerSumHigh { p, weight: h };
        let c_scalar = (h / p) * 2f64.powf(1.0 - p);
        for _ in 0..200 {
            let len = rng.gen_range(1..=6) as usize;
            let u = Array1::from_shape_fn(len, |_| 3.0 * rng.sample::<f64, _>(StandardNormal));
            let ut = Array1::from_shape_fn(len, |_| 3.0 * rng.sample::<f64, _>(StandardNormal));
            let xi = spec.subgradient(&u).unwrap();
            let d = spec.bregman(&ut, &u, &xi).unwrap();
            let dist = norm(&(&ut - &u));
            let c_vec = c_scalar * (len as f64).powf(1.0 - p / 2.0);
            assert!(
                d >= 0.999_999 * c_vec * dist.powf(p) - 1e-12,
                "p {p}: D = {d} below {c_vec} * {dist}^{p}"
            );
        }
    }
}

#[test]
fn sym_bregman_is_the_sum_of_both_bregmans() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let specs = [
        RegulariserSpec::Quadratic,
        RegulariserSpec::PowerSum { p: 1.5, weight: 1.0 },
        RegulariserSpec::PowerSumHigh { p: 3.0, weight: 0.5 },
        RegulariserSpec::Huber { gamma: 0.8 },
    ];
    for spec in &specs {
        for _ in 0..100 {
            let len = rng.gen_range(1..=8);
            let u = Array1::from_shape_fn(len, |_| 2.0 * rng.sample::<f64, _>(StandardNormal));
            let ut = Array1::from_shape_fn(len, |_| 2.0 * rng.sample::<f64, _>(StandardNormal));
            let xi = spec.subgradient(&u).unwrap();
            let xit = spec.subgradient(&ut).unwrap();
            let sym = sym_bregman(&xi, &xit, &u, &ut).unwrap();
            let sum = spec.bregman(&ut, &u, &xi).unwrap() + spec.bregman(&u, &ut, &xit).unwrap();
            let scale = 1.0 + sym.abs() + sum.abs();
            assert!((sym - sum).abs() <= 1e-10 * scale, "{spec:?}: {sym} vs {sum}");
            // Swapping both pairs leaves the symmetric distance unchanged.
            let swapped = sym_bregman(&xit, &xi, &ut, &u).unwrap();
            assert!((sym - swapped).abs() <= 1e-12 * scale);
        }
    }
}

#[test]
fn bregman_distances_are_nonnegative() {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    let specs = [
        RegulariserSpec::Quadratic,
        RegulariserSpec::PowerSum { p: 1.2, weight: 2.0 },
        RegulariserSpec::PowerSumHigh { p: 2.5, weight: 1.0 },
        RegulariserSpec::Huber { gamma: 1.2 },
    ];
    for spec in &specs {
        for _ in 0..200 {
            let len = rng.gen_range(1..=8);
            let u = Array1::from_shape_fn(len, |_| 3.0 * rng.sample::<f64, _>(StandardNormal));
            let ut = Array1::from_shape_fn(len, |_| 3.0 * rng.sample::<f64, _>(StandardNormal));
            let xi = spec.subgradient(&u).unwrap();
            let d = spec.bregman(&ut, &u, &xi).unwrap();
            assert!(d >= -1e-12 * (1.0 + d.abs()), "{spec:?}: D = {d}");
        }
    }
}

#[test]
fn tv_step_witness_has_zero_bregman_gap() {
    // ξ from the prox optimality condition is a subgradient at the shrunk
    // step w; positive homogeneity forces D_ξ(2w, w) = 0, witnessing the
    // absence of any strict convexity modulus.
    let spec = RegulariserSpec::TotalVariation1D;
    let u = array![0.0, 0.0, 0.0, 1.0, 1.0, 1.0];
    let tau = 0.05;
    let w = spec.prox(&u, tau);
    let xi = (&u - &w) / tau;
    let gap = spec.bregman(&(2.0 * &w), &w, &xi).unwrap();
    assert!(gap.abs() <= 1e-10, "gap {gap:.3e}");
    // And TV indeed dropped across the prox (the jump shrank).
    assert!(spec.value(&w) < spec.value(&u));
}

proptest! {
    #[test]
    fn prox_satisfies_stationarity(
        data in prop::collection::vec(-4.0f64..4.0, 1..10),
        tau in 0.01f64..10.0,
        which in 0usize..4,
    ) {
        let specs = [
            RegulariserSpec::Quadratic,
            RegulariserSpec::PowerSum { p: 1.5, weight: 1.0 },
            RegulariserSpec::PowerSumHigh { p: 3.0, weight: 0.8 },
            RegulariserSpec::Huber { gamma: 0.7 },
        ];
        let spec = &specs[which];
        let u = Array1::from_vec(data);
        let w = spec.prox(&u, tau);
        let grad = spec.subgradient(&w).unwrap();
        let resid = &w - &u + tau * &grad;
        prop_assert!(norm(&resid) <= 1e-7 * (1.0 + norm(&u)));
    }

    #[test]
    fn tv_prox_certificate_is_tight(
        data in prop::collection::vec(-3.0f64..3.0, 2..16),
        lam in 0.01f64..3.0,
    ) {
        let w = bregman_rates::tv1d::denoise(&data, lam);
        let gap = bregman_rates::tv1d::dual_certificate_gap(&data, lam, &w);
        prop_assert!(gap <= 1e-9, "gap {gap:.3e}");
    }
}
