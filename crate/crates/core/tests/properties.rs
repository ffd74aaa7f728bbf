use std::f64::consts::PI;

use convergence_core::dynamics::{
    coboundary_bound_check, maximal_function, weighted_average, DynSystem, State, TestFunction,
};
use convergence_core::hypothesis::{check_convergence_hypotheses, HypothesisOptions};
use convergence_core::sequence::convolve_prefixes;
use convergence_core::spectral::{
    decay_constant, doubling_defect, fourier_eval, fourier_point, fourier_value,
};
use convergence_core::{LatticeMeasure, SequenceSpec};
use proptest::prelude::*;

fn brute_convolve(a: &LatticeMeasure, b: &LatticeMeasure) -> Vec<(i64, f64)> {
    let lo = a.min_index() + b.min_index();
    let hi = a.max_index() + b.max_index();
    let mut out = vec![0.0; (hi - lo + 1) as usize];
    for (i, &x) in a.weights().iter().enumerate() {
        for (j, &y) in b.weights().iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out.into_iter()
        .enumerate()
        .map(|(i, w)| (lo + i as i64, w))
        .collect()
}

prop_compose! {
    fn measure(max_len: usize)(
        offset in -15i64..15,
        raw in prop::collection::vec(0.0f64..1.0, 1..=max_len),
    ) -> LatticeMeasure {
        let mut w = raw;
        let last = w.len() - 1;
        w[0] += 0.05;
        w[last] += 0.05;
        let s: f64 = w.iter().sum();
        LatticeMeasure::new(offset, w.into_iter().map(|x| x / s).collect()).unwrap()
    }
}

fn centred(mu: &LatticeMeasure) -> Option<LatticeMeasure> {
    // Mix μ with its reflection so the mean is exactly zero.
    let reflected: Vec<(i64, f64)> = mu.atoms().map(|(k, w)| (-k, w)).collect();
    let mut atoms: Vec<(i64, f64)> = mu.atoms().map(|(k, w)| (k, 0.5 * w)).collect();
    atoms.extend(reflected.into_iter().map(|(k, w)| (k, 0.5 * w)));
    LatticeMeasure::from_atoms(&atoms).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn convolution_matches_double_loop(a in measure(20), b in measure(20)) {
        let c = a.convolve(&b).unwrap();
        let err: f64 = brute_convolve(&a, &b)
            .into_iter()
            .map(|(k, w)| (c.get(k) - w).abs())
            .sum();
        prop_assert!(err <= 1e-12);
    }

    #[test]
    fn convolution_is_commutative_and_associative(
        a in measure(8), b in measure(8), c in measure(8)
    ) {
        let ab = a.convolve(&b).unwrap();
        prop_assert!(ab.l1_distance(&b.convolve(&a).unwrap()) <= 1e-12);
        let left = ab.convolve(&c).unwrap();
        let right = a.convolve(&b.convolve(&c).unwrap()).unwrap();
        prop_assert!(left.l1_distance(&right) <= 1e-12);
    }

    #[test]
    fn moments_add(a in measure(10), b in measure(10)) {
        let ab = a.convolve(&b).unwrap();
        prop_assert!((ab.expectation() - a.expectation() - b.expectation()).abs() <= 1e-10);
        let (za, zb) = (centred(&a).unwrap(), centred(&b).unwrap());
        let zab = za.convolve(&zb).unwrap();
        prop_assert!(zab.expectation().abs() <= 1e-12);
        prop_assert!((zab.second_moment() - za.second_moment() - zb.second_moment()).abs() <= 1e-10);
    }

    #[test]
    fn fourier_inverts(mu in measure(30)) {
        let p = fourier_eval(&mu, 64).unwrap();
        for k in mu.min_index() - 2..=mu.max_index() + 2 {
            prop_assert!((p.inverse_coefficient(k) - mu.get(k)).abs() <= 1e-8);
        }
    }

    #[test]
    fn transform_is_multiplicative(a in measure(12), b in measure(12)) {
        let ab = a.convolve(&b).unwrap();
        let (pa, pb, pab) = (
            fourier_eval(&a, 128).unwrap(),
            fourier_eval(&b, 128).unwrap(),
            fourier_eval(&ab, 128).unwrap(),
        );
        for j in 0..128 {
            prop_assert!((pab.values[j] - pa.values[j] * pb.values[j]).norm() <= 1e-10);
        }
    }

    #[test]
    fn doubling_inequality(mu in measure(15), t in -0.5f64..0.5) {
        prop_assert!(doubling_defect(&mu, t) >= -1e-12);
    }

    #[test]
    fn derivative_bounds(mu in measure(15)) {
        let p = fourier_eval(&mu, 256).unwrap();
        let m1 = mu.first_moment();
        let m2 = mu.second_moment();
        for j in 0..p.len() {
            prop_assert!(p.d1[j].norm() <= 2.0 * PI * m1 * (1.0 + 1e-12) + 1e-12);
            prop_assert!(p.d2[j].norm() <= 4.0 * PI * PI * m2 * (1.0 + 1e-12) + 1e-12);
        }
        if let Some(z) = centred(&mu) {
            let m2 = z.second_moment();
            let p = fourier_eval(&z, 256).unwrap();
            for j in 0..p.len() {
                let bound = 4.0 * PI * PI * m2 * p.grid[j].abs();
                prop_assert!(p.d1[j].norm() <= bound * (1.0 + 1e-12) + 1e-12);
            }
        }
    }

    #[test]
    fn decay_certificate_is_sound(mu in measure(8), ts in prop::collection::vec(-0.5f64..0.5, 40)) {
        let c = decay_constant(&mu, 512).unwrap();
        prop_assert_eq!(c > 0.0, mu.is_strictly_aperiodic());
        for t in ts {
            let v = fourier_value(&mu, t).norm();
            prop_assert!(v <= (-c * t * t).exp() + 1e-12, "t = {}, |v| = {}, C = {}", t, v, c);
        }
    }

    #[test]
    fn coset_sup_bounds(mu in measure(12)) {
        let s = mu.coset_mass_sup();
        let largest = mu.weights().iter().copied().fold(0.0, f64::max);
        prop_assert!(s.rho >= largest - 1e-15);
        prop_assert!(s.rho <= 1.0 + 1e-12);
        prop_assert!(s.beta >= 2);
    }

    #[test]
    fn shift_preserves_cyclic_measure(vals in prop::collection::vec(-5.0f64..5.0, 1..40)) {
        let q = vals.len() as u64;
        let sys = DynSystem::cyclic(q).unwrap();
        let f = TestFunction::table(vals);
        let plain: f64 = sys.states().iter().map(|&x| f.eval(&sys, x)).sum();
        let shifted: f64 = sys.states().iter().map(|&x| f.eval(&sys, sys.shift(x, 1))).sum();
        prop_assert!((plain - shifted).abs() <= 1e-12);
    }

    #[test]
    fn averages_are_positive_contractions(
        mu in measure(10),
        vals in prop::collection::vec(0.0f64..3.0, 5..40),
    ) {
        let sys = DynSystem::cyclic(vals.len() as u64).unwrap();
        let f = TestFunction::table(vals);
        let avgs: Vec<f64> = sys
            .states()
            .into_iter()
            .map(|x| weighted_average(&sys, &mu, &f, x).unwrap())
            .collect();
        prop_assert!(avgs.iter().all(|&v| v >= 0.0));
        let l1 = avgs.iter().sum::<f64>() / avgs.len() as f64;
        prop_assert!(l1 <= f.norm_l1(&sys) + 1e-12);
    }

    #[test]
    fn averages_compose(
        mu in measure(6),
        nu in measure(6),
        vals in prop::collection::vec(-1.0f64..1.0, 3..30),
    ) {
        let sys = DynSystem::cyclic(vals.len() as u64).unwrap();
        let f = TestFunction::table(vals.clone());
        let nu_f: Vec<f64> = sys
            .states()
            .into_iter()
            .map(|x| weighted_average(&sys, &nu, &f, x).unwrap())
            .collect();
        let g = TestFunction::table(nu_f);
        let conv = mu.convolve(&nu).unwrap();
        for x in sys.states() {
            let direct = weighted_average(&sys, &conv, &f, x).unwrap();
            let nested = weighted_average(&sys, &mu, &g, x).unwrap();
            prop_assert!((direct - nested).abs() <= 1e-10);
        }
    }

    #[test]
    fn coboundary_bound_holds(mu in measure(20), vals in prop::collection::vec(-2.0f64..2.0, 64)) {
        let sys = DynSystem::cyclic(64).unwrap();
        let c = coboundary_bound_check(&sys, &mu, &TestFunction::table(vals)).unwrap();
        prop_assert!(c.holds(), "{:?}", c);
    }
}

#[test]
fn maximal_function_grows_with_horizon() {
    let sys = DynSystem::cyclic(32).unwrap();
    let spec = SequenceSpec::iid(LatticeMeasure::new(-1, vec![0.3, 0.3, 0.4]).unwrap());
    let mus = convolve_prefixes(&spec, 20, 0.0).unwrap();
    let f = TestFunction::block(4, 3).scaled(5.0);
    for x in sys.states() {
        let mut prev = 0.0;
        for n in 1..=20 {
            let m = maximal_function(&sys, &mus[..n], &f, x).unwrap();
            assert!(m >= prev);
            prev = m;
        }
    }
}

#[test]
fn rotation_preserves_sample_mean() {
    let sys = DynSystem::rotation(convergence_core::dynamics::DEFAULT_ALPHA, 4096, 3).unwrap();
    let f = TestFunction::interval(0.2, 0.45);
    let n = sys.state_count() as f64;
    let plain: f64 = sys.states().iter().map(|&x| f.eval(&sys, x)).sum::<f64>() / n;
    let shifted: f64 = sys
        .states()
        .iter()
        .map(|&x| f.eval(&sys, sys.shift(x, 1)))
        .sum::<f64>()
        / n;
    // An interval indicator on S stratified points is off by at most 2/S.
    assert!((plain - shifted).abs() <= 2.0 / n);
    assert!((plain - 0.25).abs() <= 2.0 / n);
}

#[test]
fn weighted_average_at_origin_matches_sum() {
    let sys = DynSystem::cyclic(10).unwrap();
    let mu = LatticeMeasure::from_atoms(&[(-3, 0.5), (12, 0.5)]).unwrap();
    let f = TestFunction::subset(&[7, 2]);
    assert_eq!(
        weighted_average(&sys, &mu, &f, State::Site(0)).unwrap(),
        1.0
    );
}

#[test]
fn fourier_point_matches_value() {
    let mu = LatticeMeasure::new(-40, vec![0.01; 100]).unwrap();
    for t in [-0.37, 0.0, 0.011, 0.4999] {
        let p = fourier_point(&mu, t);
        let direct: (f64, f64) = mu
            .atoms()
            .map(|(k, w)| {
                let th = 2.0 * PI * k as f64 * t;
                (w * th.cos(), w * th.sin())
            })
            .fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
        assert!((p.value.re - direct.0).abs() < 1e-12);
        assert!((p.value.im - direct.1).abs() < 1e-12);
    }
}

#[test]
fn reports_are_deterministic() {
    let spec = SequenceSpec::iid(LatticeMeasure::new(-2, vec![0.1, 0.2, 0.3, 0.2, 0.2]).unwrap());
    let opts = HypothesisOptions {
        d2_integrals: false,
        ..HypothesisOptions::default()
    };
    let a = check_convergence_hypotheses(&spec, 30, &opts).unwrap();
    let b = check_convergence_hypotheses(&spec, 30, &opts).unwrap();
    assert_eq!(a, b);
}
