mod common;

use num_complex::Complex64;

use common::*;
use stabpairs::descent::DescentOptions;
use stabpairs::energy::{
    aubin_f0_algebraic, chow_log_mahler, coercivity_value, k_energy_algebraic, log_tan_dist_p, orbit_distance,
    DistanceTarget, OrbitOptions,
};
use stabpairs::group::{CMatrix, OnePsg};
use stabpairs::lattice::{psg_weight, RepVector};
use stabpairs::oracle::{curve_geometry_oracle, OracleOptions};
use stabpairs::pair::{Pair, Verdict};
use stabpairs::variety::{chow_form_curve, hurwitz_form_curve, RationalCurve};

fn diag(exps: &[i64], s: f64) -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        exps.len(),
        exps.iter().map(|&a| Complex64::new((a as f64 * s).exp(), 0.0)),
    ))
}

/// The oracle's `F°` uses the potential `log(|σγ|^2/|γ|^2)`, so it equals twice the unsquared
/// Mahler form: `-deg R · F° = 2 log(|σR|_0 / |R|_0)`.
#[test]
fn aubin_f0_matches_twice_the_chow_mahler_measure() {
    let mut r = rng(111);
    let (c, xp) = curve_pair(2);
    let mut worst = 0.0f64;
    for _ in 0..4 {
        let sigma = random_sigma(&mut r, 3, 0.6);
        let o = curve_geometry_oracle(&sigma, &c, &OracleOptions::default()).unwrap();
        let m = chow_log_mahler(&sigma, &xp, 200_000, 12);
        let lhs = -(xp.deg_chow as f64) * o.aubin_f0;
        let tol = 3.0 * (2.0 * m.stderr + 1e-3);
        worst = worst.max((lhs - 2.0 * m.value).abs() / tol);
    }
    assert!(worst <= 1.0, "worst deviation {worst} x tolerance");
}

#[test]
fn aubin_f0_algebraic_is_normalized_chow_mahler() {
    let mut r = rng(112);
    let (_, xp) = curve_pair(2);
    let sigma = random_sigma(&mut r, 3, 0.5);
    let m = chow_log_mahler(&sigma, &xp, 20_000, 5);
    let f = aubin_f0_algebraic(&sigma, &xp, 20_000, 5);
    assert!((f.value + m.value / xp.deg_chow as f64).abs() < 1e-12);
    assert_eq!(aubin_f0_algebraic(&CMatrix::identity(3, 3), &xp, 20_000, 5).value, 0.0);
}

/// With the min-pairing weight, `deg R · w(Δ) - deg Δ · w(R) <= 0` for every direction.
#[test]
fn slope_is_nonpositive_for_rational_normal_curves() {
    let mut r = rng(13);
    for d in [2u32, 3] {
        let c = RationalCurve::rational_normal(d).unwrap();
        let (rf, hf) = (RepVector::Polynomial(chow_form_curve(&c).unwrap()), RepVector::Polynomial(hurwitz_form_curve(&c).unwrap()));
        let (dr, dh) = (rf.degree() as i64, hf.degree() as i64);
        for _ in 0..20 {
            let psg = OnePsg::new(random_lambda(&mut r, d as usize + 1, 3)).unwrap();
            assert!(dr * psg_weight(&psg, &hf).unwrap() - dh * psg_weight(&psg, &rf).unwrap() <= 0);
        }
    }
}

/// Along `diag(e^{a s})` each Mahler measure grows like `s · max <χ, a>`, so the K-energy slope is
/// `2 (deg R · max_Δ - deg Δ · max_R) / (d^2 (n+1))` with `max_X = -w_{-a}(X)`.
#[test]
fn k_energy_slope_matches_exact_weights() {
    let (c, xp) = curve_pair(2);
    let rf = RepVector::Polynomial(chow_form_curve(&c).unwrap());
    let hf = RepVector::Polynomial(hurwitz_form_curve(&c).unwrap());
    let (dr, dh) = (xp.deg_chow as f64, xp.deg_hurwitz.unwrap() as f64);
    for a in [[1i64, 0, -1], [2, -1, -1], [1, 1, -2], [-2, 1, 1], [1, -2, 1]] {
        let neg = OnePsg::new(a.iter().map(|x| -x).collect()).unwrap();
        let max_r = -psg_weight(&neg, &rf).unwrap() as f64;
        let max_h = -psg_weight(&neg, &hf).unwrap() as f64;
        let expected = 2.0 * (dr * max_h - dh * max_r) / (4.0 * 2.0);
        let (s1, s2) = (4.0, 8.0);
        let k1 = k_energy_algebraic(&diag(&a, s1), &xp, 200_000, 9).unwrap();
        let k2 = k_energy_algebraic(&diag(&a, s2), &xp, 200_000, 9).unwrap();
        let slope = (k2.value - k1.value) / (s2 - s1);
        let tol = 0.03 * expected.abs() + 3.0 * (k1.stderr + k2.stderr) / (s2 - s1);
        assert!(expected >= 0.0);
        assert!((slope - expected).abs() <= tol, "a = {a:?}: slope {slope} expected {expected} tol {tol}");
    }
}

#[test]
fn coercivity_at_identity_is_the_trace_term() {
    let (_, xp) = curve_pair(2);
    let (dr, dh) = (xp.deg_chow as f64, xp.deg_hurwitz.unwrap() as f64);
    for (m, k) in [(1u32, 1u32), (2, 1), (1, 2), (3, 2)] {
        let e = coercivity_value(&CMatrix::identity(3, 3), &xp, m, k, 20_000, 4).unwrap();
        let pref = (k as f64).powi(-3) / 2.0;
        let expected = -dr * dh * 3f64.ln() * pref;
        assert!((e.value - expected).abs() < 1e-12, "m={m} k={k}: {} vs {expected}", e.value);
        assert_eq!(e.stderr, 0.0);
    }
    assert!(coercivity_value(&CMatrix::identity(3, 3), &xp, 0, 1, 1000, 4).is_err());
}

#[test]
fn conic_orbit_distance_is_bounded() {
    let (_, xp) = curve_pair(2);
    let opts = OrbitOptions {
        descent: DescentOptions { restarts: 2, max_iters: 400, seed: 5, ..Default::default() },
        samples: 4000,
    };
    let cert = orbit_distance(DistanceTarget::X(&xp), 0.0, &opts).unwrap();
    assert_eq!(cert.verdict, Verdict::NoDivergenceObserved);
    let inf = cert.inf_estimate.unwrap();
    assert!(inf.is_finite() && inf > -1.0 && inf <= 0.0, "inf {inf}");
}

#[test]
fn planted_pair_distance_diverges() {
    let p = Pair::exact(rep(binary(&[0, 1])), rep(binary(&[0, 0, 1]))).unwrap();
    let opts = OrbitOptions { descent: DescentOptions { restarts: 2, seed: 6, ..Default::default() }, samples: 2000 };
    let cert = orbit_distance(DistanceTarget::Pair(&p), 2.0, &opts).unwrap();
    assert_eq!(cert.verdict, Verdict::DivergenceDetected);
    assert!(cert.witness.is_some());
}

#[test]
fn equal_components_have_zero_distance() {
    let mut r = rng(31);
    let f = random_exact_poly(&mut r, 3, 2, 3);
    let p = Pair::exact(rep(f.clone()), rep(f)).unwrap();
    let sigma = random_sigma(&mut r, 3, 0.7);
    for q in [0.0, 1.0, 2.0, 4.0] {
        let e = log_tan_dist_p(&sigma, DistanceTarget::Pair(&p), q, 5000, 2).unwrap();
        if q == 0.0 {
            // Independent sample sets for the two sides: zero up to noise.
            assert!(e.value.abs() <= 4.0 * e.stderr + 1e-12, "p={q}: {} ± {}", e.value, e.stderr);
        } else if q == 2.0 {
            assert!(e.value.abs() < 1e-12);
        }
    }
}
