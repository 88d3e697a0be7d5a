//! Acceptance criteria 1-13. Each test prints one `criterion N: PASS|FAIL` line.

mod common;

use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;

use common::*;
use stabpairs::descent::DescentOptions;
use stabpairs::energy::{chow_log_mahler, k_energy_algebraic};
use stabpairs::group::{hermitian_exp, random_sl, random_traceless_hermitian, real_inner, CMatrix, ExactGroupElement, OnePsg};
use stabpairs::lattice::{psg_weight, RepVector, SlotKind, TensorVector};
use stabpairs::norms::{arestov_check, jensen_check, lp_norm, SupNormOptions};
use stabpairs::oracle::{curve_geometry_oracle, OracleOptions};
use stabpairs::pair::{
    descend_pair, find_destabilizer, kempf_ness_gradient, kempf_ness_value, randomized_torus_probe, torus_semistable,
    witness_destabilizes, Pair, TensoredPair, Verdict, WitnessCheck,
};
use stabpairs::poly::{monomials, HomogeneousPolynomial, VariableShape};
use stabpairs::scalar::{best_rational, exact, Coeff, Exact};
use stabpairs::variety::{
    chow_form_curve, chow_form_hypersurface_raw, hurwitz_form_curve, hurwitz_form_curve_raw, HypersurfaceVariety,
    RationalCurve,
};

fn report(n: u32, ok: bool, detail: impl AsRef<str>) {
    println!("criterion {n}: {} | {}", if ok { "PASS" } else { "FAIL" }, detail.as_ref());
    assert!(ok, "criterion {n} failed: {}", detail.as_ref());
}

/// `-(d/2) sum_{j=1}^N 1/j`, written out independently of the library.
fn dirichlet_log_moment(n: usize, d: u32) -> f64 {
    let mut h = 0.0;
    for j in 1..=n {
        h += 1.0 / j as f64;
    }
    -(d as f64) / 2.0 * h
}

#[test]
fn criterion_01_monomial_mahler_identity() {
    let mut cases = 0;
    let mut outside = Vec::new();
    let mut worst_stderr = 0.0f64;
    let mut worst_time = 0.0f64;
    for n in 1..=4usize {
        for d in 1..=6u32 {
            for e in monomials(n + 1, d) {
                let p = HomogeneousPolynomial::new(VariableShape::vector(n + 1).unwrap(), d, vec![(e.clone(), Complex64::new(1.0, 0.0))])
                    .unwrap();
                let t0 = Instant::now();
                let est = lp_norm(&p, 0.0, 200_000, 7).unwrap();
                worst_time = worst_time.max(t0.elapsed().as_secs_f64());
                worst_stderr = worst_stderr.max(est.stderr);
                let expect = dirichlet_log_moment(n, d);
                if (est.log_value - expect).abs() > 3.0 * est.stderr {
                    outside.push(format!("{e:?}: {:.5} vs {expect:.5} (se {:.5})", est.log_value, est.stderr));
                }
                cases += 1;
            }
        }
    }
    let ok = outside.is_empty() && worst_stderr < 0.02 && worst_time < 10.0;
    report(
        1,
        ok,
        format!("{cases} monomials, {} outside 3 stderr {outside:?}, max stderr {worst_stderr:.4}, max time {worst_time:.2}s", outside.len()),
    );
}

fn random_suite() -> Vec<stabpairs::poly::FloatPolynomial> {
    let mut r = rng(2024);
    (0..100)
        .map(|_| {
            let n = r.random_range(1..=3usize);
            let d = r.random_range(1..=5u32);
            random_float_poly(&mut r, n + 1, d)
        })
        .collect()
}

#[test]
fn criterion_02_arestov_sandwich() {
    let sup = SupNormOptions::default();
    let mut failures = Vec::new();
    let mut min_lower = f64::INFINITY;
    let mut min_upper = f64::INFINITY;
    for (i, p) in random_suite().iter().enumerate() {
        let rep = arestov_check(p, 200_000, 100 + i as u64, &sup).unwrap();
        min_lower = min_lower.min(rep.lower_margin / rep.mahler.stderr);
        min_upper = min_upper.min(rep.upper_margin / rep.mahler.stderr);
        if !rep.holds {
            failures.push(i);
        }
    }
    let mut equality = Vec::new();
    for n in 1..=3usize {
        for d in 1..=5u32 {
            let mut e = vec![0u32; n + 1];
            e[0] = d;
            let p = HomogeneousPolynomial::new(VariableShape::vector(n + 1).unwrap(), d, vec![(e, Complex64::new(1.0, 0.0))]).unwrap();
            let rep = arestov_check(&p, 200_000, 7, &sup).unwrap();
            if rep.lower_margin.abs() > 3.0 * rep.mahler.stderr || rep.sup.log_value.abs() > 1e-12 {
                equality.push((n, d, rep.lower_margin));
            }
        }
    }
    report(
        2,
        failures.is_empty() && equality.is_empty(),
        format!(
            "100 random polynomials: {} violations; smallest margins in stderr units lower {min_lower:.2}, upper {min_upper:.2}; z0^d equality misses {equality:?}",
            failures.len()
        ),
    );
}

#[test]
fn criterion_03_jensen_ordering() {
    let mut failures = Vec::new();
    let mut min_margin = f64::INFINITY;
    for (i, p) in random_suite().iter().enumerate() {
        let rep = jensen_check(p, 2.0, 200_000, 100 + i as u64).unwrap();
        min_margin = min_margin.min(rep.margin);
        if !rep.holds {
            failures.push(i);
        }
    }
    report(3, failures.is_empty(), format!("{} violations, smallest margin {min_margin:.4}", failures.len()));
}

#[test]
fn criterion_04_weight_limit_slopes() {
    let mut r = rng(44);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let n = r.random_range(2..=4usize);
        let d = r.random_range(1..=4u32);
        let e = rep(random_exact_poly(&mut r, n, d, 3));
        let lambda = random_lambda(&mut r, n, 3);
        let psg = OnePsg::new(lambda.clone()).unwrap();
        let exact_w = psg_weight(&psg, &e).unwrap();
        let fe = e.to_float();
        let log_norm = |t: f64| {
            let g = psg.at(Complex64::new(t, 0.0));
            fe.act(&g).unwrap().norm_sqr().ln()
        };
        let (t1, t2) = (1e-2f64, 1e-3f64);
        let slope = (log_norm(t2) - log_norm(t1)) / ((t2 * t2).ln() - (t1 * t1).ln());
        let err = (slope - exact_w as f64).abs();
        worst = worst.max(err);
    }
    report(4, worst < 0.05, format!("20 one-parameter subgroups, max |slope - weight| = {worst:.2e}"));
}

#[test]
fn criterion_05_forms_and_degrees() {
    // Conic Hurwitz form against b1^2 - 4 b0 b2 on 1 x 3 matrices.
    let conic = RationalCurve::rational_normal(2).unwrap();
    let h = hurwitz_form_curve_raw(&conic).unwrap();
    let shape = VariableShape::matrix(1, 3).unwrap();
    let target = HomogeneousPolynomial::new(shape, 2, vec![(vec![0, 2, 0], exact(1, 0)), (vec![1, 0, 1], exact(-4, 0))]).unwrap();
    let ratios: Vec<Exact> = target.terms().iter().map(|(e, c)| h.coefficient(e) / c.clone()).collect();
    let proportional = h.len() == target.len() && ratios.windows(2).all(|w| w[0] == w[1]);
    let scalar = ratios[0].clone();

    // Degrees for d = 2, 3 on the rational normal curve and on a generic plane curve.
    let mut degrees_ok = true;
    let mut degs = Vec::new();
    for d in [2u32, 3] {
        let rnc = RationalCurve::rational_normal(d).unwrap();
        let mut r = rng(50 + d as u64);
        let gamma: Vec<Vec<Exact>> = (0..3).map(|_| (0..=d).map(|_| exact(r.random_range(-4..=4), 0)).collect()).collect();
        let plane = RationalCurve::new(gamma).unwrap();
        for c in [rnc, plane] {
            let (rc, hc) = (chow_form_curve(&c).unwrap(), hurwitz_form_curve(&c).unwrap());
            degrees_ok &= rc.degree() == 2 * d && hc.degree() == 2 * d - 2;
            degs.push((d, rc.degree(), hc.degree()));
        }
    }

    // Parametric vs hypersurface Chow forms of the conic on 20 random exact matrices.
    let param = chow_form_curve(&conic).unwrap();
    let f = stabpairs::poly::HomogeneousPolynomial::new(
        VariableShape::vector(3).unwrap(),
        2,
        vec![(vec![1, 0, 1], exact(1, 0)), (vec![0, 2, 0], exact(-1, 0))],
    )
    .unwrap();
    let hyp = chow_form_hypersurface_raw(&HypersurfaceVariety::new(f).unwrap()).unwrap();
    let mut r = rng(55);
    let mut ratio: Option<Exact> = None;
    let mut constant = true;
    let mut evaluated = 0;
    while evaluated < 20 {
        let a: Vec<Exact> = (0..6).map(|_| exact(r.random_range(-5..=5), r.random_range(-2..=2))).collect();
        let (x, y) = (param.evaluate(&a).unwrap(), hyp.evaluate(&a).unwrap());
        if x == exact(0, 0) || y == exact(0, 0) {
            constant &= x == y;
            continue;
        }
        let q = x / y;
        match &ratio {
            None => ratio = Some(q),
            Some(r0) => constant &= *r0 == q,
        }
        evaluated += 1;
    }
    report(
        5,
        proportional && degrees_ok && constant,
        format!(
            "conic Hurwitz = ({}) * (b1^2 - 4 b0 b2): {proportional}; (d, deg R, deg Δ) = {degs:?}; parametric/hypersurface ratio constant over 20 points: {constant} (ratio {})",
            stabpairs::json::exact_to_json(&scalar),
            ratio.map(|q| stabpairs::json::exact_to_json(&q).to_string()).unwrap_or_default()
        ),
    );
}

fn exact_conjugator(entries: &[[f64; 2]]) -> Option<ExactGroupElement> {
    let n = (entries.len() as f64).sqrt() as usize;
    let vals: Vec<Exact> =
        entries.iter().map(|[re, im]| Exact::new(best_rational(*re, 1 << 20), best_rational(*im, 1 << 20))).collect();
    ExactGroupElement::new(n, vals).ok()
}

/// Remainder of `a` modulo `b` over `Q(i)`, ascending coefficients.
fn poly_rem(a: &[Exact], b: &[Exact]) -> (Vec<Exact>, Vec<Exact>) {
    let zero = exact(0, 0);
    let strip = |mut p: Vec<Exact>| {
        while p.last() == Some(&zero) {
            p.pop();
        }
        p
    };
    let b = strip(b.to_vec());
    let mut r = strip(a.to_vec());
    let mut q = vec![zero.clone(); r.len().saturating_sub(b.len()) + 1];
    while r.len() >= b.len() {
        let f = r.last().unwrap().clone() / b.last().unwrap().clone();
        let shift = r.len() - b.len();
        for (i, c) in b.iter().enumerate() {
            r[shift + i] = r[shift + i].clone() - f.clone() * c.clone();
        }
        q[shift] = f;
        r.pop();
        r = strip(r);
    }
    (strip(q), r)
}

/// Largest `k` with `h^k | f`, and the cofactor.
fn multiplicity(f: &[Exact], h: &[Exact]) -> (usize, Vec<Exact>) {
    let mut f = f.to_vec();
    let mut k = 0;
    loop {
        let (q, r) = poly_rem(&f, h);
        if !r.is_empty() {
            return (k, f);
        }
        f = q;
        k += 1;
    }
}

/// Destabilization at the roots of `h`, checked from orders of vanishing: `w` vanishes to higher
/// order than `v` at every root of `h`. Needs `h` squarefree and `v / h^k` coprime to `h`.
fn algebraic_root_destabilizes(v: &RepVector<Exact>, w: &RepVector<Exact>, modulus: &[[String; 2]], conj: &[[f64; 2]]) -> bool {
    let (RepVector::Polynomial(v), RepVector::Polynomial(w)) = (v, w) else { return false };
    let parse = |s: &String| stabpairs::scalar::parse_rational(s).unwrap();
    let h: Vec<Exact> = modulus.iter().map(|[re, im]| Exact::new(parse(re), parse(im))).collect();
    if h.len() < 2 {
        return false;
    }
    let affine = |f: &stabpairs::poly::ExactPolynomial| -> Vec<Exact> {
        let d = f.degree();
        (0..=d).map(|k| f.coefficient(&[k, d - k])).collect()
    };
    let dh: Vec<Exact> = h.iter().enumerate().skip(1).map(|(k, c)| c.clone() * exact(k as i64, 0)).collect();
    let coprime = |a: &[Exact], b: &[Exact]| {
        let (mut a, mut b) = (a.to_vec(), b.to_vec());
        loop {
            let (_, r) = poly_rem(&a, &b);
            if r.is_empty() {
                return b.len() == 1;
            }
            a = b;
            b = r;
        }
    };
    let (kv, cofactor) = multiplicity(&affine(v), &h);
    let (kw, _) = multiplicity(&affine(w), &h);
    // The numerical conjugator is [[1, 0], [α, 1]] with h(α) ≈ 0.
    let alpha = Complex64::new(conj[2][0], conj[2][1]);
    let h_at = h.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * alpha + c.to_c64());
    coprime(&h, &dh) && coprime(&cofactor, &h) && kw > kv && h_at.norm() < 1e-8
}

#[test]
fn criterion_06_binary_forms_have_no_semistable_pairs() {
    let mut r = rng(6);
    let opts = DescentOptions { restarts: 1, seed: 6, ..Default::default() };
    let mut missing = Vec::new();
    let mut trials_used = Vec::new();
    for d in 1..=4u32 {
        for _ in 0..25 {
            let v = rep(random_exact_poly(&mut r, 2, d - 1, 5));
            let w = rep(random_exact_poly(&mut r, 2, d, 5));
            let p = Pair::exact(v.clone(), w.clone()).unwrap();
            let s = find_destabilizer(&p, 10, &opts).unwrap();
            let verified = match (&s.witness, s.trial) {
                (Some(wit), Some(_)) if wit.check == WitnessCheck::Exact && wit.modulus.is_some() => {
                    algebraic_root_destabilizes(&v, &w, wit.modulus.as_ref().unwrap(), &wit.conjugator)
                }
                (Some(wit), Some(_)) if wit.check == WitnessCheck::Exact => {
                    let psg = OnePsg::new(wit.lambda.clone()).unwrap();
                    match exact_conjugator(&wit.conjugator) {
                        Some(g) => witness_destabilizes(&psg, &v.act(&g).unwrap(), &w.act(&g).unwrap()).unwrap(),
                        None => false,
                    }
                }
                _ => false,
            };
            if verified {
                trials_used.push(s.trial.unwrap());
            } else {
                missing.push(d);
            }
        }
    }
    let max_trial = trials_used.iter().copied().max().unwrap_or(0);
    report(
        6,
        missing.is_empty(),
        format!("100 pairs (25 per d = 1..4): {} without verified destabilizer; max trials used {max_trial}", missing.len()),
    );
}

#[test]
fn criterion_07_blow_up_pair() {
    let p = blow_up_pair();
    let probe = randomized_torus_probe(&p, 50, 7).unwrap();
    let opts = DescentOptions { restarts: 5, max_iters: 10_000, seed: 7, ..Default::default() };
    let cert = descend_pair(&p, &opts);
    let ok = probe.semistable && cert.verdict == Verdict::NoDivergenceObserved;
    report(
        7,
        ok,
        format!(
            "torus probe over 50 trials semistable: {}; descent verdict {:?}, inf estimate {:.6} (numerical evidence, not a proof)",
            probe.semistable,
            cert.verdict,
            cert.inf_estimate.unwrap_or(f64::NAN)
        ),
    );
}

/// The identity matrix as a vector in the left-regular representation.
fn identity_tensor(n: usize, q: u32) -> Option<TensorVector<Exact>> {
    if q == 0 {
        return None;
    }
    let one = TensorVector::new(n, vec![SlotKind::Operator], (0..n).map(|r| (vec![r * n + r], exact(1, 0)))).unwrap();
    let mut out = one.clone();
    for _ in 1..q {
        out = out.tensor(&one).unwrap();
    }
    Some(out)
}

fn tensor_power(t: &TensorVector<Exact>, k: u32) -> TensorVector<Exact> {
    let mut out = t.clone();
    for _ in 1..k {
        out = out.tensor(t).unwrap();
    }
    out
}

fn random_tensor(r: &mut rand_chacha::ChaCha8Rng, n: usize, slots: Vec<SlotKind>) -> TensorVector<Exact> {
    loop {
        let dims: Vec<usize> = slots.iter().map(|s| s.dim(n)).collect();
        let coords: Vec<(Vec<usize>, Exact)> = (0..3)
            .map(|_| (dims.iter().map(|&m| r.random_range(0..m)).collect(), exact(r.random_range(-3..=3), r.random_range(-1..=1))))
            .collect();
        let t = TensorVector::new(n, slots.clone(), coords).unwrap();
        if !t.is_zero() {
            return t;
        }
    }
}

#[test]
fn criterion_08_tensored_pair_bookkeeping() {
    let mut r = rng(8);
    let mut mismatches = Vec::new();
    let mut cases = 0;
    for n in [2usize, 3] {
        for q in 0..=2u32 {
            for m in 1..=2u32 {
                let v = random_tensor(&mut r, n, vec![SlotKind::Vector]);
                let w = random_tensor(&mut r, n, vec![SlotKind::Vector, SlotKind::Wedge2]);
                let base = Pair::exact(RepVector::Tensor(v.clone()), RepVector::Tensor(w.clone())).unwrap();
                let tp = TensoredPair::with_q(&base, m, q).unwrap();
                let vm = tensor_power(&v, m);
                let big_v = match identity_tensor(n, q) {
                    Some(i) => i.tensor(&vm).unwrap(),
                    None => vm,
                };
                let big_w = tensor_power(&w, m + 1);
                let brute = Pair::exact(RepVector::Tensor(big_v), RepVector::Tensor(big_w)).unwrap();
                let (a_left, a_right) = tp.polytopes().unwrap();
                let (b_left, b_right) = brute.polytopes().unwrap();
                let same_polytopes = a_left == b_left && a_right == b_right;
                let same_test = tp.torus_test().unwrap().semistable == torus_semistable(&brute).unwrap().semistable;
                let sigma = random_sl(n, &mut r);
                let (x, y) = (tp.value(&sigma), kempf_ness_value(&sigma, &brute));
                let same_value = (x - y).abs() <= 1e-9 * y.abs().max(1.0);
                if !(same_polytopes && same_test && same_value) {
                    mismatches.push((n, q, m, same_polytopes, same_test, x, y));
                }
                cases += 1;
            }
        }
    }
    report(8, mismatches.is_empty(), format!("{cases} cases (N = 1, 2; q <= 2; m <= 2); mismatches {mismatches:?}"));
}

#[test]
fn criterion_09_kempf_ness_gradient() {
    let mut r = rng(9);
    let mut worst = 0.0f64;
    for i in 0..50 {
        let n = 2 + i % 3;
        let p = if i % 2 == 0 {
            let d = r.random_range(1..=3u32);
            Pair::exact(rep(random_exact_poly(&mut r, n, d, 3)), rep(random_exact_poly(&mut r, n, d + 1, 3))).unwrap()
        } else {
            let v = random_tensor(&mut r, n, vec![SlotKind::Vector, SlotKind::Vector]);
            let w = random_tensor(&mut r, n, vec![SlotKind::Wedge2]);
            Pair::exact(RepVector::Tensor(v), RepVector::Tensor(w)).unwrap()
        };
        let h0 = random_traceless_hermitian(n, 0.5, &mut r);
        let sigma = random_unitary(&mut r, n) * hermitian_exp(&h0);
        let g = kempf_ness_gradient(&sigma, &p);
        let eps = 1e-5;
        let mut fd = CMatrix::zeros(n, n);
        for b in hermitian_basis(n) {
            let plus = hermitian_exp(&(&b * Complex64::new(eps, 0.0))) * &sigma;
            let minus = hermitian_exp(&(&b * Complex64::new(-eps, 0.0))) * &sigma;
            let dir = (kempf_ness_value(&plus, &p) - kempf_ness_value(&minus, &p)) / (2.0 * eps);
            fd += b * Complex64::new(dir, 0.0);
        }
        let rel = real_inner(&(&fd - &g), &(&fd - &g)).sqrt() / real_inner(&g, &g).sqrt().max(1e-12);
        worst = worst.max(rel);
    }
    report(9, worst < 1e-5, format!("50 instances, max relative error {worst:.2e}"));
}

#[test]
fn criterion_10_k_energy_oracle_equivalence() {
    let t0 = Instant::now();
    let mut r = rng(10);
    let mut rows = Vec::new();
    let mut ok = true;
    for d in [2u32, 3] {
        let (c, xp) = curve_pair(d);
        for _ in 0..5 {
            let sigma = random_sigma(&mut r, d as usize + 1, 0.6);
            let o = curve_geometry_oracle(&sigma, &c, &OracleOptions::default()).unwrap();
            let a = k_energy_algebraic(&sigma, &xp, 200_000, 11).unwrap();
            let diff = (a.value - o.k_energy).abs();
            let pass = diff <= 0.02 * o.k_energy.abs() || diff <= 1e-2;
            ok &= pass;
            rows.push(format!("d={d}: oracle {:.5} algebraic {:.5}±{:.5}", o.k_energy, a.value, a.stderr));
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    report(10, ok && secs < 300.0, format!("{} in {secs:.1}s", rows.join("; ")));
}

/// The literal form: `-deg R · F°(σ)` against `log |σ·R|_0` (unit-normalized).
#[test]
fn criterion_11_chow_mahler_identity() {
    let mut r = rng(11);
    let (c, xp) = curve_pair(2);
    let mut worst = 0.0f64;
    let mut rows = Vec::new();
    for _ in 0..10 {
        let sigma = random_sigma(&mut r, 3, 0.6);
        let o = curve_geometry_oracle(&sigma, &c, &OracleOptions::default()).unwrap();
        let m = chow_log_mahler(&sigma, &xp, 200_000, 12);
        let lhs = -(xp.deg_chow as f64) * o.aubin_f0;
        let tol = 3.0 * (m.stderr + 1e-3);
        worst = worst.max((lhs - m.value).abs() / tol);
        rows.push(format!("{lhs:.4}/{:.4}", m.value));
    }
    report(11, worst <= 1.0, format!("-degR F° / log|σR|_0 over 10 σ: {}; worst deviation {worst:.1} x tolerance", rows.join(" ")));
}

#[test]
fn criterion_12_curve_geometry_sanity() {
    let mut r = rng(12);
    let mut rows = Vec::new();
    let mut ok = true;
    for d in [2u32, 3] {
        let c = RationalCurve::rational_normal(d).unwrap();
        let n = d as usize + 1;
        for sigma in [CMatrix::identity(n, n), random_sigma(&mut r, n, 0.8)] {
            let o = curve_geometry_oracle(&sigma, &c, &OracleOptions::default()).unwrap();
            let pass = (o.volume - d as f64).abs() < 1e-3 && (o.mu - 2.0 / d as f64).abs() < 1e-2;
            ok &= pass;
            rows.push(format!("d={d}: V={:.6} mu={:.6}", o.volume, o.mu));
        }
    }
    report(12, ok, rows.join("; "));
}

/// The literal sign: `deg R · w(Δ) - deg Δ · w(R) >= 0` for sampled directions.
#[test]
fn criterion_13_slope_nonnegativity() {
    let mut r = rng(13);
    let mut negative = Vec::new();
    let mut values = Vec::new();
    for d in [2u32, 3] {
        let c = RationalCurve::rational_normal(d).unwrap();
        let (rf, hf) = (RepVector::Polynomial(chow_form_curve(&c).unwrap()), RepVector::Polynomial(hurwitz_form_curve(&c).unwrap()));
        let (dr, dh) = (rf.degree() as i64, hf.degree() as i64);
        for _ in 0..20 {
            let lambda = random_lambda(&mut r, d as usize + 1, 3);
            let psg = OnePsg::new(lambda.clone()).unwrap();
            let s = dr * psg_weight(&psg, &hf).unwrap() - dh * psg_weight(&psg, &rf).unwrap();
            values.push(s);
            if s < 0 {
                negative.push((d, lambda, s));
            }
        }
    }
    report(13, negative.is_empty(), format!("values {values:?}; {} negative", negative.len()));
}
