//! Self-check suites run by `stabpairs verify`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use stabpairs::descent::DescentOptions;
use stabpairs::energy::{aubin_f0_algebraic, coercivity_value, k_energy_algebraic};
use stabpairs::group::{hermitian_exp, random_traceless_hermitian, CMatrix, FloatGroupElement, OnePsg};
use stabpairs::lattice::{minkowski_sum, psg_weight, wedge_index, weight_polytope, RepVector, SlotKind, TensorVector};
use stabpairs::norms::{arestov_check, harmonic, jensen_check, lp_norm, SupNormOptions};
use stabpairs::oracle::{curve_geometry_oracle, OracleOptions};
use stabpairs::pair::{descend_pair, randomized_torus_probe, torus_semistable, witness_destabilizes, Pair, Verdict};
use stabpairs::poly::{monomials, ExactPolynomial, FloatPolynomial, HomogeneousPolynomial, VariableShape};
use stabpairs::scalar::{exact, Exact};
use stabpairs::variety::{
    build_x_pair, chow_form_curve, chow_form_hypersurface_raw, hurwitz_form_curve, hurwitz_form_curve_raw,
    HypersurfaceVariety, RationalCurve, Variety, XPairOptions,
};
use stabpairs::{Error, Result};

use crate::RunConfig;

pub const SUITES: [&str; 5] = ["norms", "weights", "forms", "energy", "pairs"];

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suites: Vec<String>,
    pub checks: Vec<Check>,
    pub passed: usize,
    pub failed: usize,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failed == 0
    }
}

struct Suite<'a> {
    name: &'a str,
    checks: Vec<Check>,
    verbose: bool,
}

impl Suite<'_> {
    fn record(&mut self, name: &str, passed: bool, detail: String) {
        if self.verbose {
            eprintln!("[{}] {name}: {}", self.name, if passed { "pass" } else { "FAIL" });
        }
        self.checks.push(Check { suite: self.name.into(), name: name.into(), passed, detail });
    }
}

pub fn run(requested: &[String], cfg: &RunConfig) -> Result<Report> {
    let names: Vec<String> = if requested.is_empty() { SUITES.iter().map(|s| s.to_string()).collect() } else { requested.to_vec() };
    let mut checks = Vec::new();
    for name in &names {
        let mut s = Suite { name, checks: Vec::new(), verbose: cfg.verbose };
        match name.as_str() {
            "norms" => norms(&mut s, cfg)?,
            "weights" => weights(&mut s, cfg)?,
            "forms" => forms(&mut s)?,
            "energy" => energy(&mut s, cfg)?,
            "pairs" => pairs(&mut s, cfg)?,
            other => return Err(Error::schema(format!("unknown suite {other}"))),
        }
        checks.extend(s.checks);
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    Ok(Report { suites: names, passed: checks.len() - failed, failed, checks })
}

fn gaussian(r: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(r.sample(StandardNormal), r.sample(StandardNormal))
}

fn random_float_poly(r: &mut ChaCha8Rng, cols: usize, degree: u32) -> Result<FloatPolynomial> {
    let terms: Vec<(Vec<u32>, Complex64)> = monomials(cols, degree).into_iter().map(|e| (e, gaussian(r))).collect();
    HomogeneousPolynomial::new(VariableShape::vector(cols)?, degree, terms)
}

fn random_exact_poly(r: &mut ChaCha8Rng, cols: usize, degree: u32) -> Result<ExactPolynomial> {
    loop {
        let terms: Vec<(Vec<u32>, Exact)> =
            monomials(cols, degree).into_iter().map(|e| (e, exact(r.random_range(-3..=3), 0))).collect();
        let p = HomogeneousPolynomial::new(VariableShape::vector(cols)?, degree, terms)?;
        if !p.is_zero() {
            return Ok(p);
        }
    }
}

fn monomial(cols: usize, e: &[u32]) -> Result<FloatPolynomial> {
    let d = e.iter().sum();
    HomogeneousPolynomial::new(VariableShape::vector(cols)?, d, vec![(e.to_vec(), Complex64::new(1.0, 0.0))])
}

fn norms(s: &mut Suite, cfg: &RunConfig) -> Result<()> {
    let samples = cfg.samples.unwrap_or(200_000);
    for e in [vec![2u32, 0, 0], vec![1, 1, 1], vec![3, 1, 0, 0], vec![0, 2, 2, 1, 1]] {
        let n = e.len() - 1;
        let d: u32 = e.iter().sum();
        let m = lp_norm(&monomial(e.len(), &e)?, 0.0, samples, cfg.seed)?;
        let expected = -(d as f64) / 2.0 * harmonic(n);
        let dev = (m.log_value - expected).abs();
        s.record(
            &format!("monomial Mahler measure {e:?}"),
            dev <= 3.0 * m.stderr,
            format!("{:.5} vs {expected:.5}, stderr {:.2e}", m.log_value, m.stderr),
        );
    }
    let mut r = ChaCha8Rng::seed_from_u64(cfg.seed);
    let sup = SupNormOptions { candidates: 1024, starts: 4, seed: cfg.seed, ..Default::default() };
    let (mut arestov_ok, mut jensen_ok) = (0, 0);
    let (mut worst_a, mut worst_j) = (f64::INFINITY, f64::INFINITY);
    const COUNT: usize = 20;
    for _ in 0..COUNT {
        let cols = r.random_range(2..=4);
        let degree = r.random_range(1..=4);
        let p = random_float_poly(&mut r, cols, degree)?;
        let a = arestov_check(&p, 20_000, cfg.seed, &sup)?;
        let j = jensen_check(&p, 2.0, 20_000, cfg.seed)?;
        arestov_ok += a.holds as usize;
        jensen_ok += j.holds as usize;
        worst_a = worst_a.min(a.lower_margin.min(a.upper_margin));
        worst_j = worst_j.min(j.margin);
    }
    s.record("Arestov sandwich", arestov_ok == COUNT, format!("{arestov_ok}/{COUNT} hold, smallest margin {worst_a:.4}"));
    s.record("Jensen ordering", jensen_ok == COUNT, format!("{jensen_ok}/{COUNT} hold, smallest margin {worst_j:.4}"));
    Ok(())
}

/// Nonzero `(a, b, -a-b)` with `|a|, |b| <= bound`.
fn direction(r: &mut ChaCha8Rng, bound: i64) -> Vec<i64> {
    loop {
        let (a, b) = (r.random_range(-bound..=bound), r.random_range(-bound..=bound));
        if a != 0 || b != 0 {
            return vec![a, b, -a - b];
        }
    }
}

fn weights(s: &mut Suite, cfg: &RunConfig) -> Result<()> {
    let mut r = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    // Slopes of log |λ(e^t) P|^2 as t -> -inf equal twice the weight.
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let p = random_exact_poly(&mut r, 3, 3)?;
        let a = direction(&mut r, 2);
        let w = psg_weight(&OnePsg::new(a.clone())?, &RepVector::Polynomial(p.clone()))? as f64;
        let f = p.to_float();
        let at = |t: f64| -> Result<f64> {
            let diag: Vec<Complex64> = a.iter().map(|&x| Complex64::new((x as f64 * t).exp(), 0.0)).collect();
            let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
            Ok(f.act(&FloatGroupElement::from_cmatrix(&m)?)?.l2_norm_sqr().ln())
        };
        let slope = (at(-6.0)? - at(-12.0)?) / 6.0 / 2.0;
        worst = worst.max((slope - w).abs());
    }
    s.record("limit slopes equal exact weights", worst < 0.05, format!("max deviation {worst:.2e} over 10 directions"));

    let mut additive = true;
    let mut minkowski = true;
    for _ in 0..10 {
        let (p, q) = (random_exact_poly(&mut r, 3, 2)?, random_exact_poly(&mut r, 3, 2)?);
        let pq = RepVector::Polynomial(p.mul(&q)?);
        let (p, q) = (RepVector::Polynomial(p), RepVector::Polynomial(q));
        let l = OnePsg::new(direction(&mut r, 3))?;
        additive &= psg_weight(&l, &pq)? == psg_weight(&l, &p)? + psg_weight(&l, &q)?;
        minkowski &= weight_polytope(&pq)? == minkowski_sum(&weight_polytope(&p)?, &weight_polytope(&q)?)?;
    }
    s.record("weights add under products", additive, "10 random products".into());
    s.record("product polytope is the Minkowski sum", minkowski, "10 random products".into());
    Ok(())
}

fn forms(s: &mut Suite) -> Result<()> {
    let conic = RationalCurve::rational_normal(2)?;
    let h = hurwitz_form_curve_raw(&conic)?;
    let shape = VariableShape::matrix(1, 3)?;
    let target = HomogeneousPolynomial::new(shape, 2, vec![(vec![0, 2, 0], exact(1, 0)), (vec![1, 0, 1], exact(-4, 0))])?;
    let ratios: Vec<Exact> = target.terms().iter().map(|(e, c)| h.coefficient(e) / c.clone()).collect();
    let proportional = h.len() == target.len() && ratios.windows(2).all(|w| w[0] == w[1]);
    s.record("conic Hurwitz form is b1^2 - 4 b0 b2 up to a scalar", proportional, format!("{} terms", h.len()));

    let mut degs = Vec::new();
    let mut ok = true;
    for d in [2u32, 3] {
        let c = RationalCurve::rational_normal(d)?;
        let (rd, hd) = (chow_form_curve(&c)?.degree(), hurwitz_form_curve(&c)?.degree());
        ok &= rd == 2 * d && hd == 2 * d - 2;
        degs.push((d, rd, hd));
    }
    s.record("Chow and Hurwitz degrees", ok, format!("(d, deg R, deg Δ) = {degs:?}"));

    let param = chow_form_curve(&conic)?;
    let f = HomogeneousPolynomial::new(
        VariableShape::vector(3)?,
        2,
        vec![(vec![1, 0, 1], exact(1, 0)), (vec![0, 2, 0], exact(-1, 0))],
    )?;
    let hyp = chow_form_hypersurface_raw(&HypersurfaceVariety::new(f)?)?;
    let mut r = ChaCha8Rng::seed_from_u64(5);
    let mut ratio: Option<Exact> = None;
    let mut constant = true;
    let mut seen = 0;
    while seen < 20 {
        let a: Vec<Exact> = (0..6).map(|_| exact(r.random_range(-5..=5), r.random_range(-2..=2))).collect();
        let (x, y) = (param.evaluate(&a)?, hyp.evaluate(&a)?);
        if x == exact(0, 0) || y == exact(0, 0) {
            constant &= x == y;
            continue;
        }
        let q = x / y;
        constant &= ratio.get_or_insert_with(|| q.clone()) == &q;
        seen += 1;
    }
    s.record("parametric and hypersurface conic Chow forms are proportional", constant, "20 exact evaluations".into());
    Ok(())
}

fn energy(s: &mut Suite, cfg: &RunConfig) -> Result<()> {
    let samples = cfg.samples.unwrap_or(200_000);
    let conic = RationalCurve::rational_normal(2)?;
    let xp = build_x_pair(&Variety::Curve(conic.clone()), &XPairOptions { symbolic: true, samples, seed: cfg.seed })?;
    let id = CMatrix::identity(3, 3);
    let k0 = k_energy_algebraic(&id, &xp, samples, cfg.seed)?;
    let f0 = aubin_f0_algebraic(&id, &xp, samples, cfg.seed);
    s.record("normalizations vanish at the identity", k0.value == 0.0 && f0.value == 0.0, format!("K = {}, F = {}", k0.value, f0.value));

    let c = coercivity_value(&id, &xp, 1, 1, samples, cfg.seed)?;
    let q = (xp.deg_chow * xp.deg_hurwitz.unwrap_or(0)) as f64;
    let expected = -q * 3f64.ln() / 2.0;
    s.record("coercivity at the identity", (c.value - expected).abs() < 1e-12, format!("{} vs {expected}", c.value));

    let mut r = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(3));
    let u = {
        let m = CMatrix::from_fn(3, 3, |_, _| gaussian(&mut r));
        m.qr().q()
    };
    let sigma = u * hermitian_exp(&random_traceless_hermitian(3, 0.4, &mut r));
    let alg = k_energy_algebraic(&sigma, &xp, samples, cfg.seed)?;
    let oracle = curve_geometry_oracle(&sigma, &conic, &OracleOptions::default())?;
    let dev = (alg.value - oracle.k_energy).abs();
    let ok = dev <= 0.02 * oracle.k_energy.abs() || dev <= 1e-2;
    s.record("K-energy matches the quadrature oracle on the conic", ok, format!("{:.5} vs {:.5}", alg.value, oracle.k_energy));
    Ok(())
}

fn binary(coeffs: &[i64]) -> Result<ExactPolynomial> {
    let d = coeffs.len() as u32 - 1;
    let terms = coeffs.iter().enumerate().map(|(i, &c)| (vec![d - i as u32, i as u32], exact(c, 0)));
    HomogeneousPolynomial::new(VariableShape::vector(2)?, d, terms)
}

fn pairs(s: &mut Suite, cfg: &RunConfig) -> Result<()> {
    let v = RepVector::Polynomial(binary(&[1, 0])?);
    let w = RepVector::Polynomial(binary(&[1, 0, 0])?);
    let t = torus_semistable(&Pair::exact(v.clone(), w.clone())?)?;
    let ok = match &t.witness {
        Some(l) => !t.semistable && witness_destabilizes(&OnePsg::new(l.clone())?, &v, &w)?,
        None => false,
    };
    s.record("(x, x^2) fails in the torus with a verified witness", ok, format!("witness {:?}", t.witness));

    let p = Pair::exact(RepVector::Polynomial(binary(&[1])?), RepVector::Polynomial(binary(&[0, 1, 0])?))?;
    let cert = descend_pair(&p, &DescentOptions { restarts: 3, seed: cfg.seed, ..Default::default() });
    let inf = cert.inf_estimate.unwrap_or(f64::NAN);
    let ok = cert.verdict == Verdict::NoDivergenceObserved && (inf - (1.0f64 / 6.0).ln()).abs() < 1e-6;
    s.record("(1, xy) has a closed orbit with minimum log(1/6)", ok, format!("{:?}, inf {inf:.8}", cert.verdict));

    let w12 = wedge_index(3, 0, 1);
    let bv = TensorVector::new(3, vec![SlotKind::Wedge2, SlotKind::Wedge2], vec![(vec![w12, w12], exact(1, 0))])?;
    let bw = TensorVector::new(
        3,
        vec![SlotKind::Vector, SlotKind::Vector, SlotKind::Wedge2],
        vec![(vec![0, 1, w12], exact(1, 0)), (vec![1, 0, w12], exact(1, 0))],
    )?;
    let blow_up = Pair::exact(RepVector::Tensor(bv), RepVector::Tensor(bw))?;
    let probe = randomized_torus_probe(&blow_up, 50, cfg.seed)?;
    s.record("blow-up pair passes 50 torus probes", probe.semistable, format!("failed at {:?}", probe.failed_at));
    Ok(())
}
