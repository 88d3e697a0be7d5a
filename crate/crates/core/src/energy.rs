//! Log-norm functionals of variety pairs: distances, orbit descent, K-energy and related energies.

use num_complex::Complex64;
use serde::Serialize;

use crate::descent::{descend, log_hs_norm_sqr, DescentOptions, Objective};
use crate::error::{Error, Result};
use crate::group::{right_singular_frame, traceless_hermitian, CMatrix};
use crate::lattice::{contains, psg_weight, scale, weight_polytope, RepVector};
use crate::norms::{lp_weights, log_norm_from_logs, mean_stderr, sample_points, Estimate};
use crate::pair::{
    certificate_from_descent, descend_pair, extract_destabilizer, kempf_ness_value, matrix_entries, round_to_exact,
    rounded_direction, Pair, StabilityCertificate, Witness, WitnessCheck,
};
use crate::poly::ExactPolynomial;
use crate::variety::{build_x_pair, FormEvaluator, RationalCurve, Variety, XPair, XPairOptions};

/// A form with a fixed set of Gaussian sample points on its variable space.
#[derive(Clone, Debug)]
pub struct FormSampler {
    eval: FormEvaluator,
    rows: usize,
    cols: usize,
    points: Vec<Complex64>,
    /// `log |X|^2` per sample.
    log_radii: Vec<f64>,
}

fn par_map<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

impl FormSampler {
    pub fn new(eval: FormEvaluator, samples: usize, seed: u64) -> Self {
        let shape = eval.shape();
        let k = shape.num_vars();
        let points = sample_points(k, samples, seed);
        let log_radii = points.chunks(k).map(|x| x.iter().map(|c| c.norm_sqr()).sum::<f64>().ln()).collect();
        FormSampler { eval, rows: shape.rows(), cols: shape.cols(), points, log_radii }
    }

    pub fn samples(&self) -> usize {
        self.log_radii.len()
    }

    fn transformed(&self, s: usize, sigma: &CMatrix) -> Vec<Complex64> {
        let k = self.rows * self.cols;
        let x = &self.points[s * k..(s + 1) * k];
        let mut y = vec![Complex64::new(0.0, 0.0); k];
        for r in 0..self.rows {
            for c in 0..self.cols {
                y[r * self.cols + c] = (0..self.cols).map(|j| x[r * self.cols + j] * sigma[(j, c)]).sum();
            }
        }
        y
    }

    /// Per-sample `log |σ·F|_h = (log |F(Xσ)|^2 - deg log |X|^2) / 2`.
    pub fn logs(&self, sigma: &CMatrix) -> Vec<f64> {
        let (hat, ls) = rescale(sigma);
        let d = self.eval.degree() as f64;
        par_map(self.samples(), |s| {
            let y = self.transformed(s, &hat);
            0.5 * (self.eval.log_abs_sqr(&y) + 2.0 * d * ls - d * self.log_radii[s])
        })
    }

    /// `(log |σ·F|_p, stderr)`.
    pub fn log_norm(&self, sigma: &CMatrix, p: f64) -> (f64, f64) {
        log_norm_from_logs(&self.logs(sigma), p)
    }

    /// Traceless Hermitian gradient of `H -> log |exp(H) σ·F|_p`.
    pub fn log_norm_gradient(&self, sigma: &CMatrix, p: f64) -> CMatrix {
        let n = self.cols;
        let (hat, ls) = rescale(sigma);
        let d = self.eval.degree() as f64;
        let k = self.rows * self.cols;
        let parts: Vec<(f64, CMatrix)> = par_map(self.samples(), |s| {
            let x = &self.points[s * k..(s + 1) * k];
            let y = self.transformed(s, &hat);
            let (l, g) = self.eval.log_abs_sqr_with_gradient(&y, true);
            // M = X^T (∇F/F)(Xσ) σ^T
            let mut xtd = CMatrix::zeros(n, n);
            for r in 0..self.rows {
                for i in 0..n {
                    let xi = x[r * n + i];
                    for c in 0..n {
                        xtd[(i, c)] += xi * g[r * n + c];
                    }
                }
            }
            let m = xtd * hat.transpose();
            (0.5 * (l + 2.0 * d * ls - d * self.log_radii[s]), m)
        });
        let logs: Vec<f64> = parts.iter().map(|p| p.0).collect();
        let w = lp_weights(&logs, p);
        let mut acc = CMatrix::zeros(n, n);
        for ((_, m), wi) in parts.iter().zip(&w) {
            acc += m * Complex64::new(*wi, 0.0);
        }
        acc /= Complex64::new(parts.len() as f64, 0.0);
        traceless_hermitian(&acc.transpose())
    }
}

/// `σ / s` with `s^2 = |σ|_HS^2 / n`, and `log s`.
fn rescale(sigma: &CMatrix) -> (CMatrix, f64) {
    let n = sigma.nrows() as f64;
    let s = (sigma.iter().map(|c| c.norm_sqr()).sum::<f64>() / n).sqrt();
    (sigma / Complex64::new(s, 0.0), s.ln())
}

/// `c_w log |σ·w|_{p_w} - c_v log |σ·v|_{p_v}` on fixed samples.
#[derive(Clone, Debug)]
pub struct LogTanObjective {
    pub w: FormSampler,
    pub v: FormSampler,
    pub cw: f64,
    pub cv: f64,
    pub pw: f64,
    pub pv: f64,
}

impl LogTanObjective {
    /// `log tan^2 dist_p` of the variety pair `(R^{deg Δ}, Δ^{deg R})`, with powers in log form.
    pub fn for_x_pair(xp: &XPair, p: f64, samples: usize, seed: u64) -> Result<Self> {
        let h = xp.require_hurwitz()?.clone();
        let (dr, dh) = (xp.deg_chow as f64, xp.deg_hurwitz.unwrap_or(0) as f64);
        Ok(LogTanObjective {
            w: FormSampler::new(h, samples, seed),
            v: FormSampler::new(xp.chow_eval.clone(), samples, seed.wrapping_add(1)),
            cw: 2.0 * dr,
            cv: 2.0 * dh,
            pw: dr * p,
            pv: dh * p,
        })
    }

    /// `log |σ·w|_p^2 - log |σ·v|_p^2` for a pair of polynomials.
    pub fn for_pair(pair: &Pair, p: f64, samples: usize, seed: u64) -> Result<Self> {
        let (RepVector::Polynomial(v), RepVector::Polynomial(w)) = (pair.v(), pair.w()) else {
            return Err(Error::precondition("L^p distances with p != 2 need polynomial components"));
        };
        if v.is_zero() || w.is_zero() {
            return Err(Error::precondition("zero component"));
        }
        Ok(LogTanObjective {
            w: FormSampler::new(FormEvaluator::Polynomial(w.clone()), samples, seed),
            v: FormSampler::new(FormEvaluator::Polynomial(v.clone()), samples, seed.wrapping_add(1)),
            cw: 2.0,
            cv: 2.0,
            pw: p,
            pv: p,
        })
    }

    /// Value relative to the identity, with a standard error from paired samples at `p = 0`.
    pub fn relative(&self, sigma: &CMatrix) -> Estimate {
        let n = self.w.cols;
        let id = CMatrix::identity(n, n);
        let side = |s: &FormSampler, p: f64| -> (f64, f64) {
            let a = s.logs(sigma);
            let b = s.logs(&id);
            if p == 0.0 {
                let diff: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
                mean_stderr(&diff)
            } else {
                let (va, sa) = log_norm_from_logs(&a, p);
                let (vb, sb) = log_norm_from_logs(&b, p);
                (va - vb, (sa * sa + sb * sb).sqrt())
            }
        };
        let (dw, sw) = side(&self.w, self.pw);
        let (dv, sv) = side(&self.v, self.pv);
        Estimate { value: self.cw * dw - self.cv * dv, stderr: ((self.cw * sw).powi(2) + (self.cv * sv).powi(2)).sqrt() }
    }
}

impl Objective for LogTanObjective {
    fn size(&self) -> usize {
        self.w.cols
    }
    fn value(&self, sigma: &CMatrix) -> f64 {
        self.cw * self.w.log_norm(sigma, self.pw).0 - self.cv * self.v.log_norm(sigma, self.pv).0
    }
    fn gradient(&self, sigma: &CMatrix) -> CMatrix {
        self.w.log_norm_gradient(sigma, self.pw) * Complex64::new(self.cw, 0.0)
            - self.v.log_norm_gradient(sigma, self.pv) * Complex64::new(self.cv, 0.0)
    }
}

/// What a distance is measured on.
#[derive(Clone, Copy, Debug)]
pub enum DistanceTarget<'a> {
    X(&'a XPair),
    Pair(&'a Pair),
}

/// `log tan^2 dist_p(σ)` between the unit-normalized components.
pub fn log_tan_dist_p(sigma: &CMatrix, target: DistanceTarget, p: f64, samples: usize, seed: u64) -> Result<Estimate> {
    match target {
        DistanceTarget::Pair(pair) if p == 2.0 => {
            let n = pair.group_size();
            let v = kempf_ness_value(sigma, pair) - kempf_ness_value(&CMatrix::identity(n, n), pair);
            Ok(Estimate { value: v, stderr: 0.0 })
        }
        DistanceTarget::Pair(pair) => Ok(LogTanObjective::for_pair(pair, p, samples, seed)?.relative(sigma)),
        DistanceTarget::X(xp) => Ok(LogTanObjective::for_x_pair(xp, p, samples, seed)?.relative(sigma)),
    }
}

/// Options for [`orbit_distance`].
#[derive(Clone, Debug)]
pub struct OrbitOptions {
    pub descent: DescentOptions,
    /// Fixed samples per form inside the descent objective.
    pub samples: usize,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        OrbitOptions { descent: DescentOptions::default(), samples: 4000 }
    }
}

/// Exact weight test for `(R^{deg Δ}, Δ^{deg R})` in the torus conjugated by the rounded frame of `σ`.
fn x_pair_destabilizer(r: &ExactPolynomial, h: &ExactPolynomial, dr: u32, dh: u32, sigma: &CMatrix) -> Option<Witness> {
    let (s, w_star) = right_singular_frame(sigma);
    let lambda = rounded_direction(&s)?;
    let psg = crate::group::OnePsg::new(lambda.clone()).ok()?;
    for den in [16, 64, 256, 1024] {
        let Some(g) = round_to_exact(&w_star, den) else { continue };
        let (Ok(rg), Ok(hg)) = (r.act(&g), h.act(&g)) else { continue };
        let (rv, hv) = (RepVector::Polynomial(rg), RepVector::Polynomial(hg));
        let (Ok(a), Ok(b)) = (psg_weight(&psg, &rv), psg_weight(&psg, &hv)) else { continue };
        let (a, b) = (a * dh as i64, b * dr as i64);
        if b > a {
            return Some(Witness {
                lambda,
                conjugator: matrix_entries(&g.to_cmatrix()),
                check: WitnessCheck::Exact,
                weight_v: Some(a),
                weight_w: Some(b),
                modulus: None,
            });
        }
        let polys = (weight_polytope(&rv).ok()?, weight_polytope(&hv).ok()?);
        let (left, right) = (scale(&polys.0, dh).ok()?, scale(&polys.1, dr).ok()?);
        if let Ok(c) = contains(&left, &right) {
            if let Some(l) = c.witness {
                return Some(Witness {
                    lambda: l.exponents().to_vec(),
                    conjugator: matrix_entries(&g.to_cmatrix()),
                    check: WitnessCheck::Exact,
                    weight_v: Some(left.min_pairing(&l)),
                    weight_w: Some(right.min_pairing(&l)),
                    modulus: None,
                });
            }
        }
    }
    Some(Witness {
        lambda,
        conjugator: matrix_entries(&w_star),
        check: WitnessCheck::Rejected,
        weight_v: None,
        weight_w: None,
        modulus: None,
    })
}

/// Infimum of `log tan^2 dist_p` over the orbit by multi-start descent.
pub fn orbit_distance(target: DistanceTarget, p: f64, opts: &OrbitOptions) -> Result<StabilityCertificate> {
    let seed = opts.descent.seed;
    match target {
        DistanceTarget::Pair(pair) if p == 2.0 => {
            let n = pair.group_size();
            let base = kempf_ness_value(&CMatrix::identity(n, n), pair);
            let mut cert = descend_pair(pair, &opts.descent);
            cert.inf_estimate = cert.inf_estimate.map(|v| v - base);
            Ok(cert)
        }
        DistanceTarget::Pair(pair) => {
            let obj = LogTanObjective::for_pair(pair, p, opts.samples, seed)?;
            let n = obj.size();
            let base = obj.value(&CMatrix::identity(n, n));
            let out = descend(&obj, &opts.descent);
            let mut cert = certificate_from_descent(out, seed, |s| extract_destabilizer(pair, s));
            cert.inf_estimate = cert.inf_estimate.map(|v| v - base);
            Ok(cert)
        }
        DistanceTarget::X(xp) => {
            let obj = LogTanObjective::for_x_pair(xp, p, opts.samples, seed)?;
            let n = obj.size();
            let base = obj.value(&CMatrix::identity(n, n));
            let out = descend(&obj, &opts.descent);
            let mut cert = certificate_from_descent(out, seed, |s| match (&xp.chow, &xp.hurwitz, xp.deg_hurwitz) {
                (Some(r), Some(h), Some(dh)) => x_pair_destabilizer(r, h, xp.deg_chow, dh, s),
                _ => None,
            });
            cert.inf_estimate = cert.inf_estimate.map(|v| v - base);
            Ok(cert)
        }
    }
}

/// `ν(σ) = [deg R · log(|σΔ|_0^2/|Δ|_0^2) - deg Δ · log(|σR|_0^2/|R|_0^2)] / (d^2 (n+1))`.
pub fn k_energy_algebraic(sigma: &CMatrix, xp: &XPair, samples: usize, seed: u64) -> Result<Estimate> {
    let e = LogTanObjective::for_x_pair(xp, 0.0, samples, seed)?.relative(sigma);
    let scale = (xp.degree as f64).powi(2) * (xp.dim as f64 + 1.0);
    Ok(Estimate { value: e.value / scale, stderr: e.stderr / scale })
}

/// `log(|σ·R|_0 / |R|_0)`, the unit-normalized Mahler measure of the moved Chow form.
pub fn chow_log_mahler(sigma: &CMatrix, xp: &XPair, samples: usize, seed: u64) -> Estimate {
    let s = FormSampler::new(xp.chow_eval.clone(), samples, seed.wrapping_add(1));
    let n = xp.group_size();
    let a = s.logs(sigma);
    let b = s.logs(&CMatrix::identity(n, n));
    let diff: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
    let (value, stderr) = mean_stderr(&diff);
    Estimate { value, stderr }
}

/// `F° = -log|σ·R|_0 / deg R` with `R` unit-normalized.
pub fn aubin_f0_algebraic(sigma: &CMatrix, xp: &XPair, samples: usize, seed: u64) -> Estimate {
    let e = chow_log_mahler(sigma, xp, samples, seed);
    let d = xp.deg_chow as f64;
    Estimate { value: -e.value / d, stderr: e.stderr / d }
}

/// `(k^{-(2n+1)}/(n+1)) · [log|σw|^2 - log|σv|^2]` for `w = Δ^{km deg R}`,
/// `v = I^q ⊗ R^{(km-1) deg Δ}`, `q = deg R · deg Δ`, with `|σ|` the Hilbert-Schmidt norm.
pub fn coercivity_value(sigma: &CMatrix, xp: &XPair, m: u32, k: u32, samples: usize, seed: u64) -> Result<Estimate> {
    if m == 0 || k == 0 {
        return Err(Error::precondition("m and k must be positive"));
    }
    let obj = LogTanObjective::for_x_pair(xp, 0.0, samples, seed)?;
    let n = xp.group_size();
    let id = CMatrix::identity(n, n);
    let delta_side = |s: &FormSampler| {
        let a = s.logs(sigma);
        let b = s.logs(&id);
        mean_stderr(&a.iter().zip(&b).map(|(x, y)| x - y).collect::<Vec<f64>>())
    };
    let (dh_l, dh_s) = delta_side(&obj.w);
    let (dr_l, dr_s) = delta_side(&obj.v);
    let (dr, dh) = (xp.deg_chow as f64, xp.deg_hurwitz.unwrap_or(0) as f64);
    let km = (k * m) as f64;
    let q = dr * dh;
    let pref = (k as f64).powi(-(2 * xp.dim as i32 + 1)) / (xp.dim as f64 + 1.0);
    let cw = km * dr * 2.0;
    let cv = (km - 1.0) * dh * 2.0;
    let value = pref * (cw * dh_l - q * log_hs_norm_sqr(sigma) - cv * dr_l);
    let stderr = pref * ((cw * dh_s).powi(2) + (cv * dr_s).powi(2)).sqrt();
    Ok(Estimate { value, stderr })
}

/// One row of [`asymptotic_report`].
#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticRow {
    pub k: u32,
    pub degree: u32,
    /// `-inf log tan^2 dist_0` estimated by descent.
    pub neg_log_tan_sq: f64,
    pub over_k_2n: f64,
    pub over_k_2n1: f64,
    pub over_degree_2n: f64,
    pub over_degree_2n1: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticReport {
    pub base_degree: u32,
    pub rows: Vec<AsymptoticRow>,
    pub note: String,
}

/// Observational table for rational normal curves of degree `k · base_degree`.
pub fn asymptotic_report(ks: &[u32], base_degree: u32, xopts: &XPairOptions, opts: &OrbitOptions) -> Result<AsymptoticReport> {
    if ks.is_empty() || ks.contains(&0) {
        return Err(Error::precondition("need at least one positive k"));
    }
    let mut rows = Vec::new();
    for &k in ks {
        let degree = k * base_degree;
        let curve = RationalCurve::rational_normal(degree)?;
        let xp = build_x_pair(&Variety::Curve(curve), &XPairOptions { symbolic: false, ..xopts.clone() })?;
        let cert = orbit_distance(DistanceTarget::X(&xp), 0.0, opts)?;
        let inf = cert.inf_estimate.unwrap_or(f64::NAN);
        let v = -inf;
        let n = xp.dim as i32;
        let (kf, df) = (k as f64, degree as f64);
        rows.push(AsymptoticRow {
            k,
            degree,
            neg_log_tan_sq: v,
            over_k_2n: v / kf.powi(2 * n),
            over_k_2n1: v / kf.powi(2 * n + 1),
            over_degree_2n: v / df.powi(2 * n),
            over_degree_2n1: v / df.powi(2 * n + 1),
        });
    }
    Ok(AsymptoticReport {
        base_degree,
        rows,
        note: "log tan^2 convention; k is the embedding power and degree = k * base_degree; observational only".into(),
    })
}
