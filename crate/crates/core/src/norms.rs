//! Fubini-Study pointwise norms, Monte Carlo L^p and Mahler norms, and sup norms.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::FloatPolynomial;
use crate::variety::FormEvaluator;

/// Samples drawn per reproducible chunk; chunk `c` uses ChaCha8 stream `c` of the seed.
pub const CHUNK: usize = 4096;
pub const MIN_SAMPLES: usize = 1000;

/// A Monte Carlo norm estimate. `p = 0` is the Mahler measure; values are natural logs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MahlerEstimate {
    pub log_value: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
    pub p: f64,
}

/// Compensated (Neumaier) sum.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Complex Gaussian vectors of length `k`, written into `buf` for chunk `chunk`.
fn fill_chunk(k: usize, seed: u64, chunk: usize, count: usize, buf: &mut Vec<Complex64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    buf.clear();
    for _ in 0..count * k {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        buf.push(Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2);
    }
}

/// Apply `f` to `samples` complex Gaussian points of `C^k`, in a fixed order independent of threads.
pub fn sample_map<F>(k: usize, samples: usize, seed: u64, f: F) -> Vec<f64>
where
    F: Fn(&[Complex64]) -> f64 + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    let one = |c: usize| {
        let count = CHUNK.min(samples - c * CHUNK);
        let mut buf = Vec::with_capacity(count * k);
        fill_chunk(k, seed, c, count, &mut buf);
        buf.chunks(k).map(&f).collect::<Vec<f64>>()
    };
    #[cfg(feature = "parallel")]
    let parts: Vec<Vec<f64>> = {
        use rayon::prelude::*;
        (0..chunks).into_par_iter().map(one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<Vec<f64>> = (0..chunks).map(one).collect();
    parts.into_iter().flatten().collect()
}

/// Draw the sample points themselves (row-major, `k` per point).
pub fn sample_points(k: usize, samples: usize, seed: u64) -> Vec<Complex64> {
    let chunks = samples.div_ceil(CHUNK);
    let mut out = Vec::with_capacity(samples * k);
    let mut buf = Vec::new();
    for c in 0..chunks {
        let count = CHUNK.min(samples - c * CHUNK);
        fill_chunk(k, seed, c, count, &mut buf);
        out.extend_from_slice(&buf);
    }
    out
}

/// Mean and standard error of per-sample values.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = neumaier_sum(values.iter().copied()) / n;
    let var = neumaier_sum(values.iter().map(|v| (v - mean) * (v - mean))) / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

/// `log |F|_p` from per-sample logs `log |F|_h`: the mean for `p = 0`, else a log-mean-exp
/// with a delta-method standard error.
pub fn log_norm_from_logs(logs: &[f64], p: f64) -> (f64, f64) {
    if p == 0.0 {
        return mean_stderr(logs);
    }
    let m = logs.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(p * b));
    let w: Vec<f64> = logs.iter().map(|&l| (p * l - m).exp()).collect();
    let (mw, sw) = mean_stderr(&w);
    ((m + mw.ln()) / p, sw / (mw * p))
}

/// Importance weights `|F|^p / E|F|^p` per sample, used for gradients of `log |F|_p`.
pub fn lp_weights(logs: &[f64], p: f64) -> Vec<f64> {
    if p == 0.0 {
        return vec![1.0; logs.len()];
    }
    let m = logs.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(p * b));
    let w: Vec<f64> = logs.iter().map(|&l| (p * l - m).exp()).collect();
    let mw = neumaier_sum(w.iter().copied()) / w.len() as f64;
    w.into_iter().map(|x| x / mw).collect()
}

fn check_index(p: f64, samples: usize) -> Result<()> {
    if !(p >= 0.0 && p.is_finite()) {
        return Err(Error::precondition("norm index must be finite and nonnegative; use sup_norm for p = inf"));
    }
    if samples < MIN_SAMPLES {
        return Err(Error::precondition(format!("at least {MIN_SAMPLES} samples are required")));
    }
    Ok(())
}

/// `|P(z)|^2 / |z|^(2d)`.
pub fn fs_pointwise(p: &FloatPolynomial, z: &[Complex64]) -> Result<f64> {
    let r: f64 = z.iter().map(|c| c.norm_sqr()).sum();
    if r == 0.0 {
        return Err(Error::precondition("zero point"));
    }
    let v = p.evaluate(z)?;
    Ok(v.norm_sqr() / r.powi(p.degree() as i32))
}

/// `log |F|_p` of a form on its variable space, with Fubini-Study sampling.
pub fn form_lp_norm(f: &FormEvaluator, p: f64, samples: usize, seed: u64) -> Result<MahlerEstimate> {
    check_index(p, samples)?;
    let k = f.shape().num_vars();
    let d = f.degree() as f64;
    let logs = sample_map(k, samples, seed, |x| {
        let r: f64 = x.iter().map(|c| c.norm_sqr()).sum();
        0.5 * (f.log_abs_sqr(x) - d * r.ln())
    });
    let (log_value, stderr) = log_norm_from_logs(&logs, p);
    Ok(MahlerEstimate { log_value, stderr, samples, seed, p })
}

/// `log |P|_p` for `p` in `[0, inf)`; `p = 0` is the logarithmic Mahler measure.
pub fn lp_norm(poly: &FloatPolynomial, p: f64, samples: usize, seed: u64) -> Result<MahlerEstimate> {
    if poly.is_zero() {
        return Err(Error::precondition("zero polynomial"));
    }
    form_lp_norm(&FormEvaluator::Polynomial(poly.clone()), p, samples, seed)
}

/// Options for [`sup_norm`].
#[derive(Clone, Debug, Serialize)]
pub struct SupNormOptions {
    /// Random points screened before ascent.
    pub candidates: usize,
    /// Best candidates refined by ascent.
    pub starts: usize,
    pub max_iters: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for SupNormOptions {
    fn default() -> Self {
        SupNormOptions { candidates: 4096, starts: 8, max_iters: 5000, tolerance: 1e-8, seed: 0 }
    }
}

/// A lower bound for `log sup |P|_h` with the stationarity reached at the maximizer.
#[derive(Clone, Debug, Serialize)]
pub struct SupNorm {
    pub log_value: f64,
    pub stationarity: f64,
    pub converged: bool,
    pub point: Vec<[f64; 2]>,
}

fn log_fs(p: &FloatPolynomial, z: &[Complex64]) -> f64 {
    let r: f64 = z.iter().map(|c| c.norm_sqr()).sum();
    p.sparse().evaluate(z).norm_sqr().ln() - p.degree() as f64 * r.ln()
}

fn normalize(z: &mut [Complex64]) {
    let r = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    z.iter_mut().for_each(|c| *c /= r);
}

/// Projected gradient ascent of `log |P|_h^2` on the unit sphere.
fn ascend(p: &FloatPolynomial, mut z: Vec<Complex64>, opts: &SupNormOptions) -> (f64, f64, Vec<Complex64>) {
    let d = p.degree() as f64;
    normalize(&mut z);
    let mut f = log_fs(p, &z);
    let mut eta = 0.1;
    let mut gnorm = f64::INFINITY;
    for _ in 0..opts.max_iters {
        let (v, grad) = p.evaluate_with_gradient(&z);
        let g: Vec<Complex64> = grad.iter().zip(&z).map(|(gk, zk)| (gk / v).conj() - zk * d).collect();
        gnorm = g.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !gnorm.is_finite() || gnorm < opts.tolerance {
            break;
        }
        let mut accepted = false;
        while eta * gnorm > 1e-16 {
            let mut trial: Vec<Complex64> = z.iter().zip(&g).map(|(zk, gk)| zk + gk * eta).collect();
            normalize(&mut trial);
            let ft = log_fs(p, &trial);
            if ft >= f {
                z = trial;
                f = ft;
                eta *= 1.5;
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (f, gnorm, z)
}

/// Multi-start ascent plus sample maximum; a lower bound for the supremum.
pub fn sup_norm(p: &FloatPolynomial, opts: &SupNormOptions) -> Result<SupNorm> {
    if p.is_zero() {
        return Err(Error::precondition("zero polynomial"));
    }
    let k = p.shape().num_vars();
    let pts = sample_points(k, opts.candidates.max(1), opts.seed);
    let mut scored: Vec<(f64, usize)> = pts.chunks(k).enumerate().map(|(i, z)| (log_fs(p, z), i)).collect();
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1)));
    let mut starts: Vec<Vec<Complex64>> =
        scored.iter().take(opts.starts).map(|&(_, i)| pts[i * k..(i + 1) * k].to_vec()).collect();
    for j in 0..k {
        let mut e = vec![Complex64::new(0.0, 0.0); k];
        e[j] = Complex64::new(1.0, 0.0);
        starts.push(e);
    }
    let one = |z: &Vec<Complex64>| ascend(p, z.clone(), opts);
    #[cfg(feature = "parallel")]
    let results: Vec<(f64, f64, Vec<Complex64>)> = {
        use rayon::prelude::*;
        starts.par_iter().map(one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<(f64, f64, Vec<Complex64>)> = starts.iter().map(one).collect();
    let mut best: Option<(f64, f64, Vec<Complex64>)> = None;
    for r in results {
        if r.0.is_finite() && best.as_ref().is_none_or(|b| r.0 > b.0) {
            best = Some(r);
        }
    }
    let (f, g, z) = best.ok_or_else(|| Error::non_convergence("sup norm ascent produced no finite value"))?;
    Ok(SupNorm {
        log_value: 0.5 * f,
        stationarity: g,
        converged: g < opts.tolerance,
        point: z.iter().map(|c| [c.re, c.im]).collect(),
    })
}

/// Harmonic number `H_N`.
pub fn harmonic(n: usize) -> f64 {
    (1..=n).map(|j| 1.0 / j as f64).sum()
}

/// Sandwich `-(d/2) H_N + log|P|_inf <= log|P|_0 <= log|P|_inf` with `3 stderr` slack.
#[derive(Clone, Debug, Serialize)]
pub struct ArestovReport {
    pub mahler: MahlerEstimate,
    pub sup: SupNorm,
    pub lower_bound: f64,
    /// `log|P|_0 - lower_bound`; nonnegative when the lower inequality holds.
    pub lower_margin: f64,
    /// `log|P|_inf - log|P|_0`; nonnegative when the upper inequality holds.
    pub upper_margin: f64,
    pub holds: bool,
}

pub fn arestov_check(p: &FloatPolynomial, samples: usize, seed: u64, sup: &SupNormOptions) -> Result<ArestovReport> {
    let mahler = lp_norm(p, 0.0, samples, seed)?;
    let sup = sup_norm(p, sup)?;
    let n = p.shape().num_vars() - 1;
    let lower_bound = -0.5 * p.degree() as f64 * harmonic(n) + sup.log_value;
    let lower_margin = mahler.log_value - lower_bound;
    let upper_margin = sup.log_value - mahler.log_value;
    let slack = 3.0 * mahler.stderr;
    let holds = lower_margin >= -slack && upper_margin >= -slack;
    Ok(ArestovReport { mahler, sup, lower_bound, lower_margin, upper_margin, holds })
}

/// Ordering `log|P|_0 <= log|P|_p`; `p = 2` uses the exact L2 norm.
#[derive(Clone, Debug, Serialize)]
pub struct JensenReport {
    pub mahler: MahlerEstimate,
    pub log_p_norm: f64,
    pub p_stderr: f64,
    pub margin: f64,
    pub holds: bool,
}

pub fn jensen_check(poly: &FloatPolynomial, p: f64, samples: usize, seed: u64) -> Result<JensenReport> {
    if p <= 0.0 {
        return Err(Error::precondition("Jensen ordering needs p > 0"));
    }
    let mahler = lp_norm(poly, 0.0, samples, seed)?;
    let (log_p_norm, p_stderr) = if p == 2.0 {
        (0.5 * poly.l2_norm_sqr().ln(), 0.0)
    } else {
        let e = lp_norm(poly, p, samples, seed)?;
        (e.log_value, e.stderr)
    };
    let margin = log_p_norm - mahler.log_value;
    let holds = margin >= -3.0 * (mahler.stderr + p_stderr);
    Ok(JensenReport { mahler, log_p_norm, p_stderr, margin, holds })
}

/// Estimate with a standard error.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

/// `θ = 2 log|S|_0 - 2 log|S|_L2`.
pub fn conformal_theta(s: &FloatPolynomial, samples: usize, seed: u64) -> Result<Estimate> {
    let m = lp_norm(s, 0.0, samples, seed)?;
    Ok(Estimate { value: 2.0 * m.log_value - s.l2_norm_sqr().ln(), stderr: 2.0 * m.stderr })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{HomogeneousPolynomial, VariableShape};

    fn mono(e: Vec<u32>) -> FloatPolynomial {
        let k = e.len();
        let d = e.iter().sum();
        HomogeneousPolynomial::new(VariableShape::vector(k).unwrap(), d, vec![(e, Complex64::new(1.0, 0.0))]).unwrap()
    }

    #[test]
    fn neumaier_recovers_cancellation() {
        assert_eq!(neumaier_sum([1e100, 1.0, -1e100]), 1.0);
    }

    #[test]
    fn constant_has_zero_mahler_measure() {
        let one = HomogeneousPolynomial::constant(VariableShape::vector(3).unwrap(), Complex64::new(1.0, 0.0));
        let e = lp_norm(&one, 0.0, 2000, 1).unwrap();
        assert_eq!(e.log_value, 0.0);
    }

    #[test]
    fn samples_do_not_depend_on_chunking_order() {
        let a = sample_map(3, 10_000, 4, |x| x[0].re);
        let b = sample_points(3, 10_000, 4);
        assert!(a.iter().zip(b.chunks(3)).all(|(v, z)| *v == z[0].re));
    }

    #[test]
    fn sup_of_power_is_one() {
        let s = sup_norm(&mono(vec![3, 0, 0]), &SupNormOptions::default()).unwrap();
        assert!(s.log_value.abs() < 1e-12);
    }

    #[test]
    fn sup_of_product_matches_closed_form() {
        // sup |z0 z1|^2 / |z|^4 on P^1 is 1/4.
        let s = sup_norm(&mono(vec![1, 1]), &SupNormOptions::default()).unwrap();
        assert!((s.log_value - 0.5 * 0.25f64.ln()).abs() < 1e-10, "{}", s.log_value);
    }

    #[test]
    fn fs_pointwise_is_scale_invariant() {
        let p = mono(vec![2, 0, 0]);
        let z = [Complex64::new(0.3, 0.1), Complex64::new(-1.0, 0.2), Complex64::new(0.5, 0.5)];
        let z2: Vec<Complex64> = z.iter().map(|c| c * 2.0).collect();
        let a = fs_pointwise(&p, &z).unwrap();
        assert!((a - fs_pointwise(&p, &z2).unwrap()).abs() < 1e-14);
        assert!(fs_pointwise(&p, &[Complex64::new(0.0, 0.0); 3]).is_err());
    }
}
