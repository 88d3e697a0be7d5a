//! Quadrature oracle for energies of rational curves, independent of Chow and Hurwitz forms.
//!
//! Everything is pulled back to `P^1` through the parametrization and integrated over the two
//! closed unit discs `{(ζ,1) : |ζ| <= 1}` and `{(1,η) : |η| <= 1}`, which cover `P^1` and overlap
//! on a null set. The curvature comes from closed-form expressions in `y, y', y''`.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{hermitian_exp, CMatrix};
use crate::variety::RationalCurve;

#[derive(Clone, Debug, Serialize)]
pub struct OracleOptions {
    /// Initial radial and angular node count per chart.
    pub initial_grid: usize,
    pub max_grid: usize,
    /// Successive refinements must differ by less than this in every reported quantity.
    pub tolerance: f64,
    /// Gauss-Legendre nodes along the path `exp(tH)`.
    pub t_nodes: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { initial_grid: 128, max_grid: 1024, tolerance: 1e-3, t_nodes: 33 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QuadratureDiagnostics {
    pub grid: usize,
    pub refinements: usize,
    pub last_change: f64,
    pub t_nodes: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveGeometryReport {
    pub volume: f64,
    pub mu: f64,
    pub k_energy: f64,
    pub aubin_f0: f64,
    pub aubin_j: f64,
    pub diagnostics: QuadratureDiagnostics,
}

/// Gauss-Legendre nodes and weights on `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = 0.5 * (a + b) - 0.5 * (b - a) * z;
        w[i] = (b - a) / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// Local jets `(y, y', y'')` of `γ` in one chart at `ζ`.
struct Chart {
    /// Coefficients of `ζ^k` per component.
    coeffs: Vec<Vec<Complex64>>,
}

impl Chart {
    fn both(curve: &RationalCurve) -> [Chart; 2] {
        let g = curve.float_coefficients();
        // (s,t) = (ζ,1): γ_c = Σ_i g_ci ζ^(d-i); (s,t) = (1,η): γ_c = Σ_i g_ci η^i.
        let a = g.iter().map(|c| c.iter().rev().copied().collect()).collect();
        [Chart { coeffs: a }, Chart { coeffs: g }]
    }

    fn jets(&self, z: Complex64) -> [Vec<Complex64>; 3] {
        let n = self.coeffs.len();
        let mut out = [vec![Complex64::new(0.0, 0.0); n], vec![Complex64::new(0.0, 0.0); n], vec![Complex64::new(0.0, 0.0); n]];
        for (c, co) in self.coeffs.iter().enumerate() {
            // Horner for value and two derivatives.
            let (mut p, mut dp, mut ddp) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            for a in co.iter().rev() {
                ddp = ddp * z + dp * 2.0;
                dp = dp * z + p;
                p = p * z + a;
            }
            out[0][c] = p;
            out[1][c] = dp;
            out[2][c] = ddp;
        }
        out
    }
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

fn apply(m: &CMatrix, v: &[Complex64]) -> Vec<Complex64> {
    (0..m.nrows()).map(|i| (0..v.len()).map(|j| m[(i, j)] * v[j]).sum()).collect()
}

/// Pointwise geometry of the embedded curve `y`.
struct Local {
    /// `|y|^2`
    a: f64,
    /// `<y', y>`
    b: Complex64,
    /// metric density `|y ∧ y'|^2 / |y|^4`
    g: f64,
    scal: f64,
}

fn local(y: &[Complex64], y1: &[Complex64], y2: &[Complex64]) -> Local {
    let a = inner(y, y).re;
    let b = inner(y1, y);
    let c = inner(y1, y1).re;
    let e = inner(y2, y);
    let f = inner(y2, y1);
    let h = inner(y2, y2).re;
    let ff = a * c - b.norm_sqr();
    let ff1 = a * h - e.norm_sqr();
    let cross = f * a - b.conj() * e;
    let g = ff / (a * a);
    let ddbar = (ff * ff1 - cross.norm_sqr()) / (ff * ff);
    Local { a, b, g, scal: (2.0 * g - ddbar) / g }
}

#[derive(Clone, Copy, Debug, Default)]
struct Totals {
    volume: f64,
    mu: f64,
    nu: f64,
    j: f64,
    f0: f64,
}

impl Totals {
    fn max_diff(&self, o: &Totals) -> f64 {
        [self.volume - o.volume, self.mu - o.mu, self.nu - o.nu, self.j - o.j, self.f0 - o.f0]
            .iter()
            .fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

fn integrate(curve: &RationalCurve, h: &CMatrix, grid: usize, t_nodes: usize) -> Totals {
    let charts = Chart::both(curve);
    let (rn, rw) = gauss_legendre(grid, 0.0, 1.0);
    let (tn, tw) = gauss_legendre(t_nodes, 0.0, 1.0);
    let dtheta = 2.0 * std::f64::consts::PI / grid as f64;
    let ends = hermitian_exp(h);
    let paths: Vec<CMatrix> = tn.iter().map(|&t| hermitian_exp(&(h * Complex64::new(t, 0.0)))).collect();
    let two_h = h * Complex64::new(2.0, 0.0);

    // Sums per radial node, later combined in fixed order.
    let per_radius = |ri: usize| -> [f64; 6] {
        let r = rn[ri];
        let mut s = [0.0f64; 6];
        for chart in &charts {
            for k in 0..grid {
                let th = dtheta * k as f64;
                let z = Complex64::from_polar(r, th);
                let area = rw[ri] * r * dtheta / std::f64::consts::PI;
                let [y, y1, y2] = chart.jets(z);
                let base = local(&y, &y1, &y2);
                let w0 = base.g * area;
                s[0] += w0;
                s[1] += base.scal * w0;
                // Potential at the endpoint and its ζ-derivative.
                let ye = apply(&ends, &y);
                let ye1 = apply(&ends, &y1);
                let ae = inner(&ye, &ye).re;
                let be = inner(&ye1, &ye);
                let phi = (ae / base.a).ln();
                let dphi = be / ae - base.b / base.a;
                s[2] += phi * w0;
                s[3] += dphi.norm_sqr() * area;
                // Path integrand φ̇_t (Scal_t - μ) ω_t, split as φ̇ Scal ω and φ̇ ω.
                for (ti, m) in paths.iter().enumerate() {
                    let yt = apply(m, &y);
                    let lt = local(&yt, &apply(m, &y1), &apply(m, &y2));
                    let dot = inner(&apply(&two_h, &yt), &yt).re / lt.a;
                    let wt = lt.g * area * tw[ti];
                    s[4] += dot * lt.scal * wt;
                    s[5] += dot * wt;
                }
            }
        }
        s
    };
    #[cfg(feature = "parallel")]
    let rows: Vec<[f64; 6]> = {
        use rayon::prelude::*;
        (0..grid).into_par_iter().map(per_radius).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<[f64; 6]> = (0..grid).map(per_radius).collect();
    let sum = |i: usize| crate::norms::neumaier_sum(rows.iter().map(|r| r[i]));
    let volume = sum(0);
    let mu = sum(1) / volume;
    let j = sum(3) / (2.0 * volume);
    Totals { volume, mu, nu: -(sum(4) - mu * sum(5)) / volume, j, f0: j - sum(2) / volume }
}

/// `H = log(σ^* σ) / 2`, so that `|σ y| = |exp(H) y|` for every `y`.
pub fn polar_log(sigma: &CMatrix) -> CMatrix {
    let eig = SymmetricEigen::new(sigma.adjoint() * sigma);
    let u = &eig.eigenvectors;
    let d = CMatrix::from_diagonal(&eig.eigenvalues.map(|x| Complex64::new(0.5 * x.ln(), 0.0)));
    u * d * u.adjoint()
}

/// Volume, average scalar curvature, K-energy, Aubin `F°` and `J` of the potential
/// `log(|σγ|^2 / |γ|^2)` by adaptive quadrature.
pub fn curve_geometry_oracle(sigma: &CMatrix, curve: &RationalCurve, opts: &OracleOptions) -> Result<CurveGeometryReport> {
    let n = curve.ambient() + 1;
    if sigma.nrows() != n || sigma.ncols() != n {
        return Err(Error::precondition("group element has the wrong size"));
    }
    if curve.degree() < 1 {
        return Err(Error::precondition("curve must have positive degree"));
    }
    let h = polar_log(sigma);
    if h.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::precondition("group element is singular"));
    }
    let mut grid = opts.initial_grid.max(8);
    let mut prev = integrate(curve, &h, grid, opts.t_nodes);
    let mut refinements = 0;
    loop {
        let next_grid = grid * 2;
        if next_grid > opts.max_grid {
            return Err(Error::non_convergence(format!(
                "quadrature did not settle below {} by grid {grid}",
                opts.tolerance
            )));
        }
        let next = integrate(curve, &h, next_grid, opts.t_nodes);
        refinements += 1;
        let change = next.max_diff(&prev);
        grid = next_grid;
        let all_finite = [next.volume, next.mu, next.nu, next.j, next.f0].iter().all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::non_convergence(format!("non-finite quadrature value at grid {grid}")));
        }
        if change < opts.tolerance {
            return Ok(CurveGeometryReport {
                volume: next.volume,
                mu: next.mu,
                k_energy: next.nu,
                aubin_f0: next.f0,
                aubin_j: next.j,
                diagnostics: QuadratureDiagnostics { grid, refinements, last_change: change, t_nodes: opts.t_nodes },
            });
        }
        prev = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(5, 0.0, 1.0);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| x.powi(9) * w).sum();
        assert!((s - 0.1).abs() < 1e-14);
    }

    #[test]
    fn identity_has_zero_energies() {
        let c = RationalCurve::rational_normal(2).unwrap();
        let r = curve_geometry_oracle(&CMatrix::identity(3, 3), &c, &OracleOptions { initial_grid: 32, ..Default::default() }).unwrap();
        assert!((r.volume - 2.0).abs() < 1e-6);
        assert!((r.mu - 1.0).abs() < 1e-6);
        assert_eq!(r.k_energy, 0.0);
        assert_eq!(r.aubin_j, 0.0);
        assert_eq!(r.aubin_f0, 0.0);
    }
}
