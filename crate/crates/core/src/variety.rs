//! Chow forms and Hurwitz forms of rational curves and hypersurfaces, and the normalized variety pair.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::elim::{
    binary_discriminant_symbolic, bareiss_determinant, maximal_minors, sylvester_matrix, sylvester_resultant_symbolic,
};
use crate::error::{Error, Result};
use crate::group::ExactGroupElement;
use crate::poly::{ExactPolynomial, FloatPolynomial, HomogeneousPolynomial, SparsePoly, VariableShape};
use crate::scalar::{Coeff, Exact};

/// Largest curve degree and ambient dimension for symbolic expansion.
pub const SYMBOLIC_DEGREE_CAP: u32 = 5;
pub const SYMBOLIC_AMBIENT_CAP: usize = 5;

/// A curve `[s:t] -> [γ_0(s,t) : ... : γ_N(s,t)]` given by binary forms of a common degree.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalCurve {
    degree: u32,
    /// `gamma[c][i]` is the coefficient of `s^(d-i) t^i` in component `c`.
    gamma: Vec<Vec<Exact>>,
}

impl RationalCurve {
    pub fn new(gamma: Vec<Vec<Exact>>) -> Result<Self> {
        if gamma.len() < 2 {
            return Err(Error::schema("a curve needs at least two components"));
        }
        let len = gamma[0].len();
        if len < 2 || gamma.iter().any(|g| g.len() != len) {
            return Err(Error::schema("components must be binary forms of one positive degree"));
        }
        let curve = RationalCurve { degree: len as u32 - 1, gamma };
        if curve.has_base_point() {
            return Err(Error::precondition("degenerate curve: components share a projective root"));
        }
        Ok(curve)
    }

    pub fn from_forms(forms: &[ExactPolynomial]) -> Result<Self> {
        let coeffs = forms.iter().map(crate::elim::binary_coefficients).collect::<Result<Vec<_>>>()?;
        Self::new(coeffs)
    }

    /// The rational normal curve `(s^d, s^(d-1) t, ..., t^d)` in `P^d`.
    pub fn rational_normal(d: u32) -> Result<Self> {
        let n = d as usize + 1;
        Self::new(
            (0..n)
                .map(|c| (0..n).map(|i| if i == c { Exact::one() } else { Exact::zero() }).collect())
                .collect(),
        )
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Ambient dimension `N`.
    pub fn ambient(&self) -> usize {
        self.gamma.len() - 1
    }

    pub fn coefficients(&self) -> &[Vec<Exact>] {
        &self.gamma
    }

    pub fn float_coefficients(&self) -> Vec<Vec<Complex64>> {
        self.gamma.iter().map(|g| g.iter().map(|c| c.to_c64()).collect()).collect()
    }

    /// The curve `σ ∘ γ` (column vector convention).
    pub fn image(&self, sigma: &ExactGroupElement) -> Result<Self> {
        let n = self.gamma.len();
        if sigma.size() != n {
            return Err(Error::precondition("group element has the wrong size"));
        }
        let len = self.gamma[0].len();
        let gamma = (0..n)
            .map(|i| {
                (0..len)
                    .map(|k| (0..n).fold(Exact::zero(), |acc, j| acc + sigma.entry(i, j).clone() * self.gamma[j][k].clone()))
                    .collect()
            })
            .collect();
        Self::new(gamma)
    }

    fn has_base_point(&self) -> bool {
        let nonzero: Vec<&Vec<Exact>> = self.gamma.iter().filter(|g| g.iter().any(|c| !c.is_zero())).collect();
        if nonzero.is_empty() {
            return true;
        }
        // Root at [1:0]: every s^d coefficient vanishes.
        if nonzero.iter().all(|g| g[0].is_zero()) {
            return true;
        }
        // Finite roots: gcd of the dehomogenized polynomials in s (t = 1), ascending powers.
        let mut g: Vec<Exact> = nonzero[0].iter().rev().cloned().collect();
        for other in &nonzero[1..] {
            let h: Vec<Exact> = other.iter().rev().cloned().collect();
            g = univariate_gcd(g, h);
            if degree_of(&g) == Some(0) {
                return false;
            }
        }
        degree_of(&g).is_none_or(|d| d > 0)
    }
}

fn trim(mut p: Vec<Exact>) -> Vec<Exact> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn degree_of(p: &[Exact]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

fn univariate_gcd(a: Vec<Exact>, b: Vec<Exact>) -> Vec<Exact> {
    let (mut a, mut b) = (trim(a), trim(b));
    while !b.is_empty() {
        // a mod b
        let lead = b.last().unwrap().clone();
        while a.len() >= b.len() && !a.is_empty() {
            let f = a.last().unwrap().clone() / lead.clone();
            let shift = a.len() - b.len();
            for (i, c) in b.iter().enumerate() {
                a[shift + i] = a[shift + i].clone() - f.clone() * c.clone();
            }
            a = trim(a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a
}

/// A hypersurface `{F = 0}` in `P^(n+1)`; `F` is assumed irreducible.
#[derive(Clone, Debug, PartialEq)]
pub struct HypersurfaceVariety {
    f: ExactPolynomial,
}

impl HypersurfaceVariety {
    pub fn new(f: ExactPolynomial) -> Result<Self> {
        if !matches!(f.shape(), VariableShape::Vector { cols } if cols >= 3) {
            return Err(Error::precondition("hypersurface equation needs a vector shape with at least 3 variables"));
        }
        if f.is_zero() || f.degree() == 0 {
            return Err(Error::precondition("hypersurface equation must be a nonconstant polynomial"));
        }
        Ok(HypersurfaceVariety { f })
    }

    pub fn equation(&self) -> &ExactPolynomial {
        &self.f
    }

    /// Dimension `n` of the hypersurface.
    pub fn dim(&self) -> usize {
        self.f.shape().cols() - 2
    }

    pub fn degree(&self) -> u32 {
        self.f.degree()
    }
}

/// Scale a form to integer coefficients with unit content and positive leading coefficient.
///
/// The leading coefficient is the one of the lexicographically largest monomial.
/// Returns the normalized form and the factor `c` with `normalized = c * input`.
pub fn normalize_form(p: &ExactPolynomial) -> Result<(ExactPolynomial, Exact)> {
    let (_, lead) = p.terms().iter().next_back().ok_or_else(|| Error::precondition("zero form"))?;
    // Rotate the leading coefficient onto the positive real axis with a rational factor.
    let rot = if lead.im.is_zero() {
        if lead.re.is_negative() {
            -Exact::one()
        } else {
            Exact::one()
        }
    } else {
        lead.conj()
    };
    let rotated = p.scale(&rot);
    let mut den = BigInt::one();
    for c in rotated.terms().values() {
        den = den.lcm(c.re.denom()).lcm(c.im.denom());
    }
    let mut g = BigInt::zero();
    for c in rotated.terms().values() {
        let re = (&c.re * BigRational::from_integer(den.clone())).to_integer();
        let im = (&c.im * BigRational::from_integer(den.clone())).to_integer();
        g = g.gcd(&re).gcd(&im);
    }
    let factor_r = BigRational::new(den, g);
    let factor = rot * Exact::from_rational(&factor_r);
    Ok((p.scale(&factor), factor))
}

/// Row `r` of the generic matrix applied to the curve: a binary form with linear-form coefficients.
fn row_times_curve(curve: &RationalCurve, shape: VariableShape, r: usize) -> Vec<SparsePoly<Exact>> {
    let nv = shape.num_vars();
    let len = curve.degree as usize + 1;
    (0..len)
        .map(|i| {
            let mut p = SparsePoly::zero(nv);
            for (c, g) in curve.gamma.iter().enumerate() {
                let mut e = vec![0u32; nv];
                e[shape.index(r, c)] = 1;
                p.add_term(e, g[i].clone());
            }
            p
        })
        .collect()
}

fn check_symbolic_caps(curve: &RationalCurve) -> Result<()> {
    if curve.degree > SYMBOLIC_DEGREE_CAP || curve.ambient() > SYMBOLIC_AMBIENT_CAP {
        return Err(Error::precondition(format!(
            "symbolic expansion is limited to degree <= {SYMBOLIC_DEGREE_CAP} and ambient dimension <= {SYMBOLIC_AMBIENT_CAP}; use evaluation-only mode"
        )));
    }
    Ok(())
}

/// Unnormalized Chow form: `Res_{s,t}(A_0·γ, A_1·γ)` on `2 x (N+1)` matrices.
pub fn chow_form_curve_raw(curve: &RationalCurve) -> Result<ExactPolynomial> {
    check_symbolic_caps(curve)?;
    let shape = VariableShape::matrix(2, curve.ambient() + 1)?;
    let f = row_times_curve(curve, shape, 0);
    let g = row_times_curve(curve, shape, 1);
    let res = sylvester_resultant_symbolic(&f, &g)?;
    let poly = HomogeneousPolynomial::from_sparse(shape, res)
        .map_err(|_| Error::precondition("degenerate curve: Chow form vanishes identically"))?;
    if poly.degree() != 2 * curve.degree {
        return Err(Error::precondition("degenerate curve: Chow form has the wrong degree"));
    }
    Ok(poly)
}

/// Normalized Chow form of a rational curve, of degree `2d`.
pub fn chow_form_curve(curve: &RationalCurve) -> Result<ExactPolynomial> {
    Ok(normalize_form(&chow_form_curve_raw(curve)?)?.0)
}

/// Unnormalized Hurwitz form: the discriminant of `B·γ` on `1 x (N+1)` matrices.
pub fn hurwitz_form_curve_raw(curve: &RationalCurve) -> Result<ExactPolynomial> {
    if curve.degree < 2 {
        return Err(Error::precondition("the Hurwitz form needs degree at least 2"));
    }
    check_symbolic_caps(curve)?;
    let shape = VariableShape::matrix(1, curve.ambient() + 1)?;
    let f = row_times_curve(curve, shape, 0);
    let disc = binary_discriminant_symbolic(&f)?;
    let poly = HomogeneousPolynomial::from_sparse(shape, disc)
        .map_err(|_| Error::precondition("degenerate curve: Hurwitz form vanishes identically"))?;
    if poly.degree() != 2 * curve.degree - 2 {
        return Err(Error::precondition("degenerate curve: Hurwitz form has the wrong degree"));
    }
    Ok(poly)
}

/// Normalized Hurwitz form of a rational curve, of degree `2d - 2`.
pub fn hurwitz_form_curve(curve: &RationalCurve) -> Result<ExactPolynomial> {
    Ok(normalize_form(&hurwitz_form_curve_raw(curve)?)?.0)
}

/// Unnormalized Chow form of a hypersurface: `F(Λ(A))` with `Λ` the signed maximal minors.
pub fn chow_form_hypersurface_raw(h: &HypersurfaceVariety) -> Result<ExactPolynomial> {
    let n = h.dim();
    let shape = VariableShape::matrix(n + 1, n + 2)?;
    let nv = shape.num_vars();
    let a: Vec<Vec<SparsePoly<Exact>>> = (0..n + 1)
        .map(|r| (0..n + 2).map(|c| SparsePoly::variable(nv, shape.index(r, c))).collect())
        .collect();
    let minors = maximal_minors(&a, nv)?;
    let mut out = SparsePoly::zero(nv);
    for (e, c) in h.f.terms() {
        let mut term = SparsePoly::constant(nv, c.clone());
        for (j, &k) in e.iter().enumerate() {
            if k > 0 {
                term = term.mul(&minors[j].pow(k));
            }
        }
        out = out.add(&term);
    }
    HomogeneousPolynomial::from_sparse(shape, out).map_err(|_| Error::precondition("Chow form vanishes identically"))
}

/// Normalized Chow form of a hypersurface, of degree `d(n+1)`.
pub fn chow_form_hypersurface(h: &HypersurfaceVariety) -> Result<ExactPolynomial> {
    Ok(normalize_form(&chow_form_hypersurface_raw(h)?)?.0)
}

/// Double-precision evaluation of a form, with the logarithmic gradient.
#[derive(Clone, Debug)]
pub enum FormEvaluator {
    /// An expanded polynomial.
    Polynomial(FloatPolynomial),
    /// `c · Res(A_0·γ, A_1·γ)` evaluated as a Sylvester determinant; `log_scale = log |c|^2`.
    Chow { gamma: Vec<Vec<Complex64>>, log_scale: f64 },
    /// `c · disc(B·γ)` evaluated as a Sylvester determinant of the partials.
    Hurwitz { gamma: Vec<Vec<Complex64>>, log_scale: f64 },
}

impl FormEvaluator {
    pub fn shape(&self) -> VariableShape {
        match self {
            FormEvaluator::Polynomial(p) => p.shape(),
            FormEvaluator::Chow { gamma, .. } => VariableShape::Matrix { rows: 2, cols: gamma.len() },
            FormEvaluator::Hurwitz { gamma, .. } => VariableShape::Matrix { rows: 1, cols: gamma.len() },
        }
    }

    pub fn degree(&self) -> u32 {
        match self {
            FormEvaluator::Polynomial(p) => p.degree(),
            FormEvaluator::Chow { gamma, .. } => 2 * (gamma[0].len() as u32 - 1),
            FormEvaluator::Hurwitz { gamma, .. } => 2 * (gamma[0].len() as u32 - 1) - 2,
        }
    }

    /// `log |F(x)|^2` at a flat row-major point.
    pub fn log_abs_sqr(&self, x: &[Complex64]) -> f64 {
        match self {
            FormEvaluator::Polynomial(p) => p.sparse().evaluate(x).norm_sqr().ln(),
            _ => self.log_abs_sqr_with_gradient(x, false).0,
        }
    }

    /// `(log |F(x)|^2, (∂F/∂x_k) / F)`; the gradient is empty when not requested.
    pub fn log_abs_sqr_with_gradient(&self, x: &[Complex64], want_grad: bool) -> (f64, Vec<Complex64>) {
        match self {
            FormEvaluator::Polynomial(p) => {
                if !want_grad {
                    return (p.sparse().evaluate(x).norm_sqr().ln(), Vec::new());
                }
                let (v, g) = p.evaluate_with_gradient(x);
                (v.norm_sqr().ln(), g.into_iter().map(|gi| gi / v).collect())
            }
            FormEvaluator::Chow { gamma, log_scale } => {
                let cols = gamma.len();
                let d = gamma[0].len() - 1;
                let form = |r: usize| -> Vec<Complex64> {
                    (0..=d).map(|i| (0..cols).map(|c| x[r * cols + c] * gamma[c][i]).sum()).collect()
                };
                let f = form(0);
                let g = form(1);
                let blocks = [(0usize, d), (d, d)];
                sylvester_log_det(&f, &g, want_grad, *log_scale, |grad_s| {
                    // d/dA_{rc}: block r holds shifts of γ_c.
                    let mut out = vec![Complex64::new(0.0, 0.0); 2 * cols];
                    for (r, &(start, rows)) in blocks.iter().enumerate() {
                        for c in 0..cols {
                            let mut acc = Complex64::new(0.0, 0.0);
                            for k in 0..rows {
                                for (i, gc) in gamma[c].iter().enumerate() {
                                    acc += grad_s[(start + k, k + i)] * gc;
                                }
                            }
                            out[r * cols + c] = acc;
                        }
                    }
                    out
                })
            }
            FormEvaluator::Hurwitz { gamma, log_scale } => {
                let cols = gamma.len();
                let d = gamma[0].len() - 1;
                let coeff: Vec<Complex64> = (0..=d).map(|i| (0..cols).map(|c| x[c] * gamma[c][i]).sum()).collect();
                let fs: Vec<Complex64> = (0..d).map(|i| coeff[i] * (d - i) as f64).collect();
                let ft: Vec<Complex64> = (1..=d).map(|i| coeff[i] * i as f64).collect();
                let norm = -2.0 * ((d as f64).powi(d as i32 - 2)).ln();
                sylvester_log_det(&fs, &ft, want_grad, *log_scale + norm, |grad_s| {
                    let mut out = vec![Complex64::new(0.0, 0.0); cols];
                    for (c, out_c) in out.iter_mut().enumerate() {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for k in 0..d - 1 {
                            for i in 0..d {
                                acc += grad_s[(k, k + i)] * gamma[c][i] * (d - i) as f64;
                            }
                        }
                        for k in 0..d - 1 {
                            for j in 0..d {
                                acc += grad_s[(d - 1 + k, k + j)] * gamma[c][j + 1] * (j + 1) as f64;
                            }
                        }
                        *out_c = acc;
                    }
                    out
                })
            }
        }
    }
}

/// `log |det S|^2 + offset` for the Sylvester matrix of `f, g`, and optionally the gradient
/// assembled from `∂ log det S / ∂S_{ab} = (S^{-1})_{ba}`.
fn sylvester_log_det(
    f: &[Complex64],
    g: &[Complex64],
    want_grad: bool,
    offset: f64,
    assemble: impl Fn(&DMatrix<Complex64>) -> Vec<Complex64>,
) -> (f64, Vec<Complex64>) {
    let zero = Complex64::new(0.0, 0.0);
    let rows = sylvester_matrix(f, g, &zero);
    let n = rows.len();
    let s = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let lu = s.lu();
    let det = lu.determinant();
    let value = det.norm_sqr().ln() + offset;
    if !want_grad {
        return (value, Vec::new());
    }
    let grad = match lu.try_inverse() {
        Some(inv) => assemble(&inv.transpose()),
        None => assemble(&DMatrix::from_element(n, n, Complex64::new(f64::NAN, 0.0))),
    };
    (value, grad)
}

/// Which forms are available for a variety.
#[derive(Clone, Debug)]
pub enum Variety {
    Curve(RationalCurve),
    Hypersurface(HypersurfaceVariety),
}

/// Options for [`build_x_pair`].
#[derive(Clone, Debug)]
pub struct XPairOptions {
    /// Expand the forms symbolically (required for exact weights).
    pub symbolic: bool,
    pub samples: usize,
    pub seed: u64,
}

impl Default for XPairOptions {
    fn default() -> Self {
        XPairOptions { symbolic: true, samples: 200_000, seed: 0 }
    }
}

/// The pair `(R^{deg Δ}, Δ^{deg R})` of a variety, with powers kept as exponents.
#[derive(Clone, Debug)]
pub struct XPair {
    /// Dimension `n` of the variety.
    pub dim: usize,
    /// Ambient dimension `N`.
    pub ambient: usize,
    /// Degree `d` of the variety.
    pub degree: u32,
    pub chow: Option<ExactPolynomial>,
    pub hurwitz: Option<ExactPolynomial>,
    pub deg_chow: u32,
    pub deg_hurwitz: Option<u32>,
    pub chow_eval: FormEvaluator,
    pub hurwitz_eval: Option<FormEvaluator>,
    /// `log |R|_0` and `log |Δ|_0` at the identity, for unit normalization.
    pub mahler_chow: crate::norms::MahlerEstimate,
    pub mahler_hurwitz: Option<crate::norms::MahlerEstimate>,
}

impl XPair {
    /// Exponents `(deg Δ, deg R)` applied to `(R, Δ)`.
    pub fn exponents(&self) -> Option<(u32, u32)> {
        self.deg_hurwitz.map(|dh| (dh, self.deg_chow))
    }

    pub fn group_size(&self) -> usize {
        self.ambient + 1
    }

    pub fn require_hurwitz(&self) -> Result<&FormEvaluator> {
        self.hurwitz_eval
            .as_ref()
            .ok_or_else(|| Error::precondition("this variety pair has no Hurwitz form; only resultant operations are available"))
    }
}

/// Assemble the variety pair and estimate its Mahler normalizations once.
pub fn build_x_pair(v: &Variety, opts: &XPairOptions) -> Result<XPair> {
    let (dim, ambient, degree, chow, hurwitz, chow_eval, hurwitz_eval) = match v {
        Variety::Curve(c) => {
            if c.degree() < 2 {
                return Err(Error::precondition("the Hurwitz form needs degree at least 2"));
            }
            let gamma = c.float_coefficients();
            let (chow, chow_scale, hurwitz, hurwitz_scale) = if opts.symbolic {
                let (r, cr) = normalize_form(&chow_form_curve_raw(c)?)?;
                let (h, ch) = normalize_form(&hurwitz_form_curve_raw(c)?)?;
                (Some(r), cr.to_c64().norm_sqr().ln(), Some(h), ch.to_c64().norm_sqr().ln())
            } else {
                (None, 0.0, None, 0.0)
            };
            (
                1,
                c.ambient(),
                c.degree(),
                chow,
                hurwitz,
                FormEvaluator::Chow { gamma: gamma.clone(), log_scale: chow_scale },
                Some(FormEvaluator::Hurwitz { gamma, log_scale: hurwitz_scale }),
            )
        }
        Variety::Hypersurface(h) => {
            let r = chow_form_hypersurface(h)?;
            let eval = FormEvaluator::Polynomial(r.to_float());
            (h.dim(), h.dim() + 1, h.degree(), Some(r), None, eval, None)
        }
    };
    let deg_chow = chow_eval.degree();
    let deg_hurwitz = hurwitz_eval.as_ref().map(|e| e.degree());
    if deg_chow != degree * (dim as u32 + 1) {
        return Err(Error::precondition("Chow form degree differs from d(n+1)"));
    }
    let mahler_chow = crate::norms::form_lp_norm(&chow_eval, 0.0, opts.samples, opts.seed)?;
    let mahler_hurwitz = match &hurwitz_eval {
        Some(e) => Some(crate::norms::form_lp_norm(e, 0.0, opts.samples, opts.seed)?),
        None => None,
    };
    Ok(XPair {
        dim,
        ambient,
        degree,
        chow,
        hurwitz,
        deg_chow,
        deg_hurwitz,
        chow_eval,
        hurwitz_eval,
        mahler_chow,
        mahler_hurwitz,
    })
}

/// Symbolic determinant of a square matrix of polynomials in a common ring.
pub fn symbolic_determinant(m: Vec<Vec<SparsePoly<Exact>>>, nvars: usize) -> Result<SparsePoly<Exact>> {
    bareiss_determinant(m, nvars)
}
