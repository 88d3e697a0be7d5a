//! Homogeneous polynomials in vector or matrix variables, with the right-substitution action.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::scalar::{Coeff, Exact};

/// Exponent vector, one entry per variable.
pub type Monomial = Vec<u32>;

/// Variables are either a single row `z_0..z_N` or a `rows x cols` matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum VariableShape {
    Vector { cols: usize },
    Matrix { rows: usize, cols: usize },
}

impl VariableShape {
    pub fn vector(cols: usize) -> Result<Self> {
        if cols < 2 {
            return Err(Error::precondition("vector shape needs at least two coordinates"));
        }
        Ok(VariableShape::Vector { cols })
    }

    pub fn matrix(rows: usize, cols: usize) -> Result<Self> {
        if rows < 1 || cols < 2 {
            return Err(Error::precondition("matrix shape needs rows >= 1 and cols >= 2"));
        }
        Ok(VariableShape::Matrix { rows, cols })
    }

    pub fn rows(&self) -> usize {
        match *self {
            VariableShape::Vector { .. } => 1,
            VariableShape::Matrix { rows, .. } => rows,
        }
    }

    /// Size `N + 1` of the acting group.
    pub fn cols(&self) -> usize {
        match *self {
            VariableShape::Vector { cols } | VariableShape::Matrix { cols, .. } => cols,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.rows() * self.cols()
    }

    /// Flat index of the variable in row `r`, column `c`.
    pub fn index(&self, r: usize, c: usize) -> usize {
        r * self.cols() + c
    }
}

/// Sparse multivariate polynomial without homogeneity bookkeeping; used by elimination.
#[derive(Clone, Debug, PartialEq)]
pub struct SparsePoly<C> {
    nvars: usize,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coeff> SparsePoly<C> {
    pub fn zero(nvars: usize) -> Self {
        SparsePoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn variable(nvars: usize, idx: usize) -> Self {
        let mut e = vec![0; nvars];
        e[idx] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, C::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, C> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, e: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                let s = v.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        SparsePoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, s: &C) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.clone() * s.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Monomial = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca.clone() * cb.clone());
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::constant(self.nvars, C::one());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Exact quotient `self / divisor`; fails when the division leaves a remainder.
    pub fn exact_div(&self, divisor: &Self) -> Result<Self> {
        let (lead_e, lead_c) = divisor
            .terms
            .iter()
            .next_back()
            .map(|(e, c)| (e.clone(), c.clone()))
            .ok_or_else(|| Error::precondition("division by the zero polynomial"))?;
        let mut rem = self.clone();
        let mut quot = Self::zero(self.nvars);
        while let Some((e, c)) = rem.terms.iter().next_back().map(|(e, c)| (e.clone(), c.clone())) {
            if e.iter().zip(&lead_e).any(|(a, b)| a < b) {
                return Err(Error::precondition("polynomial division is not exact"));
            }
            let qe: Monomial = e.iter().zip(&lead_e).map(|(a, b)| a - b).collect();
            let qc = c / lead_c.clone();
            let mut step = Self::zero(self.nvars);
            step.add_term(qe, qc);
            rem = rem.sub(&step.mul(divisor));
            quot = quot.add(&step);
        }
        Ok(quot)
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[var] > 0 {
                let mut ne = e.clone();
                ne[var] -= 1;
                out.add_term(ne, c.clone() * C::from_i64(e[var] as i64));
            }
        }
        out
    }

    /// Total degree if every term has the same degree.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        let first = degs.next()?;
        if degs.all(|d| d == first) {
            Some(first)
        } else {
            None
        }
    }

    pub fn evaluate(&self, point: &[C]) -> C {
        let max_deg = self.terms.keys().flat_map(|e| e.iter().copied()).max().unwrap_or(0) as usize;
        let powers: Vec<Vec<C>> = point
            .iter()
            .map(|x| {
                let mut v = Vec::with_capacity(max_deg + 1);
                v.push(C::one());
                for k in 1..=max_deg {
                    let next = v[k - 1].clone() * x.clone();
                    v.push(next);
                }
                v
            })
            .collect();
        let mut acc = C::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t * powers[i][k as usize].clone();
                }
            }
            acc = acc + t;
        }
        acc
    }
}

/// A homogeneous polynomial of fixed degree in the variables of a [`VariableShape`].
#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousPolynomial<C> {
    shape: VariableShape,
    degree: u32,
    poly: SparsePoly<C>,
}

pub type ExactPolynomial = HomogeneousPolynomial<Exact>;
pub type FloatPolynomial = HomogeneousPolynomial<Complex64>;

impl<C: Coeff> HomogeneousPolynomial<C> {
    /// Build from terms; duplicate exponents are merged and zero coefficients dropped.
    pub fn new(shape: VariableShape, degree: u32, terms: impl IntoIterator<Item = (Monomial, C)>) -> Result<Self> {
        let mut poly = SparsePoly::zero(shape.num_vars());
        for (e, c) in terms {
            if e.len() != shape.num_vars() {
                return Err(Error::schema(format!(
                    "exponent vector has length {}, expected {}",
                    e.len(),
                    shape.num_vars()
                )));
            }
            if e.iter().sum::<u32>() != degree {
                return Err(Error::schema(format!("monomial {e:?} does not have degree {degree}")));
            }
            poly.add_term(e, c);
        }
        Ok(HomogeneousPolynomial { shape, degree, poly })
    }

    pub fn from_sparse(shape: VariableShape, poly: SparsePoly<C>) -> Result<Self> {
        if poly.nvars() != shape.num_vars() {
            return Err(Error::schema("variable count does not match shape"));
        }
        let degree = poly
            .homogeneous_degree()
            .ok_or_else(|| Error::precondition("polynomial is zero or not homogeneous"))?;
        Ok(HomogeneousPolynomial { shape, degree, poly })
    }

    pub fn zero(shape: VariableShape, degree: u32) -> Self {
        HomogeneousPolynomial { shape, degree, poly: SparsePoly::zero(shape.num_vars()) }
    }

    pub fn constant(shape: VariableShape, c: C) -> Self {
        HomogeneousPolynomial { shape, degree: 0, poly: SparsePoly::constant(shape.num_vars(), c) }
    }

    pub fn variable(shape: VariableShape, r: usize, c: usize) -> Self {
        HomogeneousPolynomial {
            shape,
            degree: 1,
            poly: SparsePoly::variable(shape.num_vars(), shape.index(r, c)),
        }
    }

    pub fn shape(&self) -> VariableShape {
        self.shape
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, C> {
        self.poly.terms()
    }

    pub fn sparse(&self) -> &SparsePoly<C> {
        &self.poly
    }

    pub fn len(&self) -> usize {
        self.poly.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn coefficient(&self, e: &[u32]) -> C {
        self.poly.terms.get(e).cloned().unwrap_or_else(C::zero)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::precondition("polynomials live on different variable shapes"));
        }
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(Error::precondition("polynomials have different degrees"));
        }
        Ok(())
    }

    fn merged_degree(&self, other: &Self) -> u32 {
        if self.is_zero() {
            other.degree
        } else {
            self.degree
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(HomogeneousPolynomial { shape: self.shape, degree: self.merged_degree(other), poly: self.poly.add(&other.poly) })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(HomogeneousPolynomial { shape: self.shape, degree: self.merged_degree(other), poly: self.poly.sub(&other.poly) })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.shape != other.shape {
            return Err(Error::precondition("polynomials live on different variable shapes"));
        }
        Ok(HomogeneousPolynomial {
            shape: self.shape,
            degree: self.degree + other.degree,
            poly: self.poly.mul(&other.poly),
        })
    }

    pub fn scale(&self, s: &C) -> Self {
        HomogeneousPolynomial { shape: self.shape, degree: self.degree, poly: self.poly.scale(s) }
    }

    pub fn neg(&self) -> Self {
        HomogeneousPolynomial { shape: self.shape, degree: self.degree, poly: self.poly.neg() }
    }

    pub fn pow(&self, k: u32) -> Self {
        HomogeneousPolynomial { shape: self.shape, degree: self.degree * k, poly: self.poly.pow(k) }
    }

    pub fn exact_div(&self, divisor: &Self) -> Result<Self> {
        if self.shape != divisor.shape || divisor.degree > self.degree {
            return Err(Error::precondition("incompatible division"));
        }
        Ok(HomogeneousPolynomial {
            shape: self.shape,
            degree: self.degree - divisor.degree,
            poly: self.poly.exact_div(&divisor.poly)?,
        })
    }

    /// Partial derivative in the variable at row `r`, column `c`.
    pub fn derivative(&self, r: usize, c: usize) -> Self {
        HomogeneousPolynomial {
            shape: self.shape,
            degree: self.degree.saturating_sub(1),
            poly: self.poly.derivative(self.shape.index(r, c)),
        }
    }

    /// Evaluate at a flat point (row-major for matrix shapes).
    pub fn evaluate(&self, point: &[C]) -> Result<C> {
        if point.len() != self.shape.num_vars() {
            return Err(Error::schema(format!(
                "point has {} coordinates, expected {}",
                point.len(),
                self.shape.num_vars()
            )));
        }
        Ok(self.poly.evaluate(point))
    }

    /// Torus character of a monomial: the total exponent in each column.
    pub fn column_degrees(&self, e: &[u32]) -> Vec<i64> {
        let cols = self.shape.cols();
        let mut out = vec![0i64; cols];
        for (idx, &k) in e.iter().enumerate() {
            out[idx % cols] += k as i64;
        }
        out
    }

    /// Right substitution `(sigma . P)(A) = P(A sigma)`.
    ///
    /// Satisfies `act(tau, act(sigma, P)) = act(tau * sigma, P)`.
    pub fn act(&self, sigma: &GroupElement<C>) -> Result<Self> {
        let cols = self.shape.cols();
        if sigma.size() != cols {
            return Err(Error::precondition(format!(
                "group element has size {}, polynomial expects {}",
                sigma.size(),
                cols
            )));
        }
        let nv = self.shape.num_vars();
        let rows = self.shape.rows();
        let mut images: Vec<SparsePoly<C>> = Vec::with_capacity(nv);
        for r in 0..rows {
            for j in 0..cols {
                let mut lin = SparsePoly::zero(nv);
                for i in 0..cols {
                    let mut e = vec![0; nv];
                    e[self.shape.index(r, i)] = 1;
                    lin.add_term(e, sigma.entry(i, j).clone());
                }
                images.push(lin);
            }
        }
        let mut power_cache: BTreeMap<(usize, u32), SparsePoly<C>> = BTreeMap::new();
        let mut out = SparsePoly::zero(nv);
        for (e, c) in self.poly.terms() {
            let mut term = SparsePoly::constant(nv, c.clone());
            for (v, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let p = power_cache.entry((v, k)).or_insert_with(|| images[v].pow(k)).clone();
                term = term.mul(&p);
            }
            out = out.add(&term);
        }
        Ok(HomogeneousPolynomial { shape: self.shape, degree: self.degree, poly: out })
    }

    pub fn to_float(&self) -> FloatPolynomial {
        let mut poly = SparsePoly::zero(self.shape.num_vars());
        for (e, c) in self.terms() {
            poly.add_term(e.clone(), c.to_c64());
        }
        HomogeneousPolynomial { shape: self.shape, degree: self.degree, poly }
    }

    /// Squared L2 norm for the unitarily invariant Fubini-Study measure of unit volume.
    ///
    /// Monomials are orthogonal with `|z^a|^2 = a! (K-1)! / (K-1+d)!`, `K` the number of variables.
    pub fn l2_norm_sqr(&self) -> f64 {
        let k = self.shape.num_vars();
        self.terms().iter().map(|(e, c)| c.to_c64().norm_sqr() * monomial_weight(e, k)).sum()
    }

    /// Exact squared L2 norm (same normalization as [`Self::l2_norm_sqr`]).
    pub fn l2_norm_sqr_exact(&self) -> C {
        let k = self.shape.num_vars();
        let mut acc = C::zero();
        for (e, c) in self.terms() {
            acc = acc + c.abs_sqr() * C::from_rational(&monomial_weight_exact(e, k));
        }
        acc
    }
}

impl FloatPolynomial {
    /// Evaluate a double-precision polynomial together with its gradient.
    pub fn evaluate_with_gradient(&self, point: &[Complex64]) -> (Complex64, Vec<Complex64>) {
        let nv = point.len();
        let d = self.degree as usize;
        let powers: Vec<Vec<Complex64>> = point
            .iter()
            .map(|x| {
                let mut v = vec![Complex64::new(1.0, 0.0); d + 1];
                for k in 1..=d {
                    v[k] = v[k - 1] * x;
                }
                v
            })
            .collect();
        let mut value = Complex64::new(0.0, 0.0);
        let mut grad = vec![Complex64::new(0.0, 0.0); nv];
        for (e, c) in self.terms() {
            let mut t = *c;
            for (i, &k) in e.iter().enumerate() {
                t *= powers[i][k as usize];
            }
            value += t;
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let mut g = *c * k as f64;
                for (j, &kj) in e.iter().enumerate() {
                    let p = if j == i { kj - 1 } else { kj };
                    g *= powers[j][p as usize];
                }
                grad[i] += g;
            }
        }
        (value, grad)
    }
}

/// Squared norm of the monomial `z^a` for the unit-volume Fubini-Study measure on `K` variables.
pub fn monomial_weight(e: &[u32], k: usize) -> f64 {
    let d: u32 = e.iter().sum();
    let mut log = ln_factorial(k as u32 - 1) - ln_factorial(k as u32 - 1 + d);
    for &a in e {
        log += ln_factorial(a);
    }
    log.exp()
}

pub fn monomial_weight_exact(e: &[u32], k: usize) -> num_rational::BigRational {
    use num_bigint::BigInt;
    let fact = |n: u32| (1..=n).fold(BigInt::from(1), |acc, i| acc * BigInt::from(i));
    let d: u32 = e.iter().sum();
    let num = e.iter().fold(fact(k as u32 - 1), |acc, &a| acc * fact(a));
    num_rational::BigRational::new(num, fact(k as u32 - 1 + d))
}

pub fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// All exponent vectors of total degree `d` in `k` variables, in lexicographic order.
pub fn monomials(k: usize, d: u32) -> Vec<Monomial> {
    fn rec(k: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if prefix.len() + 1 == k {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for a in 0..=d {
            prefix.push(a);
            rec(k, d - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    rec(k, d, &mut Vec::with_capacity(k), &mut out);
    out
}
