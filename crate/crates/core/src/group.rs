//! Elements of SL(N+1), one-parameter subgroups and dense complex matrix helpers.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Coeff, Exact};

pub type CMatrix = DMatrix<Complex64>;

/// Tolerance on `|det - 1|` for double-precision group elements.
pub const DET_TOLERANCE: f64 = 1e-9;

/// A square matrix of determinant one.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement<C> {
    n: usize,
    entries: Vec<C>,
    hs_norm_sqr: C,
}

pub type ExactGroupElement = GroupElement<Exact>;
pub type FloatGroupElement = GroupElement<Complex64>;

impl<C: Coeff> GroupElement<C> {
    /// Row-major entries; rejects matrices whose determinant is not one.
    pub fn new(n: usize, entries: Vec<C>) -> Result<Self> {
        if n < 2 {
            return Err(Error::precondition("group elements need size at least 2"));
        }
        if entries.len() != n * n {
            return Err(Error::schema(format!("expected {} entries, got {}", n * n, entries.len())));
        }
        let det = determinant(n, &entries);
        let ok = if C::EXACT {
            det == C::one()
        } else {
            (det.to_c64() - Complex64::new(1.0, 0.0)).norm() <= DET_TOLERANCE
        };
        if !ok {
            return Err(Error::precondition(format!("determinant is {:?}, expected 1", det.to_c64())));
        }
        let hs_norm_sqr = entries.iter().fold(C::zero(), |acc, c| acc + c.abs_sqr());
        Ok(GroupElement { n, entries, hs_norm_sqr })
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![C::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = C::one();
        }
        GroupElement { n, entries, hs_norm_sqr: C::from_i64(n as i64) }
    }

    /// Diagonal element; the product of the entries must be one.
    pub fn diagonal(diag: &[C]) -> Result<Self> {
        let n = diag.len();
        let mut entries = vec![C::zero(); n * n];
        for (i, d) in diag.iter().enumerate() {
            entries[i * n + i] = d.clone();
        }
        Self::new(n, entries)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &C {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[C] {
        &self.entries
    }

    /// Squared Hilbert-Schmidt norm `tr(sigma sigma^*)`.
    pub fn hs_norm_sqr(&self) -> &C {
        &self.hs_norm_sqr
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::precondition("group elements of different sizes"));
        }
        let n = self.n;
        let mut entries = vec![C::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = C::zero();
                for k in 0..n {
                    acc = acc + self.entry(i, k).clone() * other.entry(k, j).clone();
                }
                entries[i * n + j] = acc;
            }
        }
        let hs_norm_sqr = entries.iter().fold(C::zero(), |acc, c| acc + c.abs_sqr());
        Ok(GroupElement { n, entries, hs_norm_sqr })
    }

    pub fn to_float(&self) -> FloatGroupElement {
        GroupElement {
            n: self.n,
            entries: self.entries.iter().map(|c| c.to_c64()).collect(),
            hs_norm_sqr: self.hs_norm_sqr.to_c64(),
        }
    }

    pub fn to_cmatrix(&self) -> CMatrix {
        CMatrix::from_fn(self.n, self.n, |i, j| self.entry(i, j).to_c64())
    }
}

impl FloatGroupElement {
    /// Wrap a double-precision matrix, checking the determinant.
    pub fn from_cmatrix(m: &CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::schema("matrix is not square"));
        }
        let n = m.nrows();
        let entries = (0..n * n).map(|k| m[(k / n, k % n)]).collect();
        Self::new(n, entries)
    }

    /// Wrap a matrix without the determinant check; the caller guarantees det = 1 up to rounding.
    pub(crate) fn from_cmatrix_unchecked(m: &CMatrix) -> Self {
        let n = m.nrows();
        let entries: Vec<Complex64> = (0..n * n).map(|k| m[(k / n, k % n)]).collect();
        let hs = entries.iter().map(|c| c.norm_sqr()).sum::<f64>();
        GroupElement { n, entries, hs_norm_sqr: Complex64::new(hs, 0.0) }
    }
}

/// Determinant by Gaussian elimination over the coefficient field.
pub fn determinant<C: Coeff>(n: usize, entries: &[C]) -> C {
    let mut a: Vec<C> = entries.to_vec();
    let mut det = C::one();
    for col in 0..n {
        let pivot = if C::EXACT {
            (col..n).find(|&r| !a[r * n + col].is_zero())
        } else {
            (col..n)
                .max_by(|&r, &s| {
                    a[r * n + col]
                        .to_c64()
                        .norm()
                        .partial_cmp(&a[s * n + col].to_c64().norm())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .filter(|&r| a[r * n + col].to_c64().norm() > 0.0)
        };
        let Some(p) = pivot else {
            return C::zero();
        };
        if p != col {
            for k in 0..n {
                a.swap(p * n + k, col * n + k);
            }
            det = -det;
        }
        let piv = a[col * n + col].clone();
        det = det * piv.clone();
        for r in col + 1..n {
            let f = a[r * n + col].clone() / piv.clone();
            if f.is_zero() {
                continue;
            }
            for k in col..n {
                let v = a[r * n + k].clone() - f.clone() * a[col * n + k].clone();
                a[r * n + k] = v;
            }
        }
    }
    det
}

/// A one-parameter subgroup `t -> diag(t^a_0, ..., t^a_N)` with integer exponents summing to zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OnePsg {
    exponents: Vec<i64>,
}

impl OnePsg {
    pub fn new(exponents: Vec<i64>) -> Result<Self> {
        if exponents.len() < 2 {
            return Err(Error::schema("a one-parameter subgroup needs at least two exponents"));
        }
        if exponents.iter().sum::<i64>() != 0 {
            return Err(Error::precondition("exponents of a one-parameter subgroup must sum to zero"));
        }
        if exponents.iter().all(|&a| a == 0) {
            return Err(Error::precondition("the trivial one-parameter subgroup is not allowed"));
        }
        Ok(OnePsg { exponents })
    }

    pub fn exponents(&self) -> &[i64] {
        &self.exponents
    }

    pub fn size(&self) -> usize {
        self.exponents.len()
    }

    /// The group element `lambda(t)` for a nonzero complex `t`.
    pub fn at(&self, t: Complex64) -> FloatGroupElement {
        let diag: Vec<Complex64> = self.exponents.iter().map(|&a| t.powi(a as i32)).collect();
        let n = diag.len();
        let m = CMatrix::from_fn(n, n, |i, j| if i == j { diag[i] } else { Complex64::new(0.0, 0.0) });
        FloatGroupElement::from_cmatrix_unchecked(&m)
    }
}

/// Hermitian part of a square matrix with its trace removed.
pub fn traceless_hermitian(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    let mut h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let tr = h.trace() / Complex64::new(n as f64, 0.0);
    for i in 0..n {
        h[(i, i)] -= tr;
    }
    h
}

/// Frobenius norm.
pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Real inner product `Re tr(A^* B)` on matrices.
pub fn real_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// Matrix exponential of a Hermitian matrix through its eigendecomposition.
pub fn hermitian_exp(h: &CMatrix) -> CMatrix {
    let eig = nalgebra::SymmetricEigen::new(h.clone());
    let u = &eig.eigenvectors;
    let d = CMatrix::from_diagonal(&eig.eigenvalues.map(|x| Complex64::new(x.exp(), 0.0)));
    u * d * u.adjoint()
}

/// Matrix exponential of a general complex matrix (scaling and squaring).
pub fn matrix_exp(m: &CMatrix) -> CMatrix {
    m.clone().exp()
}

/// Rescale an invertible matrix to determinant one by a complex scalar.
pub fn normalize_det(m: &CMatrix) -> Result<CMatrix> {
    let n = m.nrows();
    let det = m.clone().determinant();
    if det.norm() < 1e-300 || !det.norm().is_finite() {
        return Err(Error::precondition("matrix is singular"));
    }
    let root = det.powf(1.0 / n as f64);
    Ok(m / root)
}

/// Random element of SL(n): complex Gaussian entries rescaled to unit determinant.
pub fn random_sl<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    loop {
        let m = CMatrix::from_fn(n, n, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        });
        if let Ok(s) = normalize_det(&m) {
            return s;
        }
    }
}

/// Random traceless Hermitian matrix with Frobenius norm `scale`.
pub fn random_traceless_hermitian<R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> CMatrix {
    let m = CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    });
    let h = traceless_hermitian(&m);
    let f = frobenius(&h);
    if f == 0.0 {
        return h;
    }
    h * Complex64::new(scale / f, 0.0)
}

/// Singular values and right singular frame: `m = U diag(s) W^*`, returning `(s, W^*)`.
///
/// Computed from the Hermitian eigenproblem of `m^* m`; singular values are sorted decreasingly.
pub fn right_singular_frame(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let gram = m.adjoint() * m;
    let eig = nalgebra::SymmetricEigen::new(gram);
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap_or(std::cmp::Ordering::Equal));
    let s: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k].max(0.0).sqrt()).collect();
    let w_star = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(j, order[i])].conj());
    (s, w_star)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{exact, rational};
    use rand::SeedableRng;

    #[test]
    fn exact_determinant_check() {
        let ok = GroupElement::new(2, vec![exact(2, 0), exact(1, 0), exact(1, 0), exact(1, 0)]);
        assert!(ok.is_ok());
        let bad = GroupElement::new(2, vec![exact(2, 0), exact(0, 0), exact(0, 0), exact(1, 0)]);
        assert!(matches!(bad, Err(Error::Precondition(_))));
        let half = Exact::new(rational(1, 2), rational(0, 1));
        let diag = GroupElement::diagonal(&[half, exact(2, 0)]).unwrap();
        assert_eq!(diag.hs_norm_sqr(), &Exact::new(rational(17, 4), rational(0, 1)));
    }

    #[test]
    fn one_psg_validation() {
        assert!(OnePsg::new(vec![1, -1]).is_ok());
        assert!(OnePsg::new(vec![1, 0]).is_err());
        assert!(OnePsg::new(vec![0, 0, 0]).is_err());
    }

    #[test]
    fn random_sl_has_unit_determinant() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in 2..5 {
            let m = random_sl(n, &mut rng);
            assert!((m.clone().determinant() - Complex64::new(1.0, 0.0)).norm() < 1e-10);
            assert!(FloatGroupElement::from_cmatrix(&m).is_ok());
        }
    }

    #[test]
    fn singular_frame_reconstructs_gram() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let m = random_sl(3, &mut rng);
        let (s, w_star) = right_singular_frame(&m);
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(3, s.iter().map(|x| Complex64::new(x * x, 0.0))));
        let rebuilt = w_star.adjoint() * d * &w_star;
        assert!(frobenius(&(rebuilt - m.adjoint() * &m)) < 1e-9);
        assert!(s.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn hermitian_exp_agrees_with_general_exp() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let h = random_traceless_hermitian(3, 0.8, &mut rng);
        assert!(frobenius(&(hermitian_exp(&h) - matrix_exp(&h))) < 1e-10);
    }
}
