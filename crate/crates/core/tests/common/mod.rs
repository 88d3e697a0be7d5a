#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use stabpairs::group::{frobenius, hermitian_exp, random_traceless_hermitian, CMatrix};
use stabpairs::lattice::{wedge_index, RepVector, SlotKind, TensorVector};
use stabpairs::pair::Pair;
use stabpairs::poly::{monomials, ExactPolynomial, FloatPolynomial, HomogeneousPolynomial, VariableShape};
use stabpairs::scalar::{exact, Exact};
use stabpairs::variety::{build_x_pair, RationalCurve, Variety, XPair, XPairOptions};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn poly(cols: usize, degree: u32, terms: &[(&[u32], i64)]) -> ExactPolynomial {
    HomogeneousPolynomial::new(
        VariableShape::vector(cols).unwrap(),
        degree,
        terms.iter().map(|(e, c)| (e.to_vec(), exact(*c, 0))),
    )
    .unwrap()
}

/// `sum_i c_i x^(d-i) y^i`.
pub fn binary(coeffs: &[i64]) -> ExactPolynomial {
    let d = coeffs.len() as u32 - 1;
    let terms: Vec<(Vec<u32>, Exact)> =
        coeffs.iter().enumerate().map(|(i, &c)| (vec![d - i as u32, i as u32], exact(c, 0))).collect();
    HomogeneousPolynomial::new(VariableShape::vector(2).unwrap(), d, terms).unwrap()
}

pub fn rep(p: ExactPolynomial) -> RepVector<Exact> {
    RepVector::Polynomial(p)
}

/// `((e1∧e2)^2, e1·e2 ⊗ (e1∧e2))` in coordinates of `Λ² ⊗ Λ²` and `V ⊗ V ⊗ Λ²` for SL(3).
pub fn blow_up_pair() -> Pair {
    let w12 = wedge_index(3, 0, 1);
    let v = TensorVector::new(3, vec![SlotKind::Wedge2, SlotKind::Wedge2], vec![(vec![w12, w12], exact(1, 0))]).unwrap();
    let w = TensorVector::new(
        3,
        vec![SlotKind::Vector, SlotKind::Vector, SlotKind::Wedge2],
        vec![(vec![0, 1, w12], exact(1, 0)), (vec![1, 0, w12], exact(1, 0))],
    )
    .unwrap();
    Pair::exact(RepVector::Tensor(v), RepVector::Tensor(w)).unwrap()
}

/// Random integer coefficients in `[-r, r]`; retried until nonzero.
pub fn random_exact_poly(rng: &mut ChaCha8Rng, cols: usize, degree: u32, r: i64) -> ExactPolynomial {
    loop {
        let terms: Vec<(Vec<u32>, Exact)> =
            monomials(cols, degree).into_iter().map(|e| (e, exact(rng.random_range(-r..=r), 0))).collect();
        let p = HomogeneousPolynomial::new(VariableShape::vector(cols).unwrap(), degree, terms).unwrap();
        if !p.is_zero() {
            return p;
        }
    }
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Dense polynomial with complex Gaussian coefficients.
pub fn random_float_poly(rng: &mut ChaCha8Rng, cols: usize, degree: u32) -> FloatPolynomial {
    let terms: Vec<(Vec<u32>, Complex64)> = monomials(cols, degree).into_iter().map(|e| (e, gaussian(rng))).collect();
    HomogeneousPolynomial::new(VariableShape::vector(cols).unwrap(), degree, terms).unwrap()
}

/// Random unitary from the QR factorization of a Gaussian matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let m = CMatrix::from_fn(n, n, |_, _| gaussian(rng));
    m.qr().q()
}

/// Orthonormal basis of traceless Hermitian matrices for `Re tr(A^* B)`.
pub fn hermitian_basis(n: usize) -> Vec<CMatrix> {
    let mut out = Vec::new();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..n {
        for k in j + 1..n {
            let mut a = CMatrix::zeros(n, n);
            a[(j, k)] = Complex64::new(s, 0.0);
            a[(k, j)] = Complex64::new(s, 0.0);
            out.push(a);
            let mut b = CMatrix::zeros(n, n);
            b[(j, k)] = Complex64::new(0.0, s);
            b[(k, j)] = Complex64::new(0.0, -s);
            out.push(b);
        }
    }
    // diag(1, .., 1, -k, 0, ..) / norm for k = 1..n-1
    for k in 1..n {
        let mut d = CMatrix::zeros(n, n);
        for i in 0..k {
            d[(i, i)] = Complex64::new(1.0, 0.0);
        }
        d[(k, k)] = Complex64::new(-(k as f64), 0.0);
        let f = frobenius(&d);
        out.push(d / Complex64::new(f, 0.0));
    }
    out
}

/// A random nonzero integer direction with entries in `[-r, r]` summing to zero.
pub fn random_lambda(rng: &mut ChaCha8Rng, n: usize, r: i64) -> Vec<i64> {
    loop {
        let mut l: Vec<i64> = (0..n - 1).map(|_| rng.random_range(-r..=r)).collect();
        let last = -l.iter().sum::<i64>();
        l.push(last);
        if l.iter().any(|&a| a != 0) {
            return l;
        }
    }
}

/// Rational normal curve of degree `d` with symbolic forms and 200k samples per form.
pub fn curve_pair(d: u32) -> (RationalCurve, XPair) {
    let c = RationalCurve::rational_normal(d).unwrap();
    let xp = build_x_pair(&Variety::Curve(c.clone()), &XPairOptions { symbolic: true, samples: 200_000, seed: 1 }).unwrap();
    (c, xp)
}

/// `u exp(H)` with `u` Haar-random and `H` traceless Hermitian of entry scale `size`.
pub fn random_sigma(r: &mut ChaCha8Rng, n: usize, size: f64) -> CMatrix {
    random_unitary(r, n) * hermitian_exp(&random_traceless_hermitian(n, size, r))
}
