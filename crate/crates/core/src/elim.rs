//! Elimination: Sylvester resultants, binary discriminants, fraction-free determinants, maximal minors.

use crate::error::{Error, Result};
use crate::group::determinant;
use crate::poly::{HomogeneousPolynomial, SparsePoly, VariableShape};
use crate::scalar::Coeff;

/// Coefficients of a binary form `sum_i c_i s^(p-i) t^i`, highest power of `s` first.
pub fn binary_coefficients<C: Coeff>(f: &HomogeneousPolynomial<C>) -> Result<Vec<C>> {
    if f.shape() != (VariableShape::Vector { cols: 2 }) {
        return Err(Error::precondition("expected a binary form"));
    }
    let p = f.degree();
    Ok((0..=p).map(|i| f.coefficient(&[p - i, i])).collect())
}

/// Sylvester matrix of two coefficient lists (highest power of `s` first).
pub fn sylvester_matrix<T: Clone>(f: &[T], g: &[T], zero: &T) -> Vec<Vec<T>> {
    let p = f.len() - 1;
    let q = g.len() - 1;
    let n = p + q;
    let mut m = vec![vec![zero.clone(); n]; n];
    for r in 0..q {
        for (i, c) in f.iter().enumerate() {
            m[r][r + i] = c.clone();
        }
    }
    for r in 0..p {
        for (i, c) in g.iter().enumerate() {
            m[q + r][r + i] = c.clone();
        }
    }
    m
}

/// Resultant of two binary forms with scalar coefficients.
pub fn sylvester_resultant<C: Coeff>(f: &HomogeneousPolynomial<C>, g: &HomogeneousPolynomial<C>) -> Result<C> {
    let fc = binary_coefficients(f)?;
    let gc = binary_coefficients(g)?;
    resultant_of_coefficients(&fc, &gc)
}

pub fn resultant_of_coefficients<C: Coeff>(f: &[C], g: &[C]) -> Result<C> {
    if f.is_empty() || g.is_empty() {
        return Err(Error::precondition("empty coefficient list"));
    }
    if f.len() == 1 && g.len() == 1 {
        return Ok(C::one());
    }
    let m = sylvester_matrix(f, g, &C::zero());
    let n = m.len();
    let flat: Vec<C> = m.into_iter().flatten().collect();
    Ok(determinant(n, &flat))
}

/// Resultant of two binary forms whose coefficients are polynomials in a common ring.
pub fn sylvester_resultant_symbolic<C: Coeff>(f: &[SparsePoly<C>], g: &[SparsePoly<C>]) -> Result<SparsePoly<C>> {
    let nvars = f.first().or(g.first()).map(|p| p.nvars()).ok_or_else(|| Error::precondition("empty coefficient list"))?;
    let zero = SparsePoly::zero(nvars);
    let m = sylvester_matrix(f, g, &zero);
    bareiss_determinant(m, nvars)
}

/// Discriminant `Res(f_s, f_t) / d^(d-2)` of a binary form of degree `d >= 2` with scalar coefficients.
pub fn binary_discriminant<C: Coeff>(f: &HomogeneousPolynomial<C>) -> Result<C> {
    let c = binary_coefficients(f)?;
    let d = c.len() - 1;
    if d < 2 {
        return Err(Error::precondition("discriminant needs degree at least 2"));
    }
    let (fs, ft) = partials(&c, |k| C::from_i64(k as i64), |a, b| a * b);
    let res = resultant_of_coefficients(&fs, &ft)?;
    Ok(res / C::from_i64((d as i64).pow(d as u32 - 2)))
}

/// Discriminant of a binary form with polynomial coefficients.
pub fn binary_discriminant_symbolic<C: Coeff>(c: &[SparsePoly<C>]) -> Result<SparsePoly<C>> {
    let d = c.len().saturating_sub(1);
    if d < 2 {
        return Err(Error::precondition("discriminant needs degree at least 2"));
    }
    let (fs, ft) = partials(c, |k| C::from_i64(k as i64), |a: SparsePoly<C>, s: C| a.scale(&s));
    let res = sylvester_resultant_symbolic(&fs, &ft)?;
    let div = C::from_i64((d as i64).pow(d as u32 - 2));
    Ok(res.scale(&(C::one() / div)))
}

fn partials<T: Clone, S>(c: &[T], int: impl Fn(usize) -> S, scale: impl Fn(T, S) -> T) -> (Vec<T>, Vec<T>) {
    let d = c.len() - 1;
    let fs = (0..d).map(|i| scale(c[i].clone(), int(d - i))).collect();
    let ft = (1..=d).map(|i| scale(c[i].clone(), int(i))).collect();
    (fs, ft)
}

/// Fraction-free (Bareiss) determinant over a polynomial ring.
pub fn bareiss_determinant<C: Coeff>(mut m: Vec<Vec<SparsePoly<C>>>, nvars: usize) -> Result<SparsePoly<C>> {
    let n = m.len();
    if n == 0 {
        return Ok(SparsePoly::constant(nvars, C::one()));
    }
    if m.iter().any(|row| row.len() != n) {
        return Err(Error::schema("determinant of a non-square matrix"));
    }
    let mut negate = false;
    let mut prev = SparsePoly::constant(nvars, C::one());
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    negate = !negate;
                }
                None => return Ok(SparsePoly::zero(nvars)),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[i][j].mul(&m[k][k]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = num.exact_div(&prev)?;
            }
            m[i][k] = SparsePoly::zero(nvars);
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    Ok(if negate { det.neg() } else { det })
}

/// Signed maximal minors `(-1)^j det(A with column j removed)` of a `k x (k+1)` matrix.
pub fn maximal_minors<C: Coeff>(a: &[Vec<SparsePoly<C>>], nvars: usize) -> Result<Vec<SparsePoly<C>>> {
    let k = a.len();
    if k == 0 || a.iter().any(|row| row.len() != k + 1) {
        return Err(Error::schema("maximal minors need a k x (k+1) matrix"));
    }
    (0..=k)
        .map(|j| {
            let sub: Vec<Vec<SparsePoly<C>>> = a
                .iter()
                .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, p)| p.clone()).collect())
                .collect();
            let det = bareiss_determinant(sub, nvars)?;
            Ok(if j % 2 == 1 { det.neg() } else { det })
        })
        .collect()
}

/// Signed maximal minors of a scalar `k x (k+1)` matrix.
pub fn maximal_minors_scalar<C: Coeff>(a: &[Vec<C>]) -> Result<Vec<C>> {
    let k = a.len();
    if k == 0 || a.iter().any(|row| row.len() != k + 1) {
        return Err(Error::schema("maximal minors need a k x (k+1) matrix"));
    }
    Ok((0..=k)
        .map(|j| {
            let flat: Vec<C> = a
                .iter()
                .flat_map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, p)| p.clone()))
                .collect();
            let det = determinant(k, &flat);
            if j % 2 == 1 {
                -det
            } else {
                det
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{exact, Exact};

    fn binary(coeffs: &[i64]) -> HomogeneousPolynomial<Exact> {
        let p = coeffs.len() as u32 - 1;
        HomogeneousPolynomial::new(
            VariableShape::vector(2).unwrap(),
            p,
            coeffs.iter().enumerate().map(|(i, &c)| (vec![p - i as u32, i as u32], exact(c, 0))),
        )
        .unwrap()
    }

    #[test]
    fn resultants_of_coordinate_forms() {
        let x = binary(&[1, 0]);
        let y = binary(&[0, 1]);
        assert_eq!(sylvester_resultant(&x, &y).unwrap(), exact(1, 0));
        let x2 = binary(&[1, 0, 0]);
        let y2 = binary(&[0, 0, 1]);
        assert_eq!(sylvester_resultant(&x2, &y2).unwrap(), exact(1, 0));
        assert_eq!(sylvester_resultant(&x, &x).unwrap(), exact(0, 0));
    }

    #[test]
    fn resultant_of_linear_forms_is_determinant() {
        let f = binary(&[3, -2]);
        let g = binary(&[5, 7]);
        assert_eq!(sylvester_resultant(&f, &g).unwrap(), exact(3 * 7 - (-2) * 5, 0));
    }

    #[test]
    fn resultant_vanishes_on_common_root() {
        // (s - t)(s + 2t) and (s - t)(3s - t) share the root s = t.
        let f = binary(&[1, 1, -2]);
        let g = binary(&[3, -4, 1]);
        assert_eq!(sylvester_resultant(&f, &g).unwrap(), exact(0, 0));
    }

    #[test]
    fn quadratic_discriminant() {
        // s^2 - 3st + 2t^2 = (s - t)(s - 2t): Res(f_s, f_t) = 4 a c - b^2 = 8 - 9.
        let f = binary(&[1, -3, 2]);
        assert_eq!(binary_discriminant(&f).unwrap(), exact(-1, 0));
        let square = binary(&[1, 2, 1]);
        assert_eq!(binary_discriminant(&square).unwrap(), exact(0, 0));
        assert!(binary_discriminant(&binary(&[1, 1])).is_err());
    }

    #[test]
    fn scalar_minors() {
        let e = |v: i64| exact(v, 0);
        let m = vec![vec![e(1), e(0), e(0)], vec![e(0), e(1), e(0)]];
        assert_eq!(maximal_minors_scalar(&m).unwrap(), vec![e(0), e(0), e(1)]);
        let m = vec![vec![e(1), e(0), e(0)], vec![e(0), e(0), e(1)]];
        assert_eq!(maximal_minors_scalar(&m).unwrap(), vec![e(0), e(-1), e(0)]);
    }

    #[test]
    fn symbolic_determinant_of_generic_matrix() {
        // det of the generic 3x3 matrix has 6 terms with coefficients +-1.
        let nv = 9;
        let m: Vec<Vec<SparsePoly<Exact>>> =
            (0..3).map(|i| (0..3).map(|j| SparsePoly::variable(nv, 3 * i + j)).collect()).collect();
        let det = bareiss_determinant(m, nv).unwrap();
        assert_eq!(det.terms().len(), 6);
        assert!(det.terms().values().all(|c| *c == exact(1, 0) || *c == exact(-1, 0)));
        let mut id = vec![0u32; nv];
        id[0] = 1;
        id[4] = 1;
        id[8] = 1;
        assert_eq!(det.terms()[&id], exact(1, 0));
    }
}
