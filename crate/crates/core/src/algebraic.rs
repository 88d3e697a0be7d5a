//! Exact destabilizer checks for binary forms at algebraic points.
//!
//! A destabilizing torus of a pair of binary forms is usually aligned with an irrational root,
//! so no rational conjugator reaches it. Arithmetic happens instead in `Q(i)[t]/(h)` for a
//! squarefree `h`; when a zero test is ambiguous (a coefficient vanishes at some roots of `h` but
//! not all), `h` is split by a gcd and both factors are followed separately. No factorization
//! over `Q` is needed.

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::group::OnePsg;
use crate::poly::{ExactPolynomial, VariableShape};
use crate::scalar::{Coeff, Exact};

/// Univariate polynomial over `Q(i)`, ascending powers, no trailing zeros.
pub type UniPoly = Vec<Exact>;

pub(crate) fn trim(mut p: UniPoly) -> UniPoly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

pub(crate) fn degree_of(p: &[Exact]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

/// Quotient and remainder of `a` by a nonzero `b`.
pub fn div_rem(a: &[Exact], b: &[Exact]) -> (UniPoly, UniPoly) {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    let lead = b.last().expect("nonzero divisor").clone();
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![Exact::zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let f = r.last().unwrap().clone() / lead.clone();
        let shift = r.len() - b.len();
        for (i, c) in b.iter().enumerate() {
            r[shift + i] = r[shift + i].clone() - f.clone() * c.clone();
        }
        q[shift] = f;
        // The leading term cancels exactly; drop it even if trailing terms are also zero.
        r.pop();
        r = trim(r);
    }
    (trim(q), r)
}

pub fn rem(a: &[Exact], b: &[Exact]) -> UniPoly {
    div_rem(a, b).1
}

pub fn mul(a: &[Exact], b: &[Exact]) -> UniPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Exact::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    trim(out)
}

fn monic(p: UniPoly) -> UniPoly {
    let p = trim(p);
    match p.last().cloned() {
        Some(lead) => p.into_iter().map(|c| c / lead.clone()).collect(),
        None => p,
    }
}

/// Monic gcd; the gcd of two zero polynomials is zero.
pub fn gcd(a: &[Exact], b: &[Exact]) -> UniPoly {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = rem(&a, &b);
        a = b;
        b = r;
    }
    monic(a)
}

fn derivative(p: &[Exact]) -> UniPoly {
    trim(p.iter().enumerate().skip(1).map(|(k, c)| c.clone() * Exact::from_i64(k as i64)).collect())
}

/// `p / gcd(p, p')`, monic.
pub fn squarefree_part(p: &[Exact]) -> UniPoly {
    let p = trim(p.to_vec());
    if degree_of(&p).unwrap_or(0) == 0 {
        return monic(p);
    }
    let g = gcd(&p, &derivative(&p));
    monic(div_rem(&p, &g).0)
}

/// `f(t, 1)` for a binary form `f`, ascending powers of `t`.
pub fn dehomogenize(f: &ExactPolynomial) -> Result<UniPoly> {
    if f.shape() != (VariableShape::Vector { cols: 2 }) {
        return Err(Error::precondition("expected a binary form"));
    }
    let d = f.degree();
    Ok(trim((0..=d).map(|k| f.coefficient(&[k, d - k])).collect()))
}

/// Numerical roots by Aberth-Ehrlich iteration.
pub fn numeric_roots(p: &[Exact]) -> Vec<Complex64> {
    let c: Vec<Complex64> = monic(p.to_vec()).iter().map(|c| c.to_c64()).collect();
    let Some(n) = degree_of(p) else { return Vec::new() };
    if n == 0 {
        return Vec::new();
    }
    let eval = |z: Complex64| {
        let (mut f, mut df) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for a in c.iter().rev() {
            df = df * z + f;
            f = f * z + a;
        }
        (f, df)
    };
    // Start on a circle of Cauchy-bound radius, off the real axis.
    let radius = 1.0 + c[..n].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> =
        (0..n).map(|k| Complex64::from_polar(radius, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64)).collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let (f, df) = eval(z[k]);
            if f.norm() == 0.0 {
                continue;
            }
            let ratio = f / df;
            let repulse: Complex64 = (0..n).filter(|&j| j != k).map(|j| Complex64::new(1.0, 0.0) / (z[k] - z[j])).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulse);
            z[k] -= step;
            moved = moved.max(step.norm() / (1.0 + z[k].norm()));
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Coefficients of `f(x + t y, y)` in `Q(i)[t]`, indexed by the power of `y`.
///
/// This is `σ·f` for `σ = [[1, 0], [t, 1]]`, which moves `[t : 1]` to `[0 : 1]`.
fn shifted_coefficients(f: &ExactPolynomial) -> Vec<UniPoly> {
    let d = f.degree() as usize;
    let mut binom = vec![vec![0i64; d + 1]; d + 1];
    for a in 0..=d {
        binom[a][0] = 1;
        for b in 1..=a {
            binom[a][b] = binom[a - 1][b - 1] + if b < a { binom[a - 1][b] } else { 0 };
        }
    }
    let mut out: Vec<UniPoly> = vec![Vec::new(); d + 1];
    for i in 0..=d {
        // c_i x^(d-i) y^i -> c_i sum_k C(d-i, k) t^k x^(d-i-k) y^(i+k)
        let c = f.coefficient(&[(d - i) as u32, i as u32]);
        if c.is_zero() {
            continue;
        }
        for k in 0..=d - i {
            let mut term = vec![Exact::zero(); k + 1];
            term[k] = c.clone() * Exact::from_i64(binom[d - i][k]);
            let slot = &mut out[i + k];
            if slot.len() < term.len() {
                slot.resize(term.len(), Exact::zero());
            }
            for (s, x) in slot.iter_mut().zip(term) {
                *s = s.clone() + x;
            }
        }
    }
    out.into_iter().map(trim).collect()
}

/// An exactly verified destabilizer at every root of `modulus`.
#[derive(Clone, Debug)]
pub struct AlgebraicWitness {
    /// Monic squarefree polynomial whose roots `α` give the conjugators `[[1, 0], [α, 1]]`.
    pub modulus: UniPoly,
    pub lambda: Vec<i64>,
    pub weight_v: i64,
    pub weight_w: i64,
}

/// Splits `h` until the support of every form is the same at all of its roots.
fn consistent_components(h: UniPoly, forms: &[Vec<UniPoly>]) -> Vec<(UniPoly, Vec<Vec<usize>>)> {
    let mut work = vec![h];
    let mut done = Vec::new();
    'next: while let Some(h) = work.pop() {
        let mut supports = Vec::new();
        for coeffs in forms {
            let mut supp = Vec::new();
            for (j, c) in coeffs.iter().enumerate() {
                let r = rem(c, &h);
                if r.is_empty() {
                    continue;
                }
                let g = gcd(&r, &h);
                if degree_of(&g).unwrap_or(0) > 0 {
                    let other = monic(div_rem(&h, &g).0);
                    work.push(g);
                    work.push(other);
                    continue 'next;
                }
                supp.push(j);
            }
            supports.push(supp);
        }
        done.push((h, supports));
    }
    done
}

/// All components of the finite roots of `w` at which `(v, w)` is destabilized in the conjugate torus.
pub fn destabilizers_at_roots(v: &ExactPolynomial, w: &ExactPolynomial) -> Result<Vec<AlgebraicWitness>> {
    let h = squarefree_part(&dehomogenize(w)?);
    dehomogenize(v)?;
    if degree_of(&h).unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    let (dv, dw) = (v.degree() as i64, w.degree() as i64);
    let forms = [shifted_coefficients(v), shifted_coefficients(w)];
    let mut out = Vec::new();
    for (h, supports) in consistent_components(h, &forms) {
        if supports.iter().any(|s| s.is_empty()) {
            continue;
        }
        for lambda in [vec![1i64, -1], vec![-1, 1]] {
            let psg = OnePsg::new(lambda.clone())?;
            // Monomial x^(d-j) y^j has character (d - j, j).
            let weight = |supp: &[usize], d: i64| {
                supp.iter().map(|&j| (d - j as i64) * psg.exponents()[0] + j as i64 * psg.exponents()[1]).min().unwrap()
            };
            let (a, b) = (weight(&supports[0], dv), weight(&supports[1], dw));
            if b > a {
                out.push(AlgebraicWitness { modulus: h.clone(), lambda, weight_v: a, weight_w: b });
            }
        }
    }
    Ok(out)
}

/// The component whose nearest root is closest to `point`, with that root.
pub fn nearest_witness(found: &[AlgebraicWitness], point: Complex64) -> Option<(&AlgebraicWitness, Complex64, f64)> {
    let mut best: Option<(&AlgebraicWitness, Complex64, f64)> = None;
    for w in found {
        for r in numeric_roots(&w.modulus) {
            let dist = (r - point).norm() / (1.0 + r.norm());
            if best.as_ref().is_none_or(|b| dist < b.2) {
                best = Some((w, r, dist));
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::HomogeneousPolynomial;
    use crate::scalar::exact;

    fn binary(c: &[i64]) -> ExactPolynomial {
        let d = c.len() as u32 - 1;
        HomogeneousPolynomial::new(
            VariableShape::vector(2).unwrap(),
            d,
            c.iter().enumerate().map(|(i, &x)| (vec![d - i as u32, i as u32], exact(x, 0))),
        )
        .unwrap()
    }

    fn uni(c: &[i64]) -> UniPoly {
        trim(c.iter().map(|&x| exact(x, 0)).collect())
    }

    #[test]
    fn squarefree_and_gcd() {
        // (t - 1)^2 (t + 2) = t^3 - 3t + 2
        assert_eq!(squarefree_part(&uni(&[2, -3, 0, 1])), uni(&[-2, 1, 1]));
        assert_eq!(gcd(&uni(&[2, -3, 0, 1]), &uni(&[-1, 1])), uni(&[-1, 1]));
        let (q, r) = div_rem(&uni(&[2, -3, 0, 1]), &uni(&[-1, 1]));
        assert_eq!(q, uni(&[-2, 1, 1]));
        assert!(r.is_empty());
    }

    #[test]
    fn irrational_root_destabilizes() {
        // w = x^2 - 2 y^2 vanishes at [±√2 : 1]; v = y does not.
        let v = binary(&[0, 1]);
        let w = binary(&[1, 0, -2]);
        let found = destabilizers_at_roots(&v, &w).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].modulus, uni(&[-2, 0, 1]));
        assert_eq!(found[0].lambda, vec![1, -1]);
        let (_, r, dist) = nearest_witness(&found, Complex64::new(1.41, 0.0)).unwrap();
        assert!((r.re - 2f64.sqrt()).abs() < 1e-12 && dist < 1e-2);
    }

    #[test]
    fn roots_of_symmetric_quartic() {
        // t^4 + 3/4: four roots of modulus (3/4)^(1/4) on the diagonals.
        let p = vec![Exact::new(crate::scalar::rational(3, 4), crate::scalar::rational(0, 1)), exact(0, 0), exact(0, 0), exact(0, 0), exact(1, 0)];
        let roots = numeric_roots(&p);
        assert_eq!(roots.len(), 4);
        for r in roots {
            assert!((r.powu(4) + Complex64::new(0.75, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn common_root_is_split_off() {
        // w = (x - y)(x^2 - 2y^2), v = (x - y) y: only the √2 component destabilizes.
        let w = binary(&[1, -1, -2, 2]);
        let v = binary(&[0, 1, -1]);
        let found = destabilizers_at_roots(&v, &w).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].modulus, uni(&[-2, 0, 1]));
    }
}
