mod common;

use proptest::prelude::*;

use common::*;
use stabpairs::elim::{binary_discriminant, maximal_minors_scalar, sylvester_resultant};
use stabpairs::group::{determinant, ExactGroupElement};
use stabpairs::poly::{ExactPolynomial, HomogeneousPolynomial, VariableShape};
use stabpairs::scalar::{exact, Exact};

/// Product of elementary unipotents: an exact element of SL(n) with small integer entries.
fn unipotent_word(n: usize, word: &[(usize, usize, i64)]) -> ExactGroupElement {
    let mut g = ExactGroupElement::identity(n);
    for &(i, j, a) in word {
        let (i, j) = (i % n, j % n);
        if i == j {
            continue;
        }
        let mut e: Vec<Exact> = ExactGroupElement::identity(n).entries().to_vec();
        e[i * n + j] = exact(a, 0);
        g = g.mul(&ExactGroupElement::new(n, e).unwrap()).unwrap();
    }
    g
}

/// `prod_i (s - a_i t)`.
fn from_roots(roots: &[i64]) -> ExactPolynomial {
    let mut p = binary(&[1]);
    for &a in roots {
        p = p.mul(&binary(&[1, -a])).unwrap();
    }
    p
}

fn word() -> impl Strategy<Value = Vec<(usize, usize, i64)>> {
    prop::collection::vec((0usize..3, 0usize..3, -2i64..=2), 0..5)
}

fn poly_strategy(cols: usize, degree: u32) -> impl Strategy<Value = ExactPolynomial> {
    let n = stabpairs::poly::monomials(cols, degree).len();
    prop::collection::vec(-3i64..=3, n).prop_map(move |c| {
        let terms = stabpairs::poly::monomials(cols, degree).into_iter().zip(c).map(|(e, c)| (e, exact(c, 0)));
        HomogeneousPolynomial::new(VariableShape::vector(cols).unwrap(), degree, terms).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn substitution_composes_as_left_action(p in poly_strategy(3, 3), a in word(), b in word()) {
        let (s, t) = (unipotent_word(3, &a), unipotent_word(3, &b));
        let lhs = p.act(&s).unwrap().act(&t).unwrap();
        let rhs = p.act(&t.mul(&s).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn action_is_multiplicative(p in poly_strategy(3, 2), q in poly_strategy(3, 2), a in word()) {
        let s = unipotent_word(3, &a);
        let lhs = p.mul(&q).unwrap().act(&s).unwrap();
        let rhs = p.act(&s).unwrap().mul(&q.act(&s).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn resultant_is_product_of_root_differences(f in prop::collection::vec(-4i64..=4, 1..4), g in prop::collection::vec(-4i64..=4, 1..4)) {
        let mut expected = exact(1, 0);
        for a in &f {
            for b in &g {
                expected = expected * exact(a - b, 0);
            }
        }
        prop_assert_eq!(sylvester_resultant(&from_roots(&f), &from_roots(&g)).unwrap(), expected);
    }

    #[test]
    fn resultant_is_invariant(f in poly_strategy(2, 2), g in poly_strategy(2, 3), a in word()) {
        let s = unipotent_word(2, &a);
        let r0 = sylvester_resultant(&f, &g).unwrap();
        let r1 = sylvester_resultant(&f.act(&s).unwrap(), &g.act(&s).unwrap()).unwrap();
        prop_assert_eq!(r0, r1);
    }

    #[test]
    fn discriminant_matches_roots(roots in prop::collection::vec(-4i64..=4, 2..5)) {
        let d = roots.len();
        let mut prod = exact(1, 0);
        for i in 0..d {
            for j in i + 1..d {
                prod = prod * exact((roots[i] - roots[j]).pow(2), 0);
            }
        }
        let sign = if (d * (d - 1) / 2) % 2 == 1 { exact(-1, 0) } else { exact(1, 0) };
        prop_assert_eq!(binary_discriminant(&from_roots(&roots)).unwrap(), sign * prod);
    }

    #[test]
    fn minors_satisfy_cauchy_binet(a in prop::collection::vec(-3i64..=3, 6), b in prop::collection::vec(-3i64..=3, 6)) {
        let rows = |v: &[i64]| -> Vec<Vec<Exact>> { v.chunks(3).map(|r| r.iter().map(|&x| exact(x, 0)).collect()).collect() };
        let (ma, mb) = (rows(&a), rows(&b));
        let (pa, pb) = (maximal_minors_scalar(&ma).unwrap(), maximal_minors_scalar(&mb).unwrap());
        let lhs = pa.iter().zip(&pb).fold(exact(0, 0), |acc, (x, y)| acc + x.clone() * y.clone());
        // det(A B^T) for 2 x 3 matrices
        let mut m = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                m.push((0..3).fold(exact(0, 0), |acc, k| acc + ma[i][k].clone() * mb[j][k].clone()));
            }
        }
        prop_assert_eq!(lhs, determinant(2, &m));
    }
}

#[test]
fn minors_are_signed_complements() {
    // Rows (1,0,0), (0,1,0): the minor dropping column j, with sign (-1)^j.
    let m = vec![vec![exact(1, 0), exact(0, 0), exact(0, 0)], vec![exact(0, 0), exact(1, 0), exact(0, 0)]];
    assert_eq!(maximal_minors_scalar(&m).unwrap(), vec![exact(0, 0), exact(0, 0), exact(1, 0)]);
}

#[test]
fn act_rejects_wrong_size() {
    let p = poly(3, 1, &[(&[1, 0, 0], 1)]);
    assert!(p.act(&ExactGroupElement::identity(2)).is_err());
}

#[test]
fn shear_moves_root_to_origin() {
    // (x^2 - 2 y^2)(x + y, y) = x^2 + 2xy - y^2
    let p = binary(&[1, 0, -2]);
    let s = ExactGroupElement::new(2, vec![exact(1, 0), exact(0, 0), exact(1, 0), exact(1, 0)]).unwrap();
    assert_eq!(p.act(&s).unwrap(), binary(&[1, 2, -1]));
}
