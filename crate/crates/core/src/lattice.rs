//! Torus characters, weight polytopes, exact containment with separating one-parameter subgroups.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{CMatrix, OnePsg};
use crate::lp::{convex_membership, dot, Membership};
use crate::poly::HomogeneousPolynomial;
use crate::scalar::{primitive_integer, Coeff, Exact};

/// Integer character of the diagonal torus, stored unprojected.
pub type Character = Vec<i64>;

/// Character with the mean removed, so characters of different total degree compare.
pub fn project(ch: &[i64]) -> Vec<BigRational> {
    let n = ch.len() as i64;
    let total: i64 = ch.iter().sum();
    ch.iter().map(|&a| BigRational::new(BigInt::from(a * n - total), BigInt::from(n))).collect()
}

/// Convex hull of a finite set of torus characters.
#[derive(Debug)]
pub struct LatticePolytope {
    points: Vec<Character>,
    vertices: OnceLock<Vec<usize>>,
}

impl Clone for LatticePolytope {
    fn clone(&self) -> Self {
        let p = LatticePolytope { points: self.points.clone(), vertices: OnceLock::new() };
        if let Some(v) = self.vertices.get() {
            let _ = p.vertices.set(v.clone());
        }
        p
    }
}

impl PartialEq for LatticePolytope {
    /// Equality of convex hulls in projected coordinates.
    fn eq(&self, other: &Self) -> bool {
        let a: BTreeSet<Vec<BigRational>> = self.vertex_points().iter().map(|v| project(v)).collect();
        let b: BTreeSet<Vec<BigRational>> = other.vertex_points().iter().map(|v| project(v)).collect();
        a == b
    }
}

impl LatticePolytope {
    pub fn new(points: impl IntoIterator<Item = Character>) -> Result<Self> {
        let set: BTreeSet<Character> = points.into_iter().collect();
        let mut it = set.iter();
        let first = it.next().ok_or_else(|| Error::precondition("empty point set"))?;
        if first.len() < 2 || set.iter().any(|p| p.len() != first.len()) {
            return Err(Error::schema("characters must share a dimension of at least 2"));
        }
        Ok(LatticePolytope { points: set.into_iter().collect(), vertices: OnceLock::new() })
    }

    /// Number of torus coordinates `N + 1`.
    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn points(&self) -> &[Character] {
        &self.points
    }

    /// Indices of the extreme points (distinct projected points not in the hull of the others).
    pub fn vertex_indices(&self) -> &[usize] {
        self.vertices.get_or_init(|| {
            let mut seen: BTreeMap<Vec<BigRational>, usize> = BTreeMap::new();
            for (i, p) in self.points.iter().enumerate() {
                seen.entry(project(p)).or_insert(i);
            }
            let proj: Vec<(Vec<BigRational>, usize)> = seen.into_iter().collect();
            let mut out = Vec::new();
            for (k, (p, idx)) in proj.iter().enumerate() {
                let others: Vec<Vec<BigRational>> =
                    proj.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, (q, _))| q.clone()).collect();
                if others.is_empty() || matches!(convex_membership(&others, p), Membership::Outside { .. }) {
                    out.push(*idx);
                }
            }
            out.sort_unstable();
            out
        })
    }

    pub fn vertex_points(&self) -> Vec<Character> {
        self.vertex_indices().iter().map(|&i| self.points[i].clone()).collect()
    }

    pub fn contains_point(&self, p: &[i64]) -> bool {
        let verts: Vec<Vec<BigRational>> = self.vertex_points().iter().map(|v| project(v)).collect();
        matches!(convex_membership(&verts, &project(p)), Membership::Inside { .. })
    }

    /// Minimum of `<a, lambda>` over the polytope.
    pub fn min_pairing(&self, lambda: &OnePsg) -> i64 {
        self.vertex_points()
            .iter()
            .map(|v| v.iter().zip(lambda.exponents()).map(|(a, b)| a * b).sum::<i64>())
            .min()
            .unwrap_or(0)
    }
}

/// Result of a containment query, with a separating one-parameter subgroup on failure.
#[derive(Clone, Debug, PartialEq)]
pub struct Containment {
    pub contained: bool,
    /// Primitive `lambda` with `min_inner <lambda, .> < min_outer <lambda, .>`.
    pub witness: Option<OnePsg>,
    /// First vertex of the inner polytope found outside the outer one.
    pub escaping_vertex: Option<Character>,
}

/// Exact test of `inner ⊆ outer` in projected coordinates.
pub fn contains(inner: &LatticePolytope, outer: &LatticePolytope) -> Result<Containment> {
    if inner.dim() != outer.dim() {
        return Err(Error::precondition("polytopes live in different character lattices"));
    }
    let outer_verts: Vec<Vec<BigRational>> = outer.vertex_points().iter().map(|v| project(v)).collect();
    for v in inner.vertex_points() {
        let target = project(&v);
        if let Membership::Outside { functional } = convex_membership(&outer_verts, &target) {
            let lambda = witness_from_functional(&functional)?;
            debug_assert!({
                let f: Vec<BigRational> = lambda.exponents().iter().map(|&a| BigRational::from_integer(a.into())).collect();
                outer_verts.iter().all(|q| dot(&f, &target) < dot(&f, q))
            });
            return Ok(Containment { contained: false, witness: Some(lambda), escaping_vertex: Some(v) });
        }
    }
    Ok(Containment { contained: true, witness: None, escaping_vertex: None })
}

/// Turn a separating functional into a primitive integer vector with zero sum.
fn witness_from_functional(f: &[BigRational]) -> Result<OnePsg> {
    let n = f.len();
    let mean: BigRational = f.iter().cloned().sum::<BigRational>() / BigRational::from_integer(BigInt::from(n));
    let centered: Vec<BigRational> = f.iter().map(|x| x - &mean).collect();
    let ints = primitive_integer(&centered);
    let exps: Vec<i64> = ints
        .iter()
        .map(|v| v.to_i64().ok_or_else(|| Error::non_convergence("separating vector does not fit in 64 bits")))
        .collect::<Result<_>>()?;
    OnePsg::new(exps)
}

/// Minkowski sum of two polytopes.
pub fn minkowski_sum(a: &LatticePolytope, b: &LatticePolytope) -> Result<LatticePolytope> {
    if a.dim() != b.dim() {
        return Err(Error::precondition("polytopes live in different character lattices"));
    }
    let mut pts = Vec::new();
    for p in a.vertex_points() {
        for q in b.vertex_points() {
            pts.push(p.iter().zip(&q).map(|(x, y)| x + y).collect());
        }
    }
    LatticePolytope::new(pts)
}

/// Dilation `k P` for a positive integer `k`.
pub fn scale(p: &LatticePolytope, k: u32) -> Result<LatticePolytope> {
    if k == 0 {
        return Err(Error::precondition("dilation factor must be positive"));
    }
    LatticePolytope::new(p.vertex_points().into_iter().map(|v| v.iter().map(|x| x * k as i64).collect()))
}

/// Hull of the standard basis characters: the weights of the identity under left multiplication.
pub fn standard_simplex(n: usize) -> LatticePolytope {
    LatticePolytope::new((0..n).map(|i| {
        let mut e = vec![0i64; n];
        e[i] = 1;
        e
    }))
    .expect("n >= 2")
}

/// Kind of a tensor factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SlotKind {
    /// Standard representation `C^{N+1}`.
    Vector,
    /// Second exterior power, basis `e_i ∧ e_j` with `i < j`.
    Wedge2,
    /// Matrices under left multiplication, basis `E_rc` of character `e_r`.
    Operator,
}

impl SlotKind {
    pub fn dim(&self, n: usize) -> usize {
        match self {
            SlotKind::Vector => n,
            SlotKind::Wedge2 => n * (n - 1) / 2,
            SlotKind::Operator => n * n,
        }
    }

    /// Homogeneity degree in the group element.
    pub fn degree(&self) -> u32 {
        match self {
            SlotKind::Vector | SlotKind::Operator => 1,
            SlotKind::Wedge2 => 2,
        }
    }

    pub fn character(&self, n: usize, idx: usize) -> Character {
        let mut ch = vec![0i64; n];
        match self {
            SlotKind::Vector => ch[idx] = 1,
            SlotKind::Wedge2 => {
                let (i, j) = wedge_pair(n, idx);
                ch[i] += 1;
                ch[j] += 1;
            }
            SlotKind::Operator => ch[idx / n] = 1,
        }
        ch
    }
}

/// The pair `(i, j)`, `i < j`, of the wedge basis vector with the given lexicographic index.
pub fn wedge_pair(n: usize, idx: usize) -> (usize, usize) {
    let mut k = idx;
    for i in 0..n {
        let row = n - 1 - i;
        if k < row {
            return (i, i + 1 + k);
        }
        k -= row;
    }
    panic!("wedge index out of range")
}

/// Lexicographic index of `e_i ∧ e_j` for `i < j`.
pub fn wedge_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// A vector in a tensor product of standard, exterior-square and left-regular factors.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorVector<C> {
    n: usize,
    slots: Vec<SlotKind>,
    coords: BTreeMap<Vec<usize>, C>,
}

impl<C: Coeff> TensorVector<C> {
    pub fn new(n: usize, slots: Vec<SlotKind>, coords: impl IntoIterator<Item = (Vec<usize>, C)>) -> Result<Self> {
        if n < 2 {
            return Err(Error::precondition("tensors need N >= 1"));
        }
        if slots.is_empty() {
            return Err(Error::schema("a tensor needs at least one factor"));
        }
        let mut map = BTreeMap::new();
        for (idx, c) in coords {
            if idx.len() != slots.len() {
                return Err(Error::schema("tensor index has the wrong number of factors"));
            }
            if idx.iter().zip(&slots).any(|(i, s)| *i >= s.dim(n)) {
                return Err(Error::schema("tensor index out of range"));
            }
            if c.is_zero() {
                continue;
            }
            let entry = map.entry(idx).or_insert_with(C::zero);
            *entry = entry.clone() + c;
        }
        map.retain(|_, c: &mut C| !c.is_zero());
        Ok(TensorVector { n, slots, coords: map })
    }

    pub fn group_size(&self) -> usize {
        self.n
    }

    pub fn slots(&self) -> &[SlotKind] {
        &self.slots
    }

    pub fn coords(&self) -> &BTreeMap<Vec<usize>, C> {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.slots.iter().map(|s| s.degree()).sum()
    }

    pub fn character(&self, idx: &[usize]) -> Character {
        let mut ch = vec![0i64; self.n];
        for (s, &i) in self.slots.iter().zip(idx) {
            for (a, b) in ch.iter_mut().zip(s.character(self.n, i)) {
                *a += b;
            }
        }
        ch
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::precondition("tensor factors for different groups"));
        }
        let mut slots = self.slots.clone();
        slots.extend(other.slots.iter().copied());
        let mut coords = BTreeMap::new();
        for (a, ca) in &self.coords {
            for (b, cb) in &other.coords {
                let mut idx = a.clone();
                idx.extend(b.iter().copied());
                coords.insert(idx, ca.clone() * cb.clone());
            }
        }
        Ok(TensorVector { n: self.n, slots, coords })
    }

    /// Hermitian squared norm in the orthonormal product basis.
    pub fn norm_sqr(&self) -> C {
        self.coords.values().fold(C::zero(), |acc, c| acc + c.abs_sqr())
    }

    /// Apply a group element factor by factor.
    pub fn act(&self, sigma: &[C]) -> Result<Self> {
        let n = self.n;
        if sigma.len() != n * n {
            return Err(Error::precondition("group element has the wrong size"));
        }
        let entry = |i: usize, j: usize| sigma[i * n + j].clone();
        let mut current = self.coords.clone();
        for (pos, kind) in self.slots.iter().enumerate() {
            let mut next: BTreeMap<Vec<usize>, C> = BTreeMap::new();
            for (idx, c) in &current {
                let k = idx[pos];
                let images: Vec<(usize, C)> = match kind {
                    SlotKind::Vector => (0..n).map(|i| (i, entry(i, k))).collect(),
                    SlotKind::Operator => {
                        let (r, col) = (k / n, k % n);
                        (0..n).map(|i| (i * n + col, entry(i, r))).collect()
                    }
                    SlotKind::Wedge2 => {
                        let (a, b) = wedge_pair(n, k);
                        let mut v = Vec::new();
                        for i in 0..n {
                            for j in i + 1..n {
                                let minor = entry(i, a) * entry(j, b) - entry(j, a) * entry(i, b);
                                v.push((wedge_index(n, i, j), minor));
                            }
                        }
                        v
                    }
                };
                for (i, coef) in images {
                    if coef.is_zero() {
                        continue;
                    }
                    let mut nidx = idx.clone();
                    nidx[pos] = i;
                    let e = next.entry(nidx).or_insert_with(C::zero);
                    *e = e.clone() + c.clone() * coef;
                }
            }
            next.retain(|_, c| !c.is_zero());
            current = next;
        }
        Ok(TensorVector { n, slots: self.slots.clone(), coords: current })
    }

    /// Infinitesimal action of the elementary matrix `E_ij`.
    pub fn lie_action(&self, i: usize, j: usize) -> Self {
        let n = self.n;
        let mut out: BTreeMap<Vec<usize>, C> = BTreeMap::new();
        let mut push = |idx: Vec<usize>, c: C| {
            let e = out.entry(idx).or_insert_with(C::zero);
            *e = e.clone() + c;
        };
        for (idx, c) in &self.coords {
            for (pos, kind) in self.slots.iter().enumerate() {
                let k = idx[pos];
                match kind {
                    SlotKind::Vector => {
                        if k == j {
                            let mut nidx = idx.clone();
                            nidx[pos] = i;
                            push(nidx, c.clone());
                        }
                    }
                    SlotKind::Operator => {
                        if k / n == j {
                            let mut nidx = idx.clone();
                            nidx[pos] = i * n + k % n;
                            push(nidx, c.clone());
                        }
                    }
                    SlotKind::Wedge2 => {
                        let (a, b) = wedge_pair(n, k);
                        for (moved, other, first) in [(a, b, true), (b, a, false)] {
                            if moved != j || i == other {
                                continue;
                            }
                            // Replace e_moved by e_i, keeping the factor order, then sort.
                            let (x, y) = if first { (i, other) } else { (other, i) };
                            let (lo, hi, sign) = if x < y { (x, y, 1) } else { (y, x, -1) };
                            let mut nidx = idx.clone();
                            nidx[pos] = wedge_index(n, lo, hi);
                            push(nidx, if sign > 0 { c.clone() } else { -c.clone() });
                        }
                    }
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        TensorVector { n, slots: self.slots.clone(), coords: out }
    }

    pub fn to_float(&self) -> TensorVector<Complex64> {
        TensorVector {
            n: self.n,
            slots: self.slots.clone(),
            coords: self.coords.iter().map(|(k, c)| (k.clone(), c.to_c64())).collect(),
        }
    }

    /// Hermitian inner product `<self, other>`, linear in the first argument.
    pub fn inner(&self, other: &Self) -> C {
        let mut acc = C::zero();
        for (k, c) in &self.coords {
            if let Some(d) = other.coords.get(k) {
                acc = acc + c.clone() * d.conj();
            }
        }
        acc
    }
}

/// An element of a representation of SL(N+1): a homogeneous polynomial or a tensor.
#[derive(Clone, Debug, PartialEq)]
pub enum RepVector<C> {
    Polynomial(HomogeneousPolynomial<C>),
    Tensor(TensorVector<C>),
}

pub type ExactRepVector = RepVector<Exact>;
pub type FloatRepVector = RepVector<Complex64>;

/// Magnitude below which a double-precision coordinate counts as zero in support computations.
pub const FLOAT_SUPPORT_TOLERANCE: f64 = 1e-12;

impl<C: Coeff> RepVector<C> {
    pub fn group_size(&self) -> usize {
        match self {
            RepVector::Polynomial(p) => p.shape().cols(),
            RepVector::Tensor(t) => t.group_size(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            RepVector::Polynomial(p) => p.is_zero(),
            RepVector::Tensor(t) => t.is_zero(),
        }
    }

    /// Homogeneity degree in the group element, the representation degree.
    pub fn degree(&self) -> u32 {
        match self {
            RepVector::Polynomial(p) => p.degree(),
            RepVector::Tensor(t) => t.degree(),
        }
    }

    /// Characters of the nonzero coordinates.
    ///
    /// Exact coordinates are tested for zero exactly; double-precision coordinates are zero when
    /// their share of the squared norm is below [`FLOAT_SUPPORT_TOLERANCE`] squared.
    pub fn support(&self) -> BTreeSet<Character> {
        let keep = |c: &C, total: f64| {
            if C::EXACT {
                !c.is_zero()
            } else {
                c.to_c64().norm_sqr() > total * FLOAT_SUPPORT_TOLERANCE * FLOAT_SUPPORT_TOLERANCE
            }
        };
        match self {
            RepVector::Polynomial(p) => {
                let total: f64 = p.terms().values().map(|c| c.to_c64().norm_sqr()).sum();
                p.terms().iter().filter(|(_, c)| keep(c, total)).map(|(e, _)| p.column_degrees(e)).collect()
            }
            RepVector::Tensor(t) => {
                let total: f64 = t.coords().values().map(|c| c.to_c64().norm_sqr()).sum();
                t.coords().iter().filter(|(_, c)| keep(c, total)).map(|(k, _)| t.character(k)).collect()
            }
        }
    }

    pub fn act(&self, sigma: &crate::group::GroupElement<C>) -> Result<Self> {
        match self {
            RepVector::Polynomial(p) => Ok(RepVector::Polynomial(p.act(sigma)?)),
            RepVector::Tensor(t) => Ok(RepVector::Tensor(t.act(sigma.entries())?)),
        }
    }

    pub fn to_float(&self) -> FloatRepVector {
        match self {
            RepVector::Polynomial(p) => RepVector::Polynomial(p.to_float()),
            RepVector::Tensor(t) => RepVector::Tensor(t.to_float()),
        }
    }
}

impl FloatRepVector {
    /// Squared norm: FS-L2 for polynomials, Hermitian for tensors.
    pub fn norm_sqr(&self) -> f64 {
        match self {
            RepVector::Polynomial(p) => p.l2_norm_sqr(),
            RepVector::Tensor(t) => t.norm_sqr().re,
        }
    }

    /// Apply a double-precision matrix (no determinant check).
    pub fn act_matrix(&self, sigma: &CMatrix) -> Result<Self> {
        let g = crate::group::FloatGroupElement::from_cmatrix_unchecked(sigma);
        self.act(&g)
    }

    /// Matrix `M_ij = 2 <E_ij . u, u> / |u|^2` of the infinitesimal action.
    pub fn moment_matrix(&self) -> CMatrix {
        let n = self.group_size();
        let norm = self.norm_sqr();
        let mut m = CMatrix::zeros(n, n);
        match self {
            RepVector::Polynomial(p) => {
                let shape = p.shape();
                let nv = shape.num_vars();
                let cols = shape.cols();
                for (e, c) in p.terms() {
                    for r in 0..shape.rows() {
                        for j in 0..cols {
                            let a = e[shape.index(r, j)];
                            if a == 0 {
                                continue;
                            }
                            for i in 0..cols {
                                let mut b = e.clone();
                                b[shape.index(r, j)] -= 1;
                                b[shape.index(r, i)] += 1;
                                if let Some(u) = p.terms().get(&b) {
                                    let w = crate::poly::monomial_weight(&b, nv);
                                    m[(i, j)] += *c * a as f64 * u.conj() * w;
                                }
                            }
                        }
                    }
                }
            }
            RepVector::Tensor(t) => {
                for i in 0..n {
                    for j in 0..n {
                        m[(i, j)] = t.lie_action(i, j).inner(t);
                    }
                }
            }
        }
        m * Complex64::new(2.0 / norm, 0.0)
    }
}

/// Characters of the nonzero coordinates of `e`.
pub fn support<C: Coeff>(e: &RepVector<C>) -> Result<BTreeSet<Character>> {
    if e.is_zero() {
        return Err(Error::precondition("the zero vector has no support"));
    }
    Ok(e.support())
}

/// Weight polytope: convex hull of the support.
pub fn weight_polytope<C: Coeff>(e: &RepVector<C>) -> Result<LatticePolytope> {
    LatticePolytope::new(support(e)?)
}

/// Weight of `e` along `lambda`: the minimum of `<a, lambda>` over the support.
pub fn psg_weight<C: Coeff>(lambda: &OnePsg, e: &RepVector<C>) -> Result<i64> {
    if lambda.size() != e.group_size() {
        return Err(Error::precondition("one-parameter subgroup has the wrong size"));
    }
    let supp = support(e)?;
    Ok(supp
        .iter()
        .map(|a| a.iter().zip(lambda.exponents()).map(|(x, y)| x * y).sum::<i64>())
        .min()
        .expect("nonempty support"))
}

/// Degree of the representation containing `e`; equals the total degree of every character.
pub fn rep_degree<C: Coeff>(e: &RepVector<C>) -> u32 {
    e.degree()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::exact;

    #[test]
    fn wedge_indexing_round_trip() {
        for n in 2..6 {
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    assert_eq!(wedge_index(n, i, j), k);
                    assert_eq!(wedge_pair(n, k), (i, j));
                    k += 1;
                }
            }
        }
    }

    #[test]
    fn point_against_dilated_point_gives_witness() {
        let inner = LatticePolytope::new(vec![vec![1, 0]]).unwrap();
        let outer = LatticePolytope::new(vec![vec![2, 0]]).unwrap();
        let c = contains(&inner, &outer).unwrap();
        assert!(!c.contained);
        assert_eq!(c.witness.unwrap().exponents(), &[1, -1]);
    }

    #[test]
    fn vertices_skip_interior_points() {
        let p = LatticePolytope::new(vec![vec![2, 0, 0], vec![0, 2, 0], vec![0, 0, 2], vec![1, 1, 0]]).unwrap();
        assert_eq!(p.vertex_points(), vec![vec![0, 0, 2], vec![0, 2, 0], vec![2, 0, 0]]);
    }

    #[test]
    fn standard_simplex_is_identity_support() {
        let n = 3;
        let id: Vec<Exact> = (0..n * n).map(|k| if k / n == k % n { exact(1, 0) } else { exact(0, 0) }).collect();
        let t = TensorVector::new(n, vec![SlotKind::Operator], id.into_iter().enumerate().map(|(k, c)| (vec![k], c)))
            .unwrap();
        let p = weight_polytope(&RepVector::Tensor(t)).unwrap();
        assert_eq!(p, standard_simplex(n));
    }

    #[test]
    fn wedge_action_matches_minors() {
        // (sigma e_0) ∧ (sigma e_1) for sigma = [[1,2],[0,1]] is e_0 ∧ e_1.
        let t = TensorVector::new(2, vec![SlotKind::Wedge2], vec![(vec![0], exact(1, 0))]).unwrap();
        let sigma = [exact(1, 0), exact(2, 0), exact(0, 0), exact(1, 0)];
        assert_eq!(t.act(&sigma).unwrap(), t);
    }
}
