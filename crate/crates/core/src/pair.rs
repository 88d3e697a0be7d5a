//! Pairs of vectors in representations of SL(N+1): torus tests, probes, Kempf-Ness descent, tensored pairs.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::descent::{descend, descend_from, restart_start, DescentOptions, DescentOutcome, Objective};
use crate::error::{Error, Result};
use crate::group::{
    random_sl, right_singular_frame, traceless_hermitian, CMatrix, ExactGroupElement, GroupElement,
    OnePsg,
};
use crate::lattice::{
    contains, minkowski_sum, psg_weight, scale, standard_simplex, weight_polytope, ExactRepVector, FloatRepVector,
    LatticePolytope, RepVector,
};
use crate::poly::VariableShape;
use crate::scalar::{best_rational, primitive_integer, Coeff, Exact};

/// A pair `(v, w)` of nonzero vectors for the same group, kept exactly when possible.
#[derive(Clone, Debug)]
pub struct Pair {
    exact: Option<(ExactRepVector, ExactRepVector)>,
    v: FloatRepVector,
    w: FloatRepVector,
}

impl Pair {
    pub fn exact(v: ExactRepVector, w: ExactRepVector) -> Result<Self> {
        check_components(v.group_size(), w.group_size(), v.is_zero() || w.is_zero())?;
        Ok(Pair { v: v.to_float(), w: w.to_float(), exact: Some((v, w)) })
    }

    pub fn float(v: FloatRepVector, w: FloatRepVector) -> Result<Self> {
        check_components(v.group_size(), w.group_size(), v.is_zero() || w.is_zero())?;
        Ok(Pair { exact: None, v, w })
    }

    pub fn group_size(&self) -> usize {
        self.v.group_size()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn exact_parts(&self) -> Option<&(ExactRepVector, ExactRepVector)> {
        self.exact.as_ref()
    }

    pub fn v(&self) -> &FloatRepVector {
        &self.v
    }

    pub fn w(&self) -> &FloatRepVector {
        &self.w
    }

    /// Weight polytopes of `v` and `w` (exact supports when available).
    pub fn polytopes(&self) -> Result<(LatticePolytope, LatticePolytope)> {
        match &self.exact {
            Some((v, w)) => Ok((weight_polytope(v)?, weight_polytope(w)?)),
            None => Ok((weight_polytope(&self.v)?, weight_polytope(&self.w)?)),
        }
    }

    /// `(psg_weight(lambda, v), psg_weight(lambda, w))`.
    pub fn weights(&self, lambda: &OnePsg) -> Result<(i64, i64)> {
        match &self.exact {
            Some((v, w)) => Ok((psg_weight(lambda, v)?, psg_weight(lambda, w)?)),
            None => Ok((psg_weight(lambda, &self.v)?, psg_weight(lambda, &self.w)?)),
        }
    }

    /// Pair transformed by an exact group element.
    pub fn act_exact(&self, g: &ExactGroupElement) -> Result<Pair> {
        match &self.exact {
            Some((v, w)) => Pair::exact(v.act(g)?, w.act(g)?),
            None => self.act_float(&g.to_cmatrix()),
        }
    }

    /// Pair transformed by a double-precision matrix.
    pub fn act_float(&self, g: &CMatrix) -> Result<Pair> {
        Pair::float(self.v.act_matrix(g)?, self.w.act_matrix(g)?)
    }
}

fn check_components(nv: usize, nw: usize, zero: bool) -> Result<()> {
    if zero {
        return Err(Error::precondition("pair components must be nonzero"));
    }
    if nv != nw {
        return Err(Error::precondition("pair components belong to different groups"));
    }
    Ok(())
}

/// Outcome of an exact torus test.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TorusTest {
    pub semistable: bool,
    /// `lambda` with `psg_weight(lambda, w) > psg_weight(lambda, v)` when the test fails.
    pub witness: Option<Vec<i64>>,
    pub weight_v: Option<i64>,
    pub weight_w: Option<i64>,
}

/// `N(v) ⊆ N(w)` for the standard torus.
pub fn torus_semistable(p: &Pair) -> Result<TorusTest> {
    let (nv, nw) = p.polytopes()?;
    let c = contains(&nv, &nw)?;
    Ok(match c.witness {
        None => TorusTest { semistable: true, witness: None, weight_v: None, weight_w: None },
        Some(lambda) => {
            let (a, b) = p.weights(&lambda)?;
            TorusTest { semistable: false, witness: Some(lambda.exponents().to_vec()), weight_v: Some(a), weight_w: Some(b) }
        }
    })
}

/// Result of a conjugate-torus probe.
#[derive(Clone, Debug, Serialize)]
pub struct ProbeResult {
    pub semistable: bool,
    pub trials: usize,
    /// 1-based index of the first failing trial.
    pub failed_at: Option<usize>,
    pub witness: Option<Vec<i64>>,
    /// Row-major conjugator `g` of the failing trial; the torus is `g^{-1} T g`.
    pub conjugator: Option<Vec<[f64; 2]>>,
    pub seed: u64,
}

/// Largest denominator used when rounding random conjugators to exact rationals.
const CONJUGATOR_DENOMINATOR: i64 = 64;

/// Round a double-precision invertible matrix to an exact element of determinant one.
///
/// Each row is divided by its largest entry, entries are rounded by continued fractions,
/// and the first row is divided by the resulting determinant.
pub fn round_to_exact(m: &CMatrix, max_den: i64) -> Option<ExactGroupElement> {
    let n = m.nrows();
    let mut entries: Vec<Exact> = Vec::with_capacity(n * n);
    for i in 0..n {
        let row: Vec<Complex64> = (0..n).map(|j| m[(i, j)]).collect();
        let big = row.iter().copied().max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())?;
        if big.norm() == 0.0 {
            return None;
        }
        for z in row {
            entries.push(crate::scalar::exact_from_f64(z / big, max_den));
        }
    }
    let det = crate::group::determinant(n, &entries);
    if det.is_zero() {
        return None;
    }
    for j in 0..n {
        entries[j] = entries[j].clone() / det.clone();
    }
    GroupElement::new(n, entries).ok()
}

pub(crate) fn matrix_entries(m: &CMatrix) -> Vec<[f64; 2]> {
    let n = m.nrows();
    (0..n * n).map(|k| [m[(k / n, k % n)].re, m[(k / n, k % n)].im]).collect()
}

/// Torus test for `(g v, g w)` over random conjugators `g`; the first trial uses the standard torus.
pub fn randomized_torus_probe(p: &Pair, trials: usize, seed: u64) -> Result<ProbeResult> {
    if trials == 0 {
        return Err(Error::precondition("at least one trial is required"));
    }
    let n = p.group_size();
    for t in 0..trials {
        let (conj, test) = if t == 0 {
            (CMatrix::identity(n, n), torus_semistable(p)?)
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let g = random_sl(n, &mut rng);
            match (p.is_exact(), round_to_exact(&g, CONJUGATOR_DENOMINATOR)) {
                (true, Some(ge)) => (ge.to_cmatrix(), torus_semistable(&p.act_exact(&ge)?)?),
                _ => (g.clone(), torus_semistable(&p.act_float(&g)?)?),
            }
        };
        if !test.semistable {
            return Ok(ProbeResult {
                semistable: false,
                trials: t + 1,
                failed_at: Some(t + 1),
                witness: test.witness,
                conjugator: Some(matrix_entries(&conj)),
                seed,
            });
        }
    }
    Ok(ProbeResult { semistable: true, trials, failed_at: None, witness: None, conjugator: None, seed })
}

/// `log |σ·u|^2`, evaluated with `σ` rescaled to avoid overflow.
pub fn log_norm_sqr(u: &FloatRepVector, sigma: &CMatrix) -> f64 {
    let n = sigma.nrows() as f64;
    let s = (sigma.iter().map(|c| c.norm_sqr()).sum::<f64>() / n).sqrt();
    let scaled = sigma / Complex64::new(s, 0.0);
    match u.act_matrix(&scaled) {
        Ok(x) => x.norm_sqr().ln() + 2.0 * u.degree() as f64 * s.ln(),
        Err(_) => f64::NAN,
    }
}

/// Gradient of `H -> log |exp(H) σ·u|^2` at `H = 0`.
pub fn log_norm_gradient(u: &FloatRepVector, sigma: &CMatrix) -> CMatrix {
    let n = sigma.nrows() as f64;
    let s = (sigma.iter().map(|c| c.norm_sqr()).sum::<f64>() / n).sqrt();
    let scaled = sigma / Complex64::new(s, 0.0);
    match u.act_matrix(&scaled) {
        Ok(x) => traceless_hermitian(&x.moment_matrix().transpose()),
        Err(_) => CMatrix::from_element(sigma.nrows(), sigma.ncols(), Complex64::new(f64::NAN, 0.0)),
    }
}

/// Gradient of `log tr(σ σ^*)`.
pub fn hs_log_norm_gradient(sigma: &CMatrix) -> CMatrix {
    let g = sigma * sigma.adjoint();
    let tr = g.trace().re;
    traceless_hermitian(&(g * Complex64::new(2.0 / tr, 0.0)))
}

/// `log |σ·w|^2 - log |σ·v|^2`.
pub fn kempf_ness_value(sigma: &CMatrix, p: &Pair) -> f64 {
    log_norm_sqr(&p.w, sigma) - log_norm_sqr(&p.v, sigma)
}

/// Traceless Hermitian gradient of [`kempf_ness_value`] under left perturbation `exp(H) σ`.
pub fn kempf_ness_gradient(sigma: &CMatrix, p: &Pair) -> CMatrix {
    log_norm_gradient(&p.w, sigma) - log_norm_gradient(&p.v, sigma)
}

impl Objective for Pair {
    fn size(&self) -> usize {
        self.group_size()
    }
    fn value(&self, sigma: &CMatrix) -> f64 {
        kempf_ness_value(sigma, self)
    }
    fn gradient(&self, sigma: &CMatrix) -> CMatrix {
        kempf_ness_gradient(sigma, self)
    }
}

/// Verdicts of the numerical stability tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    TorusFail,
    NoDivergenceObserved,
    DivergenceDetected,
}

/// How a destabilizing direction was confirmed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessCheck {
    /// Exact torus test on an exactly conjugated pair.
    Exact,
    /// Support threshold on the double-precision conjugated pair.
    Numerical,
    /// The rounded direction did not pass the weight test.
    Rejected,
}

/// A destabilizing one-parameter subgroup in a conjugate torus.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub lambda: Vec<i64>,
    pub conjugator: Vec<[f64; 2]>,
    pub check: WitnessCheck,
    pub weight_v: Option<i64>,
    pub weight_w: Option<i64>,
    /// Set when the conjugator is `[[1, 0], [α, 1]]` for a root `α` of this polynomial
    /// (ascending `[re, im]` coefficients); the weights then hold at every root and
    /// `conjugator` is a numerical value at one of them.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<[String; 2]>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Diagnostics {
    pub restarts: usize,
    pub iterations: Vec<usize>,
    pub final_grad_norms: Vec<f64>,
    pub final_log_norms: Vec<f64>,
    pub run_ends: Vec<crate::descent::RunEnd>,
}

/// Verdict with evidence. `NoDivergenceObserved` is evidence, not a proof.
#[derive(Clone, Debug, Serialize)]
pub struct StabilityCertificate {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub inf_estimate: Option<f64>,
    pub diagnostics: Option<Diagnostics>,
    pub seed: u64,
    pub note: String,
}

fn diagnostics(out: &DescentOutcome) -> Diagnostics {
    Diagnostics {
        restarts: out.runs.len(),
        iterations: out.runs.iter().map(|r| r.iterations).collect(),
        final_grad_norms: out.runs.iter().map(|r| r.final_grad_norm).collect(),
        final_log_norms: out.runs.iter().map(|r| r.final_log_norm).collect(),
        run_ends: out.runs.iter().map(|r| r.end).collect(),
    }
}

/// Integer direction of the dominant log-singular-value spread of `σ`, in the frame `W^*`.
pub fn rounded_direction(singular: &[f64]) -> Option<Vec<i64>> {
    let logs: Vec<f64> = singular.iter().map(|s| -s.max(1e-300).ln()).collect();
    let mean = logs.iter().sum::<f64>() / logs.len() as f64;
    let centered: Vec<f64> = logs.iter().map(|x| x - mean).collect();
    let spread = centered.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if spread == 0.0 {
        return None;
    }
    let gaps: Vec<BigRational> = centered.iter().map(|x| best_rational((x - centered[0]) / spread, 16)).collect();
    let total: BigRational = gaps.iter().cloned().sum();
    let len = BigRational::from_integer(BigInt::from(gaps.len()));
    let shifted: Vec<BigRational> = gaps.iter().map(|g| g - &total / &len).collect();
    let ints = primitive_integer(&shifted);
    let out: Vec<i64> = ints.iter().map(|v| v.to_i64()).collect::<Option<_>>()?;
    if out.iter().all(|&a| a == 0) {
        return None;
    }
    Some(out)
}

/// Extract and check a destabilizing direction from a divergent descent iterate.
pub fn extract_destabilizer(p: &Pair, sigma: &CMatrix) -> Option<Witness> {
    let (s, w_star) = right_singular_frame(sigma);
    let lambda = rounded_direction(&s)?;
    let psg = OnePsg::new(lambda.clone()).ok()?;
    if p.is_exact() {
        for den in [16, 64, 256, 1024] {
            let Some(g) = round_to_exact(&w_star, den) else { continue };
            let Ok(conj) = p.act_exact(&g) else { continue };
            if let Ok((a, b)) = conj.weights(&psg) {
                if b > a {
                    return Some(Witness {
                        lambda,
                        conjugator: matrix_entries(&g.to_cmatrix()),
                        check: WitnessCheck::Exact,
                        weight_v: Some(a),
                        weight_w: Some(b),
                        modulus: None,
                    });
                }
            }
            if let Ok(t) = torus_semistable(&conj) {
                if let Some(l) = t.witness {
                    return Some(Witness {
                        lambda: l,
                        conjugator: matrix_entries(&g.to_cmatrix()),
                        check: WitnessCheck::Exact,
                        weight_v: t.weight_v,
                        weight_w: t.weight_w,
                        modulus: None,
                    });
                }
            }
        }
    }
    let conj = p.act_float(&w_star).ok()?;
    let (a, b) = conj.weights(&psg).ok()?;
    Some(Witness {
        lambda,
        conjugator: matrix_entries(&w_star),
        check: if b > a { WitnessCheck::Numerical } else { WitnessCheck::Rejected },
        weight_v: Some(a),
        weight_w: Some(b),
        modulus: None,
    })
}

pub(crate) fn certificate_from_descent(out: DescentOutcome, seed: u64, extract: impl Fn(&CMatrix) -> Option<Witness>) -> StabilityCertificate {
    let diag = diagnostics(&out);
    match out.divergent_run() {
        Some(run) => {
            let witness = extract(&run.sigma);
            let note = match witness.as_ref().map(|w| w.check) {
                Some(WitnessCheck::Exact) => "destabilizing direction verified exactly in a conjugate torus",
                Some(WitnessCheck::Numerical) => "destabilizing direction verified on numerical supports",
                _ => "value unbounded below along the trajectory; rounded direction not verified",
            };
            StabilityCertificate {
                verdict: Verdict::DivergenceDetected,
                witness,
                inf_estimate: Some(out.inf_estimate),
                diagnostics: Some(diag),
                seed,
                note: note.into(),
            }
        }
        None => StabilityCertificate {
            verdict: Verdict::NoDivergenceObserved,
            witness: None,
            inf_estimate: Some(out.inf_estimate),
            diagnostics: Some(diag),
            seed,
            note: "no divergence observed; this is numerical evidence, not a proof of semistability".into(),
        },
    }
}

/// Multi-start Kempf-Ness descent with destabilizer extraction on divergence.
pub fn descend_pair(p: &Pair, opts: &DescentOptions) -> StabilityCertificate {
    let out = descend(p, opts);
    certificate_from_descent(out, opts.seed, |s| extract_destabilizer(p, s))
}

/// Log-norm past which a stalled, non-stationary run is tested for a witness.
///
/// Near `log|σ|^2 ≈ 37` the singular values of a generic `σ` span the whole double range, so
/// rounding stalls the line search before the divergence rule can fire. Witnesses are verified
/// exactly, so testing these iterates cannot produce a false destabilizer.
pub const EXTRACTION_LOG_NORM: f64 = 20.0;

fn worth_extracting(run: &crate::descent::DescentRun) -> bool {
    use crate::descent::{RunEnd, STATIONARY_GRADIENT};
    match run.end {
        RunEnd::Diverged => true,
        RunEnd::StepCollapse => run.final_log_norm > EXTRACTION_LOG_NORM && run.final_grad_norm > STATIONARY_GRADIENT,
        _ => false,
    }
}

/// Result of [`find_destabilizer`].
#[derive(Clone, Debug, Serialize)]
pub struct DestabilizerSearch {
    pub found: bool,
    /// 1-based trial at which an exactly verified witness appeared.
    pub trial: Option<usize>,
    pub witness: Option<Witness>,
}

/// Search conjugate tori for an exactly verified destabilizer.
///
/// Trial 1 is the standard torus; trial `k >= 2` runs one descent (from the identity for `k = 2`,
/// otherwise from a seeded random element) and tests the torus read off its divergent iterate,
/// or off a run that stalled far out (see [`EXTRACTION_LOG_NORM`]). For binary forms the flag of
/// that iterate may instead be matched to an irrational root of `w` and verified over its field.
pub fn find_destabilizer(p: &Pair, trials: usize, opts: &DescentOptions) -> Result<DestabilizerSearch> {
    let n = p.group_size();
    let t = torus_semistable(p)?;
    if let Some(lambda) = t.witness {
        let id = matrix_entries(&CMatrix::identity(n, n));
        return Ok(DestabilizerSearch {
            found: true,
            trial: Some(1),
            witness: Some(Witness { lambda, conjugator: id, check: WitnessCheck::Exact, weight_v: t.weight_v, weight_w: t.weight_w, modulus: None }),
        });
    }
    let mut at_roots = None;
    for k in 2..=trials {
        let run = descend_from(p, restart_start(n, opts.seed, k - 2), k - 2, opts);
        if !worth_extracting(&run) {
            continue;
        }
        if let Some(w) = extract_destabilizer(p, &run.sigma) {
            if w.check == WitnessCheck::Exact {
                return Ok(DestabilizerSearch { found: true, trial: Some(k), witness: Some(w) });
            }
        }
        if let Some(w) = algebraic_destabilizer(p, &run.sigma, &mut at_roots)? {
            return Ok(DestabilizerSearch { found: true, trial: Some(k), witness: Some(w) });
        }
    }
    Ok(DestabilizerSearch { found: false, trial: None, witness: None })
}

/// Relative distance within which a descent flag selects a root of `w`.
const ROOT_MATCH: f64 = 1e-3;

/// For binary forms: match the flag of a far-out iterate to a root of `w` and verify exactly there.
///
/// The flags of `σ` are the points spanned by the rows of its right singular frame. The roots
/// are computed once per search and cached in `cache`.
fn algebraic_destabilizer(
    p: &Pair,
    sigma: &CMatrix,
    cache: &mut Option<Vec<crate::algebraic::AlgebraicWitness>>,
) -> Result<Option<Witness>> {
    let Some((RepVector::Polynomial(v), RepVector::Polynomial(w))) = p.exact_parts() else { return Ok(None) };
    if v.shape() != (VariableShape::Vector { cols: 2 }) || w.shape() != v.shape() {
        return Ok(None);
    }
    if cache.is_none() {
        *cache = Some(crate::algebraic::destabilizers_at_roots(v, w)?);
    }
    let found = cache.as_ref().unwrap();
    let (_, frame) = right_singular_frame(sigma);
    for row in 0..2 {
        let (a, b) = (frame[(row, 0)], frame[(row, 1)]);
        if b.norm() < 1e-12 * a.norm() {
            continue;
        }
        let Some((wit, root, dist)) = crate::algebraic::nearest_witness(found, a / b) else { continue };
        if dist > ROOT_MATCH {
            continue;
        }
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let conj = CMatrix::from_row_slice(2, 2, &[one, zero, root, one]);
        let modulus = wit
            .modulus
            .iter()
            .map(|c| [crate::scalar::format_rational(&c.re), crate::scalar::format_rational(&c.im)])
            .collect();
        return Ok(Some(Witness {
            lambda: wit.lambda.clone(),
            conjugator: matrix_entries(&conj),
            check: WitnessCheck::Exact,
            weight_v: Some(wit.weight_v),
            weight_w: Some(wit.weight_w),
            modulus: Some(modulus),
        }));
    }
    Ok(None)
}

/// The pair `(I^q ⊗ v^m, w^(m+1))`, kept implicit through additive log-norms and Minkowski sums.
#[derive(Clone, Debug)]
pub struct TensoredPair {
    pub base: Pair,
    pub m: u32,
    pub q: u32,
}

/// Tensored pair with `q` the representation degree of `v`.
pub fn build_stable_test_pair(p: &Pair, m: u32) -> Result<TensoredPair> {
    if m == 0 {
        return Err(Error::precondition("m must be at least 1"));
    }
    Ok(TensoredPair { base: p.clone(), m, q: p.v.degree() })
}

impl TensoredPair {
    pub fn with_q(p: &Pair, m: u32, q: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::precondition("m must be at least 1"));
        }
        Ok(TensoredPair { base: p.clone(), m, q })
    }

    /// `(q Q_N + m N(v), (m+1) N(w))`; a zero `q` drops the simplex factor.
    pub fn polytopes(&self) -> Result<(LatticePolytope, LatticePolytope)> {
        self.polytopes_of(&self.base)
    }

    fn polytopes_of(&self, p: &Pair) -> Result<(LatticePolytope, LatticePolytope)> {
        let (nv, nw) = p.polytopes()?;
        let mut left = scale(&nv, self.m)?;
        if self.q > 0 {
            left = minkowski_sum(&scale(&standard_simplex(p.group_size()), self.q)?, &left)?;
        }
        Ok((left, scale(&nw, self.m + 1)?))
    }

    pub fn torus_test_of(&self, p: &Pair) -> Result<TorusTest> {
        let (left, right) = self.polytopes_of(p)?;
        let c = contains(&left, &right)?;
        Ok(match c.witness {
            None => TorusTest { semistable: true, witness: None, weight_v: None, weight_w: None },
            Some(lambda) => TorusTest {
                semistable: false,
                weight_v: Some(left.min_pairing(&lambda)),
                weight_w: Some(right.min_pairing(&lambda)),
                witness: Some(lambda.exponents().to_vec()),
            },
        })
    }

    pub fn torus_test(&self) -> Result<TorusTest> {
        self.torus_test_of(&self.base)
    }

    /// `(m+1) log|σw|^2 - q log|σ|^2_HS - m log|σv|^2`.
    pub fn value(&self, sigma: &CMatrix) -> f64 {
        let hs = crate::descent::log_hs_norm_sqr(sigma);
        (self.m + 1) as f64 * log_norm_sqr(&self.base.w, sigma)
            - self.q as f64 * hs
            - self.m as f64 * log_norm_sqr(&self.base.v, sigma)
    }
}

impl Objective for TensoredPair {
    fn size(&self) -> usize {
        self.base.group_size()
    }
    fn value(&self, sigma: &CMatrix) -> f64 {
        TensoredPair::value(self, sigma)
    }
    fn gradient(&self, sigma: &CMatrix) -> CMatrix {
        let gw = log_norm_gradient(&self.base.w, sigma);
        let gv = log_norm_gradient(&self.base.v, sigma);
        let gi = hs_log_norm_gradient(sigma);
        gw * Complex64::new((self.m + 1) as f64, 0.0)
            - gi * Complex64::new(self.q as f64, 0.0)
            - gv * Complex64::new(self.m as f64, 0.0)
    }
}

/// Torus probe and descent on the tensored pair.
pub fn stable_probe(p: &Pair, m: u32, trials: usize, opts: &DescentOptions) -> Result<StabilityCertificate> {
    let tp = build_stable_test_pair(p, m)?;
    let n = p.group_size();
    for t in 0..trials.max(1) {
        let (conj, test) = if t == 0 {
            (CMatrix::identity(n, n), tp.torus_test()?)
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(t as u64);
            let g = random_sl(n, &mut rng);
            match (p.is_exact(), round_to_exact(&g, CONJUGATOR_DENOMINATOR)) {
                (true, Some(ge)) => (ge.to_cmatrix(), tp.torus_test_of(&p.act_exact(&ge)?)?),
                _ => (g.clone(), tp.torus_test_of(&p.act_float(&g)?)?),
            }
        };
        if let Some(lambda) = test.witness {
            return Ok(StabilityCertificate {
                verdict: Verdict::TorusFail,
                witness: Some(Witness {
                    lambda,
                    conjugator: matrix_entries(&conj),
                    check: WitnessCheck::Exact,
                    weight_v: test.weight_v,
                    weight_w: test.weight_w,
                    modulus: None,
                }),
                inf_estimate: None,
                diagnostics: None,
                seed: opts.seed,
                note: format!("torus test failed at trial {}", t + 1),
            });
        }
    }
    let out = descend(&tp, opts);
    Ok(certificate_from_descent(out, opts.seed, |s| {
        let (sv, w_star) = right_singular_frame(s);
        let lambda = rounded_direction(&sv)?;
        let conj = p.act_float(&w_star).ok()?;
        let test = tp.torus_test_of(&conj).ok()?;
        Some(Witness {
            lambda: test.witness.clone().unwrap_or(lambda),
            conjugator: matrix_entries(&w_star),
            check: if test.semistable { WitnessCheck::Rejected } else { WitnessCheck::Numerical },
            weight_v: test.weight_v,
            weight_w: test.weight_w,
            modulus: None,
        })
    }))
}

/// Exact check that a witness destabilizes: `psg_weight(lambda, w) > psg_weight(lambda, v)`.
pub fn witness_destabilizes<C: Coeff>(lambda: &OnePsg, v: &crate::lattice::RepVector<C>, w: &crate::lattice::RepVector<C>) -> Result<bool> {
    Ok(psg_weight(lambda, w)? > psg_weight(lambda, v)?)
}
