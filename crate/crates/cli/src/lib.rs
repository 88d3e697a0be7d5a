//! Command-line front end for `stabpairs`: each subcommand reads JSON arguments, calls one
//! library operation and writes a `v1` envelope to standard output.

mod input;
pub mod render;
pub mod verify;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use stabpairs::descent::DescentOptions;
use stabpairs::elim::{binary_discriminant, maximal_minors_scalar, sylvester_resultant};
use stabpairs::energy::{
    asymptotic_report, aubin_f0_algebraic, coercivity_value, k_energy_algebraic, log_tan_dist_p, orbit_distance,
    DistanceTarget, OrbitOptions,
};
use stabpairs::group::{FloatGroupElement, OnePsg};
use stabpairs::json::{cmatrix_to_json, envelope, exact_to_json, polynomial_to_json, polytope_to_json};
use stabpairs::lattice::{contains, minkowski_sum, psg_weight, rep_degree, scale, weight_polytope};
use stabpairs::norms::{arestov_check, conformal_theta, fs_pointwise, jensen_check, lp_norm, sup_norm, SupNormOptions};
use stabpairs::oracle::{curve_geometry_oracle, OracleOptions};
use stabpairs::pair::{
    build_stable_test_pair, descend_pair, find_destabilizer, kempf_ness_gradient, kempf_ness_value, randomized_torus_probe,
    stable_probe, torus_semistable, Pair,
};
use stabpairs::variety::{
    build_x_pair, chow_form_curve, chow_form_hypersurface, hurwitz_form_curve, HypersurfaceVariety, Variety, XPair,
    XPairOptions,
};
use stabpairs::{Error, Result};

/// Subcommand name and the library operations it reaches.
pub const COMMAND_TABLE: &[(&str, &[&str])] = &[
    ("eval", &["evaluate"]),
    ("act", &["act"]),
    ("resultant", &["sylvester_resultant"]),
    ("discriminant", &["binary_discriminant"]),
    ("minors", &["maximal_minors"]),
    ("polytope", &["support", "weight_polytope"]),
    ("weight", &["psg_weight"]),
    ("contains", &["contains"]),
    ("minkowski", &["minkowski_sum", "scale"]),
    ("rep-degree", &["rep_degree"]),
    ("pair-check", &["torus_semistable"]),
    ("probe", &["randomized_torus_probe"]),
    ("kn-value", &["kempf_ness_value"]),
    ("kn-gradient", &["kempf_ness_gradient"]),
    ("descend", &["descend"]),
    ("destabilize", &["find_destabilizer"]),
    ("stable-pair", &["build_stable_test_pair"]),
    ("stable-check", &["stable_probe"]),
    ("chow", &["chow_form_curve"]),
    ("hurwitz", &["hurwitz_form_curve"]),
    ("chow-hyp", &["chow_form_hypersurface"]),
    ("xpair", &["build_x_pair"]),
    ("fs-point", &["fs_pointwise"]),
    ("mahler", &["lp_norm"]),
    ("supnorm", &["sup_norm"]),
    ("arestov", &["arestov_check"]),
    ("jensen", &["jensen_check"]),
    ("theta", &["conformal_theta"]),
    ("log-tan", &["log_tan_dist_p"]),
    ("distance", &["orbit_distance"]),
    ("kenergy", &["k_energy_algebraic"]),
    ("aubin", &["aubin_f0_algebraic"]),
    ("coercivity", &["coercivity_value"]),
    ("oracle", &["curve_geometry_oracle"]),
    ("asymptotic", &["asymptotic_report"]),
    ("verify", &["run_suites"]),
];

#[derive(Parser, Debug)]
#[command(name = "stabpairs", version, about = "Stability of pairs, Chow/Hurwitz forms and Mahler-measure energies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub run: RunConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

/// Flags shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Monte Carlo samples; each command has its own default.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// `exact` keeps rational arithmetic where the command supports both.
    #[arg(long, global = true, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    /// Write JSON here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<std::path::PathBuf>,
    /// Render aligned text instead of JSON.
    #[arg(long, global = true)]
    pub text: bool,
    /// Progress notes on standard error.
    #[arg(short, long, global = true)]
    pub verbose: bool,
}

impl RunConfig {
    fn samples_or(&self, default: usize) -> usize {
        self.samples.unwrap_or(default)
    }
}

/// A polynomial or tensor, as `--poly FILE` or a positional file.
#[derive(Args, Debug, Clone)]
pub struct PolyArg {
    #[arg(long)]
    pub poly: Option<String>,
    #[arg(value_name = "FILE")]
    pub file: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct PairArg {
    #[arg(long)]
    pub pair: Option<String>,
    #[arg(value_name = "FILE")]
    pub file: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct CurveArg {
    #[arg(long)]
    pub curve: Option<String>,
    #[arg(value_name = "FILE")]
    pub file: Option<String>,
}

/// A curve (`--curve`) or a hypersurface equation (`--poly`).
#[derive(Args, Debug, Clone)]
pub struct VarietyArg {
    #[arg(long, conflicts_with = "poly")]
    pub curve: Option<String>,
    #[arg(long)]
    pub poly: Option<String>,
}

/// A pair, a curve or a hypersurface equation.
#[derive(Args, Debug, Clone)]
pub struct TargetArg {
    #[arg(long, conflicts_with_all = ["curve", "poly"])]
    pub pair: Option<String>,
    #[arg(long, conflicts_with = "poly")]
    pub curve: Option<String>,
    #[arg(long)]
    pub poly: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a polynomial at a point (flat row-major for matrix shapes).
    Eval {
        #[command(flatten)]
        poly: PolyArg,
        #[arg(long)]
        point: String,
    },
    /// Substitute `z -> zσ`.
    Act {
        #[command(flatten)]
        poly: PolyArg,
        #[arg(long)]
        sigma: String,
    },
    /// Resultant of two binary forms (`--poly f --poly g`).
    Resultant {
        #[arg(long, required = true, num_args = 1)]
        poly: Vec<String>,
    },
    /// Discriminant of a binary form.
    Discriminant {
        #[command(flatten)]
        poly: PolyArg,
    },
    /// Signed maximal minors of a `k x (k+1)` matrix.
    Minors {
        #[arg(long)]
        matrix: String,
    },
    /// Support and weight polytope of a polynomial or tensor.
    Polytope {
        #[command(flatten)]
        poly: PolyArg,
    },
    /// Weight of a vector along a one-parameter subgroup.
    Weight {
        #[command(flatten)]
        poly: PolyArg,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
    },
    /// Whether the first weight polytope lies in the second (`--poly inner --poly outer`).
    Contains {
        #[arg(long, required = true, num_args = 1)]
        poly: Vec<String>,
    },
    /// Minkowski sum of two weight polytopes, or a dilation with `--k`.
    Minkowski {
        #[arg(long, required = true, num_args = 1)]
        poly: Vec<String>,
        #[arg(long)]
        k: Option<u32>,
    },
    /// Degree of a representation vector.
    RepDegree {
        #[command(flatten)]
        poly: PolyArg,
    },
    /// Exact semistability test in the diagonal torus.
    PairCheck {
        #[command(flatten)]
        pair: PairArg,
    },
    /// Torus tests in randomly conjugated tori.
    Probe {
        #[command(flatten)]
        pair: PairArg,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// `log |σw|^2 - log |σv|^2`.
    KnValue {
        #[command(flatten)]
        pair: PairArg,
        #[arg(long)]
        sigma: Option<String>,
    },
    /// Gradient of the Kempf-Ness function at σ.
    KnGradient {
        #[command(flatten)]
        pair: PairArg,
        #[arg(long)]
        sigma: Option<String>,
    },
    /// Gradient descent of the Kempf-Ness function.
    Descend {
        #[command(flatten)]
        pair: PairArg,
        #[arg(long, default_value_t = 4)]
        restarts: usize,
        #[arg(long)]
        max_iters: Option<usize>,
    },
    /// Search for a verified destabilizing one-parameter subgroup.
    Destabilize {
        #[command(flatten)]
        pair: PairArg,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        restarts: usize,
    },
    /// The tensored pair used for stability, with its weight polytopes.
    StablePair {
        #[command(flatten)]
        pair: PairArg,
        #[arg(long, default_value_t = 1)]
        m: u32,
    },
    /// Torus probe and descent on the tensored pair.
    StableCheck {
        #[command(flatten)]
        pair: PairArg,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 2)]
        restarts: usize,
    },
    /// Chow form of a rational curve.
    Chow {
        #[command(flatten)]
        curve: CurveArg,
    },
    /// Hurwitz form of a rational curve.
    Hurwitz {
        #[command(flatten)]
        curve: CurveArg,
    },
    /// Chow form of a hypersurface given by its equation.
    ChowHyp {
        #[command(flatten)]
        poly: PolyArg,
    },
    /// Chow/Hurwitz pair of a variety (`--mode float` skips symbolic expansion).
    Xpair {
        #[command(flatten)]
        variety: VarietyArg,
    },
    /// `|P(z)|^2 / |z|^(2d)`.
    FsPoint {
        #[command(flatten)]
        poly: PolyArg,
        #[arg(long)]
        point: String,
    },
    /// `log |P|_p`; `p = 0` is the Mahler measure.
    Mahler {
        #[command(flatten)]
        poly: PolyArg,
        #[arg(long = "p", default_value_t = 0.0, allow_negative_numbers = true)]
        p: f64,
    },
    /// Lower bound for `log sup |P|`.
    Supnorm {
        #[command(flatten)]
        poly: PolyArg,
    },
    /// Sandwich between the Mahler measure and the sup norm.
    Arestov {
        #[command(flatten)]
        poly: PolyArg,
    },
    /// `log |P|_0 <= log |P|_p`.
    Jensen {
        #[command(flatten)]
        poly: PolyArg,
        #[arg(long = "p", default_value_t = 2.0, allow_negative_numbers = true)]
        p: f64,
    },
    /// `2 log |S|_0 - 2 log |S|_2`.
    Theta {
        #[command(flatten)]
        poly: PolyArg,
    },
    /// `log tan^2 dist_p(σ)` for a pair or a variety.
    LogTan {
        #[command(flatten)]
        target: TargetArg,
        #[arg(long)]
        sigma: Option<String>,
        #[arg(long = "p", default_value_t = 0.0, allow_negative_numbers = true)]
        p: f64,
    },
    /// Infimum of `log tan^2 dist_p` over the group by descent.
    Distance {
        #[command(flatten)]
        target: TargetArg,
        #[arg(long = "p", default_value_t = 0.0, allow_negative_numbers = true)]
        p: f64,
        #[arg(long, default_value_t = 2)]
        restarts: usize,
    },
    /// K-energy at σ from the Chow and Hurwitz Mahler measures.
    Kenergy {
        #[command(flatten)]
        variety: VarietyArg,
        #[arg(long)]
        sigma: Option<String>,
    },
    /// Normalized Chow Mahler measure at σ.
    Aubin {
        #[command(flatten)]
        variety: VarietyArg,
        #[arg(long)]
        sigma: Option<String>,
    },
    /// Coercivity functional at σ.
    Coercivity {
        #[command(flatten)]
        variety: VarietyArg,
        #[arg(long)]
        sigma: Option<String>,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long, default_value_t = 1)]
        k: u32,
    },
    /// Quadrature oracle for a curve at σ.
    Oracle {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long)]
        sigma: Option<String>,
    },
    /// Observational table over embedding powers `--k 1,2,..` of a rational normal curve.
    Asymptotic {
        #[arg(long, default_value = "1,2")]
        k: String,
        /// Base degree of the rational normal curve.
        #[arg(long, default_value_t = 2)]
        degree: u32,
        #[arg(long, default_value_t = 2)]
        restarts: usize,
    },
    /// Run named check suites (norms, weights, forms, energy, pairs); all by default.
    Verify {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(verify::SUITES))]
        suites: Vec<String>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        use Command::*;
        match self {
            Eval { .. } => "eval",
            Act { .. } => "act",
            Resultant { .. } => "resultant",
            Discriminant { .. } => "discriminant",
            Minors { .. } => "minors",
            Polytope { .. } => "polytope",
            Weight { .. } => "weight",
            Contains { .. } => "contains",
            Minkowski { .. } => "minkowski",
            RepDegree { .. } => "rep-degree",
            PairCheck { .. } => "pair-check",
            Probe { .. } => "probe",
            KnValue { .. } => "kn-value",
            KnGradient { .. } => "kn-gradient",
            Descend { .. } => "descend",
            Destabilize { .. } => "destabilize",
            StablePair { .. } => "stable-pair",
            StableCheck { .. } => "stable-check",
            Chow { .. } => "chow",
            Hurwitz { .. } => "hurwitz",
            ChowHyp { .. } => "chow-hyp",
            Xpair { .. } => "xpair",
            FsPoint { .. } => "fs-point",
            Mahler { .. } => "mahler",
            Supnorm { .. } => "supnorm",
            Arestov { .. } => "arestov",
            Jensen { .. } => "jensen",
            Theta { .. } => "theta",
            LogTan { .. } => "log-tan",
            Distance { .. } => "distance",
            Kenergy { .. } => "kenergy",
            Aubin { .. } => "aubin",
            Coercivity { .. } => "coercivity",
            Oracle { .. } => "oracle",
            Asymptotic { .. } => "asymptotic",
            Verify { .. } => "verify",
        }
    }
}

fn to_json<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("result types serialize")
}

fn exactly<'a>(v: &'a [String], n: usize, what: &str) -> Result<&'a [String]> {
    if v.len() != n {
        return Err(Error::schema(format!("{what} needs exactly {n} --poly arguments, got {}", v.len())));
    }
    Ok(v)
}

fn descent_options(cfg: &RunConfig, restarts: usize, max_iters: Option<usize>) -> DescentOptions {
    let mut o = DescentOptions { restarts, seed: cfg.seed, ..Default::default() };
    if let Some(m) = max_iters {
        o.max_iters = m;
    }
    o
}

fn x_pair_options(cfg: &RunConfig) -> XPairOptions {
    XPairOptions { symbolic: cfg.mode == Mode::Exact, samples: cfg.samples_or(200_000), seed: cfg.seed }
}

fn variety(curve: &Option<String>, poly: &Option<String>) -> Result<Variety> {
    match (curve, poly) {
        (Some(c), None) => Ok(Variety::Curve(input::curve(c)?)),
        (None, Some(p)) => Ok(Variety::Hypersurface(HypersurfaceVariety::new(input::poly(p)?)?)),
        _ => Err(Error::schema("give a variety as --curve or as a hypersurface equation --poly")),
    }
}

fn x_pair_json(xp: &XPair) -> Value {
    json!({
        "dim": xp.dim,
        "ambient": xp.ambient,
        "degree": xp.degree,
        "deg_chow": xp.deg_chow,
        "deg_hurwitz": xp.deg_hurwitz,
        "exponents": xp.exponents(),
        "chow": xp.chow.as_ref().map(polynomial_to_json),
        "hurwitz": xp.hurwitz.as_ref().map(polynomial_to_json),
    })
}

enum Target {
    Pair(Pair),
    X(XPair),
}

impl Target {
    fn load(t: &TargetArg, cfg: &RunConfig) -> Result<Self> {
        match &t.pair {
            Some(p) => Ok(Target::Pair(input::pair(p)?)),
            None => Ok(Target::X(build_x_pair(&variety(&t.curve, &t.poly)?, &x_pair_options(cfg))?)),
        }
    }

    fn as_distance(&self) -> DistanceTarget<'_> {
        match self {
            Target::Pair(p) => DistanceTarget::Pair(p),
            Target::X(x) => DistanceTarget::X(x),
        }
    }

    fn group_size(&self) -> usize {
        match self {
            Target::Pair(p) => p.group_size(),
            Target::X(x) => x.group_size(),
        }
    }
}

/// Result JSON and whether every hard check passed.
pub fn execute(cmd: &Command, cfg: &RunConfig) -> Result<(Value, bool)> {
    use Command::*;
    let v = match cmd {
        Eval { poly, point } => {
            let p = input::poly(input::pick(&poly.poly, &poly.file, "--poly")?)?;
            match cfg.mode {
                Mode::Exact => json!({"value": exact_to_json(&p.evaluate(&input::exact_point(point)?)?)}),
                Mode::Float => {
                    let z = p.to_float().evaluate(&input::float_point(point)?)?;
                    json!({"value": [z.re, z.im]})
                }
            }
        }
        Act { poly, sigma } => {
            let p = input::poly(input::pick(&poly.poly, &poly.file, "--poly")?)?;
            match cfg.mode {
                Mode::Exact => polynomial_to_json(&p.act(&input::exact_sigma(sigma)?)?),
                Mode::Float => {
                    let cols = p.shape().cols();
                    let g = FloatGroupElement::from_cmatrix(&input::float_sigma(Some(sigma), cols)?)?;
                    polynomial_to_json(&p.to_float().act(&g)?)
                }
            }
        }
        Resultant { poly } => {
            let fs = exactly(poly, 2, "resultant")?;
            let (f, g) = (input::poly(&fs[0])?, input::poly(&fs[1])?);
            json!({"resultant": exact_to_json(&sylvester_resultant(&f, &g)?)})
        }
        Discriminant { poly } => {
            let f = input::poly(input::pick(&poly.poly, &poly.file, "--poly")?)?;
            json!({"discriminant": exact_to_json(&binary_discriminant(&f)?)})
        }
        Minors { matrix } => {
            let m = maximal_minors_scalar(&input::exact_matrix(matrix)?)?;
            json!({"minors": m.iter().map(exact_to_json).collect::<Vec<_>>()})
        }
        Polytope { poly } => {
            let e = input::rep(input::pick(&poly.poly, &poly.file, "--poly")?)?;
            let p = weight_polytope(&e)?;
            json!({"support": p.points(), "vertices": p.vertex_points(), "degree": rep_degree(&e)})
        }
        Weight { poly, lambda } => {
            let e = input::rep(input::pick(&poly.poly, &poly.file, "--poly")?)?;
            let l = input::integer_list(lambda)?;
            json!({"lambda": l, "weight": psg_weight(&OnePsg::new(l.clone())?, &e)?})
        }
        Contains { poly } => {
            let fs = exactly(poly, 2, "contains")?;
            let inner = weight_polytope(&input::rep(&fs[0])?)?;
            let outer = weight_polytope(&input::rep(&fs[1])?)?;
            let c = contains(&inner, &outer)?;
            json!({
                "contained": c.contained,
                "witness": c.witness.as_ref().map(|l| l.exponents().to_vec()),
                "escaping_vertex": c.escaping_vertex,
            })
        }
        Minkowski { poly, k } => {
            let p = match (poly.len(), k) {
                (1, Some(k)) => scale(&weight_polytope(&input::rep(&poly[0])?)?, *k)?,
                (2, None) => minkowski_sum(&weight_polytope(&input::rep(&poly[0])?)?, &weight_polytope(&input::rep(&poly[1])?)?)?,
                _ => return Err(Error::schema("minkowski takes two --poly arguments, or one with --k")),
            };
            polytope_to_json(&p)
        }
        RepDegree { poly } => {
            let e = input::rep(input::pick(&poly.poly, &poly.file, "--poly")?)?;
            json!({"degree": rep_degree(&e)})
        }
        PairCheck { pair } => {
            let p = input::pair(input::pick(&pair.pair, &pair.file, "--pair")?)?;
            let t = torus_semistable(&p)?;
            let mut v = to_json(&t);
            v["verdict"] = json!(if t.semistable { "torus-semistable" } else { "torus-fail" });
            v
        }
        Probe { pair, trials } => {
            let p = input::pair(input::pick(&pair.pair, &pair.file, "--pair")?)?;
            to_json(&randomized_torus_probe(&p, *trials, cfg.seed)?)
        }
        KnValue { pair, sigma } => {
            let p = input::pair(input::pick(&pair.pair, &pair.file, "--pair")?)?;
            let s = input::float_sigma(sigma.as_deref(), p.group_size())?;
            json!({"value": kempf_ness_value(&s, &p)})
        }
        KnGradient { pair, sigma } => {
            let p = input::pair(input::pick(&pair.pair, &pair.file, "--pair")?)?;
            let s = input::float_sigma(sigma.as_deref(), p.group_size())?;
            json!({"gradient": cmatrix_to_json(&kempf_ness_gradient(&s, &p))})
        }
        Descend { pair, restarts, max_iters } => {
            let p = input::pair(input::pick(&pair.pair, &pair.file, "--pair")?)?;
            to_json(&descend_pair(&p, &descent_options(cfg, *restarts, *max_iters)))
        }
        Destabilize { pair, trials, restarts } => {
            let p = input::pair(input::pick(&pair.pair, &pair.file, "--pair")?)?;
            to_json(&find_destabilizer(&p, *trials, &descent_options(cfg, *restarts, None))?)
        }
        StablePair { pair, m } => {
            let p = input::pair(input::pick(&pair.pair, &pair.file, "--pair")?)?;
            let tp = build_stable_test_pair(&p, *m)?;
            let (pv, pw) = tp.polytopes()?;
            json!({
                "m": tp.m,
                "q": tp.q,
                "v_polytope": polytope_to_json(&pv),
                "w_polytope": polytope_to_json(&pw),
                "torus": to_json(&tp.torus_test()?),
            })
        }
        StableCheck { pair, m, trials, restarts } => {
            let p = input::pair(input::pick(&pair.pair, &pair.file, "--pair")?)?;
            to_json(&stable_probe(&p, *m, *trials, &descent_options(cfg, *restarts, None))?)
        }
        Chow { curve } => {
            let c = input::curve(input::pick(&curve.curve, &curve.file, "--curve")?)?;
            polynomial_to_json(&chow_form_curve(&c)?)
        }
        Hurwitz { curve } => {
            let c = input::curve(input::pick(&curve.curve, &curve.file, "--curve")?)?;
            polynomial_to_json(&hurwitz_form_curve(&c)?)
        }
        ChowHyp { poly } => {
            let f = input::poly(input::pick(&poly.poly, &poly.file, "--poly")?)?;
            polynomial_to_json(&chow_form_hypersurface(&HypersurfaceVariety::new(f)?)?)
        }
        Xpair { variety: va } => x_pair_json(&build_x_pair(&variety(&va.curve, &va.poly)?, &x_pair_options(cfg))?),
        FsPoint { poly, point } => {
            let p = input::poly(input::pick(&poly.poly, &poly.file, "--poly")?)?;
            json!({"value": fs_pointwise(&p.to_float(), &input::float_point(point)?)?})
        }
        Mahler { poly, p } => {
            let f = input::poly(input::pick(&poly.poly, &poly.file, "--poly")?)?;
            to_json(&lp_norm(&f.to_float(), *p, cfg.samples_or(200_000), cfg.seed)?)
        }
        Supnorm { poly } => {
            let f = input::poly(input::pick(&poly.poly, &poly.file, "--poly")?)?;
            to_json(&sup_norm(&f.to_float(), &SupNormOptions { seed: cfg.seed, ..Default::default() })?)
        }
        Arestov { poly } => {
            let f = input::poly(input::pick(&poly.poly, &poly.file, "--poly")?)?;
            let sup = SupNormOptions { seed: cfg.seed, ..Default::default() };
            let r = arestov_check(&f.to_float(), cfg.samples_or(200_000), cfg.seed, &sup)?;
            let ok = r.holds;
            return Ok((to_json(&r), ok));
        }
        Jensen { poly, p } => {
            let f = input::poly(input::pick(&poly.poly, &poly.file, "--poly")?)?;
            let r = jensen_check(&f.to_float(), *p, cfg.samples_or(200_000), cfg.seed)?;
            let ok = r.holds;
            return Ok((to_json(&r), ok));
        }
        Theta { poly } => {
            let f = input::poly(input::pick(&poly.poly, &poly.file, "--poly")?)?;
            to_json(&conformal_theta(&f.to_float(), cfg.samples_or(200_000), cfg.seed)?)
        }
        LogTan { target, sigma, p } => {
            let t = Target::load(target, cfg)?;
            let s = input::float_sigma(sigma.as_deref(), t.group_size())?;
            to_json(&log_tan_dist_p(&s, t.as_distance(), *p, cfg.samples_or(200_000), cfg.seed)?)
        }
        Distance { target, p, restarts } => {
            let t = Target::load(target, cfg)?;
            let opts = OrbitOptions { descent: descent_options(cfg, *restarts, None), samples: cfg.samples_or(4000) };
            to_json(&orbit_distance(t.as_distance(), *p, &opts)?)
        }
        Kenergy { variety: va, sigma } => {
            let xp = build_x_pair(&variety(&va.curve, &va.poly)?, &x_pair_options(cfg))?;
            let s = input::float_sigma(sigma.as_deref(), xp.group_size())?;
            to_json(&k_energy_algebraic(&s, &xp, cfg.samples_or(200_000), cfg.seed)?)
        }
        Aubin { variety: va, sigma } => {
            let xp = build_x_pair(&variety(&va.curve, &va.poly)?, &x_pair_options(cfg))?;
            let s = input::float_sigma(sigma.as_deref(), xp.group_size())?;
            to_json(&aubin_f0_algebraic(&s, &xp, cfg.samples_or(200_000), cfg.seed))
        }
        Coercivity { variety: va, sigma, m, k } => {
            let xp = build_x_pair(&variety(&va.curve, &va.poly)?, &x_pair_options(cfg))?;
            let s = input::float_sigma(sigma.as_deref(), xp.group_size())?;
            to_json(&coercivity_value(&s, &xp, *m, *k, cfg.samples_or(200_000), cfg.seed)?)
        }
        Oracle { curve, sigma } => {
            let c = input::curve(input::pick(&curve.curve, &curve.file, "--curve")?)?;
            let s = input::float_sigma(sigma.as_deref(), c.ambient() + 1)?;
            to_json(&curve_geometry_oracle(&s, &c, &OracleOptions::default())?)
        }
        Asymptotic { k, degree, restarts } => {
            let ks: Vec<u32> = input::integer_list(k)?
                .into_iter()
                .map(|x| u32::try_from(x).map_err(|_| Error::precondition("k must be positive")))
                .collect::<Result<_>>()?;
            let opts = OrbitOptions { descent: descent_options(cfg, *restarts, None), samples: cfg.samples.unwrap_or(4000) };
            let xopts = XPairOptions { symbolic: false, samples: cfg.samples_or(4000), seed: cfg.seed };
            to_json(&asymptotic_report(&ks, *degree, &xopts, &opts)?)
        }
        Verify { suites } => {
            let report = verify::run(suites, cfg)?;
            let ok = report.passed();
            return Ok((to_json(&report), ok));
        }
    };
    Ok((v, true))
}

/// Parse, run and render; returns the text to print and the exit code.
pub fn run(cli: &Cli) -> (String, i32) {
    let cfg = &cli.run;
    let outcome = stabpairs::with_threads(cfg.threads, || execute(&cli.command, cfg)).and_then(|r| r);
    finish(cli.command.name(), cfg, outcome)
}

/// Wrap a command outcome in the `v1` envelope; a failed hard check exits with 1.
pub fn finish(name: &str, cfg: &RunConfig, outcome: Result<(Value, bool)>) -> (String, i32) {
    let meta = json!({"seed": cfg.seed, "samples": cfg.samples, "threads": cfg.threads, "mode": cfg.mode});
    let (mut doc, code) = match outcome {
        Ok((result, true)) => (envelope(name, result), 0),
        Ok((result, false)) => {
            let mut d = envelope(name, result);
            d["error"] = json!({"kind": "verification", "message": "a hard check failed"});
            (d, 1)
        }
        Err(e) => {
            let kind = match e {
                Error::Schema(_) => "schema",
                Error::Precondition(_) => "precondition",
                Error::NonConvergence(_) => "non-convergence",
                Error::Verification(_) => "verification",
            };
            (json!({"schema": stabpairs::json::SCHEMA, "command": name, "error": {"kind": kind, "message": e.to_string()}}), e.exit_code())
        }
    };
    doc["meta"] = meta;
    let text = if cfg.text { render::text(&doc) } else { serde_json::to_string_pretty(&doc).expect("json") + "\n" };
    (text, code)
}
