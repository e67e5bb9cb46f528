//! One function per subcommand. Each returns an [`Outcome`]; nothing here prints.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use gamma_core::fundamental::{solve_fundamental, FundamentalOperator};
use gamma_core::gamma_pairs::{
    check_gamma_contraction, check_gamma_isometry, check_pure, strictness_constant, OperatorPair, PairVerdict,
};
use gamma_core::generators::{
    matrix_polynomial, matrix_with_nr, planted_unimodular, strict_pair, symmetrized_pair, truncated_model_pair,
};
use gamma_core::model_theory::{build_model, build_model_at, dilation_check, multiplier_sup_norm, DilationReport};
use gamma_core::numerics::numerical_radius;
use gamma_core::varieties::{
    boundary_sample, classify_distinguished, write_boundary_csv, DeterminantalVariety, DistinguishedStatus,
    DistinguishedVerdict,
};
use gamma_core::von_neumann::{vn_report_with_variety, MatrixPolynomial, VNReport};
use gamma_core::{ComplexMatrix, Error, Tolerances};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Command, CountArgs, GenCommand, GlobalArgs, PairArgs, VnArgs};
use crate::error::{exit, CliError, CliResult};
use crate::io::{read_json, read_matrix_doc, read_pair_file, to_json_text, MatrixFile, PolynomialFile};

/// Boundary angles used by `vn` unless `--sample` is given.
pub const DEFAULT_VN_SAMPLES: usize = 2048;

/// Seed, tolerances and output settings shared by every subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub tol: Tolerances,
    pub sample: Option<usize>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_args(g: &GlobalArgs) -> CliResult<Self> {
        let mut tol = Tolerances::default();
        if let Some(v) = g.tol_psd {
            tol.psd_tol = v;
        }
        if let Some(v) = g.tol_residual {
            tol.residual_tol = v;
        }
        if let Some(v) = g.grid_angular {
            tol.grid_angular = v;
        }
        if let Some(v) = g.grid_radial {
            tol.grid_radial = v;
        }
        tol.validate()?;
        if g.sample == Some(0) {
            return Err(CliError::Invalid("--sample must be positive".into()));
        }
        Ok(Self {
            seed: g.seed,
            tol,
            sample: g.sample,
            out: g.out.clone(),
        })
    }

    /// Generator for instance `index`: the seed picks the key, the index picks the ChaCha stream.
    pub fn instance_rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }
}

/// What a subcommand produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    /// JSON report.
    pub report: String,
    /// Boundary CSV, when requested.
    pub csv: Option<String>,
    /// Diagnostic line for stderr.
    pub message: Option<String>,
}

impl Outcome {
    fn new<T: Serialize>(code: i32, report: &T) -> Self {
        Self {
            code,
            report: to_json_text(report),
            csv: None,
            message: None,
        }
    }

    fn with_message(mut self, message: impl Into<String>) -> Self {
        self.message = Some(message.into());
        self
    }
}

pub fn run(command: &Command, cfg: &RunConfig) -> CliResult<Outcome> {
    match command {
        Command::Check { pair, refine } => check(pair, *refine, cfg),
        Command::Fundop { pair } => fundop(pair, cfg),
        Command::Variety { a, index } => variety(a, *index, cfg),
        Command::Vn(args) => match args.random {
            Some(k) => vn_random(k, cfg),
            None => vn_single(args, cfg),
        },
        Command::Model {
            pair,
            blocks,
            m_max,
            n_max,
        } => model(pair, *blocks, *m_max, *n_max, cfg),
        Command::Gen(cmd) => generate(cmd, cfg),
    }
}

pub fn parse_complex(text: &str) -> CliResult<Complex64> {
    let z = Complex64::from_str(text.trim())
        .map_err(|_| CliError::Invalid(format!("cannot parse complex number {text:?}")))?;
    if !z.is_finite() {
        return Err(CliError::Invalid(format!("complex number {text:?} is not finite")));
    }
    Ok(z)
}

pub fn load_pair(args: &PairArgs, tol: &Tolerances) -> CliResult<OperatorPair> {
    let (s, p) = if let Some(values) = &args.scalar {
        let s = parse_complex(&values[0])?;
        let p = parse_complex(&values[1])?;
        (ComplexMatrix::from_element(1, 1, s), ComplexMatrix::from_element(1, 1, p))
    } else if let Some(path) = &args.pair {
        read_pair_file(path, args.index)?
    } else if let (Some(s), Some(p)) = (&args.s, &args.p) {
        (read_matrix_doc(s, 0, "s")?, read_matrix_doc(p, 0, "p")?)
    } else {
        return Err(CliError::Invalid("no pair given: use --s/--p, --pair or --scalar".into()));
    };
    Ok(OperatorPair::new(s, p, tol)?)
}

#[derive(Debug, Serialize)]
struct CheckReport {
    dim: usize,
    commutator_defect: f64,
    refined: bool,
    gamma_contraction: PairVerdict,
    strictness: f64,
    strict: bool,
    /// `null` when P is not a contraction.
    pure: Option<bool>,
    gamma_isometry: PairVerdict,
}

fn check(args: &PairArgs, refine: bool, cfg: &RunConfig) -> CliResult<Outcome> {
    let tol = if refine { cfg.tol.refined() } else { cfg.tol };
    let pair = load_pair(args, &tol)?;
    let verdict = check_gamma_contraction(&pair, &tol)?;
    let strictness = strictness_constant(&pair, &tol)?;
    let pure = match check_pure(pair.p(), &tol) {
        Ok(b) => Some(b),
        Err(Error::NotContraction { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let code = if verdict.is_member { exit::PASS } else { exit::FAIL };
    let report = CheckReport {
        dim: pair.dim(),
        commutator_defect: pair.commutator_defect(),
        refined: refine,
        gamma_contraction: verdict,
        strictness,
        strict: strictness > tol.psd_tol,
        pure,
        gamma_isometry: check_gamma_isometry(&pair, &tol)?,
    };
    Ok(Outcome::new(code, &report))
}

#[derive(Debug, Serialize)]
struct FundopReport {
    gamma_contraction: bool,
    margin: f64,
    rank: usize,
    f: MatrixFile,
    /// `F` written in the ambient coordinates.
    f_embedded: MatrixFile,
    residual: f64,
    residual_bound: f64,
    nr: f64,
    defect_singular_values: Vec<f64>,
}

/// Fails with an invariant error when a verified Gamma-contraction has `w(F) > 1 + psd_tol`.
fn solve_checked(pair: &OperatorPair, tol: &Tolerances) -> CliResult<FundamentalOperator> {
    let fo = solve_fundamental(pair, tol)?;
    fo.ensure_nr_bound(tol)
        .map_err(|e| CliError::Invariant(format!("{e} on a verified Gamma-contraction")))?;
    Ok(fo)
}

fn fundop(args: &PairArgs, cfg: &RunConfig) -> CliResult<Outcome> {
    let tol = &cfg.tol;
    let pair = load_pair(args, tol)?;
    let verdict = check_gamma_contraction(&pair, tol)?;
    let fo = solve_fundamental(&pair, tol)?;
    let mut code = if verdict.is_member { exit::PASS } else { exit::FAIL };
    let mut message = None;
    if verdict.is_member {
        if let Err(e) = fo.ensure_nr_bound(tol) {
            code = exit::INVARIANT;
            message = Some(format!("invariant violated: {e} on a verified Gamma-contraction"));
        }
    }
    let report = FundopReport {
        gamma_contraction: verdict.is_member,
        margin: verdict.margin,
        rank: fo.rank(),
        f: MatrixFile::from_matrix(&fo.f),
        f_embedded: MatrixFile::from_matrix(&fo.embedded()),
        residual: fo.residual,
        residual_bound: tol.residual_tol * pair.scale(),
        nr: fo.nr,
        defect_singular_values: fo.defect.singular.clone(),
    };
    let mut outcome = Outcome::new(code, &report);
    outcome.message = message;
    Ok(outcome)
}

#[derive(Debug, Serialize)]
struct VarietyReport {
    dim: usize,
    m: usize,
    verdict: DistinguishedVerdict,
}

fn variety(path: &Path, index: usize, cfg: &RunConfig) -> CliResult<Outcome> {
    let tol = &cfg.tol;
    let a = read_matrix_doc(path, index, "a")?;
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        }
        .into());
    }
    let v = DeterminantalVariety::new(a, tol)?;
    let m = cfg.sample.unwrap_or(tol.grid_angular);
    let verdict = classify_distinguished(&v, tol, m);
    let code = match verdict.status {
        DistinguishedStatus::DistinguishedCertified | DistinguishedStatus::DistinguishedEmpirical => exit::PASS,
        DistinguishedStatus::NotDistinguishedCertified | DistinguishedStatus::Inconclusive => exit::FAIL,
    };
    let mut outcome = Outcome::new(
        code,
        &VarietyReport {
            dim: v.dim(),
            m,
            verdict,
        },
    );
    if cfg.sample.is_some() {
        let mut csv = Vec::new();
        write_boundary_csv(&mut csv, &boundary_sample(&v, m), tol).expect("writing to memory");
        outcome.csv = Some(String::from_utf8(csv).expect("CSV is ASCII"));
    }
    Ok(outcome)
}

/// The polynomial selected by `--poly` or `--term`; `f = s` when neither is given.
pub fn polynomial_from_args(args: &VnArgs) -> CliResult<MatrixPolynomial> {
    if let Some(path) = &args.poly {
        return read_json::<PolynomialFile>(path)?.to_polynomial();
    }
    let mut poly = MatrixPolynomial::zero(1);
    if args.term.is_empty() {
        poly.add_term(1, 0, &ComplexMatrix::from_element(1, 1, Complex64::new(1.0, 0.0)))?;
        return Ok(poly);
    }
    for chunk in args.term.chunks(3) {
        let exponent = |text: &str| {
            text.parse::<usize>()
                .map_err(|_| CliError::Invalid(format!("bad exponent {text:?} in --term")))
        };
        let (i, j) = (exponent(&chunk[0])?, exponent(&chunk[1])?);
        let c = parse_complex(&chunk[2])?;
        poly.add_term(i, j, &ComplexMatrix::from_element(1, 1, c))?;
    }
    Ok(poly)
}

#[derive(Debug, Serialize)]
struct VnSingleReport {
    gamma_contraction: bool,
    margin: f64,
    fundamental_nr: Option<f64>,
    report: Option<VNReport>,
}

fn vn_single(args: &VnArgs, cfg: &RunConfig) -> CliResult<Outcome> {
    let tol = &cfg.tol;
    let pair = load_pair(&args.pair, tol)?;
    let f = polynomial_from_args(args)?;
    let verdict = check_gamma_contraction(&pair, tol)?;
    if !verdict.is_member {
        let report = VnSingleReport {
            gamma_contraction: false,
            margin: verdict.margin,
            fundamental_nr: None,
            report: None,
        };
        return Ok(Outcome::new(exit::FAIL, &report).with_message("pair is not a Gamma-contraction"));
    }
    let fo = solve_checked(&pair, tol)?;
    let lambda = DeterminantalVariety::new(fo.f.adjoint(), tol)?;
    let r = vn_report_with_variety(&f, &pair, &lambda, cfg.sample.unwrap_or(DEFAULT_VN_SAMPLES))?;
    let code = if r.holds { exit::PASS } else { exit::FAIL };
    let report = VnSingleReport {
        gamma_contraction: true,
        margin: verdict.margin,
        fundamental_nr: Some(fo.nr),
        report: Some(r),
    };
    Ok(Outcome::new(code, &report))
}

/// Random Gamma-contraction of dimension 2 to 4, cycling through the generator families.
pub fn random_pair(rng: &mut ChaCha8Rng, index: usize, tol: &Tolerances) -> CliResult<(&'static str, OperatorPair)> {
    let n = rng.random_range(2..=4);
    Ok(match index % 3 {
        0 => ("symmetrized", symmetrized_pair(rng, n, tol)?),
        1 => {
            let k = rng.random_range(1..=2);
            let (_, pair) = truncated_model_pair(rng, k, (n / k).max(2), tol)?;
            ("truncated_model", pair)
        }
        _ => {
            let r = rng.random_range(0.3..1.0);
            ("strict", strict_pair(rng, n, r, tol)?)
        }
    })
}

#[derive(Debug, Serialize)]
struct VnCase {
    index: usize,
    family: &'static str,
    dim: usize,
    poly_size: usize,
    poly_degree: usize,
    lhs: f64,
    rhs: f64,
    ratio: f64,
    holds: bool,
    m: usize,
}

#[derive(Debug, Serialize)]
struct VnSummary {
    seed: u64,
    instances: usize,
    min_ratio: Option<f64>,
    max_ratio: Option<f64>,
    all_hold: bool,
    failures: Vec<usize>,
    cases: Vec<VnCase>,
}

fn vn_random(k: usize, cfg: &RunConfig) -> CliResult<Outcome> {
    let tol = &cfg.tol;
    let m = cfg.sample.unwrap_or(DEFAULT_VN_SAMPLES);
    let mut cases = Vec::with_capacity(k);
    for index in 0..k {
        let mut rng = cfg.instance_rng(index);
        let (family, pair) = random_pair(&mut rng, index, tol)?;
        let f = matrix_polynomial(&mut rng, 2, 3);
        if !check_gamma_contraction(&pair, tol)?.is_member {
            return Err(CliError::Invariant(format!(
                "generated instance {index} ({family}) failed the Gamma-contraction check"
            )));
        }
        let fo = solve_checked(&pair, tol)?;
        let lambda = DeterminantalVariety::new(fo.f.adjoint(), tol)?;
        let r = vn_report_with_variety(&f, &pair, &lambda, m)?;
        cases.push(VnCase {
            index,
            family,
            dim: pair.dim(),
            poly_size: f.size(),
            poly_degree: f.degree(),
            lhs: r.lhs,
            rhs: r.rhs,
            ratio: r.ratio,
            holds: r.holds,
            m: r.m,
        });
    }
    let ratios = cases.iter().map(|c| c.ratio);
    let min_ratio = ratios.clone().reduce(f64::min);
    let max_ratio = ratios.reduce(f64::max);
    let failures: Vec<usize> = cases.iter().filter(|c| !c.holds).map(|c| c.index).collect();
    let summary = VnSummary {
        seed: cfg.seed,
        instances: k,
        min_ratio,
        max_ratio,
        all_hold: failures.is_empty(),
        failures,
        cases,
    };
    let code = if summary.all_hold { exit::PASS } else { exit::FAIL };
    Ok(Outcome::new(code, &summary))
}

#[derive(Debug, Serialize)]
struct ModelReport {
    gamma_contraction: bool,
    n_blocks: Option<usize>,
    block_dim: Option<usize>,
    model_dim: Option<usize>,
    bound: Option<f64>,
    passes: Option<bool>,
    multiplier_sup_norm: Option<f64>,
    dilation: Option<DilationReport>,
}

fn model(args: &PairArgs, blocks: Option<usize>, m_max: usize, n_max: usize, cfg: &RunConfig) -> CliResult<Outcome> {
    let tol = &cfg.tol;
    let pair = load_pair(args, tol)?;
    if !check_gamma_contraction(&pair, tol)?.is_member {
        let report = ModelReport {
            gamma_contraction: false,
            n_blocks: None,
            block_dim: None,
            model_dim: None,
            bound: None,
            passes: None,
            multiplier_sup_norm: None,
            dilation: None,
        };
        return Ok(Outcome::new(exit::FAIL, &report).with_message("pair is not a Gamma-contraction"));
    }
    let model = match blocks {
        Some(n) => {
            if !check_pure(pair.p(), tol)? {
                return Err(Error::NotPure.into());
            }
            build_model_at(&pair, n, tol)?
        }
        None => build_model(&pair, 1, tol)?,
    };
    let dilation = dilation_check(&model, &pair, m_max, n_max)?;
    let passes = dilation.passes();
    let report = ModelReport {
        gamma_contraction: true,
        n_blocks: Some(model.n_blocks),
        block_dim: Some(model.block_dim),
        model_dim: Some(model.dim()),
        bound: Some(dilation.bound()),
        passes: Some(passes),
        multiplier_sup_norm: Some(multiplier_sup_norm(&model.f_star, tol.grid_angular)),
        dilation: Some(dilation),
    };
    if passes {
        Ok(Outcome::new(exit::PASS, &report))
    } else {
        Ok(Outcome::new(exit::INVARIANT, &report).with_message("invariant violated: dilation residual exceeds C * tail"))
    }
}

fn check_dim(dim: usize) -> CliResult<()> {
    if dim == 0 {
        return Err(CliError::Invalid("--dim must be positive".into()));
    }
    Ok(())
}

fn generate(cmd: &GenCommand, cfg: &RunConfig) -> CliResult<Outcome> {
    let tol = &cfg.tol;
    let (family, count) = match cmd {
        GenCommand::Pair { count } => ("symmetrized", count.count),
        GenCommand::Model { count, .. } => ("truncated_model", *count),
        GenCommand::Strict { count, .. } => ("strict", count.count),
        GenCommand::Matrix { count, .. } => ("matrix", count.count),
    };
    let mut instances = Vec::with_capacity(count);
    for index in 0..count {
        let mut rng = cfg.instance_rng(index);
        let item = match cmd {
            GenCommand::Pair {
                count: CountArgs { dim, .. },
            } => {
                check_dim(*dim)?;
                let pair = symmetrized_pair(&mut rng, *dim, tol)?;
                pair_json(index, &pair, json!({}))
            }
            GenCommand::Model { k, blocks, .. } => {
                check_dim(*k)?;
                let (f_hat, pair) = truncated_model_pair(&mut rng, *k, *blocks, tol)?;
                pair_json(index, &pair, json!({ "f_hat": MatrixFile::from_matrix(&f_hat) }))
            }
            GenCommand::Strict {
                count: CountArgs { dim, .. },
                r,
            } => {
                check_dim(*dim)?;
                if !(*r > 0.0 && *r < 1.0) {
                    return Err(CliError::Invalid(format!("--r must lie in (0, 1), got {r}")));
                }
                let pair = strict_pair(&mut rng, *dim, *r, tol)?;
                let c = strictness_constant(&pair, tol)?;
                if c <= tol.psd_tol {
                    return Err(CliError::Invariant(format!(
                        "instance {index}: strictness constant {c:.3e} is not positive"
                    )));
                }
                pair_json(index, &pair, json!({ "r": r, "strictness": c }))
            }
            GenCommand::Matrix {
                count: CountArgs { dim, .. },
                nr,
                planted,
            } => {
                check_dim(*dim)?;
                let a = if *planted {
                    planted_unimodular(&mut rng, *dim)
                } else {
                    let range = match nr {
                        Some(x) if x.is_finite() && *x > 0.0 => (*x, *x),
                        Some(x) => return Err(CliError::Invalid(format!("--nr must be positive, got {x}"))),
                        None => (0.2, 0.95),
                    };
                    matrix_with_nr(&mut rng, *dim, range, tol)?
                };
                json!({
                    "index": index,
                    "nr": numerical_radius(&a, tol)?,
                    "a": MatrixFile::from_matrix(&a),
                })
            }
        };
        instances.push(item);
    }
    let doc = json!({ "family": family, "seed": cfg.seed, "instances": instances });
    Ok(Outcome::new(exit::PASS, &doc))
}

fn pair_json(index: usize, pair: &OperatorPair, extra: Value) -> Value {
    let mut item = json!({
        "index": index,
        "s": MatrixFile::from_matrix(pair.s()),
        "p": MatrixFile::from_matrix(pair.p()),
    });
    if let (Value::Object(map), Value::Object(more)) = (&mut item, extra) {
        map.extend(more);
    }
    item
}
