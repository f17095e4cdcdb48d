//! Command-line front end: boundary sweeps (CSV), joint-measurability checks,
//! tomography round trips, informational-completeness reports, and POVM
//! validation (JSON).
//!
//! Exit codes: 0 on success, 1 on a domain failure (invalid POVM, assertion
//! miss, tomography error above threshold, missing informational
//! completeness), 2 on usage or parse errors.

use clap::{Parser, Subcommand};
use qjoint::infocomplete::{construct_ic_joint, ic_by_criterion, ic_by_span, TomographyPipeline};
use qjoint::io::{
    povm_from_json, povm_to_json, state_from_json, state_to_json, PovmJson, StateJson,
};
use qjoint::jointness::{boundary_generator, gamma_max, is_jointly_measurable, linear_criteria};
use qjoint::linalg::DensityOperator;
use qjoint::povm::{check_covariance, marginals, Outcomes, Povm};
use qjoint::random::{random_state, rng_from_seed};
use qjoint::sequential::QubitSequentialConfig;
use qjoint::weyl::{build_weyl_system, WeylSystem};
use qjoint::Tolerances;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "qjoint",
    version,
    about = "Joint measurements of conjugate observables on finite quantum systems"
)]
struct Cli {
    /// Override the operator-equality tolerance (default 1e-10; the
    /// QJOINT_TOL environment variable is consulted when the flag is absent)
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the joint-measurability boundary curve to CSV
    Boundary {
        /// Dimensions to sweep
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5")]
        dims: Vec<usize>,
        /// Number of grid points on [0, 1]
        #[arg(long, default_value_t = 101)]
        samples: usize,
        /// Emit the linear-criteria partition of the noise square instead of
        /// the boundary curve
        #[arg(long)]
        region: bool,
        /// Output path (stdout when absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide joint measurability of the depolarized pair at (lambda, gamma)
    Check {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        gamma: f64,
        /// Exit with status 1 when the pair is not jointly measurable
        #[arg(long)]
        assert_jm: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Forward-map a state through an informationally complete covariant
    /// observable and reconstruct it by linear inversion
    Tomography {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        lambda: f64,
        /// Use the interior construction with this second noise parameter
        /// instead of the minimal-noise generator
        #[arg(long)]
        interior: Option<f64>,
        /// Input state JSON (a seeded random state when absent)
        #[arg(long)]
        state: Option<PathBuf>,
        /// Probability table CSV `j,k,probability`; skips the forward step
        #[arg(long)]
        probs: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the forward probabilities to this CSV path
        #[arg(long)]
        probs_out: Option<PathBuf>,
    },
    /// Informational-completeness report for a POVM file or a generator state
    IcCheck {
        #[arg(long)]
        povm: Option<PathBuf>,
        /// Generator state JSON; needs --factors
        #[arg(long)]
        state: Option<PathBuf>,
        /// Cyclic factors of the group for --state
        #[arg(long, value_delimiter = ',')]
        factors: Option<Vec<usize>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Positivity/completeness/covariance report for a POVM file
    Validate {
        #[arg(long)]
        povm: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The rotated two-step qubit measurement with symmetric
    /// informationally complete effects
    SicDemo {
        /// First-measurement unsharpness (default 1/√3)
        #[arg(long)]
        lambda: Option<f64>,
        /// Kick angle (default π/4)
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum AppError {
    Usage(String),
    Domain(String),
}

impl AppError {
    fn code(&self) -> u8 {
        match self {
            AppError::Usage(_) => 2,
            AppError::Domain(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            AppError::Usage(m) | AppError::Domain(m) => m,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> AppError {
    AppError::Usage(e.to_string())
}

fn domain(e: impl std::fmt::Display) -> AppError {
    AppError::Domain(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match tolerances_from(cli.tol).and_then(|tol| run(cli.command, &tol)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn tolerances_from(flag: Option<f64>) -> Result<Tolerances<f64>, AppError> {
    let mut tol = Tolerances::<f64>::default();
    let from_env = match std::env::var("QJOINT_TOL") {
        Ok(raw) => Some(
            raw.parse::<f64>()
                .map_err(|e| usage(format!("QJOINT_TOL value {raw:?} is not a float: {e}")))?,
        ),
        Err(_) => None,
    };
    if let Some(eq) = flag.or(from_env) {
        if !(eq.is_finite() && eq > 0.0) {
            return Err(usage(format!("tolerance {eq} must be finite and positive")));
        }
        tol = tol.with_eq(eq);
    }
    Ok(tol)
}

fn run(command: Command, tol: &Tolerances<f64>) -> Result<(), AppError> {
    match command {
        Command::Boundary {
            dims,
            samples,
            region,
            out,
        } => cmd_boundary(&dims, samples, region, out.as_deref(), tol),
        Command::Check {
            dim,
            lambda,
            gamma,
            assert_jm,
            out,
        } => cmd_check(dim, lambda, gamma, assert_jm, out.as_deref(), tol),
        Command::Tomography {
            dim,
            lambda,
            interior,
            state,
            probs,
            seed,
            out,
            probs_out,
        } => cmd_tomography(
            dim,
            lambda,
            interior,
            state.as_deref(),
            probs.as_deref(),
            seed,
            out.as_deref(),
            probs_out.as_deref(),
            tol,
        ),
        Command::IcCheck {
            povm,
            state,
            factors,
            out,
        } => cmd_ic_check(
            povm.as_deref(),
            state.as_deref(),
            factors,
            out.as_deref(),
            tol,
        ),
        Command::Validate { povm, out } => cmd_validate(&povm, out.as_deref(), tol),
        Command::SicDemo { lambda, theta, out } => cmd_sic_demo(lambda, theta, out.as_deref(), tol),
    }
}

/// Format a float at 12 significant digits, locale-independent.
fn sig12(x: f64) -> String {
    format!("{:.11e}", x)
}

/// Round every float in a JSON tree to 12 significant digits so that output
/// files diff cleanly across runs and platforms.
fn round_floats(value: &mut serde_json::Value) {
    match value {
        serde_json::Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.is_f64() && f.is_finite() && f != 0.0 {
                    let rounded: f64 = sig12(f).parse().expect("formatted float parses");
                    *value = serde_json::Value::from(rounded);
                }
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(round_floats),
        serde_json::Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), AppError> {
    let mut v = serde_json::to_value(value).map_err(usage)?;
    round_floats(&mut v);
    let text = serde_json::to_string_pretty(&v).map_err(usage)?;
    emit_text(&format!("{text}\n"), out)
}

fn emit_text(text: &str, out: Option<&Path>) -> Result<(), AppError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, AppError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn cmd_boundary(
    dims: &[usize],
    samples: usize,
    region: bool,
    out: Option<&Path>,
    tol: &Tolerances<f64>,
) -> Result<(), AppError> {
    if samples < 2 {
        return Err(usage("--samples must be at least 2"));
    }
    if dims.iter().any(|&d| d < 2) {
        return Err(usage("--dims entries must be at least 2"));
    }
    let grid = |i: usize| i as f64 / (samples - 1) as f64;
    let mut text = String::new();
    if region {
        text.push_str("d,lambda,gamma,region\n");
        for &d in dims {
            for i in 0..samples {
                for j in 0..samples {
                    let (lambda, gamma) = (grid(i), grid(j));
                    let lc = linear_criteria(lambda, gamma, d);
                    let class = if lc.sufficient {
                        "sufficient-linear"
                    } else if !lc.necessary {
                        "outside"
                    } else {
                        "stripe"
                    };
                    writeln!(text, "{d},{},{},{class}", sig12(lambda), sig12(gamma))
                        .expect("string write");
                }
            }
        }
    } else {
        text.push_str("d,lambda,gamma_max\n");
        for &d in dims {
            for i in 0..samples {
                let lambda = grid(i);
                let bp = gamma_max::<f64>(lambda, d).map_err(domain)?;
                writeln!(text, "{d},{},{}", sig12(lambda), sig12(bp.gamma_max))
                    .expect("string write");
            }
        }
    }
    let _ = tol;
    emit_text(&text, out)
}

#[derive(Serialize)]
struct CheckReport {
    dim: usize,
    lambda: f64,
    gamma: f64,
    jointly_measurable: bool,
    gamma_max: f64,
    linear_sufficient: bool,
    linear_necessary: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate_state: Option<StateJson>,
}

fn cmd_check(
    dim: usize,
    lambda: f64,
    gamma: f64,
    assert_jm: bool,
    out: Option<&Path>,
    tol: &Tolerances<f64>,
) -> Result<(), AppError> {
    let decision = is_jointly_measurable(lambda, gamma, dim, tol).map_err(usage)?;
    let lc = linear_criteria(lambda, gamma, dim);
    let report = CheckReport {
        dim,
        lambda,
        gamma,
        jointly_measurable: decision.jointly_measurable,
        gamma_max: decision.gamma_max,
        linear_sufficient: lc.sufficient,
        linear_necessary: lc.necessary,
        certificate_state: decision.certificate.map(|c| state_to_json(c.op())),
    };
    emit_json(&report, out)?;
    if assert_jm && !report.jointly_measurable {
        return Err(domain(format!(
            "pair (lambda={lambda}, gamma={gamma}) is not jointly measurable at d={dim}"
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct TomographyReport {
    dim: usize,
    lambda: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    interior_gamma: Option<f64>,
    generator: StateJson,
    min_abs_coefficient: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    true_state: Option<StateJson>,
    reconstructed_state: StateJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_entrywise_error: Option<f64>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_tomography(
    dim: usize,
    lambda: f64,
    interior: Option<f64>,
    state: Option<&Path>,
    probs: Option<&Path>,
    seed: u64,
    out: Option<&Path>,
    probs_out: Option<&Path>,
    tol: &Tolerances<f64>,
) -> Result<(), AppError> {
    if dim < 2 {
        return Err(usage("--dim must be at least 2"));
    }
    let ws = WeylSystem::<f64>::cyclic(dim).map_err(usage)?;
    let generator = match interior {
        Some(gamma) => {
            construct_ic_joint(lambda, gamma, dim, tol)
                .map_err(domain)?
                .generator
        }
        None => {
            if dim.is_multiple_of(2) {
                return Err(domain(format!(
                    "the minimal-noise generator at d={dim} is not informationally complete \
                     (even dimension); use --interior <gamma> with 0 < gamma < gamma_max"
                )));
            }
            boundary_generator(lambda, &ws).map_err(usage)?
        }
    };
    let pipeline = TomographyPipeline::new(&generator, &ws, tol).map_err(domain)?;
    if pipeline.min_abs_coefficient() <= tol.ic {
        return Err(domain(
            "generator is not informationally complete; use --interior <gamma>".to_string(),
        ));
    }

    let true_state: Option<DensityOperator<f64>> = match state {
        Some(path) => {
            let json: StateJson = read_json(path)?;
            let op = state_from_json(&json).map_err(usage)?;
            let rho = DensityOperator::new(op);
            rho.validate(tol.eq, tol.psd).map_err(domain)?;
            Some(rho)
        }
        None if probs.is_none() => Some(random_state(dim, &mut rng_from_seed(seed))),
        None => None,
    };

    let probabilities: Vec<f64> = match probs {
        Some(path) => read_prob_table(path, dim)?,
        None => pipeline.forward(true_state.as_ref().expect("state generated above").op()),
    };
    if let Some(path) = probs_out {
        let mut text = String::from("j,k,probability\n");
        for j in 0..dim {
            for k in 0..dim {
                writeln!(text, "{j},{k},{}", sig12(probabilities[j * dim + k]))
                    .expect("string write");
            }
        }
        emit_text(&text, Some(path))?;
    }

    let reconstructed = pipeline.reconstruct(&probabilities, tol).map_err(domain)?;
    let max_error = true_state
        .as_ref()
        .map(|rho| reconstructed.max_abs_diff(rho.op()));
    let report = TomographyReport {
        dim,
        lambda,
        interior_gamma: interior,
        generator: state_to_json(generator.op()),
        min_abs_coefficient: pipeline.min_abs_coefficient(),
        true_state: true_state.as_ref().map(|r| state_to_json(r.op())),
        reconstructed_state: state_to_json(&reconstructed),
        max_entrywise_error: max_error,
    };
    emit_json(&report, out)?;
    if let Some(err) = max_error {
        if err > 1e-8 {
            return Err(domain(format!(
                "tomography round-trip error {err:.3e} exceeds 1e-8"
            )));
        }
    }
    Ok(())
}

fn read_prob_table(path: &Path, dim: usize) -> Result<Vec<f64>, AppError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let mut table = vec![None; dim * dim];
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if lineno == 0 && fields.first().map(|f| f.parse::<usize>().is_err()) == Some(true) {
            continue; // header row
        }
        if fields.len() != 3 {
            return Err(usage(format!(
                "{}:{}: expected `j,k,probability`",
                path.display(),
                lineno + 1
            )));
        }
        let j: usize = fields[0]
            .parse()
            .map_err(|e| usage(format!("{}:{}: {e}", path.display(), lineno + 1)))?;
        let k: usize = fields[1]
            .parse()
            .map_err(|e| usage(format!("{}:{}: {e}", path.display(), lineno + 1)))?;
        let p: f64 = fields[2]
            .parse()
            .map_err(|e| usage(format!("{}:{}: {e}", path.display(), lineno + 1)))?;
        if j >= dim || k >= dim {
            return Err(usage(format!(
                "{}:{}: outcome ({j}, {k}) out of range for dimension {dim}",
                path.display(),
                lineno + 1
            )));
        }
        if table[j * dim + k].replace(p).is_some() {
            return Err(usage(format!(
                "{}:{}: duplicate outcome ({j}, {k})",
                path.display(),
                lineno + 1
            )));
        }
    }
    table
        .into_iter()
        .collect::<Option<Vec<f64>>>()
        .ok_or_else(|| usage(format!("{}: missing outcomes", path.display())))
}

#[derive(Serialize)]
struct IcCheckReport {
    source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    span_rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    is_ic_by_span: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_abs_coefficient: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    is_ic_by_criterion: Option<bool>,
    informationally_complete: bool,
}

fn cmd_ic_check(
    povm: Option<&Path>,
    state: Option<&Path>,
    factors: Option<Vec<usize>>,
    out: Option<&Path>,
    tol: &Tolerances<f64>,
) -> Result<(), AppError> {
    let report = match (povm, state) {
        (Some(path), None) => {
            let json: PovmJson = read_json(path)?;
            let povm = povm_from_json(&json).map_err(usage)?;
            let span = ic_by_span(&povm, tol);
            IcCheckReport {
                source: format!("povm:{}", path.display()),
                span_rank: Some(span.span_rank),
                is_ic_by_span: Some(span.is_ic_by_span),
                min_abs_coefficient: None,
                is_ic_by_criterion: None,
                informationally_complete: span.is_ic_by_span,
            }
        }
        (None, Some(path)) => {
            let factors =
                factors.ok_or_else(|| usage("--state needs --factors to fix the group"))?;
            let ws = build_weyl_system::<f64>(factors).map_err(usage)?;
            let json: StateJson = read_json(path)?;
            let op = state_from_json(&json).map_err(usage)?;
            if op.dim() != ws.dim() {
                return Err(usage(format!(
                    "state dimension {} does not match group order {}",
                    op.dim(),
                    ws.dim()
                )));
            }
            let generator = DensityOperator::new(op);
            generator.validate(tol.eq, tol.psd).map_err(domain)?;
            let crit = ic_by_criterion(&generator, &ws, tol);
            IcCheckReport {
                source: format!("state:{}", path.display()),
                span_rank: None,
                is_ic_by_span: None,
                min_abs_coefficient: Some(crit.min_abs_coefficient),
                is_ic_by_criterion: Some(crit.is_ic_by_criterion),
                informationally_complete: crit.is_ic_by_criterion,
            }
        }
        _ => {
            return Err(usage(
                "pass exactly one of --povm <file> or --state <file> --factors <d1,d2,...>",
            ))
        }
    };
    let complete = report.informationally_complete;
    emit_json(&report, out)?;
    if !complete {
        return Err(domain("not informationally complete".to_string()));
    }
    Ok(())
}

#[derive(Serialize)]
struct CovarianceJson {
    u_covariant: bool,
    v_invariant: bool,
    u_invariant: bool,
    v_covariant: bool,
}

#[derive(Serialize)]
struct PhaseSpaceCovarianceJson {
    covariant: bool,
    max_deviation: f64,
}

#[derive(Serialize)]
struct ValidateReport {
    dim: usize,
    outcomes: usize,
    positive: bool,
    complete: bool,
    min_eigenvalue: f64,
    completeness_error: f64,
    valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    covariance: Option<CovarianceJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phase_space_covariance: Option<PhaseSpaceCovarianceJson>,
}

fn cmd_validate(path: &Path, out: Option<&Path>, tol: &Tolerances<f64>) -> Result<(), AppError> {
    let json: PovmJson = read_json(path)?;
    let povm = povm_from_json(&json).map_err(usage)?;
    let validation = povm.validate(tol.eq, tol.psd).map_err(domain)?;
    let mut covariance = None;
    let mut phase_space = None;
    match povm.outcomes() {
        Outcomes::Single(g) if g.order() == povm.dim() => {
            let ws = WeylSystem::<f64>::new(g.clone());
            let r = check_covariance(&povm, &ws, tol.eq).map_err(domain)?;
            covariance = Some(CovarianceJson {
                u_covariant: r.u_covariant,
                v_invariant: r.v_invariant,
                u_invariant: r.u_invariant,
                v_covariant: r.v_covariant,
            });
        }
        Outcomes::Pair(g) if g.order() == povm.dim() => {
            let ws = WeylSystem::<f64>::new(g.clone());
            let dev = pair_covariance_deviation(&povm, &ws).map_err(domain)?;
            phase_space = Some(PhaseSpaceCovarianceJson {
                covariant: dev < tol.eq,
                max_deviation: dev,
            });
        }
        _ => {}
    }
    let report = ValidateReport {
        dim: povm.dim(),
        outcomes: povm.effects().len(),
        positive: validation.positive,
        complete: validation.complete,
        min_eigenvalue: validation.min_eigenvalue,
        completeness_error: validation.completeness_error,
        valid: validation.is_valid(),
        covariance,
        phase_space_covariance: phase_space,
    };
    let valid = report.valid;
    emit_json(&report, out)?;
    if !valid {
        return Err(domain("not a valid POVM".to_string()));
    }
    Ok(())
}

fn pair_covariance_deviation(povm: &Povm<f64>, ws: &WeylSystem<f64>) -> qjoint::Result<f64> {
    let d = ws.dim();
    let g = ws.group();
    let mut worst: f64 = 0.0;
    for x in 0..d {
        for y in 0..d {
            let w = ws.weyl(x, y)?;
            for j in 0..d {
                for k in 0..d {
                    let moved = povm.effect_at(j, k)?.conjugate_by(&w);
                    let target = povm.effect_at(g.add(j, x), g.add(k, y))?;
                    worst = worst.max(moved.max_abs_diff(target));
                }
            }
        }
    }
    Ok(worst)
}

#[derive(Serialize)]
struct SicDemoReport {
    lambda: f64,
    theta: f64,
    marginal_lambda: f64,
    marginal_gamma: f64,
    pairwise_overlaps: Vec<Vec<f64>>,
    overlap_spread: f64,
    is_ic_by_span: bool,
    observable: PovmJson,
}

fn cmd_sic_demo(
    lambda: Option<f64>,
    theta: Option<f64>,
    out: Option<&Path>,
    tol: &Tolerances<f64>,
) -> Result<(), AppError> {
    let lambda = lambda.unwrap_or(1.0 / 3.0f64.sqrt());
    let theta = theta.unwrap_or(std::f64::consts::FRAC_PI_4);
    let cfg = QubitSequentialConfig::new(lambda, theta).map_err(usage)?;
    let joint = cfg.joint_observable().map_err(domain)?;
    let effects = joint.effects();
    let overlaps: Vec<Vec<f64>> = (0..4)
        .map(|i| {
            (0..4)
                .map(|j| effects[i].trace_product(&effects[j]).re)
                .collect()
        })
        .collect();
    let mut off: Vec<f64> = (0..4)
        .flat_map(|i| (0..4).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| overlaps[i][j])
        .collect();
    off.sort_by(|a, b| a.partial_cmp(b).expect("finite overlaps"));
    let spread = off.last().unwrap() - off.first().unwrap();
    let (first, second) = marginals(&joint).map_err(domain)?;
    // marginal noise read off the Bloch components of the first effects
    let marginal_lambda = 2.0 * first.effect(0).get(0, 1).re;
    let marginal_gamma = -(2.0 * second.effect(0).get(0, 1).im);
    let report = SicDemoReport {
        lambda,
        theta,
        marginal_lambda,
        marginal_gamma,
        pairwise_overlaps: overlaps,
        overlap_spread: spread,
        is_ic_by_span: ic_by_span(&joint, tol).is_ic_by_span,
        observable: povm_to_json(&joint),
    };
    emit_json(&report, out)
}
