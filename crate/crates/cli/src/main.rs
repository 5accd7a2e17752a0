//! `fluxform` — flux exterior derivatives, chain integrals, and identity
//! checks from the command line, with deterministic JSON reports.
//!
//! Exit codes: 0 success, 2 argument/configuration/format problems,
//! 3 sampling failures (a stencil or quadrature node the field cannot
//! answer), 4 bracketing failures in the mean-value search.

mod config;
mod report;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use config::{ConfigFile, Effective, FlagOverrides};
use fluxform_core::chains::{Block, Chain, ChainFile, ParamRegistry, SingularBlock};
use fluxform_core::deriv::{
    convergence_order, exterior_derivative_at, exterior_derivative_refined, DerivConfig,
};
use fluxform_core::forms::{field_from_cloud, parse_form, DataCloud, Matching};
use fluxform_core::integrate::integrate_over_chain;
use fluxform_core::verify::{d_squared_tensor, mvt_locate, stokes_report};
use fluxform_core::{Error, FormField, Result};
use report::{tensor_json, RunReport, Timings};

#[derive(Parser)]
#[command(
    name = "fluxform",
    version,
    about = "Mesh-free exterior calculus: derivatives as boundary flux, chain integrals, Stokes/MVT checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Flux exterior derivative at a point
    Derive(DeriveArgs),
    /// Integral of a form over a chain
    Integrate(IntegrateArgs),
    /// Both sides of the Stokes identity on a chain
    Stokes(StokesArgs),
    /// Mean-value point via nested trisection
    Mvt(MvtArgs),
    /// D(D omega) residual at a point
    Dsq(DsqArgs),
    /// Empirical convergence order of the stencil
    Convergence(ConvergenceArgs),
}

/// Where the form comes from: an expression or a data-cloud file.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Form expression, e.g. "x1*dx2^dx3" (see the grammar in the README)
    #[arg(long)]
    form: Option<String>,
    /// Data-cloud JSON file with point samples of the form
    #[arg(long)]
    cloud: Option<PathBuf>,
}

#[derive(Args)]
struct CommonFlags {
    /// Partial config JSON; flags beat the file, the file beats defaults
    #[arg(long)]
    config: Option<PathBuf>,
    /// Also write the report to this file
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include wall-clock timings in the report (breaks byte-reproducibility)
    #[arg(long)]
    timings: bool,
}

#[derive(Args, Default)]
struct NumericFlags {
    /// Stencil half-width
    #[arg(long)]
    eps: Option<f64>,
    /// Subdivisions per axis (quadrature; for derive: stencil face grid)
    #[arg(long)]
    subdiv: Option<usize>,
    /// Relative tolerance for quadrature refinement by doubling
    #[arg(long)]
    rtol: Option<f64>,
    /// Richardson extrapolation levels for the derivative
    #[arg(long)]
    richardson: Option<usize>,
}

#[derive(Args)]
struct DeriveArgs {
    #[command(flatten)]
    source: Source,
    /// Form degree (inferred for expressions, cross-checked for clouds)
    #[arg(long)]
    degree: Option<usize>,
    /// Evaluation point, comma-separated coordinates
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    at: Vec<f64>,
    #[command(flatten)]
    num: NumericFlags,
    #[command(flatten)]
    common: CommonFlags,
}

#[derive(Args)]
struct IntegrateArgs {
    #[command(flatten)]
    source: Source,
    /// Chain JSON file or a builtin: unit-interval, unit-square, unit-cube,
    /// unit-square-boundary, unit-cube-boundary
    #[arg(long, required = true)]
    chain: String,
    #[command(flatten)]
    num: NumericFlags,
    #[command(flatten)]
    common: CommonFlags,
}

#[derive(Args)]
struct StokesArgs {
    #[command(flatten)]
    source: Source,
    /// Chain JSON file or a builtin name (dimension k; the form has k-1)
    #[arg(long, required = true)]
    chain: String,
    #[command(flatten)]
    num: NumericFlags,
    #[command(flatten)]
    common: CommonFlags,
}

#[derive(Args)]
struct MvtArgs {
    #[command(flatten)]
    source: Source,
    /// Block intervals a1,b1,a2,b2,...
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    block: Vec<f64>,
    /// Trisection depth cap
    #[arg(long)]
    max_depth: Option<usize>,
    /// Stop refining when the longest side drops below this
    #[arg(long)]
    size_tol: Option<f64>,
    #[command(flatten)]
    num: NumericFlags,
    #[command(flatten)]
    common: CommonFlags,
}

#[derive(Args)]
struct DsqArgs {
    #[command(flatten)]
    source: Source,
    /// Form degree (inferred for expressions, cross-checked for clouds)
    #[arg(long)]
    degree: Option<usize>,
    /// Evaluation point, comma-separated coordinates
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    at: Vec<f64>,
    /// Outer stencil half-width (default 1e-3)
    #[arg(long)]
    eps_outer: Option<f64>,
    /// Inner stencil half-width (default 1e-4)
    #[arg(long)]
    eps_inner: Option<f64>,
    #[command(flatten)]
    num: NumericFlags,
    #[command(flatten)]
    common: CommonFlags,
}

#[derive(Args)]
struct ConvergenceArgs {
    #[command(flatten)]
    source: Source,
    /// Form degree (inferred for expressions, cross-checked for clouds)
    #[arg(long)]
    degree: Option<usize>,
    /// Evaluation point, comma-separated coordinates
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    at: Vec<f64>,
    /// Strictly decreasing stencil widths, comma-separated (at least 3)
    #[arg(long, value_delimiter = ',', required = true)]
    eps_list: Vec<f64>,
    #[command(flatten)]
    num: NumericFlags,
    #[command(flatten)]
    common: CommonFlags,
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let started = Instant::now();
    let cli = Cli::parse();
    if let Err(e) = run(cli, started) {
        let (payload, code) = report::error_json(&e);
        let text =
            serde_json::to_string_pretty(&payload).expect("error serialization cannot fail");
        println!("{text}");
        std::process::exit(code);
    }
}

fn run(cli: Cli, started: Instant) -> Result<()> {
    match cli.command {
        Cmd::Derive(a) => cmd_derive(a, started),
        Cmd::Integrate(a) => cmd_integrate(a, started),
        Cmd::Stokes(a) => cmd_stokes(a, started),
        Cmd::Mvt(a) => cmd_mvt(a, started),
        Cmd::Dsq(a) => cmd_dsq(a, started),
        Cmd::Convergence(a) => cmd_convergence(a, started),
    }
}

// ---------------------------------------------------------------------------
// shared plumbing

fn effective(common: &CommonFlags, flags: FlagOverrides) -> Result<Effective> {
    let file = match &common.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    Ok(Effective::resolve(&file, &flags))
}

fn numeric_overrides(num: &NumericFlags) -> FlagOverrides {
    FlagOverrides {
        eps: num.eps,
        subdiv: num.subdiv,
        rtol: num.rtol,
        richardson: num.richardson,
        ..FlagOverrides::default()
    }
}

/// Resolve the form source.  `n` comes from the surrounding geometry (point
/// length or chain); `degree` likewise when the command pins it, otherwise
/// from `--degree`, otherwise by parse inference.
fn load_field(
    source: &Source,
    n: usize,
    degree: Option<usize>,
) -> Result<(FormField, &'static str, Value)> {
    if let Some(path) = &source.cloud {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Format {
            what: "data cloud",
            detail: format!("{}: {e}", path.display()),
        })?;
        let cloud = DataCloud::from_json(&text)?;
        if cloud.n != n {
            return Err(Error::DimensionMismatch {
                context: "cloud ambient dimension",
                expected: n,
                actual: cloud.n,
            });
        }
        if let Some(d) = degree {
            if cloud.degree != d {
                return Err(Error::Config(format!(
                    "cloud has degree {}, but this invocation needs degree {d}",
                    cloud.degree
                )));
            }
        }
        let field = field_from_cloud(&cloud, Matching::default())?;
        Ok((field, "cloud", json!(path.display().to_string())))
    } else {
        let text = source.form.as_deref().expect("clap guarantees one source");
        let deg = match degree {
            Some(d) => d,
            None => infer_degree(text, n)?,
        };
        let field = parse_form(text, n, deg)?.to_field();
        Ok((field, "form", json!(text)))
    }
}

/// Parse with degree 0; a degree-mismatch report tells us the actual term
/// degree and we parse once more with that.
fn infer_degree(text: &str, n: usize) -> Result<usize> {
    match parse_form(text, n, 0) {
        Ok(_) => Ok(0),
        Err(Error::DegreeMismatch { found, .. }) => {
            parse_form(text, n, found)?;
            Ok(found)
        }
        Err(e) => Err(e),
    }
}

fn load_chain(spec: &str) -> Result<Chain> {
    let inclusion = |k: usize| Chain::from_block(SingularBlock::inclusion(Block::unit(k)));
    Ok(match spec {
        "unit-interval" => inclusion(1),
        "unit-square" => inclusion(2),
        "unit-cube" => inclusion(3),
        "unit-square-boundary" => inclusion(2).boundary(),
        "unit-cube-boundary" => inclusion(3).boundary(),
        path => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Format {
                what: "chain file",
                detail: format!("{path}: {e}"),
            })?;
            ChainFile::from_json(&text)?.build(&ParamRegistry::new())?
        }
    })
}

fn emit(mut rep: RunReport, common: &CommonFlags, started: Instant) -> Result<()> {
    if common.timings {
        rep.timings = Some(Timings {
            total_ms: started.elapsed().as_secs_f64() * 1e3,
        });
    }
    let text = serde_json::to_string_pretty(&rep).expect("report serialization cannot fail");
    if let Some(path) = &common.out {
        std::fs::write(path, format!("{text}\n")).map_err(|e| Error::Format {
            what: "report file",
            detail: format!("{}: {e}", path.display()),
        })?;
    }
    println!("{text}");
    Ok(())
}

fn config_value(eff: &Effective) -> Value {
    serde_json::to_value(eff).expect("config serialization cannot fail")
}

// ---------------------------------------------------------------------------
// commands

fn cmd_derive(args: DeriveArgs, started: Instant) -> Result<()> {
    let eff = effective(&args.common, numeric_overrides(&args.num))?;
    let (field, src_key, src_val) = load_field(&args.source, args.at.len(), args.degree)?;
    let cfg = DerivConfig {
        face_subdivisions: eff.face_subdivisions_for_derive(),
        ..eff.deriv_config()
    };
    let outputs = if eff.richardson >= 1 {
        let r = exterior_derivative_refined(&field, &args.at, &cfg)?;
        json!({
            "derivative": tensor_json(&r.tensor),
            "error_estimate": r.error_estimate,
            "observed_order": r.observed_order,
            "reliable": r.reliable,
        })
    } else {
        json!({ "derivative": tensor_json(&exterior_derivative_at(&field, &args.at, &cfg)?) })
    };
    emit(
        RunReport {
            command: "derive",
            version: fluxform_core::VERSION,
            inputs: json!({ src_key: src_val, "at": args.at, "config": config_value(&eff) }),
            outputs,
            timings: None,
        },
        &args.common,
        started,
    )
}

fn cmd_integrate(args: IntegrateArgs, started: Instant) -> Result<()> {
    let eff = effective(&args.common, numeric_overrides(&args.num))?;
    let chain = load_chain(&args.chain)?;
    let (field, src_key, src_val) = load_field(&args.source, chain.n(), Some(chain.dim()))?;
    let value = integrate_over_chain(&field, &chain, &eff.quadrature()?)?;
    emit(
        RunReport {
            command: "integrate",
            version: fluxform_core::VERSION,
            inputs: json!({ src_key: src_val, "chain": args.chain, "config": config_value(&eff) }),
            outputs: json!({ "integral": value }),
            timings: None,
        },
        &args.common,
        started,
    )
}

fn cmd_stokes(args: StokesArgs, started: Instant) -> Result<()> {
    let eff = effective(&args.common, numeric_overrides(&args.num))?;
    let chain = load_chain(&args.chain)?;
    if chain.dim() == 0 {
        return Err(Error::Config(
            "stokes needs a chain of dimension at least 1".to_string(),
        ));
    }
    let (field, src_key, src_val) = load_field(&args.source, chain.n(), Some(chain.dim() - 1))?;
    let r = stokes_report(&field, &chain, &eff.deriv_config(), &eff.quadrature()?)?;
    emit(
        RunReport {
            command: "stokes",
            version: fluxform_core::VERSION,
            inputs: json!({ src_key: src_val, "chain": args.chain, "config": config_value(&eff) }),
            outputs: json!({ "lhs": r.boundary, "rhs": r.interior, "residual": r.residual }),
            timings: None,
        },
        &args.common,
        started,
    )
}

fn cmd_mvt(args: MvtArgs, started: Instant) -> Result<()> {
    let flags = FlagOverrides {
        max_depth: args.max_depth,
        size_tol: args.size_tol,
        ..numeric_overrides(&args.num)
    };
    let eff = effective(&args.common, flags)?;
    if args.block.len() < 2 || !args.block.len().is_multiple_of(2) {
        return Err(Error::Config(format!(
            "--block expects interval pairs a1,b1,a2,b2,..., got {} numbers",
            args.block.len()
        )));
    }
    let block = Block::new(args.block.chunks(2).map(|c| (c[0], c[1])).collect())?;
    let k = block.dim();
    let (field, src_key, src_val) = load_field(&args.source, k, Some(k - 1))?;
    let r = mvt_locate(
        &field,
        &block,
        &eff.deriv_config(),
        &eff.quadrature()?,
        eff.max_depth,
        eff.size_tol,
    )?;
    emit(
        RunReport {
            command: "mvt",
            version: fluxform_core::VERSION,
            inputs: json!({ src_key: src_val, "block": args.block, "config": config_value(&eff) }),
            outputs: json!({
                "lhs": r.target,
                "rhs": r.attained,
                "residual": r.residual,
                "xi": r.xi,
                "depth": r.depth,
                "level_averages": r.level_averages,
            }),
            timings: None,
        },
        &args.common,
        started,
    )
}

fn cmd_dsq(args: DsqArgs, started: Instant) -> Result<()> {
    let flags = FlagOverrides {
        eps_outer: args.eps_outer,
        eps_inner: args.eps_inner,
        ..numeric_overrides(&args.num)
    };
    let eff = effective(&args.common, flags)?;
    let (field, src_key, src_val) = load_field(&args.source, args.at.len(), args.degree)?;
    let outer = DerivConfig {
        eps: eff.eps_outer,
        ..eff.deriv_config()
    };
    let inner = DerivConfig {
        eps: eff.eps_inner,
        ..eff.deriv_config()
    };
    let t = d_squared_tensor(&field, &args.at, &outer, &inner)?;
    let residual = t.max_abs();
    emit(
        RunReport {
            command: "dsq",
            version: fluxform_core::VERSION,
            inputs: json!({ src_key: src_val, "at": args.at, "config": config_value(&eff) }),
            outputs: json!({
                "lhs": residual,
                "rhs": 0.0,
                "residual": residual,
                "d_squared": tensor_json(&t),
            }),
            timings: None,
        },
        &args.common,
        started,
    )
}

fn cmd_convergence(args: ConvergenceArgs, started: Instant) -> Result<()> {
    let eff = effective(&args.common, numeric_overrides(&args.num))?;
    let (field, src_key, src_val) = load_field(&args.source, args.at.len(), args.degree)?;
    let cfg = eff.deriv_config();
    // reference: Richardson-refined estimate below the finest requested eps
    let eps_min = args
        .eps_list
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let ref_cfg = DerivConfig {
        eps: eps_min / 2.0,
        richardson_levels: 2,
        ..cfg
    };
    let reference = exterior_derivative_refined(&field, &args.at, &ref_cfg)?.tensor;
    let order = convergence_order(&field, &args.at, &args.eps_list, &reference, &cfg)?;
    let mut errors = Vec::with_capacity(args.eps_list.len());
    for &eps in &args.eps_list {
        let level = DerivConfig { eps, ..cfg };
        errors.push(
            exterior_derivative_at(&field, &args.at, &level)?.max_component_diff(&reference),
        );
    }
    emit(
        RunReport {
            command: "convergence",
            version: fluxform_core::VERSION,
            inputs: json!({
                src_key: src_val,
                "at": args.at,
                "eps_list": args.eps_list,
                "config": config_value(&eff),
            }),
            outputs: json!({
                "order": order,
                "errors": errors,
                "reference": tensor_json(&reference),
            }),
            timings: None,
        },
        &args.common,
        started,
    )
}
