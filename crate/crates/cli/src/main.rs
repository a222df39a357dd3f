//! `conifold`: batch front-end for conifold deformation arithmetic.
//!
//! Reads a JSON job config describing a conifold (dimension, ends with link
//! sources and rates, optional Betti data), runs the requested computation
//! and emits a deterministic report as a table, JSON or CSV.
//!
//! Exit codes: 0 success, 2 refusal (exceptional weight or incomplete
//! spectrum, with a witness on stderr), 1 structural or numeric error.

mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use conifold_core::exact::{rational_string, Rat};
use conifold_core::weights::DEFAULT_MATCH_TOL;
use conifold_core::{
    ac_laplacian_dims, cs_laplacian_dims, csac_laplacian_dims, dim_ac, dim_compact, dim_cs,
    dim_csac, exceptional_set, stability_check, ConifoldModel, EndKind, Error, Result,
};

use config::{load_config, resolve, Computation, ResolvedJob};
use report::{Bundle, Format};

#[derive(Parser)]
#[command(
    name = "conifold",
    about = "Exceptional weights, Fredholm dimensions, stability and moduli dimensions of special Lagrangian conifolds",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-end link spectra
    Spectrum(JobArgs),
    /// Exceptional weights over the scan interval
    Weights(JobArgs),
    /// Kernel/cokernel dimensions of the weighted Laplacian at the config rates
    Fredholm(JobArgs),
    /// Stability of the cone ends (needs sym_dim)
    Stability(JobArgs),
    /// Moduli-space dimension for the model's deformation setting
    Dim(JobArgs),
    /// Betti data assembled from a complex-pair file
    Topology(JobArgs),
}

#[derive(clap::Args)]
struct JobArgs {
    /// Job description file (JSON)
    #[arg(long)]
    config: PathBuf,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format, overriding the config (table|json|csv)
    #[arg(long)]
    format: Option<String>,
    /// Match tolerance for floating-point spectra, overriding
    /// CONIFOLD_MATCH_TOL (default 1e-6)
    #[arg(long)]
    match_tol: Option<f64>,
    /// Weight scan interval "a:b" (rationals), overriding the config
    #[arg(long)]
    scan: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (computation, args) = match &cli.command {
        Command::Spectrum(a) => (Computation::Spectrum, a),
        Command::Weights(a) => (Computation::Weights, a),
        Command::Fredholm(a) => (Computation::Fredholm, a),
        Command::Stability(a) => (Computation::Stability, a),
        Command::Dim(a) => (Computation::Dim, a),
        Command::Topology(a) => (Computation::Topology, a),
    };
    match run(computation, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_refusal() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn match_tolerance(args: &JobArgs) -> Result<f64> {
    if let Some(t) = args.match_tol {
        return Ok(t);
    }
    match std::env::var("CONIFOLD_MATCH_TOL") {
        Ok(s) => s
            .parse::<f64>()
            .map_err(|_| Error::Structural(format!("CONIFOLD_MATCH_TOL: invalid float '{s}'"))),
        Err(_) => Ok(DEFAULT_MATCH_TOL),
    }
}

fn parse_scan_flag(s: &str) -> Result<(Rat, Rat)> {
    let (a, b) = s.split_once(':').ok_or_else(|| {
        Error::Structural(format!("--scan expects 'a:b', got '{s}'"))
    })?;
    Ok((
        conifold_core::exact::parse_rational(a)?,
        conifold_core::exact::parse_rational(b)?,
    ))
}

fn run(computation: Computation, args: &JobArgs) -> Result<()> {
    let config = load_config(&args.config)?;
    // the bundle carries every computation the config requests; without a
    // compute list, just the subcommand's
    let requested: Vec<Computation> = match &config.compute {
        None => vec![computation],
        Some(compute) => {
            let requested: Result<Vec<Computation>> =
                compute.iter().map(|s| Computation::parse(s)).collect();
            let requested = requested?;
            if !requested.contains(&computation) {
                return Err(Error::Structural(format!(
                    "/compute: config does not request '{computation:?}'; it lists {compute:?}"
                )));
            }
            requested
        }
    };
    let match_tol = match_tolerance(args)?;
    let mut config = config;
    if let Some(scan) = &args.scan {
        // apply before resolution so derived cutoffs cover the new interval
        let (from, to) = parse_scan_flag(scan)?;
        config.weight_scan = Some(config::ScanConfig {
            from: serde_json::Value::String(rational_string(&from)),
            to: serde_json::Value::String(rational_string(&to)),
        });
    }
    let job = resolve(&config, &args.config, &requested)?;
    let bundle = dispatch(&requested, &job, match_tol)?;
    let format_name = args
        .format
        .as_deref()
        .or(job.format.as_deref())
        .unwrap_or("table");
    let format = Format::parse(format_name).map_err(Error::Structural)?;
    let text = bundle.emit(format);
    match &args.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Structural(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn ends_summary(model: &ConifoldModel) -> serde_json::Value {
    let ends: Vec<serde_json::Value> = model
        .ends
        .iter()
        .enumerate()
        .map(|(i, e)| {
            json!({
                "index": i,
                "kind": e.kind.label(),
                "rate": rational_string(&e.rate),
                "sym_dim": e.sym_dim,
            })
        })
        .collect();
    serde_json::Value::Array(ends)
}

fn require_model<'j>(job: &'j ResolvedJob, what: &str) -> Result<&'j ConifoldModel> {
    job.model.as_ref().ok_or_else(|| {
        Error::Structural(format!("/ends: '{what}' needs at least one end"))
    })
}

fn split_rates(model: &ConifoldModel, rates: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let mut mu = Vec::new();
    let mut lambda = Vec::new();
    for (end, rate) in model.ends.iter().zip(rates) {
        match end.kind {
            EndKind::Cs => mu.push(rate.clone()),
            EndKind::Ac => lambda.push(rate.clone()),
        }
    }
    (mu, lambda)
}

fn dispatch(computations: &[Computation], job: &ResolvedJob, match_tol: f64) -> Result<Bundle> {
    let mut bundle = Bundle::new(job.m);
    if let Some(model) = &job.model {
        bundle.insert("ends", &ends_summary(model));
    }
    for computation in computations {
        fill_section(*computation, job, match_tol, &mut bundle)?;
    }
    Ok(bundle)
}

fn fill_section(
    computation: Computation,
    job: &ResolvedJob,
    match_tol: f64,
    bundle: &mut Bundle,
) -> Result<()> {
    match computation {
        Computation::Spectrum => {
            let model = require_model(job, "spectrum")?;
            let spectra: Vec<_> = model.ends.iter().map(|e| &e.spectrum).collect();
            bundle.insert("spectrum", &spectra);
        }
        Computation::Weights => {
            let model = require_model(job, "weights")?;
            let set = exceptional_set(&model.spectra(), job.m, &job.scan.0, &job.scan.1)?;
            bundle.insert("weights", &set);
        }
        Computation::Fredholm => {
            let model = require_model(job, "fredholm")?;
            let (mu, lambda) = split_rates(model, &job.rates);
            let report = if model.is_all(EndKind::Cs) {
                cs_laplacian_dims(model, &mu, match_tol)?
            } else if model.is_all(EndKind::Ac) {
                ac_laplacian_dims(model, &lambda, match_tol)?
            } else {
                csac_laplacian_dims(model, &mu, &lambda, match_tol)?
            };
            bundle.insert("fredholm", &report);
        }
        Computation::Stability => {
            let model = require_model(job, "stability")?;
            let mut reports = Vec::new();
            for (i, end) in model.ends.iter().enumerate() {
                if end.sym_dim.is_some() {
                    reports.push(stability_check(end, job.m, i)?);
                }
            }
            if reports.is_empty() {
                return Err(Error::Structural(
                    "/ends: stability needs at least one end with sym_dim".into(),
                ));
            }
            bundle.insert("stability", &reports);
        }
        Computation::Dim => {
            let report = match &job.model {
                None => {
                    let topology = job.topology.as_ref().ok_or_else(|| {
                        Error::Structural(
                            "/topology: the compact case needs Betti data (b1)".into(),
                        )
                    })?;
                    dim_compact(topology.b1)
                }
                Some(model) => {
                    let (mu, lambda) = split_rates(model, &job.rates);
                    if model.is_all(EndKind::Cs) {
                        dim_cs(model, &mu, match_tol)?
                    } else if model.is_all(EndKind::Ac) {
                        dim_ac(model, &lambda, match_tol)?
                    } else {
                        dim_csac(model, &mu, &lambda, match_tol)?
                    }
                }
            };
            bundle.insert("dim", &report);
        }
        Computation::Topology => {
            let topology = job.topology.as_ref().ok_or_else(|| {
                Error::Structural(
                    "/topology: provide a complex file or Betti overrides".into(),
                )
            })?;
            bundle.insert("topology", topology);
        }
    }
    Ok(())
}
