//! Command-line surface: scenario reproduction with JSON reports, single
//! point verification, parameter sweeps, and structure-file diagnostics.

mod report;
mod scan;
mod scenarios;

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;
use strominger_core::anomaly::InstantonModel;
use strominger_core::family::{build_family_point, FamilyId, FamilyParams};
use strominger_core::feasibility::{balanced_feasible, FeasibilityVerdict};
use strominger_core::Scalar;

use report::{fmt_scalar, Inputs, Oracle, Outputs, Report, SCHEMA_VERSION};
use scenarios::EvalMode;

#[derive(Parser)]
#[command(
    name = "strominger",
    about = "Exact verification of invariant Strominger-system data on 6-dimensional nilmanifolds",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the full scenario catalog and compare against the oracle table.
    /// Exit code 0 only when every scenario matches.
    Reproduce {
        /// Arithmetic mode: exact | approx
        #[arg(long, default_value = "exact")]
        mode: String,
        /// Write the machine-readable report bundle to this path
        #[arg(long)]
        json: Option<PathBuf>,
        /// Run a single named scenario instead of the whole catalog
        #[arg(long)]
        scenario: Option<String>,
    },
    /// Evaluate a single family point.
    Verify {
        /// Family id: xs | h5-disk | h4-disk | torus | iwasawa
        #[arg(long)]
        family: String,
        /// Family parameter s as a fraction, e.g. 1/4
        #[arg(long)]
        s: Option<String>,
        /// Deformation parameter t, e.g. "3/10+2/5i"
        #[arg(long)]
        t: Option<String>,
        /// Exact |t| (required for exact adapted frames off the real axis)
        #[arg(long = "abs-t")]
        abs_t: Option<String>,
        /// Metric scale r (nonzero)
        #[arg(long)]
        r: Option<String>,
        /// Instanton model: flat | ccdlmz
        #[arg(long, default_value = "flat")]
        instanton: String,
        #[arg(long, default_value = "exact")]
        mode: String,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Sweep a parameter grid; one deterministic row per grid point.
    Scan {
        #[arg(long)]
        family: String,
        #[arg(long)]
        s: Option<String>,
        #[arg(long)]
        r: Option<String>,
        /// Grid size (NxN on the disk family, N radial points on the
        /// torus-bundle family); 0 gives an empty table
        #[arg(long, default_value_t = 11)]
        grid: usize,
        #[arg(long, default_value = "flat")]
        instanton: String,
        #[arg(long, default_value = "exact")]
        mode: String,
        /// Output format: csv | json
        #[arg(long, default_value = "csv")]
        format: String,
        /// Output path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse a structure-equation file and print diagnostics.
    Check {
        /// Path to the structure file
        file: PathBuf,
        /// Parameter bindings, repeatable: --param s=1/4
        #[arg(long = "param")]
        params: Vec<String>,
    },
}

fn parse_mode(mode: &str) -> Result<EvalMode> {
    match mode {
        "exact" => Ok(EvalMode::Exact),
        "approx" => Ok(EvalMode::Approx),
        other => bail!("unknown mode `{other}` (expected exact|approx)"),
    }
}

fn parse_instanton(name: &str) -> Result<InstantonModel> {
    match name {
        "flat" => Ok(InstantonModel::Flat),
        "ccdlmz" => Ok(InstantonModel::AbelianCcdlmz),
        other => bail!("unknown instanton model `{other}` (expected flat|ccdlmz)"),
    }
}

fn parse_scalar_arg(name: &str, value: &Option<String>) -> Result<Option<Scalar>> {
    value
        .as_ref()
        .map(|v| v.parse::<Scalar>().with_context(|| format!("cannot parse --{name} `{v}`")))
        .transpose()
}

#[derive(Serialize)]
struct Bundle<'a> {
    schema_version: &'a str,
    mode: &'a str,
    all_match: bool,
    reports: &'a [Report],
}

fn write_json(path: &PathBuf, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text.as_bytes())
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

fn print_report_line(r: &Report, approx: bool) {
    if r.oracle.matched {
        println!("scenario {:<14} OK   ({} ms)", r.scenario, r.runtime_ms);
    } else {
        println!("scenario {:<14} MISMATCH", r.scenario);
        for (key, expected, got) in r.mismatches(approx) {
            println!(
                "    {key}: expected {expected}, computed {}",
                got.as_deref().unwrap_or("<none>")
            );
        }
    }
}

fn cmd_reproduce(mode: &str, json: Option<PathBuf>, scenario: Option<String>) -> Result<i32> {
    let mode = parse_mode(mode)?;
    let reports = match &scenario {
        Some(id) => vec![scenarios::run_scenario(id, mode)?],
        None => scenarios::run_all(mode)?,
    };
    for r in &reports {
        print_report_line(r, mode.is_approx());
    }
    let all_match = reports.iter().all(|r| r.oracle.matched);
    let matched = reports.iter().filter(|r| r.oracle.matched).count();
    println!("{matched} of {} scenarios match the oracle table", reports.len());
    if let Some(first_fail) = reports.iter().find(|r| !r.oracle.matched) {
        println!("first failing scenario: {}", first_fail.scenario);
    }
    if let Some(path) = json {
        if reports.len() == 1 {
            write_json(&path, &reports[0])?;
        } else {
            write_json(
                &path,
                &Bundle {
                    schema_version: SCHEMA_VERSION,
                    mode: mode.name(),
                    all_match,
                    reports: &reports,
                },
            )?;
        }
    }
    Ok(if all_match { 0 } else { 1 })
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    family: &str,
    s: Option<String>,
    t: Option<String>,
    abs_t: Option<String>,
    r: Option<String>,
    instanton: &str,
    mode: &str,
    json: Option<PathBuf>,
) -> Result<i32> {
    let mode = parse_mode(mode)?;
    let model = parse_instanton(instanton)?;
    let id = match family {
        "xs" => FamilyId::Xs,
        "h5-disk" => FamilyId::H5Disk,
        "h4-disk" => FamilyId::H4Disk,
        "torus" => FamilyId::Torus,
        "iwasawa" => FamilyId::Iwasawa,
        other => bail!("unknown family `{other}`"),
    };
    let params = FamilyParams {
        s: parse_scalar_arg("s", &s)?,
        t: parse_scalar_arg("t", &t)?,
        abs_t: parse_scalar_arg("abs-t", &abs_t)?,
        r: parse_scalar_arg("r", &r)?,
    };
    let point = build_family_point(id, params)?;
    let start = std::time::Instant::now();
    let outputs = match point.standard_metric() {
        Ok(_) => scenarios::evaluate_point(&point, &model, mode, true)?,
        // no adapted metric (degenerate parameter): report feasibility only
        Err(_) => {
            let verdict = balanced_feasible(&point.spec)?;
            let (v, margin) = match verdict {
                FeasibilityVerdict::FeasibleWitness(_) => ("feasible".to_string(), None),
                FeasibilityVerdict::InfeasibleNumeric { margin, .. } => {
                    ("infeasible".to_string(), Some(fmt_scalar(&margin)))
                }
                FeasibilityVerdict::Unknown { margin } => {
                    ("unknown".to_string(), Some(fmt_scalar(&margin)))
                }
            };
            Outputs { verdict: Some(v), feasibility_margin: margin, ..Default::default() }
        }
    };
    let mut report = Report {
        schema_version: SCHEMA_VERSION.to_string(),
        scenario: format!("verify-{family}"),
        mode: mode.name().to_string(),
        inputs: Inputs {
            family: Some(family.to_string()),
            s,
            t,
            abs_t,
            r,
            instanton: Some(model.name().to_string()),
        },
        outputs,
        oracle: Oracle::default(),
        runtime_ms: start.elapsed().as_millis() as u64,
    };
    report.oracle.matched = true; // no oracle entries for ad-hoc points
    println!("{}", serde_json::to_string_pretty(&report)?);
    if let Some(path) = json {
        write_json(&path, &report)?;
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_scan(
    family: &str,
    s: Option<String>,
    r: Option<String>,
    grid: usize,
    instanton: &str,
    mode: &str,
    format: &str,
    out: Option<PathBuf>,
) -> Result<i32> {
    let mode = parse_mode(mode)?;
    let model = parse_instanton(instanton)?;
    let rows = scan::scan(
        family,
        parse_scalar_arg("s", &s)?,
        parse_scalar_arg("r", &r)?,
        &model,
        grid,
        mode,
    )?;
    let text = match format {
        "csv" => scan::to_csv(&rows),
        "json" => scan::to_json(&rows)?,
        other => bail!("unknown format `{other}` (expected csv|json)"),
    };
    match out {
        Some(path) => std::fs::write(&path, text.as_bytes())
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn cmd_check(file: &PathBuf, params: &[String]) -> Result<i32> {
    let text = std::fs::read_to_string(file)
        .with_context(|| format!("cannot read {}", file.display()))?;
    let parsed = strominger_core::dsl::parse_structure(&text)?;
    let mut bindings: Vec<(String, Scalar)> = Vec::new();
    for p in params {
        let (name, value) = p
            .split_once('=')
            .ok_or_else(|| anyhow!("--param takes name=value, got `{p}`"))?;
        bindings.push((name.to_string(), value.parse::<Scalar>()?));
    }
    let borrowed: Vec<(&str, Scalar)> =
        bindings.iter().map(|(n, v)| (n.as_str(), v.clone())).collect();
    let spec = parsed.bind(&borrowed)?;
    let diag = spec.check_structure();
    println!("jacobi_ok: {}", diag.jacobi_ok);
    println!("integrable: {}", diag.integrable);
    println!("canonical_form_closed: {}", diag.canonical_form_closed);
    if !diag.canonical_form_closed {
        println!("d(w1^w2^w3) = {}", diag.d_canonical);
    }
    Ok(if diag.jacobi_ok && diag.integrable { 0 } else { 2 })
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Reproduce { mode, json, scenario } => cmd_reproduce(&mode, json, scenario),
        Cmd::Verify { family, s, t, abs_t, r, instanton, mode, json } => {
            cmd_verify(&family, s, t, abs_t, r, &instanton, &mode, json)
        }
        Cmd::Scan { family, s, r, grid, instanton, mode, format, out } => {
            cmd_scan(&family, s, r, grid, &instanton, &mode, &format, out)
        }
        Cmd::Check { file, params } => cmd_check(&file, &params),
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(64);
        }
    }
}
