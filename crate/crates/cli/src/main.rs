//! `athermal`: measure channels, run sampling and grid sweeps, and run the verification suites.
//!
//! Exit codes: 0 success, 1 verification failure, 2 malformed input or flags.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use athermal::channels::make_signalling_gpo;
use athermal::io::{write_json, ChannelJson};
use athermal::measures::{g_min_ab, r_joint, r_signalling, r_t_channel, resource_report, thm4_slacks};
use athermal::superops::{
    cc_upper_bound, control_output_gibbs, induced_coherent_control, induced_switch, rt_cc_analytic,
    rt_switch_analytic, switch_upper_bound,
};
use athermal::verify::{run_suite, sample_flat, Grid, Suite, VerifyConfig};
use athermal::{ControlQubitSpec, SdpOptions, Thermal};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

const CSV_VERSION: &str = "athermal-csv/1";

#[derive(Parser)]
#[command(name = "athermal", version, about = "Athermality, signalling and joint resource measures of quantum channels")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Resource report for one channel file.
    Measure(MeasureArgs),
    /// Flat-measure random square channels.
    Sample(SampleArgs),
    /// Induced quantum-switch channel of G = sΓ + (1−s)I over an (α, s) grid.
    Switch(SwitchArgs),
    /// Induced coherent-control channel of G = sΓ + (1−s)I over an (α, s) grid.
    Cc(CcArgs),
    /// Verification suites.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct MeasureArgs {
    /// Channel JSON file.
    #[arg(long)]
    channel: PathBuf,
    /// Input Gibbs populations, overriding the file.
    #[arg(long)]
    gibbs: Option<String>,
    /// Output Gibbs populations, overriding the file.
    #[arg(long)]
    gibbs_out: Option<String>,
    /// Report destination (stdout if absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Gibbs populations (defaults to the maximally mixed state).
    #[arg(long)]
    gibbs: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SwitchArgs {
    #[arg(long, default_value = "0:1:11")]
    alpha_grid: Grid,
    #[arg(long, default_value = "0:1:11")]
    s_grid: Grid,
    #[arg(long, default_value_t = 0.0)]
    phi: f64,
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    #[arg(long, default_value = "0.5,0.5")]
    gibbs: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CcArgs {
    #[arg(long, default_value = "0:1:11")]
    alpha_grid: Grid,
    #[arg(long, default_value = "1:1:1")]
    s_grid: Grid,
    #[arg(long, default_value_t = 0.0)]
    phi: f64,
    #[arg(long, default_value = "0.5,0.5")]
    gibbs: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "all")]
    suite: Suite,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Uniform tolerance replacing every per-check tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// JSON report destination.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Input(String),
    Verification(String),
}

impl From<athermal::Error> for Failure {
    fn from(e: athermal::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome<T> = Result<T, Failure>;

fn parse_gibbs(s: &str) -> Outcome<Thermal> {
    let pops = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| Failure::Input(format!("--gibbs '{s}' is not a comma-separated list of numbers")))?;
    Ok(Thermal::from_f64(&pops)?)
}

fn fmt(x: f64) -> String {
    format!("{x}")
}

fn emit(out: Option<&Path>, text: &str) -> Outcome<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn csv_text(kind: &str, header: &[&str], rows: &[Vec<String>], trailer: Option<String>) -> Outcome<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| Failure::Input(e.to_string()))?;
    for r in rows {
        w.write_record(r).map_err(|e| Failure::Input(e.to_string()))?;
    }
    let body = w.into_inner().map_err(|e| Failure::Input(e.to_string()))?;
    let mut text = format!("# {CSV_VERSION} {kind}; columns: {}\n", header.join(","));
    text.push_str(&String::from_utf8_lossy(&body));
    if let Some(t) = trailer {
        text.push_str(&format!("# {t}\n"));
    }
    Ok(text)
}

fn cmd_measure(a: &MeasureArgs) -> Outcome<()> {
    let mut spec = ChannelJson::read(&a.channel)?.to_spec()?;
    if let Some(g) = &a.gibbs {
        spec.gibbs_in = parse_gibbs(g)?;
    }
    if let Some(g) = &a.gibbs_out {
        spec.gibbs_out = parse_gibbs(g)?;
    }
    let ch = &spec.channel;
    if spec.gibbs_in.dim() != ch.d_in() || spec.gibbs_out.dim() != ch.d_out() {
        return Err(Failure::Input("Gibbs populations do not match the channel dimensions".into()));
    }
    let report = resource_report(ch, &spec.gibbs_in, &spec.gibbs_out, &SdpOptions::default())?;
    let doc = serde_json::json!({
        "schema": "athermal-measure/1",
        "d_in": ch.d_in(),
        "d_out": ch.d_out(),
        "gibbs_in": spec.gibbs_in.populations(),
        "gibbs_out": spec.gibbs_out.populations(),
        "report": report,
    });
    match &a.out {
        Some(p) => write_json(p, &doc)?,
        None => println!("{}", serde_json::to_string_pretty(&doc).map_err(|e| Failure::Input(e.to_string()))?),
    }
    Ok(())
}

fn cmd_sample(a: &SampleArgs) -> Outcome<()> {
    if a.n == 0 || a.dim == 0 {
        return Err(Failure::Input("--n and --dim must be at least 1".into()));
    }
    let gamma = match &a.gibbs {
        Some(g) => parse_gibbs(g)?,
        None => Thermal::uniform(a.dim),
    };
    if gamma.dim() != a.dim {
        return Err(Failure::Input(format!("--gibbs has {} entries but --dim is {}", gamma.dim(), a.dim)));
    }
    let rows = sample_flat(a.n, a.seed, &gamma, &SdpOptions::default())?;
    let hits = rows.iter().filter(|r| r.rt_r_ge_1()).count();
    let frac = hits as f64 / rows.len() as f64;
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                a.seed.to_string(),
                r.index.to_string(),
                fmt(r.r_t),
                fmt(r.r_s),
                fmt(r.r_joint),
                fmt(r.r_joint - r.r_t),
                r.rt_r_ge_1().to_string(),
            ]
        })
        .collect();
    let summary = format!("rtr_ge1 fraction {frac} ({hits}/{})", rows.len());
    let text = csv_text(
        "sample",
        &["seed", "index", "r_t", "r_s", "r_joint", "transmission", "rtr_ge1"],
        &table,
        Some(format!("summary: {summary}")),
    )?;
    emit(a.out.as_deref(), &text)?;
    eprintln!("{summary}");
    Ok(())
}

fn grid_cells(alpha: &Grid, s: &Grid) -> Vec<(f64, f64)> {
    let sp = s.points();
    alpha.points().into_iter().flat_map(|a| sp.iter().map(move |&s| (a, s))).collect()
}

fn cmd_switch(a: &SwitchArgs) -> Outcome<()> {
    let gamma = parse_gibbs(&a.gibbs)?;
    let gout = control_output_gibbs(&gamma);
    let gab = g_min_ab(&gamma, &gout);
    let opts = SdpOptions::default();
    let rows: Vec<Vec<String>> = grid_cells(&a.alpha_grid, &a.s_grid)
        .par_iter()
        .enumerate()
        .map(|(i, &(alpha, s))| -> Outcome<Vec<String>> {
            let ctrl = ControlQubitSpec::new(alpha, a.phi, a.r)?;
            let ch = induced_switch(&make_signalling_gpo(&gamma, s)?, &ctrl)?;
            let rt = r_t_channel(&ch, &gamma, &gout)?;
            let rj = r_joint(&ch, &gout)?;
            let rs = r_signalling(&ch, &opts)?;
            let analytic = rt_switch_analytic(&ctrl, s, gamma.g_max())?;
            let ub = switch_upper_bound(&ctrl, s, &gamma);
            let t4 = thm4_slacks(rt, rs, rj, gab);
            Ok(vec![
                i.to_string(),
                fmt(alpha),
                fmt(s),
                fmt(a.phi),
                fmt(a.r),
                fmt(rt),
                fmt(rs),
                fmt(rj),
                fmt(analytic),
                fmt(ub),
                fmt(2.0 * gab * gab * (rj - rt).powi(2)),
                fmt(ub - rj),
                fmt(t4.upper),
                fmt(t4.lower),
                (rt * rj >= 1.0).to_string(),
            ])
        })
        .collect::<Outcome<_>>()?;
    let text = csv_text(
        "switch",
        &[
            "index",
            "alpha",
            "s",
            "phi",
            "r",
            "r_t",
            "r_s",
            "r_joint",
            "r_t_analytic",
            "upper_bound",
            "r_s_lower_bound",
            "slack_upper_bound",
            "slack_sandwich_upper",
            "slack_sandwich_lower",
            "rtr_ge1",
        ],
        &rows,
        None,
    )?;
    emit(a.out.as_deref(), &text)
}

fn cmd_cc(a: &CcArgs) -> Outcome<()> {
    let gamma = parse_gibbs(&a.gibbs)?;
    let d = gamma.dim();
    let gout = control_output_gibbs(&gamma);
    let gab = g_min_ab(&gamma, &gout);
    let opts = SdpOptions::default();
    let rows: Vec<Vec<String>> = grid_cells(&a.alpha_grid, &a.s_grid)
        .par_iter()
        .enumerate()
        .map(|(i, &(alpha, s))| -> Outcome<Vec<String>> {
            let ctrl = ControlQubitSpec::pure(alpha, a.phi)?;
            let ch = induced_coherent_control(&make_signalling_gpo(&gamma, s)?, &ctrl)?;
            let rt = r_t_channel(&ch, &gamma, &gout)?;
            let rj = r_joint(&ch, &gout)?;
            let rs = r_signalling(&ch, &opts)?;
            let analytic = if s == 1.0 { fmt(rt_cc_analytic(alpha, d)?) } else { String::new() };
            let ub = cc_upper_bound(&ctrl, s, &gamma)?;
            let t4 = thm4_slacks(rt, rs, rj, gab);
            Ok(vec![
                i.to_string(),
                d.to_string(),
                fmt(alpha),
                fmt(s),
                fmt(a.phi),
                fmt(rt),
                fmt(rs),
                fmt(rj),
                analytic,
                fmt(ub),
                fmt(ub - rj),
                fmt(t4.upper),
                fmt(t4.lower),
                (rt * rj >= 1.0).to_string(),
            ])
        })
        .collect::<Outcome<_>>()?;
    let text = csv_text(
        "cc",
        &[
            "index",
            "d",
            "alpha",
            "s",
            "phi",
            "r_t",
            "r_s",
            "r_joint",
            "r_t_analytic",
            "upper_bound_chi",
            "slack_upper_bound",
            "slack_sandwich_upper",
            "slack_sandwich_lower",
            "rtr_ge1",
        ],
        &rows,
        Some("upper_bound_chi extends R_T to the Hermitian operator chi through lambda_max".into()),
    )?;
    emit(a.out.as_deref(), &text)
}

fn cmd_verify(a: &VerifyArgs) -> Outcome<()> {
    if let Some(t) = a.tol {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Failure::Input(format!("--tol {t} must be a non-negative number")));
        }
    }
    let cfg = VerifyConfig {
        sdp: SdpOptions::default(),
        tol: a.tol,
    };
    let reports = run_suite(a.suite, a.seed, &cfg);
    for r in &reports {
        println!("{r}");
    }
    if let Some(p) = &a.out {
        write_json(p, &reports)?;
    }
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.passed)
        .map(|r| format!("{} (max violation {:.3e})", r.id, r.max_violation))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(format!("failing: {}", failed.join(", "))))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 || rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("error: invalid --threads {n}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Measure(a) => cmd_measure(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Switch(a) => cmd_switch(a),
        Command::Cc(a) => cmd_cc(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
