//! `explore`: run exploration strategies on scenes, generate scenarios and
//! run batch benchmarks.
//!
//! Exit status: 0 success, 1 acceptance threshold violated, 2 bad input,
//! 3 internal error.

use clap::{Parser, Subcommand};
use cpex::geometry::Scene;
use cpex::harness::{
    bench, bundled_suite, gen_family, overlays_from_trace, render_svg, run, BenchSpec, HarnessError, RunConfig,
    StrategyName,
};
use cpex::scenarios::ScenarioBundle;
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "explore", version, about = "Online exploration of polygons with holes")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one strategy on a scene or scenario file.
    Run {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long, default_value = "cpex")]
        strategy: String,
        /// Run configuration (JSON); defaults apply to missing fields.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Report JSON; printed to stdout when omitted.
        #[arg(long)]
        out_report: Option<PathBuf>,
        #[arg(long)]
        out_svg: Option<PathBuf>,
        #[arg(long)]
        out_trace: Option<PathBuf>,
    },
    /// Generate a scenario (scene plus optimum bounds).
    Gen {
        /// general-lb, orth-lb, multihole-lb, four-holes or random
        #[arg(long)]
        family: String,
        /// JSON object, or @FILE to read it from a file.
        #[arg(long, default_value = "{}")]
        params: String,
        /// Scenario JSON; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        out_svg: Option<PathBuf>,
    },
    /// Run a batch spec and write one CSV row per (scenario, strategy).
    Bench {
        /// Batch spec JSON; the bundled lower-bound suite when omitted.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        out_csv: Option<PathBuf>,
        /// Print the bundled suite as JSON and exit.
        #[arg(long)]
        print_suite: bool,
    },
}

fn input(msg: impl std::fmt::Display) -> HarnessError {
    HarnessError::Input(msg.to_string())
}

fn read(path: &Path) -> Result<String, HarnessError> {
    std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), HarnessError> {
    std::fs::write(path, text).map_err(|e| input(format!("{}: {e}", path.display())))
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn seed_override() -> Result<Option<u64>, HarnessError> {
    match std::env::var("EXPLORE_SEED") {
        Ok(s) => s.trim().parse().map(Some).map_err(|_| input(format!("EXPLORE_SEED must be an unsigned integer, got {s:?}"))),
        Err(_) => Ok(None),
    }
}

/// A scenario file, or a bare scene for which bounds are computed.
fn load_scenario(path: &Path) -> Result<ScenarioBundle, HarnessError> {
    let text = read(path)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| input(format!("{}: {e}", path.display())))?;
    let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let res = if v.get("opt").is_some() {
        ScenarioBundle::from_json(&text)
    } else {
        Scene::from_json(&text).map(|s| ScenarioBundle::from_scene(s, &label))
    };
    res.map_err(|e| input(format!("{}: {e}", path.display())))
}

fn cmd_run(
    scene: &Path,
    strategy: &str,
    config: Option<&Path>,
    out_report: Option<&Path>,
    out_svg: Option<&Path>,
    out_trace: Option<&Path>,
) -> Result<bool, HarnessError> {
    let strategy: StrategyName = strategy.parse()?;
    let cfg: RunConfig = match config {
        Some(p) => serde_json::from_str(&read(p)?).map_err(|e| input(format!("{}: {e}", p.display())))?,
        None => RunConfig::default(),
    };
    cfg.strategy.validate().map_err(input)?;
    let bundle = load_scenario(scene)?;
    let out = run(&bundle, strategy, &cfg);
    let report = out.report.to_json();
    match out_report {
        Some(p) => write(p, &report)?,
        None => emit(&format!("{report}\n")),
    }
    if let Some(p) = out_svg {
        let overlays = overlays_from_trace(&bundle.scene, &out.trace);
        write(p, &render_svg(&bundle.scene, Some(&out.trace.path), &overlays))?;
    }
    if let Some(p) = out_trace {
        write(p, &out.trace.to_json())?;
    }
    let r = &out.report;
    eprintln!(
        "{}: length {:.6}, ratio [{}, {}], coverage {:.5}, returned {}",
        r.label,
        r.trace_length,
        r.ratio_interval[0].map(|x| format!("{x:.4}")).unwrap_or("inf".into()),
        r.ratio_interval[1].map(|x| format!("{x:.4}")).unwrap_or("inf".into()),
        r.coverage_fraction,
        r.returned_to_start
    );
    if let Some(f) = &r.failure {
        eprintln!("strategy failure: {f}");
    }
    Ok(r.passed(cfg.coverage_threshold))
}

fn cmd_gen(family: &str, params: &str, out: Option<&Path>, out_svg: Option<&Path>) -> Result<bool, HarnessError> {
    let text = match params.strip_prefix('@') {
        Some(p) => read(Path::new(p))?,
        None => params.to_string(),
    };
    let mut params: Value = serde_json::from_str(&text).map_err(|e| input(format!("params: {e}")))?;
    if !params.is_object() {
        return Err(input("params must be a JSON object"));
    }
    if let Some(s) = seed_override()? {
        params["seed"] = Value::from(s);
    }
    let b = gen_family(family, &params)?;
    match out {
        Some(p) => write(p, &b.to_json())?,
        None => emit(&format!("{}\n", b.to_json())),
    }
    if let Some(p) = out_svg {
        write(p, &render_svg(&b.scene, None, &[]))?;
    }
    Ok(true)
}

fn cmd_bench(spec: Option<&Path>, out_csv: Option<&Path>, print_suite: bool) -> Result<bool, HarnessError> {
    if print_suite {
        emit(&format!("{}\n", serde_json::to_string_pretty(&bundled_suite()).expect("suite serializes")));
        return Ok(true);
    }
    let spec: BenchSpec = match spec {
        Some(p) => serde_json::from_str(&read(p)?).map_err(|e| input(format!("{}: {e}", p.display())))?,
        None => bundled_suite(),
    };
    spec.config.strategy.validate().map_err(input)?;
    let res = bench(&spec, seed_override()?);
    let csv = res.to_csv()?;
    match out_csv {
        Some(p) => write(p, &csv)?,
        None => emit(&csv),
    }
    eprint!("{}", res.to_table());
    Ok(res.passed())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let res = match &cli.cmd {
        Cmd::Run { scene, strategy, config, out_report, out_svg, out_trace } => cmd_run(
            scene,
            strategy,
            config.as_deref(),
            out_report.as_deref(),
            out_svg.as_deref(),
            out_trace.as_deref(),
        ),
        Cmd::Gen { family, params, out, out_svg } => cmd_gen(family, params, out.as_deref(), out_svg.as_deref()),
        Cmd::Bench { spec, out_csv, print_suite } => cmd_bench(spec.as_deref(), out_csv.as_deref(), *print_suite),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("explore: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
