use clap::{Parser, Subcommand};
use holocalc_core::holonomy::RunSettings;
use holocalc_core::linalg::DEFAULT_TOL;
use holocalc_core::pipeline::{cmd_list, compute, validate, verify_all, RunConfig};
use holocalc_core::report::Tolerances;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

/// Extrinsic holonomy of symmetric submanifolds.
#[derive(Parser)]
#[command(name = "holocalc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List catalog models.
    List {
        #[arg(long, env = "HOLOCALC_TOL", default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Build one jet, compute its holonomy and run all checks.
    Compute {
        /// Catalog model, or `veronese` for the Veronese surface in the 4-sphere.
        #[arg(long, required_unless_present = "jet_file")]
        model: Option<String>,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        c: f64,
        #[arg(long, env = "HOLOCALC_TOL", default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 1e-3)]
        ode_step: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Read the jet from a file instead of building it.
        #[arg(long)]
        jet_file: Option<PathBuf>,
    },
    /// Run every catalog jet and aggregate the verdicts.
    VerifyAll {
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, env = "HOLOCALC_TOL", default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 1e-3)]
        ode_step: f64,
    },
}

fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn input_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("holocalc: {msg}");
    ExitCode::from(2)
}

fn write_json(path: &Option<PathBuf>, text: String) -> Result<(), ExitCode> {
    if let Some(p) = path {
        std::fs::write(p, text + "\n").map_err(|e| input_error(format!("cannot write {}: {e}", p.display())))?;
    }
    Ok(())
}

fn verdict(pass: bool) -> ExitCode {
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: Cli) -> Result<ExitCode, ExitCode> {
    match cli.command {
        Command::List { tol } => {
            validate(&Tolerances { tol, ..Default::default() }).map_err(input_error)?;
            emit(&cmd_list(tol));
            Ok(ExitCode::SUCCESS)
        }
        Command::Compute { model, c, tol, ode_step, seed, json, jet_file } => {
            let jet_file = match jet_file {
                Some(p) => Some(
                    std::fs::read_to_string(&p)
                        .map_err(|e| input_error(format!("cannot read {}: {e}", p.display())))?,
                ),
                None => None,
            };
            let config = RunConfig {
                model: model.unwrap_or_default(),
                c,
                settings: RunSettings { tolerances: Tolerances { tol, ode_step }, seed },
                jet_file,
            };
            let report = compute(&config).map_err(input_error)?;
            emit(&report.summary());
            emit(if report.passed() { "PASS\n" } else { "FAIL\n" });
            write_json(&json, report.to_json())?;
            Ok(verdict(report.passed()))
        }
        Command::VerifyAll { json, seed, tol, ode_step } => {
            let settings = RunSettings { tolerances: Tolerances { tol, ode_step }, seed };
            let agg = verify_all(&settings).map_err(input_error)?;
            for r in &agg.reports {
                let status = if r.passed() { "PASS".to_string() } else { format!("FAIL {:?}", failures(r)) };
                emit(&format!(
                    "{:<24} hol {}/{} codim {:>2}  {status}\n",
                    r.label(),
                    r.hol.extrinsic,
                    r.hol.ambient,
                    r.hol.codim
                ));
            }
            let failed = agg.reports.iter().filter(|r| !r.passed()).count();
            emit(&format!("{} runs, {failed} failed: {}\n", agg.reports.len(), if agg.pass { "PASS" } else { "FAIL" }));
            write_json(&json, agg.to_json())?;
            Ok(verdict(agg.pass))
        }
    }
}

fn failures(r: &holocalc_core::report::VerificationReport) -> Vec<String> {
    let mut out: Vec<String> = r.failed_checks().into_iter().map(String::from).collect();
    if let Some(e) = &r.error {
        out.push(format!("error: {e}"));
    }
    out
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    run(cli).unwrap_or_else(|code| code)
}
