mod commands;
mod manifest;

use clap::{Parser, Subcommand};
use commands::*;
use manifest::{CliError, Output, RunManifest};
use std::path::PathBuf;
use std::process::ExitCode;

/// Discrete PNG growth: simulation, kernels, Fredholm determinants,
/// Tracy–Widom tables and the verification suite.
#[derive(Parser, Debug)]
#[command(name = "png-det", version, about)]
struct Cli {
    /// JSON object of flag values; explicit flags win over it.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Cap on worker threads (0 = all cores).
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Leave start/end timestamps out of the manifest, so reruns are byte-identical.
    #[arg(long, global = true)]
    no_timestamps: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monte Carlo ensemble of the PNG/LPP model against its limit law.
    SimulatePng(SimulateArgs),
    /// Sample one geometric weight field (or read one) and report passage times.
    Lpp(LppArgs),
    /// Tabulate a slice of the PNG kernel as CSV (u,x,v,y,value).
    KernelEval(KernelArgs),
    /// Gap probabilities P[h(2u_i) ≤ level_i] as Fredholm determinants.
    Fredholm(FredholmArgs),
    /// Tracy–Widom F1, F2 table as CSV (xi,F1,F2).
    TwDist(TwArgs),
    /// Airy-process joint distribution as JSON.
    AiryFdd(FddArgs),
    /// Circle-walk kernel tables and the discrete-CUE residual as CSV.
    CircleWalk(CircleArgs),
    /// Transversal fluctuations of the point-to-line maximiser.
    Transversal(TransversalArgs),
    /// Convergence of finite-N gap probabilities to F2.
    Convergence(ConvergenceArgs),
    /// Run the verification suite and print PASS/FAIL per check.
    Verify(VerifyArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            return fail(&CliError::usage(e.to_string()));
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", serde_json::to_string(e).unwrap_or_else(|_| format!("{{\"error\":\"{}\"}}", e.kind)));
    ExitCode::from(2)
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let config = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| CliError::config(e.to_string()))?;
            if !v.is_object() {
                return Err(CliError::config("config file must hold a JSON object".into()));
            }
            Some(v)
        }
        None => None,
    };
    let workers = cli.workers.unwrap_or(0);
    if workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| CliError::config(e.to_string()))?;
    }
    let mut manifest = RunManifest::start(!cli.no_timestamps);
    let cfg = config.as_ref();
    let (name, resolved, output, code) = match cli.command {
        Command::SimulatePng(a) => wrap("simulate-png", simulate(resolve(a, cfg)?, workers)?),
        Command::Lpp(a) => wrap("lpp", lpp(resolve(a, cfg)?)?),
        Command::KernelEval(a) => wrap("kernel-eval", kernel_eval(resolve(a, cfg)?)?),
        Command::Fredholm(a) => wrap("fredholm", fredholm(resolve(a, cfg)?)?),
        Command::TwDist(a) => wrap("tw-dist", tw_dist(resolve(a, cfg)?)?),
        Command::AiryFdd(a) => wrap("airy-fdd", airy_fdd(resolve(a, cfg)?)?),
        Command::CircleWalk(a) => wrap("circle-walk", circle_walk(resolve(a, cfg)?)?),
        Command::Transversal(a) => wrap("transversal", transversal(resolve(a, cfg)?, workers)?),
        Command::Convergence(a) => wrap("convergence", convergence(resolve(a, cfg)?)?),
        Command::Verify(a) => {
            let (resolved, out, ok) = verify(resolve(a, cfg)?)?;
            ("verify", resolved, out, if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    };
    manifest.finish(name, resolved, workers, cli.out.as_deref());
    output.emit(&manifest, cli.out.as_deref())?;
    Ok(code)
}

fn wrap(name: &'static str, (resolved, out): (serde_json::Value, Output)) -> (&'static str, serde_json::Value, Output, ExitCode) {
    (name, resolved, out, ExitCode::SUCCESS)
}
