use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde_json::json;
use swipt_core::channel::{decompose, generate_channel, SystemParams};
use swipt_core::exp::{self, ExperimentConfig, Scheme};
use swipt_core::solver::{JointSolution, Mode};
use swipt_core::{bench, highsnr, regimes, solver, waterfill, SwiptError};

const EXIT_INFEASIBLE: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_BAD_INPUT: u8 = 3;

#[derive(Parser)]
#[command(name = "swipt-opt", version, about = "Harvested-power optimal precoding and power splitting for MIMO SWIPT")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte-Carlo sweep described by a JSON config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write per-(scheme, rate) aggregates here.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Solve one seeded channel and print the solution as JSON.
    Solve {
        #[command(flatten)]
        link: Link,
        #[arg(long, default_value = "op1", value_parser = parse_scheme)]
        scheme: Scheme,
    },
    /// Compare the solver with the exhaustive 2×2 grid on one seeded channel.
    Oracle {
        #[command(flatten)]
        link: Link,
        /// Intervals per grid axis.
        #[arg(long, default_value_t = 400)]
        grid: usize,
    },
}

#[derive(Args)]
struct Link {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 0.1)]
    theta: f64,
    #[arg(long, default_value_t = -100.0, allow_hyphen_values = true)]
    sigma2_dbm: f64,
    /// Transmit power budget in watts.
    #[arg(long, default_value_t = 10.0)]
    pt: f64,
    /// Minimum rate in bps/Hz.
    #[arg(long)]
    rate: f64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    Scheme::parse(s).map_err(|e| e.to_string())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<SwiptError>() {
        Some(SwiptError::InfeasibleRate { .. }) => EXIT_INFEASIBLE,
        Some(SwiptError::NumericalBracket(_) | SwiptError::ApproximationInapplicable(_)) => EXIT_NUMERICAL,
        _ => EXIT_BAD_INPUT,
    }
}

fn solution_json(s: &JointSolution) -> serde_json::Value {
    serde_json::to_value(s).expect("solution serializes")
}

fn solve(link: &Link, scheme: Scheme) -> anyhow::Result<u8> {
    let h = generate_channel(link.n, link.n, link.theta, link.seed)?;
    let dec = decompose(&h)?;
    let params = SystemParams::new(link.pt, exp::dbm_to_watts(link.sigma2_dbm), link.rate, link.tol)?;
    let r_max = waterfill::max_rate(&dec, &params);
    let header = json!({
        "scheme": scheme.as_str(),
        "n": link.n,
        "seed": link.seed,
        "rate_req": link.rate,
        "r_max": r_max,
        "r_th": regimes::rate_threshold_for(&dec, link.pt, params.sigma2),
        "singular_values": dec.singvals,
    });
    let (body, mode) = match scheme {
        Scheme::Dps => {
            let s = bench::baseline_dps_grid(&h, &params, bench::DEFAULT_GRID_POINTS)?;
            let body = json!({
                "mode": s.mode.as_str(),
                "split": s.split,
                "p_re": s.p_re,
                "rate_achieved": s.rate_achieved,
                "evaluated": s.evaluated,
                "pruned": s.pruned,
            });
            (body, s.mode)
        }
        _ => {
            let s = match scheme {
                Scheme::Op1 => solver::solve_op1(&dec, &params)?,
                Scheme::Op2 => solver::solve_op2(&dec, &params)?,
                Scheme::Op1Hisnr => highsnr::solve_op1_highsnr(&dec, &params)?,
                Scheme::Op2Hisnr => highsnr::solve_op2_highsnr(&dec, &params)?,
                Scheme::Ops => bench::baseline_ops(&dec, &params)?,
                Scheme::Otcm => bench::baseline_otcm(&dec, &params)?,
                Scheme::Oracle => bench::oracle_grid_eigen(&dec, &params, 400)?.solution,
                Scheme::Dps => unreachable!(),
            };
            (solution_json(&s), s.mode)
        }
    };
    let mut out = header;
    out["solution"] = body;
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(if mode == Mode::Infeasible { EXIT_INFEASIBLE } else { 0 })
}

fn oracle(link: &Link, grid: usize) -> anyhow::Result<u8> {
    if link.n != 2 {
        return Err(SwiptError::InvalidInput("oracle needs --n 2".into()).into());
    }
    let h = generate_channel(2, 2, link.theta, link.seed)?;
    let dec = decompose(&h)?;
    let params = SystemParams::new(link.pt, exp::dbm_to_watts(link.sigma2_dbm), link.rate, link.tol)?;
    let grid_sol = bench::oracle_grid_eigen(&dec, &params, grid)?;
    let opt = solver::solve_op1(&dec, &params)?;
    let gap = if grid_sol.solution.p_re > 0.0 { (opt.p_re - grid_sol.solution.p_re) / grid_sol.solution.p_re } else { 0.0 };
    let out = json!({
        "seed": link.seed,
        "rate_req": link.rate,
        "grid": grid,
        "rho_step": grid_sol.rho_step,
        "power_step": grid_sol.power_step,
        "oracle": solution_json(&grid_sol.solution),
        "op1": solution_json(&opt),
        "relative_gap": gap,
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(if opt.mode == Mode::Infeasible { EXIT_INFEASIBLE } else { 0 })
}

fn sweep(config: &PathBuf, out: &PathBuf, summary: Option<&PathBuf>) -> anyhow::Result<u8> {
    let cfg = ExperimentConfig::load(config)?;
    let records = exp::run_sweep(&cfg)?;
    exp::emit_csv(&records, out)?;
    if let Some(path) = summary {
        exp::emit_summary_csv(&exp::summarize(&records, cfg.infeasible_policy), path)?;
    }
    eprintln!("wrote {} records to {}", records.len(), out.display());
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_BAD_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Sweep { config, out, summary } => {
            sweep(config, out, summary.as_ref()).with_context(|| format!("sweep {}", config.display()))
        }
        Command::Solve { link, scheme } => solve(link, *scheme),
        Command::Oracle { link, grid } => oracle(link, *grid),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
