use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Scheme};
use crate::bench;
use crate::channel::{decompose, generate_channel, ChannelDecomposition, ChannelMatrix, SystemParams};
use crate::error::{Result, SwiptError};
use crate::harvest::{self, EhCircuitModel};
use crate::highsnr;
use crate::linalg;
use crate::solver::{self, JointSolution};
use crate::waterfill;

/// Environment variable capping sweep worker threads.
pub const THREADS_ENV: &str = "SWIPT_OPT_THREADS";

/// One `(channel, rate, scheme)` outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffRecord {
    pub scheme: String,
    pub channel_index: usize,
    /// Position in the configured rate grid.
    pub rate_index: usize,
    pub rate_req: f64,
    pub p_re: f64,
    pub p_h: f64,
    pub rho: f64,
    pub mode: String,
    pub r_s: usize,
    pub iterations: usize,
}

/// Mode label for solves that failed numerically.
pub const MODE_FAILED: &str = "NumericalFailure";
/// Mode label for high-SNR schemes whose approximation has no solution.
pub const MODE_INAPPLICABLE: &str = "ApproximationInapplicable";

impl TradeoffRecord {
    /// Whether the record carries a usable received power.
    pub fn is_solved(&self) -> bool {
        !matches!(self.mode.as_str(), "Infeasible" | MODE_FAILED | MODE_INAPPLICABLE)
    }
}

/// Worker threads: available parallelism, capped by `SWIPT_OPT_THREADS`.
pub fn worker_count() -> usize {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|n| *n > 0)
        .map_or(available, |cap| cap.min(available))
}

struct Outcome {
    p_re: f64,
    rho: f64,
    mode: String,
    r_s: usize,
    iterations: usize,
}

impl From<JointSolution> for Outcome {
    fn from(s: JointSolution) -> Self {
        Self { p_re: s.p_re, rho: s.rho, mode: s.mode.as_str().into(), r_s: s.r_s, iterations: s.iterations }
    }
}

fn failed(e: &SwiptError) -> Outcome {
    let mode = match e {
        SwiptError::ApproximationInapplicable(_) => MODE_INAPPLICABLE,
        _ => MODE_FAILED,
    };
    Outcome { p_re: 0.0, rho: 0.0, mode: mode.into(), r_s: 0, iterations: 0 }
}

fn run_scheme(
    scheme: Scheme,
    h: &ChannelMatrix,
    dec: &ChannelDecomposition,
    params: &SystemParams,
    cfg: &ExperimentConfig,
) -> Result<Outcome> {
    Ok(match scheme {
        Scheme::Op1 => solver::solve_op1(dec, params)?.into(),
        Scheme::Op2 => solver::solve_op2(dec, params)?.into(),
        Scheme::Op1Hisnr => highsnr::solve_op1_highsnr(dec, params)?.into(),
        Scheme::Op2Hisnr => highsnr::solve_op2_highsnr(dec, params)?.into(),
        Scheme::Ops => bench::baseline_ops(dec, params)?.into(),
        Scheme::Otcm => bench::baseline_otcm(dec, params)?.into(),
        Scheme::Oracle => bench::oracle_grid_eigen(dec, params, cfg.oracle_grid_points)?.solution.into(),
        Scheme::Dps => {
            let s = bench::baseline_dps_grid(h, params, cfg.dps_grid_points)?;
            let (eig, _) = linalg::hermitian_eigen(&s.covariance);
            let floor = 1e-9 * eig.iter().sum::<f64>().max(f64::MIN_POSITIVE);
            Outcome {
                p_re: s.p_re,
                rho: s.mean_split(),
                mode: s.mode.as_str().into(),
                r_s: eig.iter().filter(|e| **e > floor).count(),
                iterations: s.evaluated,
            }
        }
    })
}

fn channel_records(cfg: &ExperimentConfig, index: usize, eh: &EhCircuitModel) -> Result<Vec<TradeoffRecord>> {
    let h = generate_channel(cfg.n, cfg.n, cfg.theta, cfg.seed.wrapping_add(index as u64))?;
    let dec = decompose(&h)?;
    let base = SystemParams::new(cfg.p_t_watts, cfg.sigma2(), 0.0, cfg.tol)?;
    let r_max = waterfill::max_rate(&dec, &base);
    let mut out = Vec::with_capacity(cfg.rate_grid.len() * cfg.schemes.len());
    for (rate_index, &r) in cfg.rate_grid.iter().enumerate() {
        let rate_req = if cfg.rate_normalized { r * r_max } else { r };
        let params = base.with_rate(rate_req)?;
        for &scheme in &cfg.schemes {
            let o = run_scheme(scheme, &h, &dec, &params, cfg).unwrap_or_else(|e| failed(&e));
            out.push(TradeoffRecord {
                scheme: scheme.as_str().into(),
                channel_index: index,
                rate_index,
                rate_req,
                p_h: harvest::harvested_power(o.p_re.max(0.0), eh)?,
                p_re: o.p_re,
                rho: o.rho,
                mode: o.mode,
                r_s: o.r_s,
                iterations: o.iterations,
            });
        }
    }
    Ok(out)
}

/// Runs every scheme at every rate on `n_channels` draws seeded `seed + i`.
///
/// Records come back ordered by channel, rate and then configured scheme
/// order, independent of how the draws were scheduled.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<TradeoffRecord>> {
    let eh = cfg.eh_circuit()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .map_err(|e| SwiptError::InvalidInput(format!("thread pool: {e}")))?;
    let per_channel: Vec<Result<Vec<TradeoffRecord>>> =
        pool.install(|| (0..cfg.n_channels).into_par_iter().map(|i| channel_records(cfg, i, &eh)).collect());
    let mut records = Vec::new();
    for chunk in per_channel {
        records.extend(chunk?);
    }
    Ok(records)
}
