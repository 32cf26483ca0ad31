//! High-SNR approximations: with `log2(1 + x) ≈ log2 x` every eigenchannel
//! keeps positive power, so no active-set recursion is needed.

use std::f64::consts::LN_2;

use crate::channel::{self, ChannelDecomposition, PowerAllocation, SystemParams};
use crate::error::{Result, SwiptError};
use crate::numeric;
use crate::regimes;
use crate::solver::{self, GssBracket, JointSolution, Mode, SolveStats, Work};
use crate::waterfill;

/// Bracket ends for the normalized ideal multiplier `β = ν₂ − λ₁²`. The
/// root sinks far below any fixed linear floor as the rate approaches
/// capacity, so the search runs in `ln β`.
pub const BETA_LO: f64 = 1e-30;
pub const BETA_HI: f64 = 1.0 - 1e-6;
/// Width in `ln β` at which the bisection stops; fixes its iteration count.
pub const LN_BETA_XTOL: f64 = 1e-13;

/// Powers `∝ 1/(ν − ρλ_k²)` normalized to the budget, as a function of the
/// gap `δ = ν − ρλ₁²`.
fn proportional_powers(delta: f64, rho: f64, g: &[f64], p_t: f64) -> Vec<f64> {
    let inv: Vec<f64> = g.iter().map(|gk| 1.0 / (delta + rho * (g[0] - gk))).collect();
    let total: f64 = inv.iter().sum();
    inv.iter().map(|w| p_t * w / total).collect()
}

/// `Σ log2((1−ρ) p_k λ_k²/σ²)`, the rate with the unit term dropped.
fn noise_free_rate(powers: &[f64], rho: f64, g: &[f64], sigma2: f64) -> f64 {
    powers
        .iter()
        .zip(g)
        .map(|(p, gk)| ((1.0 - rho) * p * gk / sigma2).ln())
        .sum::<f64>()
        / LN_2
}

/// Gap and powers found at one split ratio.
type Probe = (f64, Vec<f64>);

/// Split-receiver solution under the high-SNR rate approximation.
///
/// Same outer search as [`solver::solve_op1`]; at each split ratio the
/// budget multiplier is found from the approximate rate equation with all
/// eigenchannels active. Probes where the approximate rate cannot be met are
/// scored below any feasible point.
pub fn solve_op1_highsnr(dec: &ChannelDecomposition, params: &SystemParams) -> Result<JointSolution> {
    let r_max = waterfill::max_rate(dec, params);
    if params.rate_req > r_max {
        return solver::solve_op1(dec, params);
    }
    let l1 = dec.singvals[0];
    let r_th = regimes::rate_threshold_for(dec, params.p_t, params.sigma2);
    let r_id = regimes::rate_threshold_ideal(l1, params.p_t, params.sigma2);
    if params.rate_req <= r_th.min(r_id) || dec.rank == 1 {
        return Ok(solver::eb_solution(dec, params));
    }

    let g = dec.gains();
    let rho_lo = regimes::rho_eb(params.rate_req, params.p_t, l1, params.sigma2);
    let rho_hi = solver::rho_upper_bound(dec, params)?;
    let mut work = Work::default();
    let mut probes = 0;

    let mut probe = |rho: f64| -> Result<(f64, Option<Probe>)> {
        probes += 1;
        let residual = |delta: f64| {
            let p = proportional_powers(delta, rho, &g, params.p_t);
            Ok(noise_free_rate(&p, rho, &g, params.sigma2) - params.rate_req)
        };
        // With equal effective gains the split is uniform for every gap.
        let flat = rho * (g[0] - g[g.len() - 1]) == 0.0;
        let found = if flat {
            residual(1.0 - rho).and_then(|v| {
                if v >= 0.0 { Ok(1.0 - rho) } else { Err(SwiptError::NumericalBracket("flat residual".into())) }
            })
        } else {
            solver::gap_root(residual, 1.0 - rho, 1e-15, 400, &mut work)
        };
        match found {
            Ok(delta) => {
                let p = proportional_powers(delta, rho, &g, params.p_t);
                let p_re = rho * p.iter().zip(&g).map(|(pk, gk)| pk * gk).sum::<f64>();
                Ok((p_re, Some((delta, p))))
            }
            Err(SwiptError::NumericalBracket(_)) => Ok((-1.0, None)),
            Err(e) => Err(e),
        }
    };

    let (rho, outer, payload) = if rho_hi - rho_lo > params.tol {
        let out = solver::gss_maximize_with(&mut probe, GssBracket::new(rho_lo, rho_hi, params.tol)?)?;
        (out.argmax, out.iterations, out.payload)
    } else {
        let rho = 0.5 * (rho_lo + rho_hi);
        (rho, 0, probe(rho)?.1)
    };
    let Some((delta, powers)) = payload else {
        return Err(SwiptError::ApproximationInapplicable(
            "noise-free rate cannot meet the requirement at any split ratio".into(),
        ));
    };

    let rx: f64 = powers.iter().zip(&g).map(|(p, gk)| p * gk).sum();
    let stats = SolveStats {
        outer_iterations: outer,
        probes,
        root_finds: work.root_finds,
        inner_evaluations: work.evaluations,
        bracket_extended: work.extended,
        polished: false,
    };
    Ok(JointSolution {
        mode: Mode::SpatialMultiplexing,
        rho,
        rate_achieved: channel::rate_from_gains(&g, &powers, rho, params.sigma2),
        p_re: rho * rx,
        mu: (1.0 - rho) * rx * LN_2 / dec.rank as f64,
        nu: rho * g[0] + delta,
        nu_gap: delta,
        r_s: dec.rank,
        powers: PowerAllocation { powers },
        iterations: outer,
        stats,
    })
}

/// `(P_T/σ²)·(Π βλ_k²/(β+λ₁²−λ_k²))^{1/r} − 2^{R/r}·Σ β/(β+λ₁²−λ_k²)`.
pub fn beta_residual(beta: f64, singvals: &[f64], p_t: f64, sigma2: f64, rate_req: f64) -> f64 {
    let g: Vec<f64> = singvals.iter().map(|s| s * s).collect();
    let r = g.len() as f64;
    let ratios: Vec<f64> = g.iter().map(|gk| beta / (beta + (g[0] - gk))).collect();
    let ln_geo = ratios.iter().zip(&g).map(|(q, gk)| (q * gk).ln()).sum::<f64>() / r;
    p_t / sigma2 * ln_geo.exp() - (rate_req * LN_2 / r).exp() * ratios.iter().sum::<f64>()
}

/// Ideal-receiver solution under the high-SNR rate approximation: one
/// bisection for `β` on a fixed bracket, independent of the number of modes.
pub fn solve_op2_highsnr(dec: &ChannelDecomposition, params: &SystemParams) -> Result<JointSolution> {
    let exact = solver::solve_op2;
    let r_max = waterfill::max_rate(dec, params);
    let r_id = regimes::rate_threshold_ideal(dec.singvals[0], params.p_t, params.sigma2);
    if params.rate_req > r_max || params.rate_req <= r_id || dec.rank == 1 {
        return exact(dec, params);
    }
    let f = |b: f64| beta_residual(b, &dec.singvals, params.p_t, params.sigma2, params.rate_req);
    let root = numeric::bisect(|t| f(t.exp()), BETA_LO.ln(), BETA_HI.ln(), LN_BETA_XTOL, 200).map_err(|e| match e {
        SwiptError::NumericalBracket(m) => SwiptError::ApproximationInapplicable(format!("no beta in (0, 1): {m}")),
        other => other,
    })?;
    let beta = root.x.exp();
    let g = dec.gains();
    let ratios: Vec<f64> = g.iter().map(|gk| beta / (beta + (g[0] - gk))).collect();
    let p1 = params.p_t / ratios.iter().sum::<f64>();
    let powers: Vec<f64> = ratios.iter().map(|q| q * p1).collect();
    let mu = params.p_t / g.iter().map(|gk| 1.0 / ((beta + (g[0] - gk)) * LN_2)).sum::<f64>();
    Ok(JointSolution {
        mode: Mode::SpatialMultiplexing,
        rho: 1.0,
        rate_achieved: channel::rate_from_gains(&g, &powers, 0.0, params.sigma2),
        p_re: powers.iter().zip(&g).map(|(p, gk)| p * gk).sum(),
        powers: PowerAllocation { powers },
        mu,
        nu: g[0] + beta,
        nu_gap: beta,
        r_s: dec.rank,
        iterations: root.iterations,
        stats: SolveStats { inner_evaluations: root.iterations + 2, root_finds: 1, ..SolveStats::default() },
    })
}
