//! Global solvers for the split receiver (golden-section search over the
//! split ratio around an inner multiplier root-find) and for the ideal
//! receiver (a single root-find), plus the bounds both searches rely on.

use serde::Serialize;

use crate::channel::{self, ChannelDecomposition, PowerAllocation, SystemParams};
use crate::error::{Result, SwiptError};
use crate::kkt;
use crate::numeric;
use crate::regimes;
use crate::waterfill;

/// `(√5 − 1)/2`, the bracket shrink factor of golden-section search.
pub const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Smallest gap above the multiplier pole tried before extending downwards.
pub const NU_OFFSET: f64 = 1e-12;

const EXTENSION_CAP: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mode {
    EnergyBeamforming,
    SpatialMultiplexing,
    Infeasible,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::EnergyBeamforming => "EnergyBeamforming",
            Mode::SpatialMultiplexing => "SpatialMultiplexing",
            Mode::Infeasible => "Infeasible",
        }
    }
}

/// Work counters of one solve.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct SolveStats {
    /// Golden-section bracket reductions.
    pub outer_iterations: usize,
    /// Split ratios at which the inner problem was solved.
    pub probes: usize,
    /// Calls of the inner multiplier root-finder, one per tried active set.
    pub root_finds: usize,
    /// Evaluations of the reduced equations, polish included.
    pub inner_evaluations: usize,
    /// Some root had to be searched outside the nominal multiplier bracket.
    pub bracket_extended: bool,
    /// The final point was refined by Newton's method on both reduced equations.
    pub polished: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointSolution {
    pub mode: Mode,
    pub rho: f64,
    pub powers: PowerAllocation,
    pub mu: f64,
    pub nu: f64,
    /// `nu − rho·λ₁²` (`nu − λ₁²` for the ideal receiver), kept to full precision.
    pub nu_gap: f64,
    pub p_re: f64,
    pub rate_achieved: f64,
    pub r_s: usize,
    pub iterations: usize,
    pub stats: SolveStats,
}

impl JointSolution {
    pub fn infeasible(rank: usize) -> Self {
        Self {
            mode: Mode::Infeasible,
            rho: 0.0,
            powers: PowerAllocation { powers: vec![0.0; rank] },
            mu: 0.0,
            nu: 0.0,
            nu_gap: 0.0,
            p_re: 0.0,
            rate_achieved: 0.0,
            r_s: 0,
            iterations: 0,
            stats: SolveStats::default(),
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.mode != Mode::Infeasible
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GssBracket {
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
}

impl GssBracket {
    pub fn new(lo: f64, hi: f64, tol: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(SwiptError::InvalidInput(format!("invalid bracket [{lo}, {hi}]")));
        }
        if !(tol > 0.0) {
            return Err(SwiptError::InvalidInput(format!("tolerance must be positive, got {tol}")));
        }
        Ok(Self { lo, hi, tol })
    }

    /// Reductions needed to shrink the bracket below `tol`.
    pub fn iteration_bound(&self) -> usize {
        ((self.tol / (self.hi - self.lo)).ln() / GOLDEN.ln()).ceil().max(0.0) as usize + 1
    }
}

/// `c* = ⌈ln ξ / ln 0.618⌉ + 1`: reductions for a unit bracket at tolerance `tol`.
pub fn gss_iteration_bound(tol: f64) -> usize {
    (tol.ln() / GOLDEN.ln()).ceil().max(0.0) as usize + 1
}

#[derive(Debug, Clone)]
pub struct GssOutcome<T> {
    pub argmax: f64,
    pub value: f64,
    pub payload: T,
    pub iterations: usize,
    pub evaluations: usize,
}

/// Golden-section search for the maximizer of a unimodal `f` on the bracket.
pub fn gss_maximize<F>(mut f: F, bracket: GssBracket) -> Result<(f64, usize)>
where
    F: FnMut(f64) -> f64,
{
    let out = gss_maximize_with(|x| Ok((f(x), ())), bracket)?;
    Ok((out.argmax, out.iterations))
}

/// Golden-section search whose objective also returns a payload; the best
/// probe and its payload are returned.
pub fn gss_maximize_with<T, F>(mut f: F, bracket: GssBracket) -> Result<GssOutcome<T>>
where
    F: FnMut(f64) -> Result<(f64, T)>,
{
    let GssBracket { lo, hi, tol } = GssBracket::new(bracket.lo, bracket.hi, bracket.tol)?;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let (mut f1, mut t1) = f(x1)?;
    let (mut f2, mut t2) = f(x2)?;
    let mut evaluations = 2;
    let mut iterations = 0;
    let mut best: Option<(f64, f64, T)> = None;
    while b - a > tol {
        iterations += 1;
        if f1 >= f2 {
            b = x2;
            let prev = std::mem::replace(&mut t2, t1);
            keep_best(&mut best, x2, f2, prev);
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            let (v, t) = f(x1)?;
            f1 = v;
            t1 = t;
        } else {
            a = x1;
            let prev = std::mem::replace(&mut t1, t2);
            keep_best(&mut best, x1, f1, prev);
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            let (v, t) = f(x2)?;
            f2 = v;
            t2 = t;
        }
        evaluations += 1;
    }
    keep_best(&mut best, x1, f1, t1);
    keep_best(&mut best, x2, f2, t2);
    let (argmax, value, payload) = best.expect("at least two probes");
    Ok(GssOutcome { argmax, value, payload, iterations, evaluations })
}

fn keep_best<T>(best: &mut Option<(f64, f64, T)>, x: f64, v: f64, t: T) {
    if best.as_ref().is_none_or(|(_, bv, _)| v > *bv) {
        *best = Some((x, v, t));
    }
}

/// Largest split ratio at which waterfilling still meets the rate.
pub fn rho_upper_bound(dec: &ChannelDecomposition, params: &SystemParams) -> Result<f64> {
    let r_max = waterfill::max_rate(dec, params);
    if params.rate_req > r_max {
        return Err(SwiptError::InfeasibleRate { rate_req: params.rate_req, max_rate: r_max });
    }
    if params.rate_req <= 0.0 {
        return Ok(1.0);
    }
    if params.rate_req == r_max {
        return Ok(0.0);
    }
    let g = dec.gains();
    let wf = waterfill::waterfill_allocation(&dec.singvals, params.p_t, params.sigma2);
    let rate = |rho: f64| channel::rate_from_gains(&g, &wf.powers, rho, params.sigma2);
    let root = numeric::bisect(|rho| rate(rho) - params.rate_req, 0.0, 1.0, 0.0, 200)?;
    Ok(root.x_nonneg)
}

/// Nominal search interval for the budget multiplier at split ratio `rho`.
pub fn nu_bracket(rho: f64, lambda1: f64) -> GssBracket {
    let base = rho * lambda1 * lambda1;
    GssBracket { lo: base + NU_OFFSET, hi: base + (1.0 - rho), tol: NU_OFFSET }
}

/// Inner solution at a fixed split ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerSolution {
    pub rho: f64,
    pub nu_gap: f64,
    pub mu: f64,
    pub powers: Vec<f64>,
    pub r_s: usize,
    pub p_re: f64,
}

#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Work {
    pub(crate) root_finds: usize,
    pub(crate) evaluations: usize,
    pub(crate) extended: bool,
}

/// Root of an increasing residual in the gap variable, searched
/// geometrically from `[NU_OFFSET, hi]` and widened by factors when the
/// nominal ends do not bracket. Returns the end on the non-negative side.
pub(crate) fn gap_root<F>(mut f: F, hi: f64, rtol: f64, max_iter: usize, work: &mut Work) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    work.root_finds += 1;
    let mut eval = |x: f64, w: &mut Work| -> Result<f64> {
        w.evaluations += 1;
        f(x)
    };
    let mut lo = NU_OFFSET;
    let mut hi = hi;
    while eval(lo, work)? >= 0.0 {
        work.extended = true;
        lo *= 1e-4;
        if lo < 1e-300 {
            return Err(SwiptError::NumericalBracket("residual non-negative at the pole".into()));
        }
    }
    while eval(hi, work)? < 0.0 {
        work.extended = true;
        hi *= 2.0;
        if hi > EXTENSION_CAP {
            return Err(SwiptError::NumericalBracket(format!(
                "residual still negative at gap {hi:e}"
            )));
        }
    }
    let mut failure = None;
    let root = numeric::bisect_geometric(
        |x| match eval(x, work) {
            Ok(v) => v,
            Err(e) => {
                failure = Some(e);
                f64::NAN
            }
        },
        lo,
        hi,
        rtol,
        max_iter,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(root?.x_nonneg)
}

/// Active-set recursion at fixed `rho`: the largest `r_s ≤ r_w` whose
/// budget-consistent multipliers give strictly positive powers.
fn inner_solve(
    g: &[f64],
    rho: f64,
    params: &SystemParams,
    r_w: usize,
    rtol: f64,
    max_iter: usize,
    work: &mut Work,
) -> Result<Option<InnerSolution>> {
    let mut any_root = false;
    for r_s in (2..=r_w).rev() {
        let residual = |delta: f64| {
            kkt::budget_rate_logs(delta, rho, g, r_s, params.p_t, params.sigma2, params.rate_req).map(|(l, r)| l - r)
        };
        let delta = match gap_root(residual, 1.0 - rho, rtol, max_iter, work) {
            Ok(d) => d,
            Err(SwiptError::NumericalBracket(_)) => continue,
            Err(e) => return Err(e),
        };
        any_root = true;
        let (mu, powers) = kkt::budget_powers_gap(delta, rho, g, r_s, params.p_t, params.sigma2)?;
        if powers[..r_s].iter().all(|p| *p > 0.0) {
            let p_re = rho * powers.iter().zip(g).map(|(p, gk)| p * gk).sum::<f64>();
            return Ok(Some(InnerSolution { rho, nu_gap: delta, mu, powers, r_s, p_re }));
        }
    }
    if any_root {
        Ok(None)
    } else {
        Err(SwiptError::NumericalBracket(format!("no active set brackets a multiplier at rho = {rho}")))
    }
}

/// Inner solve at a single split ratio, iterating each root-find to full precision.
pub fn evaluate_at_rho(dec: &ChannelDecomposition, params: &SystemParams, rho: f64) -> Result<Option<InnerSolution>> {
    if !(0.0..1.0).contains(&rho) {
        return Err(SwiptError::Domain(format!("rho must lie in [0, 1), got {rho}")));
    }
    let r_w = waterfill::waterfill_rank(&dec.singvals, params.p_t, params.sigma2);
    let mut work = Work::default();
    inner_solve(&dec.gains(), rho, params, r_w, 1e-15, 400, &mut work)
}

pub(crate) fn eb_solution(dec: &ChannelDecomposition, params: &SystemParams) -> JointSolution {
    let l1 = dec.singvals[0];
    let pt = regimes::eb_kkt_point(params.rate_req, params.p_t, l1, params.sigma2);
    let powers = PowerAllocation::beamforming(params.p_t, dec.rank);
    let g = dec.gains();
    JointSolution {
        mode: Mode::EnergyBeamforming,
        rho: pt.rho_eb,
        rate_achieved: channel::rate_from_gains(&g, &powers.powers, pt.rho_eb, params.sigma2),
        p_re: pt.rho_eb * params.p_t * g[0],
        powers,
        mu: pt.mu_eb,
        nu: pt.nu_eb,
        nu_gap: pt.nu_eb - pt.rho_eb * g[0],
        r_s: 1,
        iterations: 0,
        stats: SolveStats::default(),
    }
}

/// Maximizes received power for harvesting under the rate requirement with
/// a uniform power-splitting receiver.
///
/// Rates up to the switching threshold are served by beamforming at the
/// largest split that meets the rate. Above it, golden-section search over
/// the split ratio in `[ρ_EB, ρ_UB]` wraps the inner active-set recursion,
/// whose root-finds stop at the relative tolerance `params.tol`; the best
/// probe is then refined by Newton's method on the two reduced equations.
pub fn solve_op1(dec: &ChannelDecomposition, params: &SystemParams) -> Result<JointSolution> {
    let r_max = waterfill::max_rate(dec, params);
    if params.rate_req > r_max {
        return Ok(JointSolution::infeasible(dec.rank));
    }
    let l1 = dec.singvals[0];
    let r_th = regimes::rate_threshold_for(dec, params.p_t, params.sigma2);
    let r_id = regimes::rate_threshold_ideal(l1, params.p_t, params.sigma2);
    if params.rate_req <= r_th.min(r_id) {
        return Ok(eb_solution(dec, params));
    }

    let g = dec.gains();
    let r_w = waterfill::waterfill_rank(&dec.singvals, params.p_t, params.sigma2);
    let rho_lo = regimes::rho_eb(params.rate_req, params.p_t, l1, params.sigma2);
    let rho_hi = rho_upper_bound(dec, params)?;
    let c_star = gss_iteration_bound(params.tol);
    let mut work = Work::default();
    let mut stats = SolveStats::default();

    // waterfilling at ρ_UB meets the rate exactly and never needs a root-find
    let wf = waterfill::waterfill_allocation(&dec.singvals, params.p_t, params.sigma2);
    let ops_candidate = InnerSolution {
        rho: rho_hi,
        nu_gap: f64::INFINITY,
        mu: f64::NAN,
        r_s: wf.active(),
        p_re: rho_hi * wf.powers.iter().zip(&g).map(|(p, gk)| p * gk).sum::<f64>(),
        powers: wf.powers.clone(),
    };
    let eb_value = rho_lo * params.p_t * g[0];

    let mut best: Option<InnerSolution> = None;
    if rho_hi - rho_lo > params.tol {
        let bracket = GssBracket::new(rho_lo, rho_hi, params.tol)?;
        let out = gss_maximize_with(
            |rho| {
                stats.probes += 1;
                let sol = inner_solve(&g, rho, params, r_w, params.tol, c_star, &mut work)?;
                Ok(match sol {
                    Some(s) => (s.p_re, Some(s)),
                    None => (eb_value, None),
                })
            },
            bracket,
        )?;
        stats.outer_iterations = out.iterations;
        best = out.payload;
    } else if rho_hi > rho_lo {
        stats.probes += 1;
        best = inner_solve(&g, 0.5 * (rho_lo + rho_hi), params, r_w, params.tol, c_star, &mut work)?;
    }

    let mut chosen = match best {
        Some(b) if b.p_re >= ops_candidate.p_re => b,
        _ => ops_candidate,
    };
    if chosen.nu_gap.is_finite() {
        if let Some(p) = polish(&g, params, &chosen, rho_lo, rho_hi, &mut work) {
            chosen = p;
            stats.polished = true;
        }
    }

    stats.root_finds = work.root_finds;
    stats.inner_evaluations = work.evaluations;
    stats.bracket_extended = work.extended;
    Ok(finish_split(dec, params, chosen, stats))
}

fn finish_split(dec: &ChannelDecomposition, params: &SystemParams, s: InnerSolution, stats: SolveStats) -> JointSolution {
    let g = dec.gains();
    let powers: Vec<f64> = s.powers.iter().map(|p| p.max(0.0)).collect();
    let (mu, nu, nu_gap) = if s.nu_gap.is_finite() {
        (s.mu, s.rho * g[0] + s.nu_gap, s.nu_gap)
    } else {
        (f64::INFINITY, f64::INFINITY, f64::INFINITY)
    };
    JointSolution {
        mode: Mode::SpatialMultiplexing,
        rho: s.rho,
        rate_achieved: channel::rate_from_gains(&g, &powers, s.rho, params.sigma2),
        p_re: s.p_re,
        powers: PowerAllocation { powers },
        mu,
        nu,
        nu_gap,
        r_s: s.r_s,
        iterations: stats.outer_iterations,
        stats,
    }
}

/// Newton refinement of `(ρ, ln δ)` on the budget-rate and split-stationarity
/// equations at a fixed active set. Returns `None` when it does not converge
/// to a point at least as good as the start.
fn polish(
    g: &[f64],
    params: &SystemParams,
    start: &InnerSolution,
    rho_lo: f64,
    rho_hi: f64,
    work: &mut Work,
) -> Option<InnerSolution> {
    let r_s = start.r_s;
    let mut eval = |rho: f64, s: f64| -> Option<[f64; 2]> {
        work.evaluations += 1;
        if !(0.0..1.0).contains(&rho) {
            return None;
        }
        let delta = s.exp();
        let (l1, r1) = kkt::budget_rate_logs(delta, rho, g, r_s, params.p_t, params.sigma2, params.rate_req).ok()?;
        let (l2, r2) = kkt::stationarity_sides(delta, rho, g, r_s, params.rate_req).ok()?;
        let f = [l1 - r1, l2 / r2 - 1.0];
        f.iter().all(|v| v.is_finite()).then_some(f)
    };
    let norm = |f: &[f64; 2]| f[0].abs().max(f[1].abs());

    let (mut rho, mut s) = (start.rho, start.nu_gap.ln());
    let mut f = eval(rho, s)?;
    for _ in 0..40 {
        if norm(&f) < 1e-13 {
            break;
        }
        let h_rho = 1e-7 * (1.0 - rho).max(1e-12);
        let h_s = 1e-7;
        let f_rho = eval(rho + h_rho, s)?;
        let f_s = eval(rho, s + h_s)?;
        let j = [
            [(f_rho[0] - f[0]) / h_rho, (f_s[0] - f[0]) / h_s],
            [(f_rho[1] - f[1]) / h_rho, (f_s[1] - f[1]) / h_s],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if !(det.abs() > 0.0) || !det.is_finite() {
            return None;
        }
        let d_rho = (f[0] * j[1][1] - f[1] * j[0][1]) / det;
        let d_s = (j[0][0] * f[1] - j[1][0] * f[0]) / det;
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let (nr, ns) = (rho - step * d_rho, s - step * d_s);
            if let Some(nf) = eval(nr, ns) {
                if norm(&nf) < norm(&f) {
                    rho = nr;
                    s = ns;
                    f = nf;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if norm(&f) > 1e-10 {
        return None;
    }
    let slack = 1e-12;
    if rho < rho_lo - slack || rho > rho_hi + slack {
        return None;
    }
    let delta = s.exp();
    let (mu, powers) = kkt::budget_powers_gap(delta, rho, g, r_s, params.p_t, params.sigma2).ok()?;
    if powers[..r_s].iter().any(|p| *p <= 0.0) {
        return None;
    }
    let p_re = rho * powers.iter().zip(g).map(|(p, gk)| p * gk).sum::<f64>();
    if p_re < start.p_re * (1.0 - 1e-6) {
        return None;
    }
    Some(InnerSolution { rho, nu_gap: delta, mu, powers, r_s, p_re })
}

/// Maximizes received power under the rate requirement for a receiver that
/// can harvest and decode the same signal.
///
/// The reported split ratio is 1 (everything harvested); the rate is the
/// one the decoder sees without any split.
pub fn solve_op2(dec: &ChannelDecomposition, params: &SystemParams) -> Result<JointSolution> {
    let r_max = waterfill::max_rate(dec, params);
    if params.rate_req > r_max {
        return Ok(JointSolution::infeasible(dec.rank));
    }
    let g = dec.gains();
    let r_id = regimes::rate_threshold_ideal(dec.singvals[0], params.p_t, params.sigma2);
    if params.rate_req <= r_id {
        let powers = PowerAllocation::beamforming(params.p_t, dec.rank);
        return Ok(JointSolution {
            mode: Mode::EnergyBeamforming,
            rho: 1.0,
            rate_achieved: r_id,
            p_re: params.p_t * g[0],
            powers,
            mu: 0.0,
            nu: g[0],
            nu_gap: 0.0,
            r_s: 1,
            iterations: 0,
            stats: SolveStats::default(),
        });
    }

    let r_w = waterfill::waterfill_rank(&dec.singvals, params.p_t, params.sigma2);
    let mut work = Work::default();
    let mut found = None;
    let mut any_root = false;
    for r_s in (2..=r_w).rev() {
        let residual = |beta: f64| {
            let (l, r) = kkt::ideal_logs(beta, &g, r_s, params.p_t, params.sigma2, params.rate_req);
            Ok(l - r)
        };
        let beta = match gap_root(residual, 1.0, 1e-15, 400, &mut work) {
            Ok(b) => b,
            Err(SwiptError::NumericalBracket(_)) => continue,
            Err(e) => return Err(e),
        };
        any_root = true;
        let (mu, powers) = kkt::ideal_powers_gap(beta, &g, r_s, params.p_t, params.sigma2);
        if powers[..r_s].iter().all(|p| *p > 0.0) {
            found = Some((beta, mu, powers, r_s));
            break;
        }
    }
    let stats = SolveStats {
        root_finds: work.root_finds,
        inner_evaluations: work.evaluations,
        bracket_extended: work.extended,
        ..SolveStats::default()
    };
    let (beta, mu, powers, r_s) = match found {
        Some(f) => f,
        // the multiplier diverges as the rate approaches its maximum, where
        // the allocation becomes waterfilling
        None if params.rate_req >= r_max * (1.0 - 1e-9) || !any_root => {
            if params.rate_req < r_max * (1.0 - 1e-9) {
                return Err(SwiptError::NumericalBracket("no active set brackets the ideal multiplier".into()));
            }
            let wf = waterfill::waterfill_allocation(&dec.singvals, params.p_t, params.sigma2);
            let r_s = wf.active();
            (f64::INFINITY, f64::INFINITY, wf.powers, r_s)
        }
        None => {
            return Err(SwiptError::NumericalBracket("ideal multiplier gives negative powers for every active set".into()))
        }
    };
    let powers: Vec<f64> = powers.into_iter().map(|p| p.max(0.0)).collect();
    Ok(JointSolution {
        mode: Mode::SpatialMultiplexing,
        rho: 1.0,
        rate_achieved: channel::rate_from_gains(&g, &powers, 0.0, params.sigma2),
        p_re: powers.iter().zip(&g).map(|(p, gk)| p * gk).sum(),
        powers: PowerAllocation { powers },
        mu,
        nu: g[0] + beta,
        nu_gap: beta,
        r_s,
        iterations: 0,
        stats,
    })
}

/// Samples the optimal received power at `samples` split ratios across
/// `[ρ_EB, ρ_UB]` and reports whether the profile is unimodal.
pub fn check_unimodal(dec: &ChannelDecomposition, params: &SystemParams, samples: usize) -> Result<bool> {
    let l1 = dec.singvals[0];
    let lo = regimes::rho_eb(params.rate_req, params.p_t, l1, params.sigma2);
    let hi = rho_upper_bound(dec, params)?;
    let eb_value = lo * params.p_t * dec.lambda1_sq();
    let mut values = Vec::with_capacity(samples);
    for i in 1..samples.max(3) - 1 {
        let rho = lo + (hi - lo) * i as f64 / (samples.max(3) - 1) as f64;
        let v = evaluate_at_rho(dec, params, rho)?.map_or(eb_value, |s| s.p_re);
        values.push(v);
    }
    let peak = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map_or(0, |(i, _)| i);
    let tol = 1e-9 * values[peak].abs();
    let rising = values[..=peak].windows(2).all(|w| w[1] >= w[0] - tol);
    let falling = values[peak..].windows(2).all(|w| w[1] <= w[0] + tol);
    Ok(rising && falling)
}
