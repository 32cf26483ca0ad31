//! Baseline schemes and brute-force references: waterfilling with the best
//! split (OPS), the optimal covariance at a fixed half split (OTCM),
//! per-antenna split search (DPS) and an exhaustive 2×2 grid.

use std::f64::consts::LN_2;

use num_complex::Complex64;

use crate::channel::{self, decompose, ChannelDecomposition, ChannelMatrix, PowerAllocation, SystemParams};
use crate::error::{Result, SwiptError};
use crate::linalg::{self, CMatrix};
use crate::numeric;
use crate::solver::{self, JointSolution, Mode, SolveStats};
use crate::waterfill;

/// Default points per dimension for the grid searches.
pub const DEFAULT_GRID_POINTS: usize = 101;
/// Largest receive array the DPS search enumerates.
pub const DPS_MAX_ANTENNAS: usize = 4;

fn mode_for(active: usize) -> Mode {
    if active > 1 {
        Mode::SpatialMultiplexing
    } else {
        Mode::EnergyBeamforming
    }
}

fn fixed_solution(dec: &ChannelDecomposition, params: &SystemParams, rho: f64, powers: Vec<f64>) -> JointSolution {
    let g = dec.gains();
    let alloc = PowerAllocation { powers };
    let active = alloc.active();
    JointSolution {
        mode: mode_for(active),
        rho,
        rate_achieved: channel::rate_from_gains(&g, &alloc.powers, rho, params.sigma2),
        p_re: rho * alloc.powers.iter().zip(&g).map(|(p, gk)| p * gk).sum::<f64>(),
        powers: alloc,
        mu: f64::NAN,
        nu: f64::NAN,
        nu_gap: f64::NAN,
        r_s: active,
        iterations: 0,
        stats: SolveStats::default(),
    }
}

/// Waterfilling covariance with the largest split ratio that still meets the
/// rate.
pub fn baseline_ops(dec: &ChannelDecomposition, params: &SystemParams) -> Result<JointSolution> {
    if params.rate_req > waterfill::max_rate(dec, params) {
        return Ok(JointSolution::infeasible(dec.rank));
    }
    let rho = solver::rho_upper_bound(dec, params)?;
    let wf = waterfill::waterfill_allocation(&dec.singvals, params.p_t, params.sigma2);
    Ok(fixed_solution(dec, params, rho, wf.powers))
}

/// Split ratio of the fixed-split baseline.
pub const OTCM_RHO: f64 = 0.5;

/// Optimal covariance at the split ratio pinned to one half.
pub fn baseline_otcm(dec: &ChannelDecomposition, params: &SystemParams) -> Result<JointSolution> {
    let g = dec.gains();
    let wf = waterfill::waterfill_allocation(&dec.singvals, params.p_t, params.sigma2);
    if channel::rate_from_gains(&g, &wf.powers, OTCM_RHO, params.sigma2) < params.rate_req {
        return Ok(JointSolution::infeasible(dec.rank));
    }
    let bf = PowerAllocation::beamforming(params.p_t, dec.rank);
    if channel::rate_from_gains(&g, &bf.powers, OTCM_RHO, params.sigma2) >= params.rate_req {
        return Ok(fixed_solution(dec, params, OTCM_RHO, bf.powers));
    }
    match solver::evaluate_at_rho(dec, params, OTCM_RHO) {
        Ok(Some(s)) => {
            let mut sol = fixed_solution(dec, params, OTCM_RHO, s.powers.iter().map(|p| p.max(0.0)).collect());
            sol.mu = s.mu;
            sol.nu = OTCM_RHO * g[0] + s.nu_gap;
            sol.nu_gap = s.nu_gap;
            Ok(sol)
        }
        // the requirement sits on the waterfilling rate at this split
        Ok(None) | Err(SwiptError::NumericalBracket(_)) => Ok(fixed_solution(dec, params, OTCM_RHO, wf.powers)),
        Err(e) => Err(e),
    }
}

/// Covariance optimum for a fixed per-antenna split vector.
#[derive(Debug, Clone)]
pub struct SplitSolution {
    pub covariance: CMatrix,
    pub p_re: f64,
    pub rate_achieved: f64,
    /// Multiplier of the rate constraint: zero for beamforming, infinite when
    /// the rate sits at the decoder's capacity.
    pub rate_multiplier: f64,
    pub mode: Mode,
}

/// `max tr(A S)` subject to `log2 det(I + σ⁻² G S G^H) ≥ R`, `tr S ≤ P_T`, with
/// `G = diag(√(1−ρ_i)) H` feeding the decoder and `A = H^H diag(ρ_i) H`
/// feeding the harvester.
pub struct FixedSplitProblem {
    g: CMatrix,
    a_vals: Vec<f64>,
    a_vecs: CMatrix,
    p_t: f64,
    sigma2: f64,
    rate_req: f64,
}

impl FixedSplitProblem {
    pub fn new(h: &CMatrix, split: &[f64], params: &SystemParams) -> Result<Self> {
        if split.len() != h.nrows() {
            return Err(SwiptError::Dimension(format!(
                "{} split ratios for {} receive antennas",
                split.len(),
                h.nrows()
            )));
        }
        if split.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return Err(SwiptError::Domain("split ratios must lie in [0, 1]".into()));
        }
        let id: Vec<f64> = split.iter().map(|r| (1.0 - r).sqrt()).collect();
        let g = linalg::real_diag(&id) * h;
        let a = h.adjoint() * linalg::real_diag(split) * h;
        let (a_vals, a_vecs) = linalg::hermitian_eigen(&a);
        Ok(Self { g, a_vals, a_vecs, p_t: params.p_t, sigma2: params.sigma2, rate_req: params.rate_req })
    }

    /// `P_T·λ_max(A)`, the received power of beamforming with no rate demand.
    pub fn upper_bound(&self) -> f64 {
        self.p_t * self.a_vals[0].max(0.0)
    }

    /// Covariance at power price `λ_max(A) + gap` with the rate met exactly,
    /// and its rate multiplier. Worked in the eigenbasis of `A`, where
    /// `Q^{-1/2}` is diagonal, so no cancellation occurs as `gap → 0`.
    fn covariance_at(&self, gap: f64) -> PricePoint {
        let top = self.a_vals[0];
        let w: Vec<f64> = self.a_vals.iter().map(|a| (LN_2 * (gap + (top - a))).powf(-0.5)).collect();
        let m = &self.g * &self.a_vecs * linalg::real_diag(&w) * Complex64::new(self.sigma2.powf(-0.5), 0.0);
        let svd = m.svd(false, true);
        let v_t = svd.v_t.expect("requested V^H");
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
        let c: Vec<f64> = order.iter().map(|&i| svd.singular_values[i].powi(2)).collect();
        let mu = rate_multiplier(&c, self.rate_req);
        let mut levels = vec![0.0; svd.singular_values.len()];
        for (&i, ci) in order.iter().zip(&c) {
            levels[i] = if *ci > 0.0 { (1.0 - 1.0 / (mu * ci)).max(0.0) } else { 0.0 };
        }
        let y = v_t.adjoint() * linalg::real_diag(&levels) * &v_t;
        let x = CMatrix::from_fn(w.len(), w.len(), |i, j| y[(i, j)] * (mu * w[i] * w[j]));
        let rate = order.iter().zip(&c).map(|(&i, ci)| (mu * ci * levels[i]).ln_1p()).sum::<f64>() / LN_2;
        PricePoint { trace: linalg::trace_re(&x), covariance: &self.a_vecs * x * self.a_vecs.adjoint(), mu, rate }
    }

    fn finish(&self, s: CMatrix, rate_achieved: f64, rate_multiplier: f64, mode: Mode) -> SplitSolution {
        let a = &self.a_vecs * linalg::real_diag(&self.a_vals) * self.a_vecs.adjoint();
        SplitSolution { p_re: linalg::trace_re(&(&a * &s)), rate_achieved, rate_multiplier, covariance: s, mode }
    }

    /// Solves the fixed-split problem; `None` when the rate is out of reach.
    ///
    /// Beamforming along the top eigenvector of `A` wins whenever it meets the
    /// rate. Otherwise both constraints bind; for each power price `ν` the
    /// rate multiplier has a closed form and the trace of the resulting
    /// covariance falls monotonically in `ν`, leaving one scalar root.
    pub fn solve(&self) -> Result<Option<SplitSolution>> {
        let u1 = self.a_vecs.column(0).into_owned();
        let gain = (&self.g * &u1).norm_squared();
        let eb_rate = (self.p_t * gain / self.sigma2).ln_1p() / LN_2;
        if eb_rate >= self.rate_req {
            let s = &u1 * u1.adjoint() * Complex64::new(self.p_t, 0.0);
            return Ok(Some(self.finish(s, eb_rate, 0.0, Mode::EnergyBeamforming)));
        }
        let sv = self.g.singular_values();
        let mut svals: Vec<f64> = sv.iter().copied().filter(|s| *s > 0.0).collect();
        svals.sort_by(|a, b| b.total_cmp(a));
        if svals.is_empty() {
            return Ok(None);
        }
        let r_max = waterfill::max_rate(
            &ChannelDecomposition::from_singular_values(&svals)?,
            &SystemParams::new(self.p_t, self.sigma2, 0.0, 1e-4)?,
        );
        if r_max < self.rate_req {
            return Ok(None);
        }
        let residual = |gap: f64| self.p_t - self.covariance_at(gap).trace;
        let mut lo = 1e-12 * self.a_vals[0].max(f64::MIN_POSITIVE);
        while residual(lo) >= 0.0 {
            lo *= 1e-4;
            if lo < 1e-300 {
                return Err(SwiptError::NumericalBracket("trace stays under budget at the pole".into()));
            }
        }
        let mut hi = 1.0;
        while residual(hi) < 0.0 {
            hi *= 2.0;
            if hi > 1e12 {
                // the requirement sits at the decoder's capacity
                let wf = waterfill::waterfill_allocation(&svals, self.p_t, self.sigma2);
                let v = self.g.clone().svd(false, true).v_t.expect("requested V^H").adjoint();
                let s = v.columns(0, svals.len()) * linalg::real_diag(&wf.powers) * v.columns(0, svals.len()).adjoint();
                let gains: Vec<f64> = svals.iter().map(|x| x * x).collect();
                let rate = channel::rate_from_gains(&gains, &wf.powers, 0.0, self.sigma2);
                return Ok(Some(self.finish(s, rate, f64::INFINITY, mode_for(wf.active()))));
            }
        }
        let root = numeric::bisect_geometric(residual, lo, hi, 1e-14, 400)?;
        let point = self.covariance_at(root.x_nonneg);
        Ok(Some(self.finish(point.covariance, point.rate, point.mu, Mode::SpatialMultiplexing)))
    }
}

struct PricePoint {
    trace: f64,
    covariance: CMatrix,
    mu: f64,
    rate: f64,
}

/// `μ` with `Σ log2 max(μ c_i, 1) = R` for descending `c`.
fn rate_multiplier(c: &[f64], rate_req: f64) -> f64 {
    let mut sum_log = 0.0;
    let mut mu = f64::INFINITY;
    for (k, ck) in c.iter().enumerate().filter(|(_, ck)| **ck > 0.0) {
        sum_log += ck.log2();
        mu = ((rate_req - sum_log) / (k + 1) as f64).exp2();
        if c.get(k + 1).is_none_or(|next| mu * next <= 1.0) {
            break;
        }
    }
    mu
}

/// Best per-antenna split found by the grid search.
#[derive(Debug, Clone)]
pub struct DpsSolution {
    pub split: Vec<f64>,
    pub covariance: CMatrix,
    pub p_re: f64,
    pub rate_achieved: f64,
    pub mode: Mode,
    /// Grid tuples whose covariance problem was solved.
    pub evaluated: usize,
    /// Grid tuples discarded by the received-power bound.
    pub pruned: usize,
}

impl DpsSolution {
    /// Mean split ratio, for tabulation next to uniform-split schemes.
    pub fn mean_split(&self) -> f64 {
        self.split.iter().sum::<f64>() / self.split.len().max(1) as f64
    }
}

/// Exhaustive search over per-antenna split ratios on a uniform grid with
/// `grid_points` values per antenna, solving the covariance problem at each.
///
/// Tuples are visited nearest-first around the uniform-split optimum, and a
/// tuple is skipped when even rate-free beamforming could not beat the best
/// so far; the result equals the plain exhaustive maximum, ties going to the
/// lowest grid index.
pub fn baseline_dps_grid(h: &ChannelMatrix, params: &SystemParams, grid_points: usize) -> Result<DpsSolution> {
    let n = h.n_r();
    if n > DPS_MAX_ANTENNAS {
        return Err(SwiptError::InvalidInput(format!("DPS search supports at most {DPS_MAX_ANTENNAS} receive antennas")));
    }
    if grid_points < 11 {
        return Err(SwiptError::InvalidInput(format!("DPS grid needs at least 11 points, got {grid_points}")));
    }
    let infeasible = DpsSolution {
        split: vec![0.0; n],
        covariance: CMatrix::zeros(h.n_t(), h.n_t()),
        p_re: 0.0,
        rate_achieved: 0.0,
        mode: Mode::Infeasible,
        evaluated: 0,
        pruned: 0,
    };
    let dec = decompose(h)?;
    let ups = solver::solve_op1(&dec, params)?;
    let centre = if ups.is_feasible() { ups.rho } else { 0.0 };
    let step = 1.0 / (grid_points - 1) as f64;
    let total = grid_points.pow(n as u32);
    let tuple = |mut idx: usize| -> Vec<usize> {
        (0..n)
            .map(|_| {
                let k = idx % grid_points;
                idx /= grid_points;
                k
            })
            .collect()
    };
    let mut order: Vec<(f64, usize)> = (0..total)
        .map(|i| (tuple(i).iter().map(|&k| (k as f64 * step - centre).powi(2)).sum(), i))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut best: Option<(usize, Vec<f64>, SplitSolution)> = None;
    let (mut evaluated, mut pruned) = (0, 0);
    for (_, i) in order {
        let split: Vec<f64> = tuple(i).iter().map(|&k| k as f64 * step).collect();
        let problem = FixedSplitProblem::new(h.entries(), &split, params)?;
        if let Some((_, _, b)) = &best {
            if problem.upper_bound() < b.p_re {
                pruned += 1;
                continue;
            }
        }
        evaluated += 1;
        let Some(sol) = problem.solve()? else { continue };
        let better = match &best {
            None => true,
            Some((bi, _, b)) => sol.p_re > b.p_re || (sol.p_re == b.p_re && i < *bi),
        };
        if better {
            best = Some((i, split, sol));
        }
    }
    Ok(match best {
        Some((_, split, s)) => DpsSolution {
            split,
            covariance: s.covariance,
            p_re: s.p_re,
            rate_achieved: s.rate_achieved,
            mode: s.mode,
            evaluated,
            pruned,
        },
        None => DpsSolution { evaluated, pruned, ..infeasible },
    })
}

/// Exhaustive 2×2 search and its grid spacing.
#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub solution: JointSolution,
    pub rho_step: f64,
    pub power_step: f64,
}

/// Grid over `ρ ∈ [0, 1]` and `p₁ ∈ [0, P_T]` (`p₂ = P_T − p₁`) in the
/// eigenbasis of a rank-2 channel, `grid_points` intervals per axis.
pub fn oracle_grid_2x2(h: &ChannelMatrix, params: &SystemParams, grid_points: usize) -> Result<OracleSolution> {
    oracle_grid_eigen(&decompose(h)?, params, grid_points)
}

/// [`oracle_grid_2x2`] on an existing decomposition.
pub fn oracle_grid_eigen(dec: &ChannelDecomposition, params: &SystemParams, grid_points: usize) -> Result<OracleSolution> {
    if dec.rank != 2 {
        return Err(SwiptError::Dimension(format!("grid oracle needs a rank-2 channel, got rank {}", dec.rank)));
    }
    if grid_points == 0 {
        return Err(SwiptError::InvalidInput("grid needs at least one interval".into()));
    }
    let g = dec.gains();
    let rho_step = 1.0 / grid_points as f64;
    let power_step = params.p_t / grid_points as f64;
    let mut best: Option<(f64, f64, f64)> = None;
    for i in 0..=grid_points {
        let rho = i as f64 * rho_step;
        for j in 0..=grid_points {
            let p1 = j as f64 * power_step;
            let powers = [p1, params.p_t - p1];
            if channel::rate_from_gains(&g, &powers, rho, params.sigma2) < params.rate_req {
                continue;
            }
            let value = rho * (powers[0] * g[0] + powers[1] * g[1]);
            if best.is_none_or(|(v, _, _)| value > v) {
                best = Some((value, rho, p1));
            }
        }
    }
    let solution = match best {
        Some((_, rho, p1)) => fixed_solution(dec, params, rho, vec![p1, params.p_t - p1]),
        None => JointSolution::infeasible(2),
    };
    Ok(OracleSolution { solution, rho_step, power_step })
}
