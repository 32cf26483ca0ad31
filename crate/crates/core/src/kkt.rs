//! Closed forms and residuals derived from the KKT conditions of both problems.
//!
//! Every function takes the rate multiplier `mu`, the budget multiplier `nu`
//! and the split ratio `rho` in the eigenbasis of the channel; only the
//! leading `r_s` eigenchannels are active. The solver works with the gap
//! `delta = nu − rho·λ₁²` instead of `nu` to keep the pole at
//! `nu = rho·λ₁²` free of cancellation, so each residual has a `*_gap` twin.

use std::f64::consts::LN_2;

use crate::channel::PowerAllocation;
use crate::error::{Result, SwiptError};
use crate::linalg::{self, CMatrix};

/// A multiplexing KKT point of the split-receiver problem.
#[derive(Debug, Clone, PartialEq)]
pub struct SmKktPoint {
    pub rho: f64,
    pub mu: f64,
    pub nu: f64,
    pub r_s: usize,
    pub powers: PowerAllocation,
}

fn gains(singvals: &[f64]) -> Vec<f64> {
    singvals.iter().map(|s| s * s).collect()
}

fn check_active(singvals: &[f64], r_s: usize) -> Result<()> {
    if r_s == 0 || r_s > singvals.len() {
        return Err(SwiptError::Dimension(format!(
            "active set {r_s} outside 1..={}",
            singvals.len()
        )));
    }
    Ok(())
}

fn check_rho(rho: f64) -> Result<()> {
    if !(0.0..1.0).contains(&rho) {
        return Err(SwiptError::Domain(format!("rho must lie in [0, 1), got {rho}")));
    }
    Ok(())
}

/// `ν − ρλ_k²` for the active modes, from the gap above the strongest pole.
pub(crate) fn denominators(delta: f64, rho: f64, gains: &[f64], r_s: usize) -> Result<Vec<f64>> {
    if !(delta > 0.0) {
        return Err(SwiptError::Domain(format!("nu must exceed rho*lambda1^2 (gap {delta:e})")));
    }
    Ok(gains[..r_s].iter().map(|g| delta + rho * (gains[0] - g)).collect())
}

fn gap(nu: f64, rho: f64, gains: &[f64]) -> f64 {
    nu - rho * gains[0]
}

// ---- split receiver ----

/// Modified waterfilling `p_k = (μ/(ln2·(ν−ρλ_k²)) − σ²/((1−ρ)λ_k²))⁺` on the
/// first `r_s` modes, zero beyond.
pub fn power_allocation(
    mu: f64,
    nu: f64,
    rho: f64,
    singvals: &[f64],
    r_s: usize,
    sigma2: f64,
) -> Result<PowerAllocation> {
    let raw = power_allocation_raw(mu, nu, rho, singvals, r_s, sigma2)?;
    Ok(PowerAllocation { powers: raw.into_iter().map(|p| p.max(0.0)).collect() })
}

/// Same as [`power_allocation`] without the clamp at zero.
pub fn power_allocation_raw(
    mu: f64,
    nu: f64,
    rho: f64,
    singvals: &[f64],
    r_s: usize,
    sigma2: f64,
) -> Result<Vec<f64>> {
    check_active(singvals, r_s)?;
    check_rho(rho)?;
    let g = gains(singvals);
    if let Some(k) = (0..r_s).find(|&k| nu - rho * g[k] <= 0.0) {
        return Err(SwiptError::Domain(format!("nu - rho*lambda_{}^2 is not positive", k + 1)));
    }
    Ok(allocation_from(mu, |k| nu - rho * g[k], rho, &g, r_s, sigma2))
}

fn allocation_from(mu: f64, d: impl Fn(usize) -> f64, rho: f64, g: &[f64], r_s: usize, sigma2: f64) -> Vec<f64> {
    (0..g.len())
        .map(|k| {
            if k < r_s {
                mu / (LN_2 * d(k)) - sigma2 / ((1.0 - rho) * g[k])
            } else {
                0.0
            }
        })
        .collect()
}

/// Rate multiplier that makes the unclamped allocation spend exactly `p_t`.
pub fn mu_from_nu_rho(nu: f64, rho: f64, singvals: &[f64], r_s: usize, p_t: f64, sigma2: f64) -> Result<f64> {
    check_active(singvals, r_s)?;
    check_rho(rho)?;
    let g = gains(singvals);
    mu_budget_gap(gap(nu, rho, &g), rho, &g, r_s, p_t, sigma2)
}

pub(crate) fn mu_budget_gap(delta: f64, rho: f64, g: &[f64], r_s: usize, p_t: f64, sigma2: f64) -> Result<f64> {
    let d = denominators(delta, rho, g, r_s)?;
    let noise: f64 = g[..r_s].iter().map(|gk| sigma2 / ((1.0 - rho) * gk)).sum();
    let inv: f64 = d.iter().map(|dk| 1.0 / (dk * LN_2)).sum();
    Ok((p_t + noise) / inv)
}

/// Rate multiplier that makes the unclamped allocation meet `rate_req` exactly.
pub fn mu_from_rate(nu: f64, rho: f64, singvals: &[f64], r_s: usize, sigma2: f64, rate_req: f64) -> Result<f64> {
    check_active(singvals, r_s)?;
    check_rho(rho)?;
    let g = gains(singvals);
    let d = denominators(gap(nu, rho, &g), rho, &g, r_s)?;
    let ln_geo = ln_geo_gain(&g, &d);
    Ok((rate_req * LN_2 / r_s as f64 - ln_geo).exp() * sigma2 * LN_2 / (1.0 - rho))
}

/// `ln (Π λ_k²/d_k)^{1/r_s}`.
fn ln_geo_gain(g: &[f64], d: &[f64]) -> f64 {
    d.iter().zip(g).map(|(dk, gk)| gk.ln() - dk.ln()).sum::<f64>() / d.len() as f64
}

fn normalized(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs) / (rhs.abs() + 1.0)
}

/// Budget-versus-rate consistency of `(ν, ρ)`: zero exactly when the
/// multiplier implied by the power budget also meets the rate requirement.
///
/// Negative just above the pole `ν = ρλ₁²`, increasing in `ν`, and positive
/// for large `ν` whenever the rate is reachable with `r_s` modes.
pub fn residual_budget_rate(
    nu: f64,
    rho: f64,
    singvals: &[f64],
    r_s: usize,
    p_t: f64,
    sigma2: f64,
    rate_req: f64,
) -> Result<f64> {
    check_active(singvals, r_s)?;
    check_rho(rho)?;
    let g = gains(singvals);
    let (lhs, rhs) = budget_rate_sides(gap(nu, rho, &g), rho, &g, r_s, p_t, sigma2, rate_req)?;
    Ok(normalized(lhs, rhs))
}

pub(crate) fn budget_rate_sides(
    delta: f64,
    rho: f64,
    g: &[f64],
    r_s: usize,
    p_t: f64,
    sigma2: f64,
    rate_req: f64,
) -> Result<(f64, f64)> {
    let (ln_lhs, ln_rhs) = budget_rate_logs(delta, rho, g, r_s, p_t, sigma2, rate_req)?;
    Ok((ln_lhs.exp(), ln_rhs.exp()))
}

/// Logarithms of both sides; same sign structure, better conditioned.
pub(crate) fn budget_rate_logs(
    delta: f64,
    rho: f64,
    g: &[f64],
    r_s: usize,
    p_t: f64,
    sigma2: f64,
    rate_req: f64,
) -> Result<(f64, f64)> {
    let d = denominators(delta, rho, g, r_s)?;
    let inv_g: f64 = g[..r_s].iter().map(|gk| 1.0 / gk).sum();
    let inv_d: f64 = d.iter().map(|dk| 1.0 / dk).sum();
    let ln_lhs = (p_t * (1.0 - rho) / sigma2 + inv_g).ln() - inv_d.ln();
    let ln_rhs = rate_req * LN_2 / r_s as f64 - ln_geo_gain(&g[..r_s], &d);
    Ok((ln_lhs, ln_rhs))
}

/// Split-ratio stationarity at `(ν, ρ)`, with powers implied by the rate
/// requirement.
///
/// The sign is opposite to that of the Lagrangian's derivative in `ρ`: a
/// negative value means harvesting more would still pay off. Written in
/// per-mode SNR terms, it does not depend on `sigma2`.
pub fn residual_stationarity_rho(
    nu: f64,
    rho: f64,
    singvals: &[f64],
    r_s: usize,
    sigma2: f64,
    rate_req: f64,
) -> Result<f64> {
    check_active(singvals, r_s)?;
    check_rho(rho)?;
    let _ = sigma2;
    let g = gains(singvals);
    let (lhs, rhs) = stationarity_sides(gap(nu, rho, &g), rho, &g, r_s, rate_req)?;
    Ok(normalized(lhs, rhs))
}

pub(crate) fn stationarity_sides(delta: f64, rho: f64, g: &[f64], r_s: usize, rate_req: f64) -> Result<(f64, f64)> {
    let d = denominators(delta, rho, g, r_s)?;
    let ln_geo = ln_geo_gain(&g[..r_s], &d);
    let per_mode = rate_req * LN_2 / r_s as f64;
    // q_k = 1 + (1−ρ)·SNR_k at the rate-implied powers
    let q: Vec<f64> = (0..r_s).map(|k| (per_mode + g[k].ln() - d[k].ln() - ln_geo).exp()).collect();
    let lhs = per_mode.exp() * q.iter().map(|qk| 1.0 - 1.0 / qk).sum::<f64>() / (1.0 - rho);
    let rhs = ln_geo.exp() * q.iter().map(|qk| qk - 1.0).sum::<f64>();
    Ok((lhs, rhs))
}

/// Powers implied by the rate requirement at `(ν, ρ)`.
pub fn rate_implied_powers(
    nu: f64,
    rho: f64,
    singvals: &[f64],
    r_s: usize,
    sigma2: f64,
    rate_req: f64,
) -> Result<Vec<f64>> {
    let mu = mu_from_rate(nu, rho, singvals, r_s, sigma2, rate_req)?;
    power_allocation_raw(mu, nu, rho, singvals, r_s, sigma2)
}

/// Unclamped powers at gap `delta` with the budget-closing multiplier.
pub(crate) fn budget_powers_gap(
    delta: f64,
    rho: f64,
    g: &[f64],
    r_s: usize,
    p_t: f64,
    sigma2: f64,
) -> Result<(f64, Vec<f64>)> {
    let mu = mu_budget_gap(delta, rho, g, r_s, p_t, sigma2)?;
    let d = denominators(delta, rho, g, r_s)?;
    Ok((mu, allocation_from(mu, |k| d[k], rho, g, r_s, sigma2)))
}

// ---- ideal receiver ----

fn check_ideal(nu2: f64, g: &[f64]) -> Result<()> {
    if !(nu2 > g[0]) {
        return Err(SwiptError::Domain(format!("nu2 must exceed lambda1^2 (got {nu2:e})")));
    }
    Ok(())
}

/// Budget-versus-rate consistency of the ideal receiver at multiplier `nu2`.
///
/// Negative just above `λ₁²`, increasing, positive for large `nu2` when the
/// rate is reachable with `r_s` modes. With one mode it does not depend on
/// `nu2` and vanishes only at the beamforming rate.
pub fn residual_ideal(nu2: f64, singvals: &[f64], r_s: usize, p_t: f64, sigma2: f64, rate_req: f64) -> Result<f64> {
    check_active(singvals, r_s)?;
    let g = gains(singvals);
    check_ideal(nu2, &g)?;
    let (lhs, rhs) = ideal_sides(nu2 - g[0], &g, r_s, p_t, sigma2, rate_req);
    Ok(normalized(lhs, rhs))
}

/// [`residual_ideal`] parameterized by the gap `nu2 − λ₁²`, which keeps full
/// precision when the gap is far below the rounding unit of `λ₁²`.
pub fn residual_ideal_gap(beta: f64, singvals: &[f64], r_s: usize, p_t: f64, sigma2: f64, rate_req: f64) -> Result<f64> {
    check_active(singvals, r_s)?;
    if !(beta > 0.0) {
        return Err(SwiptError::Domain(format!("gap must be positive (got {beta:e})")));
    }
    let (lhs, rhs) = ideal_sides(beta, &gains(singvals), r_s, p_t, sigma2, rate_req);
    Ok(normalized(lhs, rhs))
}

pub(crate) fn ideal_sides(beta: f64, g: &[f64], r_s: usize, p_t: f64, sigma2: f64, rate_req: f64) -> (f64, f64) {
    let (ln_lhs, ln_rhs) = ideal_logs(beta, g, r_s, p_t, sigma2, rate_req);
    (ln_lhs.exp(), ln_rhs.exp())
}

pub(crate) fn ideal_logs(beta: f64, g: &[f64], r_s: usize, p_t: f64, sigma2: f64, rate_req: f64) -> (f64, f64) {
    let d: Vec<f64> = g[..r_s].iter().map(|gk| beta + (g[0] - gk)).collect();
    let inv_g: f64 = g[..r_s].iter().map(|gk| 1.0 / gk).sum();
    let inv_d: f64 = d.iter().map(|dk| 1.0 / dk).sum();
    let ln_lhs = (p_t / sigma2 + inv_g).ln() + ln_geo_gain(&g[..r_s], &d);
    let ln_rhs = rate_req * LN_2 / r_s as f64 + inv_d.ln();
    (ln_lhs, ln_rhs)
}

/// Rate multiplier and powers of the ideal receiver at `nu2`; fails if any
/// active power comes out negative.
pub fn ideal_mu2_and_powers(nu2: f64, singvals: &[f64], r_s: usize, p_t: f64, sigma2: f64) -> Result<(f64, PowerAllocation)> {
    let (mu, raw) = ideal_mu2_and_powers_raw(nu2, singvals, r_s, p_t, sigma2)?;
    if let Some(p) = raw.iter().find(|p| **p < 0.0) {
        return Err(SwiptError::Domain(format!("negative power {p:e}; shrink the active set")));
    }
    Ok((mu, PowerAllocation { powers: raw }))
}

pub fn ideal_mu2_and_powers_raw(nu2: f64, singvals: &[f64], r_s: usize, p_t: f64, sigma2: f64) -> Result<(f64, Vec<f64>)> {
    check_active(singvals, r_s)?;
    let g = gains(singvals);
    check_ideal(nu2, &g)?;
    Ok(ideal_powers_gap(nu2 - g[0], &g, r_s, p_t, sigma2))
}

pub(crate) fn ideal_powers_gap(beta: f64, g: &[f64], r_s: usize, p_t: f64, sigma2: f64) -> (f64, Vec<f64>) {
    let d: Vec<f64> = g[..r_s].iter().map(|gk| beta + (g[0] - gk)).collect();
    let noise: f64 = g[..r_s].iter().map(|gk| sigma2 / gk).sum();
    let inv: f64 = d.iter().map(|dk| 1.0 / (dk * LN_2)).sum();
    let mu = (p_t + noise) / inv;
    let powers = (0..g.len())
        .map(|k| if k < r_s { mu / (d[k] * LN_2) - sigma2 / g[k] } else { 0.0 })
        .collect();
    (mu, powers)
}

// ---- matrix form ----

/// Covariance maximizing `(μ/ln2)·ln det(I + σ⁻² G S G^H) − tr((νI − A) S)`.
///
/// With `Q = (ln2/μ)(νI − A)` the answer is `Q^{-1/2} Ṽ diag((1 − λ̃⁻²)⁺) Ṽ^H Q^{-1/2}`,
/// where `λ̃`, `Ṽ` are the singular values and right vectors of `σ⁻¹ G Q^{-1/2}`.
/// `G = H`, `A = H^H H` gives the ideal receiver; `G = diag(√(1−ρ_i)) H`,
/// `A = H^H diag(ρ_i) H` gives per-antenna splitting.
pub fn lagrangian_covariance(g: &CMatrix, a: &CMatrix, mu: f64, nu: f64, sigma2: f64) -> Result<CMatrix> {
    let n = a.nrows();
    if a.ncols() != n || g.ncols() != n {
        return Err(SwiptError::Dimension("A must be square with as many columns as G".into()));
    }
    if !(mu > 0.0) {
        return Err(SwiptError::Domain("mu must be positive".into()));
    }
    let shifted = CMatrix::identity(n, n) * num_complex::Complex64::new(nu, 0.0) - a;
    let (eig, _) = linalg::hermitian_eigen(&shifted);
    if eig.iter().any(|e| *e <= 0.0) {
        return Err(SwiptError::Domain("nu*I - A must be positive definite".into()));
    }
    let scale = LN_2 / mu;
    let q_inv_sqrt = linalg::hermitian_fn(&shifted, |x| (scale * x).powf(-0.5));
    let m = g * &q_inv_sqrt * num_complex::Complex64::new(sigma2.powf(-0.5), 0.0);
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let levels: Vec<f64> = svd
        .singular_values
        .iter()
        .map(|s| if *s > 0.0 { (1.0 - 1.0 / (s * s)).max(0.0) } else { 0.0 })
        .collect();
    let inner = v_t.adjoint() * linalg::real_diag(&levels) * &v_t;
    Ok(&q_inv_sqrt * inner * &q_inv_sqrt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{decompose, generate_channel, rate_from_gains};
    use crate::numeric;
    use proptest::prelude::*;

    const S2: f64 = 1e-10;

    fn seed7() -> Vec<f64> {
        decompose(&generate_channel(2, 2, 0.1, 7).unwrap()).unwrap().singvals
    }

    /// Solves both split-receiver equations by nested bisection, written
    /// independently of the solver: outer on ρ via the stationarity sign,
    /// inner on ν via the budget residual.
    fn solved_point(sv: &[f64], p_t: f64, rate: f64) -> (f64, f64) {
        let g = gains(sv);
        let nu_at = |rho: f64| {
            let f = |nu: f64| residual_budget_rate(nu, rho, sv, 2, p_t, S2, rate).unwrap();
            let lo = rho * g[0] * (1.0 + 1e-15) + 1e-300;
            let mut hi = rho * g[0] + 1.0;
            while f(hi) < 0.0 {
                if hi > 1e6 {
                    return None;
                }
                hi = rho * g[0] + 2.0 * (hi - rho * g[0]);
            }
            Some(numeric::bisect(f, lo, hi, 0.0, 300).unwrap().x)
        };
        // past the largest feasible split the harvested power can only fall
        let stat = |rho: f64| match nu_at(rho) {
            Some(nu) => residual_stationarity_rho(nu, rho, sv, 2, S2, rate).unwrap(),
            None => 1.0,
        };
        let rho = numeric::bisect(stat, 1e-3, 0.999_999, 0.0, 200).unwrap().x;
        (rho, nu_at(rho).unwrap())
    }

    #[test]
    fn zero_mu_allocates_nothing() {
        let p = power_allocation(0.0, 1.0, 0.5, &[0.2, 0.1], 2, S2).unwrap();
        assert_eq!(p.powers, vec![0.0, 0.0]);
    }

    #[test]
    fn equal_modes_get_equal_power() {
        let p = power_allocation(1e-9, 0.05, 0.4, &[0.2, 0.2, 0.2], 3, S2).unwrap();
        assert!(p.powers.iter().all(|x| (x - p.powers[0]).abs() <= 1e-15 * p.powers[0].abs()));
        let (_, q) = ideal_mu2_and_powers(0.05, &[0.2, 0.2], 2, 10.0, S2).unwrap();
        assert!((q.powers[0] - 5.0).abs() < 1e-12 && (q.powers[1] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn nonpositive_denominator_is_a_domain_error() {
        let e = power_allocation(1.0, 0.01, 0.5, &[0.2, 0.1], 2, S2).unwrap_err();
        assert!(matches!(e, SwiptError::Domain(_)));
    }

    #[test]
    fn single_mode_mu() {
        let (nu, rho, l1, p_t) = (0.03, 0.4, 0.2f64, 10.0);
        let g1 = l1 * l1;
        let want = LN_2 * (nu - rho * g1) * (p_t + S2 / ((1.0 - rho) * g1));
        let got = mu_from_nu_rho(nu, rho, &[l1], 1, p_t, S2).unwrap();
        assert!((got - want).abs() <= 1e-14 * want);
    }

    #[test]
    fn mu_closes_the_budget() {
        let sv = [0.25, 0.2, 0.12];
        let (nu, rho, p_t) = (0.04, 0.5, 10.0);
        let mu = mu_from_nu_rho(nu, rho, &sv, 3, p_t, S2).unwrap();
        let p = power_allocation_raw(mu, nu, rho, &sv, 3, S2).unwrap();
        assert!(p.iter().all(|x| *x > 0.0));
        assert!((p.iter().sum::<f64>() - p_t).abs() <= 1e-9 * p_t);
    }

    #[test]
    fn symmetric_modes_give_permutation_invariant_mu() {
        let a = mu_from_nu_rho(0.1, 0.3, &[0.2, 0.2], 2, 10.0, S2).unwrap();
        let b = mu_from_nu_rho(0.1, 0.3, &[0.2, 0.2], 2, 10.0, S2).unwrap();
        assert_eq!(a, b);
        let r = residual_stationarity_rho(0.1, 0.3, &[0.2, 0.2], 2, S2, 40.0).unwrap();
        assert!(r.is_finite());
    }

    #[test]
    fn budget_residual_is_negative_at_the_pole() {
        let sv = seed7();
        let rho = 0.7;
        let nu = rho * sv[0] * sv[0] + 1e-14;
        assert!(residual_budget_rate(nu, rho, &sv, 2, 10.0, S2, 40.0).unwrap() < 0.0);
    }

    #[test]
    fn seed7_solved_point_closes_everything() {
        let sv = seed7();
        let g = gains(&sv);
        let p_t = 10.0;
        let r_max = {
            let wf = crate::waterfill::waterfill_allocation(&sv, p_t, S2);
            rate_from_gains(&g, &wf.powers, 0.0, S2)
        };
        let rate = 0.8 * r_max;
        let (rho, nu) = solved_point(&sv, p_t, rate);
        assert!(residual_budget_rate(nu, rho, &sv, 2, p_t, S2, rate).unwrap().abs() <= 1e-8);
        assert!(residual_stationarity_rho(nu, rho, &sv, 2, S2, rate).unwrap().abs() <= 1e-8);
        let mu = mu_from_nu_rho(nu, rho, &sv, 2, p_t, S2).unwrap();
        let p = power_allocation(mu, nu, rho, &sv, 2, S2).unwrap();
        assert!((p.total() - p_t).abs() <= 1e-9 * p_t);
        assert!((rate_from_gains(&g, &p.powers, rho, S2) - rate).abs() <= 1e-6);
        assert!(p.powers[0] >= p.powers[1]);

        // the KKT point is the best split at this rate on a fine ρ scan
        let best_scan = (1..2000)
            .filter_map(|i| {
                let r = rho + (i as f64 - 1000.0) * 1e-6;
                let f = |nu: f64| residual_budget_rate(nu, r, &sv, 2, p_t, S2, rate).unwrap();
                let root = numeric::bisect(f, r * g[0] + 1e-15, r * g[0] + 1.0, 0.0, 300).ok()?;
                let mu = mu_from_nu_rho(root.x, r, &sv, 2, p_t, S2).ok()?;
                let p = power_allocation(mu, root.x, r, &sv, 2, S2).ok()?;
                Some(r * (p.powers[0] * g[0] + p.powers[1] * g[1]))
            })
            .fold(f64::MIN, f64::max);
        let at_kkt = rho * (p.powers[0] * g[0] + p.powers[1] * g[1]);
        assert!(at_kkt >= best_scan * (1.0 - 1e-9));
    }

    #[test]
    fn stationarity_sign_opposes_lagrangian_slope() {
        // 100 random (ν, ρ) points; ∂L/∂ρ by central differences of the
        // Lagrangian at fixed covariance and multipliers
        let mut rng_state = 12345u64;
        let mut next = || {
            rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (rng_state >> 11) as f64 / (1u64 << 53) as f64
        };
        let sv = seed7();
        let g = gains(&sv);
        let mut checked = 0;
        while checked < 100 {
            let rho = 0.05 + 0.9 * next();
            let rate = 30.0 + 40.0 * next();
            let nu = rho * g[0] + 10f64.powf(-4.0 + 3.0 * next());
            let Ok(p) = rate_implied_powers(nu, rho, &sv, 2, S2, rate) else { continue };
            if p.iter().any(|x| *x <= 0.0) {
                continue;
            }
            let mu = mu_from_rate(nu, rho, &sv, 2, S2, rate).unwrap();
            let lagr = |r: f64| {
                let rx: f64 = p.iter().zip(&g).map(|(pk, gk)| pk * gk).sum();
                r * rx + mu * (rate_from_gains(&g, &p, r, S2) - rate)
            };
            let h = 1e-7 * (1.0 - rho);
            let slope = (lagr(rho + h) - lagr(rho - h)) / (2.0 * h);
            let res = residual_stationarity_rho(nu, rho, &sv, 2, S2, rate).unwrap();
            if slope.abs() < 1e-6 * p.iter().zip(&g).map(|(pk, gk)| pk * gk).sum::<f64>() {
                continue;
            }
            assert_eq!(res.signum(), -slope.signum(), "rho={rho} nu={nu} R={rate}");
            checked += 1;
        }
    }

    #[test]
    fn single_mode_ideal_residual_is_flat() {
        let (l1, p_t) = (0.2f64, 10.0);
        let rate = (1.0 + p_t * l1 * l1 / S2).log2();
        for nu2 in [0.0401, 0.05, 0.5, 1.0] {
            assert!(residual_ideal(nu2, &[l1], 1, p_t, S2, rate).unwrap().abs() < 1e-10);
            assert!(residual_ideal(nu2, &[l1], 1, p_t, S2, rate + 0.5).unwrap() < 0.0);
        }
    }

    #[test]
    fn seed7_ideal_solution_and_matrix_form() {
        let h = generate_channel(2, 2, 0.1, 7).unwrap();
        let dec = decompose(&h).unwrap();
        let sv = dec.singvals.clone();
        let g = gains(&sv);
        let p_t = 10.0;
        let r_id = (1.0 + p_t * g[0] / S2).log2();
        let wf = crate::waterfill::waterfill_allocation(&sv, p_t, S2);
        let r_max = rate_from_gains(&g, &wf.powers, 0.0, S2);
        let rate = 0.5 * (r_id + r_max);
        let f = |nu2: f64| residual_ideal(nu2, &sv, 2, p_t, S2, rate).unwrap();
        let nu2 = numeric::bisect(f, g[0] * (1.0 + 1e-15), g[0] + 1.0, 0.0, 300).unwrap().x;
        assert!(f(nu2).abs() <= 1e-8);
        let (mu2, p) = ideal_mu2_and_powers(nu2, &sv, 2, p_t, S2).unwrap();
        assert!((p.total() - p_t).abs() <= 1e-9 * p_t);
        assert!((rate_from_gains(&g, &p.powers, 0.0, S2) - rate).abs() <= 1e-6);

        let hm = h.entries();
        let a = hm.adjoint() * hm;
        let s = lagrangian_covariance(hm, &a, mu2, nu2, S2).unwrap();
        let s_eig = dec.v.adjoint() * &s * &dec.v;
        for k in 0..2 {
            assert!((s_eig[(k, k)].re - p.powers[k]).abs() <= 1e-8 * p_t, "{} vs {}", s_eig[(k, k)].re, p.powers[k]);
        }
    }

    #[test]
    fn gap_form_matches_and_resolves_tiny_gaps() {
        let sv = decompose(&generate_channel(2, 2, 0.1, 7).unwrap()).unwrap().singvals;
        let g = gains(&sv);
        for beta in [1e-3, 1e-6] {
            let a = residual_ideal(g[0] + beta, &sv, 2, 10.0, S2, 40.0).unwrap();
            let b = residual_ideal_gap(beta, &sv, 2, 10.0, S2, 40.0).unwrap();
            assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
        }
        // below the rounding unit of λ₁² only the gap form still moves
        let tiny = 1e-3 * g[0] * f64::EPSILON;
        assert_eq!(g[0] + tiny, g[0]);
        assert!(residual_ideal_gap(tiny, &sv, 2, 10.0, S2, 40.0).is_ok());
        assert!(residual_ideal_gap(0.0, &sv, 2, 10.0, S2, 40.0).is_err());
    }

    proptest! {
        #[test]
        fn budget_residual_increases_in_nu(seed in 0u64..1000, rho in 0.0f64..0.99, frac in 0.1f64..0.9) {
            let sv = decompose(&generate_channel(3, 3, 0.1, seed).unwrap()).unwrap().singvals;
            let g = gains(&sv);
            let rate = 60.0 * frac;
            let mut prev = f64::NEG_INFINITY;
            for i in 0..60 {
                let delta = 10f64.powf(-12.0 + 0.2 * i as f64);
                let (l, r) = budget_rate_logs(delta, rho, &g, 3, 10.0, S2, rate).unwrap();
                prop_assert!(l - r >= prev - 1e-9);
                prev = l - r;
            }
        }

        #[test]
        fn ideal_residual_increases_in_nu(seed in 0u64..1000, frac in 0.1f64..0.9) {
            let sv = decompose(&generate_channel(3, 3, 0.1, seed).unwrap()).unwrap().singvals;
            let g = gains(&sv);
            let rate = 60.0 * frac;
            let mut prev = f64::NEG_INFINITY;
            for i in 0..60 {
                let beta = 10f64.powf(-12.0 + 0.2 * i as f64);
                let (l, r) = ideal_logs(beta, &g, 3, 10.0, S2, rate);
                prop_assert!(l - r >= prev - 1e-9);
                prev = l - r;
            }
        }

        #[test]
        fn budget_powers_are_ordered(seed in 0u64..1000, rho in 0.0f64..0.99, lg in -8.0f64..0.0) {
            let sv = decompose(&generate_channel(4, 4, 0.1, seed).unwrap()).unwrap().singvals;
            let g = gains(&sv);
            let (_, p) = budget_powers_gap(10f64.powf(lg), rho, &g, 4, 10.0, S2).unwrap();
            prop_assert!(p.windows(2).all(|w| w[0] >= w[1] - 1e-12));
            prop_assert!((p.iter().sum::<f64>() - 10.0).abs() <= 1e-9 * 10.0);
        }
    }
}
