//! Certifying a solution through its multipliers and the reduced KKT equations.

use swipt_core::channel::{decompose, generate_channel, SystemParams};
use swipt_core::{kkt, linalg, solver, waterfill};

pub fn run_example() -> anyhow::Result<()> {
    let h = generate_channel(2, 2, 0.1, 7)?;
    let dec = decompose(&h)?;
    let base = SystemParams::new(10.0, 1e-13, 0.0, 1e-4)?;
    let p = base.with_rate(0.7 * waterfill::max_rate(&dec, &base))?;
    let sol = solver::solve_op1(&dec, &p)?;
    let sv = &dec.singvals;

    let budget_rate = kkt::residual_budget_rate(sol.nu, sol.rho, sv, sol.r_s, p.p_t, p.sigma2, p.rate_req)?;
    let stationarity = kkt::residual_stationarity_rho(sol.nu, sol.rho, sv, sol.r_s, p.sigma2, p.rate_req)?;
    println!("ρ* = {:.6}, μ* = {:.6e}, ν* = {:.6e}", sol.rho, sol.mu, sol.nu);
    println!("budget/rate residual {budget_rate:.2e}, split stationarity residual {stationarity:.2e}");

    // the multipliers rebuild the covariance through the Lagrangian optimality condition
    let hm = h.entries();
    let g = hm.map(|z| z * (1.0 - sol.rho).sqrt());
    let a = (hm.adjoint() * hm).map(|z| z * sol.rho);
    let s = kkt::lagrangian_covariance(&g, &a, sol.mu, sol.nu, p.sigma2)?;
    let modes = dec.covariance(&sol.powers)?;
    let err = (&s - &modes).norm() / modes.norm();
    println!("trace {:.9} W, covariance mismatch {err:.1e}", linalg::trace_re(&s));
    anyhow::ensure!(budget_rate.abs() < 1e-6 && stationarity.abs() < 1e-6 && err < 1e-6);
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
