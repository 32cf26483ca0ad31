//! Where the optimal transmit mode switches from beamforming to multiplexing.

use swipt_core::channel::{decompose, generate_channel, SystemParams};
use swipt_core::{regimes, solver, waterfill};

pub fn run_example() -> anyhow::Result<()> {
    let dec = decompose(&generate_channel(2, 2, 0.1, 7)?)?;
    let base = SystemParams::new(10.0, 1e-13, 0.0, 1e-4)?;
    let r_th = regimes::rate_threshold_for(&dec, base.p_t, base.sigma2);
    let r_id = regimes::rate_threshold_ideal(dec.singvals[0], base.p_t, base.sigma2);
    let r_max = waterfill::max_rate(&dec, &base);
    println!("switching rate {r_th:.3}, ideal-receiver switching rate {r_id:.3}, maximum {r_max:.3} bps/Hz");

    for frac in [0.5, 0.9, 1.0, 1.1, 1.5, 2.0] {
        let rate = frac * r_th;
        let sol = solver::solve_op1(&dec, &base.with_rate(rate)?)?;
        let rho_eb = regimes::rho_eb(rate, base.p_t, dec.singvals[0], base.sigma2);
        println!(
            "R = {rate:>7.3}: {:<20} ρ* = {:.5} (beamforming would need ρ ≤ {rho_eb:.5}), P_RE = {:.5e} W",
            sol.mode.as_str(),
            sol.rho,
            sol.p_re
        );
    }

    let kkt = regimes::eb_kkt_point(0.8 * r_th, base.p_t, dec.singvals[0], base.sigma2);
    let (stationarity, slackness) = regimes::eb_kkt_residuals(&kkt, dec.singvals[0], base.sigma2);
    println!("beamforming KKT point at 0.8·R_th: {kkt:?}, residuals {stationarity:.1e} / {slackness:.1e}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
