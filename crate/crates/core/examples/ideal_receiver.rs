//! Practical power splitting against a receiver that harvests and decodes the same signal.

use swipt_core::channel::{decompose, generate_channel, SystemParams};
use swipt_core::{kkt, solver, waterfill};

pub fn run_example() -> anyhow::Result<()> {
    let dec = decompose(&generate_channel(2, 2, 0.1, 7)?)?;
    let base = SystemParams::new(10.0, 1e-10, 0.0, 1e-4)?;
    let r_max = waterfill::max_rate(&dec, &base);

    for frac in [0.3, 0.6, 0.9] {
        let p = base.with_rate(frac * r_max)?;
        let split = solver::solve_op1(&dec, &p)?;
        let ideal = solver::solve_op2(&dec, &p)?;
        println!(
            "R = {:>6.2}: split receiver {:.5e} W at ρ* = {:.4}, ideal receiver {:.5e} W ({:+.2}%)",
            p.rate_req,
            split.p_re,
            split.rho,
            ideal.p_re,
            100.0 * (ideal.p_re / split.p_re - 1.0)
        );
        if ideal.nu_gap.is_finite() && ideal.r_s > 1 {
            let r = kkt::residual_ideal_gap(ideal.nu_gap, &dec.singvals, ideal.r_s, p.p_t, p.sigma2, p.rate_req)?;
            println!("           ideal multiplier gap {:.4e}, residual {r:.1e}", ideal.nu_gap);
        }
        anyhow::ensure!(ideal.p_re >= split.p_re * (1.0 - 1e-9));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
