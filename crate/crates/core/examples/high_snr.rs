//! Closed-form high-SNR designs and how their accuracy depends on the noise level.

use std::time::Instant;

use swipt_core::channel::{decompose, generate_channel, SystemParams};
use swipt_core::{highsnr, solver, waterfill};

pub fn run_example() -> anyhow::Result<()> {
    let dec = decompose(&generate_channel(4, 4, 0.05, 5)?)?;
    for sigma2_dbm in [-70.0, -85.0, -100.0] {
        let base = SystemParams::new(10.0, 10f64.powf((sigma2_dbm - 30.0) / 10.0), 0.0, 1e-4)?;
        let p = base.with_rate(0.7 * waterfill::max_rate(&dec, &base))?;

        let t = Instant::now();
        let exact = solver::solve_op1(&dec, &p)?;
        let t_exact = t.elapsed();
        let t = Instant::now();
        let approx = highsnr::solve_op1_highsnr(&dec, &p)?;
        let t_approx = t.elapsed();
        let ideal_gap = {
            let e = solver::solve_op2(&dec, &p)?.p_re;
            (highsnr::solve_op2_highsnr(&dec, &p)?.p_re - e).abs() / e
        };

        println!(
            "σ² = {sigma2_dbm} dBm: split gap {:.2e} ({:?} vs {:?}), ideal gap {ideal_gap:.2e}",
            (approx.p_re - exact.p_re).abs() / exact.p_re,
            t_approx,
            t_exact
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
