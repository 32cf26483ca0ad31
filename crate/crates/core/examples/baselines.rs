//! The joint design against fixed-split, fixed-covariance, per-antenna and grid-search baselines.

use swipt_core::channel::{decompose, generate_channel, SystemParams};
use swipt_core::{bench, solver, waterfill};

pub fn run_example() -> anyhow::Result<()> {
    let h = generate_channel(2, 2, 0.05, 7)?;
    let dec = decompose(&h)?;
    let base = SystemParams::new(10.0, 1e-10, 0.0, 1e-4)?;
    let r_max = waterfill::max_rate(&dec, &base);

    println!("{:>6} {:>11} {:>11} {:>11} {:>11} {:>11}", "R/Rmax", "joint", "OPS", "OTCM", "per-antenna", "grid");
    for frac in [0.2, 0.5, 0.8] {
        let p = base.with_rate(frac * r_max)?;
        let joint = solver::solve_op1(&dec, &p)?;
        let ops = bench::baseline_ops(&dec, &p)?;
        let otcm = bench::baseline_otcm(&dec, &p)?;
        let dps = bench::baseline_dps_grid(&h, &p, bench::DEFAULT_GRID_POINTS)?;
        let grid = bench::oracle_grid_2x2(&h, &p, 400)?;
        println!(
            "{frac:>6} {:>11.5e} {:>11.5e} {:>11.5e} {:>11.5e} {:>11.5e}",
            joint.p_re, ops.p_re, otcm.p_re, dps.p_re, grid.solution.p_re
        );
        println!(
            "       per-antenna split {:.2?} after {} of {} tuples",
            dps.split,
            dps.evaluated,
            dps.evaluated + dps.pruned
        );
        anyhow::ensure!(joint.p_re >= ops.p_re.max(otcm.p_re) * (1.0 - 1e-9));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
