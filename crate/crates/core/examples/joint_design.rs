//! Rate–energy tradeoff of the jointly optimal precoder and power split.

use swipt_core::channel::{decompose, generate_channel, SystemParams};
use swipt_core::{solver, waterfill};

pub fn run_example() -> anyhow::Result<()> {
    let dec = decompose(&generate_channel(4, 4, 0.05, 11)?)?;
    let base = SystemParams::new(10.0, 1e-10, 0.0, 1e-4)?;
    let r_max = waterfill::max_rate(&dec, &base);

    println!("{:>8} {:>12} {:>9} {:>4} {:>7} {:>6}", "R", "P_RE [mW]", "ρ*", "r_s", "probes", "polish");
    let mut last = f64::INFINITY;
    for i in 0..=10 {
        let rate = r_max * i as f64 / 10.0;
        let sol = solver::solve_op1(&dec, &base.with_rate(rate)?)?;
        println!(
            "{rate:>8.2} {:>12.5} {:>9.5} {:>4} {:>7} {:>6}",
            1e3 * sol.p_re,
            sol.rho,
            sol.r_s,
            sol.stats.probes,
            sol.stats.polished
        );
        anyhow::ensure!(sol.p_re <= last * (1.0 + 1e-9), "tradeoff must be nonincreasing");
        last = sol.p_re;
    }

    let beyond = solver::solve_op1(&dec, &base.with_rate(1.01 * r_max)?)?;
    println!("above capacity: {}", beyond.mode.as_str());
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
