//! Capacity-achieving power allocation and how many modes it fills.

use swipt_core::channel::{achievable_rate, decompose, generate_channel, SystemParams};
use swipt_core::waterfill;

pub fn run_example() -> anyhow::Result<()> {
    let dec = decompose(&generate_channel(4, 4, 0.05, 3)?)?;
    for sigma2_dbm in [-10.0, -20.0, -30.0, -40.0] {
        let sigma2 = 10f64.powf((sigma2_dbm - 30.0) / 10.0);
        let params = SystemParams::new(1.0, sigma2, 0.0, 1e-4)?;
        let alloc = waterfill::waterfill_allocation(&dec.singvals, params.p_t, sigma2);
        let rate = achievable_rate(&dec, &alloc, 0.0, sigma2)?;
        println!(
            "σ² = {sigma2_dbm:>5} dBm: {} active modes, powers {:.3?}, rate {rate:.2} bps/Hz",
            waterfill::waterfill_rank(&dec.singvals, params.p_t, sigma2),
            alloc.powers
        );
        anyhow::ensure!((rate - waterfill::max_rate(&dec, &params)).abs() < 1e-9);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
