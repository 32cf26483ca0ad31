//! Seeded Rayleigh channel, its eigenmodes and the rate/power limits they set.

use swipt_core::channel::{decompose, generate_channel, SystemParams};
use swipt_core::{regimes, waterfill};

pub fn run_example() -> anyhow::Result<()> {
    let h = generate_channel(4, 4, 0.05, 7)?;
    let dec = decompose(&h)?;
    let params = SystemParams::new(10.0, 1e-10, 0.0, 1e-4)?;

    println!("singular values: {:?}", dec.singvals);
    println!("eigenchannel gains: {:?}", dec.gains());
    println!("beamforming power:  {:.4e} W", params.p_t * dec.lambda1_sq());
    println!("maximum rate:       {:.2} bps/Hz", waterfill::max_rate(&dec, &params));
    println!("switching rate:     {:.2} bps/Hz", regimes::rate_threshold_for(&dec, params.p_t, params.sigma2));

    // the decomposition reproduces the channel
    let err = (dec.reconstruct() - h.entries()).norm() / h.entries().norm();
    anyhow::ensure!(err < 1e-12, "reconstruction error {err:e}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
