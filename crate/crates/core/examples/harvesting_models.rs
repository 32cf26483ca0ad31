//! Received RF power to harvested DC power under linear, logistic and tabulated rectifiers.

use swipt_core::channel::{decompose, generate_channel, SystemParams};
use swipt_core::harvest::{self, EhCircuitModel, PowerTable};
use swipt_core::{solver, waterfill};

pub fn run_example() -> anyhow::Result<()> {
    let models = [
        EhCircuitModel::linear(0.5)?,
        EhCircuitModel::powercast_logistic(),
        EhCircuitModel::PiecewiseTable(PowerTable::powercast_p1110_approx()),
    ];

    println!("{:>10} {:>12} {:>12} {:>12}", "P_RF [dBm]", models[0].name(), models[1].name(), models[2].name());
    for dbm in [-10.0, 0.0, 10.0, 15.0, 20.0, 25.0] {
        let p_rf = 10f64.powf((dbm - 30.0) / 10.0);
        let p_h: Vec<String> = models
            .iter()
            .map(|m| harvest::harvested_power(p_rf, m).map(|w| format!("{:.4e}", w)))
            .collect::<Result<_, _>>()?;
        println!("{dbm:>10} {:>12} {:>12} {:>12}", p_h[0], p_h[1], p_h[2]);
    }

    // the harvester is monotone, so the received-power optimum is also the harvested-power optimum
    let dec = decompose(&generate_channel(2, 2, 0.1, 7)?)?;
    let base = SystemParams::new(1.0, 1e-10, 0.0, 1e-4)?;
    let r_max = waterfill::max_rate(&dec, &base);
    for frac in [0.2, 0.5, 0.8, 0.95] {
        let sol = solver::solve_op1(&dec, &base.with_rate(frac * r_max)?)?;
        let p_h: Vec<String> = models
            .iter()
            .map(|m| harvest::harvested_power(sol.p_re, m).map(|w| format!("{:.3} mW", 1e3 * w)))
            .collect::<Result<_, _>>()?;
        println!("R = {:.2}·R_max: P_RE {:.3} mW → {}", frac, 1e3 * sol.p_re, p_h.join(", "));
    }
    anyhow::ensure!(models.iter().all(|m| harvest::is_nondecreasing(m, 1.0, 1000)));
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
