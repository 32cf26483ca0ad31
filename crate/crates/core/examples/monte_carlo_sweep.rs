//! A seeded Monte-Carlo sweep from a JSON config to record and summary CSVs.

use swipt_core::exp::{self, ExperimentConfig};

const CONFIG: &str = r#"{
    "n": 2,
    "theta": 0.05,
    "sigma2_dbm": -70,
    "p_t_watts": 10,
    "rate_grid": [0.2, 0.4, 0.6, 0.8],
    "rate_normalized": true,
    "n_channels": 40,
    "seed": 2024,
    "schemes": ["op1", "op2", "ops", "otcm"],
    "eh_model": "logistic:powercast"
}"#;

pub fn run_example() -> anyhow::Result<()> {
    let cfg = ExperimentConfig::from_json(CONFIG)?;
    let records = exp::run_sweep(&cfg)?;
    let summary = exp::summarize(&records, cfg.infeasible_policy);

    let dir = tempfile::tempdir()?;
    exp::emit_csv(&records, dir.path().join("records.csv"))?;
    exp::emit_summary_csv(&summary, dir.path().join("summary.csv"))?;
    anyhow::ensure!(exp::parse_csv(dir.path().join("records.csv"))?.len() == records.len());

    println!("{} records on {} worker threads", records.len(), exp::worker_count());
    for row in summary.iter().filter(|r| r.scheme == "op1") {
        println!(
            "R ≈ {:>6.2}: P_RE {:.3} mW, P_H {:.3} mW, ρ {:.4}, +{:.1}% over OPS, +{:.1}% over OTCM",
            row.rate_req_mean,
            1e3 * row.p_re_mean,
            1e3 * row.p_h_mean,
            row.rho_mean,
            row.gain_over_ops_pct,
            row.gain_over_otcm_pct
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
