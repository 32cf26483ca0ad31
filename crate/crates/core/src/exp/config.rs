use std::path::Path;

use serde::Deserialize;

use crate::error::{Result, SwiptError};
use crate::harvest::{EhCircuitModel, PowerTable};

/// Schemes a sweep can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Op1,
    Op2,
    Op1Hisnr,
    Op2Hisnr,
    Ops,
    Otcm,
    Dps,
    Oracle,
}

impl Scheme {
    pub const ALL: [Scheme; 8] = [
        Scheme::Op1,
        Scheme::Op2,
        Scheme::Op1Hisnr,
        Scheme::Op2Hisnr,
        Scheme::Ops,
        Scheme::Otcm,
        Scheme::Dps,
        Scheme::Oracle,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Op1 => "op1",
            Scheme::Op2 => "op2",
            Scheme::Op1Hisnr => "op1_hisnr",
            Scheme::Op2Hisnr => "op2_hisnr",
            Scheme::Ops => "ops",
            Scheme::Otcm => "otcm",
            Scheme::Dps => "dps",
            Scheme::Oracle => "oracle",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| SwiptError::InvalidInput(format!("unknown scheme {s:?}")))
    }
}

/// How summaries treat draws where a scheme cannot meet the rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InfeasiblePolicy {
    /// Leave them out of the averages.
    #[default]
    Exclude,
    /// Count them as zero received power.
    Zero,
}

/// Sweep description, read from a flat JSON object. Unknown keys are
/// rejected.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Transmit and receive antennas.
    pub n: usize,
    /// Standard deviation scale of the fading entries.
    pub theta: f64,
    pub sigma2_dbm: f64,
    pub p_t_watts: f64,
    /// Rate requirements in bps/Hz, or fractions of each draw's maximum rate
    /// when `rate_normalized` is set.
    pub rate_grid: Vec<f64>,
    #[serde(default)]
    pub rate_normalized: bool,
    pub n_channels: usize,
    pub seed: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    pub schemes: Vec<Scheme>,
    /// `linear:<η>`, `logistic:<M>,<a>,<b>`, `logistic:powercast`,
    /// `table:powercast` or `table:<csv path>`.
    #[serde(default = "default_eh_model")]
    pub eh_model: String,
    #[serde(default)]
    pub infeasible_policy: InfeasiblePolicy,
    #[serde(default = "default_dps_grid")]
    pub dps_grid_points: usize,
    #[serde(default = "default_oracle_grid")]
    pub oracle_grid_points: usize,
    #[serde(skip)]
    sigma2_w: f64,
}

fn default_tol() -> f64 {
    1e-4
}

fn default_eh_model() -> String {
    "table:powercast".into()
}

fn default_dps_grid() -> usize {
    crate::bench::DEFAULT_GRID_POINTS
}

fn default_oracle_grid() -> usize {
    400
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let mut cfg: Self =
            serde_json::from_str(text).map_err(|e| SwiptError::InvalidInput(format!("config: {e}")))?;
        cfg.validate()?;
        cfg.sigma2_w = dbm_to_watts(cfg.sigma2_dbm);
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| SwiptError::InvalidInput(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            SwiptError::InvalidInput(m) => SwiptError::InvalidInput(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Noise power in watts.
    pub fn sigma2(&self) -> f64 {
        self.sigma2_w
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SwiptError::InvalidInput(m));
        if !(1..=8).contains(&self.n) {
            return bad(format!("n must lie in 1..=8, got {}", self.n));
        }
        if self.n_channels == 0 {
            return bad("n_channels must be at least 1".into());
        }
        if self.rate_grid.is_empty() {
            return bad("rate_grid must not be empty".into());
        }
        if self.rate_grid.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return bad("rate_grid entries must be finite and non-negative".into());
        }
        if self.rate_normalized && self.rate_grid.iter().any(|r| *r > 1.0) {
            return bad("normalized rate_grid entries must not exceed 1".into());
        }
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return bad(format!("theta must be positive, got {}", self.theta));
        }
        if !(self.p_t_watts > 0.0 && self.p_t_watts.is_finite()) {
            return bad(format!("p_t_watts must be positive, got {}", self.p_t_watts));
        }
        if !self.sigma2_dbm.is_finite() {
            return bad("sigma2_dbm must be finite".into());
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return bad(format!("tol must lie in (0, 1), got {}", self.tol));
        }
        if self.schemes.is_empty() {
            return bad("schemes must not be empty".into());
        }
        if self.schemes.contains(&Scheme::Dps) && self.n > crate::bench::DPS_MAX_ANTENNAS {
            return bad(format!("dps supports n ≤ {}", crate::bench::DPS_MAX_ANTENNAS));
        }
        if self.schemes.contains(&Scheme::Dps) && self.dps_grid_points < 11 {
            return bad("dps_grid_points must be at least 11".into());
        }
        if self.schemes.contains(&Scheme::Oracle) && self.n != 2 {
            return bad("oracle needs n = 2".into());
        }
        if self.oracle_grid_points == 0 {
            return bad("oracle_grid_points must be positive".into());
        }
        parse_eh_model(&self.eh_model)?;
        Ok(())
    }

    pub fn eh_circuit(&self) -> Result<EhCircuitModel> {
        parse_eh_model(&self.eh_model)
    }
}

/// Parses the `eh_model` mini-language.
pub fn parse_eh_model(spec: &str) -> Result<EhCircuitModel> {
    let bad = || SwiptError::InvalidInput(format!("unrecognized eh_model {spec:?}"));
    let (kind, arg) = spec.split_once(':').ok_or_else(bad)?;
    let numbers = |s: &str| -> Result<Vec<f64>> {
        s.split(',').map(|x| x.trim().parse::<f64>().map_err(|_| bad())).collect()
    };
    match (kind, arg) {
        ("linear", a) => EhCircuitModel::linear(*numbers(a)?.first().ok_or_else(bad)?),
        ("logistic", "powercast") => Ok(EhCircuitModel::powercast_logistic()),
        ("logistic", a) => match numbers(a)?.as_slice() {
            [m, s, c] => EhCircuitModel::logistic(*m, *s, *c),
            _ => Err(bad()),
        },
        ("table", "powercast") => Ok(EhCircuitModel::PiecewiseTable(PowerTable::powercast_p1110_approx())),
        ("table", path) => Ok(EhCircuitModel::PiecewiseTable(PowerTable::load_csv(path)?)),
        _ => Err(bad()),
    }
}
