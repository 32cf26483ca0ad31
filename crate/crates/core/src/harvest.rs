//! RF-to-DC harvesting models. Any nondecreasing map from received RF power
//! to DC power preserves the ranking of designs by received power, so the
//! optimizer works on RF power and the models are applied afterwards.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Result, SwiptError};
use crate::numeric;

/// Rough digitization of a Powercast P1110 evaluation-board curve
/// (915 MHz, −20…+20 dBm). Approximate, for examples and tests only.
pub const POWERCAST_P1110_APPROX_CSV: &str = include_str!("../data/powercast_p1110_approx.csv");

/// Sorted `(P_RF, P_DC)` samples in watts, with `(0, 0)` implied.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerTable {
    p_rf: Vec<f64>,
    p_dc: Vec<f64>,
}

#[derive(Debug, Deserialize)]
struct TableRow {
    p_rf_w: f64,
    p_dc_w: f64,
}

impl PowerTable {
    pub fn new(p_rf: Vec<f64>, p_dc: Vec<f64>) -> Result<Self> {
        if p_rf.is_empty() || p_rf.len() != p_dc.len() {
            return Err(SwiptError::InvalidInput(format!(
                "table needs matching non-empty columns, got {} and {}",
                p_rf.len(),
                p_dc.len()
            )));
        }
        if !(p_rf[0] > 0.0) || p_rf.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(SwiptError::InvalidInput("p_rf_w must be positive and strictly increasing".into()));
        }
        if !(p_dc[0] >= 0.0) || p_dc.windows(2).any(|w| !(w[1] >= w[0])) {
            return Err(SwiptError::InvalidInput("p_dc_w must be non-negative and nondecreasing".into()));
        }
        Ok(Self { p_rf, p_dc })
    }

    pub fn from_csv_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| SwiptError::InvalidInput(e.to_string()))?;
        if headers != vec!["p_rf_w", "p_dc_w"] {
            return Err(SwiptError::InvalidInput(format!("expected header p_rf_w,p_dc_w, got {headers:?}")));
        }
        let mut p_rf = Vec::new();
        let mut p_dc = Vec::new();
        for row in rdr.deserialize::<TableRow>() {
            let row = row.map_err(|e| SwiptError::InvalidInput(e.to_string()))?;
            p_rf.push(row.p_rf_w);
            p_dc.push(row.p_dc_w);
        }
        Self::new(p_rf, p_dc)
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)
            .map_err(|e| SwiptError::InvalidInput(format!("{}: {e}", path.display())))?;
        Self::from_csv_reader(file).map_err(|e| match e {
            SwiptError::InvalidInput(m) => SwiptError::InvalidInput(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// The bundled approximate Powercast P1110 table.
    pub fn powercast_p1110_approx() -> Self {
        Self::from_csv_reader(POWERCAST_P1110_APPROX_CSV.as_bytes()).expect("bundled table is valid")
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.p_rf.iter().copied().zip(self.p_dc.iter().copied())
    }

    /// Linear interpolation, flat beyond the last sample.
    pub fn interpolate(&self, p_rf: f64) -> f64 {
        let i = self.p_rf.partition_point(|x| *x < p_rf);
        if i == self.p_rf.len() {
            return self.p_dc[i - 1];
        }
        let (x0, y0) = if i == 0 { (0.0, 0.0) } else { (self.p_rf[i - 1], self.p_dc[i - 1]) };
        let (x1, y1) = (self.p_rf[i], self.p_dc[i]);
        y0 + (y1 - y0) * (p_rf - x0) / (x1 - x0)
    }
}

/// Map from received RF power to harvested DC power.
#[derive(Debug, Clone, PartialEq)]
pub enum EhCircuitModel {
    /// Constant efficiency.
    Linear { efficiency: f64 },
    /// `M·(s(x) − s(0))/(1 − s(0))`, `s(x) = 1/(1 + e^{−a(x−b)})`.
    LogisticSaturation { max_dc: f64, steepness: f64, center: f64 },
    PiecewiseTable(PowerTable),
}

impl EhCircuitModel {
    pub fn linear(efficiency: f64) -> Result<Self> {
        if !(efficiency > 0.0 && efficiency <= 1.0) {
            return Err(SwiptError::InvalidInput(format!("efficiency must lie in (0, 1], got {efficiency}")));
        }
        Ok(Self::Linear { efficiency })
    }

    pub fn logistic(max_dc: f64, steepness: f64, center: f64) -> Result<Self> {
        if !(max_dc > 0.0 && steepness > 0.0 && center.is_finite()) {
            return Err(SwiptError::InvalidInput(format!(
                "logistic needs M > 0, a > 0 and finite b, got ({max_dc}, {steepness}, {center})"
            )));
        }
        Ok(Self::LogisticSaturation { max_dc, steepness, center })
    }

    /// Logistic with saturation `max_dc` passing through two `(P_RF, P_DC)`
    /// anchors.
    ///
    /// Writing `u = e^{ab}` the model is `M(1 − e^{−ax})/(1 + u e^{−ax})`, so
    /// for each steepness the first anchor fixes `u` and the second leaves a
    /// scalar equation in `a`.
    pub fn fit_logistic(lo: (f64, f64), hi: (f64, f64), max_dc: f64) -> Result<Self> {
        let ((x1, y1), (x2, y2)) = (lo, hi);
        if !(0.0 < x1 && x1 < x2 && 0.0 < y1 && y1 < y2 && y2 < max_dc) {
            return Err(SwiptError::InvalidInput("anchors must be increasing and below the saturation level".into()));
        }
        let u_of = |a: f64| {
            let e1 = (-a * x1).exp();
            (max_dc * (1.0 - e1) / y1 - 1.0) / e1
        };
        let residual = |a: f64| {
            let e2 = (-a * x2).exp();
            max_dc * (1.0 - e2) / (1.0 + u_of(a) * e2) - y2
        };
        // `u > 0` needs the first anchor under the pure-exponential curve.
        let a_min = -(1.0 - y1 / max_dc).ln() / x1;
        let grid: Vec<f64> = (0..=400).map(|i| a_min * (1.0 + 1e-9) * 10f64.powf(i as f64 * 0.02)).collect();
        let pair = grid
            .windows(2)
            .find(|w| residual(w[0]).signum() != residual(w[1]).signum())
            .ok_or_else(|| SwiptError::InvalidInput("no logistic passes through both anchors".into()))?;
        let a = numeric::bisect_geometric(residual, pair[0], pair[1], 1e-14, 200)?.x;
        Self::logistic(max_dc, a, u_of(a).ln() / a)
    }

    /// Logistic fitted to the bundled table at +10 and +20 dBm with a 60 mW
    /// ceiling.
    pub fn powercast_logistic() -> Self {
        let t = PowerTable::powercast_p1110_approx();
        let at = |p: f64| (p, t.interpolate(p));
        Self::fit_logistic(at(1e-2), at(1e-1), 0.06).expect("bundled anchors fit")
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Linear { .. } => "linear",
            Self::LogisticSaturation { .. } => "logistic",
            Self::PiecewiseTable(_) => "table",
        }
    }
}

pub fn harvested_power(p_re: f64, model: &EhCircuitModel) -> Result<f64> {
    if !(p_re >= 0.0) {
        return Err(SwiptError::Domain(format!("received power must be non-negative, got {p_re}")));
    }
    Ok(match model {
        EhCircuitModel::Linear { efficiency } => efficiency * p_re,
        EhCircuitModel::LogisticSaturation { max_dc, steepness, center } => {
            let e = (-steepness * p_re).exp();
            let u = (steepness * center).exp();
            max_dc * (1.0 - e) / (1.0 + u * e)
        }
        EhCircuitModel::PiecewiseTable(t) => t.interpolate(p_re),
    })
}

pub fn implied_efficiency(p_re: f64, model: &EhCircuitModel) -> Result<f64> {
    if p_re == 0.0 {
        return Err(SwiptError::Domain("efficiency is undefined at zero received power".into()));
    }
    Ok(harvested_power(p_re, model)? / p_re)
}

/// Checks `F(0) = 0` and monotonicity on `points` samples of `[0, p_max]`.
pub fn is_nondecreasing(model: &EhCircuitModel, p_max: f64, points: usize) -> bool {
    let values: Vec<f64> = (0..points)
        .map(|i| harvested_power(p_max * i as f64 / (points - 1) as f64, model).unwrap_or(f64::NAN))
        .collect();
    values[0] == 0.0 && values.windows(2).all(|w| w[1] >= w[0])
}

/// Index of the largest score; the first one wins ties.
pub fn top_ranked(scores: &[f64]) -> Option<usize> {
    scores
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, f64)>, (i, &s)| match best {
            Some((_, b)) if b >= s => best,
            _ => Some((i, s)),
        })
        .map(|(i, _)| i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn models() -> Vec<EhCircuitModel> {
        vec![
            EhCircuitModel::linear(0.5).unwrap(),
            EhCircuitModel::powercast_logistic(),
            EhCircuitModel::PiecewiseTable(PowerTable::powercast_p1110_approx()),
        ]
    }

    fn dbm(x: f64) -> f64 {
        10f64.powf((x - 30.0) / 10.0)
    }

    #[test]
    fn zero_in_zero_out() {
        for m in models() {
            assert_eq!(harvested_power(0.0, &m).unwrap(), 0.0);
            assert!(is_nondecreasing(&m, 1.0, 1000), "{}", m.name());
            assert!(is_nondecreasing(&m, 1e-3, 1000), "{}", m.name());
        }
    }

    #[test]
    fn linear_examples() {
        let m = EhCircuitModel::linear(0.5).unwrap();
        assert_eq!(harvested_power(2e-3, &m).unwrap(), 1e-3);
        assert_eq!(implied_efficiency(0.3, &m).unwrap(), 0.5);
        assert!(EhCircuitModel::linear(1.5).is_err());
    }

    #[test]
    fn logistic_fit_hits_anchors_and_tracks_midpoint() {
        let t = PowerTable::powercast_p1110_approx();
        let m = EhCircuitModel::powercast_logistic();
        for p in [1e-2, 1e-1] {
            let h = harvested_power(p, &m).unwrap();
            assert!((h / t.interpolate(p) - 1.0).abs() < 1e-9);
        }
        let mid = dbm(15.0);
        let digitized = t.samples().find(|(x, _)| (x / mid - 1.0).abs() < 1e-6).unwrap().1;
        let h = harvested_power(mid, &m).unwrap();
        assert!((h / digitized - 1.0).abs() < 0.10, "{h} vs {digitized}");
    }

    #[test]
    fn logistic_saturates_with_falling_efficiency() {
        let m = EhCircuitModel::powercast_logistic();
        let e1 = implied_efficiency(0.5, &m).unwrap();
        let e2 = implied_efficiency(1.0, &m).unwrap();
        assert!(e2 < e1);
        assert!((harvested_power(100.0, &m).unwrap() - 0.06).abs() < 1e-12);
    }

    #[test]
    fn table_interpolates_and_clamps() {
        let t = PowerTable::new(vec![1.0, 2.0], vec![0.5, 0.7]).unwrap();
        assert_eq!(t.interpolate(0.5), 0.25);
        assert!((t.interpolate(1.5) - 0.6).abs() < 1e-15);
        assert_eq!(t.interpolate(5.0), 0.7);
        assert!(PowerTable::new(vec![1.0, 1.0], vec![0.5, 0.7]).is_err());
        assert!(PowerTable::new(vec![1.0, 2.0], vec![0.5, 0.4]).is_err());
    }

    #[test]
    fn table_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        std::fs::write(&path, "p_rf_w,p_dc_w\n1e-3,2e-4\n2e-3,5e-4\n").unwrap();
        let t = PowerTable::load_csv(&path).unwrap();
        assert_eq!(t.samples().collect::<Vec<_>>(), vec![(1e-3, 2e-4), (2e-3, 5e-4)]);
        std::fs::write(&path, "rf,dc\n1e-3,2e-4\n").unwrap();
        assert!(PowerTable::load_csv(&path).is_err());
    }

    #[test]
    fn efficiency_errors_and_bounds() {
        for m in models() {
            assert!(matches!(implied_efficiency(0.0, &m), Err(SwiptError::Domain(_))));
            assert!(harvested_power(-1.0, &m).is_err());
            for i in 0..=60 {
                let p = 1e-6 * 10f64.powf(i as f64 * 0.1);
                assert!(implied_efficiency(p, &m).unwrap() <= 1.0);
            }
        }
    }

    #[test]
    fn ranking_ties_go_to_the_first() {
        assert_eq!(top_ranked(&[1.0, 3.0, 3.0, 2.0]), Some(1));
        assert_eq!(top_ranked(&[]), None);
    }

    proptest! {
        #[test]
        fn monotone_models_keep_the_top_candidate(
            scores in prop::collection::vec(2e-5f64..5e-2, 1..100),
        ) {
            let top = top_ranked(&scores);
            for m in models() {
                let h: Vec<f64> = scores.iter().map(|p| harvested_power(*p, &m).unwrap()).collect();
                prop_assert_eq!(top_ranked(&h), top, "{}", m.name());
            }
        }
    }
}
