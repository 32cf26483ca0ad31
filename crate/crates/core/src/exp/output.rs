use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use super::config::InfeasiblePolicy;
use super::sweep::TradeoffRecord;
use crate::error::{Result, SwiptError};

pub const RECORD_HEADER: [&str; 10] =
    ["scheme", "channel_index", "rate_index", "rate_req", "p_re", "p_h", "rho", "mode", "r_s", "iterations"];

/// Scientific notation with nine significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.8e}")
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> SwiptError {
    SwiptError::InvalidInput(format!("{}: {e}", path.display()))
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

pub fn write_records<W: Write>(records: &[TradeoffRecord], out: W) -> std::result::Result<(), csv::Error> {
    let mut w = writer(out);
    w.write_record(RECORD_HEADER)?;
    for r in records {
        w.write_record([
            r.scheme.clone(),
            r.channel_index.to_string(),
            r.rate_index.to_string(),
            sci(r.rate_req),
            sci(r.p_re),
            sci(r.p_h),
            sci(r.rho),
            r.mode.clone(),
            r.r_s.to_string(),
            r.iterations.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(records: &[TradeoffRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    write_records(records, std::io::BufWriter::new(file)).map_err(|e| io_err(path, e))
}

pub fn parse_csv(path: impl AsRef<Path>) -> Result<Vec<TradeoffRecord>> {
    let path = path.as_ref();
    let mut rdr = csv::Reader::from_path(path).map_err(|e| io_err(path, e))?;
    rdr.deserialize().collect::<std::result::Result<_, _>>().map_err(|e| io_err(path, e))
}

/// Aggregate over channels for one scheme at one rate-grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub scheme: String,
    pub rate_index: usize,
    pub rate_req_mean: f64,
    /// Records entering the averages.
    pub count: usize,
    /// Records whose scheme could not serve the rate.
    pub infeasible: usize,
    pub p_re_mean: f64,
    pub p_re_std: f64,
    pub p_h_mean: f64,
    pub p_h_std: f64,
    pub rho_mean: f64,
    pub rho_std: f64,
    /// Percentage gain of `op1` over `ops` on the same draws (op1 rows only).
    pub gain_over_ops_pct: f64,
    /// Percentage gain of `op1` over `otcm` on the same draws (op1 rows only).
    pub gain_over_otcm_pct: f64,
}

pub const SUMMARY_HEADER: [&str; 13] = [
    "scheme",
    "rate_index",
    "rate_req_mean",
    "count",
    "infeasible",
    "p_re_mean",
    "p_re_std",
    "p_h_mean",
    "p_h_std",
    "rho_mean",
    "rho_std",
    "gain_over_ops_pct",
    "gain_over_otcm_pct",
];

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn counted(r: &TradeoffRecord, policy: InfeasiblePolicy) -> Option<(f64, f64, f64)> {
    if r.is_solved() {
        Some((r.p_re, r.p_h, r.rho))
    } else if policy == InfeasiblePolicy::Zero && r.mode == "Infeasible" {
        Some((0.0, 0.0, r.rho))
    } else {
        None
    }
}

/// Per `(scheme, rate point)` means and population standard deviations, in
/// order of first appearance, plus the gains of `op1` over the baselines.
///
/// Gains compare sums over the draws both schemes contribute to, so a
/// baseline that fails on hard draws is not flattered by the exclusion.
pub fn summarize(records: &[TradeoffRecord], policy: InfeasiblePolicy) -> Vec<SummaryRow> {
    let mut keys: Vec<(String, usize)> = Vec::new();
    let mut groups: BTreeMap<(String, usize), Vec<&TradeoffRecord>> = BTreeMap::new();
    for r in records {
        let key = (r.scheme.clone(), r.rate_index);
        groups.entry(key.clone()).or_insert_with(|| {
            keys.push(key);
            Vec::new()
        });
        groups.get_mut(&(r.scheme.clone(), r.rate_index)).expect("inserted").push(r);
    }
    let per_channel = |scheme: &str, rate_index: usize| -> BTreeMap<usize, f64> {
        groups
            .get(&(scheme.to_string(), rate_index))
            .map(|rs| rs.iter().filter_map(|r| counted(r, policy).map(|c| (r.channel_index, c.0))).collect())
            .unwrap_or_default()
    };
    let gain = |rate_index: usize, baseline: &str| -> f64 {
        let ours = per_channel("op1", rate_index);
        let theirs = per_channel(baseline, rate_index);
        let (mut a, mut b) = (0.0, 0.0);
        for (ch, v) in &ours {
            if let Some(w) = theirs.get(ch) {
                a += v;
                b += w;
            }
        }
        if b > 0.0 {
            100.0 * (a - b) / b
        } else {
            f64::NAN
        }
    };
    keys.into_iter()
        .map(|key| {
            let rs = &groups[&key];
            let used: Vec<(f64, f64, f64)> = rs.iter().filter_map(|r| counted(r, policy)).collect();
            let col = |f: fn(&(f64, f64, f64)) -> f64| mean_std(&used.iter().map(f).collect::<Vec<_>>());
            let (p_re_mean, p_re_std) = col(|c| c.0);
            let (p_h_mean, p_h_std) = col(|c| c.1);
            let (rho_mean, rho_std) = col(|c| c.2);
            let is_op1 = key.0 == "op1";
            SummaryRow {
                rate_req_mean: mean_std(&rs.iter().map(|r| r.rate_req).collect::<Vec<_>>()).0,
                count: used.len(),
                infeasible: rs.iter().filter(|r| r.mode == "Infeasible").count(),
                p_re_mean,
                p_re_std,
                p_h_mean,
                p_h_std,
                rho_mean,
                rho_std,
                gain_over_ops_pct: if is_op1 { gain(key.1, "ops") } else { f64::NAN },
                gain_over_otcm_pct: if is_op1 { gain(key.1, "otcm") } else { f64::NAN },
                scheme: key.0,
                rate_index: key.1,
            }
        })
        .collect()
}

pub fn write_summary<W: Write>(rows: &[SummaryRow], out: W) -> std::result::Result<(), csv::Error> {
    let mut w = writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for r in rows {
        w.write_record([
            r.scheme.clone(),
            r.rate_index.to_string(),
            sci(r.rate_req_mean),
            r.count.to_string(),
            r.infeasible.to_string(),
            sci(r.p_re_mean),
            sci(r.p_re_std),
            sci(r.p_h_mean),
            sci(r.p_h_std),
            sci(r.rho_mean),
            sci(r.rho_std),
            sci(r.gain_over_ops_pct),
            sci(r.gain_over_otcm_pct),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_summary_csv(rows: &[SummaryRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    write_summary(rows, std::io::BufWriter::new(file)).map_err(|e| io_err(path, e))
}
