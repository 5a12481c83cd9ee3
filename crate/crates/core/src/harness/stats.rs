use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::Scenario;
use super::run::ResultRow;
use crate::error::{Error, Result};

pub const Z95: f64 = 1.959963984540054;
pub const Z99: f64 = 2.5758293035489004;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

/// Wilson score interval for `successes` out of `trials`, clamped to
/// `[0, 1]` and widened if needed to contain the point estimate.
pub fn wilson(successes: usize, trials: usize, z: f64) -> Interval {
    assert!(trials > 0 && successes <= trials);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if successes == 0 { 0.0 } else { (center - half).clamp(0.0, p) };
    let hi = if successes == trials { 1.0 } else { (center + half).clamp(p, 1.0) };
    Interval { lo, hi }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub scenario: Scenario,
    pub player: String,
    pub adversary: String,
    pub sweep_value: Option<usize>,
    pub n: usize,
    pub t: usize,
    pub epsilon: f64,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub wilson95: Interval,
    pub wilson99: Interval,
    pub sym_diff_mean: f64,
    pub sym_diff_std: f64,
    pub queries_mean: f64,
    pub queries_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub groups: Vec<GroupSummary>,
}

type GroupKey = (Scenario, String, String, Option<usize>, usize, usize, u64);

#[derive(Default)]
struct Acc {
    trials: usize,
    successes: usize,
    sym: (u128, u128),
    queries: (u128, u128),
}

/// Mean and sample standard deviation from exact integer sums.
fn moments(count: usize, (sum, sum_sq): (u128, u128)) -> (f64, f64) {
    let n = count as f64;
    let mean = sum as f64 / n;
    if count < 2 {
        return (mean, 0.0);
    }
    let var = (count as u128 * sum_sq - sum * sum) as f64 / (n * (n - 1.0));
    (mean, var.max(0.0).sqrt())
}

/// Groups rows by scenario, player, adversary, sweep value, `n`, `t` and
/// `ε`. Integer accumulation makes the result independent of row order.
pub fn summarize(rows: &[ResultRow]) -> Result<SummaryStats> {
    if rows.is_empty() {
        return Err(Error::param("no result rows to summarize"));
    }
    let mut groups: BTreeMap<GroupKey, Acc> = BTreeMap::new();
    for r in rows {
        let key = (
            r.scenario,
            r.player.clone(),
            r.adversary.clone(),
            r.sweep_value,
            r.n,
            r.t,
            r.epsilon.to_bits(),
        );
        let a = groups.entry(key).or_default();
        a.trials += 1;
        a.successes += usize::from(r.success);
        let (s, q) = (r.sym_diff_t as u128, r.queries_used as u128);
        a.sym.0 += s;
        a.sym.1 += s * s;
        a.queries.0 += q;
        a.queries.1 += q * q;
    }
    let groups = groups
        .into_iter()
        .map(|((scenario, player, adversary, sweep_value, n, t, eps), a)| {
            let (sym_diff_mean, sym_diff_std) = moments(a.trials, a.sym);
            let (queries_mean, queries_std) = moments(a.trials, a.queries);
            GroupSummary {
                scenario,
                player,
                adversary,
                sweep_value,
                n,
                t,
                epsilon: f64::from_bits(eps),
                trials: a.trials,
                successes: a.successes,
                success_rate: a.successes as f64 / a.trials as f64,
                wilson95: wilson(a.successes, a.trials, Z95),
                wilson99: wilson(a.successes, a.trials, Z99),
                sym_diff_mean,
                sym_diff_std,
                queries_mean,
                queries_std,
            }
        })
        .collect();
    Ok(SummaryStats { groups })
}

/// One point of a query-budget vs success-rate curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotPoint {
    pub scenario: Scenario,
    pub player: String,
    pub sweep_value: Option<usize>,
    pub x_queries: f64,
    pub y_success: f64,
    pub y_lo95: f64,
    pub y_hi95: f64,
    pub trials: usize,
}

pub fn plot_points(summary: &SummaryStats) -> Vec<PlotPoint> {
    summary
        .groups
        .iter()
        .map(|g| PlotPoint {
            scenario: g.scenario,
            player: g.player.clone(),
            sweep_value: g.sweep_value,
            x_queries: g.queries_mean,
            y_success: g.success_rate,
            y_lo95: g.wilson95.lo,
            y_hi95: g.wilson95.hi,
            trials: g.trials,
        })
        .collect()
}

pub fn plot_csv(points: &[PlotPoint]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for p in points {
        w.serialize(p)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
