//! Throughput-loss metrics and percentile summaries.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::DeploymentResult;
use crate::error::{Error, Result};
use crate::policy::PolicyKind;
use crate::traffic::FlowKind;

/// Acceptable average throughput loss.
pub const LOSS_THRESHOLD: f64 = 0.05;

pub const PERCENTILES: [u32; 5] = [5, 25, 50, 75, 95];

/// `1 - delivered / offered`, or 0 when nothing was offered.
pub fn flow_loss(offered: f64, delivered: f64) -> Result<f64> {
    if delivered > offered || delivered < 0.0 {
        return Err(Error::Domain(format!("delivered {delivered} bits outside [0, offered = {offered}]")));
    }
    if offered == 0.0 {
        Ok(0.0)
    } else {
        Ok(1.0 - delivered / offered)
    }
}

pub fn mean(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.into_iter().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Nearest-rank percentile of an ascending sample: the value at rank
/// `ceil(p / 100 * n)`, with rank at least 1.
pub fn percentile_nearest_rank(sorted: &[f64], p: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let n = sorted.len();
    let rank = ((p / 100.0) * n as f64).ceil() as usize;
    Some(sorted[rank.clamp(1, n) - 1])
}

/// Flow class a loss figure refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LossClass {
    Video,
    Data,
    All,
}

impl LossClass {
    pub const ALL: [LossClass; 3] = [LossClass::Video, LossClass::Data, LossClass::All];

    pub fn kind(self) -> Option<FlowKind> {
        match self {
            LossClass::Video => Some(FlowKind::Video),
            LossClass::Data => Some(FlowKind::Data),
            LossClass::All => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LossClass::Video => "video",
            LossClass::Data => "data",
            LossClass::All => "all",
        }
    }
}

impl fmt::Display for LossClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LossClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        LossClass::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| format!("unknown flow class `{s}`"))
    }
}

/// A deployment meets the target when every present class is below
/// [`LOSS_THRESHOLD`].
pub fn is_compliant(video: Option<f64>, data: Option<f64>) -> bool {
    video.is_none_or(|l| l < LOSS_THRESHOLD) && data.is_none_or(|l| l < LOSS_THRESHOLD)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub policy: PolicyKind,
    pub class: LossClass,
    /// Values at [`PERCENTILES`]; `None` when no deployment had the class.
    pub percentiles: [Option<f64>; 5],
    pub frac_below_5pct: f64,
    pub n_deployments: usize,
}

impl SummaryRow {
    pub fn percentile(&self, p: u32) -> Option<f64> {
        PERCENTILES.iter().position(|q| *q == p).and_then(|i| self.percentiles[i])
    }
}

/// Percentiles per policy and flow class over deployments, plus the
/// fraction of compliant deployments. Rows are ordered by policy, then
/// video, data, all.
pub fn aggregate_results(results: &[DeploymentResult]) -> Vec<SummaryRow> {
    let mut by_policy: BTreeMap<PolicyKind, Vec<&DeploymentResult>> = BTreeMap::new();
    for r in results {
        by_policy.entry(r.policy).or_default().push(r);
    }
    let mut rows = Vec::new();
    for (policy, rs) in by_policy {
        let compliant = rs.iter().filter(|r| is_compliant(r.avg_loss_video, r.avg_loss_data)).count();
        let frac = compliant as f64 / rs.len() as f64;
        for class in LossClass::ALL {
            let mut sample: Vec<f64> = rs.iter().filter_map(|r| r.loss(class.kind())).collect();
            sample.sort_by(f64::total_cmp);
            rows.push(SummaryRow {
                policy,
                class,
                percentiles: PERCENTILES.map(|p| percentile_nearest_rank(&sample, f64::from(p))),
                frac_below_5pct: frac,
                n_deployments: rs.len(),
            });
        }
    }
    rows
}
