//! Z-score significance of motif counts against a null ensemble, plus
//! distribution summaries across network collections and sparsity levels.
//!
//! The z-score of a motif is `(n_real - mean(null counts)) / std(null
//! counts)` with the population (divide-by-N) standard deviation. A zero
//! null deviation marks the motif degenerate: no z is fabricated, dense
//! networks simply report every motif as degenerate.

use crate::motif::{MotifCensus, MotifKind};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SignificanceError {
    #[error("need at least 2 null censuses, got {got}")]
    TooFewNullSamples { got: usize },
    #[error("empty report list")]
    EmptyInput,
}

/// Significance of one motif: the raw count, the null moments, and the
/// z-score (absent when the null deviation is zero).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MotifStat {
    pub n_real: u128,
    pub random_mean: f64,
    pub random_std: f64,
    pub z: Option<f64>,
}

impl MotifStat {
    pub fn is_degenerate(&self) -> bool {
        self.z.is_none()
    }
}

/// Per-motif significance for one network.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZScoreReport {
    pub label: String,
    pub sparsity_tag: String,
    pub sample_count: usize,
    pub stats: Vec<(MotifKind, MotifStat)>,
}

impl ZScoreReport {
    pub fn stat(&self, kind: MotifKind) -> &MotifStat {
        &self.stats[kind.index()].1
    }
}

/// Compute Eq.-style z-scores for one network against its null censuses.
pub fn zscore(
    census: &MotifCensus,
    null_censuses: &[MotifCensus],
) -> Result<ZScoreReport, SignificanceError> {
    if null_censuses.len() < 2 {
        return Err(SignificanceError::TooFewNullSamples { got: null_censuses.len() });
    }
    let n = null_censuses.len() as f64;
    let stats = MotifKind::ALL
        .into_iter()
        .map(|kind| {
            let n_real = census.counts.get(kind);
            let values: Vec<f64> = null_censuses.iter().map(|c| c.counts.get(kind) as f64).collect();
            let mean = values.iter().sum::<f64>() / n;
            let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            let std = var.sqrt();
            let z = (std > 0.0).then(|| (n_real as f64 - mean) / std);
            (kind, MotifStat { n_real, random_mean: mean, random_std: std, z })
        })
        .collect();
    Ok(ZScoreReport {
        label: census.label.clone(),
        sparsity_tag: census.sparsity_tag.clone(),
        sample_count: null_censuses.len(),
        stats,
    })
}

/// Order statistics and moments of z over one (motif, sparsity) group.
/// Present only when the group has at least one non-degenerate report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZStats {
    pub min: f64,
    pub p5: f64,
    pub p25: f64,
    pub median: f64,
    pub p75: f64,
    pub p95: f64,
    pub max: f64,
    pub mean: f64,
    pub std: f64,
}

/// One (sparsity level, motif) cell of a distribution summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub sparsity_tag: String,
    pub motif: MotifKind,
    /// Reports in the group, degenerate ones included.
    pub total: usize,
    /// Degenerate reports: counted, excluded from the statistics.
    pub degenerate: usize,
    pub stats: Option<ZStats>,
}

/// Per-motif, per-sparsity-level distribution of z across a collection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub groups: Vec<GroupSummary>,
}

impl DistributionSummary {
    pub fn group(&self, tag: &str, motif: MotifKind) -> Option<&GroupSummary> {
        self.groups.iter().find(|g| g.sparsity_tag == tag && g.motif == motif)
    }

    /// Distinct sparsity tags in summary order.
    pub fn tags(&self) -> Vec<String> {
        let mut tags: Vec<String> = Vec::new();
        for g in &self.groups {
            if !tags.contains(&g.sparsity_tag) {
                tags.push(g.sparsity_tag.clone());
            }
        }
        tags
    }
}

/// Percentile with linear interpolation between order statistics.
/// `sorted` must be non-empty and ascending; `p` in `[0, 100]`.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of empty slice");
    let rank = p / 100.0 * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let frac = rank - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

fn tag_order_key(tag: &str) -> (u8, f64, String) {
    match tag.parse::<f64>() {
        Ok(v) => (0, v, String::new()),
        Err(_) => (1, 0.0, tag.to_string()),
    }
}

/// Group reports by sparsity tag and summarize z per motif. Tags sort
/// numerically when they parse as numbers, lexicographically otherwise;
/// motifs follow [`MotifKind::ALL`] order.
pub fn summarize(reports: &[ZScoreReport]) -> Result<DistributionSummary, SignificanceError> {
    if reports.is_empty() {
        return Err(SignificanceError::EmptyInput);
    }
    let mut tags: Vec<String> = Vec::new();
    for r in reports {
        if !tags.contains(&r.sparsity_tag) {
            tags.push(r.sparsity_tag.clone());
        }
    }
    tags.sort_by(|a, b| {
        let (ka, kb) = (tag_order_key(a), tag_order_key(b));
        ka.0.cmp(&kb.0).then(ka.1.total_cmp(&kb.1)).then(ka.2.cmp(&kb.2))
    });

    let mut groups = Vec::with_capacity(tags.len() * MotifKind::ALL.len());
    for tag in &tags {
        let in_group: Vec<&ZScoreReport> =
            reports.iter().filter(|r| &r.sparsity_tag == tag).collect();
        for motif in MotifKind::ALL {
            let mut zs: Vec<f64> =
                in_group.iter().filter_map(|r| r.stat(motif).z).collect();
            let degenerate = in_group.len() - zs.len();
            zs.sort_by(f64::total_cmp);
            let stats = (!zs.is_empty()).then(|| {
                let n = zs.len() as f64;
                let mean = zs.iter().sum::<f64>() / n;
                let var = zs.iter().map(|z| (z - mean) * (z - mean)).sum::<f64>() / n;
                ZStats {
                    min: zs[0],
                    p5: percentile(&zs, 5.0),
                    p25: percentile(&zs, 25.0),
                    median: percentile(&zs, 50.0),
                    p75: percentile(&zs, 75.0),
                    p95: percentile(&zs, 95.0),
                    max: zs[zs.len() - 1],
                    mean,
                    std: var.sqrt(),
                }
            });
            groups.push(GroupSummary {
                sparsity_tag: tag.clone(),
                motif,
                total: in_group.len(),
                degenerate,
                stats,
            });
        }
    }
    Ok(DistributionSummary { groups })
}

/// One row of the component tables: the three z-score ingredients for one
/// (network, motif).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentRow {
    pub label: String,
    pub sparsity_tag: String,
    pub motif: MotifKind,
    pub n_real: u128,
    pub random_mean: f64,
    pub random_std: f64,
}

/// The three z-score component tables (raw count, null mean, null std),
/// stored row-wise; one row per network x motif.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentTables {
    pub rows: Vec<ComponentRow>,
}

impl ComponentTables {
    /// Values of one component, in row order.
    pub fn component(&self, which: Component) -> Vec<(String, String, MotifKind, f64)> {
        self.rows
            .iter()
            .map(|r| {
                let v = match which {
                    Component::NReal => r.n_real as f64,
                    Component::RandomMean => r.random_mean,
                    Component::RandomStd => r.random_std,
                };
                (r.label.clone(), r.sparsity_tag.clone(), r.motif, v)
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Component {
    NReal,
    RandomMean,
    RandomStd,
}

impl Component {
    pub const ALL: [Component; 3] = [Component::NReal, Component::RandomMean, Component::RandomStd];

    pub fn name(self) -> &'static str {
        match self {
            Component::NReal => "n_real",
            Component::RandomMean => "random_mean",
            Component::RandomStd => "random_std",
        }
    }
}

/// Extract the three z-score components from a batch of reports.
pub fn component_tables(reports: &[ZScoreReport]) -> Result<ComponentTables, SignificanceError> {
    if reports.is_empty() {
        return Err(SignificanceError::EmptyInput);
    }
    let rows = reports
        .iter()
        .flat_map(|r| {
            r.stats.iter().map(|(motif, stat)| ComponentRow {
                label: r.label.clone(),
                sparsity_tag: r.sparsity_tag.clone(),
                motif: *motif,
                n_real: stat.n_real,
                random_mean: stat.random_mean,
                random_std: stat.random_std,
            })
        })
        .collect();
    Ok(ComponentTables { rows })
}
