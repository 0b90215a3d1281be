//! Report emission: CSV and JSON renderings of censuses, z-score tables,
//! component tables, distribution summaries, and plot-data series.
//!
//! All writers are deterministic: fixed column order, fixed row order
//! (input order), and shortest-round-trip float formatting. The JSON and
//! CSV renderings of the same data are mutually consistent; parsing the
//! JSON and re-rendering as CSV reproduces the CSV bytes.

use crate::motif::{MotifCensus, MotifKind};
use crate::significance::{Component, ComponentTables, DistributionSummary, ZScoreReport};

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::Writer::from_writer(Vec::new())
}

fn csv_finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

/// Census table: one row per network, eight count columns.
pub fn census_csv(censuses: &[MotifCensus]) -> String {
    let mut w = csv_writer();
    let mut header = vec!["label".to_string(), "sparsity".to_string()];
    header.extend(MotifKind::ALL.iter().map(|k| k.name().to_string()));
    w.write_record(&header).unwrap();
    for c in censuses {
        let mut record = vec![c.label.clone(), c.sparsity_tag.clone()];
        record.extend(MotifKind::ALL.iter().map(|&k| c.counts.get(k).to_string()));
        w.write_record(&record).unwrap();
    }
    csv_finish(w)
}

pub fn census_json(censuses: &[MotifCensus]) -> String {
    serde_json::to_string_pretty(censuses).unwrap()
}

/// Re-render a parsed JSON census report as CSV (consistency path).
pub fn census_csv_from_json(json: &str) -> serde_json::Result<String> {
    let censuses: Vec<MotifCensus> = serde_json::from_str(json)?;
    Ok(census_csv(&censuses))
}

const ZSCORE_COLUMNS: [&str; 8] = [
    "label",
    "sparsity",
    "motif",
    "n_real",
    "random_mean",
    "random_std",
    "z",
    "degenerate",
];

/// Z-score table: one row per network x motif.
pub fn zscore_csv(reports: &[ZScoreReport]) -> String {
    let mut w = csv_writer();
    w.write_record(ZSCORE_COLUMNS).unwrap();
    for r in reports {
        for (kind, stat) in &r.stats {
            w.write_record([
                r.label.clone(),
                r.sparsity_tag.clone(),
                kind.name().to_string(),
                stat.n_real.to_string(),
                fmt_f64(stat.random_mean),
                fmt_f64(stat.random_std),
                fmt_opt(stat.z),
                stat.is_degenerate().to_string(),
            ])
            .unwrap();
        }
    }
    csv_finish(w)
}

pub fn zscore_json(reports: &[ZScoreReport]) -> String {
    serde_json::to_string_pretty(reports).unwrap()
}

pub fn zscore_csv_from_json(json: &str) -> serde_json::Result<String> {
    let reports: Vec<ZScoreReport> = serde_json::from_str(json)?;
    Ok(zscore_csv(&reports))
}

/// One component table (`n_real`, `random_mean`, or `random_std`): one row
/// per network x motif, mirroring the three sides of the z-score.
pub fn component_csv(tables: &ComponentTables, which: Component) -> String {
    let mut w = csv_writer();
    w.write_record(["label", "sparsity", "motif", which.name()]).unwrap();
    for (label, tag, motif, value) in tables.component(which) {
        let rendered = match which {
            // raw counts are integers; render them as such
            Component::NReal => format!("{}", value as u128),
            _ => fmt_f64(value),
        };
        w.write_record([label, tag, motif.name().to_string(), rendered]).unwrap();
    }
    csv_finish(w)
}

const SUMMARY_COLUMNS: [&str; 13] = [
    "sparsity", "motif", "total", "degenerate", "min", "p5", "p25", "median", "p75", "p95", "max",
    "mean", "std",
];

/// Distribution summary: one row per (sparsity level, motif).
pub fn summary_csv(summary: &DistributionSummary) -> String {
    let mut w = csv_writer();
    w.write_record(SUMMARY_COLUMNS).unwrap();
    for g in &summary.groups {
        let s = g.stats.as_ref();
        w.write_record([
            g.sparsity_tag.clone(),
            g.motif.name().to_string(),
            g.total.to_string(),
            g.degenerate.to_string(),
            fmt_opt(s.map(|v| v.min)),
            fmt_opt(s.map(|v| v.p5)),
            fmt_opt(s.map(|v| v.p25)),
            fmt_opt(s.map(|v| v.median)),
            fmt_opt(s.map(|v| v.p75)),
            fmt_opt(s.map(|v| v.p95)),
            fmt_opt(s.map(|v| v.max)),
            fmt_opt(s.map(|v| v.mean)),
            fmt_opt(s.map(|v| v.std)),
        ])
        .unwrap();
    }
    csv_finish(w)
}

pub fn summary_json(summary: &DistributionSummary) -> String {
    serde_json::to_string_pretty(summary).unwrap()
}

pub fn summary_csv_from_json(json: &str) -> serde_json::Result<String> {
    let summary: DistributionSummary = serde_json::from_str(json)?;
    Ok(summary_csv(&summary))
}

/// Plot-data series: per motif, one row per sparsity level with the z
/// quantile band. Intended for external plotting tools.
pub fn plot_series_csv(summary: &DistributionSummary) -> String {
    let mut w = csv_writer();
    w.write_record(["motif", "sparsity", "p5", "p25", "median", "p75", "p95"]).unwrap();
    for motif in MotifKind::ALL {
        for g in summary.groups.iter().filter(|g| g.motif == motif) {
            let s = g.stats.as_ref();
            w.write_record([
                motif.name().to_string(),
                g.sparsity_tag.clone(),
                fmt_opt(s.map(|v| v.p5)),
                fmt_opt(s.map(|v| v.p25)),
                fmt_opt(s.map(|v| v.median)),
                fmt_opt(s.map(|v| v.p75)),
                fmt_opt(s.map(|v| v.p95)),
            ])
            .unwrap();
        }
    }
    csv_finish(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motif::MotifCounts;
    use crate::significance::{component_tables, summarize, zscore};

    fn sample_reports() -> Vec<ZScoreReport> {
        let mut census = MotifCensus {
            label: "netA".into(),
            sparsity_tag: "0.90".into(),
            counts: MotifCounts { chain2: 10, bi_fan: 4, ..MotifCounts::default() },
        };
        let nulls: Vec<MotifCensus> = [2u128, 2, 6, 6]
            .iter()
            .map(|&v| MotifCensus {
                label: "null".into(),
                sparsity_tag: String::new(),
                counts: MotifCounts { chain2: v, bi_fan: v / 2, ..MotifCounts::default() },
            })
            .collect();
        let a = zscore(&census, &nulls).unwrap();
        census.label = "netB".into();
        census.counts.chain2 = 3;
        let b = zscore(&census, &nulls).unwrap();
        vec![a, b]
    }

    #[test]
    fn zscore_csv_and_json_are_consistent() {
        let reports = sample_reports();
        let csv_direct = zscore_csv(&reports);
        let json = zscore_json(&reports);
        let csv_via_json = zscore_csv_from_json(&json).unwrap();
        assert_eq!(csv_direct, csv_via_json);
    }

    #[test]
    fn census_csv_and_json_are_consistent() {
        let censuses = vec![MotifCensus {
            label: "x".into(),
            sparsity_tag: "0.5".into(),
            counts: MotifCounts { chain3: 7, ..MotifCounts::default() },
        }];
        let direct = census_csv(&censuses);
        let via_json = census_csv_from_json(&census_json(&censuses)).unwrap();
        assert_eq!(direct, via_json);
        assert!(direct.contains("chain3"));
        assert!(direct.lines().nth(1).unwrap().contains(",7,"));
    }

    #[test]
    fn summary_csv_and_json_are_consistent() {
        let summary = summarize(&sample_reports()).unwrap();
        let direct = summary_csv(&summary);
        let via_json = summary_csv_from_json(&summary_json(&summary)).unwrap();
        assert_eq!(direct, via_json);
    }

    #[test]
    fn component_tables_emit_three_csv_tables() {
        let tables = component_tables(&sample_reports()).unwrap();
        for which in Component::ALL {
            let text = component_csv(&tables, which);
            let mut lines = text.lines();
            assert!(lines.next().unwrap().ends_with(which.name()));
            // 2 networks x 8 motifs rows
            assert_eq!(lines.count(), 16);
        }
    }

    #[test]
    fn degenerate_rows_render_empty_z() {
        let census = MotifCensus {
            label: "dense".into(),
            sparsity_tag: "0".into(),
            counts: MotifCounts::default(),
        };
        let nulls = vec![census.clone(), census.clone()];
        let report = zscore(&census, &nulls).unwrap();
        let text = zscore_csv(&[report]);
        let row = text.lines().nth(1).unwrap();
        assert!(row.ends_with(",,true"), "{row}");
    }

    #[test]
    fn plot_series_has_one_row_per_motif_per_level() {
        let summary = summarize(&sample_reports()).unwrap();
        let text = plot_series_csv(&summary);
        assert_eq!(text.lines().count(), 1 + 8);
    }
}
