//! Report files: `report.json` plus CSV tables for the misclassification
//! table, budget sweeps, spectrum differences, flip counts, edge bands and
//! timing.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use spac::graph::Graph;

use crate::experiment::{AttackKind, Report};
use crate::spectra::{frequency_band_reconstruction, Band};

/// Rounds to 6 significant digits.
pub fn sig6(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.5e}").parse().unwrap_or(x)
}

/// Formats with at most 6 significant digits.
pub fn fmt6(x: f64) -> String {
    format!("{}", sig6(x))
}

/// Wall-clock time of one attack call; kept out of the report so repeated
/// runs produce identical reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub attack: AttackKind,
    pub epsilon: f64,
    pub seed: u64,
    pub wall_time_secs: f64,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Mean and population standard deviation of the misclassification rate per
/// `(attack, ε)`, keyed in report order.
pub fn sweep(report: &Report) -> Vec<(AttackKind, f64, f64, f64, usize)> {
    let mut order: Vec<(AttackKind, u64)> = Vec::new();
    let mut groups: BTreeMap<(AttackKind, u64), Vec<f64>> = BTreeMap::new();
    for c in &report.cells {
        let key = (c.attack, c.epsilon.to_bits());
        if !groups.contains_key(&key) {
            order.push(key);
        }
        groups.entry(key).or_default().push(c.misclassification);
    }
    order
        .into_iter()
        .map(|key| {
            let v = &groups[&key];
            let (m, s) = mean_std(v);
            (key.0, f64::from_bits(key.1), m, s, v.len())
        })
        .collect()
}

pub fn table3_csv(report: &Report) -> String {
    let rows = sweep(report);
    let mut budgets: Vec<f64> = Vec::new();
    for r in &rows {
        if !budgets.contains(&r.1) {
            budgets.push(r.1);
        }
    }
    let mut out = String::from("attack");
    for b in &budgets {
        out.push_str(&format!(",{} eps={}", report.dataset.replace(',', ";"), fmt6(*b)));
    }
    out.push('\n');
    if !report.clean.is_empty() {
        let clean: Vec<f64> = report.clean.iter().map(|c| c.misclassification).collect();
        let m = fmt6(mean_std(&clean).0);
        out.push_str("Clean");
        for _ in &budgets {
            out.push_str(&format!(",{m}"));
        }
        out.push('\n');
    }
    let mut attacks: Vec<AttackKind> = Vec::new();
    for r in &rows {
        if !attacks.contains(&r.0) {
            attacks.push(r.0);
        }
    }
    for a in attacks {
        out.push_str(a.name());
        for b in &budgets {
            match rows.iter().find(|r| r.0 == a && r.1 == *b) {
                Some(r) => out.push_str(&format!(",{}", fmt6(r.2))),
                None => out.push(','),
            }
        }
        out.push('\n');
    }
    out
}

pub fn sweep_csv(report: &Report) -> String {
    let mut out = String::from("attack,epsilon,mean_misclassification,std_misclassification,runs\n");
    for (a, eps, m, s, k) in sweep(report) {
        out.push_str(&format!("{},{},{},{},{k}\n", a.name(), fmt6(eps), fmt6(m), fmt6(s)));
    }
    out
}

pub fn spectrum_diff_csv(report: &Report) -> String {
    let mut out = String::from("attack,epsilon,seed,rank,clean_eigenvalue,difference\n");
    for c in &report.cells {
        for (rank, (clean, diff)) in report.clean_eigenvalues.iter().zip(&c.eigenvalue_difference).enumerate() {
            out.push_str(&format!(
                "{},{},{},{rank},{},{}\n",
                c.attack.name(),
                fmt6(c.epsilon),
                c.seed,
                fmt6(*clean),
                fmt6(*diff)
            ));
        }
    }
    out
}

pub fn flip_counts_csv(report: &Report) -> String {
    let mut out = String::from("attack,epsilon,seed,added_inter,added_intra,removed_inter,removed_intra,flips_used\n");
    for c in &report.cells {
        let f = c.flip_counts.unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            c.attack.name(),
            fmt6(c.epsilon),
            c.seed,
            f.added_inter,
            f.added_intra,
            f.removed_inter,
            f.removed_intra,
            c.flips_used
        ));
    }
    out
}

pub fn timing_csv(timings: &[Timing]) -> String {
    let mut out = String::from("attack,epsilon,seed,wall_time_secs\n");
    for t in timings {
        out.push_str(&format!("{},{},{},{}\n", t.attack.name(), fmt6(t.epsilon), t.seed, fmt6(t.wall_time_secs)));
    }
    out
}

/// `u,v,lowest,highest` for every edge, with `k` components per band.
pub fn edge_bands_csv(g: &Graph<f64>, k: usize) -> spac::Result<String> {
    let low = frequency_band_reconstruction(g, Band::Lowest(k))?;
    let high = frequency_band_reconstruction(g, Band::Highest(k))?;
    let mut out = format!("u,v,lowest_{k},highest_{k}\n");
    for (((u, v), l), (_, h)) in low.into_iter().zip(high) {
        out.push_str(&format!("{u},{v},{},{}\n", fmt6(l), fmt6(h)));
    }
    Ok(out)
}

/// Writes the report-derived tables (everything except timing and edge bands).
pub fn write_report_tables(dir: &Path, report: &Report) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let json = serde_json::to_string_pretty(report).map_err(std::io::Error::other)?;
    fs::File::create(dir.join("report.json"))?.write_all(json.as_bytes())?;
    fs::write(dir.join("table3.csv"), table3_csv(report))?;
    fs::write(dir.join("sweep.csv"), sweep_csv(report))?;
    fs::write(dir.join("spectrum_diff.csv"), spectrum_diff_csv(report))?;
    fs::write(dir.join("flip_counts.csv"), flip_counts_csv(report))?;
    Ok(())
}

pub fn write_outputs(
    dir: &Path,
    report: &Report,
    timings: &[Timing],
    g: &Graph<f64>,
    band_k: Option<usize>,
) -> std::io::Result<()> {
    write_report_tables(dir, report)?;
    fs::write(dir.join("timing.csv"), timing_csv(timings))?;
    let k = band_k.unwrap_or_else(|| g.n().div_ceil(10)).min(g.n());
    match edge_bands_csv(g, k) {
        Ok(csv) => fs::write(dir.join("edge_bands.csv"), csv)?,
        Err(e) => tracing::warn!("edge bands skipped: {e}"),
    }
    Ok(())
}

pub fn read_report(path: &Path) -> std::io::Result<Report> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(std::io::Error::other)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(fmt6(0.1234564), "0.123456");
        assert_eq!(fmt6(1234567.0), "1234570");
        assert_eq!(fmt6(0.5), "0.5");
        assert_eq!(fmt6(-2.0e-9), "-0.000000002");
        assert_eq!(sig6(0.0), 0.0);
    }
}
