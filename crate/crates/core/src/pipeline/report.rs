use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use super::{write_file, MetricReport, PipelineError, PromptSelection, SweepTable};
use crate::explain::ExplanationScores;
use crate::metrics::csv_field;

fn to_json<T: Serialize>(value: &T, context: &str) -> Result<Vec<u8>, PipelineError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|source| PipelineError::Json {
        context: context.to_string(),
        source,
    })?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

fn metrics_csv(report: &MetricReport) -> String {
    let mut out = String::from(
        "strategy,representation,k,runs,acc_mean,acc_std,nmi_mean,nmi_std,best_inertia,sem,cosine\n",
    );
    for e in &report.entries {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            csv_field(&e.strategy),
            e.representation,
            e.k,
            e.runs,
            opt(e.acc.as_ref().map(|a| a.mean)),
            opt(e.acc.as_ref().map(|a| a.std)),
            opt(e.nmi.as_ref().map(|a| a.mean)),
            opt(e.nmi.as_ref().map(|a| a.std)),
            e.best_inertia,
            opt(e.explanation.sem),
            opt(e.explanation.cosine),
        );
    }
    out
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    created_unix_secs: u64,
    config: Option<&'a super::ExperimentConfig>,
    seeds: Vec<Vec<u64>>,
    files: Vec<String>,
}

/// Writes `metrics.json`, `metrics.csv`, one confusion CSV and one
/// explanation JSON per entry, and `run_manifest.json`. Only the manifest
/// carries a timestamp.
pub fn emit_report(report: &MetricReport, dir: &Path) -> Result<Vec<PathBuf>, PipelineError> {
    let mut written = vec![
        write_file(dir, "metrics.json", &to_json(report, "metrics.json")?)?,
        write_file(dir, "metrics.csv", metrics_csv(report).as_bytes())?,
    ];
    for (entry, artifacts) in report.entries.iter().zip(&report.artifacts) {
        if let (Some(name), Some(confusion)) = (&entry.confusion_file, &artifacts.confusion) {
            written.push(write_file(dir, name, confusion.to_csv().as_bytes())?);
        }
        written.push(emit_explanations(&artifacts.explanations, dir, &entry.explanations_file)?);
    }
    let mut files: Vec<String> = written
        .iter()
        .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .collect();
    files.push("run_manifest.json".into());
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        created_unix_secs: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        config: report.config.as_ref(),
        seeds: report
            .entries
            .iter()
            .map(|e| (0..e.runs as u64).map(|r| e.base_seed.wrapping_add(r)).collect())
            .collect(),
        files,
    };
    written.push(write_file(dir, "run_manifest.json", &to_json(&manifest, "run_manifest.json")?)?);
    Ok(written)
}

/// Writes explanation scores as a JSON object keyed by cluster id.
pub fn emit_explanations(
    scores: &ExplanationScores,
    dir: &Path,
    name: &str,
) -> Result<PathBuf, PipelineError> {
    write_file(dir, name, &to_json(&scores.to_json(), name)?)
}

/// Writes `selection.json` plus the chosen prompt's full report.
pub fn emit_selection(selection: &PromptSelection, dir: &Path) -> Result<Vec<PathBuf>, PipelineError> {
    let mut written = vec![write_file(
        dir,
        "selection.json",
        &to_json(selection, "selection.json")?,
    )?];
    written.extend(emit_report(selection.chosen_report(), dir)?);
    Ok(written)
}

pub fn emit_sweep(table: &SweepTable, dir: &Path) -> Result<Vec<PathBuf>, PipelineError> {
    let mut csv = String::from(
        "strategy,representation,m,draws,acc_mean,acc_std,acc_stderr,nmi_mean,nmi_std,nmi_stderr\n",
    );
    for r in &table.rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{}",
            csv_field(&r.strategy),
            r.representation,
            r.m,
            r.draws,
            r.acc.mean,
            r.acc.std,
            r.acc.stderr,
            r.nmi.mean,
            r.nmi.std,
            r.nmi.stderr
        );
    }
    Ok(vec![
        write_file(dir, "sweep.json", &to_json(table, "sweep.json")?)?,
        write_file(dir, "sweep.csv", csv.as_bytes())?,
    ])
}

fn fmt_pm(mean: Option<f64>, spread: Option<f64>) -> String {
    match (mean, spread) {
        (Some(m), Some(s)) => format!("{m:.2} ± {s:.2}"),
        _ => "-".into(),
    }
}

fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let widths: Vec<usize> = (0..header.len())
        .map(|i| {
            rows.iter()
                .map(|r| r[i].chars().count())
                .chain([header[i].chars().count()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        out.push_str(parts.join("  ").trim_end());
        out.push('\n');
    };
    line(header.to_vec());
    line(widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().iter().map(String::as_str).collect());
    for r in rows {
        line(r.iter().map(String::as_str).collect());
    }
    out
}

/// Renders a `metrics.json` document as an aligned text table.
pub fn render_report(metrics_json: &str) -> Result<String, PipelineError> {
    let report: MetricReport =
        serde_json::from_str(metrics_json).map_err(|source| PipelineError::Json {
            context: "parsing metrics.json".into(),
            source,
        })?;
    let rows: Vec<Vec<String>> = report
        .entries
        .iter()
        .map(|e| {
            vec![
                e.strategy.clone(),
                e.representation.to_string(),
                e.k.to_string(),
                e.runs.to_string(),
                fmt_pm(e.acc.as_ref().map(|a| a.mean), e.acc.as_ref().map(|a| a.std)),
                fmt_pm(e.nmi.as_ref().map(|a| a.mean), e.nmi.as_ref().map(|a| a.std)),
                format!("{:.4}", e.best_inertia),
                e.explanation.sem.map_or("-".into(), |v| format!("{v:.1}")),
                e.explanation.cosine.map_or("-".into(), |v| format!("{v:.1}")),
            ]
        })
        .collect();
    Ok(table(
        &["strategy", "repr", "k", "runs", "Acc", "NMI", "best inertia", "SEM", "Cosine"],
        &rows,
    ))
}

pub fn render_sweep(sweep: &SweepTable) -> String {
    let rows: Vec<Vec<String>> = sweep
        .rows
        .iter()
        .map(|r| {
            vec![
                r.strategy.clone(),
                r.representation.to_string(),
                r.m.to_string(),
                r.draws.to_string(),
                fmt_pm(Some(r.acc.mean), Some(r.acc.stderr)),
                fmt_pm(Some(r.nmi.mean), Some(r.nmi.stderr)),
            ]
        })
        .collect();
    table(&["strategy", "repr", "m", "draws", "Acc (± s.e.)", "NMI (± s.e.)"], &rows)
}

/// Renders a prompt-selection result, winner marked with `*`.
pub fn render_selection(selection: &PromptSelection) -> String {
    let rows: Vec<Vec<String>> = selection
        .candidates
        .iter()
        .enumerate()
        .map(|(i, c)| {
            vec![
                if i == selection.chosen_index { "*".into() } else { String::new() },
                c.strategy.clone(),
                c.representation.to_string(),
                format!("{:.6}", c.best_inertia),
                c.acc_mean.map_or("-".into(), |v| format!("{v:.2}")),
                c.nmi_mean.map_or("-".into(), |v| format!("{v:.2}")),
            ]
        })
        .collect();
    table(&["", "strategy", "repr", "best inertia", "Acc", "NMI"], &rows)
}
