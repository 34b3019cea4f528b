//! External clustering evaluation against ground-truth class names.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::hungarian::max_weight_matching;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("{labels} labels but {assignments} assignments")]
    LengthMismatch { labels: usize, assignments: usize },
    #[error("cannot evaluate an empty clustering")]
    Empty,
    #[error("contingency row {row} has {found} columns, expected {expected}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("{classes} class names for {rows} rows")]
    ClassCount { classes: usize, rows: usize },
}

/// A score in `[0, 1]` together with its percentage form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub raw: f64,
    pub scaled: f64,
}

impl MetricValue {
    pub fn new(raw: f64) -> Self {
        Self {
            raw,
            scaled: raw * 100.0,
        }
    }
}

/// Class-by-cluster counts. Rows follow first appearance of each class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContingencyTable {
    classes: Vec<String>,
    counts: Vec<Vec<u64>>,
}

impl ContingencyTable {
    pub fn from_counts(classes: Vec<String>, counts: Vec<Vec<u64>>) -> Result<Self, MetricsError> {
        if classes.len() != counts.len() {
            return Err(MetricsError::ClassCount {
                classes: classes.len(),
                rows: counts.len(),
            });
        }
        let width = counts.first().map_or(0, Vec::len);
        for (row, r) in counts.iter().enumerate() {
            if r.len() != width {
                return Err(MetricsError::Ragged {
                    row,
                    expected: width,
                    found: r.len(),
                });
            }
        }
        let table = Self { classes, counts };
        if table.total() == 0 {
            return Err(MetricsError::Empty);
        }
        Ok(table)
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn n_clusters(&self) -> usize {
        self.counts.first().map_or(0, Vec::len)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn class_sizes(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn cluster_sizes(&self) -> Vec<u64> {
        (0..self.n_clusters())
            .map(|j| self.counts.iter().map(|r| r[j]).sum())
            .collect()
    }

    /// Hungarian matching of clusters to classes maximizing agreement.
    /// `result[cluster] = Some(class_row)`.
    pub fn matching(&self) -> Vec<Option<usize>> {
        let weights: Vec<Vec<i64>> = (0..self.n_clusters())
            .map(|j| self.counts.iter().map(|r| r[j] as i64).collect())
            .collect();
        max_weight_matching(&weights)
    }

    /// Cluster id to matched class name.
    pub fn matched_names(&self) -> Vec<Option<&str>> {
        self.matching()
            .into_iter()
            .map(|c| c.map(|c| self.classes[c].as_str()))
            .collect()
    }
}

pub fn contingency<S: AsRef<str>>(
    labels: &[S],
    assignments: &[usize],
) -> Result<ContingencyTable, MetricsError> {
    if labels.len() != assignments.len() {
        return Err(MetricsError::LengthMismatch {
            labels: labels.len(),
            assignments: assignments.len(),
        });
    }
    if labels.is_empty() {
        return Err(MetricsError::Empty);
    }
    let n_clusters = assignments.iter().max().map_or(0, |&m| m + 1);
    let mut row_of: HashMap<&str, usize> = HashMap::new();
    let mut classes = Vec::new();
    let mut counts: Vec<Vec<u64>> = Vec::new();
    for (label, &cluster) in labels.iter().zip(assignments) {
        let label = label.as_ref();
        let row = *row_of.entry(label).or_insert_with(|| {
            classes.push(label.to_string());
            counts.push(vec![0; n_clusters]);
            classes.len() - 1
        });
        counts[row][cluster] += 1;
    }
    Ok(ContingencyTable { classes, counts })
}

/// Fraction of items on the diagonal after the best one-to-one matching of
/// clusters to classes.
pub fn cluster_accuracy(table: &ContingencyTable) -> MetricValue {
    let matched: u64 = table
        .matching()
        .into_iter()
        .enumerate()
        .filter_map(|(j, c)| c.map(|c| table.counts[c][j]))
        .sum();
    MetricValue::new(matched as f64 / table.total() as f64)
}

fn entropy(sizes: &[u64], n: f64) -> f64 {
    sizes
        .iter()
        .filter(|&&s| s > 0)
        .map(|&s| {
            let p = s as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Mutual information normalized by the arithmetic mean of the two entropies.
pub fn nmi(table: &ContingencyTable) -> MetricValue {
    let n = table.total() as f64;
    let class_sizes = table.class_sizes();
    let cluster_sizes = table.cluster_sizes();
    let h_classes = entropy(&class_sizes, n);
    let h_clusters = entropy(&cluster_sizes, n);
    let nonempty = |s: &[u64]| s.iter().filter(|&&x| x > 0).count();

    if nonempty(&class_sizes) == 1 && nonempty(&cluster_sizes) == 1 {
        return MetricValue::new(1.0);
    }
    if h_classes == 0.0 || h_clusters == 0.0 {
        return MetricValue::new(0.0);
    }

    let mut mi = 0.0;
    for (c, row) in table.counts.iter().enumerate() {
        for (j, &count) in row.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let joint = count as f64 / n;
            let pc = class_sizes[c] as f64 / n;
            let qj = cluster_sizes[j] as f64 / n;
            mi += joint * (joint / (pc * qj)).ln();
        }
    }
    let raw = mi / ((h_classes + h_clusters) / 2.0);
    MetricValue::new(raw.clamp(0.0, 1.0))
}

/// Row-normalized confusion matrix whose columns are ordered so that each
/// class's matched cluster sits in that class's column position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub classes: Vec<String>,
    /// Cluster id shown in each column.
    pub columns: Vec<usize>,
    /// Header label per column: the matched class name, or `cluster_<id>`.
    pub column_labels: Vec<String>,
    /// Cluster matched to each class row.
    pub matched_cluster: Vec<Option<usize>>,
    pub values: Vec<Vec<f64>>,
}

impl ConfusionMatrix {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("class,matched_cluster");
        for label in &self.column_labels {
            out.push(',');
            out.push_str(&csv_field(label));
        }
        out.push('\n');
        for (c, class) in self.classes.iter().enumerate() {
            out.push_str(&csv_field(class));
            out.push(',');
            if let Some(j) = self.matched_cluster[c] {
                let _ = write!(out, "{j}");
            }
            for v in &self.values[c] {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn confusion_matrix(table: &ContingencyTable) -> ConfusionMatrix {
    let matching = table.matching();
    let mut matched_cluster = vec![None; table.n_classes()];
    for (j, c) in matching.iter().enumerate() {
        if let Some(c) = *c {
            matched_cluster[c] = Some(j);
        }
    }
    let mut columns: Vec<usize> = matched_cluster.iter().flatten().copied().collect();
    columns.extend((0..table.n_clusters()).filter(|j| matching[*j].is_none()));
    let column_labels = columns
        .iter()
        .map(|&j| match matching[j] {
            Some(c) => table.classes[c].clone(),
            None => format!("cluster_{j}"),
        })
        .collect();
    let values = table
        .counts
        .iter()
        .map(|row| {
            let size: u64 = row.iter().sum();
            columns
                .iter()
                .map(|&j| if size == 0 { 0.0 } else { row[j] as f64 / size as f64 })
                .collect()
        })
        .collect();
    ConfusionMatrix {
        classes: table.classes.clone(),
        columns,
        column_labels,
        matched_cluster,
        values,
    }
}
