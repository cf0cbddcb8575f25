use serde::{Deserialize, Serialize};

use super::{BleuReport, MetricError, SariReport, MAX_ORDER};

/// Five-number summary plus mean of one column of values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSummary {
    pub label: String,
    pub count: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub metric: String,
    pub components: Vec<ComponentSummary>,
}

impl DistributionSummary {
    pub fn component(&self, label: &str) -> Option<&ComponentSummary> {
        self.components.iter().find(|c| c.label == label)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SariComponent {
    AddF,
    KeepF,
    DelPrecision,
}

impl SariComponent {
    fn prefix(self) -> &'static str {
        match self {
            SariComponent::AddF => "add_f",
            SariComponent::KeepF => "keep_f",
            SariComponent::DelPrecision => "del_precision",
        }
    }
}

/// Per-n distribution of clipped BLEU precisions (labels `p_1`..`p_4`).
pub fn precision_distribution(reports: &[BleuReport]) -> Result<DistributionSummary, MetricError> {
    let columns = (0..MAX_ORDER)
        .map(|k| reports.iter().map(|r| r.precisions[k]).collect())
        .collect();
    let labels = (1..=MAX_ORDER).map(|n| format!("p_{n}")).collect();
    summarize("bleu_precision", labels, columns)
}

/// Per-n distribution of SARI delete precisions (labels `del_precision_1`..).
pub fn sari_delete_distribution(reports: &[SariReport]) -> Result<DistributionSummary, MetricError> {
    sari_component_distribution(reports, SariComponent::DelPrecision)
}

pub fn sari_component_distribution(
    reports: &[SariReport],
    component: SariComponent,
) -> Result<DistributionSummary, MetricError> {
    let columns = (0..MAX_ORDER)
        .map(|k| {
            reports
                .iter()
                .map(|r| {
                    let s = &r.per_ngram[k];
                    match component {
                        SariComponent::AddF => s.add_f,
                        SariComponent::KeepF => s.keep_f,
                        SariComponent::DelPrecision => s.del_precision,
                    }
                })
                .collect()
        })
        .collect();
    let labels = (1..=MAX_ORDER)
        .map(|n| format!("{}_{n}", component.prefix()))
        .collect();
    summarize(&format!("sari_{}", component.prefix()), labels, columns)
}

/// Summarize labelled columns. Quartiles interpolate linearly between order
/// statistics at rank `(count - 1) * q`, so the median of an even-sized
/// column is the midpoint of its two central values.
pub fn summarize(
    metric: &str,
    labels: Vec<String>,
    columns: Vec<Vec<f64>>,
) -> Result<DistributionSummary, MetricError> {
    if columns.iter().any(Vec::is_empty) || columns.is_empty() {
        return Err(MetricError::EmptyResultSet);
    }
    let components = labels
        .into_iter()
        .zip(columns)
        .map(|(label, mut values)| {
            values.sort_by(f64::total_cmp);
            ComponentSummary {
                label,
                count: values.len(),
                min: values[0],
                q1: quantile(&values, 0.25),
                median: quantile(&values, 0.5),
                q3: quantile(&values, 0.75),
                max: values[values.len() - 1],
                mean: values.iter().sum::<f64>() / values.len() as f64,
            }
        })
        .collect();
    Ok(DistributionSummary {
        metric: metric.to_string(),
        components,
    })
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let rank = (sorted.len() - 1) as f64 * q;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    sorted[lo] + (rank - lo as f64) * (sorted[hi] - sorted[lo])
}
