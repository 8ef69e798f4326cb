//! Classifier evaluation: confusion matrix, per-class precision/recall/F1,
//! accuracy, and ROC/AUC. The bad-bot class is the positive class
//! throughout.
//!
//! AUC is computed two ways and cross-checked: as the rank statistic (the
//! probability a random positive outscores a random negative, ties worth
//! half) and as the trapezoid area under the threshold-sweep ROC points.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tp: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tn + self.fp + self.fn_ + self.tp
    }
}

/// Precision/recall/F1 for one class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Prf1 {
    /// bad_bot (positive) class.
    pub positive: ClassMetrics,
    /// benign (negative) class.
    pub negative: ClassMetrics,
    pub accuracy: f64,
    /// Set when any metric hit a 0/0 and was reported as 0.
    pub zero_division: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub threshold: f64,
    pub fpr: f64,
    pub tpr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub confusion: ConfusionMatrix,
    pub metrics: Prf1,
    pub auc: f64,
    pub roc_points: Vec<RocPoint>,
    pub importances: Vec<(String, f64)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("label and prediction vectors differ in length ({labels} vs {preds})")]
    LengthMismatch { labels: usize, preds: usize },
    #[error("ROC needs both classes present")]
    SingleClass,
    #[error("unknown report format {0:?} (expected json or text)")]
    UnknownFormat(String),
}

/// Counts the confusion matrix with bad_bot (label 1) as positive.
pub fn confusion(y_true: &[u8], y_pred: &[u8]) -> Result<ConfusionMatrix, MetricsError> {
    if y_true.len() != y_pred.len() {
        return Err(MetricsError::LengthMismatch {
            labels: y_true.len(),
            preds: y_pred.len(),
        });
    }
    let mut cm = ConfusionMatrix::default();
    for (&t, &p) in y_true.iter().zip(y_pred) {
        match (t != 0, p != 0) {
            (false, false) => cm.tn += 1,
            (false, true) => cm.fp += 1,
            (true, false) => cm.fn_ += 1,
            (true, true) => cm.tp += 1,
        }
    }
    Ok(cm)
}

fn ratio(num: u64, den: u64, flag: &mut bool) -> f64 {
    if den == 0 {
        if num == 0 {
            *flag = true;
        }
        return 0.0;
    }
    num as f64 / den as f64
}

fn f1_of(p: f64, r: f64, flag: &mut bool) -> f64 {
    if p + r == 0.0 {
        *flag = true;
        return 0.0;
    }
    2.0 * p * r / (p + r)
}

/// Per-class precision, recall, F1 and overall accuracy. 0/0 yields 0 with
/// the `zero_division` flag set instead of an error.
pub fn prf1(cm: &ConfusionMatrix) -> Prf1 {
    let mut flag = false;
    let pos_p = ratio(cm.tp, cm.tp + cm.fp, &mut flag);
    let pos_r = ratio(cm.tp, cm.tp + cm.fn_, &mut flag);
    let neg_p = ratio(cm.tn, cm.tn + cm.fn_, &mut flag);
    let neg_r = ratio(cm.tn, cm.tn + cm.fp, &mut flag);
    let accuracy = ratio(cm.tp + cm.tn, cm.total(), &mut flag);
    Prf1 {
        positive: ClassMetrics {
            precision: pos_p,
            recall: pos_r,
            f1: f1_of(pos_p, pos_r, &mut flag),
        },
        negative: ClassMetrics {
            precision: neg_p,
            recall: neg_r,
            f1: f1_of(neg_p, neg_r, &mut flag),
        },
        accuracy,
        zero_division: flag,
    }
}

/// Rank-statistic AUC plus the threshold-sweep ROC curve. The trapezoid
/// area over the returned points must equal the rank AUC; both are
/// computed and compared to 1e-12 here.
pub fn roc_auc(y_true: &[u8], scores: &[f64]) -> Result<(f64, Vec<RocPoint>), MetricsError> {
    if y_true.len() != scores.len() {
        return Err(MetricsError::LengthMismatch {
            labels: y_true.len(),
            preds: scores.len(),
        });
    }
    let n_pos = y_true.iter().filter(|&&t| t != 0).count() as f64;
    let n_neg = y_true.len() as f64 - n_pos;
    if n_pos == 0.0 || n_neg == 0.0 {
        return Err(MetricsError::SingleClass);
    }

    // rank AUC with midranks for ties
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap());
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // ranks are 1-based; tied scores share the average rank
        let midrank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            if y_true[idx] != 0 {
                rank_sum_pos += midrank;
            }
        }
        i = j + 1;
    }
    let auc = (rank_sum_pos - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);

    // threshold sweep over distinct scores, descending
    let mut points = vec![RocPoint {
        threshold: f64::INFINITY,
        fpr: 0.0,
        tpr: 0.0,
    }];
    let mut tp = 0u64;
    let mut fp = 0u64;
    let desc: Vec<usize> = order.iter().rev().copied().collect();
    let mut i = 0;
    while i < desc.len() {
        let threshold = scores[desc[i]];
        while i < desc.len() && scores[desc[i]] == threshold {
            if y_true[desc[i]] != 0 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(RocPoint {
            threshold,
            fpr: fp as f64 / n_neg,
            tpr: tp as f64 / n_pos,
        });
    }

    let trapezoid: f64 = points
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[1].tpr + w[0].tpr) / 2.0)
        .sum();
    assert!(
        (trapezoid - auc).abs() < 1e-12,
        "rank AUC {auc} and trapezoid AUC {trapezoid} disagree"
    );

    Ok((auc, points))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Text,
}

impl std::str::FromStr for ReportFormat {
    type Err = MetricsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "text" => Ok(ReportFormat::Text),
            other => Err(MetricsError::UnknownFormat(other.to_string())),
        }
    }
}

/// Renders the report as machine JSON or a human text table.
pub fn render_report(report: &EvalReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut out = serde_json::to_string_pretty(report).expect("report serializes");
            out.push('\n');
            out
        }
        ReportFormat::Text => render_text(report),
    }
}

fn render_text(report: &EvalReport) -> String {
    let cm = &report.confusion;
    let m = &report.metrics;
    let mut out = String::new();
    out.push_str("confusion matrix (positive = bad_bot)\n");
    out.push_str(&format!(
        "                 pred benign  pred bot  total\n\
         actual benign  {:>12} {:>9} {:>6}\n\
         actual bot     {:>12} {:>9} {:>6}\n",
        cm.tn,
        cm.fp,
        cm.tn + cm.fp,
        cm.fn_,
        cm.tp,
        cm.fn_ + cm.tp,
    ));
    out.push_str(&format!(
        "\nmetric      benign  bad_bot\nprecision   {:.4}  {:.4}\nrecall      {:.4}  {:.4}\nf1          {:.4}  {:.4}\n",
        m.negative.precision,
        m.positive.precision,
        m.negative.recall,
        m.positive.recall,
        m.negative.f1,
        m.positive.f1,
    ));
    out.push_str(&format!("accuracy    {:.4}\n", m.accuracy));
    out.push_str(&format!("auc         {:.4}\n", report.auc));
    if m.zero_division {
        out.push_str("warning: one or more metrics hit 0/0 and report 0\n");
    }
    if !report.importances.is_empty() {
        out.push_str("\nfeature importance (total split gain)\n");
        for (name, gain) in &report.importances {
            out.push_str(&format!("  {name:<20} {gain:.4}\n"));
        }
    }
    out
}

/// ROC points as CSV with the documented header.
pub fn roc_csv(points: &[RocPoint]) -> String {
    let mut out = String::from("threshold,fpr,tpr\n");
    for p in points {
        out.push_str(&format!("{},{},{}\n", p.threshold, p.fpr, p.tpr));
    }
    out
}
