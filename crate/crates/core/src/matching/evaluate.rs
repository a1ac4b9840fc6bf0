//! Batch classification metrics: confusion counts, ROC/AUC and threshold
//! calibration at a target false-positive rate.

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{compare, CompareParams};
use crate::error::{Error, Result};
use crate::fingerprint::Fingerprint;

pub const TARGET_FPR: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Positive => "positive",
            Label::Negative => "negative",
        }
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "positive" => Ok(Label::Positive),
            "negative" => Ok(Label::Negative),
            other => Err(Error::invalid(format!("label must be 'positive' or 'negative', got '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Confusion {
    /// Predicted positive iff `error < kappa`.
    pub fn at(scores: &[(f64, Label)], kappa: f64) -> Self {
        let mut c = Confusion::default();
        for &(e, label) in scores {
            match (e < kappa, label) {
                (true, Label::Positive) => c.tp += 1,
                (true, Label::Negative) => c.fp += 1,
                (false, Label::Negative) => c.tn += 1,
                (false, Label::Positive) => c.fn_ += 1,
            }
        }
        c
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn accuracy(&self) -> f64 {
        ratio(self.tp + self.tn, self.total())
    }

    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn false_positive_rate(&self) -> f64 {
        ratio(self.fp, self.fp + self.tn)
    }
}

/// `num / den`, or 0 for an empty denominator.
fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    /// Pairs with `error < threshold` are called positive; `None` is +∞.
    pub threshold: Option<f64>,
    pub fpr: f64,
    pub tpr: f64,
}

/// One ROC point per distinct error value plus the all-positive point at
/// +∞, in increasing threshold order.
pub fn roc_curve(scores: &[(f64, Label)]) -> Vec<RocPoint> {
    let mut thresholds: Vec<f64> = scores.iter().map(|s| s.0).collect();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();
    thresholds
        .into_iter()
        .map(Some)
        .chain([None])
        .map(|threshold| {
            let c = Confusion::at(scores, threshold.unwrap_or(f64::INFINITY));
            RocPoint { threshold, fpr: c.false_positive_rate(), tpr: c.recall() }
        })
        .collect()
}

/// Trapezoidal area under the ROC; `None` unless both classes are present.
pub fn auc_trapezoid(scores: &[(f64, Label)]) -> Option<f64> {
    let has = |l| scores.iter().any(|s| s.1 == l);
    if !has(Label::Positive) || !has(Label::Negative) {
        return None;
    }
    let roc = roc_curve(scores);
    Some(roc.windows(2).map(|p| (p[1].fpr - p[0].fpr) * (p[1].tpr + p[0].tpr) / 2.0).sum())
}

/// Largest `κ` whose false-positive rate (errors strictly below `κ`) stays
/// within `target_fpr`. `None` without negatives.
pub fn learn_kappa(scores: &[(f64, Label)], target_fpr: f64) -> Option<f64> {
    let mut neg: Vec<f64> = scores.iter().filter(|s| s.1 == Label::Negative).map(|s| s.0).collect();
    if neg.is_empty() {
        return None;
    }
    neg.sort_by(f64::total_cmp);
    let allowed = ((target_fpr * neg.len() as f64).floor() as usize).min(neg.len() - 1);
    Some(neg[allowed])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredPair {
    pub error: f64,
    pub rho: f64,
    pub label: Label,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchMetrics {
    pub n_pairs: usize,
    pub kappa: f64,
    pub confusion: Confusion,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub auc: Option<f64>,
    pub target_fpr: f64,
    pub learned_kappa: Option<f64>,
    pub confusion_at_learned_kappa: Option<Confusion>,
    pub accuracy_at_learned_kappa: Option<f64>,
    #[serde(skip)]
    pub roc: Vec<RocPoint>,
    #[serde(skip)]
    pub scores: Vec<ScoredPair>,
}

/// Metrics from already computed pair scores.
pub fn classify_scores(scored: Vec<ScoredPair>, kappa: f64) -> Result<BatchMetrics> {
    if scored.is_empty() {
        return Err(Error::EmptyInput("no labelled pairs"));
    }
    let scores: Vec<(f64, Label)> = scored.iter().map(|s| (s.error, s.label)).collect();
    let confusion = Confusion::at(&scores, kappa);
    let learned_kappa = learn_kappa(&scores, TARGET_FPR);
    let at_learned = learned_kappa.map(|k| Confusion::at(&scores, k));
    Ok(BatchMetrics {
        n_pairs: scores.len(),
        kappa,
        confusion,
        accuracy: confusion.accuracy(),
        precision: confusion.precision(),
        recall: confusion.recall(),
        auc: auc_trapezoid(&scores),
        target_fpr: TARGET_FPR,
        learned_kappa,
        confusion_at_learned_kappa: at_learned,
        accuracy_at_learned_kappa: at_learned.map(|c| c.accuracy()),
        roc: roc_curve(&scores),
        scores: scored,
    })
}

/// Compares every pair and summarises the decisions at `params.kappa`.
pub fn classify_batch(pairs: &[(Fingerprint, Fingerprint, Label)], params: &CompareParams) -> Result<BatchMetrics> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput("no labelled pairs"));
    }
    let scored = pairs
        .par_iter()
        .map(|(a, b, label)| {
            let r = compare(a, b, params)?;
            Ok(ScoredPair { error: r.error, rho: r.rho, label: *label })
        })
        .collect::<Result<Vec<_>>>()?;
    classify_scores(scored, params.kappa)
}
