//! Dynamic decoupling of per-view evidence into consistent and
//! complementary parts, the test-time fusion rule, and the baseline
//! aggregation strategies used for ablations.
//!
//! For views `e^1..e^V` and per-class minima `m_c = min_v e_c^v`:
//!
//! * consistent evidence `e^con = V * m` — what every view jointly supports;
//! * residuals `r^v = e^v - m` (element-wise, >= 0);
//! * complementary evidence `e^cmp = mean_v r^v`.
//!
//! The residual subtracts the un-scaled minimum `m`, not `V * m`: this keeps
//! every residual non-negative (evidence must stay >= 0) and yields the
//! identity `mean_v e^v = e^con / V + e^cmp` per class.

use crate::error::{Error, Result};
use crate::opinion::EvidenceVector;

/// Output of [`decouple`]. `min_view[c]` is the view attaining the per-class
/// minimum (lowest index on ties); training routes the min subgradient there.
#[derive(Debug, Clone)]
pub struct DecoupledEvidence {
    pub consistent: EvidenceVector,
    pub complementary: EvidenceVector,
    pub per_view_residuals: Vec<EvidenceVector>,
    pub min_view: Vec<usize>,
}

impl DecoupledEvidence {
    pub fn num_views(&self) -> usize {
        self.per_view_residuals.len()
    }

    pub fn num_classes(&self) -> usize {
        self.consistent.len()
    }
}

fn check_views(views: &[EvidenceVector]) -> Result<usize> {
    if views.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "decoupling needs at least 2 views, got {}",
            views.len()
        )));
    }
    let c = views[0].len();
    for (v, e) in views.iter().enumerate() {
        if e.len() != c {
            return Err(Error::Shape(format!(
                "view {v} has {} classes, expected {c}",
                e.len()
            )));
        }
    }
    Ok(c)
}

/// Split per-view evidence into consistent and complementary parts.
pub fn decouple(views: &[EvidenceVector]) -> Result<DecoupledEvidence> {
    let num_classes = check_views(views)?;
    let num_views = views.len();

    let mut minimum = vec![f64::INFINITY; num_classes];
    let mut min_view = vec![0usize; num_classes];
    for (v, e) in views.iter().enumerate() {
        for (c, val) in e.as_slice().iter().enumerate() {
            if *val < minimum[c] {
                minimum[c] = *val;
                min_view[c] = v;
            }
        }
    }

    let consistent: Vec<f64> = minimum.iter().map(|m| m * num_views as f64).collect();

    let mut complementary = vec![0.0; num_classes];
    let mut per_view_residuals = Vec::with_capacity(num_views);
    for e in views {
        let residual: Vec<f64> = e
            .as_slice()
            .iter()
            .zip(&minimum)
            .map(|(v, m)| (v - m).max(0.0))
            .collect();
        for (c, r) in residual.iter().enumerate() {
            complementary[c] += r / num_views as f64;
        }
        per_view_residuals.push(EvidenceVector::new(residual)?);
    }

    Ok(DecoupledEvidence {
        consistent: EvidenceVector::new(consistent)?,
        complementary: EvidenceVector::new(complementary)?,
        per_view_residuals,
        min_view,
    })
}

/// Test-time fusion: average of the consistent and complementary evidence.
pub fn fuse_final(d: &DecoupledEvidence) -> EvidenceVector {
    let fused: Vec<f64> = d
        .consistent
        .as_slice()
        .iter()
        .zip(d.complementary.as_slice())
        .map(|(con, cmp)| 0.5 * (con + cmp))
        .collect();
    EvidenceVector::new(fused).expect("mean of non-negative evidence is valid")
}

/// Baseline aggregation strategies for ablation comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggregateStrategy {
    Sum,
    Average,
    ConsistentOnly,
    ComplementaryOnly,
}

impl std::str::FromStr for AggregateStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum" => Ok(AggregateStrategy::Sum),
            "average" => Ok(AggregateStrategy::Average),
            "consistent_only" => Ok(AggregateStrategy::ConsistentOnly),
            "complementary_only" => Ok(AggregateStrategy::ComplementaryOnly),
            other => Err(Error::InvalidArgument(format!(
                "unknown aggregation strategy '{other}'"
            ))),
        }
    }
}

/// Aggregate per-view evidence with one of the baseline strategies.
pub fn aggregate_baseline(
    views: &[EvidenceVector],
    strategy: AggregateStrategy,
) -> Result<EvidenceVector> {
    let num_classes = check_views(views)?;
    match strategy {
        AggregateStrategy::Sum | AggregateStrategy::Average => {
            let mut acc = vec![0.0; num_classes];
            for e in views {
                for (c, v) in e.as_slice().iter().enumerate() {
                    acc[c] += v;
                }
            }
            if strategy == AggregateStrategy::Average {
                for v in &mut acc {
                    *v /= views.len() as f64;
                }
            }
            EvidenceVector::new(acc)
        }
        AggregateStrategy::ConsistentOnly => Ok(decouple(views)?.consistent),
        AggregateStrategy::ComplementaryOnly => Ok(decouple(views)?.complementary),
    }
}
