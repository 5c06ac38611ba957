//! Evidence vectors, Dirichlet parameters and subjective-logic opinions.
//!
//! An evidence vector `e` holds non-negative per-class support. It maps to
//! a Dirichlet via `alpha = e + 1` with strength `S = sum(alpha)`, and to a
//! subjective opinion `omega = (b, u, a)` via `b_c = e_c / S`, `u = C / S`,
//! `a_c = 1/C`, so `sum(b) + u = 1` holds by construction.
//!
//! Sharpening raises belief masses to a power `beta >= 1` and rescales so
//! the total belief mass is preserved; `u` and `a` are untouched, which
//! keeps the opinion normalized without any re-normalization step.

use crate::error::{Error, Result};

/// Non-negative per-class support mass. Length is the class count C >= 2.
#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceVector(Vec<f64>);

impl EvidenceVector {
    pub fn new(e: Vec<f64>) -> Result<Self> {
        if e.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "evidence needs at least 2 classes, got {}",
                e.len()
            )));
        }
        if let Some(bad) = e.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "evidence must be finite and non-negative, got {bad}"
            )));
        }
        Ok(EvidenceVector(e))
    }

    pub fn zeros(num_classes: usize) -> Result<Self> {
        EvidenceVector::new(vec![0.0; num_classes])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Dirichlet parameters `alpha = e + 1` with cached strength `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletParams {
    alpha: Vec<f64>,
    strength: f64,
}

impl DirichletParams {
    /// Build from raw alpha; every entry must be >= 1.
    pub fn from_alpha(alpha: Vec<f64>) -> Result<Self> {
        if alpha.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "alpha needs at least 2 classes, got {}",
                alpha.len()
            )));
        }
        if let Some(bad) = alpha.iter().find(|v| !(**v >= 1.0) || !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "alpha entries must be finite and >= 1, got {bad}"
            )));
        }
        let strength = alpha.iter().sum();
        Ok(DirichletParams { alpha, strength })
    }

    pub fn from_evidence(e: &EvidenceVector) -> Self {
        let alpha: Vec<f64> = e.as_slice().iter().map(|v| v + 1.0).collect();
        let strength = alpha.iter().sum();
        DirichletParams { alpha, strength }
    }

    /// Inverse of the opinion mapping: `S = C / u`, `alpha_c = b_c S + 1`.
    /// Errors when `u = 0` (infinite strength).
    pub fn from_opinion(omega: &SubjectiveOpinion) -> Result<Self> {
        if omega.uncertainty() <= 0.0 {
            return Err(Error::Domain(
                "cannot recover Dirichlet parameters from an opinion with u = 0".into(),
            ));
        }
        let c = omega.num_classes() as f64;
        let strength = c / omega.uncertainty();
        let alpha: Vec<f64> = omega.beliefs().iter().map(|b| b * strength + 1.0).collect();
        let total = alpha.iter().sum();
        Ok(DirichletParams { alpha, strength: total })
    }

    pub fn num_classes(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn evidence(&self) -> EvidenceVector {
        // alpha >= 1 so the subtraction stays non-negative
        EvidenceVector(self.alpha.iter().map(|a| a - 1.0).collect())
    }
}

/// Subjective opinion `(b, u, a)`: belief masses, uncertainty mass and
/// base rates, with `sum(b) + u = 1` and `sum(a) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubjectiveOpinion {
    beliefs: Vec<f64>,
    uncertainty: f64,
    base_rates: Vec<f64>,
}

impl SubjectiveOpinion {
    pub fn new(beliefs: Vec<f64>, uncertainty: f64, base_rates: Vec<f64>) -> Result<Self> {
        if beliefs.len() < 2 || beliefs.len() != base_rates.len() {
            return Err(Error::Shape(format!(
                "opinion needs matching b/a of length >= 2, got {} and {}",
                beliefs.len(),
                base_rates.len()
            )));
        }
        if beliefs.iter().any(|b| !(*b >= 0.0)) || !(uncertainty >= 0.0) {
            return Err(Error::InvalidArgument(
                "belief and uncertainty masses must be non-negative".into(),
            ));
        }
        let mass: f64 = beliefs.iter().sum::<f64>() + uncertainty;
        if (mass - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "sum(b) + u must equal 1, got {mass}"
            )));
        }
        let rate_sum: f64 = base_rates.iter().sum();
        if (rate_sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "base rates must sum to 1, got {rate_sum}"
            )));
        }
        Ok(SubjectiveOpinion { beliefs, uncertainty, base_rates })
    }

    /// `S = sum(e) + C`, `b_c = e_c / S`, `u = C / S`, uniform base rates.
    /// Zero evidence yields the vacuous opinion (u = 1).
    pub fn from_evidence(e: &EvidenceVector) -> Self {
        let c = e.len();
        let strength = e.total() + c as f64;
        let beliefs: Vec<f64> = e.as_slice().iter().map(|v| v / strength).collect();
        SubjectiveOpinion {
            beliefs,
            uncertainty: c as f64 / strength,
            base_rates: vec![1.0 / c as f64; c],
        }
    }

    pub fn num_classes(&self) -> usize {
        self.beliefs.len()
    }

    pub fn beliefs(&self) -> &[f64] {
        &self.beliefs
    }

    pub fn uncertainty(&self) -> f64 {
        self.uncertainty
    }

    pub fn base_rates(&self) -> &[f64] {
        &self.base_rates
    }

    /// Power-sharpen the belief masses: `t_c = b_c^beta`, rescaled so the
    /// total belief mass is unchanged. If every `t_c` is zero the beliefs
    /// collapse to zero. `u` and `a` are carried over as-is.
    pub fn sharpen(&self, beta: f64) -> Result<SubjectiveOpinion> {
        if !(beta >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "sharpening exponent must be >= 1, got {beta}"
            )));
        }
        let powered: Vec<f64> = self.beliefs.iter().map(|b| b.powf(beta)).collect();
        let powered_sum: f64 = powered.iter().sum();
        let beliefs = if powered_sum == 0.0 {
            vec![0.0; self.beliefs.len()]
        } else {
            let scale = self.beliefs.iter().sum::<f64>() / powered_sum;
            powered.iter().map(|t| t * scale).collect()
        };
        Ok(SubjectiveOpinion {
            beliefs,
            uncertainty: self.uncertainty,
            base_rates: self.base_rates.clone(),
        })
    }
}

/// Separation degree: sum of |b_i - b_j| over all ordered pairs i != j.
/// Zero iff every entry is equal.
pub fn separation_degree(beliefs: &[f64]) -> f64 {
    let mut sd = 0.0;
    for (i, bi) in beliefs.iter().enumerate() {
        for (j, bj) in beliefs.iter().enumerate() {
            if i != j {
                sd += (bi - bj).abs();
            }
        }
    }
    sd
}
