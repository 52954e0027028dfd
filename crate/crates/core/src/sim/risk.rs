//! Plug-in estimates of predictive risk from selected criterion values.

use alloc::vec::Vec;
use core::fmt;

use libm::sqrt;

use crate::criteria::Criterion;
use crate::error::{Error, Result};
use crate::special::LN_2PI;

use super::experiment::ReplicationRecord;

/// A risk column: the criterion whose winner is chosen and the criterion
/// whose value is recorded at that winner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RiskLabel {
    Vpic,
    VdicM,
    Elbo1,
    Elbo2,
    /// VPIC at the AIC winner.
    Aic,
    /// AIC's own value at its winner.
    AicRaw,
    Bic1,
    Bic2,
}

impl RiskLabel {
    pub const ALL: [RiskLabel; 8] = [
        RiskLabel::Vpic,
        RiskLabel::VdicM,
        RiskLabel::Elbo1,
        RiskLabel::Elbo2,
        RiskLabel::Aic,
        RiskLabel::AicRaw,
        RiskLabel::Bic1,
        RiskLabel::Bic2,
    ];

    /// `(selector, scored)` criteria.
    pub fn parts(self) -> (Criterion, Criterion) {
        use Criterion::*;
        match self {
            RiskLabel::Vpic => (Vpic, Vpic),
            RiskLabel::VdicM => (VdicM, VdicM),
            RiskLabel::Elbo1 => (Elbo, VdicM),
            RiskLabel::Elbo2 => (Elbo, Vpic),
            RiskLabel::Aic => (Aic, Vpic),
            RiskLabel::AicRaw => (Aic, Aic),
            RiskLabel::Bic1 => (Bic, VdicM),
            RiskLabel::Bic2 => (Bic, Vpic),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            RiskLabel::Vpic => "VPIC",
            RiskLabel::VdicM => "VDIC_M",
            RiskLabel::Elbo1 => "ELBO1",
            RiskLabel::Elbo2 => "ELBO2",
            RiskLabel::Aic => "AIC",
            RiskLabel::AicRaw => "AIC_RAW",
            RiskLabel::Bic1 => "BIC1",
            RiskLabel::Bic2 => "BIC2",
        }
    }

    /// The scored value in one replication, if both criteria were computed.
    pub fn sample(self, rec: &ReplicationRecord) -> Option<f64> {
        let (select, score) = self.parts();
        let k = *rec.selected.get(&select)?;
        rec.values.get(&score)?.get(k - 1).copied().flatten()
    }
}

impl fmt::Display for RiskLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskEstimate {
    /// Mean of the selected criterion values.
    pub raw: f64,
    /// `(raw − 1 − ln 2π) · 10³`.
    pub scaled: f64,
    /// Sample standard deviation over `√reps`.
    pub se: f64,
    pub reps: usize,
}

impl RiskEstimate {
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyInput("risk samples"));
        }
        let m = samples.len() as f64;
        let raw = samples.iter().sum::<f64>() / m;
        let se = if samples.len() > 1 {
            let ss: f64 = samples.iter().map(|v| (v - raw) * (v - raw)).sum();
            sqrt(ss / (m - 1.0)) / sqrt(m)
        } else {
            0.0
        };
        Ok(Self {
            raw,
            scaled: (raw - 1.0 - LN_2PI) * 1e3,
            se,
            reps: samples.len(),
        })
    }
}

pub fn estimate_risk(per_rep: &[ReplicationRecord], label: RiskLabel) -> Result<RiskEstimate> {
    let samples: Vec<f64> = per_rep.iter().filter_map(|r| label.sample(r)).collect();
    RiskEstimate::from_samples(&samples)
}
