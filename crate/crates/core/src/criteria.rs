//! The eight information criteria and argmin ranking across candidates.
//!
//! Every report is "smaller is better". Penalized criteria satisfy
//! `value = fit + 2·penalty`; BIC stores `d·ln n` as its penalty and adds it
//! once; the ELBO criterion reports `−2·elbo` with zero penalty.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use libm::log;
use nalgebra::{DMatrix, SymmetricEigen};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::model::{ModelKind, Params};
use crate::sandwich::{penalty_inputs, SandwichSet};

/// Smallest accepted DIC draw count.
pub const MIN_DIC_DRAWS: usize = 100;
pub const DEFAULT_DIC_DRAWS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Criterion {
    Vpic,
    VdicM,
    Elbo,
    Aic,
    Bic,
    Tic,
    Dic,
    DicM,
}

impl Criterion {
    pub const ALL: [Criterion; 8] = [
        Criterion::Vpic,
        Criterion::VdicM,
        Criterion::Elbo,
        Criterion::Aic,
        Criterion::Bic,
        Criterion::Tic,
        Criterion::Dic,
        Criterion::DicM,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Criterion::Vpic => "VPIC",
            Criterion::VdicM => "VDIC_M",
            Criterion::Elbo => "ELBO",
            Criterion::Aic => "AIC",
            Criterion::Bic => "BIC",
            Criterion::Tic => "TIC",
            Criterion::Dic => "DIC",
            Criterion::DicM => "DIC_M",
        }
    }

    /// Whether the criterion needs the maximum-likelihood fit.
    pub fn needs_mle(self) -> bool {
        matches!(self, Criterion::Aic | Criterion::Bic | Criterion::Tic)
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .chars()
            .filter(|c| *c != '_' && *c != '-')
            .map(|c| c.to_ascii_uppercase())
            .collect();
        Criterion::ALL
            .into_iter()
            .find(|c| c.label().replace('_', "") == norm)
            .ok_or_else(|| Error::InvalidConfig(alloc::format!("unknown criterion `{s}`")))
    }
}

/// Identifies one candidate model within a comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelMeta {
    pub model_id: String,
    /// Position in the candidate list; ties go to the lower index.
    pub index: usize,
    pub param_count: usize,
    pub n: usize,
}

impl ModelMeta {
    pub fn new(model_id: impl Into<String>, index: usize, param_count: usize, n: usize) -> Self {
        Self {
            model_id: model_id.into(),
            index,
            param_count,
            n,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub criterion: Criterion,
    pub fit_term: f64,
    pub penalty: f64,
    pub value: f64,
    pub meta: ModelMeta,
}

impl CriterionReport {
    fn penalized(criterion: Criterion, loglik: f64, penalty: f64, meta: &ModelMeta) -> Self {
        let fit_term = -2.0 * loglik;
        Self {
            criterion,
            fit_term,
            penalty,
            value: fit_term + 2.0 * penalty,
            meta: meta.clone(),
        }
    }
}

fn check_dim(sw: &SandwichSet, meta: &ModelMeta) -> Result<()> {
    if sw.dim() != meta.param_count {
        return Err(Error::DimensionMismatch {
            context: "sandwich dimension vs parameter count",
            expected: meta.param_count,
            found: sw.dim(),
        });
    }
    Ok(())
}

/// `P = −tr[Ω̄ H̄⁻¹]`, evaluated at the variational mean.
pub fn vdic_m(loglik_at_vb_mean: f64, sw: &SandwichSet, meta: &ModelMeta) -> Result<CriterionReport> {
    check_dim(sw, meta)?;
    let p = sw.trace_omega_neg_h_inv()?;
    Ok(CriterionReport::penalized(Criterion::VdicM, loglik_at_vb_mean, p, meta))
}

/// The four terms of the VPIC penalty; `total = ½(t₁ + t₂ − t₃ + t₄)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VpicTerms {
    /// `tr[Ω̄(−H̄)⁻¹]`
    pub trace_omega: f64,
    /// `ln|(−H̄)(−H̄ᵈ)⁻¹ + I|`
    pub log_det: f64,
    /// `tr[M⁻¹(Ω̄ + (−H̄ᵈ)Ĉ(−H̄ᵈ))]`
    pub cross: f64,
    /// `tr[(−H̄ᵈ)Ĉ]`
    pub diag_c: f64,
}

impl VpicTerms {
    pub fn total(&self) -> f64 {
        0.5 * (self.trace_omega + self.log_det - self.cross + self.diag_c)
    }
}

pub fn vpic_terms(sw: &SandwichSet) -> Result<VpicTerms> {
    let c = sw.c_hat()?;
    let pi = penalty_inputs(sw)?;
    let trace_omega = sw.trace_omega_neg_h_inv()?;

    let d = sw.dim();
    let scale: Vec<f64> = pi
        .neg_hd
        .diagonal()
        .iter()
        .map(|&v| {
            if v > 0.0 {
                Ok(1.0 / libm::sqrt(v))
            } else {
                Err(Error::NegativeLogDetArgument(v))
            }
        })
        .collect::<Result<_>>()?;
    // D^{-1/2}(−H̄)D^{-1/2} + I is similar to (−H̄)D⁻¹ + I.
    let sim = DMatrix::from_fn(d, d, |i, j| {
        scale[i] * pi.neg_h[(i, j)] * scale[j] + if i == j { 1.0 } else { 0.0 }
    });
    let eig = SymmetricEigen::new(sim);
    let mut log_det = 0.0;
    for &l in eig.eigenvalues.iter() {
        if l <= 0.0 {
            return Err(Error::NegativeLogDetArgument(l));
        }
        log_det += log(l);
    }

    let dcd = &pi.neg_hd * c * &pi.neg_hd;
    let cross = pi.m_factor().trace_solve(&(&sw.omega + dcd));
    let diag_c = (&pi.neg_hd * c).trace();
    Ok(VpicTerms {
        trace_omega,
        log_det,
        cross,
        diag_c,
    })
}

pub fn vpic(loglik_at_vb_mean: f64, sw: &SandwichSet, meta: &ModelMeta) -> Result<CriterionReport> {
    check_dim(sw, meta)?;
    let p = vpic_terms(sw)?.total();
    Ok(CriterionReport::penalized(Criterion::Vpic, loglik_at_vb_mean, p, meta))
}

pub fn aic(loglik_at_mle: f64, meta: &ModelMeta) -> CriterionReport {
    CriterionReport::penalized(Criterion::Aic, loglik_at_mle, meta.param_count as f64, meta)
}

/// Same penalty as VDIC_M with the sandwich evaluated at the MLE.
pub fn tic(loglik_at_mle: f64, sw_at_mle: &SandwichSet, meta: &ModelMeta) -> Result<CriterionReport> {
    check_dim(sw_at_mle, meta)?;
    let p = sw_at_mle.trace_omega_neg_h_inv()?;
    Ok(CriterionReport::penalized(Criterion::Tic, loglik_at_mle, p, meta))
}

/// `value = −2ℓ + d·ln n`; the penalty field holds `d·ln n`.
pub fn bic(loglik_at_mle: f64, meta: &ModelMeta) -> CriterionReport {
    let fit_term = -2.0 * loglik_at_mle;
    let penalty = meta.param_count as f64 * log(meta.n as f64);
    CriterionReport {
        criterion: Criterion::Bic,
        fit_term,
        penalty,
        value: fit_term + penalty,
        meta: meta.clone(),
    }
}

/// `P_D = 2(ℓ(θ̄) − mean_j ℓ(θⱼ))` over posterior draws.
pub fn dic(
    loglik_at_post_mean: f64,
    draws: &[Params],
    kind: ModelKind,
    data: &Dataset,
    meta: &ModelMeta,
) -> Result<CriterionReport> {
    if draws.len() < MIN_DIC_DRAWS {
        return Err(Error::TooFewDraws {
            required: MIN_DIC_DRAWS,
            found: draws.len(),
        });
    }
    let mut sum = 0.0;
    for theta in draws {
        sum += kind.loglik(theta, data)?;
    }
    let p_d = 2.0 * (loglik_at_post_mean - sum / draws.len() as f64);
    Ok(CriterionReport::penalized(Criterion::Dic, loglik_at_post_mean, p_d, meta))
}

/// `P_M = tr[n·Ω̄·V]` with `V` the variational posterior covariance.
pub fn dic_m(
    loglik_at_post_mean: f64,
    sw: &SandwichSet,
    post_cov: &DMatrix<f64>,
    meta: &ModelMeta,
) -> Result<CriterionReport> {
    check_dim(sw, meta)?;
    if post_cov.nrows() != sw.dim() || post_cov.ncols() != sw.dim() {
        return Err(Error::DimensionMismatch {
            context: "posterior covariance",
            expected: sw.dim(),
            found: post_cov.nrows().max(post_cov.ncols()),
        });
    }
    let p = sw.n as f64 * (&sw.omega * post_cov).trace();
    Ok(CriterionReport::penalized(Criterion::DicM, loglik_at_post_mean, p, meta))
}

pub fn elbo_criterion(elbo: f64, meta: &ModelMeta) -> CriterionReport {
    CriterionReport {
        criterion: Criterion::Elbo,
        fit_term: -2.0 * elbo,
        penalty: 0.0,
        value: -2.0 * elbo,
        meta: meta.clone(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonResult {
    /// Reports grouped by criterion, each group ordered by model index.
    pub reports: BTreeMap<Criterion, Vec<CriterionReport>>,
    /// Criterion → winning model.
    pub winners: BTreeMap<Criterion, ModelMeta>,
}

impl ComparisonResult {
    pub fn winner(&self, c: Criterion) -> Option<&ModelMeta> {
        self.winners.get(&c)
    }
}

/// Index of the smallest value; the first occurrence wins ties.
pub fn argmin<I: IntoIterator<Item = f64>>(values: I) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.into_iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        match best {
            Some((_, b)) if v >= b => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}

/// Ranks reports per criterion by value, ties to the lowest model index.
pub fn compare_models(reports: &[CriterionReport]) -> Result<ComparisonResult> {
    if reports.is_empty() {
        return Err(Error::EmptyInput("criterion reports"));
    }
    let mut grouped: BTreeMap<Criterion, Vec<CriterionReport>> = BTreeMap::new();
    for r in reports {
        grouped.entry(r.criterion).or_default().push(r.clone());
    }
    let mut winners = BTreeMap::new();
    for (c, group) in grouped.iter_mut() {
        group.sort_by_key(|r| r.meta.index);
        if let Some(i) = argmin(group.iter().map(|r| r.value)) {
            winners.insert(*c, group[i].meta.clone());
        }
    }
    Ok(ComparisonResult {
        reports: grouped,
        winners,
    })
}
