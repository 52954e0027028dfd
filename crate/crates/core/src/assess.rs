//! Fits one candidate and evaluates the requested criteria on it.

use alloc::string::String;
use alloc::vec::Vec;

use crate::criteria::{self, Criterion, CriterionReport, ModelMeta, DEFAULT_DIC_DRAWS};
use crate::data::Dataset;
use crate::error::Result;
use crate::model::{MleFit, MleOptions, Params};
use crate::sandwich::{build_sandwich, SandwichSet};
use crate::vb::{fit_vb, sample_vb_posterior, CaviOptions, Prior, VbPosterior};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssessOptions {
    pub cavi: CaviOptions,
    pub mle: MleOptions,
    pub dic_draws: usize,
    /// Seed for the DIC posterior draws.
    pub seed: u64,
}

impl AssessOptions {
    pub fn for_prior(prior: &Prior) -> Self {
        Self {
            cavi: CaviOptions::for_kind(prior.kind()),
            mle: MleOptions::default(),
            dic_draws: DEFAULT_DIC_DRAWS,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Assessment {
    pub meta: ModelMeta,
    pub posterior: VbPosterior,
    pub vb_mean: Params,
    pub loglik_at_vb_mean: f64,
    pub sandwich: SandwichSet,
    pub mle: Option<MleFit>,
    pub loglik_at_mle: Option<f64>,
    /// One report per requested criterion, in request order.
    pub reports: Vec<CriterionReport>,
}

impl Assessment {
    pub fn report(&self, c: Criterion) -> Option<&CriterionReport> {
        self.reports.iter().find(|r| r.criterion == c)
    }
}

/// Runs VB (and the MLE when a requested criterion needs it), builds the
/// sandwich at the variational mean and evaluates each criterion.
pub fn assess_candidate(
    data: &Dataset,
    prior: &Prior,
    criteria: &[Criterion],
    model_id: impl Into<String>,
    index: usize,
    opts: &AssessOptions,
) -> Result<Assessment> {
    let kind = prior.kind();
    let meta = ModelMeta::new(model_id, index, kind.dim(data.p()), data.n());
    let posterior = fit_vb(data, prior, &opts.cavi)?;
    let vb_mean = posterior.mean();
    let ll_vb = kind.loglik(&vb_mean, data)?;
    let sandwich = build_sandwich(kind, &vb_mean, data)?;

    let (mle, ll_mle) = if criteria.iter().any(|c| c.needs_mle()) {
        let fit = kind.fit_mle(data, &opts.mle)?;
        let ll = kind.loglik(&fit.params, data)?;
        (Some(fit), Some(ll))
    } else {
        (None, None)
    };

    let mut reports = Vec::with_capacity(criteria.len());
    for &c in criteria {
        let r = match c {
            Criterion::Vpic => criteria::vpic(ll_vb, &sandwich, &meta)?,
            Criterion::VdicM => criteria::vdic_m(ll_vb, &sandwich, &meta)?,
            Criterion::Elbo => criteria::elbo_criterion(posterior.elbo(), &meta),
            Criterion::DicM => criteria::dic_m(ll_vb, &sandwich, &posterior.covariance(), &meta)?,
            Criterion::Dic => {
                let draws = sample_vb_posterior(&posterior, opts.dic_draws, opts.seed)?;
                criteria::dic(ll_vb, &draws, kind, data, &meta)?
            }
            Criterion::Aic => criteria::aic(ll_mle.unwrap_or_default(), &meta),
            Criterion::Bic => criteria::bic(ll_mle.unwrap_or_default(), &meta),
            Criterion::Tic => {
                let fit = mle.as_ref().map(|f| &f.params).unwrap_or(&vb_mean);
                let sw = build_sandwich(kind, fit, data)?;
                criteria::tic(ll_mle.unwrap_or_default(), &sw, &meta)?
            }
        };
        reports.push(r);
    }
    Ok(Assessment {
        meta,
        posterior,
        vb_mean,
        loglik_at_vb_mean: ll_vb,
        sandwich,
        mle,
        loglik_at_mle: ll_mle,
        reports,
    })
}
