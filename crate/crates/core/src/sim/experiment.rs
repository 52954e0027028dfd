//! Replication runner. Replication `r` uses seed `base + r`; results are
//! merged by replication index so any execution order gives the same output.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::assess::{assess_candidate, AssessOptions};
use crate::criteria::{argmin, Criterion};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::model::ModelKind;
use crate::vb::{Prior, DEFAULT_PRIOR_SCALE};

use super::candidates::{candidate_poly_models, candidate_probit_models, OrderRule};
use super::dgp::{gen_poly_data, gen_probit_data, PROBIT_COVARIATE_LAW};
use super::risk::{estimate_risk, RiskEstimate, RiskLabel};

/// Smallest sample size accepted by the experiment configurations.
pub const MIN_N: usize = 50;

/// Criteria computed in every replication since the risk columns need them.
const ALWAYS: [Criterion; 2] = [Criterion::Vpic, Criterion::VdicM];

/// The criteria the simulations report unless told otherwise.
pub const DEFAULT_SIM_CRITERIA: [Criterion; 5] = [
    Criterion::Vpic,
    Criterion::VdicM,
    Criterion::Elbo,
    Criterion::Aic,
    Criterion::Bic,
];

#[derive(Debug, Clone, PartialEq)]
pub struct PolyExperimentConfig {
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub max_order_rule: OrderRule,
    pub criteria: Vec<Criterion>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbitExperimentConfig {
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub criteria: Vec<Criterion>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentConfig {
    Polynomial(PolyExperimentConfig),
    Probit(ProbitExperimentConfig),
}

impl ExperimentConfig {
    pub fn polynomial(n: usize, reps: usize, seed: u64, rule: OrderRule) -> Self {
        ExperimentConfig::Polynomial(PolyExperimentConfig {
            n,
            reps,
            seed,
            max_order_rule: rule,
            criteria: DEFAULT_SIM_CRITERIA.to_vec(),
        })
    }

    pub fn probit(n: usize, reps: usize, seed: u64) -> Self {
        ExperimentConfig::Probit(ProbitExperimentConfig {
            n,
            reps,
            seed,
            criteria: DEFAULT_SIM_CRITERIA.to_vec(),
        })
    }

    pub fn with_criteria(mut self, criteria: Vec<Criterion>) -> Self {
        match &mut self {
            ExperimentConfig::Polynomial(c) => c.criteria = criteria,
            ExperimentConfig::Probit(c) => c.criteria = criteria,
        }
        self
    }

    pub fn n(&self) -> usize {
        match self {
            ExperimentConfig::Polynomial(c) => c.n,
            ExperimentConfig::Probit(c) => c.n,
        }
    }

    pub fn reps(&self) -> usize {
        match self {
            ExperimentConfig::Polynomial(c) => c.reps,
            ExperimentConfig::Probit(c) => c.reps,
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            ExperimentConfig::Polynomial(c) => c.seed,
            ExperimentConfig::Probit(c) => c.seed,
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            ExperimentConfig::Polynomial(_) => ModelKind::LinearGaussian,
            ExperimentConfig::Probit(_) => ModelKind::Probit,
        }
    }

    /// Requested criteria, sorted and deduplicated.
    pub fn criteria(&self) -> Vec<Criterion> {
        let mut c = match self {
            ExperimentConfig::Polynomial(c) => c.criteria.clone(),
            ExperimentConfig::Probit(c) => c.criteria.clone(),
        };
        c.sort();
        c.dedup();
        c
    }

    /// Requested criteria plus those the risk columns need.
    pub fn computed_criteria(&self) -> Vec<Criterion> {
        let mut c = self.criteria();
        c.extend(ALWAYS);
        c.sort();
        c.dedup();
        c
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps() == 0 {
            return Err(Error::InvalidConfig("reps must be at least 1".into()));
        }
        if self.n() < MIN_N {
            return Err(Error::InvalidConfig(alloc::format!(
                "n must be at least {MIN_N}, got {}",
                self.n()
            )));
        }
        if self.criteria().is_empty() {
            return Err(Error::InvalidConfig("no criteria requested".into()));
        }
        Ok(())
    }

    pub fn candidate_ids(&self) -> Vec<String> {
        match self {
            ExperimentConfig::Polynomial(c) => (1..=c.max_order_rule.max_order(c.n))
                .map(|k| alloc::format!("k={k}"))
                .collect(),
            ExperimentConfig::Probit(_) => {
                candidate_probit_models().into_iter().map(|m| m.id).collect()
            }
        }
    }

    pub fn covariate_law(&self) -> Option<&'static str> {
        match self {
            ExperimentConfig::Polynomial(_) => None,
            ExperimentConfig::Probit(_) => Some(PROBIT_COVARIATE_LAW),
        }
    }

    pub fn rep_seed(&self, rep: usize) -> u64 {
        self.seed().wrapping_add(rep as u64)
    }

    fn candidates(&self, seed: u64) -> Result<Vec<Dataset>> {
        match self {
            ExperimentConfig::Polynomial(c) => {
                candidate_poly_models(&gen_poly_data(c.n, seed)?, c.max_order_rule)
            }
            ExperimentConfig::Probit(c) => {
                let full = gen_probit_data(c.n, seed)?;
                candidate_probit_models()
                    .iter()
                    .map(|m| full.select_columns(&m.columns))
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationRecord {
    pub rep: usize,
    pub seed: u64,
    /// Criterion → value for every candidate, `None` where the candidate failed.
    pub values: BTreeMap<Criterion, Vec<Option<f64>>>,
    /// Criterion → selected candidate, 1-based.
    pub selected: BTreeMap<Criterion, usize>,
    /// 1-based indices of candidates that could not be evaluated.
    pub failed_candidates: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FailureRecord {
    pub rep: usize,
    pub seed: u64,
    pub error: Error,
}

/// Generates the data of replication `rep`, evaluates every candidate and
/// records the argmin of each criterion.
pub fn run_replication(config: &ExperimentConfig, rep: usize) -> Result<ReplicationRecord> {
    let seed = config.rep_seed(rep);
    let criteria = config.computed_criteria();
    let candidates = config.candidates(seed)?;
    let mut values: BTreeMap<Criterion, Vec<Option<f64>>> = criteria
        .iter()
        .map(|c| (*c, Vec::with_capacity(candidates.len())))
        .collect();
    let mut failed_candidates = Vec::new();
    for (i, data) in candidates.iter().enumerate() {
        let prior = Prior::isotropic(config.kind(), data.p(), DEFAULT_PRIOR_SCALE, 1.0, 1.0)?;
        let mut opts = AssessOptions::for_prior(&prior);
        opts.seed = seed;
        match assess_candidate(data, &prior, &criteria, "", i, &opts) {
            Ok(a) => {
                for r in a.reports {
                    values.get_mut(&r.criterion).unwrap().push(Some(r.value));
                }
            }
            Err(_) => {
                failed_candidates.push(i + 1);
                values.values_mut().for_each(|v| v.push(None));
            }
        }
    }
    let mut selected = BTreeMap::new();
    for (c, v) in &values {
        let k = argmin(v.iter().map(|x| x.unwrap_or(f64::NAN)))
            .ok_or(Error::EmptyInput("successful candidates"))?;
        selected.insert(*c, k + 1);
    }
    Ok(ReplicationRecord {
        rep,
        seed,
        values,
        selected,
        failed_candidates,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub candidates: Vec<String>,
    /// Successful replications in index order.
    pub per_rep: Vec<ReplicationRecord>,
    pub failures: Vec<FailureRecord>,
    /// Total candidate fits excluded across successful replications.
    pub candidate_failures: usize,
    /// Criterion → selection count per candidate.
    pub freq: BTreeMap<Criterion, Vec<usize>>,
    /// Criterion → mean selected index (1-based).
    pub avg_k: BTreeMap<Criterion, f64>,
    pub risks: BTreeMap<RiskLabel, RiskEstimate>,
    pub covariate_law: Option<&'static str>,
}

/// Merges replication outcomes (in any order) into the summary tables.
pub fn assemble(
    config: &ExperimentConfig,
    outcomes: Vec<(usize, Result<ReplicationRecord>)>,
) -> Result<ExperimentResult> {
    let mut outcomes = outcomes;
    outcomes.sort_by_key(|(rep, _)| *rep);
    let mut per_rep = Vec::new();
    let mut failures = Vec::new();
    for (rep, out) in outcomes {
        match out {
            Ok(r) => per_rep.push(r),
            Err(error) => failures.push(FailureRecord {
                rep,
                seed: config.rep_seed(rep),
                error,
            }),
        }
    }
    let reps = config.reps();
    if failures.len() * 100 > reps || per_rep.is_empty() {
        return Err(Error::TooManyFailures {
            failed: failures.len(),
            reps,
        });
    }

    let candidates = config.candidate_ids();
    let mut freq = BTreeMap::new();
    let mut avg_k = BTreeMap::new();
    for c in config.criteria() {
        let mut hist = alloc::vec![0usize; candidates.len()];
        let mut total = 0usize;
        for r in &per_rep {
            let k = r.selected[&c];
            hist[k - 1] += 1;
            total += k;
        }
        avg_k.insert(c, total as f64 / per_rep.len() as f64);
        freq.insert(c, hist);
    }
    let computed = config.computed_criteria();
    let mut risks = BTreeMap::new();
    for label in RiskLabel::ALL {
        let (a, b) = label.parts();
        if computed.contains(&a) && computed.contains(&b) {
            risks.insert(label, estimate_risk(&per_rep, label)?);
        }
    }
    Ok(ExperimentResult {
        candidate_failures: per_rep.iter().map(|r| r.failed_candidates.len()).sum(),
        config: config.clone(),
        candidates,
        per_rep,
        failures,
        freq,
        avg_k,
        risks,
        covariate_law: config.covariate_law(),
    })
}

/// Runs every replication in order on the current thread.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let outcomes = (0..config.reps())
        .map(|r| (r, run_replication(config, r)))
        .collect();
    assemble(config, outcomes)
}
