//! Monte Carlo model-selection experiments: data-generating processes,
//! candidate families and the replication runner.

pub mod candidates;
pub mod dgp;
pub mod experiment;
pub mod risk;

pub use self::candidates::{
    candidate_poly_models, candidate_probit_models, poly_design, OrderRule, ProbitCandidate,
};
pub use self::dgp::{gen_poly_data, gen_probit_data, poly_mean, PROBIT_BETA};
pub use self::experiment::{
    assemble, run_experiment, run_replication, ExperimentConfig, ExperimentResult, FailureRecord,
    PolyExperimentConfig, ProbitExperimentConfig, ReplicationRecord,
};
pub use self::risk::{estimate_risk, RiskEstimate, RiskLabel};
