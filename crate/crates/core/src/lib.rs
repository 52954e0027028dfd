//! Mean-field variational Bayes for Gaussian linear and probit regression,
//! together with predictive information criteria that stay valid when the
//! candidate models are misspecified.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, the command
//! line and the parallel experiment runner live in the `vbcomp` crate.

#![no_std]

extern crate alloc;

pub mod assess;
pub mod criteria;
pub mod data;
pub mod error;
pub mod linalg;
pub mod model;
pub mod sandwich;
pub mod sim;
pub mod special;
pub mod vb;

pub use crate::criteria::{Criterion, CriterionReport, ComparisonResult, ModelMeta};
pub use crate::data::Dataset;
pub use crate::error::{Error, Result};
pub use crate::model::{LinearParams, MleFit, MleOptions, ModelKind, Params, ProbitParams};
pub use crate::sandwich::SandwichSet;
