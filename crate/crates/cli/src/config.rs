//! Settings merged from flags, an optional TOML file and defaults.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use vbcomp_core::assess::AssessOptions;
use vbcomp_core::criteria::DEFAULT_DIC_DRAWS;
use vbcomp_core::sim::experiment::DEFAULT_SIM_CRITERIA;
use vbcomp_core::sim::OrderRule;
use vbcomp_core::vb::{CaviOptions, Prior, DEFAULT_PRIOR_SCALE};
use vbcomp_core::{Criterion, Dataset, MleOptions, ModelKind};

use crate::cli::{Flags, ModelArg, RuleArg};
use crate::csv_io::load_csv;
use crate::error::{CliError, Result};
use crate::report::Format;

pub const WORKERS_ENV: &str = "VBCOMP_WORKERS";

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub model: Option<ModelArg>,
    pub data: Option<PathBuf>,
    pub response: Option<String>,
    pub features: Option<Vec<String>>,
    pub candidates: Option<Vec<FileCandidate>>,
    pub intercept: Option<bool>,
    pub prior_scale: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub n: Option<usize>,
    pub reps: Option<usize>,
    pub seed: Option<u64>,
    pub criteria: Option<Vec<String>>,
    pub rule: Option<RuleArg>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub dic_draws: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileCandidate {
    pub id: Option<String>,
    #[serde(default)]
    pub features: Vec<String>,
    pub model: Option<ModelArg>,
}

impl FileConfig {
    /// Parses `path`; relative paths inside are resolved against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg: FileConfig = toml::from_str(&text).map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.data, &mut cfg.out].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}

/// One model to fit: which columns, which likelihood, which prior scale.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateDef {
    pub model_id: String,
    pub kind: ModelKind,
    /// Empty selects every non-response column.
    pub features: Vec<String>,
}

/// A candidate resolved against its dataset.
#[derive(Debug, Clone)]
pub struct CandidateSpec {
    pub model_id: String,
    pub kind: ModelKind,
    pub feature_columns: Vec<String>,
    pub response_column: String,
    pub prior: Prior,
    pub data: Dataset,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorSettings {
    pub scale: f64,
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: ModelKind,
    pub data: Option<PathBuf>,
    pub response: Option<String>,
    pub candidates: Vec<CandidateDef>,
    pub intercept: bool,
    pub prior: PriorSettings,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub rule: OrderRule,
    /// Empty means the command's default set.
    pub criteria: Vec<Criterion>,
    pub workers: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub dic_draws: usize,
}

fn kind_of(m: ModelArg) -> ModelKind {
    match m {
        ModelArg::Linear => ModelKind::LinearGaussian,
        ModelArg::Probit => ModelKind::Probit,
    }
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',')
        .map(str::trim)
        .filter(|c| !c.is_empty())
        .map(str::to_owned)
        .collect()
}

pub fn parse_criteria(names: &[String]) -> Result<Vec<Criterion>> {
    let mut out = Vec::new();
    for name in names.iter().flat_map(|s| split_list(s)) {
        let c: Criterion = name
            .parse()
            .map_err(|_| CliError::Usage(format!("unknown criterion `{name}`")))?;
        if !out.contains(&c) {
            out.push(c);
        }
    }
    Ok(out)
}

fn env_workers() -> Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("{WORKERS_ENV}=`{v}` is not a worker count"))),
        _ => Ok(None),
    }
}

impl RunConfig {
    /// Flags win over the file; the file wins over defaults.
    pub fn from_flags(flags: &Flags) -> Result<Self> {
        let file = match &flags.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let model = kind_of(flags.model.or(file.model).unwrap_or(ModelArg::Linear));

        let candidates = if !flags.features.is_empty() {
            flags
                .features
                .iter()
                .enumerate()
                .map(|(i, f)| CandidateDef {
                    model_id: format!("M{}", i + 1),
                    kind: model,
                    features: split_list(f),
                })
                .collect()
        } else if let Some(cands) = &file.candidates {
            cands
                .iter()
                .enumerate()
                .map(|(i, c)| CandidateDef {
                    model_id: c.id.clone().unwrap_or_else(|| format!("M{}", i + 1)),
                    kind: c.model.map(kind_of).unwrap_or(model),
                    features: c.features.clone(),
                })
                .collect()
        } else {
            vec![CandidateDef {
                model_id: "M1".into(),
                kind: model,
                features: file.features.clone().unwrap_or_default(),
            }]
        };

        let criteria = if flags.criteria.is_empty() {
            parse_criteria(&file.criteria.clone().unwrap_or_default())?
        } else {
            parse_criteria(&flags.criteria)?
        };

        let workers = match flags.workers.or(file.workers) {
            Some(w) => w,
            None => env_workers()?.unwrap_or_else(|| {
                std::thread::available_parallelism().map_or(1, |n| n.get())
            }),
        };
        if workers == 0 {
            return Err(CliError::Usage("worker count must be at least 1".into()));
        }

        let cfg = RunConfig {
            model,
            data: flags.data.clone().or(file.data),
            response: flags.response.clone().or(file.response),
            candidates,
            intercept: !flags.no_intercept && file.intercept.unwrap_or(true),
            prior: PriorSettings {
                scale: flags.prior_scale.or(file.prior_scale).unwrap_or(DEFAULT_PRIOR_SCALE),
                a: flags.a.or(file.a).unwrap_or(1.0),
                b: flags.b.or(file.b).unwrap_or(1.0),
            },
            n: flags.n.or(file.n).unwrap_or(500),
            reps: flags.reps.or(file.reps).unwrap_or(100),
            seed: flags.seed.or(file.seed).unwrap_or(1),
            rule: match flags.rule.or(file.rule) {
                Some(RuleArg::Ln34) => OrderRule::FloorLnN34,
                _ => OrderRule::FloorLnN,
            },
            criteria,
            workers,
            out: flags.out.clone().or(file.out),
            format: flags.format.or(file.format).unwrap_or_default(),
            tol: file.tol,
            max_iter: file.max_iter,
            dic_draws: file.dic_draws.unwrap_or(DEFAULT_DIC_DRAWS),
        };
        cfg.check_paths()?;
        Ok(cfg)
    }

    fn check_paths(&self) -> Result<()> {
        if let Some(d) = &self.data {
            if !d.is_file() {
                return Err(CliError::Usage(format!("data file {} does not exist", d.display())));
            }
        }
        if let Some(parent) = self.out.as_ref().and_then(|o| o.parent()) {
            if !parent.as_os_str().is_empty() && !parent.is_dir() {
                return Err(CliError::Usage(format!(
                    "output directory {} does not exist",
                    parent.display()
                )));
            }
        }
        for v in [self.prior.scale, self.prior.a, self.prior.b] {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::Usage(format!("prior settings must be positive, got {v}")));
            }
        }
        Ok(())
    }

    pub fn require_data(&self) -> Result<(&Path, &str)> {
        let data = self
            .data
            .as_deref()
            .ok_or_else(|| CliError::Usage("--data is required".into()))?;
        let response = self
            .response
            .as_deref()
            .ok_or_else(|| CliError::Usage("--response is required".into()))?;
        Ok((data, response))
    }

    /// Loads each candidate's columns and builds its prior.
    pub fn resolve_candidates(&self) -> Result<Vec<CandidateSpec>> {
        let (path, response) = self.require_data()?;
        self.candidates
            .iter()
            .map(|c| {
                let data = load_csv(path, response, &c.features, self.intercept)?;
                if c.kind == ModelKind::Probit {
                    data.ensure_binary()?;
                }
                let prior = Prior::isotropic(c.kind, data.p(), self.prior.scale, self.prior.a, self.prior.b)?;
                Ok(CandidateSpec {
                    model_id: c.model_id.clone(),
                    kind: c.kind,
                    feature_columns: data.names().to_vec(),
                    response_column: response.to_owned(),
                    prior,
                    data,
                })
            })
            .collect()
    }

    pub fn cavi_options(&self, kind: ModelKind) -> CaviOptions {
        let mut o = CaviOptions::for_kind(kind);
        if let Some(t) = self.tol {
            o.tol = t;
        }
        if let Some(m) = self.max_iter {
            o.max_iter = m;
        }
        o
    }

    pub fn assess_options(&self, kind: ModelKind) -> AssessOptions {
        AssessOptions {
            cavi: self.cavi_options(kind),
            mle: MleOptions::default(),
            dic_draws: self.dic_draws,
            seed: self.seed,
        }
    }

    pub fn compare_criteria(&self) -> Vec<Criterion> {
        if self.criteria.is_empty() {
            Criterion::ALL.to_vec()
        } else {
            self.criteria.clone()
        }
    }

    pub fn simulate_criteria(&self) -> Vec<Criterion> {
        if self.criteria.is_empty() {
            DEFAULT_SIM_CRITERIA.to_vec()
        } else {
            self.criteria.clone()
        }
    }
}
