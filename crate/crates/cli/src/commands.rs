//! The `fit`, `compare` and `simulate` commands. Each returns the rendered
//! report and the exit status; writing is left to the caller.

use serde_json::json;
use vbcomp_core::criteria::compare_models;
use vbcomp_core::sim::ExperimentConfig;
use vbcomp_core::vb::fit_vb;
use vbcomp_core::ModelKind;

use crate::config::RunConfig;
use crate::error::{exit, CliError, Result};
use crate::report::{self, render_tables, CompareReport, FitReport, Format};
use crate::runner::{assess_all, run_experiment_parallel};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub exit: u8,
}

fn settings(run: &RunConfig) -> serde_json::Value {
    json!({
        "model": run.model.name(),
        "data": run.data.as_ref().map(|p| p.display().to_string()),
        "response": run.response,
        "intercept": run.intercept,
        "prior_scale": report::num(run.prior.scale),
        "a": report::num(run.prior.a),
        "b": report::num(run.prior.b),
        "seed": run.seed,
        "workers": run.workers,
    })
}

fn render(command: &str, run: &RunConfig, key: &str, tables: Vec<report::Table>, body: serde_json::Value) -> String {
    match run.format {
        Format::Json => report::to_json(report::meta(command, settings(run)), key, body),
        f => render_tables(&tables, f),
    }
}

pub fn cmd_fit(run: &RunConfig) -> Result<Outcome> {
    if run.candidates.len() != 1 {
        return Err(CliError::Usage("fit takes a single --features list".into()));
    }
    let spec = run.resolve_candidates()?.remove(0);
    let posterior = fit_vb(&spec.data, &spec.prior, &run.cavi_options(spec.kind))?;
    let fit = FitReport {
        model_id: spec.model_id,
        names: spec.feature_columns,
        n: spec.data.n(),
        posterior,
    };
    Ok(Outcome {
        output: render("fit", run, "posterior", fit.tables(), fit.json()),
        exit: exit::SUCCESS,
    })
}

pub fn cmd_compare(run: &RunConfig) -> Result<Outcome> {
    let specs = run.resolve_candidates()?;
    let criteria = run.compare_criteria();
    let results = assess_all(&specs, &criteria, run)?;

    let mut out = CompareReport {
        criteria: criteria.clone(),
        ..CompareReport::default()
    };
    let mut first_error = None;
    for (spec, res) in specs.iter().zip(results) {
        match res {
            Ok(a) => out.rows.extend(a.reports),
            Err(e) => {
                out.failed.push((spec.model_id.clone(), e.to_string()));
                first_error.get_or_insert(e);
            }
        }
    }
    if out.rows.is_empty() {
        if let Some(e) = first_error {
            return Err(e.into());
        }
    }
    let cmp = compare_models(&out.rows)?;
    out.winners = cmp
        .winners
        .iter()
        .map(|(c, m)| (*c, m.model_id.clone()))
        .collect();
    let code = if out.failed.is_empty() { exit::SUCCESS } else { exit::PARTIAL };
    Ok(Outcome {
        output: render("compare", run, "reports", out.tables(), out.json()),
        exit: code,
    })
}

pub fn cmd_simulate(run: &RunConfig) -> Result<Outcome> {
    let cfg = match run.model {
        ModelKind::LinearGaussian => ExperimentConfig::polynomial(run.n, run.reps, run.seed, run.rule),
        ModelKind::Probit => ExperimentConfig::probit(run.n, run.reps, run.seed),
    }
    .with_criteria(run.simulate_criteria());
    let res = run_experiment_parallel(&cfg, run.workers)?;
    let mut s = settings(run);
    s["n"] = json!(run.n);
    s["reps"] = json!(run.reps);
    s["criteria"] = json!(cfg.criteria().iter().map(|c| c.label()).collect::<Vec<_>>());
    let output = match run.format {
        Format::Json => report::to_json(report::meta("simulate", s), "experiment", report::experiment_json(&res)),
        f => render_tables(&report::experiment_tables(&res), f),
    };
    Ok(Outcome {
        output,
        exit: exit::SUCCESS,
    })
}
