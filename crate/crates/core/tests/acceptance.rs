//! End-to-end acceptance checks. Prints one PASS/FAIL line per check and
//! exits non-zero if any fails.

mod common;

use std::panic;
use std::process::ExitCode;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use vbcomp_core::criteria::{self, vpic_terms, Criterion, ModelMeta};
use vbcomp_core::sandwich::build_sandwich;
use vbcomp_core::sim::{self, ExperimentConfig, OrderRule, RiskLabel};
use vbcomp_core::vb::{self, CaviOptions, LinearPrior, Prior, ProbitPrior, DEFAULT_PRIOR_SCALE};
use vbcomp_core::{Dataset, ModelKind, SandwichSet};

type Check = fn() -> Result<String, String>;

fn ensure(ok: bool, msg: String) -> Result<String, String> {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn derivatives() -> Result<String, String> {
    let (mut worst_g, mut worst_h) = (0.0f64, 0.0f64);
    for seed in 0..100 {
        let (kind, theta, data) = common::random_instance(1_000 + seed);
        let (g, h) = common::derivative_errors(kind, &theta, &data);
        worst_g = worst_g.max(g);
        worst_h = worst_h.max(h);
    }
    ensure(
        worst_g < 1e-6 && worst_h < 1e-5,
        format!("max rel err score {worst_g:.2e}, hessian {worst_h:.2e} over 100 instances"),
    )
}

fn cavi_fixed_points() -> Result<String, String> {
    let (mut worst_v, mut worst_b) = (0.0f64, 0.0f64);
    for seed in 0..20 {
        let n = 20 + 7 * seed as usize;
        let data = common::linear_data(seed, n, &[0.5, -1.0, 2.0], 1.1);
        let prior = LinearPrior::isotropic(3, DEFAULT_PRIOR_SCALE, 1.0, 1.0).unwrap();
        let post = vb::cavi_linear(&data, &prior, &CaviOptions::linear()).map_err(|e| e.to_string())?;
        if post.a_h != n as f64 / 2.0 + 1.0 {
            return Err(format!("a* = {} for n = {n}", post.a_h));
        }
        let (v, b) = vb::linear_updates(&data, &prior, &post).unwrap();
        worst_v = worst_v.max((&v - &post.v_beta).amax() / post.v_beta.amax());
        worst_b = worst_b.max((b - post.b_h).abs() / post.b_h);
    }
    let mut worst_drop = 0.0f64;
    for seed in 0..20 {
        let data = common::probit_data(seed, 400, &[-0.2, 0.3, 0.7]);
        let prior = ProbitPrior::isotropic(3, DEFAULT_PRIOR_SCALE).unwrap();
        let post = vb::cavi_probit(&data, &prior, &CaviOptions::probit()).map_err(|e| e.to_string())?;
        for w in post.elbo_trace.windows(2) {
            worst_drop = worst_drop.max(w[0] - w[1]);
        }
    }
    ensure(
        worst_v <= 1e-10 && worst_b <= 1e-10 && worst_drop <= 1e-8,
        format!("fixed-point rel err V {worst_v:.1e}, b {worst_b:.1e}; largest probit ELBO drop {worst_drop:.1e}"),
    )
}

fn penalty_limits() -> Result<String, String> {
    let mut worst = 0.0f64;
    for seed in 0..200 {
        let mut r = common::rng(seed);
        let d = r.random_range(1..=10);
        let a = DMatrix::from_fn(d, d, |_, _| common::normal(&mut r));
        let neg_h = &a * a.transpose() + DMatrix::identity(d, d) * 0.1;
        let ll = -100.0 * r.random::<f64>();
        let meta = ModelMeta::new("m", 0, d, 1000);
        let sw = SandwichSet::from_parts(neg_h.clone(), -&neg_h, DVector::zeros(d), 1000).unwrap();
        let aic = criteria::aic(ll, &meta).value;
        worst = worst.max((criteria::vdic_m(ll, &sw, &meta).unwrap().value - aic).abs());
        worst = worst.max((criteria::tic(ll, &sw, &meta).unwrap().value - aic).abs());

        let diag = DVector::from_fn(d, |_, _| 0.05 + 5.0 * r.random::<f64>());
        let h = -DMatrix::from_diagonal(&diag);
        let sw = SandwichSet::from_parts(-&h, h.clone(), DVector::zeros(d), 1000).unwrap();
        let two_p = 2.0 * vpic_terms(&sw).unwrap().total();
        worst = worst.max((two_p - d as f64 * (1.0 + std::f64::consts::LN_2)).abs());

        let rank = r.random_range(0..=d);
        let b = DMatrix::from_fn(d, rank, |_, _| common::normal(&mut r));
        let sw = SandwichSet::from_parts(&b * b.transpose(), h, DVector::zeros(d), 1000).unwrap();
        let t = vpic_terms(&sw).unwrap();
        worst = worst.max((t.diag_c - t.cross).abs());
    }
    ensure(worst < 1e-9, format!("largest identity residual {worst:.2e} over 200 draws"))
}

fn calibration() -> Result<String, String> {
    let beta = [1.0, -0.5, 0.25, 2.0];
    let mut traces = Vec::new();
    for seed in 0..20 {
        let data = common::linear_data(500 + seed, 100_000, &beta, 0.8);
        let prior = Prior::isotropic(ModelKind::LinearGaussian, 4, DEFAULT_PRIOR_SCALE, 1.0, 1.0).unwrap();
        let post = vb::fit_vb(&data, &prior, &CaviOptions::linear()).map_err(|e| e.to_string())?;
        let sw = build_sandwich(ModelKind::LinearGaussian, &post.mean(), &data).unwrap();
        traces.push(sw.trace_omega_neg_h_inv().unwrap());
    }
    let med = common::median(traces);
    let d = 5.0;
    ensure((med - d).abs() < 0.05 * d, format!("median tr[Ω(−H)⁻¹] = {med:.4} vs d = {d}"))
}

fn vb_mle_gap(n: usize, seed: u64) -> f64 {
    let raw = sim::gen_poly_data(n, seed).unwrap();
    let data = sim::poly_design(&raw, 4).unwrap();
    let prior = Prior::isotropic(ModelKind::LinearGaussian, 4, DEFAULT_PRIOR_SCALE, 1.0, 1.0).unwrap();
    let post = vb::fit_vb(&data, &prior, &CaviOptions::linear()).unwrap();
    let fit = ModelKind::LinearGaussian.fit_mle(&data, &Default::default()).unwrap();
    (post.mean().to_vector() - fit.params.to_vector()).amax()
}

fn vb_mle_agreement() -> Result<String, String> {
    let small = common::median((0..20).map(|s| vb_mle_gap(1_000, 700 + s)).collect());
    let large = common::median((0..20).map(|s| vb_mle_gap(100_000, 700 + s)).collect());
    ensure(large < small, format!("median gap n=1e3 {small:.3e}, n=1e5 {large:.3e}"))
}

const TABLE1_SEEDS: [u64; 5] = [10_000, 20_000, 30_000, 40_000, 50_000];

fn table1() -> Result<String, String> {
    let cfg = ExperimentConfig::polynomial(500, 200, TABLE1_SEEDS[0], OrderRule::FloorLnN);
    let res = sim::run_experiment(&cfg).map_err(|e| e.to_string())?;
    let targets = [
        (Criterion::Vpic, 4.479),
        (Criterion::VdicM, 4.505),
        (Criterion::Bic, 3.688),
        (Criterion::Elbo, 3.644),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (c, target) in targets {
        let k = res.avg_k[&c];
        ok &= (k - target).abs() <= 0.5;
        parts.push(format!("{c} {k:.3} (target {target})"));
    }
    ensure(ok, parts.join(", "))
}

fn table2() -> Result<String, String> {
    let labels = [
        RiskLabel::Vpic,
        RiskLabel::VdicM,
        RiskLabel::Elbo1,
        RiskLabel::Elbo2,
        RiskLabel::Aic,
        RiskLabel::Bic1,
        RiskLabel::Bic2,
    ];
    let mut wins = 0;
    for seed in TABLE1_SEEDS {
        let cfg = ExperimentConfig::polynomial(500, 200, seed, OrderRule::FloorLnN);
        let res = sim::run_experiment(&cfg).map_err(|e| e.to_string())?;
        let vpic = res.risks[&RiskLabel::Vpic].raw;
        if labels.iter().all(|l| vpic <= res.risks[l].raw) {
            wins += 1;
        }
    }
    ensure(wins >= 4, format!("VPIC risk smallest in {wins}/5 experiments"))
}

fn probit_recovery() -> Result<String, String> {
    let cfg = ExperimentConfig::probit(5_000, 100, 60_000);
    let res = sim::run_experiment(&cfg).map_err(|e| e.to_string())?;
    let mut ok = true;
    let mut parts = Vec::new();
    for (c, hist) in &res.freq {
        let modal = hist.iter().enumerate().max_by_key(|(i, v)| (**v, std::cmp::Reverse(*i))).unwrap().0 + 1;
        ok &= modal == 5;
        parts.push(format!("{c} M{modal} ({}/{})", hist[modal - 1], res.per_rep.len()));
    }
    let vpic = res.risks[&RiskLabel::Vpic].raw;
    let vdic = res.risks[&RiskLabel::VdicM].raw;
    ok &= vpic <= vdic;
    parts.push(format!("risk VPIC {vpic:.3} <= VDIC_M {vdic:.3}"));
    ensure(ok, parts.join(", "))
}

/// Known-variance Gaussian mean: prior `μ ~ N(0, τ²)`, `y ~ N(μ₀, 1)`.
fn conjugate_oracle() -> Result<String, String> {
    let (n, reps, mu0, tau2) = (50usize, 2000u64, 0.7, DEFAULT_PRIOR_SCALE);
    let inner = 20;
    let mut diffs = Vec::with_capacity(reps as usize);
    let mut vpics = Vec::with_capacity(reps as usize);
    let mut risks = Vec::with_capacity(reps as usize);
    for rep in 0..reps {
        let mut r = common::rng(90_000 + rep);
        let y: Vec<f64> = (0..n).map(|_| mu0 + common::normal(&mut r)).collect();
        let v = 1.0 / (n as f64 + 1.0 / tau2);
        let m = v * y.iter().sum::<f64>();
        let ss: f64 = y.iter().map(|yi| (yi - m).powi(2)).sum();
        let loglik = -0.5 * n as f64 * vbcomp_core::special::LN_2PI - 0.5 * ss;
        let sw = SandwichSet::from_parts(
            DMatrix::from_element(1, 1, ss / n as f64),
            DMatrix::from_element(1, 1, -1.0),
            DVector::from_element(1, m),
            n,
        )
        .unwrap();
        let value = criteria::vpic(loglik, &sw, &ModelMeta::new("mean", 0, 1, n)).unwrap().value;

        // −2 ln N(y_rep; m·1, I + v·11′) averaged over fresh replicates.
        let nv = n as f64 * v;
        let mut acc = 0.0;
        for _ in 0..inner {
            let rep_y: Vec<f64> = (0..n).map(|_| mu0 + common::normal(&mut r)).collect();
            let resid: Vec<f64> = rep_y.iter().map(|t| t - m).collect();
            let s1: f64 = resid.iter().sum();
            let s2: f64 = resid.iter().map(|e| e * e).sum();
            let quad = s2 - v * s1 * s1 / (1.0 + nv);
            acc += n as f64 * vbcomp_core::special::LN_2PI + (1.0 + nv).ln() + quad;
        }
        let risk = acc / inner as f64;
        vpics.push(value);
        risks.push(risk);
        diffs.push(value - risk);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let d = mean(&diffs);
    let sd = (diffs.iter().map(|x| (x - d).powi(2)).sum::<f64>() / (diffs.len() - 1) as f64).sqrt();
    let se = sd / (diffs.len() as f64).sqrt();
    ensure(
        d.abs() < 3.0 * se,
        format!(
            "mean VPIC {:.4}, simulated risk {:.4}, difference {d:.4} (3 se = {:.4})",
            mean(&vpics),
            mean(&risks),
            3.0 * se
        ),
    )
}

/// `y = 1 + 2x − 3x² + 4x³ + e` on the polynomial grid, fitted with order 4.
fn elbo_bic_gap(n: usize, seed: u64) -> f64 {
    let mut r = common::rng(seed);
    let x = DVector::from_fn(n, |i, _| 0.7 * i as f64 / n as f64);
    let y = x.map(|t| 1.0 + 2.0 * t - 3.0 * t * t + 4.0 * t * t * t + common::normal(&mut r));
    let raw = Dataset::unnamed(y, DMatrix::from_column_slice(n, 1, x.as_slice())).unwrap();
    let data = sim::poly_design(&raw, 4).unwrap();
    let prior = Prior::isotropic(ModelKind::LinearGaussian, 4, DEFAULT_PRIOR_SCALE, 1.0, 1.0).unwrap();
    let a = vbcomp_core::assess::assess_candidate(
        &data,
        &prior,
        &[Criterion::Elbo, Criterion::Bic],
        "k=4",
        0,
        &vbcomp_core::assess::AssessOptions::for_prior(&prior),
    )
    .unwrap();
    a.report(Criterion::Elbo).unwrap().value - a.report(Criterion::Bic).unwrap().value
}

fn elbo_bic_link() -> Result<String, String> {
    let gaps: Vec<f64> = [1_000, 10_000, 100_000]
        .iter()
        .map(|&n| common::median((0..5).map(|s| elbo_bic_gap(n, 800 + s)).collect()))
        .collect();
    let ok = gaps.windows(2).all(|w| (w[1] - w[0]).abs() < 0.25 * w[0].abs());
    ensure(ok, format!("−2·ELBO − BIC at n = 1e3, 1e4, 1e5: {gaps:.3?}"))
}

fn main() -> ExitCode {
    let checks: [(&str, Check); 10] = [
        ("derivative correctness", derivatives),
        ("CAVI fixed points", cavi_fixed_points),
        ("penalty limits", penalty_limits),
        ("correct-specification calibration", calibration),
        ("VB-MLE agreement", vb_mle_agreement),
        ("polynomial average order", table1),
        ("polynomial risk ordering", table2),
        ("probit recovery", probit_recovery),
        ("conjugate predictive oracle", conjugate_oracle),
        ("ELBO/BIC link", elbo_bic_link),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(check).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] {:>2}. {name} ({secs:.1}s): {detail}", i + 1);
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
