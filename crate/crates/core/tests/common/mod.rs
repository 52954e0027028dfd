#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use vbcomp_core::{Dataset, LinearParams, ModelKind, Params, ProbitParams};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Intercept plus `p − 1` standard normal covariates.
pub fn design(rng: &mut ChaCha8Rng, n: usize, p: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, p, |_, j| if j == 0 { 1.0 } else { normal(rng) })
}

/// Correctly specified Gaussian linear data.
pub fn linear_data(seed: u64, n: usize, beta: &[f64], sigma: f64) -> Dataset {
    let mut r = rng(seed);
    let x = design(&mut r, n, beta.len());
    let b = DVector::from_column_slice(beta);
    let y = &x * b + DVector::from_fn(n, |_, _| sigma * normal(&mut r));
    Dataset::unnamed(y, x).unwrap()
}

/// Probit data drawn from `beta` with standard normal covariates.
pub fn probit_data(seed: u64, n: usize, beta: &[f64]) -> Dataset {
    let mut r = rng(seed);
    let x = design(&mut r, n, beta.len());
    let eta = &x * DVector::from_column_slice(beta);
    let y = eta.map(|e| if e + normal(&mut r) > 0.0 { 1.0 } else { 0.0 });
    Dataset::unnamed(y, x).unwrap()
}

pub fn params(kind: ModelKind, beta: DVector<f64>, h: f64) -> Params {
    match kind {
        ModelKind::LinearGaussian => Params::Linear(LinearParams { beta, h }),
        ModelKind::Probit => Params::Probit(ProbitParams { beta }),
    }
}

/// Central-difference Jacobian of `f` at `theta`.
pub fn fd_jacobian<F>(theta: &DVector<f64>, f: F) -> DMatrix<f64>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let base = f(theta);
    let mut jac = DMatrix::zeros(base.len(), theta.len());
    for j in 0..theta.len() {
        let step = 1e-5 * (1.0 + theta[j].abs());
        let mut up = theta.clone();
        let mut dn = theta.clone();
        up[j] += step;
        dn[j] -= step;
        let col = (f(&up) - f(&dn)) / (2.0 * step);
        jac.set_column(j, &col);
    }
    jac
}

pub fn rel_err(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax() / a.amax().max(b.amax()).max(1.0)
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// A random model, parameter point and dataset with `n ≤ 50`.
pub fn random_instance(seed: u64) -> (ModelKind, Params, Dataset) {
    let mut r = rng(seed);
    let kind = if r.random::<bool>() {
        ModelKind::LinearGaussian
    } else {
        ModelKind::Probit
    };
    let n = r.random_range(2..=50);
    let p = r.random_range(1..=4);
    let x = DMatrix::from_fn(n, p, |_, _| normal(&mut r));
    let beta = DVector::from_fn(p, |_, _| normal(&mut r));
    let y = match kind {
        ModelKind::LinearGaussian => DVector::from_fn(n, |_, _| 2.0 * normal(&mut r)),
        ModelKind::Probit => DVector::from_fn(n, |_, _| if r.random::<bool>() { 1.0 } else { 0.0 }),
    };
    let h = r.random_range(0.2..5.0);
    (kind, params(kind, beta, h), Dataset::unnamed(y, x).unwrap())
}

/// Analytic vs finite-difference relative errors `(score, hessian)`.
pub fn derivative_errors(kind: ModelKind, theta: &Params, data: &Dataset) -> (f64, f64) {
    let v = theta.to_vector();
    let ll = |t: &DVector<f64>| {
        let p = Params::from_vector(kind, t).unwrap();
        DVector::from_element(1, kind.loglik(&p, data).unwrap())
    };
    let score = |t: &DVector<f64>| {
        let p = Params::from_vector(kind, t).unwrap();
        kind.score_sum(&p, data).unwrap()
    };
    let g = kind.score_sum(theta, data).unwrap();
    let g_fd = fd_jacobian(&v, ll).transpose();
    let h = kind.hessian_sum(theta, data).unwrap();
    let h_fd = fd_jacobian(&v, score);
    (
        rel_err(&DMatrix::from_column_slice(g.len(), 1, g.as_slice()), &g_fd),
        rel_err(&h, &h_fd),
    )
}
