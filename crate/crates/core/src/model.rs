//! Log-likelihood, per-observation scores, summed Hessians and maximum
//! likelihood fits for the Gaussian linear and probit regression models.
//!
//! Linear parameters are ordered `θ = (β₁..β_p, h)` with `h = 1/σ²`; probit
//! parameters are just `β`.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{symmetrize, Factor};
use crate::special::{inv_mills, log_norm_cdf, LN_2PI};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    LinearGaussian,
    Probit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearParams {
    pub beta: DVector<f64>,
    /// Error precision `1/σ²`.
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbitParams {
    pub beta: DVector<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    Linear(LinearParams),
    Probit(ProbitParams),
}

impl Params {
    pub fn kind(&self) -> ModelKind {
        match self {
            Params::Linear(_) => ModelKind::LinearGaussian,
            Params::Probit(_) => ModelKind::Probit,
        }
    }

    pub fn beta(&self) -> &DVector<f64> {
        match self {
            Params::Linear(p) => &p.beta,
            Params::Probit(p) => &p.beta,
        }
    }

    pub fn dim(&self) -> usize {
        self.kind().dim(self.beta().len())
    }

    /// Flat parameter vector in the order used by scores and Hessians.
    pub fn to_vector(&self) -> DVector<f64> {
        match self {
            Params::Linear(p) => {
                let k = p.beta.len();
                DVector::from_fn(k + 1, |i, _| if i < k { p.beta[i] } else { p.h })
            }
            Params::Probit(p) => p.beta.clone(),
        }
    }

    pub fn from_vector(kind: ModelKind, theta: &DVector<f64>) -> Result<Self> {
        match kind {
            ModelKind::LinearGaussian => {
                if theta.len() < 2 {
                    return Err(Error::DimensionMismatch {
                        context: "linear parameter vector",
                        expected: 2,
                        found: theta.len(),
                    });
                }
                let k = theta.len() - 1;
                Ok(Params::Linear(LinearParams {
                    beta: theta.rows(0, k).into_owned(),
                    h: theta[k],
                }))
            }
            ModelKind::Probit => {
                if theta.is_empty() {
                    return Err(Error::EmptyInput("probit parameter vector"));
                }
                Ok(Params::Probit(ProbitParams {
                    beta: theta.clone(),
                }))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleOptions {
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self {
            max_iter: 100,
            tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MleFit {
    pub params: Params,
    pub iterations: usize,
    /// `‖∑ₜ sₜ(θ̂)‖∞` at the returned point.
    pub score_norm: f64,
}

/// Maximum number of step halvings per Newton iteration.
const MAX_HALVINGS: usize = 30;

impl ModelKind {
    /// Parameter dimension for `p` regressors.
    pub fn dim(self, p: usize) -> usize {
        match self {
            ModelKind::LinearGaussian => p + 1,
            ModelKind::Probit => p,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::LinearGaussian => "linear",
            ModelKind::Probit => "probit",
        }
    }

    fn check(self, params: &Params, data: &Dataset) -> Result<()> {
        if params.kind() != self {
            return Err(Error::InvalidConfig(alloc::format!(
                "{} parameters passed to the {} model",
                params.kind().name(),
                self.name()
            )));
        }
        if params.beta().len() != data.p() {
            return Err(Error::DimensionMismatch {
                context: "coefficient vector",
                expected: data.p(),
                found: params.beta().len(),
            });
        }
        match params {
            Params::Linear(p) => {
                if !(p.h > 0.0) || p.h.is_nan() {
                    return Err(Error::NonPositivePrecision(p.h));
                }
            }
            Params::Probit(_) => data.ensure_binary()?,
        }
        Ok(())
    }

    /// `∑ₜ lₜ(θ)`.
    pub fn loglik(self, params: &Params, data: &Dataset) -> Result<f64> {
        self.check(params, data)?;
        let eta = data.x() * params.beta();
        let y = data.y();
        Ok(match params {
            Params::Linear(p) => {
                let rss: f64 = y.iter().zip(eta.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
                let n = data.n() as f64;
                0.5 * n * (libm::log(p.h) - LN_2PI) - 0.5 * p.h * rss
            }
            Params::Probit(_) => y
                .iter()
                .zip(eta.iter())
                .map(|(&yt, &e)| log_norm_cdf(sign(yt) * e))
                .sum(),
        })
    }

    /// `lₜ(θ)` for a single observation.
    pub fn loglik_obs(self, params: &Params, data: &Dataset, t: usize) -> Result<f64> {
        self.check(params, data)?;
        check_index(t, data.n())?;
        let eta = data.x().row(t).dot(&params.beta().transpose());
        let yt = data.y()[t];
        Ok(match params {
            Params::Linear(p) => {
                let e = yt - eta;
                0.5 * (libm::log(p.h) - LN_2PI) - 0.5 * p.h * e * e
            }
            Params::Probit(_) => log_norm_cdf(sign(yt) * eta),
        })
    }

    /// `sₜ(θ) = ∂lₜ/∂θ` for observation `t` (zero based).
    pub fn score_obs(self, params: &Params, data: &Dataset, t: usize) -> Result<DVector<f64>> {
        self.check(params, data)?;
        check_index(t, data.n())?;
        let mut out = DVector::zeros(params.dim());
        write_score_row(params, data, t, out.as_mut_slice());
        Ok(out)
    }

    /// All per-observation scores as the rows of an `n × d` matrix.
    pub fn score_matrix(self, params: &Params, data: &Dataset) -> Result<DMatrix<f64>> {
        self.check(params, data)?;
        let d = params.dim();
        let mut rows = DMatrix::zeros(d, data.n());
        let mut buf = Vec::from_iter(core::iter::repeat(0.0).take(d));
        for t in 0..data.n() {
            write_score_row(params, data, t, &mut buf);
            rows.column_mut(t).copy_from_slice(&buf);
        }
        Ok(rows.transpose())
    }

    /// `∑ₜ sₜ(θ)`.
    pub fn score_sum(self, params: &Params, data: &Dataset) -> Result<DVector<f64>> {
        self.check(params, data)?;
        let beta = params.beta();
        let eta = data.x() * beta;
        Ok(match params {
            Params::Linear(p) => {
                let resid = data.y() - &eta;
                let g_beta = data.x().tr_mul(&resid) * p.h;
                let rss = resid.norm_squared();
                let n = data.n() as f64;
                let k = beta.len();
                DVector::from_fn(k + 1, |i, _| {
                    if i < k {
                        g_beta[i]
                    } else {
                        0.5 * n / p.h - 0.5 * rss
                    }
                })
            }
            Params::Probit(_) => {
                let lambda = DVector::from_iterator(
                    data.n(),
                    data.y().iter().zip(eta.iter()).map(|(&yt, &e)| {
                        let s = sign(yt);
                        s * inv_mills(s * e)
                    }),
                );
                data.x().tr_mul(&lambda)
            }
        })
    }

    /// `∑ₜ hₜ(θ)`, symmetrized.
    pub fn hessian_sum(self, params: &Params, data: &Dataset) -> Result<DMatrix<f64>> {
        self.check(params, data)?;
        let x = data.x();
        let beta = params.beta();
        let eta = x * beta;
        let mut h = match params {
            Params::Linear(p) => {
                let k = beta.len();
                let n = data.n() as f64;
                let resid = data.y() - &eta;
                let xtx = x.tr_mul(x);
                let xte = x.tr_mul(&resid);
                let mut h = DMatrix::zeros(k + 1, k + 1);
                h.view_mut((0, 0), (k, k)).copy_from(&(xtx * -p.h));
                for i in 0..k {
                    h[(i, k)] = xte[i];
                    h[(k, i)] = xte[i];
                }
                h[(k, k)] = -0.5 * n / (p.h * p.h);
                h
            }
            Params::Probit(_) => {
                let mut weighted = x.clone();
                for (t, (&yt, &e)) in data.y().iter().zip(eta.iter()).enumerate() {
                    let u = sign(yt) * e;
                    let g = inv_mills(u);
                    let w = -g * (u + g);
                    weighted.row_mut(t).scale_mut(w);
                }
                x.tr_mul(&weighted)
            }
        };
        symmetrize(&mut h);
        Ok(h)
    }

    /// Quasi-maximum likelihood fit: closed form for the linear model,
    /// damped Newton-Raphson for probit.
    pub fn fit_mle(self, data: &Dataset, opts: &MleOptions) -> Result<MleFit> {
        match self {
            ModelKind::LinearGaussian => fit_linear(data),
            ModelKind::Probit => fit_probit(data, opts),
        }
    }
}

#[inline]
fn sign(y: f64) -> f64 {
    if y > 0.5 {
        1.0
    } else {
        -1.0
    }
}

fn check_index(t: usize, n: usize) -> Result<()> {
    if t >= n {
        Err(Error::IndexOutOfRange { index: t, n })
    } else {
        Ok(())
    }
}

fn write_score_row(params: &Params, data: &Dataset, t: usize, out: &mut [f64]) {
    let row = data.x().row(t);
    let eta = row.dot(&params.beta().transpose());
    let yt = data.y()[t];
    match params {
        Params::Linear(p) => {
            let e = yt - eta;
            let k = row.len();
            for j in 0..k {
                out[j] = p.h * e * row[j];
            }
            out[k] = 0.5 / p.h - 0.5 * e * e;
        }
        Params::Probit(_) => {
            let s = sign(yt);
            let lambda = s * inv_mills(s * eta);
            for j in 0..row.len() {
                out[j] = lambda * row[j];
            }
        }
    }
}

fn fit_linear(data: &Dataset) -> Result<MleFit> {
    let x = data.x();
    let (n, k) = (data.n(), data.p());
    if n < k {
        return Err(Error::RankDeficient);
    }
    let qr = x.clone().qr();
    let r = qr.r();
    let max = r.diagonal().iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let min = r.diagonal().iter().fold(f64::INFINITY, |acc, v| acc.min(v.abs()));
    if !(min > max * 10.0 * k as f64 * f64::EPSILON) {
        return Err(Error::RankDeficient);
    }
    let mut qty = data.y().clone();
    qr.q_tr_mul(&mut qty);
    let beta = r
        .solve_upper_triangular(&qty.rows(0, k).into_owned())
        .ok_or(Error::RankDeficient)?;
    let rss = (data.y() - x * &beta).norm_squared();
    let params = Params::Linear(LinearParams {
        beta,
        h: n as f64 / rss,
    });
    let score_norm = if rss > 0.0 {
        ModelKind::LinearGaussian.score_sum(&params, data)?.amax()
    } else {
        0.0
    };
    Ok(MleFit {
        params,
        iterations: 0,
        score_norm,
    })
}

fn fit_probit(data: &Dataset, opts: &MleOptions) -> Result<MleFit> {
    data.ensure_binary()?;
    let kind = ModelKind::Probit;
    let threshold = opts.tol * data.n() as f64;
    let mut params = Params::Probit(ProbitParams {
        beta: DVector::zeros(data.p()),
    });
    let mut ll = kind.loglik(&params, data)?;
    // Under separation the score vanishes as ‖β‖ grows while Newton steps
    // stay large, so both must be small.
    let step_tol = libm::sqrt(opts.tol);
    for iter in 0..=opts.max_iter {
        let grad = kind.score_sum(&params, data)?;
        let score_norm = grad.amax();
        let neg_h = -kind.hessian_sum(&params, data)?;
        let step = match Factor::new(&neg_h, "probit Hessian") {
            Ok(f) => f.solve_vec(&grad),
            Err(_) if score_norm <= threshold => break,
            Err(_) => return Err(Error::RankDeficient),
        };
        if score_norm <= threshold && step.amax() <= step_tol * (1.0 + params.beta().amax()) {
            return Ok(MleFit {
                params,
                iterations: iter,
                score_norm,
            });
        }
        if iter == opts.max_iter {
            break;
        }
        if step.iter().any(|v| !v.is_finite()) {
            break;
        }
        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let cand = Params::Probit(ProbitParams {
                beta: params.beta() + &step * scale,
            });
            let cand_ll = kind.loglik(&cand, data)?;
            // Allow for rounding in the summed log-likelihood near the optimum.
            if cand_ll.is_finite() && cand_ll >= ll - 1e-12 * (1.0 + ll.abs()) {
                accepted = Some((cand, cand_ll));
                break;
            }
            scale *= 0.5;
        }
        match accepted {
            Some((cand, cand_ll)) => {
                params = cand;
                ll = cand_ll;
            }
            None => break,
        }
    }
    Err(Error::NoConvergence {
        context: "probit Newton-Raphson",
        iterations: opts.max_iter,
        last: params.beta().iter().copied().collect(),
    })
}
