//! Normal-Gamma mean-field CAVI for the Gaussian linear model.
//!
//! Prior `β | h ~ N(μ̃, h⁻¹Ṽ)`, `h ~ Gamma(a, b)` (rate `b`), variational
//! family `q(β) q(h)` with `q(β) = N(μ*, V*)`, `q(h) = Gamma(a*, b*)`.
//!
//! The coordinate updates are
//!
//! ```text
//! μ* = (X'X + Ṽ⁻¹)⁻¹ (Ṽ⁻¹μ̃ + X'y)
//! V* = (X'X + Ṽ⁻¹)⁻¹ b*/a*
//! a* = n/2 + a
//! b* = b + ½y'y − y'Xμ* + ½ tr(X'X (V* + μ*μ*'))
//! ```
//!
//! `μ*` does not depend on `b*`, and after substituting `V*` the `b*`
//! update is affine in `b*` itself, `b* = c₀ + c₁ b*/a*` with
//! `c₁ = ½ tr(X'X (X'X + Ṽ⁻¹)⁻¹)`. The fixed point is taken in closed form;
//! the plain iteration still runs and must agree with it.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{chol_log_det, cholesky, symmetrize};
use crate::special::{digamma, ln_gamma, LN_2PI};
use crate::vb::CaviOptions;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearPrior {
    pub mu_tilde: DVector<f64>,
    pub v_tilde: DMatrix<f64>,
    pub a: f64,
    pub b: f64,
}

impl LinearPrior {
    pub fn new(mu_tilde: DVector<f64>, v_tilde: DMatrix<f64>, a: f64, b: f64) -> Result<Self> {
        let prior = Self {
            mu_tilde,
            v_tilde,
            a,
            b,
        };
        prior.validate()?;
        Ok(prior)
    }

    /// `μ̃ = 0`, `Ṽ = scale · I`.
    pub fn isotropic(p: usize, scale: f64, a: f64, b: f64) -> Result<Self> {
        Self::new(
            DVector::zeros(p),
            DMatrix::identity(p, p) * scale,
            a,
            b,
        )
    }

    pub fn dim(&self) -> usize {
        self.mu_tilde.len()
    }

    fn validate(&self) -> Result<()> {
        let p = self.mu_tilde.len();
        if self.v_tilde.nrows() != p || self.v_tilde.ncols() != p {
            return Err(Error::DimensionMismatch {
                context: "prior covariance",
                expected: p,
                found: self.v_tilde.nrows(),
            });
        }
        if !(self.a > 0.0 && self.b > 0.0) || !self.a.is_finite() || !self.b.is_finite() {
            return Err(Error::InvalidConfig(alloc::format!(
                "Gamma prior needs a > 0 and b > 0, got a = {}, b = {}",
                self.a,
                self.b
            )));
        }
        if (&self.v_tilde - self.v_tilde.transpose()).amax() > 1e-12 * self.v_tilde.amax() {
            return Err(Error::NotPositiveDefinite("prior covariance"));
        }
        cholesky(&self.v_tilde, "prior covariance").map(|_| ())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearVbPosterior {
    pub mu_beta: DVector<f64>,
    pub v_beta: DMatrix<f64>,
    pub a_h: f64,
    pub b_h: f64,
    pub elbo: f64,
    pub iterations: usize,
}

impl LinearVbPosterior {
    /// `E_q[h] = a*/b*`.
    pub fn mean_precision(&self) -> f64 {
        self.a_h / self.b_h
    }
}

/// Quantities shared by the updates and the bound.
struct Work {
    xtx: DMatrix<f64>,
    v_inv: DMatrix<f64>,
    v_tilde_log_det: f64,
    update: Cholesky<f64, Dyn>,
    rhs: DVector<f64>,
}

impl Work {
    fn new(data: &Dataset, prior: &LinearPrior) -> Result<Self> {
        if prior.dim() != data.p() {
            return Err(Error::DimensionMismatch {
                context: "linear prior",
                expected: data.p(),
                found: prior.dim(),
            });
        }
        let x = data.x();
        let xtx = x.tr_mul(x);
        let v_chol = cholesky(&prior.v_tilde, "prior covariance")?;
        let mut v_inv = v_chol.inverse();
        symmetrize(&mut v_inv);
        let a_mat = &xtx + &v_inv;
        let update = cholesky(&a_mat, "linear CAVI update matrix")
            .map_err(|_| Error::Singular("linear CAVI update matrix"))?;
        let rhs = &v_inv * &prior.mu_tilde + x.tr_mul(data.y());
        Ok(Self {
            v_tilde_log_det: chol_log_det(&v_chol),
            xtx,
            v_inv,
            update,
            rhs,
        })
    }

    fn update_inverse(&self) -> DMatrix<f64> {
        let mut inv = self.update.inverse();
        symmetrize(&mut inv);
        inv
    }
}

fn half_rss(data: &Dataset, mu: &DVector<f64>) -> f64 {
    0.5 * (data.y() - data.x() * mu).norm_squared()
}

/// Runs the coordinate updates to their fixed point.
pub fn cavi_linear(data: &Dataset, prior: &LinearPrior, opts: &CaviOptions) -> Result<LinearVbPosterior> {
    let work = Work::new(data, prior)?;
    let mu_beta = work.update.solve(&work.rhs);
    let a_h = 0.5 * data.n() as f64 + prior.a;
    // b* = c0 + ratio · b*
    let c0 = prior.b + half_rss(data, &mu_beta);
    let c1 = 0.5 * work.update.solve(&work.xtx).trace();
    let ratio = c1 / a_h;
    if !(ratio < 1.0) || !c0.is_finite() {
        return Err(Error::Singular("linear CAVI precision update"));
    }

    let mut b = c0;
    let mut iterations = 0;
    loop {
        if iterations == opts.max_iter {
            return Err(Error::NoConvergence {
                context: "linear CAVI",
                iterations,
                last: alloc::vec![b],
            });
        }
        iterations += 1;
        let next = c0 + ratio * b;
        let done = (next - b).abs() <= opts.tol * next;
        b = next;
        if done {
            break;
        }
    }
    let b_h = c0 / (1.0 - ratio);
    debug_assert!((b - b_h).abs() <= 10.0 * opts.tol * b_h + 1e-12);

    let v_beta = work.update_inverse() * (b_h / a_h);
    let mut post = LinearVbPosterior {
        mu_beta,
        v_beta,
        a_h,
        b_h,
        elbo: f64::NAN,
        iterations,
    };
    post.elbo = bound(&post, prior, data, &work);
    Ok(post)
}

/// Applies the `V*` and `b*` update equations once to the values stored in
/// `post` and returns the updated pair. At a fixed point both come back
/// unchanged.
pub fn linear_updates(
    data: &Dataset,
    prior: &LinearPrior,
    post: &LinearVbPosterior,
) -> Result<(DMatrix<f64>, f64)> {
    let work = Work::new(data, prior)?;
    let v_new = work.update_inverse() * (post.b_h / post.a_h);
    let b_new = prior.b + half_rss(data, &post.mu_beta) + 0.5 * (&work.xtx * &post.v_beta).trace();
    Ok((v_new, b_new))
}

/// Mean-field evidence lower bound `E_q[ln p(y, β, h)] − E_q[ln q(β, h)]`
/// under the conjugate Normal-Gamma prior.
pub fn elbo_linear(post: &LinearVbPosterior, prior: &LinearPrior, data: &Dataset) -> Result<f64> {
    let work = Work::new(data, prior)?;
    if post.mu_beta.len() != data.p() || post.v_beta.nrows() != data.p() {
        return Err(Error::DimensionMismatch {
            context: "linear posterior",
            expected: data.p(),
            found: post.mu_beta.len(),
        });
    }
    if !(post.a_h > 0.0 && post.b_h > 0.0) {
        return Err(Error::NonPositivePrecision(post.b_h));
    }
    Ok(bound(post, prior, data, &work))
}

fn bound(post: &LinearVbPosterior, prior: &LinearPrior, data: &Dataset, work: &Work) -> f64 {
    let n = data.n() as f64;
    let p = data.p() as f64;
    let (a_s, b_s) = (post.a_h, post.b_h);
    let e_h = a_s / b_s;
    let e_ln_h = digamma(a_s) - libm::log(b_s);

    let sq_resid = 2.0 * half_rss(data, &post.mu_beta) + (&work.xtx * &post.v_beta).trace();
    let dev = &post.mu_beta - &prior.mu_tilde;
    let prior_quad = dev.dot(&(&work.v_inv * &dev)) + (&work.v_inv * &post.v_beta).trace();
    let v_log_det = match Cholesky::new(post.v_beta.clone()) {
        Some(c) => chol_log_det(&c),
        None => return f64::NAN,
    };

    let lik = 0.5 * n * (e_ln_h - LN_2PI) - 0.5 * e_h * sq_resid;
    let beta_prior = 0.5 * p * (e_ln_h - LN_2PI) - 0.5 * work.v_tilde_log_det - 0.5 * e_h * prior_quad;
    let h_prior = prior.a * libm::log(prior.b) - ln_gamma(prior.a) + (prior.a - 1.0) * e_ln_h
        - prior.b * e_h;
    let beta_entropy = 0.5 * p * (1.0 + LN_2PI) + 0.5 * v_log_det;
    let h_entropy = a_s - libm::log(b_s) + ln_gamma(a_s) + (1.0 - a_s) * digamma(a_s);
    lik + beta_prior + h_prior + beta_entropy + h_entropy
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn three_point() -> (Dataset, LinearPrior) {
        let data = Dataset::unnamed(
            DVector::from_vec(alloc::vec![1.0, 2.0, 3.0]),
            DMatrix::from_element(3, 1, 1.0),
        )
        .unwrap();
        (data, LinearPrior::isotropic(1, 1e5, 1.0, 1.0).unwrap())
    }

    #[test]
    fn three_point_fixed_point_matches_hand_solution() {
        // mpmath: A = 3 + 1e-5, μ = 6/A, b* = c0 / (1 - c1/a*)
        let (data, prior) = three_point();
        let post = cavi_linear(&data, &prior, &CaviOptions::linear()).unwrap();
        assert_relative_eq!(post.mu_beta[0], 1.999_993_333_355_555_5, max_relative = 1e-13);
        assert_relative_eq!(post.b_h, 2.499_997_916_758_679_9, max_relative = 1e-13);
        assert_relative_eq!(post.v_beta[(0, 0)], 0.333_331_944_461_342_45, max_relative = 1e-12);
        assert_eq!(post.a_h, 2.5);
    }

    #[test]
    fn shape_is_half_n_plus_a() {
        let n = 500;
        let x = DMatrix::from_fn(n, 2, |i, j| if j == 0 { 1.0 } else { i as f64 / n as f64 });
        let y = DVector::from_fn(n, |i, _| libm::sin(i as f64));
        let data = Dataset::unnamed(y, x).unwrap();
        let prior = LinearPrior::isotropic(2, 1e5, 1.0, 1.0).unwrap();
        let post = cavi_linear(&data, &prior, &CaviOptions::linear()).unwrap();
        assert_eq!(post.a_h, 251.0);
    }

    #[test]
    fn zero_response_with_zero_prior_mean() {
        let data = Dataset::unnamed(
            DVector::zeros(4),
            DMatrix::from_row_slice(4, 2, &[1.0, 0.1, 1.0, 0.4, 1.0, -0.3, 1.0, 0.9]),
        )
        .unwrap();
        let prior = LinearPrior::isotropic(2, 10.0, 2.0, 0.5).unwrap();
        let post = cavi_linear(&data, &prior, &CaviOptions::linear()).unwrap();
        assert_eq!(post.mu_beta, DVector::zeros(2));
    }

    #[test]
    fn updates_reproduce_fixed_point() {
        let (data, prior) = three_point();
        let post = cavi_linear(&data, &prior, &CaviOptions::linear()).unwrap();
        let (v, b) = linear_updates(&data, &prior, &post).unwrap();
        assert_relative_eq!(b, post.b_h, max_relative = 1e-12);
        assert_relative_eq!(v[(0, 0)], post.v_beta[(0, 0)], max_relative = 1e-12);
    }

    #[test]
    fn iteration_cap_is_reported() {
        let (data, prior) = three_point();
        let opts = CaviOptions { tol: 1e-30, max_iter: 3 };
        assert!(matches!(
            cavi_linear(&data, &prior, &opts),
            Err(Error::NoConvergence { iterations: 3, .. })
        ));
    }

    #[test]
    fn prior_validation() {
        assert!(LinearPrior::isotropic(2, 1.0, 0.0, 1.0).is_err());
        assert!(LinearPrior::isotropic(2, -1.0, 1.0, 1.0).is_err());
        let (data, _) = three_point();
        let wrong = LinearPrior::isotropic(2, 1.0, 1.0, 1.0).unwrap();
        assert!(matches!(
            cavi_linear(&data, &wrong, &CaviOptions::linear()),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
