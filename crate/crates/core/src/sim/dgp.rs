//! Simulated datasets. Replications draw from independent seeded streams.

use alloc::string::String;
use alloc::vec;

use libm::log1p;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::data::Dataset;
use crate::error::Result;
use crate::special::norm_cdf;

/// Coefficients of the probit design `(1, x₁, x₂, x₃)`.
pub const PROBIT_BETA: [f64; 4] = [-0.2, 0.3, 0.0, 0.7];

/// Law of the probit covariates, recorded with experiment results.
pub const PROBIT_COVARIATE_LAW: &str = "x1, x2, x3 iid N(0, 1)";

/// `E[y | x] = ln(1 + 46x)`.
pub fn poly_mean(x: f64) -> f64 {
    log1p(46.0 * x)
}

/// `yᵢ = ln(1 + 46xᵢ) + eᵢ` on the fixed grid `xᵢ = 0.7(i−1)/n`.
///
/// The returned dataset holds the raw `x` as its only column; candidate
/// designs are built with [`poly_design`](super::poly_design).
pub fn gen_poly_data(n: usize, seed: u64) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = DVector::from_fn(n, |i, _| 0.7 * i as f64 / n as f64);
    let y = x.map(|xi| poly_mean(xi) + rng.sample::<f64, _>(StandardNormal));
    Dataset::new(y, DMatrix::from_column_slice(n, 1, x.as_slice()), vec![String::from("x")])
}

/// Probit data with design columns `(1, x₁, x₂, x₃)` and
/// `yᵢ ~ Bernoulli(Φ(Xᵢ′β))`.
pub fn gen_probit_data(n: usize, seed: u64) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = DMatrix::zeros(n, 4);
    let mut y = DVector::zeros(n);
    for i in 0..n {
        x[(i, 0)] = 1.0;
        for j in 1..4 {
            x[(i, j)] = rng.sample(StandardNormal);
        }
        let eta: f64 = (0..4).map(|j| x[(i, j)] * PROBIT_BETA[j]).sum();
        let u: f64 = rng.random();
        y[i] = if u < norm_cdf(eta) { 1.0 } else { 0.0 };
    }
    let names = ["const", "x1", "x2", "x3"].map(String::from).to_vec();
    Dataset::new(y, x, names)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints() {
        let d = gen_poly_data(500, 1).unwrap();
        assert_eq!(d.x()[(0, 0)], 0.0);
        assert_eq!(poly_mean(d.x()[(0, 0)]), 0.0);
        let last = d.x()[(499, 0)];
        assert_eq!(last, 0.7 * 499.0 / 500.0);
        assert!((poly_mean(last) - libm::log(1.0 + 46.0 * 0.7 * 499.0 / 500.0)).abs() < 1e-14);
    }

    #[test]
    fn seeded_generation_is_deterministic() {
        assert_eq!(gen_poly_data(80, 9).unwrap(), gen_poly_data(80, 9).unwrap());
        assert_ne!(gen_poly_data(80, 9).unwrap(), gen_poly_data(80, 10).unwrap());
        assert_eq!(gen_probit_data(80, 9).unwrap(), gen_probit_data(80, 9).unwrap());
    }

    #[test]
    fn probit_data_is_binary_with_intercept() {
        let d = gen_probit_data(300, 4).unwrap();
        d.ensure_binary().unwrap();
        assert!(d.x().column(0).iter().all(|v| *v == 1.0));
        assert_eq!(d.names()[3], "x3");
    }
}
