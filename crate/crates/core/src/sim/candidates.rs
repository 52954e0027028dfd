//! Candidate model families for the two simulation designs.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use libm::{floor, log};
use nalgebra::DMatrix;

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Largest polynomial order `K` as a function of `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OrderRule {
    /// `K = ⌊ln n⌋`
    #[default]
    FloorLnN,
    /// `K = ⌊¾ ln n⌋`
    FloorLnN34,
}

impl OrderRule {
    pub fn max_order(self, n: usize) -> usize {
        let ln = log(n as f64);
        let k = match self {
            OrderRule::FloorLnN => floor(ln),
            OrderRule::FloorLnN34 => floor(0.75 * ln),
        };
        k.max(0.0) as usize
    }
}

/// Design with columns `x⁰, …, x^{k−1}` from the single raw column of `raw`.
pub fn poly_design(raw: &Dataset, k: usize) -> Result<Dataset> {
    if k == 0 {
        return Err(Error::InvalidConfig("polynomial order must be at least 1".into()));
    }
    let x = raw.x().column(0);
    let design = DMatrix::from_fn(raw.n(), k, |i, j| libm::pow(x[i], j as f64));
    let names = (0..k).map(|j| format!("x^{j}")).collect();
    Dataset::new(raw.y().clone(), design, names)
}

/// Designs for orders `k = 1..=K`, in that order.
pub fn candidate_poly_models(raw: &Dataset, rule: OrderRule) -> Result<Vec<Dataset>> {
    let k_max = rule.max_order(raw.n());
    if k_max == 0 {
        return Err(Error::InvalidConfig(format!(
            "n = {} leaves no polynomial candidates",
            raw.n()
        )));
    }
    (1..=k_max).map(|k| poly_design(raw, k)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbitCandidate {
    pub id: String,
    /// Columns of the `(1, x₁, x₂, x₃)` design.
    pub columns: Vec<usize>,
    pub correctly_specified: bool,
}

/// The seven covariate subsets `M₁ … M₇`; only `M₅ = {1, x₁, x₃}` matches
/// the data-generating coefficients.
pub fn candidate_probit_models() -> Vec<ProbitCandidate> {
    let sets: [&[usize]; 7] = [
        &[0, 1],
        &[0, 2],
        &[0, 3],
        &[0, 1, 2],
        &[0, 1, 3],
        &[0, 2, 3],
        &[0, 1, 2, 3],
    ];
    sets.iter()
        .enumerate()
        .map(|(i, cols)| ProbitCandidate {
            id: format!("M{}", i + 1),
            columns: cols.to_vec(),
            correctly_specified: i == 4,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::gen_poly_data;

    #[test]
    fn order_rules() {
        assert_eq!(OrderRule::FloorLnN.max_order(500), 6);
        assert_eq!(OrderRule::FloorLnN.max_order(1_000_000), 13);
        assert_eq!(OrderRule::FloorLnN34.max_order(500), 4);
        assert_eq!(OrderRule::FloorLnN34.max_order(1_000_000), 10);
    }

    #[test]
    fn polynomial_candidates() {
        let raw = gen_poly_data(500, 3).unwrap();
        let c = candidate_poly_models(&raw, OrderRule::FloorLnN).unwrap();
        assert_eq!(c.len(), 6);
        assert_eq!(c[0].p(), 1);
        assert!(c[0].x().iter().all(|v| *v == 1.0));
        assert_eq!(c[5].p(), 6);
        let x = raw.x()[(10, 0)];
        assert!((c[2].x()[(10, 2)] - x * x).abs() < 1e-15);
    }

    #[test]
    fn probit_candidates_match_table() {
        let c = candidate_probit_models();
        assert_eq!(c.len(), 7);
        assert_eq!(c[0].columns, [0, 1]);
        assert_eq!(c[6].columns, [0, 1, 2, 3]);
        assert_eq!(c.iter().filter(|m| m.correctly_specified).count(), 1);
        assert_eq!(c[4].id, "M5");
        assert!(c[4].correctly_specified);
    }
}
