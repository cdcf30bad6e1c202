use nalgebra::{DMatrix, DVector};
use num::Zero;
use serde::Serialize;

use super::{first_failure, primitivity, ConditionItem, Primitivity};
use crate::error::{Error, Result};
use crate::label;
use crate::model::{ModelKind, ModelSpec};
use crate::prob::{prob_to_f64, Prob};

/// The set `H_ij` for one pair `(i, j)`, `j ≠ 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HSet {
    #[serde(serialize_with = "label::one")]
    pub i: usize,
    #[serde(serialize_with = "label::one")]
    pub j: usize,
    /// `p_11·sqrt|Σ_j| / (p_ij·sqrt|Σ_1|)`; `None` when `p_ij = 0`.
    pub ratio: Option<f64>,
    pub empty: bool,
    /// Squared Mahalanobis distance of `(I - F(j))x*` from `μ_j`, when `H_ij` is not empty.
    pub distance_sq: Option<f64>,
    /// `-2 ln(ratio)`, when `H_ij` is not empty.
    pub bound: Option<f64>,
    /// `(I - F(j))x* ∉ H_ij`.
    pub outside: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GlmConditionReport {
    pub primitivity: Primitivity,
    pub column_dominance: bool,
    /// `p_11 - max_{i≠1} p_i1`.
    #[serde(serialize_with = "label::prob")]
    pub dominance_margin: Prob,
    /// `(I - F(1))⁻¹ μ_1`; `None` when `I - F(1)` is singular.
    pub fixed_point: Option<Vec<f64>>,
    pub h_sets: Vec<HSet>,
    /// `max_i Σ_j p_ij ‖F(j)‖₁` with the maximum absolute column sum norm.
    pub drift: f64,
    /// Primitivity of `P` and drift below one (Gaussian noise has finite first moment).
    pub harris_by_drift: bool,
    pub items: Vec<ConditionItem>,
    pub overall: bool,
}

impl GlmConditionReport {
    pub fn first_failure(&self) -> Option<&ConditionItem> {
        first_failure(&self.items)
    }
}

fn norm1(m: &DMatrix<f64>) -> f64 {
    m.column_iter().map(|c| c.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Corollary for Gaussian linear switching models. A singular `I - F(1)` is
/// reported as a failed item, not an error.
pub fn check_glm_corollary(model: &ModelSpec) -> Result<GlmConditionReport> {
    let ModelKind::GaussianLinearSwitching(g) = model.kind() else {
        return Err(Error::Unsupported("expected a Gaussian linear switching model".into()));
    };
    let p = &g.transitions;
    let s = p.len();
    let d = g.dim();

    let primitivity = primitivity(p);
    let rival = (1..s).map(|i| p[i][0].clone()).max().unwrap_or_else(Prob::zero);
    let dominance_margin = &p[0][0] - &rival;
    let column_dominance = dominance_margin >= Prob::zero();

    let eye = DMatrix::<f64>::identity(d, d);
    let fixed_point: Option<DVector<f64>> = (&eye - &g.f[0]).lu().solve(g.noise[0].mean());
    let log_det1 = g.noise[0].log_det();
    let mut h_sets = Vec::new();
    for i in 0..s {
        for j in 1..s {
            let ratio = (!p[i][j].is_zero())
                .then(|| prob_to_f64(&(&p[0][0] / &p[i][j])) * (0.5 * (g.noise[j].log_det() - log_det1)).exp());
            let empty = ratio.is_none_or(|r| r > 1.0);
            let (distance_sq, bound, outside) = if empty {
                (None, None, true)
            } else {
                let r = ratio.expect("nonzero p_ij");
                let bound = -2.0 * r.ln();
                match &fixed_point {
                    Some(x) => {
                        let y = (&eye - &g.f[j]) * x;
                        let m2 = g.noise[j].mahalanobis_sq(&y);
                        (Some(m2), Some(bound), m2 > bound)
                    }
                    None => (None, Some(bound), false),
                }
            };
            h_sets.push(HSet {
                i,
                j,
                ratio,
                empty,
                distance_sq,
                bound,
                outside,
            });
        }
    }

    let norms: Vec<f64> = g.f.iter().map(norm1).collect();
    let drift = p
        .iter()
        .map(|row| row.iter().zip(&norms).map(|(pij, n)| prob_to_f64(pij) * n).sum::<f64>())
        .fold(0.0, f64::max);
    let harris_by_drift = primitivity.primitive && drift < 1.0;

    let h_pass = fixed_point.is_some() && h_sets.iter().all(|h| h.outside);
    let worst_h = h_sets
        .iter()
        .filter_map(|h| h.distance_sq.zip(h.bound).map(|(m, b)| m - b))
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.min(v))));
    let items = vec![
        ConditionItem::new(
            "primitivity",
            primitivity.primitive,
            None,
            primitivity.exponent.map(|r| format!("R = {r}")),
        ),
        ConditionItem::new(
            "column_dominance",
            column_dominance,
            Some(prob_to_f64(&dominance_margin)),
            None,
        ),
        ConditionItem::new(
            "h_sets",
            h_pass,
            worst_h,
            fixed_point.as_ref().map(|x| format!("x* = {:?}", x.as_slice())),
        ),
        ConditionItem::new("drift", drift < 1.0, Some(1.0 - drift), Some(format!("drift = {drift}"))),
    ];
    let overall = items.iter().all(|i| i.pass);
    Ok(GlmConditionReport {
        primitivity,
        column_dominance,
        dominance_margin,
        fixed_point: fixed_point.map(|x| x.as_slice().to_vec()),
        h_sets,
        drift,
        harris_by_drift,
        items,
        overall,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical;
    use crate::model::load_model;
    use crate::prob::parse_prob;

    #[test]
    fn scalar_recipe_passes() {
        let rep = check_glm_corollary(&canonical::glm_scalar()).unwrap();
        assert!(rep.overall);
        assert_eq!(rep.primitivity.exponent, Some(1));
        assert_eq!(rep.dominance_margin, parse_prob("0.1").unwrap());
        assert!((rep.drift - 0.35).abs() < 1e-12);
        let ratios: Vec<f64> = rep.h_sets.iter().map(|h| h.ratio.unwrap()).collect();
        assert!((ratios[0] - 1.5).abs() < 1e-12 && (ratios[1] - 1.2).abs() < 1e-12);
        assert!(rep.h_sets.iter().all(|h| h.empty));
        assert_eq!(rep.fixed_point, Some(vec![0.0]));
        assert!(rep.harris_by_drift);
    }

    fn glm(f: [f64; 2], p: [[&str; 2]; 2], means: [f64; 2]) -> ModelSpec {
        load_model(&format!(
            r#"{{"type":"gaussian_linear_switching","dimension":1,
               "transitions":[["{}","{}"],["{}","{}"]],
               "F":[{},{}],"noise_means":[{},{}],"noise_covariances":[1.0,1.0],
               "initial_hidden":["0.5","0.5"]}}"#,
            p[0][0], p[0][1], p[1][0], p[1][1], f[0], f[1], means[0], means[1]
        ))
        .unwrap()
    }

    #[test]
    fn large_f_breaks_the_drift() {
        let rep = check_glm_corollary(&glm([1.2, -1.2], [["0.6", "0.4"], ["0.5", "0.5"]], [0.0, 2.0])).unwrap();
        assert!((rep.drift - 1.2).abs() < 1e-12);
        assert_eq!(rep.first_failure().unwrap().name, "drift");
    }

    #[test]
    fn hmm_case_tests_the_first_mean() {
        // ratio 0.5/0.5 = 1 is not > 1, so H_12 and H_22 shrink to the point μ_2
        let rep = check_glm_corollary(&glm([0.0, 0.0], [["0.5", "0.5"], ["0.5", "0.5"]], [0.0, 2.0])).unwrap();
        assert_eq!(rep.fixed_point, Some(vec![0.0]));
        assert_eq!(rep.drift, 0.0);
        for h in &rep.h_sets {
            assert!(!h.empty);
            assert_eq!(h.bound, Some(0.0));
            assert!((h.distance_sq.unwrap() - 4.0).abs() < 1e-12);
            assert!(h.outside);
        }
        assert!(rep.overall);
    }

    #[test]
    fn singular_fixed_point_is_a_failed_item() {
        let rep = check_glm_corollary(&glm([1.0, 0.2], [["0.5", "0.5"], ["0.2", "0.8"]], [0.0, 2.0])).unwrap();
        assert!(rep.fixed_point.is_none());
        assert!(!rep.overall);
    }
}
