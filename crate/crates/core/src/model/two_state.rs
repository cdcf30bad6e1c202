use num::{One, Zero};

use crate::error::{Error, Result};
use crate::prob::{prob_to_f64, Prob};

use super::{GenericDiscrete, ModelKind, ModelSpec};

/// Two-state PMM whose marginals `X` and `Y` are both Markov with transition
/// matrix `[[p, 1-p], [q, 1-q]]`; `λ₁, λ₂, μ₁, μ₂` parametrize the coupling.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoStatePmmParams {
    pub p: Prob,
    pub q: Prob,
    pub lambda1: Prob,
    pub lambda2: Prob,
    pub mu1: Prob,
    pub mu2: Prob,
}

impl TwoStatePmmParams {
    /// Parses `[p, q, λ₁, λ₂, μ₁, μ₂]` from decimal or fractional strings.
    pub fn parse(values: [&str; 6]) -> Result<Self> {
        let v: Vec<Prob> = values.iter().map(|s| crate::prob::parse_prob(s)).collect::<Result<_>>()?;
        Ok(TwoStatePmmParams {
            p: v[0].clone(),
            q: v[1].clone(),
            lambda1: v[2].clone(),
            lambda2: v[3].clone(),
            mu1: v[4].clone(),
            mu2: v[5].clone(),
        })
    }

    /// Checks every parameter against its constraint interval.
    pub fn validate(&self) -> Result<()> {
        let (zero, one) = (Prob::zero(), Prob::one());
        let (p, q) = (&self.p, &self.q);
        for (name, v) in [("p", p), ("q", q)] {
            if *v <= zero || *v >= one {
                return Err(constraint(name, v, &zero, &one));
            }
        }
        let max0 = |a: Prob| if a > zero { a } else { zero.clone() };
        let min1 = |a: Prob| if a < one { a } else { one.clone() };
        let bounds = [
            ("lambda1", &self.lambda1, max0(((p + p) - &one) / p), one.clone()),
            ("lambda2", &self.lambda2, max0((q + p - &one) / p), min1(q / p)),
            ("mu1", &self.mu1, max0((p + q - &one) / q), min1(p / q)),
            ("mu2", &self.mu2, max0(((q + q) - &one) / q), one.clone()),
        ];
        for (name, v, lo, hi) in bounds {
            if *v < lo || *v > hi {
                return Err(constraint(name, v, &lo, &hi));
            }
        }
        Ok(())
    }

    /// The 4×4 matrix `Q` over joint states ordered `(x,y)` = (1,1),(1,2),(2,1),(2,2).
    pub fn matrix(&self) -> [[Prob; 4]; 4] {
        let one = Prob::one();
        let (p, q) = (&self.p, &self.q);
        let (l1, l2, m1, m2) = (&self.lambda1, &self.lambda2, &self.mu1, &self.mu2);
        [
            [p * l1, p * (&one - l1), p * (&one - l1), &one + p * l1 - (p + p)],
            [p * l2, p * (&one - l2), q - p * l2, &one + p * l2 - q - p],
            [q * m1, q * (&one - m1), p - q * m1, &one + q * m1 - p - q],
            [q * m2, q * (&one - m2), q * (&one - m2), &one + q * m2 - (q + q)],
        ]
    }
}

fn constraint(param: &'static str, v: &Prob, lo: &Prob, hi: &Prob) -> Error {
    Error::Constraint {
        param,
        value: prob_to_f64(v),
        lower: prob_to_f64(lo),
        upper: prob_to_f64(hi),
    }
}

/// Builds the generic discrete model with kernel `Q` and the uniform initial
/// law on the four joint states.
pub fn build_two_state_pmm(params: &TwoStatePmmParams) -> Result<ModelSpec> {
    params.validate()?;
    let m = params.matrix();
    let quarter = Prob::new(1.into(), 4.into());
    let table = GenericDiscrete::from_fn(2, 2, |xp, yp, x, y| m[xp * 2 + yp][x * 2 + y].clone(), |_, _| quarter.clone());
    Ok(ModelSpec::new(ModelKind::GenericDiscrete(table))?.with_name("two_state_pmm"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::parse_prob;

    fn r(s: &str) -> Prob {
        parse_prob(s).unwrap()
    }

    #[test]
    fn rows_sum_to_one_exactly() {
        let params = TwoStatePmmParams::parse(["0.5", "0.5", "0.8", "0.3", "0.6", "0.4"]).unwrap();
        for row in params.matrix() {
            assert_eq!(row.iter().cloned().sum::<Prob>(), Prob::one());
        }
        let m = params.matrix();
        assert_eq!(m[0], [r("0.4"), r("0.1"), r("0.1"), r("0.4")]);
        assert_eq!(m[1], [r("0.15"), r("0.35"), r("0.35"), r("0.15")]);
    }

    #[test]
    fn constraint_violation_names_parameter() {
        let params = TwoStatePmmParams::parse(["0.5", "0.5", "0.8", "1.5", "0.6", "0.4"]).unwrap();
        match build_two_state_pmm(&params).unwrap_err() {
            Error::Constraint { param, upper, .. } => {
                assert_eq!(param, "lambda2");
                assert_eq!(upper, 1.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn independent_coupling_is_a_product_chain() {
        let (p, q) = ("0.6", "0.3");
        let params = TwoStatePmmParams::parse([p, q, p, q, p, q]).unwrap();
        let m = params.matrix();
        let marg = [[r(p), Prob::one() - r(p)], [r(q), Prob::one() - r(q)]];
        for xp in 0..2 {
            for yp in 0..2 {
                for x in 0..2 {
                    for y in 0..2 {
                        assert_eq!(m[xp * 2 + yp][x * 2 + y], &marg[xp][x] * &marg[yp][y]);
                    }
                }
            }
        }
    }
}
