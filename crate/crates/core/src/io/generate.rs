//! Seeded random instances. The stream is xoshiro256++ seeded through
//! SplitMix64; bounded draws use rejection sampling over `next_u64`, so the
//! output depends only on the seed and the model.

use itertools::Itertools;
use thiserror::Error;

use crate::csp::{Constraint, CspInstance, Variable};
use crate::rng::{sample, seeded};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid model: {0}")]
pub struct ModelError(pub String);

#[derive(Debug, Clone, PartialEq)]
pub struct RandomModel {
    pub seed: u64,
    pub n: usize,
    pub d: usize,
    /// Fraction of the possible scopes that get a constraint.
    pub density: f64,
    /// Fraction of each constraint's tuples that are forbidden.
    pub tightness: f64,
    pub arity: usize,
}

const MAX_TUPLES: usize = 1 << 20;

impl RandomModel {
    pub fn new(n: usize, d: usize, density: f64, tightness: f64, seed: u64) -> Self {
        RandomModel {
            seed,
            n,
            d,
            density,
            tightness,
            arity: 2,
        }
    }

    pub fn with_arity(mut self, arity: usize) -> Self {
        self.arity = arity;
        self
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.n == 0 || self.d == 0 {
            return Err(ModelError("n and d must be positive".into()));
        }
        if self.arity == 0 {
            return Err(ModelError("arity must be positive".into()));
        }
        for (name, x) in [("density", self.density), ("tightness", self.tightness)] {
            if !(0.0..=1.0).contains(&x) {
                return Err(ModelError(format!("{name} {x} is outside [0, 1]")));
            }
        }
        if self.arity > self.n && self.density > 0.0 {
            return Err(ModelError(format!(
                "no scopes of arity {} exist over {} variables",
                self.arity, self.n
            )));
        }
        match self.d.checked_pow(self.arity as u32) {
            Some(t) if t <= MAX_TUPLES => Ok(()),
            _ => Err(ModelError("too many tuples per constraint".into())),
        }
    }
}

pub fn generate(model: &RandomModel) -> Result<CspInstance, ModelError> {
    model.validate()?;
    let mut rng = seeded(model.seed);
    let variables: Vec<Variable> = (1..=model.n)
        .map(|i| Variable::new(format!("x{i}"), (0..model.d).map(|a| a.to_string()).collect()))
        .collect();
    let scopes: Vec<Vec<usize>> = if model.arity > model.n {
        Vec::new()
    } else {
        (0..model.n).combinations(model.arity).collect()
    };
    let picked = (model.density * scopes.len() as f64).round() as usize;
    let tuple_count = model.d.pow(model.arity as u32);
    let forbidden = (model.tightness * tuple_count as f64).round() as usize;
    let all_tuples: Vec<Vec<usize>> = (0..model.arity).map(|_| 0..model.d).multi_cartesian_product().collect();
    let mut constraints = Vec::with_capacity(picked);
    for s in sample(&mut rng, scopes.len(), picked) {
        let tuples = sample(&mut rng, tuple_count, forbidden)
            .into_iter()
            .map(|i| all_tuples[i].clone());
        constraints.push(Constraint::forbid(scopes[s].clone(), tuples));
    }
    CspInstance::new(variables, constraints).map_err(|e| ModelError(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::enumerate_solutions;

    #[test]
    fn zero_tightness_is_unconstrained() {
        let csp = generate(&RandomModel::new(4, 3, 1.0, 0.0, 9)).unwrap();
        assert_eq!(csp.num_constraints(), 6);
        assert_eq!(enumerate_solutions(&csp, None).len(), 81);
    }

    #[test]
    fn full_tightness_is_unsat() {
        let csp = generate(&RandomModel::new(4, 3, 0.5, 1.0, 9)).unwrap();
        assert_eq!(csp.num_constraints(), 3);
        assert!(enumerate_solutions(&csp, None).is_empty());
        let free = generate(&RandomModel::new(4, 3, 0.0, 1.0, 9)).unwrap();
        assert_eq!(free.num_constraints(), 0);
    }

    #[test]
    fn exact_forbidden_count() {
        let csp = generate(&RandomModel::new(5, 3, 0.5, 0.4, 3)).unwrap();
        for c in csp.constraints() {
            assert_eq!(c.tuples().len(), 4);
        }
    }

    #[test]
    fn same_seed_same_instance() {
        let m = RandomModel::new(5, 3, 0.5, 0.3, 42);
        assert_eq!(generate(&m).unwrap(), generate(&m).unwrap());
        let other = RandomModel { seed: 43, ..m.clone() };
        assert_ne!(generate(&m).unwrap(), generate(&other).unwrap());
    }

    #[test]
    fn invalid_models() {
        assert!(generate(&RandomModel::new(2, 3, 0.5, 0.3, 0).with_arity(3)).is_err());
        assert!(generate(&RandomModel::new(2, 3, 0.0, 0.3, 0).with_arity(3)).is_ok());
        assert!(generate(&RandomModel::new(3, 3, 1.5, 0.3, 0)).is_err());
        assert!(generate(&RandomModel::new(3, 3, 0.5, f64::NAN, 0)).is_err());
        assert!(generate(&RandomModel::new(0, 3, 0.5, 0.3, 0)).is_err());
    }
}
