//! Torus weights on the homogeneous coordinates of P^N.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use super::{AlgebraError, Rational};

/// Weights α_0..α_N of the torus acting on P^N. Pairwise distinct; whether
/// they are generic enough for a particular computation is only known once
/// a denominator actually vanishes, which callers report as
/// [`crate::EngineError::NonGenericWeights`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightVector {
    weights: Vec<Rational>,
}

impl WeightVector {
    pub fn new(weights: Vec<Rational>) -> Result<Self, AlgebraError> {
        if weights.len() < 2 {
            return Err(AlgebraError::InvalidWeights("need at least two weights".into()));
        }
        for (i, a) in weights.iter().enumerate() {
            if weights[..i].contains(a) {
                return Err(AlgebraError::InvalidWeights(format!("weight {a} repeated")));
            }
        }
        Ok(WeightVector { weights })
    }

    /// A reproducible pseudo-random draw of `count` distinct nonzero weights.
    pub fn draw(count: usize, seed: u64) -> Self {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut weights: Vec<Rational> = Vec::with_capacity(count);
        while weights.len() < count {
            let p: i64 = rng.gen_range(-97..=97);
            let q: i64 = rng.gen_range(1..=13);
            if p == 0 {
                continue;
            }
            let w = Rational::new(p, q).expect("nonzero denominator");
            if !weights.contains(&w) {
                weights.push(w);
            }
        }
        WeightVector { weights }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.weights
    }

    pub fn get(&self, i: usize) -> &Rational {
        &self.weights[i]
    }
}
