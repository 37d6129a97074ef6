//! Finite probability spaces, densities, test functions and L^p norms.
//!
//! Every quantity in the crate is an integral against a finitely supported
//! probability measure mu. Integration uses pairwise (tree) summation so
//! results are permutation-stable to ~1e-14.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const INPUT_TOL: f64 = 1e-9;

/// Pairwise (tree) summation. More stable than a running sum and
/// independent of small reorderings of equal-magnitude terms.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

/// A finite probability space: atom weights, all strictly positive, summing to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Space {
    weights: Vec<f64>,
}

impl Space {
    /// Builds a space from raw weights. A sum within 1e-9 of 1 is
    /// renormalized exactly; anything further off is an input error.
    /// Atoms of nonpositive weight are rejected.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptySpace);
        }
        for (index, &w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::NonFiniteEntry { index });
            }
            if w <= 0.0 {
                return Err(Error::NonpositiveWeight { index, weight: w });
            }
        }
        let sum = pairwise_sum(&weights);
        if (sum - 1.0).abs() > INPUT_TOL {
            return Err(Error::BadNormalization { sum });
        }
        let weights = weights.into_iter().map(|w| w / sum).collect();
        Ok(Space { weights })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySpace);
        }
        Ok(Space {
            weights: vec![1.0 / n as f64; n],
        })
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integral of per-atom values against mu.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.weights.len());
        let terms: Vec<f64> = self
            .weights
            .iter()
            .zip(values)
            .map(|(&w, &v)| w * v)
            .collect();
        pairwise_sum(&terms)
    }

    /// Integral of a per-atom expression without materializing it first.
    pub fn integrate_with(&self, f: impl Fn(usize) -> f64) -> f64 {
        let terms: Vec<f64> = self
            .weights
            .iter()
            .enumerate()
            .map(|(i, &w)| w * f(i))
            .collect();
        pairwise_sum(&terms)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: len,
            });
        }
        Ok(())
    }
}

/// Per-atom Radon-Nikodym values f = dnu/dmu: nonnegative with mu-mean 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Density {
    values: Vec<f64>,
}

impl Density {
    /// A mu-mean within 1e-9 of 1 is renormalized exactly; anything
    /// further off is rejected.
    pub fn new(space: &Space, values: Vec<f64>) -> Result<Self> {
        space.check_len(values.len())?;
        for (index, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteEntry { index });
            }
            if v < 0.0 {
                return Err(Error::NegativeDensity { index, value: v });
            }
        }
        let mean = space.integrate(&values);
        if (mean - 1.0).abs() > INPUT_TOL {
            return Err(Error::BadDensityNormalization { mean });
        }
        let values = values.into_iter().map(|v| v / mean).collect();
        Ok(Density { values })
    }

    pub fn uniform(space: &Space) -> Self {
        Density {
            values: vec![1.0; space.n()],
        }
    }

    /// Density proportional to the given nonnegative masses per atom
    /// (nu-masses, not Radon-Nikodym values).
    pub fn from_masses(space: &Space, masses: &[f64]) -> Result<Self> {
        space.check_len(masses.len())?;
        let total = pairwise_sum(masses);
        if total <= 0.0 || !total.is_finite() {
            return Err(Error::ZeroFunction);
        }
        let values: Vec<f64> = masses
            .iter()
            .zip(space.weights())
            .map(|(&m, &w)| m / (total * w))
            .collect();
        Density::new(space, values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Per-atom real values for a test function (g, u or a weight w).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealFunction {
    values: Vec<f64>,
}

impl RealFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (index, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteEntry { index });
            }
        }
        Ok(RealFunction { values })
    }

    pub fn constant(n: usize, value: f64) -> Self {
        RealFunction {
            values: vec![value; n],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Divergence order alpha in (1, 50] with the conjugate power beta and
/// beta* = max(beta, 2). Larger alpha would push density powers out of
/// double range, so it is rejected at construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Order {
    pub alpha: f64,
    pub beta: f64,
    pub beta_star: f64,
}

impl Order {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha <= 50.0) || !alpha.is_finite() {
            return Err(Error::BadOrder { alpha });
        }
        let beta = alpha / (alpha - 1.0);
        Ok(Order {
            alpha,
            beta,
            beta_star: beta.max(2.0),
        })
    }
}

/// L^p(mu)-norm: (sum_i mu_i |h_i|^p)^(1/p), p >= 1.
pub fn lp_norm(space: &Space, h: &RealFunction, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::BadExponent {
            p,
            min_allowed: "p >= 1",
        });
    }
    space.check_len(h.values().len())?;
    let s = space.integrate_with(|i| h.values()[i].abs().powf(p));
    Ok(s.powf(1.0 / p))
}

/// Subtracts the mu-mean: u - int u dmu.
pub fn center(space: &Space, u: &RealFunction) -> RealFunction {
    let mean = space.integrate(u.values());
    RealFunction {
        values: u.values().iter().map(|&v| v - mean).collect(),
    }
}
