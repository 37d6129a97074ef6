//! Divergence and distance functionals: Kullback-Leibler, Renyi, Tsallis,
//! Pearson-Vajda, and the weighted total variation distance.

use crate::error::{Error, Result};
use crate::measure::{Density, Order, RealFunction, Space};

/// Kullback-Leibler divergence D = int f log f dmu, with 0 log 0 = 0.
pub fn kl(space: &Space, f: &Density) -> f64 {
    space.integrate_with(|i| {
        let v = f.values()[i];
        if v == 0.0 {
            0.0
        } else {
            v * v.ln()
        }
    })
}

/// The alpha-th moment sum int f^alpha dmu shared by `renyi` and `tsallis`,
/// so the identity between them is bit-consistent. 0^alpha = 0 for f = 0.
fn alpha_moment(space: &Space, f: &Density, order: Order) -> f64 {
    space.integrate_with(|i| {
        let v = f.values()[i];
        if v == 0.0 {
            0.0
        } else {
            v.powf(order.alpha)
        }
    })
}

/// Renyi divergence D_alpha = (alpha-1)^-1 log int f^alpha dmu.
pub fn renyi(space: &Space, f: &Density, order: Order) -> f64 {
    alpha_moment(space, f, order).ln() / (order.alpha - 1.0)
}

/// Tsallis distance (Renyi divergence power)
/// T_alpha = (alpha-1)^-1 [int f^alpha dmu - 1].
pub fn tsallis(space: &Space, f: &Density, order: Order) -> f64 {
    (alpha_moment(space, f, order) - 1.0) / (order.alpha - 1.0)
}

/// Pearson-Vajda distance chi_alpha = int |f-1|^alpha dmu.
pub fn pearson_vajda(space: &Space, f: &Density, order: Order) -> f64 {
    space.integrate_with(|i| (f.values()[i] - 1.0).abs().powf(order.alpha))
}

/// Weighted total variation ||w (nu - mu)||_TV = int w |f-1| dmu, w >= 0.
pub fn weighted_tv(space: &Space, f: &Density, w: &RealFunction) -> Result<f64> {
    for (index, &v) in w.values().iter().enumerate() {
        if v < 0.0 {
            return Err(Error::NegativeWeightFunction { index, value: v });
        }
    }
    Ok(space.integrate_with(|i| w.values()[i] * (f.values()[i] - 1.0).abs()))
}

/// Plain total variation: `weighted_tv` with w = 1.
pub fn total_variation(space: &Space, f: &Density) -> f64 {
    space.integrate_with(|i| (f.values()[i] - 1.0).abs())
}
