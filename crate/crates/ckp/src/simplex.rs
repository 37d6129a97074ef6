//! Euclidean projection onto weighted simplices and a projected gradient
//! ascent loop shared by the concave oracles.

use crate::error::{Error, Result};

/// Exact Euclidean projection of `v` onto {x >= 0, sum_i w_i x_i = 1}
/// with strictly positive weights `w`. Solves the KKT system
/// x_i = (v_i - lambda w_i)_+ by sorting the breakpoints v_i / w_i.
pub fn project_weighted_simplex(w: &[f64], v: &[f64]) -> Vec<f64> {
    let n = v.len();
    debug_assert_eq!(w.len(), n);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let ra = v[a] / w[a];
        let rb = v[b] / w[b];
        rb.partial_cmp(&ra).unwrap_or(std::cmp::Ordering::Equal)
    });

    let mut s1 = 0.0; // sum of w_i v_i over the active set
    let mut s2 = 0.0; // sum of w_i^2
    let mut lambda = 0.0;
    for (k, &i) in order.iter().enumerate() {
        s1 += w[i] * v[i];
        s2 += w[i] * w[i];
        let cand = (s1 - 1.0) / s2;
        let next_ratio = if k + 1 < n {
            v[order[k + 1]] / w[order[k + 1]]
        } else {
            f64::NEG_INFINITY
        };
        if cand >= next_ratio {
            lambda = cand;
            break;
        }
    }
    (0..n)
        .map(|i| (v[i] - lambda * w[i]).max(0.0))
        .collect()
}

/// Projection onto the standard probability simplex.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let w = vec![1.0; v.len()];
    project_weighted_simplex(&w, v)
}

pub struct AscentResult {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Projected gradient ascent over the standard simplex with backtracking
/// line search. Stops when the norm of the unit-step gradient mapping
/// ||P(x + grad) - x|| drops below `grad_tol`.
pub fn ascend_simplex(
    start: Vec<f64>,
    objective: &dyn Fn(&[f64]) -> f64,
    gradient: &dyn Fn(&[f64]) -> Vec<f64>,
    grad_tol: f64,
    max_iter: usize,
) -> Result<AscentResult> {
    let mut x = project_simplex(&start);
    let mut value = objective(&x);
    let mut step = 1.0;
    for iter in 0..max_iter {
        let grad = gradient(&x);
        let mapped = project_simplex(
            &x.iter()
                .zip(&grad)
                .map(|(&xi, &gi)| xi + gi)
                .collect::<Vec<_>>(),
        );
        let pg_norm: f64 = mapped
            .iter()
            .zip(&x)
            .map(|(&m, &xi)| (m - xi) * (m - xi))
            .sum::<f64>()
            .sqrt();
        if pg_norm <= grad_tol {
            return Ok(AscentResult {
                point: x,
                value,
                iterations: iter,
                converged: true,
            });
        }

        // Backtracking along the projection arc (Armijo, c1 = 0.1).
        let mut t = step;
        let mut moved = false;
        for _ in 0..60 {
            let trial = project_simplex(
                &x.iter()
                    .zip(&grad)
                    .map(|(&xi, &gi)| xi + t * gi)
                    .collect::<Vec<_>>(),
            );
            let inner: f64 = grad
                .iter()
                .zip(trial.iter().zip(&x))
                .map(|(&g, (&ti, &xi))| g * (ti - xi))
                .sum();
            let trial_value = objective(&trial);
            if trial_value >= value + 0.1 * inner && trial_value > value - 1e-300 {
                x = trial;
                value = trial_value;
                step = (t * 2.0).min(1e6);
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            // Line search exhausted: we are at numerical stationarity.
            return Ok(AscentResult {
                point: x,
                value,
                iterations: iter,
                converged: pg_norm <= grad_tol.max(1e-7),
            });
        }
    }
    Err(Error::OracleNotConverged {
        iterations: max_iter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_is_feasible_and_fixes_interior_points() {
        let w = vec![0.25, 0.25, 0.5];
        let x = vec![2.0, 1.0, 0.5]; // already on the weighted simplex
        let p = project_weighted_simplex(&w, &x);
        for (a, b) in p.iter().zip(&x) {
            assert!((a - b).abs() < 1e-12);
        }

        let v = vec![5.0, -3.0, 0.1];
        let p = project_weighted_simplex(&w, &v);
        let mass: f64 = p.iter().zip(&w).map(|(&pi, &wi)| pi * wi).sum();
        assert!((mass - 1.0).abs() < 1e-12);
        assert!(p.iter().all(|&pi| pi >= 0.0));
    }

    #[test]
    fn projection_matches_bisection_oracle() {
        // Independent route: solve sum_i w_i (v_i - lambda w_i)_+ = 1 by bisection.
        let w = vec![0.1, 0.2, 0.3, 0.4];
        let v = vec![1.0, -2.0, 4.0, 0.3];
        let h = |lam: f64| -> f64 {
            v.iter()
                .zip(&w)
                .map(|(&vi, &wi)| wi * (vi - lam * wi).max(0.0))
                .sum()
        };
        let (mut lo, mut hi) = (-100.0, 100.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if h(mid) > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let lam = 0.5 * (lo + hi);
        let p = project_weighted_simplex(&w, &v);
        for i in 0..4 {
            assert!((p[i] - (v[i] - lam * w[i]).max(0.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn ascent_solves_concave_quadratic() {
        // max -||x - y||^2 over the simplex, y = (0.2, 0.5, 0.3): optimum x = y.
        let y = [0.2, 0.5, 0.3];
        let obj = |x: &[f64]| -> f64 {
            -x.iter().zip(&y).map(|(&a, &b)| (a - b) * (a - b)).sum::<f64>()
        };
        let grad = |x: &[f64]| -> Vec<f64> {
            x.iter().zip(&y).map(|(&a, &b)| -2.0 * (a - b)).collect()
        };
        let res = ascend_simplex(vec![1.0, 0.0, 0.0], &obj, &grad, 1e-10, 10_000).unwrap();
        assert!(res.converged);
        for (a, b) in res.point.iter().zip(&y) {
            assert!((a - b).abs() < 1e-8);
        }
    }
}
