//! Linearization of the Tsallis distance: the root equation for the
//! extremal constant c, the domination certificate, the extremizer
//! density, and an independent concave-maximization oracle.
//!
//! "g is dominated" means int g dnu <= T_alpha(nu||mu) for every density
//! nu << mu. The certificate decides this from the root c of
//! int (g-c)_+^(beta-1) dmu = beta^(beta-1) and the inequality
//! int (g-c)_+^beta dmu <= -beta^beta (c + beta - 1); the oracle decides
//! it by maximizing R f = int fg dmu - T_alpha over the simplex of
//! densities and looking at the sign of the maximum.

use crate::divergence::tsallis;
use crate::error::{Error, Result};
use crate::measure::{pairwise_sum, Density, Order, RealFunction, Space};
use crate::simplex::ascend_simplex;

const DOMINATION_TOL: f64 = 1e-10;

/// Certificate for the domination property of a test function g.
#[derive(Debug, Clone)]
pub struct DominationCertificate {
    /// Root of int (g-c)_+^(beta-1) dmu = beta^(beta-1).
    pub c: f64,
    /// int (g-c)_+^beta dmu.
    pub lhs_42: f64,
    /// -beta^beta (c + beta - 1).
    pub rhs_42: f64,
    pub dominated: bool,
    /// beta^(1-beta) (g-c)_+^(beta-1), the unique maximizer of R.
    pub extremizer: Density,
    /// Value of R at the extremizer; <= 0 exactly when g is dominated.
    pub r_at_extremizer: f64,
    /// Raw signed margin rhs_42 - lhs_42, kept so callers can flag
    /// near-equality cases separately from the boolean verdict.
    pub margin: f64,
}

/// phi(c) = int (g-c)_+^(beta-1) dmu. Nonincreasing and convex in c.
pub fn phi(space: &Space, g: &RealFunction, beta: f64, c: f64) -> f64 {
    space.integrate_with(|i| (g.values()[i] - c).max(0.0).powf(beta - 1.0))
}

/// Solves phi(c) = beta^(beta-1) for the unique root c by bisection.
///
/// phi is piecewise smooth with kinks at the atom values of g, so
/// bisection is used rather than Newton. The bracket starts at
/// [mean(g) - beta^(beta-1) - 1, max g] and the lower end is pushed
/// down by doubling until phi exceeds the target.
pub fn solve_c(space: &Space, g: &RealFunction, order: Order) -> Result<f64> {
    let beta = order.beta;
    let target = beta.powf(beta - 1.0);
    let hi0 = g
        .values()
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let mean = space.integrate(g.values());

    let mut hi = hi0;
    let mut lo = mean - target - 1.0;
    if lo >= hi {
        lo = hi - 1.0;
    }
    let mut doublings = 0usize;
    while phi(space, g, beta, lo) < target {
        lo = hi - 2.0 * (hi - lo);
        doublings += 1;
        if doublings > 200 {
            return Err(Error::NoConvergence { doublings });
        }
    }

    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if phi(space, g, beta, mid) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.abs().max(lo.abs()).max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The unique maximizer of R: beta^(1-beta) (g-c)_+^(beta-1).
pub fn extremizer(space: &Space, g: &RealFunction, order: Order) -> Result<Density> {
    let c = solve_c(space, g, order)?;
    extremizer_at(space, g, order, c)
}

fn extremizer_at(space: &Space, g: &RealFunction, order: Order, c: f64) -> Result<Density> {
    let beta = order.beta;
    let scale = beta.powf(1.0 - beta);
    let values: Vec<f64> = g
        .values()
        .iter()
        .map(|&gi| scale * (gi - c).max(0.0).powf(beta - 1.0))
        .collect();
    Density::new(space, values)
}

/// R f = int fg dmu - T_alpha(nu||mu).
pub fn r_functional(space: &Space, g: &RealFunction, order: Order, f: &Density) -> f64 {
    let fg = space.integrate_with(|i| f.values()[i] * g.values()[i]);
    fg - tsallis(space, f, order)
}

/// Decides domination via the root equation and fills the certificate.
pub fn dominated(space: &Space, g: &RealFunction, order: Order) -> Result<DominationCertificate> {
    let beta = order.beta;
    let c = solve_c(space, g, order)?;
    let lhs_42 = space.integrate_with(|i| (g.values()[i] - c).max(0.0).powf(beta));
    let rhs_42 = -beta.powf(beta) * (c + beta - 1.0);
    let margin = rhs_42 - lhs_42;
    let extremizer = extremizer_at(space, g, order, c)?;
    let r_at_extremizer = r_functional(space, g, order, &extremizer);
    Ok(DominationCertificate {
        c,
        lhs_42,
        rhs_42,
        dominated: lhs_42 <= rhs_42 + DOMINATION_TOL,
        extremizer,
        r_at_extremizer,
        margin,
    })
}

/// Independent oracle: maximizes R over the simplex of densities by
/// projected gradient ascent in the nu-mass coordinates q_i = mu_i f_i.
/// R is strictly concave for alpha > 1, so the stationary point found is
/// the global maximum.
pub fn maximize_r(space: &Space, g: &RealFunction, order: Order) -> Result<(Density, f64)> {
    let mu = space.weights();
    let alpha = order.alpha;
    let beta = order.beta;
    let gv = g.values().to_vec();
    let mu_owned = mu.to_vec();

    let objective = move |q: &[f64]| -> f64 {
        let terms: Vec<f64> = q
            .iter()
            .zip(&mu_owned)
            .zip(&gv)
            .map(|((&qi, &wi), &gi)| {
                let f = qi / wi;
                let fa = if f == 0.0 { 0.0 } else { f.powf(alpha) };
                qi * gi - wi * (fa - 1.0) / (alpha - 1.0)
            })
            .collect();
        pairwise_sum(&terms)
    };
    let mu_owned = mu.to_vec();
    let gv = g.values().to_vec();
    let gradient = move |q: &[f64]| -> Vec<f64> {
        q.iter()
            .zip(&mu_owned)
            .zip(&gv)
            .map(|((&qi, &wi), &gi)| {
                let f = qi / wi;
                let fpow = if f == 0.0 { 0.0 } else { f.powf(alpha - 1.0) };
                gi - beta * fpow
            })
            .collect()
    };

    let start = mu.to_vec(); // q = mu, i.e. f = 1
    let res = ascend_simplex(start, &objective, &gradient, 1e-9, 100_000)?;
    let values: Vec<f64> = res.point.iter().zip(mu).map(|(&qi, &wi)| qi / wi).collect();
    // The ascent keeps q on the simplex to ~1e-15; renormalize through
    // the Density constructor.
    let f = Density::new(space, values)?;
    let value = r_functional(space, g, order, &f);
    Ok((f, value))
}

/// Two-sided bounds and an empirical estimate for the optimal K in
/// int fg dmu <= K int f^alpha dmu over densities f, for g >= 0.
/// Returns (lower, upper, k_est) with lower = ||g||_beta / (e alpha) and
/// upper = ||g||_beta. k_est is a certified lower bound on the true
/// optimum: every evaluated density is feasible.
pub fn q_constant_bounds(
    space: &Space,
    g: &RealFunction,
    order: Order,
) -> Result<(f64, f64, f64)> {
    for (index, &v) in g.values().iter().enumerate() {
        if v < 0.0 {
            return Err(Error::NegativeG { index, value: v });
        }
    }
    let g_beta = crate::measure::lp_norm(space, g, order.beta)?;
    if g_beta == 0.0 {
        return Ok((0.0, 0.0, 0.0));
    }
    let lower = g_beta / (std::f64::consts::E * order.alpha);
    let upper = g_beta;

    let ratio = |f: &Density| -> f64 {
        let a = space.integrate_with(|i| f.values()[i] * g.values()[i]);
        let b = space.integrate_with(|i| {
            let v = f.values()[i];
            if v == 0.0 {
                0.0
            } else {
                v.powf(order.alpha)
            }
        });
        a / b
    };

    // The ratio maximizer has the form f ∝ (g-c)_+^(beta-1) (the shape of
    // the Q-functional maximizer), so scan c below max g and refine.
    let g_max = g.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let g_min = g.values().iter().cloned().fold(f64::INFINITY, f64::min);
    let range = (g_max - g_min).max(1.0);
    let family = |c: f64| -> Option<Density> {
        let raw: Vec<f64> = g
            .values()
            .iter()
            .map(|&gi| (gi - c).max(0.0).powf(order.beta - 1.0))
            .collect();
        let mass = space.integrate(&raw);
        if !(mass > 0.0) || !mass.is_finite() {
            return None;
        }
        let vals: Vec<f64> = raw.iter().map(|&r| r / mass).collect();
        Density::new(space, vals).ok()
    };

    let mut best = ratio(&Density::uniform(space));
    let mut best_c = f64::NEG_INFINITY;
    let mut candidates: Vec<f64> = Vec::new();
    for k in -20..=60 {
        let off = range * 2f64.powi(-k / 2) * if k % 2 == 0 { 1.0 } else { 0.5 };
        candidates.push(g_max - off);
    }
    for &gi in g.values() {
        candidates.push(gi - 1e-9 * range);
    }
    for &c in &candidates {
        if let Some(f) = family(c) {
            let r = ratio(&f);
            if r > best {
                best = r;
                best_c = c;
            }
        }
    }
    // Golden-section polish of c around the best grid point.
    if best_c.is_finite() {
        let mut lo = best_c - range;
        let mut hi = (best_c + range).min(g_max - 1e-12 * range);
        let gr = 0.5 * (5f64.sqrt() - 1.0);
        let eval = |c: f64| family(c).map(|f| ratio(&f)).unwrap_or(f64::NEG_INFINITY);
        let mut x1 = hi - gr * (hi - lo);
        let mut x2 = lo + gr * (hi - lo);
        let mut f1 = eval(x1);
        let mut f2 = eval(x2);
        for _ in 0..120 {
            if f1 < f2 {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + gr * (hi - lo);
                f2 = eval(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - gr * (hi - lo);
                f1 = eval(x1);
            }
        }
        best = best.max(f1).max(f2);
    }
    Ok((lower, upper, best))
}

/// Sufficient condition for domination: int (1 + g/beta)_+^beta dmu <= 1.
pub fn sufficient_condition(space: &Space, g: &RealFunction, order: Order) -> bool {
    let beta = order.beta;
    let lhs = space.integrate_with(|i| (1.0 + g.values()[i] / beta).max(0.0).powf(beta));
    lhs <= 1.0 + DOMINATION_TOL
}

/// Necessary conditions for domination:
/// mean_ok: int g dmu <= 0;
/// cond_82: int (1 + g/(beta-1))_+^(beta-1) dmu <= 1;
/// cond_72: int (1 + (alpha-1) g)_+^beta dmu <= (e alpha)^beta.
pub fn necessary_conditions(space: &Space, g: &RealFunction, order: Order) -> (bool, bool, bool) {
    let beta = order.beta;
    let alpha = order.alpha;
    let mean_ok = space.integrate(g.values()) <= DOMINATION_TOL;
    let lhs_82 =
        space.integrate_with(|i| (1.0 + g.values()[i] / (beta - 1.0)).max(0.0).powf(beta - 1.0));
    let cond_82_ok = lhs_82 <= 1.0 + DOMINATION_TOL;
    let lhs_72 =
        space.integrate_with(|i| (1.0 + (alpha - 1.0) * g.values()[i]).max(0.0).powf(beta));
    let cond_72_ok = lhs_72 <= (std::f64::consts::E * alpha).powf(beta) + DOMINATION_TOL;
    (mean_ok, cond_82_ok, cond_72_ok)
}

/// Bounds on the extremal constant c for a dominated g:
/// always c <= -beta; for alpha <= 2 additionally c >= -beta + int g dmu
/// and int g_+^beta dmu <= beta^beta (1 - int g dmu); for alpha >= 2,
/// c >= -4 + alpha int g dmu and int g_+^beta dmu <= beta^beta (4 - alpha int g dmu).
pub fn c_bounds_check(
    cert: &DominationCertificate,
    space: &Space,
    g: &RealFunction,
    order: Order,
) -> Result<bool> {
    if !cert.dominated {
        return Err(Error::NotDominated);
    }
    let beta = order.beta;
    let alpha = order.alpha;
    let mean = space.integrate(g.values());
    let g_plus_beta = space.integrate_with(|i| g.values()[i].max(0.0).powf(beta));
    let mut ok = cert.c <= -beta + DOMINATION_TOL;
    if alpha <= 2.0 {
        ok &= cert.c >= -beta + mean - DOMINATION_TOL;
        ok &= g_plus_beta <= beta.powf(beta) * (1.0 - mean) + DOMINATION_TOL;
    }
    if alpha >= 2.0 {
        ok &= cert.c >= -4.0 + alpha * mean - DOMINATION_TOL;
        ok &= g_plus_beta <= beta.powf(beta) * (4.0 - alpha * mean) + DOMINATION_TOL;
    }
    Ok(ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(alpha: f64) -> Order {
        Order::new(alpha).unwrap()
    }

    #[test]
    fn phi_examples() {
        let s = Space::uniform(2).unwrap();
        let zero = RealFunction::constant(2, 0.0);
        assert!((phi(&s, &zero, 2.0, -2.0) - 2.0).abs() < 1e-15);
        let g = RealFunction::new(vec![1.0, -1.0]).unwrap();
        assert_eq!(phi(&s, &g, 2.0, 1.5), 0.0);
        assert!((phi(&s, &g, 2.0, -2.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn solve_c_constant_g_closed_form() {
        // For constant g = t, phi(c) = (t-c)_+^(beta-1) so c = t - beta.
        let s = Space::new(vec![0.3, 0.7]).unwrap();
        for (t, alpha) in [(0.0, 2.0), (1.0, 2.0), (-1.0, 2.0), (0.5, 1.5), (-2.0, 3.0)] {
            let g = RealFunction::constant(2, t);
            let ord = o(alpha);
            let c = solve_c(&s, &g, ord).unwrap();
            assert!(
                (c - (t - ord.beta)).abs() < 1e-10,
                "t={t} alpha={alpha}: c={c}"
            );
        }
    }

    #[test]
    fn solve_c_two_point() {
        let s = Space::uniform(2).unwrap();
        let g = RealFunction::new(vec![1.0, -1.0]).unwrap();
        let c = solve_c(&s, &g, o(2.0)).unwrap();
        assert!((c + 2.0).abs() < 1e-10);
    }

    #[test]
    fn extremizer_examples() {
        let s = Space::uniform(2).unwrap();
        let ord = o(2.0);

        let g = RealFunction::constant(2, 0.0);
        let f = extremizer(&s, &g, ord).unwrap();
        assert!((f.values()[0] - 1.0).abs() < 1e-10);
        assert!((f.values()[1] - 1.0).abs() < 1e-10);

        let g = RealFunction::new(vec![1.0, -1.0]).unwrap();
        let f = extremizer(&s, &g, ord).unwrap();
        assert!((f.values()[0] - 1.5).abs() < 1e-9);
        assert!((f.values()[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn r_functional_examples() {
        let s = Space::uniform(2).unwrap();
        let ord = o(2.0);
        let g = RealFunction::new(vec![1.0, -1.0]).unwrap();
        let f = Density::new(&s, vec![1.5, 0.5]).unwrap();
        assert!((r_functional(&s, &g, ord, &f) - 0.25).abs() < 1e-14);

        let f1 = Density::uniform(&s);
        assert!((r_functional(&s, &g, ord, &f1) - s.integrate(g.values())).abs() < 1e-14);
    }

    #[test]
    fn dominated_examples() {
        let s = Space::uniform(2).unwrap();
        let ord = o(2.0);

        let cert = dominated(&s, &RealFunction::constant(2, 0.0), ord).unwrap();
        assert!(cert.dominated);
        assert!((cert.lhs_42 - 4.0).abs() < 1e-9);
        assert!((cert.rhs_42 - 4.0).abs() < 1e-9);
        assert!(cert.r_at_extremizer.abs() <= 1e-10);

        let cert = dominated(&s, &RealFunction::new(vec![1.0, -1.0]).unwrap(), ord).unwrap();
        assert!(!cert.dominated);
        assert!((cert.lhs_42 - 5.0).abs() < 1e-9);
        assert!((cert.rhs_42 - 4.0).abs() < 1e-9);
        // witness: nu with f = (1.8, 0.2) violates int g dnu <= T_2
        let f = Density::new(&s, vec![1.8, 0.2]).unwrap();
        let int_g_dnu = s.integrate_with(|i| f.values()[i] * [1.0, -1.0][i]);
        let t2 = tsallis(&s, &f, ord);
        assert!((int_g_dnu - 0.8).abs() < 1e-14);
        assert!((t2 - 0.64).abs() < 1e-14);
        assert!(int_g_dnu > t2);

        let cert = dominated(&s, &RealFunction::constant(2, 1.0), ord).unwrap();
        assert!(!cert.dominated);
    }

    #[test]
    fn maximize_r_examples() {
        let s = Space::uniform(2).unwrap();
        let ord = o(2.0);

        let (f, v) = maximize_r(&s, &RealFunction::constant(2, 0.0), ord).unwrap();
        assert!(v.abs() < 1e-9);
        assert!((f.values()[0] - 1.0).abs() < 1e-6);

        let (f, v) = maximize_r(&s, &RealFunction::new(vec![1.0, -1.0]).unwrap(), ord).unwrap();
        assert!((v - 0.25).abs() < 1e-9);
        assert!((f.values()[0] - 1.5).abs() < 1e-6);

        let (f, v) = maximize_r(&s, &RealFunction::constant(2, 1.0), ord).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
        assert!((f.values()[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn q_constant_examples() {
        let s = Space::uniform(2).unwrap();
        let ord = o(2.0);

        let (lo, hi, k) = q_constant_bounds(&s, &RealFunction::constant(2, 1.0), ord).unwrap();
        assert!((lo - 1.0 / (2.0 * std::f64::consts::E)).abs() < 1e-14);
        assert!((hi - 1.0).abs() < 1e-14);
        assert!((k - 1.0).abs() < 1e-8);

        let (lo, hi, k) = q_constant_bounds(&s, &RealFunction::constant(2, 0.0), ord).unwrap();
        assert_eq!((lo, hi, k), (0.0, 0.0, 0.0));

        let g = RealFunction::new(vec![2.0, 0.0]).unwrap();
        let (lo, hi, k) = q_constant_bounds(&s, &g, ord).unwrap();
        // brute-force oracle over the 1-simplex: max f1/(f1^2 - 2 f1 + 2)
        // has closed form (sqrt(2)+1)/2 at f1 = sqrt(2)
        let oracle = (2f64.sqrt() + 1.0) / 2.0;
        assert!(k >= lo - 1e-8 && k <= hi + 1e-8);
        assert!((k - oracle).abs() < 1e-7, "k={k} oracle={oracle}");

        let bad = RealFunction::new(vec![-0.5, 0.5]).unwrap();
        assert!(matches!(
            q_constant_bounds(&s, &bad, ord),
            Err(Error::NegativeG { .. })
        ));
    }

    #[test]
    fn sufficient_and_necessary_examples() {
        let s = Space::uniform(2).unwrap();
        let ord = o(2.0);
        let beta = ord.beta;

        assert!(sufficient_condition(&s, &RealFunction::constant(2, 0.0), ord));
        assert!(!sufficient_condition(&s, &RealFunction::constant(2, 1.0), ord));
        assert!(sufficient_condition(&s, &RealFunction::constant(2, -beta), ord));

        let (m, c82, c72) = necessary_conditions(&s, &RealFunction::constant(2, 0.0), ord);
        assert!(m && c82 && c72);

        let (m, c82, c72) = necessary_conditions(&s, &RealFunction::constant(2, 1.0), ord);
        assert!(!m && !c82 && c72);

        // (8.2) holds but domination fails: the one-way witness.
        let g = RealFunction::new(vec![1.0, -1.0]).unwrap();
        let (m, c82, _) = necessary_conditions(&s, &g, ord);
        assert!(m && c82);
        assert!(!dominated(&s, &g, ord).unwrap().dominated);
    }

    #[test]
    fn c_bounds_examples() {
        let s = Space::uniform(2).unwrap();

        let ord = o(2.0);
        let cert = dominated(&s, &RealFunction::constant(2, 0.0), ord).unwrap();
        assert!(c_bounds_check(&cert, &s, &RealFunction::constant(2, 0.0), ord).unwrap());
        assert!((cert.c + ord.beta).abs() < 1e-10);

        let g = RealFunction::constant(2, -1.0);
        let cert = dominated(&s, &g, ord).unwrap();
        assert!((cert.c + 3.0).abs() < 1e-10);
        assert!(c_bounds_check(&cert, &s, &g, ord).unwrap());

        let ord = o(1.5);
        let g = RealFunction::constant(2, -ord.beta);
        let cert = dominated(&s, &g, ord).unwrap();
        assert!((cert.c + 2.0 * ord.beta).abs() < 1e-9);
        assert!(c_bounds_check(&cert, &s, &g, ord).unwrap());

        let ord = o(2.0);
        let cert = dominated(&s, &RealFunction::new(vec![1.0, -1.0]).unwrap(), ord).unwrap();
        assert!(matches!(
            c_bounds_check(&cert, &s, &RealFunction::constant(2, 0.0), ord),
            Err(Error::NotDominated)
        ));
    }

    #[test]
    fn constant_g_dominated_iff_nonpositive() {
        let s = Space::new(vec![0.25, 0.75]).unwrap();
        for alpha in [1.2, 1.5, 2.0, 3.0] {
            let ord = o(alpha);
            for t in [-2.0, -0.5, 0.0, 0.3, 1.0] {
                let cert = dominated(&s, &RealFunction::constant(2, t), ord).unwrap();
                assert_eq!(cert.dominated, t <= 0.0, "alpha={alpha} t={t}");
            }
        }
    }
}
