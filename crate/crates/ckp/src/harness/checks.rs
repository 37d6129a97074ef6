//! The data-driven inequality registry. Every check takes a validated
//! instance and produces a margin report, or `None` when the instance
//! lacks the fields the check needs.

use crate::constants::{best_k_interval, k_p, theoretical_k_interval};
use crate::divergence::{kl, pearson_vajda, renyi, tsallis, total_variation, weighted_tv};
use crate::harness::instance::Instance;
use crate::linearize::{
    c_bounds_check, dominated, maximize_r, necessary_conditions, phi, q_constant_bounds,
    sufficient_condition,
};
use crate::measure::{center, lp_norm, RealFunction};
use crate::report::CheckReport;
use crate::transport::{check_corollaries_3, check_tv_bound_3_5};

pub struct Check {
    pub id: &'static str,
    /// Inequality tags covered by this check, used by the completeness test.
    pub tags: &'static [&'static str],
    pub tolerance: f64,
    pub eval: fn(&Instance, f64) -> Option<CheckReport>,
}

/// int u d(nu - mu) = int u (f - 1) dmu.
fn delta_u(inst: &Instance, u: &RealFunction) -> Option<f64> {
    let f = inst.f.as_ref()?;
    Some(
        inst.space
            .integrate_with(|i| u.values()[i] * (f.values()[i] - 1.0)),
    )
}

fn pinsker(inst: &Instance, tol: f64) -> Option<CheckReport> {
    let f = inst.f.as_ref()?;
    let lhs = total_variation(&inst.space, f);
    let rhs = (2.0 * kl(&inst.space, f)).sqrt();
    Some(CheckReport::evaluate("pinsker", lhs, rhs, tol))
}

fn bolley_villani_1(inst: &Instance, tol: f64) -> Option<CheckReport> {
    let f = inst.f.as_ref()?;
    let w = inst.w.as_ref()?;
    let lhs = weighted_tv(&inst.space, f, w).ok()?;
    let exp_moment = inst
        .space
        .integrate_with(|i| (w.values()[i] * w.values()[i]).exp());
    let rhs = (1.0 + exp_moment.ln()).sqrt() * (2.0 * kl(&inst.space, f)).sqrt();
    Some(CheckReport::evaluate("eq_1_2", lhs, rhs, tol))
}

fn bolley_villani_2(inst: &Instance, tol: f64) -> Option<CheckReport> {
    let f = inst.f.as_ref()?;
    let w = inst.w.as_ref()?;
    let lhs = weighted_tv(&inst.space, f, w).ok()?;
    let exp_moment = inst.space.integrate_with(|i| (2.0 * w.values()[i]).exp());
    let d = kl(&inst.space, f);
    let rhs = (1.5 + exp_moment.ln()) * (d.sqrt() + 0.5 * d);
    Some(CheckReport::evaluate("eq_1_3", lhs, rhs, tol))
}

fn thm_2_1(inst: &Instance, tol: f64) -> Option<CheckReport> {
    let f = inst.f.as_ref()?;
    let w = inst.w.as_ref()?;
    let lhs = weighted_tv(&inst.space, f, w).ok()?;
    let t = tsallis(&inst.space, f, inst.order);
    let w_beta = lp_norm(&inst.space, w, inst.order.beta).ok()?;
    let alpha = inst.order.alpha;
    let rhs = if alpha <= 2.0 {
        16.0 / 3.0 * w_beta * t.sqrt().max(t.powf(1.0 / alpha))
    } else {
        3f64.powf(alpha) * w_beta * t.powf(1.0 / alpha)
    };
    Some(CheckReport::evaluate("thm_2_1", lhs, rhs, tol))
}

fn thm_2_2(inst: &Instance, tol: f64) -> Option<CheckReport> {
    let f = inst.f.as_ref()?;
    let w = inst.w.as_ref()?;
    let lhs = weighted_tv(&inst.space, f, w).ok()?;
    let t = tsallis(&inst.space, f, inst.order);
    let o = inst.order;
    let c = if o.alpha >= 2.0 {
        2.0
    } else {
        4.0 * o.beta.powf(o.beta)
    };
    let rhs = c * lp_norm(&inst.space, w, 2.0 * o.beta_star - 2.0).ok()? * t.sqrt();
    Some(CheckReport::evaluate("thm_2_2", lhs, rhs, tol))
}

fn eq_2_8(inst: &Instance, tol: f64) -> Option<CheckReport> {
    let u = inst.u.as_ref()?;
    let uc = center(&inst.space, u);
    let p = inst.order.beta_star;
    let lhs = k_p(&inst.space, &uc, p).ok()?;
    let rhs = lp_norm(&inst.space, &uc, 2.0 * p - 2.0).ok()?;
    Some(CheckReport::evaluate("eq_2_8", lhs, rhs, tol))
}

fn cor_2_4(inst: &Instance, tol: f64) -> Option<CheckReport> {
    let u = inst.u.as_ref()?;
    let f = inst.f.as_ref()?;
    let uc = center(&inst.space, u);
    let lhs = delta_u(inst, &uc)?.abs();
    let t = tsallis(&inst.space, f, inst.order);
    let o = inst.order;
    let c = if o.alpha >= 2.0 {
        1.0
    } else {
        2.0 * o.beta.powf(o.beta)
    };
    let rhs = c * lp_norm(&inst.space, &uc, 2.0 * o.beta_star - 2.0).ok()? * t.sqrt();
    Some(CheckReport::evaluate("cor_2_4", lhs, rhs, tol))
}

fn thm_2_3(inst: &Instance, tol: f64) -> Option<CheckReport> {
    let u = inst.u.as_ref()?;
    let uc = center(&inst.space, u);
    if uc.values().iter().all(|&v| v.abs() < 1e-300) {
        return None;
    }
    let iv = best_k_interval(&inst.space, &uc, inst.order).ok()?;
    let lhs = (iv.lower - iv.k_empirical).max(iv.k_empirical - iv.upper);
    Some(CheckReport::evaluate("thm_2_3", lhs, 0.0, tol))
}

fn lemma_9_1(inst: &Instance, tol: f64) -> Option<CheckReport> {
    let u = inst.u.as_ref()?;
    let uc = center(&inst.space, u);
    let (_, upper) = theoretical_k_interval(&inst.space, &uc, inst.order).ok()?;
    let u2 = lp_norm(&inst.space, &uc, 2.0).ok()?;
    let rhs = upper * upper * inst.order.alpha / 2.0;
    Some(CheckReport::evaluate("lemma_9_1", u2 * u2, rhs, tol))
}

fn eq_7_2(inst: &Instance, tol: f64) -> Option<CheckReport> {
    let g = inst.g.as_ref()?;
    let cert = dominated(&inst.space, g, inst.order).ok()?;
    if !cert.dominated {
        return Some(CheckReport::vacuous("eq_7_2", 0.0));
    }
    let o = inst.order;
    let lhs = inst
        .space
        .integrate_with(|i| (1.0 + (o.alpha - 1.0) * g.values()[i]).max(0.0).powf(o.beta));
    let rhs = (std::f64::consts::E * o.alpha).powf(o.beta);
    Some(CheckReport::evaluate("eq_7_2", lhs, rhs, tol))
}

fn prop_8_1_necessary(inst: &Instance, tol: f64) -> Option<CheckReport> {
    let g = inst.g.as_ref()?;
    let cert = dominated(&inst.space, g, inst.order).ok()?;
    if !cert.dominated {
        return Some(CheckReport::vacuous("prop_8_1_necessary", 0.0));
    }
    let (mean_ok, cond_82_ok, _) = necessary_conditions(&inst.space, g, inst.order);
    let lhs = if mean_ok && cond_82_ok { 0.0 } else { 1.0 };
    Some(CheckReport::evaluate("prop_8_1_necessary", lhs, 0.0, tol))
}

fn prop_8_1_sufficient(inst: &Instance, tol: f64) -> Option<CheckReport> {
    let g = inst.g.as_ref()?;
    if !sufficient_condition(&inst.space, g, inst.order) {
        return Some(CheckReport::vacuous("prop_8_1_sufficient", 0.0));
    }
    let cert = dominated(&inst.space, g, inst.order).ok()?;
    let lhs = if cert.dominated { 0.0 } else { 1.0 };
    Some(CheckReport::evaluate("prop_8_1_sufficient", lhs, 0.0, tol))
}

fn prop_8_2(inst: &Instance, tol: f64) -> Option<CheckReport> {
    let g = inst.g.as_ref()?;
    let cert = dominated(&inst.space, g, inst.order).ok()?;
    if !cert.dominated {
        return Some(CheckReport::vacuous("prop_8_2", 0.0));
    }
    let ok = c_bounds_check(&cert, &inst.space, g, inst.order).ok()?;
    let lhs = if ok { 0.0 } else { 1.0 };
    Some(CheckReport::evaluate("prop_8_2", lhs, 0.0, tol))
}

fn thm_4_1(inst: &Instance, tol: f64) -> Option<CheckReport> {
    let g = inst.g.as_ref()?;
    let cert = dominated(&inst.space, g, inst.order).ok()?;
    let (_, max_r) = maximize_r(&inst.space, g, inst.order).ok()?;
    let oracle_dominated = max_r <= 1e-6;
    let lhs = if cert.dominated == oracle_dominated {
        0.0
    } else {
        1.0
    };
    Some(CheckReport::evaluate("thm_4_1", lhs, 0.0, tol))
}

fn thm_4_2(inst: &Instance, tol: f64) -> Option<CheckReport> {
    let g = inst.g.as_ref()?;
    let o = inst.order;
    let beta = o.beta;
    let g_min = g.values().iter().cloned().fold(f64::INFINITY, f64::min);
    let g_max = g.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = g_min - 3.0 * beta;
    let any_c_satisfies = (0..1000).any(|k| {
        let c = lo + (g_max - lo) * k as f64 / 999.0;
        let lhs = inst
            .space
            .integrate_with(|i| (g.values()[i] - c).max(0.0).powf(beta));
        lhs <= -beta.powf(beta) * (c + beta - 1.0)
    });
    if !any_c_satisfies {
        return Some(CheckReport::vacuous("thm_4_2", 0.0));
    }
    let cert = dominated(&inst.space, g, o).ok()?;
    let lhs = if cert.dominated { 0.0 } else { 1.0 };
    Some(CheckReport::evaluate("thm_4_2", lhs, 0.0, tol))
}

fn extremizer_opt(inst: &Instance, tol: f64) -> Option<CheckReport> {
    let g = inst.g.as_ref()?;
    let cert = dominated(&inst.space, g, inst.order).ok()?;
    let (_, max_r) = maximize_r(&inst.space, g, inst.order).ok()?;
    // root-equation residual doubles as a normalization audit
    let residual =
        (phi(&inst.space, g, inst.order.beta, cert.c) / inst.order.beta.powf(inst.order.beta - 1.0)
            - 1.0)
            .abs();
    let lhs = (cert.r_at_extremizer - max_r).abs().max(residual * 1e-3);
    Some(CheckReport::evaluate("extremizer_opt", lhs, 0.0, tol))
}

fn prop_6_1(inst: &Instance, tol: f64) -> Option<CheckReport> {
    let g = inst.g.as_ref()?;
    let g_abs = RealFunction::new(g.values().iter().map(|v| v.abs()).collect()).ok()?;
    let (lower, upper, k) = q_constant_bounds(&inst.space, &g_abs, inst.order).ok()?;
    let lhs = (lower - k).max(k - upper);
    Some(CheckReport::evaluate("prop_6_1", lhs, 0.0, tol))
}

fn eq_3_5(inst: &Instance, tol: f64) -> Option<CheckReport> {
    let ms = inst.metric.as_ref()?;
    let f = inst.f.as_ref()?;
    let p = inst.p?;
    let r = check_tv_bound_3_5(ms, f, p).ok()?;
    Some(CheckReport::evaluate("eq_3_5", r.lhs, r.rhs, tol))
}

fn cor_3_report(inst: &Instance, tol: f64, index: usize) -> Option<CheckReport> {
    let ms = inst.metric.as_ref()?;
    let f = inst.f.as_ref()?;
    let p = inst.p?;
    let reports = check_corollaries_3(ms, f, inst.order, p).ok()?;
    let r = &reports[index];
    if !r.rhs.is_finite() {
        return Some(CheckReport::vacuous(&r.check_id.clone(), r.lhs));
    }
    Some(CheckReport::evaluate(&r.check_id.clone(), r.lhs, r.rhs, tol))
}

fn cor_3_1_small_alpha(inst: &Instance, tol: f64) -> Option<CheckReport> {
    cor_3_report(inst, tol, 0)
}

fn cor_3_1_large_alpha(inst: &Instance, tol: f64) -> Option<CheckReport> {
    cor_3_report(inst, tol, 1)
}

fn cor_3_2(inst: &Instance, tol: f64) -> Option<CheckReport> {
    cor_3_report(inst, tol, 2)
}

fn cor_11_1(inst: &Instance, tol: f64) -> Option<CheckReport> {
    let u = inst.u.as_ref()?;
    let f = inst.f.as_ref()?;
    let lhs = delta_u(inst, u)?.abs();
    let t = tsallis(&inst.space, f, inst.order);
    let o = inst.order;
    let c = if o.alpha >= 2.0 {
        2.0
    } else {
        4.0 * o.beta.powf(o.beta)
    };
    let rhs = c * lp_norm(&inst.space, u, 2.0 * o.beta_star - 2.0).ok()? * t.sqrt();
    Some(CheckReport::evaluate("cor_11_1", lhs, rhs, tol))
}

fn eq_11_3(inst: &Instance, tol: f64) -> Option<CheckReport> {
    let u = inst.u.as_ref()?;
    let f = inst.f.as_ref()?;
    let lhs = delta_u(inst, u)?.abs();
    let chi = pearson_vajda(&inst.space, f, inst.order);
    let rhs = lp_norm(&inst.space, u, inst.order.beta).ok()? * chi.powf(1.0 / inst.order.alpha);
    Some(CheckReport::evaluate("eq_11_3", lhs, rhs, tol))
}

fn eq_11_4(inst: &Instance, tol: f64) -> Option<CheckReport> {
    let f = inst.f.as_ref()?;
    let o = inst.order;
    let t = tsallis(&inst.space, f, o);
    let chi = pearson_vajda(&inst.space, f, o);
    let lhs = if o.alpha <= 2.0 {
        3.0 / 16.0 * chi.min(chi.powf(2.0 / o.alpha))
    } else {
        o.alpha * 3f64.powf(-o.alpha) * chi
    };
    Some(CheckReport::evaluate("eq_11_4", lhs, t, tol))
}

fn prop_11_2(inst: &Instance, tol: f64) -> Option<CheckReport> {
    let u = inst.u.as_ref()?;
    let f = inst.f.as_ref()?;
    let lhs = delta_u(inst, u)?.abs();
    let o = inst.order;
    let t = tsallis(&inst.space, f, o);
    let u_beta = lp_norm(&inst.space, u, o.beta).ok()?;
    let rhs = if o.alpha <= 2.0 {
        16.0 / 3.0 * u_beta * t.sqrt().max(t.powf(1.0 / o.alpha))
    } else {
        3f64.powf(o.alpha) / o.alpha * u_beta * t.powf(1.0 / o.alpha)
    };
    Some(CheckReport::evaluate("prop_11_2", lhs, rhs, tol))
}

fn chi_t_identity_alpha2(inst: &Instance, tol: f64) -> Option<CheckReport> {
    let f = inst.f.as_ref()?;
    let o2 = crate::measure::Order::new(2.0).ok()?;
    let lhs = (pearson_vajda(&inst.space, f, o2) - tsallis(&inst.space, f, o2)).abs();
    Some(CheckReport::evaluate("chi_T_identity_alpha2", lhs, 0.0, tol))
}

fn tsallis_renyi_identity(inst: &Instance, tol: f64) -> Option<CheckReport> {
    let f = inst.f.as_ref()?;
    let o = inst.order;
    let t = tsallis(&inst.space, f, o);
    let d = renyi(&inst.space, f, o);
    let t_from_d = (((o.alpha - 1.0) * d).exp() - 1.0) / (o.alpha - 1.0);
    let lhs = (t - t_from_d).abs() / t.abs().max(1.0);
    Some(CheckReport::evaluate("tsallis_renyi_identity", lhs, 0.0, tol))
}

/// Every registered check. Tolerances: 1e-9 where both sides are closed
/// form, 1e-6 to 1e-8 where an iterative oracle supplies one side.
pub fn registry() -> Vec<Check> {
    vec![
        Check { id: "pinsker", tags: &["1.1"], tolerance: 1e-9, eval: pinsker },
        Check { id: "eq_1_2", tags: &["1.2"], tolerance: 1e-9, eval: bolley_villani_1 },
        Check { id: "eq_1_3", tags: &["1.3"], tolerance: 1e-9, eval: bolley_villani_2 },
        Check { id: "thm_2_1", tags: &["2.2", "2.3"], tolerance: 1e-9, eval: thm_2_1 },
        Check { id: "thm_2_2", tags: &["2.4"], tolerance: 1e-9, eval: thm_2_2 },
        Check { id: "eq_2_8", tags: &["2.6", "2.8"], tolerance: 1e-12, eval: eq_2_8 },
        Check { id: "cor_2_4", tags: &["2.9"], tolerance: 1e-9, eval: cor_2_4 },
        Check { id: "thm_2_3", tags: &["2.7", "9.4", "10.3", "10.4"], tolerance: 1e-8, eval: thm_2_3 },
        Check { id: "lemma_9_1", tags: &["9.2"], tolerance: 1e-8, eval: lemma_9_1 },
        Check { id: "eq_7_2", tags: &["7.2"], tolerance: 1e-9, eval: eq_7_2 },
        Check { id: "prop_8_1_necessary", tags: &["8.2"], tolerance: 1e-10, eval: prop_8_1_necessary },
        Check { id: "prop_8_1_sufficient", tags: &["8.3"], tolerance: 1e-10, eval: prop_8_1_sufficient },
        Check { id: "prop_8_2", tags: &["8.4-8.7"], tolerance: 1e-10, eval: prop_8_2 },
        Check { id: "thm_4_1", tags: &["4.1", "4.2", "4.3", "4.4"], tolerance: 1e-6, eval: thm_4_1 },
        Check { id: "thm_4_2", tags: &["thm_4.2"], tolerance: 1e-9, eval: thm_4_2 },
        Check { id: "extremizer_opt", tags: &["5.1"], tolerance: 1e-6, eval: extremizer_opt },
        Check { id: "prop_6_1", tags: &["6.1", "6.2", "6.4", "lemma_6.3"], tolerance: 1e-8, eval: prop_6_1 },
        Check { id: "eq_3_5", tags: &["3.5"], tolerance: 1e-9, eval: eq_3_5 },
        Check { id: "cor_3_1_small_alpha", tags: &["cor_3.1"], tolerance: 1e-9, eval: cor_3_1_small_alpha },
        Check { id: "cor_3_1_large_alpha", tags: &["cor_3.1"], tolerance: 1e-9, eval: cor_3_1_large_alpha },
        Check { id: "cor_3_2", tags: &["cor_3.2", "3.1"], tolerance: 1e-9, eval: cor_3_2 },
        Check { id: "cor_11_1", tags: &["11.2"], tolerance: 1e-9, eval: cor_11_1 },
        Check { id: "eq_11_3", tags: &["11.3"], tolerance: 1e-9, eval: eq_11_3 },
        Check { id: "eq_11_4", tags: &["11.4"], tolerance: 1e-9, eval: eq_11_4 },
        Check { id: "prop_11_2", tags: &["11.5", "11.6"], tolerance: 1e-9, eval: prop_11_2 },
        Check { id: "chi_T_identity_alpha2", tags: &["2.1"], tolerance: 1e-12, eval: chi_t_identity_alpha2 },
        Check { id: "tsallis_renyi_identity", tags: &["2.1"], tolerance: 1e-10, eval: tsallis_renyi_identity },
    ]
}

pub fn find_check(id: &str) -> Option<Check> {
    registry().into_iter().find(|c| c.id == id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::instance::generate;
    use std::collections::BTreeSet;

    #[test]
    fn registry_covers_every_in_scope_inequality() {
        let expected: BTreeSet<&str> = [
            "1.1", "1.2", "1.3", "2.1", "2.2", "2.3", "2.4", "2.6", "2.7", "2.8", "2.9",
            "3.1", "3.5", "cor_3.1", "cor_3.2", "4.1", "4.2", "4.3", "4.4", "thm_4.2",
            "5.1", "6.1", "6.2", "6.4", "lemma_6.3", "7.2", "8.2", "8.3", "8.4-8.7",
            "9.2", "9.4", "10.3", "10.4", "11.2", "11.3", "11.4", "11.5", "11.6",
        ]
        .into_iter()
        .collect();
        let got: BTreeSet<&str> = registry()
            .iter()
            .flat_map(|c| c.tags.iter().copied())
            .collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn check_ids_are_unique() {
        let reg = registry();
        let ids: BTreeSet<&str> = reg.iter().map(|c| c.id).collect();
        assert_eq!(ids.len(), reg.len());
    }

    #[test]
    fn pinsker_two_point_example() {
        let mut inst = generate(0, 2, "dirichlet").unwrap();
        let space = crate::measure::Space::uniform(2).unwrap();
        inst.space = space.clone();
        inst.f = Some(crate::measure::Density::new(&space, vec![1.5, 0.5]).unwrap());
        let r = pinsker(&inst, 1e-9).unwrap();
        assert!(r.passed());
        assert!((r.lhs - 0.5).abs() < 1e-12);
        // rhs = sqrt(2 * 0.75 ln 1.5 + 2 * 0.25 ln 0.5)
        let d = 0.75 * 1.5f64.ln() + 0.25 * 0.5f64.ln();
        assert!((r.rhs - (2.0 * d).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn all_checks_pass_on_random_instances() {
        for seed in 0..12u64 {
            let profile =
                crate::harness::instance::PROFILES[(seed as usize) % 5];
            let inst = generate(seed, 2 + (seed as usize % 5), profile).unwrap();
            for check in registry() {
                if let Some(r) = (check.eval)(&inst, check.tolerance) {
                    assert!(
                        r.passed(),
                        "seed {seed} profile {profile} check {} lhs {} rhs {}",
                        check.id,
                        r.lhs,
                        r.rhs
                    );
                }
            }
        }
    }

    #[test]
    fn one_way_witness_82_without_domination() {
        // g = (1, -1) on the uniform two-point space, alpha = 2:
        // the necessary condition (8.2) holds but g is not dominated,
        // so prop_8_1_necessary must report vacuous (not fail).
        let spec = crate::harness::instance::InstanceSpec {
            mu: vec![0.5, 0.5],
            g: Some(vec![1.0, -1.0]),
            alpha: 2.0,
            ..Default::default()
        };
        let inst = crate::harness::instance::Instance::from_spec(spec).unwrap();
        let (mean_ok, cond_82, _) =
            necessary_conditions(&inst.space, inst.g.as_ref().unwrap(), inst.order);
        assert!(mean_ok && cond_82);
        let cert = dominated(&inst.space, inst.g.as_ref().unwrap(), inst.order).unwrap();
        assert!(!cert.dominated);
        let r = prop_8_1_necessary(&inst, 1e-10).unwrap();
        assert_eq!(r.status, crate::report::Status::Vacuous);
    }
}
