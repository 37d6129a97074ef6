//! Adversarial margin search. Starting from random instances, perturb
//! the raw instance data by hill climbing to shrink a chosen check's
//! margin, and flag anything that lands measurably below zero.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::harness::checks::find_check;
use crate::harness::instance::{generate, Instance, InstanceSpec, PROFILES};
use crate::parallel::par_map;
use crate::report::{CheckReport, Status};

pub struct SearchConfig {
    pub check_id: String,
    pub restarts: u64,
    pub iterations: usize,
    pub n_max: usize,
    pub tolerance_scale: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            check_id: String::new(),
            restarts: 16,
            iterations: 400,
            n_max: 10,
            tolerance_scale: 1.0,
        }
    }
}

fn jiggle(rng: &mut ChaCha8Rng, values: &mut [f64], step: f64, positive: bool) {
    for v in values.iter_mut() {
        let noise = step * (rng.gen::<f64>() - 0.5) * 2.0 * (1.0 + v.abs());
        *v += noise;
        if positive {
            *v = v.abs().max(1e-9);
        }
    }
}

fn perturb(rng: &mut ChaCha8Rng, spec: &InstanceSpec, step: f64) -> InstanceSpec {
    let mut next = spec.clone();
    if let Some(f) = next.f.as_mut() {
        jiggle(rng, f, step, true);
    }
    if let Some(g) = next.g.as_mut() {
        jiggle(rng, g, step, false);
    }
    if let Some(u) = next.u.as_mut() {
        jiggle(rng, u, step, false);
    }
    if let Some(w) = next.w.as_mut() {
        jiggle(rng, w, step, true);
    }
    if rng.gen::<f64>() < 0.3 {
        jiggle(rng, &mut next.mu, step * 0.5, true);
    }
    // keep the candidate inside the validator's exact-normalization gates
    let mass: f64 = next.mu.iter().sum();
    for m in &mut next.mu {
        *m /= mass;
    }
    if let Some(f) = next.f.as_mut() {
        let mean: f64 = next.mu.iter().zip(f.iter()).map(|(m, v)| m * v).sum();
        if mean > 1e-12 {
            for v in f.iter_mut() {
                *v /= mean;
            }
        }
    }
    next
}

fn margin_of(report: &CheckReport) -> f64 {
    match report.status {
        Status::Vacuous => f64::INFINITY,
        _ => report.margin,
    }
}

fn climb_from(config: &SearchConfig, restart: u64) -> Result<Option<CheckReport>> {
    let check = find_check(&config.check_id)
        .ok_or_else(|| Error::UnknownCheck(config.check_id.clone()))?;
    let tol = check.tolerance * config.tolerance_scale;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5ea2c4 ^ restart);
    let profile = PROFILES[(restart % PROFILES.len() as u64) as usize];
    let n = 2 + (restart as usize * 3) % (config.n_max.max(2) - 1);
    let start = generate(restart, n, profile)?;

    let mut best_spec = start.spec.clone();
    let mut best = match (check.eval)(&start, tol) {
        Some(r) => r,
        None => return Ok(None),
    };
    let mut step = 0.2;
    for _ in 0..config.iterations {
        let candidate_spec = perturb(&mut rng, &best_spec, step);
        let Ok(candidate) = Instance::from_spec(candidate_spec.clone()) else {
            step *= 0.7;
            continue;
        };
        let Some(report) = (check.eval)(&candidate, tol) else {
            continue;
        };
        if margin_of(&report) < margin_of(&best) {
            best = report;
            best_spec = candidate_spec;
            step = (step * 1.3).min(0.5);
        } else {
            step = (step * 0.92).max(1e-4);
        }
    }

    let inst = Instance::from_spec(best_spec.clone())?;
    best.instance_digest = inst.digest();
    if best.margin < -tol {
        best.status = Status::BugSuspected;
    }
    if !best.passed() {
        best.instance = serde_json::to_value(&best_spec).ok();
    }
    Ok(Some(best))
}

/// Run the search and return the lowest-margin report found from each
/// restart, worst first.
pub fn run_search(config: &SearchConfig) -> Result<Vec<CheckReport>> {
    // fail fast on unknown ids before spawning work
    find_check(&config.check_id)
        .ok_or_else(|| Error::UnknownCheck(config.check_id.clone()))?;
    let restarts: Vec<u64> = (0..config.restarts).collect();
    let results: Vec<Result<Option<CheckReport>>> =
        par_map(restarts, |r| climb_from(config, r));
    let mut reports = Vec::new();
    for r in results {
        if let Some(report) = r? {
            reports.push(report);
        }
    }
    reports.sort_by(|a, b| {
        margin_of(a)
            .partial_cmp(&margin_of(b))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.instance_digest.cmp(&b.instance_digest))
    });
    Ok(reports)
}
