//! Randomized verification sweep: run every registered check against a
//! seeded stream of generated instances and collect margin reports.

use crate::error::{Error, Result};
use crate::harness::checks::{registry, Check};
use crate::harness::instance::{generate, Instance, PROFILES};
use crate::parallel::par_map;
use crate::report::CheckReport;

pub struct SuiteConfig {
    pub seed_start: u64,
    pub seed_count: u64,
    pub n_max: usize,
    /// Check ids to run; `None` means the full registry.
    pub allowlist: Option<Vec<String>>,
    pub tolerance_scale: f64,
    /// Embed the offending instance in failing reports.
    pub embed_failures: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed_start: 0,
            seed_count: 64,
            n_max: 12,
            allowlist: None,
            tolerance_scale: 1.0,
            embed_failures: true,
        }
    }
}

fn selected_checks(config: &SuiteConfig) -> Result<Vec<Check>> {
    let all = registry();
    match &config.allowlist {
        None => Ok(all),
        Some(ids) => {
            let picked: Vec<Check> = all
                .into_iter()
                .filter(|c| ids.iter().any(|id| id == c.id))
                .collect();
            if picked.is_empty() {
                return Err(Error::ConfigError(format!(
                    "no registered check matches the allowlist {ids:?}"
                )));
            }
            Ok(picked)
        }
    }
}

fn instance_for_seed(seed: u64, n_max: usize) -> Result<Instance> {
    let profile = PROFILES[(seed % PROFILES.len() as u64) as usize];
    // cycle sizes 2..=n_max deterministically
    let n = 2 + (seed.wrapping_mul(2654435761) % (n_max.max(2) as u64 - 1)) as usize;
    generate(seed, n, profile)
}

fn run_one(inst: &Instance, checks: &[Check], config: &SuiteConfig) -> Vec<CheckReport> {
    let digest = inst.digest();
    checks
        .iter()
        .filter_map(|check| {
            let tol = check.tolerance * config.tolerance_scale;
            let mut report = (check.eval)(inst, tol)?;
            report.instance_digest = digest.clone();
            if config.embed_failures && !report.passed() {
                report.instance = serde_json::to_value(&inst.spec).ok();
            }
            Some(report)
        })
        .collect()
}

/// Run the sweep. Reports come back sorted by (check_id, instance digest)
/// so the output is byte-identical across thread counts.
pub fn run_suite(config: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let checks = selected_checks(config)?;
    let seeds: Vec<u64> = (config.seed_start..config.seed_start + config.seed_count).collect();
    let per_seed: Vec<Result<Vec<CheckReport>>> = par_map(seeds, |seed| {
        let inst = instance_for_seed(seed, config.n_max)?;
        Ok(run_one(&inst, &checks, config))
    });
    let mut reports = Vec::new();
    for r in per_seed {
        reports.extend(r?);
    }
    reports.sort_by(|a, b| {
        (a.check_id.as_str(), a.instance_digest.as_str())
            .cmp(&(b.check_id.as_str(), b.instance_digest.as_str()))
    });
    Ok(reports)
}

/// Run every applicable check against a single instance.
pub fn run_instance(inst: &Instance, tolerance_scale: f64) -> Vec<CheckReport> {
    let config = SuiteConfig {
        tolerance_scale,
        ..SuiteConfig::default()
    };
    let mut reports = run_one(inst, &registry(), &config);
    reports.sort_by(|a, b| a.check_id.cmp(&b.check_id));
    reports
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Status;

    #[test]
    fn empty_allowlist_is_a_config_error() {
        let config = SuiteConfig {
            allowlist: Some(vec!["no_such_check".into()]),
            ..SuiteConfig::default()
        };
        assert!(matches!(run_suite(&config), Err(Error::ConfigError(_))));
    }

    #[test]
    fn small_sweep_passes_and_is_deterministic() {
        let config = SuiteConfig {
            seed_count: 10,
            n_max: 6,
            ..SuiteConfig::default()
        };
        let a = run_suite(&config).unwrap();
        let b = run_suite(&config).unwrap();
        assert!(!a.is_empty());
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        for r in &a {
            assert!(
                matches!(r.status, Status::Pass | Status::Vacuous),
                "{} lhs {} rhs {} digest {}",
                r.check_id,
                r.lhs,
                r.rhs,
                r.instance_digest
            );
        }
    }

    #[test]
    fn allowlist_restricts_check_ids() {
        let config = SuiteConfig {
            seed_count: 5,
            n_max: 5,
            allowlist: Some(vec!["pinsker".into()]),
            ..SuiteConfig::default()
        };
        let reports = run_suite(&config).unwrap();
        assert!(!reports.is_empty());
        assert!(reports.iter().all(|r| r.check_id == "pinsker"));
    }
}
