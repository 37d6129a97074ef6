use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ckp::constants::{best_k_interval, estimate_best_k};
use ckp::divergence::{kl, pearson_vajda, renyi, total_variation, tsallis, weighted_tv};
use ckp::harness::instance::{Instance, InstanceSpec};
use ckp::harness::search::{run_search, SearchConfig};
use ckp::harness::suite::{run_instance, run_suite, SuiteConfig};
use ckp::linearize::dominated;
use ckp::measure::center;
use ckp::report::{CheckReport, Status};
use ckp::transport::{check_corollaries_3, check_tv_bound_3_5, wasserstein};

#[derive(Parser)]
#[command(name = "ckp", version, about = "Divergence functionals and inequality verification on finite probability spaces")]
struct Cli {
    /// Multiply every check tolerance by this factor.
    #[arg(long, global = true, default_value_t = 1.0)]
    tolerance_scale: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Suppress everything except the exit code and --out files.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Compute every divergence the instance supports.
    Divergence {
        file: PathBuf,
        /// Override the instance's order parameter.
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Decide linear-functional domination and print the certificate.
    Dominate { file: PathBuf },
    /// Best-constant interval and empirical estimate for the instance's u.
    BestK {
        file: PathBuf,
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// p-Wasserstein distance plus the transport-bound reports.
    Wasserstein {
        file: PathBuf,
        #[arg(long)]
        p: Option<f64>,
    },
    /// Randomized sweep of the full check registry.
    Suite {
        #[arg(long, default_value_t = 64)]
        seeds: u64,
        #[arg(long, default_value_t = 12)]
        n_max: usize,
        /// Restrict to these check ids (repeatable).
        #[arg(long)]
        check: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Adversarial margin search against one check.
    Search {
        #[arg(long)]
        check: String,
        #[arg(long, default_value_t = 16)]
        restarts: u64,
        #[arg(long, default_value_t = 400)]
        iterations: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every applicable check against one instance file.
    Check { file: PathBuf },
}

/// println!, except a closed stdout (e.g. piping into `head`) is not an
/// error worth panicking over.
fn print_line(text: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout(), "{text}");
}

fn load_instance(path: &PathBuf) -> Result<Instance, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let spec: InstanceSpec =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    Instance::from_spec(spec).map_err(|e| e.to_string())
}

fn reports_to_csv(reports: &[CheckReport]) -> String {
    let mut out = String::from("check_id,lhs,rhs,margin,status,digest\n");
    for r in reports {
        let status = match r.status {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Vacuous => "vacuous",
            Status::BugSuspected => "bug_suspected",
        };
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.check_id, r.lhs, r.rhs, r.margin, status, r.instance_digest
        ));
    }
    out
}

fn emit_reports(reports: &[CheckReport], format: Format, quiet: bool, out: Option<&PathBuf>) -> Result<bool, String> {
    let rendered = match format {
        Format::Json => serde_json::to_string_pretty(reports).map_err(|e| e.to_string())?,
        Format::Csv => reports_to_csv(reports),
    };
    if let Some(path) = out {
        std::fs::write(path, &rendered).map_err(|e| format!("{}: {e}", path.display()))?;
    } else if !quiet {
        print_line(&rendered);
    }
    if out.is_some() && !quiet {
        for r in reports {
            let status = serde_json::to_string(&r.status).map_err(|e| e.to_string())?;
            print_line(&format!(
                "{} {} margin={:.3e} [{}]",
                r.check_id,
                status.trim_matches('"'),
                r.margin,
                r.instance_digest
            ));
        }
    }
    Ok(reports
        .iter()
        .all(|r| matches!(r.status, Status::Pass | Status::Vacuous)))
}

fn emit_value(value: serde_json::Value, format: Format, quiet: bool) -> Result<(), String> {
    if quiet {
        return Ok(());
    }
    match format {
        Format::Json => print_line(&serde_json::to_string_pretty(&value).map_err(|e| e.to_string())?),
        Format::Csv => {
            let obj = value.as_object().ok_or("not a flat record")?;
            let keys: Vec<&str> = obj.keys().map(String::as_str).collect();
            print_line(&keys.join(","));
            let row: Vec<String> = obj.values().map(|v| v.to_string()).collect();
            print_line(&row.join(","));
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool, String> {
    match cli.command {
        Command::Divergence { file, alpha } => {
            let mut inst = load_instance(&file)?;
            if let Some(a) = alpha {
                inst.order = ckp::measure::Order::new(a).map_err(|e| e.to_string())?;
            }
            let f = inst.f.as_ref().ok_or("instance has no density f")?;
            let mut record = serde_json::json!({
                "alpha": inst.order.alpha,
                "kl": kl(&inst.space, f),
                "renyi": renyi(&inst.space, f, inst.order),
                "tsallis": tsallis(&inst.space, f, inst.order),
                "pearson_vajda": pearson_vajda(&inst.space, f, inst.order),
                "total_variation": total_variation(&inst.space, f),
            });
            if let Some(w) = inst.w.as_ref() {
                record["weighted_tv"] = serde_json::json!(
                    weighted_tv(&inst.space, f, w).map_err(|e| e.to_string())?
                );
            }
            emit_value(record, cli.format, cli.quiet)?;
            Ok(true)
        }
        Command::Dominate { file } => {
            let inst = load_instance(&file)?;
            let g = inst.g.as_ref().ok_or("instance has no function g")?;
            let cert = dominated(&inst.space, g, inst.order).map_err(|e| e.to_string())?;
            let record = serde_json::json!({
                "alpha": inst.order.alpha,
                "dominated": cert.dominated,
                "c": cert.c,
                "criterion_lhs": cert.lhs_42,
                "criterion_rhs": cert.rhs_42,
                "margin": cert.margin,
                "r_at_extremizer": cert.r_at_extremizer,
            });
            emit_value(record, cli.format, cli.quiet)?;
            Ok(cert.dominated)
        }
        Command::BestK { file, alpha } => {
            let mut inst = load_instance(&file)?;
            if let Some(a) = alpha {
                inst.order = ckp::measure::Order::new(a).map_err(|e| e.to_string())?;
            }
            let u = inst.u.as_ref().ok_or("instance has no function u")?;
            let uc = center(&inst.space, u);
            let iv = best_k_interval(&inst.space, &uc, inst.order).map_err(|e| e.to_string())?;
            let estimate =
                estimate_best_k(&inst.space, &uc, inst.order).map_err(|e| e.to_string())?;
            let record = serde_json::json!({
                "alpha": inst.order.alpha,
                "lower": iv.lower,
                "upper": iv.upper,
                "estimate": estimate,
            });
            emit_value(record, cli.format, cli.quiet)?;
            Ok(estimate >= iv.lower - 1e-8 && estimate <= iv.upper + 1e-8)
        }
        Command::Wasserstein { file, p } => {
            let mut inst = load_instance(&file)?;
            if let Some(p) = p {
                inst.p = Some(p);
            }
            let p = inst.p.ok_or("no exponent p given")?;
            let ms = inst.metric.as_ref().ok_or("instance has no metric")?;
            let f = inst.f.as_ref().ok_or("instance has no density f")?;
            let (w, _) = wasserstein(ms, f, p).map_err(|e| e.to_string())?;
            emit_value(
                serde_json::json!({ "p": p, "wasserstein": w }),
                cli.format,
                cli.quiet,
            )?;
            let mut reports = vec![check_tv_bound_3_5(ms, f, p).map_err(|e| e.to_string())?];
            reports.extend(check_corollaries_3(ms, f, inst.order, p).map_err(|e| e.to_string())?);
            emit_reports(&reports, cli.format, cli.quiet, None)
        }
        Command::Suite { seeds, n_max, check, out } => {
            let config = SuiteConfig {
                seed_count: seeds,
                n_max,
                allowlist: if check.is_empty() { None } else { Some(check) },
                tolerance_scale: cli.tolerance_scale,
                ..SuiteConfig::default()
            };
            let reports = run_suite(&config).map_err(|e| e.to_string())?;
            emit_reports(&reports, cli.format, cli.quiet, out.as_ref())
        }
        Command::Search { check, restarts, iterations, out } => {
            let config = SearchConfig {
                check_id: check,
                restarts,
                iterations,
                tolerance_scale: cli.tolerance_scale,
                ..SearchConfig::default()
            };
            let reports = run_search(&config).map_err(|e| e.to_string())?;
            emit_reports(&reports, cli.format, cli.quiet, out.as_ref())
        }
        Command::Check { file } => {
            let inst = load_instance(&file)?;
            let reports = run_instance(&inst, cli.tolerance_scale);
            emit_reports(&reports, cli.format, cli.quiet, None)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
