//! Argument parsing and subcommand dispatch.

use std::f64::consts::{E, PI};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use condineq_core::detineq::{bound_report, eigen_product_bound, EigenParams, ReportConfig};
use condineq_core::linalg::eigenvalues_sorted;
use condineq_core::submodular::{
    check_submodular, conditional_partition_equality, strong_han_equality, Limits, DEFAULT_TOL,
};
use condineq_core::verify::{
    run_determinant_suite, run_equality_suite, run_strictness_suite, run_submodular_suite,
    SuiteConfig,
};

use crate::error::CliError;
use crate::golden::golden_report;
use crate::io::{read_instance, read_matrix, InstanceDoc};
use crate::params::{parse_grid, parse_index_set, parse_partition};
use crate::render::{
    bounds_json, bounds_text, suites_text, to_json, DeterminantView, EigenReport, HanRow,
    PartitionRow, SubmodularReport,
};

pub const DEFAULT_CAP: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "condineq",
    version,
    about = "Conditioned Han, Szász and Fischer bounds for submodular functions and positive definite matrices"
)]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Relative tolerance for equality and ordering verdicts.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Largest ground set evaluated by brute force.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Write the report here (atomically) instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Determinant bounds for a positive definite matrix (CSV or JSON).
    Bounds {
        matrix: PathBuf,
        /// e.g. "k=1..3;p=2,4;h=3;l=0". Default: every k, p and eigen tuple.
        #[arg(long)]
        grid: Option<String>,
        /// Partition for the Fischer bounds, e.g. "1,3|2,4". Repeatable.
        #[arg(long)]
        partition: Vec<String>,
        /// Condition on this set (e.g. "2,4") instead of a prefix.
        #[arg(long)]
        leading: Option<String>,
        #[arg(long)]
        no_diagnostics: bool,
        #[arg(long)]
        label: Option<String>,
    },
    /// Eigenvalue-product bound for one (h, p, l, k).
    Eigen {
        matrix: PathBuf,
        #[arg(long)]
        h: usize,
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 0)]
        l: usize,
        #[arg(long)]
        k: usize,
    },
    /// Conditioned chains for a set-function instance (JSON).
    Submodular {
        instance: PathBuf,
        /// Comma list; default every k.
        #[arg(long, value_delimiter = ',')]
        k: Vec<usize>,
        /// Comma list; default every p.
        #[arg(long, value_delimiter = ',')]
        p: Vec<usize>,
        #[arg(long)]
        partition: Vec<String>,
    },
    /// Randomized property suites.
    Verify {
        #[arg(value_enum, default_value_t = SuiteName::All)]
        suite: SuiteName,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 6)]
        max_n: usize,
    },
    /// Recompute the reference values for the 4×4 example matrix.
    Golden,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteName {
    Submodular,
    Determinant,
    Equality,
    Strictness,
    All,
}

/// Rendered report plus whether every verdict passed.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub success: bool,
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    if !(cli.tol.is_finite() && cli.tol >= 0.0) {
        return Err(CliError::Usage(format!(
            "--tol must be a non-negative number, got {}",
            cli.tol
        )));
    }
    let json = cli.format == Format::Json;
    match &cli.command {
        Command::Bounds {
            matrix,
            grid,
            partition,
            leading,
            no_diagnostics,
            label,
        } => {
            let k = read_matrix(matrix)?;
            let n = k.dim();
            let label = label.clone().unwrap_or_else(|| stem(matrix));
            let mut config = match grid {
                None => ReportConfig::full_grid(label, n),
                Some(text) => {
                    let g = parse_grid(text).map_err(CliError::Usage)?;
                    let all = || (1..=n).collect::<Vec<_>>();
                    let or_all = |v: &Vec<usize>| if v.is_empty() { all() } else { v.clone() };
                    let mut config = ReportConfig::new(label);
                    config.ks = or_all(&g.k);
                    config.ps = or_all(&g.p);
                    if g.has_eigen() {
                        let ls = if g.l.is_empty() {
                            (0..n).collect()
                        } else {
                            g.l.clone()
                        };
                        config.eigen = EigenParams::grid(n)
                            .into_iter()
                            .filter(|e| {
                                (g.h.is_empty() || g.h.contains(&e.h))
                                    && config.ps.contains(&e.p)
                                    && ls.contains(&e.l)
                                    && config.ks.contains(&e.k)
                            })
                            .collect();
                    }
                    config
                }
            };
            config.partitions = partition
                .iter()
                .map(|p| parse_partition(p, n))
                .collect::<Result<_, _>>()
                .map_err(CliError::Usage)?;
            config.leading = leading
                .as_deref()
                .map(|s| parse_index_set(s, n))
                .transpose()
                .map_err(CliError::Usage)?;
            config.diagnostics = !no_diagnostics;
            config.tol = cli.tol;
            let report = bound_report(&k, &config)?;
            Ok(Outcome {
                text: if json {
                    bounds_json(&report)
                } else {
                    bounds_text(&report)
                },
                success: report.all_checks_pass(),
            })
        }
        Command::Eigen { matrix, h, p, l, k } => {
            let m = read_matrix(matrix)?;
            let params = EigenParams {
                h: *h,
                p: *p,
                l: *l,
                k: *k,
            };
            let b = eigen_product_bound(&m, params)?;
            let spectrum = eigenvalues_sorted(m.as_matrix())?;
            let report = EigenReport {
                matrix: stem(matrix),
                n: m.dim(),
                params,
                log_bound: b.log_bound,
                bound: b.log_bound.exp(),
                log_eigen_product: b.log_eigen_product,
                eigen_product: b.log_eigen_product.exp(),
                slack_log: b.log_bound - b.log_eigen_product,
                eigenvalues: spectrum.values,
                holds: b.holds,
            };
            Ok(Outcome {
                text: if json {
                    to_json(&report.rounded())
                } else {
                    report.text()
                },
                success: report.holds,
            })
        }
        Command::Submodular {
            instance,
            k,
            p,
            partition,
        } => {
            let loaded = read_instance(instance, cli.cap)?;
            let f = &loaded.function;
            let n = f.ground_n();
            let limits = Limits {
                brute_force_cap: cli.cap,
                tol: cli.tol,
                ..Limits::default()
            };
            let pick = |v: &Vec<usize>, name: &str| -> Result<Vec<usize>, CliError> {
                if let Some(bad) = v.iter().find(|&&x| x == 0 || x > n) {
                    return Err(CliError::Usage(format!(
                        "--{name} {bad} is outside 1..={n}"
                    )));
                }
                Ok(if v.is_empty() {
                    (1..=n).collect()
                } else {
                    v.clone()
                })
            };
            let ks = pick(k, "k")?;
            let ps = pick(p, "p")?;
            let partitions = partition
                .iter()
                .map(|s| parse_partition(s, n))
                .collect::<Result<Vec<_>, _>>()
                .map_err(CliError::Usage)?;
            let to_det: Option<Box<dyn Fn(f64) -> f64>> = match loaded.doc {
                InstanceDoc::Gaussian { .. } => {
                    let shift = n as f64 * (2.0 * PI * E).ln();
                    Some(Box::new(move |h: f64| (2.0 * h - shift).exp()))
                }
                _ => None,
            };
            let value = f.evaluate(f.full_set())?;
            let view = |inner: f64, outer: f64| {
                to_det.as_ref().map(|g| DeterminantView {
                    value: g(value),
                    inner: g(inner),
                    outer: g(outer),
                })
            };
            let check = check_submodular(f, &limits)?;
            let mut han = Vec::new();
            for &pp in &ps {
                for &kk in ks.iter().filter(|&&kk| kk <= pp) {
                    let report = strong_han_equality(f, kk, pp, &limits)?;
                    han.push(HanRow {
                        determinant: view(report.chain.inner.bound, report.chain.outer.bound),
                        report,
                    });
                }
            }
            let mut rows = Vec::new();
            for part in &partitions {
                for &pp in &ps {
                    let report = conditional_partition_equality(f, pp, part, &limits)?;
                    rows.push(PartitionRow {
                        partition: part.to_string(),
                        determinant: view(report.chain.inner.bound, report.chain.outer.bound),
                        report,
                    });
                }
            }
            let report = SubmodularReport {
                instance: f.label().to_string(),
                n,
                value,
                submodular: check.holds,
                witness: check.witness.map(|w| {
                    format!(
                        "S={} i={} j={} violation={:e}",
                        w.set, w.i, w.j, w.violation
                    )
                }),
                han,
                partitions: rows,
            };
            Ok(Outcome {
                text: if json {
                    to_json(&report)
                } else {
                    report.text()
                },
                success: report.holds(),
            })
        }
        Command::Verify {
            suite,
            trials,
            max_n,
        } => {
            if *max_n == 0 || *max_n > cli.cap {
                return Err(CliError::Usage(format!(
                    "--max-n must be in 1..={} (the brute-force cap)",
                    cli.cap
                )));
            }
            let mut cfg = SuiteConfig::new(*trials, *max_n, cli.seed);
            cfg.limits.tol = cli.tol;
            cfg.limits.brute_force_cap = cli.cap;
            let mut results = Vec::new();
            let wants = |s: SuiteName| *suite == s || *suite == SuiteName::All;
            if wants(SuiteName::Submodular) {
                results.push(run_submodular_suite(&cfg)?);
            }
            if wants(SuiteName::Determinant) {
                results.push(run_determinant_suite(&cfg)?);
            }
            if wants(SuiteName::Equality) {
                results.push(run_equality_suite(&cfg)?);
            }
            if wants(SuiteName::Strictness) {
                results.push(run_strictness_suite(&SuiteConfig {
                    max_n: cfg.max_n.max(3),
                    ..cfg
                })?);
            }
            Ok(Outcome {
                text: if json {
                    to_json(&results)
                } else {
                    suites_text(&results)
                },
                success: results.iter().all(|r| r.passed()),
            })
        }
        Command::Golden => {
            let report = golden_report()?;
            Ok(Outcome {
                text: if json {
                    to_json(&report)
                } else {
                    report.text()
                },
                success: report.passed(),
            })
        }
    }
}

fn stem(path: &std::path::Path) -> String {
    path.file_stem().map_or_else(
        || path.display().to_string(),
        |s| s.to_string_lossy().into_owned(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn golden_via_run() {
        let cli = Cli::try_parse_from(["condineq", "golden", "--format", "json"]).unwrap();
        let out = run(&cli).unwrap();
        assert!(out.success);
        assert!(out.text.trim_start().starts_with('{'));
    }

    #[test]
    fn bad_tolerance_is_a_usage_error() {
        let cli = Cli::try_parse_from(["condineq", "golden", "--tol=-1"]).unwrap();
        assert_eq!(run(&cli).unwrap_err().exit_code(), crate::error::EXIT_INPUT);
    }
}
