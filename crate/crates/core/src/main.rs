use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use forge_core::cgraph::DegreeTwoInput;
use forge_core::extend::{certify, extend, Basis, CertificationReport, CertifyOptions, Pseudoexpectation};
use forge_core::forests::{check_counting_bounds, enumerate_good_forests, enumerate_good_trees, verify_mobius};
use forge_core::harness::{
    laurent_fit, laurent_matrix, projector_instance, read_matrix_file, selftest, sk_run, write_matrix, ProjectorKind,
    SelftestLevel, SkOptions, SkStatus,
};
use forge_core::incoherence::{check_theorem1, check_theorem_deg6, TupleMode, DEFAULT_RANDOM_TUPLES};
use forge_core::{ForgeError, Result};
use serde_json::{json, Value};

/// Degree-2 pseudomoment extensions over the hypercube.
#[derive(Parser)]
#[command(name = "forge", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extend a matrix file to a pseudoexpectation and certify it.
    Extend {
        #[arg(long)]
        matrix: String,
        /// Even degree 2d.
        #[arg(long)]
        degree: usize,
        #[command(flatten)]
        cert: CertArgs,
        /// Write the pseudoexpectation JSON here instead of embedding it.
        #[arg(long)]
        output: Option<String>,
    },
    /// Certify a serialized pseudoexpectation.
    Certify {
        #[arg(long)]
        pseudo: String,
        /// Needed for the multiharmonic basis.
        #[arg(long)]
        matrix: Option<String>,
        #[command(flatten)]
        cert: CertArgs,
    },
    /// Incoherence quantities and the theorem conditions for a matrix file.
    Incoherence {
        #[arg(long)]
        matrix: String,
        #[arg(long, default_value_t = 4)]
        degree: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,
        #[arg(long, default_value_t = DEFAULT_RANDOM_TUPLES)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also evaluate the degree-6 low-rank condition at this t_pow.
        #[arg(long)]
        t_pow: Option<f64>,
    },
    /// Laurent instance: extension, certification and leading-order fit.
    Laurent {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 4)]
        degree: usize,
        #[arg(long)]
        certify: bool,
        #[command(flatten)]
        cert: CertArgs,
    },
    /// Random projector-like instance.
    Projector {
        #[arg(long)]
        n: usize,
        /// Codimension (high rank) or rank (low rank).
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = KindArg::High)]
        kind: KindArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        degree: usize,
        #[arg(long)]
        certify: bool,
        #[command(flatten)]
        cert: CertArgs,
        /// Write the generated matrix here.
        #[arg(long)]
        save_matrix: Option<String>,
    },
    /// Degree-6 construction on a GOE sample.
    Sk {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long)]
        t_pow: Option<f64>,
        #[arg(long, default_value_t = forge_core::extend::DEGREE6_CONSTANT)]
        constant: f64,
        #[arg(long)]
        no_certify: bool,
        #[arg(long, default_value_t = forge_core::extend::DENSE_EIG_LIMIT)]
        limit: usize,
    },
    /// Enumerate good forests and check the Möbius relations and counting bounds.
    Forests {
        #[arg(long)]
        leaves: usize,
        /// Print each forest in Graphviz form.
        #[arg(long)]
        dot: bool,
    },
    /// Run the brute-force identity suite.
    Selftest {
        #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
        level: LevelArg,
    },
}

#[derive(Args, Clone)]
struct CertArgs {
    #[arg(long, value_enum, default_value_t = BasisArg::Monomial)]
    basis: BasisArg,
    #[arg(long, default_value_t = 1e-8)]
    tolerance: f64,
    #[arg(long, default_value_t = forge_core::extend::DENSE_EIG_LIMIT)]
    limit: usize,
}

impl CertArgs {
    fn options(&self) -> CertifyOptions {
        let basis = match self.basis {
            BasisArg::Monomial => Basis::Monomial,
            BasisArg::Multiharmonic => Basis::Multiharmonic,
        };
        CertifyOptions { basis, tolerance: self.tolerance, limit: self.limit, ..Default::default() }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisArg {
    Monomial,
    Multiharmonic,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Auto,
    Exact,
    Sampled,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    High,
    Low,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

/// What the command produced and whether its verdict was positive.
struct Outcome {
    report: Value,
    ok: bool,
}

fn half_degree(degree: usize) -> Result<usize> {
    if degree == 0 || degree % 2 == 1 {
        return Err(ForgeError::InvalidArgument(format!("degree must be a positive even number, got {degree}")));
    }
    Ok(degree / 2)
}

fn load_input(path: &str) -> Result<(DegreeTwoInput, f64)> {
    let file = read_matrix_file(path)?;
    Ok((DegreeTwoInput::new_psd(file.matrix)?, file.asymmetry))
}

fn extend_and_certify(m: &DegreeTwoInput, degree: usize, cert: &CertArgs) -> Result<(Pseudoexpectation, CertificationReport)> {
    let e = extend(m, half_degree(degree)?)?;
    let report = certify(&e, Some(m), &cert.options())?;
    Ok((e, report))
}

fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Extend { matrix, degree, cert, output } => {
            let (m, asymmetry) = load_input(&matrix)?;
            let (e, report) = extend_and_certify(&m, degree, &cert)?;
            let values: Value = serde_json::from_str(&e.to_json()?)?;
            let pseudo = match output {
                Some(path) => {
                    std::fs::write(&path, e.to_json()?)?;
                    json!(path)
                }
                None => values,
            };
            Ok(Outcome {
                ok: report.passed(),
                report: json!({ "input_asymmetry": asymmetry, "pseudoexpectation": pseudo, "certification": report }),
            })
        }
        Command::Certify { pseudo, matrix, cert } => {
            let text = std::fs::read_to_string(&pseudo).map_err(|e| ForgeError::Io(format!("{pseudo}: {e}")))?;
            let e = Pseudoexpectation::from_json(&text)?;
            let m = matrix.as_deref().map(load_input).transpose()?.map(|(m, _)| m);
            let report = certify(&e, m.as_ref(), &cert.options())?;
            Ok(Outcome { ok: report.passed(), report: json!({ "certification": report }) })
        }
        Command::Incoherence { matrix, degree, mode, samples, seed, t_pow } => {
            half_degree(degree)?;
            let (m, asymmetry) = load_input(&matrix)?;
            let mode = match mode {
                ModeArg::Auto => TupleMode::Auto,
                ModeArg::Exact => TupleMode::Exact,
                ModeArg::Sampled => TupleMode::Sampled { random: samples, seed },
            };
            let report = check_theorem1(&m, degree, mode)?;
            let deg6 = t_pow.map(|t| check_theorem_deg6(&m, t, mode)).transpose()?;
            Ok(Outcome {
                ok: report.verdict && deg6.as_ref().is_none_or(|r| r.verdict),
                report: json!({ "input_asymmetry": asymmetry, "incoherence": report, "degree6": deg6 }),
            })
        }
        Command::Laurent { n, alpha, degree, certify: run_cert, cert } => {
            let d = half_degree(degree)?;
            let m = laurent_matrix(n, alpha)?;
            let fits = (2..=degree.min(4)).step_by(2).map(|k| laurent_fit(n, alpha, k)).collect::<Result<Vec<_>>>()?;
            let mut report = json!({ "n": n, "alpha": alpha, "degree": degree, "leading_order": fits });
            let mut ok = true;
            if run_cert {
                let e = extend(&m, d)?;
                let c = certify(&e, Some(&m), &cert.options())?;
                ok = c.passed();
                report["certification"] = serde_json::to_value(c)?;
            }
            Ok(Outcome { report, ok })
        }
        Command::Projector { n, rank, alpha, kind, seed, degree, certify: run_cert, cert, save_matrix } => {
            let kind = match kind {
                KindArg::High => ProjectorKind::HighRank,
                KindArg::Low => ProjectorKind::LowRank,
            };
            let m = projector_instance(n, rank, alpha, kind, seed)?;
            if let Some(path) = &save_matrix {
                std::fs::write(path, write_matrix(&m.matrix()))?;
            }
            let mut report = json!({
                "n": n, "rank": rank, "alpha": alpha, "kind": kind, "seed": seed,
                "lambda_min": m.lambda_min(), "op_norm": m.op_norm(),
            });
            let mut ok = true;
            if run_cert {
                let m = DegreeTwoInput::new_psd(m.matrix())?;
                let (_, c) = extend_and_certify(&m, degree, &cert)?;
                ok = c.passed();
                report["certification"] = serde_json::to_value(c)?;
            }
            Ok(Outcome { report, ok })
        }
        Command::Sk { n, seed, alpha, delta, t_pow, constant, no_certify, limit } => {
            let opts = SkOptions {
                n,
                seed,
                alpha,
                delta,
                t_pow,
                constant,
                certify: !no_certify,
                certify_options: CertifyOptions { limit, ..Default::default() },
            };
            let report = sk_run(&opts)?;
            let ok = report.status == SkStatus::Constructed && report.certification.as_ref().is_none_or(|c| c.passed());
            Ok(Outcome { report: serde_json::to_value(report)?, ok })
        }
        Command::Forests { leaves, dot } => {
            half_degree(leaves)?;
            let forests = enumerate_good_forests(leaves)?;
            let trees = enumerate_good_trees(leaves)?;
            let mobius = verify_mobius(leaves)?;
            let counting = check_counting_bounds(leaves)?;
            if dot {
                let mut out = std::io::stdout();
                for f in forests.iter() {
                    let _ = writeln!(out, "{}", f.to_dot());
                }
            }
            let ok = counting.holds && mobius.passed;
            Ok(Outcome {
                ok,
                report: json!({
                    "leaves": leaves,
                    "forests": forests.len(),
                    "trees": trees.len(),
                    "tree_mu_sum": trees.iter().map(|t| t.mu()).sum::<i128>().to_string(),
                    "mobius_ok": mobius.passed,
                    "mobius_counterexample": mobius.counterexample,
                    "counting": {
                        "count": counting.count, "lower": counting.lower, "upper": counting.upper,
                        "max_vertices": counting.max_vertices, "max_edges": counting.max_edges,
                        "max_internal": counting.max_internal, "holds": counting.holds,
                    },
                }),
            })
        }
        Command::Selftest { level } => {
            let level = match level {
                LevelArg::Quick => SelftestLevel::Quick,
                LevelArg::Full => SelftestLevel::Full,
            };
            let checks = selftest(level);
            for c in &checks {
                eprintln!("{} {:<26} {:>8.3}s  {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.seconds, c.detail);
            }
            Ok(Outcome { ok: checks.iter().all(|c| c.passed), report: json!({ "level": level, "checks": checks }) })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(outcome) => {
            let text = serde_json::to_string_pretty(&outcome.report).expect("reports serialize");
            // A closed pipe downstream is not an error of ours.
            let _ = writeln!(std::io::stdout(), "{text}");
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
