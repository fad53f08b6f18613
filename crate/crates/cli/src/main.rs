//! Command-line harness: built-in self-test suites, scenario classification
//! and scenario generation.
//!
//! Exit codes: 0 verdict produced / all tests pass, 1 self-test failure,
//! 2 internal error, 3 input rejection.

use std::fs;
use std::io::Read;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use kaehlerlab::classify::generators::{
    gen_flat, gen_product_type_instance, gen_random_instance, gen_totally_geodesic_product,
    RandomOptions,
};
use kaehlerlab::classify::AmbientSpec;
use kaehlerlab::classify::{classify_scenario, ClassifyMode};
use kaehlerlab::selftest;
use kaehlerlab::Tolerances;

use kaehlerlab_cli::report;
use kaehlerlab_cli::scenario::{parse_scenario, render_scenario};

const EXIT_OK: u8 = 0;
const EXIT_SELFTEST_FAILURE: u8 = 1;
const EXIT_INTERNAL: u8 = 2;
const EXIT_REJECTED: u8 = 3;

#[derive(Parser)]
#[command(
    name = "kaehlerlab",
    version,
    about = "Pointwise curvature laboratory for totally real submanifolds of Kaehler manifolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the built-in identity suites and print one line per suite.
    Selftest {
        /// Only run suites whose name contains this substring.
        #[arg(long)]
        filter: Option<String>,
        /// Negative-control switch: evaluate the product curvature with the
        /// flipped cross-term sign, which must fail the oracle suite.
        #[arg(long, hide = true)]
        flip_cross_sign: bool,
    },
    /// Classify a scenario file (use "-" to read standard input).
    Classify {
        /// Scenario path or "-".
        path: String,
        /// Which semiparallelism hypothesis gates the intrinsic classifier.
        #[arg(long, value_enum, default_value_t = ModeArg::McSemiparallel)]
        mode: ModeArg,
        /// Report format.
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
        /// Condition-gate tolerance override.
        #[arg(long, allow_negative_numbers = true)]
        tol_gate: Option<f64>,
        /// Internal-consistency tolerance override.
        #[arg(long)]
        tol_internal: Option<f64>,
    },
    /// Write a scenario file for one of the built-in generators.
    Generate {
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Submanifold dimension n (ambient real dimension is 2n).
        #[arg(long)]
        n: usize,
        /// Curvature parameter for product-type instances.
        #[arg(long, allow_negative_numbers = true)]
        c: Option<f64>,
        /// First-factor complex dimension for product models.
        #[arg(long)]
        k: Option<usize>,
        /// Holomorphic sectional curvature parameter for product models.
        #[arg(long, allow_negative_numbers = true)]
        mu: Option<f64>,
        /// Seed for the deterministic random generators.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random generator: remove all traces of h (minimal point).
        #[arg(long)]
        traceless: bool,
        /// Random generator: simultaneously diagonal shape operators.
        #[arg(long)]
        commuting: bool,
        /// Random generator: ambient kind (product requires --k and --mu).
        #[arg(long, value_enum, default_value_t = AmbientArg::Flat)]
        ambient: AmbientArg,
        /// Output path, or "-" for standard output.
        #[arg(long, default_value = "-")]
        out: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    #[value(name = "mc-semiparallel")]
    McSemiparallel,
    #[value(name = "semiparallel")]
    Semiparallel,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Machine,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    #[value(name = "product_type")]
    ProductType,
    #[value(name = "totally_geodesic_product")]
    TotallyGeodesicProduct,
    #[value(name = "random")]
    Random,
    #[value(name = "flat")]
    Flat,
}

#[derive(Clone, Copy, ValueEnum)]
enum AmbientArg {
    Flat,
    Product,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Selftest {
            filter,
            flip_cross_sign,
        } => cmd_selftest(filter.as_deref(), flip_cross_sign),
        Command::Classify {
            path,
            mode,
            format,
            tol_gate,
            tol_internal,
        } => cmd_classify(&path, mode, format, tol_gate, tol_internal),
        Command::Generate {
            kind,
            n,
            c,
            k,
            mu,
            seed,
            traceless,
            commuting,
            ambient,
            out,
        } => cmd_generate(kind, n, c, k, mu, seed, traceless, commuting, ambient, &out),
    }
}

fn cmd_selftest(filter: Option<&str>, flip_cross_sign: bool) -> ExitCode {
    let start = Instant::now();
    let outcomes = selftest::run(filter, flip_cross_sign);
    if outcomes.is_empty() {
        eprintln!("no suite matches the filter");
        return ExitCode::from(EXIT_REJECTED);
    }
    let mut all_passed = true;
    for suite in &outcomes {
        println!(
            "suite {:<32} {}  max defect {:.3e}  ({} checks)",
            suite.name,
            if suite.passed { "PASS" } else { "FAIL" },
            suite.max_defect,
            suite.checks.len()
        );
        for check in &suite.checks {
            println!(
                "    [{}] {} = {:.3e} ({} {:.1e})",
                if check.ok { "ok" } else { "FAILED" },
                check.label,
                check.value,
                match check.sense {
                    selftest::Sense::AtMost => "at most",
                    selftest::Sense::AtLeast => "at least",
                },
                check.bound,
            );
            if !check.ok {
                all_passed = false;
            }
        }
    }
    let passed = outcomes.iter().filter(|s| s.passed).count();
    println!(
        "selftest: {passed}/{} suites passed in {:.2} s",
        outcomes.len(),
        start.elapsed().as_secs_f64()
    );
    if all_passed {
        ExitCode::from(EXIT_OK)
    } else {
        ExitCode::from(EXIT_SELFTEST_FAILURE)
    }
}

fn cmd_classify(
    path: &str,
    mode: ModeArg,
    format: FormatArg,
    tol_gate: Option<f64>,
    tol_internal: Option<f64>,
) -> ExitCode {
    let start = Instant::now();
    let text = match read_input(path) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_REJECTED);
        }
    };
    let scenario = match parse_scenario(&text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_REJECTED);
        }
    };
    let mut tol = Tolerances::default();
    if let Some(gate) = tol_gate {
        tol.gate = gate;
    }
    if let Some(internal) = tol_internal {
        tol.internal = internal;
    }
    let mode = match mode {
        ModeArg::McSemiparallel => ClassifyMode::MeanCurvatureSemiparallel,
        ModeArg::Semiparallel => ClassifyMode::Semiparallel,
    };
    let verdict = match classify_scenario(&scenario, mode, &tol) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: scenario rejected: {}", one_based_diagnostic(&e));
            return ExitCode::from(EXIT_REJECTED);
        }
    };
    let duration_ms = start.elapsed().as_millis() as u64;
    let doc = report::from_verdict(
        &verdict,
        &scenario.name,
        report::scenario_hash(text.as_bytes()),
        duration_ms,
    );
    let rendered = match format {
        FormatArg::Text => Ok(report::render_text(&doc)),
        FormatArg::Machine => report::to_json(&doc).map(|mut s| {
            s.push('\n');
            s
        }),
    };
    match rendered {
        Ok(s) => {
            print!("{s}");
            ExitCode::from(EXIT_OK)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_generate(
    kind: KindArg,
    n: usize,
    c: Option<f64>,
    k: Option<usize>,
    mu: Option<f64>,
    seed: u64,
    traceless: bool,
    commuting: bool,
    ambient: AmbientArg,
    out: &str,
) -> ExitCode {
    let scenario = match kind {
        KindArg::ProductType => match c {
            Some(c) => gen_product_type_instance(n, c),
            None => {
                eprintln!("error: --kind product_type requires --c");
                return ExitCode::from(EXIT_REJECTED);
            }
        },
        KindArg::TotallyGeodesicProduct => match (k, mu) {
            (Some(k), Some(mu)) => gen_totally_geodesic_product(n, k, mu),
            _ => {
                eprintln!("error: --kind totally_geodesic_product requires --k and --mu");
                return ExitCode::from(EXIT_REJECTED);
            }
        },
        KindArg::Flat => gen_flat(n, seed),
        KindArg::Random => {
            let ambient = match ambient {
                AmbientArg::Flat => AmbientSpec::Flat,
                AmbientArg::Product => match (k, mu) {
                    (Some(k), Some(mu)) => AmbientSpec::Product { k, mu },
                    _ => {
                        eprintln!("error: --ambient product requires --k and --mu");
                        return ExitCode::from(EXIT_REJECTED);
                    }
                },
            };
            gen_random_instance(
                n,
                seed,
                &RandomOptions {
                    ambient,
                    traceless,
                    commuting,
                    scale: 1.0,
                },
            )
        }
    };
    let scenario = match scenario {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_REJECTED);
        }
    };
    let rendered = match render_scenario(&scenario) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_INTERNAL);
        }
    };
    if out == "-" {
        print!("{rendered}");
        return ExitCode::from(EXIT_OK);
    }
    match fs::write(out, rendered) {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(e) => {
            eprintln!("error: writing {out}: {e}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}

/// Geometry errors carry 0-based indices; scenario files are 1-based.
fn one_based_diagnostic(e: &kaehlerlab::GeomError) -> String {
    use kaehlerlab::GeomError;
    match e {
        GeomError::CubicConflict {
            k,
            i,
            j,
            existing,
            new,
        } => format!(
            "conflicting h entries at ({}, {}, {}): {existing} vs {new}",
            k + 1,
            i + 1,
            j + 1
        ),
        GeomError::CurvatureConflict {
            a,
            b,
            c,
            d,
            existing,
            new,
        } => format!(
            "conflicting fixture entries at ({}, {}, {}, {}): {existing} vs {new}",
            a + 1,
            b + 1,
            c + 1,
            d + 1
        ),
        other => other.to_string(),
    }
}

fn read_input(path: &str) -> std::io::Result<String> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        Ok(buf)
    } else {
        fs::read_to_string(path)
    }
}
