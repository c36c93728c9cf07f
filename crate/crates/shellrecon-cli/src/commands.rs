//! Subcommand implementations.

use crate::args::{Emit, ForwardArgs, InvertArgs, NdmapArgs, NonuniqArgs, SuiteName, VerifyArgs};
use crate::io::{read_document, write_document};
use crate::suites::{run_suite, Depth, SuiteOutcome};
use shellrecon::forward::{
    evaluate_wave, solve_coefficients, wave_samples_csv, BoundaryData, EvaluationGrid,
};
use shellrecon::inverse::{
    find_nonuniq_pairs, recover_sigma, Measurement, NonuniqOptions, RecoveryOptions,
};
use shellrecon::nd_map::{fmt_f64, norm_sweep, symbol_table, SweepAxis};
use shellrecon::{Dimension, Error, ShellConfig};
use std::path::Path;

/// A command failure: the message to print and the code to exit with.
#[derive(Debug)]
pub struct Failure {
    /// Process exit code, per the documented taxonomy.
    pub code: u8,
    /// Message printed to stderr.
    pub message: String,
}

impl Failure {
    /// A usage or malformed-input failure (exit code 2).
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure {
            code: crate::exit_code(&err),
            message: err.to_string(),
        }
    }
}

fn read_input(flag: &str, spec: &str) -> Result<String, Failure> {
    read_document(spec)
        .map_err(|e| Failure::usage(format!("cannot read {flag} input `{spec}`: {e}")))
}

fn write_output(out: Option<&Path>, content: &str) -> Result<(), Failure> {
    write_document(out, content).map_err(|e| {
        let target = out
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "stdout".into());
        Failure {
            code: 2,
            message: format!("cannot write {target}: {e}"),
        }
    })
}

// ---------------------------------------------------------------------------
// forward
// ---------------------------------------------------------------------------

/// Apply the configuration's ND map to the given Neumann data and write the
/// Dirichlet trace (or the assembled measurement), plus optional interior
/// wave samples.
pub fn cmd_forward(a: &ForwardArgs) -> Result<(), Failure> {
    let config = ShellConfig::new(a.dim, a.r1, a.sigma1)?;
    let g = BoundaryData::from_json(&read_input("--g", &a.g)?)?;
    let meas = Measurement::synthesize(&config, &g)?;
    let doc = match a.emit {
        Emit::Trace => meas.dirichlet.to_json(),
        Emit::Measurement => meas.to_json(),
    };
    write_output(a.out.as_deref(), &format!("{doc}\n"))?;
    if let Some(path) = &a.samples_out {
        let csv = wave_samples(&config, &g, a.samples)?;
        write_output(Some(path), &csv)?;
    }
    Ok(())
}

/// Interior wave samples on an `n x n` product grid: radii `(i+1)/n`, and
/// angles covering a full turn (2-D) or the meridian `phi = 0` (3-D).
fn wave_samples(config: &ShellConfig, g: &BoundaryData, n: u32) -> Result<String, Failure> {
    if n == 0 {
        return Err(Failure::usage("forward: --samples must be at least 1"));
    }
    let coeffs = solve_coefficients(config, g)?;
    let grid = match config.dimension {
        Dimension::Two => {
            let mut pts = Vec::with_capacity((n * n) as usize);
            for i in 0..n {
                let r = (i + 1) as f64 / n as f64;
                for j in 0..n {
                    let phi = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                    pts.push((r, phi));
                }
            }
            EvaluationGrid::disk(&pts)?
        }
        Dimension::Three => {
            let mut pts = Vec::with_capacity((n * n) as usize);
            for i in 0..n {
                let r = (i + 1) as f64 / n as f64;
                for j in 0..n {
                    let theta = std::f64::consts::PI * (j as f64 + 0.5) / n as f64;
                    pts.push((r, theta, 0.0));
                }
            }
            EvaluationGrid::ball(&pts)?
        }
    };
    let values = evaluate_wave(&coeffs, &grid)?;
    Ok(wave_samples_csv(&grid, &values)?)
}

// ---------------------------------------------------------------------------
// ndmap
// ---------------------------------------------------------------------------

fn parse_sweep_values(text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| Failure::usage(format!("ndmap: bad sweep value `{}`: {e}", v.trim())))
        })
        .collect()
}

/// Emit the per-mode symbol table, or a difference-norm sweep, as CSV.
pub fn cmd_ndmap(a: &NdmapArgs) -> Result<(), Failure> {
    let sweep = match &a.sweep {
        Some(spec) => {
            let (axis_text, inline) = match spec.split_once(':') {
                Some((axis, values)) => (axis.trim(), Some(values)),
                None => (spec.trim(), None),
            };
            let axis = match axis_text {
                "sigma1" => SweepAxis::Sigma1ToOne,
                "r1" => SweepAxis::R1ToZero,
                other => {
                    return Err(Failure::usage(format!(
                        "ndmap: unknown sweep axis `{other}` (use `sigma1` or `r1`)"
                    )))
                }
            };
            let values = match (inline, &a.points) {
                (Some(v), None) => parse_sweep_values(v)?,
                (None, Some(p)) => parse_sweep_values(p)?,
                (Some(_), Some(_)) => {
                    return Err(Failure::usage(
                        "ndmap: give sweep values inline or via --points, not both",
                    ))
                }
                (None, None) => {
                    return Err(Failure::usage(
                        "ndmap: --sweep needs values, inline (`--sweep sigma1:2,1.5`) \
                         or via --points",
                    ))
                }
            };
            Some((axis, values))
        }
        None => {
            if a.points.is_some() {
                return Err(Failure::usage("ndmap: --points requires --sweep"));
            }
            None
        }
    };

    let doc = match sweep {
        Some((axis, values)) => {
            // The template supplies the fixed coordinate; the swept one is
            // replaced point by point, so any valid placeholder works.
            let template = match axis {
                SweepAxis::Sigma1ToOne => {
                    let r1 = a
                        .r1
                        .ok_or_else(|| Failure::usage("ndmap: sweeping sigma1 needs --r1"))?;
                    ShellConfig::new(a.dim, r1, a.sigma1.unwrap_or(values[0]))?
                }
                SweepAxis::R1ToZero => {
                    let sigma1 = a
                        .sigma1
                        .ok_or_else(|| Failure::usage("ndmap: sweeping r1 needs --sigma1"))?;
                    ShellConfig::new(a.dim, a.r1.unwrap_or(values[0]), sigma1)?
                }
            };
            norm_sweep(&template, axis, &values, a.nmax)?.to_csv()
        }
        None => {
            let (Some(r1), Some(sigma1)) = (a.r1, a.sigma1) else {
                return Err(Failure::usage(
                    "ndmap: --r1 and --sigma1 are required without --sweep",
                ));
            };
            symbol_table(&ShellConfig::new(a.dim, r1, sigma1)?, a.nmax)?.to_csv()
        }
    };
    write_output(a.out.as_deref(), &doc)
}

// ---------------------------------------------------------------------------
// invert
// ---------------------------------------------------------------------------

/// Recover the core coefficient from one measurement.
pub fn cmd_invert(a: &InvertArgs) -> Result<(), Failure> {
    let meas = match (&a.meas, &a.g, &a.trace) {
        (Some(m), None, None) => Measurement::from_json(&read_input("--meas", m)?)?,
        (None, Some(g), Some(t)) => {
            let neumann = BoundaryData::from_json(&read_input("--g", g)?)?;
            let dirichlet = BoundaryData::from_json(&read_input("--trace", t)?)?;
            Measurement::new(neumann, dirichlet)?
        }
        _ => {
            return Err(Failure::usage(
                "invert: give --meas, or --g together with --trace",
            ))
        }
    };
    if meas.dimension() != a.dim {
        return Err(Failure::usage(format!(
            "invert: measurement is {}-dimensional but --dim {} was given",
            meas.dimension().count(),
            a.dim.count(),
        )));
    }
    let meas = match a.noise {
        Some(level) => {
            eprintln!("invert: applying noise level {level} with seed {}", a.seed);
            meas.with_noise(level, a.seed)?
        }
        None => meas,
    };
    let mut options = RecoveryOptions::default();
    if let Some(tol) = a.consistency_tol {
        options.consistency_tol = tol;
    }
    if a.no_cross_validate {
        options.cross_validate = false;
    }
    let result = recover_sigma(&meas, a.r1, &options)?;
    write_output(a.out.as_deref(), &format!("{}\n", result.to_json()))
}

// ---------------------------------------------------------------------------
// nonuniq
// ---------------------------------------------------------------------------

/// Search for partner configurations indistinguishable on one mode; one
/// JSON document per root, smallest coefficient first.
pub fn cmd_nonuniq(a: &NonuniqArgs) -> Result<(), Failure> {
    let config = ShellConfig::new(a.dim, a.r1, a.sigma1)?;
    let mut options = NonuniqOptions::default();
    if let Some(range) = &a.sigma2_range {
        let Some((lo, hi)) = range.split_once(',') else {
            return Err(Failure::usage(
                "nonuniq: --sigma2-range wants two values as `LO,HI`",
            ));
        };
        let parse = |v: &str| {
            v.trim().parse::<f64>().map_err(|e| {
                Failure::usage(format!(
                    "nonuniq: bad --sigma2-range value `{}`: {e}",
                    v.trim()
                ))
            })
        };
        options.sigma2_min = parse(lo)?;
        options.sigma2_max = parse(hi)?;
    }
    if let Some(points) = a.scan_points {
        options.scan_points = points;
    }
    let pairs = find_nonuniq_pairs(&config, a.r2, a.n, &options)?;
    let mut doc = String::new();
    for pair in &pairs {
        doc.push_str(&pair.to_json());
        doc.push('\n');
    }
    write_output(a.out.as_deref(), &doc)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

/// Run the verification suites and print the pass/fail table.
pub fn cmd_verify(a: &VerifyArgs) -> Result<(), Failure> {
    let depth = if a.full { Depth::Full } else { Depth::Quick };
    let suites: Vec<SuiteName> = match a.suite {
        Some(s) => vec![s],
        None => SuiteName::ALL.to_vec(),
    };
    eprintln!("verify: seed = {} for the randomized suites", a.seed);
    let outcomes: Vec<SuiteOutcome> = suites.iter().map(|&s| run_suite(s, depth, a.seed)).collect();
    print_table(&outcomes);
    let failed = outcomes.iter().filter(|o| !o.passed()).count();
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure {
            code: 1,
            message: format!("verify: {failed} of {} suites failed", outcomes.len()),
        })
    }
}

fn print_table(outcomes: &[SuiteOutcome]) {
    println!(
        "{:<15} {:<25} {:>8}  {:<24} {:<9} {}",
        "suite", "check", "checks", "worst", "bound", "result"
    );
    for outcome in outcomes {
        for group in &outcome.groups {
            println!(
                "{:<15} {:<25} {:>8}  {:<24} {:<9} {}",
                outcome.name,
                group.label,
                group.checks,
                fmt_f64(group.worst),
                group.bound,
                if group.passed { "pass" } else { "FAIL" }
            );
        }
        for error in outcome.errors.iter().take(5) {
            println!("{:<15} error: {error}", outcome.name);
        }
        if outcome.errors.len() > 5 {
            println!(
                "{:<15} ... and {} more errors",
                outcome.name,
                outcome.errors.len() - 5
            );
        }
    }
    let suites_passed = outcomes.iter().filter(|o| o.passed()).count();
    let all = suites_passed == outcomes.len();
    println!(
        "overall: {} ({suites_passed}/{} suites)",
        if all { "pass" } else { "FAIL" },
        outcomes.len()
    );
}
