//! Command-line front end: runs the simple and extended experiments,
//! sweeps the channel angle for figure reproduction, and cross-validates
//! the closed forms against the brute-force pipeline.
//!
//! Exit codes: 0 success, 1 validation failure, 2 usage error, 3
//! invariant-violating input, 4 I/O error.

mod output;

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::num::NonZeroU32;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use output::{csv_line, fmt12, round12, write_json, Sink};
use wfsim_core::channel::{joint_probs_wn, sweep_partial_collapse, ChannelParams, MessageOutcome};
use wfsim_core::friendliness::{
    channel_extended_state, chsh_value, extended_record_state, extended_state, sweep_chsh,
    ChshSpec, ObservableSet,
};
use wfsim_core::qcore::DensityMatrix;
use wfsim_core::scenarios::{collapse_probs, unitary_probs, SourceAmplitudes, WignerBasis};

/// Tolerance on the norm of amplitude pairs entered on the command line;
/// accepted pairs are renormalized to machine precision.
const INPUT_NORM_TOLERANCE: f64 = 1e-9;

/// Deviation threshold for `validate`.
const VALIDATE_TOLERANCE: f64 = 1e-10;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    InvalidInput(String),
    Io(String),
    ValidationFailed,
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::ValidationFailed => 1,
            CliError::Usage(_) => 2,
            CliError::InvalidInput(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<wfsim_core::Error> for CliError {
    fn from(e: wfsim_core::Error) -> Self {
        CliError::InvalidInput(e.to_string())
    }
}

impl From<wfsim_core::qcore::Error> for CliError {
    fn from(e: wfsim_core::qcore::Error) -> Self {
        CliError::InvalidInput(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "wfsim",
    version,
    about = "Exact statistics for Wigner's-friend experiments with a tunable \
             communication channel between friend and superobserver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Collapse and unitary outcome tables for the simple experiment,
    /// plus the joint result/message table when channel angles are given
    Simple(SimpleArgs),
    /// Sweep the channel angle θ and tabulate message-conditioned outcome
    /// probabilities (reproduces the partial-collapse curves)
    SweepSimple(SweepSimpleArgs),
    /// CHSH values of the extended experiment: without records, with
    /// records, and conditioned on channel messages
    Chsh(ChshArgs),
    /// Sweep the channel angle θ and tabulate message-conditioned CHSH
    /// values (reproduces the local-friendliness curves)
    SweepChsh(SweepChshArgs),
    /// Cross-validate closed forms against the brute-force pipeline on
    /// seeded random configurations
    Validate(ValidateArgs),
}

#[derive(Args)]
struct AmplitudeArgs {
    /// Modulus of the source amplitude α
    #[arg(long, default_value_t = FRAC_1_SQRT_2)]
    alpha_mod: f64,
    /// Phase of α in radians
    #[arg(long, default_value_t = 0.0)]
    alpha_phase: f64,
    /// Modulus of the source amplitude β
    #[arg(long, default_value_t = FRAC_1_SQRT_2)]
    beta_mod: f64,
    /// Phase of β in radians
    #[arg(long, default_value_t = 0.0)]
    beta_phase: f64,
    /// Modulus of the measurement amplitude a
    #[arg(long, default_value_t = FRAC_1_SQRT_2)]
    a_mod: f64,
    /// Phase of a in radians
    #[arg(long, default_value_t = 0.0)]
    a_phase: f64,
    /// Modulus of the measurement amplitude b
    #[arg(long, default_value_t = FRAC_1_SQRT_2)]
    b_mod: f64,
    /// Phase of b in radians
    #[arg(long, default_value_t = 0.0)]
    b_phase: f64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct OutputArgs {
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct SimpleArgs {
    #[command(flatten)]
    amplitudes: AmplitudeArgs,
    /// Channel angle θ in radians; enables the result/message table
    #[arg(long)]
    theta: Option<f64>,
    /// Channel angle φ in radians; enables the result/message table
    #[arg(long)]
    phi: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SweepSimpleArgs {
    #[command(flatten)]
    amplitudes: AmplitudeArgs,
    /// Channel angle φ in radians, fixed over the sweep
    #[arg(long, default_value_t = 0.0)]
    phi: f64,
    /// Number of θ samples uniformly covering [0, π]
    #[arg(long, default_value_t = 181)]
    grid: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ChshArgs {
    /// Channel angle θ in radians; enables the conditional CHSH section
    #[arg(long)]
    theta: Option<f64>,
    /// Channel angle φ in radians; enables the conditional CHSH section
    #[arg(long)]
    phi: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SweepChshArgs {
    /// Channel angle φ in radians, fixed over the sweep
    #[arg(long, default_value_t = 0.0)]
    phi: f64,
    /// Number of θ samples uniformly covering [0, π]
    #[arg(long, default_value_t = 181)]
    grid: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ValidateArgs {
    /// Seed for the random configuration stream
    #[arg(long, default_value_t = wfsim_oracle::DEFAULT_SEED)]
    seed: u64,
    /// Number of random configurations to check
    #[arg(long, default_value_t = wfsim_oracle::DEFAULT_TRIALS)]
    trials: u32,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        match &e {
            CliError::Usage(msg) | CliError::InvalidInput(msg) | CliError::Io(msg) => {
                eprintln!("error: {msg}");
            }
            CliError::ValidationFailed => {}
        }
        std::process::exit(e.exit_code());
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simple(args) => cmd_simple(args),
        Command::SweepSimple(args) => cmd_sweep_simple(args),
        Command::Chsh(args) => cmd_chsh(args),
        Command::SweepChsh(args) => cmd_sweep_chsh(args),
        Command::Validate(args) => cmd_validate(args),
    }
}

/// Turns a modulus/phase pair into validated amplitudes: the pair must be
/// normalized within `1e-9` and is then renormalized exactly.
fn normalized_pair(
    name: &str,
    first: (f64, f64),
    second: (f64, f64),
) -> Result<(Complex64, Complex64), CliError> {
    let x = Complex64::from_polar(first.0, first.1);
    let y = Complex64::from_polar(second.0, second.1);
    if !x.is_finite() || !y.is_finite() {
        return Err(CliError::InvalidInput(format!(
            "amplitude pair {name} is not finite"
        )));
    }
    let norm = (x.norm_sqr() + y.norm_sqr()).sqrt();
    if (norm - 1.0).abs() > INPUT_NORM_TOLERANCE {
        return Err(CliError::InvalidInput(format!(
            "amplitude pair {name} has norm {norm}, expected 1 within {INPUT_NORM_TOLERANCE:e}"
        )));
    }
    Ok((x / norm, y / norm))
}

fn parse_amplitudes(args: &AmplitudeArgs) -> Result<(SourceAmplitudes, WignerBasis), CliError> {
    let (alpha, beta) = normalized_pair(
        "(alpha, beta)",
        (args.alpha_mod, args.alpha_phase),
        (args.beta_mod, args.beta_phase),
    )?;
    let (a, b) = normalized_pair(
        "(a, b)",
        (args.a_mod, args.a_phase),
        (args.b_mod, args.b_phase),
    )?;
    Ok((SourceAmplitudes::new(alpha, beta)?, WignerBasis::new(a, b)?))
}

fn channel_params(theta: Option<f64>, phi: Option<f64>) -> Result<Option<ChannelParams>, CliError> {
    if theta.is_none() && phi.is_none() {
        return Ok(None);
    }
    Ok(Some(ChannelParams::new(
        theta.unwrap_or(0.0),
        phi.unwrap_or(0.0),
    )?))
}

fn theta_grid(points: usize) -> Result<Vec<f64>, CliError> {
    if points < 2 {
        return Err(CliError::Usage(format!(
            "--grid must be at least 2, got {points}"
        )));
    }
    Ok((0..points)
        .map(|k| k as f64 * PI / (points - 1) as f64)
        .collect())
}

fn cmd_simple(args: SimpleArgs) -> Result<(), CliError> {
    let (src, wb) = parse_amplitudes(&args.amplitudes)?;
    let params = channel_params(args.theta, args.phi)?;

    let collapse = collapse_probs(&src, &wb);
    let unitary = unitary_probs(&src, &wb);
    let channel = params.map(|p| (p, joint_probs_wn(&src, &wb, &p)));

    let mut sink = Sink::create(args.output.out.as_deref())?;
    match args.output.format {
        Format::Csv => {
            csv_line(&mut sink, &["quantity", "w", "n", "value"])?;
            for (name, dist) in [("collapse", &collapse), ("unitary", &unitary)] {
                for w in ["1", "2", "perp"] {
                    csv_line(&mut sink, &[name, w, "", &fmt12(dist.prob(&[w])?)])?;
                }
            }
            if let Some((params, joint)) = &channel {
                csv_line(
                    &mut sink,
                    &["theta", "", "", &fmt12(params.canonical_theta())],
                )?;
                csv_line(&mut sink, &["phi", "", "", &fmt12(params.canonical_phi())])?;
                for w in ["1", "2", "perp"] {
                    for n in ["0", "1"] {
                        csv_line(&mut sink, &["joint", w, n, &fmt12(joint.prob(&[w, n])?)])?;
                    }
                }
                for n in ["0", "1"] {
                    let given = joint.condition_on("n", n)?;
                    for w in ["1", "2", "perp"] {
                        csv_line(&mut sink, &["conditional", w, n, &fmt12(given.prob(&[w])?)])?;
                    }
                }
                let p_n = joint.marginal(&["n"])?;
                for n in ["0", "1"] {
                    csv_line(&mut sink, &["message", "", n, &fmt12(p_n.prob(&[n])?)])?;
                }
            }
        }
        Format::Json => {
            let table = |dist: &wfsim_core::qcore::OutcomeDistribution| -> Result<serde_json::Value, CliError> {
                Ok(json!({
                    "w1": round12(dist.prob(&["1"])?),
                    "w2": round12(dist.prob(&["2"])?),
                    "perp": round12(dist.prob(&["perp"])?),
                }))
            };
            let mut doc = json!({
                "format": 1,
                "command": "simple",
                "collapse": table(&collapse)?,
                "unitary": table(&unitary)?,
            });
            if let Some((params, joint)) = &channel {
                let mut joint_obj = serde_json::Map::new();
                let mut cond_obj = serde_json::Map::new();
                for w in ["1", "2", "perp"] {
                    let key_w = if w == "perp" {
                        "perp".to_string()
                    } else {
                        format!("w{w}")
                    };
                    for n in ["0", "1"] {
                        joint_obj.insert(
                            format!("{key_w}_n{n}"),
                            json!(round12(joint.prob(&[w, n])?)),
                        );
                    }
                }
                for n in ["0", "1"] {
                    let given = joint.condition_on("n", n)?;
                    for w in ["1", "2", "perp"] {
                        let key_w = if w == "perp" {
                            "perp".to_string()
                        } else {
                            format!("w{w}")
                        };
                        cond_obj.insert(
                            format!("{key_w}_given_n{n}"),
                            json!(round12(given.prob(&[w])?)),
                        );
                    }
                }
                let p_n = joint.marginal(&["n"])?;
                doc["channel"] = json!({
                    "theta": round12(params.canonical_theta()),
                    "phi": round12(params.canonical_phi()),
                    "joint": joint_obj,
                    "conditional": cond_obj,
                    "message": {
                        "n0": round12(p_n.prob(&["0"])?),
                        "n1": round12(p_n.prob(&["1"])?),
                    },
                });
            }
            write_json(&mut sink, &doc)?;
        }
    }
    sink.finish()
}

fn cmd_sweep_simple(args: SweepSimpleArgs) -> Result<(), CliError> {
    let (src, wb) = parse_amplitudes(&args.amplitudes)?;
    let grid = theta_grid(args.grid)?;
    let rows = sweep_partial_collapse(&src, &wb, args.phi, &grid)?;

    let mut sink = Sink::create(args.output.out.as_deref())?;
    match args.output.format {
        Format::Csv => {
            csv_line(
                &mut sink,
                &[
                    "theta",
                    "phi",
                    "p_w1_given_n0",
                    "p_w2_given_n0",
                    "p_w1_given_n1",
                    "p_w2_given_n1",
                    "p_n0",
                ],
            )?;
            for row in &rows {
                csv_line(
                    &mut sink,
                    &[
                        &fmt12(row.theta),
                        &fmt12(row.phi),
                        &fmt12(row.p_w1_given_n0),
                        &fmt12(row.p_w2_given_n0),
                        &fmt12(row.p_w1_given_n1),
                        &fmt12(row.p_w2_given_n1),
                        &fmt12(row.p_n0),
                    ],
                )?;
            }
        }
        Format::Json => {
            let rows: Vec<_> = rows
                .iter()
                .map(|row| {
                    json!({
                        "theta": round12(row.theta),
                        "phi": round12(row.phi),
                        "p_w1_given_n0": round12(row.p_w1_given_n0),
                        "p_w2_given_n0": round12(row.p_w2_given_n0),
                        "p_w1_given_n1": round12(row.p_w1_given_n1),
                        "p_w2_given_n1": round12(row.p_w2_given_n1),
                        "p_n0": round12(row.p_n0),
                    })
                })
                .collect();
            write_json(
                &mut sink,
                &json!({"format": 1, "command": "sweep-simple", "rows": rows}),
            )?;
        }
    }
    sink.finish()
}

fn cmd_chsh(args: ChshArgs) -> Result<(), CliError> {
    let observables = ObservableSet::standard();
    let spec = ChshSpec::default();
    let no_record = chsh_value(
        &DensityMatrix::from_pure(&extended_state()),
        &observables,
        &spec,
    )?;
    let with_record = chsh_value(
        &DensityMatrix::from_pure(&extended_record_state()),
        &observables,
        &spec,
    )?;
    let conditional = match channel_params(args.theta, args.phi)? {
        None => None,
        Some(params) => {
            let rows = sweep_chsh(params.phi(), &[params.theta()])?;
            let unconditioned = chsh_value(&channel_extended_state(&params), &observables, &spec)?;
            Some((params, rows[0].value, rows[1].value, unconditioned))
        }
    };

    let mut sink = Sink::create(args.output.out.as_deref())?;
    match args.output.format {
        Format::Csv => {
            csv_line(&mut sink, &["quantity", "n", "theta", "phi", "value"])?;
            csv_line(
                &mut sink,
                &["chsh_no_record", "", "", "", &fmt12(no_record)],
            )?;
            csv_line(
                &mut sink,
                &["chsh_with_record", "", "", "", &fmt12(with_record)],
            )?;
            if let Some((params, n0, n1, unconditioned)) = &conditional {
                let theta = fmt12(params.canonical_theta());
                let phi = fmt12(params.canonical_phi());
                csv_line(
                    &mut sink,
                    &["chsh_conditional", "0", &theta, &phi, &fmt12(*n0)],
                )?;
                csv_line(
                    &mut sink,
                    &["chsh_conditional", "1", &theta, &phi, &fmt12(*n1)],
                )?;
                csv_line(
                    &mut sink,
                    &[
                        "chsh_unconditioned",
                        "",
                        &theta,
                        &phi,
                        &fmt12(*unconditioned),
                    ],
                )?;
            }
        }
        Format::Json => {
            let mut doc = json!({
                "format": 1,
                "command": "chsh",
                "chsh_no_record": round12(no_record),
                "chsh_with_record": round12(with_record),
            });
            if let Some((params, n0, n1, unconditioned)) = &conditional {
                doc["conditional"] = json!({
                    "theta": round12(params.canonical_theta()),
                    "phi": round12(params.canonical_phi()),
                    "chsh_n0": round12(*n0),
                    "chsh_n1": round12(*n1),
                    "chsh_unconditioned": round12(*unconditioned),
                });
            }
            write_json(&mut sink, &doc)?;
        }
    }
    sink.finish()
}

fn cmd_sweep_chsh(args: SweepChshArgs) -> Result<(), CliError> {
    let grid = theta_grid(args.grid)?;
    let rows = sweep_chsh(args.phi, &grid)?;
    let observables = ObservableSet::standard();
    let spec = ChshSpec::default();

    struct SweepRow {
        theta: f64,
        phi: f64,
        chsh_n0: f64,
        chsh_n1: f64,
        chsh_unconditioned: f64,
    }
    let mut table = Vec::with_capacity(grid.len());
    for pair in rows.chunks(2) {
        debug_assert_eq!(pair[0].n, MessageOutcome::M0);
        let params = ChannelParams::new(pair[0].theta, pair[0].phi)?;
        let unconditioned = chsh_value(&channel_extended_state(&params), &observables, &spec)?;
        table.push(SweepRow {
            theta: pair[0].theta,
            phi: pair[0].phi,
            chsh_n0: pair[0].value,
            chsh_n1: pair[1].value,
            chsh_unconditioned: unconditioned,
        });
    }

    let mut sink = Sink::create(args.output.out.as_deref())?;
    match args.output.format {
        Format::Csv => {
            csv_line(
                &mut sink,
                &["theta", "phi", "chsh_n0", "chsh_n1", "chsh_unconditioned"],
            )?;
            for row in &table {
                csv_line(
                    &mut sink,
                    &[
                        &fmt12(row.theta),
                        &fmt12(row.phi),
                        &fmt12(row.chsh_n0),
                        &fmt12(row.chsh_n1),
                        &fmt12(row.chsh_unconditioned),
                    ],
                )?;
            }
        }
        Format::Json => {
            let rows: Vec<_> = table
                .iter()
                .map(|row| {
                    json!({
                        "theta": round12(row.theta),
                        "phi": round12(row.phi),
                        "chsh_n0": round12(row.chsh_n0),
                        "chsh_n1": round12(row.chsh_n1),
                        "chsh_unconditioned": round12(row.chsh_unconditioned),
                    })
                })
                .collect();
            write_json(
                &mut sink,
                &json!({"format": 1, "command": "sweep-chsh", "rows": rows}),
            )?;
        }
    }
    sink.finish()
}

fn cmd_validate(args: ValidateArgs) -> Result<(), CliError> {
    let trials = NonZeroU32::new(args.trials)
        .ok_or_else(|| CliError::Usage("--trials must be at least 1".into()))?;
    let report = wfsim_oracle::cross_validate(args.seed, trials)?;
    println!("{report}");
    if report.within(VALIDATE_TOLERANCE) {
        println!("result: PASS (tolerance {VALIDATE_TOLERANCE:e})");
        Ok(())
    } else {
        println!("result: FAIL (tolerance {VALIDATE_TOLERANCE:e})");
        Err(CliError::ValidationFailed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_needs_two_points() {
        assert!(matches!(theta_grid(1), Err(CliError::Usage(_))));
        let grid = theta_grid(3).unwrap();
        assert_eq!(grid.len(), 3);
        assert_eq!(grid[0], 0.0);
        assert!((grid[2] - PI).abs() < 1e-15);
    }

    #[test]
    #[allow(clippy::approx_constant)] // deliberately truncated input
    fn near_normalized_input_is_accepted_and_renormalized() {
        let (x, y) =
            normalized_pair("(alpha, beta)", (0.707106781, 0.0), (0.707106781, 0.0)).unwrap();
        assert!((x.norm_sqr() + y.norm_sqr() - 1.0).abs() < 1e-15);
        assert!(SourceAmplitudes::new(x, y).is_ok());
    }

    #[test]
    fn unnormalized_input_is_rejected() {
        let err = normalized_pair("(alpha, beta)", (1.0, 0.0), (1.0, 0.0)).unwrap_err();
        assert!(matches!(err, CliError::InvalidInput(_)));
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn validation_threshold_drives_the_exit_code() {
        assert_eq!(CliError::ValidationFailed.exit_code(), 1);
        let report = wfsim_oracle::cross_validate(1, NonZeroU32::new(2).unwrap()).unwrap();
        assert!(report.within(VALIDATE_TOLERANCE));
        // negative control: an impossible threshold trips the failure path
        assert!(!report.within(0.0));
    }
}
