use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ghz_swap::label::CompositeSystem;
use ghz_swap::protocol::{
    qkd_session, qpc_session, qss_session, BasisRule, Channel, ProtocolTranscript, QpcOptions,
};
use ghz_swap::swap::{
    oracle_outcomes, predict_multi, swap_preserves_state, verify_all, SameStateVerdict, SwapSpec,
    VerificationReport,
};
use ghz_swap::sweep::{bell_pairs, random_specs, sghz_pairs, sghz_uniform};
use ghz_swap::{Error, GhzLabel, Sign};

const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;
const EXIT_NEGATIVE: u8 = 4;

/// Entanglement swapping of Bell/GHZ/SGHZ states: closed-form predictions,
/// oracle verification and protocol simulations.
#[derive(Debug, Parser)]
#[command(name = "ghz-swap", version)]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, env = "GHZ_SWAP_SEED", default_value_t = 0)]
    seed: u64,

    /// Print progress and per-item detail to stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Debug, Args)]
struct FormatArgs {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,

    /// Shorthand for `--format json`.
    #[arg(long)]
    json: bool,
}

impl FormatArgs {
    fn get(&self) -> Format {
        if self.json {
            Format::Json
        } else {
            self.format
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Predict the outcomes of swapping the given states.
    Swap {
        /// State labels, `m:d:±` or `GHZ(bits,±)`.
        #[arg(required = true, num_args = 2..)]
        labels: Vec<GhzLabel>,

        /// Leading particles measured per state, comma separated (default: half of each).
        #[arg(long, value_delimiter = ',')]
        cut: Option<Vec<usize>>,

        #[command(flatten)]
        format: FormatArgs,
    },
    /// Check closed-form predictions against the dense oracle.
    Verify {
        #[command(flatten)]
        scope: VerifyScope,

        #[command(flatten)]
        format: FormatArgs,
    },
    /// Evaluate the "same state" predicate for a list of states.
    Same {
        #[arg(required = true, num_args = 2..)]
        labels: Vec<GhzLabel>,

        /// Also run the dense oracle.
        #[arg(long)]
        check: bool,

        #[command(flatten)]
        format: FormatArgs,
    },
    /// Run a protocol simulation and emit its JSON transcript.
    #[command(subcommand)]
    Protocol(ProtocolCommand),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct VerifyScope {
    /// All 16 ordered pairs of Bell states.
    #[arg(long)]
    bell_exhaustive: bool,

    /// All ordered pairs of M-qubit SGHZ states.
    #[arg(long, value_name = "M")]
    sghz: Option<usize>,

    /// All products of N SGHZ states with M qubits each.
    #[arg(long, num_args = 2, value_names = ["N", "M"])]
    multi: Option<Vec<usize>>,

    /// K random SGHZ products (2 to 4 states, at most 16 qubits).
    #[arg(long, value_name = "K")]
    random: Option<usize>,
}

#[derive(Debug, Args)]
struct ChannelArgs {
    /// Intercept-resend probability per transmitted particle.
    #[arg(long, default_value_t = 0.0)]
    eve: f64,

    /// Decoy checks per transmitted state.
    #[arg(long, default_value_t = 0)]
    decoys: usize,

    /// Check basis for decoys.
    #[arg(long, value_enum, default_value_t = DecoyBasis::Random)]
    decoy_basis: DecoyBasis,

    /// Write the transcript here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DecoyBasis {
    Random,
    Z,
    X,
}

impl ChannelArgs {
    fn channel(&self) -> Channel {
        let mut channel = if self.eve > 0.0 || !(0.0..=1.0).contains(&self.eve) {
            Channel::intercept(self.eve)
        } else {
            Channel::clean()
        };
        channel.decoy.per_state = self.decoys;
        channel.decoy.basis = match self.decoy_basis {
            DecoyBasis::Random => BasisRule::Random,
            DecoyBasis::Z => BasisRule::Computational,
            DecoyBasis::X => BasisRule::Hadamard,
        };
        channel
    }
}

#[derive(Debug, Subcommand)]
enum ProtocolCommand {
    /// Key distribution with n slots of 2l-qubit SGHZ states.
    Qkd {
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        l: usize,
        #[command(flatten)]
        channel: ChannelArgs,
    },
    /// Private comparison of two integers through a third party.
    Qpc {
        #[arg(long)]
        x: u64,
        #[arg(long)]
        y: u64,
        #[arg(long, default_value_t = 8)]
        bits: usize,
        /// Compare x·M and y·M instead.
        #[arg(long, value_name = "M")]
        amplify: Option<u64>,
        #[command(flatten)]
        channel: ChannelArgs,
    },
    /// Secret sharing from Alice to several Bobs.
    Qss {
        #[arg(long, default_value_t = 3)]
        parties: usize,
        #[command(flatten)]
        channel: ChannelArgs,
    },
}

#[derive(Debug, Serialize)]
struct OutcomeRow {
    measured: GhzLabel,
    residual: Option<GhzLabel>,
    coeff_sign: Option<Sign>,
    probability: f64,
}

#[derive(Debug, Serialize)]
struct SwapOutput {
    spec: String,
    source: &'static str,
    outcomes: Vec<OutcomeRow>,
    all_same: bool,
}

#[derive(Debug, Serialize)]
struct SameStateOutput {
    states: Vec<GhzLabel>,
    verdict: SameStateVerdict,
    oracle_all_same: Option<bool>,
}

#[derive(Debug, Serialize)]
struct VerifyOutput {
    total: usize,
    passed: usize,
    reports: Vec<VerificationReport>,
}

enum Failure {
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::ResourceLimit { .. } => EXIT_RESOURCE,
                _ => EXIT_USAGE,
            })
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Swap {
            labels,
            cut,
            format,
        } => cmd_swap(labels, cut.as_deref(), format.get(), cli.verbose),
        Command::Verify { scope, format } => cmd_verify(scope, cli.seed, format.get(), cli.verbose),
        Command::Same {
            labels,
            check,
            format,
        } => cmd_same(labels, *check, format.get()),
        Command::Protocol(p) => cmd_protocol(p, cli.seed, cli.verbose),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output types always serialize")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |x| x.to_string())
}

fn cmd_swap(
    labels: &[GhzLabel],
    cut: Option<&[usize]>,
    format: Format,
    verbose: u8,
) -> Result<u8, Failure> {
    let spec = match cut {
        Some(cut) => SwapSpec::new(CompositeSystem::new(labels.to_vec())?, cut.to_vec())?,
        None => SwapSpec::half_cut(labels.to_vec())?,
    };
    let output = match predict_multi(&spec) {
        Ok(pred) => SwapOutput {
            spec: spec.to_string(),
            source: "closed_form",
            all_same: pred.all_same(),
            outcomes: pred
                .pairs
                .iter()
                .map(|p| OutcomeRow {
                    measured: p.measured,
                    residual: Some(p.residual),
                    coeff_sign: Some(p.coeff_sign),
                    probability: p.probability,
                })
                .collect(),
        },
        Err(Error::ClosedFormUnavailable(why)) => {
            eprintln!("note: no closed form ({why}); using the dense oracle");
            let outcomes = oracle_outcomes(&spec)?;
            SwapOutput {
                spec: spec.to_string(),
                source: "oracle",
                all_same: outcomes.iter().all(|o| o.residual == Some(o.outcome)),
                outcomes: outcomes
                    .iter()
                    .map(|o| OutcomeRow {
                        measured: o.outcome,
                        residual: o.residual,
                        coeff_sign: o.phase_sign(),
                        probability: o.probability,
                    })
                    .collect(),
            }
        }
        Err(e) => return Err(e.into()),
    };
    if verbose > 0 {
        eprintln!("{} outcomes from {}", output.outcomes.len(), output.source);
    }
    match format {
        Format::Json => println!("{}", to_json(&output)),
        Format::Table => {
            println!("spec: {}", output.spec);
            println!("source: {}", output.source.replace('_', " "));
            println!(
                "{:<16} {:<16} {:<5} probability",
                "measured", "residual", "sign"
            );
            for row in &output.outcomes {
                println!(
                    "{:<16} {:<16} {:<5} {:.6}",
                    row.measured.to_string(),
                    opt(row.residual),
                    opt(row.coeff_sign),
                    row.probability
                );
            }
            println!("all same: {}", if output.all_same { "yes" } else { "no" });
        }
    }
    Ok(0)
}

fn cmd_verify(scope: &VerifyScope, seed: u64, format: Format, verbose: u8) -> Result<u8, Failure> {
    let specs = if scope.bell_exhaustive {
        bell_pairs()
    } else if let Some(m) = scope.sghz {
        sghz_pairs(m, m)?
    } else if let Some(nm) = &scope.multi {
        sghz_uniform(nm[0], nm[1])?
    } else if let Some(k) = scope.random {
        random_specs(k, seed, 16)?
    } else {
        unreachable!("clap enforces one scope")
    };
    if let Some(big) = specs
        .iter()
        .find(|s| s.total_qubits() > ghz_swap::dense::MAX_DENSE_QUBITS)
    {
        return Err(Error::ResourceLimit {
            qubits: big.total_qubits(),
            max: ghz_swap::dense::MAX_DENSE_QUBITS,
        }
        .into());
    }
    if verbose > 0 {
        eprintln!("verifying {} specs", specs.len());
    }
    let reports = verify_all(&specs)?;
    let passed = reports.iter().filter(|r| r.passed()).count();
    let output = VerifyOutput {
        total: reports.len(),
        passed,
        reports,
    };
    match format {
        Format::Json => println!("{}", to_json(&output)),
        Format::Table => {
            for r in &output.reports {
                if r.passed() && verbose == 0 {
                    continue;
                }
                let status = if r.passed() { "pass" } else { "FAIL" };
                println!(
                    "{status} {} outcomes={} all_same={}",
                    r.spec, r.outcomes, r.oracle_all_same
                );
                for m in &r.mismatches {
                    println!("    {m}");
                }
            }
            println!("{}/{} passed", output.passed, output.total);
        }
    }
    Ok(if passed == output.total {
        0
    } else {
        EXIT_MISMATCH
    })
}

fn cmd_same(labels: &[GhzLabel], check: bool, format: Format) -> Result<u8, Failure> {
    let verdict = swap_preserves_state(labels);
    let oracle = if check {
        let spec = SwapSpec::half_cut(labels.to_vec())?;
        let outcomes = oracle_outcomes(&spec)?;
        Some(outcomes.iter().all(|o| o.residual == Some(o.outcome)))
    } else {
        None
    };
    let output = SameStateOutput {
        states: labels.to_vec(),
        verdict,
        oracle_all_same: oracle,
    };
    match format {
        Format::Json => println!("{}", to_json(&output)),
        Format::Table => {
            println!(
                "same: {} ({:?})",
                if verdict.same { "yes" } else { "no" },
                verdict.reason
            );
            if let Some(o) = oracle {
                println!("oracle: {}", if o { "same" } else { "different" });
            }
        }
    }
    Ok(match oracle {
        Some(o) if o != verdict.same => EXIT_MISMATCH,
        _ => 0,
    })
}

fn cmd_protocol(cmd: &ProtocolCommand, seed: u64, verbose: u8) -> Result<u8, Failure> {
    let (transcript, out): (ProtocolTranscript, &Option<PathBuf>) = match cmd {
        ProtocolCommand::Qkd { n, l, channel } => {
            (qkd_session(*n, *l, seed, &channel.channel())?, &channel.out)
        }
        ProtocolCommand::Qpc {
            x,
            y,
            bits,
            amplify,
            channel,
        } => (
            qpc_session(
                *x,
                *y,
                *bits,
                seed,
                &channel.channel(),
                QpcOptions { amplify: *amplify },
            )?,
            &channel.out,
        ),
        ProtocolCommand::Qss { parties, channel } => (
            qss_session(*parties, seed, &channel.channel(), channel.decoys)?,
            &channel.out,
        ),
    };
    let text = to_json(&transcript);
    match out {
        Some(path) => {
            fs::write(path, format!("{text}\n"))
                .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            println!(
                "{:?} seed={} success={} detected={}",
                transcript.protocol,
                transcript.seed,
                transcript.success,
                transcript.checks.eavesdropping_detected
            );
        }
        None => println!("{text}"),
    }
    if verbose > 0 {
        eprintln!(
            "decoys {}/{} failed, slot checks {}/{} failed",
            transcript.checks.decoy_failures,
            transcript.checks.decoy_checks,
            transcript.checks.slot_failures,
            transcript.checks.slot_checks
        );
    }
    Ok(if transcript.success { 0 } else { EXIT_NEGATIVE })
}
