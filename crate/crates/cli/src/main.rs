//! `rankcert`: run certificates on matrix files, seal and check
//! non-interactive blobs, measure adversaries and time verification.

mod bench;
mod gen;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rankcert::adversary::{measure, Adversary};
use rankcert::la::read_matrix;
use rankcert::prelude::*;
use rankcert::proto::{fiat_shamir_seal, fiat_shamir_verify, run, Inputs, ProtocolId, RejectCause, Verdict};

use report::{AttackView, RunReport};

#[derive(Parser)]
#[command(name = "rankcert", version, about = "Certificates for exact linear algebra over prime fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a protocol with the honest prover.
    Run {
        #[arg(value_parser = parse_protocol)]
        protocol: ProtocolId,
        matrix: PathBuf,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Write a Fiat–Shamir certificate for the honest prover's run.
    Seal {
        #[arg(value_parser = parse_protocol)]
        protocol: ProtocolId,
        matrix: PathBuf,
        blob: PathBuf,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Verify a Fiat–Shamir certificate.
    Check {
        #[arg(value_parser = parse_protocol)]
        protocol: ProtocolId,
        matrix: PathBuf,
        blob: PathBuf,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        json: bool,
    },
    /// Measure a cheating prover's acceptance rate against its bound.
    Attack {
        #[arg(value_parser = parse_adversary)]
        adversary: Adversary,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 101)]
        modulus: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Play the trials one after another.
        #[arg(long)]
        sequential: bool,
        #[arg(long)]
        json: bool,
    },
    /// Time verification against recomputation on a random `n x n` matrix.
    Bench(bench::BenchArgs),
    /// Write a test matrix.
    Gen(gen::GenArgs),
}

/// Public inputs beyond `A`.
#[derive(Args)]
struct InputArgs {
    /// Reduce the entries modulo this prime instead of the file's.
    #[arg(long)]
    modulus: Option<u64>,
    /// Second matrix: `B` of a triangular equivalence or a product.
    #[arg(long = "b", value_name = "FILE")]
    b: Option<PathBuf>,
    /// Claimed product for freivalds; `A·B` when absent.
    #[arg(long = "c", value_name = "FILE")]
    c: Option<PathBuf>,
    /// Public upper bound for rank-upper.
    #[arg(long)]
    bound: Option<usize>,
    /// Claimed independent columns for rank-lower, e.g. `0,2,3`.
    #[arg(long, value_delimiter = ',')]
    columns: Option<Vec<usize>>,
    /// Freivalds repetitions.
    #[arg(long, default_value_t = 1)]
    repetitions: usize,
}

fn parse_protocol(s: &str) -> Result<ProtocolId, String> {
    ProtocolId::from_name(s).ok_or_else(|| {
        let names: Vec<&str> = ProtocolId::ALL.iter().map(|p| p.name()).collect();
        format!("unknown protocol, expected one of {}", names.join(", "))
    })
}

fn parse_adversary(s: &str) -> Result<Adversary, String> {
    Adversary::from_name(s).ok_or_else(|| {
        let names: Vec<&str> = Adversary::ALL.iter().map(|a| a.name()).collect();
        format!("unknown adversary, expected one of {}", names.join(", "))
    })
}

fn load(path: &Path, modulus: Option<u64>) -> Result<DenseMatrix> {
    let a = read_matrix(path)?;
    let Some(p) = modulus else { return Ok(a) };
    let f = PrimeField::new(p)?;
    Ok(DenseMatrix::from_fn(f, a.rows(), a.cols(), |i, j| f.reduce(a.get(i, j))))
}

impl InputArgs {
    fn inputs(&self, id: ProtocolId, matrix: &Path) -> Result<Inputs> {
        let mut inputs = Inputs::new(load(matrix, self.modulus)?).with_repetitions(self.repetitions);
        if let Some(b) = &self.b {
            inputs = inputs.with_b(load(b, self.modulus)?);
        } else if id.needs_b() {
            bail!("{id} needs a second matrix, pass --b FILE");
        }
        if let Some(c) = &self.c {
            inputs = inputs.with_c(load(c, self.modulus)?);
        }
        if let Some(r) = self.bound {
            inputs = inputs.with_rank(r);
        }
        if let Some(cols) = &self.columns {
            inputs = inputs.with_columns(cols.clone());
        }
        Ok(inputs)
    }
}

fn exit_for(verdict: &Verdict) -> ExitCode {
    match verdict {
        Verdict::Accept => ExitCode::SUCCESS,
        Verdict::Reject(RejectCause::MalformedCertificate) => ExitCode::from(2),
        Verdict::Reject(_) => ExitCode::from(1),
        Verdict::Abort(_) => ExitCode::from(2),
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run { protocol, matrix, input, seed, json } => {
            let inputs = input.inputs(protocol, &matrix)?;
            let out = run(protocol, &inputs, &mut ChallengeSource::interactive(seed));
            let code = exit_for(&out.verdict);
            RunReport::new(protocol, &inputs, Some(seed), "interactive", out).print(json);
            Ok(code)
        }
        Command::Seal { protocol, matrix, blob, input } => {
            let inputs = input.inputs(protocol, &matrix)?;
            match fiat_shamir_seal(protocol, &inputs) {
                Ok(bytes) => {
                    fs::write(&blob, &bytes).with_context(|| blob.display().to_string())?;
                    println!("sealed {protocol}: {} bytes to {}", bytes.len(), blob.display());
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    println!("sealed nothing: {} ({e})", report::verdict_text(&e.verdict()));
                    Ok(ExitCode::from(2))
                }
            }
        }
        Command::Check { protocol, matrix, blob, input, json } => {
            let inputs = input.inputs(protocol, &matrix)?;
            let bytes = fs::read(&blob).with_context(|| blob.display().to_string())?;
            let out = fiat_shamir_verify(protocol, &inputs, &bytes);
            let code = exit_for(&out.verdict);
            RunReport::new(protocol, &inputs, None, "fiat-shamir", out).print(json);
            Ok(code)
        }
        Command::Attack { adversary, trials, modulus, seed, sequential, json } => {
            if trials == 0 {
                bail!("--trials must be at least 1");
            }
            let field = PrimeField::new(modulus)?;
            let exec = if sequential { Execution::Sequential } else { Execution::Parallel };
            let r = measure(adversary, field, trials, seed, exec)?;
            let pass = r.pass;
            AttackView { report: r, seed }.print(json);
            Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Bench(args) => bench::bench(&args),
        Command::Gen(args) => gen::gen(&args).map(|_| ExitCode::SUCCESS),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
