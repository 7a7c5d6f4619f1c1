use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Result};
use clap::Args;
use rankcert::la::pluq_rpm;
use rankcert::prelude::*;
use rankcert::proto::{pluq_certificate, replay, run, verifier, AbortCause, Inputs, ProtocolId, Verdict};
use serde_json::json;

use crate::report::{meter_json, verdict_text};

#[derive(Args)]
pub struct BenchArgs {
    n: usize,
    #[arg(long, default_value_t = 131_071)]
    modulus: u64,
    /// Timings are medians over this many repeats.
    #[arg(long, default_value_t = 3)]
    repeat: usize,
    /// Largest accepted `n`; the matrix alone takes `8n²` bytes.
    #[arg(long, default_value_t = 4096)]
    cap: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

fn median(repeat: usize, mut f: impl FnMut()) -> Duration {
    let mut times: Vec<Duration> = (0..repeat.max(1))
        .map(|_| {
            let start = Instant::now();
            f();
            start.elapsed()
        })
        .collect();
    times.sort();
    times[times.len() / 2]
}

pub fn bench(args: &BenchArgs) -> Result<ExitCode> {
    let n = args.n;
    if n == 0 || n > args.cap {
        bail!("n = {n} is outside 1..={}", args.cap);
    }
    let f = PrimeField::new(args.modulus)?;
    let mut rng = seeded(args.seed);
    let a = loop {
        let a = DenseMatrix::random(f, n, n, &mut rng);
        if pluq_rpm(&a).rank == n {
            break a;
        }
    };
    let v: Vec<u64> = (0..n).map(|_| f.random(&mut rng)).collect();

    let mut fac = None;
    let prover = median(args.repeat, || fac = Some(pluq_rpm(&a)));
    let cert = pluq_certificate(&fac.unwrap());
    let matvec = median(args.repeat, || {
        a.apply(&v).unwrap();
    });

    let inputs = Inputs::new(a.clone());
    let mut rows = Vec::new();
    let mut failed = false;
    for id in [ProtocolId::Det, ProtocolId::Grp, ProtocolId::Crp] {
        let honest = run(id, &inputs, &mut ChallengeSource::interactive(args.seed));
        let mut outcome = honest.verdict;
        let mut time = None;
        if honest.verdict.is_accept() {
            time = Some(median(args.repeat, || {
                let mut ver = verifier(id, &inputs).unwrap();
                let r = replay(&mut *ver, &honest.transcript, &mut ChallengeSource::interactive(args.seed));
                outcome = r.verdict;
            }));
        }
        // A random matrix may lack a generic rank profile; that is no failure.
        failed |= !(outcome.is_accept() || outcome == Verdict::Abort(AbortCause::NoGrpWitness));
        rows.push((id, outcome, time, honest.meter));
    }

    let secs = |d: Duration| d.as_secs_f64();
    if args.json {
        let protocols: Vec<_> = rows
            .iter()
            .map(|(id, outcome, time, meter)| {
                json!({
                    "protocol": id.name(),
                    "verdict": verdict_text(outcome),
                    "verifier_seconds": time.map(secs),
                    "ratio": time.map(|t| secs(t) / secs(prover)),
                    "communication": meter.communication(),
                    "meter": meter_json(meter),
                })
            })
            .collect();
        let v = json!({
            "n": n,
            "p": args.modulus,
            "seed": args.seed,
            "repeat": args.repeat,
            "pluq_seconds": secs(prover),
            "matvec_seconds": secs(matvec),
            "pluq_certificate_elements": cert.field_elements() + cert.integers(),
            "protocols": protocols,
        });
        println!("{v}");
    } else {
        println!("n = {n} over F_{}, median of {} (seed {})", args.modulus, args.repeat.max(1), args.seed);
        println!(
            "prover PLUQ {prover:.3?}, one matvec {matvec:.3?}, PLUQ certificate {} elements",
            cert.field_elements() + cert.integers()
        );
        println!("{:<6} {:<24} {:>12} {:>10} {:>8} {:>4}", "proto", "verdict", "verifier", "ratio", "comm", "mu");
        for (id, outcome, time, meter) in &rows {
            let (t, ratio) = match time {
                Some(t) => (format!("{t:.3?}"), format!("{:.5}", secs(*t) / secs(prover))),
                None => ("-".into(), "-".into()),
            };
            println!(
                "{:<6} {:<24} {:>12} {:>10} {:>8} {:>4}",
                id.name(),
                verdict_text(outcome),
                t,
                ratio,
                meter.communication(),
                meter.matvecs
            );
        }
    }
    Ok(if failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
}
