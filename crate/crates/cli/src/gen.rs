use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use rankcert::la::{pluq_crp, write_matrix};
use rankcert::prelude::*;

#[derive(Clone, Copy, ValueEnum)]
pub enum Kind {
    /// Uniform entries.
    Random,
    Identity,
    /// The identity with its first two rows exchanged: invertible, but
    /// without a generic rank profile.
    Swap,
    /// Rank exactly `--rank`, one less than full by default.
    Rankdef,
}

#[derive(Args)]
pub struct GenArgs {
    kind: Kind,
    /// Column count; also the row count unless `--rows` is given.
    n: usize,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long, default_value_t = 131_071)]
    modulus: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write here instead of standard output.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

pub fn generate(args: &GenArgs) -> Result<DenseMatrix> {
    let f = PrimeField::new(args.modulus)?;
    let n = args.n;
    let m = args.rows.unwrap_or(n);
    let mut rng = seeded(args.seed);
    let square = |what: &str| -> Result<()> {
        if m != n {
            bail!("{what} matrices are square");
        }
        Ok(())
    };
    Ok(match args.kind {
        Kind::Random => DenseMatrix::random(f, m, n, &mut rng),
        Kind::Identity => {
            square("identity")?;
            DenseMatrix::identity(f, n)
        }
        Kind::Swap => {
            square("swap")?;
            if n < 2 {
                bail!("swap needs n >= 2");
            }
            DenseMatrix::from_fn(f, n, n, |i, j| {
                let row = match i {
                    0 => 1,
                    1 => 0,
                    i => i,
                };
                (row == j) as u64
            })
        }
        Kind::Rankdef => {
            let full = m.min(n);
            let r = args.rank.unwrap_or(full.saturating_sub(1));
            if r > full {
                bail!("rank {r} exceeds min(m, n) = {full}");
            }
            // Over tiny fields a product of random factors often loses rank.
            let mut tries = 0;
            loop {
                let x = DenseMatrix::random(f, m, r, &mut rng);
                let y = DenseMatrix::random(f, r, n, &mut rng);
                let a = x.mul(&y)?;
                if pluq_crp(&a).rank == r {
                    break a;
                }
                tries += 1;
                if tries == 1000 {
                    bail!("no rank {r} matrix found over F_{}", args.modulus);
                }
            }
        }
    })
}

pub fn gen(args: &GenArgs) -> Result<()> {
    let text = write_matrix(&generate(args)?);
    match &args.out {
        Some(path) => fs::write(path, text).with_context(|| path.display().to_string())?,
        None => print!("{text}"),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;
    use rankcert::oracle::{has_grp, oracle_det, oracle_rank};

    #[derive(Parser)]
    struct Wrap {
        #[command(flatten)]
        args: GenArgs,
    }

    fn gen_of(args: &[&str]) -> Result<DenseMatrix> {
        let argv = std::iter::once("gen").chain(args.iter().copied());
        generate(&Wrap::parse_from(argv).args)
    }

    #[test]
    fn swap_is_invertible_without_generic_profile() {
        for n in ["2", "3", "5"] {
            let a = gen_of(&["swap", n, "--modulus", "7"]).unwrap();
            assert_ne!(oracle_det(&a).unwrap(), 0);
            assert!(!has_grp(&a));
        }
        assert!(gen_of(&["swap", "1"]).is_err());
    }

    #[test]
    fn rankdef_has_the_requested_rank() {
        let a = gen_of(&["rankdef", "5", "--modulus", "2", "--seed", "9"]).unwrap();
        assert_eq!(oracle_rank(&a), 4);
        let b = gen_of(&["rankdef", "6", "--rows", "3", "--rank", "2"]).unwrap();
        assert_eq!((b.rows(), b.cols(), oracle_rank(&b)), (3, 6, 2));
        assert!(gen_of(&["rankdef", "3", "--rank", "4"]).is_err());
        assert!(gen_of(&["identity", "3", "--rows", "2"]).is_err());
    }
}
