//! Text format: a header line `m n p`, then `m` lines of `n` residues.

use std::fs;
use std::path::Path;

use super::{DenseMatrix, LaError};
use crate::ff::PrimeField;

fn parse_num<T: std::str::FromStr>(tok: &str, what: &str) -> Result<T, LaError> {
    tok.parse()
        .map_err(|_| LaError::Parse(format!("bad {what} `{tok}`")))
}

pub fn parse_matrix(text: &str) -> Result<DenseMatrix, LaError> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines
        .next()
        .ok_or_else(|| LaError::Parse("empty input".into()))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    let [m, n, p] = head[..] else {
        return Err(LaError::Parse(format!("header `{header}` is not `m n p`")));
    };
    let (m, n, p): (usize, usize, u64) = (
        parse_num(m, "row count")?,
        parse_num(n, "column count")?,
        parse_num(p, "modulus")?,
    );
    let field = PrimeField::new(p)?;
    let mut data = Vec::with_capacity(m.saturating_mul(n).min(1 << 24));
    let mut count = 0;
    for line in lines.by_ref() {
        if n == 0 || count == m {
            return Err(LaError::Parse("trailing rows".into()));
        }
        let before = data.len();
        for tok in line.split_whitespace() {
            data.push(parse_num::<u64>(tok, "entry")?);
        }
        if data.len() - before != n {
            return Err(LaError::Parse(format!(
                "row {count} has {} entries, expected {n}",
                data.len() - before
            )));
        }
        count += 1;
    }
    if n > 0 && count != m {
        return Err(LaError::Parse(format!("{count} rows, expected {m}")));
    }
    DenseMatrix::new(field, m, n, data)
}

pub fn write_matrix(a: &DenseMatrix) -> String {
    let mut out = format!("{} {} {}\n", a.rows(), a.cols(), a.field().modulus());
    for i in 0..a.rows() {
        let row: Vec<String> = a.row(i).iter().map(u64::to_string).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<DenseMatrix, LaError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| LaError::Parse(format!("{}: {e}", path.display())))?;
    parse_matrix(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::seeded;
    use proptest::prelude::*;

    #[test]
    fn parses_small_matrix() {
        let a = parse_matrix("2 2 7\n1 2\n3 4\n").unwrap();
        assert_eq!(a.get(1, 0), 3);
        assert_eq!(a.field().modulus(), 7);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_matrix("").is_err());
        assert!(parse_matrix("2 2 8\n1 2\n3 4\n").is_err());
        assert!(parse_matrix("2 2 7\n1 2\n3\n").is_err());
        assert!(parse_matrix("2 2 7\n1 2\n").is_err());
        assert!(parse_matrix("1 2 7\n1 7\n").is_err());
        assert!(parse_matrix("1 2 7\n1 2\n3 4\n").is_err());
        assert!(parse_matrix("1 1 7\n-1\n").is_err());
    }

    #[test]
    fn empty_shapes() {
        let a = parse_matrix("0 3 5\n").unwrap();
        assert_eq!((a.rows(), a.cols()), (0, 3));
        let b = parse_matrix("2 0 5\n").unwrap();
        assert_eq!((b.rows(), b.cols()), (2, 0));
        assert_eq!(parse_matrix(&write_matrix(&b)).unwrap(), b);
    }

    proptest! {
        #[test]
        fn round_trip_is_exact(m in 0usize..6, n in 0usize..6, seed in any::<u64>()) {
            let a = DenseMatrix::random(PrimeField::new(131_071).unwrap(), m, n, &mut seeded(seed));
            let text = write_matrix(&a);
            prop_assert_eq!(&parse_matrix(&text).unwrap(), &a);
            prop_assert_eq!(write_matrix(&parse_matrix(&text).unwrap()), text);
        }
    }
}
