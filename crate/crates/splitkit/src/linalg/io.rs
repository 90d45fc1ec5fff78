//! Plain-text interchange formats.
//!
//! Matrix: first line `n m`, then `n` lines of `m` whitespace-separated
//! decimal scalars. Vector: first line `n`, then `n` scalars (any whitespace
//! layout). Values are written with 17 significant digits so a write/read
//! round trip reproduces every `f64` bit-exactly. Lines starting with `#`
//! are skipped.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};

fn tokens(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim_start().starts_with('#'))
        .flat_map(|(ln, l)| l.split_whitespace().map(move |t| (ln + 1, t)))
}

fn parse_usize(tok: Option<(usize, &str)>, what: &str) -> Result<usize> {
    let (line, t) = tok.ok_or(Error::Parse {
        line: 0,
        message: format!("missing {what}"),
    })?;
    t.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid {what}: {t}"),
    })
}

fn parse_f64(tok: Option<(usize, &str)>) -> Result<f64> {
    let (line, t) = tok.ok_or(Error::Parse {
        line: 0,
        message: "missing scalar".into(),
    })?;
    t.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid scalar: {t}"),
    })
}

pub fn parse_matrix(text: &str) -> Result<Matrix> {
    let mut it = tokens(text);
    let rows = parse_usize(it.next(), "row count")?;
    let cols = parse_usize(it.next(), "column count")?;
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        data.push(parse_f64(it.next())?);
    }
    if let Some((line, t)) = it.next() {
        return Err(Error::Parse {
            line,
            message: format!("trailing token: {t}"),
        });
    }
    Matrix::new(rows, cols, data)
}

pub fn parse_vector(text: &str) -> Result<Vector> {
    let mut it = tokens(text);
    let n = parse_usize(it.next(), "length")?;
    let mut data = Vec::with_capacity(n);
    for _ in 0..n {
        data.push(parse_f64(it.next())?);
    }
    if let Some((line, t)) = it.next() {
        return Err(Error::Parse {
            line,
            message: format!("trailing token: {t}"),
        });
    }
    Vector::new(data)
}

pub fn format_matrix(m: &Matrix) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", m.rows(), m.cols());
    for i in 0..m.rows() {
        let mut first = true;
        for j in 0..m.cols() {
            if !first {
                out.push(' ');
            }
            let _ = write!(out, "{:.16e}", m.at(i, j));
            first = false;
        }
        out.push('\n');
    }
    out
}

pub fn format_vector(v: &Vector) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", v.len());
    for i in 0..v.len() {
        let _ = writeln!(out, "{:.16e}", v[i]);
    }
    out
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<Matrix> {
    parse_matrix(&std::fs::read_to_string(path)?)
}

pub fn read_vector(path: impl AsRef<Path>) -> Result<Vector> {
    parse_vector(&std::fs::read_to_string(path)?)
}

pub fn write_matrix(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    Ok(std::fs::write(path, format_matrix(m))?)
}

pub fn write_vector(path: impl AsRef<Path>, v: &Vector) -> Result<()> {
    Ok(std::fs::write(path, format_vector(v))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_roundtrip_is_bit_exact() {
        let m = Matrix::from_fn(3, 2, |i, j| {
            (1.0 + i as f64) / (3.0 + j as f64) * if (i + j) % 2 == 0 { 1.0 } else { -1.0 }
        });
        let text = format_matrix(&m);
        let back = parse_matrix(&text).unwrap();
        assert_eq!(m.data(), back.data());
    }

    #[test]
    fn vector_roundtrip_is_bit_exact() {
        let v = Vector::from(vec![1.0 / 3.0, -2.0e-17, 123456.789, 0.0]);
        let back = parse_vector(&format_vector(&v)).unwrap();
        assert_eq!(v.as_slice(), back.as_slice());
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_matrix("2 2\n1 2 3").is_err());
        assert!(parse_matrix("2 2\n1 2 3 4 5").is_err());
        assert!(parse_vector("x\n1").is_err());
        assert!(parse_matrix("1 1\nnope").is_err());
    }

    #[test]
    fn comments_are_ignored() {
        let m = parse_matrix("# banner\n2 2\n1 2\n# mid\n3 4\n").unwrap();
        assert_eq!(m.data(), &[1.0, 2.0, 3.0, 4.0]);
    }
}
