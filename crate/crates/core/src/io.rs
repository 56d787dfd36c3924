//! Text formats read and written by the command-line tool.
//!
//! * Margins: an `r:` line and a `c:` line of integers separated by commas
//!   or whitespace. Blank lines and `#` comments are ignored.
//! * Weights, dense: one matrix row per line, entries separated by commas
//!   or whitespace.
//! * Weights, triplet: `i,j,w` per line with 0-based indices; unlisted
//!   entries are zero.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::margins::Margins;
use crate::weights::WeightMatrix;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightsFormat {
    #[default]
    Dense,
    Triplet,
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn fields(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty())
}

fn parse_ints(line: &str, lineno: usize) -> Result<Vec<usize>> {
    fields(line)
        .map(|f| f.parse::<usize>().map_err(|_| Error::Parse(format!("line {lineno}: '{f}' is not a nonnegative integer"))))
        .collect()
}

pub fn parse_margins(text: &str) -> Result<Margins> {
    let (mut r, mut c) = (None, None);
    for (lineno, line) in content_lines(text) {
        let (key, rest) = line
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("line {lineno}: expected 'r:' or 'c:'")))?;
        let slot = match key.trim() {
            "r" => &mut r,
            "c" => &mut c,
            other => return Err(Error::Parse(format!("line {lineno}: unknown key '{other}'"))),
        };
        if slot.is_some() {
            return Err(Error::Parse(format!("line {lineno}: duplicate '{}:' line", key.trim())));
        }
        *slot = Some(parse_ints(rest, lineno)?);
    }
    match (r, c) {
        (Some(r), Some(c)) => Margins::new(r, c),
        _ => Err(Error::Parse("margins need both an 'r:' and a 'c:' line".into())),
    }
}

pub fn format_margins(margins: &Margins) -> String {
    let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    format!("r: {}\nc: {}\n", join(margins.rows()), join(margins.cols()))
}

fn parse_float(f: &str, lineno: usize) -> Result<f64> {
    f.parse::<f64>().map_err(|_| Error::Parse(format!("line {lineno}: '{f}' is not a number")))
}

pub fn parse_weights_dense(text: &str) -> Result<WeightMatrix> {
    let mut rows = Vec::new();
    for (lineno, line) in content_lines(text) {
        let row = fields(line).map(|f| parse_float(f, lineno)).collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            let first: &Vec<f64> = first;
            if row.len() != first.len() {
                return Err(Error::Parse(format!("line {lineno}: {} entries, expected {}", row.len(), first.len())));
            }
        }
        rows.push(row);
    }
    WeightMatrix::from_rows(&rows)
}

pub fn parse_weights_triplet(text: &str, m: usize, n: usize) -> Result<WeightMatrix> {
    let mut data = vec![0.0; m * n];
    for (lineno, line) in content_lines(text) {
        let f: Vec<&str> = fields(line).collect();
        if f.len() != 3 {
            return Err(Error::Parse(format!("line {lineno}: expected 'i,j,w'")));
        }
        let idx = |s: &str| s.parse::<usize>().map_err(|_| Error::Parse(format!("line {lineno}: bad index '{s}'")));
        let (i, j) = (idx(f[0])?, idx(f[1])?);
        if i >= m || j >= n {
            return Err(Error::Parse(format!("line {lineno}: index ({i}, {j}) outside {m}x{n}")));
        }
        data[i * n + j] = parse_float(f[2], lineno)?;
    }
    WeightMatrix::new(m, n, data)
}

pub fn parse_weights(text: &str, format: WeightsFormat, m: usize, n: usize) -> Result<WeightMatrix> {
    let w = match format {
        WeightsFormat::Dense => parse_weights_dense(text)?,
        WeightsFormat::Triplet => parse_weights_triplet(text, m, n)?,
    };
    if w.m() != m || w.n() != n {
        return Err(Error::Dimension(format!("weights are {}x{}, margins are {m}x{n}", w.m(), w.n())));
    }
    Ok(w)
}

pub fn format_weights_dense(w: &WeightMatrix) -> String {
    let mut out = String::new();
    for i in 0..w.m() {
        let row: Vec<String> = (0..w.n()).map(|j| format!("{}", w.get(i, j))).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Reads a whole file, naming the path in any error.
pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())).into())
}

pub fn read_margins(path: &Path) -> Result<Margins> {
    parse_margins(&read_text(path)?)
}

pub fn read_weights(path: &Path, format: WeightsFormat, m: usize, n: usize) -> Result<WeightMatrix> {
    parse_weights(&read_text(path)?, format, m, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margins_round_trip() {
        let m = parse_margins("# finch-like\nr: 1, 2 1\n\nc: 2,2\n").unwrap();
        assert_eq!(m.rows(), &[1, 2, 1]);
        assert_eq!(m.cols(), &[2, 2]);
        assert_eq!(parse_margins(&format_margins(&m)).unwrap(), m);
    }

    #[test]
    fn margin_errors() {
        assert!(matches!(parse_margins("r: 1\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_margins("r: 1\nc: x\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_margins("r: 1\nr: 1\nc: 1\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_margins("r: 2\nc: 1\n"), Err(Error::MarginRange(_))));
        assert!(matches!(parse_margins("r: 1\nc: 1,1\n"), Err(Error::SumMismatch { .. })));
    }

    #[test]
    fn dense_weights() {
        let w = parse_weights("1, 2.5\n0 3\n", WeightsFormat::Dense, 2, 2).unwrap();
        assert_eq!(w.data(), &[1.0, 2.5, 0.0, 3.0]);
        assert!(parse_weights("1,2\n3\n", WeightsFormat::Dense, 2, 2).is_err());
        assert!(matches!(parse_weights("1,2\n", WeightsFormat::Dense, 2, 2), Err(Error::Dimension(_))));
        assert_eq!(parse_weights_dense(&format_weights_dense(&w)).unwrap(), w);
    }

    #[test]
    fn triplet_weights() {
        let w = parse_weights("0,1,2\n1 0 0.5\n", WeightsFormat::Triplet, 2, 2).unwrap();
        assert_eq!(w.data(), &[0.0, 2.0, 0.5, 0.0]);
        assert!(parse_weights("2,0,1\n", WeightsFormat::Triplet, 2, 2).is_err());
    }
}
