//! `QMAT 1` text format.
//!
//! ```text
//! QMAT 1
//! <rows> <cols>
//! re,im re,im ...
//! ```
//!
//! Entries are row-major and whitespace separated; line breaks between
//! entries are not significant.

use std::fmt::Write as _;
use std::path::Path;

use super::{c64, ComplexMatrix};
use crate::error::{Error, Result};

/// Whitespace tokenizer that remembers the line each token came from.
pub(crate) struct Tokens<'a> {
    tokens: Vec<(usize, &'a str)>,
    pos: usize,
    last_line: usize,
}

impl<'a> Tokens<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        let tokens: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .flat_map(|(i, line)| line.split_whitespace().map(move |t| (i + 1, t)))
            .collect();
        let last_line = text.lines().count().max(1);
        Tokens {
            tokens,
            pos: 0,
            last_line,
        }
    }

    pub(crate) fn line(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.last_line, |t| t.0)
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> Error {
        Error::ParseError {
            line: self.line(),
            message: message.into(),
        }
    }

    pub(crate) fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let tok = self
            .tokens
            .get(self.pos)
            .copied()
            .ok_or_else(|| self.error(format!("unexpected end of input, expected {what}")))?;
        self.pos += 1;
        Ok(tok)
    }

    pub(crate) fn expect(&mut self, word: &str) -> Result<()> {
        let (line, tok) = self.next(word)?;
        if tok != word {
            return Err(Error::ParseError {
                line,
                message: format!("expected `{word}`, found `{tok}`"),
            });
        }
        Ok(())
    }

    pub(crate) fn usize(&mut self, what: &str) -> Result<usize> {
        let (line, tok) = self.next(what)?;
        tok.parse().map_err(|_| Error::ParseError {
            line,
            message: format!("expected {what} (non-negative integer), found `{tok}`"),
        })
    }

    pub(crate) fn finish(&self) -> Result<()> {
        if let Some(&(line, tok)) = self.tokens.get(self.pos) {
            return Err(Error::ParseError {
                line,
                message: format!("trailing token `{tok}`"),
            });
        }
        Ok(())
    }

    pub(crate) fn qmat(&mut self) -> Result<ComplexMatrix> {
        self.expect("QMAT")?;
        self.expect("1")?;
        let rows = self.usize("row count")?;
        let cols = self.usize("column count")?;
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            let (line, tok) = self.next("matrix entry")?;
            let bad = || Error::ParseError {
                line,
                message: format!("malformed entry `{tok}`, expected `re,im`"),
            };
            let (re, im) = tok.split_once(',').ok_or_else(bad)?;
            let re: f64 = re.parse().map_err(|_| bad())?;
            let im: f64 = im.parse().map_err(|_| bad())?;
            if !re.is_finite() || !im.is_finite() {
                return Err(bad());
            }
            data.push(c64(re, im));
        }
        Ok(ComplexMatrix::from_row_slice(rows, cols, &data))
    }
}

/// Serializes a matrix; every value round-trips exactly.
pub fn format_qmat(m: &ComplexMatrix) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "QMAT 1");
    let _ = writeln!(out, "{} {}", m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|j| format!("{:?},{:?}", m[(i, j)].re, m[(i, j)].im))
            .collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

pub fn parse_qmat(text: &str) -> Result<ComplexMatrix> {
    let mut tokens = Tokens::new(text);
    let m = tokens.qmat()?;
    tokens.finish()?;
    Ok(m)
}

pub fn read_qmat_file(path: impl AsRef<Path>) -> Result<ComplexMatrix> {
    parse_qmat(&std::fs::read_to_string(path)?)
}

pub fn write_qmat_file(path: impl AsRef<Path>, m: &ComplexMatrix) -> Result<()> {
    std::fs::write(path, format_qmat(m))?;
    Ok(())
}
