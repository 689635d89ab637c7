//! Shared helpers for the line-oriented text formats.

use std::fmt;
use std::path::{Path, PathBuf};

/// A syntax error pinned to a file position (1-based line and column).
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub path: PathBuf,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(path: &Path, line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            path: path.to_path_buf(),
            line,
            column,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}: {}",
            self.path.display(),
            self.line,
            self.column,
            self.message
        )
    }
}

impl std::error::Error for ParseError {}

/// Whitespace-separated tokens with their 1-based starting column.
pub(crate) fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

pub(crate) fn parse_f64(
    path: &Path,
    line: usize,
    (column, token): (usize, &str),
    what: &str,
) -> Result<f64, ParseError> {
    token
        .parse::<f64>()
        .map_err(|_| ParseError::new(path, line, column, format!("expected number for {what}, found `{token}`")))
}

pub(crate) fn parse_u32(
    path: &Path,
    line: usize,
    (column, token): (usize, &str),
    what: &str,
) -> Result<u32, ParseError> {
    token
        .parse::<u32>()
        .map_err(|_| ParseError::new(path, line, column, format!("expected integer for {what}, found `{token}`")))
}
