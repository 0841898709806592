//! The shared matrix file format.
//!
//! Two encodings are accepted and auto-detected:
//!
//! - JSON: `{"dim": n, "matrix": [[row], [row], ...]}` with rows in the
//!   `a_ik` convention;
//! - plain text: the dimension on the first line, then `n` whitespace
//!   separated rows.

use serde::ser::SerializeSeq;
use serde::{Deserialize, Serializer};
use std::path::Path;
use thiserror::Error;

use crate::algebra::{AlgebraError, BasisChange, EvolutionAlgebra};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("could not read input: {0}")]
    Io(#[from] std::io::Error),
    #[error("could not parse matrix: {0}")]
    Parse(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Deserialize)]
struct MatrixFile {
    dim: usize,
    matrix: Vec<Vec<f64>>,
}

/// Parses either encoding, detected from the first non-space character.
pub fn parse_matrix_str(input: &str) -> Result<EvolutionAlgebra, IoError> {
    let trimmed = input.trim_start();
    if trimmed.starts_with('{') {
        let parsed: MatrixFile =
            serde_json::from_str(trimmed).map_err(|e| IoError::Parse(e.to_string()))?;
        if parsed.matrix.len() != parsed.dim {
            return Err(IoError::Parse(format!(
                "dim is {} but matrix has {} rows",
                parsed.dim,
                parsed.matrix.len()
            )));
        }
        return Ok(EvolutionAlgebra::from_rows(&parsed.matrix)?);
    }
    parse_plain_text(input)
}

fn parse_plain_text(input: &str) -> Result<EvolutionAlgebra, IoError> {
    let mut tokens = input.split_whitespace();
    let dim: usize = tokens
        .next()
        .ok_or_else(|| IoError::Parse("empty input".into()))?
        .parse()
        .map_err(|e| IoError::Parse(format!("bad dimension: {e}")))?;
    let mut rows = Vec::with_capacity(dim);
    for _ in 0..dim {
        let mut row = Vec::with_capacity(dim);
        for _ in 0..dim {
            let tok = tokens
                .next()
                .ok_or_else(|| IoError::Parse("not enough matrix entries".into()))?;
            row.push(
                tok.parse::<f64>()
                    .map_err(|e| IoError::Parse(format!("bad entry {tok:?}: {e}")))?,
            );
        }
        rows.push(row);
    }
    if tokens.next().is_some() {
        return Err(IoError::Parse("trailing tokens after matrix".into()));
    }
    Ok(EvolutionAlgebra::from_rows(&rows)?)
}

pub fn read_matrix_file(path: &Path) -> Result<EvolutionAlgebra, IoError> {
    let text = std::fs::read_to_string(path)?;
    parse_matrix_str(&text)
}

/// Serializes a basis change as its row matrix.
pub fn serialize_change<S: Serializer>(p: &BasisChange, s: S) -> Result<S::Ok, S::Error> {
    let rows = p.row_vectors();
    let mut seq = s.serialize_seq(Some(rows.len()))?;
    for row in rows {
        seq.serialize_element(&row)?;
    }
    seq.end()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_json_format() {
        let a = parse_matrix_str(r#"{"dim": 2, "matrix": [[0, 1], [1, 0.5]]}"#).unwrap();
        assert_eq!(a.dim(), 2);
        assert_eq!(a.matrix()[(1, 1)], 0.5);
    }

    #[test]
    fn parses_plain_text_format() {
        let a = parse_matrix_str("3\n1 1 0\n-1 -1 0\n0 0 0\n").unwrap();
        assert_eq!(a.dim(), 3);
        assert_eq!(a.matrix()[(1, 0)], -1.0);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(matches!(
            parse_matrix_str("2\n1 2\n3"),
            Err(IoError::Parse(_))
        ));
        assert!(matches!(
            parse_matrix_str(r#"{"dim": 3, "matrix": [[1, 0], [0, 1]]}"#),
            Err(IoError::Parse(_))
        ));
        assert!(matches!(
            parse_matrix_str("2\n1 2\n3 4\n5"),
            Err(IoError::Parse(_))
        ));
        assert!(parse_matrix_str("4\n" .repeat(1).as_str()).is_err());
    }
}
