//! Text and JSON encodings: `.sl` join tables, `.sr` semiring tables, and
//! the JSON exports for semirings, semimodules and verdicts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::characterize::{ConditionOutcome, Verdict};
use crate::order::{OrderError, Semilattice};
use crate::semimodule::Semimodule;
use crate::semiring::{MorphismSemiring, Semiring, SemiringError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Semiring(#[from] SemiringError),
    #[error("{0}")]
    Invalid(String),
}

fn parse_err(line: usize, msg: impl Into<String>) -> IoError {
    IoError::Parse { line, msg: msg.into() }
}

/// Non-empty lines with their 1-based numbers.
fn lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect()
}

fn parse_row(line: usize, s: &str, n: usize) -> Result<Vec<usize>, IoError> {
    let row = s
        .split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| parse_err(line, format!("not an index: {t:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if row.len() != n {
        return Err(parse_err(line, format!("expected {n} entries, found {}", row.len())));
    }
    Ok(row)
}

fn parse_size(line: usize, s: &str) -> Result<usize, IoError> {
    s.parse::<usize>()
        .map_err(|_| parse_err(line, format!("expected a size, found {s:?}")))
}

fn write_rows(out: &mut String, rows: &[Vec<usize>]) {
    for r in rows {
        let cells: Vec<String> = r.iter().map(usize::to_string).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
}

pub fn parse_semilattice(text: &str) -> Result<Semilattice, IoError> {
    let ls = lines(text);
    let (first, rest) = ls.split_first().ok_or_else(|| parse_err(1, "empty input"))?;
    let n = parse_size(first.0, first.1)?;
    if rest.len() != n {
        return Err(parse_err(first.0, format!("expected {n} rows, found {}", rest.len())));
    }
    let rows = rest
        .iter()
        .map(|&(i, l)| parse_row(i, l, n))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Semilattice::from_rows(&rows)?)
}

pub fn write_semilattice(l: &Semilattice) -> String {
    let mut out = format!("{}\n", l.size());
    write_rows(&mut out, &l.rows());
    out
}

/// Table pair `(n, add, mul)` from `.sr` text, with shapes and ranges
/// checked but no semiring axioms.
pub fn parse_tables(text: &str) -> Result<(usize, Vec<usize>, Vec<usize>), IoError> {
    let ls = lines(text);
    let (first, rest) = ls.split_first().ok_or_else(|| parse_err(1, "empty input"))?;
    let n = parse_size(first.0, first.1)?;
    if n == 0 {
        return Err(parse_err(first.0, "size must be positive"));
    }
    if rest.len() != 2 * n + 1 {
        return Err(parse_err(
            first.0,
            format!("expected {} lines after the size, found {}", 2 * n + 1, rest.len()),
        ));
    }
    let (sep_line, sep) = rest[n];
    if sep != "#" {
        return Err(parse_err(sep_line, format!("expected '#', found {sep:?}")));
    }
    let add = rest[..n]
        .iter()
        .map(|&(i, l)| parse_row(i, l, n))
        .collect::<Result<Vec<_>, _>>()?;
    let mul = rest[n + 1..]
        .iter()
        .map(|&(i, l)| parse_row(i, l, n))
        .collect::<Result<Vec<_>, _>>()?;
    for (k, &(line, _)) in rest.iter().enumerate().filter(|&(k, _)| k != n) {
        let row = if k < n { &add[k] } else { &mul[k - n - 1] };
        if let Some(v) = row.iter().find(|&&v| v >= n) {
            return Err(parse_err(line, format!("entry {v} out of range for size {n}")));
        }
    }
    Ok((n, add.concat(), mul.concat()))
}

pub fn parse_semiring(text: &str) -> Result<Semiring, IoError> {
    let (n, add, mul) = parse_tables(text)?;
    Ok(Semiring::new(n, add, mul)?)
}

pub fn write_semiring(r: &Semiring) -> String {
    let mut out = format!("{}\n", r.size());
    write_rows(&mut out, &r.add_rows());
    out.push_str("#\n");
    write_rows(&mut out, &r.mul_rows());
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizationJson {
    /// `.sl` content.
    pub semilattice: String,
    pub morphisms: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemiringJson {
    pub size: usize,
    pub add: Vec<Vec<usize>>,
    pub mul: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realization: Option<RealizationJson>,
}

impl SemiringJson {
    pub fn from_semiring(r: &Semiring) -> Self {
        Self {
            size: r.size(),
            add: r.add_rows(),
            mul: r.mul_rows(),
            names: None,
            realization: None,
        }
    }

    pub fn from_realized(ms: &MorphismSemiring) -> Self {
        let mut j = Self::from_semiring(&ms.semiring);
        j.realization = Some(RealizationJson {
            semilattice: write_semilattice(&ms.semilattice),
            morphisms: ms.morphisms.iter().map(|f| f.image().to_vec()).collect(),
        });
        j
    }

    pub fn to_semiring(&self) -> Result<Semiring, IoError> {
        if self.add.len() != self.size || self.mul.len() != self.size {
            return Err(IoError::Invalid(format!("tables do not have {} rows", self.size)));
        }
        Ok(Semiring::from_rows(&self.add, &self.mul)?)
    }
}

/// Table pair from `.sr` text or from the JSON export, without axiom checks.
pub fn read_tables(text: &str) -> Result<(usize, Vec<usize>, Vec<usize>), IoError> {
    if !text.trim_start().starts_with('{') {
        return parse_tables(text);
    }
    let j: SemiringJson = serde_json::from_str(text)?;
    let n = j.size;
    let shaped = |rows: &[Vec<usize>]| rows.len() == n && rows.iter().all(|r| r.len() == n && r.iter().all(|&v| v < n));
    if n == 0 || !shaped(&j.add) || !shaped(&j.mul) {
        return Err(IoError::Invalid(format!("tables are not {n}x{n} over 0..{n}")));
    }
    Ok((n, j.add.concat(), j.mul.concat()))
}

/// Reads a semiring from `.sr` text or from its JSON export.
pub fn read_semiring(text: &str) -> Result<Semiring, IoError> {
    let (n, add, mul) = read_tables(text)?;
    Ok(Semiring::new(n, add, mul)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemimoduleJson {
    pub ring: SemiringJson,
    /// `.sl` content.
    pub module: String,
    pub action: Vec<Vec<usize>>,
}

impl SemimoduleJson {
    pub fn from_semimodule(m: &Semimodule) -> Result<Self, IoError> {
        let l = m.semilattice().map_err(|e| IoError::Invalid(e.to_string()))?;
        Ok(Self {
            ring: SemiringJson::from_semiring(m.ring()),
            module: write_semilattice(&l),
            action: m.action_rows(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictJson {
    pub case: String,
    pub conditions: BTreeMap<String, ConditionOutcome>,
    /// `.sl` content of the realizing semilattice.
    pub semilattice: String,
    /// Image of each element of the semiring, in element order.
    pub realization: Vec<Vec<usize>>,
    pub verdict: String,
    pub witnesses: Vec<String>,
}

impl VerdictJson {
    pub fn from_verdict(v: &Verdict) -> Self {
        let conditions = v
            .form
            .as_ref()
            .map(|f| {
                f.conditions
                    .outcomes
                    .iter()
                    .map(|(c, o)| (c.to_string(), o.clone()))
                    .collect()
            })
            .unwrap_or_default();
        Self {
            case: v.case.as_str().to_string(),
            conditions,
            semilattice: write_semilattice(&v.realization.semilattice),
            realization: v.realization.maps.iter().map(|f| f.image().to_vec()).collect(),
            verdict: if v.success { "success" } else { "failure" }.to_string(),
            witnesses: v.witnesses.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn semiring_text_roundtrip() {
        let text = "3\n0 1 2\n1 1 2\n2 2 2\n#\n0 0 2\n0 1 2\n0 2 2\n";
        let r = parse_semiring(text).unwrap();
        assert_eq!(write_semiring(&r), text);
        assert_eq!(
            read_semiring(&serde_json::to_string(&SemiringJson::from_semiring(&r)).unwrap()).unwrap(),
            r
        );
    }

    #[test]
    fn semilattice_text_roundtrip() {
        let text = "3\n0 2 2\n2 1 2\n2 2 2\n";
        assert_eq!(write_semilattice(&parse_semilattice(text).unwrap()), text);
    }

    #[test]
    fn parse_errors_carry_lines() {
        let err = parse_semiring("2\n0 1\n1 1\n0 0\n0 1\n").unwrap_err();
        assert!(matches!(err, IoError::Parse { line: 1, .. }), "{err}");
        let err = parse_semiring("2\n0 1\n1 1\n#\n0 x\n0 1\n").unwrap_err();
        assert!(matches!(err, IoError::Parse { line: 5, .. }), "{err}");
        assert!(matches!(parse_semilattice("2\n0 1\n1 0\n"), Err(IoError::Order(_))));
    }

    #[test]
    fn json_key_order() {
        let r = Semiring::boolean();
        let s = serde_json::to_string(&SemiringJson::from_semiring(&r)).unwrap();
        assert!(s.starts_with("{\"size\":2,\"add\":"));
        assert!(!s.contains("names"));
    }
}
