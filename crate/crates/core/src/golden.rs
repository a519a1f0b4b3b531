//! Printing of the worked example tables and byte comparison against the
//! transcription in `golden/examples.txt`.

use thiserror::Error;

use crate::characterize::{induced_semirings, size_labels, CharError, TheoremForm};
use crate::order::Semilattice;
use crate::semiring::MorphismSemiring;

/// The transcribed tables, embedded at build time.
pub const EXPECTED: &str = include_str!("../golden/examples.txt");

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GoldenError {
    #[error("line {line}, cell {cell}: expected {expected:?}, found {found:?}")]
    Mismatch {
        line: usize,
        cell: usize,
        expected: String,
        found: String,
    },
    #[error(transparent)]
    Char(#[from] CharError),
}

/// Element names `a, b, c, ...` in carrier order.
pub fn element_name(i: usize) -> String {
    if i < 26 {
        char::from(b'a' + i as u8).to_string()
    } else {
        format!("x{i}")
    }
}

fn table(corner: &str, cols: &[String], rows: &[(String, Vec<String>)]) -> String {
    let mut out = format!("{corner} | {}\n", cols.join(" "));
    for (head, cells) in rows {
        out.push_str(&format!("{head} | {}\n", cells.join(" ")));
    }
    out
}

/// `x | 0 1 ...` followed by one row of images per element.
pub fn map_table(ms: &MorphismSemiring) -> String {
    let cols: Vec<String> = (0..ms.semilattice.size()).map(|x| x.to_string()).collect();
    let rows: Vec<(String, Vec<String>)> = ms
        .morphisms
        .iter()
        .enumerate()
        .map(|(i, f)| (element_name(i), f.image().iter().map(|y| y.to_string()).collect()))
        .collect();
    table("x", &cols, &rows)
}

fn operation_table(corner: &str, n: usize, op: impl Fn(usize, usize) -> usize) -> String {
    let cols: Vec<String> = (0..n).map(element_name).collect();
    let rows: Vec<(String, Vec<String>)> = (0..n)
        .map(|x| (element_name(x), (0..n).map(|y| element_name(op(x, y))).collect()))
        .collect();
    table(corner, &cols, &rows)
}

pub fn join_table(ms: &MorphismSemiring) -> String {
    operation_table("v", ms.size(), |x, y| ms.semiring.add(x, y))
}

/// Row `x`, column `y` holds `x ∘ y`.
pub fn composition_table(ms: &MorphismSemiring) -> String {
    operation_table("o", ms.size(), |x, y| ms.semiring.mul(x, y))
}

fn full_block(ms: &MorphismSemiring) -> String {
    format!("{}\n{}\n{}", map_table(ms), join_table(ms), composition_table(ms))
}

fn only(mut v: Vec<MorphismSemiring>, what: &str) -> Result<MorphismSemiring, CharError> {
    if v.len() != 1 {
        return Err(CharError::Hypothesis(format!(
            "{what}: expected one semiring, found {}",
            v.len()
        )));
    }
    Ok(v.remove(0))
}

/// Builds every example from its semilattice and prints it in the layout of
/// the transcription.
pub fn render() -> Result<String, CharError> {
    let mut parts = Vec::new();

    let r3 = only(
        induced_semirings(&Semilattice::chain(3), TheoremForm::Res1)?,
        "right-not-left on chain 3",
    )?;
    parts.push(format!("== right-not-left, chain 3 ==\n\n{}", full_block(&r3)));

    let r4 = induced_semirings(&Semilattice::chain(4), TheoremForm::Res1)?;
    let labels = size_labels(&r4.iter().map(MorphismSemiring::size).collect::<Vec<_>>());
    let mut s = String::from("== right-not-left, chain 4 ==\n");
    for (name, ms) in labels.iter().zip(&r4) {
        s.push_str(&format!("\n-- {name} --\n\n{}", map_table(ms)));
    }
    let first = r4
        .first()
        .ok_or_else(|| CharError::Hypothesis("no semirings on chain 4".into()))?;
    s.push_str(&format!(
        "\n-- {} operations --\n\n{}\n{}",
        labels[0],
        join_table(first),
        composition_table(first)
    ));
    parts.push(s);

    let l2 = only(
        induced_semirings(&Semilattice::chain(2), TheoremForm::Jm)?,
        "left-not-right on chain 2",
    )?;
    parts.push(format!("== left-not-right, chain 2 ==\n\n{}", full_block(&l2)));

    let a3 = induced_semirings(&Semilattice::chain(3), TheoremForm::Jm1)?;
    let labels = size_labels(&a3.iter().map(MorphismSemiring::size).collect::<Vec<_>>());
    let mut s = String::from("== absorbing, chain 3 ==\n");
    for (name, ms) in labels.iter().zip(&a3) {
        s.push_str(&format!("\n-- {name} --\n\n{}", full_block(ms)));
    }
    parts.push(s);

    Ok(parts.join("\n"))
}

/// First differing cell between two renderings, if any.
pub fn compare(expected: &str, found: &str) -> Result<(), GoldenError> {
    let mut el = expected.split('\n');
    let mut fl = found.split('\n');
    let mut line = 0;
    loop {
        line += 1;
        match (el.next(), fl.next()) {
            (None, None) => return Ok(()),
            (e, f) => {
                let (e, f) = (e.unwrap_or(""), f.unwrap_or(""));
                if e == f {
                    continue;
                }
                let ec: Vec<&str> = e.split(' ').collect();
                let fc: Vec<&str> = f.split(' ').collect();
                let cell = (0..ec.len().max(fc.len()))
                    .find(|&i| ec.get(i) != fc.get(i))
                    .unwrap_or(0);
                return Err(GoldenError::Mismatch {
                    line,
                    cell,
                    expected: ec.get(cell).unwrap_or(&"<end>").to_string(),
                    found: fc.get(cell).unwrap_or(&"<end>").to_string(),
                });
            }
        }
    }
}

/// Renders the examples and compares them with the transcription.
pub fn check() -> Result<String, GoldenError> {
    let found = render()?;
    compare(EXPECTED, &found)?;
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rendering_matches_transcription() {
        if let Err(e) = check() {
            panic!("{e}");
        }
    }

    #[test]
    fn compare_reports_first_cell() {
        let err = compare("v | a b\na | a b\n", "v | a b\na | a c\n").unwrap_err();
        assert_eq!(
            err,
            GoldenError::Mismatch {
                line: 2,
                cell: 3,
                expected: "b".into(),
                found: "c".into()
            }
        );
        assert!(compare("x\n", "x\ny\n").is_err());
    }
}
