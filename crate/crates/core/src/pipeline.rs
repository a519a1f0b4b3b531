//! Corpus-level runs: the enumerated corpus, round trips, the structure
//! suite, the two conjecture suites, and the report behind `check`.

use serde::{Deserialize, Serialize};

use crate::characterize::{recognize_box, theorem_roundtrip, CharError};
use crate::enumerate::{enumerate, Enumerated, EnumerationOptions};
use crate::exec::Exec;
use crate::io::{SemimoduleJson, SemiringJson, VerdictJson};
use crate::semimodule::{enumerate_semimodules, smallest_faithful, SemimoduleError, SuiteViolation};
use crate::semiring::{CaseTag, Semiring, Structure};

/// Simple additively idempotent semirings with `3 <= |R| <= max_size`.
pub fn corpus(max_size: usize, exec: Exec, jobs: usize) -> Result<Vec<Enumerated>, SemimoduleError> {
    let mut opts = EnumerationOptions::simple(max_size);
    opts.min_size = 3;
    opts.exec = exec;
    opts.jobs = jobs;
    enumerate(&opts)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundtripOutcome {
    pub index: usize,
    pub size: usize,
    pub case: CaseTag,
    pub success: bool,
    pub error: Option<String>,
    pub verdict: Option<VerdictJson>,
}

pub fn roundtrip_all(corpus: &[Enumerated], exec: Exec) -> Vec<RoundtripOutcome> {
    let indexed: Vec<(usize, &Enumerated)> = corpus.iter().enumerate().collect();
    exec.map(&indexed, |&(index, e)| match theorem_roundtrip(&e.semiring) {
        Ok(v) => RoundtripOutcome {
            index,
            size: e.semiring.size(),
            case: e.case,
            success: v.success && v.case == e.case,
            error: (v.case != e.case).then(|| format!("round trip tagged {}, corpus tagged {}", v.case, e.case)),
            verdict: Some(VerdictJson::from_verdict(&v)),
        },
        Err(err) => RoundtripOutcome {
            index,
            size: e.semiring.size(),
            case: e.case,
            success: false,
            error: Some(err.to_string()),
            verdict: None,
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureOutcome {
    pub index: usize,
    pub module_size: usize,
    pub violations: Vec<SuiteViolation>,
}

/// The structure suite over `(R, smallest_faithful(R))` for each corpus entry.
pub fn structure_suite_all(corpus: &[Enumerated], exec: Exec) -> Result<Vec<StructureOutcome>, SemimoduleError> {
    let indexed: Vec<(usize, &Enumerated)> = corpus.iter().enumerate().collect();
    exec.map(&indexed, |&(index, e)| {
        let m = smallest_faithful(&e.semiring)?;
        Ok(StructureOutcome {
            index,
            module_size: m.size(),
            violations: m.structure_suite()?,
        })
    })
    .into_iter()
    .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub conjecture: String,
    pub ring: SemiringJson,
    pub module: Option<SemimoduleJson>,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub max_size: usize,
    /// Semimodules are enumerated up to this size for each ring.
    pub module_bound: usize,
    pub rings_checked: usize,
    pub modules_checked: usize,
    /// Absorbing rings whose smallest faithful semimodule lacks (*).
    pub nostar_checked: usize,
    pub counterexamples: Vec<Counterexample>,
}

pub const IRREDUCIBILITY_CONJECTURE: &str = "sub-irreducible iff quotient-irreducible";
pub const BOX_CONJECTURE: &str = "absorbing without (*) is a box construction";

/// Runs both conjecture suites over the corpus of rings up to `max_size`,
/// enumerating idempotent semimodules of each ring up to `module_bound`
/// elements.
pub fn run_conjectures(
    max_size: usize,
    module_bound: usize,
    exec: Exec,
    jobs: usize,
) -> Result<ConjectureReport, CharError> {
    let corpus = corpus(max_size, exec, jobs)?;
    let per_ring = exec.with_jobs(jobs, || {
        exec.map(&corpus, |e| -> Result<(usize, bool, Vec<Counterexample>), CharError> {
            let r = &e.semiring;
            let mut found = Vec::new();
            let modules = enumerate_semimodules(r, module_bound)?;
            for m in &modules {
                if !m.is_idempotent() {
                    continue;
                }
                let irr = m.irreducibility()?;
                if irr.sub_irreducible != irr.quotient_irreducible {
                    found.push(Counterexample {
                        conjecture: IRREDUCIBILITY_CONJECTURE.into(),
                        ring: SemiringJson::from_semiring(r),
                        module: SemimoduleJson::from_semimodule(m).ok(),
                        detail: format!(
                            "sub_irreducible = {}, quotient_irreducible = {}",
                            irr.sub_irreducible, irr.quotient_irreducible
                        ),
                    });
                }
            }
            let nostar = e.case == CaseTag::AbsorbingNostar;
            if nostar && recognize_box(r)?.is_none() {
                found.push(Counterexample {
                    conjecture: BOX_CONJECTURE.into(),
                    ring: SemiringJson::from_semiring(r),
                    module: SemimoduleJson::from_semimodule(&smallest_faithful(r)?).ok(),
                    detail: "no construction instance is isomorphic".into(),
                });
            }
            Ok((modules.len(), nostar, found))
        })
    });
    let mut report = ConjectureReport {
        max_size,
        module_bound,
        rings_checked: corpus.len(),
        ..Default::default()
    };
    for item in per_ring {
        let (modules, nostar, found) = item?;
        report.modules_checked += modules;
        report.nostar_checked += usize::from(nostar);
        report.counterexamples.extend(found);
    }
    Ok(report)
}

/// Everything `check` prints for one semiring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub size: usize,
    pub axioms_ok: bool,
    pub axiom_violations: Vec<String>,
    pub structure: Option<Structure>,
    pub case: Option<CaseTag>,
    pub verdict: Option<VerdictJson>,
    /// Why the round trip did not run or did not complete.
    pub note: Option<String>,
}

impl CheckReport {
    /// True when the tables are a semiring and any applicable round trip
    /// succeeded.
    pub fn passed(&self) -> bool {
        self.axioms_ok && self.verdict.as_ref().is_none_or(|v| v.verdict == "success")
    }
}

pub fn check_semiring(r: &Semiring) -> CheckReport {
    let axioms = r.verify_axioms();
    let mut report = CheckReport {
        size: r.size(),
        axioms_ok: axioms.passed(),
        axiom_violations: axioms.violations.iter().map(ToString::to_string).collect(),
        structure: None,
        case: None,
        verdict: None,
        note: None,
    };
    if !report.axioms_ok {
        return report;
    }
    let structure = r.structure();
    let applicable = structure.case != CaseTag::NotApplicable;
    report.case = Some(structure.case);
    report.structure = Some(structure);
    if !applicable {
        report.note =
            Some("round trip needs a simple additively idempotent semiring with more than two elements".into());
        return report;
    }
    match theorem_roundtrip(r) {
        Ok(v) => {
            report.case = Some(v.case);
            report.verdict = Some(VerdictJson::from_verdict(&v));
        }
        Err(e) => report.note = Some(e.to_string()),
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_corpus_round_trips() {
        let c = corpus(4, Exec::Sequential, 0).unwrap();
        assert_eq!(c.len(), 4);
        assert!(roundtrip_all(&c, Exec::Parallel).iter().all(|o| o.success));
        assert!(structure_suite_all(&c, Exec::Parallel)
            .unwrap()
            .iter()
            .all(|o| o.violations.is_empty()));
    }

    #[test]
    fn check_non_simple() {
        let b = Semiring::boolean();
        let r = b.product(&b);
        let rep = check_semiring(&r);
        assert!(rep.passed());
        assert!(!rep.structure.unwrap().simple);
        assert!(rep.verdict.is_none());
    }
}
