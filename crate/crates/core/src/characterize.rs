//! The characterization machinery: conditions (1)–(8) on sets of
//! join-morphisms, the four theorem forms, round trips from an abstract
//! semiring to a verified realization, the dualizing pipeline for the
//! left-absorbing case, the `⊠` construction and its recognition,
//! semilattice recovery certificates, and the neutral-element criteria.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::morphism::{
    boxtimes_morphism, enumerate_morphisms, make_e, make_f, make_k, psi_restrict, residual, JoinMorphism,
    MorphismClass, MorphismError, MorphismMonoid,
};
use crate::order::{enumerate_semilattices, BoxProduct, Lattice, OrderError, Semilattice};
use crate::semimodule::{smallest_faithful, SemimoduleError};
use crate::semiring::{CaseTag, MorphismSemiring, Semiring, SemiringError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CharError {
    #[error("a lattice is required")]
    LatticeRequired,
    #[error("unknown condition ({0})")]
    UnknownCondition(u8),
    #[error("hypothesis not met: {0}")]
    Hypothesis(String),
    #[error("invalid construction: {0}")]
    InvalidSpec(String),
    #[error("conditions unmet: {0:?}")]
    ConditionsUnmet(Vec<u8>),
    #[error(transparent)]
    Morphism(#[from] MorphismError),
    #[error(transparent)]
    Semiring(#[from] SemiringError),
    #[error(transparent)]
    Semimodule(#[from] SemimoduleError),
    #[error(transparent)]
    Order(#[from] OrderError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionOutcome {
    pub holds: bool,
    /// For a failure: the quantified elements that violate it. Conditions
    /// quantifying over maps report the map's position in the input.
    pub witness: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub outcomes: BTreeMap<u8, ConditionOutcome>,
}

impl ConditionReport {
    pub fn holds(&self, c: u8) -> bool {
        self.outcomes.get(&c).is_some_and(|o| o.holds)
    }

    pub fn all_hold(&self) -> bool {
        self.outcomes.values().all(|o| o.holds)
    }

    pub fn failed(&self) -> Vec<u8> {
        self.outcomes
            .iter()
            .filter(|(_, o)| !o.holds)
            .map(|(&c, _)| c)
            .collect()
    }
}

fn outcome(witness: Option<Vec<usize>>) -> ConditionOutcome {
    ConditionOutcome {
        holds: witness.is_none(),
        witness,
    }
}

/// Evaluates the listed conditions on the set `maps` of join-morphisms of `l`.
pub fn check_conditions(l: &Semilattice, maps: &[JoinMorphism], which: &[u8]) -> Result<ConditionReport, CharError> {
    for f in maps {
        f.validate(l)?;
    }
    let n = l.size();
    let top = l.top();
    let set: HashSet<&[usize]> = maps.iter().map(JoinMorphism::image).collect();
    let has = |f: &JoinMorphism| set.contains(f.image());
    let below_top: Vec<usize> = (0..n).filter(|&a| a != top).collect();
    let mut report = ConditionReport::default();
    for &c in which {
        let w = match c {
            1 => below_top
                .iter()
                .flat_map(|&a| (0..n).map(move |b| (a, b)))
                .find(|&(a, b)| !has(&make_f(l, a, b).expect("a below top")))
                .map(|(a, b)| vec![a, b]),
            2 => maps
                .iter()
                .position(|f| {
                    !below_top
                        .iter()
                        .any(|&a| (0..n).any(|b| make_f(l, a, b).expect("a below top").leq(f, l)))
                })
                .map(|i| vec![i]),
            3 => (0..n).find(|&a| !has(&make_k(l, a))).map(|a| vec![a]),
            4 => maps
                .iter()
                .position(|f| !(0..n).any(|a| make_k(l, a).leq(f, l)))
                .map(|i| vec![i]),
            5 => (0..n)
                .flat_map(|a| below_top.iter().map(move |&b| (a, b)))
                .find(|&(a, b)| {
                    !maps.iter().any(|f| {
                        (0..n).all(|x| {
                            if l.leq(x, a) {
                                f.apply(x) == b
                            } else {
                                l.lt(b, f.apply(x))
                            }
                        })
                    })
                })
                .map(|(a, b)| vec![a, b]),
            6..=8 => {
                let zero = l.bottom().ok_or(CharError::LatticeRequired)?;
                match c {
                    6 => below_top
                        .iter()
                        .find(|&&a| !has(&make_f(l, a, zero).expect("a below top")))
                        .map(|&a| vec![a]),
                    7 => maps
                        .iter()
                        .position(|f| {
                            !below_top
                                .iter()
                                .any(|&a| make_f(l, a, zero).expect("a below top").leq(f, l))
                        })
                        .map(|i| vec![i]),
                    _ => below_top
                        .iter()
                        .filter(|&&a| a != zero)
                        .flat_map(|&a| (0..n).map(move |b| (a, b)))
                        .find(|&(a, b)| !maps.iter().any(|f| f.apply(a) == b))
                        .map(|(a, b)| vec![a, b]),
                }
            }
            other => return Err(CharError::UnknownCondition(other)),
        };
        report.outcomes.insert(c, outcome(w));
    }
    Ok(report)
}

/// The four shapes of realization, one per case of the greatest element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremForm {
    /// Subsemiring of `Res(L)` containing every `e_{a,b}`.
    Zum,
    /// Subsemiring of `Res1(L)` with (6), (7), (8), `|L| > 2`.
    Res1,
    /// Subsemiring of `JM(L)` with (3), (4), (5), `|L| > 1`.
    Jm,
    /// Subsemiring of `JM1(L)` with (1), (2), `L` nontrivial with (*).
    Jm1,
}

impl TheoremForm {
    pub fn for_case(case: CaseTag) -> Option<Self> {
        match case {
            CaseTag::Neither => Some(Self::Zum),
            CaseTag::RightNotLeft => Some(Self::Res1),
            CaseTag::LeftNotRight => Some(Self::Jm),
            CaseTag::AbsorbingStar => Some(Self::Jm1),
            _ => None,
        }
    }

    pub fn conditions(self) -> &'static [u8] {
        match self {
            Self::Zum => &[],
            Self::Res1 => &[6, 7, 8],
            Self::Jm => &[3, 4, 5],
            Self::Jm1 => &[1, 2],
        }
    }

    pub fn class(self) -> MorphismClass {
        match self {
            Self::Zum => MorphismClass::Res,
            Self::Res1 => MorphismClass::Res1,
            Self::Jm => MorphismClass::Jm,
            Self::Jm1 => MorphismClass::Jm1,
        }
    }

    pub fn case(self) -> CaseTag {
        match self {
            Self::Zum => CaseTag::Neither,
            Self::Res1 => CaseTag::RightNotLeft,
            Self::Jm => CaseTag::LeftNotRight,
            Self::Jm1 => CaseTag::AbsorbingStar,
        }
    }

    /// Generators every semiring of this form contains.
    pub fn generators(self, l: &Semilattice) -> Result<Vec<JoinMorphism>, CharError> {
        let n = l.size();
        let top = l.top();
        Ok(match self {
            Self::Zum => {
                let mut v = Vec::new();
                for a in 0..n {
                    for b in 0..n {
                        v.push(make_e(l, a, b)?);
                    }
                }
                v
            }
            Self::Res1 => {
                let zero = l.bottom().ok_or(CharError::LatticeRequired)?;
                (0..n)
                    .filter(|&a| a != top)
                    .map(|a| make_f(l, a, zero))
                    .collect::<Result<_, _>>()?
            }
            Self::Jm => (0..n).map(|a| make_k(l, a)).collect(),
            Self::Jm1 => (0..n)
                .filter(|&a| a != top)
                .flat_map(|a| (0..n).map(move |b| (a, b)))
                .map(|(a, b)| make_f(l, a, b))
                .collect::<Result<_, _>>()?,
        })
    }
}

/// Result of checking a set of maps against a theorem form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormCheck {
    pub form: TheoremForm,
    /// Size, lattice and (*) requirements on `L`.
    pub semilattice_ok: bool,
    /// Every map lies in the ambient morphism class.
    pub class_ok: bool,
    /// Required generators that are missing, as index pairs.
    pub missing_generators: Vec<Vec<usize>>,
    pub conditions: ConditionReport,
}

impl FormCheck {
    pub fn passed(&self) -> bool {
        self.semilattice_ok && self.class_ok && self.missing_generators.is_empty() && self.conditions.all_hold()
    }
}

pub fn check_form(l: &Semilattice, maps: &[JoinMorphism], form: TheoremForm) -> Result<FormCheck, CharError> {
    let n = l.size();
    let semilattice_ok = match form {
        TheoremForm::Zum => l.is_lattice(),
        TheoremForm::Res1 => l.is_lattice() && n > 2,
        TheoremForm::Jm => n > 1,
        TheoremForm::Jm1 => n > 1 && l.has_star_property(),
    };
    if form.class().needs_lattice() && !l.is_lattice() {
        return Ok(FormCheck {
            form,
            semilattice_ok: false,
            class_ok: false,
            missing_generators: Vec::new(),
            conditions: ConditionReport::default(),
        });
    }
    let mut class_ok = true;
    for f in maps {
        class_ok &= f.belongs(l, form.class())?;
    }
    let mut missing = Vec::new();
    if form == TheoremForm::Zum {
        let set: HashSet<&[usize]> = maps.iter().map(JoinMorphism::image).collect();
        for a in 0..n {
            for b in 0..n {
                if !set.contains(make_e(l, a, b)?.image()) {
                    missing.push(vec![a, b]);
                }
            }
        }
    }
    let conditions = check_conditions(l, maps, form.conditions())?;
    Ok(FormCheck {
        form,
        semilattice_ok,
        class_ok,
        missing_generators: missing,
        conditions,
    })
}

/// A semiring together with maps realizing it: `maps[r]` realizes element `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Realization {
    pub semilattice: Semilattice,
    pub maps: Vec<JoinMorphism>,
    pub semiring: Semiring,
}

impl From<MorphismSemiring> for Realization {
    fn from(ms: MorphismSemiring) -> Self {
        Self {
            semilattice: ms.semilattice,
            maps: ms.morphisms,
            semiring: ms.semiring,
        }
    }
}

impl Realization {
    /// Checks that `r -> maps[r]` is an injective homomorphism.
    pub fn is_faithful_homomorphism(&self) -> bool {
        let r = &self.semiring;
        let n = r.size();
        if self.maps.len() != n || self.maps.iter().collect::<BTreeSet<_>>().len() != n {
            return false;
        }
        (0..n).all(|x| {
            (0..n).all(|y| {
                self.maps[x].sup(&self.maps[y], &self.semilattice).ok().as_ref() == Some(&self.maps[r.add(x, y)])
                    && self.maps[x].compose(&self.maps[y]).ok().as_ref() == Some(&self.maps[r.mul(x, y)])
            })
        })
    }

    fn position(&self, f: &JoinMorphism) -> Option<usize> {
        self.maps.iter().position(|g| g == f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecoveryKind {
    /// `a -> f_{a,0}` onto `f_{0,0} ∘ R`, order reversing, on `L \ {1}`.
    Gamma,
    /// `a -> k_a` onto `R ∘ k_1`.
    Lambda,
    /// `c -> f_{a,c}` onto `R ∘ f_{a,b}`.
    Phi,
    /// `c -> e_{0,c}` onto `R ∘ e_{0,1}`.
    ZeroMap,
    /// Matched against the `⊠` construction.
    Boxtimes,
}

/// A verified (dual) order isomorphism between `L` (or `L \ {1}`) and a set
/// of elements of `R` computed from `R` alone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recovery {
    pub kind: RecoveryKind,
    /// Elements of `L` in the domain of the map.
    pub domain: Vec<usize>,
    /// Position in the realization of the image of each domain element.
    pub images: Vec<usize>,
    pub dual: bool,
    /// The semilattice rebuilt from the image set and its order in `R`.
    pub recovered: Semilattice,
    pub verified: bool,
}

/// Builds the certificate for a realization of the given case.
pub fn recover_semilattice(real: &Realization, case: CaseTag) -> Result<Recovery, CharError> {
    let l = &real.semilattice;
    let n = l.size();
    let top = l.top();
    let (kind, domain, target, dual, generator): (RecoveryKind, Vec<usize>, Vec<JoinMorphism>, bool, JoinMorphism) =
        match case {
            CaseTag::RightNotLeft => {
                let zero = l.bottom().ok_or(CharError::LatticeRequired)?;
                let dom: Vec<usize> = (0..n).filter(|&a| a != top).collect();
                let tgt = dom.iter().map(|&a| make_f(l, a, zero)).collect::<Result<_, _>>()?;
                (RecoveryKind::Gamma, dom, tgt, true, make_f(l, zero, zero)?)
            }
            CaseTag::LeftNotRight => (
                RecoveryKind::Lambda,
                (0..n).collect(),
                (0..n).map(|a| make_k(l, a)).collect(),
                false,
                make_k(l, top),
            ),
            CaseTag::AbsorbingStar | CaseTag::Absorbing => {
                let a = l.minimal_elements()[0];
                let b = *l
                    .coatoms()
                    .first()
                    .ok_or_else(|| CharError::Hypothesis("trivial semilattice".into()))?;
                let tgt = (0..n).map(|c| make_f(l, a, c)).collect::<Result<_, _>>()?;
                (RecoveryKind::Phi, (0..n).collect(), tgt, false, make_f(l, a, b)?)
            }
            CaseTag::Neither => {
                let zero = l.bottom().ok_or(CharError::LatticeRequired)?;
                let tgt = (0..n).map(|c| make_e(l, zero, c)).collect::<Result<_, _>>()?;
                (
                    RecoveryKind::ZeroMap,
                    (0..n).collect(),
                    tgt,
                    false,
                    make_e(l, zero, top)?,
                )
            }
            other => return Err(CharError::Hypothesis(format!("no recovery map for case {other}"))),
        };
    // The image set computed from R: composites with the fixed generator.
    let image_set: BTreeSet<JoinMorphism> = real
        .maps
        .iter()
        .map(|f| match kind {
            RecoveryKind::Gamma => generator.compose(f),
            _ => f.compose(&generator),
        })
        .collect::<Result<_, _>>()?;
    let target_set: BTreeSet<JoinMorphism> = target.iter().cloned().collect();
    let mut verified = image_set == target_set && target_set.len() == target.len();
    let images: Vec<usize> = target.iter().map(|f| real.position(f).unwrap_or(usize::MAX)).collect();
    verified &= images.iter().all(|&i| i != usize::MAX) && real.position(&generator).is_some();
    for (i, &x) in domain.iter().enumerate() {
        for (j, &y) in domain.iter().enumerate() {
            let ord = if dual {
                target[j].leq(&target[i], l)
            } else {
                target[i].leq(&target[j], l)
            };
            verified &= l.leq(x, y) == ord;
        }
    }
    // Order of the image set as seen inside R, with a new top when the
    // domain omits 1.
    let k = target.len();
    let extra = usize::from(dual);
    let recovered = Semilattice::from_order(k + extra, |i, j| {
        if j == k {
            return true;
        }
        if i == k {
            return false;
        }
        if dual {
            target[j].leq(&target[i], l)
        } else {
            target[i].leq(&target[j], l)
        }
    })?;
    verified &= recovered.is_isomorphic(l);
    Ok(Recovery {
        kind,
        domain,
        images,
        dual,
        recovered,
        verified,
    })
}

/// Applies `f -> f⁺` and then restriction to `(K^d) \ {0}`: a subsemiring of
/// `Res1(K)` with (6), (7), (8) becomes a subsemiring of `JM((K^d)_-)` with
/// (3), (4), (5), isomorphic to the opposite of the input.
pub fn dualize_pipeline(k: &Lattice, s: &[JoinMorphism]) -> Result<MorphismSemiring, CharError> {
    for f in s {
        if !f.belongs(k.semilattice(), MorphismClass::Res1)? {
            return Err(CharError::Hypothesis(format!("{f:?} is not in Res1(K)")));
        }
    }
    let report = check_conditions(k.semilattice(), s, &[6, 7, 8])?;
    if !report.all_hold() {
        return Err(CharError::ConditionsUnmet(report.failed()));
    }
    let l = k.dual();
    let (minus, _) = l.remove_bottom()?;
    let maps = s
        .iter()
        .map(|f| psi_restrict(&l, &residual(k, f)?))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MorphismSemiring::from_closed_set(&minus, maps)?)
}

fn check_round_hypotheses(r: &Semiring) -> Result<(), CharError> {
    if r.size() <= 2 {
        return Err(CharError::Hypothesis("ring has at most two elements".into()));
    }
    if !r.is_additively_idempotent() {
        return Err(CharError::Hypothesis("ring is not additively idempotent".into()));
    }
    if !r.is_simple() {
        return Err(CharError::Hypothesis("ring is not simple".into()));
    }
    Ok(())
}

/// Outcome of the round trip for one semiring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub case: CaseTag,
    pub realization: Realization,
    /// `direct` when the smallest faithful semimodule realizes the form,
    /// `opposite` when the realization came from the dualizing pipeline,
    /// `boxtimes` for a construction match.
    pub route: &'static str,
    pub form: Option<FormCheck>,
    pub recovery: Option<Recovery>,
    pub box_match: Option<BoxMatch>,
    pub success: bool,
    pub witnesses: Vec<String>,
}

/// Builds the smallest faithful semimodule, embeds `R` into its
/// join-morphisms, classifies the case, and verifies the realization
/// against the matching theorem form and recovery certificate.
pub fn theorem_roundtrip(r: &Semiring) -> Result<Verdict, CharError> {
    check_round_hypotheses(r)?;
    let m = smallest_faithful(r)?;
    let emb = m.embedding_t()?;
    let case = match r.structure().case {
        CaseTag::Absorbing => {
            if m.star()?.0 {
                CaseTag::AbsorbingStar
            } else {
                CaseTag::AbsorbingNostar
            }
        }
        c => c,
    };
    let mut real = Realization {
        semilattice: emb.semilattice.clone(),
        maps: emb.maps.clone(),
        semiring: r.clone(),
    };
    let mut witnesses = Vec::new();
    if !real.is_faithful_homomorphism() {
        witnesses.push("representation on the smallest faithful semimodule is not an embedding".into());
    }

    if case == CaseTag::AbsorbingNostar {
        let found = recognize_box(r)?;
        if found.is_none() {
            witnesses.push("no matching construction found".into());
        }
        let success = found.is_some() && witnesses.is_empty();
        return Ok(Verdict {
            case,
            realization: real,
            route: "boxtimes",
            form: None,
            recovery: None,
            box_match: found,
            success,
            witnesses,
        });
    }

    let form = TheoremForm::for_case(case).ok_or_else(|| CharError::Hypothesis(format!("case {case}")))?;
    let mut route = "direct";
    let mut check = check_form(&real.semilattice, &real.maps, form)?;
    if !check.passed() && form == TheoremForm::Jm {
        // Realize the opposite semiring in Res1 and dualize.
        let op = r.opposite();
        let mop = smallest_faithful(&op)?;
        let k = mop.semilattice()?.as_lattice()?;
        let eop = mop.embedding_t()?;
        let out = dualize_pipeline(&k, &eop.maps)?;
        if let Some(phi) = r.isomorphism(&out.semiring) {
            real = Realization {
                semilattice: out.semilattice.clone(),
                maps: phi.iter().map(|&i| out.morphisms[i].clone()).collect(),
                semiring: r.clone(),
            };
            route = "opposite";
            check = check_form(&real.semilattice, &real.maps, form)?;
        } else {
            witnesses.push("dualized realization is not isomorphic to the input".into());
        }
    }
    if !check.passed() {
        witnesses.push(format!(
            "form {:?}: semilattice_ok={}, class_ok={}, missing={:?}, failed={:?}",
            form,
            check.semilattice_ok,
            check.class_ok,
            check.missing_generators,
            check.conditions.failed()
        ));
    }
    let recovery = recover_semilattice(&real, case)?;
    if !recovery.verified {
        witnesses.push(format!("recovery certificate {:?} failed", recovery.kind));
    }
    let success = witnesses.is_empty();
    Ok(Verdict {
        case,
        realization: real,
        route,
        form: Some(check),
        recovery: Some(recovery),
        box_match: None,
        success,
        witnesses,
    })
}

/// Bitset over a morphism universe.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64).max(1)])
    }
    fn insert(&mut self, i: usize) -> bool {
        let (w, b) = (i / 64, 1u64 << (i % 64));
        let fresh = self.0[w] & b == 0;
        self.0[w] |= b;
        fresh
    }
    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] & (1 << (i % 64)) != 0
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn members(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (wi, &w) in self.0.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                out.push(wi * 64 + w.trailing_zeros() as usize);
                w &= w - 1;
            }
        }
        out
    }
}

fn close_in(u: &MorphismMonoid, set: &Bits, extra: &[usize]) -> Bits {
    let mut bits = set.clone();
    let mut elems = set.members();
    for &e in extra {
        if bits.insert(e) {
            elems.push(e);
        }
    }
    let mut next = 0;
    while next < elems.len() {
        let f = elems[next];
        next += 1;
        let mut i = 0;
        while i < next {
            let g = elems[i];
            i += 1;
            for h in [u.sup(f, g), u.compose(f, g), u.compose(g, f)] {
                if bits.insert(h) {
                    elems.push(h);
                }
            }
        }
    }
    bits
}

/// Every nonempty subsemiring of the monoid `u` containing `base` with at
/// most `max_size` elements, as sorted index lists.
pub fn subsemirings_containing(u: &MorphismMonoid, base: &[usize], max_size: Option<usize>) -> Vec<Vec<usize>> {
    let cap = max_size.unwrap_or(usize::MAX);
    let start = close_in(u, &Bits::new(u.len()), base);
    let mut out = Vec::new();
    if start.count() > cap {
        return out;
    }
    let mut seen: HashSet<Bits> = HashSet::new();
    seen.insert(start.clone());
    let mut stack = vec![start];
    while let Some(c) = stack.pop() {
        for x in 0..u.len() {
            if c.contains(x) {
                continue;
            }
            let d = close_in(u, &c, &[x]);
            if d.count() <= cap && !seen.contains(&d) {
                seen.insert(d.clone());
                stack.push(d);
            }
        }
        if c.count() > 0 {
            out.push(c.members());
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// All semirings of the given form on `l`, pairwise non-isomorphic, ordered
/// by size and then by their sorted image lists.
pub fn induced_semirings(l: &Semilattice, form: TheoremForm) -> Result<Vec<MorphismSemiring>, CharError> {
    if form.class().needs_lattice() && !l.is_lattice() {
        return Err(CharError::LatticeRequired);
    }
    let u = MorphismMonoid::new(l, form.class())?;
    let base: Vec<usize> = form
        .generators(l)?
        .iter()
        .map(|f| {
            u.index_of(f)
                .ok_or_else(|| CharError::Hypothesis(format!("generator {f:?} outside the class")))
        })
        .collect::<Result<_, _>>()?;
    let mut found: Vec<MorphismSemiring> = Vec::new();
    for sub in subsemirings_containing(&u, &base, None) {
        let maps: Vec<JoinMorphism> = sub.iter().map(|&i| u.maps[i].clone()).collect();
        if !check_form(l, &maps, form)?.passed() {
            continue;
        }
        let ms = MorphismSemiring::from_closed_set(l, maps)?;
        if found
            .iter()
            .any(|f| f.semiring.size() == ms.semiring.size() && f.semiring.is_isomorphic(&ms.semiring))
        {
            continue;
        }
        found.push(ms);
    }
    Ok(found)
}

/// Element names `a, b, c, ...` and the `R_{size,k}` labels.
pub fn size_labels(sizes: &[usize]) -> Vec<String> {
    let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
    let counts: BTreeMap<usize, usize> = sizes.iter().fold(BTreeMap::new(), |mut m, &s| {
        *m.entry(s).or_default() += 1;
        m
    });
    sizes
        .iter()
        .map(|&s| {
            let k = seen.entry(s).or_default();
            *k += 1;
            if counts[&s] > 1 {
                format!("R_{{{s},{k}}}")
            } else {
                format!("R_{{{s}}}")
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorPolicy {
    /// Closure of `{f_{a,b} ⊠ g}`.
    Minimal,
    /// Every `f ⊠ g` that lies above some `f_{a,b} ⊠ g`.
    Maximal,
}

/// `L`, the size `n` of the flat semilattice `K = {0..n-1} ∪ {∞}`, and a
/// group of permutations of `0..n` acting freely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxConstructionSpec {
    pub l: Semilattice,
    pub n: usize,
    pub group: Vec<Vec<usize>>,
    pub policy: GeneratorPolicy,
}

impl BoxConstructionSpec {
    pub fn validate(&self) -> Result<(), CharError> {
        let bad = |s: String| Err(CharError::InvalidSpec(s));
        let n = self.n;
        if n == 0 {
            return bad("n must be positive".into());
        }
        if self.l.size() < 2 {
            return bad("L must be nontrivial".into());
        }
        let set: BTreeSet<&Vec<usize>> = self.group.iter().collect();
        for g in &self.group {
            let mut s = g.clone();
            s.sort_unstable();
            if s != (0..n).collect::<Vec<_>>() {
                return bad(format!("{g:?} is not a permutation of 0..{n}"));
            }
        }
        if !set.contains(&(0..n).collect::<Vec<_>>()) {
            return bad("group lacks the identity".into());
        }
        for g in &self.group {
            for h in &self.group {
                let gh: Vec<usize> = (0..n).map(|x| g[h[x]]).collect();
                if !set.contains(&gh) {
                    return bad("not closed under composition".into());
                }
                if g != h && (0..n).any(|x| g[x] == h[x]) {
                    return bad(format!("{g:?} and {h:?} agree somewhere; the action is not free"));
                }
            }
        }
        Ok(())
    }

    /// `S̄ = S ∪ {k_∞}` as join-morphisms of `K`, sorted.
    pub fn s_bar(&self) -> Vec<JoinMorphism> {
        let n = self.n;
        let mut v: Vec<JoinMorphism> = self
            .group
            .iter()
            .map(|g| JoinMorphism::from_image(g.iter().copied().chain([n]).collect()))
            .collect();
        v.push(JoinMorphism::from_image(vec![n; n + 1]));
        v.sort();
        v.dedup();
        v
    }
}

#[derive(Clone, Debug)]
pub struct BoxConstruction {
    pub product: BoxProduct,
    pub semiring: MorphismSemiring,
    pub conditions_abc: [bool; 3],
    pub simple: bool,
    pub additively_idempotent: bool,
    pub absorbing_greatest: bool,
    /// `Some(verdict)` when `|S| = n` and (`n > 1` or `L` lacks (*)): whether
    /// `(L ⊠ K, ∨)` is irreducible and lacks (*). `None` otherwise.
    pub irreducible_without_star: Option<bool>,
}

impl BoxConstruction {
    pub fn verified(&self) -> bool {
        self.conditions_abc.iter().all(|&b| b)
            && self.simple
            && self.additively_idempotent
            && self.absorbing_greatest
            && self.irreducible_without_star != Some(false)
    }
}

struct BoxUniverse {
    product: BoxProduct,
    /// `f ⊠ g` for every `f ∈ JM1(L)`, `g ∈ S̄`.
    all: BTreeSet<JoinMorphism>,
    /// `f_{a,b} ⊠ g`.
    base: Vec<JoinMorphism>,
}

fn box_universe(spec: &BoxConstructionSpec) -> Result<BoxUniverse, CharError> {
    let k = Semilattice::flat(spec.n);
    let product = BoxProduct::new(&spec.l, &k);
    let s_bar = spec.s_bar();
    let l = &spec.l;
    let top = l.top();
    let mut all = BTreeSet::new();
    for f in enumerate_morphisms(l, MorphismClass::Jm1)? {
        for g in &s_bar {
            all.insert(boxtimes_morphism(&product, &f, g)?);
        }
    }
    let mut base = Vec::new();
    for a in (0..l.size()).filter(|&a| a != top) {
        for b in 0..l.size() {
            let f = make_f(l, a, b)?;
            for g in &s_bar {
                base.push(boxtimes_morphism(&product, &f, g)?);
            }
        }
    }
    base.sort();
    base.dedup();
    Ok(BoxUniverse { product, all, base })
}

fn check_abc(univ: &BoxUniverse, maps: &[JoinMorphism]) -> [bool; 3] {
    let p = &univ.product.product;
    let set: BTreeSet<&JoinMorphism> = maps.iter().collect();
    [
        maps.iter().all(|m| univ.all.contains(m)),
        univ.base.iter().all(|b| set.contains(b)),
        maps.iter().all(|m| univ.base.iter().any(|b| b.leq(m, p))),
    ]
}

/// Builds the construction's semiring on `JM1(L ⊠ K)` and verifies it.
pub fn construct_box(spec: &BoxConstructionSpec) -> Result<BoxConstruction, CharError> {
    spec.validate()?;
    let univ = box_universe(spec)?;
    let p = univ.product.product.clone();
    let semiring = match spec.policy {
        GeneratorPolicy::Minimal => crate::semiring::closure_semiring(&p, &univ.base, None)?,
        GeneratorPolicy::Maximal => {
            let maps: Vec<JoinMorphism> = univ
                .all
                .iter()
                .filter(|m| univ.base.iter().any(|b| b.leq(m, &p)))
                .cloned()
                .collect();
            MorphismSemiring::from_closed_set(&p, maps)?
        }
    };
    let conditions_abc = check_abc(&univ, &semiring.morphisms);
    let r = &semiring.semiring;
    let greatest = r.greatest();
    let absorbing_greatest = greatest.is_some_and(|g| r.is_left_absorbing(g) && r.is_right_absorbing(g));
    let gate = spec.group.len() == spec.n && (spec.n > 1 || !spec.l.has_star_property());
    let irreducible_without_star = if gate {
        let m = crate::semimodule::Semimodule::from_realization(&semiring);
        Some(m.irreducibility()?.irreducible && !p.has_star_property())
    } else {
        None
    };
    Ok(BoxConstruction {
        product: univ.product,
        conditions_abc,
        simple: r.is_simple(),
        additively_idempotent: r.is_additively_idempotent(),
        absorbing_greatest,
        irreducible_without_star,
        semiring,
    })
}

/// Permutation groups of degree `n` and order `n` acting freely (the
/// regular ones), as sorted element lists. Every group here is generated
/// by at most two elements, which suffices for `n <= 7`.
pub fn regular_groups(n: usize) -> Vec<Vec<Vec<usize>>> {
    let perms = crate::relabel::all_permutations(n);
    let id: Vec<usize> = (0..n).collect();
    let fpf: Vec<&Vec<usize>> = perms
        .iter()
        .filter(|p| **p == id || (0..n).all(|x| p[x] != x))
        .collect();
    let mut out: BTreeSet<Vec<Vec<usize>>> = BTreeSet::new();
    for (i, g) in fpf.iter().enumerate() {
        for h in &fpf[i..] {
            let mut set: BTreeSet<Vec<usize>> = BTreeSet::from([id.clone(), (*g).clone(), (*h).clone()]);
            let mut ok = true;
            loop {
                let cur: Vec<Vec<usize>> = set.iter().cloned().collect();
                let before = set.len();
                for a in &cur {
                    for b in &cur {
                        set.insert((0..n).map(|x| a[b[x]]).collect());
                    }
                }
                if set.len() > n {
                    ok = false;
                    break;
                }
                if set.len() == before {
                    break;
                }
            }
            if ok && set.len() == n {
                let elems: Vec<Vec<usize>> = set.into_iter().collect();
                let free = elems
                    .iter()
                    .all(|a| elems.iter().all(|b| a == b || (0..n).all(|x| a[x] != b[x])));
                if free {
                    out.insert(elems);
                }
            }
        }
    }
    out.into_iter().collect()
}

/// A construction instance whose semiring is isomorphic to a given one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxMatch {
    pub l: Semilattice,
    pub n: usize,
    pub group: Vec<Vec<usize>>,
    pub semiring: MorphismSemiring,
    /// Isomorphism from the input semiring onto `semiring.semiring`.
    pub isomorphism: Vec<usize>,
}

/// Searches construction instances `(L, n, S)` with `|S| = n` and
/// `(|L| - 1)·n + 1 = |M|` for `M` the smallest faithful semimodule, over
/// every subsemiring satisfying (a), (b), (c) with `|R|` elements.
pub fn recognize_box(r: &Semiring) -> Result<Option<BoxMatch>, CharError> {
    let m = smallest_faithful(r)?.size();
    for n in 1..m {
        if (m - 1) % n != 0 {
            continue;
        }
        let lsize = (m - 1) / n + 1;
        if lsize < 2 {
            continue;
        }
        let groups = regular_groups(n);
        for l in enumerate_semilattices(lsize) {
            if n == 1 && l.has_star_property() {
                continue;
            }
            for group in &groups {
                let spec = BoxConstructionSpec {
                    l: l.clone(),
                    n,
                    group: group.clone(),
                    policy: GeneratorPolicy::Minimal,
                };
                let univ = box_universe(&spec)?;
                let p = &univ.product.product;
                let Some(u) = MorphismMonoid::from_maps(p, univ.all.iter().cloned().collect())? else {
                    continue;
                };
                let base: Vec<usize> = univ.base.iter().filter_map(|b| u.index_of(b)).collect();
                for sub in subsemirings_containing(&u, &base, Some(r.size())) {
                    if sub.len() != r.size() {
                        continue;
                    }
                    let maps: Vec<JoinMorphism> = sub.iter().map(|&i| u.maps[i].clone()).collect();
                    if !check_abc(&univ, &maps).iter().all(|&b| b) {
                        continue;
                    }
                    let ms = MorphismSemiring::from_closed_set(p, maps)?;
                    if let Some(phi) = r.isomorphism(&ms.semiring) {
                        return Ok(Some(BoxMatch {
                            l: l.clone(),
                            n,
                            group: group.clone(),
                            semiring: ms,
                            isomorphism: phi,
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Both directions of the neutral-element criteria for a realization of
/// one of the three characterized forms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeutralReport {
    pub additive_neutral: Option<usize>,
    pub additive_predicted: bool,
    /// The neutral element is the predicted map and has the predicted
    /// absorption behavior.
    pub additive_shape_ok: bool,
    pub multiplicative_neutral: Option<usize>,
    /// `id_L` belongs to the realization.
    pub identity_present: bool,
    /// The order-theoretic consequence of `id_L ∈ R` holds when it applies.
    pub multiplicative_consequence_ok: bool,
    pub multiplicative_implies_additive: bool,
}

impl NeutralReport {
    pub fn consistent(&self) -> bool {
        self.additive_neutral.is_some() == self.additive_predicted
            && self.additive_shape_ok
            && self.multiplicative_neutral.is_some() == self.identity_present
            && self.multiplicative_consequence_ok
            && self.multiplicative_implies_additive
    }
}

pub fn neutral_criteria(real: &Realization, form: TheoremForm) -> Result<NeutralReport, CharError> {
    let l = &real.semilattice;
    let r = &real.semiring;
    let top_ji = l.is_join_irreducible(l.top());
    let lattice = l.is_lattice();
    let additive_neutral = r.additive_neutral();
    let multiplicative_neutral = r.multiplicative_neutral();
    let predicted = match form {
        TheoremForm::Zum => true,
        TheoremForm::Res1 => top_ji,
        TheoremForm::Jm => lattice,
        TheoremForm::Jm1 => top_ji && lattice,
    };
    let additive_shape_ok = match additive_neutral {
        None => true,
        Some(z) => {
            let (left, right) = (r.is_left_absorbing(z), r.is_right_absorbing(z));
            let expected = match form {
                TheoremForm::Zum => Some(make_k(l, l.bottom().ok_or(CharError::LatticeRequired)?)),
                TheoremForm::Res1 | TheoremForm::Jm1 => {
                    let below = l
                        .top_lower_neighbor()
                        .ok_or_else(|| CharError::Hypothesis("top is not join-irreducible".into()))?;
                    Some(make_f(l, below, l.bottom().ok_or(CharError::LatticeRequired)?)?)
                }
                TheoremForm::Jm => Some(make_k(l, l.bottom().ok_or(CharError::LatticeRequired)?)),
            };
            let absorb_ok = match form {
                TheoremForm::Zum => left && right,
                TheoremForm::Res1 => right && !left,
                TheoremForm::Jm => left && !right,
                TheoremForm::Jm1 => !left && !right,
            };
            absorb_ok && expected.as_ref() == Some(&real.maps[z])
        }
    };
    let identity = JoinMorphism::identity(l.size());
    let identity_present = real.maps.contains(&identity);
    let multiplicative_consequence_ok = !identity_present
        || match form {
            TheoremForm::Zum => true,
            TheoremForm::Res1 => top_ji,
            TheoremForm::Jm => lattice,
            TheoremForm::Jm1 => top_ji && lattice,
        };
    Ok(NeutralReport {
        additive_neutral,
        additive_predicted: predicted,
        additive_shape_ok,
        multiplicative_neutral,
        identity_present,
        multiplicative_consequence_ok,
        multiplicative_implies_additive: multiplicative_neutral.is_none() || additive_neutral.is_some(),
    })
}

/// Buckets of the classification of finite semirings with an additively
/// neutral element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bucket {
    /// At most two elements.
    Small,
    /// Matrix semirings over finite fields or zero-multiplication rings of
    /// prime order: labeled only, not verified.
    RingLike,
    /// Subsemiring of `Res(L)` containing every `e_{a,b}`.
    Zum,
    /// `Res1` form with join-irreducible top.
    Res1,
    /// `JM` form on a lattice.
    Jm,
    /// `JM1` form on a lattice with join-irreducible top.
    Jm1,
    NotSimple,
}

impl Bucket {
    /// Item number in the classification, or `None` for non-simple inputs.
    pub fn number(self) -> Option<&'static str> {
        match self {
            Bucket::Small => Some("1"),
            Bucket::RingLike => Some("2-3"),
            Bucket::Zum => Some("4"),
            Bucket::Res1 => Some("5"),
            Bucket::Jm => Some("6"),
            Bucket::Jm1 => Some("7"),
            Bucket::NotSimple => None,
        }
    }
}

pub fn classification_with_additive_neutral(r: &Semiring) -> Result<Bucket, CharError> {
    if r.additive_neutral().is_none() {
        return Err(CharError::Hypothesis("no additively neutral element".into()));
    }
    if !r.is_simple() {
        return Ok(Bucket::NotSimple);
    }
    if r.size() <= 2 {
        return Ok(Bucket::Small);
    }
    if !r.is_additively_idempotent() {
        return Ok(Bucket::RingLike);
    }
    let v = theorem_roundtrip(r)?;
    if !v.success {
        return Err(CharError::Hypothesis(format!("round trip failed: {:?}", v.witnesses)));
    }
    let l = &v.realization.semilattice;
    let (ji, lattice) = (l.is_join_irreducible(l.top()), l.is_lattice());
    let bucket = match v.case {
        CaseTag::Neither => Bucket::Zum,
        CaseTag::RightNotLeft if ji => Bucket::Res1,
        CaseTag::LeftNotRight if lattice => Bucket::Jm,
        CaseTag::AbsorbingStar if ji && lattice => Bucket::Jm1,
        other => {
            return Err(CharError::Hypothesis(format!(
                "case {other} with an additive neutral element contradicts the classification"
            )))
        }
    };
    Ok(bucket)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::{closure_semiring, cyclic_group, v_of_group};

    fn img(v: &[usize]) -> JoinMorphism {
        JoinMorphism::from_image(v.to_vec())
    }

    fn res1_chain3() -> MorphismSemiring {
        MorphismSemiring::from_closed_set(
            &Semilattice::chain(3),
            vec![img(&[0, 0, 2]), img(&[0, 1, 2]), img(&[0, 2, 2])],
        )
        .unwrap()
    }

    fn lnr_chain2() -> MorphismSemiring {
        MorphismSemiring::from_closed_set(&Semilattice::chain(2), vec![img(&[0, 0]), img(&[0, 1]), img(&[1, 1])])
            .unwrap()
    }

    #[test]
    fn conditions_on_examples() {
        let r = res1_chain3();
        let rep = check_conditions(&r.semilattice, &r.morphisms, &[6, 7, 8]).unwrap();
        assert!(rep.all_hold());
        let r = lnr_chain2();
        assert!(check_conditions(&r.semilattice, &r.morphisms, &[3, 4, 5])
            .unwrap()
            .all_hold());
        let c3 = Semilattice::chain(3);
        let rep = check_conditions(&c3, &[JoinMorphism::identity(3), make_k(&c3, 2)], &[1]).unwrap();
        assert_eq!(rep.outcomes[&1].witness, Some(vec![0, 0]));
        assert_eq!(
            check_conditions(&Semilattice::vee(), &[], &[6]),
            Err(CharError::LatticeRequired)
        );
    }

    #[test]
    fn roundtrip_examples() {
        let v = theorem_roundtrip(&res1_chain3().semiring).unwrap();
        assert_eq!(v.case, CaseTag::RightNotLeft);
        assert!(v.success, "{:?}", v.witnesses);
        let v = theorem_roundtrip(&lnr_chain2().semiring).unwrap();
        assert_eq!(v.case, CaseTag::LeftNotRight);
        assert!(v.success, "{:?}", v.witnesses);
        assert!(v.realization.semilattice.is_isomorphic(&Semilattice::chain(2)));
        let vz = v_of_group(2, &cyclic_group(2)).unwrap();
        let v = theorem_roundtrip(&vz).unwrap();
        assert_eq!(v.case, CaseTag::AbsorbingNostar);
        assert!(v.success, "{:?}", v.witnesses);
    }

    #[test]
    fn dualize_example() {
        let r = res1_chain3();
        let k = r.semilattice.as_lattice().unwrap();
        let out = dualize_pipeline(&k, &r.morphisms).unwrap();
        assert_eq!(out.size(), 3);
        assert!(check_conditions(&out.semilattice, &out.morphisms, &[3, 4, 5])
            .unwrap()
            .all_hold());
        assert!(out.semiring.is_isomorphic(&r.semiring.opposite()));
        assert!(out.contains(&JoinMorphism::identity(2)));
    }

    #[test]
    fn recovery_examples() {
        let r: Realization = lnr_chain2().into();
        let rec = recover_semilattice(&r, CaseTag::LeftNotRight).unwrap();
        assert!(rec.verified);
        assert_eq!(rec.images.len(), 2);
        let r: Realization = res1_chain3().into();
        let rec = recover_semilattice(&r, CaseTag::RightNotLeft).unwrap();
        assert!(rec.verified && rec.dual);
        assert_eq!(rec.domain, vec![0, 1]);
    }

    #[test]
    fn induced_counts() {
        assert_eq!(
            induced_semirings(&Semilattice::chain(3), TheoremForm::Res1)
                .unwrap()
                .len(),
            1
        );
        let r4 = induced_semirings(&Semilattice::chain(4), TheoremForm::Res1).unwrap();
        let sizes: Vec<usize> = r4.iter().map(|m| m.size()).collect();
        assert_eq!(sizes, vec![7, 7, 8, 8, 10]);
        assert_eq!(
            size_labels(&sizes),
            vec!["R_{7,1}", "R_{7,2}", "R_{8,1}", "R_{8,2}", "R_{10}"]
        );
        assert_eq!(
            induced_semirings(&Semilattice::chain(2), TheoremForm::Jm)
                .unwrap()
                .len(),
            1
        );
        let abs = induced_semirings(&Semilattice::chain(3), TheoremForm::Jm1).unwrap();
        assert_eq!(abs.iter().map(|m| m.size()).collect::<Vec<_>>(), vec![5, 6]);
    }

    #[test]
    fn box_examples() {
        let spec = BoxConstructionSpec {
            l: Semilattice::chain(2),
            n: 2,
            group: vec![vec![0, 1], vec![1, 0]],
            policy: GeneratorPolicy::Minimal,
        };
        let b = construct_box(&spec).unwrap();
        assert!(b.verified());
        assert_eq!(b.irreducible_without_star, Some(true));
        assert!(b
            .semiring
            .semiring
            .is_isomorphic(&v_of_group(2, &cyclic_group(2)).unwrap()));

        let spec = BoxConstructionSpec {
            l: Semilattice::chain(3),
            n: 1,
            group: vec![vec![0]],
            policy: GeneratorPolicy::Minimal,
        };
        let b = construct_box(&spec).unwrap();
        assert!(b.verified());
        assert_eq!(b.irreducible_without_star, None);
        let c3 = Semilattice::chain(3);
        let gens = TheoremForm::Jm1.generators(&c3).unwrap();
        assert!(b
            .semiring
            .semiring
            .is_isomorphic(&closure_semiring(&c3, &gens, None).unwrap().semiring));

        let trivial = BoxConstructionSpec {
            l: Semilattice::chain(2),
            n: 2,
            group: vec![vec![0, 1]],
            policy: GeneratorPolicy::Minimal,
        };
        assert_eq!(construct_box(&trivial).unwrap().irreducible_without_star, None);

        let not_free = BoxConstructionSpec {
            l: Semilattice::chain(2),
            n: 3,
            group: vec![vec![0, 1, 2], vec![0, 2, 1]],
            policy: GeneratorPolicy::Minimal,
        };
        assert!(matches!(construct_box(&not_free), Err(CharError::InvalidSpec(_))));
    }

    #[test]
    fn regular_group_counts() {
        assert_eq!(regular_groups(1).len(), 1);
        assert_eq!(regular_groups(2).len(), 1);
        // Z/3 only, as one subgroup of S_3
        assert_eq!(regular_groups(3).len(), 1);
        // three cyclic Z/4 and one Klein four-group
        assert_eq!(regular_groups(4).len(), 4);
    }

    #[test]
    fn neutral_examples() {
        let r: Realization = res1_chain3().into();
        let rep = neutral_criteria(&r, TheoremForm::Res1).unwrap();
        assert_eq!(rep.additive_neutral, Some(0));
        assert!(rep.consistent());
        let six: Realization = induced_semirings(&Semilattice::chain(3), TheoremForm::Jm1)
            .unwrap()
            .remove(1)
            .into();
        let rep = neutral_criteria(&six, TheoremForm::Jm1).unwrap();
        assert_eq!(six.maps[rep.additive_neutral.unwrap()], img(&[0, 0, 2]));
        assert!(rep.consistent());
    }

    #[test]
    fn classification_buckets() {
        assert_eq!(
            classification_with_additive_neutral(&Semiring::boolean()).unwrap(),
            Bucket::Small
        );
        assert_eq!(
            classification_with_additive_neutral(&res1_chain3().semiring).unwrap(),
            Bucket::Res1
        );
        assert_eq!(
            classification_with_additive_neutral(&lnr_chain2().semiring).unwrap(),
            Bucket::Jm
        );
        let vz = v_of_group(2, &cyclic_group(2)).unwrap();
        assert!(classification_with_additive_neutral(&vz).is_err());
    }
}
