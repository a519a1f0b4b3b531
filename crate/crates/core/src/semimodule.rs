//! Semimodules over a fixed finite semiring: axioms, faithfulness,
//! subsemimodules, congruences, irreducibility, the smallest faithful
//! semimodule, the representation `r -> T_r`, and density witnesses.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::morphism::{JoinMorphism, MorphismClass, MorphismMonoid};
use crate::order::{OrderError, Semilattice};
use crate::partition::{self, Partition};
use crate::semiring::{CaseTag, MorphismSemiring, Semiring, SemiringError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemimoduleError {
    #[error("{which} table has {got} entries, expected {expected}")]
    TableShape {
        which: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("{which} table entry {value} out of range")]
    EntryOutOfRange { which: &'static str, value: usize },
    #[error("semimodule law {law} fails at {witness:?}")]
    Law { law: &'static str, witness: Vec<usize> },
    #[error("addition is not idempotent")]
    NotIdempotent,
    #[error("hypothesis not met: {0}")]
    Hypothesis(String),
    #[error("carrier of {0} elements is too large for subset search")]
    TooLarge(usize),
    #[error(transparent)]
    Semiring(#[from] SemiringError),
    #[error(transparent)]
    Order(#[from] OrderError),
}

/// A commutative semigroup `(M, +)` with an action of `ring`; `action` is
/// `|R|×|M|` row-major, entry `[r][x] = r·x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Semimodule {
    ring: Semiring,
    m: usize,
    add: Vec<usize>,
    action: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Predicates {
    pub faithful: bool,
    pub quasitrivial: bool,
    pub id_quasitrivial: bool,
    pub idempotent: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Irreducibility {
    pub sub_irreducible: bool,
    pub quotient_irreducible: bool,
    pub irreducible: bool,
}

/// The maps `T_r`, as join-morphisms of `(M, ≤)`, indexed by ring element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub semilattice: Semilattice,
    pub maps: Vec<JoinMorphism>,
    pub injective: bool,
}

impl Embedding {
    /// The image `T(R)` with its own tables (elements sorted by image).
    pub fn image(&self) -> Result<MorphismSemiring, SemiringError> {
        MorphismSemiring::from_closed_set(&self.semilattice, self.maps.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DensityTarget {
    /// The least element `0_M`.
    Zero,
    /// A minimal element `u` witnessing property (*).
    Star(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DensityOutcome {
    /// The ring element acting as `x -> b` on the downset of `a`, `∞_M` elsewhere.
    Found(usize),
    /// Hypotheses hold but no such element exists.
    Refuted { a: usize, target: usize },
}

/// One failed statement of the structure suite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteViolation {
    pub item: String,
    pub detail: String,
}

impl Semimodule {
    pub fn new(ring: Semiring, m: usize, add: Vec<usize>, action: Vec<usize>) -> Result<Self, SemimoduleError> {
        let s = Self { ring, m, add, action };
        s.validate()?;
        Ok(s)
    }

    pub fn from_tables_unchecked(ring: Semiring, m: usize, add: Vec<usize>, action: Vec<usize>) -> Self {
        Self { ring, m, add, action }
    }

    /// `(R, +)` acted on by left multiplication.
    pub fn regular(ring: &Semiring) -> Self {
        Self {
            ring: ring.clone(),
            m: ring.size(),
            add: ring.add_table().to_vec(),
            action: ring.mul_table().to_vec(),
        }
    }

    /// `(L, ∨)` acted on by the realizing morphisms.
    pub fn from_realization(ms: &MorphismSemiring) -> Self {
        let m = ms.semilattice.size();
        Self {
            ring: ms.semiring.clone(),
            m,
            add: ms.semilattice.table().to_vec(),
            action: ms.morphisms.iter().flat_map(|f| f.image().iter().copied()).collect(),
        }
    }

    fn validate(&self) -> Result<(), SemimoduleError> {
        let (m, rn) = (self.m, self.ring.size());
        for (which, t, len) in [("add", &self.add, m * m), ("action", &self.action, rn * m)] {
            if t.len() != len {
                return Err(SemimoduleError::TableShape {
                    which,
                    expected: len,
                    got: t.len(),
                });
            }
            if let Some(&v) = t.iter().find(|&&v| v >= m) {
                return Err(SemimoduleError::EntryOutOfRange { which, value: v });
            }
        }
        let law = |law, witness| Err(SemimoduleError::Law { law, witness });
        for x in 0..m {
            for y in 0..m {
                if self.add(x, y) != self.add(y, x) {
                    return law("commutativity", vec![x, y]);
                }
                for z in 0..m {
                    if self.add(self.add(x, y), z) != self.add(x, self.add(y, z)) {
                        return law("associativity", vec![x, y, z]);
                    }
                }
            }
        }
        let r = &self.ring;
        for a in 0..rn {
            for b in 0..rn {
                for x in 0..m {
                    if self.act(a, self.act(b, x)) != self.act(r.mul(a, b), x) {
                        return law("r(sx) = (rs)x", vec![a, b, x]);
                    }
                    if self.act(r.add(a, b), x) != self.add(self.act(a, x), self.act(b, x)) {
                        return law("(r+s)x = rx+sx", vec![a, b, x]);
                    }
                }
            }
            for x in 0..m {
                for y in 0..m {
                    if self.act(a, self.add(x, y)) != self.add(self.act(a, x), self.act(a, y)) {
                        return law("r(x+y) = rx+ry", vec![a, x, y]);
                    }
                }
            }
        }
        Ok(())
    }

    pub fn ring(&self) -> &Semiring {
        &self.ring
    }

    pub fn size(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn add(&self, x: usize, y: usize) -> usize {
        self.add[x * self.m + y]
    }

    #[inline]
    pub fn act(&self, r: usize, x: usize) -> usize {
        self.action[r * self.m + x]
    }

    pub fn add_table(&self) -> &[usize] {
        &self.add
    }

    pub fn action_table(&self) -> &[usize] {
        &self.action
    }

    pub fn action_rows(&self) -> Vec<Vec<usize>> {
        self.action.chunks(self.m).map(<[usize]>::to_vec).collect()
    }

    /// `T_r` as an image sequence.
    pub fn t_map(&self, r: usize) -> &[usize] {
        &self.action[r * self.m..(r + 1) * self.m]
    }

    pub fn is_idempotent(&self) -> bool {
        (0..self.m).all(|x| self.add(x, x) == x)
    }

    pub fn semilattice(&self) -> Result<Semilattice, SemimoduleError> {
        if !self.is_idempotent() {
            return Err(SemimoduleError::NotIdempotent);
        }
        Ok(Semilattice::new(self.m, self.add.clone())?)
    }

    pub fn is_faithful(&self) -> bool {
        let rows: BTreeSet<&[usize]> = (0..self.ring.size()).map(|r| self.t_map(r)).collect();
        rows.len() == self.ring.size()
    }

    /// `rx = sx` for all `r, s`.
    pub fn is_quasitrivial(&self) -> bool {
        (1..self.ring.size()).all(|r| self.t_map(r) == self.t_map(0))
    }

    /// `T_r = id` for all `r`.
    pub fn is_id_quasitrivial(&self) -> bool {
        (0..self.ring.size()).all(|r| (0..self.m).all(|x| self.act(r, x) == x))
    }

    pub fn predicates(&self) -> Predicates {
        Predicates {
            faithful: self.is_faithful(),
            quasitrivial: self.is_quasitrivial(),
            id_quasitrivial: self.is_id_quasitrivial(),
            idempotent: self.is_idempotent(),
        }
    }

    pub fn embedding_t(&self) -> Result<Embedding, SemimoduleError> {
        let semilattice = self.semilattice()?;
        Ok(Embedding {
            maps: (0..self.ring.size())
                .map(|r| JoinMorphism::from_image(self.t_map(r).to_vec()))
                .collect(),
            semilattice,
            injective: self.is_faithful(),
        })
    }

    /// `Rx = {rx | r ∈ R}`.
    pub fn orbit(&self, x: usize) -> BTreeSet<usize> {
        (0..self.ring.size()).map(|r| self.act(r, x)).collect()
    }

    fn mask_limit(&self) -> Result<(), SemimoduleError> {
        if self.m > 64 {
            return Err(SemimoduleError::TooLarge(self.m));
        }
        Ok(())
    }

    /// Smallest subsemimodule containing the set bits of `mask`.
    fn generated(&self, mask: u64) -> u64 {
        let mut set = mask;
        loop {
            let mut next = set;
            for x in bits(set) {
                for r in 0..self.ring.size() {
                    next |= 1 << self.act(r, x);
                }
                for y in bits(set) {
                    next |= 1 << self.add(x, y);
                }
            }
            if next == set {
                return set;
            }
            set = next;
        }
    }

    /// Nonempty subsets closed under `+` and the action, sorted by member list.
    pub fn subsemimodules(&self) -> Result<Vec<Vec<usize>>, SemimoduleError> {
        self.mask_limit()?;
        let principal: BTreeSet<u64> = (0..self.m).map(|x| self.generated(1 << x)).collect();
        let mut seen: BTreeSet<u64> = principal.clone();
        let mut stack: Vec<u64> = principal.iter().copied().collect();
        while let Some(s) = stack.pop() {
            for &p in &principal {
                let j = self.generated(s | p);
                if seen.insert(j) {
                    stack.push(j);
                }
            }
        }
        let mut out: Vec<Vec<usize>> = seen.into_iter().map(|s| bits(s).collect()).collect();
        out.sort();
        Ok(out)
    }

    pub fn is_subsemimodule(&self, set: &[usize]) -> bool {
        !set.is_empty()
            && set.iter().all(|&x| {
                (0..self.ring.size()).all(|r| set.contains(&self.act(r, x)))
                    && set.iter().all(|&y| set.contains(&self.add(x, y)))
            })
    }

    /// The maps `x -> x+z` and `x -> rx`, deduplicated.
    pub fn translations(&self) -> Vec<Vec<usize>> {
        let mut set = BTreeSet::new();
        for z in 0..self.m {
            set.insert((0..self.m).map(|x| self.add(x, z)).collect::<Vec<_>>());
        }
        for r in 0..self.ring.size() {
            set.insert(self.t_map(r).to_vec());
        }
        set.into_iter().collect()
    }

    pub fn principal_congruence(&self, a: usize, b: usize) -> Partition {
        partition::close(self.m, &self.translations(), &[(a, b)], None)
    }

    pub fn congruences(&self) -> Vec<Partition> {
        partition::all_congruences(self.m, &self.translations())
    }

    pub fn quotient(&self, p: &Partition) -> Result<Semimodule, SemimoduleError> {
        if p.len() != self.m || !p.is_compatible(&self.translations()) {
            return Err(SemimoduleError::Hypothesis(
                "partition is not a semimodule congruence".into(),
            ));
        }
        let k = p.num_blocks();
        let reps = p.representatives();
        let mut add = vec![0; k * k];
        for (i, &x) in reps.iter().enumerate() {
            for (j, &y) in reps.iter().enumerate() {
                add[i * k + j] = p.block_of(self.add(x, y));
            }
        }
        let rn = self.ring.size();
        let mut action = vec![0; rn * k];
        for r in 0..rn {
            for (i, &x) in reps.iter().enumerate() {
                action[r * k + i] = p.block_of(self.act(r, x));
            }
        }
        Ok(Semimodule {
            ring: self.ring.clone(),
            m: k,
            add,
            action,
        })
    }

    pub fn is_sub_irreducible(&self) -> Result<bool, SemimoduleError> {
        if self.is_quasitrivial() {
            return Ok(false);
        }
        let all = self.subsemimodules()?;
        Ok(all
            .iter()
            .filter(|n| n.len() < self.m)
            .all(|n| n.iter().all(|&x| (0..self.ring.size()).all(|r| self.act(r, x) == x))))
    }

    pub fn is_quotient_irreducible(&self) -> bool {
        if self.is_quasitrivial() {
            return false;
        }
        let t = self.translations();
        (0..self.m).all(|a| (a + 1..self.m).all(|b| partition::close(self.m, &t, &[(a, b)], None).is_full()))
    }

    pub fn irreducibility(&self) -> Result<Irreducibility, SemimoduleError> {
        let sub = self.is_sub_irreducible()?;
        let quo = self.is_quotient_irreducible();
        Ok(Irreducibility {
            sub_irreducible: sub,
            quotient_irreducible: quo,
            irreducible: sub && quo,
        })
    }

    /// Property (*) of `(M, ≤)` with its first minimal witness.
    pub fn star(&self) -> Result<(bool, Option<usize>), SemimoduleError> {
        let w = self.semilattice()?.star_witness();
        Ok((w.is_some(), w))
    }

    /// Relabels `M` along `perm` (old -> new); ring elements keep their indices.
    pub fn relabel(&self, perm: &[usize]) -> Semimodule {
        let m = self.m;
        let add = crate::relabel::relabel_table(m, &self.add, perm);
        let rn = self.ring.size();
        let mut action = vec![0; rn * m];
        for r in 0..rn {
            for x in 0..m {
                action[r * m + perm[x]] = perm[self.act(r, x)];
            }
        }
        Semimodule {
            ring: self.ring.clone(),
            m,
            add,
            action,
        }
    }

    /// Canonical semilattice, then the lex-least action over its automorphisms.
    /// Requires idempotency.
    pub fn canonical(&self) -> Result<Semimodule, SemimoduleError> {
        let (canon, perm) = self.semilattice()?.canonical();
        let base = self.relabel(&perm);
        let best = canon
            .automorphisms()
            .iter()
            .map(|a| base.relabel(a))
            .min_by(|x, y| x.action.cmp(&y.action))
            .expect("identity automorphism");
        Ok(best)
    }

    /// Checks the structure statements that hold for a faithful idempotent
    /// irreducible semimodule over a simple additively idempotent ring with
    /// more than two elements, plus monotonicity of the action.
    pub fn structure_suite(&self) -> Result<Vec<SuiteViolation>, SemimoduleError> {
        let r = &self.ring;
        let l = self.semilattice()?;
        let mut out = Vec::new();
        let mut fail = |item: &'static str, detail: String| {
            out.push(SuiteViolation {
                item: item.to_string(),
                detail,
            })
        };
        let inf_m = l.top();
        let zero_m = l.bottom();
        let rn = r.size();
        let inf_r = r
            .greatest()
            .ok_or(SemimoduleError::Hypothesis("ring is not additively idempotent".into()))?;
        let fixed = |x: usize| self.orbit(x) == BTreeSet::from([x]);

        // (a)
        if !(0..self.m).any(|a| self.orbit(a).len() == self.m) {
            fail("a", "no a with Ra = M".into());
        }
        for x in 0..self.m {
            if self.orbit(x).len() != self.m {
                let ok = (x == inf_m && fixed(x)) || (Some(x) == zero_m && fixed(x));
                if !ok {
                    fail(
                        "a",
                        format!("Rx != M for x = {x}, which is neither a fixed top nor a fixed bottom"),
                    );
                }
            }
        }
        // (b)
        if r.is_right_absorbing(inf_r) != fixed(inf_m) {
            fail("b", "right absorption of the ring top disagrees with R∞ = {∞}".into());
        }
        // (c)
        if r.additive_neutral().is_some() && zero_m.is_none() {
            fail(
                "c",
                "ring has an additive neutral element but the semimodule has none".into(),
            );
        }
        // (d)
        if !r.is_left_absorbing(inf_r) && !r.is_right_absorbing(inf_r) && r.zero().is_none() {
            fail(
                "d",
                "ring top is neither left nor right absorbing but there is no zero".into(),
            );
        }
        // (e)
        for n in self.subsemimodules()? {
            if n.len() < self.m && !n.iter().all(|&x| x == inf_m || Some(x) == zero_m) {
                fail("e", format!("proper subsemimodule {n:?} not inside {{0, ∞}}"));
            }
        }
        // monotonicity
        for a in 0..rn {
            for x in 0..self.m {
                for y in 0..self.m {
                    if l.leq(x, y) && !l.leq(self.act(a, x), self.act(a, y)) {
                        fail("monotone", format!("x <= y but rx > ry at r = {a}, x = {x}, y = {y}"));
                    }
                }
                for b in 0..rn {
                    if r.leq(a, b) && !l.leq(self.act(a, x), self.act(b, x)) {
                        fail("monotone", format!("r <= s but rx > sx at r = {a}, s = {b}, x = {x}"));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Searches the ring for the element acting as `x -> b` on the downset
    /// of `a` and as `∞_M` elsewhere, after checking the hypotheses under
    /// which it must exist. The module must be faithful, idempotent and
    /// irreducible over a simple additively idempotent ring with `|R| > 2`.
    pub fn density_witness(&self, a: usize, target: DensityTarget) -> Result<DensityOutcome, SemimoduleError> {
        let hyp = |s: &str| Err(SemimoduleError::Hypothesis(s.to_string()));
        check_ring_hypotheses(&self.ring)?;
        let l = self.semilattice()?;
        if a >= self.m {
            return hyp("a out of range");
        }
        if a == l.top() {
            return hyp("a must differ from the top of M");
        }
        if !self.is_faithful() {
            return hyp("semimodule is not faithful");
        }
        if !self.irreducibility()?.irreducible {
            return hyp("semimodule is not irreducible");
        }
        let inf_r = self.ring.greatest().expect("additively idempotent");
        let b = match target {
            DensityTarget::Zero => {
                if self.ring.is_left_absorbing(inf_r) {
                    return hyp("greatest ring element is left absorbing");
                }
                match l.bottom() {
                    Some(z) => z,
                    None => return hyp("semimodule has no least element"),
                }
            }
            DensityTarget::Star(u) => {
                if u >= self.m || !l.minimal_elements().contains(&u) {
                    return hyp("u is not minimal");
                }
                let top = l.top();
                if (0..self.m).any(|x| x != top && l.join(u, x) == top) {
                    return hyp("u does not witness property (*)");
                }
                if self.orbit(top) != BTreeSet::from([top]) {
                    return hyp("R∞_M != {∞_M}");
                }
                u
            }
        };
        let want: Vec<usize> = (0..self.m).map(|x| if l.leq(x, a) { b } else { l.top() }).collect();
        Ok(
            match (0..self.ring.size()).find(|&r| self.t_map(r) == want.as_slice()) {
                Some(r) => DensityOutcome::Found(r),
                None => DensityOutcome::Refuted { a, target: b },
            },
        )
    }
}

fn bits(mut s: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if s == 0 {
            return None;
        }
        let i = s.trailing_zeros() as usize;
        s &= s - 1;
        Some(i)
    })
}

fn check_ring_hypotheses(r: &Semiring) -> Result<(), SemimoduleError> {
    if r.size() <= 2 {
        return Err(SemimoduleError::Hypothesis("ring has at most two elements".into()));
    }
    if !r.is_additively_idempotent() {
        return Err(SemimoduleError::Hypothesis("ring is not additively idempotent".into()));
    }
    if !r.is_simple() {
        return Err(SemimoduleError::Hypothesis("ring is not simple".into()));
    }
    Ok(())
}

/// A faithful semimodule of least size among quotients of `(R, +)`, in
/// canonical form; ties go to the lex-least (semilattice, action) pair.
///
/// A minimal faithful semimodule is cyclic, hence a quotient of the
/// regular one, so no other semimodules need to be searched. The result is
/// checked to be faithful, idempotent and irreducible.
pub fn smallest_faithful(r: &Semiring) -> Result<Semimodule, SemimoduleError> {
    check_ring_hypotheses(r)?;
    let reg = Semimodule::regular(r);
    let mut best: Option<Semimodule> = None;
    for c in reg.congruences() {
        if let Some(b) = &best {
            if c.num_blocks() > b.size() {
                continue;
            }
        }
        let q = reg.quotient(&c)?;
        if !q.is_faithful() {
            continue;
        }
        let q = q.canonical()?;
        let better = match &best {
            None => true,
            Some(b) => (q.m, &q.add, &q.action) < (b.m, &b.add, &b.action),
        };
        if better {
            best = Some(q);
        }
    }
    let m = best.ok_or_else(|| SemimoduleError::Hypothesis("no faithful quotient of (R, +)".into()))?;
    if !m.is_idempotent() || !m.irreducibility()?.irreducible {
        return Err(SemimoduleError::Hypothesis(
            "smallest faithful semimodule is not irreducible".into(),
        ));
    }
    Ok(m)
}

/// Case tag with the absorbing case split by property (*) of the smallest
/// faithful semimodule.
pub fn case_tag(r: &Semiring) -> Result<CaseTag, SemimoduleError> {
    let tag = r.structure().case;
    if tag != CaseTag::Absorbing {
        return Ok(tag);
    }
    let m = smallest_faithful(r)?;
    Ok(if m.star()?.0 {
        CaseTag::AbsorbingStar
    } else {
        CaseTag::AbsorbingNostar
    })
}

/// All idempotent `R`-semimodules with at most `max_size` elements, up to
/// isomorphism, in canonical form.
///
/// For each semilattice the ring homomorphisms `R -> JM(M)` are found by
/// backtracking: choosing `T_r` forces `T_{r+s}`, `T_{rs}` and `T_{sr}` for
/// every already assigned `s`.
pub fn enumerate_semimodules(r: &Semiring, max_size: usize) -> Result<Vec<Semimodule>, SemimoduleError> {
    let mut out = Vec::new();
    for size in 1..=max_size {
        for l in crate::order::enumerate_semilattices(size) {
            let monoid =
                MorphismMonoid::new(&l, MorphismClass::Jm).map_err(|e| SemimoduleError::Hypothesis(e.to_string()))?;
            let autos = l.automorphisms();
            let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
            for rep in representations(r, &monoid) {
                let action: Vec<usize> = rep
                    .iter()
                    .flat_map(|&i| monoid.maps[i].image().iter().copied())
                    .collect();
                let sm = Semimodule::from_tables_unchecked(r.clone(), size, l.table().to_vec(), action);
                let canon = autos
                    .iter()
                    .map(|a| sm.relabel(a).action)
                    .min()
                    .expect("identity automorphism");
                if seen.insert(canon.clone()) {
                    out.push(Semimodule::from_tables_unchecked(
                        r.clone(),
                        size,
                        l.table().to_vec(),
                        canon,
                    ));
                }
            }
        }
    }
    Ok(out)
}

/// Every semiring homomorphism `R -> (JM(M), ∨, ∘)`, as monoid indices.
fn representations(r: &Semiring, monoid: &MorphismMonoid) -> Vec<Vec<usize>> {
    fn propagate(r: &Semiring, monoid: &MorphismMonoid, assign: &mut [Option<usize>], start: usize) -> bool {
        let n = r.size();
        let mut queue = vec![start];
        while let Some(x) = queue.pop() {
            let fx = assign[x].expect("assigned");
            for y in 0..n {
                let Some(fy) = assign[y] else { continue };
                for (z, v) in [
                    (r.add(x, y), monoid.sup(fx, fy)),
                    (r.mul(x, y), monoid.compose(fx, fy)),
                    (r.mul(y, x), monoid.compose(fy, fx)),
                ] {
                    match assign[z] {
                        Some(w) if w != v => return false,
                        Some(_) => {}
                        None => {
                            assign[z] = Some(v);
                            queue.push(z);
                        }
                    }
                }
            }
        }
        true
    }
    fn rec(r: &Semiring, monoid: &MorphismMonoid, assign: Vec<Option<usize>>, out: &mut Vec<Vec<usize>>) {
        let Some(x) = assign.iter().position(Option::is_none) else {
            out.push(assign.into_iter().map(|v| v.expect("complete")).collect());
            return;
        };
        for v in 0..monoid.len() {
            let mut next = assign.clone();
            next[x] = Some(v);
            if propagate(r, monoid, &mut next, x) {
                rec(r, monoid, next, out);
            }
        }
    }
    let mut out = Vec::new();
    rec(r, monoid, vec![None; r.size()], &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphism::make_f;
    use crate::semiring::{closure_semiring, cyclic_group, v_of_group};

    fn res1_chain3() -> Semiring {
        Semiring::from_rows(
            &[vec![0, 1, 2], vec![1, 1, 2], vec![2, 2, 2]],
            &[vec![0, 0, 2], vec![0, 1, 2], vec![0, 2, 2]],
        )
        .unwrap()
    }

    fn absorbing5() -> MorphismSemiring {
        let c3 = Semilattice::chain(3);
        let gens: Vec<_> = (0..2)
            .flat_map(|a| (0..3).map(move |b| (a, b)))
            .map(|(a, b)| make_f(&c3, a, b).unwrap())
            .collect();
        closure_semiring(&c3, &gens, None).unwrap()
    }

    #[test]
    fn regular_module_is_valid_and_faithful() {
        let r = res1_chain3();
        let m = Semimodule::regular(&r);
        assert!(m.validate().is_ok());
        assert!(m.is_faithful());
    }

    #[test]
    fn bad_action_rejected() {
        let r = Semiring::boolean();
        // 0 must act as a join-morphism compatible with products
        let bad = Semimodule::new(r, 2, vec![0, 1, 1, 1], vec![1, 0, 0, 1]);
        assert!(matches!(bad, Err(SemimoduleError::Law { .. })));
    }

    #[test]
    fn embedding_of_realization() {
        let ms = absorbing5();
        let m = Semimodule::from_realization(&ms);
        let e = m.embedding_t().unwrap();
        assert!(e.injective);
        assert_eq!(e.maps, ms.morphisms);
        assert!(m.irreducibility().unwrap().irreducible);
    }

    #[test]
    fn quasitrivial_module_predicates() {
        let r = res1_chain3();
        let m = Semimodule::new(r, 1, vec![0], vec![0, 0, 0]).unwrap();
        let p = m.predicates();
        assert!(p.quasitrivial && p.id_quasitrivial && !p.faithful);
        let irr = m.irreducibility().unwrap();
        assert!(!irr.sub_irreducible && !irr.quotient_irreducible);
        assert_eq!(m.star().unwrap(), (true, Some(0)));
    }

    #[test]
    fn orbits_are_subsemimodules() {
        let m = Semimodule::from_realization(&absorbing5());
        for x in 0..m.size() {
            let orbit: Vec<usize> = m.orbit(x).into_iter().collect();
            assert!(m.is_subsemimodule(&orbit));
        }
        assert!(m.subsemimodules().unwrap().contains(&vec![2]));
        let c = m.congruences();
        assert!(c.iter().any(Partition::is_identity) && c.iter().any(Partition::is_full));
    }

    #[test]
    fn smallest_faithful_sizes() {
        assert_eq!(smallest_faithful(&absorbing5().semiring).unwrap().size(), 3);
        let v = v_of_group(2, &cyclic_group(2)).unwrap();
        let m = smallest_faithful(&v).unwrap();
        assert_eq!(m.size(), 3);
        assert!(!m.star().unwrap().0);
        let m = smallest_faithful(&res1_chain3()).unwrap();
        assert_eq!(m.size(), 3);
        assert!(m.semilattice().unwrap().is_isomorphic(&Semilattice::chain(3)));
        assert!(matches!(
            smallest_faithful(&Semiring::boolean()),
            Err(SemimoduleError::Hypothesis(_))
        ));
    }

    #[test]
    fn density_examples() {
        let c3 = Semilattice::chain(3);
        let r = res1_chain3();
        let ms = MorphismSemiring::from_closed_set(
            &c3,
            vec![
                JoinMorphism::from_image(vec![0, 0, 2]),
                JoinMorphism::from_image(vec![0, 1, 2]),
                JoinMorphism::from_image(vec![0, 2, 2]),
            ],
        )
        .unwrap();
        assert_eq!(ms.semiring, r);
        let m = Semimodule::from_realization(&ms);
        assert_eq!(
            m.density_witness(1, DensityTarget::Zero).unwrap(),
            DensityOutcome::Found(0)
        );
        assert!(matches!(
            m.density_witness(2, DensityTarget::Zero),
            Err(SemimoduleError::Hypothesis(_))
        ));

        let all = crate::morphism::enumerate_morphisms(&c3, MorphismClass::Jm1).unwrap();
        let r6 = closure_semiring(&c3, &all, None).unwrap();
        let m6 = Semimodule::from_realization(&r6);
        let found = m6.density_witness(1, DensityTarget::Star(0)).unwrap();
        assert_eq!(found, DensityOutcome::Found(0));
        assert_eq!(r6.morphisms[0].image(), &[0, 0, 2]);
    }

    #[test]
    fn structure_suite_on_examples() {
        let m = Semimodule::from_realization(&absorbing5());
        assert!(m.structure_suite().unwrap().is_empty());
        let v = v_of_group(2, &cyclic_group(2)).unwrap();
        assert!(smallest_faithful(&v).unwrap().structure_suite().unwrap().is_empty());
    }

    #[test]
    fn case_tags() {
        let v = v_of_group(2, &cyclic_group(2)).unwrap();
        assert_eq!(case_tag(&v).unwrap(), CaseTag::AbsorbingNostar);
        assert_eq!(case_tag(&absorbing5().semiring).unwrap(), CaseTag::AbsorbingStar);
        assert_eq!(case_tag(&res1_chain3()).unwrap(), CaseTag::RightNotLeft);
    }

    #[test]
    fn semimodule_enumeration_contains_smallest_faithful() {
        let r = res1_chain3();
        let all = enumerate_semimodules(&r, 3).unwrap();
        let sf = smallest_faithful(&r).unwrap();
        assert!(all.iter().any(|m| m.canonical().unwrap() == sf));
        for m in &all {
            assert!(m.validate().is_ok());
        }
    }
}
