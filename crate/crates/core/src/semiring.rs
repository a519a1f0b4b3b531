//! Finite semirings as a pair of `n×n` tables over `0..n`: axiom checks,
//! structural predicates, congruences, quotients, isomorphism, and the
//! named constructions.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::morphism::{JoinMorphism, MorphismError};
use crate::order::{OrderError, Semilattice};
use crate::partition::{self, Partition};
use crate::relabel;

/// Default bound on the size of a closure semiring.
pub const DEFAULT_SIZE_CAP: usize = 10_000;
/// Environment variable overriding [`DEFAULT_SIZE_CAP`].
pub const SIZE_CAP_VAR: &str = "SEMIRING_FORGE_SIZE_CAP";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemiringError {
    #[error("empty carrier")]
    Empty,
    #[error("{which} table has {got} entries, expected {expected}")]
    TableShape {
        which: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("{which} table entry {value} out of range for size {n}")]
    EntryOutOfRange {
        which: &'static str,
        value: usize,
        n: usize,
    },
    #[error("element {0} out of range")]
    IndexOutOfRange(usize),
    #[error("axiom violated: {0}")]
    Axiom(AxiomViolation),
    #[error("partition is not a congruence: {0} ~ {1} but their translates differ")]
    Incompatible(usize, usize),
    #[error("partition covers {got} elements, semiring has {expected}")]
    PartitionSize { expected: usize, got: usize },
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("invalid sandwich matrix: {0}")]
    InvalidSandwich(String),
    #[error("closure exceeds the size cap of {0} elements")]
    SizeCap(usize),
    #[error("no generators")]
    NoGenerators,
    #[error(transparent)]
    Morphism(#[from] MorphismError),
    #[error(transparent)]
    Order(#[from] OrderError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axiom {
    AddCommutative,
    AddAssociative,
    MulAssociative,
    LeftDistributive,
    RightDistributive,
}

/// A failed axiom with the offending elements (a pair for commutativity,
/// a triple otherwise).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    pub witness: Vec<usize>,
}

impl std::fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?} at {:?}", self.axiom, self.witness)
    }
}

/// Every violated axiom, each with its first witness.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn check_shape(n: usize, which: &'static str, t: &[usize]) -> Result<(), SemiringError> {
    if t.len() != n * n {
        return Err(SemiringError::TableShape {
            which,
            expected: n * n,
            got: t.len(),
        });
    }
    if let Some(&v) = t.iter().find(|&&v| v >= n) {
        return Err(SemiringError::EntryOutOfRange { which, value: v, n });
    }
    Ok(())
}

/// Checks both tables exhaustively. Shape problems are errors; axiom
/// failures land in the report.
pub fn verify_axioms(n: usize, add: &[usize], mul: &[usize]) -> Result<AxiomReport, SemiringError> {
    if n == 0 {
        return Err(SemiringError::Empty);
    }
    check_shape(n, "add", add)?;
    check_shape(n, "mul", mul)?;
    let a = |x: usize, y: usize| add[x * n + y];
    let m = |x: usize, y: usize| mul[x * n + y];
    let mut report = AxiomReport::default();
    let mut record = |axiom, witness: Option<Vec<usize>>| {
        if let Some(witness) = witness {
            report.violations.push(AxiomViolation { axiom, witness });
        }
    };

    let pairs = || (0..n).flat_map(move |x| (0..n).map(move |y| (x, y)));
    let triples = || pairs().flat_map(move |(x, y)| (0..n).map(move |z| (x, y, z)));

    record(
        Axiom::AddCommutative,
        pairs().find(|&(x, y)| a(x, y) != a(y, x)).map(|(x, y)| vec![x, y]),
    );
    record(
        Axiom::AddAssociative,
        triples()
            .find(|&(x, y, z)| a(a(x, y), z) != a(x, a(y, z)))
            .map(|(x, y, z)| vec![x, y, z]),
    );
    record(
        Axiom::MulAssociative,
        triples()
            .find(|&(x, y, z)| m(m(x, y), z) != m(x, m(y, z)))
            .map(|(x, y, z)| vec![x, y, z]),
    );
    record(
        Axiom::LeftDistributive,
        triples()
            .find(|&(x, y, z)| m(x, a(y, z)) != a(m(x, y), m(x, z)))
            .map(|(x, y, z)| vec![x, y, z]),
    );
    record(
        Axiom::RightDistributive,
        triples()
            .find(|&(x, y, z)| m(a(x, y), z) != a(m(x, z), m(y, z)))
            .map(|(x, y, z)| vec![x, y, z]),
    );
    Ok(report)
}

/// Position of the greatest element relative to multiplication.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseTag {
    Neither,
    RightNotLeft,
    LeftNotRight,
    /// Absorbing greatest element; the property (*) split needs a semimodule.
    Absorbing,
    AbsorbingStar,
    AbsorbingNostar,
    NotApplicable,
}

impl CaseTag {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseTag::Neither => "neither",
            CaseTag::RightNotLeft => "right-not-left",
            CaseTag::LeftNotRight => "left-not-right",
            CaseTag::Absorbing => "absorbing",
            CaseTag::AbsorbingStar => "absorbing-star",
            CaseTag::AbsorbingNostar => "absorbing-nostar",
            CaseTag::NotApplicable => "not-applicable",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            CaseTag::Neither,
            CaseTag::RightNotLeft,
            CaseTag::LeftNotRight,
            CaseTag::Absorbing,
            CaseTag::AbsorbingStar,
            CaseTag::AbsorbingNostar,
            CaseTag::NotApplicable,
        ]
        .into_iter()
        .find(|c| c.as_str() == s)
    }

    /// Whether a semiring tagged `self` belongs under the filter `filter`.
    pub fn matches(self, filter: CaseTag) -> bool {
        self == filter
            || (filter == CaseTag::Absorbing && matches!(self, CaseTag::AbsorbingStar | CaseTag::AbsorbingNostar))
    }
}

impl std::fmt::Display for CaseTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Structure {
    pub additively_idempotent: bool,
    pub greatest: Option<usize>,
    pub greatest_left_absorbing: bool,
    pub greatest_right_absorbing: bool,
    pub zero: Option<usize>,
    pub additive_neutral: Option<usize>,
    pub multiplicative_neutral: Option<usize>,
    pub simple: bool,
    pub case: CaseTag,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Semiring {
    n: usize,
    add: Vec<usize>,
    mul: Vec<usize>,
}

impl Semiring {
    /// Builds a semiring after checking shapes and every axiom.
    pub fn new(n: usize, add: Vec<usize>, mul: Vec<usize>) -> Result<Self, SemiringError> {
        let report = verify_axioms(n, &add, &mul)?;
        if let Some(v) = report.violations.into_iter().next() {
            return Err(SemiringError::Axiom(v));
        }
        Ok(Self { n, add, mul })
    }

    /// Skips axiom checks; shapes are still asserted in debug builds.
    pub fn from_tables_unchecked(n: usize, add: Vec<usize>, mul: Vec<usize>) -> Self {
        debug_assert!(add.len() == n * n && mul.len() == n * n);
        Self { n, add, mul }
    }

    pub fn from_rows(add: &[Vec<usize>], mul: &[Vec<usize>]) -> Result<Self, SemiringError> {
        let n = add.len();
        for (which, rows) in [("add", add), ("mul", mul)] {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(SemiringError::TableShape {
                    which,
                    expected: n * n,
                    got: rows.iter().map(Vec::len).sum(),
                });
            }
        }
        Self::new(n, add.concat(), mul.concat())
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn add(&self, x: usize, y: usize) -> usize {
        self.add[x * self.n + y]
    }

    #[inline]
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.mul[x * self.n + y]
    }

    pub fn add_table(&self) -> &[usize] {
        &self.add
    }

    pub fn mul_table(&self) -> &[usize] {
        &self.mul
    }

    pub fn add_rows(&self) -> Vec<Vec<usize>> {
        self.add.chunks(self.n).map(<[usize]>::to_vec).collect()
    }

    pub fn mul_rows(&self) -> Vec<Vec<usize>> {
        self.mul.chunks(self.n).map(<[usize]>::to_vec).collect()
    }

    pub fn verify_axioms(&self) -> AxiomReport {
        verify_axioms(self.n, &self.add, &self.mul).expect("shape checked on construction")
    }

    pub fn is_additively_idempotent(&self) -> bool {
        (0..self.n).all(|x| self.add(x, x) == x)
    }

    /// `x <= y` iff `x + y = y`; meaningful when additively idempotent.
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.add(x, y) == y
    }

    /// The sum of all elements, which is the greatest element exactly when
    /// addition is idempotent.
    pub fn greatest(&self) -> Option<usize> {
        if !self.is_additively_idempotent() {
            return None;
        }
        Some((1..self.n).fold(0, |acc, x| self.add(acc, x)))
    }

    pub fn additive_semilattice(&self) -> Result<Semilattice, SemiringError> {
        Ok(Semilattice::new(self.n, self.add.clone())?)
    }

    pub fn is_left_absorbing(&self, r: usize) -> bool {
        (0..self.n).all(|s| self.mul(r, s) == r)
    }

    pub fn is_right_absorbing(&self, r: usize) -> bool {
        (0..self.n).all(|s| self.mul(s, r) == r)
    }

    pub fn additive_neutral(&self) -> Option<usize> {
        (0..self.n).find(|&z| (0..self.n).all(|x| self.add(z, x) == x))
    }

    pub fn multiplicative_neutral(&self) -> Option<usize> {
        (0..self.n).find(|&e| (0..self.n).all(|x| self.mul(e, x) == x && self.mul(x, e) == x))
    }

    /// Additively neutral and multiplicatively absorbing on both sides.
    pub fn zero(&self) -> Option<usize> {
        self.additive_neutral()
            .filter(|&z| self.is_left_absorbing(z) && self.is_right_absorbing(z))
    }

    /// `|R·R| > 1`.
    pub fn products_nontrivial(&self) -> bool {
        self.mul.iter().any(|&v| v != self.mul[0])
    }

    pub fn structure(&self) -> Structure {
        let greatest = self.greatest();
        let (gl, gr) = greatest.map_or((false, false), |g| {
            (self.is_left_absorbing(g), self.is_right_absorbing(g))
        });
        let simple = self.is_simple();
        let case = if greatest.is_none() || !simple || self.n <= 2 {
            CaseTag::NotApplicable
        } else {
            match (gl, gr) {
                (false, false) => CaseTag::Neither,
                (false, true) => CaseTag::RightNotLeft,
                (true, false) => CaseTag::LeftNotRight,
                (true, true) => CaseTag::Absorbing,
            }
        };
        Structure {
            additively_idempotent: greatest.is_some(),
            greatest,
            greatest_left_absorbing: gl,
            greatest_right_absorbing: gr,
            zero: self.zero(),
            additive_neutral: self.additive_neutral(),
            multiplicative_neutral: self.multiplicative_neutral(),
            simple,
            case,
        }
    }

    /// The unary maps `x -> x+t`, `x -> t·x`, `x -> x·t`, deduplicated.
    pub fn translations(&self) -> Vec<Vec<usize>> {
        let n = self.n;
        let mut set = BTreeSet::new();
        for t in 0..n {
            set.insert((0..n).map(|x| self.add(x, t)).collect::<Vec<_>>());
            set.insert((0..n).map(|x| self.mul(t, x)).collect::<Vec<_>>());
            set.insert((0..n).map(|x| self.mul(x, t)).collect::<Vec<_>>());
        }
        set.into_iter().collect()
    }

    pub fn principal_congruence(&self, a: usize, b: usize) -> Result<Partition, SemiringError> {
        for x in [a, b] {
            if x >= self.n {
                return Err(SemiringError::IndexOutOfRange(x));
            }
        }
        Ok(partition::close(self.n, &self.translations(), &[(a, b)], None))
    }

    /// The congruence lattice, sorted.
    pub fn all_congruences(&self) -> Vec<Partition> {
        partition::all_congruences(self.n, &self.translations())
    }

    /// Simple iff every principal congruence of a distinct pair is full.
    pub fn is_simple(&self) -> bool {
        let t = self.translations();
        (0..self.n).all(|a| (a + 1..self.n).all(|b| partition::close(self.n, &t, &[(a, b)], None).is_full()))
    }

    pub fn is_congruence(&self, p: &Partition) -> bool {
        p.len() == self.n && p.is_compatible(&self.translations())
    }

    /// Tables on the blocks of a congruence, blocks numbered by id.
    pub fn quotient(&self, p: &Partition) -> Result<Semiring, SemiringError> {
        if p.len() != self.n {
            return Err(SemiringError::PartitionSize {
                expected: self.n,
                got: p.len(),
            });
        }
        let t = self.translations();
        for x in 0..self.n {
            for y in x + 1..self.n {
                if p.same(x, y) && t.iter().any(|m| !p.same(m[x], m[y])) {
                    return Err(SemiringError::Incompatible(x, y));
                }
            }
        }
        let k = p.num_blocks();
        let reps = p.representatives();
        let mut add = vec![0; k * k];
        let mut mul = vec![0; k * k];
        for (i, &x) in reps.iter().enumerate() {
            for (j, &y) in reps.iter().enumerate() {
                add[i * k + j] = p.block_of(self.add(x, y));
                mul[i * k + j] = p.block_of(self.mul(x, y));
            }
        }
        Ok(Semiring { n: k, add, mul })
    }

    /// Per-element data preserved by every isomorphism.
    pub fn invariants(&self) -> Vec<[usize; 6]> {
        let n = self.n;
        (0..n)
            .map(|x| {
                let below = (0..n).filter(|&y| self.add(y, x) == x).count();
                let above = (0..n).filter(|&y| self.add(x, y) == y).count();
                let left: BTreeSet<usize> = (0..n).map(|y| self.mul(x, y)).collect();
                let right: BTreeSet<usize> = (0..n).map(|y| self.mul(y, x)).collect();
                [
                    below,
                    above,
                    left.len(),
                    right.len(),
                    usize::from(self.mul(x, x) == x),
                    usize::from(self.add(x, x) == x),
                ]
            })
            .collect()
    }

    /// A bijection `phi` (self -> other) preserving both operations.
    pub fn isomorphism(&self, other: &Semiring) -> Option<Vec<usize>> {
        if self.n != other.n {
            return None;
        }
        relabel::isomorphisms(
            self.n,
            &[&self.add, &self.mul],
            &[&other.add, &other.mul],
            &self.invariants(),
            &other.invariants(),
            true,
        )
        .into_iter()
        .next()
    }

    pub fn is_isomorphic(&self, other: &Semiring) -> bool {
        self.isomorphism(other).is_some()
    }

    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        let inv = self.invariants();
        relabel::isomorphisms(
            self.n,
            &[&self.add, &self.mul],
            &[&self.add, &self.mul],
            &inv,
            &inv,
            false,
        )
    }

    /// Relabels along `perm` (old -> new).
    pub fn relabel(&self, perm: &[usize]) -> Semiring {
        Semiring {
            n: self.n,
            add: relabel::relabel_table(self.n, &self.add, perm),
            mul: relabel::relabel_table(self.n, &self.mul, perm),
        }
    }

    /// Lex-minimal relabeling (add table first, then mul) among bijections
    /// that sort elements by [`Self::invariants`]. Equal for isomorphic inputs.
    pub fn canonical(&self) -> Semiring {
        let (_, mut t) = relabel::canonical_form(self.n, &[&self.add, &self.mul], &self.invariants());
        let mul = t.pop().expect("two tables");
        let add = t.pop().expect("two tables");
        Semiring { n: self.n, add, mul }
    }

    /// Same addition, multiplication reversed.
    pub fn opposite(&self) -> Semiring {
        let n = self.n;
        Semiring {
            n,
            add: self.add.clone(),
            mul: (0..n * n).map(|i| self.mul(i % n, i / n)).collect(),
        }
    }

    /// Componentwise product; `(x, y)` gets index `x·|other| + y`.
    pub fn product(&self, other: &Semiring) -> Semiring {
        let (a, b) = (self.n, other.n);
        let n = a * b;
        let mut add = vec![0; n * n];
        let mut mul = vec![0; n * n];
        for p in 0..n {
            for q in 0..n {
                let (x1, y1, x2, y2) = (p / b, p % b, q / b, q % b);
                add[p * n + q] = self.add(x1, x2) * b + other.add(y1, y2);
                mul[p * n + q] = self.mul(x1, x2) * b + other.mul(y1, y2);
            }
        }
        Semiring { n, add, mul }
    }

    /// The two-element Boolean semiring: `1 + 1 = 1`, multiplication is `and`.
    pub fn boolean() -> Semiring {
        Semiring {
            n: 2,
            add: vec![0, 1, 1, 1],
            mul: vec![0, 0, 0, 1],
        }
    }

    /// One-element semiring.
    pub fn trivial() -> Semiring {
        Semiring {
            n: 1,
            add: vec![0],
            mul: vec![0],
        }
    }
}

/// Parameters of a sandwich semigroup: `P` is `n×m` over `{0,1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SandwichSpec {
    pub m: usize,
    pub n: usize,
    pub p: Vec<Vec<u8>>,
}

impl SandwichSpec {
    pub fn validate(&self) -> Result<(), SemiringError> {
        let bad = |s: &str| Err(SemiringError::InvalidSandwich(s.to_string()));
        if self.m == 0 || self.n == 0 {
            return bad("m and n must be positive");
        }
        if self.p.len() != self.n || self.p.iter().any(|r| r.len() != self.m) {
            return bad("P must have n rows of m entries");
        }
        if self.p.iter().flatten().any(|&v| v > 1) {
            return bad("entries must be 0 or 1");
        }
        let cols: Vec<Vec<u8>> = (0..self.m).map(|k| self.p.iter().map(|r| r[k]).collect()).collect();
        if self.p.iter().any(|r| r.iter().all(|&v| v == 0)) {
            return bad("zero row");
        }
        if cols.iter().any(|c| c.iter().all(|&v| v == 0)) {
            return bad("zero column");
        }
        let distinct = |v: &[Vec<u8>]| v.iter().collect::<BTreeSet<_>>().len() == v.len();
        if !distinct(&self.p) {
            return bad("two identical rows");
        }
        if !distinct(&cols) {
            return bad("two identical columns");
        }
        Ok(())
    }
}

/// The sandwich semigroup on `(I×J) ∪ {∞}` with constant addition `∞`.
/// `(i, j)` has index `i·n + j` (0-based), `∞` is last.
pub fn monico_sandwich(spec: &SandwichSpec) -> Result<Semiring, SemiringError> {
    spec.validate()?;
    let (m, n) = (spec.m, spec.n);
    let size = m * n + 1;
    let inf = m * n;
    let mut mul = vec![inf; size * size];
    for x in 0..inf {
        for y in 0..inf {
            let (i, j) = (x / n, x % n);
            let (k, l) = (y / n, y % n);
            if spec.p[j][k] == 1 {
                mul[x * size + y] = i * n + l;
            }
        }
    }
    Semiring::new(size, vec![inf; size * size], mul)
}

/// Checks a group table and returns its identity.
pub fn check_group(n: usize, table: &[usize]) -> Result<usize, SemiringError> {
    let err = |s: String| Err(SemiringError::NotAGroup(s));
    if n == 0 {
        return err("empty".into());
    }
    if table.len() != n * n || table.iter().any(|&v| v >= n) {
        return err("malformed table".into());
    }
    let g = |x: usize, y: usize| table[x * n + y];
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if g(g(x, y), z) != g(x, g(y, z)) {
                    return err(format!("not associative at ({x}, {y}, {z})"));
                }
            }
        }
    }
    let Some(e) = (0..n).find(|&e| (0..n).all(|x| g(e, x) == x && g(x, e) == x)) else {
        return err("no identity".into());
    };
    if let Some(x) = (0..n).find(|&x| !(0..n).any(|y| g(x, y) == e && g(y, x) == e)) {
        return err(format!("{x} has no inverse"));
    }
    Ok(e)
}

/// Addition table of `Z/k`.
pub fn cyclic_group(k: usize) -> Vec<usize> {
    (0..k * k).map(|i| (i / k + i % k) % k).collect()
}

/// `V(G) = G ∪ {∞}`: `x + x = x`, `x + y = ∞` otherwise, `∞` absorbing,
/// multiplication of `G` elsewhere. `∞` is last.
pub fn v_of_group(k: usize, table: &[usize]) -> Result<Semiring, SemiringError> {
    check_group(k, table)?;
    let n = k + 1;
    let mut add = vec![k; n * n];
    let mut mul = vec![k; n * n];
    for x in 0..k {
        add[x * n + x] = x;
        for y in 0..k {
            mul[x * n + y] = table[x * k + y];
        }
    }
    Semiring::new(n, add, mul)
}

/// A semiring of join-morphisms: the abstract tables together with the
/// maps realizing each element, sorted lexicographically by image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismSemiring {
    pub semilattice: Semilattice,
    pub morphisms: Vec<JoinMorphism>,
    pub semiring: Semiring,
}

impl MorphismSemiring {
    /// Tables of an already closed set of morphisms. Elements are sorted.
    pub fn from_closed_set(l: &Semilattice, mut maps: Vec<JoinMorphism>) -> Result<Self, SemiringError> {
        if maps.is_empty() {
            return Err(SemiringError::NoGenerators);
        }
        maps.sort();
        maps.dedup();
        for f in &maps {
            f.validate(l)?;
        }
        let index: HashMap<&[usize], usize> = maps.iter().enumerate().map(|(i, f)| (f.image(), i)).collect();
        let n = maps.len();
        let mut add = vec![0; n * n];
        let mut mul = vec![0; n * n];
        for (i, f) in maps.iter().enumerate() {
            for (j, g) in maps.iter().enumerate() {
                let s = f.sup(g, l)?;
                let c = f.compose(g)?;
                let (Some(&si), Some(&ci)) = (index.get(s.image()), index.get(c.image())) else {
                    return Err(SemiringError::Axiom(AxiomViolation {
                        axiom: Axiom::MulAssociative,
                        witness: vec![i, j],
                    }));
                };
                add[i * n + j] = si;
                mul[i * n + j] = ci;
            }
        }
        let semiring = Semiring::new(n, add, mul)?;
        Ok(Self {
            semilattice: l.clone(),
            morphisms: maps,
            semiring,
        })
    }

    pub fn size(&self) -> usize {
        self.morphisms.len()
    }

    pub fn index_of(&self, f: &JoinMorphism) -> Option<usize> {
        self.morphisms.binary_search(f).ok()
    }

    pub fn contains(&self, f: &JoinMorphism) -> bool {
        self.index_of(f).is_some()
    }
}

/// Size cap from the environment, or the default.
pub fn size_cap() -> usize {
    std::env::var(SIZE_CAP_VAR)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_SIZE_CAP)
}

/// The smallest set of join-morphisms on `l` containing `generators` and
/// closed under pointwise join and composition.
pub fn closure_semiring(
    l: &Semilattice,
    generators: &[JoinMorphism],
    cap: Option<usize>,
) -> Result<MorphismSemiring, SemiringError> {
    let cap = cap.unwrap_or_else(size_cap);
    if generators.is_empty() {
        return Err(SemiringError::NoGenerators);
    }
    let mut seen: BTreeSet<JoinMorphism> = BTreeSet::new();
    let mut elems: Vec<JoinMorphism> = Vec::new();
    for g in generators {
        g.validate(l)?;
        if seen.insert(g.clone()) {
            elems.push(g.clone());
        }
    }
    if elems.len() > cap {
        return Err(SemiringError::SizeCap(cap));
    }
    let mut next = 0;
    while next < elems.len() {
        let f = elems[next].clone();
        next += 1;
        let mut found = Vec::new();
        for g in &elems[..next] {
            found.push(f.sup(g, l)?);
            found.push(f.compose(g)?);
            found.push(g.compose(&f)?);
        }
        for h in found {
            if seen.insert(h.clone()) {
                elems.push(h);
                if elems.len() > cap {
                    return Err(SemiringError::SizeCap(cap));
                }
            }
        }
    }
    MorphismSemiring::from_closed_set(l, elems)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphism::{enumerate_morphisms, make_f, MorphismClass};

    fn res1_chain3() -> Semiring {
        // a = (0,0,2), b = (0,1,2), c = (0,2,2)
        Semiring::from_rows(
            &[vec![0, 1, 2], vec![1, 1, 2], vec![2, 2, 2]],
            &[vec![0, 0, 2], vec![0, 1, 2], vec![0, 2, 2]],
        )
        .unwrap()
    }

    #[test]
    fn axioms_of_examples() {
        assert!(res1_chain3().verify_axioms().passed());
        assert!(Semiring::trivial().verify_axioms().passed());
        let r = verify_axioms(2, &[0, 1, 0, 1], &[0, 0, 0, 0]).unwrap();
        assert_eq!(
            r.violations[0],
            AxiomViolation {
                axiom: Axiom::AddCommutative,
                witness: vec![0, 1]
            }
        );
        assert!(matches!(
            verify_axioms(2, &[0], &[0]),
            Err(SemiringError::TableShape { .. })
        ));
        assert!(matches!(
            verify_axioms(1, &[0], &[3]),
            Err(SemiringError::EntryOutOfRange { .. })
        ));
    }

    #[test]
    fn structure_of_examples() {
        let s = res1_chain3().structure();
        assert_eq!(s.greatest, Some(2));
        assert!(s.greatest_right_absorbing && !s.greatest_left_absorbing);
        assert_eq!(s.case, CaseTag::RightNotLeft);
        assert_eq!(s.additive_neutral, Some(0));
        assert_eq!(s.multiplicative_neutral, Some(1));

        let lnr = Semiring::from_rows(
            &[vec![0, 1, 2], vec![1, 1, 2], vec![2, 2, 2]],
            &[vec![0, 0, 0], vec![0, 1, 2], vec![2, 2, 2]],
        )
        .unwrap();
        let s = lnr.structure();
        assert_eq!(s.greatest, Some(2));
        assert_eq!(s.case, CaseTag::LeftNotRight);

        let v = v_of_group(2, &cyclic_group(2)).unwrap();
        let s = v.structure();
        assert_eq!(s.greatest, Some(2));
        assert!(s.greatest_left_absorbing && s.greatest_right_absorbing);
        assert_eq!(s.case, CaseTag::Absorbing);
        assert_eq!(s.additive_neutral, None);
    }

    #[test]
    fn congruences_of_small_semirings() {
        let b2 = Semiring::boolean();
        assert!(b2.principal_congruence(0, 0).unwrap().is_identity());
        assert!(b2.principal_congruence(0, 1).unwrap().is_full());
        assert_eq!(b2.all_congruences().len(), 2);
        let bb = b2.product(&b2);
        assert!(bb.verify_axioms().passed());
        assert!(bb.all_congruences().len() >= 3);
        assert!(!bb.is_simple());
        assert!(Semiring::trivial().is_simple());
        assert!(res1_chain3().is_simple());
    }

    #[test]
    fn quotients() {
        let bb = Semiring::boolean().product(&Semiring::boolean());
        let kernel = Partition::from_labels(&[0, 0, 1, 1]);
        assert!(bb.quotient(&kernel).unwrap().is_isomorphic(&Semiring::boolean()));
        assert_eq!(bb.quotient(&Partition::full(4)).unwrap().size(), 1);
        assert!(bb.quotient(&Partition::identity(4)).unwrap().is_isomorphic(&bb));
        assert!(matches!(
            bb.quotient(&Partition::from_labels(&[0, 0, 1, 2])),
            Err(SemiringError::Incompatible(..))
        ));
    }

    #[test]
    fn relabeled_copy_is_isomorphic() {
        let r = res1_chain3();
        let s = r.relabel(&[2, 0, 1]);
        let phi = r.isomorphism(&s).unwrap();
        assert_eq!(phi, vec![2, 0, 1]);
        assert_eq!(r.canonical(), s.canonical());
        assert!(!r.is_isomorphic(&r.opposite()));
    }

    #[test]
    fn sandwich_examples() {
        let one = monico_sandwich(&SandwichSpec {
            m: 1,
            n: 1,
            p: vec![vec![1]],
        })
        .unwrap();
        assert_eq!(one.size(), 2);
        let two = monico_sandwich(&SandwichSpec {
            m: 2,
            n: 2,
            p: vec![vec![1, 0], vec![0, 1]],
        })
        .unwrap();
        assert_eq!(two.size(), 5);
        assert!(two.is_simple());
        let dup = SandwichSpec {
            m: 2,
            n: 2,
            p: vec![vec![1, 1], vec![1, 1]],
        };
        assert!(matches!(monico_sandwich(&dup), Err(SemiringError::InvalidSandwich(_))));
    }

    #[test]
    fn v_of_groups() {
        assert_eq!(v_of_group(1, &[0]).unwrap().size(), 2);
        let v2 = v_of_group(2, &cyclic_group(2)).unwrap();
        assert_eq!(v2.size(), 3);
        assert!(v2.is_simple());
        assert!(v2.is_additively_idempotent());
        assert!(!v2.additive_semilattice().unwrap().has_star_property());
        assert!(matches!(v_of_group(2, &[0, 0, 0, 0]), Err(SemiringError::NotAGroup(_))));
    }

    #[test]
    fn closures() {
        let c3 = Semilattice::chain(3);
        let gens: Vec<_> = (0..2)
            .flat_map(|a| (0..3).map(move |b| (a, b)))
            .map(|(a, b)| make_f(&c3, a, b).unwrap())
            .collect();
        let r5 = closure_semiring(&c3, &gens, None).unwrap();
        let images: Vec<Vec<usize>> = r5.morphisms.iter().map(|f| f.image().to_vec()).collect();
        assert_eq!(
            images,
            vec![
                vec![0, 0, 2],
                vec![0, 2, 2],
                vec![1, 1, 2],
                vec![1, 2, 2],
                vec![2, 2, 2]
            ]
        );
        let all = enumerate_morphisms(&c3, MorphismClass::Jm1).unwrap();
        assert_eq!(closure_semiring(&c3, &all, None).unwrap().size(), 6);
        assert_eq!(
            closure_semiring(&c3, &[JoinMorphism::identity(3)], None)
                .unwrap()
                .size(),
            1
        );
        assert_eq!(closure_semiring(&c3, &all, Some(3)), Err(SemiringError::SizeCap(3)));
    }
}
