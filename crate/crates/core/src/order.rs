//! Finite join-semilattices and lattices stored as join tables over `0..n`.
//!
//! The order is derived: `x <= y` iff `join(x, y) == y`.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::relabel;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrderError {
    #[error("empty carrier")]
    Empty,
    #[error("join table has {got} entries, expected {expected}")]
    TableShape { expected: usize, got: usize },
    #[error("entry {value} at ({x}, {y}) is out of range for size {n}")]
    EntryOutOfRange { x: usize, y: usize, value: usize, n: usize },
    #[error("index {index} out of range for size {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("join is not idempotent at {0}")]
    NotIdempotent(usize),
    #[error("join is not commutative at ({0}, {1})")]
    NotCommutative(usize, usize),
    #[error("join is not associative at ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("relation is not a partial order with binary joins")]
    NoJoin,
    #[error("semilattice has no least element")]
    NotALattice,
    #[error("lattice has a single element")]
    Trivial,
}

/// A finite commutative idempotent semigroup, read as an ordered set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Semilattice {
    n: usize,
    join: Vec<usize>,
}

impl Semilattice {
    /// Validates the join table (row-major, `n*n` entries) exhaustively.
    pub fn new(n: usize, join: Vec<usize>) -> Result<Self, OrderError> {
        if n == 0 {
            return Err(OrderError::Empty);
        }
        if join.len() != n * n {
            return Err(OrderError::TableShape {
                expected: n * n,
                got: join.len(),
            });
        }
        for x in 0..n {
            for y in 0..n {
                let v = join[x * n + y];
                if v >= n {
                    return Err(OrderError::EntryOutOfRange { x, y, value: v, n });
                }
            }
        }
        for x in 0..n {
            if join[x * n + x] != x {
                return Err(OrderError::NotIdempotent(x));
            }
            for y in 0..n {
                if join[x * n + y] != join[y * n + x] {
                    return Err(OrderError::NotCommutative(x, y));
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                let xy = join[x * n + y];
                for z in 0..n {
                    if join[xy * n + z] != join[x * n + join[y * n + z]] {
                        return Err(OrderError::NotAssociative(x, y, z));
                    }
                }
            }
        }
        Ok(Self { n, join })
    }

    pub fn from_rows(rows: &[Vec<usize>]) -> Result<Self, OrderError> {
        let n = rows.len();
        let mut join = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(OrderError::TableShape {
                    expected: n * n,
                    got: rows.iter().map(Vec::len).sum(),
                });
            }
            join.extend_from_slice(r);
        }
        Self::new(n, join)
    }

    /// Builds the semilattice of a partial order given by `leq(x, y)`.
    /// The relation is closed reflexively and transitively first.
    pub fn from_order(n: usize, leq: impl Fn(usize, usize) -> bool) -> Result<Self, OrderError> {
        if n == 0 {
            return Err(OrderError::Empty);
        }
        let mut le = vec![false; n * n];
        for x in 0..n {
            for y in 0..n {
                le[x * n + y] = x == y || leq(x, y);
            }
        }
        for k in 0..n {
            for i in 0..n {
                if le[i * n + k] {
                    for j in 0..n {
                        if le[k * n + j] {
                            le[i * n + j] = true;
                        }
                    }
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                if x != y && le[x * n + y] && le[y * n + x] {
                    return Err(OrderError::NoJoin);
                }
            }
        }
        let mut join = vec![0; n * n];
        for x in 0..n {
            for y in 0..n {
                let ubs: Vec<usize> = (0..n).filter(|&z| le[x * n + z] && le[y * n + z]).collect();
                let least = ubs.iter().copied().find(|&u| ubs.iter().all(|&v| le[u * n + v]));
                join[x * n + y] = least.ok_or(OrderError::NoJoin)?;
            }
        }
        Self::new(n, join)
    }

    /// `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> Self {
        Self::from_order(n, |x, y| x <= y).expect("chain")
    }

    /// `m` pairwise incomparable elements below a top at index `m`.
    pub fn flat(m: usize) -> Self {
        Self::from_order(m + 1, |x, y| x == y || y == m).expect("flat")
    }

    /// Two incomparable atoms under a top: `{x, y, top}`.
    pub fn vee() -> Self {
        Self::flat(2)
    }

    /// `0 < a, b < 1` with `a = 1`, `b = 2`, top `3`.
    pub fn diamond() -> Self {
        Self::from_order(4, |x, y| x == 0 || y == 3 || x == y).expect("diamond")
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn join(&self, x: usize, y: usize) -> usize {
        self.join[x * self.n + y]
    }

    pub fn table(&self) -> &[usize] {
        &self.join
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.join.chunks(self.n).map(<[usize]>::to_vec).collect()
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.join(x, y) == y
    }

    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.leq(x, y)
    }

    pub fn try_leq(&self, x: usize, y: usize) -> Result<bool, OrderError> {
        for i in [x, y] {
            if i >= self.n {
                return Err(OrderError::IndexOutOfRange { index: i, n: self.n });
            }
        }
        Ok(self.leq(x, y))
    }

    pub fn join_all(&self, items: impl IntoIterator<Item = usize>) -> Option<usize> {
        items.into_iter().reduce(|a, b| self.join(a, b))
    }

    pub fn top(&self) -> usize {
        self.join_all(0..self.n).expect("nonempty")
    }

    pub fn bottom(&self) -> Option<usize> {
        (0..self.n).find(|&b| (0..self.n).all(|x| self.leq(b, x)))
    }

    pub fn is_lattice(&self) -> bool {
        self.bottom().is_some()
    }

    /// Greatest lower bound, if one exists.
    pub fn meet(&self, x: usize, y: usize) -> Option<usize> {
        let lbs: Vec<usize> = (0..self.n).filter(|&z| self.leq(z, x) && self.leq(z, y)).collect();
        let j = self.join_all(lbs.iter().copied())?;
        (self.leq(j, x) && self.leq(j, y)).then_some(j)
    }

    pub fn downset(&self, x: usize) -> Vec<usize> {
        (0..self.n).filter(|&y| self.leq(y, x)).collect()
    }

    pub fn upset(&self, x: usize) -> Vec<usize> {
        (0..self.n).filter(|&y| self.leq(x, y)).collect()
    }

    pub fn minimal_elements(&self) -> Vec<usize> {
        (0..self.n).filter(|&x| (0..self.n).all(|y| !self.lt(y, x))).collect()
    }

    /// Lower neighbors of `x`.
    pub fn lower_covers(&self, x: usize) -> Vec<usize> {
        (0..self.n)
            .filter(|&y| self.lt(y, x) && (0..self.n).all(|z| !(self.lt(y, z) && self.lt(z, x))))
            .collect()
    }

    pub fn coatoms(&self) -> Vec<usize> {
        self.lower_covers(self.top())
    }

    /// `x` is not the join of two strictly smaller elements (equivalently,
    /// it has at most one lower neighbor).
    pub fn is_join_irreducible(&self, x: usize) -> bool {
        self.lower_covers(x).len() <= 1
    }

    pub fn join_irreducibles(&self) -> Vec<usize> {
        (0..self.n).filter(|&x| self.is_join_irreducible(x)).collect()
    }

    /// The unique lower neighbor of the top when the top is join-irreducible.
    pub fn top_lower_neighbor(&self) -> Option<usize> {
        match self.coatoms().as_slice() {
            [c] => Some(*c),
            _ => None,
        }
    }

    /// Property (*): some `u` with `u ∨ x != top` for every `x != top`.
    /// Returns the first minimal witness; a witness exists iff a minimal one does.
    pub fn star_witness(&self) -> Option<usize> {
        let top = self.top();
        self.minimal_elements()
            .into_iter()
            .find(|&u| (0..self.n).all(|x| x == top || self.join(u, x) != top))
    }

    pub fn has_star_property(&self) -> bool {
        self.star_witness().is_some()
    }

    /// Per-element `(downset size, upset size)`: cheap isomorphism invariant.
    pub fn degree_invariant(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .map(|x| (self.downset(x).len(), self.upset(x).len()))
            .collect()
    }

    /// A bijection `phi` with `phi(x ∨ y) = phi(x) ∨ phi(y)`, if any.
    pub fn isomorphism(&self, other: &Semilattice) -> Option<Vec<usize>> {
        if self.n != other.n {
            return None;
        }
        relabel::isomorphisms(
            self.n,
            &[&self.join],
            &[&other.join],
            &self.degree_invariant(),
            &other.degree_invariant(),
            true,
        )
        .pop()
    }

    pub fn is_isomorphic(&self, other: &Semilattice) -> bool {
        self.isomorphism(other).is_some()
    }

    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        let inv = self.degree_invariant();
        relabel::isomorphisms(self.n, &[&self.join], &[&self.join], &inv, &inv, false)
    }

    pub fn relabel(&self, perm: &[usize]) -> Semilattice {
        Semilattice {
            n: self.n,
            join: relabel::relabel_table(self.n, &self.join, perm),
        }
    }

    /// Lex-minimal join table among invariant-sorted relabelings, with the
    /// permutation (old -> new) that produces it.
    pub fn canonical(&self) -> (Semilattice, Vec<usize>) {
        let (perm, mut tables) = relabel::canonical_form(self.n, &[&self.join], &self.degree_invariant());
        (
            Semilattice {
                n: self.n,
                join: tables.pop().expect("one table"),
            },
            perm,
        )
    }

    /// Restriction to a subset closed under join, relabeled in increasing
    /// order of the kept elements. Returns the new semilattice and the kept
    /// old indices.
    pub fn restrict(&self, keep: &[usize]) -> Result<(Semilattice, Vec<usize>), OrderError> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let k = keep.len();
        let mut join = Vec::with_capacity(k * k);
        for &x in &keep {
            for &y in &keep {
                let j = self.join(x, y);
                let pos = keep.binary_search(&j).map_err(|_| OrderError::NoJoin)?;
                join.push(pos);
            }
        }
        Ok((Semilattice::new(k, join)?, keep))
    }

    pub fn as_lattice(&self) -> Result<Lattice, OrderError> {
        Lattice::new(self.clone())
    }
}

/// A finite semilattice with a least element (hence all binary meets).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    base: Semilattice,
    bottom: usize,
}

impl Lattice {
    pub fn new(base: Semilattice) -> Result<Self, OrderError> {
        let bottom = base.bottom().ok_or(OrderError::NotALattice)?;
        Ok(Self { base, bottom })
    }

    pub fn semilattice(&self) -> &Semilattice {
        &self.base
    }

    pub fn size(&self) -> usize {
        self.base.size()
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.base.top()
    }

    pub fn join(&self, x: usize, y: usize) -> usize {
        self.base.join(x, y)
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.base.leq(x, y)
    }

    pub fn meet(&self, x: usize, y: usize) -> usize {
        self.base.meet(x, y).expect("lattices have meets")
    }

    /// Join of an arbitrary subset; the empty join is the bottom.
    pub fn join_all(&self, items: impl IntoIterator<Item = usize>) -> usize {
        self.base.join_all(items).unwrap_or(self.bottom)
    }

    /// Same carrier, reversed order: the dual join is the meet.
    pub fn dual(&self) -> Lattice {
        let n = self.size();
        let mut join = vec![0; n * n];
        for x in 0..n {
            for y in 0..n {
                join[x * n + y] = self.meet(x, y);
            }
        }
        let base = Semilattice { n, join };
        Lattice {
            bottom: self.top(),
            base,
        }
    }

    /// `L \ {0}` with the restricted join, plus the kept old indices.
    pub fn remove_bottom(&self) -> Result<(Semilattice, Vec<usize>), OrderError> {
        if self.size() < 2 {
            return Err(OrderError::Trivial);
        }
        let keep: Vec<usize> = (0..self.size()).filter(|&x| x != self.bottom).collect();
        self.base.restrict(&keep)
    }
}

/// Class of a pair in `L ⊠ K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoxClass {
    /// Pairs with a top coordinate, collapsed together.
    Merged,
    Pair(usize, usize),
}

/// `L ⊠ K`: `L × K` with every pair that has a top coordinate merged into
/// one class `A`, placed last. The other classes are ordered lexicographically
/// by `(x, y)`.
#[derive(Clone, Debug)]
pub struct BoxProduct {
    pub left: Semilattice,
    pub right: Semilattice,
    pub product: Semilattice,
    /// Class index of `(x, y)`, stored at `x * |K| + y`.
    pub class_of: Vec<usize>,
    /// Decoding of each class index.
    pub classes: Vec<BoxClass>,
}

impl BoxProduct {
    pub fn new(left: &Semilattice, right: &Semilattice) -> Self {
        let (tl, tr) = (left.top(), right.top());
        let (nl, nr) = (left.size(), right.size());
        let mut classes = Vec::new();
        for x in 0..nl {
            for y in 0..nr {
                if x != tl && y != tr {
                    classes.push(BoxClass::Pair(x, y));
                }
            }
        }
        let merged = classes.len();
        classes.push(BoxClass::Merged);
        let mut class_of = vec![merged; nl * nr];
        for (i, c) in classes.iter().enumerate() {
            if let BoxClass::Pair(x, y) = c {
                class_of[x * nr + y] = i;
            }
        }
        let size = classes.len();
        let mut join = vec![0; size * size];
        for (i, ci) in classes.iter().enumerate() {
            for (j, cj) in classes.iter().enumerate() {
                join[i * size + j] = match (ci, cj) {
                    (BoxClass::Pair(a, b), BoxClass::Pair(c, d)) => {
                        class_of[left.join(*a, *c) * nr + right.join(*b, *d)]
                    }
                    _ => merged,
                };
            }
        }
        let product = Semilattice::new(size, join).expect("box product is a semilattice");
        Self {
            left: left.clone(),
            right: right.clone(),
            product,
            class_of,
            classes,
        }
    }

    pub fn class(&self, x: usize, y: usize) -> usize {
        self.class_of[x * self.right.size() + y]
    }

    pub fn merged(&self) -> usize {
        self.classes.len() - 1
    }
}

/// Every join-semilattice on `n` elements up to isomorphism, each in its
/// canonical labeling, in lexicographic order of join tables.
///
/// Generated by adding a new minimal element to each canonical
/// representative of size `n - 1`, with canonical-deletion acceptance, so no
/// global table of seen objects is kept.
pub fn enumerate_semilattices(n: usize) -> Vec<Semilattice> {
    if n == 0 {
        return Vec::new();
    }
    let mut level = vec![Semilattice { n: 1, join: vec![0] }];
    for _ in 1..n {
        let mut next: Vec<Semilattice> = level.iter().flat_map(extend_by_minimal).collect();
        next.sort();
        level = next;
    }
    level
}

/// Canonical children of `parent` obtained by adding one minimal element.
fn extend_by_minimal(parent: &Semilattice) -> Vec<Semilattice> {
    let m = parent.size();
    let autos = parent.automorphisms();
    let mut out = Vec::new();
    // Candidate strict upsets of the new element: nonempty up-closed sets U
    // with a least element of U ∩ ↑y for every y.
    for mask in 1u64..(1u64 << m) {
        let in_u = |x: usize| mask >> x & 1 == 1;
        let up_closed = (0..m).all(|x| !in_u(x) || parent.upset(x).iter().all(|&y| in_u(y)));
        if !up_closed {
            continue;
        }
        let mut join_with_new = Vec::with_capacity(m);
        let mut ok = true;
        for y in 0..m {
            let cands: Vec<usize> = parent.upset(y).into_iter().filter(|&z| in_u(z)).collect();
            match cands.iter().copied().find(|&c| cands.iter().all(|&d| parent.leq(c, d))) {
                Some(c) => join_with_new.push(c),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        // Keep only the orbit-minimal U under Aut(parent).
        let orbit_min = autos.iter().all(|sigma| {
            let image: u64 = (0..m).filter(|&x| in_u(x)).map(|x| 1u64 << sigma[x]).sum();
            image >= mask
        });
        if !orbit_min {
            continue;
        }
        let n = m + 1;
        let mut join = vec![0; n * n];
        for x in 0..m {
            for y in 0..m {
                join[x * n + y] = parent.join(x, y);
            }
        }
        for y in 0..m {
            join[m * n + y] = join_with_new[y];
            join[y * n + m] = join_with_new[y];
        }
        join[m * n + m] = m;
        let child = Semilattice { n, join };
        debug_assert!(Semilattice::new(n, child.join.clone()).is_ok());
        let (canon, perm) = child.canonical();
        // Canonical deletion: the minimal element with the largest canonical label.
        let cmin = canon.minimal_elements().into_iter().max().expect("minimal element");
        let inv = relabel::invert(&perm);
        let deletion = inv[cmin];
        let same_orbit = child.automorphisms().iter().any(|a| a[m] == deletion);
        if same_orbit {
            out.push(canon);
        }
    }
    out
}

/// Distinct elements as a set, for tests and reports.
pub fn to_set(items: &[usize]) -> BTreeSet<usize> {
    items.iter().copied().collect()
}
