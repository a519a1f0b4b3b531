//! Isomorph-free enumeration of finite additively idempotent semirings.
//!
//! The additive semilattice `L` is fixed first (one canonical representative
//! per isomorphism class). A multiplication distributive on the left makes
//! every `x -> a·x` a join-morphism `λ_a` of `L`; distributivity on the right
//! says `a -> λ_a` preserves joins, and associativity says
//! `λ_{a·b} = λ_a ∘ λ_b`. The search assigns `λ_a` bottom-up and propagates
//! both constraints. Duplicates under `Aut(L)` are rejected by keeping only
//! the lex-least multiplication table in each orbit.

use serde::{Deserialize, Serialize};

use crate::exec::Exec;
use crate::morphism::{MorphismClass, MorphismMonoid};
use crate::order::{enumerate_semilattices, Semilattice};
use crate::relabel::relabel_table;
use crate::semimodule::{case_tag, SemimoduleError};
use crate::semiring::{CaseTag, Semiring};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Enumerated {
    pub semiring: Semiring,
    pub case: CaseTag,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationOptions {
    pub min_size: usize,
    pub max_size: usize,
    /// Keep only simple semirings.
    pub simple_only: bool,
    pub case: Option<CaseTag>,
    pub exec: Exec,
    /// Worker threads for the parallel strategy; 0 keeps the default.
    pub jobs: usize,
}

impl EnumerationOptions {
    pub fn simple(max_size: usize) -> Self {
        Self {
            min_size: 1,
            max_size,
            simple_only: true,
            case: None,
            exec: Exec::default(),
            jobs: 0,
        }
    }
}

struct Search<'a> {
    l: &'a Semilattice,
    u: &'a MorphismMonoid,
    /// Elements in an order extending `≤`.
    order: Vec<usize>,
    /// Whether `order[i]` is join-irreducible, i.e. not forced by lower ones.
    free: Vec<bool>,
    autos: Vec<Vec<usize>>,
}

impl<'a> Search<'a> {
    fn new(l: &'a Semilattice, u: &'a MorphismMonoid) -> Self {
        let n = l.size();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&x| (l.downset(x).len(), x));
        let free = order.iter().map(|&x| l.is_join_irreducible(x)).collect();
        let autos = l
            .automorphisms()
            .into_iter()
            .filter(|p| p.iter().enumerate().any(|(i, &j)| i != j))
            .collect();
        Self {
            l,
            u,
            order,
            free,
            autos,
        }
    }

    /// Assigns `λ_x = v` and everything it forces. Returns false on conflict.
    fn assign(&self, state: &mut [Option<usize>], x: usize, v: usize) -> bool {
        let mut queue = vec![(x, v)];
        while let Some((x, v)) = queue.pop() {
            match state[x] {
                Some(w) if w == v => continue,
                Some(_) => return false,
                None => state[x] = Some(v),
            }
            for y in 0..state.len() {
                let Some(w) = state[y] else { continue };
                let pending = [
                    (self.l.join(x, y), self.u.sup(v, w)),
                    (self.u.maps[v].apply(y), self.u.compose(v, w)),
                    (self.u.maps[w].apply(x), self.u.compose(w, v)),
                ];
                for (z, t) in pending {
                    match state[z] {
                        Some(s) if s == t => {}
                        Some(_) => return false,
                        None => queue.push((z, t)),
                    }
                }
            }
        }
        true
    }

    /// Candidate values for the element at position `pos`.
    fn candidates(&self, state: &[Option<usize>], pos: usize) -> Vec<usize> {
        let x = self.order[pos];
        if let Some(v) = state[x] {
            return vec![v];
        }
        if !self.free[pos] {
            // A join of lower elements: forced once they are assigned.
            return Vec::new();
        }
        let below: Vec<usize> = self
            .l
            .downset(x)
            .into_iter()
            .filter(|&y| y != x)
            .filter_map(|y| state[y])
            .collect();
        (0..self.u.len())
            .filter(|&v| below.iter().all(|&w| self.u.leq(w, v)))
            .collect()
    }

    fn table(&self, state: &[Option<usize>]) -> Vec<usize> {
        let n = self.l.size();
        let mut mul = vec![0; n * n];
        for a in 0..n {
            let f = &self.u.maps[state[a].expect("complete assignment")];
            for b in 0..n {
                mul[a * n + b] = f.apply(b);
            }
        }
        mul
    }

    fn is_orbit_least(&self, mul: &[usize]) -> bool {
        let n = self.l.size();
        self.autos.iter().all(|p| relabel_table(n, mul, p).as_slice() >= mul)
    }

    fn run(&self, state: Vec<Option<usize>>, pos: usize, out: &mut Vec<Vec<usize>>) {
        if pos == self.order.len() {
            let mul = self.table(&state);
            if self.is_orbit_least(&mul) {
                out.push(mul);
            }
            return;
        }
        let x = self.order[pos];
        if state[x].is_some() {
            self.run(state, pos + 1, out);
            return;
        }
        for v in self.candidates(&state, pos) {
            let mut next = state.clone();
            if self.assign(&mut next, x, v) {
                self.run(next, pos + 1, out);
            }
        }
    }

    /// Work items: states after the first free choice.
    fn prefixes(&self) -> Vec<Vec<Option<usize>>> {
        let n = self.l.size();
        let empty = vec![None; n];
        let x = self.order[0];
        self.candidates(&empty, 0)
            .into_iter()
            .filter_map(|v| {
                let mut s = empty.clone();
                self.assign(&mut s, x, v).then_some(s)
            })
            .collect()
    }
}

/// Every additively idempotent semiring whose additive semilattice is `l`,
/// one per isomorphism class, as multiplication tables in lex order.
pub fn multiplications(l: &Semilattice, exec: Exec) -> Vec<Vec<usize>> {
    let u = MorphismMonoid::new(l, MorphismClass::Jm).expect("JM is defined on every semilattice");
    let search = Search::new(l, &u);
    let prefixes = search.prefixes();
    let parts = exec.map(&prefixes, |p| {
        let mut out = Vec::new();
        search.run(p.clone(), 1, &mut out);
        out
    });
    let mut all: Vec<Vec<usize>> = parts.into_iter().flatten().collect();
    all.sort();
    all
}

/// Semirings on the given additive semilattice as [`Semiring`] values.
pub fn semirings_on(l: &Semilattice, exec: Exec) -> Vec<Semiring> {
    multiplications(l, exec)
        .into_iter()
        .map(|mul| Semiring::from_tables_unchecked(l.size(), l.table().to_vec(), mul))
        .collect()
}

/// Case tag for an enumerated semiring; `NotApplicable` outside the
/// characterized range.
pub fn tag(r: &Semiring) -> Result<CaseTag, SemimoduleError> {
    if r.size() <= 2 || !r.is_simple() {
        return Ok(CaseTag::NotApplicable);
    }
    case_tag(r)
}

/// The enumeration pipeline: for each size and each canonical semilattice,
/// all multiplications, filtered and tagged. The order is by size, then
/// semilattice, then multiplication table, independent of `exec` and `jobs`.
pub fn enumerate(opts: &EnumerationOptions) -> Result<Vec<Enumerated>, SemimoduleError> {
    opts.exec.with_jobs(opts.jobs, || {
        let mut out = Vec::new();
        for n in opts.min_size.max(1)..=opts.max_size {
            for l in enumerate_semilattices(n) {
                let rings = semirings_on(&l, opts.exec);
                let tagged = opts
                    .exec
                    .map(&rings, |r| -> Result<Option<Enumerated>, SemimoduleError> {
                        if opts.simple_only && !r.is_simple() {
                            return Ok(None);
                        }
                        let case = tag(r)?;
                        if opts.case.is_some_and(|c| !case.matches(c)) {
                            return Ok(None);
                        }
                        Ok(Some(Enumerated {
                            semiring: r.clone(),
                            case,
                        }))
                    });
                for t in tagged {
                    out.extend(t?);
                }
            }
        }
        Ok(out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        assert_eq!(multiplications(&Semilattice::chain(1), Exec::Sequential).len(), 1);
        let c2 = multiplications(&Semilattice::chain(2), Exec::Sequential);
        // All semigroup tables on {0 < 1} distributing over max, up to the
        // trivial automorphism group.
        let mut brute = 0;
        for code in 0..16usize {
            let mul: Vec<usize> = (0..4).map(|i| code >> i & 1).collect();
            let s = Semiring::from_tables_unchecked(2, Semilattice::chain(2).table().to_vec(), mul);
            if s.verify_axioms().passed() {
                brute += 1;
            }
        }
        assert_eq!(c2.len(), brute);
    }

    #[test]
    fn results_are_semirings_and_deterministic() {
        for l in enumerate_semilattices(4) {
            let a = semirings_on(&l, Exec::Sequential);
            let b = semirings_on(&l, Exec::Parallel);
            assert_eq!(a, b);
            for r in &a {
                assert!(r.verify_axioms().passed());
            }
            for (i, r) in a.iter().enumerate() {
                for s in &a[i + 1..] {
                    assert!(!r.is_isomorphic(s));
                }
            }
        }
    }

    #[test]
    fn chain3_right_not_left_is_unique() {
        let found: Vec<Semiring> = semirings_on(&Semilattice::chain(3), Exec::Sequential)
            .into_iter()
            .filter(|r| r.is_simple() && r.structure().case == CaseTag::RightNotLeft)
            .collect();
        assert_eq!(found.len(), 1);
    }
}
