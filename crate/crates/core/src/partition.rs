//! Partitions of a carrier `0..n` and the fixpoint closure that turns a set
//! of identified pairs into the smallest equivalence closed under a family
//! of unary maps. Semiring and semimodule congruences both reduce to this.

use std::collections::VecDeque;

/// Disjoint-set forest with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the classes of `a` and `b`; returns false if they were already equal.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

    pub fn into_partition(mut self) -> Partition {
        let n = self.parent.len();
        let roots: Vec<usize> = (0..n).map(|x| self.find(x)).collect();
        Partition::from_labels(&roots)
    }
}

/// An equivalence relation on `0..n`, stored as normalized block ids:
/// blocks are numbered in order of their smallest member.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition {
    block: Vec<usize>,
}

impl Partition {
    pub fn identity(n: usize) -> Self {
        Self {
            block: (0..n).collect(),
        }
    }

    pub fn full(n: usize) -> Self {
        Self { block: vec![0; n] }
    }

    /// Normalizes arbitrary labels so equal labels share a block.
    pub fn from_labels<T: PartialEq>(labels: &[T]) -> Self {
        let mut block = Vec::with_capacity(labels.len());
        let mut reps: Vec<&T> = Vec::new();
        for l in labels {
            match reps.iter().position(|r| *r == l) {
                Some(i) => block.push(i),
                None => {
                    block.push(reps.len());
                    reps.push(l);
                }
            }
        }
        Self { block }
    }

    pub fn len(&self) -> usize {
        self.block.len()
    }

    pub fn is_empty(&self) -> bool {
        self.block.is_empty()
    }

    pub fn block_of(&self, x: usize) -> usize {
        self.block[x]
    }

    pub fn blocks(&self) -> &[usize] {
        &self.block
    }

    pub fn num_blocks(&self) -> usize {
        self.block.iter().max().map_or(0, |m| m + 1)
    }

    pub fn same(&self, x: usize, y: usize) -> bool {
        self.block[x] == self.block[y]
    }

    pub fn is_identity(&self) -> bool {
        self.num_blocks() == self.len()
    }

    pub fn is_full(&self) -> bool {
        self.num_blocks() <= 1
    }

    /// Members of each block, blocks in id order.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_blocks()];
        for (x, &b) in self.block.iter().enumerate() {
            out[b].push(x);
        }
        out
    }

    /// Smallest member of each block.
    pub fn representatives(&self) -> Vec<usize> {
        self.classes().into_iter().map(|c| c[0]).collect()
    }

    /// Checks `x ~ y => t(x) ~ t(y)` for every map.
    pub fn is_compatible(&self, maps: &[Vec<usize>]) -> bool {
        let n = self.len();
        for x in 0..n {
            for y in (x + 1)..n {
                if self.same(x, y) && maps.iter().any(|t| !self.same(t[x], t[y])) {
                    return false;
                }
            }
        }
        true
    }

    /// Every partition of `0..n` (restricted growth strings, lexicographic).
    pub fn all(n: usize) -> Vec<Partition> {
        fn rec(k: usize, n: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Partition>) {
            if k == n {
                out.push(Partition { block: cur.clone() });
                return;
            }
            for b in 0..=max.min(k) {
                cur.push(b);
                let next = if b == max { max + 1 } else { max };
                rec(k + 1, n, cur, next, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if n == 0 {
            out.push(Partition { block: vec![] });
            return out;
        }
        rec(0, n, &mut Vec::with_capacity(n), 0, &mut out);
        out
    }
}

/// Smallest equivalence containing `seeds` and closed under every map in
/// `translations`: `x ~ y => t(x) ~ t(y)`.
///
/// Each successful merge enqueues the images of the merged pair, so the
/// result is reached once the queue drains.
pub fn close(n: usize, translations: &[Vec<usize>], seeds: &[(usize, usize)], start: Option<&Partition>) -> Partition {
    let mut uf = UnionFind::new(n);
    let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
    if let Some(p) = start {
        for class in p.classes() {
            for w in class.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
    }
    queue.extend(seeds.iter().copied());
    while let Some((a, b)) = queue.pop_front() {
        if uf.union(a, b) {
            for t in translations {
                if t[a] != t[b] {
                    queue.push_back((t[a], t[b]));
                }
            }
        }
    }
    uf.into_partition()
}

/// Join of two congruences: the transitive closure of their union. Closed
/// under the same translations whenever both inputs are.
pub fn join(a: &Partition, b: &Partition) -> Partition {
    let mut uf = UnionFind::new(a.len());
    for p in [a, b] {
        for class in p.classes() {
            for w in class.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
    }
    uf.into_partition()
}

/// Every congruence for the given translations, as joins of principal ones.
/// Sorted; identity and full are always present.
pub fn all_congruences(n: usize, translations: &[Vec<usize>]) -> Vec<Partition> {
    use std::collections::BTreeSet;
    let mut principal = BTreeSet::new();
    for a in 0..n {
        for b in (a + 1)..n {
            principal.insert(close(n, translations, &[(a, b)], None));
        }
    }
    let principal: Vec<Partition> = principal.into_iter().collect();
    let mut seen: BTreeSet<Partition> = BTreeSet::new();
    let mut stack = vec![Partition::identity(n)];
    seen.insert(Partition::identity(n));
    while let Some(c) = stack.pop() {
        for p in &principal {
            let j = join(&c, p);
            if seen.insert(j.clone()) {
                stack.push(j);
            }
        }
    }
    seen.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_numbers() {
        let counts: Vec<usize> = (0..6).map(|n| Partition::all(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 15, 52]);
    }

    #[test]
    fn labels_normalize() {
        let p = Partition::from_labels(&[7, 3, 7, 9]);
        assert_eq!(p.blocks(), &[0, 1, 0, 2]);
        assert_eq!(p.classes(), vec![vec![0, 2], vec![1], vec![3]]);
    }

    #[test]
    fn closure_under_successor() {
        // x -> min(x+1, 4) on 0..5: identifying 1 and 2 drags in 3 and 4.
        let succ: Vec<usize> = (0..5).map(|x| (x + 1).min(4)).collect();
        let p = close(5, &[succ], &[(1, 2)], None);
        assert_eq!(p.blocks(), &[0, 1, 1, 1, 1]);
    }

    #[test]
    fn congruences_without_translations_are_all_partitions() {
        assert_eq!(all_congruences(4, &[]).len(), 15);
    }
}
