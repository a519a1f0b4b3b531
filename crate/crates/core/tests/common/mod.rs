//! Brute-force oracles, written without the library's search code.
#![allow(dead_code)]

use std::collections::BTreeSet;

/// Every permutation of `0..n`.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                cur.push(x);
                rec(cur, used, out);
                cur.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Set partitions of `0..n` as restricted growth strings.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let next = cur.iter().max().map_or(0, |m| m + 1);
        for b in 0..=next {
            cur.push(b);
            rec(cur, n, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), n, &mut out);
    out
}

/// Compatibility of a labeling with two binary operations.
pub fn is_congruence(n: usize, add: &[usize], mul: &[usize], labels: &[usize]) -> bool {
    for a in 0..n {
        for b in 0..n {
            if labels[a] != labels[b] {
                continue;
            }
            for c in 0..n {
                for op in [add, mul] {
                    if labels[op[a * n + c]] != labels[op[b * n + c]] || labels[op[c * n + a]] != labels[op[c * n + b]]
                    {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Simplicity by testing every partition.
pub fn brute_is_simple(n: usize, add: &[usize], mul: &[usize]) -> bool {
    set_partitions(n)
        .iter()
        .filter(|p| is_congruence(n, add, mul, p))
        .all(|p| p.iter().all(|&b| b == 0) || p.iter().collect::<BTreeSet<_>>().len() == n)
}

fn associative(n: usize, t: &[usize]) -> bool {
    (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| t[t[a * n + b] * n + c] == t[a * n + t[b * n + c]])))
}

/// Semilattice tables on `0..n`, labeled (not up to isomorphism).
pub fn labeled_semilattices(n: usize) -> Vec<Vec<usize>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let mut out = Vec::new();
    let total = n.pow(pairs.len() as u32);
    let mut t = vec![0; n * n];
    for code in 0..total {
        let mut c = code;
        for x in 0..n {
            t[x * n + x] = x;
        }
        for &(a, b) in &pairs {
            let v = c % n;
            c /= n;
            t[a * n + b] = v;
            t[b * n + a] = v;
        }
        if associative(n, &t) {
            out.push(t.clone());
        }
    }
    out
}

fn relabel(n: usize, t: &[usize], p: &[usize]) -> Vec<usize> {
    let mut out = vec![0; n * n];
    for a in 0..n {
        for b in 0..n {
            out[p[a] * n + p[b]] = p[t[a * n + b]];
        }
    }
    out
}

/// Semilattices of size `n` up to isomorphism, by canonical relabeling.
pub fn semilattice_count(n: usize) -> usize {
    let perms = permutations(n);
    labeled_semilattices(n)
        .iter()
        .map(|t| perms.iter().map(|p| relabel(n, t, p)).min().expect("n >= 1"))
        .collect::<BTreeSet<_>>()
        .len()
}

/// Simple additively idempotent semirings of size `n` up to isomorphism,
/// from every pair of tables.
pub fn naive_simple_count(n: usize) -> usize {
    let perms = permutations(n);
    let cells = n * n;
    let total = n.pow(cells as u32);
    let mut mul = vec![0; cells];
    let mut found = BTreeSet::new();
    for add in labeled_semilattices(n) {
        for code in 0..total {
            let mut c = code;
            for v in mul.iter_mut() {
                *v = c % n;
                c /= n;
            }
            if !associative(n, &mul) {
                continue;
            }
            let distributive = (0..n).all(|a| {
                (0..n).all(|b| {
                    (0..n).all(|x| {
                        mul[a * n + add[b * n + x]] == add[mul[a * n + b] * n + mul[a * n + x]]
                            && mul[add[a * n + b] * n + x] == add[mul[a * n + x] * n + mul[b * n + x]]
                    })
                })
            });
            if !distributive || !brute_is_simple(n, &add, &mul) {
                continue;
            }
            let canon = perms
                .iter()
                .map(|p| (relabel(n, &add, p), relabel(n, &mul, p)))
                .min()
                .expect("n >= 1");
            found.insert(canon);
        }
    }
    found.len()
}

/// Join-preserving self-maps of a semilattice table, from all `n^n` maps.
pub fn naive_join_morphisms(n: usize, join: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for code in 0..n.pow(n as u32) {
        let mut c = code;
        let f: Vec<usize> = (0..n)
            .map(|_| {
                let v = c % n;
                c /= n;
                v
            })
            .collect();
        if (0..n).all(|a| (0..n).all(|b| f[join[a * n + b]] == join[f[a] * n + f[b]])) {
            out.push(f);
        }
    }
    out.sort();
    out
}
