//! Relabeling of finite structures given by binary operation tables over
//! `0..n`: isomorphism search and lex-minimal canonical forms.
//!
//! Both searches only try bijections that preserve a caller-supplied
//! invariant, which must itself be isomorphism-invariant.

/// Relabels a row-major `n×n` table along `perm` (old index -> new index).
pub fn relabel_table(n: usize, table: &[usize], perm: &[usize]) -> Vec<usize> {
    let mut out = vec![0; n * n];
    for x in 0..n {
        for y in 0..n {
            out[perm[x] * n + perm[y]] = perm[table[x * n + y]];
        }
    }
    out
}

pub fn invert(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

/// Bijections `phi` with `tb[phi x][phi y] = phi(ta[x][y])` for every table
/// pair. Stops after the first hit when `first_only` is set.
pub fn isomorphisms<K: PartialEq>(
    n: usize,
    tables_a: &[&[usize]],
    tables_b: &[&[usize]],
    inv_a: &[K],
    inv_b: &[K],
    first_only: bool,
) -> Vec<Vec<usize>> {
    debug_assert_eq!(tables_a.len(), tables_b.len());
    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
        return out;
    }
    // Invariant multisets must agree before any search.
    let mut used_b = vec![false; n];
    for ia in inv_a {
        let hit = (0..n).find(|&y| !used_b[y] && inv_b[y] == *ia);
        match hit {
            Some(y) => used_b[y] = true,
            None => return out,
        }
    }
    // Map rarest invariant classes first.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&x| inv_a.iter().filter(|k| **k == inv_a[x]).count());

    let mut phi = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let mut assigned: Vec<usize> = Vec::with_capacity(n);
    search(
        0,
        n,
        &order,
        tables_a,
        tables_b,
        inv_a,
        inv_b,
        &mut phi,
        &mut used,
        &mut assigned,
        first_only,
        &mut out,
    );
    out
}

#[allow(clippy::too_many_arguments)]
fn search<K: PartialEq>(
    depth: usize,
    n: usize,
    order: &[usize],
    ta: &[&[usize]],
    tb: &[&[usize]],
    inv_a: &[K],
    inv_b: &[K],
    phi: &mut [usize],
    used: &mut [bool],
    assigned: &mut Vec<usize>,
    first_only: bool,
    out: &mut Vec<Vec<usize>>,
) -> bool {
    if depth == n {
        out.push(phi.to_vec());
        return first_only;
    }
    let x = order[depth];
    for y in 0..n {
        if used[y] || inv_b[y] != inv_a[x] {
            continue;
        }
        phi[x] = y;
        used[y] = true;
        assigned.push(x);
        if consistent(n, ta, tb, phi, used, assigned, x)
            && search(
                depth + 1,
                n,
                order,
                ta,
                tb,
                inv_a,
                inv_b,
                phi,
                used,
                assigned,
                first_only,
                out,
            )
        {
            return true;
        }
        assigned.pop();
        used[y] = false;
        phi[x] = usize::MAX;
    }
    false
}

fn consistent(
    n: usize,
    ta: &[&[usize]],
    tb: &[&[usize]],
    phi: &[usize],
    used: &[bool],
    assigned: &[usize],
    x: usize,
) -> bool {
    for &u in assigned {
        for &v in assigned {
            for (t, s) in ta.iter().zip(tb) {
                let z = t[u * n + v];
                let w = s[phi[u] * n + phi[v]];
                if u == x || v == x {
                    if phi[z] == usize::MAX {
                        if used[w] {
                            return false;
                        }
                    } else if phi[z] != w {
                        return false;
                    }
                } else if z == x && phi[z] != w {
                    return false;
                }
            }
        }
    }
    true
}

/// Lex-minimal relabeling of the tables (compared in the given order,
/// row-major) among bijections that sort elements by invariant.
/// Returns the permutation (old -> new) and the relabeled tables.
pub fn canonical_form<K: Ord + Clone>(n: usize, tables: &[&[usize]], inv: &[K]) -> (Vec<usize>, Vec<Vec<usize>>) {
    let mut keys: Vec<K> = inv.to_vec();
    keys.sort();
    keys.dedup();
    // label -> invariant class
    let mut sorted: Vec<K> = inv.to_vec();
    sorted.sort();
    let label_class: Vec<usize> = sorted.iter().map(|k| keys.binary_search(k).unwrap()).collect();
    let elem_class: Vec<usize> = inv.iter().map(|k| keys.binary_search(k).unwrap()).collect();

    let mut best: Option<(Vec<usize>, Vec<Vec<usize>>)> = None;
    let mut inv_perm = vec![usize::MAX; n]; // new label -> old element
    let mut used = vec![false; n];
    fill(
        0,
        n,
        &label_class,
        &elem_class,
        &mut inv_perm,
        &mut used,
        tables,
        &mut best,
    );
    best.expect("at least one bijection")
}

#[allow(clippy::too_many_arguments)]
fn fill(
    label: usize,
    n: usize,
    label_class: &[usize],
    elem_class: &[usize],
    inv_perm: &mut [usize],
    used: &mut [bool],
    tables: &[&[usize]],
    best: &mut Option<(Vec<usize>, Vec<Vec<usize>>)>,
) {
    if label == n {
        let perm = invert(inv_perm);
        let relabeled: Vec<Vec<usize>> = tables.iter().map(|t| relabel_table(n, t, &perm)).collect();
        let better = match best {
            None => true,
            Some((_, b)) => relabeled < *b,
        };
        if better {
            *best = Some((perm, relabeled));
        }
        return;
    }
    for x in 0..n {
        if !used[x] && elem_class[x] == label_class[label] {
            used[x] = true;
            inv_perm[label] = x;
            fill(label + 1, n, label_class, elem_class, inv_perm, used, tables, best);
            used[x] = false;
        }
    }
}

/// Iterator-free enumeration of all permutations of `0..n` in lex order.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, n: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, n, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], n, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    // max on 0..3 is the 3-chain join.
    fn chain3() -> Vec<usize> {
        (0..9).map(|i| (i / 3).max(i % 3)).collect()
    }

    #[test]
    fn chain_has_only_identity_automorphism() {
        let t = chain3();
        let inv = vec![0; 3];
        let autos = isomorphisms(3, &[&t], &[&t], &inv, &inv, false);
        assert_eq!(autos, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn canonical_form_is_label_independent() {
        let t = chain3();
        let inv = vec![0; 3];
        let (_, c1) = canonical_form(3, &[&t], &inv);
        for p in all_permutations(3) {
            let r = relabel_table(3, &t, &p);
            let (_, c2) = canonical_form(3, &[&r], &inv);
            assert_eq!(c1, c2);
        }
    }

    #[test]
    fn permutation_count() {
        assert_eq!(all_permutations(4).len(), 24);
    }
}
