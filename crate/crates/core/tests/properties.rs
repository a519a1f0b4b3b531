mod common;

use std::sync::OnceLock;

use proptest::prelude::*;
use proptest::sample::Index;

use semiring_forge::enumerate::semirings_on;
use semiring_forge::exec::Exec;
use semiring_forge::io::{parse_semiring, read_semiring, write_semiring, SemiringJson};
use semiring_forge::morphism::{enumerate_morphisms, make_f, MorphismClass};
use semiring_forge::order::{enumerate_semilattices, Semilattice};
use semiring_forge::semiring::Semiring;

fn semilattices() -> &'static Vec<Semilattice> {
    static ALL: OnceLock<Vec<Semilattice>> = OnceLock::new();
    ALL.get_or_init(|| (1..=5).flat_map(enumerate_semilattices).collect())
}

/// Every additively idempotent semiring with at most four elements.
fn semirings() -> &'static Vec<Semiring> {
    static ALL: OnceLock<Vec<Semiring>> = OnceLock::new();
    ALL.get_or_init(|| {
        (1..=4)
            .flat_map(enumerate_semilattices)
            .flat_map(|l| semirings_on(&l, Exec::Sequential))
            .collect()
    })
}

fn perm_of(n: usize, seed: Index) -> Vec<usize> {
    let all = common::permutations(n);
    all[seed.index(all.len())].clone()
}

proptest! {
    #[test]
    fn semilattice_relabel_is_isomorphic(i: Index, p: Index) {
        let l = i.get(semilattices());
        let q = l.relabel(&perm_of(l.size(), p));
        prop_assert!(q.is_isomorphic(l));
        prop_assert_eq!(q.canonical().0, l.canonical().0);
        prop_assert_eq!(q.has_star_property(), l.has_star_property());
    }

    #[test]
    fn join_morphisms_match_brute_force(i: Index) {
        let l = i.get(semilattices());
        let ours: Vec<Vec<usize>> = enumerate_morphisms(l, MorphismClass::Jm)
            .unwrap()
            .into_iter()
            .map(|f| f.into_image())
            .collect();
        prop_assert_eq!(ours, common::naive_join_morphisms(l.size(), l.table()));
        let top = l.top();
        let jm1: Vec<Vec<usize>> = enumerate_morphisms(l, MorphismClass::Jm1)
            .unwrap()
            .into_iter()
            .map(|f| f.into_image())
            .collect();
        let brute: Vec<Vec<usize>> = common::naive_join_morphisms(l.size(), l.table())
            .into_iter()
            .filter(|f| f[top] == top)
            .collect();
        prop_assert_eq!(jm1, brute);
    }

    #[test]
    fn two_valued_maps_are_the_small_range_top_fixing_maps(i: Index) {
        let l = i.get(&semilattices()[1..]);
        let top = l.top();
        let mut fab: Vec<_> = (0..l.size())
            .filter(|&a| a != top)
            .flat_map(|a| (0..l.size()).map(move |b| (a, b)))
            .map(|(a, b)| make_f(l, a, b).unwrap())
            .collect();
        fab.sort();
        fab.dedup();
        let small: Vec<_> = enumerate_morphisms(l, MorphismClass::Jm1)
            .unwrap()
            .into_iter()
            .filter(|f| f.range_size() <= 2)
            .collect();
        prop_assert_eq!(fab, small);
    }

    #[test]
    fn semiring_relabel_preserves_invariants(i: Index, p: Index) {
        let r = i.get(semirings());
        let q = r.relabel(&perm_of(r.size(), p));
        prop_assert!(q.verify_axioms().passed());
        prop_assert!(q.is_isomorphic(r));
        prop_assert_eq!(q.canonical(), r.canonical());
        prop_assert_eq!(q.is_simple(), r.is_simple());
        prop_assert_eq!(q.structure().case, r.structure().case);
        prop_assert_eq!(q.all_congruences().len(), r.all_congruences().len());
    }

    #[test]
    fn principal_congruence_is_least(i: Index, a: Index, b: Index) {
        let r = i.get(semirings());
        let n = r.size();
        let (a, b) = (a.index(n), b.index(n));
        let theta = r.principal_congruence(a, b).unwrap();
        prop_assert!(theta.same(a, b));
        prop_assert!(common::is_congruence(n, r.add_table(), r.mul_table(), theta.blocks()));
        for labels in common::set_partitions(n) {
            if labels[a] == labels[b] && common::is_congruence(n, r.add_table(), r.mul_table(), &labels) {
                for x in 0..n {
                    for y in 0..n {
                        prop_assert!(!theta.same(x, y) || labels[x] == labels[y]);
                    }
                }
            }
        }
    }

    #[test]
    fn text_and_json_round_trip(i: Index) {
        let r = i.get(semirings());
        let text = write_semiring(r);
        prop_assert_eq!(&parse_semiring(&text).unwrap(), r);
        let json = serde_json::to_string(&SemiringJson::from_semiring(r)).unwrap();
        prop_assert_eq!(&read_semiring(&json).unwrap(), r);
    }

    #[test]
    fn opposite_is_an_involution(i: Index) {
        let r = i.get(semirings());
        let op = r.opposite();
        prop_assert_eq!(&op.opposite(), r);
        prop_assert_eq!(op.is_simple(), r.is_simple());
    }
}
