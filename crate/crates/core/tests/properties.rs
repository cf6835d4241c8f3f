//! Engine laws as properties over seeded random systems and structures.

use std::sync::Arc;

use proptest::prelude::*;
use rankforge::actions::{BasisSpec, FiniteDiscreteAction};
use rankforge::bits::BitSet;
use rankforge::budget::Budget;
use rankforge::gen;
use rankforge::hjorth::{basis_shift_check, hjorth_ranks, leq_table, vaught_delta, vaught_star, ActionSystem, GroupAction};
use rankforge::oracle::{orbit_partition, NaiveLeq, NaiveScott};
use rankforge::scott::ScottTable;
use rankforge::structures::{brute_isomorphic, Domain, Signature, Structure};
use rankforge::Level;

fn system(seed: u64, max_g: usize, max_x: usize) -> FiniteDiscreteAction {
    gen::random_discrete(&mut gen::rng(seed), max_g, max_x, BasisSpec::AllSubsets)
}

fn quads(n: usize, nb: usize) -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..n).flat_map(move |x0| {
        (0..nb).flat_map(move |v0| (0..n).flat_map(move |x1| (0..nb).map(move |v1| (x0, v0, x1, v1))))
    })
}

fn complement(a: &BitSet) -> BitSet {
    let mut c = BitSet::full(a.len());
    for x in a.iter() {
        c.remove(x);
    }
    c
}

fn arb_graph(max_n: usize) -> impl Strategy<Value = Structure> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
            let sig = Arc::new(Signature::new([("edge", 2)]).unwrap());
            let facts = vec![(0..n * n).filter(|&i| bits[i]).map(|i| vec![i / n, i % n]).collect()];
            Structure::new("G", sig, Domain::Finite(n), facts).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn table_matches_the_recursion(seed in any::<u64>()) {
        let sys = system(seed, 6, 4);
        let t = leq_table(&sys, None).unwrap();
        let stab = t.stab().unwrap();
        let mut naive = NaiveLeq::new(&sys, stab + 1);
        for alpha in 1..=stab + 1 {
            for (x0, v0, x1, v1) in quads(sys.num_points(), sys.num_basis()) {
                prop_assert_eq!(
                    t.leq(x0, v0, x1, v1, Level::At(alpha)).unwrap(),
                    naive.leq(x0, v0, x1, v1, alpha).unwrap()
                );
            }
        }
    }

    #[test]
    fn levels_decrease_and_compose(seed in any::<u64>()) {
        let sys = system(seed, 6, 4);
        let t = leq_table(&sys, None).unwrap();
        let (n, nb) = (sys.num_points(), sys.num_basis());
        let stab = t.stab().unwrap();
        for alpha in 1..=stab {
            for (x0, v0, x1, v1) in quads(n, nb) {
                if t.leq(x0, v0, x1, v1, Level::At(alpha + 1)).unwrap() {
                    prop_assert!(t.leq(x0, v0, x1, v1, Level::At(alpha)).unwrap());
                }
            }
        }
        for (x0, v0, x1, v1) in quads(n, nb) {
            if !t.leq(x0, v0, x1, v1, Level::Stab).unwrap() {
                continue;
            }
            for x2 in 0..n {
                for v2 in 0..nb {
                    if t.leq(x1, v1, x2, v2, Level::Stab).unwrap() {
                        prop_assert!(t.leq(x0, v0, x2, v2, Level::Stab).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn relation_is_invariant_under_translation(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let sys = system(seed, 6, 5);
        let t = leq_table(&sys, None).unwrap();
        let g = pick.index(sys.order());
        for (x0, v0, x1, v1) in quads(sys.num_points(), sys.num_basis()) {
            let (Some(w0), Some(w1)) = (sys.translate(v0, g), sys.translate(v1, g)) else { continue };
            prop_assert_eq!(
                t.leq(x0, v0, x1, v1, Level::Stab).unwrap(),
                t.leq(sys.act(g, x0), w0, sys.act(g, x1), w1, Level::Stab).unwrap()
            );
        }
    }

    #[test]
    fn stable_equivalence_is_orbit_equivalence(seed in any::<u64>()) {
        let sys = system(seed, 8, 6);
        let t = leq_table(&sys, None).unwrap();
        let orbits = orbit_partition(&sys).unwrap();
        let ranks = hjorth_ranks(&sys, &t).unwrap();
        for x in 0..sys.num_points() {
            for y in 0..sys.num_points() {
                let same = orbits.orbit_of[x] == orbits.orbit_of[y];
                prop_assert_eq!(t.equiv(x, y, Level::Stab).unwrap(), same);
                if same {
                    prop_assert_eq!(ranks[x], ranks[y]);
                }
            }
        }
    }

    #[test]
    fn vaught_transforms_are_dual_and_monotone(seed in any::<u64>(), bits in any::<u64>(), more in any::<u64>()) {
        let sys = system(seed, 8, 6);
        let n = sys.num_points();
        let a = BitSet::from_indices(n, (0..n).filter(|i| bits >> i & 1 == 1));
        let b = BitSet::from_indices(n, (0..n).filter(|i| (bits | more) >> i & 1 == 1));
        for u in 0..sys.num_basis() {
            let delta = vaught_delta(&sys, &a, u).unwrap();
            prop_assert_eq!(&delta, &complement(&vaught_star(&sys, &complement(&a), u).unwrap()));
            prop_assert!(vaught_star(&sys, &a, u).unwrap().is_subset(&vaught_star(&sys, &b, u).unwrap()));
            prop_assert!(delta.is_subset(&vaught_delta(&sys, &b, u).unwrap()));
        }
    }

    #[test]
    fn shrinking_the_basis_moves_ranks_by_at_most_one(seed in any::<u64>()) {
        let sys = system(seed, 8, 5);
        let sub = gen::random_subbasis(&mut gen::rng(seed ^ 1), &sys);
        let other = sys.with_basis(sub).unwrap();
        for d in basis_shift_check(&sys, &other, &Budget::unlimited()).unwrap() {
            prop_assert!(d <= 1);
        }
    }

    #[test]
    fn scott_table_matches_the_game(m in arb_graph(3), n in arb_graph(3)) {
        let table = ScottTable::new(vec![m.clone(), n.clone()]).unwrap();
        let mut game = NaiveScott::new(&m, &n).unwrap();
        for e in table.entries_of(0) {
            for f in table.entries_of(1) {
                let (a, b) = (table.entry(e).1, table.entry(f).1);
                if a.len() != b.len() {
                    continue;
                }
                for alpha in 0..=table.stab() + 1 {
                    prop_assert_eq!(table.equiv(0, a, 1, b, Level::At(alpha)).unwrap(), game.equiv(a, b, alpha).unwrap());
                }
            }
        }
    }

    #[test]
    fn stable_scott_equivalence_is_isomorphism(m in arb_graph(4), n in arb_graph(4), perm_seed in any::<u64>()) {
        let table = ScottTable::new(vec![m.clone(), n.clone()]).unwrap();
        prop_assert_eq!(
            table.equiv(0, &[], 1, &[], Level::Stab).unwrap(),
            brute_isomorphic(&m, &n, &[], &[]).unwrap()
        );
        let perm = gen::random_perm(&mut gen::rng(perm_seed), m.size());
        let moved = m.permuted(&perm);
        let pair = ScottTable::new(vec![m.clone(), moved]).unwrap();
        for e in pair.entries_of(0) {
            let a = pair.entry(e).1;
            let image: Vec<usize> = a.iter().map(|&x| perm[x]).collect();
            prop_assert!(pair.equiv(0, a, 1, &image, Level::Stab).unwrap());
        }
    }
}
