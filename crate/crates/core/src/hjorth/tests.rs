use super::*;
use crate::actions::{BasisSpec, FiniteDiscreteAction, PermGroup};

fn sys1(basis: BasisSpec) -> FiniteDiscreteAction {
    let group = PermGroup::new(3, vec![("e".into(), vec![0, 1, 2]), ("s".into(), vec![1, 0, 2])]).unwrap();
    FiniteDiscreteAction::new(group, basis).unwrap()
}

fn basis_of(sys: &FiniteDiscreteAction, labels: &[&str]) -> usize {
    let g = sys.perm_group();
    let set = BitSet::from_indices(g.order(), labels.iter().map(|l| g.find_label(l).unwrap()));
    GroupAction::basis_of(sys, &set).unwrap()
}

#[test]
fn sys1_base_relation_and_stab() {
    let sys = sys1(BasisSpec::AllSubsets);
    assert_eq!(sys.num_basis(), 3);
    let t = leq_table(&sys, None).unwrap();
    let (s, e, g) = (basis_of(&sys, &["s"]), basis_of(&sys, &["e"]), basis_of(&sys, &["e", "s"]));
    assert!(t.leq(0, s, 1, e, Level::At(1)).unwrap());
    assert!(t.leq(2, g, 2, e, Level::At(1)).unwrap());
    assert!(!t.leq(0, g, 1, e, Level::At(1)).unwrap());
    assert_eq!(t.stab(), Some(1));
    assert_eq!(t.leq(0, s, 1, e, Level::Stab).unwrap(), t.leq(0, s, 1, e, Level::At(1)).unwrap());
    assert_eq!(t.leq(0, s, 1, e, Level::At(7)).unwrap(), t.leq(0, s, 1, e, Level::Stab).unwrap());
    for x in 0..3 {
        for v in 0..3 {
            assert!(t.leq(x, v, x, v, Level::At(1)).unwrap());
        }
    }
}

#[test]
fn sys1_equivalences_and_ranks() {
    let sys = sys1(BasisSpec::AllSubsets);
    let t = leq_table(&sys, None).unwrap();
    for a in 1..4 {
        assert!(t.equiv(0, 1, Level::At(a)).unwrap());
        assert!(t.equiv(2, 2, Level::At(a)).unwrap());
    }
    assert!(!t.equiv(0, 2, Level::At(2)).unwrap());
    let ranks = hjorth_ranks(&sys, &t).unwrap();
    assert!(ranks.iter().all(|r| r.value == 1 && r.stabilized_at == 1));
    assert_eq!(rank_condition_profile(&sys, &t, 0).unwrap(), vec![1]);
    assert_eq!(partition_by_rank(&sys, &t).unwrap(), vec![(1, vec![0, 1, 2])]);
    assert_eq!(compare_ranks(&sys, &t, 0, 2).unwrap(), Ordering::Equal);
    let v = orbit_check_via_rank(&sys, &t, 0, 1).unwrap();
    assert_eq!(v, OrbitVerdict { via_rank: true, orbit: Some(true) });
    let v = orbit_check_via_rank(&sys, &t, 0, 2).unwrap();
    assert_eq!(v, OrbitVerdict { via_rank: false, orbit: Some(false) });
    let m = minimal_m(&sys, &t, 2).unwrap().unwrap();
    assert!(m <= 1);
}

#[test]
fn single_point_system() {
    let group = PermGroup::generated(1, &[]).unwrap();
    let sys = FiniteDiscreteAction::new(group, BasisSpec::SingletonsPlusG).unwrap();
    assert_eq!(sys.num_basis(), 1);
    let t = leq_table(&sys, None).unwrap();
    assert_eq!(hjorth_rank(&sys, &t, 0).unwrap().value, 1);
    assert_eq!(rank_condition_profile(&sys, &t, 0).unwrap(), vec![1]);
    assert_eq!(minimal_m(&sys, &t, 0).unwrap(), Some(0));
}

#[test]
fn basis_shift_examples() {
    let a = sys1(BasisSpec::AllSubsets);
    let b = sys1(BasisSpec::SingletonsPlusG);
    assert_eq!(basis_shift_check(&a, &a, &Budget::default()).unwrap(), vec![0; 3]);
    assert!(basis_shift_check(&a, &b, &Budget::default()).unwrap().iter().all(|&d| d <= 1));
}

#[test]
fn vaught_examples() {
    let sys = sys1(BasisSpec::AllSubsets);
    let t = leq_table(&sys, None).unwrap();
    let g = basis_of(&sys, &["e", "s"]);
    let zero = BitSet::from_indices(3, [0]);
    assert!(vaught_star(&sys, &zero, g).unwrap().is_empty());
    assert_eq!(vaught_delta(&sys, &zero, g).unwrap(), BitSet::from_indices(3, [0, 1]));
    assert_eq!(vaught_star(&sys, &BitSet::full(3), g).unwrap(), BitSet::full(3));

    let (e, s) = (basis_of(&sys, &["e"]), basis_of(&sys, &["s"]));
    assert_eq!(star_orbit_equivalence_check(&sys, &t, 1, e, 0, s).unwrap(), (true, true));
    assert_eq!(star_orbit_equivalence_check(&sys, &t, 0, g, 0, g).unwrap(), (true, true));
    assert_eq!(star_orbit_equivalence_check(&sys, &t, 2, e, 0, g).unwrap(), (false, false));

    let fs = fixed_point_set(&sys, &t, s).unwrap();
    assert_eq!(fs.direct, BitSet::from_indices(3, [2]));
    assert_eq!(fs.characterized, Some(fs.direct.clone()));
    let fe = fixed_point_set(&sys, &t, e).unwrap();
    assert_eq!(fe.direct, BitSet::full(3));
    assert_eq!(fe.characterized, Some(BitSet::full(3)));
}

#[test]
fn level_requests() {
    let sys = sys1(BasisSpec::AllSubsets);
    let t = leq_table(&sys, None).unwrap();
    assert!(matches!(t.leq(0, 0, 0, 0, Level::At(0)), Err(Error::LevelUnavailable { .. })));
    assert!(matches!(t.leq(3, 0, 0, 0, Level::At(1)), Err(Error::UnknownPoint(3))));
    assert!(matches!(t.leq(0, 9, 0, 0, Level::At(1)), Err(Error::UnknownBasis(9))));
}

struct Broken;

impl ActionSystem for Broken {
    fn num_points(&self) -> usize {
        2
    }
    fn num_basis(&self) -> usize {
        1
    }
    fn contains(&self, w: usize, v: usize) -> bool {
        w == v
    }
    fn cc(&self, x0: usize, _: usize, x1: usize, _: usize) -> bool {
        x0 <= x1
    }
}

struct NotReflexive;

impl ActionSystem for NotReflexive {
    fn num_points(&self) -> usize {
        1
    }
    fn num_basis(&self) -> usize {
        1
    }
    fn contains(&self, _: usize, _: usize) -> bool {
        true
    }
    fn cc(&self, _: usize, _: usize, _: usize, _: usize) -> bool {
        false
    }
}

struct Adjacent;

impl ActionSystem for Adjacent {
    fn num_points(&self) -> usize {
        3
    }
    fn num_basis(&self) -> usize {
        1
    }
    fn contains(&self, _: usize, _: usize) -> bool {
        true
    }
    fn cc(&self, x0: usize, _: usize, x1: usize, _: usize) -> bool {
        x0.abs_diff(x1) <= 1
    }
}

#[test]
fn invalid_base_relations_are_rejected() {
    assert!(matches!(leq_table(&NotReflexive, None), Err(Error::InvalidBaseRelation(_))));
    match leq_table(&Adjacent, None) {
        Err(Error::InvalidBaseRelation(msg)) => assert!(msg.contains("not transitive"), "{msg}"),
        other => panic!("expected a transitivity failure, got {other:?}"),
    }
    match leq_table(&Broken, None) {
        Err(Error::InvalidBaseRelation(msg)) => assert!(msg.contains("level 2 is not contained in level 1"), "{msg}"),
        other => panic!("expected a monotonicity failure, got {other:?}"),
    }
}

fn cyclic_with_sparse_basis() -> FiniteDiscreteAction {
    let group = PermGroup::generated(3, &[vec![2, 0, 1]]).unwrap();
    let basis = "sets: {e} {g1} {e,g1,g2}".parse().unwrap();
    FiniteDiscreteAction::new(group, basis).unwrap()
}

#[test]
fn sparse_basis_needs_two_levels() {
    let sys = cyclic_with_sparse_basis();
    let t = leq_table(&sys, None).unwrap();
    assert_eq!(t.stab(), Some(2));
    let mut naive = crate::oracle::NaiveLeq::new(&sys, 4);
    for alpha in 1..=4 {
        for x0 in 0..3 {
            for v0 in 0..3 {
                for x1 in 0..3 {
                    for v1 in 0..3 {
                        assert_eq!(
                            t.leq(x0, v0, x1, v1, Level::At(alpha)).unwrap(),
                            naive.leq(x0, v0, x1, v1, alpha).unwrap()
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn capped_tables_refuse_higher_levels() {
    let sys = cyclic_with_sparse_basis();
    let t = leq_table(&sys, Some(1)).unwrap();
    assert_eq!(t.stab(), None);
    assert!(t.leq(0, 0, 0, 0, Level::At(1)).unwrap());
    assert!(matches!(t.leq(0, 0, 0, 0, Level::Stab), Err(Error::LevelUnavailable { .. })));
    assert!(matches!(t.leq(0, 0, 0, 0, Level::At(2)), Err(Error::LevelUnavailable { .. })));
    assert!(hjorth_ranks(&sys, &t).is_err());
}
