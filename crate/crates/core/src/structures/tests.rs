use super::*;
use proptest::prelude::*;

fn edge_sig() -> Arc<Signature> {
    Arc::new(Signature::new([("edge", 2)]).unwrap())
}

fn graph(n: usize, edges: &[(usize, usize)]) -> Structure {
    let facts = vec![edges.iter().map(|&(a, b)| vec![a, b]).collect()];
    Structure::new("G", edge_sig(), Domain::Finite(n), facts).unwrap()
}

fn supported(s: usize, edges: &[(usize, usize)]) -> Structure {
    let facts = vec![edges.iter().map(|&(a, b)| vec![a, b]).collect()];
    Structure::new("S", edge_sig(), Domain::Supported(s), facts).unwrap()
}

// Elements a witness tuple may use: the universe, or the window plus enough
// off-window elements to realize any pattern of length `len`.
fn pool(m: &Structure, tuple: &[usize], len: usize) -> Vec<usize> {
    match m.domain() {
        Domain::Finite(n) => (0..n).collect(),
        Domain::Supported(s) => {
            let top = tuple.iter().map(|e| e + 1).max().unwrap_or(0).max(s);
            (0..top + len).collect()
        }
    }
}

/// Existential containment by enumerating every complete type of witness
/// tuples up to length `cap`.
fn thsigma_by_types(lhs: &Structure, a: &[usize], rhs: &Structure, b: &[usize], cap: usize) -> bool {
    for len in 0..=cap {
        let lpool = pool(lhs, a, len);
        let rpool = pool(rhs, b, len);
        for ys in (0..len).map(|_| lpool.iter().copied()).multi_cartesian_product() {
            let left = qf_type_unchecked(lhs, &[a, &ys].concat());
            let realized = (0..len)
                .map(|_| rpool.iter().copied())
                .multi_cartesian_product()
                .any(|zs| qf_type_unchecked(rhs, &[b, &zs].concat()) == left);
            if !realized {
                return false;
            }
        }
    }
    true
}

#[test]
fn parse_empty_signature() {
    let f = parse_structures("structure E size 3\nend\n").unwrap();
    let e = &f.structures[0];
    assert_eq!((e.size(), e.fact_count()), (3, 0));
    assert!(f.signature.relations().is_empty());
}

#[test]
fn parse_two_path() {
    let text = "signature\n  rel edge 2\nend\nstructure P size 3\n  edge 0 1\n  edge 1 2 # tail\nend\n";
    let f = parse_structures(text).unwrap();
    assert_eq!(f.structures[0], graph(3, &[(0, 1), (1, 2)]));
    assert_eq!(serialize_structures(&f.signature, &f.structures), text.replace(" # tail", ""));
}

#[test]
fn parse_errors() {
    let range = parse_structures("signature\nrel edge 2\nend\nstructure P size 3\nedge 0 5\nend\n");
    assert!(matches!(range, Err(Error::Range { line: 5, element: 5, size: 3 })));
    let arity = parse_structures("signature\nrel edge 2\nend\nstructure P size 3\nedge 0\nend\n");
    assert!(matches!(arity, Err(Error::Schema { line: 5, .. })));
    let unknown = parse_structures("structure P size 3\nfoo 0\nend\n");
    assert!(matches!(unknown, Err(Error::Schema { line: 2, .. })));
    let garbage = parse_structures("structure P\n");
    assert!(matches!(garbage, Err(Error::Parse { line: 1, .. })));
    let open = parse_structures("structure P size 2\n");
    assert!(matches!(open, Err(Error::Parse { .. })));
}

#[test]
fn atomic_evaluation() {
    let p = graph(3, &[(0, 1), (1, 2)]);
    let edge = Atom::Rel("edge".into());
    assert!(eval_atomic(&p, &edge, &[0, 1]).unwrap());
    assert!(!eval_atomic(&p, &edge, &[1, 0]).unwrap());
    assert!(eval_atomic(&p, &Atom::Eq, &[2, 2]).unwrap());
    let s = supported(2, &[(0, 1)]);
    assert!(!eval_atomic(&s, &edge, &[0, 7]).unwrap());
    assert!(!eval_atomic(&s, &Atom::Eq, &[7, 8]).unwrap());
    assert!(matches!(
        eval_atomic(&p, &Atom::Rel("nope".into()), &[0, 1]),
        Err(Error::UnknownRelation(_))
    ));
    assert!(matches!(eval_atomic(&p, &edge, &[0]), Err(Error::Arity { .. })));
    assert!(matches!(eval_atomic(&p, &edge, &[0, 3]), Err(Error::OutOfUniverse { .. })));
}

#[test]
fn qf_types_of_l2() {
    let l2 = Structure::linear_order(2);
    let t = qf_type(&l2, &[0, 1]).unwrap();
    let sig = l2.signature();
    assert!(t.relation(sig, 0, &[0, 1]));
    assert!(!t.relation(sig, 0, &[1, 0]));
    assert!(!t.equal(0, 1));
    assert_ne!(t, qf_type(&l2, &[1, 0]).unwrap());
    assert!(qf_type(&l2, &[]).unwrap().is_empty());
    assert_eq!(qf_type(&l2, &[]).unwrap(), qf_type(&Structure::linear_order(5), &[]).unwrap());
    assert!(qf_type(&l2, &[1, 1]).unwrap().equal(1, 0));
}

#[test]
fn thsigma_examples() {
    let (l2, l3) = (Structure::linear_order(2), Structure::linear_order(3));
    assert!(thsigma_contains(&l2, &[], &l3, &[]).unwrap());
    assert!(!thsigma_contains(&l3, &[], &l2, &[]).unwrap());
    assert!(thsigma_contains(&l2, &[0], &l3, &[1]).unwrap());
    assert!(thsigma_contains(&l2, &[1], &l3, &[2]).unwrap());
    assert!(!thsigma_contains(&l3, &[1], &l3, &[0]).unwrap());
    assert!(matches!(
        thsigma_contains(&l2, &[0], &l3, &[]),
        Err(Error::LengthMismatch(1, 0))
    ));
}

#[test]
fn thsigma_supported_examples() {
    let edge = supported(2, &[(0, 1)]);
    let path = supported(3, &[(0, 1), (1, 2)]);
    assert!(thsigma_contains(&edge, &[], &path, &[]).unwrap());
    assert!(!thsigma_contains(&path, &[], &edge, &[]).unwrap());
    // off-window parameters are isolated points
    assert!(thsigma_contains(&edge, &[9], &path, &[5]).unwrap());
    assert!(!thsigma_contains(&edge, &[9], &path, &[1]).unwrap());
    assert!(!thsigma_contains(&edge, &[0], &path, &[2]).unwrap());
    assert!(thsigma_contains(&edge, &[0], &path, &[1]).unwrap());
}

#[test]
fn brute_isomorphism_examples() {
    let (l2, l3) = (Structure::linear_order(2), Structure::linear_order(3));
    assert!(brute_isomorphic(&l2, &l2, &[], &[]).unwrap());
    assert!(!brute_isomorphic(&l2, &l2, &[0], &[1]).unwrap());
    assert!(!brute_isomorphic(&l2, &l3, &[], &[]).unwrap());
    assert!(brute_isomorphic(&graph(3, &[(0, 1)]), &graph(3, &[(2, 0)]), &[1], &[0]).unwrap());
    assert!(brute_isomorphic(&l2, &l2, &[0], &[]).is_err());
}

fn arb_graph(max: usize) -> impl Strategy<Value = Structure> {
    (1..=max).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
            let edges: Vec<_> = (0..n * n)
                .filter(|&i| bits[i])
                .map(|i| (i / n, i % n))
                .collect();
            graph(n, &edges)
        })
    })
}

fn arb_supported(max: usize) -> impl Strategy<Value = Structure> {
    (0..=max).prop_flat_map(|s| {
        proptest::collection::vec(any::<bool>(), s * s).prop_map(move |bits| {
            let edges: Vec<_> = (0..s * s)
                .filter(|&i| bits[i])
                .map(|i| (i / s, i % s))
                .collect();
            supported(s, &edges)
        })
    })
}

fn perm_of(n: usize, seed: u64) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut state = seed;
    for i in (1..n).rev() {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        p.swap(i, (state >> 33) as usize % (i + 1));
    }
    p
}

proptest! {
    #[test]
    fn qf_type_is_permutation_equivariant(m in arb_graph(4), seed in any::<u64>(), picks in proptest::collection::vec(0usize..4, 0..4)) {
        let n = m.size();
        let perm = perm_of(n, seed);
        let tuple: Vec<usize> = picks.iter().map(|p| p % n).collect();
        let moved: Vec<usize> = tuple.iter().map(|&e| perm[e]).collect();
        prop_assert_eq!(qf_type(&m, &tuple).unwrap(), qf_type(&m.permuted(&perm), &moved).unwrap());
    }

    #[test]
    fn serialization_round_trips(ms in proptest::collection::vec(arb_graph(4), 1..4)) {
        let ms: Vec<Structure> = ms.into_iter().enumerate().map(|(i, m)| m.with_id(format!("M{i}"))).collect();
        let text = serialize_structures(&edge_sig(), &ms);
        let back = parse_structures(&text).unwrap();
        prop_assert_eq!(&back.structures, &ms);
        prop_assert_eq!(serialize_structures(&back.signature, &back.structures), text);
    }

    #[test]
    fn thsigma_reflexive_and_transitive(a in arb_graph(3), b in arb_graph(3), c in arb_graph(3)) {
        prop_assert!(thsigma_contains(&a, &[], &a, &[]).unwrap());
        let ab = thsigma_contains(&a, &[], &b, &[]).unwrap();
        let bc = thsigma_contains(&b, &[], &c, &[]).unwrap();
        if ab && bc {
            prop_assert!(thsigma_contains(&a, &[], &c, &[]).unwrap());
        }
    }

    #[test]
    fn isomorphism_implies_mutual_containment(m in arb_graph(4), seed in any::<u64>(), x in 0usize..4) {
        let perm = perm_of(m.size(), seed);
        let n = m.permuted(&perm);
        let x = x % m.size();
        prop_assert!(brute_isomorphic(&m, &n, &[x], &[perm[x]]).unwrap());
        prop_assert!(thsigma_contains(&m, &[x], &n, &[perm[x]]).unwrap());
        prop_assert!(thsigma_contains(&n, &[perm[x]], &m, &[x]).unwrap());
    }

    #[test]
    fn thsigma_matches_type_enumeration_finite(a in arb_graph(3), b in arb_graph(3), x in 0usize..3, y in 0usize..3) {
        let (x, y) = (x % a.size(), y % b.size());
        let cap = a.size();
        prop_assert_eq!(
            thsigma_contains(&a, &[x], &b, &[y]).unwrap(),
            thsigma_by_types(&a, &[x], &b, &[y], cap)
        );
    }

    #[test]
    fn thsigma_matches_type_enumeration_supported(a in arb_supported(2), b in arb_supported(2), x in 0usize..4, y in 0usize..4, with_param in any::<bool>()) {
        let (ta, tb): (Vec<usize>, Vec<usize>) = if with_param { (vec![x], vec![y]) } else { (vec![], vec![]) };
        // the single-search method against enumeration with one witness beyond the window
        let cap = a.size() + 1;
        prop_assert_eq!(
            thsigma_contains(&a, &ta, &b, &tb).unwrap(),
            thsigma_by_types(&a, &ta, &b, &tb, cap)
        );
    }
}

#[test]
fn thsigma_matches_type_enumeration_on_all_small_pairs() {
    let all: Vec<Structure> = (0..16u32)
        .map(|bits| {
            let edges: Vec<_> = (0..4).filter(|i| bits >> i & 1 == 1).map(|i| (i / 2, i % 2)).collect();
            graph(2, &edges)
        })
        .collect();
    for a in &all {
        for b in &all {
            for (x, y) in [(0, 0), (0, 1), (1, 0)] {
                assert_eq!(
                    thsigma_contains(a, &[x], b, &[y]).unwrap(),
                    thsigma_by_types(a, &[x], b, &[y], 2),
                );
            }
        }
    }
}
