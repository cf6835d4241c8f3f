//! Seeded generators for test ensembles. Every generator draws only from the
//! supplied RNG, so a seed fixes the whole ensemble.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::actions::{BasisSpec, FiniteDiscreteAction, PermGroup};
use crate::bits::BitSet;
use crate::hjorth::ActionSystem;
use crate::structures::{Domain, Signature, Structure};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A permutation of `0..n` moving at most four points.
fn local_perm(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    if n < 2 {
        return p;
    }
    let k = rng.gen_range(2..=n.min(4));
    let mut moved: Vec<usize> = (0..n).collect();
    moved.shuffle(rng);
    moved.truncate(k);
    let mut images = moved.clone();
    images.shuffle(rng);
    for (&from, &to) in moved.iter().zip(&images) {
        p[from] = to;
    }
    p
}

fn random_candidate(rng: &mut ChaCha8Rng, max_g: usize, max_x: usize) -> Option<PermGroup> {
    let n = rng.gen_range(1..=max_x.max(1));
    let gens: Vec<Vec<usize>> = (0..rng.gen_range(0..=3))
        .map(|_| if rng.gen_bool(0.5) { random_perm(rng, n) } else { local_perm(rng, n) })
        .collect();
    PermGroup::generated_within(n, &gens, max_g).expect("generators are permutations")
}

/// A group of order at most `max_g` acting on at most `max_x` points.
/// A target order is drawn uniformly first, so large groups are not
/// crowded out by trivial ones; unreachable targets fall back to any order
/// within the bound.
pub fn random_group(rng: &mut ChaCha8Rng, max_g: usize, max_x: usize) -> PermGroup {
    let target = rng.gen_range(1..=max_g.max(1));
    let mut fallback = None;
    for _ in 0..400 {
        let Some(group) = random_candidate(rng, max_g, max_x) else { continue };
        if group.order() == target {
            return group;
        }
        if fallback.is_none() {
            fallback = Some(group);
        }
    }
    fallback.unwrap_or_else(|| PermGroup::generated(1, &[]).expect("trivial group"))
}

pub fn random_discrete(rng: &mut ChaCha8Rng, max_g: usize, max_x: usize, basis: BasisSpec) -> FiniteDiscreteAction {
    FiniteDiscreteAction::new(random_group(rng, max_g, max_x), basis).expect("generated systems are valid")
}

/// `count` systems with the all-subsets basis.
pub fn ensemble(seed: u64, count: usize, max_g: usize, max_x: usize) -> Vec<FiniteDiscreteAction> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| random_discrete(&mut r, max_g, max_x, BasisSpec::AllSubsets))
        .collect()
}

/// Singletons and `G`, plus a random selection of further subsets.
pub fn random_subbasis(rng: &mut ChaCha8Rng, sys: &FiniteDiscreteAction) -> BasisSpec {
    let group = sys.perm_group();
    let order = group.order();
    let label_set = |s: &BitSet| s.iter().map(|g| group.label(g).to_string()).collect::<Vec<_>>();
    let mut sets: Vec<BitSet> = (0..order).map(|g| BitSet::from_indices(order, [g])).collect();
    if order > 1 {
        sets.push(BitSet::full(order));
    }
    for v in 0..sys.num_basis() {
        let s = sys.basis_set(v);
        if !sets.contains(s) && rng.gen_bool(0.3) {
            sets.push(s.clone());
        }
    }
    BasisSpec::Explicit(sets.iter().map(label_set).collect())
}

pub fn random_point_set(rng: &mut ChaCha8Rng, n: usize) -> BitSet {
    BitSet::from_indices(n, (0..n).filter(|_| rng.gen_bool(0.5)))
}

/// A structure on `0..n` with each possible fact present with probability `p`.
pub fn random_structure(rng: &mut ChaCha8Rng, signature: &Arc<Signature>, n: usize, p: f64) -> Structure {
    let facts = signature
        .relations()
        .iter()
        .map(|r| {
            let mut out = Vec::new();
            let total = n.pow(r.arity as u32);
            for idx in 0..total {
                if rng.gen_bool(p) {
                    let mut t = vec![0; r.arity];
                    let mut rest = idx;
                    for slot in t.iter_mut().rev() {
                        *slot = rest % n;
                        rest /= n;
                    }
                    out.push(t);
                }
            }
            out
        })
        .collect();
    Structure::new("R", signature.clone(), Domain::Finite(n), facts).expect("facts lie in the universe")
}

/// A uniformly random permutation of `0..n`.
pub fn random_perm(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}
