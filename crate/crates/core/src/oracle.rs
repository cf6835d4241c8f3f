//! Deliberately naive reference implementations.
//!
//! Nothing here reuses the table machinery of [`crate::hjorth`] or the
//! refinement in [`crate::scott`]; only the system and structure interfaces
//! are shared.

use std::collections::HashMap;

use itertools::Itertools;

use crate::bits::BitSet;
use crate::hjorth::{ActionSystem, GroupAction};
use crate::structures::Structure;
use crate::{Error, Result};

/// Literal memoized recursion of `≤_α`:
/// `α = 1` is `cc`; `α + 1` asks that every `W₀ ⊆ V₀` be answered by some
/// `W₁ ⊆ V₁` with `(x₁, W₁) ≤_α (x₀, W₀)`.
pub struct NaiveLeq<'a, S: ActionSystem + ?Sized> {
    sys: &'a S,
    nx: usize,
    nb: usize,
    below: Vec<Vec<usize>>,
    max_depth: usize,
    dense: Vec<Vec<u8>>,
    sparse: HashMap<(usize, usize), bool>,
}

const DENSE_MEMO_LIMIT: usize = 1 << 24;

impl<'a, S: ActionSystem + ?Sized> NaiveLeq<'a, S> {
    pub fn new(sys: &'a S, max_depth: usize) -> Self {
        let nb = sys.num_basis();
        let below = (0..nb)
            .map(|v| (0..nb).filter(|&w| sys.contains(w, v)).collect())
            .collect();
        NaiveLeq {
            sys,
            nx: sys.num_points(),
            nb,
            below,
            max_depth,
            dense: Vec::new(),
            sparse: HashMap::new(),
        }
    }

    pub fn leq(&mut self, x0: usize, v0: usize, x1: usize, v1: usize, alpha: usize) -> Result<bool> {
        if alpha == 0 {
            return Err(Error::LevelUnavailable {
                requested: "0".into(),
                reason: "levels start at 1".into(),
            });
        }
        if alpha > self.max_depth {
            return Err(Error::DepthExceeded {
                depth: alpha,
                cap: self.max_depth,
            });
        }
        if x0.max(x1) >= self.nx {
            return Err(Error::UnknownPoint(x0.max(x1)));
        }
        if v0.max(v1) >= self.nb {
            return Err(Error::UnknownBasis(v0.max(v1)));
        }
        Ok(self.eval(x0, v0, x1, v1, alpha))
    }

    fn key(&self, x0: usize, v0: usize, x1: usize, v1: usize) -> usize {
        ((x0 * self.nb + v0) * self.nx + x1) * self.nb + v1
    }

    fn lookup(&self, key: usize, alpha: usize) -> Option<bool> {
        let quads = self.nx * self.nx * self.nb * self.nb;
        if quads <= DENSE_MEMO_LIMIT {
            match self.dense.get(alpha).map(|m| m[key]) {
                Some(1) => Some(false),
                Some(2) => Some(true),
                _ => None,
            }
        } else {
            self.sparse.get(&(key, alpha)).copied()
        }
    }

    fn store(&mut self, key: usize, alpha: usize, value: bool) {
        let quads = self.nx * self.nx * self.nb * self.nb;
        if quads <= DENSE_MEMO_LIMIT {
            while self.dense.len() <= alpha {
                self.dense.push(vec![0; quads]);
            }
            self.dense[alpha][key] = if value { 2 } else { 1 };
        } else {
            self.sparse.insert((key, alpha), value);
        }
    }

    fn eval(&mut self, x0: usize, v0: usize, x1: usize, v1: usize, alpha: usize) -> bool {
        if alpha == 1 {
            return self.sys.cc(x0, v0, x1, v1);
        }
        let key = self.key(x0, v0, x1, v1);
        if let Some(v) = self.lookup(key, alpha) {
            return v;
        }
        let mut value = true;
        for i in 0..self.below[v0].len() {
            let w0 = self.below[v0][i];
            let mut answered = false;
            for j in 0..self.below[v1].len() {
                let w1 = self.below[v1][j];
                if self.eval(x1, w1, x0, w0, alpha - 1) {
                    answered = true;
                    break;
                }
            }
            if !answered {
                value = false;
                break;
            }
        }
        self.store(key, alpha, value);
        value
    }
}

pub fn naive_leq<S: ActionSystem + ?Sized>(
    sys: &S,
    x0: usize,
    v0: usize,
    x1: usize,
    v1: usize,
    alpha: usize,
    max_depth: usize,
) -> Result<bool> {
    NaiveLeq::new(sys, max_depth).leq(x0, v0, x1, v1, alpha)
}

/// Literal back-and-forth game recursion on finite structures.
pub struct NaiveScott<'a> {
    m: &'a Structure,
    n: &'a Structure,
    memo: HashMap<(Vec<usize>, Vec<usize>, usize), bool>,
}

fn same_atoms(m: &Structure, a: &[usize], n: &Structure, b: &[usize]) -> bool {
    for i in 0..a.len() {
        for j in 0..a.len() {
            if (a[i] == a[j]) != (b[i] == b[j]) {
                return false;
            }
        }
    }
    for (r, rel) in m.signature().relations().iter().enumerate() {
        for idx in (0..rel.arity).map(|_| 0..a.len()).multi_cartesian_product() {
            let ta: Vec<usize> = idx.iter().map(|&i| a[i]).collect();
            let tb: Vec<usize> = idx.iter().map(|&i| b[i]).collect();
            if m.facts(r).any(|t| *t == ta) != n.facts(r).any(|t| *t == tb) {
                return false;
            }
        }
    }
    true
}

impl<'a> NaiveScott<'a> {
    pub fn new(m: &'a Structure, n: &'a Structure) -> Result<Self> {
        if !m.is_finite() || !n.is_finite() {
            return Err(Error::Unsupported("the game oracle needs finite structures".into()));
        }
        if m.signature() != n.signature() {
            return Err(Error::SignatureMismatch);
        }
        Ok(NaiveScott {
            m,
            n,
            memo: HashMap::new(),
        })
    }

    pub fn equiv(&mut self, a: &[usize], b: &[usize], alpha: usize) -> Result<bool> {
        if a.len() != b.len() {
            return Err(Error::LengthMismatch(a.len(), b.len()));
        }
        for (s, t) in [(self.m, a), (self.n, b)] {
            if let Some(&e) = t.iter().find(|&&e| e >= s.size()) {
                return Err(Error::OutOfUniverse {
                    element: e,
                    size: s.size(),
                });
            }
        }
        Ok(self.play(a.to_vec(), b.to_vec(), alpha))
    }

    fn play(&mut self, a: Vec<usize>, b: Vec<usize>, alpha: usize) -> bool {
        if alpha == 0 {
            return same_atoms(self.m, &a, self.n, &b);
        }
        let key = (a, b, alpha);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let (a, b, _) = key;
        let forth = (0..self.m.size()).all(|c| {
            (0..self.n.size()).any(|d| self.play([&a[..], &[c]].concat(), [&b[..], &[d]].concat(), alpha - 1))
        });
        let value = forth
            && (0..self.n.size()).all(|d| {
                (0..self.m.size()).any(|c| self.play([&a[..], &[c]].concat(), [&b[..], &[d]].concat(), alpha - 1))
            });
        self.memo.insert((a, b, alpha), value);
        value
    }
}

pub fn naive_scott(m: &Structure, a: &[usize], n: &Structure, b: &[usize], alpha: usize) -> Result<bool> {
    NaiveScott::new(m, n)?.equiv(a, b, alpha)
}

/// Orbits by closure under every group element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitPartition {
    pub orbit_of: Vec<usize>,
    pub orbits: Vec<Vec<usize>>,
}

pub fn orbit_partition_of(group: &dyn GroupAction, n: usize) -> OrbitPartition {
    let mut orbit_of = vec![usize::MAX; n];
    let mut orbits = Vec::new();
    for x in 0..n {
        if orbit_of[x] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let mut members = vec![x];
        orbit_of[x] = id;
        let mut i = 0;
        while i < members.len() {
            let y = members[i];
            for g in 0..group.order() {
                let z = group.act(g, y);
                if orbit_of[z] == usize::MAX {
                    orbit_of[z] = id;
                    members.push(z);
                }
            }
            i += 1;
        }
        members.sort_unstable();
        orbits.push(members);
    }
    OrbitPartition { orbit_of, orbits }
}

pub fn orbit_partition<S: ActionSystem + ?Sized>(sys: &S) -> Result<OrbitPartition> {
    let group = sys
        .group()
        .ok_or_else(|| Error::Unsupported("orbits need the group action".into()))?;
    Ok(orbit_partition_of(group, sys.num_points()))
}

/// Every union of orbits, as point sets; `2^orbits` of them.
pub fn invariant_sets<S: ActionSystem + ?Sized>(sys: &S, max_orbits: usize) -> Result<Vec<BitSet>> {
    let part = orbit_partition(sys)?;
    let k = part.orbits.len();
    if k > max_orbits {
        return Err(Error::budget("orbits for invariant-set enumeration", k as u128, max_orbits as u128));
    }
    let n = sys.num_points();
    Ok((0u32..1 << k)
        .map(|mask| {
            BitSet::from_indices(
                n,
                (0..k)
                    .filter(|i| mask >> i & 1 == 1)
                    .flat_map(|i| part.orbits[i].iter().copied()),
            )
        })
        .collect())
}
