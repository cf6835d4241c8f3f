//! Finite and finitely supported relational structures.
//!
//! A [`Structure`] either has the finite universe `0..n` or the universe of
//! all naturals with every relation false off the window `0..s`. Equality is
//! always an atomic formula, so repetition patterns inside tuples are part of
//! every quantifier-free type.

mod format;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use itertools::Itertools;

use crate::{Error, Result};

pub use format::{parse_structures, serialize_structures, StructureFile};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RelSymbol {
    pub name: String,
    pub arity: usize,
}

/// An ordered relational vocabulary. Equality is implicit.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Signature {
    relations: Vec<RelSymbol>,
}

impl Signature {
    pub fn new(relations: impl IntoIterator<Item = (impl Into<String>, usize)>) -> Result<Self> {
        let mut out = Vec::new();
        for (name, arity) in relations {
            let name = name.into();
            if arity == 0 {
                return Err(Error::Schema {
                    line: 0,
                    msg: format!("relation `{name}` must have positive arity"),
                });
            }
            if out.iter().any(|r: &RelSymbol| r.name == name) {
                return Err(Error::Schema {
                    line: 0,
                    msg: format!("relation `{name}` declared twice"),
                });
            }
            out.push(RelSymbol { name, arity });
        }
        Ok(Signature { relations: out })
    }

    /// The pure-equality signature.
    pub fn empty() -> Self {
        Signature::default()
    }

    pub fn relations(&self) -> &[RelSymbol] {
        &self.relations
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|r| r.name == name)
    }

    /// Parses `name:arity` pairs separated by commas, e.g. `edge:2,p:1`.
    pub fn parse_compact(spec: &str) -> Result<Self> {
        let mut rels = Vec::new();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, arity) = item
                .split_once(':')
                .ok_or_else(|| Error::Usage(format!("relation `{item}` is not name:arity")))?;
            let arity = arity
                .parse()
                .map_err(|_| Error::Usage(format!("bad arity in `{item}`")))?;
            rels.push((name.to_string(), arity));
        }
        Signature::new(rels)
    }
}

/// The universe of a structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    /// Universe `0..n`.
    Finite(usize),
    /// Universe ℕ; relations only hold on tuples inside `0..s`.
    Supported(usize),
}

impl Domain {
    /// Exclusive bound on elements that can occur in facts.
    pub fn bound(self) -> usize {
        match self {
            Domain::Finite(n) | Domain::Supported(n) => n,
        }
    }
}

/// An atomic formula head.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom {
    Rel(String),
    Eq,
}

const DENSE_LIMIT: usize = 1 << 16;

#[derive(Debug, Clone)]
struct Facts {
    tuples: BTreeSet<Vec<usize>>,
    // Row-major bitmap over bound^arity when small enough.
    dense: Option<Vec<u64>>,
}

#[derive(Debug, Clone)]
pub struct Structure {
    id: String,
    signature: Arc<Signature>,
    domain: Domain,
    facts: Vec<Facts>,
}

impl PartialEq for Structure {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain
            && self.signature == other.signature
            && self
                .facts
                .iter()
                .zip(&other.facts)
                .all(|(a, b)| a.tuples == b.tuples)
    }
}

impl Eq for Structure {}

impl std::hash::Hash for Structure {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.domain.hash(state);
        for f in &self.facts {
            f.tuples.hash(state);
        }
    }
}

fn dense_index(args: &[usize], bound: usize) -> usize {
    args.iter().fold(0, |acc, &a| acc * bound + a)
}

impl Structure {
    /// Builds a structure from facts given per relation in signature order.
    pub fn new(
        id: impl Into<String>,
        signature: Arc<Signature>,
        domain: Domain,
        facts: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        if facts.len() != signature.relations.len() {
            return Err(Error::Schema {
                line: 0,
                msg: format!(
                    "expected facts for {} relations, got {}",
                    signature.relations.len(),
                    facts.len()
                ),
            });
        }
        let bound = domain.bound();
        let mut out = Vec::with_capacity(facts.len());
        for (rel, tuples) in signature.relations.iter().zip(facts) {
            let mut set = BTreeSet::new();
            for t in tuples {
                if t.len() != rel.arity {
                    return Err(Error::Arity {
                        name: rel.name.clone(),
                        expected: rel.arity,
                        got: t.len(),
                    });
                }
                if let Some(&e) = t.iter().find(|&&e| e >= bound) {
                    return Err(Error::OutOfUniverse {
                        element: e,
                        size: bound,
                    });
                }
                set.insert(t);
            }
            out.push(Facts {
                dense: build_dense(&set, bound, rel.arity),
                tuples: set,
            });
        }
        Ok(Structure {
            id: id.into(),
            signature,
            domain,
            facts: out,
        })
    }

    /// A finite structure without facts.
    pub fn empty(id: impl Into<String>, signature: Arc<Signature>, n: usize) -> Self {
        let k = signature.relations.len();
        Structure::new(id, signature, Domain::Finite(n), vec![Vec::new(); k])
            .expect("empty structure is well-formed")
    }

    /// The strict linear order `0 < 1 < … < n−1` over a single relation `lt`.
    pub fn linear_order(n: usize) -> Self {
        let sig = Arc::new(Signature::new([("lt", 2)]).expect("valid signature"));
        let facts = (0..n)
            .tuple_combinations()
            .map(|(a, b)| vec![a, b])
            .collect();
        Structure::new(format!("L{n}"), sig, Domain::Finite(n), vec![facts])
            .expect("linear order is well-formed")
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.signature
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.domain, Domain::Finite(_))
    }

    /// Universe size of a finite structure, support of a supported one.
    pub fn size(&self) -> usize {
        self.domain.bound()
    }

    /// Facts of relation `rel`, sorted lexicographically.
    pub fn facts(&self, rel: usize) -> impl Iterator<Item = &Vec<usize>> {
        self.facts[rel].tuples.iter()
    }

    pub fn fact_count(&self) -> usize {
        self.facts.iter().map(|f| f.tuples.len()).sum()
    }

    /// Raw truth of relation `rel` at `args`. Entries beyond the bound are false.
    #[inline]
    pub fn holds(&self, rel: usize, args: &[usize]) -> bool {
        let bound = self.domain.bound();
        if args.iter().any(|&a| a >= bound) {
            return false;
        }
        let f = &self.facts[rel];
        match &f.dense {
            Some(bits) => crate::bits::get(bits, dense_index(args, bound)),
            None => f.tuples.contains(args),
        }
    }

    fn check_elements(&self, args: &[usize]) -> Result<()> {
        if let Domain::Finite(n) = self.domain {
            if let Some(&e) = args.iter().find(|&&e| e >= n) {
                return Err(Error::OutOfUniverse {
                    element: e,
                    size: n,
                });
            }
        }
        Ok(())
    }

    /// Applies the element relabelling `perm`: the image has `R(perm(t))`
    /// exactly when this structure has `R(t)`.
    pub fn permuted(&self, perm: &[usize]) -> Structure {
        let facts = self
            .facts
            .iter()
            .map(|f| {
                f.tuples
                    .iter()
                    .map(|t| t.iter().map(|&e| perm[e]).collect())
                    .collect()
            })
            .collect();
        Structure::new(self.id.clone(), self.signature.clone(), self.domain, facts)
            .expect("relabelling preserves well-formedness")
    }

    /// Dense fact bitmap, concatenated over relations; a canonical key for
    /// structures over a fixed small universe.
    pub fn fact_key(&self) -> Vec<u64> {
        let bound = self.domain.bound();
        let mut key = Vec::new();
        for (f, rel) in self.facts.iter().zip(&self.signature.relations) {
            let cells = bound.pow(rel.arity as u32);
            let mut bits = vec![0u64; crate::bits::words_for(cells)];
            for t in &f.tuples {
                crate::bits::set(&mut bits, dense_index(t, bound));
            }
            key.extend(bits);
        }
        key
    }
}

fn build_dense(tuples: &BTreeSet<Vec<usize>>, bound: usize, arity: usize) -> Option<Vec<u64>> {
    let cells = bound.checked_pow(arity as u32)?;
    if cells > DENSE_LIMIT {
        return None;
    }
    let mut bits = vec![0u64; crate::bits::words_for(cells)];
    for t in tuples {
        crate::bits::set(&mut bits, dense_index(t, bound));
    }
    Some(bits)
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id)
    }
}

/// Truth of an atomic formula. On a supported structure any natural is a
/// valid argument; relation atoms with an argument off the window are false.
pub fn eval_atomic(m: &Structure, atom: &Atom, args: &[usize]) -> Result<bool> {
    m.check_elements(args)?;
    match atom {
        Atom::Eq => {
            if args.len() != 2 {
                return Err(Error::Arity {
                    name: "=".into(),
                    expected: 2,
                    got: args.len(),
                });
            }
            Ok(args[0] == args[1])
        }
        Atom::Rel(name) => {
            let rel = m
                .signature
                .index_of(name)
                .ok_or_else(|| Error::UnknownRelation(name.clone()))?;
            let arity = m.signature.relations[rel].arity;
            if arity != args.len() {
                return Err(Error::Arity {
                    name: name.clone(),
                    expected: arity,
                    got: args.len(),
                });
            }
            Ok(m.holds(rel, args))
        }
    }
}

/// The complete atomic truth table of a tuple.
///
/// Bits are laid out as: equalities `c_i = c_j` for `i < j` in lexicographic
/// order, then for each relation in signature order every index tuple over
/// `0..len` in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QfType {
    len: usize,
    bits: Vec<u64>,
}

impl QfType {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Whether `c_i = c_j` is recorded true.
    pub fn equal(&self, i: usize, j: usize) -> bool {
        if i == j {
            return true;
        }
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        // position of (i, j) among pairs i < j in lexicographic order
        let pos = i * self.len - i * (i + 1) / 2 + (j - i - 1);
        crate::bits::get(&self.bits, pos)
    }

    /// Truth of relation `rel` on the positions `idx`, given the signature
    /// the type was computed over.
    pub fn relation(&self, sig: &Signature, rel: usize, idx: &[usize]) -> bool {
        let mut offset = self.len * self.len.saturating_sub(1) / 2;
        for r in &sig.relations[..rel] {
            offset += self.len.pow(r.arity as u32);
        }
        crate::bits::get(&self.bits, offset + dense_index(idx, self.len))
    }
}

/// Quantifier-free type of `tuple` in `m`.
pub fn qf_type(m: &Structure, tuple: &[usize]) -> Result<QfType> {
    m.check_elements(tuple)?;
    Ok(qf_type_unchecked(m, tuple))
}

pub(crate) fn qf_type_unchecked(m: &Structure, tuple: &[usize]) -> QfType {
    let len = tuple.len();
    let pairs = len * len.saturating_sub(1) / 2;
    let rel_cells: usize = m
        .signature
        .relations
        .iter()
        .map(|r| len.pow(r.arity as u32))
        .sum();
    let mut bits = vec![0u64; crate::bits::words_for(pairs + rel_cells)];
    let mut pos = 0;
    for i in 0..len {
        for j in i + 1..len {
            if tuple[i] == tuple[j] {
                crate::bits::set(&mut bits, pos);
            }
            pos += 1;
        }
    }
    let mut args = Vec::new();
    for (r, rel) in m.signature.relations.iter().enumerate() {
        for idx in (0..rel.arity).map(|_| 0..len).multi_cartesian_product() {
            args.clear();
            args.extend(idx.iter().map(|&i| tuple[i]));
            if m.holds(r, &args) {
                crate::bits::set(&mut bits, pos);
            }
            pos += 1;
        }
    }
    QfType { len, bits }
}

fn same_signature(m: &Structure, n: &Structure) -> Result<()> {
    if m.signature != n.signature {
        return Err(Error::SignatureMismatch);
    }
    Ok(())
}

/// Elements available as existential witnesses in `m` that are not already
/// named by `tuple`: the whole finite universe, or the support window.
fn witness_pool(m: &Structure, tuple: &[usize]) -> Vec<usize> {
    (0..m.domain.bound())
        .filter(|e| !tuple.contains(e))
        .collect()
}

/// Whether every existential sentence with parameters `lhs_tuple` true in
/// `lhs` is true with parameters `rhs_tuple` in `rhs`.
///
/// Decided by a single embedding search. Let `ȳ` list every element of
/// `lhs` (its support window, if supported) not occurring in `lhs_tuple`.
/// The containment holds iff the complete quantifier-free type of
/// `lhs_tuple ++ ȳ` is realized in `rhs` over `rhs_tuple`: every existential
/// witness in `lhs` is either inside `ȳ` or an off-support element, and
/// off-support elements can always be matched by fresh off-support elements
/// of a supported `rhs`.
pub fn thsigma_contains(
    lhs: &Structure,
    lhs_tuple: &[usize],
    rhs: &Structure,
    rhs_tuple: &[usize],
) -> Result<bool> {
    if lhs_tuple.len() != rhs_tuple.len() {
        return Err(Error::LengthMismatch(lhs_tuple.len(), rhs_tuple.len()));
    }
    same_signature(lhs, rhs)?;
    lhs.check_elements(lhs_tuple)?;
    rhs.check_elements(rhs_tuple)?;
    if qf_type_unchecked(lhs, lhs_tuple) != qf_type_unchecked(rhs, rhs_tuple) {
        return Ok(false);
    }
    let witnesses = witness_pool(lhs, lhs_tuple);
    let mut candidates = witness_pool(rhs, rhs_tuple);
    if let Domain::Supported(s) = rhs.domain {
        let start = rhs_tuple.iter().map(|&e| e + 1).max().unwrap_or(0).max(s);
        candidates.extend(start..start + witnesses.len());
    }
    let fresh_floor = match rhs.domain {
        Domain::Supported(_) => candidates.len() - witnesses.len(),
        Domain::Finite(_) => candidates.len(),
    };
    let mut search = EmbeddingSearch {
        lhs,
        rhs,
        witnesses: &witnesses,
        candidates: &candidates,
        fresh_floor,
        used: vec![false; candidates.len()],
        src: lhs_tuple.to_vec(),
        dst: rhs_tuple.to_vec(),
    };
    Ok(search.extend(0))
}

struct EmbeddingSearch<'a> {
    lhs: &'a Structure,
    rhs: &'a Structure,
    witnesses: &'a [usize],
    candidates: &'a [usize],
    // candidates at or past this index are fresh off-support elements
    fresh_floor: usize,
    used: Vec<bool>,
    src: Vec<usize>,
    dst: Vec<usize>,
}

impl EmbeddingSearch<'_> {
    fn extend(&mut self, next: usize) -> bool {
        if next == self.witnesses.len() {
            return true;
        }
        self.src.push(self.witnesses[next]);
        let mut tried_fresh = false;
        for c in 0..self.candidates.len() {
            if self.used[c] {
                continue;
            }
            if c >= self.fresh_floor {
                // fresh elements are interchangeable; one representative suffices
                if tried_fresh {
                    break;
                }
                tried_fresh = true;
            }
            self.dst.push(self.candidates[c]);
            if new_atoms_agree(self.lhs, self.rhs, &self.src, &self.dst) {
                self.used[c] = true;
                if self.extend(next + 1) {
                    return true;
                }
                self.used[c] = false;
            }
            self.dst.pop();
        }
        self.src.pop();
        false
    }
}

/// Compares every atom that mentions the last position of `src`/`dst`.
fn new_atoms_agree(lhs: &Structure, rhs: &Structure, src: &[usize], dst: &[usize]) -> bool {
    let last = src.len() - 1;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (r, rel) in lhs.signature.relations.iter().enumerate() {
        for idx in (0..rel.arity).map(|_| 0..src.len()).multi_cartesian_product() {
            if !idx.contains(&last) {
                continue;
            }
            a.clear();
            b.clear();
            a.extend(idx.iter().map(|&i| src[i]));
            b.extend(idx.iter().map(|&i| dst[i]));
            if lhs.holds(r, &a) != rhs.holds(r, &b) {
                return false;
            }
        }
    }
    true
}

/// Exhaustive isomorphism search between finite structures mapping `a` to
/// `b` entrywise. Intended for universes of at most eight elements.
pub fn brute_isomorphic(m: &Structure, n: &Structure, a: &[usize], b: &[usize]) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if !m.is_finite() || !n.is_finite() {
        return Err(Error::Unsupported(
            "brute_isomorphic needs finite structures".into(),
        ));
    }
    same_signature(m, n)?;
    m.check_elements(a)?;
    n.check_elements(b)?;
    if m.size() != n.size() || m.fact_count() != n.fact_count() {
        return Ok(false);
    }
    let size = m.size();
    Ok((0..size).permutations(size).any(|perm| {
        a.iter().zip(b).all(|(&x, &y)| perm[x] == y)
            && (0..m.facts.len())
                .all(|r| m.facts(r).all(|t| n.holds(r, &t.iter().map(|&e| perm[e]).collect_vec())))
    }))
}

#[cfg(test)]
mod tests;
