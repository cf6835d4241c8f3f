//! Back-and-forth equivalence of tuples in finite structures and Scott rank.
//!
//! Level 0 compares quantifier-free types. Level `α+1` holds between `(M, ā)`
//! and `(N, b̄)` when every one-element extension on either side is matched
//! at level `α` by an extension on the other side.
//!
//! The table only materializes injective tuples. A tuple with repetitions is
//! equivalent at level `α` to another exactly when both share the same
//! equality pattern and their deduplications are equivalent at level `α`, so
//! nothing is lost. For an injective tuple, extending by an element already
//! present is matched only by the corresponding element on the other side,
//! which reduces to the tuple itself; hence level `α+1` is the pair (level-`α`
//! class, set of level-`α` classes of injective extensions).

use std::collections::HashMap;
use std::sync::Arc;

use crate::structures::{qf_type_unchecked, Structure};
use crate::{Error, Level, Result};

/// Injective tuples over `0..n`, with their one-element injective extensions.
#[derive(Debug)]
struct TupleSpace {
    tuples: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    extensions: Vec<Vec<usize>>,
}

impl TupleSpace {
    fn new(n: usize) -> Self {
        let mut tuples = vec![Vec::new()];
        let mut index = HashMap::new();
        index.insert(Vec::new(), 0);
        let mut extensions = Vec::new();
        let mut next = 0;
        while next < tuples.len() {
            let t = tuples[next].clone();
            let mut ext = Vec::new();
            for c in (0..n).filter(|c| !t.contains(c)) {
                let mut u = t.clone();
                u.push(c);
                ext.push(tuples.len());
                index.insert(u.clone(), tuples.len());
                tuples.push(u);
            }
            extensions.push(ext);
            next += 1;
        }
        TupleSpace {
            tuples,
            index,
            extensions,
        }
    }
}

/// Equality pattern plus the class of the deduplicated tuple.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TupleClass {
    pub pattern: Vec<usize>,
    pub class: u32,
}

fn dedup(tuple: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut distinct: Vec<usize> = Vec::new();
    let pattern = tuple
        .iter()
        .map(|e| match distinct.iter().position(|d| d == e) {
            Some(p) => p,
            None => {
                distinct.push(*e);
                distinct.len() - 1
            }
        })
        .collect();
    (pattern, distinct)
}

/// Level-synchronous partition refinement over a family of finite structures.
#[derive(Debug)]
pub struct ScottTable {
    family: Vec<Structure>,
    spaces: Vec<Arc<TupleSpace>>,
    offsets: Vec<usize>,
    levels: Vec<Vec<u32>>,
    class_counts: Vec<usize>,
    stab: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScottRank {
    pub value: usize,
    pub stabilized_at: usize,
}

impl ScottTable {
    pub fn new(family: Vec<Structure>) -> Result<Self> {
        if let Some(s) = family.iter().find(|s| !s.is_finite()) {
            return Err(Error::Unsupported(format!(
                "Scott analysis needs finite structures; `{}` is supported",
                s.id()
            )));
        }
        if let Some(first) = family.first() {
            if family.iter().any(|s| s.signature() != first.signature()) {
                return Err(Error::SignatureMismatch);
            }
        }
        let mut by_size: HashMap<usize, Arc<TupleSpace>> = HashMap::new();
        let mut spaces = Vec::with_capacity(family.len());
        let mut offsets = Vec::with_capacity(family.len() + 1);
        let mut total = 0;
        for s in &family {
            let space = by_size
                .entry(s.size())
                .or_insert_with(|| Arc::new(TupleSpace::new(s.size())))
                .clone();
            offsets.push(total);
            total += space.tuples.len();
            spaces.push(space);
        }
        offsets.push(total);

        let mut types = HashMap::new();
        let mut level0 = Vec::with_capacity(total);
        for (s, space) in family.iter().zip(&spaces) {
            for t in &space.tuples {
                let next = types.len() as u32;
                level0.push(*types.entry(qf_type_unchecked(s, t)).or_insert(next));
            }
        }
        let mut table = ScottTable {
            class_counts: vec![types.len()],
            levels: vec![level0],
            family,
            spaces,
            offsets,
            stab: 0,
        };
        table.refine();
        Ok(table)
    }

    fn refine(&mut self) {
        loop {
            let prev = self.levels.last().expect("level 0 exists");
            let mut interner: HashMap<(u32, Vec<u32>), u32> = HashMap::new();
            let mut next = Vec::with_capacity(prev.len());
            let mut ext_classes = Vec::new();
            for (i, space) in self.spaces.iter().enumerate() {
                let base = self.offsets[i];
                for (t, ext) in space.extensions.iter().enumerate() {
                    ext_classes.clear();
                    ext_classes.extend(ext.iter().map(|&u| prev[base + u]));
                    ext_classes.sort_unstable();
                    ext_classes.dedup();
                    let fresh = interner.len() as u32;
                    let id = *interner
                        .entry((prev[base + t], ext_classes.clone()))
                        .or_insert(fresh);
                    next.push(id);
                }
            }
            let count = interner.len();
            if count == *self.class_counts.last().expect("nonempty") {
                self.stab = self.levels.len() - 1;
                return;
            }
            self.class_counts.push(count);
            self.levels.push(next);
        }
    }

    pub fn family(&self) -> &[Structure] {
        &self.family
    }

    /// Least `α` with level `α+1` equal to level `α`.
    pub fn stab(&self) -> usize {
        self.stab
    }

    pub fn class_count(&self, level: Level) -> usize {
        self.class_counts[level.resolve(self.stab)]
    }

    /// Number of materialized (structure, injective tuple) entries.
    pub fn entry_count(&self) -> usize {
        *self.offsets.last().expect("offsets has a sentinel")
    }

    /// The structure index and injective tuple of an entry.
    pub fn entry(&self, e: usize) -> (usize, &[usize]) {
        let i = self.offsets.partition_point(|&o| o <= e) - 1;
        (i, &self.spaces[i].tuples[e - self.offsets[i]])
    }

    /// Entries belonging to structure `i`.
    pub fn entries_of(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    pub fn entry_class(&self, e: usize, level: Level) -> u32 {
        self.levels[level.resolve(self.stab)][e]
    }

    /// Class key of an arbitrary tuple of structure `i`.
    pub fn class_of(&self, i: usize, tuple: &[usize], level: Level) -> Result<TupleClass> {
        let s = self.family.get(i).ok_or(Error::UnknownPoint(i))?;
        if let Some(&e) = tuple.iter().find(|&&e| e >= s.size()) {
            return Err(Error::OutOfUniverse {
                element: e,
                size: s.size(),
            });
        }
        let (pattern, distinct) = dedup(tuple);
        let local = self.spaces[i].index[&distinct];
        Ok(TupleClass {
            pattern,
            class: self.entry_class(self.offsets[i] + local, level),
        })
    }

    pub fn equiv(&self, i: usize, a: &[usize], j: usize, b: &[usize], level: Level) -> Result<bool> {
        if a.len() != b.len() {
            return Err(Error::LengthMismatch(a.len(), b.len()));
        }
        Ok(self.class_of(i, a, level)? == self.class_of(j, b, level)?)
    }

    /// Highest level at which the two tuples are equivalent: `Some(Level::Stab)`
    /// when they never separate, `None` when they already differ at level 0.
    pub fn agreement(&self, i: usize, a: &[usize], j: usize, b: &[usize]) -> Result<Option<Level>> {
        if self.equiv(i, a, j, b, Level::Stab)? {
            return Ok(Some(Level::Stab));
        }
        let mut reached = None;
        for alpha in 0..=self.stab {
            if !self.equiv(i, a, j, b, Level::At(alpha))? {
                break;
            }
            reached = Some(Level::At(alpha));
        }
        Ok(reached)
    }

    /// Scott rank of family member `i`: the least `α` at which level-`α`
    /// equivalence of its own tuples already implies level `α+1`.
    pub fn rank_of(&self, i: usize) -> ScottRank {
        let range = self.entries_of(i);
        let distinct = |level: usize| {
            let mut ids: Vec<u32> = self.levels[level][range.clone()].to_vec();
            ids.sort_unstable();
            ids.dedup();
            ids.len()
        };
        let value = (0..self.stab)
            .find(|&a| distinct(a) == distinct(a + 1))
            .unwrap_or(self.stab);
        ScottRank {
            value,
            stabilized_at: self.stab,
        }
    }
}

/// Level-`α` back-and-forth equivalence of `(m, a)` and `(n, b)`.
pub fn scott_equiv(m: &Structure, a: &[usize], n: &Structure, b: &[usize], level: Level) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let table = ScottTable::new(vec![m.clone(), n.clone()])?;
    table.equiv(0, a, 1, b, level)
}

pub fn scott_table(family: Vec<Structure>) -> Result<ScottTable> {
    ScottTable::new(family)
}

pub fn scott_rank(m: &Structure) -> Result<ScottRank> {
    Ok(ScottTable::new(vec![m.clone()])?.rank_of(0))
}

/// Stabilized equivalence of the empty tuples; on finite structures this is
/// isomorphism.
pub fn scott_iso_check(m: &Structure, n: &Structure) -> Result<bool> {
    scott_equiv(m, &[], n, &[], Level::Stab)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{parse_structures, Domain, Signature};

    fn graph(id: &str, n: usize, edges: &[(usize, usize)]) -> Structure {
        let sig = Arc::new(Signature::new([("edge", 2)]).unwrap());
        let facts = vec![edges.iter().map(|&(a, b)| vec![a, b]).collect()];
        Structure::new(id, sig, Domain::Finite(n), facts).unwrap()
    }

    #[test]
    fn chains_separate_at_level_two() {
        let (l2, l3) = (Structure::linear_order(2), Structure::linear_order(3));
        assert!(scott_equiv(&l2, &[], &l3, &[], Level::At(1)).unwrap());
        assert!(!scott_equiv(&l2, &[], &l3, &[], Level::At(2)).unwrap());
        let table = scott_table(vec![l2, l3]).unwrap();
        assert!(table.equiv(0, &[], 1, &[], Level::At(1)).unwrap());
        assert!(!table.equiv(0, &[], 1, &[], Level::At(2)).unwrap());
    }

    #[test]
    fn reflexive_at_every_level() {
        let p = graph("P", 3, &[(0, 1), (1, 2)]);
        for a in 0..4 {
            assert!(scott_equiv(&p, &[2, 0], &p, &[2, 0], Level::At(a)).unwrap());
        }
    }

    #[test]
    fn l2_level_zero_separates_orientations() {
        let table = scott_table(vec![Structure::linear_order(2)]).unwrap();
        let c01 = table.class_of(0, &[0, 1], Level::At(0)).unwrap();
        let c10 = table.class_of(0, &[1, 0], Level::At(0)).unwrap();
        assert_ne!(c01, c10);
    }

    #[test]
    fn ranks() {
        let sig = Arc::new(Signature::empty());
        let one = Structure::empty("one", sig, 1);
        assert_eq!(scott_table(vec![one.clone()]).unwrap().stab(), 0);
        assert_eq!(scott_rank(&one).unwrap().value, 0);
        let r = scott_rank(&Structure::linear_order(2)).unwrap();
        assert_eq!(r.value, 1);
        assert!(r.value <= r.stabilized_at);
    }

    #[test]
    fn iso_check_examples() {
        let l3 = Structure::linear_order(3);
        assert!(scott_iso_check(&l3, &l3).unwrap());
        assert!(!scott_iso_check(&Structure::linear_order(2), &l3).unwrap());
        let path = graph("path", 3, &[(0, 1), (1, 2)]);
        let star = graph("star", 3, &[(0, 1), (0, 2)]);
        assert!(!scott_iso_check(&path, &star).unwrap());
    }

    #[test]
    fn repeated_entries_follow_their_deduplication() {
        let l3 = Structure::linear_order(3);
        let t = scott_table(vec![l3.clone(), l3]).unwrap();
        assert!(t.equiv(0, &[1, 1], 1, &[1, 1], Level::Stab).unwrap());
        assert!(!t.equiv(0, &[0, 0], 1, &[1, 1], Level::At(1)).unwrap());
        assert!(!t.equiv(0, &[0, 0], 1, &[0, 2], Level::At(0)).unwrap());
    }

    #[test]
    fn rejects_supported_and_mismatched_lengths() {
        let f = parse_structures("signature\nrel e 2\nend\nsupported M support 2\ne 0 1\nend\n").unwrap();
        assert!(matches!(scott_rank(&f.structures[0]), Err(Error::Unsupported(_))));
        let l2 = Structure::linear_order(2);
        assert!(matches!(
            scott_equiv(&l2, &[0], &l2, &[], Level::At(0)),
            Err(Error::LengthMismatch(1, 0))
        ));
    }
}
