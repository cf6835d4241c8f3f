//! The logic action of `S_n` on structures with universe `0..n`.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::sync::Arc;

use itertools::Itertools;

use crate::bits::{self, BitSet};
use crate::budget::Budget;
use crate::hjorth::{ActionSystem, GroupAction};
use crate::structures::{Domain, Signature, Structure};
use crate::{Error, Result};

use super::PermGroup;

/// Injective tuples over `0..n` of length `len`, in lexicographic order.
pub(crate) fn injective_tuples(n: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..n).permutations(len)
}

pub(crate) fn descriptor_label(a: &[usize], b: &[usize]) -> String {
    if a.is_empty() {
        "G".into()
    } else {
        format!("V({};{})", a.iter().join(","), b.iter().join(","))
    }
}

#[derive(Debug, Clone)]
pub struct FiniteLogicAction {
    signature: Arc<Signature>,
    n: usize,
    k: usize,
    group: PermGroup,
    points: Vec<Structure>,
    point_index: HashMap<Vec<u64>, usize>,
    // act[g * points + x]
    act: Vec<usize>,
    basis: Vec<BitSet>,
    descriptors: Vec<(Vec<usize>, Vec<usize>)>,
    basis_index: HashMap<BitSet, usize>,
    orbits: Vec<Vec<usize>>,
    orbit_of: Vec<usize>,
    // images[v * points + x]: V·x over local orbit positions
    images: Vec<BitSet>,
}

fn all_structures(signature: &Arc<Signature>, n: usize, budget: &Budget) -> Result<Vec<Structure>> {
    let cells: Vec<Vec<Vec<usize>>> = signature
        .relations()
        .iter()
        .map(|r| (0..r.arity).map(|_| 0..n).multi_cartesian_product().collect())
        .collect();
    let total_bits: usize = cells.iter().map(Vec::len).sum();
    let count = 1u128.checked_shl(total_bits as u32).unwrap_or(u128::MAX);
    // each point needs at least one table row of one word per basis element
    if count > budget.cells / 64 || total_bits >= 64 {
        return Err(Error::budget("structures on the universe", count, budget.cells / 64));
    }
    let mut out = Vec::with_capacity(count as usize);
    for mask in 0..count as u64 {
        let mut offset = 0;
        let facts = cells
            .iter()
            .map(|rel| {
                let f = rel
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> (offset + i) & 1 == 1)
                    .map(|(_, t)| t.clone())
                    .collect();
                offset += rel.len();
                f
            })
            .collect();
        out.push(Structure::new(format!("M{mask}"), signature.clone(), Domain::Finite(n), facts)?);
    }
    Ok(out)
}

impl FiniteLogicAction {
    /// All structures on `0..n`, or the listed ones closed under `S_n`.
    /// The basis consists of the cosets `V_{ā,b̄}` for injective tuples of
    /// length at most `k`, deduplicated as sets of permutations.
    pub fn new(
        signature: Arc<Signature>,
        n: usize,
        k: usize,
        listed: Option<Vec<Structure>>,
        budget: &Budget,
    ) -> Result<Self> {
        Budget::check("universe size", n, budget.universe)?;
        Budget::check("tuple length", k, budget.tuple_len)?;
        if k > n {
            return Err(Error::Usage(format!("tuple length {k} exceeds universe size {n}")));
        }
        let group = PermGroup::symmetric(n);
        let mut points = match listed {
            None => all_structures(&signature, n, budget)?,
            Some(list) => {
                for s in &list {
                    if s.domain() != Domain::Finite(n) {
                        return Err(Error::InvalidSystem(format!(
                            "structure `{}` does not have universe 0..{n}",
                            s.id()
                        )));
                    }
                    if **s.signature() != *signature {
                        return Err(Error::SignatureMismatch);
                    }
                }
                list
            }
        };
        let mut point_index: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut unique = Vec::with_capacity(points.len());
        for s in points.drain(..) {
            if let Entry::Vacant(slot) = point_index.entry(s.fact_key()) {
                slot.insert(unique.len());
                unique.push(s);
            }
        }
        points = unique;
        // close under the action
        let mut i = 0;
        while i < points.len() {
            for g in 0..group.order() {
                let image = points[i].permuted(group.perm(g));
                if let Entry::Vacant(slot) = point_index.entry(image.fact_key()) {
                    slot.insert(points.len());
                    let id = format!("{}@{}", points[i].id(), group.label(g));
                    points.push(image.with_id(id));
                }
            }
            i += 1;
        }
        let np = points.len();
        let mut act = vec![0; group.order() * np];
        for (x, s) in points.iter().enumerate() {
            for g in 0..group.order() {
                act[g * np + x] = point_index[&s.permuted(group.perm(g)).fact_key()];
            }
        }

        let mut basis = Vec::new();
        let mut descriptors = Vec::new();
        let mut basis_index = HashMap::new();
        for len in 0..=k {
            for a in injective_tuples(n, len) {
                for b in injective_tuples(n, len) {
                    let set = BitSet::from_indices(
                        group.order(),
                        (0..group.order()).filter(|&g| a.iter().zip(&b).all(|(&x, &y)| group.apply(g, x) == y)),
                    );
                    if set.is_empty() || basis_index.contains_key(&set) {
                        continue;
                    }
                    basis_index.insert(set.clone(), basis.len());
                    basis.push(set);
                    descriptors.push((a.clone(), b));
                }
            }
        }

        let mut orbit_of = vec![usize::MAX; np];
        let mut local = vec![0; np];
        let mut orbits: Vec<Vec<usize>> = Vec::new();
        for x in 0..np {
            if orbit_of[x] != usize::MAX {
                continue;
            }
            let members: Vec<usize> = (0..group.order()).map(|g| act[g * np + x]).sorted().dedup().collect();
            for (i, &y) in members.iter().enumerate() {
                orbit_of[y] = orbits.len();
                local[y] = i;
            }
            orbits.push(members);
        }
        let nb = basis.len();
        let cells: u128 = orbits
            .iter()
            .map(|o| (o.len() * o.len() * nb * bits::words_for(nb) * 64) as u128)
            .sum();
        if cells > budget.cells {
            return Err(Error::budget("relation table cells", cells, budget.cells));
        }
        let mut images = Vec::with_capacity(nb * np);
        for set in &basis {
            for x in 0..np {
                let size = orbits[orbit_of[x]].len();
                images.push(BitSet::from_indices(size, set.iter().map(|g| local[act[g * np + x]])));
            }
        }
        Ok(FiniteLogicAction {
            signature,
            n,
            k,
            group,
            points,
            point_index,
            act,
            basis,
            descriptors,
            basis_index,
            orbits,
            orbit_of,
            images,
        })
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.signature
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn tuple_len(&self) -> usize {
        self.k
    }

    pub fn points(&self) -> &[Structure] {
        &self.points
    }

    pub fn perm_group(&self) -> &PermGroup {
        &self.group
    }

    pub fn point_of(&self, s: &Structure) -> Option<usize> {
        self.point_index.get(&s.fact_key()).copied()
    }

    pub fn orbits(&self) -> &[Vec<usize>] {
        &self.orbits
    }

    pub fn orbit_of(&self, x: usize) -> usize {
        self.orbit_of[x]
    }

    /// The first descriptor `(ā, b̄)` generating basis element `v`.
    pub fn descriptor(&self, v: usize) -> (&[usize], &[usize]) {
        let (a, b) = &self.descriptors[v];
        (a, b)
    }

    /// Index of `V_{ā,b̄}`, when nonempty and within the tuple-length cap.
    pub fn basis_for(&self, a: &[usize], b: &[usize]) -> Option<usize> {
        if a.len() != b.len() || a.len() > self.k {
            return None;
        }
        let order = self.group.order();
        let set = BitSet::from_indices(
            order,
            (0..order).filter(|&g| a.iter().zip(b).all(|(&x, &y)| x < self.n && self.group.apply(g, x) == y)),
        );
        self.basis_index.get(&set).copied()
    }
}

impl GroupAction for FiniteLogicAction {
    fn order(&self) -> usize {
        self.group.order()
    }

    fn identity(&self) -> usize {
        self.group.identity()
    }

    fn act(&self, g: usize, x: usize) -> usize {
        self.act[g * self.points.len() + x]
    }

    fn compose(&self, g: usize, h: usize) -> usize {
        self.group.compose(g, h)
    }

    fn inverse(&self, g: usize) -> usize {
        self.group.inverse(g)
    }

    fn element_label(&self, g: usize) -> String {
        self.group.label(g).to_string()
    }

    fn members(&self, v: usize) -> &BitSet {
        &self.basis[v]
    }

    fn basis_of(&self, set: &BitSet) -> Option<usize> {
        self.basis_index.get(set).copied()
    }
}

impl ActionSystem for FiniteLogicAction {
    fn num_points(&self) -> usize {
        self.points.len()
    }

    fn num_basis(&self) -> usize {
        self.basis.len()
    }

    fn contains(&self, w: usize, v: usize) -> bool {
        self.basis[w].is_subset(&self.basis[v])
    }

    fn cc(&self, x0: usize, v0: usize, x1: usize, v1: usize) -> bool {
        if self.orbit_of[x0] != self.orbit_of[x1] {
            return false;
        }
        let np = self.points.len();
        self.images[v0 * np + x0].is_subset(&self.images[v1 * np + x1])
    }

    fn point_label(&self, x: usize) -> String {
        self.points[x].id().to_string()
    }

    fn basis_label(&self, v: usize) -> String {
        let (a, b) = self.descriptor(v);
        descriptor_label(a, b)
    }

    fn group(&self) -> Option<&dyn GroupAction> {
        Some(self)
    }

    fn cc_components(&self) -> Option<Vec<Vec<usize>>> {
        Some(self.orbits.clone())
    }
}

/// Builds the finite logic action on all structures over `signature` with
/// universe `0..n`, or on the orbits of `listed`.
pub fn build_finite_logic(
    signature: Arc<Signature>,
    n: usize,
    k: usize,
    listed: Option<Vec<Structure>>,
    budget: &Budget,
) -> Result<FiniteLogicAction> {
    FiniteLogicAction::new(signature, n, k, listed, budget)
}
