//! The Hjorth relations `≤_α`, the equivalences `≡_α`, and Hjorth rank over
//! an abstract finite action system.
//!
//! `T₁` is the base relation `cc`. The successor step is
//!
//! ```text
//! T_{α+1}(x₀,V₀,x₁,V₁)  ⟺  ∀ W₀ ⊆ V₀ ∃ W₁ ⊆ V₁ : T_α(x₁,W₁,x₀,W₀)
//! ```
//!
//! with `W₀`, `W₁` ranging over the basis. Levels are naturals starting at 1;
//! every level past stabilization reads the stabilized table.

mod table;
mod vaught;

use std::cmp::Ordering;

use crate::bits::{self, BitSet};
use crate::budget::Budget;
use crate::{Error, Level, Result};

pub use table::LevelTable;
pub(crate) use table::Order;
pub use vaught::{fixed_point_set, star_orbit_equivalence_check, vaught_delta, vaught_star, FixedPoints};

/// A finite group acting faithfully on the points of a system, with basis
/// elements given as sets of group elements.
pub trait GroupAction {
    fn order(&self) -> usize;
    fn identity(&self) -> usize;
    fn act(&self, g: usize, x: usize) -> usize;
    /// `g ∘ h`: apply `h` first.
    fn compose(&self, g: usize, h: usize) -> usize;
    fn inverse(&self, g: usize) -> usize;
    fn element_label(&self, g: usize) -> String;
    /// Group elements making up basis element `v`.
    fn members(&self, v: usize) -> &BitSet;
    /// The basis element with exactly these members, if any.
    fn basis_of(&self, set: &BitSet) -> Option<usize>;

    /// `V·g⁻¹` when it is a basis element.
    fn translate(&self, v: usize, g: usize) -> Option<usize> {
        let gi = self.inverse(g);
        let moved = BitSet::from_indices(self.order(), self.members(v).iter().map(|h| self.compose(h, gi)));
        self.basis_of(&moved)
    }

    /// `V·x` as a point set over `0..num_points`.
    fn image(&self, v: usize, x: usize, num_points: usize) -> BitSet {
        BitSet::from_indices(num_points, self.members(v).iter().map(|g| self.act(g, x)))
    }
}

/// Points, basis elements and the base relation `cc`.
pub trait ActionSystem {
    fn num_points(&self) -> usize;
    fn num_basis(&self) -> usize;
    /// `W ⊆ V`.
    fn contains(&self, w: usize, v: usize) -> bool;
    /// `closure(W) ⊆ V`; every shipped basis is clopen.
    fn fine(&self, w: usize, v: usize) -> bool {
        self.contains(w, v)
    }
    /// `closure(V₀·x₀) ⊆ closure(V₁·x₁)`.
    fn cc(&self, x0: usize, v0: usize, x1: usize, v1: usize) -> bool;
    fn point_label(&self, x: usize) -> String {
        x.to_string()
    }
    fn basis_label(&self, v: usize) -> String {
        v.to_string()
    }
    fn group(&self) -> Option<&dyn GroupAction> {
        None
    }
    /// A partition of the points that no base-relation pair crosses, when
    /// known in advance (orbits, typically). Otherwise the engine derives it.
    fn cc_components(&self) -> Option<Vec<Vec<usize>>> {
        None
    }
    /// Whether each level must refine the previous one. Systems whose basis
    /// is cut off at a window answer `false`; the engine then intersects each
    /// new level with the previous one and records every step that needed it.
    fn levels_decrease(&self) -> bool {
        true
    }
}

/// Hjorth rank of a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rank {
    pub value: usize,
    pub stabilized_at: usize,
}

pub fn leq_table<S: ActionSystem + ?Sized>(sys: &S, max_level: Option<usize>) -> Result<LevelTable> {
    LevelTable::build(sys, max_level, &Budget::unlimited())
}

pub fn leq(table: &LevelTable, x0: usize, v0: usize, x1: usize, v1: usize, level: Level) -> Result<bool> {
    table.leq(x0, v0, x1, v1, level)
}

pub fn equiv_alpha(table: &LevelTable, x: usize, y: usize, level: Level) -> Result<bool> {
    table.equiv(x, y, level)
}

fn stabilized(table: &LevelTable) -> Result<usize> {
    table.stab().ok_or_else(|| Error::LevelUnavailable {
        requested: "stab".into(),
        reason: format!(
            "rank needs a stabilized table; stopped at level {}",
            table.computed_levels()
        ),
    })
}

struct FineOrder {
    down: Vec<Vec<usize>>,
    up: Vec<BitSet>,
}

impl FineOrder {
    fn of<S: ActionSystem + ?Sized>(sys: &S) -> Self {
        let o = Order::of(sys, |s, w, v| s.fine(w, v));
        FineOrder { down: o.down, up: o.up }
    }
}

// For all V₀,V₁,W₀,W₁ with fine(W₀,V₀), fine(V₁,W₁):
// T_α(x,V₀,x,V₁) ⟹ T_{α+1}(x,W₀,x,W₁).
fn rank_condition(table: &LevelTable, fine: &FineOrder, x: usize, alpha: usize) -> bool {
    let nb = table.num_basis();
    let full = BitSet::full(nb);
    (0..nb).all(|v0| {
        let row = table.segment(x, v0, x, alpha).expect("same point");
        if bits::ones(row).next().is_none() {
            return true;
        }
        let mut reachable = full.clone();
        for &w0 in &fine.down[v0] {
            let next = table.segment(x, w0, x, alpha + 1).expect("same point");
            reachable.intersect_with(&BitSet::from_indices(nb, bits::ones(next)));
        }
        bits::ones(row).all(|v1| fine.up[v1].is_subset(&reachable))
    })
}

/// Every level up to stabilization at which the rank condition holds at `x`.
pub fn rank_condition_profile<S: ActionSystem + ?Sized>(sys: &S, table: &LevelTable, x: usize) -> Result<Vec<usize>> {
    if x >= table.num_points() {
        return Err(Error::UnknownPoint(x));
    }
    let stab = stabilized(table)?;
    let fine = FineOrder::of(sys);
    Ok((1..=stab).filter(|&a| rank_condition(table, &fine, x, a)).collect())
}

pub fn hjorth_rank<S: ActionSystem + ?Sized>(sys: &S, table: &LevelTable, x: usize) -> Result<Rank> {
    Ok(all_ranks_with(sys, table, Some(x))?[0])
}

/// Ranks of every point.
pub fn hjorth_ranks<S: ActionSystem + ?Sized>(sys: &S, table: &LevelTable) -> Result<Vec<Rank>> {
    all_ranks_with(sys, table, None)
}

fn all_ranks_with<S: ActionSystem + ?Sized>(sys: &S, table: &LevelTable, only: Option<usize>) -> Result<Vec<Rank>> {
    let stab = stabilized(table)?;
    let fine = FineOrder::of(sys);
    let points: Vec<usize> = match only {
        Some(x) if x >= table.num_points() => return Err(Error::UnknownPoint(x)),
        Some(x) => vec![x],
        None => (0..table.num_points()).collect(),
    };
    points
        .into_iter()
        .map(|x| {
            let value = (1..=stab)
                .find(|&a| rank_condition(table, &fine, x, a))
                .ok_or_else(|| {
                    Error::InvalidBaseRelation(format!(
                        "rank condition fails at every level for point {}; the base relation is not monotone in its basis arguments",
                        sys.point_label(x)
                    ))
                })?;
            Ok(Rank {
                value,
                stabilized_at: stab,
            })
        })
        .collect()
}

/// Orbits of the system's group, smallest member first.
pub(crate) fn orbit_ids(group: &dyn GroupAction, n: usize) -> Vec<usize> {
    crate::oracle::orbit_partition_of(group, n).orbit_of
}

/// Equivalence at one level past the larger rank, with the orbit verdict when
/// the system exposes its group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrbitVerdict {
    pub via_rank: bool,
    pub orbit: Option<bool>,
}

pub fn orbit_check_via_rank<S: ActionSystem + ?Sized>(
    sys: &S,
    table: &LevelTable,
    x: usize,
    y: usize,
) -> Result<OrbitVerdict> {
    let d = hjorth_rank(sys, table, x)?.value.max(hjorth_rank(sys, table, y)?.value);
    let via_rank = table.equiv(x, y, Level::At(d + 1))?;
    let orbit = sys.group().map(|g| {
        let ids = orbit_ids(g, sys.num_points());
        ids[x] == ids[y]
    });
    Ok(OrbitVerdict { via_rank, orbit })
}

/// Least `m` with `{y : y ≡_{δ(x)+m} x}` equal to the orbit of `x`, or `None`
/// if no level achieves it.
pub fn minimal_m<S: ActionSystem + ?Sized>(sys: &S, table: &LevelTable, x: usize) -> Result<Option<usize>> {
    let group = sys
        .group()
        .ok_or_else(|| Error::Unsupported("minimal m needs the group action".into()))?;
    let ids = orbit_ids(group, sys.num_points());
    let rank = hjorth_rank(sys, table, x)?;
    minimal_m_with(table, &ids, x, rank)
}

pub(crate) fn minimal_m_with(table: &LevelTable, orbit_ids: &[usize], x: usize, rank: Rank) -> Result<Option<usize>> {
    let last = rank.stabilized_at.saturating_sub(rank.value) + 1;
    for m in 0..=last {
        let level = Level::At(rank.value + m);
        let mut matches = true;
        for y in 0..table.num_points() {
            if table.equiv(x, y, level)? != (orbit_ids[x] == orbit_ids[y]) {
                matches = false;
                break;
            }
        }
        if matches {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// Points grouped by rank value, ascending.
pub fn partition_by_rank<S: ActionSystem + ?Sized>(sys: &S, table: &LevelTable) -> Result<Vec<(usize, Vec<usize>)>> {
    Ok(group_by_rank(&hjorth_ranks(sys, table)?))
}

pub(crate) fn group_by_rank(ranks: &[Rank]) -> Vec<(usize, Vec<usize>)> {
    let mut parts: Vec<(usize, Vec<usize>)> = Vec::new();
    for (x, r) in ranks.iter().enumerate() {
        match parts.iter_mut().find(|(v, _)| *v == r.value) {
            Some((_, pts)) => pts.push(x),
            None => parts.push((r.value, vec![x])),
        }
    }
    parts.sort();
    parts
}

pub fn compare_ranks<S: ActionSystem + ?Sized>(sys: &S, table: &LevelTable, x: usize, y: usize) -> Result<Ordering> {
    Ok(hjorth_rank(sys, table, x)?.value.cmp(&hjorth_rank(sys, table, y)?.value))
}

/// `|δ_a(x) − δ_b(x)|` for each point, for two systems over the same points.
pub fn basis_shift_check<A, B>(a: &A, b: &B, budget: &Budget) -> Result<Vec<usize>>
where
    A: ActionSystem + ?Sized,
    B: ActionSystem + ?Sized,
{
    if a.num_points() != b.num_points() {
        return Err(Error::InvalidSystem(format!(
            "basis comparison needs the same points: {} vs {}",
            a.num_points(),
            b.num_points()
        )));
    }
    let ra = hjorth_ranks(a, &LevelTable::build(a, None, budget)?)?;
    let rb = hjorth_ranks(b, &LevelTable::build(b, None, budget)?)?;
    Ok(ra.iter().zip(&rb).map(|(p, q)| p.value.abs_diff(q.value)).collect())
}

#[cfg(test)]
mod tests;
