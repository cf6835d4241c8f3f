//! Vaught transforms on finite discrete actions, where the only meager set is
//! empty: "comeager in U" means all of U and "non-meager in U" means some of U.

use crate::bits::BitSet;
use crate::{Error, Level, Result};

use super::{ActionSystem, GroupAction, LevelTable};

fn group_of<S: ActionSystem + ?Sized>(sys: &S) -> Result<&dyn GroupAction> {
    sys.group()
        .ok_or_else(|| Error::Unsupported("Vaught transforms need the group action".into()))
}

fn check_set<S: ActionSystem + ?Sized>(sys: &S, a: &BitSet, u: usize) -> Result<()> {
    if a.len() != sys.num_points() {
        return Err(Error::InvalidSystem(format!(
            "point set over {} points, system has {}",
            a.len(),
            sys.num_points()
        )));
    }
    if u >= sys.num_basis() {
        return Err(Error::UnknownBasis(u));
    }
    Ok(())
}

/// `A^{*U}` = `{x : g·x ∈ A for every g ∈ U}`.
pub fn vaught_star<S: ActionSystem + ?Sized>(sys: &S, a: &BitSet, u: usize) -> Result<BitSet> {
    check_set(sys, a, u)?;
    let g = group_of(sys)?;
    let n = sys.num_points();
    Ok(BitSet::from_indices(
        n,
        (0..n).filter(|&x| g.members(u).iter().all(|h| a.contains(g.act(h, x)))),
    ))
}

/// `A^{△U}` = `{x : g·x ∈ A for some g ∈ U}`.
pub fn vaught_delta<S: ActionSystem + ?Sized>(sys: &S, a: &BitSet, u: usize) -> Result<BitSet> {
    check_set(sys, a, u)?;
    let g = group_of(sys)?;
    let n = sys.num_points();
    Ok(BitSet::from_indices(
        n,
        (0..n).filter(|&x| g.members(u).iter().any(|h| a.contains(g.act(h, x)))),
    ))
}

/// `y ∈ (V·x)^{*W}`, computed as `W·y ⊆ V·x`, next to `(y,W) ≤ (x,V)` at
/// the stabilized level. The two agree on every finite discrete action.
pub fn star_orbit_equivalence_check<S: ActionSystem + ?Sized>(
    sys: &S,
    table: &LevelTable,
    y: usize,
    w: usize,
    x: usize,
    v: usize,
) -> Result<(bool, bool)> {
    let g = group_of(sys)?;
    let n = sys.num_points();
    if x >= n || y >= n {
        return Err(Error::UnknownPoint(x.max(y)));
    }
    let orbit_set = g.image(v, x, n);
    let star = vaught_star(sys, &orbit_set, w)?.contains(y);
    Ok((star, table.leq(y, w, x, v, Level::Stab)?))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedPoints {
    /// `{x : g·x = x for some g ∈ U}`.
    pub direct: BitSet,
    /// `{x : (x,V) ≤ (x,W) at every level for some V, W with W⁻¹·V ⊆ U}`;
    /// `None` when the basis lacks `{e}` or a singleton `{g}` for some
    /// `g ∈ U`, so arbitrarily small neighbourhoods are unavailable.
    pub characterized: Option<BitSet>,
}

pub fn fixed_point_set<S: ActionSystem + ?Sized>(sys: &S, table: &LevelTable, u: usize) -> Result<FixedPoints> {
    let g = group_of(sys)?;
    let n = sys.num_points();
    if u >= sys.num_basis() {
        return Err(Error::UnknownBasis(u));
    }
    let members = g.members(u);
    let direct = BitSet::from_indices(n, (0..n).filter(|&x| members.iter().any(|h| g.act(h, x) == x)));

    let order = g.order();
    let singleton = |h: usize| g.basis_of(&BitSet::from_indices(order, [h]));
    let applicable = singleton(g.identity()).is_some() && members.iter().all(|h| singleton(h).is_some());
    if !applicable {
        return Ok(FixedPoints {
            direct,
            characterized: None,
        });
    }

    let nb = sys.num_basis();
    // W⁻¹·V ⊆ U  ⟺  V ⊆ ⋂_{a ∈ W} a·U
    let mut admissible = Vec::new();
    for w in 0..nb {
        let mut allowed = BitSet::full(order);
        for a in g.members(w).iter() {
            allowed.intersect_with(&BitSet::from_indices(order, members.iter().map(|u| g.compose(a, u))));
        }
        for v in (0..nb).filter(|&v| g.members(v).is_subset(&allowed)) {
            admissible.push((v, w));
        }
    }
    let mut characterized = BitSet::new(n);
    for x in 0..n {
        for &(v, w) in &admissible {
            if table.leq(x, v, x, w, Level::Stab)? {
                characterized.insert(x);
                break;
            }
        }
    }
    Ok(FixedPoints {
        direct,
        characterized: Some(characterized),
    })
}
