//! Stratified tables of `≤_α`.
//!
//! A quadruple `(x₀, V₀, x₁, V₁)` can only be related when `x₀` and `x₁` lie in
//! the same component of the base relation, and the successor step only
//! consults the flipped quadruple over the same pair of points. Each component
//! is therefore iterated on its own, and points in different components are
//! never related.
//!
//! Within a component of `p` points and `b` basis elements one level is a
//! segmented bit table: the segment for `(x₀, V₀, x₁)` is a bit set over `V₁`.

use crate::bits::{self, BitSet};
use crate::budget::Budget;
use crate::{Error, Level, Result};

use super::ActionSystem;

#[derive(Debug, Clone)]
struct Component {
    points: Vec<usize>,
    // levels[i] holds T_{i+1}
    levels: Vec<Vec<u64>>,
    stab: Option<usize>,
    breaks: Vec<(usize, String)>,
}

#[derive(Debug, Clone)]
pub struct LevelTable {
    points: usize,
    basis: usize,
    bw: usize,
    comp_of: Vec<usize>,
    local: Vec<usize>,
    comps: Vec<Component>,
    computed: usize,
    stab: Option<usize>,
    cells_per_level: u128,
    breaks: Vec<(usize, String)>,
}

/// Per-basis-element neighbourhoods under `contains`.
pub(crate) struct Order {
    /// `up[W]` = `{V : contains(W, V)}`.
    pub up: Vec<BitSet>,
    /// `down[V]` = `{W : contains(W, V)}`, ascending.
    pub down: Vec<Vec<usize>>,
}

impl Order {
    pub(crate) fn of<S: ActionSystem + ?Sized>(sys: &S, rel: impl Fn(&S, usize, usize) -> bool) -> Self {
        let nb = sys.num_basis();
        let mut up = vec![BitSet::new(nb); nb];
        let mut down = vec![Vec::new(); nb];
        for w in 0..nb {
            for v in 0..nb {
                if rel(sys, w, v) {
                    up[w].insert(v);
                    down[v].push(w);
                }
            }
        }
        Order { up, down }
    }
}

fn validate_partial_order<S: ActionSystem + ?Sized>(sys: &S, order: &Order) -> Result<()> {
    let nb = sys.num_basis();
    for v in 0..nb {
        if !order.up[v].contains(v) {
            return Err(Error::InvalidSystem(format!(
                "contains is not reflexive at basis {}",
                sys.basis_label(v)
            )));
        }
    }
    for w in 0..nb {
        for v in order.up[w].iter() {
            if v != w && order.up[v].contains(w) {
                return Err(Error::InvalidSystem(format!(
                    "contains is not antisymmetric on basis {} and {}",
                    sys.basis_label(w),
                    sys.basis_label(v)
                )));
            }
            if let Some(u) = bits::first_difference(order.up[v].words(), order.up[w].words()) {
                return Err(Error::InvalidSystem(format!(
                    "contains is not transitive: {} ⊆ {} ⊆ {}",
                    sys.basis_label(w),
                    sys.basis_label(v),
                    sys.basis_label(u)
                )));
            }
        }
    }
    Ok(())
}

fn components<S: ActionSystem + ?Sized>(sys: &S) -> Result<Vec<Vec<usize>>> {
    let nx = sys.num_points();
    if let Some(parts) = sys.cc_components() {
        let mut seen = vec![false; nx];
        for &x in parts.iter().flatten() {
            if x >= nx || std::mem::replace(&mut seen[x], true) {
                return Err(Error::InvalidSystem(format!(
                    "declared components do not partition the points (at {x})"
                )));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidSystem(
                "declared components do not cover every point".into(),
            ));
        }
        let mut parts = parts;
        for p in &mut parts {
            p.sort_unstable();
        }
        parts.sort();
        return Ok(parts);
    }
    // union-find over pairs related by the base relation at some basis pair
    let nb = sys.num_basis();
    let mut parent: Vec<usize> = (0..nx).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for x0 in 0..nx {
        for x1 in 0..nx {
            let (r0, r1) = (find(&mut parent, x0), find(&mut parent, x1));
            if r0 == r1 {
                continue;
            }
            let related = (0..nb).any(|v0| (0..nb).any(|v1| sys.cc(x0, v0, x1, v1)));
            if related {
                parent[r0.max(r1)] = r0.min(r1);
            }
        }
    }
    let mut parts: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; nx];
    for x in 0..nx {
        let r = find(&mut parent, x);
        if slot[r] == usize::MAX {
            slot[r] = parts.len();
            parts.push(Vec::new());
        }
        parts[slot[r]].push(x);
    }
    Ok(parts)
}

fn quad<S: ActionSystem + ?Sized>(sys: &S, x0: usize, v0: usize, x1: usize, v1: usize) -> String {
    format!(
        "({}, {}, {}, {})",
        sys.point_label(x0),
        sys.basis_label(v0),
        sys.point_label(x1),
        sys.basis_label(v1)
    )
}

impl LevelTable {
    /// Iterates `≤_α` to stabilization, or to `max_level` levels when given.
    pub fn build<S: ActionSystem + ?Sized>(sys: &S, max_level: Option<usize>, budget: &Budget) -> Result<Self> {
        let nx = sys.num_points();
        let nb = sys.num_basis();
        if nb == 0 {
            return Err(Error::InvalidSystem("empty basis".into()));
        }
        if max_level == Some(0) {
            return Err(Error::Usage("max level must be at least 1".into()));
        }
        let bw = bits::words_for(nb);
        let order = Order::of(sys, |s, w, v| s.contains(w, v));
        validate_partial_order(sys, &order)?;
        let parts = components(sys)?;

        let cells: u128 = parts
            .iter()
            .map(|p| (p.len() * p.len() * nb * bw * 64) as u128)
            .sum();
        if cells > budget.cells {
            return Err(Error::budget("relation table cells", cells, budget.cells));
        }

        let mut comp_of = vec![0; nx];
        let mut local = vec![0; nx];
        for (c, part) in parts.iter().enumerate() {
            for (i, &x) in part.iter().enumerate() {
                comp_of[x] = c;
                local[x] = i;
            }
        }

        let mut comps = Vec::with_capacity(parts.len());
        for part in parts {
            let first = base_level(sys, &part, nb, bw)?;
            comps.push(iterate(sys, part, first, &order, nb, bw, max_level)?);
        }
        let computed = comps.iter().map(|c| c.levels.len()).max().unwrap_or(1);
        let mut breaks: Vec<(usize, String)> = comps.iter().flat_map(|c| c.breaks.iter().cloned()).collect();
        breaks.sort();
        let stab = if comps.iter().all(|c| c.stab.is_some()) {
            Some(comps.iter().filter_map(|c| c.stab).max().unwrap_or(1))
        } else {
            None
        };
        Ok(LevelTable {
            points: nx,
            basis: nb,
            bw,
            comp_of,
            local,
            comps,
            computed,
            stab,
            cells_per_level: cells,
            breaks,
        })
    }

    pub fn num_points(&self) -> usize {
        self.points
    }

    pub fn num_basis(&self) -> usize {
        self.basis
    }

    /// Least `α` with `T_{α+1} = T_α`, if reached.
    pub fn stab(&self) -> Option<usize> {
        self.stab
    }

    /// Highest level held explicitly.
    pub fn computed_levels(&self) -> usize {
        self.computed
    }

    pub fn cells_per_level(&self) -> u128 {
        self.cells_per_level
    }

    /// Levels `α + 1` whose recursion produced pairs outside level `α`, with
    /// one witness quadruple each. Such pairs are dropped, so the stored
    /// levels always decrease. Empty unless the system allows such steps.
    pub fn non_monotone_steps(&self) -> &[(usize, String)] {
        &self.breaks
    }

    /// Components of the base relation, each sorted ascending.
    pub fn components(&self) -> impl Iterator<Item = &[usize]> {
        self.comps.iter().map(|c| c.points.as_slice())
    }

    pub fn component_of(&self, x: usize) -> usize {
        self.comp_of[x]
    }

    /// Resolves a level request to a stored level number `≥ 1`.
    pub fn resolve(&self, level: Level) -> Result<usize> {
        match (level, self.stab) {
            (Level::At(0), _) => Err(Error::LevelUnavailable {
                requested: "0".into(),
                reason: "levels start at 1".into(),
            }),
            (Level::At(a), Some(s)) => Ok(a.min(s)),
            (Level::At(a), None) if a <= self.computed => Ok(a),
            (Level::Stab, Some(s)) => Ok(s),
            (requested, None) => Err(Error::LevelUnavailable {
                requested: requested.to_string(),
                reason: format!("table stopped at level {} before stabilizing", self.computed),
            }),
        }
    }

    fn check_point(&self, x: usize) -> Result<()> {
        if x >= self.points {
            return Err(Error::UnknownPoint(x));
        }
        Ok(())
    }

    fn check_basis(&self, v: usize) -> Result<()> {
        if v >= self.basis {
            return Err(Error::UnknownBasis(v));
        }
        Ok(())
    }

    /// Bits over `V₁` of `T_α(x₀, V₀, x₁, ·)`, or `None` when the points lie
    /// in different components.
    pub(crate) fn segment(&self, x0: usize, v0: usize, x1: usize, alpha: usize) -> Option<&[u64]> {
        let c = self.comp_of[x0];
        if self.comp_of[x1] != c {
            return None;
        }
        let comp = &self.comps[c];
        let p = comp.points.len();
        let level = &comp.levels[alpha.min(comp.levels.len()) - 1];
        let start = ((self.local[x0] * self.basis + v0) * p + self.local[x1]) * self.bw;
        Some(&level[start..start + self.bw])
    }

    pub fn leq(&self, x0: usize, v0: usize, x1: usize, v1: usize, level: Level) -> Result<bool> {
        self.check_point(x0)?;
        self.check_point(x1)?;
        self.check_basis(v0)?;
        self.check_basis(v1)?;
        let alpha = self.resolve(level)?;
        Ok(self
            .segment(x0, v0, x1, alpha)
            .is_some_and(|s| bits::get(s, v1)))
    }

    /// `x ≡_α y`: every basis set at either point is covered from the other.
    pub fn equiv(&self, x: usize, y: usize, level: Level) -> Result<bool> {
        self.check_point(x)?;
        self.check_point(y)?;
        let alpha = self.resolve(level)?;
        Ok(self.covers(y, x, alpha) && self.covers(x, y, alpha))
    }

    // for every V some W has T_α(from, W, to, V)
    fn covers(&self, from: usize, to: usize, alpha: usize) -> bool {
        let mut union = BitSet::new(self.basis);
        for w in 0..self.basis {
            match self.segment(from, w, to, alpha) {
                Some(seg) => union.union_with(&BitSet::from_indices(self.basis, bits::ones(seg))),
                None => return false,
            }
        }
        union.count() == self.basis
    }
}

fn base_level<S: ActionSystem + ?Sized>(sys: &S, part: &[usize], nb: usize, bw: usize) -> Result<Vec<u64>> {
    let p = part.len();
    let row = p * bw;
    let mut t = vec![0u64; p * nb * row];
    for (i0, &x0) in part.iter().enumerate() {
        for v0 in 0..nb {
            for (i1, &x1) in part.iter().enumerate() {
                let start = ((i0 * nb + v0) * p + i1) * bw;
                for v1 in 0..nb {
                    if sys.cc(x0, v0, x1, v1) {
                        bits::set(&mut t[start..start + bw], v1);
                    }
                }
            }
            let start = ((i0 * nb + v0) * p + i0) * bw;
            if !bits::get(&t[start..start + bw], v0) {
                return Err(Error::InvalidBaseRelation(format!(
                    "not reflexive at {}",
                    quad(sys, x0, v0, x0, v0)
                )));
            }
        }
    }
    // transitivity: each related row is contained in the row it is reached from
    for a in 0..p * nb {
        let row_a = &t[a * row..(a + 1) * row];
        for b in bits::ones(row_a) {
            let (i1, v1) = (b / (bw * 64), b % (bw * 64));
            let b_idx = i1 * nb + v1;
            let row_b = &t[b_idx * row..(b_idx + 1) * row];
            if let Some(c) = bits::first_difference(row_b, row_a) {
                let (i2, v2) = (c / (bw * 64), c % (bw * 64));
                let (i0, v0) = (a / nb, a % nb);
                return Err(Error::InvalidBaseRelation(format!(
                    "not transitive: {} and {} but not {}",
                    quad(sys, part[i0], v0, part[i1], v1),
                    quad(sys, part[i1], v1, part[i2], v2),
                    quad(sys, part[i0], v0, part[i2], v2)
                )));
            }
        }
    }
    Ok(t)
}

fn iterate<S: ActionSystem + ?Sized>(
    sys: &S,
    points: Vec<usize>,
    first: Vec<u64>,
    order: &Order,
    nb: usize,
    bw: usize,
    max_level: Option<usize>,
) -> Result<Component> {
    let p = points.len();
    let seg = |x0: usize, v0: usize, x1: usize| ((x0 * nb + v0) * p + x1) * bw;
    let mut levels = vec![first];
    let mut full = vec![u64::MAX; bw];
    if !nb.is_multiple_of(64) {
        full[bw - 1] = (1u64 << (nb % 64)) - 1;
    }
    let mut reach = vec![0u64; nb * bw];
    let mut acc = vec![0u64; bw];
    let mut breaks = Vec::new();
    loop {
        let cur = levels.last().expect("level 1 present");
        let mut next = vec![0u64; cur.len()];
        for x1 in 0..p {
            for x0 in 0..p {
                // reach[W₀] = ⋃ {up(W₁) : T_α(x₁, W₁, x₀, W₀)}
                reach.fill(0);
                for w1 in 0..nb {
                    let s = seg(x1, w1, x0);
                    for w0 in bits::ones(&cur[s..s + bw]) {
                        for (r, u) in reach[w0 * bw..(w0 + 1) * bw].iter_mut().zip(order.up[w1].words()) {
                            *r |= u;
                        }
                    }
                }
                for v0 in 0..nb {
                    acc.copy_from_slice(&full);
                    for &w0 in &order.down[v0] {
                        for (a, r) in acc.iter_mut().zip(&reach[w0 * bw..(w0 + 1) * bw]) {
                            *a &= r;
                        }
                    }
                    let d = seg(x0, v0, x1);
                    next[d..d + bw].copy_from_slice(&acc);
                }
            }
        }
        let alpha = levels.len();
        if let Some(bad) = bits::first_difference(&next, cur) {
            let s = bad / (bw * 64);
            let v1 = bad % (bw * 64);
            let (x1, rest) = (s % p, s / p);
            let (x0, v0) = (rest / nb, rest % nb);
            let witness = quad(sys, points[x0], v0, points[x1], v1);
            if sys.levels_decrease() {
                return Err(Error::InvalidBaseRelation(format!(
                    "level {} is not contained in level {alpha} at {witness}",
                    alpha + 1
                )));
            }
            breaks.push((alpha + 1, witness));
            for (n, c) in next.iter_mut().zip(cur) {
                *n &= c;
            }
        }
        if next == *cur {
            return Ok(Component {
                points,
                levels,
                stab: Some(alpha),
                breaks,
            });
        }
        if max_level.is_some_and(|m| alpha >= m) {
            return Ok(Component {
                points,
                levels,
                stab: None,
                breaks,
            });
        }
        levels.push(next);
    }
}
