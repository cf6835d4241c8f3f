//! A finite window of the logic action of `S_∞` on finitely supported
//! structures.
//!
//! The basis consists of the cosets `V_{ā,b̄} = {σ : σ(ā) = b̄}` with `ā`,
//! `b̄` injective tuples over the window `0..s` of length at most `k`. In
//! `S_∞` such a coset is determined by the partial injection `ā ↦ b̄`, and
//! one coset contains another exactly when its graph is a subset of the
//! other's graph. Cosets are clopen, so `fine` is `contains`.
//!
//! The base relation is closure containment of translates:
//! `closure(V_{ā,b̄}·M) ⊆ closure(V_{ā',b̄'}·N)` holds iff every `σM` with
//! `σ(ā) = b̄` lies in `closure(V_{ā',b̄'}·N)`, that is iff
//! `Th_∃(M, σ⁻¹(b̄')) ⊆ Th_∃(N, ā')` for every such `σ`. The tuple
//! `c̄ = σ⁻¹(b̄')` is forced where `b̄'` meets `b̄` (`b'_j = b_i` gives
//! `c_j = a_i`) and otherwise ranges injectively over elements outside `ā`.
//! Off-support elements of `M` outside `ā` are interchangeable, so one
//! canonical representative per pattern of fresh elements suffices.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use itertools::Itertools;

use crate::budget::Budget;
use crate::hjorth::{leq_table, ActionSystem, LevelTable};
use crate::structures::{thsigma_contains, Signature, Structure};
use crate::{Error, Level, Result};

use super::logic::descriptor_label;

/// A partial injection `ā ↦ b̄`, stored sorted by `ā`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Descriptor {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

impl Descriptor {
    /// Canonical form of `V_{ā,b̄}`; rejects non-injective tuples.
    pub fn new(a: &[usize], b: &[usize]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::LengthMismatch(a.len(), b.len()));
        }
        for t in [a, b] {
            if !t.iter().all_unique() {
                return Err(Error::NonInjective(t.to_vec()));
            }
        }
        let (a, b) = a.iter().zip(b).sorted().map(|(&x, &y)| (x, y)).unzip();
        Ok(Descriptor { a, b })
    }

    fn graph_subset(&self, other: &Descriptor) -> bool {
        self.a
            .iter()
            .zip(&self.b)
            .all(|(x, y)| other.a.iter().position(|a| a == x).is_some_and(|i| other.b[i] == *y))
    }
}

type MemoKey = (usize, Vec<usize>, usize, Vec<usize>);

#[derive(Debug)]
pub struct SymbolicLogicAction {
    signature: Arc<Signature>,
    s: usize,
    k: usize,
    points: Vec<Structure>,
    basis: Vec<Descriptor>,
    memo: Mutex<HashMap<MemoKey, bool>>,
}

impl SymbolicLogicAction {
    pub fn new(signature: Arc<Signature>, s: usize, k: usize, points: Vec<Structure>, budget: &Budget) -> Result<Self> {
        Budget::check("support window", s, budget.support)?;
        Budget::check("tuple length", k, budget.tuple_len)?;
        Budget::check("points", points.len(), budget.points)?;
        if k > s {
            return Err(Error::Usage(format!("tuple length {k} exceeds window {s}")));
        }
        for p in &points {
            if p.is_finite() || p.size() > s {
                return Err(Error::InvalidSystem(format!(
                    "structure `{}` must be supported inside the window 0..{s}",
                    p.id()
                )));
            }
            if **p.signature() != *signature {
                return Err(Error::SignatureMismatch);
            }
        }
        let mut basis = Vec::new();
        for len in 0..=k {
            for a in (0..s).combinations(len) {
                for b in (0..s).permutations(len) {
                    basis.push(Descriptor::new(&a, &b)?);
                }
            }
        }
        Ok(SymbolicLogicAction {
            signature,
            s,
            k,
            points,
            basis,
            memo: Mutex::new(HashMap::new()),
        })
    }

    pub fn window(&self) -> (usize, usize) {
        (self.s, self.k)
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.signature
    }

    pub fn points(&self) -> &[Structure] {
        &self.points
    }

    pub fn descriptor(&self, v: usize) -> &Descriptor {
        &self.basis[v]
    }

    pub fn basis_for(&self, d: &Descriptor) -> Option<usize> {
        self.basis.iter().position(|b| b == d)
    }

    fn thsigma(&self, x0: usize, c: &[usize], x1: usize, a1: &[usize]) -> bool {
        let key = (x0, c.to_vec(), x1, a1.to_vec());
        if let Some(&v) = self.memo.lock().expect("memo lock").get(&key) {
            return v;
        }
        let v = thsigma_contains(&self.points[x0], c, &self.points[x1], a1)
            .expect("window structures share a signature and tuple lengths agree");
        self.memo.lock().expect("memo lock").insert(key, v);
        v
    }

    /// Every representative `σ⁻¹(b̄')` for `σ` ranging over `V_{ā,b̄}`.
    fn sigma_classes(&self, m: &Structure, d: &Descriptor, target: &[usize]) -> Vec<Vec<usize>> {
        let forced: Vec<Option<usize>> = target
            .iter()
            .map(|t| d.b.iter().position(|b| b == t).map(|i| d.a[i]))
            .collect();
        let free = forced.iter().filter(|f| f.is_none()).count();
        let window: Vec<usize> = (0..m.size()).filter(|e| !d.a.contains(e)).collect();
        let fresh_start = d.a.iter().map(|e| e + 1).max().unwrap_or(0).max(m.size());
        // window elements, or the next unused fresh element
        let mut out = Vec::new();
        let mut chosen = Vec::with_capacity(free);
        fn fill(
            slots: usize,
            window: &[usize],
            fresh_next: usize,
            chosen: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
        ) {
            if chosen.len() == slots {
                out.push(chosen.clone());
                return;
            }
            for &w in window {
                if !chosen.contains(&w) {
                    chosen.push(w);
                    fill(slots, window, fresh_next, chosen, out);
                    chosen.pop();
                }
            }
            chosen.push(fresh_next);
            fill(slots, window, fresh_next + 1, chosen, out);
            chosen.pop();
        }
        fill(free, &window, fresh_start, &mut chosen, &mut out);
        out.into_iter()
            .map(|vals| {
                let mut vals = vals.into_iter();
                forced
                    .iter()
                    .map(|f| f.unwrap_or_else(|| vals.next().expect("one value per free slot")))
                    .collect()
            })
            .collect()
    }
}

impl ActionSystem for SymbolicLogicAction {
    fn num_points(&self) -> usize {
        self.points.len()
    }

    fn num_basis(&self) -> usize {
        self.basis.len()
    }

    fn contains(&self, w: usize, v: usize) -> bool {
        self.basis[v].graph_subset(&self.basis[w])
    }

    fn cc(&self, x0: usize, v0: usize, x1: usize, v1: usize) -> bool {
        let (d0, d1) = (&self.basis[v0], &self.basis[v1]);
        self.sigma_classes(&self.points[x0], d0, &d1.b)
            .iter()
            .all(|c| self.thsigma(x0, c, x1, &d1.a))
    }

    fn point_label(&self, x: usize) -> String {
        self.points[x].id().to_string()
    }

    fn basis_label(&self, v: usize) -> String {
        descriptor_label(&self.basis[v].a, &self.basis[v].b)
    }

    // the window holds no cosets pinning more than k points
    fn levels_decrease(&self) -> bool {
        false
    }
}

pub fn build_symbolic_logic(
    signature: Arc<Signature>,
    s: usize,
    k: usize,
    points: Vec<Structure>,
    budget: &Budget,
) -> Result<SymbolicLogicAction> {
    SymbolicLogicAction::new(signature, s, k, points, budget)
}

/// Quadruples over the `(s, k)` window whose stabilized `≤` value changes
/// when the window grows to `(s + 1, k + 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowDrift {
    pub compared: usize,
    pub differing: Vec<(usize, usize, usize, usize)>,
}

pub fn window_drift(sys: &SymbolicLogicAction, budget: &Budget) -> Result<WindowDrift> {
    let (s, k) = sys.window();
    let wide = SymbolicLogicAction::new(sys.signature.clone(), s + 1, k + 1, sys.points.clone(), budget)?;
    let narrow_table: LevelTable = leq_table(sys, None)?;
    let wide_table = leq_table(&wide, None)?;
    let map: Vec<usize> = sys
        .basis
        .iter()
        .map(|d| wide.basis_for(d).expect("wider window contains every narrow descriptor"))
        .collect();
    let n = sys.num_points();
    let nb = sys.num_basis();
    let mut differing = Vec::new();
    let mut compared = 0;
    for x0 in 0..n {
        for v0 in 0..nb {
            for x1 in 0..n {
                for v1 in 0..nb {
                    compared += 1;
                    let narrow = narrow_table.leq(x0, v0, x1, v1, Level::Stab)?;
                    let wide = wide_table.leq(x0, map[v0], x1, map[v1], Level::Stab)?;
                    if narrow != wide {
                        differing.push((x0, v0, x1, v1));
                    }
                }
            }
        }
    }
    Ok(WindowDrift { compared, differing })
}
