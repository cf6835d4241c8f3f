use std::collections::{HashMap, VecDeque};

use itertools::Itertools;

use crate::{Error, Result};

/// A finite group of permutations of `0..degree`, stored with its full
/// multiplication table.
#[derive(Debug, Clone)]
pub struct PermGroup {
    degree: usize,
    perms: Vec<Vec<usize>>,
    labels: Vec<String>,
    index: HashMap<Vec<usize>, usize>,
    mul: Vec<usize>,
    inv: Vec<usize>,
    identity: usize,
}

fn check_perm(degree: usize, label: &str, p: &[usize]) -> Result<()> {
    if p.len() != degree {
        return Err(Error::InvalidGroup(format!(
            "element `{label}` has {} images, expected {degree}",
            p.len()
        )));
    }
    let mut seen = vec![false; degree];
    for &i in p {
        if i >= degree || std::mem::replace(&mut seen[i], true) {
            return Err(Error::InvalidGroup(format!("element `{label}` is not a permutation")));
        }
    }
    Ok(())
}

impl PermGroup {
    /// Validates that the listed elements form a group: distinct
    /// permutations, closed under composition and inverse.
    pub fn new(degree: usize, elements: Vec<(String, Vec<usize>)>) -> Result<Self> {
        let mut index = HashMap::new();
        let mut labels = Vec::new();
        let mut perms = Vec::new();
        for (label, p) in elements {
            check_perm(degree, &label, &p)?;
            if labels.contains(&label) {
                return Err(Error::InvalidGroup(format!("label `{label}` used twice")));
            }
            if let Some(&other) = index.get(&p) {
                return Err(Error::InvalidGroup(format!(
                    "`{label}` and `{}` are the same permutation; actions must be faithful",
                    labels[other]
                )));
            }
            index.insert(p.clone(), perms.len());
            perms.push(p);
            labels.push(label);
        }
        let identity: Vec<usize> = (0..degree).collect();
        let identity = *index
            .get(&identity)
            .ok_or_else(|| Error::InvalidGroup("identity permutation missing".into()))?;
        let order = perms.len();
        let mut mul = vec![0; order * order];
        for g in 0..order {
            for h in 0..order {
                let gh: Vec<usize> = (0..degree).map(|x| perms[g][perms[h][x]]).collect();
                mul[g * order + h] = *index.get(&gh).ok_or_else(|| {
                    Error::InvalidGroup(format!(
                        "not closed under composition: {} ∘ {} is missing",
                        labels[g], labels[h]
                    ))
                })?;
            }
        }
        let inv = (0..order)
            .map(|g| {
                (0..order)
                    .find(|&h| mul[g * order + h] == identity)
                    .expect("a finite set closed under composition has inverses")
            })
            .collect();
        Ok(PermGroup {
            degree,
            perms,
            labels,
            index,
            mul,
            inv,
            identity,
        })
    }

    /// The group generated by `gens`. Elements are listed in breadth-first
    /// order from the identity; the identity is labelled `e`, others `g1`, `g2`, …
    pub fn generated(degree: usize, gens: &[Vec<usize>]) -> Result<Self> {
        Ok(Self::generated_within(degree, gens, usize::MAX)?.expect("no order bound"))
    }

    /// As [`PermGroup::generated`], or `None` once the closure exceeds
    /// `max_order` elements.
    pub fn generated_within(degree: usize, gens: &[Vec<usize>], max_order: usize) -> Result<Option<Self>> {
        for (i, g) in gens.iter().enumerate() {
            check_perm(degree, &format!("generator {i}"), g)?;
        }
        let identity: Vec<usize> = (0..degree).collect();
        let mut seen = HashMap::from([(identity.clone(), 0usize)]);
        let mut order = vec![identity];
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in gens {
                let next: Vec<usize> = (0..degree).map(|x| g[order[i][x]]).collect();
                if !seen.contains_key(&next) {
                    if order.len() == max_order {
                        return Ok(None);
                    }
                    seen.insert(next.clone(), order.len());
                    queue.push_back(order.len());
                    order.push(next);
                }
            }
        }
        let elements = order
            .into_iter()
            .enumerate()
            .map(|(i, p)| (if i == 0 { "e".to_string() } else { format!("g{i}") }, p))
            .collect();
        PermGroup::new(degree, elements).map(Some)
    }

    /// `S_n` with elements in lexicographic order of their image lists.
    pub fn symmetric(n: usize) -> Self {
        let elements = (0..n)
            .permutations(n)
            .map(|p| (p.iter().join(""), p))
            .collect();
        PermGroup::new(n, elements).expect("the symmetric group is a group")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.perms.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn perm(&self, g: usize) -> &[usize] {
        &self.perms[g]
    }

    pub fn perms(&self) -> &[Vec<usize>] {
        &self.perms
    }

    pub fn label(&self, g: usize) -> &str {
        &self.labels[g]
    }

    pub fn find_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn index_of(&self, perm: &[usize]) -> Option<usize> {
        self.index.get(perm).copied()
    }

    #[inline]
    pub fn apply(&self, g: usize, x: usize) -> usize {
        self.perms[g][x]
    }

    /// `g ∘ h`.
    #[inline]
    pub fn compose(&self, g: usize, h: usize) -> usize {
        self.mul[g * self.perms.len() + h]
    }

    #[inline]
    pub fn inverse(&self, g: usize) -> usize {
        self.inv[g]
    }

    /// A generating set chosen greedily in element order.
    pub fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut reached = vec![self.identity];
        for g in 0..self.order() {
            if reached.contains(&g) {
                continue;
            }
            gens.push(g);
            reached = self.closure(&gens);
        }
        gens
    }

    /// Elements of the subgroup generated by `gens`, ascending.
    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut inside = vec![false; self.order()];
        inside[self.identity] = true;
        let mut stack = vec![self.identity];
        while let Some(a) = stack.pop() {
            for &g in gens {
                let b = self.compose(g, a);
                if !std::mem::replace(&mut inside[b], true) {
                    stack.push(b);
                }
            }
        }
        (0..self.order()).filter(|&g| inside[g]).collect()
    }

    /// The subgroup on the listed elements, which must be closed.
    pub fn subgroup(&self, elements: &[usize]) -> Result<Self> {
        PermGroup::new(
            self.degree,
            elements
                .iter()
                .map(|&g| (self.labels[g].clone(), self.perms[g].clone()))
                .collect(),
        )
    }

    /// Orbit representative ids: `ids[x]` is the least point in the orbit of `x`.
    pub fn orbit_ids(&self) -> Vec<usize> {
        (0..self.degree)
            .map(|x| self.perms.iter().map(|p| p[x]).min().expect("identity present"))
            .collect()
    }
}
