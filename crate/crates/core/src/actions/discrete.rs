//! Finite groups acting on finite discrete spaces.

use std::collections::HashMap;
use std::fmt::Write as _;

use itertools::Itertools;

use crate::bits::BitSet;
use crate::budget::Budget;
use crate::hjorth::{ActionSystem, GroupAction};
use crate::{Error, Result};

use super::PermGroup;

/// Which subsets of the group serve as basic open sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BasisSpec {
    AllSubsets,
    SingletonsPlusG,
    /// Sets of element labels.
    Explicit(Vec<Vec<String>>),
}

impl std::str::FromStr for BasisSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "all-subsets" => Ok(BasisSpec::AllSubsets),
            "singletons+G" | "singletons+g" => Ok(BasisSpec::SingletonsPlusG),
            _ => {
                let rest = s
                    .strip_prefix("sets:")
                    .ok_or_else(|| Error::Usage(format!("unknown basis `{s}`")))?;
                let mut sets = Vec::new();
                let mut rest = rest.trim();
                while !rest.is_empty() {
                    let body = rest
                        .strip_prefix('{')
                        .and_then(|r| r.split_once('}'))
                        .ok_or_else(|| Error::Usage(format!("expected `{{labels}}` in `{rest}`")))?;
                    sets.push(
                        body.0
                            .split([',', ' '])
                            .filter(|l| !l.is_empty())
                            .map(String::from)
                            .collect(),
                    );
                    rest = body.1.trim();
                }
                Ok(BasisSpec::Explicit(sets))
            }
        }
    }
}

impl std::fmt::Display for BasisSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BasisSpec::AllSubsets => write!(f, "all-subsets"),
            BasisSpec::SingletonsPlusG => write!(f, "singletons+G"),
            BasisSpec::Explicit(sets) => {
                write!(f, "sets:")?;
                for s in sets {
                    write!(f, " {{{}}}", s.join(","))?;
                }
                Ok(())
            }
        }
    }
}

/// How `cc` compares the sets `V₀·x₀` and `V₁·x₁`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CcMode {
    /// `V₀·x₀ ⊆ V₁·x₁`, the genuine base relation.
    #[default]
    Containment,
    /// `V₀·x₀ ∩ V₁·x₁ ≠ ∅`; a deliberately wrong relation for fault injection.
    Intersection,
}

#[derive(Debug, Clone)]
pub struct FiniteDiscreteAction {
    group: PermGroup,
    spec: BasisSpec,
    basis: Vec<BitSet>,
    basis_index: HashMap<BitSet, usize>,
    // images[v * n + x] = V·x
    images: Vec<BitSet>,
    mode: CcMode,
}

/// Parsed action file: a group of permutations and a basis choice.
#[derive(Debug, Clone)]
pub struct ActionFile {
    pub group: PermGroup,
    pub basis: BasisSpec,
}

impl FiniteDiscreteAction {
    pub fn new(group: PermGroup, spec: BasisSpec) -> Result<Self> {
        let order = group.order();
        let basis: Vec<BitSet> = match &spec {
            BasisSpec::AllSubsets => {
                if order >= usize::BITS as usize - 1 {
                    return Err(Error::budget("all-subsets basis group order", order as u128, 62));
                }
                (1usize..1 << order)
                    .map(|mask| BitSet::from_indices(order, (0..order).filter(|i| mask >> i & 1 == 1)))
                    .collect()
            }
            BasisSpec::SingletonsPlusG => {
                let mut b: Vec<BitSet> = (0..order).map(|g| BitSet::from_indices(order, [g])).collect();
                if order > 1 {
                    b.push(BitSet::full(order));
                }
                b
            }
            BasisSpec::Explicit(sets) => {
                let mut b = Vec::new();
                for labels in sets {
                    if labels.is_empty() {
                        return Err(Error::InvalidSystem("empty basis element".into()));
                    }
                    let mut set = BitSet::new(order);
                    for l in labels {
                        let g = group
                            .find_label(l)
                            .ok_or_else(|| Error::InvalidSystem(format!("unknown element `{l}` in basis")))?;
                        set.insert(g);
                    }
                    if b.contains(&set) {
                        return Err(Error::InvalidSystem(format!("basis element {{{}}} listed twice", labels.join(","))));
                    }
                    b.push(set);
                }
                if b.is_empty() {
                    return Err(Error::InvalidSystem("empty basis".into()));
                }
                b
            }
        };
        let n = group.degree();
        let images = basis
            .iter()
            .flat_map(|v| {
                let group = &group;
                (0..n).map(move |x| BitSet::from_indices(n, v.iter().map(|g| group.apply(g, x))))
            })
            .collect();
        let basis_index = basis.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();
        Ok(FiniteDiscreteAction {
            group,
            spec,
            basis,
            basis_index,
            images,
            mode: CcMode::Containment,
        })
    }

    pub fn with_cc_mode(mut self, mode: CcMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn cc_mode(&self) -> CcMode {
        self.mode
    }

    pub fn perm_group(&self) -> &PermGroup {
        &self.group
    }

    pub fn basis_spec(&self) -> &BasisSpec {
        &self.spec
    }

    pub fn basis_set(&self, v: usize) -> &BitSet {
        &self.basis[v]
    }

    /// `V·x` as a point set.
    pub fn image_of(&self, v: usize, x: usize) -> &BitSet {
        &self.images[v * self.group.degree() + x]
    }

    /// Restriction to an act-closed set of points. Elements that become
    /// equal on the remaining points are merged; the basis kind is kept.
    pub fn restrict_points(&self, keep: &[usize]) -> Result<Self> {
        let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let mut gens = Vec::new();
        for g in self.group.generators() {
            let p: Option<Vec<usize>> = keep.iter().map(|&x| pos.get(&self.group.apply(g, x)).copied()).collect();
            gens.push(p.ok_or_else(|| Error::InvalidSystem("restriction to a set that is not act-closed".into()))?);
        }
        let group = PermGroup::generated(keep.len(), &gens)?;
        let spec = match &self.spec {
            BasisSpec::Explicit(_) => BasisSpec::AllSubsets,
            other => other.clone(),
        };
        Ok(FiniteDiscreteAction::new(group, spec)?.with_cc_mode(self.mode))
    }

    /// The same points under a subgroup, with a basis of the same kind.
    pub fn with_group(&self, group: PermGroup) -> Result<Self> {
        let spec = match &self.spec {
            BasisSpec::Explicit(_) => BasisSpec::AllSubsets,
            other => other.clone(),
        };
        Ok(FiniteDiscreteAction::new(group, spec)?.with_cc_mode(self.mode))
    }

    /// The same group and points under another basis.
    pub fn with_basis(&self, spec: BasisSpec) -> Result<Self> {
        Ok(FiniteDiscreteAction::new(self.group.clone(), spec)?.with_cc_mode(self.mode))
    }

    /// Action file text for this system.
    pub fn to_action_file(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "space size {}", self.group.degree());
        out.push_str("group\n");
        for g in 0..self.group.order() {
            let _ = writeln!(out, "  elem {} : {}", self.group.label(g), self.group.perm(g).iter().join(" "));
        }
        out.push_str("end\n");
        let _ = writeln!(out, "basis {}", self.spec);
        out
    }

    /// One-line summary used in witnesses.
    pub fn summary(&self) -> String {
        let gens = self
            .group
            .generators()
            .iter()
            .map(|&g| format!("[{}]", self.group.perm(g).iter().join(" ")))
            .join(" ");
        format!(
            "X={} |G|={} gens={} basis={}",
            self.group.degree(),
            self.group.order(),
            if gens.is_empty() { "-".into() } else { gens },
            self.spec
        )
    }
}

impl GroupAction for FiniteDiscreteAction {
    fn order(&self) -> usize {
        self.group.order()
    }

    fn identity(&self) -> usize {
        self.group.identity()
    }

    fn act(&self, g: usize, x: usize) -> usize {
        self.group.apply(g, x)
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

impl ActionSystem for FiniteDiscreteAction {
    fn num_points(&self) -> usize {
        self.group.degree()
    }

    fn num_basis(&self) -> usize {
        self.basis.len()
    }

    fn contains(&self, w: usize, v: usize) -> bool {
        self.basis[w].is_subset(&self.basis[v])
    }

    fn cc(&self, x0: usize, v0: usize, x1: usize, v1: usize) -> bool {
        let (a, b) = (self.image_of(v0, x0), self.image_of(v1, x1));
        match self.mode {
            CcMode::Containment => a.is_subset(b),
            CcMode::Intersection => a.intersects(b),
        }
    }

    fn basis_label(&self, v: usize) -> String {
        format!("{{{}}}", self.basis[v].iter().map(|g| self.group.label(g)).join(","))
    }

    fn group(&self) -> Option<&dyn GroupAction> {
        Some(self)
    }

    fn cc_components(&self) -> Option<Vec<Vec<usize>>> {
        let ids = self.group.orbit_ids();
        let mut parts: Vec<Vec<usize>> = Vec::new();
        for x in 0..ids.len() {
            if ids[x] == x {
                parts.push((0..ids.len()).filter(|&y| ids[y] == x).collect());
            }
        }
        Some(parts)
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Parses an action file:
///
/// ```text
/// space size 3
/// group
///   elem e : 0 1 2
///   elem s : 1 0 2
/// end
/// basis all-subsets
/// ```
pub fn parse_action_file(text: &str) -> Result<ActionFile> {
    let mut size: Option<usize> = None;
    let mut elements: Option<Vec<(String, Vec<usize>)>> = None;
    let mut in_group = false;
    let mut basis = None;
    let mut group_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        if in_group {
            match toks.as_slice() {
                ["end"] => in_group = false,
                ["elem", label, ":", images @ ..] => {
                    let n = size.expect("checked when the group opened");
                    let images = images
                        .iter()
                        .map(|t| t.parse::<usize>().map_err(|_| parse_err(line, format!("bad image `{t}`"))))
                        .collect::<Result<Vec<_>>>()?;
                    if images.len() != n {
                        return Err(Error::Schema {
                            line,
                            msg: format!("element `{label}` lists {} images for a space of size {n}", images.len()),
                        });
                    }
                    if let Some(&e) = images.iter().find(|&&e| e >= n) {
                        return Err(Error::Range { line, element: e, size: n });
                    }
                    elements.get_or_insert_with(Vec::new).push((label.to_string(), images));
                }
                _ => return Err(parse_err(line, format!("expected `elem <label> : <images>`, found `{content}`"))),
            }
            continue;
        }
        match toks.as_slice() {
            ["space", "size", n] => {
                if size.is_some() {
                    return Err(parse_err(line, "space declared twice"));
                }
                size = Some(n.parse().map_err(|_| parse_err(line, format!("bad size `{n}`")))?);
            }
            ["group"] => {
                if size.is_none() {
                    return Err(parse_err(line, "`space size` must precede the group"));
                }
                if elements.is_some() {
                    return Err(parse_err(line, "group declared twice"));
                }
                in_group = true;
                group_line = line;
            }
            ["basis", ..] => {
                let rest = content["basis".len()..].trim();
                basis = Some(rest.parse::<BasisSpec>().map_err(|e| parse_err(line, e.to_string()))?);
            }
            _ => return Err(parse_err(line, format!("unexpected `{content}`"))),
        }
    }
    if in_group {
        return Err(parse_err(text.lines().count(), "unterminated group block"));
    }
    let size = size.ok_or_else(|| parse_err(1, "missing `space size`"))?;
    let elements = elements.ok_or_else(|| parse_err(text.lines().count().max(1), "missing group block"))?;
    let group = PermGroup::new(size, elements).map_err(|e| match e {
        Error::InvalidGroup(msg) => Error::InvalidGroup(format!("group block at line {group_line}: {msg}")),
        other => other,
    })?;
    Ok(ActionFile {
        group,
        basis: basis.unwrap_or(BasisSpec::AllSubsets),
    })
}

/// Builds a finite discrete action from file text; `basis` overrides the
/// file's basis line.
pub fn build_finite_discrete(text: &str, basis: Option<BasisSpec>, budget: &Budget) -> Result<FiniteDiscreteAction> {
    let file = parse_action_file(text)?;
    Budget::check("group order", file.group.order(), budget.group)?;
    Budget::check("points", file.group.degree(), budget.points)?;
    FiniteDiscreteAction::new(file.group, basis.unwrap_or(file.basis))
}
