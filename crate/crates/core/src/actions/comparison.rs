//! Stabilized Scott equivalence of `(M, ā)` and `(N, ā')` against the
//! stabilized Hjorth comparison of `(M, V_{ā,b̄})` and `(N, V_{ā',b̄})`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::budget::Budget;
use crate::hjorth::{leq_table, LevelTable};
use crate::scott::{ScottTable, TupleClass};
use crate::structures::Signature;
use crate::{Error, Level, Result};

use super::logic::{injective_tuples, FiniteLogicAction};

/// Highest level at which a relation still holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Reach {
    /// Fails already at the lowest level.
    Never,
    At(usize),
    /// Holds at the stabilized level.
    Stab,
}

impl fmt::Display for Reach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reach::Never => write!(f, "-"),
            Reach::At(a) => write!(f, "{a}"),
            Reach::Stab => write!(f, "stab"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComparisonOutcome {
    pub hypothesis: bool,
    pub conclusion: bool,
}

impl ComparisonOutcome {
    /// Whether the implication holds.
    pub fn holds(&self) -> bool {
        !self.hypothesis || self.conclusion
    }
}

/// A logic action together with its stabilized Hjorth table and the Scott
/// table of its points.
pub struct Comparison {
    pub sys: FiniteLogicAction,
    pub table: LevelTable,
    pub scott: ScottTable,
}

impl Comparison {
    pub fn new(sys: FiniteLogicAction, budget: &Budget) -> Result<Self> {
        let table = LevelTable::build(&sys, None, budget)?;
        let scott = ScottTable::new(sys.points().to_vec())?;
        Ok(Comparison { sys, table, scott })
    }

    fn basis(&self, a: &[usize], b: &[usize]) -> Result<usize> {
        self.sys.basis_for(a, b).ok_or_else(|| {
            Error::Usage(format!(
                "V({a:?};{b:?}) is empty or longer than the basis tuple cap {}",
                self.sys.tuple_len()
            ))
        })
    }

    /// `(M,ā) ≡_stab (N,ā')` against `(M,V_{ā,b̄}) ≤_stab (N,V_{ā',b̄})`.
    pub fn check(&self, m: usize, a: &[usize], n: usize, a2: &[usize], b: &[usize]) -> Result<ComparisonOutcome> {
        if a.len() != a2.len() || a.len() != b.len() {
            return Err(Error::LengthMismatch(a.len(), a2.len().max(b.len())));
        }
        if b.iter().enumerate().any(|(i, x)| b[..i].contains(x)) {
            return Err(Error::NonInjective(b.to_vec()));
        }
        let hypothesis = self.scott.equiv(m, a, n, a2, Level::Stab)?;
        let v0 = self.basis(a, b)?;
        let v1 = self.basis(a2, b)?;
        let conclusion = self.table.leq(m, v0, n, v1, Level::Stab)?;
        Ok(ComparisonOutcome { hypothesis, conclusion })
    }

    fn hjorth_reach(&self, m: usize, v0: usize, n: usize, v1: usize) -> Result<Reach> {
        if self.table.leq(m, v0, n, v1, Level::Stab)? {
            return Ok(Reach::Stab);
        }
        let stab = self.table.stab().expect("built to stabilization");
        let mut reach = Reach::Never;
        for alpha in 1..=stab {
            if !self.table.leq(m, v0, n, v1, Level::At(alpha))? {
                break;
            }
            reach = Reach::At(alpha);
        }
        Ok(reach)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ComparisonReport {
    /// Quadruples `(M, ā, N, ā', b̄)` covered, including vacuous ones.
    pub cases: u128,
    /// Cases whose Scott hypothesis holds.
    pub hypothesis_true: u128,
    /// Cases where the hypothesis holds and the conclusion fails.
    pub failures: u128,
    /// The first few failing cases.
    pub counterexamples: Vec<String>,
    /// `(Scott reach, Hjorth reach) → count`, over pairs of points in the
    /// same orbit.
    pub reach_table: BTreeMap<(Reach, Reach), u64>,
}

/// Exhaustive scan over all structures on `0..n` and injective tuples of
/// length at most `max_len`.
pub fn comparison_scan(signature: Arc<Signature>, n: usize, max_len: usize, budget: &Budget) -> Result<ComparisonReport> {
    let k = max_len.min(n);
    let cmp = Comparison::new(FiniteLogicAction::new(signature, n, k, None, budget)?, budget)?;
    scan(&cmp, k)
}

pub fn scan(cmp: &Comparison, k: usize) -> Result<ComparisonReport> {
    let sys = &cmp.sys;
    let n = sys.universe();
    let np = sys.points().len();
    let tuples: Vec<Vec<Vec<usize>>> = (0..=k).map(|len| injective_tuples(n, len).collect()).collect();
    let mut report = ComparisonReport::default();

    for (len, ts) in tuples.iter().enumerate() {
        let entries = (np * ts.len()) as u128;
        report.cases += entries * entries * ts.len() as u128;
        // group (M, ā) by stabilized Scott class: exactly the hypothesis-true pairs
        let mut classes: HashMap<TupleClass, Vec<(usize, usize)>> = HashMap::new();
        for m in 0..np {
            for (i, a) in ts.iter().enumerate() {
                classes.entry(cmp.scott.class_of(m, a, Level::Stab)?).or_default().push((m, i));
            }
        }
        let mut keys: Vec<_> = classes.keys().cloned().collect();
        keys.sort_by_key(|c| (c.class, c.pattern.clone()));
        for key in keys {
            let members = &classes[&key];
            for &(m, i) in members {
                for &(n2, j) in members {
                    for b in &tuples[len] {
                        report.hypothesis_true += 1;
                        let v0 = cmp.basis(&ts[i], b)?;
                        let v1 = cmp.basis(&ts[j], b)?;
                        if cmp.table.leq(m, v0, n2, v1, Level::Stab)? {
                            continue;
                        }
                        report.failures += 1;
                        if report.counterexamples.len() < 20 {
                            report.counterexamples.push(format!(
                                "M={} a={:?} N={} a'={:?} b={:?}",
                                sys.points()[m].id(),
                                ts[i],
                                sys.points()[n2].id(),
                                ts[j],
                                b
                            ));
                        }
                    }
                }
            }
        }
        for orbit in sys.orbits() {
            for &m in orbit {
                for &n2 in orbit {
                    for a in ts {
                        for a2 in ts {
                            let scott = match cmp.scott.agreement(m, a, n2, a2)? {
                                None => Reach::Never,
                                Some(Level::Stab) => Reach::Stab,
                                Some(Level::At(x)) => Reach::At(x),
                            };
                            for b in ts {
                                let v0 = cmp.basis(a, b)?;
                                let v1 = cmp.basis(a2, b)?;
                                let hj = cmp.hjorth_reach(m, v0, n2, v1)?;
                                *report.reach_table.entry((scott, hj)).or_default() += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Builds the table for an already constructed system, without a budget.
pub fn comparison_for(sys: FiniteLogicAction) -> Result<Comparison> {
    let table = leq_table(&sys, None)?;
    let scott = ScottTable::new(sys.points().to_vec())?;
    Ok(Comparison { sys, table, scott })
}
