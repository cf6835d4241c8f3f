//! Verification suites: engine laws checked on seeded ensembles, with the
//! naive oracles as reference.
//!
//! Every check reports the number of cases examined, the number of
//! violations, and for the first failing system a witness shrunk greedily
//! (drop a generator, drop an orbit) while the failure persists.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use itertools::Itertools;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::actions::{
    comparison_scan, BasisSpec, CcMode, Descriptor, FiniteDiscreteAction, FiniteLogicAction, PermGroup,
    SymbolicLogicAction,
};
use crate::bits::{self, BitSet};
use crate::budget::Budget;
use crate::error::ErrorKind;
use crate::gen;
use crate::hjorth::{
    self, fixed_point_set, hjorth_ranks, star_orbit_equivalence_check, vaught_delta, vaught_star, ActionSystem,
    GroupAction, LevelTable,
};
use crate::oracle::{self, NaiveLeq, NaiveScott};
use crate::scott::{scott_rank, ScottTable};
use crate::structures::{brute_isomorphic, thsigma_contains, Domain, Signature, Structure};
use crate::{Error, Level, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Lemmas,
    Iso,
    Vaught,
    Comparison,
    Basis,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = ["lemmas", "iso", "vaught", "comparison", "basis", "all"];

    fn parts(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Lemmas, Suite::Iso, Suite::Vaught, Suite::Comparison, Suite::Basis],
            s => vec![s],
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "lemmas" => Suite::Lemmas,
            "iso" => Suite::Iso,
            "vaught" => Suite::Vaught,
            "comparison" => Suite::Comparison,
            "basis" => Suite::Basis,
            "all" => Suite::All,
            other => {
                return Err(Error::Usage(format!(
                    "unknown suite `{other}`; expected one of {}",
                    Suite::NAMES.join(", ")
                )))
            }
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = [Suite::Lemmas, Suite::Iso, Suite::Vaught, Suite::Comparison, Suite::Basis, Suite::All]
            .iter()
            .position(|s| s == self)
            .expect("listed");
        f.write_str(Suite::NAMES[i])
    }
}

/// Size bounds for generated instances.
///
/// Written as `g≤8,x≤6,n≤3`: `g` group order, `x` points of discrete
/// systems, `n` universe of logic actions, `k` tuple length in the
/// comparison scan, `s` structure size for the Scott checks, `c` number of
/// discrete systems. `<=` and `=` are accepted for `≤`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sizes {
    pub group: usize,
    pub points: usize,
    pub universe: usize,
    pub tuple_len: usize,
    pub structure: usize,
    pub systems: usize,
}

impl Default for Sizes {
    fn default() -> Self {
        Sizes {
            group: 8,
            points: 6,
            universe: 3,
            tuple_len: 2,
            structure: 4,
            systems: 200,
        }
    }
}

impl FromStr for Sizes {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let mut sizes = Sizes::default();
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = ["≤", "<=", "="]
                .iter()
                .find_map(|op| part.split_once(op))
                .ok_or_else(|| Error::Usage(format!("size bound `{part}` should look like g≤8")))?;
            let value: usize = value
                .trim()
                .parse()
                .map_err(|_| Error::Usage(format!("size bound `{part}` needs a natural number")))?;
            let slot = match key.trim() {
                "g" => &mut sizes.group,
                "x" => &mut sizes.points,
                "n" => &mut sizes.universe,
                "k" => &mut sizes.tuple_len,
                "s" => &mut sizes.structure,
                "c" => &mut sizes.systems,
                other => return Err(Error::Usage(format!("unknown size key `{other}`; expected g, x, n, k, s or c"))),
            };
            *slot = value;
        }
        if sizes.group == 0 || sizes.points == 0 || sizes.universe == 0 || sizes.structure == 0 {
            return Err(Error::Usage("size bounds g, x, n and s must be positive".into()));
        }
        Ok(sizes)
    }
}

impl fmt::Display for Sizes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "g<={},x<={},n<={},k<={},s<={},c={}",
            self.group, self.points, self.universe, self.tuple_len, self.structure, self.systems
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub sizes: Sizes,
    /// Replace the base relation of every generated discrete system with a
    /// deliberately wrong one.
    pub inject_fault: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub suite: Suite,
    pub name: &'static str,
    pub cases: u64,
    pub failures: u64,
    pub witness: Option<String>,
    /// Observations that do not affect the verdict.
    pub note: Option<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub suite: Suite,
    pub options: VerifyOptions,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Default)]
struct Tally {
    cases: u64,
    failures: u64,
    first: Option<String>,
}

impl Tally {
    fn case(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first.is_none() {
                self.first = Some(describe());
            }
        }
    }

    fn into_check(self, suite: Suite, name: &'static str) -> CheckResult {
        CheckResult {
            suite,
            name,
            cases: self.cases,
            failures: self.failures,
            witness: self.first,
            note: None,
        }
    }
}

/// A law checked on one discrete system and its table.
type SystemCheck = fn(&FiniteDiscreteAction, &LevelTable, &mut ChaCha8Rng, &Budget) -> Result<Tally>;

struct Ensemble {
    systems: Vec<FiniteDiscreteAction>,
    tables: Vec<std::result::Result<LevelTable, String>>,
    seeds: Vec<u64>,
}

fn system_seed(seed: u64, i: usize) -> u64 {
    seed ^ (i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn build_table(sys: &FiniteDiscreteAction, budget: &Budget) -> Result<std::result::Result<LevelTable, String>> {
    match LevelTable::build(sys, None, budget) {
        Ok(t) => Ok(Ok(t)),
        Err(e) if e.kind() == ErrorKind::Check => Ok(Err(e.to_string())),
        Err(e) => Err(e),
    }
}

impl Ensemble {
    fn new(opts: &VerifyOptions, budget: &Budget) -> Result<Self> {
        let s = &opts.sizes;
        let mut systems = gen::ensemble(opts.seed, s.systems, s.group, s.points);
        if opts.inject_fault {
            systems = systems.into_iter().map(|x| x.with_cc_mode(CcMode::Intersection)).collect();
        }
        let tables = systems.iter().map(|x| build_table(x, budget)).collect::<Result<_>>()?;
        let seeds = (0..systems.len()).map(|i| system_seed(opts.seed, i)).collect();
        Ok(Ensemble { systems, tables, seeds })
    }

    fn run(&self, suite: Suite, name: &'static str, check: SystemCheck, budget: &Budget) -> Result<CheckResult> {
        let mut total = Tally::default();
        for (i, sys) in self.systems.iter().enumerate() {
            let seed = self.seeds[i];
            let tally = evaluate(sys, self.tables[i].as_ref(), seed, check, budget)?;
            total.cases += tally.cases;
            total.failures += tally.failures;
            if tally.failures > 0 && total.first.is_none() {
                let fails = |s: &FiniteDiscreteAction| -> Result<Option<String>> {
                    let table = build_table(s, budget)?;
                    Ok(evaluate(s, table.as_ref(), seed, check, budget)?.first)
                };
                let (small, detail) = shrink(sys.clone(), tally.first.unwrap_or_default(), fails)?;
                total.first = Some(format!("system #{i} shrunk to {}: {detail}", small.summary()));
            }
        }
        Ok(total.into_check(suite, name))
    }
}

fn evaluate(
    sys: &FiniteDiscreteAction,
    table: std::result::Result<&LevelTable, &String>,
    seed: u64,
    check: SystemCheck,
    budget: &Budget,
) -> Result<Tally> {
    match table {
        Ok(t) => check(sys, t, &mut gen::rng(seed), budget),
        Err(msg) => {
            let mut tally = Tally::default();
            tally.case(false, || format!("table rejected: {msg}"));
            Ok(tally)
        }
    }
}

/// Greedy shrinking: keep the first smaller system that still fails.
fn shrink(
    mut sys: FiniteDiscreteAction,
    mut detail: String,
    fails: impl Fn(&FiniteDiscreteAction) -> Result<Option<String>>,
) -> Result<(FiniteDiscreteAction, String)> {
    'outer: loop {
        for candidate in smaller(&sys)? {
            if let Some(d) = fails(&candidate)? {
                sys = candidate;
                detail = d;
                continue 'outer;
            }
        }
        return Ok((sys, detail));
    }
}

fn smaller(sys: &FiniteDiscreteAction) -> Result<Vec<FiniteDiscreteAction>> {
    let group = sys.perm_group();
    let gens = group.generators();
    let mut out = Vec::new();
    for skip in 0..gens.len() {
        let rest: Vec<Vec<usize>> = gens
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .map(|(_, &g)| group.perm(g).to_vec())
            .collect();
        out.push(sys.with_group(PermGroup::generated(group.degree(), &rest)?)?);
    }
    let orbit_of = group.orbit_ids();
    let mut orbits: Vec<usize> = orbit_of.clone();
    orbits.sort_unstable();
    orbits.dedup();
    if orbits.len() > 1 {
        for o in orbits {
            let keep: Vec<usize> = (0..group.degree()).filter(|&x| orbit_of[x] != o).collect();
            out.push(sys.restrict_points(&keep)?);
        }
    }
    Ok(out)
}

fn quad(sys: &FiniteDiscreteAction, x0: usize, v0: usize, x1: usize, v1: usize) -> String {
    format!(
        "({}, {}, {}, {})",
        x0,
        sys.basis_label(v0),
        x1,
        sys.basis_label(v1)
    )
}

fn stab_of(t: &LevelTable) -> usize {
    t.stab().expect("ensemble tables are built to stabilization")
}

fn segment_set(t: &LevelTable, x0: usize, v0: usize, x1: usize, alpha: usize) -> BitSet {
    let nb = t.num_basis();
    match t.segment(x0, v0, x1, alpha) {
        Some(s) => BitSet::from_indices(nb, bits::ones(s)),
        None => BitSet::new(nb),
    }
}

// --- lemma checks -------------------------------------------------------

fn check_oracle_leq(sys: &FiniteDiscreteAction, t: &LevelTable, _: &mut ChaCha8Rng, _: &Budget) -> Result<Tally> {
    let top = stab_of(t) + 1;
    let mut naive = NaiveLeq::new(sys, top);
    let (n, nb) = (sys.num_points(), sys.num_basis());
    let mut tally = Tally::default();
    for alpha in 1..=top {
        for x0 in 0..n {
            for v0 in 0..nb {
                for x1 in 0..n {
                    for v1 in 0..nb {
                        let engine = t.leq(x0, v0, x1, v1, Level::At(alpha))?;
                        let reference = naive.leq(x0, v0, x1, v1, alpha)?;
                        tally.case(engine == reference, || {
                            format!(
                                "{} at level {alpha}: engine {engine}, oracle {reference}",
                                quad(sys, x0, v0, x1, v1)
                            )
                        });
                    }
                }
            }
        }
    }
    Ok(tally)
}

fn check_level_monotone(sys: &FiniteDiscreteAction, t: &LevelTable, _: &mut ChaCha8Rng, _: &Budget) -> Result<Tally> {
    let mut tally = Tally::default();
    let (n, nb) = (sys.num_points(), sys.num_basis());
    for alpha in 1..=stab_of(t) {
        for x0 in 0..n {
            for v0 in 0..nb {
                for x1 in 0..n {
                    let hi = segment_set(t, x0, v0, x1, alpha + 1);
                    let lo = segment_set(t, x0, v0, x1, alpha);
                    tally.case(hi.is_subset(&lo), || {
                        let v1 = hi.iter().find(|&v| !lo.contains(v)).expect("difference");
                        format!("{} holds at level {} but not {alpha}", quad(sys, x0, v0, x1, v1), alpha + 1)
                    });
                }
            }
        }
    }
    Ok(tally)
}

fn check_transitivity(sys: &FiniteDiscreteAction, t: &LevelTable, _: &mut ChaCha8Rng, _: &Budget) -> Result<Tally> {
    let mut tally = Tally::default();
    let (n, nb) = (sys.num_points(), sys.num_basis());
    for alpha in 1..=stab_of(t) {
        let rows: Vec<Vec<BitSet>> = (0..n)
            .map(|x0| (0..nb).flat_map(|v0| (0..n).map(move |x1| (x0, v0, x1))).map(|(x0, v0, x1)| segment_set(t, x0, v0, x1, alpha)).collect())
            .collect();
        // rows[x0][v0 * n + x1]
        for x0 in 0..n {
            for v0 in 0..nb {
                for x1 in 0..n {
                    for v1 in rows[x0][v0 * n + x1].iter() {
                        for x2 in 0..n {
                            let via = &rows[x1][v1 * n + x2];
                            let direct = &rows[x0][v0 * n + x2];
                            tally.case(via.is_subset(direct), || {
                                let v2 = via.iter().find(|&v| !direct.contains(v)).expect("difference");
                                format!(
                                    "level {alpha}: {} and {} but not {}",
                                    quad(sys, x0, v0, x1, v1),
                                    quad(sys, x1, v1, x2, v2),
                                    quad(sys, x0, v0, x2, v2)
                                )
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(tally)
}

/// Immediate neighbours in the containment order: `(below, above)`.
fn covers<S: ActionSystem + ?Sized>(sys: &S) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let nb = sys.num_basis();
    let strict: Vec<BitSet> = (0..nb)
        .map(|v| BitSet::from_indices(nb, (0..nb).filter(|&w| w != v && sys.contains(w, v))))
        .collect();
    let mut below = vec![Vec::new(); nb];
    let mut above = vec![Vec::new(); nb];
    for v in 0..nb {
        let mut deeper = BitSet::new(nb);
        for u in strict[v].iter() {
            deeper.union_with(&strict[u]);
        }
        for w in strict[v].iter().filter(|&w| !deeper.contains(w)) {
            below[v].push(w);
            above[w].push(v);
        }
    }
    (below, above)
}

fn check_set_monotone(sys: &FiniteDiscreteAction, t: &LevelTable, _: &mut ChaCha8Rng, _: &Budget) -> Result<Tally> {
    let mut tally = Tally::default();
    let (n, nb) = (sys.num_points(), sys.num_basis());
    let (below, above) = covers(sys);
    for alpha in 1..=stab_of(t) {
        for x0 in 0..n {
            for x1 in 0..n {
                let segs: Vec<BitSet> = (0..nb).map(|v0| segment_set(t, x0, v0, x1, alpha)).collect();
                for v0 in 0..nb {
                    for &w0 in &below[v0] {
                        tally.case(segs[v0].is_subset(&segs[w0]), || {
                            let v1 = segs[v0].iter().find(|&v| !segs[w0].contains(v)).expect("difference");
                            format!(
                                "level {alpha}: {} holds, shrinking the left set to {} fails",
                                quad(sys, x0, v0, x1, v1),
                                sys.basis_label(w0)
                            )
                        });
                    }
                    for v1 in segs[v0].iter() {
                        for &w1 in &above[v1] {
                            tally.case(segs[v0].contains(w1), || {
                                format!(
                                    "level {alpha}: {} holds, enlarging the right set to {} fails",
                                    quad(sys, x0, v0, x1, v1),
                                    sys.basis_label(w1)
                                )
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(tally)
}

fn check_translation(sys: &FiniteDiscreteAction, t: &LevelTable, _: &mut ChaCha8Rng, _: &Budget) -> Result<Tally> {
    let mut tally = Tally::default();
    for alpha in 1..=stab_of(t) {
        for x in 0..sys.num_points() {
            for v in 0..sys.num_basis() {
                for g in 0..GroupAction::order(sys) {
                    let Some(moved) = sys.translate(v, g) else { continue };
                    let gx = sys.act(g, x);
                    let ok = t.leq(x, v, gx, moved, Level::At(alpha))?;
                    tally.case(ok, || {
                        format!(
                            "level {alpha}: {} fails for g = {}",
                            quad(sys, x, v, gx, moved),
                            sys.element_label(g)
                        )
                    });
                }
            }
        }
    }
    Ok(tally)
}

fn check_equivalence(sys: &FiniteDiscreteAction, t: &LevelTable, _: &mut ChaCha8Rng, _: &Budget) -> Result<Tally> {
    let mut tally = Tally::default();
    let n = sys.num_points();
    for alpha in 1..=stab_of(t) + 1 {
        let level = Level::At(alpha);
        let e: Vec<Vec<bool>> = (0..n)
            .map(|x| (0..n).map(|y| t.equiv(x, y, level)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        for x in 0..n {
            tally.case(e[x][x], || format!("level {alpha}: {x} is not equivalent to itself"));
            for y in 0..n {
                tally.case(e[x][y] == e[y][x], || format!("level {alpha}: equivalence of {x}, {y} is not symmetric"));
                for z in 0..n {
                    tally.case(!(e[x][y] && e[y][z]) || e[x][z], || {
                        format!("level {alpha}: {x} ≡ {y} ≡ {z} but not {x} ≡ {z}")
                    });
                }
                for g in 0..GroupAction::order(sys) {
                    let (gx, gy) = (sys.act(g, x), sys.act(g, y));
                    tally.case(e[x][y] == e[gx][gy], || {
                        format!(
                            "level {alpha}: ({x}, {y}) and their images ({gx}, {gy}) under {} disagree",
                            sys.element_label(g)
                        )
                    });
                }
            }
        }
    }
    Ok(tally)
}

fn check_rank_invariance(sys: &FiniteDiscreteAction, t: &LevelTable, _: &mut ChaCha8Rng, _: &Budget) -> Result<Tally> {
    let mut tally = Tally::default();
    let ranks = hjorth_ranks(sys, t)?;
    for x in 0..sys.num_points() {
        for g in 0..GroupAction::order(sys) {
            let gx = sys.act(g, x);
            tally.case(ranks[x] == ranks[gx], || {
                format!("rank of {x} is {}, of {gx} is {}", ranks[x].value, ranks[gx].value)
            });
        }
    }
    Ok(tally)
}

fn check_collapse(sys: &FiniteDiscreteAction, t: &LevelTable, _: &mut ChaCha8Rng, _: &Budget) -> Result<Tally> {
    let mut tally = Tally::default();
    tally.case(t.stab() == Some(1), || format!("stabilizes at {:?}, not 1", t.stab()));
    let orbits = oracle::orbit_partition(sys)?;
    let n = sys.num_points();
    for x in 0..n {
        for y in 0..n {
            let eq = t.equiv(x, y, Level::At(2))?;
            let same = orbits.orbit_of[x] == orbits.orbit_of[y];
            tally.case(eq == same, || format!("level-2 equivalence of {x}, {y} is {eq}, same orbit is {same}"));
        }
    }
    Ok(tally)
}

fn check_fixed_points(sys: &FiniteDiscreteAction, t: &LevelTable, _: &mut ChaCha8Rng, _: &Budget) -> Result<Tally> {
    let mut tally = Tally::default();
    for u in 0..sys.num_basis() {
        let fp = fixed_point_set(sys, t, u)?;
        let Some(c) = &fp.characterized else { continue };
        tally.case(*c == fp.direct, || {
            format!(
                "U = {}: fixed points {:?}, characterization {:?}",
                sys.basis_label(u),
                fp.direct.iter().collect_vec(),
                c.iter().collect_vec()
            )
        });
    }
    Ok(tally)
}

fn check_rank_comparison(sys: &FiniteDiscreteAction, t: &LevelTable, _: &mut ChaCha8Rng, _: &Budget) -> Result<Tally> {
    let mut tally = Tally::default();
    let n = sys.num_points();
    let ranks = hjorth_ranks(sys, t)?;
    let cmp: Vec<Vec<Ordering>> = (0..n)
        .map(|x| (0..n).map(|y| hjorth::compare_ranks(sys, t, x, y)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    for x in 0..n {
        for y in 0..n {
            tally.case(cmp[x][y] == cmp[y][x].reverse(), || format!("comparisons of {x}, {y} are not opposite"));
            tally.case(cmp[x][y] == ranks[x].value.cmp(&ranks[y].value), || {
                format!("comparison of {x}, {y} disagrees with the rank values")
            });
            for z in 0..n {
                tally.case(!(cmp[x][y].is_le() && cmp[y][z].is_le()) || cmp[x][z].is_le(), || {
                    format!("comparisons of {x}, {y}, {z} are not transitive")
                });
            }
            for g in 0..GroupAction::order(sys) {
                let gx = sys.act(g, x);
                tally.case(cmp[gx][y] == cmp[x][y], || {
                    format!("comparing {gx} with {y} differs from comparing {x} with {y}")
                });
            }
        }
    }
    Ok(tally)
}

fn max_rank(sys: &FiniteDiscreteAction, t: &LevelTable) -> Result<usize> {
    Ok(hjorth_ranks(sys, t)?.iter().map(|r| r.value).max().unwrap_or(1))
}

fn check_subgroup(sys: &FiniteDiscreteAction, t: &LevelTable, rng: &mut ChaCha8Rng, budget: &Budget) -> Result<Tally> {
    let mut tally = Tally::default();
    let group = sys.perm_group();
    let picked: Vec<usize> = (0..group.order()).filter(|_| rng.gen_bool(0.3)).collect();
    let sub = group.subgroup(&group.closure(&picked))?;
    let restricted = sys.with_group(sub)?;
    let top = max_rank(sys, t)?;
    let sub_top = match LevelTable::build(&restricted, None, budget) {
        Ok(st) => max_rank(&restricted, &st)?,
        Err(e) if e.kind() == ErrorKind::Check => {
            tally.case(false, || format!("subgroup table rejected: {e}"));
            return Ok(tally);
        }
        Err(e) => return Err(e),
    };
    tally.case(sub_top <= top + 1, || {
        format!(
            "subgroup of order {} reaches rank {sub_top}, the group only {top}",
            restricted.perm_group().order()
        )
    });
    Ok(tally)
}

// --- isomorphism checks --------------------------------------------------

fn check_orbit_theorem(sys: &FiniteDiscreteAction, t: &LevelTable, _: &mut ChaCha8Rng, _: &Budget) -> Result<Tally> {
    let mut tally = Tally::default();
    let orbits = oracle::orbit_partition(sys)?;
    let ranks = hjorth_ranks(sys, t)?;
    let n = sys.num_points();
    for x in 0..n {
        for y in 0..n {
            let d = ranks[x].value.max(ranks[y].value);
            let eq = t.equiv(x, y, Level::At(d + 1))?;
            let same = orbits.orbit_of[x] == orbits.orbit_of[y];
            tally.case(eq == same, || {
                format!("equivalence of {x}, {y} at level {} is {eq}, same orbit is {same}", d + 1)
            });
        }
        let m = hjorth::minimal_m_with(t, &orbits.orbit_of, x, ranks[x])?;
        tally.case(m.is_some(), || format!("no level cuts out the orbit of {x}"));
    }
    Ok(tally)
}

fn check_invariant_sets(sys: &FiniteDiscreteAction, t: &LevelTable, _: &mut ChaCha8Rng, _: &Budget) -> Result<Tally> {
    let mut tally = Tally::default();
    let sets = match oracle::invariant_sets(sys, 4) {
        Ok(s) => s,
        Err(Error::Budget { .. }) => return Ok(tally),
        Err(e) => return Err(e),
    };
    let n = sys.num_points();
    for x in 0..n {
        for y in 0..n {
            let eq = t.equiv(x, y, Level::Stab)?;
            let same = sets.iter().all(|s| s.contains(x) == s.contains(y));
            tally.case(eq == same, || {
                format!("stabilized equivalence of {x}, {y} is {eq}, shared invariant sets {same}")
            });
        }
    }
    Ok(tally)
}

fn binary_signature() -> Arc<Signature> {
    Arc::new(Signature::new([("edge", 2)]).expect("valid signature"))
}

fn all_graphs(sig: &Arc<Signature>, n: usize) -> Vec<Structure> {
    (0u64..1 << (n * n))
        .map(|mask| {
            let facts = vec![(0..n * n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| vec![i / n, i % n])
                .collect()];
            Structure::new(format!("D{n}.{mask}"), sig.clone(), Domain::Finite(n), facts).expect("in range")
        })
        .collect()
}

/// Scott table against the game oracle on sampled structures and tuples.
fn check_scott_oracle(opts: &VerifyOptions) -> Result<CheckResult> {
    const SAMPLE: usize = 500;
    const PAIRS: usize = 1500;
    let sig = binary_signature();
    let max = opts.sizes.structure;
    let mut rng = gen::rng(opts.seed ^ 0x0005_C077);
    let mut family: Vec<Structure> = Vec::with_capacity(SAMPLE);
    while family.len() < SAMPLE {
        let n = rng.gen_range(1..=max);
        let s = if family.len() % 2 == 1 && family.last().is_some_and(|p: &Structure| p.size() == n) {
            let perm = gen::random_perm(&mut rng, n);
            family.last().expect("nonempty").permuted(&perm)
        } else {
            gen::random_structure(&mut rng, &sig, n, 0.4)
        };
        family.push(s.with_id(format!("S{}", family.len())));
    }
    let table = ScottTable::new(family)?;
    let top = table.stab() + 1;
    let mut tally = Tally::default();
    let mut pairs: Vec<(usize, usize)> = (0..SAMPLE / 2).map(|i| (2 * i, 2 * i + 1)).collect();
    while pairs.len() < PAIRS {
        pairs.push((rng.gen_range(0..SAMPLE), rng.gen_range(0..SAMPLE)));
    }
    for (i, j) in pairs {
        let (m, n) = (&table.family()[i], &table.family()[j]);
        let len = rng.gen_range(0..=m.size().min(n.size()).min(2));
        let a: Vec<usize> = (0..len).map(|_| rng.gen_range(0..m.size())).collect();
        let b: Vec<usize> = (0..len).map(|_| rng.gen_range(0..n.size())).collect();
        let mut game = NaiveScott::new(m, n)?;
        for alpha in 0..=top {
            let engine = table.equiv(i, &a, j, &b, Level::At(alpha))?;
            let reference = game.equiv(&a, &b, alpha)?;
            tally.case(engine == reference, || {
                format!(
                    "{} {a:?} vs {} {b:?} at level {alpha}: table {engine}, game {reference}",
                    m.id(),
                    n.id()
                )
            });
        }
    }
    Ok(tally.into_check(Suite::Iso, "scott-oracle"))
}

/// Stabilized equivalence of empty tuples against brute-force isomorphism,
/// over every digraph on at most `s` vertices.
fn check_scott_iso(opts: &VerifyOptions) -> Result<CheckResult> {
    let sig = binary_signature();
    let mut tally = Tally::default();
    for n in 1..=opts.sizes.structure {
        let graphs = all_graphs(&sig, n);
        let table = ScottTable::new(graphs)?;
        let mut classes: HashMap<u32, Vec<usize>> = HashMap::new();
        for i in 0..table.family().len() {
            classes.entry(table.class_of(i, &[], Level::Stab)?.class).or_default().push(i);
        }
        let family = table.family();
        let mut reps: Vec<usize> = Vec::with_capacity(classes.len());
        for members in classes.values().sorted_by_key(|m| m[0]) {
            let r = members[0];
            reps.push(r);
            for &i in &members[1..] {
                let iso = brute_isomorphic(&family[r], &family[i], &[], &[])?;
                tally.case(iso, || {
                    format!("{} and {} share a class but are not isomorphic", family[r].id(), family[i].id())
                });
            }
        }
        for (p, &r) in reps.iter().enumerate() {
            for &q in &reps[p + 1..] {
                let iso = brute_isomorphic(&family[r], &family[q], &[], &[])?;
                tally.case(!iso, || {
                    format!("{} and {} are isomorphic but in different classes", family[r].id(), family[q].id())
                });
            }
        }
    }
    Ok(tally.into_check(Suite::Iso, "scott-iso"))
}

/// Least level separating the roots of two structures, by the game oracle.
fn separating_level(m: &Structure, n: &Structure, cap: usize) -> Result<Option<usize>> {
    let mut game = NaiveScott::new(m, n)?;
    for alpha in 0..=cap {
        if !game.equiv(&[], &[], alpha)? {
            return Ok(Some(alpha));
        }
    }
    Ok(None)
}

/// `m`, then the least level separating `L_m` from `L_{m+1}` per the engine
/// and per the game oracle.
pub type LadderRow = (usize, Option<usize>, Option<usize>);

/// Separating levels of consecutive finite linear orders up to `max_m`.
pub fn scott_ladder(max_m: usize) -> Result<Vec<LadderRow>> {
    (1..=max_m)
        .map(|m| {
            let (a, b) = (Structure::linear_order(m), Structure::linear_order(m + 1));
            let table = ScottTable::new(vec![a.clone(), b.clone()])?;
            let engine = match table.agreement(0, &[], 1, &[])? {
                None => Some(0),
                Some(Level::At(x)) => Some(x + 1),
                Some(Level::Stab) => None,
            };
            Ok((m, engine, separating_level(&a, &b, table.stab() + 1)?))
        })
        .collect()
}

fn check_scott_ladder() -> Result<CheckResult> {
    let mut tally = Tally::default();
    let l2 = scott_rank(&Structure::linear_order(2))?;
    tally.case(l2.value == 1, || format!("scott rank of L2 is {}", l2.value));
    let ladder = scott_ladder(6)?;
    let mut last = 0;
    for &(m, engine, reference) in &ladder {
        tally.case(engine == reference, || {
            format!("L{m} vs L{}: table separates at {engine:?}, game at {reference:?}", m + 1)
        });
        let level = engine.unwrap_or(usize::MAX);
        tally.case(level >= last, || format!("separating level drops at L{m}"));
        last = level;
    }
    let mut result = tally.into_check(Suite::Iso, "scott-ladder");
    result.note = Some(format!(
        "levels {}",
        ladder
            .iter()
            .map(|(_, e, _)| e.map_or("-".to_string(), |x| x.to_string()))
            .join(",")
    ));
    Ok(result)
}

// --- Vaught checks -------------------------------------------------------

const VAUGHT_SAMPLES: usize = 200;

fn full_basis(sys: &FiniteDiscreteAction) -> Option<usize> {
    GroupAction::basis_of(sys, &BitSet::full(GroupAction::order(sys)))
}

fn vaught_sample(sys: &FiniteDiscreteAction, rng: &mut ChaCha8Rng) -> (BitSet, BitSet, usize) {
    let n = sys.num_points();
    (
        gen::random_point_set(rng, n),
        gen::random_point_set(rng, n),
        rng.gen_range(0..sys.num_basis()),
    )
}

fn show(s: &BitSet) -> String {
    format!("{{{}}}", s.iter().join(","))
}

fn check_vaught_invariance(sys: &FiniteDiscreteAction, _: &LevelTable, rng: &mut ChaCha8Rng, _: &Budget) -> Result<Tally> {
    let mut tally = Tally::default();
    let Some(g) = full_basis(sys) else { return Ok(tally) };
    let invariant = |s: &BitSet| {
        (0..GroupAction::order(sys)).all(|h| s.iter().all(|x| s.contains(sys.act(h, x))))
    };
    for _ in 0..VAUGHT_SAMPLES {
        let (a, _, _) = vaught_sample(sys, rng);
        let (star, delta) = (vaught_star(sys, &a, g)?, vaught_delta(sys, &a, g)?);
        tally.case(invariant(&star) && invariant(&delta), || format!("transforms of {} are not invariant", show(&a)));
        let inv = invariant(&a);
        tally.case(inv == (a == delta) && inv == (a == star), || {
            format!("{}: invariant {inv}, equal to its transforms {} / {}", show(&a), a == star, a == delta)
        });
    }
    Ok(tally)
}

fn check_vaught_duality(sys: &FiniteDiscreteAction, _: &LevelTable, rng: &mut ChaCha8Rng, _: &Budget) -> Result<Tally> {
    let mut tally = Tally::default();
    for _ in 0..VAUGHT_SAMPLES {
        let (a, _, u) = vaught_sample(sys, rng);
        let delta = vaught_delta(sys, &a, u)?;
        let dual = vaught_star(sys, &a.complement(), u)?.complement();
        tally.case(delta == dual, || format!("A = {}, U = {}", show(&a), sys.basis_label(u)));
    }
    Ok(tally)
}

fn check_vaught_lattice(sys: &FiniteDiscreteAction, _: &LevelTable, rng: &mut ChaCha8Rng, _: &Budget) -> Result<Tally> {
    let mut tally = Tally::default();
    for _ in 0..VAUGHT_SAMPLES {
        let (a, b, u) = vaught_sample(sys, rng);
        let mut union = a.clone();
        union.union_with(&b);
        let mut meet = a.clone();
        meet.intersect_with(&b);
        let mut delta_union = vaught_delta(sys, &a, u)?;
        delta_union.union_with(&vaught_delta(sys, &b, u)?);
        let mut star_meet = vaught_star(sys, &a, u)?;
        star_meet.intersect_with(&vaught_star(sys, &b, u)?);
        let describe = || format!("A = {}, B = {}, U = {}", show(&a), show(&b), sys.basis_label(u));
        tally.case(vaught_delta(sys, &union, u)? == delta_union, || format!("union law: {}", describe()));
        tally.case(vaught_star(sys, &meet, u)? == star_meet, || format!("intersection law: {}", describe()));
    }
    Ok(tally)
}

fn check_vaught_monotone(sys: &FiniteDiscreteAction, _: &LevelTable, rng: &mut ChaCha8Rng, _: &Budget) -> Result<Tally> {
    let mut tally = Tally::default();
    for _ in 0..VAUGHT_SAMPLES {
        let (a, b, u) = vaught_sample(sys, rng);
        let mut big = a.clone();
        big.union_with(&b);
        let ok = vaught_star(sys, &a, u)?.is_subset(&vaught_star(sys, &big, u)?)
            && vaught_delta(sys, &a, u)?.is_subset(&vaught_delta(sys, &big, u)?);
        tally.case(ok, || format!("A = {} ⊆ {}, U = {}", show(&a), show(&big), sys.basis_label(u)));
    }
    Ok(tally)
}

fn check_vaught_basis(sys: &FiniteDiscreteAction, _: &LevelTable, rng: &mut ChaCha8Rng, _: &Budget) -> Result<Tally> {
    let mut tally = Tally::default();
    for _ in 0..VAUGHT_SAMPLES {
        let (a, _, u) = vaught_sample(sys, rng);
        let mut meet = BitSet::full(sys.num_points());
        for w in (0..sys.num_basis()).filter(|&w| sys.contains(w, u)) {
            meet.intersect_with(&vaught_delta(sys, &a, w)?);
        }
        tally.case(vaught_star(sys, &a, u)? == meet, || format!("A = {}, U = {}", show(&a), sys.basis_label(u)));
    }
    Ok(tally)
}

fn check_star_orbit(sys: &FiniteDiscreteAction, t: &LevelTable, rng: &mut ChaCha8Rng, _: &Budget) -> Result<Tally> {
    let mut tally = Tally::default();
    let (n, nb) = (sys.num_points(), sys.num_basis());
    for _ in 0..VAUGHT_SAMPLES {
        let (y, w, x, v) = (rng.gen_range(0..n), rng.gen_range(0..nb), rng.gen_range(0..n), rng.gen_range(0..nb));
        let (star, leq) = star_orbit_equivalence_check(sys, t, y, w, x, v)?;
        tally.case(star == leq, || format!("{}: transform {star}, relation {leq}", quad(sys, y, w, x, v)));
    }
    Ok(tally)
}

// --- basis checks --------------------------------------------------------

fn shift_tally(a: &FiniteDiscreteAction, b: &FiniteDiscreteAction, budget: &Budget) -> Result<Tally> {
    let mut tally = Tally::default();
    match hjorth::basis_shift_check(a, b, budget) {
        Ok(diffs) => {
            for (x, d) in diffs.into_iter().enumerate() {
                tally.case(d <= 1, || format!("rank of {x} moves by {d} under basis {}", b.basis_spec()));
            }
        }
        Err(e) if e.kind() == ErrorKind::Check => tally.case(false, || format!("basis {} rejected: {e}", b.basis_spec())),
        Err(e) => return Err(e),
    }
    Ok(tally)
}

fn check_subbasis_shift(sys: &FiniteDiscreteAction, _: &LevelTable, rng: &mut ChaCha8Rng, budget: &Budget) -> Result<Tally> {
    let spec = gen::random_subbasis(rng, sys);
    shift_tally(sys, &sys.with_basis(spec)?, budget)
}

fn check_minimal_basis_shift(sys: &FiniteDiscreteAction, _: &LevelTable, _: &mut ChaCha8Rng, budget: &Budget) -> Result<Tally> {
    shift_tally(sys, &sys.with_basis(BasisSpec::SingletonsPlusG)?, budget)
}

// --- logic actions -------------------------------------------------------

fn check_comparison(opts: &VerifyOptions, budget: &Budget) -> Result<CheckResult> {
    let mut tally = Tally::default();
    let mut shapes = Vec::new();
    let mut runs: Vec<(Arc<Signature>, usize)> =
        (1..=opts.sizes.universe).map(|n| (binary_signature(), n)).collect();
    runs.push((Arc::new(Signature::empty()), opts.sizes.universe));
    for (sig, n) in runs {
        let k = opts.sizes.tuple_len.min(n);
        let report = comparison_scan(sig.clone(), n, k, budget)?;
        tally.cases += report.hypothesis_true as u64;
        tally.failures += report.failures as u64;
        if tally.first.is_none() {
            tally.first = report.counterexamples.first().cloned();
        }
        shapes.push(format!(
            "{}n={n}:{} cells",
            if sig.relations().is_empty() { "empty," } else { "" },
            report.reach_table.len()
        ));
    }
    let mut result = tally.into_check(Suite::Comparison, "comparison");
    result.note = Some(shapes.join(" "));
    Ok(result)
}

fn check_logic_base(opts: &VerifyOptions, budget: &Budget) -> Result<CheckResult> {
    let mut tally = Tally::default();
    let n = opts.sizes.universe;
    let sys = FiniteLogicAction::new(binary_signature(), n, opts.sizes.tuple_len.min(n), None, budget)?;
    let nb = sys.num_basis();
    for orbit in sys.orbits() {
        let pairs: Vec<(usize, usize)> = orbit.iter().flat_map(|&x| (0..nb).map(move |v| (x, v))).collect();
        let rows: Vec<BitSet> = pairs
            .iter()
            .map(|&(x0, v0)| BitSet::from_indices(pairs.len(), (0..pairs.len()).filter(|&j| sys.cc(x0, v0, pairs[j].0, pairs[j].1))))
            .collect();
        for (i, &(x, v)) in pairs.iter().enumerate() {
            tally.case(rows[i].contains(i), || format!("cc not reflexive at ({}, {})", sys.point_label(x), sys.basis_label(v)));
            for j in rows[i].iter() {
                tally.case(rows[j].is_subset(&rows[i]), || {
                    format!(
                        "cc not transitive from ({}, {}) through ({}, {})",
                        sys.point_label(x),
                        sys.basis_label(v),
                        sys.point_label(pairs[j].0),
                        sys.basis_label(pairs[j].1)
                    )
                });
            }
        }
    }
    for w in 0..nb {
        for v in 0..nb {
            let (wa, wb) = sys.descriptor(w);
            let (va, vb) = sys.descriptor(v);
            let group = sys.perm_group();
            let fixes = |a: &[usize], b: &[usize], g: usize| a.iter().zip(b).all(|(&x, &y)| group.apply(g, x) == y);
            let extensional = (0..group.order()).all(|g| !fixes(wa, wb, g) || fixes(va, vb, g));
            tally.case(sys.contains(w, v) == extensional, || {
                format!("containment of {} in {}", sys.basis_label(w), sys.basis_label(v))
            });
        }
    }
    Ok(tally.into_check(Suite::Comparison, "logic-base-relation"))
}

/// Small supported graphs used for the windowed action.
pub fn window_structures(sig: &Arc<Signature>, s: usize) -> Vec<Structure> {
    let shapes: [(&str, usize, &[(usize, usize)]); 6] = [
        ("empty", 1, &[]),
        ("loop", 1, &[(0, 0)]),
        ("edge", 2, &[(0, 1)]),
        ("two-cycle", 2, &[(0, 1), (1, 0)]),
        ("path", 3, &[(0, 1), (1, 2)]),
        ("star", 3, &[(0, 1), (0, 2)]),
    ];
    shapes
        .iter()
        .filter(|(_, size, _)| *size <= s)
        .map(|&(id, size, edges)| {
            let facts = vec![edges.iter().map(|&(a, b)| vec![a, b]).collect()];
            Structure::new(id, sig.clone(), Domain::Supported(size), facts).expect("edges inside the support")
        })
        .collect()
}

fn check_symbolic(opts: &VerifyOptions, budget: &Budget) -> Result<CheckResult> {
    let mut tally = Tally::default();
    let sig = binary_signature();
    let s = budget.support.min(3);
    let k = opts.sizes.tuple_len.min(s).min(2);
    let sys = SymbolicLogicAction::new(sig.clone(), s, k, window_structures(&sig, s), budget)?;
    let g = sys.basis_for(&Descriptor::new(&[], &[])?).expect("the full group is in every window");
    let n = sys.num_points();
    for x in 0..n {
        for y in 0..n {
            let cc = sys.cc(x, g, y, g);
            let th = thsigma_contains(&sys.points()[x], &[], &sys.points()[y], &[])?;
            tally.case(cc == th, || {
                format!("{} vs {}: base relation {cc}, theory containment {th}", sys.point_label(x), sys.point_label(y))
            });
        }
    }
    let table = LevelTable::build(&sys, None, budget)?;
    let mut wide = *budget;
    wide.support += 1;
    wide.tuple_len += 1;
    let drift = crate::actions::window_drift(&sys, &wide)?;
    let mut result = tally.into_check(Suite::Comparison, "symbolic-window");
    result.note = Some(format!(
        "window s={s} k={k} stab={} level-breaks={} drift={}/{}",
        table.stab().map_or("-".to_string(), |v| v.to_string()),
        table.non_monotone_steps().len(),
        drift.differing.len(),
        drift.compared
    ));
    Ok(result)
}

// --- driver --------------------------------------------------------------

/// Runs a suite. Check failures are reported in the result; errors are
/// reserved for bad options and exhausted budgets.
pub fn run(suite: Suite, opts: &VerifyOptions, budget: &Budget) -> Result<VerificationReport> {
    run_selected(suite, None, opts, budget)
}

/// Names of the checks a suite runs, in report order.
pub fn check_names(suite: Suite) -> Vec<&'static str> {
    suite
        .parts()
        .iter()
        .flat_map(|p| match p {
            Suite::Lemmas => &LEMMA_CHECKS[..],
            Suite::Iso => &ISO_CHECKS[..],
            Suite::Vaught => &VAUGHT_CHECKS[..],
            Suite::Comparison => &COMPARISON_CHECKS[..],
            Suite::Basis => &BASIS_CHECKS[..],
            Suite::All => unreachable!("expanded by parts"),
        })
        .copied()
        .collect()
}

const LEMMA_CHECKS: [&str; 11] = [
    "oracle-leq",
    "level-monotone",
    "transitivity",
    "set-monotone",
    "translation",
    "equivalence",
    "rank-invariance",
    "discrete-collapse",
    "fixed-points",
    "rank-comparison",
    "subgroup-rank",
];
const ISO_CHECKS: [&str; 5] = ["orbit-theorem", "invariant-sets", "scott-oracle", "scott-iso", "scott-ladder"];
const VAUGHT_CHECKS: [&str; 6] = [
    "vaught-invariance",
    "vaught-duality",
    "vaught-lattice",
    "vaught-monotone",
    "vaught-basis",
    "star-orbit",
];
const COMPARISON_CHECKS: [&str; 3] = ["comparison", "logic-base-relation", "symbolic-window"];
const BASIS_CHECKS: [&str; 2] = ["basis-shift", "basis-shift-minimal"];

fn system_check(name: &str) -> Option<SystemCheck> {
    Some(match name {
        "oracle-leq" => check_oracle_leq,
        "level-monotone" => check_level_monotone,
        "transitivity" => check_transitivity,
        "set-monotone" => check_set_monotone,
        "translation" => check_translation,
        "equivalence" => check_equivalence,
        "rank-invariance" => check_rank_invariance,
        "discrete-collapse" => check_collapse,
        "fixed-points" => check_fixed_points,
        "rank-comparison" => check_rank_comparison,
        "subgroup-rank" => check_subgroup,
        "orbit-theorem" => check_orbit_theorem,
        "invariant-sets" => check_invariant_sets,
        "vaught-invariance" => check_vaught_invariance,
        "vaught-duality" => check_vaught_duality,
        "vaught-lattice" => check_vaught_lattice,
        "vaught-monotone" => check_vaught_monotone,
        "vaught-basis" => check_vaught_basis,
        "star-orbit" => check_star_orbit,
        "basis-shift" => check_subbasis_shift,
        "basis-shift-minimal" => check_minimal_basis_shift,
        _ => return None,
    })
}

/// Runs only the named checks of a suite, or all of them when `only` is
/// `None`. Unknown names are a usage error.
pub fn run_selected(
    suite: Suite,
    only: Option<&[&str]>,
    opts: &VerifyOptions,
    budget: &Budget,
) -> Result<VerificationReport> {
    let s = &opts.sizes;
    Budget::check("group order", s.group, budget.group)?;
    Budget::check("points", s.points, budget.points)?;
    Budget::check("universe size", s.universe, budget.universe)?;
    Budget::check("tuple length", s.tuple_len, budget.tuple_len)?;
    Budget::check("structure size", s.structure, budget.universe)?;

    let all = check_names(suite);
    if let Some(unknown) = only.into_iter().flatten().find(|n| !all.contains(n)) {
        return Err(Error::Usage(format!("suite {suite} has no check `{unknown}`")));
    }
    let names: Vec<&'static str> = all
        .into_iter()
        .filter(|n| only.is_none_or(|o| o.contains(n)))
        .collect();
    let part_of = |name: &str| {
        suite
            .parts()
            .into_iter()
            .find(|p| check_names(*p).contains(&name))
            .expect("name drawn from the suite")
    };
    let ensemble = if names.iter().any(|n| system_check(n).is_some()) {
        Some(Ensemble::new(opts, budget)?)
    } else {
        None
    };
    let mut checks = Vec::new();
    for name in names {
        let result = match system_check(name) {
            Some(check) => ensemble.as_ref().expect("built").run(part_of(name), name, check, budget)?,
            None => match name {
                "scott-oracle" => check_scott_oracle(opts)?,
                "scott-iso" => check_scott_iso(opts)?,
                "scott-ladder" => check_scott_ladder()?,
                "comparison" => check_comparison(opts, budget)?,
                "logic-base-relation" => check_logic_base(opts, budget)?,
                "symbolic-window" => check_symbolic(opts, budget)?,
                _ => unreachable!("every check name is dispatched"),
            },
        };
        checks.push(result);
    }
    Ok(VerificationReport {
        suite,
        options: opts.clone(),
        checks,
    })
}
