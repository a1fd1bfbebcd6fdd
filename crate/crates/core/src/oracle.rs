//! Exhaustive solvers for tiny instances.
//!
//! Subsets are addressed as bit masks over at most 63 elements. The mask
//! space is split into fixed-size shards that are scored independently
//! (concurrently with the `parallel` feature) and merged by value, then by
//! lexicographic set order, so results do not depend on scheduling.

use std::time::{Duration, Instant};

use crate::constraints::{is_feasible, ConstraintFamily};
use crate::error::{Error, Result};
use crate::function::{max_value, min_value, SetFunction};
use crate::par;
use crate::set::ElementSet;

/// Environment variable overriding [`OracleBudget::max_sets`].
pub const BUDGET_ENV: &str = "ROBSUB_ORACLE_BUDGET";

const SHARD: u64 = 1 << 12;
const MAX_BITS: usize = 63;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleBudget {
    /// Largest number of candidate sets the oracle may examine.
    pub max_sets: u64,
    pub timeout: Duration,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_sets: 1 << 20,
            timeout: Duration::from_secs(60),
        }
    }
}

impl OracleBudget {
    /// Default budget, with `max_sets` taken from [`BUDGET_ENV`] when set.
    pub fn from_env() -> Self {
        let mut b = Self::default();
        if let Some(v) = std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<u64>().ok())
            .filter(|&v| v > 0)
        {
            b.max_sets = v;
        }
        b
    }
}

/// Candidate masks: either every subset or an explicit list.
enum Masks {
    All(usize),
    List(Vec<u64>),
}

impl Masks {
    fn count(&self) -> u64 {
        match self {
            Masks::All(n) => 1u64 << n,
            Masks::List(v) => v.len() as u64,
        }
    }

    fn shard(&self, idx: u64) -> Vec<u64> {
        let lo = idx * SHARD;
        let hi = (lo + SHARD).min(self.count());
        match self {
            Masks::All(_) => (lo..hi).collect(),
            Masks::List(v) => v[lo as usize..hi as usize].to_vec(),
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// All `k`-subsets of `0..n` as masks, in increasing numeric order.
fn combinations(n: usize, k: usize, out: &mut Vec<u64>) {
    if k == 0 {
        out.push(0);
        return;
    }
    let mut m: u64 = (1u64 << k) - 1;
    let limit = 1u64 << n;
    while m < limit {
        out.push(m);
        let c = m & m.wrapping_neg();
        let r = m + c;
        m = (((r ^ m) >> 2) / c) | r;
    }
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_BITS {
        return Err(Error::OracleBudget(format!(
            "ground set of {n} elements exceeds the {MAX_BITS}-element enumeration limit"
        )));
    }
    Ok(())
}

fn masks_for(c: &ConstraintFamily, budget: &OracleBudget) -> Result<Masks> {
    let n = c.ground_size();
    check_size(n)?;
    let sizes: Option<Vec<usize>> = match c {
        ConstraintFamily::CardinalityLower { k, .. } => Some((*k..=n).collect()),
        ConstraintFamily::CardinalityUpper { k, .. } => Some((0..=(*k).min(n)).collect()),
        _ => None,
    };
    match sizes {
        Some(sizes) => {
            let total: u128 = sizes.iter().map(|&j| binomial(n, j)).sum();
            if total > budget.max_sets as u128 {
                return Err(Error::OracleBudget(format!(
                    "{total} candidate sets exceed budget {}",
                    budget.max_sets
                )));
            }
            let mut v = Vec::with_capacity(total as usize);
            for j in sizes {
                combinations(n, j, &mut v);
            }
            Ok(Masks::List(v))
        }
        None => all_masks(n, budget),
    }
}

fn all_masks(n: usize, budget: &OracleBudget) -> Result<Masks> {
    check_size(n)?;
    if n >= 64 || (1u64 << n) > budget.max_sets {
        return Err(Error::OracleBudget(format!(
            "2^{n} candidate sets exceed budget {}",
            budget.max_sets
        )));
    }
    Ok(Masks::All(n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sense {
    Min,
    Max,
}

fn better(sense: Sense, a: &(ElementSet, f64), b: &(ElementSet, f64)) -> bool {
    let ord = match sense {
        Sense::Min => a.1.total_cmp(&b.1),
        Sense::Max => b.1.total_cmp(&a.1),
    };
    ord.then_with(|| a.0.cmp(&b.0)).is_lt()
}

/// Best-scoring set over `masks`; `score` returns `None` for infeasible sets.
fn scan<F>(
    n: usize,
    masks: &Masks,
    budget: &OracleBudget,
    sense: Sense,
    score: F,
) -> Result<Option<(ElementSet, f64)>>
where
    F: Fn(&ElementSet) -> Option<f64> + Sync + Send,
{
    let start = Instant::now();
    let shards = masks.count().div_ceil(SHARD) as usize;
    let partial: Vec<Result<Option<(ElementSet, f64)>>> = par::map_range(shards, |i| {
        if start.elapsed() > budget.timeout {
            return Err(Error::OracleBudget(format!(
                "enumeration exceeded {:?}",
                budget.timeout
            )));
        }
        let mut best: Option<(ElementSet, f64)> = None;
        for m in masks.shard(i as u64) {
            let s = ElementSet::from_mask(n, m);
            if let Some(v) = score(&s) {
                let cand = (s, v);
                if best.as_ref().is_none_or(|b| better(sense, &cand, b)) {
                    best = Some(cand);
                }
            }
        }
        Ok(best)
    });
    let mut best: Option<(ElementSet, f64)> = None;
    for p in partial {
        if let Some(cand) = p? {
            if best.as_ref().is_none_or(|b| better(sense, &cand, b)) {
                best = Some(cand);
            }
        }
    }
    Ok(best)
}

/// Every feasible set of `c`, in a fixed order (by size for cardinality
/// families, by mask value otherwise).
pub fn enumerate_feasible(c: &ConstraintFamily, budget: &OracleBudget) -> Result<Vec<ElementSet>> {
    let n = c.ground_size();
    let masks = masks_for(c, budget)?;
    let start = Instant::now();
    let shards = masks.count().div_ceil(SHARD) as usize;
    let parts: Vec<Result<Vec<ElementSet>>> = par::map_range(shards, |i| {
        if start.elapsed() > budget.timeout {
            return Err(Error::OracleBudget("enumeration timed out".into()));
        }
        Ok(masks
            .shard(i as u64)
            .into_iter()
            .map(|m| ElementSet::from_mask(n, m))
            .filter(|s| is_feasible(c, s))
            .collect())
    });
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// Feasible set of `c` minimizing `score`, ties to the lexicographically
/// smallest set.
pub fn argmin_feasible<F>(
    c: &ConstraintFamily,
    budget: &OracleBudget,
    score: F,
) -> Result<(ElementSet, f64)>
where
    F: Fn(&ElementSet) -> f64 + Sync + Send,
{
    let n = c.ground_size();
    let masks = masks_for(c, budget)?;
    scan(n, &masks, budget, Sense::Min, |s| {
        is_feasible(c, s).then(|| score(s))
    })?
    .ok_or_else(|| Error::Infeasible(format!("{} has no feasible set", c.name())))
}

/// One of the four robust problems, borrowed for the oracle.
#[derive(Debug, Clone, Copy)]
pub enum Problem<'a> {
    /// `min_{X ∈ 𝒞} max_i f_i(X)`.
    SubMin {
        fs: &'a [SetFunction],
        constraint: &'a ConstraintFamily,
    },
    /// `max_{X ∈ 𝒞} min_i g_i(X)`.
    SubMax {
        gs: &'a [SetFunction],
        constraint: &'a ConstraintFamily,
    },
    /// `min max_i f_i(X)` subject to `g_i(X) >= c_i`.
    Scsc {
        fs: &'a [SetFunction],
        gs: &'a [SetFunction],
        targets: &'a [f64],
    },
    /// `max min_i g_i(X)` subject to `f_i(X) <= b_i`.
    Scsk {
        fs: &'a [SetFunction],
        gs: &'a [SetFunction],
        budgets: &'a [f64],
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    pub set: ElementSet,
    pub value: f64,
}

fn slack(x: f64) -> f64 {
    1e-9 * x.abs().max(1.0)
}

/// Meets every target `g_i(X) >= c_i` up to a relative 1e-9 slack.
pub fn meets_targets(gs: &[SetFunction], targets: &[f64], s: &ElementSet) -> bool {
    gs.iter()
        .zip(targets)
        .all(|(g, &c)| g.value(s) >= c - slack(c))
}

/// Meets every budget `f_i(X) <= b_i` up to a relative 1e-9 slack.
pub fn within_budgets(fs: &[SetFunction], budgets: &[f64], s: &ElementSet) -> bool {
    fs.iter()
        .zip(budgets)
        .all(|(f, &b)| f.value(s) <= b + slack(b))
}

fn family_size(fs: &[SetFunction]) -> Result<usize> {
    let first = fs
        .first()
        .ok_or_else(|| Error::Validation("function list is empty".into()))?;
    if fs.iter().any(|f| f.n() != first.n()) {
        return Err(Error::Validation(
            "functions disagree on ground set size".into(),
        ));
    }
    Ok(first.n())
}

/// Exact optimum by enumeration; ties go to the lexicographically smallest set.
pub fn brute_force_solve(problem: Problem<'_>, budget: &OracleBudget) -> Result<OracleSolution> {
    let found = match problem {
        Problem::SubMin { fs, constraint } => {
            let n = family_size(fs)?;
            if n != constraint.ground_size() {
                return Err(Error::Validation(
                    "constraint and functions disagree on n".into(),
                ));
            }
            let masks = masks_for(constraint, budget)?;
            scan(n, &masks, budget, Sense::Min, |s| {
                is_feasible(constraint, s).then(|| max_value(fs, s))
            })?
        }
        Problem::SubMax { gs, constraint } => {
            let n = family_size(gs)?;
            if n != constraint.ground_size() {
                return Err(Error::Validation(
                    "constraint and functions disagree on n".into(),
                ));
            }
            let masks = masks_for(constraint, budget)?;
            scan(n, &masks, budget, Sense::Max, |s| {
                is_feasible(constraint, s).then(|| min_value(gs, s))
            })?
        }
        Problem::Scsc { fs, gs, targets } => {
            let n = family_size(fs)?.max(family_size(gs)?);
            if targets.len() != gs.len() {
                return Err(Error::Validation("one target per g_i required".into()));
            }
            let masks = all_masks(n, budget)?;
            scan(n, &masks, budget, Sense::Min, |s| {
                meets_targets(gs, targets, s).then(|| max_value(fs, s))
            })?
        }
        Problem::Scsk { fs, gs, budgets } => {
            let n = family_size(fs)?.max(family_size(gs)?);
            if budgets.len() != fs.len() {
                return Err(Error::Validation("one budget per f_i required".into()));
            }
            let masks = all_masks(n, budget)?;
            scan(n, &masks, budget, Sense::Max, |s| {
                within_budgets(fs, budgets, s).then(|| min_value(gs, s))
            })?
        }
    };
    found
        .map(|(set, value)| OracleSolution { set, value })
        .ok_or_else(|| Error::Infeasible("no set satisfies the constraints".into()))
}
