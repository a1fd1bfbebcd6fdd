//! Solvers for `max_X min_i g_i(X)`: saturate greedy under a cardinality
//! budget, and the aggregated-knapsack variant for several knapsacks.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::constraints::Knapsack;
use crate::error::{Error, Result};
use crate::function::SetFunction;
use crate::set::ElementSet;

/// Accuracy parameter of a bicriteria guarantee.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BicriteriaTarget {
    pub eps: f64,
}

impl BicriteriaTarget {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Domain(format!("eps = {eps} must lie in (0, 1)")));
        }
        Ok(BicriteriaTarget { eps })
    }

    /// Fraction of the optimum guaranteed on the objective.
    pub fn objective_factor(&self) -> f64 {
        1.0 - self.eps
    }

    /// `ceil(ln(l / eps))`, the number of budget copies under cardinality.
    pub fn cardinality_copies(&self, l: usize) -> usize {
        ((l as f64 / self.eps).ln().ceil() as usize).max(1)
    }

    /// `m * ln(l / eps)` for `m` knapsacks and `l` objectives.
    pub fn knapsack_violation(&self, m: usize, l: usize) -> f64 {
        m as f64 * (l as f64 / self.eps).ln()
    }
}

/// Single-knapsack aggregation of several normalized knapsacks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    /// `max_i w_ij / b_i` per element.
    Modmax,
    /// `(1/m) sum_i w_ij / b_i` per element.
    Avg,
    /// Both aggregations; keep the better outcome.
    #[default]
    Both,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViolationReport {
    /// `w_i(S) / b_i` per knapsack.
    pub ratios: Vec<f64>,
    pub max: f64,
    /// Declared bound on `max`.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxSolution {
    pub set: ElementSet,
    /// `g_i(set)` per objective.
    pub values: Vec<f64>,
    pub min_value: f64,
    /// Saturation level reached by the binary search.
    pub level: f64,
    /// Relaxed cardinality budget, for the cardinality solver.
    pub size_limit: Option<usize>,
    pub violation: Option<ViolationReport>,
}

impl MaxSolution {
    fn new(gs: &[SetFunction], set: ElementSet, level: f64) -> Self {
        let values: Vec<f64> = gs.iter().map(|g| g.value(&set)).collect();
        let min_value = values.iter().copied().fold(f64::INFINITY, f64::min);
        MaxSolution {
            set,
            values,
            min_value,
            level,
            size_limit: None,
            violation: None,
        }
    }
}

const COVER_TOL: f64 = 1e-9;

fn cover_slack(target: f64) -> f64 {
    COVER_TOL * target.abs().max(1.0)
}

#[derive(Debug, PartialEq)]
struct Entry {
    ratio: f64,
    id: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ratio
            .total_cmp(&other.ratio)
            .then_with(|| other.id.cmp(&self.id))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn ratio(gain: f64, cost: f64) -> f64 {
    if cost > 0.0 {
        gain / cost
    } else {
        f64::INFINITY
    }
}

/// Lazy cost-benefit greedy over `allowed` elements until `h` reaches
/// `target`. Stops early and returns `None` once more than `max_items`
/// elements would be needed or no element adds value.
pub(crate) fn greedy_cover_limited(
    h: &SetFunction,
    target: f64,
    cost: &[f64],
    allowed: Option<&[bool]>,
    max_items: usize,
) -> Option<ElementSet> {
    let n = h.n();
    let goal = target - cover_slack(target);
    let mut s = ElementSet::empty(n);
    let mut cur = 0.0;
    if cur >= goal {
        return Some(s);
    }
    let mut heap: BinaryHeap<Entry> = (0..n)
        .filter(|&j| allowed.is_none_or(|a| a[j]))
        .filter(|&j| h.singleton(j) > 0.0)
        .map(|j| Entry {
            ratio: ratio(h.singleton(j), cost[j]),
            id: j,
        })
        .collect();
    while cur < goal {
        if s.len() >= max_items {
            return None;
        }
        let top = heap.pop()?;
        let gain = h.value(&s.with(top.id)) - cur;
        if gain <= 0.0 {
            continue;
        }
        let fresh = Entry {
            ratio: ratio(gain, cost[top.id]),
            id: top.id,
        };
        if heap.peek().is_none_or(|next| fresh >= *next) {
            s.insert(top.id);
            cur += gain;
            cur = cur.max(h.value(&s));
        } else {
            heap.push(fresh);
        }
    }
    Some(s)
}

/// Greedy submodular set cover: add the element with the best
/// gain-per-cost until `h(S) >= target - 1e-9`.
pub fn greedy_cover(h: &SetFunction, target: f64, cost: &[f64]) -> Result<ElementSet> {
    let n = h.n();
    if cost.len() != n {
        return Err(Error::Validation(format!(
            "{} costs for {n} elements",
            cost.len()
        )));
    }
    if let Some(c) = cost.iter().find(|c| !(c.is_finite() && **c >= 0.0)) {
        return Err(Error::Validation(format!(
            "cost {c} must be finite and >= 0"
        )));
    }
    let attainable = h.full_value();
    if attainable < target - cover_slack(target) {
        return Err(Error::Coverage { target, attainable });
    }
    greedy_cover_limited(h, target, cost, None, usize::MAX)
        .ok_or(Error::Coverage { target, attainable })
}

/// `(1/l) sum_i min(g_i, c)`.
pub fn truncated_mean(gs: &[SetFunction], c: f64) -> Result<SetFunction> {
    let w = 1.0 / gs.len() as f64;
    let terms = gs
        .iter()
        .map(|g| Ok((w, g.truncated(c)?)))
        .collect::<Result<Vec<_>>>()?;
    SetFunction::weighted_sum(terms)
}

const SEARCH_ITERS: usize = 60;
const SEARCH_TOL: f64 = 1e-9;

/// Binary search for the largest level `c` at which `attempt` can cover
/// `(1/l) sum_i min(g_i, c)` to `(1 - eps/l) c`.
pub(crate) fn saturate_search<F>(
    gs: &[SetFunction],
    eps: f64,
    mut attempt: F,
) -> Result<(f64, ElementSet)>
where
    F: FnMut(&SetFunction, f64) -> Option<ElementSet>,
{
    let l = gs.len() as f64;
    let n = gs[0].n();
    let top = gs
        .iter()
        .map(SetFunction::full_value)
        .fold(f64::INFINITY, f64::min);
    let mut best = (0.0, ElementSet::empty(n));
    if top <= 0.0 {
        return Ok(best);
    }
    let mut probe = |c: f64| -> Result<Option<ElementSet>> {
        let h = truncated_mean(gs, c)?;
        Ok(attempt(&h, (1.0 - eps / l) * c))
    };
    if let Some(s) = probe(top)? {
        return Ok((top, s));
    }
    let (mut lo, mut hi) = (0.0, top);
    for _ in 0..SEARCH_ITERS {
        if hi - lo <= SEARCH_TOL * top {
            break;
        }
        let mid = 0.5 * (lo + hi);
        match probe(mid)? {
            Some(s) => {
                lo = mid;
                best = (mid, s);
            }
            None => hi = mid,
        }
    }
    Ok(best)
}

fn check_objectives(gs: &[SetFunction]) -> Result<usize> {
    let Some(first) = gs.first() else {
        return Err(Error::Validation("objective list is empty".into()));
    };
    let n = first.n();
    if gs.iter().any(|g| g.n() != n) {
        return Err(Error::Validation(
            "objectives disagree on ground set size".into(),
        ));
    }
    if gs.iter().all(|g| g.full_value() <= 0.0) {
        return Err(Error::Degenerate("every objective has g(V) = 0".into()));
    }
    Ok(n)
}

/// Saturate greedy for `max_{|X| <= k} min_i g_i(X)`. The returned set has
/// at most `k * ceil(ln(l / eps))` elements and `min_i g_i >= (1 - eps) c`.
pub fn saturate_robust_max(gs: &[SetFunction], k: usize, eps: f64) -> Result<MaxSolution> {
    let n = check_objectives(gs)?;
    let target = BicriteriaTarget::new(eps)?;
    if k == 0 {
        return Err(Error::Validation("cardinality budget must be >= 1".into()));
    }
    let limit = k.saturating_mul(target.cardinality_copies(gs.len()));
    let unit = vec![1.0; n];
    let (level, set) = saturate_search(gs, eps, |h, t| {
        greedy_cover_limited(h, t, &unit, None, limit)
    })?;
    let mut sol = MaxSolution::new(gs, set, level);
    sol.size_limit = Some(limit);
    Ok(sol)
}

fn check_knapsacks(n: usize, knapsacks: &[Knapsack]) -> Result<()> {
    if knapsacks.is_empty() {
        return Err(Error::Validation("no knapsacks given".into()));
    }
    for (i, ks) in knapsacks.iter().enumerate() {
        if ks.weights.len() != n {
            return Err(Error::Validation(format!(
                "knapsack {i} has {} weights, expected {n}",
                ks.weights.len()
            )));
        }
        if !(ks.budget.is_finite() && ks.budget > 0.0) {
            return Err(Error::Validation(format!(
                "knapsack {i} budget {} must be positive",
                ks.budget
            )));
        }
        if ks.weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::Validation(format!(
                "knapsack {i} has a negative weight"
            )));
        }
    }
    Ok(())
}

/// Aggregated single-knapsack costs of normalized knapsacks `w_i / b_i`,
/// with unit budget. `Both` is treated as `Modmax`.
pub fn aggregate_knapsacks(knapsacks: &[Knapsack], reduction: Reduction) -> Vec<f64> {
    let n = knapsacks.first().map_or(0, |k| k.weights.len());
    let m = knapsacks.len() as f64;
    (0..n)
        .map(|j| {
            let it = knapsacks.iter().map(|k| k.weights[j] / k.budget);
            match reduction {
                Reduction::Avg => it.sum::<f64>() / m,
                _ => it.fold(0.0, f64::max),
            }
        })
        .collect()
}

/// Largest `w_i(S) / b_i` and the per-knapsack ratios.
pub fn knapsack_ratios(knapsacks: &[Knapsack], s: &ElementSet) -> Vec<f64> {
    knapsacks
        .iter()
        .map(|k| s.iter().map(|j| k.weights[j]).sum::<f64>() / k.budget)
        .collect()
}

/// Saturate over an aggregated single knapsack. Candidate covers are
/// accepted only when `accept` holds; elements with `admissible[j] = false`
/// are never used.
pub(crate) fn knapsack_saturate<A>(
    gs: &[SetFunction],
    eps: f64,
    costs: &[f64],
    admissible: &[bool],
    accept: A,
) -> Result<(f64, ElementSet)>
where
    A: Fn(&ElementSet) -> bool,
{
    saturate_search(gs, eps, |h, t| {
        greedy_cover_limited(h, t, costs, Some(admissible), usize::MAX).filter(|s| accept(s))
    })
}

/// Prefers the larger worst-case value; ties go to the smaller violation,
/// then to the first candidate.
pub(crate) fn better_candidate(a: (f64, f64), b: (f64, f64)) -> bool {
    match b.0.total_cmp(&a.0) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => b.1 < a.1,
    }
}

/// Modified greedy for `max min_i g_i(X)` subject to `w_i(X) <= b_i` for
/// every knapsack. The knapsacks are aggregated into one, the single
/// knapsack is saturated, and a cover is accepted at a level only when its
/// violation `max_i w_i(X) / b_i` is at most `m * ln(l / eps)`.
pub fn multiknapsack_robust_max(
    gs: &[SetFunction],
    knapsacks: &[Knapsack],
    eps: f64,
    reduction: Reduction,
) -> Result<MaxSolution> {
    let n = check_objectives(gs)?;
    check_knapsacks(n, knapsacks)?;
    let target = BicriteriaTarget::new(eps)?;
    let bound = target.knapsack_violation(knapsacks.len(), gs.len());
    let admissible: Vec<bool> = (0..n)
        .map(|j| knapsacks.iter().all(|k| k.weights[j] <= k.budget))
        .collect();
    let accept = |s: &ElementSet| {
        knapsack_ratios(knapsacks, s)
            .into_iter()
            .fold(0.0, f64::max)
            <= bound
    };
    let run = |r: Reduction| {
        let costs = aggregate_knapsacks(knapsacks, r);
        knapsack_saturate(gs, eps, &costs, &admissible, accept)
    };
    let finish = |(level, set): (f64, ElementSet)| {
        let ratios = knapsack_ratios(knapsacks, &set);
        let max = ratios.iter().copied().fold(0.0, f64::max);
        let mut sol = MaxSolution::new(gs, set, level);
        sol.violation = Some(ViolationReport { ratios, max, bound });
        sol
    };
    match reduction {
        Reduction::Modmax | Reduction::Avg => Ok(finish(run(reduction)?)),
        Reduction::Both => {
            let a = finish(run(Reduction::Modmax)?);
            let b = finish(run(Reduction::Avg)?);
            let key = |s: &MaxSolution| (s.min_value, s.violation.as_ref().map_or(0.0, |v| v.max));
            Ok(if better_candidate(key(&a), key(&b)) {
                b
            } else {
                a
            })
        }
    }
}
