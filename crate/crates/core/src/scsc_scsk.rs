//! Robust submodular cover and knapsack problems:
//! `min max_i f_i(X)` subject to `g_j(X) >= c_j` (cover form) and
//! `max min_j g_j(X)` subject to `f_i(X) <= b_i` (knapsack form), plus the
//! bisection that turns a solver for one form into a solver for the other.

use serde::{Deserialize, Serialize};

use crate::bounds::{supergradient, Supergradient};
use crate::constraints::Knapsack;
use crate::error::{Error, Result};
use crate::function::SetFunction;
use crate::function::{average, kappa_factor_at_least_one, max_value, min_value, worst_curvature};
use crate::robust_max::{
    aggregate_knapsacks, better_candidate, greedy_cover, knapsack_ratios, knapsack_saturate,
    BicriteriaTarget, Reduction,
};
use crate::robust_min::EACertificate;
use crate::set::ElementSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BicriteriaMethod {
    Mmin,
    Aa,
    Ea,
}

/// Cover form: minimize `max_i f_i` subject to `g_j >= targets[j]`.
#[derive(Debug, Clone)]
pub struct ScscInstance {
    pub fs: Vec<SetFunction>,
    pub gs: Vec<SetFunction>,
    pub targets: Vec<f64>,
}

/// Knapsack form: maximize `min_j g_j` subject to `f_i <= budgets[i]`.
#[derive(Debug, Clone)]
pub struct ScskInstance {
    pub fs: Vec<SetFunction>,
    pub gs: Vec<SetFunction>,
    pub budgets: Vec<f64>,
}

fn common_n(fs: &[SetFunction], gs: &[SetFunction]) -> Result<usize> {
    let Some(first) = fs.first() else {
        return Err(Error::Validation("cost function list is empty".into()));
    };
    if gs.is_empty() {
        return Err(Error::Validation("cover function list is empty".into()));
    }
    let n = first.n();
    if fs.iter().chain(gs).any(|f| f.n() != n) {
        return Err(Error::Validation(
            "functions disagree on ground set size".into(),
        ));
    }
    Ok(n)
}

impl ScscInstance {
    pub fn validate(&self) -> Result<usize> {
        let n = common_n(&self.fs, &self.gs)?;
        if self.targets.len() != self.gs.len() {
            return Err(Error::Validation(format!(
                "{} targets for {} cover functions",
                self.targets.len(),
                self.gs.len()
            )));
        }
        for (index, (g, &c)) in self.gs.iter().zip(&self.targets).enumerate() {
            if !(c.is_finite() && c >= 0.0) {
                return Err(Error::Validation(format!(
                    "target {index} = {c} must be >= 0"
                )));
            }
            let attainable = g.full_value();
            if c > attainable + 1e-9 * attainable.abs().max(1.0) {
                return Err(Error::InfeasibleTarget {
                    index,
                    target: c,
                    attainable,
                });
            }
        }
        Ok(n)
    }
}

impl ScskInstance {
    pub fn validate(&self) -> Result<usize> {
        let n = common_n(&self.fs, &self.gs)?;
        if self.budgets.len() != self.fs.len() {
            return Err(Error::Validation(format!(
                "{} budgets for {} cost functions",
                self.budgets.len(),
                self.fs.len()
            )));
        }
        if let Some((i, b)) = self
            .budgets
            .iter()
            .enumerate()
            .find(|(_, b)| !(b.is_finite() && **b > 0.0))
        {
            return Err(Error::Validation(format!(
                "budget {i} = {b} must be positive"
            )));
        }
        Ok(n)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BicriteriaSolution {
    pub set: ElementSet,
    pub f_values: Vec<f64>,
    pub g_values: Vec<f64>,
    /// `max_i f_i(set)` for the cover form, `min_j g_j(set)` for the knapsack form.
    pub objective: f64,
    /// `max_i f_i(set) / b_i` floored at 1, when budgets are declared.
    pub sigma: Option<f64>,
    /// `min_j g_j(set) / c_j` capped at 1, when targets are declared.
    pub rho: Option<f64>,
    /// Inner solver calls made by a conversion.
    pub calls: usize,
    /// Accepted outer iterations.
    pub iterations: usize,
    pub method: BicriteriaMethod,
    /// Declared bound: cost factor for the cover form, violation factor
    /// for the knapsack form.
    pub bound: Option<f64>,
}

/// `max_i f_i(S) / b_i` floored at 1.
pub fn sigma_of(fs: &[SetFunction], budgets: &[f64], s: &ElementSet) -> f64 {
    fs.iter()
        .zip(budgets)
        .map(|(f, b)| f.value(s) / b)
        .fold(1.0, f64::max)
}

/// `min_j g_j(S) / c_j` capped at 1; targets of zero count as met.
pub fn rho_of(gs: &[SetFunction], targets: &[f64], s: &ElementSet) -> f64 {
    gs.iter()
        .zip(targets)
        .filter(|(_, c)| **c > 0.0)
        .map(|(g, c)| g.value(s) / c)
        .fold(1.0, f64::min)
}

fn knapsack_solution(
    inst: &ScskInstance,
    set: ElementSet,
    method: BicriteriaMethod,
) -> BicriteriaSolution {
    BicriteriaSolution {
        f_values: inst.fs.iter().map(|f| f.value(&set)).collect(),
        g_values: inst.gs.iter().map(|g| g.value(&set)).collect(),
        objective: min_value(&inst.gs, &set),
        sigma: Some(sigma_of(&inst.fs, &inst.budgets, &set)),
        rho: None,
        calls: 0,
        iterations: 0,
        method,
        bound: None,
        set,
    }
}

fn cover_solution(
    inst: &ScscInstance,
    set: ElementSet,
    method: BicriteriaMethod,
) -> BicriteriaSolution {
    BicriteriaSolution {
        f_values: inst.fs.iter().map(|f| f.value(&set)).collect(),
        g_values: inst.gs.iter().map(|g| g.value(&set)).collect(),
        objective: max_value(&inst.fs, &set),
        sigma: None,
        rho: Some(rho_of(&inst.gs, &inst.targets, &set)),
        calls: 0,
        iterations: 0,
        method,
        bound: None,
        set,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BicriteriaOptions {
    pub eps: f64,
    pub reduction: Reduction,
    pub max_iters: usize,
    /// One certificate per cost function, for [`BicriteriaMethod::Ea`].
    pub certificates: Option<Vec<EACertificate>>,
}

impl Default for BicriteriaOptions {
    fn default() -> Self {
        BicriteriaOptions {
            eps: 0.1,
            reduction: Reduction::Both,
            max_iters: 50,
            certificates: None,
        }
    }
}

/// Saturate over affine knapsacks, keeping the better of the requested
/// aggregations. Returns `None` when some residual budget is not positive.
fn saturate_knapsacks<A>(
    gs: &[SetFunction],
    knapsacks: &[Knapsack],
    eps: f64,
    reduction: Reduction,
    violation: A,
) -> Result<Option<ElementSet>>
where
    A: Fn(&ElementSet) -> Option<f64>,
{
    if knapsacks
        .iter()
        .any(|k| k.budget.is_nan() || k.budget <= 0.0)
    {
        return Ok(None);
    }
    let n = gs[0].n();
    let admissible: Vec<bool> = (0..n)
        .map(|j| knapsacks.iter().all(|k| k.weights[j] <= k.budget))
        .collect();
    let accept = |s: &ElementSet| violation(s).is_some();
    let run = |r: Reduction| -> Result<ElementSet> {
        let costs = aggregate_knapsacks(knapsacks, r);
        Ok(knapsack_saturate(gs, eps, &costs, &admissible, accept)?.1)
    };
    let key = |s: &ElementSet| (min_value(gs, s), violation(s).unwrap_or(f64::INFINITY));
    Ok(Some(match reduction {
        Reduction::Modmax | Reduction::Avg => run(reduction)?,
        Reduction::Both => {
            let a = run(Reduction::Modmax)?;
            let b = run(Reduction::Avg)?;
            if better_candidate(key(&a), key(&b)) {
                b
            } else {
                a
            }
        }
    }))
}

fn surrogate_knapsacks(
    fs: &[SetFunction],
    scale: &[f64],
    anchor: &ElementSet,
    variant: Supergradient,
) -> Result<Vec<Knapsack>> {
    fs.iter()
        .zip(scale)
        .map(|(f, &cap)| {
            let m = supergradient(f, anchor, variant)?;
            Ok(Knapsack {
                weights: m.weights.iter().map(|w| w.max(0.0)).collect(),
                budget: cap - m.offset,
            })
        })
        .collect()
}

/// Majorization-minimization on the knapsack side: each round replaces the
/// cost functions by supergradients at the incumbent (the grow bound at the
/// empty set first) and solves the resulting knapsack problem. A level is
/// accepted only when `violation` reports the true violation within bound.
fn mmin_knapsack_loop<V>(
    inst: &ScskInstance,
    costs: &[SetFunction],
    caps: &[f64],
    opts: &BicriteriaOptions,
    violation: V,
) -> Result<(ElementSet, usize)>
where
    V: Fn(&ElementSet) -> Option<f64>,
{
    let n = inst.gs[0].n();
    let mut anchor = ElementSet::empty(n);
    let mut variant = Supergradient::Grow;
    let mut best: Option<(f64, ElementSet)> = None;
    let mut accepted = 0;
    for _ in 0..opts.max_iters.max(1) {
        let ks = surrogate_knapsacks(costs, caps, &anchor, variant)?;
        let Some(s) = saturate_knapsacks(&inst.gs, &ks, opts.eps, opts.reduction, &violation)?
        else {
            break;
        };
        let v = min_value(&inst.gs, &s);
        let improved = match &best {
            None => true,
            Some((bv, _)) => v > *bv + 1e-12 * bv.abs().max(1.0),
        };
        if !improved {
            break;
        }
        accepted += 1;
        anchor = s.clone();
        best = Some((v, s));
        variant = Supergradient::Shrink;
    }
    Ok((
        best.map_or_else(|| ElementSet::empty(n), |(_, s)| s),
        accepted,
    ))
}

/// Knapsack form, solved by the chosen method. Violation bounds:
/// `K(n, κ_wc) ln(l/ε)` for mmin, `l K(n, κ_avg) ln(l/ε)` for aa, and
/// `β sqrt(l ln(l/ε))` for ea with certificate tightness `β`, where `l`
/// counts cover objectives in the logarithm and cost functions in front.
pub fn robust_scsk(
    inst: &ScskInstance,
    method: BicriteriaMethod,
    opts: &BicriteriaOptions,
) -> Result<BicriteriaSolution> {
    let n = inst.validate()?;
    let target = BicriteriaTarget::new(opts.eps)?;
    if inst.gs.iter().all(|g| g.full_value() <= 0.0) {
        return Err(Error::Degenerate(
            "every cover objective has g(V) = 0".into(),
        ));
    }
    let lf = inst.fs.len();
    let log_term = (inst.gs.len() as f64 / target.eps).ln();
    let true_violation = |s: &ElementSet| {
        inst.fs
            .iter()
            .zip(&inst.budgets)
            .map(|(f, b)| f.value(s) / b)
            .fold(0.0, f64::max)
    };
    let (set, iterations, bound) = match method {
        BicriteriaMethod::Mmin => {
            let k = kappa_factor_at_least_one(n as f64, worst_curvature(&inst.fs));
            let bound = k * log_term;
            let caps: Vec<f64> = inst.budgets.iter().map(|b| k * b).collect();
            let (s, it) = mmin_knapsack_loop(inst, &inst.fs, &caps, opts, |s| {
                let v = true_violation(s);
                (v <= bound).then_some(v)
            })?;
            (s, it, bound)
        }
        BicriteriaMethod::Aa => {
            let terms = inst
                .fs
                .iter()
                .zip(&inst.budgets)
                .map(|(f, b)| (1.0 / (lf as f64 * b), f.clone()))
                .collect();
            let h = SetFunction::weighted_sum(terms)?;
            let k = kappa_factor_at_least_one(n as f64, h.curvature_or_zero());
            let bound = lf as f64 * k * log_term;
            let (s, it) = mmin_knapsack_loop(inst, &[h], &[k], opts, |s| {
                let v = true_violation(s);
                (v <= bound).then_some(v)
            })?;
            (s, it, bound)
        }
        BicriteriaMethod::Ea => {
            let certs = opts.certificates.as_deref().ok_or_else(|| {
                Error::Validation("the ea method needs one certificate per cost function".into())
            })?;
            if certs.len() != lf {
                return Err(Error::Validation(format!(
                    "{} certificates for {lf} cost functions",
                    certs.len()
                )));
            }
            for (c, f) in certs.iter().zip(&inst.fs) {
                c.verify(f)?;
            }
            let ks: Vec<Knapsack> = certs
                .iter()
                .zip(&inst.budgets)
                .map(|(c, b)| Knapsack {
                    weights: c.weights.clone(),
                    budget: b * b,
                })
                .collect();
            let cap = lf as f64 * log_term;
            let s = saturate_knapsacks(&inst.gs, &ks, opts.eps, opts.reduction, |s| {
                let v = knapsack_ratios(&ks, s).into_iter().fold(0.0, f64::max);
                (v <= cap).then_some(v)
            })?
            .unwrap_or_else(|| ElementSet::empty(n));
            let beta = certs.iter().map(|c| c.tightness).fold(1.0, f64::max);
            (s, 1, beta * cap.sqrt())
        }
    };
    let mut sol = knapsack_solution(inst, set, method);
    sol.iterations = iterations;
    sol.bound = Some(bound);
    Ok(sol)
}

/// `H(x) = sum_{k=1}^{ceil(x)} 1/k`, with `H(x) = 1` for `x <= 1`.
pub fn harmonic(x: f64) -> f64 {
    let m = x.ceil().max(1.0) as u64;
    (1..=m).map(|k| 1.0 / k as f64).sum()
}

/// `l K(n, κ_avg) H(max_j sum_i min(g_i(j), c_i))`, the cover-form bound of
/// the average approximation for integer-valued `g_i`.
pub fn aa_cover_bound(inst: &ScscInstance) -> Result<f64> {
    let n = inst.validate()?;
    let favg = average(&inst.fs)?;
    let k = kappa_factor_at_least_one(n as f64, favg.curvature_or_zero());
    let peak = (0..n)
        .map(|j| {
            inst.gs
                .iter()
                .zip(&inst.targets)
                .map(|(g, &c)| g.singleton(j).min(c))
                .sum::<f64>()
        })
        .fold(0.0, f64::max);
    Ok(inst.fs.len() as f64 * k * harmonic(peak))
}

/// Average approximation for the cover form: the constraints become the
/// single cover `sum_i min(g_i, c_i) >= sum_i c_i`, which greedy covers with
/// supergradient costs of `f_avg`, re-anchored at each new cover while
/// `f_avg` decreases.
fn aa_scsc(inst: &ScscInstance, opts: &BicriteriaOptions) -> Result<BicriteriaSolution> {
    let n = inst.validate()?;
    let total: f64 = inst.targets.iter().sum();
    if total <= 0.0 {
        let mut sol = cover_solution(inst, ElementSet::empty(n), BicriteriaMethod::Aa);
        sol.bound = Some(aa_cover_bound(inst)?);
        return Ok(sol);
    }
    let terms = inst
        .gs
        .iter()
        .zip(&inst.targets)
        .map(|(g, &c)| Ok((1.0, g.truncated(c)?)))
        .collect::<Result<Vec<_>>>()?;
    let cover = SetFunction::weighted_sum(terms)?;
    let favg = average(&inst.fs)?;
    let mut anchor = ElementSet::empty(n);
    let mut variant = Supergradient::Grow;
    let mut best: Option<(f64, ElementSet)> = None;
    let mut accepted = 0;
    for _ in 0..opts.max_iters.max(1) {
        let m = supergradient(&favg, &anchor, variant)?;
        let cost: Vec<f64> = m.weights.iter().map(|w| w.max(0.0)).collect();
        let s = greedy_cover(&cover, total, &cost)?;
        let v = favg.value(&s);
        let improved = match &best {
            None => true,
            Some((bv, _)) => v < *bv - 1e-12 * bv.abs().max(1.0),
        };
        if !improved {
            break;
        }
        accepted += 1;
        anchor = s.clone();
        best = Some((v, s));
        variant = Supergradient::Shrink;
    }
    let set = best.expect("first round always accepted").1;
    let mut sol = cover_solution(inst, set, BicriteriaMethod::Aa);
    sol.iterations = accepted;
    sol.bound = Some(aa_cover_bound(inst)?);
    Ok(sol)
}

/// Cover form. `aa` runs directly; `mmin` and `ea` bisect over a common
/// budget with the knapsack-form solver of the same method, accepting a
/// budget when every `g_j / c_j` reaches `1 - eps`.
pub fn robust_scsc(
    inst: &ScscInstance,
    method: BicriteriaMethod,
    opts: &BicriteriaOptions,
) -> Result<BicriteriaSolution> {
    inst.validate()?;
    match method {
        BicriteriaMethod::Aa => aa_scsc(inst, opts),
        BicriteriaMethod::Mmin | BicriteriaMethod::Ea => {
            let mut inner_bound = None;
            let mut sol = scsc_via_scsk(inst, opts.eps, 1.0 - opts.eps, |sub| {
                let s = robust_scsk(sub, method, opts)?;
                inner_bound = s.bound;
                Ok(s.set)
            })?;
            sol.method = method;
            sol.bound = inner_bound.map(|b| b * (1.0 + opts.eps));
            Ok(sol)
        }
    }
}

/// `ceil(log2(range / eps))`, at least 1: the most inner calls a
/// conversion makes over a value range with ratio `range`.
pub fn call_bound(range: f64, eps: f64) -> usize {
    ((range / eps).log2().ceil().max(1.0)) as usize
}

const COLLAPSE_TOL: f64 = 1e-12;

/// Geometric bisection over `[lo, hi]`. `hi_side_passes` says which end is
/// known to pass (`true` for budgets, where a larger budget is easier).
/// Returns the best passing level and its set, and the number of calls.
fn bisect<F>(
    lo: f64,
    hi: f64,
    eps: f64,
    hi_side_passes: bool,
    mut call: F,
) -> Result<(Option<(f64, ElementSet)>, usize)>
where
    F: FnMut(f64) -> Result<(bool, ElementSet)>,
{
    let fallback = if hi_side_passes { hi } else { lo };
    if hi - lo <= COLLAPSE_TOL * hi.abs().max(1.0) {
        let (ok, s) = call(fallback)?;
        return Ok((ok.then_some((fallback, s)), 1));
    }
    let cap = call_bound(hi / lo, eps);
    let (mut a, mut b) = (lo, hi);
    let mut best: Option<(f64, ElementSet)> = None;
    let mut calls = 0;
    while calls + 1 < cap && b / a > 1.0 + eps {
        let mid = (a * b).sqrt();
        let (ok, s) = call(mid)?;
        calls += 1;
        match (ok, hi_side_passes) {
            (true, true) => {
                b = mid;
                best = Some((mid, s));
            }
            (false, true) => a = mid,
            (true, false) => {
                a = mid;
                best = Some((mid, s));
            }
            (false, false) => b = mid,
        }
    }
    if best.is_none() {
        let (ok, s) = call(fallback)?;
        calls += 1;
        if ok {
            best = Some((fallback, s));
        }
    }
    Ok((best, calls))
}

/// Cover form through a knapsack-form solver. Bisects a common budget `b`
/// on `[min_j max_i f_i(j), max_i f_i(V)]` (smallest positive singleton
/// cost) for the instance `max min_j g_j / c_j` s.t. `max_i f_i <= b`, and
/// keeps the smallest budget whose set reaches coverage `rho`.
pub fn scsc_via_scsk<S>(
    inst: &ScscInstance,
    eps: f64,
    rho: f64,
    mut solver: S,
) -> Result<BicriteriaSolution>
where
    S: FnMut(&ScskInstance) -> Result<ElementSet>,
{
    let n = inst.validate()?;
    BicriteriaTarget::new(eps)?;
    let mut gs = Vec::new();
    for (g, &c) in inst.gs.iter().zip(&inst.targets) {
        if c > 0.0 {
            gs.push(g.scaled(1.0 / c)?);
        }
    }
    if gs.is_empty() {
        return Ok(cover_solution(
            inst,
            ElementSet::empty(n),
            BicriteriaMethod::Mmin,
        ));
    }
    let hi = inst
        .fs
        .iter()
        .map(SetFunction::full_value)
        .fold(0.0, f64::max);
    let lo = (0..n)
        .map(|j| inst.fs.iter().map(|f| f.singleton(j)).fold(0.0, f64::max))
        .filter(|&v| v > 0.0)
        .fold(f64::INFINITY, f64::min);
    let (lo, hi) = if hi > 0.0 && lo.is_finite() {
        (lo, hi)
    } else {
        (1.0, 1.0)
    };
    let l = inst.fs.len();
    let thresh = rho - 1e-9;
    let (best, calls) = bisect(lo, hi, eps, true, |b| {
        let sub = ScskInstance {
            fs: inst.fs.clone(),
            gs: gs.clone(),
            budgets: vec![b; l],
        };
        let s = solver(&sub)?;
        Ok((min_value(&gs, &s) >= thresh, s))
    })?;
    let set = match best {
        Some((_, s)) => s,
        None => ElementSet::full(n),
    };
    let mut sol = cover_solution(inst, set, BicriteriaMethod::Mmin);
    sol.calls = calls;
    Ok(sol)
}

/// Knapsack form through a cover-form solver. Bisects a common target `c`
/// on `[min_j min_i g_i(j), min_i g_i(V)]` (smallest positive singleton
/// value) for `min max_i f_i / b_i` s.t. `min_j g_j >= c`, and keeps the
/// largest target whose set has normalized cost at most `sigma`.
pub fn scsk_via_scsc<S>(
    inst: &ScskInstance,
    eps: f64,
    sigma: f64,
    mut solver: S,
) -> Result<BicriteriaSolution>
where
    S: FnMut(&ScscInstance) -> Result<ElementSet>,
{
    let n = inst.validate()?;
    BicriteriaTarget::new(eps)?;
    let fs = inst
        .fs
        .iter()
        .zip(&inst.budgets)
        .map(|(f, b)| f.scaled(1.0 / b))
        .collect::<Result<Vec<_>>>()?;
    let hi = inst
        .gs
        .iter()
        .map(SetFunction::full_value)
        .fold(f64::INFINITY, f64::min);
    if hi <= 0.0 {
        return Ok(knapsack_solution(
            inst,
            ElementSet::empty(n),
            BicriteriaMethod::Mmin,
        ));
    }
    let lo = (0..n)
        .map(|j| {
            inst.gs
                .iter()
                .map(|g| g.singleton(j))
                .fold(f64::INFINITY, f64::min)
        })
        .filter(|&v| v > 0.0)
        .fold(f64::INFINITY, f64::min)
        .min(hi);
    let lo = if lo.is_finite() { lo } else { hi };
    let k = inst.gs.len();
    let thresh = sigma + 1e-9;
    let (best, calls) = bisect(lo, hi, eps, false, |c| {
        let sub = ScscInstance {
            fs: fs.clone(),
            gs: inst.gs.clone(),
            targets: vec![c; k],
        };
        let s = solver(&sub)?;
        Ok((max_value(&fs, &s) <= thresh, s))
    })?;
    let set = match best {
        Some((_, s)) => s,
        None => ElementSet::empty(n),
    };
    let mut sol = knapsack_solution(inst, set, BicriteriaMethod::Mmin);
    sol.calls = calls;
    Ok(sol)
}
