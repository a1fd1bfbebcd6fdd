//! Solvers for `min_{X ∈ 𝒞} max_i f_i(X)`: majorization-minimization,
//! the average approximation, a continuous relaxation with threshold
//! rounding, and the square-root certificate reduction.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{lovasz, supergradient, ModularBound, Supergradient};
use crate::constraints::{
    contains_feasible_subset, min_modular, min_modular_within, ConstraintFamily, CoveringFamily,
};
use crate::error::{Error, Result};
use crate::function::{average, kappa_factor_at_least_one, max_value, worst_curvature};
use crate::function::{FunctionSpec, SetFunction};
use crate::oracle::{argmin_feasible, OracleBudget};
use crate::set::ElementSet;

/// How the surrogate problem `min_X max_i (o_i + w_i(X))` is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InnerStrategy {
    /// Minimize `sum_j max_i w_i(j)`.
    Modmax,
    /// Minimize the mean cost `(1/l) sum_i w_i`.
    Avg,
    /// Run both reductions and keep the better set under the true max.
    #[default]
    Both,
    /// Enumerate the feasible sets; exact, small instances only.
    Exhaustive,
}

impl InnerStrategy {
    /// Approximation factor of the surrogate solution for `l` bounds.
    pub fn factor(self, l: usize) -> f64 {
        match self {
            InnerStrategy::Exhaustive => 1.0,
            _ => l as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Mmin,
    Aa,
    Cr,
    Ea,
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverKind::Mmin => "mmin",
            SolverKind::Aa => "aa",
            SolverKind::Cr => "cr",
            SolverKind::Ea => "ea",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Iterate {
    pub set: ElementSet,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustSolution {
    pub set: ElementSet,
    /// `f_i(set)` for every input function.
    pub values: Vec<f64>,
    /// `max_i f_i(set)`.
    pub worst: f64,
    pub trace: Vec<Iterate>,
    pub method: SolverKind,
    /// A-priori approximation factor, evaluated at `|set|` where it depends
    /// on the optimum's size.
    pub bound: Option<f64>,
    /// Best continuous objective, for the relaxation solver.
    pub continuous: Option<f64>,
}

impl RobustSolution {
    fn new(fs: &[SetFunction], set: ElementSet, method: SolverKind, trace: Vec<Iterate>) -> Self {
        let values: Vec<f64> = fs.iter().map(|f| f.value(&set)).collect();
        let worst = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        RobustSolution {
            set,
            values,
            worst,
            trace,
            method,
            bound: None,
            continuous: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MMinOptions {
    pub strategy: InnerStrategy,
    pub max_iters: usize,
    /// Minimum relative decrease for an iterate to be accepted.
    pub rel_tol: f64,
    /// Enumeration budget for [`InnerStrategy::Exhaustive`].
    pub budget: OracleBudget,
}

impl Default for MMinOptions {
    fn default() -> Self {
        MMinOptions {
            strategy: InnerStrategy::Both,
            max_iters: 50,
            rel_tol: 1e-6,
            budget: OracleBudget::from_env(),
        }
    }
}

fn check_family(fs: &[SetFunction], c: &ConstraintFamily) -> Result<usize> {
    let Some(first) = fs.first() else {
        return Err(Error::Validation("function list is empty".into()));
    };
    let n = first.n();
    if fs.iter().any(|f| f.n() != n) {
        return Err(Error::Validation(
            "functions disagree on ground set size".into(),
        ));
    }
    if c.ground_size() != n {
        return Err(Error::Validation(format!(
            "constraint over {} elements, functions over {n}",
            c.ground_size()
        )));
    }
    Ok(n)
}

fn affine_max(bounds: &[ModularBound], s: &ElementSet) -> f64 {
    bounds
        .iter()
        .map(|b| b.value(s))
        .fold(f64::NEG_INFINITY, f64::max)
}

fn clamp_costs(w: Vec<f64>) -> Vec<f64> {
    w.into_iter().map(|x| x.max(0.0)).collect()
}

/// Per-element maximum of the bounds' weights.
pub fn modmax_weights(bounds: &[ModularBound]) -> Vec<f64> {
    let n = bounds.first().map_or(0, ModularBound::n);
    (0..n)
        .map(|j| {
            bounds
                .iter()
                .map(|b| b.weights[j])
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

/// Per-element mean of the bounds' weights.
pub fn avg_weights(bounds: &[ModularBound]) -> Vec<f64> {
    let n = bounds.first().map_or(0, ModularBound::n);
    let l = bounds.len() as f64;
    (0..n)
        .map(|j| bounds.iter().map(|b| b.weights[j]).sum::<f64>() / l)
        .collect()
}

fn pick_better(bounds: &[ModularBound], a: ElementSet, b: ElementSet) -> ElementSet {
    let (va, vb) = (affine_max(bounds, &a), affine_max(bounds, &b));
    match va.total_cmp(&vb).then_with(|| a.cmp(&b)) {
        std::cmp::Ordering::Greater => b,
        _ => a,
    }
}

/// Approximately minimizes `max_i bounds[i].value(X)` over `c`.
pub fn inner_minmax_modular(
    bounds: &[ModularBound],
    c: &ConstraintFamily,
    strategy: InnerStrategy,
    budget: &OracleBudget,
) -> Result<ElementSet> {
    let Some(first) = bounds.first() else {
        return Err(Error::Validation("no bounds given".into()));
    };
    let n = first.n();
    if bounds.iter().any(|b| b.n() != n) || c.ground_size() != n {
        return Err(Error::Validation(
            "bounds and constraint disagree on n".into(),
        ));
    }
    match strategy {
        InnerStrategy::Modmax => min_modular(c, &clamp_costs(modmax_weights(bounds))),
        InnerStrategy::Avg => min_modular(c, &clamp_costs(avg_weights(bounds))),
        InnerStrategy::Both => {
            let a = min_modular(c, &clamp_costs(modmax_weights(bounds)))?;
            if bounds.len() == 1 {
                return Ok(a);
            }
            let b = min_modular(c, &clamp_costs(avg_weights(bounds)))?;
            Ok(pick_better(bounds, a, b))
        }
        InnerStrategy::Exhaustive => {
            argmin_feasible(c, budget, |s| affine_max(bounds, s)).map(|(s, _)| s)
        }
    }
}

/// Factor `alpha * l_inner * K(size, kappa)` guaranteed by majorization-
/// minimization, with `size` the optimum's cardinality.
pub fn mmin_factor(l: usize, strategy: InnerStrategy, alpha: f64, size: usize, kappa: f64) -> f64 {
    alpha * strategy.factor(l) * kappa_factor_at_least_one(size as f64, kappa)
}

/// Majorization-minimization for the worst case of `fs` over `c`. The first
/// surrogate is the grow bound at the empty set; later rounds use shrink
/// bounds at the incumbent and stop once the true objective fails to drop.
pub fn mmin_robust_submin(
    fs: &[SetFunction],
    c: &ConstraintFamily,
    opts: &MMinOptions,
) -> Result<RobustSolution> {
    let n = check_family(fs, c)?;
    c.validate()?;
    let mut anchor = ElementSet::empty(n);
    let mut variant = Supergradient::Grow;
    let mut trace: Vec<Iterate> = Vec::new();
    for _ in 0..opts.max_iters.max(1) {
        let bounds = fs
            .iter()
            .map(|f| supergradient(f, &anchor, variant))
            .collect::<Result<Vec<_>>>()?;
        let next = inner_minmax_modular(&bounds, c, opts.strategy, &opts.budget)?;
        let obj = max_value(fs, &next);
        if let Some(last) = trace.last() {
            let cur = last.objective;
            if !(obj < cur && cur - obj > opts.rel_tol * cur.abs()) {
                break;
            }
        }
        trace.push(Iterate {
            set: next.clone(),
            objective: obj,
        });
        anchor = next;
        variant = Supergradient::Shrink;
    }
    let set = trace.last().expect("at least one iterate").set.clone();
    let mut sol = RobustSolution::new(fs, set, SolverKind::Mmin, trace);
    sol.bound = Some(mmin_factor(
        fs.len(),
        opts.strategy,
        c.approx_factor(),
        sol.set.len(),
        worst_curvature(fs),
    ));
    Ok(sol)
}

/// Majorization-minimization on `f_avg`, reported under `max_i f_i`. The
/// trace records `f_avg` objectives.
pub fn aa_submin(
    fs: &[SetFunction],
    c: &ConstraintFamily,
    opts: &MMinOptions,
) -> Result<RobustSolution> {
    check_family(fs, c)?;
    let favg = average(fs)?;
    let inner = mmin_robust_submin(std::slice::from_ref(&favg), c, opts)?;
    let mut sol = RobustSolution::new(fs, inner.set, SolverKind::Aa, inner.trace);
    sol.bound = Some(
        fs.len() as f64
            * c.approx_factor()
            * kappa_factor_at_least_one(sol.set.len() as f64, favg.curvature_or_zero()),
    );
    Ok(sol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrOptions {
    /// Subgradient steps per epoch.
    pub iters_per_epoch: usize,
    /// Each epoch restarts from the best point with half the step scale.
    pub epochs: usize,
    /// Initial step length in `x`-space; defaults to `sqrt(n) / 2`.
    pub step_scale: Option<f64>,
    pub projection_sweeps: usize,
    pub projection_tol: f64,
}

impl Default for CrOptions {
    fn default() -> Self {
        CrOptions {
            iters_per_epoch: 400,
            epochs: 12,
            step_scale: None,
            projection_sweeps: 200,
            projection_tol: 1e-7,
        }
    }
}

/// Euclidean projection onto `[0,1]^n ∩ {x : sum_{j in W} x_j >= b_W}` by
/// Dykstra's alternating scheme.
struct Projector<'a> {
    family: &'a CoveringFamily,
    sweeps: usize,
    tol: f64,
}

impl Projector<'_> {
    fn project(&self, y: &[f64]) -> Vec<f64> {
        if self.disjoint() {
            self.project_disjoint(y)
        } else {
            self.dykstra(y)
        }
    }

    fn disjoint(&self) -> bool {
        let mut seen = vec![false; self.family.n];
        for con in &self.family.constraints {
            for &j in &con.members {
                if std::mem::replace(&mut seen[j], true) {
                    return false;
                }
            }
        }
        true
    }

    /// Exact projection when no element appears in two constraints: each
    /// block is `clamp(y + lambda, 0, 1)` with the smallest `lambda >= 0`
    /// meeting its demand.
    fn project_disjoint(&self, y: &[f64]) -> Vec<f64> {
        let mut x: Vec<f64> = y.iter().map(|v| v.clamp(0.0, 1.0)).collect();
        for con in &self.family.constraints {
            let d = con.demand as f64;
            let mass = |lambda: f64| -> f64 {
                con.members
                    .iter()
                    .map(|&j| (y[j] + lambda).clamp(0.0, 1.0))
                    .sum()
            };
            if mass(0.0) >= d {
                continue;
            }
            let mut lo = 0.0;
            let mut hi = con.members.iter().map(|&j| 1.0 - y[j]).fold(0.0, f64::max);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if mass(mid) >= d {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if hi - lo <= 1e-15 * hi.abs().max(1.0) {
                    break;
                }
            }
            for &j in &con.members {
                x[j] = (y[j] + hi).clamp(0.0, 1.0);
            }
        }
        x
    }

    fn dykstra(&self, y: &[f64]) -> Vec<f64> {
        let n = y.len();
        let m = self.family.constraints.len();
        let mut x: Vec<f64> = y.to_vec();
        let mut p_box = vec![0.0; n];
        let mut p_half = vec![vec![0.0; n]; m];
        for _ in 0..self.sweeps.max(1) {
            let prev = x.clone();
            for (j, xj) in x.iter_mut().enumerate() {
                let z = *xj + p_box[j];
                let c = z.clamp(0.0, 1.0);
                p_box[j] = z - c;
                *xj = c;
            }
            for (k, con) in self.family.constraints.iter().enumerate() {
                let p = &mut p_half[k];
                let mut z: Vec<f64> = x.iter().zip(p.iter()).map(|(a, b)| a + b).collect();
                let s: f64 = con.members.iter().map(|&j| z[j]).sum();
                let d = con.demand as f64;
                if s < d {
                    let shift = (d - s) / con.members.len() as f64;
                    for &j in &con.members {
                        z[j] += shift;
                    }
                }
                for j in 0..n {
                    p[j] = x[j] + p[j] - z[j];
                }
                x = z;
            }
            let moved = x
                .iter()
                .zip(&prev)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            let out_of_box = x.iter().map(|v| (-v).max(v - 1.0)).fold(0.0, f64::max);
            if moved < self.tol && out_of_box < self.tol && self.family.max_violation(&x) < self.tol
            {
                break;
            }
        }
        x.iter_mut().for_each(|v| *v = v.clamp(0.0, 1.0));
        x
    }
}

fn continuous_objective(fs: &[SetFunction], x: &[f64]) -> Result<(f64, Vec<f64>)> {
    let mut best: Option<(f64, Vec<f64>)> = None;
    for f in fs {
        let e = lovasz(f, x)?;
        if best.as_ref().is_none_or(|(v, _)| e.value > *v) {
            best = Some((e.value, e.subgradient));
        }
    }
    Ok(best.expect("nonempty family"))
}

/// Threshold rounding: the shortest prefix of `x` (sorted descending, ties
/// by id) that contains a feasible set, pruned to a feasible subset.
pub fn round_chain(fs: &[SetFunction], c: &ConstraintFamily, x: &[f64]) -> Result<ElementSet> {
    let n = c.ground_size();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[b].total_cmp(&x[a]).then(a.cmp(&b)));
    let mut prefix = ElementSet::empty(n);
    let mut found = contains_feasible_subset(c, &prefix);
    for &j in &order {
        if found {
            break;
        }
        prefix.insert(j);
        found = contains_feasible_subset(c, &prefix);
    }
    if !found {
        return Err(Error::Rounding(
            "no prefix of the fractional point contains a feasible set".into(),
        ));
    }
    let weights: Vec<f64> = (0..n)
        .map(|j| fs.iter().map(|f| f.singleton(j)).fold(0.0, f64::max))
        .collect();
    min_modular_within(c, &weights, &prefix)
}

/// Projected subgradient on `max_i f̂_i` over the covering polytope, then
/// threshold rounding. Rounded worst value is at most
/// `max_W (|W| - b_W + 1)` times the reported continuous value.
pub fn cr_submin(
    fs: &[SetFunction],
    cover: &CoveringFamily,
    c: &ConstraintFamily,
    opts: &CrOptions,
) -> Result<RobustSolution> {
    let n = check_family(fs, c)?;
    if cover.n != n {
        return Err(Error::Validation(format!(
            "covering family over {} elements, functions over {n}",
            cover.n
        )));
    }
    cover.validate()?;
    let proj = Projector {
        family: cover,
        sweeps: opts.projection_sweeps,
        tol: opts.projection_tol,
    };
    let mut best_x = proj.project(&vec![1.0; n]);
    let mut best_val = continuous_objective(fs, &best_x)?.0;
    let mut step = opts.step_scale.unwrap_or(0.5 * (n as f64).sqrt());
    'epochs: for _ in 0..opts.epochs.max(1) {
        let mut x = best_x.clone();
        for t in 1..=opts.iters_per_epoch.max(1) {
            let (val, g) = continuous_objective(fs, &x)?;
            if val < best_val {
                best_val = val;
                best_x = x.clone();
            }
            let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                break 'epochs;
            }
            let a = step / (t as f64).sqrt() / norm;
            let y: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - a * gi).collect();
            x = proj.project(&y);
        }
        let (val, _) = continuous_objective(fs, &x)?;
        if val < best_val {
            best_val = val;
            best_x = x;
        }
        step *= 0.5;
    }
    let set = round_chain(fs, c, &best_x)?;
    let obj = max_value(fs, &set);
    let trace = vec![Iterate {
        set: set.clone(),
        objective: obj,
    }];
    let mut sol = RobustSolution::new(fs, set, SolverKind::Cr, trace);
    sol.bound = Some(cover.factor() as f64);
    sol.continuous = Some(best_val);
    Ok(sol)
}

/// Modular certificate `w` with `sqrt(w(X)) <= f(X) <= tightness * sqrt(w(X))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EACertificate {
    pub weights: Vec<f64>,
    pub curvature: f64,
    pub tightness: f64,
    /// `f(X) = sqrt(w(X))` everywhere (verified by sampling).
    pub exact: bool,
}

const CERT_SAMPLES: usize = 256;
const CERT_TOL: f64 = 1e-9;

impl EACertificate {
    /// Checks both sides of the sandwich on sampled sets, all singletons, and V.
    pub fn new(f: &SetFunction, weights: Vec<f64>, tightness: f64) -> Result<Self> {
        let mut cert = EACertificate {
            weights,
            curvature: f.curvature_or_zero(),
            tightness,
            exact: false,
        };
        cert.verify(f)?;
        cert.exact = tightness == 1.0;
        Ok(cert)
    }

    /// Certificate for `f = sqrt(w(·))`.
    pub fn exact(f: &SetFunction, weights: Vec<f64>) -> Result<Self> {
        Self::new(f, weights, 1.0)
    }

    /// Certificate derived from the function's description, when the family
    /// has one: for `sum_i sqrt(w(X ∩ C_i))` over `p` blocks, the
    /// multiplicity-weighted `w` with tightness `sqrt(p)`.
    pub fn from_spec(spec: &FunctionSpec, f: &SetFunction) -> Option<Result<Self>> {
        let FunctionSpec::ClusteredSqrt { clusters, weights } = spec else {
            return None;
        };
        let mut w = vec![0.0; weights.len()];
        for cl in clusters {
            for &j in cl {
                w[j] += weights[j];
            }
        }
        let p = clusters
            .iter()
            .filter(|cl| cl.iter().any(|&j| weights[j] > 0.0))
            .count()
            .max(1);
        Some(Self::new(f, w, (p as f64).sqrt()))
    }

    pub fn value(&self, s: &ElementSet) -> f64 {
        s.iter().map(|j| self.weights[j]).sum::<f64>().sqrt()
    }

    pub fn verify(&self, f: &SetFunction) -> Result<()> {
        let n = f.n();
        if self.weights.len() != n {
            return Err(Error::Validation(format!(
                "certificate has {} weights, function has {n} elements",
                self.weights.len()
            )));
        }
        if self.weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::Validation(
                "certificate weights must be finite and >= 0".into(),
            ));
        }
        if !(self.tightness.is_finite() && self.tightness >= 1.0) {
            return Err(Error::Validation(format!(
                "certificate tightness {} must be >= 1",
                self.tightness
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let samples = (0..n)
            .map(|j| ElementSet::from_ids(n, [j]).expect("in range"))
            .chain(std::iter::once(ElementSet::full(n)))
            .chain((0..CERT_SAMPLES).map(|_| {
                let p: f64 = rng.random();
                let ids: Vec<usize> = (0..n).filter(|_| rng.random::<f64>() < p).collect();
                ElementSet::from_ids(n, ids).expect("in range")
            }));
        for s in samples {
            let fx = f.value(&s);
            let r = self.value(&s);
            let tol = CERT_TOL * fx.abs().max(1.0);
            if r > fx + tol || fx > self.tightness * r + tol {
                return Err(Error::Validation(format!(
                    "certificate fails at {s}: sqrt(w(X)) = {r}, f(X) = {fx}, tightness {}",
                    self.tightness
                )));
            }
        }
        Ok(())
    }
}

/// Minimizes `max_i w_i(X)` for the certificates, which also minimizes
/// `max_i sqrt(w_i(X))`, and reports the result under `fs`.
pub fn ea_submin(
    fs: &[SetFunction],
    certs: &[EACertificate],
    c: &ConstraintFamily,
    opts: &MMinOptions,
) -> Result<RobustSolution> {
    check_family(fs, c)?;
    if certs.len() != fs.len() {
        return Err(Error::Validation(
            "one certificate per function required".into(),
        ));
    }
    for (cert, f) in certs.iter().zip(fs) {
        cert.verify(f)?;
    }
    let bounds: Vec<ModularBound> = certs
        .iter()
        .map(|cert| ModularBound::from_weights(cert.weights.clone()))
        .collect();
    let set = inner_minmax_modular(&bounds, c, opts.strategy, &opts.budget)?;
    let obj = max_value(fs, &set);
    let trace = vec![Iterate {
        set: set.clone(),
        objective: obj,
    }];
    let mut sol = RobustSolution::new(fs, set, SolverKind::Ea, trace);
    let beta = certs.iter().map(|c| c.tightness).fold(1.0, f64::max);
    sol.bound = Some((opts.strategy.factor(fs.len()) * c.approx_factor()).sqrt() * beta);
    Ok(sol)
}
