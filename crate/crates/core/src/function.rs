//! Monotone submodular set functions.
//!
//! A [`FunctionSpec`] is the serializable description of a function family
//! instance; [`build_function`] validates it against a [`GroundSet`] and
//! produces a [`SetFunction`] handle. Handles are cheap to clone (shared
//! `Arc`), immutable, and carry the singleton values `f(j)` and the top
//! gains `f(j | V \ j)` computed once at construction.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::set::{ElementSet, GroundSet};

/// Concave transform applied per feature in [`FunctionSpec::FeatureBased`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Concave {
    Sqrt,
    Log1p,
}

impl Concave {
    fn apply(self, x: f64) -> f64 {
        match self {
            Concave::Sqrt => x.sqrt(),
            Concave::Log1p => x.ln_1p(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedTerm {
    pub coefficient: f64,
    pub spec: FunctionSpec,
}

/// Serializable description of a monotone submodular function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FunctionSpec {
    /// `f(X) = w(X)`.
    Modular { weights: Vec<f64> },
    /// `f(X) = sum_i sqrt(w(X ∩ C_i))`; blocks may overlap.
    ClusteredSqrt {
        clusters: Vec<Vec<usize>>,
        weights: Vec<f64>,
    },
    /// `f(X) = sum_i max_{j in X} s[i][j]`, with `f(∅) = 0`.
    FacilityLocation { similarity: Vec<Vec<f64>> },
    /// `f(X) = sum_d phi(sum_{j in X} F[j][d])`.
    FeatureBased {
        features: Vec<Vec<f64>>,
        concave: Concave,
    },
    /// `f(X) = w(union of cover[j] for j in X)` over a universe of items.
    Coverage {
        cover: Vec<Vec<usize>>,
        item_weights: Vec<f64>,
    },
    /// `f(X) = min(inner(X), cap)`.
    Truncation { inner: Box<FunctionSpec>, cap: f64 },
    /// `f(X) = sum_t a_t f_t(X)`.
    WeightedSum { terms: Vec<WeightedTerm> },
}

type EvalFn = dyn Fn(&ElementSet) -> f64 + Send + Sync;

enum Kernel {
    Modular(Vec<f64>),
    ClusteredSqrt {
        clusters: Vec<Vec<usize>>,
        weights: Vec<f64>,
    },
    FacilityLocation(Vec<Vec<f64>>),
    FeatureBased {
        features: Vec<Vec<f64>>,
        dims: usize,
        concave: Concave,
    },
    Coverage {
        cover: Vec<Vec<usize>>,
        item_weights: Vec<f64>,
    },
    Truncation {
        inner: SetFunction,
        cap: f64,
    },
    WeightedSum(Vec<(f64, SetFunction)>),
    Custom(Arc<EvalFn>),
}

impl Kernel {
    fn eval(&self, s: &ElementSet) -> f64 {
        match self {
            Kernel::Modular(w) => s.iter().map(|j| w[j]).sum(),
            Kernel::ClusteredSqrt { clusters, weights } => clusters
                .iter()
                .map(|c| {
                    c.iter()
                        .filter(|&&j| s.contains(j))
                        .map(|&j| weights[j])
                        .sum::<f64>()
                        .sqrt()
                })
                .sum(),
            Kernel::FacilityLocation(sim) => {
                if s.is_empty() {
                    return 0.0;
                }
                sim.iter()
                    .map(|row| s.iter().map(|j| row[j]).fold(0.0, f64::max))
                    .sum()
            }
            Kernel::FeatureBased {
                features,
                dims,
                concave,
            } => {
                let mut acc = vec![0.0; *dims];
                for j in s.iter() {
                    for (a, x) in acc.iter_mut().zip(&features[j]) {
                        *a += x;
                    }
                }
                acc.into_iter().map(|a| concave.apply(a)).sum()
            }
            Kernel::Coverage {
                cover,
                item_weights,
            } => {
                let mut seen = vec![false; item_weights.len()];
                let mut total = 0.0;
                for j in s.iter() {
                    for &u in &cover[j] {
                        if !seen[u] {
                            seen[u] = true;
                            total += item_weights[u];
                        }
                    }
                }
                total
            }
            Kernel::Truncation { inner, cap } => inner.value(s).min(*cap),
            Kernel::WeightedSum(terms) => terms.iter().map(|(a, f)| a * f.value(s)).sum(),
            Kernel::Custom(f) => f(s),
        }
    }
}

struct Inner {
    n: usize,
    kernel: Kernel,
    singletons: Vec<f64>,
    top_gains: Vec<f64>,
    full: f64,
}

/// Immutable, shareable handle to a normalized monotone submodular function.
#[derive(Clone)]
pub struct SetFunction {
    inner: Arc<Inner>,
}

impl fmt::Debug for SetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let family = match &self.inner.kernel {
            Kernel::Modular(_) => "modular",
            Kernel::ClusteredSqrt { .. } => "clustered_sqrt",
            Kernel::FacilityLocation(_) => "facility_location",
            Kernel::FeatureBased { .. } => "feature_based",
            Kernel::Coverage { .. } => "coverage",
            Kernel::Truncation { .. } => "truncation",
            Kernel::WeightedSum(_) => "weighted_sum",
            Kernel::Custom(_) => "custom",
        };
        f.debug_struct("SetFunction")
            .field("family", &family)
            .field("n", &self.inner.n)
            .field("f(V)", &self.inner.full)
            .finish()
    }
}

impl SetFunction {
    fn from_kernel(n: usize, kernel: Kernel) -> Self {
        let empty = ElementSet::empty(n);
        let full = ElementSet::full(n);
        let full_value = kernel.eval(&full);
        let singletons = (0..n).map(|j| kernel.eval(&empty.with(j))).collect();
        let top_gains = (0..n)
            .map(|j| full_value - kernel.eval(&full.without(j)))
            .collect();
        SetFunction {
            inner: Arc::new(Inner {
                n,
                kernel,
                singletons,
                top_gains,
                full: full_value,
            }),
        }
    }

    /// Marginal gains along `order`: entry `order[t]` is
    /// `f(S_t) - f(S_{t-1})` for the prefixes `S_t` of `order`. Kernels with
    /// additive state update it in place instead of re-evaluating prefixes.
    pub fn chain_gains(&self, order: &[usize]) -> Vec<f64> {
        let n = self.n();
        let mut w = vec![0.0; n];
        match &self.inner.kernel {
            Kernel::Modular(weights) => {
                for &j in order {
                    w[j] = weights[j];
                }
            }
            Kernel::ClusteredSqrt { clusters, weights } => {
                let mut member_of: Vec<Vec<usize>> = vec![Vec::new(); n];
                for (c, cl) in clusters.iter().enumerate() {
                    for &j in cl {
                        member_of[j].push(c);
                    }
                }
                let mut mass = vec![0.0; clusters.len()];
                for &j in order {
                    w[j] = member_of[j]
                        .iter()
                        .map(|&c| {
                            let before = mass[c];
                            mass[c] += weights[j];
                            f64::sqrt(mass[c]) - f64::sqrt(before)
                        })
                        .sum();
                }
            }
            Kernel::FacilityLocation(sim) => {
                let mut best = vec![0.0f64; sim.len()];
                for &j in order {
                    w[j] = sim
                        .iter()
                        .zip(best.iter_mut())
                        .map(|(row, b)| {
                            let gain = (row[j] - *b).max(0.0);
                            *b = b.max(row[j]);
                            gain
                        })
                        .sum();
                }
            }
            Kernel::FeatureBased {
                features,
                dims,
                concave,
            } => {
                let mut acc = vec![0.0; *dims];
                for &j in order {
                    w[j] = acc
                        .iter_mut()
                        .zip(&features[j])
                        .map(|(a, x)| {
                            let before = concave.apply(*a);
                            *a += x;
                            concave.apply(*a) - before
                        })
                        .sum();
                }
            }
            Kernel::Coverage {
                cover,
                item_weights,
            } => {
                let mut seen = vec![false; item_weights.len()];
                for &j in order {
                    w[j] = cover[j]
                        .iter()
                        .filter(|&&u| !std::mem::replace(&mut seen[u], true))
                        .map(|&u| item_weights[u])
                        .sum();
                }
            }
            _ => {
                let mut prefix = ElementSet::empty(n);
                let mut prev = 0.0;
                for &j in order {
                    prefix.insert(j);
                    let v = self.value(&prefix);
                    w[j] = v - prev;
                    prev = v;
                }
            }
        }
        w
    }

    /// Modular function `w(X)`; weights must be finite and nonnegative.
    pub fn modular(weights: Vec<f64>) -> Result<Self> {
        check_nonneg("weights", &weights)?;
        if weights.is_empty() {
            return Err(Error::Validation("modular weights must be nonempty".into()));
        }
        Ok(Self::from_kernel(weights.len(), Kernel::Modular(weights)))
    }

    /// Wraps an arbitrary evaluation closure. The caller is responsible for
    /// normalization, monotonicity and submodularity.
    pub fn from_fn(n: usize, f: impl Fn(&ElementSet) -> f64 + Send + Sync + 'static) -> Self {
        Self::from_kernel(n, Kernel::Custom(Arc::new(f)))
    }

    /// `min(self(X), cap)`.
    pub fn truncated(&self, cap: f64) -> Result<Self> {
        if !(cap.is_finite() && cap >= 0.0) {
            return Err(Error::Validation(format!(
                "truncation cap {cap} must be >= 0"
            )));
        }
        Ok(Self::from_kernel(
            self.n(),
            Kernel::Truncation {
                inner: self.clone(),
                cap,
            },
        ))
    }

    /// Nonnegative combination `sum_t a_t f_t`.
    pub fn weighted_sum(terms: Vec<(f64, SetFunction)>) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::Validation(
                "weighted sum needs at least one term".into(),
            ));
        };
        let n = first.n();
        for (a, f) in &terms {
            if !(a.is_finite() && *a >= 0.0) {
                return Err(Error::Validation(format!("coefficient {a} must be >= 0")));
            }
            if f.n() != n {
                return Err(Error::Validation("weighted sum terms disagree on n".into()));
            }
        }
        Ok(Self::from_kernel(n, Kernel::WeightedSum(terms)))
    }

    /// `c * self`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::weighted_sum(vec![(c, self.clone())])
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    /// Unchecked evaluation; `s` must be a subset of this function's ground set.
    pub fn value(&self, s: &ElementSet) -> f64 {
        debug_assert_eq!(s.universe(), self.inner.n);
        self.inner.kernel.eval(s)
    }

    /// Checked evaluation of `f(S)`.
    pub fn evaluate(&self, s: &ElementSet) -> Result<f64> {
        self.check_set(s)?;
        Ok(self.value(s))
    }

    /// Marginal gain `f(j | S) = f(S ∪ j) - f(S)`; requires `j ∉ S`.
    pub fn gain(&self, j: usize, s: &ElementSet) -> Result<f64> {
        self.check_set(s)?;
        if j >= self.n() {
            return Err(Error::OutOfRange { id: j, n: self.n() });
        }
        if s.contains(j) {
            return Err(Error::Precondition(format!(
                "element {j} already in context set"
            )));
        }
        Ok(self.gain_unchecked(j, s))
    }

    pub(crate) fn gain_unchecked(&self, j: usize, s: &ElementSet) -> f64 {
        self.value(&s.with(j)) - self.value(s)
    }

    /// Cached `f({j})`.
    pub fn singleton(&self, j: usize) -> f64 {
        self.inner.singletons[j]
    }

    pub fn singletons(&self) -> &[f64] {
        &self.inner.singletons
    }

    /// Cached `f(j | V \ j)`.
    pub fn top_gain(&self, j: usize) -> f64 {
        self.inner.top_gains[j]
    }

    pub fn top_gains(&self) -> &[f64] {
        &self.inner.top_gains
    }

    /// Cached `f(V)`.
    pub fn full_value(&self) -> f64 {
        self.inner.full
    }

    /// Weights when the function is modular, `None` otherwise.
    pub fn as_modular(&self) -> Option<&[f64]> {
        match &self.inner.kernel {
            Kernel::Modular(w) => Some(w),
            _ => None,
        }
    }

    fn check_set(&self, s: &ElementSet) -> Result<()> {
        let n = self.n();
        if s.universe() != n {
            if let Some(id) = s.iter().find(|&j| j >= n) {
                return Err(Error::OutOfRange { id, n });
            }
            return Err(Error::Precondition(format!(
                "set over {} elements, function over {n}",
                s.universe()
            )));
        }
        Ok(())
    }

    /// Total curvature `1 - min_{j: f(j) > 0} f(j | V \ j) / f(j)`, in `[0, 1]`.
    pub fn total_curvature(&self) -> Result<f64> {
        let ratio = self
            .singletons()
            .iter()
            .zip(self.top_gains())
            .filter(|(&s, _)| s > SINGLETON_EPS)
            .map(|(&s, &t)| t / s)
            .fold(f64::INFINITY, f64::min);
        if ratio.is_infinite() {
            return Err(Error::Degenerate("f(j) = 0 for every element".into()));
        }
        Ok((1.0 - ratio).clamp(0.0, 1.0))
    }

    /// Curvature, treating an identically zero function as modular.
    pub fn curvature_or_zero(&self) -> f64 {
        self.total_curvature().unwrap_or(0.0)
    }
}

const SINGLETON_EPS: f64 = 1e-15;

/// Bound interpolator `K(v, kappa) = v / (1 + (1 - kappa)(v - 1))`.
pub fn kappa_factor(v: f64, kappa: f64) -> Result<f64> {
    if !v.is_finite() || v < 1.0 {
        return Err(Error::Domain(format!("kappa_factor needs v >= 1, got {v}")));
    }
    if !(0.0..=1.0).contains(&kappa) {
        return Err(Error::Domain(format!("curvature {kappa} outside [0, 1]")));
    }
    Ok(v / (1.0 + (1.0 - kappa) * (v - 1.0)))
}

/// `K(max(v, 1), kappa)`, for callers whose size argument may be zero.
pub fn kappa_factor_at_least_one(v: f64, kappa: f64) -> f64 {
    kappa_factor(v.max(1.0), kappa.clamp(0.0, 1.0)).expect("arguments clamped into domain")
}

/// Largest total curvature among `fs`.
pub fn worst_curvature(fs: &[SetFunction]) -> f64 {
    fs.iter()
        .map(SetFunction::curvature_or_zero)
        .fold(0.0, f64::max)
}

fn check_nonneg(field: &str, xs: &[f64]) -> Result<()> {
    if let Some((i, x)) = xs
        .iter()
        .enumerate()
        .find(|(_, x)| !(x.is_finite() && **x >= 0.0))
    {
        return Err(Error::Validation(format!(
            "{field}[{i}] = {x} must be finite and >= 0"
        )));
    }
    Ok(())
}

fn check_ids(field: &str, ids: &[usize], bound: usize) -> Result<()> {
    let mut seen = vec![false; bound];
    for &id in ids {
        if id >= bound {
            return Err(Error::Validation(format!("{field}: id {id} >= {bound}")));
        }
        if seen[id] {
            return Err(Error::Validation(format!("{field}: id {id} repeated")));
        }
        seen[id] = true;
    }
    Ok(())
}

fn compile(spec: &FunctionSpec, n: usize) -> Result<SetFunction> {
    let kernel = match spec {
        FunctionSpec::Modular { weights } => {
            if weights.len() != n {
                return Err(Error::Validation(format!(
                    "modular.weights has {} entries, expected {n}",
                    weights.len()
                )));
            }
            check_nonneg("modular.weights", weights)?;
            Kernel::Modular(weights.clone())
        }
        FunctionSpec::ClusteredSqrt { clusters, weights } => {
            if weights.len() != n {
                return Err(Error::Validation(format!(
                    "clustered_sqrt.weights has {} entries, expected {n}",
                    weights.len()
                )));
            }
            check_nonneg("clustered_sqrt.weights", weights)?;
            for (i, c) in clusters.iter().enumerate() {
                check_ids(&format!("clustered_sqrt.clusters[{i}]"), c, n)?;
            }
            Kernel::ClusteredSqrt {
                clusters: clusters.clone(),
                weights: weights.clone(),
            }
        }
        FunctionSpec::FacilityLocation { similarity } => {
            for (i, row) in similarity.iter().enumerate() {
                if row.len() != n {
                    return Err(Error::Validation(format!(
                        "facility_location.similarity[{i}] has {} columns, expected {n}",
                        row.len()
                    )));
                }
                check_nonneg(&format!("facility_location.similarity[{i}]"), row)?;
            }
            Kernel::FacilityLocation(similarity.clone())
        }
        FunctionSpec::FeatureBased { features, concave } => {
            if features.len() != n {
                return Err(Error::Validation(format!(
                    "feature_based.features has {} rows, expected {n}",
                    features.len()
                )));
            }
            let dims = features[0].len();
            for (j, row) in features.iter().enumerate() {
                if row.len() != dims {
                    return Err(Error::Validation(format!(
                        "feature_based.features[{j}] has {} columns, expected {dims}",
                        row.len()
                    )));
                }
                check_nonneg(&format!("feature_based.features[{j}]"), row)?;
            }
            Kernel::FeatureBased {
                features: features.clone(),
                dims,
                concave: *concave,
            }
        }
        FunctionSpec::Coverage {
            cover,
            item_weights,
        } => {
            if cover.len() != n {
                return Err(Error::Validation(format!(
                    "coverage.cover has {} entries, expected {n}",
                    cover.len()
                )));
            }
            check_nonneg("coverage.item_weights", item_weights)?;
            for (j, items) in cover.iter().enumerate() {
                check_ids(&format!("coverage.cover[{j}]"), items, item_weights.len())?;
            }
            Kernel::Coverage {
                cover: cover.clone(),
                item_weights: item_weights.clone(),
            }
        }
        FunctionSpec::Truncation { inner, cap } => {
            if !(cap.is_finite() && *cap >= 0.0) {
                return Err(Error::Validation(format!(
                    "truncation.cap = {cap} must be >= 0"
                )));
            }
            Kernel::Truncation {
                inner: compile(inner, n)?,
                cap: *cap,
            }
        }
        FunctionSpec::WeightedSum { terms } => {
            if terms.is_empty() {
                return Err(Error::Validation("weighted_sum.terms is empty".into()));
            }
            let mut out = Vec::with_capacity(terms.len());
            for (t, term) in terms.iter().enumerate() {
                if !(term.coefficient.is_finite() && term.coefficient >= 0.0) {
                    return Err(Error::Validation(format!(
                        "weighted_sum.terms[{t}].coefficient = {} must be >= 0",
                        term.coefficient
                    )));
                }
                out.push((term.coefficient, compile(&term.spec, n)?));
            }
            Kernel::WeightedSum(out)
        }
    };
    Ok(SetFunction::from_kernel(n, kernel))
}

/// Validates `spec` against `ground` and builds the handle. A short sampled
/// check of normalization, monotonicity and diminishing returns runs last.
pub fn build_function(spec: &FunctionSpec, ground: &GroundSet) -> Result<SetFunction> {
    ground.validate()?;
    let f = compile(spec, ground.n)?;
    let report = sample_properties(&f, 64, 0x5eed);
    if !report.passes(1e-9) {
        return Err(Error::Validation(format!(
            "function fails property sampling: {report:?}"
        )));
    }
    Ok(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AggregateMode {
    Avg,
    Max,
}

fn check_family(fs: &[SetFunction]) -> Result<usize> {
    let Some(first) = fs.first() else {
        return Err(Error::Validation("function list is empty".into()));
    };
    let n = first.n();
    if fs.iter().any(|f| f.n() != n) {
        return Err(Error::Validation(
            "functions disagree on ground set size".into(),
        ));
    }
    Ok(n)
}

/// `f_avg(S)` or `f_max(S)` over the family.
pub fn aggregate(fs: &[SetFunction], mode: AggregateMode, s: &ElementSet) -> Result<f64> {
    check_family(fs)?;
    let mut vals = Vec::with_capacity(fs.len());
    for f in fs {
        vals.push(f.evaluate(s)?);
    }
    Ok(match mode {
        AggregateMode::Avg => vals.iter().sum::<f64>() / fs.len() as f64,
        AggregateMode::Max => vals.into_iter().fold(f64::NEG_INFINITY, f64::max),
    })
}

/// The average `(1/l) sum_i f_i` as a first-class handle.
pub fn average(fs: &[SetFunction]) -> Result<SetFunction> {
    check_family(fs)?;
    if fs.len() == 1 {
        return Ok(fs[0].clone());
    }
    let c = 1.0 / fs.len() as f64;
    SetFunction::weighted_sum(fs.iter().map(|f| (c, f.clone())).collect())
}

/// `max_i f_i(S)` without checks.
pub fn max_value(fs: &[SetFunction], s: &ElementSet) -> f64 {
    fs.iter()
        .map(|f| f.value(s))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `min_i g_i(S)` without checks.
pub fn min_value(gs: &[SetFunction], s: &ElementSet) -> f64 {
    gs.iter().map(|g| g.value(s)).fold(f64::INFINITY, f64::min)
}

/// Worst observed violations from [`sample_properties`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropertyReport {
    /// `|f(∅)|`.
    pub empty_value: f64,
    /// Smallest sampled gain `f(j | S)`.
    pub min_gain: f64,
    /// Largest sampled `f(j | T) - f(j | S)` with `S ⊆ T`.
    pub max_submodularity_violation: f64,
    pub samples: usize,
}

impl PropertyReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.empty_value <= tol && self.min_gain >= -tol && self.max_submodularity_violation <= tol
    }
}

/// Draws `samples` random triples `S ⊆ T`, `j ∉ T` and records the worst
/// monotonicity and diminishing-returns violations.
pub fn sample_properties(f: &SetFunction, samples: usize, seed: u64) -> PropertyReport {
    let n = f.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_gain = f64::INFINITY;
    let mut worst = f64::NEG_INFINITY;
    let empty_value = f.value(&ElementSet::empty(n)).abs();
    for _ in 0..samples {
        let j = rng.random_range(0..n);
        let p: f64 = rng.random();
        let mut t = ElementSet::empty(n);
        let mut s = ElementSet::empty(n);
        for e in (0..n).filter(|&e| e != j) {
            if rng.random::<f64>() < p {
                t.insert(e);
                if rng.random::<bool>() {
                    s.insert(e);
                }
            }
        }
        let gs = f.gain_unchecked(j, &s);
        let gt = f.gain_unchecked(j, &t);
        min_gain = min_gain.min(gs).min(gt);
        worst = worst.max(gt - gs);
    }
    PropertyReport {
        empty_value,
        min_gain,
        max_submodularity_violation: worst.max(0.0),
        samples,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, ids: &[usize]) -> ElementSet {
        ElementSet::from_ids(n, ids.iter().copied()).unwrap()
    }

    fn sqrt_card(n: usize) -> SetFunction {
        let spec = FunctionSpec::ClusteredSqrt {
            clusters: vec![(0..n).collect()],
            weights: vec![1.0; n],
        };
        build_function(&spec, &GroundSet::new(n).unwrap()).unwrap()
    }

    #[test]
    fn modular_evaluation() {
        let f = SetFunction::modular(vec![2.0, 3.0, 5.0]).unwrap();
        assert_eq!(f.evaluate(&set(3, &[0, 2])).unwrap(), 7.0);
        assert_eq!(f.evaluate(&ElementSet::full(3)).unwrap(), 10.0);
        assert_eq!(f.evaluate(&ElementSet::empty(3)).unwrap(), 0.0);
        assert_eq!(f.gain(1, &set(3, &[0])).unwrap(), 3.0);
        assert_eq!(f.total_curvature().unwrap(), 0.0);
    }

    #[test]
    fn clustered_sqrt_evaluation() {
        let spec = FunctionSpec::ClusteredSqrt {
            clusters: vec![vec![0, 1], vec![2]],
            weights: vec![1.0, 1.0, 4.0],
        };
        let f = build_function(&spec, &GroundSet::new(3).unwrap()).unwrap();
        let v = f.evaluate(&ElementSet::full(3)).unwrap();
        assert!((v - (2f64.sqrt() + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn sqrt_gain_and_curvature() {
        let f = sqrt_card(2);
        let g = f.gain(1, &set(2, &[0])).unwrap();
        assert!((g - (2f64.sqrt() - 1.0)).abs() < 1e-12);
        let k = f.total_curvature().unwrap();
        assert!((k - (2.0 - 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn saturated_curvature_is_one() {
        let f = SetFunction::modular(vec![1.0, 1.0])
            .unwrap()
            .truncated(1.0)
            .unwrap();
        assert_eq!(f.total_curvature().unwrap(), 1.0);
    }

    #[test]
    fn curvature_of_zero_function_is_degenerate() {
        let f = SetFunction::modular(vec![0.0, 0.0]).unwrap();
        assert!(matches!(f.total_curvature(), Err(Error::Degenerate(_))));
    }

    #[test]
    fn gain_errors() {
        let f = SetFunction::modular(vec![1.0, 1.0]).unwrap();
        assert!(matches!(
            f.gain(0, &set(2, &[0])),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            f.gain(2, &ElementSet::empty(2)),
            Err(Error::OutOfRange { id: 2, n: 2 })
        ));
        assert!(matches!(
            f.evaluate(&set(4, &[3])),
            Err(Error::OutOfRange { id: 3, n: 2 })
        ));
    }

    #[test]
    fn kappa_factor_values() {
        assert_eq!(kappa_factor(7.0, 1.0).unwrap(), 7.0);
        assert_eq!(kappa_factor(7.0, 0.0).unwrap(), 1.0);
        assert!((kappa_factor(4.0, 0.5).unwrap() - 1.6).abs() < 1e-15);
        assert!(matches!(kappa_factor(0.5, 0.5), Err(Error::Domain(_))));
        let mut prev = 0.0;
        for i in 0..=100 {
            let k = kappa_factor(9.0, i as f64 / 100.0).unwrap();
            assert!(k >= prev);
            prev = k;
        }
    }

    #[test]
    fn truncation_and_facility_location() {
        let g = GroundSet::new(3).unwrap();
        let t = FunctionSpec::Truncation {
            inner: Box::new(FunctionSpec::Modular {
                weights: vec![2.0, 3.0, 5.0],
            }),
            cap: 4.0,
        };
        let f = build_function(&t, &g).unwrap();
        assert_eq!(f.full_value(), 4.0);
        assert_eq!(f.singleton(0), 2.0);

        let eye = (0..3)
            .map(|i| (0..3).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let fl = build_function(&FunctionSpec::FacilityLocation { similarity: eye }, &g).unwrap();
        for mask in 0..8u64 {
            let s = ElementSet::from_mask(3, mask);
            assert_eq!(fl.value(&s), s.len() as f64);
        }
    }

    #[test]
    fn validation_errors() {
        let g = GroundSet::new(3).unwrap();
        let neg = FunctionSpec::Modular {
            weights: vec![1.0, -1.0, 0.0],
        };
        assert!(matches!(
            build_function(&neg, &g),
            Err(Error::Validation(_))
        ));
        let bad = FunctionSpec::ClusteredSqrt {
            clusters: vec![vec![0, 0]],
            weights: vec![1.0; 3],
        };
        assert!(matches!(
            build_function(&bad, &g),
            Err(Error::Validation(_))
        ));
        let oob = FunctionSpec::ClusteredSqrt {
            clusters: vec![vec![5]],
            weights: vec![1.0; 3],
        };
        assert!(matches!(
            build_function(&oob, &g),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn aggregate_examples() {
        let f1 = SetFunction::modular(vec![1.0, 0.0]).unwrap();
        let f2 = SetFunction::modular(vec![0.0, 1.0]).unwrap();
        let fs = vec![f1.clone(), f2];
        let s = ElementSet::full(2);
        assert_eq!(aggregate(&fs, AggregateMode::Avg, &s).unwrap(), 1.0);
        assert_eq!(aggregate(&fs, AggregateMode::Max, &s).unwrap(), 1.0);
        let one = vec![f1.clone()];
        let x = set(2, &[0]);
        assert_eq!(aggregate(&one, AggregateMode::Avg, &x).unwrap(), 1.0);
        assert_eq!(aggregate(&one, AggregateMode::Max, &x).unwrap(), 1.0);
        assert!(aggregate(&[], AggregateMode::Max, &x).is_err());
        assert_eq!(average(&fs).unwrap().value(&s), 1.0);
    }

    #[test]
    fn chain_gains_match_prefix_values() {
        use crate::generate::{function, Family};
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let g = GroundSet::new(9).unwrap();
        for fam in Family::ALL {
            let f = build_function(&function(fam, 9, &mut rng), &g).unwrap();
            let mut order: Vec<usize> = (0..9).collect();
            order.shuffle(&mut rng);
            let fast = f.chain_gains(&order);
            let mut prefix = ElementSet::empty(9);
            let mut prev = 0.0;
            for &j in &order {
                prefix.insert(j);
                let v = f.value(&prefix);
                assert!((fast[j] - (v - prev)).abs() < 1e-12, "{fam:?} at {j}");
                prev = v;
            }
        }
    }
}
