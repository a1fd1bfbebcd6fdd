//! Modular lower bounds from chains, the two supergradient upper bounds, and
//! the Lovász extension.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::SetFunction;
use crate::set::ElementSet;

/// A permutation of the ground set; prefix `i` is `{order[0], .., order[i-1]}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    order: Vec<usize>,
}

impl Chain {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &j in &order {
            if j >= n || seen[j] {
                return Err(Error::Validation(format!(
                    "chain is not a permutation of 0..{n}"
                )));
            }
            seen[j] = true;
        }
        Ok(Chain { order })
    }

    pub fn identity(n: usize) -> Self {
        Chain {
            order: (0..n).collect(),
        }
    }

    /// Elements of `x` sorted by descending value, ties by ascending id.
    pub fn sorted_descending(x: &[f64]) -> Self {
        let mut order: Vec<usize> = (0..x.len()).collect();
        order.sort_by(|&a, &b| x[b].total_cmp(&x[a]).then(a.cmp(&b)));
        Chain { order }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn prefix(&self, i: usize) -> ElementSet {
        ElementSet::from_ids(self.len(), self.order[..i].iter().copied())
            .expect("chain ids are in range")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Lower,
    Upper,
}

/// Which supergradient to build at an anchor `X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Supergradient {
    /// Additions priced at `f(j)`, removals at `f(j | X \ j)`.
    Grow,
    /// Additions priced at `f(j | X)`, removals at `f(j | V \ j)`.
    Shrink,
}

/// Affine set function `offset + sum_{j in Y} weights[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModularBound {
    pub offset: f64,
    pub weights: Vec<f64>,
    pub anchor: ElementSet,
    pub direction: Direction,
}

impl ModularBound {
    /// Plain modular cost `w(Y)` with no offset, treated as an upper bound
    /// anchored at the empty set.
    pub fn from_weights(weights: Vec<f64>) -> Self {
        let n = weights.len();
        ModularBound {
            offset: 0.0,
            weights,
            anchor: ElementSet::empty(n),
            direction: Direction::Upper,
        }
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn value(&self, y: &ElementSet) -> f64 {
        self.offset + y.iter().map(|j| self.weights[j]).sum::<f64>()
    }

    /// Linear part only, `w(Y)`.
    pub fn linear(&self, y: &ElementSet) -> f64 {
        y.iter().map(|j| self.weights[j]).sum()
    }
}

/// Chain subgradient `h(σ(i)) = f(σ(i) | S_{i-1})`, tight on every prefix.
pub fn subgradient_chain(f: &SetFunction, chain: &Chain) -> Result<ModularBound> {
    let n = f.n();
    if chain.len() != n {
        return Err(Error::Validation(format!(
            "chain length {} does not match ground set size {n}",
            chain.len()
        )));
    }
    let weights = chain_gains(f, chain.order());
    Ok(ModularBound {
        offset: 0.0,
        weights,
        anchor: ElementSet::full(n),
        direction: Direction::Lower,
    })
}

fn chain_gains(f: &SetFunction, order: &[usize]) -> Vec<f64> {
    f.chain_gains(order)
}

/// Supergradient upper bound anchored at `x`, tight at `x`.
pub fn supergradient(
    f: &SetFunction,
    x: &ElementSet,
    variant: Supergradient,
) -> Result<ModularBound> {
    let n = f.n();
    x.check_universe(n)?;
    let fx = f.value(x);
    if let Some(w) = f.as_modular() {
        return Ok(ModularBound {
            offset: 0.0,
            weights: w.to_vec(),
            anchor: x.clone(),
            direction: Direction::Upper,
        });
    }
    let mut weights = vec![0.0; n];
    let mut removed = 0.0;
    for (j, wj) in weights.iter_mut().enumerate() {
        if x.contains(j) {
            let r = match variant {
                Supergradient::Grow => f.gain_unchecked(j, &x.without(j)),
                Supergradient::Shrink => f.top_gain(j),
            };
            *wj = r;
            removed += r;
        } else {
            *wj = match variant {
                Supergradient::Grow => f.singleton(j),
                Supergradient::Shrink => f.gain_unchecked(j, x),
            };
        }
    }
    Ok(ModularBound {
        offset: fx - removed,
        weights,
        anchor: x.clone(),
        direction: Direction::Upper,
    })
}

/// Lovász extension value and the chain subgradient at `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LovaszEval {
    pub value: f64,
    pub subgradient: Vec<f64>,
}

/// Evaluates the Lovász extension at `x ∈ [0, 1]^n`. The chain is `x`
/// sorted descending with ties by ascending id.
pub fn lovasz(f: &SetFunction, x: &[f64]) -> Result<LovaszEval> {
    let n = f.n();
    if x.len() != n {
        return Err(Error::Domain(format!(
            "point has {} coordinates, expected {n}",
            x.len()
        )));
    }
    if let Some((i, v)) = x
        .iter()
        .enumerate()
        .find(|(_, v)| !(0.0..=1.0).contains(*v))
    {
        return Err(Error::Domain(format!("x[{i}] = {v} outside [0, 1]")));
    }
    let chain = Chain::sorted_descending(x);
    let subgradient = chain_gains(f, chain.order());
    let value = subgradient.iter().zip(x).map(|(h, xi)| h * xi).sum();
    Ok(LovaszEval { value, subgradient })
}
