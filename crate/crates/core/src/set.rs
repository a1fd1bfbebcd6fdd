use std::cmp::Ordering;
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite ground set `{0, .., n-1}` with optional labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundSet {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl GroundSet {
    pub fn new(n: usize) -> Result<Self> {
        let g = GroundSet { n, labels: None };
        g.validate()?;
        Ok(g)
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        let g = GroundSet {
            n: labels.len(),
            labels: Some(labels),
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Validation("ground set must be nonempty".into()));
        }
        if let Some(l) = &self.labels {
            if l.len() != self.n {
                return Err(Error::Validation(format!(
                    "ground_set.labels has {} entries, expected {}",
                    l.len(),
                    self.n
                )));
            }
        }
        Ok(())
    }
}

/// Subset of a ground set, stored as a bitset of fixed capacity `n`.
///
/// Ordering is lexicographic on the ascending id sequence, so `{0, 2} < {1}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ElementSet {
    bits: FixedBitSet,
}

impl ElementSet {
    pub fn empty(n: usize) -> Self {
        ElementSet {
            bits: FixedBitSet::with_capacity(n),
        }
    }

    pub fn full(n: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(n);
        bits.insert_range(..);
        ElementSet { bits }
    }

    pub fn from_ids(n: usize, ids: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut s = Self::empty(n);
        for id in ids {
            if id >= n {
                return Err(Error::OutOfRange { id, n });
            }
            s.bits.insert(id);
        }
        Ok(s)
    }

    /// Set whose members are the one bits of `mask`; requires `n <= 64`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        debug_assert!(n <= 64);
        let mut s = Self::empty(n);
        let mut m = mask;
        while m != 0 {
            let j = m.trailing_zeros() as usize;
            s.bits.insert(j);
            m &= m - 1;
        }
        s
    }

    /// Capacity of the underlying ground set.
    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.bits.contains(j)
    }

    pub fn insert(&mut self, j: usize) {
        self.bits.insert(j);
    }

    pub fn remove(&mut self, j: usize) {
        self.bits.set(j, false);
    }

    pub fn with(&self, j: usize) -> Self {
        let mut s = self.clone();
        s.insert(j);
        s
    }

    pub fn without(&self, j: usize) -> Self {
        let mut s = self.clone();
        s.remove(j);
        s
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn ids(&self) -> Vec<usize> {
        self.bits.ones().collect()
    }

    pub fn complement(&self) -> Self {
        let mut bits = self.bits.clone();
        bits.toggle_range(..);
        ElementSet { bits }
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut bits = self.bits.clone();
        bits.union_with(&other.bits);
        ElementSet { bits }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut bits = self.bits.clone();
        bits.intersect_with(&other.bits);
        ElementSet { bits }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.bits.is_subset(&other.bits)
    }

    /// Fails if the set was built for a different ground-set size.
    pub fn check_universe(&self, n: usize) -> Result<()> {
        if self.universe() != n {
            return Err(Error::Precondition(format!(
                "set over {} elements used with ground set of size {}",
                self.universe(),
                n
            )));
        }
        Ok(())
    }

    pub fn indicator(&self) -> Vec<f64> {
        (0..self.universe())
            .map(|j| if self.contains(j) { 1.0 } else { 0.0 })
            .collect()
    }
}

impl Ord for ElementSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for ElementSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, j) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{j}")?;
        }
        write!(f, "}}")
    }
}
