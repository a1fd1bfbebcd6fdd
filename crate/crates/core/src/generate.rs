//! Seeded random instances: function descriptions of every family and
//! graphs with guaranteed-feasible constraint structure.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::constraints::GraphSpec;
use crate::function::{Concave, FunctionSpec, WeightedTerm};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Modular,
    ClusteredSqrt,
    FacilityLocation,
    FeatureBased,
    Coverage,
    Truncation,
    WeightedSum,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Modular,
        Family::ClusteredSqrt,
        Family::FacilityLocation,
        Family::FeatureBased,
        Family::Coverage,
        Family::Truncation,
        Family::WeightedSum,
    ];
}

fn uniform(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.random::<f64>()).collect()
}

/// Random partition of `0..n` into `blocks` nonempty sorted blocks
/// (`blocks` clamped to `1..=n`).
pub fn clustering(n: usize, blocks: usize, rng: &mut impl Rng) -> Vec<Vec<usize>> {
    let blocks = blocks.clamp(1, n);
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(rng);
    let mut clusters: Vec<Vec<usize>> = vec![Vec::new(); blocks];
    for (pos, &j) in ids.iter().enumerate() {
        let b = if pos < blocks {
            pos
        } else {
            rng.random_range(0..blocks)
        };
        clusters[b].push(j);
    }
    for c in &mut clusters {
        c.sort_unstable();
    }
    clusters
}

/// `sum_i sqrt(w(X ∩ C_i))` over a random partition into at most `blocks`
/// nonempty blocks, with `w ~ U[0, 1]^n`.
pub fn clustered_sqrt(n: usize, blocks: usize, rng: &mut impl Rng) -> FunctionSpec {
    let clusters = clustering(n, blocks, rng);
    FunctionSpec::ClusteredSqrt {
        clusters,
        weights: uniform(rng, n),
    }
}

/// `l` clustered-sqrt functions sharing one `w ~ U[0, 1]^n`, each over its
/// own random clustering.
pub fn shared_weight_clusterings(
    n: usize,
    blocks: usize,
    l: usize,
    rng: &mut impl Rng,
) -> Vec<FunctionSpec> {
    let weights = uniform(rng, n);
    (0..l)
        .map(|_| FunctionSpec::ClusteredSqrt {
            clusters: clustering(n, blocks, rng),
            weights: weights.clone(),
        })
        .collect()
}

/// Coverage over `items` items with integer item weights in `1..=max_weight`;
/// each element covers one to three items.
pub fn integer_coverage(
    n: usize,
    items: usize,
    max_weight: u32,
    rng: &mut impl Rng,
) -> FunctionSpec {
    let items = items.max(1);
    let cover = (0..n)
        .map(|_| {
            let k = rng.random_range(1..=3.min(items));
            let mut c: Vec<usize> = (0..items).collect();
            c.shuffle(rng);
            c.truncate(k);
            c.sort_unstable();
            c
        })
        .collect();
    let item_weights = (0..items)
        .map(|_| rng.random_range(1..=max_weight.max(1)) as f64)
        .collect();
    FunctionSpec::Coverage {
        cover,
        item_weights,
    }
}

/// A random instance of `family` on `n` elements.
pub fn function(family: Family, n: usize, rng: &mut impl Rng) -> FunctionSpec {
    match family {
        Family::Modular => FunctionSpec::Modular {
            weights: uniform(rng, n),
        },
        Family::ClusteredSqrt => {
            let blocks = rng.random_range(1..=n.clamp(1, 4));
            clustered_sqrt(n, blocks, rng)
        }
        Family::FacilityLocation => {
            let rows = rng.random_range(1..=n.max(1));
            FunctionSpec::FacilityLocation {
                similarity: (0..rows).map(|_| uniform(rng, n)).collect(),
            }
        }
        Family::FeatureBased => {
            let d = rng.random_range(1..=4);
            FunctionSpec::FeatureBased {
                features: (0..n).map(|_| uniform(rng, d)).collect(),
                concave: if rng.random::<bool>() {
                    Concave::Sqrt
                } else {
                    Concave::Log1p
                },
            }
        }
        Family::Coverage => {
            let items = rng.random_range(1..=2 * n.max(1));
            let cover = (0..n)
                .map(|_| {
                    let mut c: Vec<usize> =
                        (0..items).filter(|_| rng.random::<f64>() < 0.3).collect();
                    if c.is_empty() {
                        c.push(rng.random_range(0..items));
                    }
                    c
                })
                .collect();
            FunctionSpec::Coverage {
                cover,
                item_weights: uniform(rng, items),
            }
        }
        Family::Truncation => {
            let inner = function(Family::ClusteredSqrt, n, rng);
            FunctionSpec::Truncation {
                inner: Box::new(inner),
                cap: rng.random_range(0.2..2.0),
            }
        }
        Family::WeightedSum => {
            let terms = [
                Family::Modular,
                Family::FacilityLocation,
                Family::ClusteredSqrt,
            ]
            .into_iter()
            .map(|f| WeightedTerm {
                coefficient: rng.random(),
                spec: function(f, n, rng),
            })
            .collect();
            FunctionSpec::WeightedSum { terms }
        }
    }
}

/// Connected undirected graph on `nodes` nodes: a random spanning tree plus
/// `extra` further distinct edges (fewer if the graph fills up).
pub fn connected_graph(nodes: usize, extra: usize, rng: &mut impl Rng) -> GraphSpec {
    let mut order: Vec<usize> = (0..nodes).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for i in 1..nodes {
        let u = order[rng.random_range(0..i)];
        edges.push(ordered(u, order[i]));
    }
    let mut absent: Vec<(usize, usize)> = (0..nodes)
        .flat_map(|u| (u + 1..nodes).map(move |v| (u, v)))
        .filter(|e| !edges.contains(e))
        .collect();
    absent.shuffle(rng);
    edges.extend(absent.into_iter().take(extra));
    edges.shuffle(rng);
    GraphSpec::undirected(nodes, edges)
}

fn ordered(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

/// Connected graph with distinct terminals `s = 0`, `t = nodes - 1`.
pub fn st_graph(nodes: usize, extra: usize, rng: &mut impl Rng) -> GraphSpec {
    connected_graph(nodes.max(2), extra, rng).with_terminals(0, nodes.max(2) - 1)
}

/// Bipartite graph with `side` nodes per side containing a perfect
/// matching, plus `extra` further cross edges.
pub fn bipartite_with_matching(side: usize, extra: usize, rng: &mut impl Rng) -> GraphSpec {
    let mut perm: Vec<usize> = (0..side).collect();
    perm.shuffle(rng);
    let mut edges: Vec<(usize, usize)> = (0..side).map(|u| (u, side + perm[u])).collect();
    let mut absent: Vec<(usize, usize)> = (0..side)
        .flat_map(|u| (0..side).map(move |v| (u, side + v)))
        .filter(|e| !edges.contains(e))
        .collect();
    absent.shuffle(rng);
    edges.extend(absent.into_iter().take(extra));
    edges.shuffle(rng);
    GraphSpec::bipartite(side, side, edges)
}
