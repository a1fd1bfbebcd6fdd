//! Combinatorial constraint families with linear-cost minimization oracles,
//! exact membership tests, up-closure tests and covering descriptions.

mod graph;

pub use graph::GraphSpec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::set::ElementSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Knapsack {
    pub weights: Vec<f64>,
    pub budget: f64,
}

/// The feasible family `𝒞` a solver optimizes over.
///
/// Edge-based families (trees, paths, matchings, cuts) use edge ids as
/// ground elements; `VertexCover` uses vertex ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstraintFamily {
    /// `|S| >= k`.
    CardinalityLower {
        n: usize,
        k: usize,
    },
    /// `|S| <= k`.
    CardinalityUpper {
        n: usize,
        k: usize,
    },
    /// `w_i(S) <= b_i` for every knapsack.
    Knapsacks {
        n: usize,
        knapsacks: Vec<Knapsack>,
    },
    SpanningTree {
        graph: GraphSpec,
    },
    StPath {
        graph: GraphSpec,
    },
    /// Perfect matchings of a bipartite graph.
    PerfectMatching {
        graph: GraphSpec,
    },
    /// Edge sets whose removal disconnects `s` from `t`.
    StCut {
        graph: GraphSpec,
    },
    VertexCover {
        graph: GraphSpec,
    },
}

/// One covering inequality `sum_{i in W} x_i >= b_W`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverConstraint {
    pub members: Vec<usize>,
    pub demand: usize,
}

/// `{x ∈ [0,1]^n : sum_{i in W} x_i >= b_W for all W}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoveringFamily {
    pub n: usize,
    pub constraints: Vec<CoverConstraint>,
}

impl CoveringFamily {
    pub fn new(n: usize, constraints: Vec<CoverConstraint>) -> Result<Self> {
        let fam = CoveringFamily { n, constraints };
        fam.validate()?;
        Ok(fam)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, c) in self.constraints.iter().enumerate() {
            if c.demand == 0 || c.demand > c.members.len() {
                return Err(Error::Validation(format!(
                    "covering constraint {i}: demand {} must be in 1..={}",
                    c.demand,
                    c.members.len()
                )));
            }
            if let Some(&j) = c.members.iter().find(|&&j| j >= self.n) {
                return Err(Error::Validation(format!(
                    "covering constraint {i}: member {j} >= {}",
                    self.n
                )));
            }
        }
        Ok(())
    }

    /// Rounding factor `max_W |W| - b_W + 1` (1 for an empty family).
    pub fn factor(&self) -> usize {
        self.constraints
            .iter()
            .map(|c| c.members.len() - c.demand + 1)
            .max()
            .unwrap_or(1)
    }

    /// Largest shortfall `b_W - x(W)` over all inequalities (0 if none violated).
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        self.constraints
            .iter()
            .map(|c| c.demand as f64 - c.members.iter().map(|&j| x[j]).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

impl ConstraintFamily {
    /// Builds and validates; non-graph variants can also be written directly.
    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    /// Size of the ground set the constraint lives on.
    pub fn ground_size(&self) -> usize {
        match self {
            ConstraintFamily::CardinalityLower { n, .. }
            | ConstraintFamily::CardinalityUpper { n, .. }
            | ConstraintFamily::Knapsacks { n, .. } => *n,
            ConstraintFamily::SpanningTree { graph }
            | ConstraintFamily::StPath { graph }
            | ConstraintFamily::PerfectMatching { graph }
            | ConstraintFamily::StCut { graph } => graph.m(),
            ConstraintFamily::VertexCover { graph } => graph.nodes,
        }
    }

    /// Approximation factor of [`min_modular`]: 2 for vertex cover, else 1.
    pub fn approx_factor(&self) -> f64 {
        match self {
            ConstraintFamily::VertexCover { .. } => 2.0,
            _ => 1.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ConstraintFamily::CardinalityLower { .. } => "cardinality_lower",
            ConstraintFamily::CardinalityUpper { .. } => "cardinality_upper",
            ConstraintFamily::Knapsacks { .. } => "knapsacks",
            ConstraintFamily::SpanningTree { .. } => "spanning_tree",
            ConstraintFamily::StPath { .. } => "st_path",
            ConstraintFamily::PerfectMatching { .. } => "perfect_matching",
            ConstraintFamily::StCut { .. } => "st_cut",
            ConstraintFamily::VertexCover { .. } => "vertex_cover",
        }
    }

    /// Checks data consistency and that the feasible region is nonempty.
    pub fn validate(&self) -> Result<()> {
        if self.ground_size() == 0 {
            return Err(Error::Validation(
                "constraint has an empty ground set".into(),
            ));
        }
        match self {
            ConstraintFamily::CardinalityLower { n, k } => {
                if k > n {
                    return Err(Error::Infeasible(format!(
                        "|S| >= {k} impossible with n = {n}"
                    )));
                }
            }
            ConstraintFamily::CardinalityUpper { .. } => {}
            ConstraintFamily::Knapsacks { n, knapsacks } => {
                for (i, ks) in knapsacks.iter().enumerate() {
                    if ks.weights.len() != *n {
                        return Err(Error::Validation(format!(
                            "knapsacks[{i}].weights has {} entries, expected {n}",
                            ks.weights.len()
                        )));
                    }
                    if let Some(w) = ks.weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
                        return Err(Error::Validation(format!(
                            "knapsacks[{i}] has invalid weight {w}"
                        )));
                    }
                    if !(ks.budget.is_finite() && ks.budget >= 0.0) {
                        return Err(Error::Validation(format!(
                            "knapsacks[{i}].budget = {} must be >= 0",
                            ks.budget
                        )));
                    }
                }
            }
            ConstraintFamily::SpanningTree { graph } => {
                graph.validate_endpoints()?;
                if !graph.spans(&ElementSet::full(graph.m())) {
                    return Err(Error::Infeasible("graph is disconnected".into()));
                }
            }
            ConstraintFamily::StPath { graph } => {
                graph.validate_endpoints()?;
                let (s, t) = graph.terminals()?;
                if !graph.reachable(s, &ElementSet::full(graph.m()))[t] {
                    return Err(Error::Infeasible(format!(
                        "t = {t} unreachable from s = {s}"
                    )));
                }
            }
            ConstraintFamily::PerfectMatching { graph } => {
                graph.validate_endpoints()?;
                let left = bipartite_left(graph)?;
                if left * 2 != graph.nodes {
                    return Err(Error::Infeasible("bipartite sides differ in size".into()));
                }
                for (e, &(u, v)) in graph.edges.iter().enumerate() {
                    if (u < left) == (v < left) {
                        return Err(Error::Validation(format!(
                            "graph.edges[{e}] = ({u}, {v}) does not cross the bipartition"
                        )));
                    }
                }
                if graph.max_bipartite_matching(left, &ElementSet::full(graph.m())) != left {
                    return Err(Error::Infeasible("graph has no perfect matching".into()));
                }
            }
            ConstraintFamily::StCut { graph } => {
                graph.validate_endpoints()?;
                graph.terminals()?;
            }
            ConstraintFamily::VertexCover { graph } => graph.validate_endpoints()?,
        }
        Ok(())
    }
}

fn bipartite_left(graph: &GraphSpec) -> Result<usize> {
    graph
        .left
        .filter(|&l| l <= graph.nodes)
        .ok_or_else(|| Error::Validation("perfect matching needs graph.left".into()))
}

fn check_weights(c: &ConstraintFamily, w: &[f64]) -> Result<()> {
    if w.len() != c.ground_size() {
        return Err(Error::Validation(format!(
            "cost vector has {} entries, constraint ground set has {}",
            w.len(),
            c.ground_size()
        )));
    }
    if let Some((j, x)) = w
        .iter()
        .enumerate()
        .find(|(_, x)| !(x.is_finite() && **x >= 0.0))
    {
        return Err(Error::Validation(format!(
            "cost[{j}] = {x} must be finite and >= 0"
        )));
    }
    Ok(())
}

/// Feasible set minimizing `w(S)` (2-approximate for vertex cover).
pub fn min_modular(c: &ConstraintFamily, w: &[f64]) -> Result<ElementSet> {
    min_modular_within(c, w, &ElementSet::full(c.ground_size()))
}

/// As [`min_modular`], restricted to feasible subsets of `allowed`.
pub fn min_modular_within(
    c: &ConstraintFamily,
    w: &[f64],
    allowed: &ElementSet,
) -> Result<ElementSet> {
    check_weights(c, w)?;
    let n = c.ground_size();
    allowed.check_universe(n)?;
    match c {
        ConstraintFamily::CardinalityLower { k, .. } => {
            let mut ids: Vec<usize> = allowed.iter().collect();
            if ids.len() < *k {
                return Err(Error::Infeasible(format!(
                    "only {} allowed elements for |S| >= {k}",
                    ids.len()
                )));
            }
            ids.sort_by(|&a, &b| w[a].total_cmp(&w[b]).then(a.cmp(&b)));
            ElementSet::from_ids(n, ids.into_iter().take(*k))
        }
        ConstraintFamily::CardinalityUpper { .. } | ConstraintFamily::Knapsacks { .. } => {
            Ok(ElementSet::empty(n))
        }
        ConstraintFamily::SpanningTree { graph } => graph::kruskal(graph, w, allowed),
        ConstraintFamily::StPath { graph } => {
            let (s, t) = graph.terminals()?;
            graph::dijkstra(graph, w, s, t, allowed)
        }
        ConstraintFamily::PerfectMatching { graph } => {
            graph::hungarian(graph, bipartite_left(graph)?, w, allowed)
        }
        ConstraintFamily::StCut { graph } => {
            let (s, t) = graph.terminals()?;
            graph::min_cut(graph, w, s, t, allowed)
        }
        ConstraintFamily::VertexCover { graph } => graph::local_ratio_cover(graph, w, allowed),
    }
}

/// Exact membership `S ∈ 𝒞`.
pub fn is_feasible(c: &ConstraintFamily, s: &ElementSet) -> bool {
    if s.universe() != c.ground_size() {
        return false;
    }
    match c {
        ConstraintFamily::CardinalityLower { k, .. } => s.len() >= *k,
        ConstraintFamily::CardinalityUpper { k, .. } => s.len() <= *k,
        ConstraintFamily::Knapsacks { knapsacks, .. } => knapsacks.iter().all(|ks| {
            s.iter().map(|j| ks.weights[j]).sum::<f64>() <= ks.budget * (1.0 + 1e-12) + 1e-12
        }),
        ConstraintFamily::SpanningTree { graph } => graph.is_spanning_tree(s),
        ConstraintFamily::StPath { graph } => match graph.terminals() {
            Ok((a, b)) => graph.is_simple_path(s, a, b),
            Err(_) => false,
        },
        ConstraintFamily::PerfectMatching { graph } => graph.is_perfect_matching(s),
        ConstraintFamily::StCut { graph } => stcut_separates(graph, s),
        ConstraintFamily::VertexCover { graph } => graph.covers_edges(s),
    }
}

fn stcut_separates(graph: &GraphSpec, s: &ElementSet) -> bool {
    let Ok((a, b)) = graph.terminals() else {
        return false;
    };
    !graph.reachable(a, &s.complement())[b]
}

/// Membership in the up-closure: some `X ⊆ S` is feasible.
pub fn contains_feasible_subset(c: &ConstraintFamily, s: &ElementSet) -> bool {
    if s.universe() != c.ground_size() {
        return false;
    }
    match c {
        ConstraintFamily::CardinalityLower { k, .. } => s.len() >= *k,
        ConstraintFamily::CardinalityUpper { .. } | ConstraintFamily::Knapsacks { .. } => true,
        ConstraintFamily::SpanningTree { graph } => graph.spans(s),
        ConstraintFamily::StPath { graph } => match graph.terminals() {
            Ok((a, b)) => graph.reachable(a, s)[b],
            Err(_) => false,
        },
        ConstraintFamily::PerfectMatching { graph } => match bipartite_left(graph) {
            Ok(left) => graph.max_bipartite_matching(left, s) == left,
            Err(_) => false,
        },
        ConstraintFamily::StCut { graph } => stcut_separates(graph, s),
        ConstraintFamily::VertexCover { graph } => graph.covers_edges(s),
    }
}

/// Covering description of the up-closure. Vertex cover and cardinality
/// lower bounds are built in; other families need `user`.
pub fn covering_polytope(
    c: &ConstraintFamily,
    user: Option<&CoveringFamily>,
) -> Result<CoveringFamily> {
    if let Some(fam) = user {
        if fam.n != c.ground_size() {
            return Err(Error::Validation(format!(
                "covering family over {} elements, constraint over {}",
                fam.n,
                c.ground_size()
            )));
        }
        fam.validate()?;
        return Ok(fam.clone());
    }
    match c {
        ConstraintFamily::VertexCover { graph } => {
            let constraints = graph
                .edges
                .iter()
                .map(|&(u, v)| CoverConstraint {
                    members: if u == v {
                        vec![u]
                    } else {
                        vec![u.min(v), u.max(v)]
                    },
                    demand: 1,
                })
                .collect();
            CoveringFamily::new(graph.nodes, constraints)
        }
        ConstraintFamily::CardinalityLower { n, k } => {
            let constraints = if *k == 0 {
                Vec::new()
            } else {
                vec![CoverConstraint {
                    members: (0..*n).collect(),
                    demand: *k,
                }]
            };
            CoveringFamily::new(*n, constraints)
        }
        other => Err(Error::Unsupported(format!(
            "no built-in covering description for {}; supply one",
            other.name()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, ids: &[usize]) -> ElementSet {
        ElementSet::from_ids(n, ids.iter().copied()).unwrap()
    }

    fn triangle() -> GraphSpec {
        GraphSpec::undirected(3, vec![(0, 1), (1, 2), (0, 2)])
    }

    fn cost(w: &[f64], s: &ElementSet) -> f64 {
        s.iter().map(|j| w[j]).sum()
    }

    #[test]
    fn spanning_tree_oracle_and_membership() {
        let c = ConstraintFamily::SpanningTree { graph: triangle() }
            .validated()
            .unwrap();
        let w = [1.0, 2.0, 3.0];
        let t = min_modular(&c, &w).unwrap();
        assert_eq!(cost(&w, &t), 3.0);
        assert_eq!(t.ids(), vec![0, 1]);
        assert!(!is_feasible(&c, &ElementSet::full(3)));
        assert!(contains_feasible_subset(&c, &ElementSet::full(3)));
    }

    #[test]
    fn cardinality_oracles() {
        let c = ConstraintFamily::CardinalityLower { n: 3, k: 2 };
        let s = min_modular(&c, &[5.0, 1.0, 3.0]).unwrap();
        assert_eq!(s.ids(), vec![1, 2]);
        let u = ConstraintFamily::CardinalityUpper { n: 3, k: 2 };
        assert!(is_feasible(&u, &set(3, &[0, 1])));
        assert!(!is_feasible(&u, &ElementSet::full(3)));
        assert!(ConstraintFamily::CardinalityLower { n: 3, k: 4 }
            .validate()
            .is_err());
    }

    #[test]
    fn st_path_oracle() {
        let g = GraphSpec::undirected(3, vec![(0, 1), (1, 2), (0, 2)]).with_terminals(0, 2);
        let c = ConstraintFamily::StPath { graph: g }.validated().unwrap();
        let w = [1.0, 1.0, 3.0];
        let p = min_modular(&c, &w).unwrap();
        assert_eq!(cost(&w, &p), 2.0);
        assert!(is_feasible(&c, &p));
        assert!(is_feasible(&c, &set(3, &[2])));
        assert!(!contains_feasible_subset(&c, &set(3, &[0])));
    }

    #[test]
    fn matching_membership() {
        let g = GraphSpec::bipartite(2, 2, vec![(0, 2), (0, 3), (1, 2), (1, 3)]);
        let c = ConstraintFamily::PerfectMatching { graph: g }
            .validated()
            .unwrap();
        assert!(is_feasible(&c, &set(4, &[0, 3])));
        assert!(!is_feasible(&c, &set(4, &[0, 1])));
        assert!(contains_feasible_subset(&c, &set(4, &[0, 1, 3])));
        assert!(!contains_feasible_subset(&c, &set(4, &[0, 2])));
    }

    #[test]
    fn vertex_cover_and_polytope() {
        let c = ConstraintFamily::VertexCover { graph: triangle() }
            .validated()
            .unwrap();
        assert!(contains_feasible_subset(&c, &set(3, &[0, 1])));
        assert!(!is_feasible(&c, &set(3, &[0])));
        let p = covering_polytope(&c, None).unwrap();
        assert_eq!(p.constraints.len(), 3);
        assert!(p
            .constraints
            .iter()
            .all(|w| w.members.len() == 2 && w.demand == 1));
        assert_eq!(p.factor(), 2);
        assert_eq!(c.approx_factor(), 2.0);
    }

    #[test]
    fn cardinality_polytope_factor() {
        let c = ConstraintFamily::CardinalityLower { n: 6, k: 6 };
        assert_eq!(covering_polytope(&c, None).unwrap().factor(), 1);
        let c = ConstraintFamily::CardinalityLower { n: 6, k: 2 };
        assert_eq!(covering_polytope(&c, None).unwrap().factor(), 5);
        let t = ConstraintFamily::SpanningTree { graph: triangle() };
        assert!(matches!(
            covering_polytope(&t, None),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn st_cut_oracle() {
        let g = GraphSpec::undirected(4, vec![(0, 1), (0, 2), (1, 3), (2, 3)]).with_terminals(0, 3);
        let c = ConstraintFamily::StCut { graph: g }.validated().unwrap();
        let w = [1.0, 4.0, 2.0, 1.0];
        let cut = min_modular(&c, &w).unwrap();
        assert_eq!(cost(&w, &cut), 2.0);
        assert!(is_feasible(&c, &cut));
        assert!(!is_feasible(&c, &set(4, &[0])));
    }

    #[test]
    fn restricted_oracle_stays_inside() {
        let c = ConstraintFamily::SpanningTree { graph: triangle() };
        let allowed = set(3, &[1, 2]);
        let t = min_modular_within(&c, &[1.0, 2.0, 3.0], &allowed).unwrap();
        assert_eq!(t.ids(), vec![1, 2]);
        let bad = set(3, &[2]);
        assert!(matches!(
            min_modular_within(&c, &[1.0, 2.0, 3.0], &bad),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn cost_vector_checked() {
        let c = ConstraintFamily::CardinalityLower { n: 3, k: 1 };
        assert!(min_modular(&c, &[1.0, 2.0]).is_err());
        assert!(min_modular(&c, &[1.0, -2.0, 0.0]).is_err());
    }
}
