//! Graph descriptions and the exact combinatorial routines behind the
//! constraint oracles: Kruskal, Dijkstra, Hungarian assignment,
//! Edmonds–Karp max-flow, augmenting-path matching and local-ratio vertex
//! cover.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::set::ElementSet;

/// A graph whose edges (or, for vertex cover, vertices) form the ground set.
///
/// For bipartite graphs, nodes `0..left` are the left side and
/// `left..nodes` the right side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub nodes: usize,
    pub edges: Vec<(usize, usize)>,
    #[serde(default)]
    pub directed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<usize>,
}

impl GraphSpec {
    pub fn undirected(nodes: usize, edges: Vec<(usize, usize)>) -> Self {
        GraphSpec {
            nodes,
            edges,
            directed: false,
            s: None,
            t: None,
            left: None,
        }
    }

    pub fn with_terminals(mut self, s: usize, t: usize) -> Self {
        self.s = Some(s);
        self.t = Some(t);
        self
    }

    pub fn bipartite(left: usize, right: usize, edges: Vec<(usize, usize)>) -> Self {
        GraphSpec {
            nodes: left + right,
            edges,
            directed: false,
            s: None,
            t: None,
            left: Some(left),
        }
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub(crate) fn validate_endpoints(&self) -> Result<()> {
        if self.nodes == 0 {
            return Err(Error::Validation("graph.nodes must be positive".into()));
        }
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            if u >= self.nodes || v >= self.nodes {
                return Err(Error::Validation(format!(
                    "graph.edges[{e}] = ({u}, {v}) has an endpoint >= {}",
                    self.nodes
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn terminals(&self) -> Result<(usize, usize)> {
        match (self.s, self.t) {
            (Some(s), Some(t)) if s < self.nodes && t < self.nodes && s != t => Ok((s, t)),
            (Some(s), Some(t)) => Err(Error::Validation(format!(
                "terminals s = {s}, t = {t} must be distinct nodes below {}",
                self.nodes
            ))),
            _ => Err(Error::Validation("graph.s and graph.t are required".into())),
        }
    }

    /// Outgoing arcs `(edge id, head)` restricted to `allowed`.
    fn adjacency(&self, allowed: &ElementSet) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.nodes];
        for e in allowed.iter() {
            let (u, v) = self.edges[e];
            adj[u].push((e, v));
            if !self.directed && u != v {
                adj[v].push((e, u));
            }
        }
        adj
    }

    /// Nodes reachable from `src` using edges in `allowed`.
    pub(crate) fn reachable(&self, src: usize, allowed: &ElementSet) -> Vec<bool> {
        let adj = self.adjacency(allowed);
        let mut seen = vec![false; self.nodes];
        let mut queue = VecDeque::from([src]);
        seen[src] = true;
        while let Some(u) = queue.pop_front() {
            for &(_, v) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    /// Whether `allowed` connects every node (undirected sense).
    pub(crate) fn spans(&self, allowed: &ElementSet) -> bool {
        let mut uf = UnionFind::new(self.nodes);
        let mut comps = self.nodes;
        for e in allowed.iter() {
            let (u, v) = self.edges[e];
            if uf.union(u, v) {
                comps -= 1;
            }
        }
        comps == 1
    }

    pub(crate) fn is_spanning_tree(&self, s: &ElementSet) -> bool {
        if s.len() + 1 != self.nodes {
            return false;
        }
        let mut uf = UnionFind::new(self.nodes);
        s.iter().all(|e| {
            let (u, v) = self.edges[e];
            uf.union(u, v)
        })
    }

    /// Whether the edges of `s` are exactly one simple `src -> dst` path.
    pub(crate) fn is_simple_path(&self, s: &ElementSet, src: usize, dst: usize) -> bool {
        if s.is_empty() {
            return false;
        }
        let adj = self.adjacency(s);
        let mut used = vec![false; self.m()];
        let mut visited = vec![false; self.nodes];
        let mut cur = src;
        visited[cur] = true;
        let mut steps = 0;
        while cur != dst {
            let mut next = adj[cur].iter().filter(|(e, _)| !used[*e]);
            let Some(&(e, v)) = next.next() else {
                return false;
            };
            if next.next().is_some() || visited[v] {
                return false;
            }
            used[e] = true;
            visited[v] = true;
            steps += 1;
            cur = v;
        }
        steps == s.len()
    }

    pub(crate) fn is_perfect_matching(&self, s: &ElementSet) -> bool {
        let mut deg = vec![0usize; self.nodes];
        for e in s.iter() {
            let (u, v) = self.edges[e];
            if u == v {
                return false;
            }
            deg[u] += 1;
            deg[v] += 1;
        }
        deg.iter().all(|&d| d == 1)
    }

    pub(crate) fn covers_edges(&self, vertices: &ElementSet) -> bool {
        self.edges
            .iter()
            .all(|&(u, v)| vertices.contains(u) || vertices.contains(v))
    }

    /// Size of a maximum matching between the sides using edges in `allowed`.
    pub(crate) fn max_bipartite_matching(&self, left: usize, allowed: &ElementSet) -> usize {
        let mut adj = vec![Vec::new(); left];
        for e in allowed.iter() {
            let (u, v) = self.edges[e];
            let (l, r) = if u < left { (u, v) } else { (v, u) };
            if l < left && r >= left {
                adj[l].push(r - left);
            }
        }
        let right = self.nodes - left;
        let mut mate: Vec<Option<usize>> = vec![None; right];
        fn augment(
            u: usize,
            adj: &[Vec<usize>],
            seen: &mut [bool],
            mate: &mut [Option<usize>],
        ) -> bool {
            for &r in &adj[u] {
                if !seen[r] {
                    seen[r] = true;
                    if mate[r].is_none_or(|w| augment(w, adj, seen, mate)) {
                        mate[r] = Some(u);
                        return true;
                    }
                }
            }
            false
        }
        (0..left)
            .filter(|&u| augment(u, &adj, &mut vec![false; right], &mut mate))
            .count()
    }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the classes of `a` and `b`; false if they were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Minimum spanning tree over `allowed`, ties by edge id.
pub(crate) fn kruskal(g: &GraphSpec, w: &[f64], allowed: &ElementSet) -> Result<ElementSet> {
    let mut order: Vec<usize> = allowed.iter().collect();
    order.sort_by(|&a, &b| w[a].total_cmp(&w[b]).then(a.cmp(&b)));
    let mut uf = UnionFind::new(g.nodes);
    let mut tree = ElementSet::empty(g.m());
    for e in order {
        let (u, v) = g.edges[e];
        if uf.union(u, v) {
            tree.insert(e);
        }
    }
    if tree.len() + 1 != g.nodes {
        return Err(Error::Infeasible("edge set does not span the graph".into()));
    }
    Ok(tree)
}

/// Shortest `s -> t` path over `allowed` with nonnegative weights.
pub(crate) fn dijkstra(
    g: &GraphSpec,
    w: &[f64],
    s: usize,
    t: usize,
    allowed: &ElementSet,
) -> Result<ElementSet> {
    let adj = g.adjacency(allowed);
    let mut dist = vec![f64::INFINITY; g.nodes];
    let mut pred: Vec<Option<(usize, usize)>> = vec![None; g.nodes];
    let mut done = vec![false; g.nodes];
    dist[s] = 0.0;
    loop {
        let u = (0..g.nodes)
            .filter(|&u| !done[u] && dist[u].is_finite())
            .min_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(a.cmp(&b)));
        let Some(u) = u else { break };
        if u == t {
            break;
        }
        done[u] = true;
        for &(e, v) in &adj[u] {
            let d = dist[u] + w[e];
            if !done[v] && d < dist[v] {
                dist[v] = d;
                pred[v] = Some((e, u));
            }
        }
    }
    if !dist[t].is_finite() {
        return Err(Error::Infeasible(format!("node {t} unreachable from {s}")));
    }
    let mut path = ElementSet::empty(g.m());
    let mut cur = t;
    while let Some((e, u)) = pred[cur] {
        path.insert(e);
        cur = u;
    }
    Ok(path)
}

/// Minimum-cost perfect matching on a bipartite graph via the Hungarian
/// method with potentials; edges outside `allowed` are unavailable.
pub(crate) fn hungarian(
    g: &GraphSpec,
    left: usize,
    w: &[f64],
    allowed: &ElementSet,
) -> Result<ElementSet> {
    let right = g.nodes - left;
    if left != right {
        return Err(Error::Infeasible(format!(
            "perfect matching needs equal sides, got {left} and {right}"
        )));
    }
    let n = left;
    // best[i][j]: cheapest allowed edge between left i and right j.
    let mut best: Vec<Vec<Option<usize>>> = vec![vec![None; n]; n];
    let mut total = 0.0;
    for e in allowed.iter() {
        let (u, v) = g.edges[e];
        let (l, r) = if u < left { (u, v) } else { (v, u) };
        if l >= left || r < left {
            continue;
        }
        total += w[e];
        let slot = &mut best[l][r - left];
        if slot.is_none_or(|b| w[e] < w[b]) {
            *slot = Some(e);
        }
    }
    let big = (total + 1.0) * (n as f64 + 1.0);
    let cost = |i: usize, j: usize| best[i][j].map_or(big, |e| w[e]);

    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut matching = ElementSet::empty(g.m());
    for j in 1..=n {
        match best[p[j] - 1][j - 1] {
            Some(e) => matching.insert(e),
            None => return Err(Error::Infeasible("no perfect matching in edge set".into())),
        }
    }
    Ok(matching)
}

/// Minimum `s-t` cut over capacities `w` via Edmonds–Karp. Edges outside
/// `allowed` get infinite capacity and are never cut.
pub(crate) fn min_cut(
    g: &GraphSpec,
    w: &[f64],
    s: usize,
    t: usize,
    allowed: &ElementSet,
) -> Result<ElementSet> {
    // Residual arcs stored in pairs: arc 2e is u->v, arc 2e+1 is v->u.
    let m = g.m();
    let mut cap = vec![0.0; 2 * m];
    let mut head = vec![0usize; 2 * m];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); g.nodes];
    for (e, &(a, b)) in g.edges.iter().enumerate() {
        let c = if allowed.contains(e) {
            w[e]
        } else {
            f64::INFINITY
        };
        cap[2 * e] = c;
        cap[2 * e + 1] = if g.directed { 0.0 } else { c };
        head[2 * e] = b;
        head[2 * e + 1] = a;
        out[a].push(2 * e);
        out[b].push(2 * e + 1);
    }
    let scale = w.iter().cloned().fold(0.0, f64::max).max(1.0);
    let eps = 1e-12 * scale;
    loop {
        let mut pred: Vec<Option<usize>> = vec![None; g.nodes];
        let mut seen = vec![false; g.nodes];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            if x == t {
                break;
            }
            for &a in &out[x] {
                let y = head[a];
                if !seen[y] && cap[a] > eps {
                    seen[y] = true;
                    pred[y] = Some(a);
                    queue.push_back(y);
                }
            }
        }
        if !seen[t] {
            let mut cut = ElementSet::empty(m);
            for (e, &(a, b)) in g.edges.iter().enumerate() {
                let crosses = if g.directed {
                    seen[a] && !seen[b]
                } else {
                    seen[a] != seen[b]
                };
                if crosses {
                    cut.insert(e);
                }
            }
            return Ok(cut);
        }
        let mut bottleneck = f64::INFINITY;
        let mut x = t;
        while let Some(a) = pred[x] {
            bottleneck = bottleneck.min(cap[a]);
            x = head[a ^ 1];
        }
        if bottleneck.is_infinite() {
            return Err(Error::Infeasible(
                "every s-t cut uses an edge outside the allowed set".into(),
            ));
        }
        let mut x = t;
        while let Some(a) = pred[x] {
            cap[a] -= bottleneck;
            cap[a ^ 1] += bottleneck;
            x = head[a ^ 1];
        }
    }
}

/// Local-ratio 2-approximate weighted vertex cover; vertices outside
/// `allowed` are unavailable.
pub(crate) fn local_ratio_cover(
    g: &GraphSpec,
    w: &[f64],
    allowed: &ElementSet,
) -> Result<ElementSet> {
    let mut residual: Vec<f64> = (0..g.nodes)
        .map(|v| {
            if allowed.contains(v) {
                w[v]
            } else {
                f64::INFINITY
            }
        })
        .collect();
    let mut touched = vec![false; g.nodes];
    for &(a, b) in &g.edges {
        let delta = residual[a].min(residual[b]);
        if delta.is_infinite() {
            return Err(Error::Infeasible(format!(
                "edge ({a}, {b}) has no allowed endpoint"
            )));
        }
        residual[a] -= delta;
        if a != b {
            residual[b] -= delta;
        }
        touched[a] = true;
        touched[b] = true;
    }
    ElementSet::from_ids(
        g.nodes,
        (0..g.nodes).filter(|&v| touched[v] && residual[v] == 0.0),
    )
}
