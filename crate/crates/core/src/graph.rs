//! The layered graph `G(m, n)`.
//!
//! Every budget-exact allocation of `m` troops over `n` battlefields is a
//! source-to-destination path with exactly one edge per battlefield. Node
//! `(i, j)` means "after the first `i` battlefields, `j` troops are spent";
//! the edge `(i, j1) -> (i + 1, j2)` allocates `j2 - j1` troops to
//! battlefield `i + 1`.
//!
//! Indexing is deterministic: nodes are layer-major with troops ascending,
//! edges are layer-major then ordered by `(from.troops, to.troops)`.

use num_bigint::BigUint;

use crate::error::{Error, Result};

/// Default ceiling on explicit path enumeration.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

/// A node `(layer, troops_used)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Node {
    pub layer: usize,
    pub troops: usize,
}

/// A directed edge between consecutive layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    /// Index of the tail node.
    pub from: usize,
    /// Index of the head node.
    pub to: usize,
    /// Zero-based battlefield this edge allocates to (equals the tail's layer).
    pub battlefield: usize,
    /// Troops allocated to `battlefield`.
    pub troops: usize,
}

/// A budget-exact allocation `p_1..p_n` with `sum p_i = m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Allocation(pub Vec<usize>);

impl Allocation {
    pub fn new(troops: Vec<usize>) -> Self {
        Allocation(troops)
    }

    pub fn troops(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A source-to-destination path, stored as its `n` edge indices in layer order.
///
/// This is the sparse form of the 0/1 incidence vector of length `E`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    edges: Vec<usize>,
}

impl Path {
    /// Edge indices in layer order.
    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn contains(&self, edge: usize) -> bool {
        self.edges.contains(&edge)
    }

    /// Dense 0/1 incidence vector of length `num_edges`.
    pub fn incidence(&self, num_edges: usize) -> Vec<bool> {
        let mut bits = vec![false; num_edges];
        for &e in &self.edges {
            bits[e] = true;
        }
        bits
    }

    /// Incidence vector as reals, for linear algebra.
    pub fn indicator(&self, num_edges: usize) -> Vec<f64> {
        let mut v = vec![0.0; num_edges];
        for &e in &self.edges {
            v[e] = 1.0;
        }
        v
    }

    /// Inner product with a per-edge vector, summed in layer order.
    pub fn dot(&self, values: &[f64]) -> f64 {
        self.edges.iter().map(|&e| values[e]).sum()
    }
}

/// The layered DAG whose paths are the learner's strategies.
#[derive(Debug, Clone)]
pub struct LayeredGraph {
    m: usize,
    n: usize,
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
    layer_edges: Vec<std::ops::Range<usize>>,
    lookup: Vec<Option<usize>>,
}

impl LayeredGraph {
    /// Builds `G(m, n)` for `m >= 1` troops and `n >= 2` battlefields.
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m < 1 || n < 2 {
            return Err(Error::InvalidDimensions { m, n });
        }
        let mut nodes = Vec::with_capacity(2 + (m + 1) * (n - 1));
        nodes.push(Node { layer: 0, troops: 0 });
        for layer in 1..n {
            for troops in 0..=m {
                nodes.push(Node { layer, troops });
            }
        }
        nodes.push(Node { layer: n, troops: m });
        let num_nodes = nodes.len();

        let mut edges = Vec::new();
        let mut layer_edges = Vec::with_capacity(n);
        let mut out_edges = vec![Vec::new(); num_nodes];
        let mut in_edges = vec![Vec::new(); num_nodes];
        let mut lookup = vec![None; num_nodes * num_nodes];
        for layer in 0..n {
            let start = edges.len();
            for (from, tail) in nodes.iter().enumerate().filter(|(_, v)| v.layer == layer) {
                for (to, head) in nodes.iter().enumerate().filter(|(_, v)| v.layer == layer + 1) {
                    if head.troops < tail.troops {
                        continue;
                    }
                    let idx = edges.len();
                    edges.push(Edge {
                        from,
                        to,
                        battlefield: layer,
                        troops: head.troops - tail.troops,
                    });
                    out_edges[from].push(idx);
                    in_edges[to].push(idx);
                    lookup[from * num_nodes + to] = Some(idx);
                }
            }
            layer_edges.push(start..edges.len());
        }

        Ok(LayeredGraph {
            m,
            n,
            nodes,
            edges,
            out_edges,
            in_edges,
            layer_edges,
            lookup,
        })
    }

    /// Troop budget.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Battlefield count (= edges per path).
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, idx: usize) -> &Edge {
        &self.edges[idx]
    }

    pub fn source(&self) -> usize {
        0
    }

    pub fn destination(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn out_edges(&self, node: usize) -> &[usize] {
        &self.out_edges[node]
    }

    pub fn in_edges(&self, node: usize) -> &[usize] {
        &self.in_edges[node]
    }

    /// Edge indices of battlefield `layer` (a contiguous range).
    pub fn layer_edges(&self, layer: usize) -> std::ops::Range<usize> {
        self.layer_edges[layer].clone()
    }

    /// Index of node `(layer, troops)`, if it exists.
    pub fn node_index(&self, layer: usize, troops: usize) -> Option<usize> {
        if troops > self.m || layer > self.n {
            return None;
        }
        if layer == 0 {
            (troops == 0).then_some(0)
        } else if layer == self.n {
            (troops == self.m).then_some(self.nodes.len() - 1)
        } else {
            Some(1 + (layer - 1) * (self.m + 1) + troops)
        }
    }

    /// Edge from node `from` to node `to`, if present.
    pub fn edge_between(&self, from: usize, to: usize) -> Option<usize> {
        self.lookup[from * self.nodes.len() + to]
    }

    /// Whether a directed path (possibly empty) leads from `u` to `v`.
    pub fn reachable(&self, u: usize, v: usize) -> bool {
        let (a, b) = (self.nodes[u], self.nodes[v]);
        u == v || (a.layer < b.layer && a.troops <= b.troops)
    }

    /// `(m + 1)[4 + (n - 2)(m + 2)] / 2`.
    pub fn edge_count_formula(m: usize, n: usize) -> usize {
        (m + 1) * (4 + (n - 2) * (m + 2)) / 2
    }

    /// `2 + (m + 1)(n - 1)`.
    pub fn node_count_formula(m: usize, n: usize) -> usize {
        2 + (m + 1) * (n - 1)
    }

    /// Number of paths, `C(n + m - 1, n - 1)`.
    pub fn path_count(&self) -> BigUint {
        binomial(self.n + self.m - 1, self.n - 1)
    }

    pub fn allocation_to_path(&self, alloc: &Allocation) -> Result<Path> {
        if alloc.len() != self.n {
            return Err(Error::InvalidAllocation(format!(
                "expected {} battlefields, got {}",
                self.n,
                alloc.len()
            )));
        }
        if alloc.total() != self.m {
            return Err(Error::InvalidAllocation(format!(
                "allocation {:?} spends {} troops, budget is {}",
                alloc.0,
                alloc.total(),
                self.m
            )));
        }
        let mut edges = Vec::with_capacity(self.n);
        let mut node = self.source();
        let mut spent = 0;
        for (layer, &troops) in alloc.0.iter().enumerate() {
            spent += troops;
            let next = self
                .node_index(layer + 1, spent)
                .expect("budget-exact prefix sums stay within the graph");
            let e = self
                .edge_between(node, next)
                .expect("consecutive prefix sums are joined by an edge");
            edges.push(e);
            node = next;
        }
        Ok(Path { edges })
    }

    pub fn path_to_allocation(&self, path: &Path) -> Allocation {
        Allocation(path.edges.iter().map(|&e| self.edges[e].troops).collect())
    }

    /// Validates a list of edge indices as a source-to-destination path.
    pub fn path_from_edges(&self, mut edges: Vec<usize>) -> Result<Path> {
        if edges.len() != self.n {
            return Err(Error::InvalidPath(format!(
                "expected {} edges, got {}",
                self.n,
                edges.len()
            )));
        }
        if let Some(&bad) = edges.iter().find(|&&e| e >= self.edges.len()) {
            return Err(Error::InvalidPath(format!("edge index {bad} out of range")));
        }
        edges.sort_unstable_by_key(|&e| self.edges[e].battlefield);
        let mut node = self.source();
        for (layer, &e) in edges.iter().enumerate() {
            let edge = &self.edges[e];
            if edge.battlefield != layer || edge.from != node {
                return Err(Error::InvalidPath(format!(
                    "edge {e} does not continue the path at layer {layer}"
                )));
            }
            node = edge.to;
        }
        Ok(Path { edges })
    }

    /// Parses a 0/1 incidence vector of length `E`.
    pub fn path_from_incidence(&self, bits: &[bool]) -> Result<Path> {
        if bits.len() != self.edges.len() {
            return Err(Error::LengthMismatch {
                expected: self.edges.len(),
                got: bits.len(),
            });
        }
        let edges = bits
            .iter()
            .enumerate()
            .filter_map(|(e, &b)| b.then_some(e))
            .collect();
        self.path_from_edges(edges)
    }

    /// All paths, in lexicographic order of their allocations.
    pub fn enumerate_paths(&self, cap: u64) -> Result<Vec<Path>> {
        let count = self.path_count();
        if count > BigUint::from(cap) {
            return Err(Error::EnumerationCap {
                count: count.to_string(),
                cap,
            });
        }
        let mut out = Vec::with_capacity(u64::try_from(&count).unwrap_or(0) as usize);
        let mut stack = Vec::with_capacity(self.n);
        self.extend_paths(self.source(), &mut stack, &mut out);
        Ok(out)
    }

    fn extend_paths(&self, node: usize, stack: &mut Vec<usize>, out: &mut Vec<Path>) {
        if node == self.destination() {
            out.push(Path {
                edges: stack.clone(),
            });
            return;
        }
        for &e in &self.out_edges[node] {
            stack.push(e);
            self.extend_paths(self.edges[e].to, stack, out);
            stack.pop();
        }
    }

    /// Path minimizing the summed edge cost, by a backward layer-by-layer DP.
    ///
    /// Among cost ties the lexicographically smallest allocation wins. The
    /// returned cost is the forward sum of the chosen path's edge costs.
    pub fn min_cost_path(&self, costs: &[f64]) -> Result<(Path, f64)> {
        if costs.len() != self.edges.len() {
            return Err(Error::LengthMismatch {
                expected: self.edges.len(),
                got: costs.len(),
            });
        }
        let num_nodes = self.nodes.len();
        let mut best = vec![f64::INFINITY; num_nodes];
        best[self.destination()] = 0.0;
        for u in (0..num_nodes - 1).rev() {
            best[u] = self.out_edges[u]
                .iter()
                .map(|&e| costs[e] + best[self.edges[e].to])
                .fold(f64::INFINITY, f64::min);
        }
        let mut edges = Vec::with_capacity(self.n);
        let mut node = self.source();
        while node != self.destination() {
            // out edges are sorted by troops ascending; the first optimum wins ties
            let e = *self.out_edges[node]
                .iter()
                .find(|&&e| costs[e] + best[self.edges[e].to] == best[node])
                .ok_or_else(|| Error::InvalidParameter("non-finite edge cost".into()))?;
            edges.push(e);
            node = self.edges[e].to;
        }
        let path = Path { edges };
        let cost = path.dot(costs);
        Ok((path, cost))
    }
}

/// Exact binomial coefficient.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}
