//! Weight pushing over the layered graph.
//!
//! A positive weight per edge induces the path distribution
//! `mu_w(P) = prod_{e in P} w_e / H(s, d)`, where `H(u, v)` sums the weights
//! of all `u -> v` paths. The `H` table drives exact path sampling, exact path
//! probabilities, and the co-occurrence matrix `E[p p^T]`, all without
//! touching the exponentially many paths.
//!
//! `H` is computed in the linear domain first; if any entry leaves the safe
//! floating-point range the table is recomputed with log-sum-exp.

use faer::Mat;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{LayeredGraph, Path};

const LINEAR_MAX: f64 = 1e300;
const LINEAR_MIN: f64 = 1e-300;

/// Strictly positive, finite weights, one per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeWeights(Vec<f64>);

impl EdgeWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some((e, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(Error::InvalidWeights(format!("edge {e} has weight {w}")));
        }
        Ok(EdgeWeights(weights))
    }

    /// All-ones weights, which realize the uniform distribution over paths.
    pub fn uniform(num_edges: usize) -> Self {
        EdgeWeights(vec![1.0; num_edges])
    }

    /// Exponentiates log-weights after shifting each battlefield's edges so
    /// that their largest log-weight is zero. Every path crosses each
    /// battlefield once, so the induced path distribution is unchanged.
    pub fn from_log(g: &LayeredGraph, log_weights: &[f64]) -> Result<Self> {
        if log_weights.len() != g.num_edges() {
            return Err(Error::LengthMismatch {
                expected: g.num_edges(),
                got: log_weights.len(),
            });
        }
        let mut out = vec![0.0; log_weights.len()];
        for layer in 0..g.n() {
            let range = g.layer_edges(layer);
            let top = log_weights[range.clone()]
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max);
            if !top.is_finite() {
                return Err(Error::InvalidWeights(format!(
                    "non-finite log-weight on battlefield {layer}"
                )));
            }
            for e in range {
                out[e] = (log_weights[e] - top).exp().max(f64::MIN_POSITIVE);
            }
        }
        EdgeWeights::new(out)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Multiplies every weight by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        EdgeWeights::new(self.0.iter().map(|w| w * c).collect())
    }

    /// `prod_{e in P} w_e`.
    pub fn path_weight(&self, path: &Path) -> f64 {
        path.edges().iter().map(|&e| self.0[e]).product()
    }
}

#[derive(Debug, Clone)]
enum Repr {
    Linear(Vec<f64>),
    Log(Vec<f64>),
}

/// Path-weight sums `H(u, v)` for every ordered node pair.
#[derive(Debug, Clone)]
pub struct HTable {
    num_nodes: usize,
    repr: Repr,
}

impl HTable {
    /// `H(u, v)`; may overflow to infinity for a log-domain table.
    pub fn get(&self, u: usize, v: usize) -> f64 {
        match &self.repr {
            Repr::Linear(h) => h[u * self.num_nodes + v],
            Repr::Log(h) => h[u * self.num_nodes + v].exp(),
        }
    }

    /// `ln H(u, v)`, negative infinity when no `u -> v` path exists.
    pub fn ln(&self, u: usize, v: usize) -> f64 {
        match &self.repr {
            Repr::Linear(h) => h[u * self.num_nodes + v].ln(),
            Repr::Log(h) => h[u * self.num_nodes + v],
        }
    }

    pub fn is_log_domain(&self) -> bool {
        matches!(self.repr, Repr::Log(_))
    }
}

/// Fills the `H` table by the reverse-topological recursion
/// `H(u, v) = sum_{u -> c} w_{[u, c]} H(c, v)`.
pub fn compute_h(g: &LayeredGraph, w: &EdgeWeights) -> Result<HTable> {
    if w.len() != g.num_edges() {
        return Err(Error::LengthMismatch {
            expected: g.num_edges(),
            got: w.len(),
        });
    }
    let nn = g.num_nodes();
    let mut h = vec![0.0; nn * nn];
    let mut in_range = true;
    for v in 0..nn {
        h[v * nn + v] = 1.0;
        for u in (0..v).rev() {
            if !g.reachable(u, v) {
                continue;
            }
            let mut acc = 0.0;
            for &e in g.out_edges(u) {
                let c = g.edge(e).to;
                if c <= v {
                    acc += w.0[e] * h[c * nn + v];
                }
            }
            if !(acc.is_finite() && (LINEAR_MIN..=LINEAR_MAX).contains(&acc)) {
                in_range = false;
            }
            h[u * nn + v] = acc;
        }
    }
    if in_range {
        return Ok(HTable {
            num_nodes: nn,
            repr: Repr::Linear(h),
        });
    }

    let log_w: Vec<f64> = w.0.iter().map(|x| x.ln()).collect();
    let mut lh = vec![f64::NEG_INFINITY; nn * nn];
    let mut terms = Vec::new();
    for v in 0..nn {
        lh[v * nn + v] = 0.0;
        for u in (0..v).rev() {
            if !g.reachable(u, v) {
                continue;
            }
            terms.clear();
            for &e in g.out_edges(u) {
                let c = g.edge(e).to;
                if c <= v && lh[c * nn + v] > f64::NEG_INFINITY {
                    terms.push(log_w[e] + lh[c * nn + v]);
                }
            }
            lh[u * nn + v] = log_sum_exp(&terms);
        }
    }
    Ok(HTable {
        num_nodes: nn,
        repr: Repr::Log(lh),
    })
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln()
}

/// Probability that the weight-pushing walk takes `edge` once it stands on the edge's tail:
/// `w_e H(head, d) / H(tail, d)`.
pub fn transition_probability(g: &LayeredGraph, w: &EdgeWeights, h: &HTable, edge: usize) -> f64 {
    let d = g.destination();
    let e = g.edge(edge);
    match &h.repr {
        Repr::Linear(_) => w.0[edge] * h.get(e.to, d) / h.get(e.from, d),
        Repr::Log(_) => (w.0[edge].ln() + h.ln(e.to, d) - h.ln(e.from, d)).exp(),
    }
}

/// Product of the walk's transition probabilities along `path`.
pub fn chain_probability(g: &LayeredGraph, w: &EdgeWeights, h: &HTable, path: &Path) -> f64 {
    path.edges()
        .iter()
        .map(|&e| transition_probability(g, w, h, e))
        .product()
}

/// Samples a path with probability `prod w_e / H(s, d)` by walking layer by
/// layer from the source, choosing each child with its transition probability.
pub fn wp_sample<R: Rng + ?Sized>(
    g: &LayeredGraph,
    w: &EdgeWeights,
    h: &HTable,
    rng: &mut R,
) -> Path {
    let d = g.destination();
    let mut edges = Vec::with_capacity(g.n());
    let mut node = g.source();
    while node != d {
        let out = g.out_edges(node);
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut chosen = None;
        let mut last_positive = out[0];
        for &e in out {
            let p = transition_probability(g, w, h, e);
            if p > 0.0 {
                last_positive = e;
            }
            acc += p;
            if u < acc {
                chosen = Some(e);
                break;
            }
        }
        // rounding can leave acc a hair below one
        let e = chosen.unwrap_or(last_positive);
        edges.push(e);
        node = g.edge(e).to;
    }
    g.path_from_edges(edges)
        .expect("a layer-by-layer walk always yields a valid path")
}

/// `prod_{e in P} w_e / H(s, d)`.
pub fn path_probability(g: &LayeredGraph, w: &EdgeWeights, h: &HTable, path: &Path) -> f64 {
    let (s, d) = (g.source(), g.destination());
    match &h.repr {
        Repr::Linear(_) => w.path_weight(path) / h.get(s, d),
        Repr::Log(_) => {
            let lw: f64 = path.edges().iter().map(|&e| w.0[e].ln()).sum();
            (lw - h.ln(s, d)).exp()
        }
    }
}

/// Symmetric `E x E` matrix `E[p p^T]` under a path distribution.
#[derive(Debug, Clone)]
pub struct CooccurrenceMatrix(Mat<f64>);

impl CooccurrenceMatrix {
    pub fn from_mat(mat: Mat<f64>) -> Self {
        CooccurrenceMatrix(mat)
    }

    /// `sum_P prob(P) p p^T` over an explicit list of paths.
    pub fn from_paths(num_edges: usize, paths: &[Path], probs: &[f64]) -> Self {
        let mut m = Mat::<f64>::zeros(num_edges, num_edges);
        for (p, &q) in paths.iter().zip(probs) {
            if q == 0.0 {
                continue;
            }
            for &a in p.edges() {
                for &b in p.edges() {
                    m[(a, b)] += q;
                }
            }
        }
        CooccurrenceMatrix(m)
    }

    pub fn as_mat(&self) -> &Mat<f64> {
        &self.0
    }

    pub fn into_mat(self) -> Mat<f64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.0[(i, i)]).sum()
    }

    /// `1^T M 1`.
    pub fn ones_form(&self) -> f64 {
        let k = self.dim();
        (0..k)
            .map(|i| (0..k).map(|j| self.0[(i, j)]).sum::<f64>())
            .sum()
    }

    /// `a * self + b * other`.
    pub fn mix(&self, a: f64, other: &CooccurrenceMatrix, b: f64) -> CooccurrenceMatrix {
        let k = self.dim();
        CooccurrenceMatrix(Mat::from_fn(k, k, |i, j| {
            a * self.0[(i, j)] + b * other.0[(i, j)]
        }))
    }
}

/// Co-occurrence matrix of `mu_w`, built from the `H` table.
///
/// Entry `(e1, e2)` with `e1 = [u1, v1]` before `e2 = [u2, v2]` is
/// `H(s, u1) w1 H(v1, u2) w2 H(v2, d) / H(s, d)`; the diagonal is
/// `H(s, u1) w1 H(v1, d) / H(s, d)`.
pub fn cooccurrence(g: &LayeredGraph, w: &EdgeWeights) -> Result<CooccurrenceMatrix> {
    let h = compute_h(g, w)?;
    Ok(cooccurrence_with_h(g, w, &h))
}

/// As [`cooccurrence`], reusing an `H` table already computed for `w`.
pub fn cooccurrence_with_h(g: &LayeredGraph, w: &EdgeWeights, h: &HTable) -> CooccurrenceMatrix {
    let ne = g.num_edges();
    let mut out = Mat::<f64>::zeros(ne, ne);
    fill_cooccurrence(g, w, h, &mut out);
    CooccurrenceMatrix(out)
}

/// Writes the co-occurrence matrix of `mu_w` into `out` (overwriting every entry).
pub fn fill_cooccurrence(g: &LayeredGraph, w: &EdgeWeights, h: &HTable, out: &mut Mat<f64>) {
    let ne = g.num_edges();
    let (s, d) = (g.source(), g.destination());
    let edges = g.edges();
    let n = g.n();
    match &h.repr {
        Repr::Linear(hv) => {
            let nn = h.num_nodes;
            let hh = |u: usize, v: usize| hv[u * nn + v];
            let total = hh(s, d);
            // left_e = H(s, u) w_e / H(s, d), right_e = w_e H(v, d)
            let left: Vec<f64> = edges
                .iter()
                .zip(&w.0)
                .map(|(e, we)| hh(s, e.from) * we / total)
                .collect();
            let right: Vec<f64> = edges.iter().zip(&w.0).map(|(e, we)| we * hh(e.to, d)).collect();
            for e1 in 0..ne {
                let v1 = edges[e1].to;
                out[(e1, e1)] = left[e1] * hh(v1, d);
                let layer = edges[e1].battlefield;
                for e2 in g.layer_edges(layer).filter(|&e2| e2 != e1) {
                    out[(e1, e2)] = 0.0;
                }
                for next in layer + 1..n {
                    for e2 in g.layer_edges(next) {
                        let val = left[e1] * hh(v1, edges[e2].from) * right[e2];
                        out[(e1, e2)] = val;
                        out[(e2, e1)] = val;
                    }
                }
            }
        }
        Repr::Log(_) => {
            let total = h.ln(s, d);
            let left: Vec<f64> = edges
                .iter()
                .zip(&w.0)
                .map(|(e, we)| h.ln(s, e.from) + we.ln() - total)
                .collect();
            let right: Vec<f64> = edges
                .iter()
                .zip(&w.0)
                .map(|(e, we)| we.ln() + h.ln(e.to, d))
                .collect();
            for e1 in 0..ne {
                let v1 = edges[e1].to;
                out[(e1, e1)] = (left[e1] + h.ln(v1, d)).exp();
                let layer = edges[e1].battlefield;
                for e2 in g.layer_edges(layer).filter(|&e2| e2 != e1) {
                    out[(e1, e2)] = 0.0;
                }
                for next in layer + 1..n {
                    for e2 in g.layer_edges(next) {
                        let val = (left[e1] + h.ln(v1, edges[e2].from) + right[e2]).exp();
                        out[(e1, e2)] = val;
                        out[(e2, e1)] = val;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::DEFAULT_ENUMERATION_CAP;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_weights(ne: usize, rng: &mut ChaCha8Rng) -> EdgeWeights {
        EdgeWeights::new((0..ne).map(|_| 0.1 + 3.0 * rng.random::<f64>()).collect()).unwrap()
    }

    #[test]
    fn unit_weights_count_paths() {
        let g = LayeredGraph::new(3, 3).unwrap();
        let h = compute_h(&g, &EdgeWeights::uniform(g.num_edges())).unwrap();
        assert_eq!(h.get(g.source(), g.destination()), 10.0);
        for j in 0..=3 {
            let u = g.node_index(1, j).unwrap();
            assert_eq!(h.get(u, g.destination()), (4 - j) as f64);
        }
        assert_eq!(h.get(g.destination(), g.source()), 0.0);
        assert_eq!(h.get(4, 4), 1.0);
    }

    #[test]
    fn doubling_one_weight_adds_its_path_count() {
        let g = LayeredGraph::new(3, 3).unwrap();
        let paths = g.enumerate_paths(DEFAULT_ENUMERATION_CAP).unwrap();
        for e in 0..g.num_edges() {
            let mut w = vec![1.0; g.num_edges()];
            w[e] = 2.0;
            let h = compute_h(&g, &EdgeWeights::new(w).unwrap()).unwrap();
            let through = paths.iter().filter(|p| p.contains(e)).count() as f64;
            assert_eq!(h.get(g.source(), g.destination()), 10.0 + through);
        }
    }

    #[test]
    fn first_step_probabilities_uniform() {
        let g = LayeredGraph::new(3, 3).unwrap();
        let w = EdgeWeights::uniform(g.num_edges());
        let h = compute_h(&g, &w).unwrap();
        let probs: Vec<f64> = g
            .out_edges(g.source())
            .iter()
            .map(|&e| transition_probability(&g, &w, &h, e))
            .collect();
        let expected = [0.4, 0.3, 0.2, 0.1];
        for (p, q) in probs.iter().zip(expected) {
            assert!((p - q).abs() < 1e-15);
        }
    }

    #[test]
    fn probabilities_sum_to_one_and_are_scale_invariant() {
        let g = LayeredGraph::new(2, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let w = random_weights(g.num_edges(), &mut rng);
        let h = compute_h(&g, &w).unwrap();
        let ws = w.scaled(37.5).unwrap();
        let hs = compute_h(&g, &ws).unwrap();
        let paths = g.enumerate_paths(DEFAULT_ENUMERATION_CAP).unwrap();
        let total_weight: f64 = paths.iter().map(|p| w.path_weight(p)).sum();
        let mut sum = 0.0;
        for p in &paths {
            let q = path_probability(&g, &w, &h, p);
            assert!((q - w.path_weight(p) / total_weight).abs() < 1e-14);
            assert!((q - path_probability(&g, &ws, &hs, p)).abs() < 1e-14);
            sum += q;
        }
        assert!((sum - 1.0).abs() < 1e-13);
    }

    #[test]
    fn dominant_path_is_sampled() {
        let g = LayeredGraph::new(3, 3).unwrap();
        let paths = g.enumerate_paths(DEFAULT_ENUMERATION_CAP).unwrap();
        let target = &paths[6];
        let mut w = vec![1.0; g.num_edges()];
        for &e in target.edges() {
            w[e] = 1e6;
        }
        let w = EdgeWeights::new(w).unwrap();
        let h = compute_h(&g, &w).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            assert_eq!(&wp_sample(&g, &w, &h, &mut rng), target);
        }
    }

    #[test]
    fn log_domain_matches_linear() {
        let g = LayeredGraph::new(4, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let w = random_weights(g.num_edges(), &mut rng);
        let h = compute_h(&g, &w).unwrap();
        assert!(!h.is_log_domain());
        // scaling every weight by 1e120 pushes H(s, d) past 1e300
        let big = w.scaled(1e120).unwrap();
        let hb = compute_h(&g, &big).unwrap();
        assert!(hb.is_log_domain());
        let m1 = cooccurrence_with_h(&g, &w, &h);
        let m2 = cooccurrence_with_h(&g, &big, &hb);
        for i in 0..g.num_edges() {
            for j in 0..g.num_edges() {
                assert!((m1.get(i, j) - m2.get(i, j)).abs() < 1e-12);
            }
        }
        for p in g.enumerate_paths(DEFAULT_ENUMERATION_CAP).unwrap() {
            let a = path_probability(&g, &w, &h, &p);
            let b = path_probability(&g, &big, &hb, &p);
            assert!((a - b).abs() < 1e-13);
            assert!((chain_probability(&g, &big, &hb, &p) - b).abs() < 1e-13);
        }
    }

    #[test]
    fn tiny_weights_fall_back_to_log_domain() {
        let g = LayeredGraph::new(3, 5).unwrap();
        let w = EdgeWeights::new(vec![1e-80; g.num_edges()]).unwrap();
        let h = compute_h(&g, &w).unwrap();
        assert!(h.is_log_domain());
        let m = cooccurrence_with_h(&g, &w, &h);
        assert!((m.trace() - 5.0).abs() < 1e-10);
    }

    #[test]
    fn from_log_shifts_per_layer() {
        let g = LayeredGraph::new(2, 3).unwrap();
        let logs: Vec<f64> = (0..g.num_edges()).map(|e| 800.0 + e as f64).collect();
        let w = EdgeWeights::from_log(&g, &logs).unwrap();
        for layer in 0..g.n() {
            let top = g.layer_edges(layer).map(|e| w.as_slice()[e]).fold(0.0, f64::max);
            assert_eq!(top, 1.0);
        }
    }

    #[test]
    fn rejects_nonpositive_weights() {
        assert!(EdgeWeights::new(vec![1.0, 0.0]).is_err());
        assert!(EdgeWeights::new(vec![1.0, f64::NAN]).is_err());
        assert!(EdgeWeights::new(vec![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn cooccurrence_diagonal_unit_weights() {
        let g = LayeredGraph::new(3, 3).unwrap();
        let m = cooccurrence(&g, &EdgeWeights::uniform(g.num_edges())).unwrap();
        // edge 0 is s -> (1, 0), on 4 of the 10 paths
        assert!((m.get(0, 0) - 0.4).abs() < 1e-15);
        assert!((m.trace() - 3.0).abs() < 1e-14);
        assert!((m.ones_form() - 9.0).abs() < 1e-13);
    }
}
