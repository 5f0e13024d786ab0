//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls into the library's linear algebra or weight pushing;
//! the oracles work on plain `Vec<Vec<f64>>` and explicit path lists.
#![allow(dead_code)]

use blotto_core::graph::{LayeredGraph, Path};
use rand::Rng;

pub type Dense = Vec<Vec<f64>>;

pub fn to_dense(m: &faer::Mat<f64>) -> Dense {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
/// Returns eigenvalues ascending and eigenvectors as columns of `v`.
pub fn jacobi_eigen(a: &Dense) -> (Vec<f64>, Dense) {
    let n = a.len();
    let mut a = a.clone();
    let mut v: Dense = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let scale: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum::<f64>().max(1e-300);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = (0..n)
        .map(|r| order.iter().map(|&c| v[r][c]).collect())
        .collect();
    (values, vectors)
}

/// Pseudo-inverse applied to `x`, zeroing eigenvalues at or below `tol * max`.
pub fn dense_pinv_apply(a: &Dense, x: &[f64], tol: f64) -> Vec<f64> {
    let (vals, vecs) = jacobi_eigen(a);
    let n = a.len();
    let top = vals.iter().copied().fold(0.0f64, f64::max);
    let mut out = vec![0.0; n];
    for k in 0..n {
        if vals[k] <= tol * top {
            continue;
        }
        let coef: f64 = (0..n).map(|i| vecs[i][k] * x[i]).sum::<f64>() / vals[k];
        for i in 0..n {
            out[i] += coef * vecs[i][k];
        }
    }
    out
}

/// `w(p) / sum_q w(q)` with path weight the product of edge weights.
pub fn brute_path_probabilities(paths: &[Path], w: &[f64]) -> Vec<f64> {
    let raw: Vec<f64> = paths
        .iter()
        .map(|p| p.edges().iter().map(|&e| w[e]).product())
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|r| r / total).collect()
}

/// `sum_p mu(p) p p^T`.
pub fn brute_cooccurrence(num_edges: usize, paths: &[Path], probs: &[f64]) -> Dense {
    let mut m = vec![vec![0.0; num_edges]; num_edges];
    for (p, &mu) in paths.iter().zip(probs) {
        for &a in p.edges() {
            for &b in p.edges() {
                m[a][b] += mu;
            }
        }
    }
    m
}

/// Cost of the cheapest enumerated path; summation follows the path's edge order.
pub fn exhaustive_min(paths: &[Path], costs: &[f64]) -> f64 {
    paths
        .iter()
        .map(|p| p.dot(costs))
        .fold(f64::INFINITY, f64::min)
}

/// Costs that are multiples of 1/64 in [0, 4), so path sums are exact.
pub fn dyadic_costs<R: Rng>(len: usize, rng: &mut R) -> Vec<f64> {
    (0..len)
        .map(|_| rng.random_range(0..256u32) as f64 / 64.0)
        .collect()
}

/// Every `(m, n)` with `m, n <= bound` and `n >= 2`.
pub fn small_instances(bound: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for m in 1..=bound {
        for n in 2..=bound {
            v.push((m, n));
        }
    }
    v
}

pub fn graph(m: usize, n: usize) -> LayeredGraph {
    LayeredGraph::new(m, n).expect("valid dimensions")
}

pub fn max_abs_diff(a: &Dense, b: &faer::Mat<f64>) -> f64 {
    let mut d = 0.0f64;
    for (i, row) in a.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            d = d.max((x - b[(i, j)]).abs());
        }
    }
    d
}
