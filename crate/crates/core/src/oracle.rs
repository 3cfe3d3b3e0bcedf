//! Exact enumeration and distribution diagnostics for small graphs.

use serde::Serialize;

use crate::engine::Session;
use crate::error::{Error, Result};
use crate::graph::{contains, intersect_into, Adjacency, Graph, VertexId};
use crate::par::{self, Executor};
use crate::pattern::{MatchingOrder, Pattern};

/// Default vertex limit for [`exact_count`].
pub const DEFAULT_GUARD: usize = 5000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactCount {
    /// Ordered injective embeddings `C(G, P)`.
    pub total: u64,
    /// Embeddings whose first matched vertex is `v`.
    pub per_vertex: Vec<u64>,
}

impl ExactCount {
    /// `n(v) / Σ n(x)`.
    pub fn ideal_distribution(&self) -> Result<Vec<f64>> {
        if self.total == 0 {
            return Err(Error::UndefinedDistribution);
        }
        let t = self.total as f64;
        Ok(self.per_vertex.iter().map(|&n| n as f64 / t).collect())
    }
}

/// Counts embeddings in matching order `order`, refusing graphs above
/// [`DEFAULT_GUARD`] vertices.
pub fn exact_count(g: &Graph, p: &Pattern, order: &MatchingOrder) -> Result<ExactCount> {
    exact_count_with(g, p, order, Some(DEFAULT_GUARD), true)
}

/// `guard = None` disables the size check.
pub fn exact_count_with(
    g: &Graph,
    p: &Pattern,
    order: &MatchingOrder,
    guard: Option<usize>,
    parallel: bool,
) -> Result<ExactCount> {
    let n = g.num_vertices();
    if let Some(limit) = guard {
        if n > limit {
            let avg = 2.0 * g.num_edges() as f64 / n.max(1) as f64;
            return Err(Error::GuardExceeded {
                vertices: n,
                limit,
                estimated_work: n as f64 * avg.powi(p.num_vertices() as i32 - 1),
            });
        }
    }
    let back = backward_steps(p, order);
    let per_vertex = par::map_range(n, parallel, |v| {
        let mut tau = vec![v as VertexId];
        let mut bufs = vec![(Vec::new(), Vec::new()); order.len()];
        extend(g, &back, &mut tau, &mut bufs)
    });
    Ok(ExactCount {
        total: per_vertex.iter().sum(),
        per_vertex,
    })
}

fn backward_steps(p: &Pattern, order: &MatchingOrder) -> Vec<Vec<usize>> {
    (0..order.len())
        .map(|i| {
            let u = order.vertex(i);
            (0..i).filter(|&j| p.has_edge(order.vertex(j), u)).collect()
        })
        .collect()
}

/// Successful extensions `n_τ` of the partial embedding `prefix` (graph
/// vertices for the first `prefix.len()` steps of `order`). The prefix
/// itself is not validated.
pub fn count_extensions(g: &Graph, p: &Pattern, order: &MatchingOrder, prefix: &[VertexId]) -> u64 {
    assert!(!prefix.is_empty() && prefix.len() <= order.len());
    let back = backward_steps(p, order);
    let mut tau = prefix.to_vec();
    let mut bufs = vec![(Vec::new(), Vec::new()); order.len()];
    extend(g, &back, &mut tau, &mut bufs)
}

fn extend(g: &Graph, back: &[Vec<usize>], tau: &mut Vec<VertexId>, bufs: &mut [(Vec<VertexId>, Vec<VertexId>)]) -> u64 {
    let i = tau.len();
    if i == back.len() {
        return 1;
    }
    let lists: Vec<&[VertexId]> = back[i].iter().map(|&j| g.neighbors(tau[j])).collect();
    let (mut cands, mut tmp) = std::mem::take(&mut bufs[i]);
    intersect_into(&lists, &mut cands, &mut tmp);
    let mut count = 0;
    for &v in &cands {
        if tau.contains(&v) {
            continue;
        }
        if i + 1 == back.len() {
            count += 1;
            continue;
        }
        tau.push(v);
        count += extend(g, back, tau, bufs);
        tau.pop();
    }
    bufs[i] = (cands, tmp);
    count
}

/// Ideal first-vertex distribution for `order`.
pub fn ideal_first_vertex_distribution(g: &Graph, p: &Pattern, order: &MatchingOrder) -> Result<Vec<f64>> {
    exact_count(g, p, order)?.ideal_distribution()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KlDivergence {
    /// Natural-log divergence; `+∞` when absolute continuity fails.
    pub value: f64,
    /// Indices with `p > 0` and `q = 0`.
    pub offending: Vec<usize>,
}

/// `Σ p · ln(p / q)` with `0 · ln(0 / q) = 0`.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> KlDivergence {
    assert_eq!(p.len(), q.len(), "distributions differ in length");
    let mut value = 0.0;
    let mut offending = Vec::new();
    for (i, (&pi, &qi)) in p.iter().zip(q).enumerate() {
        if pi <= 0.0 {
            continue;
        }
        if qi <= 0.0 {
            offending.push(i);
        } else {
            value += pi * (pi / qi).ln();
        }
    }
    if !offending.is_empty() {
        value = f64::INFINITY;
    }
    KlDivergence { value, offending }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EtaEstimate {
    /// `E[X²] / C² − 1`.
    pub eta: f64,
    pub std_err: f64,
    pub samples: u64,
}

/// Empirical average multiplicative error of the session's sampler.
pub fn estimate_mean_eta(session: &Session, samples: u64, seed: u64, exact_total: u64, exec: &Executor) -> EtaEstimate {
    let c2 = (exact_total as f64).powi(2);
    let xs = session.outputs(samples, seed, exec);
    let m = xs.len() as f64;
    let sq: Vec<f64> = xs.iter().map(|x| x * x / c2).collect();
    let mean = sq.iter().sum::<f64>() / m;
    let var = sq.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (m - 1.0).max(1.0);
    EtaEstimate {
        eta: mean - 1.0,
        std_err: (var / m).sqrt(),
        samples: xs.len() as u64,
    }
}

/// Distinct vertex subsets inducing a subgraph that contains `p`, by
/// exhaustive subset enumeration. Exponential; tiny graphs only.
pub fn count_instances_by_subsets(g: &Graph, p: &Pattern) -> u64 {
    let n = g.num_vertices();
    let k = p.num_vertices();
    assert!(n <= 24, "subset enumeration is exponential");
    let mut count = 0;
    let mut subset: Vec<VertexId> = Vec::with_capacity(k);
    subsets(n as VertexId, k, 0, &mut subset, &mut |s| {
        // embeddings whose image is exactly `s`
        count += mappings_into(g, p, s);
    });
    count / p.count_automorphisms()
}

fn subsets(n: VertexId, k: usize, from: VertexId, cur: &mut Vec<VertexId>, f: &mut impl FnMut(&[VertexId])) {
    if cur.len() == k {
        f(cur);
        return;
    }
    for v in from..n {
        cur.push(v);
        subsets(n, k, v + 1, cur, f);
        cur.pop();
    }
}

fn mappings_into(g: &Graph, p: &Pattern, s: &[VertexId]) -> u64 {
    fn go(g: &Graph, p: &Pattern, s: &[VertexId], map: &mut Vec<VertexId>) -> u64 {
        let u = map.len();
        if u == p.num_vertices() {
            return 1;
        }
        let mut total = 0;
        for &v in s {
            if map.contains(&v) {
                continue;
            }
            if (0..u).all(|w| !p.has_edge(w, u) || contains(g.neighbors(map[w]), v)) {
                map.push(v);
                total += go(g, p, s, map);
                map.pop();
            }
        }
        total
    }
    go(g, p, s, &mut Vec::with_capacity(s.len()))
}
