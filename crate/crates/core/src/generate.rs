//! Synthetic graphs for tests, benchmarks and the `bench` suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, VertexId};

/// `G(n, p)`.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for a in 0..n as VertexId {
        for b in a + 1..n as VertexId {
            if rng.random::<f64>() < p {
                edges.push((a, b));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

/// Preferential attachment with an additive shift and optional triad closure.
///
/// Each new vertex attaches `m` edges. A target is chosen with probability
/// proportional to `d(v) + m(γ − 3)`, which yields a degree tail with
/// exponent close to `gamma` (valid for `gamma > 2`). After the first target,
/// each further edge closes a triangle with probability `triad_prob` by
/// linking to a random neighbor of the previous target (Holme–Kim), which
/// raises clustering without changing the attachment kernel much.
pub fn power_law(n: usize, m: usize, gamma: f64, triad_prob: f64, seed: u64) -> Graph {
    assert!(m >= 1 && n > m + 1, "need n > m + 1 and m >= 1");
    assert!(gamma > 2.0, "attachment exponent must exceed 2");
    let shift = m as f64 * (gamma - 3.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adj: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    let mut endpoints: Vec<VertexId> = Vec::with_capacity(2 * n * m);
    let mut edges = Vec::with_capacity(n * m);
    let mut link = |a: usize, b: usize, adj: &mut Vec<Vec<VertexId>>, endpoints: &mut Vec<VertexId>| {
        adj[a].push(b as VertexId);
        adj[b].push(a as VertexId);
        endpoints.push(a as VertexId);
        endpoints.push(b as VertexId);
        edges.push((a as VertexId, b as VertexId));
    };
    for a in 0..=m {
        for b in a + 1..=m {
            link(a, b, &mut adj, &mut endpoints);
        }
    }
    let mut targets: Vec<usize> = Vec::with_capacity(m);
    for t in m + 1..n {
        targets.clear();
        while targets.len() < m {
            if let Some(&last) = targets.last() {
                if rng.random::<f64>() < triad_prob {
                    let nb = &adj[last];
                    let w = nb[rng.random_range(0..nb.len())] as usize;
                    if !targets.contains(&w) {
                        targets.push(w);
                    }
                    continue;
                }
            }
            let v = if shift >= 0.0 {
                let weight_total = endpoints.len() as f64 + shift * t as f64;
                if rng.random::<f64>() * weight_total < endpoints.len() as f64 {
                    endpoints[rng.random_range(0..endpoints.len())] as usize
                } else {
                    rng.random_range(0..t)
                }
            } else {
                // degree-proportional proposal, thinned to d + shift
                loop {
                    let v = endpoints[rng.random_range(0..endpoints.len())] as usize;
                    let d = adj[v].len() as f64;
                    if rng.random::<f64>() * d < d + shift {
                        break v;
                    }
                }
            };
            if !targets.contains(&v) {
                targets.push(v);
            }
        }
        for &v in &targets {
            link(t, v, &mut adj, &mut endpoints);
        }
    }
    Graph::from_edges(n, &edges)
}

pub fn complete(n: usize) -> Graph {
    let mut edges = Vec::new();
    for a in 0..n as VertexId {
        for b in a + 1..n as VertexId {
            edges.push((a, b));
        }
    }
    Graph::from_edges(n, &edges)
}

/// Center 0 with leaves `1..=leaves`.
pub fn star(leaves: usize) -> Graph {
    let edges: Vec<_> = (1..=leaves as VertexId).map(|l| (0, l)).collect();
    Graph::from_edges(leaves + 1, &edges)
}

pub fn cycle(n: usize) -> Graph {
    let edges: Vec<_> = (0..n as VertexId).map(|i| (i, (i + 1) % n as VertexId)).collect();
    Graph::from_edges(n, &edges)
}

/// Complete bipartite graph; triangle-free.
pub fn complete_bipartite(left: usize, right: usize) -> Graph {
    let mut edges = Vec::new();
    for a in 0..left as VertexId {
        for b in 0..right as VertexId {
            edges.push((a, left as VertexId + b));
        }
    }
    Graph::from_edges(left + right, &edges)
}

/// Named vertices of [`worked_example_graph`].
pub mod worked {
    use crate::graph::VertexId;
    pub const V1: VertexId = 0;
    pub const V2: VertexId = 1;
    pub const A: VertexId = 2;
    pub const B: VertexId = 3;
}

/// Fixture where `v1` and `v2` are adjacent, their only other common
/// neighbors are `a` and `b`, and `a` has six neighbors with degrees
/// `4, 4, 3, 3, 3, 3` and five edges among them (clustering `5/15`).
/// Returns the graph and `a`.
pub fn worked_example_graph() -> (Graph, VertexId) {
    use worked::*;
    // x1..x4 = 4..=7, y1 y2 = 8, 9 pad x2 and x4 to degree 3, z = 10 pads b
    let edges = [
        (V1, V2),
        (A, V1),
        (A, V2),
        (A, 4),
        (A, 5),
        (A, 6),
        (A, 7),
        (B, V1),
        (B, V2),
        (V1, 4),
        (V2, 6),
        (4, 5),
        (6, 7),
        (5, 8),
        (7, 9),
        (B, 10),
    ];
    (Graph::from_edges(11, &edges), A)
}
