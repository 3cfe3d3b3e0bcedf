//! Per-graph statistics behind the structure-informed weights: average
//! neighbor degree, clamped clustering coefficients and binomials, plus the
//! sidecar file that persists them.

use std::io::{Read, Write};
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{contains, Adjacency, Graph, OrientedGraph, VertexId};
use crate::par;

pub const SIDECAR_MAGIC: &[u8; 8] = b"AGISPP01";

/// Lower clamp for clustering coefficients; keeps every weight positive
/// unless the binomial term already rules the vertex out.
pub const DEFAULT_C_MIN: f64 = 1e-4;

/// Vertices handled by one RNG stream in sampled mode.
const CLUSTERING_CHUNK: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClusteringMode {
    Exact,
    Sampled,
}

impl ClusteringMode {
    fn tag(self) -> u8 {
        match self {
            ClusteringMode::Exact => 0,
            ClusteringMode::Sampled => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PreprocessedStats {
    pub avg_nbr_degree: Vec<f64>,
    pub clustering: Vec<f64>,
    pub c_min: f64,
    pub mode: ClusteringMode,
}

impl PreprocessedStats {
    /// Computes both per-vertex arrays with the default clamp.
    pub fn compute(g: &Graph, mode: ClusteringMode, seed: u64) -> PreprocessedStats {
        PreprocessedStats::compute_with(g, mode, seed, DEFAULT_C_MIN, true)
    }

    pub fn compute_with(g: &Graph, mode: ClusteringMode, seed: u64, c_min: f64, parallel: bool) -> PreprocessedStats {
        PreprocessedStats {
            avg_nbr_degree: compute_avg_neighbor_degree(g, parallel),
            clustering: estimate_clustering(g, mode, seed, c_min, parallel),
            c_min,
            mode,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.avg_nbr_degree.len()
    }

    pub fn check_matches(&self, g: &Graph) -> Result<()> {
        if self.num_vertices() != g.num_vertices() {
            return Err(Error::VertexCountMismatch {
                expected: g.num_vertices(),
                found: self.num_vertices(),
            });
        }
        Ok(())
    }

    /// Layout: magic, u64 `n`, mode byte, f64 `c_min`, then `avg_nbr_degree[n]`
    /// and `clustering[n]` as f64; all little-endian.
    pub fn write_sidecar<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(SIDECAR_MAGIC)?;
        w.write_all(&(self.num_vertices() as u64).to_le_bytes())?;
        w.write_all(&[self.mode.tag()])?;
        w.write_all(&self.c_min.to_le_bytes())?;
        for &x in self.avg_nbr_degree.iter().chain(&self.clustering) {
            w.write_all(&x.to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads a sidecar; `expected_vertices` rejects files built for another graph.
    pub fn read_sidecar<R: Read>(mut r: R, expected_vertices: Option<usize>) -> Result<PreprocessedStats> {
        let mut magic = [0u8; 8];
        read_exact(&mut r, &mut magic, "magic")?;
        if &magic != SIDECAR_MAGIC {
            return Err(format_error("bad magic or unsupported version".into()));
        }
        let mut word = [0u8; 8];
        read_exact(&mut r, &mut word, "vertex count")?;
        let n = u64::from_le_bytes(word) as usize;
        if let Some(expected) = expected_vertices {
            if expected != n {
                return Err(Error::VertexCountMismatch { expected, found: n });
            }
        }
        let mut tag = [0u8; 1];
        read_exact(&mut r, &mut tag, "mode")?;
        let mode = match tag[0] {
            0 => ClusteringMode::Exact,
            1 => ClusteringMode::Sampled,
            t => return Err(format_error(format!("unknown clustering mode {t}"))),
        };
        read_exact(&mut r, &mut word, "c_min")?;
        let c_min = f64::from_le_bytes(word);
        let mut read_array = |what: &str| -> Result<Vec<f64>> {
            let mut out = Vec::with_capacity(n);
            for _ in 0..n {
                read_exact(&mut r, &mut word, what)?;
                out.push(f64::from_le_bytes(word));
            }
            Ok(out)
        };
        let avg_nbr_degree = read_array("average neighbor degrees")?;
        let clustering = read_array("clustering coefficients")?;
        Ok(PreprocessedStats {
            avg_nbr_degree,
            clustering,
            c_min,
            mode,
        })
    }
}

fn format_error(message: String) -> Error {
    Error::Format {
        kind: "sidecar",
        message,
    }
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8], what: &str) -> Result<()> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => format_error(format!("truncated while reading {what}")),
        _ => Error::Io(e),
    })
}

/// `Σ_{x ∈ N(v)} d(x) / d(v)`, or 0 for isolated vertices.
pub fn compute_avg_neighbor_degree(g: &Graph, parallel: bool) -> Vec<f64> {
    par::map_range(g.num_vertices(), parallel, |v| {
        let nbrs = g.neighbors(v as VertexId);
        if nbrs.is_empty() {
            0.0
        } else {
            let total: usize = nbrs.iter().map(|&x| g.degree(x)).sum();
            total as f64 / nbrs.len() as f64
        }
    })
}

/// Clustering coefficients clamped to `[c_min, 1]`.
///
/// Sampled mode draws `d(v)` unordered pairs of distinct neighbors (with
/// replacement across draws) and reports the fraction that are adjacent.
/// Vertices with fewer than two neighbors get `c_min`.
pub fn estimate_clustering(g: &Graph, mode: ClusteringMode, seed: u64, c_min: f64, parallel: bool) -> Vec<f64> {
    let n = g.num_vertices();
    let clamp = |c: f64| c.clamp(c_min, 1.0);
    match mode {
        ClusteringMode::Exact => par::map_range(n, parallel, |v| clamp(exact_local_clustering(g, v as VertexId))),
        ClusteringMode::Sampled => {
            let chunks = n.div_ceil(CLUSTERING_CHUNK);
            par::map_range(chunks, parallel, |chunk| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(chunk as u64);
                let start = chunk * CLUSTERING_CHUNK;
                let end = (start + CLUSTERING_CHUNK).min(n);
                (start..end)
                    .map(|v| clamp(sampled_local_clustering(g, v as VertexId, &mut rng)))
                    .collect::<Vec<_>>()
            })
            .into_iter()
            .flatten()
            .collect()
        }
    }
}

/// Out-degrees up to this are counted exactly even in sampled mode; a
/// handful of sampled pairs would too often see no edge at all.
const ORIENTED_EXACT_DEGREE: usize = 64;

/// Clustering coefficients of out-neighborhoods in a degree orientation:
/// the fraction of out-neighbor pairs of `v` joined by an edge, clamped to
/// `[c_min, 1]`. Hubs keep few out-neighbors, and those are mostly other
/// hubs, so this tracks clique extensions far better than the undirected
/// coefficient does.
pub fn oriented_clustering(
    dag: &OrientedGraph,
    mode: ClusteringMode,
    seed: u64,
    c_min: f64,
    parallel: bool,
) -> Vec<f64> {
    let n = dag.num_vertices();
    let clamp = |c: f64| c.clamp(c_min, 1.0);
    match mode {
        ClusteringMode::Exact => par::map_range(n, parallel, |v| clamp(exact_out(dag, v as VertexId))),
        ClusteringMode::Sampled => {
            let chunks = n.div_ceil(CLUSTERING_CHUNK);
            par::map_range(chunks, parallel, |chunk| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(chunk as u64);
                let start = chunk * CLUSTERING_CHUNK;
                let end = (start + CLUSTERING_CHUNK).min(n);
                (start..end)
                    .map(|v| {
                        let out = dag.neighbors(v as VertexId);
                        let d = out.len();
                        if d <= ORIENTED_EXACT_DEGREE {
                            return clamp(exact_out(dag, v as VertexId));
                        }
                        let mut hits = 0usize;
                        for _ in 0..d {
                            let (a, b) = distinct_pair(d, &mut rng);
                            let (x, y) = (out[a], out[b]);
                            if contains(dag.neighbors(x), y) || contains(dag.neighbors(y), x) {
                                hits += 1;
                            }
                        }
                        clamp(hits as f64 / d as f64)
                    })
                    .collect::<Vec<_>>()
            })
            .into_iter()
            .flatten()
            .collect()
        }
    }
}

fn exact_out(dag: &OrientedGraph, v: VertexId) -> f64 {
    let out = dag.neighbors(v);
    let d = out.len();
    if d < 2 {
        return 0.0;
    }
    // an edge between two out-neighbors leaves the lower-ranked one
    let closed: usize = out.iter().map(|&x| count_common(out, dag.neighbors(x))).sum();
    2.0 * closed as f64 / (d * (d - 1)) as f64
}

fn distinct_pair<R: Rng>(d: usize, rng: &mut R) -> (usize, usize) {
    let a = rng.random_range(0..d);
    let mut b = rng.random_range(0..d - 1);
    if b >= a {
        b += 1;
    }
    (a, b)
}

fn exact_local_clustering(g: &Graph, v: VertexId) -> f64 {
    let nbrs = g.neighbors(v);
    let d = nbrs.len();
    if d < 2 {
        return 0.0;
    }
    // each closed wedge at v is found from both of its endpoints
    let mut closed = 0usize;
    for &x in nbrs {
        closed += count_common(nbrs, g.neighbors(x));
    }
    closed as f64 / (d * (d - 1)) as f64
}

fn count_common(a: &[VertexId], b: &[VertexId]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

fn sampled_local_clustering<R: Rng>(g: &Graph, v: VertexId, rng: &mut R) -> f64 {
    let nbrs = g.neighbors(v);
    let d = nbrs.len();
    if d < 2 {
        return 0.0;
    }
    let mut hits = 0usize;
    for _ in 0..d {
        let (a, b) = distinct_pair(d, rng);
        if contains(g.neighbors(nbrs[a]), nbrs[b]) {
            hits += 1;
        }
    }
    hits as f64 / d as f64
}

const CHOOSE_TABLE_N: usize = 1024;
const CHOOSE_TABLE_K: usize = 10;

fn choose_table() -> &'static [[f64; CHOOSE_TABLE_K + 1]] {
    static TABLE: OnceLock<Vec<[f64; CHOOSE_TABLE_K + 1]>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (0..=CHOOSE_TABLE_N)
            .map(|n| {
                let mut row = [0.0; CHOOSE_TABLE_K + 1];
                for (k, slot) in row.iter_mut().enumerate() {
                    *slot = choose_direct(n as i64, k);
                }
                row
            })
            .collect()
    })
}

#[inline]
fn choose_direct(n: i64, k: usize) -> f64 {
    if n < k as i64 {
        return 0.0;
    }
    // r holds C(n, j + 1) after step j, so every division is exact while
    // the values fit in the mantissa
    let mut r = 1.0f64;
    for j in 0..k {
        r = r * (n - j as i64) as f64 / (j + 1) as f64;
    }
    r
}

/// Binomial coefficient `C(n, k)` as a float; 0 when `n < k` (including
/// negative `n`).
#[inline]
pub fn choose(n: i64, k: usize) -> f64 {
    if n >= 0 && (n as usize) <= CHOOSE_TABLE_N && k <= CHOOSE_TABLE_K {
        choose_table()[n as usize][k]
    } else {
        choose_direct(n, k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;

    fn k3() -> Graph {
        Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)])
    }

    fn star3() -> Graph {
        Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)])
    }

    #[test]
    fn avg_neighbor_degree_small_graphs() {
        assert_eq!(compute_avg_neighbor_degree(&k3(), false), vec![2.0; 3]);
        assert_eq!(compute_avg_neighbor_degree(&star3(), false), vec![1.0, 3.0, 3.0, 3.0]);
        let ring = generate::cycle(9);
        assert!(compute_avg_neighbor_degree(&ring, true).iter().all(|&x| x == 2.0));
    }

    #[test]
    fn worked_example_vertex() {
        let (g, a) = generate::worked_example_graph();
        assert_eq!(compute_avg_neighbor_degree(&g, false)[a as usize], 20.0 / 6.0);
        let c = estimate_clustering(&g, ClusteringMode::Exact, 0, DEFAULT_C_MIN, false);
        assert!((c[a as usize] - 5.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn exact_clustering_clamps() {
        assert_eq!(
            estimate_clustering(&k3(), ClusteringMode::Exact, 0, DEFAULT_C_MIN, false),
            vec![1.0; 3]
        );
        let star = estimate_clustering(&star3(), ClusteringMode::Exact, 0, DEFAULT_C_MIN, false);
        assert_eq!(star, vec![DEFAULT_C_MIN; 4]);
    }

    #[test]
    fn sampled_clustering_is_deterministic_and_bounded() {
        let g = generate::erdos_renyi(300, 0.05, 3);
        let a = estimate_clustering(&g, ClusteringMode::Sampled, 11, DEFAULT_C_MIN, true);
        let b = estimate_clustering(&g, ClusteringMode::Sampled, 11, DEFAULT_C_MIN, false);
        assert_eq!(a, b);
        assert!(a.iter().all(|&c| (DEFAULT_C_MIN..=1.0).contains(&c)));
    }

    #[test]
    fn oriented_clustering_counts_each_triangle_once() {
        let g = generate::power_law(400, 4, 2.5, 0.6, 9);
        let dag = g.orient();
        let c = oriented_clustering(&dag, ClusteringMode::Exact, 0, 0.0, false);
        let mut from_sources = 0.0;
        for v in 0..g.num_vertices() as VertexId {
            let d = dag.degree(v) as f64;
            from_sources += c[v as usize] * d * (d - 1.0) / 2.0;
        }
        let mut triangles = 0u64;
        for (a, b) in g.edges() {
            triangles += count_common(g.neighbors(a), g.neighbors(b)) as u64;
        }
        assert!(triangles > 0);
        assert!((from_sources - (triangles / 3) as f64).abs() < 1e-6);

        let k5 = generate::complete(5).orient();
        let c = oriented_clustering(&k5, ClusteringMode::Exact, 0, DEFAULT_C_MIN, false);
        assert_eq!(c, vec![1.0, 1.0, 1.0, DEFAULT_C_MIN, DEFAULT_C_MIN]);
    }

    #[test]
    fn oriented_sampled_mode_is_exact_for_small_out_degree() {
        let g = generate::erdos_renyi(200, 0.08, 4);
        let dag = g.orient();
        let exact = oriented_clustering(&dag, ClusteringMode::Exact, 0, DEFAULT_C_MIN, false);
        let sampled = oriented_clustering(&dag, ClusteringMode::Sampled, 3, DEFAULT_C_MIN, true);
        assert!((0..200).all(|v| dag.degree(v) <= ORIENTED_EXACT_DEGREE));
        assert_eq!(exact, sampled);
    }

    #[test]
    fn sampled_clustering_is_unbiased_before_clamping() {
        // many seeds on one graph; mean within 3 standard errors of the truth
        let g = generate::power_law(60, 3, 2.5, 0.6, 5);
        let exact = estimate_clustering(&g, ClusteringMode::Exact, 0, 0.0, false);
        let seeds = 400;
        let runs: Vec<Vec<f64>> = (0..seeds)
            .map(|s| estimate_clustering(&g, ClusteringMode::Sampled, s, 0.0, false))
            .collect();
        for v in 0..g.num_vertices() {
            if g.degree(v as VertexId) < 2 {
                continue;
            }
            let xs: Vec<f64> = runs.iter().map(|r| r[v]).collect();
            let mean = xs.iter().sum::<f64>() / seeds as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (seeds - 1) as f64;
            let se = (var / seeds as f64).sqrt();
            if se == 0.0 {
                assert_eq!(mean, exact[v]);
            } else {
                assert!((mean - exact[v]).abs() <= 3.0 * se + 1e-12, "vertex {v}");
            }
        }
    }

    #[test]
    fn choose_values() {
        assert_eq!(choose(6 - 2, 3), 4.0);
        assert_eq!(choose(0, 0), 1.0);
        assert_eq!(choose(17, 0), 1.0);
        assert_eq!(choose(3, 5), 0.0);
        assert_eq!(choose(-2, 1), 0.0);
        assert_eq!(choose(5000, 2), 12_497_500.0);
    }

    #[test]
    fn choose_matches_integer_binomials() {
        for n in 0..=60u128 {
            for k in 0..=10u128 {
                // multiplicative formula in exact integers
                let mut r: u128 = if n >= k { 1 } else { 0 };
                for j in 0..k.min(n + 1) {
                    r = r * (n - j) / (j + 1);
                }
                assert_eq!(choose(n as i64, k as usize), r as f64, "C({n},{k})");
            }
        }
    }

    #[test]
    fn sidecar_round_trip_and_errors() {
        let g = generate::erdos_renyi(50, 0.2, 1);
        let stats = PreprocessedStats::compute(&g, ClusteringMode::Sampled, 9);
        let mut buf = Vec::new();
        stats.write_sidecar(&mut buf).unwrap();
        assert_eq!(buf.len(), 8 + 8 + 1 + 8 + 16 * 50);
        let back = PreprocessedStats::read_sidecar(buf.as_slice(), Some(50)).unwrap();
        assert_eq!(back, stats);
        assert!(matches!(
            PreprocessedStats::read_sidecar(&buf[..buf.len() - 1], None),
            Err(Error::Format { .. })
        ));
        let small = PreprocessedStats::compute(&k3(), ClusteringMode::Exact, 0);
        let mut buf3 = Vec::new();
        small.write_sidecar(&mut buf3).unwrap();
        assert!(matches!(
            PreprocessedStats::read_sidecar(buf3.as_slice(), Some(4)),
            Err(Error::VertexCountMismatch { expected: 4, found: 3 })
        ));
        buf3[7] = b'9';
        assert!(PreprocessedStats::read_sidecar(buf3.as_slice(), None).is_err());
    }
}
