//! Immutable CSR graphs.
//!
//! [`Graph`] stores a simple undirected graph with every edge present in both
//! endpoint slices. [`OrientedGraph`] keeps each edge once, pointing from the
//! lower-ranked endpoint to the higher-ranked one, which turns the graph into
//! a DAG suitable for counting cliques once per vertex set.

mod intersect;
mod io;

pub use intersect::{contains, intersect_into, intersect_sorted, GALLOP_RATIO};
pub use io::{load_edge_list, read_csr_cache, write_csr_cache, write_edge_list, CSR_MAGIC};

/// Dense vertex id.
pub type VertexId = u32;

/// Read access shared by the undirected and oriented layouts.
pub trait Adjacency: Sync {
    fn num_vertices(&self) -> usize;

    /// Neighbors of `v` (out-neighbors for an oriented graph), ascending.
    fn neighbors(&self, v: VertexId) -> &[VertexId];

    #[inline]
    fn degree(&self, v: VertexId) -> usize {
        self.neighbors(v).len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Csr {
    pub(crate) offsets: Vec<usize>,
    pub(crate) targets: Vec<VertexId>,
}

impl Csr {
    #[inline]
    fn slice(&self, v: VertexId) -> &[VertexId] {
        let v = v as usize;
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    fn num_vertices(&self) -> usize {
        self.offsets.len() - 1
    }
}

/// Simple undirected graph in CSR form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    csr: Csr,
    num_edges: u64,
    /// `id_map[dense] = original`, present when the input ids were remapped.
    id_map: Option<Vec<u64>>,
}

impl Graph {
    /// Builds a graph from undirected edges over dense ids `0..num_vertices`.
    /// Self-loops and duplicates are dropped.
    pub fn from_edges(num_vertices: usize, edges: &[(VertexId, VertexId)]) -> Graph {
        let mut degree = vec![0usize; num_vertices];
        for &(a, b) in edges {
            if a != b {
                degree[a as usize] += 1;
                degree[b as usize] += 1;
            }
        }
        let mut offsets = Vec::with_capacity(num_vertices + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets.clone();
        let mut targets = vec![0 as VertexId; *offsets.last().unwrap()];
        for &(a, b) in edges {
            if a != b {
                targets[cursor[a as usize]] = b;
                cursor[a as usize] += 1;
                targets[cursor[b as usize]] = a;
                cursor[b as usize] += 1;
            }
        }
        // sort + dedup each slice, then compact
        let mut compact = Vec::with_capacity(targets.len());
        let mut new_offsets = Vec::with_capacity(num_vertices + 1);
        new_offsets.push(0);
        for v in 0..num_vertices {
            let slice = &mut targets[offsets[v]..offsets[v + 1]];
            slice.sort_unstable();
            let mut last = None;
            for &t in slice.iter() {
                if last != Some(t) {
                    compact.push(t);
                    last = Some(t);
                }
            }
            new_offsets.push(compact.len());
        }
        compact.shrink_to_fit();
        let num_edges = (compact.len() / 2) as u64;
        Graph {
            csr: Csr {
                offsets: new_offsets,
                targets: compact,
            },
            num_edges,
            id_map: None,
        }
    }

    pub(crate) fn from_csr(csr: Csr, id_map: Option<Vec<u64>>) -> Graph {
        let num_edges = (csr.targets.len() / 2) as u64;
        Graph { csr, num_edges, id_map }
    }

    pub(crate) fn csr(&self) -> &Csr {
        &self.csr
    }

    pub fn num_vertices(&self) -> usize {
        self.csr.num_vertices()
    }

    /// Number of undirected edges, `|E_G|`.
    pub fn num_edges(&self) -> u64 {
        self.num_edges
    }

    pub fn degrees(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.csr.offsets.windows(2).map(|w| w[1] - w[0])
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().max().unwrap_or(0)
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        let (short, other) = if self.degree(a) <= self.degree(b) {
            (a, b)
        } else {
            (b, a)
        };
        contains(self.neighbors(short), other)
    }

    /// Original id of a dense vertex.
    pub fn original_id(&self, v: VertexId) -> u64 {
        match &self.id_map {
            Some(map) => map[v as usize],
            None => v as u64,
        }
    }

    pub fn id_map(&self) -> Option<&[u64]> {
        self.id_map.as_deref()
    }

    /// Each undirected edge once, as `(a, b)` with `a < b`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        (0..self.num_vertices() as VertexId).flat_map(move |a| {
            self.neighbors(a)
                .iter()
                .copied()
                .filter(move |&b| a < b)
                .map(move |b| (a, b))
        })
    }

    /// Converts to a DAG by keeping `u → v` iff `(d(u), u) < (d(v), v)`.
    pub fn orient(&self) -> OrientedGraph {
        let n = self.num_vertices();
        let rank = |v: VertexId| (self.degree(v), v);
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::with_capacity(self.num_edges as usize);
        offsets.push(0);
        for v in 0..n as VertexId {
            let rv = rank(v);
            targets.extend(self.neighbors(v).iter().copied().filter(|&w| rv < rank(w)));
            offsets.push(targets.len());
        }
        OrientedGraph {
            csr: Csr { offsets, targets },
        }
    }
}

impl<T: Adjacency + ?Sized> Adjacency for &T {
    fn num_vertices(&self) -> usize {
        (**self).num_vertices()
    }

    #[inline]
    fn neighbors(&self, v: VertexId) -> &[VertexId] {
        (**self).neighbors(v)
    }
}

impl Adjacency for Graph {
    fn num_vertices(&self) -> usize {
        self.csr.num_vertices()
    }

    #[inline]
    fn neighbors(&self, v: VertexId) -> &[VertexId] {
        self.csr.slice(v)
    }
}

/// Degree-ordered DAG built by [`Graph::orient`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientedGraph {
    csr: Csr,
}

impl OrientedGraph {
    /// Number of directed edges; equals the source graph's `|E_G|`.
    pub fn num_edges(&self) -> u64 {
        self.csr.targets.len() as u64
    }
}

impl Adjacency for OrientedGraph {
    fn num_vertices(&self) -> usize {
        self.csr.num_vertices()
    }

    #[inline]
    fn neighbors(&self, v: VertexId) -> &[VertexId] {
        self.csr.slice(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)])
    }

    #[test]
    fn from_edges_dedups_and_drops_loops() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 0), (1, 1), (1, 2), (2, 0), (0, 1)]);
        assert_eq!(g.num_edges(), 3);
        assert_eq!(g.degrees().collect::<Vec<_>>(), vec![2, 2, 2]);
        assert_eq!(g.neighbors(1), &[0, 2]);
    }

    #[test]
    fn orient_triangle_breaks_ties_by_id() {
        let dag = triangle().orient();
        assert_eq!(dag.neighbors(0), &[1, 2]);
        assert_eq!(dag.neighbors(1), &[2]);
        assert!(dag.neighbors(2).is_empty());
        assert_eq!(dag.num_edges(), 3);
    }

    #[test]
    fn orient_star_points_leaves_at_center() {
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]);
        let dag = g.orient();
        assert!(dag.neighbors(0).is_empty());
        for leaf in 1..4 {
            assert_eq!(dag.neighbors(leaf), &[0]);
        }
    }

    #[test]
    fn has_edge_is_symmetric() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]);
        assert!(g.has_edge(0, 1) && g.has_edge(1, 0));
        assert!(!g.has_edge(0, 3));
    }
}
