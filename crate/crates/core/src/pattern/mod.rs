//! Pattern graphs and the per-pattern sampling plan.

mod builtin;
mod plan;

use std::fmt;

pub use builtin::BUILTIN_NAMES;
pub use plan::{AuxiliaryArrays, DecisionVector, MatchingOrder, Plan, StepSets, DEFAULT_BETA};

use crate::error::{Error, Result};

pub const MAX_PATTERN_VERTICES: usize = 10;

/// Small connected simple pattern graph, stored as adjacency bitmasks.
#[derive(Clone, PartialEq, Eq)]
pub struct Pattern {
    adj: Vec<u16>,
    edges: Vec<(usize, usize)>,
    name: Option<String>,
}

impl Pattern {
    /// Validates and builds a pattern over vertices `0..num_vertices`.
    pub fn new(num_vertices: usize, edges: &[(usize, usize)]) -> Result<Pattern> {
        if num_vertices < 2 {
            return Err(Error::InvalidPattern("needs at least two vertices".into()));
        }
        if num_vertices > MAX_PATTERN_VERTICES {
            return Err(Error::InvalidPattern(format!(
                "{num_vertices} vertices exceed the limit of {MAX_PATTERN_VERTICES}"
            )));
        }
        let mut adj = vec![0u16; num_vertices];
        let mut list = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a >= num_vertices || b >= num_vertices {
                return Err(Error::InvalidPattern(format!(
                    "edge ({a}, {b}) references a vertex outside 0..{num_vertices}"
                )));
            }
            if a == b {
                return Err(Error::InvalidPattern(format!("self-loop on {a}")));
            }
            if adj[a] & (1 << b) != 0 {
                return Err(Error::InvalidPattern(format!("duplicate edge ({a}, {b})")));
            }
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        let p = Pattern {
            adj,
            edges: list,
            name: None,
        };
        if !p.is_connected() {
            return Err(Error::InvalidPattern("pattern is disconnected".into()));
        }
        Ok(p)
    }

    /// Parses a builtin name (`triangle`, `4-clique`, `5-house`, …) or an
    /// inline edge list such as `0-1,1-2,2-0`.
    pub fn parse(spec: &str) -> Result<Pattern> {
        let spec = spec.trim();
        if let Some(p) = builtin::lookup(spec)? {
            return Ok(p);
        }
        if spec.contains('-') && spec.chars().all(|c| c.is_ascii_digit() || ",- ".contains(c)) {
            let mut text = String::new();
            for pair in spec.split(',').filter(|s| !s.trim().is_empty()) {
                text.push_str(&pair.replace('-', " "));
                text.push('\n');
            }
            return Pattern::from_edge_list(&text);
        }
        Err(Error::InvalidPattern(format!(
            "unknown pattern {spec:?}; builtins: {}",
            BUILTIN_NAMES.join(", ")
        )))
    }

    /// Parses the same whitespace edge-list format used for data graphs.
    /// Ids are remapped densely in first-seen order when they are not `0..n`.
    pub fn from_edge_list(text: &str) -> Result<Pattern> {
        let mut raw = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') || t.starts_with('%') {
                continue;
            }
            let mut it = t.split_whitespace();
            let mut next = || -> Result<usize> {
                let tok = it.next().ok_or_else(|| Error::Parse {
                    line: idx + 1,
                    message: "expected two vertex ids".into(),
                })?;
                tok.parse().map_err(|_| Error::Parse {
                    line: idx + 1,
                    message: format!("malformed vertex id {tok:?}"),
                })
            };
            let a = next()?;
            let b = next()?;
            raw.push((a, b));
        }
        let mut ids: Vec<usize> = Vec::new();
        for &(a, b) in &raw {
            for v in [a, b] {
                if !ids.contains(&v) {
                    ids.push(v);
                    if ids.len() > MAX_PATTERN_VERTICES {
                        return Err(Error::InvalidPattern(format!(
                            "more than {MAX_PATTERN_VERTICES} vertices"
                        )));
                    }
                }
            }
        }
        let max = ids.iter().copied().max().unwrap_or(0);
        let dense = max + 1 == ids.len();
        let edges: Vec<(usize, usize)> = raw
            .iter()
            .map(|&(a, b)| {
                if dense {
                    (a, b)
                } else {
                    let pos = |x| ids.iter().position(|&y| y == x).unwrap();
                    (pos(a), pos(b))
                }
            })
            .collect();
        Pattern::new(ids.len(), &edges)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Pattern {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    #[inline]
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a] & (1 << b) != 0
    }

    /// Neighbor bitmask of `u`.
    #[inline]
    pub fn neighbor_mask(&self, u: usize) -> u16 {
        self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].count_ones() as usize
    }

    pub fn is_clique(&self) -> bool {
        let n = self.num_vertices();
        self.num_edges() == n * (n - 1) / 2
    }

    fn is_connected(&self) -> bool {
        let full: u16 = ((1u32 << self.num_vertices()) - 1) as u16;
        let mut seen: u16 = 1;
        let mut frontier: u16 = 1;
        while frontier != 0 {
            let mut next = 0;
            for u in bits(frontier) {
                next |= self.adj[u];
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen == full
    }

    /// Number of adjacency-preserving vertex permutations, `|Aut(P)|`.
    pub fn count_automorphisms(&self) -> u64 {
        let n = self.num_vertices();
        let mut image = vec![usize::MAX; n];
        let mut used = 0u16;
        self.extend_automorphism(0, &mut image, &mut used)
    }

    fn extend_automorphism(&self, u: usize, image: &mut [usize], used: &mut u16) -> u64 {
        let n = self.num_vertices();
        if u == n {
            return 1;
        }
        let mut total = 0;
        for cand in 0..n {
            if *used & (1 << cand) != 0 || self.degree(cand) != self.degree(u) {
                continue;
            }
            // edges and non-edges to already mapped vertices must be preserved
            let consistent = (0..u).all(|w| self.has_edge(u, w) == self.has_edge(cand, image[w]));
            if consistent {
                image[u] = cand;
                *used |= 1 << cand;
                total += self.extend_automorphism(u + 1, image, used);
                *used &= !(1 << cand);
            }
        }
        total
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Pattern")
            .field("name", &self.name)
            .field("vertices", &self.num_vertices())
            .field("edges", &self.edges)
            .finish()
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.name {
            Some(name) => f.write_str(name),
            None => {
                let parts: Vec<String> = self.edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

/// Iterates the set bit positions of a mask, ascending.
#[inline]
pub(crate) fn bits(mut mask: u16) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let b = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(b)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_patterns() {
        assert!(Pattern::new(1, &[]).is_err());
        assert!(Pattern::new(4, &[(0, 1), (2, 3)]).is_err());
        assert!(Pattern::new(3, &[(0, 1), (1, 1)]).is_err());
        assert!(Pattern::new(3, &[(0, 1), (1, 0), (1, 2)]).is_err());
        let star11: Vec<(usize, usize)> = (1..11).map(|i| (0, i)).collect();
        assert!(Pattern::new(11, &star11).is_err());
        assert!(Pattern::parse("no-such-thing").is_err());
        assert!(Pattern::parse("11-star").is_err());
    }

    #[test]
    fn parses_inline_edges_and_files() {
        let p = Pattern::parse("0-1,1-2,2-0").unwrap();
        assert_eq!(p.num_vertices(), 3);
        assert!(p.is_clique());
        let q = Pattern::from_edge_list("# path\n7 9\n9 4\n").unwrap();
        assert_eq!(q.num_vertices(), 3);
        assert_eq!(q.edges(), &[(0, 1), (1, 2)]);
        assert!(Pattern::from_edge_list("0 x\n").is_err());
    }

    #[test]
    fn automorphism_counts() {
        let count = |s: &str| Pattern::parse(s).unwrap().count_automorphisms();
        assert_eq!(count("triangle"), 6);
        assert_eq!(count("3-star"), 6);
        assert_eq!(count("4-chain"), 2);
        assert_eq!(count("5-cycle"), 10);
        for k in 2..=7 {
            assert_eq!(count(&format!("{k}-clique")), (1..=k as u64).product::<u64>());
        }
    }

    #[test]
    fn automorphisms_match_permutation_brute_force() {
        // independent check: test every permutation of the vertex set
        fn brute(p: &Pattern) -> u64 {
            fn rec(p: &Pattern, perm: &mut Vec<usize>, used: &mut Vec<bool>) -> u64 {
                let n = p.num_vertices();
                if perm.len() == n {
                    let ok = p.edges().iter().all(|&(a, b)| p.has_edge(perm[a], perm[b]));
                    return ok as u64;
                }
                let mut t = 0;
                for c in 0..n {
                    if !used[c] {
                        used[c] = true;
                        perm.push(c);
                        t += rec(p, perm, used);
                        perm.pop();
                        used[c] = false;
                    }
                }
                t
            }
            rec(p, &mut Vec::new(), &mut vec![false; p.num_vertices()])
        }
        for name in [
            "5-house",
            "triangle-2-star",
            "4-clique-2-dot",
            "6-cycle-diagonals",
            "4-chain",
        ] {
            let p = Pattern::parse(name).unwrap();
            assert_eq!(p.count_automorphisms(), brute(&p), "{name}");
        }
        assert_eq!(Pattern::parse("5-house").unwrap().count_automorphisms(), 2);
    }
}
