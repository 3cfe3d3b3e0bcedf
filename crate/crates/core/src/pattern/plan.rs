//! Per-pattern sampling plan.
//!
//! Step indices are 0-based throughout: step `i` matches the pattern vertex
//! `order.vertex(i)` and is the `(i + 1)`-th vertex drawn by a sampler. The
//! residual pattern at step `i` is the subgraph induced by the vertices at
//! positions `i..` of the order, and hop distances are measured from the
//! current vertex inside that residual pattern.

use serde::Serialize;

use super::{bits, Pattern};
use crate::error::{Error, Result};

/// Default threshold on certainty above which the structure-informed
/// distribution is used.
pub const DEFAULT_BETA: f64 = 0.8;

/// A permutation of the pattern vertices whose every prefix is connected.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatchingOrder {
    order: Vec<usize>,
    #[serde(skip)]
    position: Vec<usize>,
}

impl MatchingOrder {
    /// Validates an explicit order.
    pub fn new(p: &Pattern, order: Vec<usize>) -> Result<MatchingOrder> {
        let n = p.num_vertices();
        let mut position = vec![usize::MAX; n];
        if order.len() != n {
            return Err(Error::InvalidPattern(format!(
                "matching order has {} entries for {n} vertices",
                order.len()
            )));
        }
        for (i, &u) in order.iter().enumerate() {
            if u >= n || position[u] != usize::MAX {
                return Err(Error::InvalidPattern(format!(
                    "matching order {order:?} is not a permutation"
                )));
            }
            position[u] = i;
        }
        let mut prefix = 0u16;
        for (i, &u) in order.iter().enumerate() {
            if i > 0 && p.neighbor_mask(u) & prefix == 0 {
                return Err(Error::InvalidPattern(format!(
                    "vertex {u} at position {i} is not adjacent to any earlier vertex"
                )));
            }
            prefix |= 1 << u;
        }
        Ok(MatchingOrder { order, position })
    }

    /// Greedy construction: starting from the whole vertex set, repeatedly
    /// append the frontier vertex with the largest
    /// `|F1| + |I1|` in the residual pattern it would start. Ties go to the
    /// lowest vertex id.
    pub fn greedy(p: &Pattern) -> MatchingOrder {
        let n = p.num_vertices();
        let all: u16 = ((1u32 << n) - 1) as u16;
        let mut chosen: u16 = 0;
        let mut order = Vec::with_capacity(n);
        for i in 0..n {
            let remaining = all & !chosen;
            let frontier = if i == 0 {
                all
            } else {
                let mut f = 0;
                for u in bits(chosen) {
                    f |= p.neighbor_mask(u);
                }
                f & remaining
            };
            let mut best: Option<(usize, usize)> = None;
            for u in bits(frontier) {
                let hop1 = p.neighbor_mask(u) & remaining & !(1 << u);
                let score = hop1.count_ones() as usize + edges_within(p, hop1);
                if best.is_none_or(|(_, s)| score > s) {
                    best = Some((u, score));
                }
            }
            let (u, _) = best.expect("connected pattern always has a frontier vertex");
            order.push(u);
            chosen |= 1 << u;
        }
        MatchingOrder::new(p, order).expect("greedy order is a valid connected order")
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Pattern vertex matched at step `i`.
    #[inline]
    pub fn vertex(&self, i: usize) -> usize {
        self.order[i]
    }

    /// Step at which pattern vertex `u` is matched.
    #[inline]
    pub fn position(&self, u: usize) -> usize {
        self.position[u]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.order
    }

    /// Bitmask of the pattern vertices matched at steps `i..`.
    pub fn residual_mask(&self, i: usize) -> u16 {
        self.order[i..].iter().fold(0, |m, &u| m | 1 << u)
    }
}

fn edges_within(p: &Pattern, mask: u16) -> usize {
    bits(mask)
        .map(|x| (p.neighbor_mask(x) & mask).count_ones() as usize)
        .sum::<usize>()
        / 2
}

/// BFS hop distance from `source` inside the subgraph induced by `mask`.
fn hops_within(p: &Pattern, mask: u16, source: usize) -> [Option<usize>; 16] {
    let mut dist = [None; 16];
    dist[source] = Some(0);
    let mut seen: u16 = 1 << source;
    let mut frontier: u16 = 1 << source;
    let mut d = 0;
    while frontier != 0 {
        d += 1;
        let mut next = 0;
        for u in bits(frontier) {
            next |= p.neighbor_mask(u) & mask;
        }
        next &= !seen;
        for u in bits(next) {
            dist[u] = Some(d);
        }
        seen |= next;
        frontier = next;
    }
    dist
}

/// Pattern-edge groups consumed by the weight formula at one step.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct StepSets {
    /// Edges from the current vertex to earlier-matched vertices.
    pub backward: Vec<(usize, usize)>,
    /// Steps at which the backward neighbors were matched, ascending.
    pub backward_steps: Vec<usize>,
    /// Residual edges from the current vertex to its hop-1 vertices.
    pub forward1: Vec<(usize, usize)>,
    /// Residual edges among hop-1 vertices.
    pub internal1: Vec<(usize, usize)>,
    /// Spanning forest of the subgraph formed by `internal1`.
    pub internal_effective: Vec<(usize, usize)>,
    /// Residual edges from hop-1 to hop-2 vertices.
    pub forward2: Vec<(usize, usize)>,
}

/// The auxiliary arrays: one [`StepSets`] per matching-order step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuxiliaryArrays {
    steps: Vec<StepSets>,
}

impl AuxiliaryArrays {
    pub fn build(p: &Pattern, order: &MatchingOrder) -> AuxiliaryArrays {
        let steps = (0..order.len()).map(|i| step_sets(p, order, i)).collect();
        AuxiliaryArrays { steps }
    }

    #[inline]
    pub fn step(&self, i: usize) -> &StepSets {
        &self.steps[i]
    }

    pub fn steps(&self) -> &[StepSets] {
        &self.steps
    }
}

fn step_sets(p: &Pattern, order: &MatchingOrder, i: usize) -> StepSets {
    let u = order.vertex(i);
    let residual = order.residual_mask(i);
    let dist = hops_within(p, residual, u);
    let edge = |a: usize, b: usize| (a.min(b), a.max(b));

    let mut backward_steps: Vec<usize> = bits(p.neighbor_mask(u) & !residual)
        .map(|w| order.position(w))
        .collect();
    backward_steps.sort_unstable();
    let backward = backward_steps.iter().map(|&j| edge(order.vertex(j), u)).collect();

    let mut forward1 = Vec::new();
    let mut internal1 = Vec::new();
    let mut forward2 = Vec::new();
    for &(a, b) in p.edges() {
        let (Some(da), Some(db)) = (dist[a], dist[b]) else {
            continue;
        };
        // both endpoints reachable implies both are residual
        match (da.min(db), da.max(db)) {
            (0, 1) => forward1.push((a, b)),
            (1, 1) => internal1.push((a, b)),
            (1, 2) => forward2.push((a, b)),
            _ => {}
        }
    }
    let internal_effective = spanning_forest(&internal1);
    StepSets {
        backward,
        backward_steps,
        forward1,
        internal1,
        internal_effective,
        forward2,
    }
}

/// BFS spanning forest; roots are the lowest unvisited ids, neighbors are
/// visited in ascending id order.
fn spanning_forest(edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut adj = [0u16; 16];
    let mut vertices = 0u16;
    for &(a, b) in edges {
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
        vertices |= (1 << a) | (1 << b);
    }
    let mut visited = 0u16;
    let mut forest = Vec::new();
    for root in bits(vertices) {
        if visited & (1 << root) != 0 {
            continue;
        }
        visited |= 1 << root;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for y in bits(adj[x] & !visited) {
                visited |= 1 << y;
                forest.push((x.min(y), x.max(y)));
                queue.push_back(y);
            }
        }
    }
    forest
}

/// Per-step choice between the structure-informed and the uniform
/// distribution.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecisionVector {
    pub beta: f64,
    pub certainty: Vec<f64>,
    pub use_approx: Vec<bool>,
}

impl DecisionVector {
    /// `certainty(i) = 1 − (|E≥2| − |V≥2|) / |V_i|`, where `V≥2` are residual
    /// vertices at finite hop distance ≥ 2 from the current vertex and `E≥2`
    /// are the pattern edges (over the full pattern edge set) touching them.
    pub fn build(p: &Pattern, order: &MatchingOrder, beta: f64) -> DecisionVector {
        let n = order.len();
        let mut certainty = Vec::with_capacity(n);
        for i in 0..n {
            let residual = order.residual_mask(i);
            let dist = hops_within(p, residual, order.vertex(i));
            let far: u16 = bits(residual)
                .filter(|&u| matches!(dist[u], Some(d) if d >= 2))
                .fold(0, |m, u| m | 1 << u);
            let far_edges = p
                .edges()
                .iter()
                .filter(|&&(a, b)| far & ((1 << a) | (1 << b)) != 0)
                .count();
            let residual_size = residual.count_ones() as f64;
            certainty.push(1.0 - (far_edges as f64 - far.count_ones() as f64) / residual_size);
        }
        let use_approx = certainty.iter().map(|&c| c >= beta).collect();
        DecisionVector {
            beta,
            certainty,
            use_approx,
        }
    }

    pub fn uniform_steps(&self) -> usize {
        self.use_approx.iter().filter(|&&a| !a).count()
    }
}

/// Everything a sampler needs about the pattern.
#[derive(Clone, Debug)]
pub struct Plan {
    pub pattern: Pattern,
    pub order: MatchingOrder,
    pub aux: AuxiliaryArrays,
    pub decision: DecisionVector,
    pub automorphisms: u64,
}

impl Plan {
    /// Plan with the greedy matching order.
    pub fn new(p: &Pattern, beta: f64) -> Plan {
        Plan::with_order(p, MatchingOrder::greedy(p), beta)
    }

    pub fn with_order(p: &Pattern, order: MatchingOrder, beta: f64) -> Plan {
        let aux = AuxiliaryArrays::build(p, &order);
        let decision = DecisionVector::build(p, &order, beta);
        Plan {
            pattern: p.clone(),
            automorphisms: p.count_automorphisms(),
            order,
            aux,
            decision,
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}
