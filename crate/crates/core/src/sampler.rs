//! One sampling trajectory.
//!
//! A sampler visits the pattern vertices in plan order. At step `i` it
//! intersects the neighbor lists of the graph vertices bound to the backward
//! neighbors of `u_i`, removes vertices already on the trajectory, and draws
//! the next vertex either uniformly or with probability proportional to
//!
//! ```text
//! C(d(v) − |B|, |F1|) · C_v^|Ieff| · avg_nbr_degree(v)^|F2|
//! ```
//!
//! A completed trajectory returns `1/p`, where `p` is the product of the
//! per-step draw probabilities; an empty candidate set returns `0`. Steps are
//! indexed from 0 throughout.

use std::borrow::Cow;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{contains, intersect_into};
use crate::graph::{Adjacency, VertexId};
use crate::pattern::{Plan, MAX_PATTERN_VERTICES};
use crate::preprocess::{choose, PreprocessedStats};

/// Which factors of the weight formula are active. The binomial factor is
/// always on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Terms {
    pub internal1: bool,
    pub forward2: bool,
}

impl Terms {
    pub const FULL: Terms = Terms {
        internal1: true,
        forward2: true,
    };
    pub const F1_ONLY: Terms = Terms {
        internal1: false,
        forward2: false,
    };
    pub const F1_I1: Terms = Terms {
        internal1: true,
        forward2: false,
    };

    /// `F1`, `F1+I1`, `F1+I1+F2` for levels 0, 1, 2.
    pub fn level(level: usize) -> Terms {
        match level {
            0 => Terms::F1_ONLY,
            1 => Terms::F1_I1,
            _ => Terms::FULL,
        }
    }

    pub fn label(&self) -> &'static str {
        match (self.internal1, self.forward2) {
            (false, false) => "F1",
            (true, false) => "F1+I1",
            (false, true) => "F1+F2",
            (true, true) => "F1+I1+F2",
        }
    }
}

impl Default for Terms {
    fn default() -> Terms {
        Terms::FULL
    }
}

/// Accumulated nanoseconds per sampling phase.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseTimes {
    pub set_ops_ns: u64,
    pub weights_ns: u64,
    pub drawing_ns: u64,
}

impl PhaseTimes {
    pub fn merge(&mut self, other: &PhaseTimes) {
        self.set_ops_ns += other.set_ops_ns;
        self.weights_ns += other.weights_ns;
        self.drawing_ns += other.drawing_ns;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    SetOps,
    Weights,
    Drawing,
}

/// Phase timing hook. `()` is the no-op implementation.
pub trait Timer {
    fn start(&self) -> Option<Instant>;
    fn stop(&mut self, phase: Phase, since: Option<Instant>);
}

impl Timer for () {
    #[inline(always)]
    fn start(&self) -> Option<Instant> {
        None
    }

    #[inline(always)]
    fn stop(&mut self, _: Phase, _: Option<Instant>) {}
}

impl Timer for PhaseTimes {
    #[inline]
    fn start(&self) -> Option<Instant> {
        Some(Instant::now())
    }

    #[inline]
    fn stop(&mut self, phase: Phase, since: Option<Instant>) {
        let Some(t) = since else { return };
        let ns = t.elapsed().as_nanos() as u64;
        match phase {
            Phase::SetOps => self.set_ops_ns += ns,
            Phase::Weights => self.weights_ns += ns,
            Phase::Drawing => self.drawing_ns += ns,
        }
    }
}

/// Cumulative first-step weights over every graph vertex.
#[derive(Clone, Debug)]
pub struct FirstVertexTable {
    weights: Vec<f64>,
    cumulative: Vec<f64>,
}

impl FirstVertexTable {
    pub fn from_weights(weights: Vec<f64>) -> FirstVertexTable {
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|&w| {
                acc += w;
                acc
            })
            .collect();
        FirstVertexTable { weights, cumulative }
    }

    pub fn total(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    /// Normalized distribution; `None` when the total is zero.
    pub fn distribution(&self) -> Option<Vec<f64>> {
        let t = self.total();
        (t > 0.0).then(|| self.weights.iter().map(|w| w / t).collect())
    }

    /// Index drawn for `u ∈ [0, 1)`; never an index with zero weight.
    pub fn draw(&self, u: f64) -> usize {
        let r = u * self.total();
        let idx = self.cumulative.partition_point(|&c| c <= r);
        if idx < self.weights.len() {
            return idx;
        }
        // u·total rounded up to total
        self.weights.iter().rposition(|&w| w > 0.0).expect("positive total")
    }
}

/// Linear prefix scan over `weights` summing to `total`.
pub fn draw_linear(weights: &[f64], total: f64, u: f64) -> usize {
    let r = u * total;
    let mut acc = 0.0;
    for (idx, &w) in weights.iter().enumerate() {
        acc += w;
        if acc > r {
            return idx;
        }
    }
    weights.iter().rposition(|&w| w > 0.0).expect("positive total")
}

/// A (possibly partial) trajectory with its draw probability.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub vertices: Vec<VertexId>,
    pub prob: f64,
    pub complete: bool,
}

/// Per-thread buffers reused across trajectories.
#[derive(Clone, Debug, Default)]
pub struct Scratch {
    tau: Vec<VertexId>,
    candidates: Vec<VertexId>,
    tmp: Vec<VertexId>,
    weights: Vec<f64>,
}

impl Scratch {
    pub fn new() -> Scratch {
        Scratch::default()
    }
}

/// Everything a trajectory reads; immutable and shareable across threads.
pub struct Sampler<'a, A: Adjacency> {
    graph: A,
    plan: Plan,
    stats: &'a PreprocessedStats,
    clustering: Cow<'a, [f64]>,
    terms: Terms,
    oriented: bool,
    first: FirstVertexTable,
}

impl<'a, A: Adjacency> Sampler<'a, A> {
    /// `oriented` means `graph` holds out-neighbors of a degree orientation;
    /// the binomial factor then uses the out-degree as is.
    pub fn new(graph: A, plan: Plan, stats: &'a PreprocessedStats, terms: Terms, oriented: bool) -> Sampler<'a, A> {
        let mut s = Sampler {
            graph,
            plan,
            stats,
            clustering: Cow::Borrowed(&stats.clustering),
            terms,
            oriented,
            first: FirstVertexTable::from_weights(Vec::new()),
        };
        s.first = s.build_first_vertex_table();
        s
    }

    /// Replaces the clustering coefficients used by the internal-edge term,
    /// e.g. with coefficients measured on the oriented graph.
    pub fn with_clustering(mut self, clustering: Vec<f64>) -> Sampler<'a, A> {
        assert_eq!(clustering.len(), self.graph.num_vertices());
        self.clustering = Cow::Owned(clustering);
        self.first = self.build_first_vertex_table();
        self
    }

    pub fn plan(&self) -> &Plan {
        &self.plan
    }

    pub fn graph(&self) -> &A {
        &self.graph
    }

    pub fn is_oriented(&self) -> bool {
        self.oriented
    }

    pub fn first_vertex_table(&self) -> &FirstVertexTable {
        &self.first
    }

    fn build_first_vertex_table(&self) -> FirstVertexTable {
        let n = self.graph.num_vertices();
        let weights = if self.plan.decision.use_approx[0] {
            (0..n as VertexId).map(|v| self.weight(v, 0)).collect()
        } else {
            (0..n as VertexId).map(|v| self.graph.degree(v) as f64).collect()
        };
        FirstVertexTable::from_weights(weights)
    }

    /// Structure-informed weight of candidate `v` at step `i`.
    #[inline]
    pub fn weight(&self, v: VertexId, i: usize) -> f64 {
        let s = self.plan.aux.step(i);
        let mut d = self.graph.degree(v) as i64;
        if !self.oriented {
            d -= s.backward.len() as i64;
        }
        let mut w = choose(d, s.forward1.len());
        if w == 0.0 {
            return 0.0;
        }
        if self.terms.internal1 && !s.internal_effective.is_empty() {
            w *= self.clustering[v as usize].powi(s.internal_effective.len() as i32);
        }
        if self.terms.forward2 && !s.forward2.is_empty() {
            w *= self.stats.avg_nbr_degree[v as usize].powi(s.forward2.len() as i32);
        }
        w
    }

    pub fn approx_weights(&self, candidates: &[VertexId], i: usize) -> Vec<f64> {
        candidates.iter().map(|&v| self.weight(v, i)).collect()
    }

    /// Candidate set for step `i >= 1` given the first `i` bound vertices.
    pub fn candidate_set(&self, tau: &[VertexId], i: usize) -> Vec<VertexId> {
        let mut out = Vec::new();
        let mut tmp = Vec::new();
        self.fill_candidates(tau, i, &mut out, &mut tmp);
        out
    }

    fn fill_candidates(&self, tau: &[VertexId], i: usize, out: &mut Vec<VertexId>, tmp: &mut Vec<VertexId>) {
        let back = &self.plan.aux.step(i).backward_steps;
        let mut lists: [&[VertexId]; MAX_PATTERN_VERTICES] = [&[]; MAX_PATTERN_VERTICES];
        for (slot, &j) in lists.iter_mut().zip(back) {
            *slot = self.graph.neighbors(tau[j]);
        }
        intersect_into(&lists[..back.len()], out, tmp);
        out.retain(|v| !tau.contains(v));
    }

    /// Output of one trajectory: `1/p` on completion, else `0`.
    pub fn sample_once<R: Rng + ?Sized>(&self, rng: &mut R, scratch: &mut Scratch) -> f64 {
        self.sample_timed(rng, scratch, &mut ())
    }

    pub fn sample_timed<R: Rng + ?Sized, T: Timer>(&self, rng: &mut R, scratch: &mut Scratch, timer: &mut T) -> f64 {
        let (num, den) = self.walk(rng, scratch, timer);
        if num == 0.0 {
            0.0
        } else {
            num / den
        }
    }

    /// Like [`Self::sample_once`] but returns the trajectory itself.
    pub fn sample_trajectory<R: Rng + ?Sized>(&self, rng: &mut R) -> Trajectory {
        let mut scratch = Scratch::new();
        let (num, den) = self.walk(rng, &mut scratch, &mut ());
        let complete = num != 0.0;
        Trajectory {
            vertices: scratch.tau,
            prob: if complete { den / num } else { 0.0 },
            complete,
        }
    }

    /// Returns `(Π totals, Π chosen weights)`; `1/p` is their ratio. Keeping
    /// the two products apart makes integer-weighted runs exact.
    fn walk<R: Rng + ?Sized, T: Timer>(&self, rng: &mut R, sc: &mut Scratch, timer: &mut T) -> (f64, f64) {
        let plan = &self.plan;
        let k = plan.len();
        sc.tau.clear();

        let total0 = self.first.total();
        if total0 <= 0.0 {
            return (0.0, 1.0);
        }
        let t = timer.start();
        let v0 = self.first.draw(rng.random::<f64>());
        timer.stop(Phase::Drawing, t);
        sc.tau.push(v0 as VertexId);
        let mut num = total0;
        let mut den = self.first.weights[v0];

        for i in 1..k {
            let back = &plan.aux.step(i).backward_steps;
            let approx = plan.decision.use_approx[i];

            if !approx && back.len() == 1 {
                // uniform over N(τ_j) \ τ by rejection, no copy
                let t = timer.start();
                let nb = self.graph.neighbors(sc.tau[back[0]]);
                let taken = sc.tau.iter().filter(|&&x| contains(nb, x)).count();
                let size = nb.len() - taken;
                timer.stop(Phase::SetOps, t);
                if size == 0 {
                    sc.tau.clear();
                    return (0.0, 1.0);
                }
                let t = timer.start();
                let v = loop {
                    let v = nb[rng.random_range(0..nb.len())];
                    if !sc.tau.contains(&v) {
                        break v;
                    }
                };
                timer.stop(Phase::Drawing, t);
                sc.tau.push(v);
                num *= size as f64;
                continue;
            }

            let t = timer.start();
            self.fill_candidates(&sc.tau, i, &mut sc.candidates, &mut sc.tmp);
            timer.stop(Phase::SetOps, t);
            if sc.candidates.is_empty() {
                sc.tau.clear();
                return (0.0, 1.0);
            }

            if !approx {
                let t = timer.start();
                let v = sc.candidates[rng.random_range(0..sc.candidates.len())];
                timer.stop(Phase::Drawing, t);
                num *= sc.candidates.len() as f64;
                sc.tau.push(v);
                continue;
            }

            let t = timer.start();
            sc.weights.clear();
            let mut total = 0.0;
            for &v in &sc.candidates {
                let w = self.weight(v, i);
                total += w;
                sc.weights.push(w);
            }
            timer.stop(Phase::Weights, t);
            if total <= 0.0 {
                sc.tau.clear();
                return (0.0, 1.0);
            }

            let t = timer.start();
            let idx = draw_linear(&sc.weights, total, rng.random::<f64>());
            timer.stop(Phase::Drawing, t);
            num *= total;
            den *= sc.weights[idx];
            sc.tau.push(sc.candidates[idx]);
        }
        (num, den)
    }
}
