//! End-to-end estimation runs.
//!
//! Work is split into chunks of `check_interval` trajectories. Chunk `c`
//! draws from its own ChaCha8 stream (`seed`, stream `c`), so its outputs do
//! not depend on which thread runs it. Each round evaluates one chunk per
//! worker; the coordinator then folds the chunks in index order and tests
//! convergence after every fold. The stopping point, and therefore the
//! whole result, is identical for every thread count.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::convergence::{ConvergenceStats, Detector};
use crate::error::{Error, Result};
use crate::graph::{Graph, OrientedGraph};
use crate::par::{self, Executor};
use crate::pattern::{Pattern, Plan, DEFAULT_BETA};
use crate::preprocess::{oriented_clustering, PreprocessedStats};
use crate::sampler::{FirstVertexTable, PhaseTimes, Sampler, Scratch, Terms, Timer};

pub const DEFAULT_EPSILON: f64 = 0.1;
pub const DEFAULT_DELTA: f64 = 0.01;
pub const DEFAULT_CHECK_INTERVAL: u64 = 512;
pub const DEFAULT_MAX_SAMPLERS: u64 = 10_000_000_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Structure-informed weights where the decision vector allows.
    #[default]
    Agis,
    /// Degree-proportional first vertex, uniform candidates afterwards.
    Uniform,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mode> {
        match s.to_ascii_lowercase().as_str() {
            "agis" => Ok(Mode::Agis),
            "uniform" => Ok(Mode::Uniform),
            _ => Err(Error::Config(format!("unknown mode '{s}' (expected agis or uniform)"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Agis => "agis",
            Mode::Uniform => "uniform",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// Orient exactly when the pattern is a clique.
    #[default]
    Auto,
    On,
    Off,
}

impl FromStr for Orientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Orientation> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(Orientation::Auto),
            "on" => Ok(Orientation::On),
            "off" => Ok(Orientation::Off),
            _ => Err(Error::Config(format!(
                "unknown orientation '{s}' (expected auto, on or off)"
            ))),
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::Auto => "auto",
            Orientation::On => "on",
            Orientation::Off => "off",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub beta: f64,
    /// `0` uses every available thread.
    pub threads: usize,
    pub seed: u64,
    pub check_interval: u64,
    pub max_samplers: u64,
    pub max_seconds: Option<f64>,
    pub mode: Mode,
    pub orientation: Orientation,
    pub terms: Terms,
    /// Collect per-phase sampling times.
    pub profile: bool,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            epsilon: DEFAULT_EPSILON,
            delta: DEFAULT_DELTA,
            beta: DEFAULT_BETA,
            threads: 0,
            seed: 0,
            check_interval: DEFAULT_CHECK_INTERVAL,
            max_samplers: DEFAULT_MAX_SAMPLERS,
            max_seconds: None,
            mode: Mode::Agis,
            orientation: Orientation::Auto,
            terms: Terms::FULL,
            profile: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        Detector::new(self.epsilon, self.delta)?;
        if self.mode == Mode::Agis && !(self.beta <= 1.0) {
            return Err(Error::Config(format!(
                "beta {} must not exceed 1 in agis mode",
                self.beta
            )));
        }
        if self.check_interval == 0 {
            return Err(Error::Config("check interval must be positive".into()));
        }
        if self.max_samplers == 0 {
            return Err(Error::Config("sampler cap must be positive".into()));
        }
        if let Some(s) = self.max_seconds {
            if !(s > 0.0) {
                return Err(Error::Config(format!("time cap {s} must be positive")));
            }
        }
        Ok(())
    }

    /// Threshold applied to the decision vector; uniform mode never
    /// approximates.
    pub fn effective_beta(&self) -> f64 {
        match self.mode {
            Mode::Agis => self.beta,
            Mode::Uniform => f64::INFINITY,
        }
    }

    pub fn effective_threads(&self) -> usize {
        if self.threads == 0 {
            par::available_threads()
        } else {
            self.threads
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Converged,
    /// Every output was zero for the detector's cutoff length.
    AllZero,
    /// No first vertex has positive weight.
    NoStart,
    SamplerCap,
    TimeCap,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanSummary {
    pub pattern: String,
    pub order: Vec<usize>,
    pub use_approx: Vec<bool>,
    pub certainty: Vec<f64>,
    /// `None` for the uniform sentinel.
    pub beta: Option<f64>,
    pub oriented: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub load_seconds: Option<f64>,
    pub preprocess_seconds: Option<f64>,
    pub plan_seconds: f64,
    pub sampling_seconds: f64,
    pub phases: Option<PhaseTimes>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MiningResult {
    /// Estimated number of embeddings `C(G, P)`.
    pub estimate: f64,
    /// `estimate / |Aut(P)|`.
    pub instance_estimate: f64,
    pub automorphisms: u64,
    pub samplers: u64,
    /// Relative error bound at stop; `None` while the mean is zero.
    pub eps_hat: Option<f64>,
    pub std_dev: f64,
    pub converged: bool,
    pub stop_reason: StopReason,
    pub threads: usize,
    pub config: RunConfig,
    pub plan: PlanSummary,
    pub timings: Timings,
    pub warnings: Vec<String>,
}

enum Inner<'a> {
    Plain(Sampler<'a, &'a Graph>),
    Oriented(Sampler<'a, OrientedGraph>),
}

/// A prepared plan and sampler for one `(graph, pattern, config)` triple.
pub struct Session<'a> {
    inner: Inner<'a>,
    scale: f64,
    plan_seconds: f64,
}

impl<'a> Session<'a> {
    pub fn new(g: &'a Graph, p: &Pattern, cfg: &RunConfig, stats: &'a PreprocessedStats) -> Result<Session<'a>> {
        let t = Instant::now();
        cfg.validate()?;
        stats.check_matches(g)?;
        let oriented = match cfg.orientation {
            Orientation::Auto => p.is_clique(),
            Orientation::On if p.is_clique() => true,
            Orientation::On => {
                return Err(Error::Config("orientation requires a clique pattern".into()));
            }
            Orientation::Off => false,
        };
        let plan = Plan::new(p, cfg.effective_beta());
        let scale = if oriented { plan.automorphisms as f64 } else { 1.0 };
        let inner = if oriented {
            let dag = g.orient();
            let clustering = oriented_clustering(&dag, stats.mode, cfg.seed, stats.c_min, cfg.effective_threads() > 1);
            Inner::Oriented(Sampler::new(dag, plan, stats, cfg.terms, true).with_clustering(clustering))
        } else {
            Inner::Plain(Sampler::new(g, plan, stats, cfg.terms, false))
        };
        Ok(Session {
            inner,
            scale,
            plan_seconds: t.elapsed().as_secs_f64(),
        })
    }

    pub fn plan(&self) -> &Plan {
        match &self.inner {
            Inner::Plain(s) => s.plan(),
            Inner::Oriented(s) => s.plan(),
        }
    }

    pub fn is_oriented(&self) -> bool {
        matches!(self.inner, Inner::Oriented(_))
    }

    /// Factor applied to raw sampler outputs (`|Aut(P)|` when oriented).
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn first_vertex_table(&self) -> &FirstVertexTable {
        match &self.inner {
            Inner::Plain(s) => s.first_vertex_table(),
            Inner::Oriented(s) => s.first_vertex_table(),
        }
    }

    /// One scaled sampler output.
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, scratch: &mut Scratch) -> f64 {
        self.sample_timed(rng, scratch, &mut ())
    }

    #[inline]
    fn sample_timed<R: Rng + ?Sized, T: Timer>(&self, rng: &mut R, scratch: &mut Scratch, timer: &mut T) -> f64 {
        let x = match &self.inner {
            Inner::Plain(s) => s.sample_timed(rng, scratch, timer),
            Inner::Oriented(s) => s.sample_timed(rng, scratch, timer),
        };
        x * self.scale
    }

    /// Stream for chunk `chunk` under `seed`.
    pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(chunk);
        rng
    }

    fn run_chunk(&self, seed: u64, chunk: u64, len: u64, profile: bool) -> (ConvergenceStats, Option<PhaseTimes>) {
        let mut rng = Session::chunk_rng(seed, chunk);
        let mut scratch = Scratch::new();
        let mut stats = ConvergenceStats::new();
        if profile {
            let mut times = PhaseTimes::default();
            for _ in 0..len {
                stats.push(self.sample_timed(&mut rng, &mut scratch, &mut times));
            }
            (stats, Some(times))
        } else {
            for _ in 0..len {
                stats.push(self.sample(&mut rng, &mut scratch));
            }
            (stats, None)
        }
    }

    /// `count` raw outputs drawn with the same chunk streams as [`Self::run`].
    pub fn outputs(&self, count: u64, seed: u64, exec: &Executor) -> Vec<f64> {
        let chunk = DEFAULT_CHECK_INTERVAL;
        let chunks = count.div_ceil(chunk);
        exec.map(0..chunks, |c| {
            let mut rng = Session::chunk_rng(seed, c);
            let mut scratch = Scratch::new();
            let len = chunk.min(count - c * chunk);
            (0..len)
                .map(|_| self.sample(&mut rng, &mut scratch))
                .collect::<Vec<_>>()
        })
        .into_iter()
        .flatten()
        .collect()
    }

    pub fn run(&self, cfg: &RunConfig) -> Result<MiningResult> {
        cfg.validate()?;
        let detector = Detector::new(cfg.epsilon, cfg.delta)?;
        let threads = cfg.effective_threads();
        let exec = Executor::new(threads);
        let start = Instant::now();
        let mut warnings = Vec::new();
        let mut stats = ConvergenceStats::new();
        let mut phases = cfg.profile.then(PhaseTimes::default);

        let stop = if self.first_vertex_table().total() <= 0.0 {
            warnings.push("no vertex can start an embedding; the count is 0".to_string());
            StopReason::NoStart
        } else {
            let per_round = exec.threads() as u64;
            let mut next = 0u64;
            'rounds: loop {
                let chunks = exec.map(next..next + per_round, |c| {
                    self.run_chunk(cfg.seed, c, cfg.check_interval, cfg.profile)
                });
                for (chunk_stats, chunk_times) in chunks {
                    next += 1;
                    stats.merge(&chunk_stats);
                    if let (Some(total), Some(t)) = (phases.as_mut(), chunk_times) {
                        total.merge(&t);
                    }
                    let check = detector.check(&stats);
                    if check.converged {
                        break 'rounds if check.all_zero {
                            StopReason::AllZero
                        } else {
                            StopReason::Converged
                        };
                    }
                    if stats.n() >= cfg.max_samplers {
                        break 'rounds StopReason::SamplerCap;
                    }
                }
                if let Some(limit) = cfg.max_seconds {
                    if start.elapsed().as_secs_f64() >= limit {
                        break StopReason::TimeCap;
                    }
                }
            }
        };
        let sampling_seconds = start.elapsed().as_secs_f64();

        match stop {
            StopReason::AllZero => warnings.push(format!(
                "all {} sampler outputs were zero; reporting a count of 0",
                stats.n()
            )),
            StopReason::SamplerCap => warnings.push(format!(
                "stopped at the sampler cap ({}) before convergence",
                cfg.max_samplers
            )),
            StopReason::TimeCap => warnings.push("stopped at the time cap before convergence".to_string()),
            _ => {}
        }

        let plan = self.plan();
        let estimate = stats.mean();
        let eps_hat = stats.estimated_error(detector.z());
        let beta = plan.decision.beta;
        Ok(MiningResult {
            estimate,
            instance_estimate: estimate / plan.automorphisms as f64,
            automorphisms: plan.automorphisms,
            samplers: stats.n(),
            eps_hat: eps_hat.is_finite().then_some(eps_hat),
            std_dev: stats.std_dev(),
            converged: matches!(stop, StopReason::Converged | StopReason::AllZero | StopReason::NoStart),
            stop_reason: stop,
            threads: exec.threads(),
            config: cfg.clone(),
            plan: PlanSummary {
                pattern: plan.pattern.to_string(),
                order: plan.order.as_slice().to_vec(),
                use_approx: plan.decision.use_approx.clone(),
                certainty: plan.decision.certainty.clone(),
                beta: beta.is_finite().then_some(beta),
                oriented: self.is_oriented(),
            },
            timings: Timings {
                load_seconds: None,
                preprocess_seconds: None,
                plan_seconds: self.plan_seconds,
                sampling_seconds,
                phases,
            },
            warnings,
        })
    }
}

/// Plans and runs one estimation.
pub fn run(g: &Graph, p: &Pattern, cfg: &RunConfig, stats: &PreprocessedStats) -> Result<MiningResult> {
    Session::new(g, p, cfg, stats)?.run(cfg)
}
