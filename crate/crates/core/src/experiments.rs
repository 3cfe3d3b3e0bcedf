//! Desk-scale experiment suites behind `agpm bench`.
//!
//! Every suite emits [`Row`]s that share one CSV layout; columns a suite
//! does not measure are left empty.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::engine::{Mode, Orientation, RunConfig, Session};
use crate::error::{Error, Result};
use crate::generate;
use crate::graph::Graph;
use crate::oracle;
use crate::par::Executor;
use crate::pattern::Pattern;
use crate::preprocess::{ClusteringMode, PreprocessedStats};
use crate::sampler::Terms;

pub const CSV_HEADER: &str =
    "pattern,mode,KL_to_ideal,samplers_to_converge,eta_bar,realized_error,eps_hat,graph,terms,seed";

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Row {
    pub pattern: String,
    pub mode: String,
    pub kl_to_ideal: Option<f64>,
    pub samplers_to_converge: Option<u64>,
    pub eta_bar: Option<f64>,
    pub realized_error: Option<f64>,
    pub eps_hat: Option<f64>,
    pub graph: String,
    pub terms: String,
    pub seed: Option<u64>,
}

impl Row {
    pub fn to_csv(&self) -> String {
        fn opt<T: fmt::Display>(v: &Option<T>) -> String {
            v.as_ref().map(|x| x.to_string()).unwrap_or_default()
        }
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.pattern,
            self.mode,
            opt(&self.kl_to_ideal),
            opt(&self.samplers_to_converge),
            opt(&self.eta_bar),
            opt(&self.realized_error),
            opt(&self.eps_hat),
            self.graph,
            self.terms,
            opt(&self.seed),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    /// First-vertex KL divergence to the ideal distribution.
    Kl,
    /// Samplers needed to converge, agis against uniform.
    Samplers,
    /// Samplers needed as weight terms are switched on.
    Ablation,
    /// Realized error against the reported bound.
    Soundness,
    /// Average multiplicative error per mode.
    Eta,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Kl,
        Suite::Samplers,
        Suite::Ablation,
        Suite::Soundness,
        Suite::Eta,
    ];

    pub fn default_patterns(self) -> &'static [&'static str] {
        match self {
            Suite::Kl => &["triangle", "4-clique", "4-chain"],
            Suite::Samplers => &["3-star-2-star", "triangle-2-star", "4-clique-2-dot"],
            Suite::Ablation => &["4-clique", "4-chain"],
            Suite::Soundness => &["triangle", "4-chain", "3-star", "5-house"],
            Suite::Eta => &["triangle-2-star", "4-chain", "triangle"],
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        match s.to_ascii_lowercase().as_str() {
            "kl" => Ok(Suite::Kl),
            "samplers" => Ok(Suite::Samplers),
            "ablation" => Ok(Suite::Ablation),
            "soundness" => Ok(Suite::Soundness),
            "eta" => Ok(Suite::Eta),
            _ => Err(Error::Config(format!(
                "unknown suite '{s}' (expected kl, samplers, ablation, soundness or eta)"
            ))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Kl => "kl",
            Suite::Samplers => "samplers",
            Suite::Ablation => "ablation",
            Suite::Soundness => "soundness",
            Suite::Eta => "eta",
        })
    }
}

/// A graph with its statistics and a label for the CSV.
pub struct Workload {
    pub name: String,
    pub graph: Graph,
    pub stats: PreprocessedStats,
}

impl Workload {
    pub fn new(name: impl Into<String>, graph: Graph, mode: ClusteringMode, seed: u64) -> Workload {
        let stats = PreprocessedStats::compute(&graph, mode, seed);
        Workload {
            name: name.into(),
            graph,
            stats,
        }
    }

    /// Synthetic power-law graph with exact clustering.
    pub fn power_law(n: usize, m: usize, triad_prob: f64, seed: u64) -> Workload {
        let g = generate::power_law(n, m, 2.5, triad_prob, seed);
        let name = format!("powerlaw(n={n},m={m},gamma=2.5,triad={triad_prob},seed={seed})");
        Workload::new(name, g, ClusteringMode::Exact, seed)
    }

    /// Default graph for `suite`.
    pub fn default_for(suite: Suite) -> Workload {
        match suite {
            Suite::Kl => Workload::power_law(1000, 3, 0.9, 1),
            Suite::Samplers | Suite::Ablation => Workload::power_law(25_000, 4, 0.5, 1),
            Suite::Soundness => Workload::power_law(200, 3, 0.5, 2),
            Suite::Eta => Workload::power_law(2000, 3, 0.5, 3),
        }
    }
}

fn row(w: &Workload, p: &Pattern, mode: Mode, terms: Terms) -> Row {
    Row {
        pattern: p.to_string(),
        mode: mode.to_string(),
        graph: w.name.clone(),
        terms: terms.label().to_string(),
        ..Row::default()
    }
}

/// KL(f_ideal ‖ f) for the first-vertex distribution of each mode, with
/// orientation off so both share the ideal distribution.
pub fn kl_suite(w: &Workload, patterns: &[Pattern]) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for p in patterns {
        let mut ideal = None;
        for mode in [Mode::Agis, Mode::Uniform] {
            let cfg = RunConfig {
                mode,
                orientation: Orientation::Off,
                ..RunConfig::default()
            };
            let session = Session::new(&w.graph, p, &cfg, &w.stats)?;
            if ideal.is_none() {
                ideal = Some(oracle::exact_count(&w.graph, p, &session.plan().order)?.ideal_distribution()?);
            }
            let q = session
                .first_vertex_table()
                .distribution()
                .ok_or(Error::UndefinedDistribution)?;
            let kl = oracle::kl_divergence(ideal.as_ref().expect("set above"), &q);
            rows.push(Row {
                kl_to_ideal: Some(kl.value),
                ..row(w, p, mode, cfg.terms)
            });
        }
    }
    Ok(rows)
}

fn converge_row(w: &Workload, p: &Pattern, cfg: &RunConfig) -> Result<Row> {
    let r = Session::new(&w.graph, p, cfg, &w.stats)?.run(cfg)?;
    Ok(Row {
        samplers_to_converge: Some(r.samplers),
        eps_hat: r.eps_hat,
        seed: Some(cfg.seed),
        ..row(w, p, cfg.mode, cfg.terms)
    })
}

/// Samplers to converge in both modes for every seed.
pub fn samplers_suite(w: &Workload, patterns: &[Pattern], base: &RunConfig, seeds: &[u64]) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for p in patterns {
        for &seed in seeds {
            for mode in [Mode::Agis, Mode::Uniform] {
                let cfg = RunConfig {
                    mode,
                    seed,
                    ..base.clone()
                };
                rows.push(converge_row(w, p, &cfg)?);
            }
        }
    }
    Ok(rows)
}

/// Samplers to converge with `F1`, `F1+I1` and `F1+I1+F2` weights.
pub fn ablation_suite(w: &Workload, patterns: &[Pattern], base: &RunConfig, seeds: &[u64]) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for p in patterns {
        for level in 0..3 {
            for &seed in seeds {
                let cfg = RunConfig {
                    mode: Mode::Agis,
                    terms: Terms::level(level),
                    seed,
                    ..base.clone()
                };
                rows.push(converge_row(w, p, &cfg)?);
            }
        }
    }
    Ok(rows)
}

/// Realized relative error against the exact count, per seed and `ε`.
pub fn soundness_suite(
    w: &Workload,
    patterns: &[Pattern],
    base: &RunConfig,
    epsilons: &[f64],
    seeds: &[u64],
) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for p in patterns {
        let session = Session::new(&w.graph, p, base, &w.stats)?;
        let exact = oracle::exact_count(&w.graph, p, &session.plan().order)?.total as f64;
        if exact == 0.0 {
            log::warn!("{p} does not occur in {}; skipped", w.name);
            continue;
        }
        for &epsilon in epsilons {
            for &seed in seeds {
                let cfg = RunConfig {
                    epsilon,
                    seed,
                    ..base.clone()
                };
                let r = session.run(&cfg)?;
                rows.push(Row {
                    samplers_to_converge: Some(r.samplers),
                    realized_error: Some((r.estimate - exact).abs() / exact),
                    eps_hat: r.eps_hat,
                    seed: Some(seed),
                    ..row(w, p, cfg.mode, cfg.terms)
                });
            }
        }
    }
    Ok(rows)
}

/// `η̄` from `samples` outputs per mode, with common seeds.
pub fn eta_suite(w: &Workload, patterns: &[Pattern], base: &RunConfig, samples: u64) -> Result<Vec<Row>> {
    let exec = Executor::new(base.effective_threads());
    let mut rows = Vec::new();
    for p in patterns {
        let mut exact = None;
        for mode in [Mode::Agis, Mode::Uniform] {
            let cfg = RunConfig { mode, ..base.clone() };
            let session = Session::new(&w.graph, p, &cfg, &w.stats)?;
            let total = match exact {
                Some(t) => t,
                None => *exact.insert(oracle::exact_count(&w.graph, p, &session.plan().order)?.total),
            };
            if total == 0 {
                break;
            }
            let eta = oracle::estimate_mean_eta(&session, samples, cfg.seed, total, &exec);
            rows.push(Row {
                eta_bar: Some(eta.eta),
                seed: Some(cfg.seed),
                ..row(w, p, mode, cfg.terms)
            });
        }
    }
    Ok(rows)
}

/// Runs `suite` with its default patterns unless `patterns` is non-empty.
pub fn run_suite(
    suite: Suite,
    w: &Workload,
    patterns: &[Pattern],
    base: &RunConfig,
    seeds: &[u64],
) -> Result<Vec<Row>> {
    let defaults: Vec<Pattern>;
    let patterns = if patterns.is_empty() {
        defaults = suite
            .default_patterns()
            .iter()
            .map(|s| Pattern::parse(s))
            .collect::<Result<_>>()?;
        &defaults[..]
    } else {
        patterns
    };
    match suite {
        Suite::Kl => kl_suite(w, patterns),
        Suite::Samplers => samplers_suite(w, patterns, base, seeds),
        Suite::Ablation => ablation_suite(w, patterns, base, seeds),
        Suite::Soundness => soundness_suite(w, patterns, base, &[0.1, 0.01], seeds),
        Suite::Eta => eta_suite(w, patterns, base, 100_000),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let r = Row {
            pattern: "triangle".into(),
            mode: "agis".into(),
            samplers_to_converge: Some(512),
            graph: "g".into(),
            terms: "F1".into(),
            ..Row::default()
        };
        assert_eq!(r.to_csv(), "triangle,agis,,512,,,,g,F1,");
        assert_eq!(r.to_csv().split(',').count(), CSV_HEADER.split(',').count());
    }

    #[test]
    fn suites_parse() {
        for s in Suite::ALL {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn small_kl_suite_orders_modes() {
        let w = Workload::power_law(300, 3, 0.9, 4);
        let rows = kl_suite(&w, &[Pattern::parse("triangle").unwrap()]).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows[0].kl_to_ideal.unwrap() < rows[1].kl_to_ideal.unwrap());
    }
}
