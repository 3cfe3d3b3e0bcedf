use std::fs::File;
use std::io::{BufReader, Read};
use std::path::{Path, PathBuf};
use std::time::Instant;

use agpm_core::graph::{load_edge_list, read_csr_cache, CSR_MAGIC};
use agpm_core::preprocess::{compute_avg_neighbor_degree, estimate_clustering, DEFAULT_C_MIN};
use agpm_core::{ClusteringMode, Graph, Pattern, PreprocessedStats};
use anyhow::{bail, Context, Result};

use crate::args::PreprocessMode;

/// Graphs above this many edges get sampled clustering under `auto`.
pub const AUTO_EXACT_MAX_EDGES: u64 = 1_000_000;

/// Loads an edge list or, when the file starts with the cache magic, a
/// binary CSR cache. Returns the graph and the seconds spent.
pub fn load_graph(path: &Path) -> Result<(Graph, f64)> {
    let t = Instant::now();
    let mut file = File::open(path).with_context(|| format!("cannot open graph {}", path.display()))?;
    let mut head = [0u8; 8];
    let got = file.read(&mut head)?;
    let file = File::open(path)?;
    let g = if got == head.len() && &head == CSR_MAGIC {
        read_csr_cache(BufReader::new(file))
    } else {
        load_edge_list(BufReader::new(file))
    }
    .with_context(|| format!("cannot load graph {}", path.display()))?;
    log::info!(
        "loaded {}: {} vertices, {} edges",
        path.display(),
        g.num_vertices(),
        g.num_edges()
    );
    Ok((g, t.elapsed().as_secs_f64()))
}

pub fn load_pattern(spec: &str) -> Result<Pattern> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read pattern {spec}"))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        return Ok(Pattern::from_edge_list(&text)?.with_name(name));
    }
    Ok(Pattern::parse(spec)?)
}

pub fn sidecar_path(graph: &Path, explicit: Option<&Path>) -> PathBuf {
    match explicit {
        Some(p) => p.to_path_buf(),
        None => {
            let mut s = graph.as_os_str().to_os_string();
            s.push(".agispp");
            PathBuf::from(s)
        }
    }
}

pub fn resolve_mode(mode: PreprocessMode, g: &Graph) -> ClusteringMode {
    match mode {
        PreprocessMode::Exact => ClusteringMode::Exact,
        PreprocessMode::Sampled => ClusteringMode::Sampled,
        PreprocessMode::Auto if g.num_edges() <= AUTO_EXACT_MAX_EDGES => ClusteringMode::Exact,
        PreprocessMode::Auto => ClusteringMode::Sampled,
    }
}

pub struct PreprocessTimes {
    pub avg_degree_seconds: f64,
    pub clustering_seconds: f64,
}

impl PreprocessTimes {
    pub fn total(&self) -> f64 {
        self.avg_degree_seconds + self.clustering_seconds
    }
}

pub fn compute_stats(
    g: &Graph,
    mode: ClusteringMode,
    seed: u64,
    parallel: bool,
) -> (PreprocessedStats, PreprocessTimes) {
    let t = Instant::now();
    let avg_nbr_degree = compute_avg_neighbor_degree(g, parallel);
    let avg_degree_seconds = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let clustering = estimate_clustering(g, mode, seed, DEFAULT_C_MIN, parallel);
    let clustering_seconds = t.elapsed().as_secs_f64();
    (
        PreprocessedStats {
            avg_nbr_degree,
            clustering,
            c_min: DEFAULT_C_MIN,
            mode,
        },
        PreprocessTimes {
            avg_degree_seconds,
            clustering_seconds,
        },
    )
}

/// Reads the sidecar for `g`, returning the stats and the seconds spent.
pub fn read_stats(path: &Path, g: &Graph) -> Result<(PreprocessedStats, f64)> {
    let t = Instant::now();
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => bail!(
            "no preprocessed statistics at {}; run `agpm preprocess --graph <graph>` first \
             or pass --preprocess-inline",
            path.display()
        ),
        Err(e) => return Err(e).with_context(|| format!("cannot open {}", path.display())),
    };
    let stats = PreprocessedStats::read_sidecar(BufReader::new(file), Some(g.num_vertices())).with_context(|| {
        format!(
            "cannot use {}; rerun `agpm preprocess --force` for this graph",
            path.display()
        )
    })?;
    Ok((stats, t.elapsed().as_secs_f64()))
}
