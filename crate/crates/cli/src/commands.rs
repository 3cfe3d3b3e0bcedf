use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;
use std::time::Instant;

use agpm_core::engine::{MiningResult, StopReason};
use agpm_core::experiments::{self, Suite, Workload, CSV_HEADER};
use agpm_core::oracle::{self, DEFAULT_GUARD};
use agpm_core::{Plan, RunConfig, Session};
use anyhow::{bail, Context, Result};

use crate::args::{BenchArgs, CountArgs, ExactArgs, PreprocessArgs};
use crate::input::{self, compute_stats, load_graph, load_pattern, resolve_mode, sidecar_path};

pub const EXIT_NOT_CONVERGED: u8 = 2;
pub const EXIT_ERROR: u8 = 1;

pub fn count(a: CountArgs) -> Result<ExitCode> {
    let (g, load_seconds) = load_graph(&a.graph.graph)?;
    let p = load_pattern(&a.pattern.pattern)?;
    let cfg = RunConfig {
        epsilon: a.epsilon,
        delta: a.delta,
        beta: a.beta,
        threads: a.threads,
        seed: a.seed,
        check_interval: a.check_interval,
        max_samplers: a.max_samplers,
        max_seconds: a.max_seconds,
        mode: a.mode,
        orientation: a.orientation,
        terms: a.terms,
        profile: a.profile,
    };
    cfg.validate()?;

    let (stats, preprocess_seconds) = if a.preprocess_inline {
        let mode = resolve_mode(a.preprocess_mode, &g);
        let (stats, times) = compute_stats(&g, mode, a.seed, cfg.effective_threads() > 1);
        (stats, times.total())
    } else {
        input::read_stats(&sidecar_path(&a.graph.graph, a.sidecar.as_deref()), &g)?
    };

    let mut r = Session::new(&g, &p, &cfg, &stats)?.run(&cfg)?;
    r.timings.load_seconds = Some(load_seconds);
    r.timings.preprocess_seconds = Some(preprocess_seconds);

    let mut out = io::stdout().lock();
    if a.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&r)?)?;
    } else {
        print_result(&mut out, &r)?;
    }
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
    Ok(if r.converged {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_NOT_CONVERGED)
    })
}

fn print_result(out: &mut impl Write, r: &MiningResult) -> io::Result<()> {
    let stop = match r.stop_reason {
        StopReason::Converged => "converged",
        StopReason::AllZero => "all outputs zero",
        StopReason::NoStart => "no starting vertex",
        StopReason::SamplerCap => "sampler cap",
        StopReason::TimeCap => "time cap",
    };
    writeln!(out, "pattern            {}", r.plan.pattern)?;
    writeln!(out, "estimate           {:.6e}", r.estimate)?;
    writeln!(
        out,
        "instances          {:.6e}  (|Aut| = {})",
        r.instance_estimate, r.automorphisms
    )?;
    writeln!(out, "samplers           {}", r.samplers)?;
    match r.eps_hat {
        Some(e) => writeln!(out, "eps_hat            {e:.4}"),
        None => writeln!(out, "eps_hat            undefined"),
    }?;
    writeln!(out, "stop               {stop}")?;
    writeln!(out, "threads            {}", r.threads)?;
    let t = &r.timings;
    writeln!(
        out,
        "time (s)           load {:.3}  preprocess {:.3}  plan {:.3}  sampling {:.3}",
        t.load_seconds.unwrap_or(0.0),
        t.preprocess_seconds.unwrap_or(0.0),
        t.plan_seconds,
        t.sampling_seconds
    )?;
    if let Some(ph) = &t.phases {
        let s = |ns: u64| ns as f64 * 1e-9;
        writeln!(
            out,
            "sampling (cpu s)   set ops {:.3}  weights {:.3}  drawing {:.3}",
            s(ph.set_ops_ns),
            s(ph.weights_ns),
            s(ph.drawing_ns)
        )?;
    }
    Ok(())
}

pub fn exact(a: ExactArgs) -> Result<ExitCode> {
    let (g, _) = load_graph(&a.graph.graph)?;
    let p = load_pattern(&a.pattern.pattern)?;
    let plan = Plan::new(&p, agpm_core::pattern::DEFAULT_BETA);
    let guard = (!a.no_guard).then_some(DEFAULT_GUARD);
    let t = Instant::now();
    let c =
        oracle::exact_count_with(&g, &p, &plan.order, guard, true).context("pass --no-guard to enumerate anyway")?;
    let secs = t.elapsed().as_secs_f64();
    let mut out = io::stdout().lock();
    if a.json {
        let v = serde_json::json!({
            "pattern": p.to_string(),
            "count": c.total,
            "automorphisms": plan.automorphisms,
            "instances": c.total / plan.automorphisms,
            "seconds": secs,
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
    } else {
        writeln!(out, "count              {}", c.total)?;
        writeln!(out, "automorphisms      {}", plan.automorphisms)?;
        writeln!(out, "instances          {}", c.total / plan.automorphisms)?;
        writeln!(out, "time (s)           {secs:.3}")?;
    }
    Ok(ExitCode::SUCCESS)
}

pub fn preprocess(a: PreprocessArgs) -> Result<ExitCode> {
    let path = sidecar_path(&a.graph.graph, a.output.as_deref());
    if path.exists() && !a.force {
        bail!("{} already exists; pass --force to overwrite", path.display());
    }
    let (g, load_seconds) = load_graph(&a.graph.graph)?;
    let mode = resolve_mode(a.mode, &g);
    let threads = if a.threads == 0 {
        agpm_core::par::available_threads()
    } else {
        a.threads
    };
    let (stats, times) = compute_stats(&g, mode, a.seed, threads > 1);

    let t = Instant::now();
    let tmp = path.with_extension("agispp.tmp");
    {
        let file = File::create(&tmp).with_context(|| format!("cannot write {}", tmp.display()))?;
        let mut w = BufWriter::new(file);
        stats.write_sidecar(&mut w)?;
        w.flush()?;
    }
    fs::rename(&tmp, &path).with_context(|| format!("cannot write {}", path.display()))?;
    let write_seconds = t.elapsed().as_secs_f64();
    let mut out = io::stdout().lock();

    let mode_name = match mode {
        agpm_core::ClusteringMode::Exact => "exact",
        agpm_core::ClusteringMode::Sampled => "sampled",
    };
    writeln!(
        out,
        "wrote {} ({} vertices, {mode_name} clustering)",
        path.display(),
        g.num_vertices()
    )?;
    writeln!(
            out,
        "time (s)           load {load_seconds:.3}  avg neighbor degree {:.3}  clustering {:.3}  write {write_seconds:.3}",
        times.avg_degree_seconds, times.clustering_seconds
    )?;
    Ok(ExitCode::SUCCESS)
}

pub fn bench(a: BenchArgs) -> Result<ExitCode> {
    let workload = match &a.graph {
        None => Workload::default_for(a.suite),
        Some(path) => {
            let (g, _) = load_graph(path)?;
            let mode = resolve_mode(crate::args::PreprocessMode::Auto, &g);
            Workload::new(path.display().to_string(), g, mode, 0)
        }
    };
    let patterns = a.patterns.iter().map(|s| load_pattern(s)).collect::<Result<Vec<_>>>()?;
    let base = RunConfig {
        epsilon: a.epsilon,
        delta: a.delta,
        threads: a.threads,
        max_samplers: a.max_samplers,
        ..RunConfig::default()
    };
    base.validate()?;
    if a.seeds.is_empty() && matches!(a.suite, Suite::Samplers | Suite::Ablation | Suite::Soundness) {
        bail!("--seeds must not be empty for the {} suite", a.suite);
    }
    let rows = experiments::run_suite(a.suite, &workload, &patterns, &base, &a.seeds)?;

    let mut out: Box<dyn Write> = match &a.csv {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("cannot write {}", path.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    };
    writeln!(out, "{CSV_HEADER}")?;
    for r in &rows {
        writeln!(out, "{}", r.to_csv())?;
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}
