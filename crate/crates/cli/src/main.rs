//! `belyi`: sampling, peeling, metric and Monte Carlo experiments on random
//! gluings of ideal triangles.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use belyi_core::cmap::{build_triangulation, read_map_file, sample_pairing, write_map_file, CornerRef};
use belyi_core::metric::{
    build_graph, derive_params, diameter, write_graph_csv, DiameterMode, ModelParams, ParamOverrides, Sparsification,
};
use belyi_core::peel::{
    explore_pair_large, explore_pair_small, explore_tiny, run_to_completion, verify_outcome, write_event_trace,
    ExplorationKind, ExplorationStatus, LargestFirst, PartnerSource, PeelAlgorithm, SmallestFirst, UniformEdge,
};
use belyi_core::stats::{self, DiameterChoice, Regime, StudyConfig, StudyReport, DEFAULT_SWEEP_SOURCES};
use belyi_core::Error;
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[derive(Parser, Debug)]
#[command(name = "belyi", version, about = "Random gluings of ideal triangles")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Sample one uniform gluing and write it as a map file.
    Sample(SampleArgs),
    /// Vertex, genus and connectivity statistics.
    Topology(StudyArgs),
    /// Largest-degree statistics.
    Degrees(StudyArgs),
    /// Peel a map file, or run explorations on it.
    Peel(PeelArgs),
    /// Diameter of the metric graph of a map file, as JSON.
    Metric(MetricArgs),
    /// Diameter over log n across sizes.
    Scaling(StudyArgs),
    /// Exploration outcomes and witness checks.
    Props(StudyArgs),
    /// Diameter of one-vertex gluings (odd n only).
    Conjecture(StudyArgs),
    /// Run the invariant suite.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long = "L", default_value_t = 10.0)]
    l: f64,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    rho0: Option<f64>,
    #[arg(long)]
    cface: Option<f64>,
    #[arg(long, value_enum, default_value_t = SparsificationArg::Dyadic)]
    sparsification: SparsificationArg,
    #[arg(long, value_enum, default_value_t = DiameterArg::Sweep)]
    diameter: DiameterArg,
}

impl ModelArgs {
    fn params(&self) -> anyhow::Result<ModelParams> {
        Ok(derive_params(
            self.epsilon,
            self.l,
            ParamOverrides {
                alpha: self.alpha,
                rho0: self.rho0,
                c_face: self.cface,
            },
        )?)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum SparsificationArg {
    Dense,
    Dyadic,
}

impl From<SparsificationArg> for Sparsification {
    fn from(s: SparsificationArg) -> Self {
        match s {
            SparsificationArg::Dense => Sparsification::Dense,
            SparsificationArg::Dyadic => Sparsification::Dyadic,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum DiameterArg {
    Exact,
    Sweep,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct StudyArgs {
    /// Comma-separated sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    /// CSV path; the JSON summary goes next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq)]
enum Algo {
    Smallest,
    Largest,
    Uniform,
    Large,
    Small,
    Tiny,
}

#[derive(Args, Debug)]
struct PeelArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Algo::Smallest)]
    algo: Algo,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Write the gluing events as JSON lines (peeling choosers only).
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MetricArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Prefix for `<out>.edges.csv` and `<out>.nodes.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    quick: bool,
    #[arg(long)]
    seed: Option<u64>,
}

fn usage_error(msg: impl std::fmt::Display) -> ! {
    Cli::command().error(ErrorKind::ValueValidation, msg).exit()
}

/// The given seed, or a fresh one that is printed so the run can be replayed.
fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random();
        eprintln!("seed: {s}");
        s
    })
}

fn study_config(a: &StudyArgs) -> anyhow::Result<StudyConfig> {
    if a.trials == 0 {
        usage_error("--trials must be at least 1");
    }
    if a.n.contains(&0) {
        usage_error("--n values must be positive");
    }
    if a.threads == Some(0) {
        usage_error("--threads must be at least 1");
    }
    let params = a.model.params().unwrap_or_else(|e| usage_error(e));
    let mut c = StudyConfig::new(a.n.clone(), a.trials, resolve_seed(a.seed), params);
    c.sparsification = a.model.sparsification.into();
    c.diameter = match a.model.diameter {
        DiameterArg::Exact => DiameterChoice::Exact,
        DiameterArg::Sweep => DiameterChoice::Sweep(DEFAULT_SWEEP_SOURCES),
    };
    c.threads = a.threads;
    c.output = a.out.clone();
    Ok(c)
}

fn emit(report: &StudyReport, out: Option<&PathBuf>) -> anyhow::Result<()> {
    if let Some(path) = out {
        let json = report.write(path)?;
        eprintln!("wrote {} and {}", path.display(), json.display());
    }
    println!("{}", serde_json::to_string_pretty(&report.to_json()["aggregates"])?);
    Ok(())
}

fn run_study(a: &StudyArgs, study: fn(&StudyConfig) -> belyi_core::Result<StudyReport>) -> anyhow::Result<()> {
    let c = study_config(a)?;
    emit(&study(&c)?, a.out.as_ref())
}

fn peel(a: &PeelArgs) -> anyhow::Result<()> {
    let p = read_map_file(&a.input)?;
    let n = p.n();
    let seed = resolve_seed(a.seed);
    let chooser: Option<Box<dyn PeelAlgorithm>> = match a.algo {
        Algo::Smallest => Some(Box::new(SmallestFirst::default())),
        Algo::Largest => Some(Box::new(LargestFirst::default())),
        Algo::Uniform => Some(Box::new(UniformEdge::new(seed))),
        _ => None,
    };
    if let Some(mut chooser) = chooser {
        let (t, events) = run_to_completion(n, chooser.as_mut(), PartnerSource::Replay(&p))?;
        if let Some(path) = &a.trace {
            write_event_trace(path, &events)?;
        }
        let closures = events.iter().filter(|e| !e.closed.is_empty()).count();
        println!("steps\t{}", events.len());
        println!("vertices\t{}", t.vertex_count());
        println!("closure_steps\t{closures}");
        println!("genus\t{}", t.genus());
        return Ok(());
    }
    if a.trace.is_some() {
        usage_error("--trace applies to the peeling choosers only");
    }
    if a.algo != Algo::Tiny && (!(a.epsilon > 0.0 && a.epsilon < 0.125) || n < 2) {
        usage_error("pair explorations need epsilon in (0, 1/8) and n >= 2");
    }
    let t = build_triangulation(p.clone())?;
    let mut rng = StdRng::seed_from_u64(seed);
    let m = 6 * n as u32;
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut unconfirmed = 0;
    for _ in 0..a.trials {
        let c1 = CornerRef::new(rng.gen_range(0..m));
        let (kind, outcome) = if a.algo == Algo::Tiny {
            (ExplorationKind::Tiny { c: c1 }, explore_tiny(&p, c1)?)
        } else {
            let c2 = loop {
                let c = CornerRef::new(rng.gen_range(0..m));
                if c.triangle() != c1.triangle() {
                    break c;
                }
            };
            let (d1, d2) = (t.degree(t.corner_vertex(c1)), t.degree(t.corner_vertex(c2)));
            let eps = a.epsilon;
            match (a.algo, Regime::classify(n, d1, d2, eps)) {
                (Algo::Large, Regime::Large) => {
                    (ExplorationKind::Large { c1, c2, eps }, explore_pair_large(&p, c1, c2, eps)?)
                }
                (Algo::Small, Regime::Small) => {
                    (ExplorationKind::Small { c1, c2, eps }, explore_pair_small(&p, c1, c2, eps)?)
                }
                _ => {
                    *counts.entry("not-applicable".into()).or_default() += 1;
                    continue;
                }
            }
        };
        if !verify_outcome(&t, kind, &outcome).confirmed {
            unconfirmed += 1;
        }
        *counts.entry(outcome.status.as_str().into()).or_default() += 1;
    }
    println!("outcome\tcount");
    for s in ExplorationStatus::ALL {
        println!("{}\t{}", s.as_str(), counts.get(s.as_str()).copied().unwrap_or(0));
    }
    if a.algo != Algo::Tiny {
        println!("not-applicable\t{}", counts.get("not-applicable").copied().unwrap_or(0));
    }
    println!("unconfirmed\t{unconfirmed}");
    if unconfirmed > 0 {
        bail!("{unconfirmed} outcomes failed their oracle check");
    }
    Ok(())
}

fn metric(a: &MetricArgs) -> anyhow::Result<()> {
    let params = a.model.params().unwrap_or_else(|e| usage_error(e));
    let p = read_map_file(&a.input)?;
    let t = build_triangulation(p)?;
    let g = build_graph(&t, &params, a.model.sparsification.into());
    if let Some(prefix) = &a.out {
        let edges = prefix.with_extension("edges.csv");
        let nodes = prefix.with_extension("nodes.csv");
        write_graph_csv(&g, &edges, &nodes)?;
    }
    let mode = match a.model.diameter {
        DiameterArg::Exact => DiameterMode::Exact,
        DiameterArg::Sweep => DiameterMode::Sweep {
            sources: DEFAULT_SWEEP_SOURCES,
            seed: resolve_seed(a.seed),
        },
    };
    let report = diameter(&g, mode).context("diameter")?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.verb {
        Verb::Sample(a) => {
            let seed = resolve_seed(a.seed);
            let p = sample_pairing(a.n, seed).unwrap_or_else(|e| usage_error(e));
            write_map_file(&a.out, &p)?;
            let t = build_triangulation(p)?;
            println!(
                "n={} vertices={} genus={} connected={}",
                a.n,
                t.vertex_count(),
                t.genus(),
                t.is_connected()
            );
        }
        Verb::Topology(a) => run_study(&a, stats::topology_study)?,
        Verb::Degrees(a) => run_study(&a, stats::degree_study)?,
        Verb::Scaling(a) => run_study(&a, stats::scaling_study)?,
        Verb::Props(a) => {
            let c = study_config(&a)?;
            if !(a.model.epsilon < 0.125) {
                usage_error("props needs epsilon in (0, 1/8)");
            }
            emit(&stats::proposition_study(&c, a.model.epsilon)?, a.out.as_ref())?;
        }
        Verb::Conjecture(a) => {
            if let Some(n) = a.n.iter().find(|&&n| n % 2 == 0) {
                usage_error(format!("--n {n}: n must be odd for a one-vertex gluing"));
            }
            run_study(&a, stats::conjecture_probe)?;
        }
        Verb::Peel(a) => peel(&a)?,
        Verb::Metric(a) => metric(&a)?,
        Verb::Verify(a) => {
            let results = stats::verify::run_suite(a.quick, resolve_seed(a.seed));
            let mut ok = true;
            for r in &results {
                println!("{}\t{}\t{}", if r.passed { "ok" } else { "FAILED" }, r.name, r.detail);
                ok &= r.passed;
            }
            return Ok(ok);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            if let Some(Error::InvalidArgument(msg)) = e.downcast_ref::<Error>() {
                usage_error(msg);
            }
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
