use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::{
    frequency, mean_se, mix64, quantile, run_trials, DiameterChoice, StudyConfig, StudyReport,
    TrialRow,
};
use crate::cmap::{build_triangulation, sample_pairing, sample_pairing_with, CornerRef, Triangulation};
use crate::error::{Error, Result};
use crate::metric::{
    build_component_graph, diameter, shortest_paths, top_degree_lower_bound, DiameterMode, MetricGraph,
};
use crate::peel::{
    explore_pair_large, explore_pair_small, explore_tiny, oracle_check_tiny, verify_outcome,
    ExplorationKind, ExplorationOutcome, ExplorationStatus,
};

const BASE_COLUMNS: [&str; 9] = ["n", "trial", "seed", "vertices", "genus", "connected", "components", "d1", "d2"];

fn columns(extra: &[&str]) -> Vec<String> {
    BASE_COLUMNS.iter().chain(extra).map(|s| s.to_string()).collect()
}

fn base_row(n: usize, trial: usize, seed: u64, t: &Triangulation) -> TrialRow {
    let mut deg = t.degrees();
    deg.sort_unstable_by(|a, b| b.cmp(a));
    TrialRow {
        n,
        trial,
        seed,
        vertices: t.vertex_count(),
        genus: t.genus(),
        connected: t.is_connected(),
        components: t.components().len(),
        d1: deg.first().copied().unwrap_or(0),
        d2: deg.get(1).copied().unwrap_or(0),
        ..TrialRow::default()
    }
}

fn by_n<'a>(config: &StudyConfig, rows: &'a [TrialRow]) -> Vec<(usize, Vec<&'a TrialRow>)> {
    config
        .ns
        .iter()
        .map(|&n| (n, rows.iter().filter(|r| r.n == n).collect()))
        .collect()
}

fn histogram(values: impl Iterator<Item = usize>) -> Value {
    let mut h: BTreeMap<usize, usize> = BTreeMap::new();
    for v in values {
        *h.entry(v).or_default() += 1;
    }
    Value::Object(h.into_iter().map(|(k, c)| (k.to_string(), json!(c))).collect())
}

fn summary(mut xs: Vec<f64>) -> Value {
    let (mean, se) = mean_se(&xs);
    xs.sort_by(f64::total_cmp);
    json!({
        "mean": mean,
        "se": se,
        "min": quantile(&xs, 0.0),
        "q25": quantile(&xs, 0.25),
        "median": quantile(&xs, 0.5),
        "q75": quantile(&xs, 0.75),
        "max": quantile(&xs, 1.0),
    })
}

fn report(study: &str, cols: Vec<String>, rows: Vec<TrialRow>, aggregates: Value, start: Instant) -> StudyReport {
    StudyReport {
        study: study.into(),
        columns: cols,
        rows,
        aggregates,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

/// Vertex count, genus and connectivity of uniform gluings.
pub fn topology_study(config: &StudyConfig) -> Result<StudyReport> {
    let start = Instant::now();
    let rows = run_trials(config, |n, i, seed| {
        let t = build_triangulation(sample_pairing(n, seed)?)?;
        Ok(base_row(n, i, seed, &t))
    })?;
    let per_n: Vec<Value> = by_n(config, &rows)
        .into_iter()
        .map(|(n, rs)| {
            let k = rs.len();
            let hits = rs.iter().filter(|r| r.vertices == 1).count();
            let (p1, se1) = frequency(hits, k);
            let (pc, sec) = frequency(rs.iter().filter(|r| r.connected).count(), k);
            let (g, seg) = mean_se(&rs.iter().map(|r| r.genus as f64).collect::<Vec<_>>());
            json!({
                "n": n,
                "trials": k,
                "vertex_histogram": histogram(rs.iter().map(|r| r.vertices)),
                "genus_histogram": histogram(rs.iter().map(|r| r.genus)),
                "connected": {"frequency": pc, "se": sec},
                "one_vertex": {
                    "hits": hits,
                    "frequency": p1,
                    "se": se1,
                    "times_3n_over_2": p1 * 1.5 * n as f64,
                },
                "mean_genus": {"mean": g, "se": seg, "over_half_n": g / (n as f64 / 2.0)},
            })
        })
        .collect();
    Ok(report("topology", columns(&[]), rows, json!({ "per_n": per_n }), start))
}

/// Largest two degrees, as fractions of `6n`.
pub fn degree_study(config: &StudyConfig) -> Result<StudyReport> {
    let start = Instant::now();
    let rows = run_trials(config, |n, i, seed| {
        let t = build_triangulation(sample_pairing(n, seed)?)?;
        Ok(base_row(n, i, seed, &t))
    })?;
    let eps = config.params.eps;
    let per_n: Vec<Value> = by_n(config, &rows)
        .into_iter()
        .map(|(n, rs)| {
            let m = 6.0 * n as f64;
            let f1: Vec<f64> = rs.iter().map(|r| r.d1 as f64 / m).collect();
            let f2: Vec<f64> = rs.iter().map(|r| r.d2 as f64 / m).collect();
            let mut d2_over_n: Vec<f64> = rs.iter().map(|r| r.d2 as f64 / n as f64).collect();
            d2_over_n.sort_by(f64::total_cmp);
            // Largest delta with P(D2 >= delta n) >= 1 - eps on this sample.
            let idx = ((eps * rs.len() as f64).floor() as usize).min(rs.len() - 1);
            let delta = d2_over_n[idx];
            let covered = d2_over_n.iter().filter(|&&x| x >= delta).count() as f64 / rs.len() as f64;
            let deciles = |xs: &[f64]| {
                let mut s = xs.to_vec();
                s.sort_by(f64::total_cmp);
                (0..=10).map(|k| quantile(&s, k as f64 / 10.0)).collect::<Vec<_>>()
            };
            json!({
                "n": n,
                "trials": rs.len(),
                "d1_fraction": summary(f1.clone()),
                "d2_fraction": summary(f2.clone()),
                "d1_fraction_deciles": deciles(&f1),
                "d2_fraction_deciles": deciles(&f2),
                "top_two_at_most_one": rs.iter().all(|r| r.d1 + r.d2 <= 6 * n),
                "delta": {"value": delta, "eps": eps, "coverage": covered},
            })
        })
        .collect();
    Ok(report("degrees", columns(&[]), rows, json!({ "per_n": per_n }), start))
}

fn diameter_mode(choice: DiameterChoice, seed: u64) -> DiameterMode {
    match choice {
        DiameterChoice::Exact => DiameterMode::Exact,
        DiameterChoice::Sweep(k) => DiameterMode::Sweep {
            sources: k,
            seed: mix64(seed),
        },
    }
}

/// Every pair of disk centres is at least the sum of their radii apart.
fn centers_separated(g: &MetricGraph) -> Result<bool> {
    let centers: Vec<_> = g.centers().collect();
    for (i, &(v, a)) in centers.iter().enumerate() {
        let dist = shortest_paths(g, a)?;
        for &(w, b) in &centers[i + 1..] {
            if dist[b as usize] < g.radius(v) + g.radius(w) - 1e-9 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Model diameter over `log n`, on the largest component.
pub fn scaling_study(config: &StudyConfig) -> Result<StudyReport> {
    let start = Instant::now();
    let rows = run_trials(config, |n, i, seed| {
        let t = build_triangulation(sample_pairing(n, seed)?)?;
        let mut row = base_row(n, i, seed, &t);
        let comp = t.largest_component();
        let g = build_component_graph(&t, comp, &config.params, config.sparsification);
        let d = diameter(&g, diameter_mode(config.diameter, seed))?.value;
        let degrees: Vec<usize> = g.centers().map(|(v, _)| g.degree(v)).collect();
        let lb = top_degree_lower_bound(&config.params, &degrees);
        row.diameter = Some(d);
        row.diameter_over_log_n = Some(d / (n as f64).ln());
        row.largest_component_only = Some(!t.is_connected());
        row.lower_bound = lb;
        row.lower_bound_ok = Some(lb.map_or(true, |b| d >= b - 1e-9));
        row.separation_ok = Some(centers_separated(&g)?);
        Ok(row)
    })?;
    let groups = by_n(config, &rows);
    let means: Vec<f64> = groups
        .iter()
        .map(|(_, rs)| mean_se(&rs.iter().filter_map(|r| r.diameter_over_log_n).collect::<Vec<_>>()).0)
        .collect();
    let per_n: Vec<Value> = groups
        .iter()
        .map(|(n, rs)| {
            json!({
                "n": n,
                "trials": rs.len(),
                "diameter_over_log_n": summary(rs.iter().filter_map(|r| r.diameter_over_log_n).collect()),
                "flagged_disconnected": rs.iter().filter(|r| r.largest_component_only == Some(true)).count(),
                "lower_bound_violations": rs.iter().filter(|r| r.lower_bound_ok == Some(false)).count(),
                "lower_bound_applicable": rs.iter().filter(|r| r.lower_bound.is_some()).count(),
                "separation_violations": rs.iter().filter(|r| r.separation_ok == Some(false)).count(),
            })
        })
        .collect();
    let increasing = means.windows(2).all(|w| w[1] > w[0]);
    let aggregates = json!({
        "per_n": per_n,
        "mean_diameter_over_log_n": means,
        "increasing_in_n": increasing,
        "diameter_mode": match config.diameter { DiameterChoice::Exact => "exact", DiameterChoice::Sweep(_) => "sweep" },
        "sparsification": config.sparsification.to_string(),
    });
    Ok(report(
        "scaling",
        columns(&[
            "diameter",
            "diameter_over_log_n",
            "largest_component_only",
            "lower_bound",
            "lower_bound_ok",
            "separation_ok",
        ]),
        rows,
        aggregates,
        start,
    ))
}

/// Degree regime of a sampled pair of vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Regime {
    /// `d1 d2 >= n^(1+eps)`.
    Large,
    /// `d1 d2 < n^(1+eps)` and both degrees at least `n^(2eps)`.
    Small,
    /// Some degree below `n^(2eps)`.
    Tiny,
}

impl Regime {
    pub fn classify(n: usize, d1: usize, d2: usize, eps: f64) -> Regime {
        let nf = n as f64;
        if (d1 as f64) * (d2 as f64) >= nf.powf(1.0 + eps) {
            Regime::Large
        } else if (d1.min(d2) as f64) >= nf.powf(2.0 * eps) {
            Regime::Small
        } else {
            Regime::Tiny
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Large => "large",
            Regime::Small => "small",
            Regime::Tiny => "tiny",
        }
    }
}

const EXPLORATIONS: [&str; 3] = ["large", "small", "tiny"];

/// Corner pairs drawn per trial while looking for a pair in each regime.
pub const MAX_PAIR_DRAWS: usize = 10_000;

/// Outcome label of a regime with no qualifying pair in a trial.
pub const NOT_APPLICABLE: &str = "not-applicable";

/// For each trial: the first uniform corner pair (on distinct faces) in the
/// large regime and the first in the small regime, each explored with its
/// algorithm, plus the tiny-vertex exploration from a uniform corner. Every
/// outcome is re-checked on the finished map.
pub fn proposition_study(config: &StudyConfig, eps: f64) -> Result<StudyReport> {
    if !(eps > 0.0 && eps < 0.125) {
        return Err(Error::invalid(format!("epsilon must lie in (0, 1/8), got {eps}")));
    }
    let start = Instant::now();
    let rows = run_trials(config, |n, i, seed| {
        if n < 2 {
            return Err(Error::invalid("proposition study needs n >= 2"));
        }
        let p = sample_pairing(n, seed)?;
        let t = build_triangulation(p.clone())?;
        let mut row = base_row(n, i, seed, &t);
        let mut rng = ChaCha8Rng::seed_from_u64(mix64(seed ^ 0x5052_4f50));
        let m = 6 * n as u32;
        let c = CornerRef::new(rng.gen_range(0..m));
        let mut large = None;
        let mut small = None;
        for _ in 0..MAX_PAIR_DRAWS {
            if large.is_some() && small.is_some() {
                break;
            }
            let c1 = CornerRef::new(rng.gen_range(0..m));
            let c2 = CornerRef::new(rng.gen_range(0..m));
            if c1.triangle() == c2.triangle() {
                continue;
            }
            let d1 = t.degree(t.corner_vertex(c1));
            let d2 = t.degree(t.corner_vertex(c2));
            match Regime::classify(n, d1, d2, eps) {
                Regime::Large if large.is_none() => large = Some((c1, c2)),
                Regime::Small if small.is_none() => small = Some((c1, c2)),
                _ => {}
            }
        }
        let record = |kind: ExplorationKind, out: &ExplorationOutcome| {
            (Some(out.status.as_str().to_string()), Some(verify_outcome(&t, kind, out).confirmed))
        };
        (row.large_outcome, row.large_verified) = match large {
            Some((c1, c2)) => record(ExplorationKind::Large { c1, c2, eps }, &explore_pair_large(&p, c1, c2, eps)?),
            None => (Some(NOT_APPLICABLE.into()), None),
        };
        (row.small_outcome, row.small_verified) = match small {
            Some((c1, c2)) => record(ExplorationKind::Small { c1, c2, eps }, &explore_pair_small(&p, c1, c2, eps)?),
            None => (Some(NOT_APPLICABLE.into()), None),
        };
        (row.tiny_outcome, row.tiny_verified) = record(ExplorationKind::Tiny { c }, &explore_tiny(&p, c)?);
        row.hub_within_6 = Some(oracle_check_tiny(&t, t.corner_vertex(c)).satisfied);
        Ok(row)
    })?;
    let per_n: Vec<Value> = by_n(config, &rows)
        .into_iter()
        .map(|(n, rs)| {
            let mut explorations = serde_json::Map::new();
            for name in EXPLORATIONS {
                let column = |r: &TrialRow| match name {
                    "large" => (r.large_outcome.clone(), r.large_verified),
                    "small" => (r.small_outcome.clone(), r.small_verified),
                    _ => (r.tiny_outcome.clone(), r.tiny_verified),
                };
                let out: Vec<(String, bool)> = rs
                    .iter()
                    .map(|r| column(r))
                    .filter_map(|(o, v)| Some((o?, v?)))
                    .collect();
                let count = |s: ExplorationStatus| out.iter().filter(|(o, _)| o == s.as_str()).count();
                let statuses: serde_json::Map<String, Value> =
                    ExplorationStatus::ALL.iter().map(|&s| (s.as_str().to_string(), json!(count(s)))).collect();
                let successes: usize = ExplorationStatus::ALL.iter().filter(|s| s.is_success()).map(|&s| count(s)).sum();
                let (fail, fail_se) = frequency(count(ExplorationStatus::Fail), out.len());
                explorations.insert(
                    name.into(),
                    json!({
                        "runs": out.len(),
                        "not_applicable": rs.len() - out.len(),
                        "statuses": statuses,
                        "successes": successes,
                        "unconfirmed": out.iter().filter(|(_, ok)| !ok).count(),
                        "fail_fraction": {"value": fail, "se": fail_se},
                    }),
                );
            }
            let (hub, hub_se) = frequency(rs.iter().filter(|r| r.hub_within_6 == Some(true)).count(), rs.len());
            json!({
                "n": n,
                "trials": rs.len(),
                "explorations": explorations,
                "hub_within_6": {"fraction": hub, "se": hub_se},
            })
        })
        .collect();
    let unconfirmed = rows
        .iter()
        .flat_map(|r| [r.large_verified, r.small_verified, r.tiny_verified])
        .filter(|v| *v == Some(false))
        .count();
    Ok(report(
        "props",
        columns(&[
            "large_outcome",
            "large_verified",
            "small_outcome",
            "small_verified",
            "tiny_outcome",
            "tiny_verified",
            "hub_within_6",
        ]),
        rows,
        json!({ "eps": eps, "per_n": per_n, "unconfirmed_outcomes": unconfirmed }),
        start,
    ))
}

/// Attempts allowed per accepted one-vertex sample.
const CONJECTURE_ATTEMPT_CAP: u64 = 10_000_000;

/// Diameter of one-vertex gluings, by rejection sampling. Exploratory.
pub fn conjecture_probe(config: &StudyConfig) -> Result<StudyReport> {
    if let Some(n) = config.ns.iter().find(|&&n| n % 2 == 0) {
        return Err(Error::invalid(format!(
            "n = {n} is even; a single vertex needs odd n"
        )));
    }
    let start = Instant::now();
    let rows = run_trials(config, |n, i, seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut attempts = 0u64;
        let t = loop {
            attempts += 1;
            if attempts > CONJECTURE_ATTEMPT_CAP {
                return Err(Error::InvalidState(format!("no one-vertex sample at n = {n} after {CONJECTURE_ATTEMPT_CAP} attempts")));
            }
            let t = build_triangulation(sample_pairing_with(n, &mut rng))?;
            if t.vertex_count() == 1 {
                break t;
            }
        };
        let mut row = base_row(n, i, seed, &t);
        let g = build_component_graph(&t, 0, &config.params, config.sparsification);
        let d = diameter(&g, diameter_mode(config.diameter, seed))?.value;
        row.diameter = Some(d);
        row.diameter_over_log_n = Some(d / (n as f64).ln());
        row.attempts = Some(attempts);
        Ok(row)
    })?;
    let per_n: Vec<Value> = by_n(config, &rows)
        .into_iter()
        .map(|(n, rs)| {
            let attempts: Vec<f64> = rs.iter().filter_map(|r| r.attempts).map(|a| a as f64).collect();
            json!({
                "n": n,
                "trials": rs.len(),
                "diameter_over_log_n": summary(rs.iter().filter_map(|r| r.diameter_over_log_n).collect()),
                "attempts": summary(attempts.clone()),
                "attempts_over_3n_over_2": mean_se(&attempts).0 / (1.5 * n as f64),
                "all_one_vertex_genus_half": rs.iter().all(|r| r.vertices == 1 && r.genus == (n + 1) / 2),
            })
        })
        .collect();
    Ok(report(
        "conjecture",
        columns(&["diameter", "diameter_over_log_n", "attempts"]),
        rows,
        json!({ "per_n": per_n }),
        start,
    ))
}
