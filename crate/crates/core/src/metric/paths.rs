use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{MetricGraph, NodeKind};
use crate::error::{Error, Result};

/// Largest graph the exact diameter accepts.
pub const EXACT_NODE_LIMIT: usize = 50_000;

/// Farthest-point rounds per sweep source.
const SWEEP_ROUNDS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reach {
    Distance(f64),
    Unreachable,
}

impl Reach {
    pub fn distance(self) -> Option<f64> {
        match self {
            Reach::Distance(d) => Some(d),
            Reach::Unreachable => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiameterMode {
    Exact,
    /// Farthest-point sweeps from the `sources` largest disks and `sources`
    /// random corners.
    Sweep { sources: usize, seed: u64 },
}

impl DiameterMode {
    pub fn name(&self) -> &'static str {
        match self {
            DiameterMode::Exact => "exact",
            DiameterMode::Sweep { .. } => "sweep",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiameterReport {
    pub value: f64,
    pub endpoints: (u32, u32),
    pub mode: String,
    /// Set in sweep mode: `value` is only a lower bound.
    pub lower_bound_only: bool,
    /// Single-source computations performed.
    pub sweep_iterations: usize,
    /// `(node, eccentricity)` for every source that was expanded.
    pub eccentricities: Vec<(u32, f64)>,
}

#[derive(PartialEq)]
struct Item(f64, u32);

impl Eq for Item {}

impl Ord for Item {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn check_node(g: &MetricGraph, a: u32) -> Result<()> {
    if a as usize >= g.node_count() {
        return Err(Error::invalid(format!("node {a} not in graph")));
    }
    Ok(())
}

fn dijkstra(g: &MetricGraph, source: u32, target: Option<u32>, dist: &mut [f64]) {
    dist.fill(f64::INFINITY);
    dist[source as usize] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Item(0.0, source));
    while let Some(Item(d, u)) = heap.pop() {
        if d > dist[u as usize] {
            continue;
        }
        if Some(u) == target {
            return;
        }
        for (v, w) in g.neighbors(u) {
            let nd = d + w;
            if nd < dist[v as usize] {
                dist[v as usize] = nd;
                heap.push(Item(nd, v));
            }
        }
    }
}

/// Distances from `source` to every node; unreachable nodes get infinity.
pub fn shortest_paths(g: &MetricGraph, source: u32) -> Result<Vec<f64>> {
    check_node(g, source)?;
    let mut dist = vec![0.0; g.node_count()];
    dijkstra(g, source, None, &mut dist);
    Ok(dist)
}

pub fn shortest_distance(g: &MetricGraph, a: u32, b: u32) -> Result<Reach> {
    check_node(g, a)?;
    check_node(g, b)?;
    let mut dist = vec![0.0; g.node_count()];
    dijkstra(g, a, Some(b), &mut dist);
    let d = dist[b as usize];
    Ok(if d.is_finite() { Reach::Distance(d) } else { Reach::Unreachable })
}

/// Largest finite distance from `a`, with the smallest node attaining it.
fn farthest(dist: &[f64]) -> (f64, u32) {
    let mut best = (0.0, 0u32);
    for (v, &d) in dist.iter().enumerate() {
        if d.is_finite() && d > best.0 {
            best = (d, v as u32);
        }
    }
    best
}

/// Eccentricity of `a` over the nodes it reaches, and a farthest node.
pub fn eccentricity(g: &MetricGraph, a: u32) -> Result<(f64, u32)> {
    let dist = shortest_paths(g, a)?;
    let (e, v) = farthest(&dist);
    Ok(if e == 0.0 { (0.0, a) } else { (e, v) })
}

pub fn diameter(g: &MetricGraph, mode: DiameterMode) -> Result<DiameterReport> {
    if g.node_count() == 0 {
        return Err(Error::invalid("empty graph"));
    }
    match mode {
        DiameterMode::Exact => exact_diameter(g),
        DiameterMode::Sweep { sources, seed } => sweep_diameter(g, sources, seed),
    }
}

/// Exact diameter by eccentricity bounds: every single-source run tightens
/// lower and upper bounds on all other eccentricities, and nodes whose
/// upper bound cannot beat the best value found are dropped.
fn exact_diameter(g: &MetricGraph) -> Result<DiameterReport> {
    let n = g.node_count();
    if n > EXACT_NODE_LIMIT {
        return Err(Error::SizeGuard(format!(
            "exact diameter refused for {n} nodes (limit {EXACT_NODE_LIMIT})"
        )));
    }
    let mut lower = vec![0.0f64; n];
    let mut upper = vec![f64::INFINITY; n];
    let mut active: Vec<u32> = (0..n as u32).collect();
    let mut dist = vec![0.0; n];
    let mut best = (0.0f64, (0u32, 0u32));
    let mut eccs = Vec::new();
    let mut pick_high = true;
    while !active.is_empty() {
        let idx = if pick_high {
            (0..active.len())
                .max_by(|&i, &j| {
                    upper[active[i] as usize]
                        .total_cmp(&upper[active[j] as usize])
                        .then_with(|| active[j].cmp(&active[i]))
                })
                .unwrap()
        } else {
            (0..active.len())
                .min_by(|&i, &j| {
                    lower[active[i] as usize]
                        .total_cmp(&lower[active[j] as usize])
                        .then_with(|| active[i].cmp(&active[j]))
                })
                .unwrap()
        };
        pick_high = !pick_high;
        let v = active.swap_remove(idx);
        dijkstra(g, v, None, &mut dist);
        if dist.iter().any(|d| !d.is_finite()) {
            return Err(Error::InvalidState("graph is disconnected".into()));
        }
        let (e, far) = farthest(&dist);
        eccs.push((v, e));
        if e > best.0 {
            best = (e, (v.min(far), v.max(far)));
        }
        active.retain(|&w| {
            let dw = dist[w as usize];
            let lo = &mut lower[w as usize];
            *lo = lo.max(dw).max(e - dw);
            let up = &mut upper[w as usize];
            *up = up.min(e + dw);
            *up > best.0
        });
    }
    Ok(DiameterReport {
        value: best.0,
        endpoints: best.1,
        mode: "exact".into(),
        lower_bound_only: false,
        sweep_iterations: eccs.len(),
        eccentricities: eccs,
    })
}

fn sweep_diameter(g: &MetricGraph, k: usize, seed: u64) -> Result<DiameterReport> {
    let n = g.node_count();
    let mut centers: Vec<(usize, u32)> = g.centers().map(|(v, node)| (g.degree(v), node)).collect();
    centers.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut sources: Vec<u32> = centers.iter().take(k).map(|&(_, node)| node).collect();
    let corners: Vec<u32> = (0..n as u32)
        .filter(|&u| matches!(g.kind(u), NodeKind::Corner(_)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in sample(&mut rng, corners.len(), k.min(corners.len())) {
        sources.push(corners[i]);
    }
    let mut dist = vec![0.0; n];
    let mut done = vec![false; n];
    let mut best = (0.0f64, (sources[0], sources[0]));
    let mut eccs = Vec::new();
    for s in sources {
        let mut cur = s;
        for _ in 0..SWEEP_ROUNDS {
            if done[cur as usize] {
                break;
            }
            done[cur as usize] = true;
            dijkstra(g, cur, None, &mut dist);
            let (e, far) = farthest(&dist);
            eccs.push((cur, e));
            if e > best.0 {
                best = (e, (cur.min(far), cur.max(far)));
            }
            cur = far;
        }
    }
    Ok(DiameterReport {
        value: best.0,
        endpoints: best.1,
        mode: "sweep".into(),
        lower_bound_only: true,
        sweep_iterations: eccs.len(),
        eccentricities: eccs,
    })
}
