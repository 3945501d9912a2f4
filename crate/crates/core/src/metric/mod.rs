//! Disk-gluing model of the compactified metric: every vertex becomes a
//! hyperbolic disk whose radius grows like `log(alpha * degree)`, with one
//! boundary node per corner, and the three corners of each face are joined
//! at a fixed cost.

mod dump;
mod paths;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cmap::{CornerRef, Triangulation, VertexId};
use crate::error::{Error, Result};

pub use dump::{encode_edges_csv, encode_nodes_csv, write_graph_csv};
pub use paths::{
    diameter, eccentricity, shortest_distance, shortest_paths, DiameterMode, DiameterReport, Reach,
    EXACT_NODE_LIMIT,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub eps: f64,
    /// Horocycle length.
    pub l: f64,
    /// Radius of the balls around small cusps.
    pub r: f64,
    pub alpha: f64,
    /// Smallest disk radius.
    pub rho0: f64,
    /// Cost of crossing a face between two of its corners.
    pub c_face: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamOverrides {
    pub alpha: Option<f64>,
    pub rho0: Option<f64>,
    pub c_face: Option<f64>,
}

/// `R = (1+eps)^(3/2) * ln((e^(2pi/L) + 1) / (e^(2pi/L) - 1))`.
pub fn ball_radius(eps: f64, l: f64) -> f64 {
    let x = (2.0 * PI / l).exp();
    (1.0 + eps).powf(1.5) * ((x + 1.0) / (x - 1.0)).ln()
}

pub fn derive_params(eps: f64, l: f64, overrides: ParamOverrides) -> Result<ModelParams> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid(format!("epsilon must lie in (0, 1), got {eps}")));
    }
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::invalid(format!("L must be positive, got {l}")));
    }
    let r = ball_radius(eps, l);
    let alpha = overrides.alpha.unwrap_or((1.0f64).min(1.0 / (2.0 * l)));
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let rho0 = overrides.rho0.unwrap_or(r);
    if !(rho0 >= 0.0 && rho0.is_finite()) {
        return Err(Error::invalid(format!("rho0 must be nonnegative, got {rho0}")));
    }
    let c_face = overrides.c_face.unwrap_or(4.0 * r + 2.0);
    if !(c_face > 0.0 && c_face.is_finite()) {
        return Err(Error::invalid(format!("c_face must be positive, got {c_face}")));
    }
    Ok(ModelParams {
        eps,
        l,
        r,
        alpha,
        rho0,
        c_face,
    })
}

impl ModelParams {
    /// Disk radius of a vertex of degree `d`: `max(ln(alpha d), rho0)`.
    pub fn disk_radius(&self, d: usize) -> f64 {
        (self.alpha * d as f64).ln().max(self.rho0)
    }
}

/// Distance between points at radii `r1`, `r2` from a common centre,
/// separated by angle `theta`.
pub fn hyp_chord(r1: f64, r2: f64, theta: f64) -> Result<f64> {
    if r1 < 0.0 || r2 < 0.0 || r1.is_nan() || r2.is_nan() {
        return Err(Error::invalid(format!("negative radius ({r1}, {r2})")));
    }
    let theta = theta.rem_euclid(2.0 * PI);
    let theta = theta.min(2.0 * PI - theta);
    // cosh d = cosh(r1 - r2) + 2 sinh r1 sinh r2 sin^2(theta/2), rewritten
    // through sinh^2(d/2) to keep small distances accurate.
    let a = ((r1 - r2) / 2.0).sinh();
    let s = (theta / 2.0).sin();
    let q = a * a + r1.sinh() * r2.sinh() * s * s;
    Ok(2.0 * q.sqrt().asinh())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sparsification {
    /// Every pair of corners of a disk is joined.
    Dense,
    /// Each corner is joined to the corners at gaps 1, 2, 4, ... below d/2.
    Dyadic,
}

impl std::str::FromStr for Sparsification {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(Sparsification::Dense),
            "dyadic" => Ok(Sparsification::Dyadic),
            other => Err(Error::invalid(format!("unknown sparsification `{other}`"))),
        }
    }
}

impl std::fmt::Display for Sparsification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sparsification::Dense => "dense",
            Sparsification::Dyadic => "dyadic",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeKind {
    Corner(CornerRef),
    Center(VertexId),
}

/// Weighted undirected graph in adjacency-array form.
#[derive(Debug, Clone)]
pub struct MetricGraph {
    kinds: Vec<NodeKind>,
    /// Vertex and angle of every node (angle 0 for centres).
    vertex: Vec<u32>,
    angle: Vec<f64>,
    offsets: Vec<u32>,
    targets: Vec<u32>,
    weights: Vec<f64>,
    center_node: Vec<u32>,
    corner_node: Vec<u32>,
    radii: Vec<f64>,
    degrees: Vec<usize>,
    sparsification: Sparsification,
}

const ABSENT: u32 = u32::MAX;

impl MetricGraph {
    pub fn node_count(&self) -> usize {
        self.kinds.len()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn kind(&self, node: u32) -> NodeKind {
        self.kinds[node as usize]
    }

    pub fn node_vertex(&self, node: u32) -> VertexId {
        VertexId(self.vertex[node as usize])
    }

    pub fn node_angle(&self, node: u32) -> f64 {
        self.angle[node as usize]
    }

    pub fn neighbors(&self, node: u32) -> impl Iterator<Item = (u32, f64)> + '_ {
        let (s, e) = (self.offsets[node as usize] as usize, self.offsets[node as usize + 1] as usize);
        self.targets[s..e].iter().copied().zip(self.weights[s..e].iter().copied())
    }

    /// Node of a vertex centre, if the vertex is part of the graph.
    pub fn center(&self, v: VertexId) -> Option<u32> {
        let x = *self.center_node.get(v.0 as usize)?;
        (x != ABSENT).then_some(x)
    }

    pub fn corner(&self, c: CornerRef) -> Option<u32> {
        let x = *self.corner_node.get(c.0.index())?;
        (x != ABSENT).then_some(x)
    }

    /// Disk radius of vertex `v` (indexed over the whole triangulation).
    pub fn radius(&self, v: VertexId) -> f64 {
        self.radii[v.0 as usize]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.degrees[v.0 as usize]
    }

    /// Centre nodes present in the graph, with their vertex.
    pub fn centers(&self) -> impl Iterator<Item = (VertexId, u32)> + '_ {
        self.center_node
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != ABSENT)
            .map(|(v, &x)| (VertexId(v as u32), x))
    }

    pub fn sparsification(&self) -> Sparsification {
        self.sparsification
    }

    /// Every edge once, as `(u, v, weight)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        (0..self.node_count() as u32).flat_map(move |u| {
            self.neighbors(u)
                .filter(move |&(v, _)| u < v)
                .map(move |(v, w)| (u, v, w))
        })
    }
}

/// Model graph of the whole triangulation. Node `h < 6n` is the corner of
/// half-edge `h`; node `6n + j` is the centre of vertex `j`.
pub fn build_graph(t: &Triangulation, params: &ModelParams, sp: Sparsification) -> MetricGraph {
    build_graph_filtered(t, params, sp, None)
}

/// Model graph of one component; nodes are renumbered densely, corners
/// first in half-edge order, then centres in vertex order.
pub fn build_component_graph(
    t: &Triangulation,
    component: usize,
    params: &ModelParams,
    sp: Sparsification,
) -> MetricGraph {
    build_graph_filtered(t, params, sp, Some(component))
}

fn build_graph_filtered(
    t: &Triangulation,
    params: &ModelParams,
    sp: Sparsification,
    component: Option<usize>,
) -> MetricGraph {
    let m = 6 * t.n();
    let keep_vertex = |v: usize| component.map_or(true, |c| t.component_of_vertex(VertexId(v as u32)) == c);
    let degrees = t.degrees();
    let radii: Vec<f64> = degrees.iter().map(|&d| params.disk_radius(d)).collect();

    let mut kinds = Vec::new();
    let mut vertex = Vec::new();
    let mut angle = Vec::new();
    let mut corner_node = vec![ABSENT; m];
    let mut center_node = vec![ABSENT; t.vertex_count()];
    for h in 0..m as u32 {
        let c = CornerRef::new(h);
        let v = t.corner_vertex(c);
        if !keep_vertex(v.0 as usize) {
            continue;
        }
        corner_node[h as usize] = kinds.len() as u32;
        kinds.push(NodeKind::Corner(c));
        vertex.push(v.0);
        angle.push(2.0 * PI * t.orbit_position(c) as f64 / degrees[v.0 as usize] as f64);
    }
    for v in 0..t.vertex_count() {
        if !keep_vertex(v) {
            continue;
        }
        center_node[v] = kinds.len() as u32;
        kinds.push(NodeKind::Center(VertexId(v as u32)));
        vertex.push(v as u32);
        angle.push(0.0);
    }

    let mut edges: Vec<(u32, u32, f64)> = Vec::new();
    for (v, orbit) in t.orbits().iter().enumerate() {
        if !keep_vertex(v) {
            continue;
        }
        let d = orbit.len();
        let r = radii[v];
        let center = center_node[v];
        let node = |k: usize| corner_node[orbit[k % d] as usize];
        for k in 0..d {
            edges.push((center, node(k), r));
        }
        let gaps: Vec<usize> = match sp {
            Sparsification::Dense => (1..=d / 2).collect(),
            Sparsification::Dyadic => {
                let mut g = vec![1];
                let mut p = 2;
                while 2 * p < d {
                    g.push(p);
                    p *= 2;
                }
                g
            }
        };
        for &g in &gaps {
            if g >= d {
                continue;
            }
            let w = hyp_chord(r, r, 2.0 * PI * g as f64 / d as f64).expect("radius is nonnegative");
            for k in 0..d {
                // Gap g and gap d-g join the same pairs; keep one copy.
                if g < d - g || (2 * g == d && k < g) {
                    edges.push((node(k), node(k + g), w));
                }
            }
        }
    }
    for f in 0..2 * t.n() as u32 {
        let ns = [3 * f, 3 * f + 1, 3 * f + 2].map(|h| corner_node[h as usize]);
        if ns[0] == ABSENT {
            continue;
        }
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            edges.push((ns[i], ns[j], params.c_face));
        }
    }

    let nodes = kinds.len();
    let mut counts = vec![0u32; nodes + 1];
    for &(u, v, _) in &edges {
        counts[u as usize + 1] += 1;
        counts[v as usize + 1] += 1;
    }
    for i in 0..nodes {
        counts[i + 1] += counts[i];
    }
    let offsets = counts.clone();
    let mut fill = counts;
    let mut targets = vec![0u32; 2 * edges.len()];
    let mut weights = vec![0f64; 2 * edges.len()];
    for &(u, v, w) in &edges {
        for (a, b) in [(u, v), (v, u)] {
            let slot = fill[a as usize] as usize;
            targets[slot] = b;
            weights[slot] = w;
            fill[a as usize] += 1;
        }
    }

    MetricGraph {
        kinds,
        vertex,
        angle,
        offsets,
        targets,
        weights,
        center_node,
        corner_node,
        radii,
        degrees,
        sparsification: sp,
    }
}

/// `(1 - eps)(ln(alpha D1) + ln(alpha D2)) - 4R` for the two largest
/// degrees, or `None` when either logarithm is not positive.
pub fn top_degree_lower_bound(params: &ModelParams, degrees: &[usize]) -> Option<f64> {
    let mut top: Vec<usize> = degrees.to_vec();
    top.sort_unstable_by(|a, b| b.cmp(a));
    if top.len() < 2 {
        return None;
    }
    let (a, b) = ((params.alpha * top[0] as f64).ln(), (params.alpha * top[1] as f64).ln());
    (a > 0.0 && b > 0.0).then(|| (1.0 - params.eps) * (a + b) - 4.0 * params.r)
}
