//! Brute-force checks on the finished triangulation, independent of the
//! peeling engine.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::explore::{
    large_step_budgets, small_witness_bound, tiny_threshold, ExplorationOutcome, ExplorationStatus, Witness,
};
use crate::cmap::{corner_distance, CornerRef, Triangulation, VertexId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LargeReport {
    /// `(face, c1', c2', d(c1, c1'), d(c2, c2'))` minimising the larger of
    /// the two distances relative to its bound.
    pub best: Option<(u32, CornerRef, CornerRef, usize, usize)>,
    pub bounds: (f64, f64),
    pub within_bounds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallReport {
    pub shared_face: Option<u32>,
    /// `(v', c1', c2', d(c1', c2'))` with the smallest distance.
    pub intermediate: Option<(VertexId, CornerRef, CornerRef, usize)>,
    pub bound: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TinyReport {
    /// Largest degree within graph distance 6.
    pub max_degree: usize,
    /// Closest vertex of degree at least `n^(1/4)`, with its distance.
    pub hub: Option<(VertexId, usize)>,
    pub satisfied: bool,
}

/// Which exploration produced an outcome, with its inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExplorationKind {
    Large { c1: CornerRef, c2: CornerRef, eps: f64 },
    Small { c1: CornerRef, c2: CornerRef, eps: f64 },
    Tiny { c: CornerRef },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub confirmed: bool,
    pub message: String,
}

impl WitnessReport {
    fn ok() -> Self {
        WitnessReport {
            confirmed: true,
            message: String::new(),
        }
    }

    fn bad(msg: impl Into<String>) -> Self {
        WitnessReport {
            confirmed: false,
            message: msg.into(),
        }
    }
}

fn face_corner_at(t: &Triangulation, face: u32, v: VertexId) -> impl Iterator<Item = CornerRef> + '_ {
    (0..3)
        .map(move |k| CornerRef::new(3 * face + k))
        .filter(move |&c| t.corner_vertex(c) == v)
}

fn dist(t: &Triangulation, a: CornerRef, b: CornerRef) -> usize {
    corner_distance(t, a, b).expect("corners on one vertex")
}

pub fn oracle_check_large(t: &Triangulation, c1: CornerRef, c2: CornerRef, eps: f64) -> LargeReport {
    let v1 = t.corner_vertex(c1);
    let v2 = t.corner_vertex(c2);
    let (l1, l2) = large_step_budgets(t.n(), t.degree(v1), t.degree(v2), eps);
    let bounds = (3.0 * l1, 3.0 * l2);
    let mut best: Option<(f64, (u32, CornerRef, CornerRef, usize, usize))> = None;
    for p1 in t.corners_of(v1) {
        let face = p1.triangle();
        for p2 in face_corner_at(t, face, v2) {
            let (d1, d2) = (dist(t, c1, p1), dist(t, c2, p2));
            let score = (d1 as f64 / bounds.0).max(d2 as f64 / bounds.1);
            if best.as_ref().map_or(true, |(s, _)| score < *s) {
                best = Some((score, (face, p1, p2, d1, d2)));
            }
        }
    }
    LargeReport {
        within_bounds: best.as_ref().is_some_and(|(s, _)| *s <= 1.0),
        best: best.map(|(_, b)| b),
        bounds,
    }
}

/// Closest pair of positions `(a, b)` on a cycle of length `marks.len()`
/// with `a` marked in the first flag and `b` in the second, as
/// `(distance, a, b)`.
fn closest_marked(marks: &[(bool, bool)]) -> Option<(usize, usize, usize)> {
    let d = marks.len();
    let a_pos: Vec<usize> = (0..d).filter(|&k| marks[k].0).collect();
    if a_pos.is_empty() {
        return None;
    }
    let mut best: Option<(usize, usize, usize)> = None;
    for b in (0..d).filter(|&k| marks[k].1) {
        let i = a_pos.partition_point(|&x| x < b);
        for a in [a_pos[i % a_pos.len()], a_pos[(i + a_pos.len() - 1) % a_pos.len()]] {
            let raw = (b + d - a) % d;
            let dd = raw.min(d - raw);
            if best.map_or(true, |(bd, _, _)| dd < bd) {
                best = Some((dd, a, b));
            }
        }
    }
    best
}

pub fn oracle_check_small(t: &Triangulation, v1: VertexId, v2: VertexId, eps: f64) -> SmallReport {
    let (d1, d2) = (t.degree(v1), t.degree(v2));
    let bound = small_witness_bound(t.n(), d1, d2, eps);
    let faces = 2 * t.n();
    let mut touches = vec![(false, false); faces];
    for c in t.corners_of(v1) {
        touches[c.triangle() as usize].0 = true;
    }
    for c in t.corners_of(v2) {
        touches[c.triangle() as usize].1 = true;
    }
    let shared_face = (0..faces as u32).find(|&f| {
        let (a, b) = touches[f as usize];
        a && b
    });
    let mut intermediate: Option<(VertexId, CornerRef, CornerRef, usize)> = None;
    for (vi, orbit) in t.orbits().iter().enumerate() {
        let marks: Vec<(bool, bool)> = orbit.iter().map(|&h| touches[(h / 3) as usize]).collect();
        if let Some((dd, a, b)) = closest_marked(&marks) {
            if intermediate.map_or(true, |(_, _, _, bd)| dd < bd) {
                intermediate = Some((
                    VertexId(vi as u32),
                    CornerRef::new(orbit[a]),
                    CornerRef::new(orbit[b]),
                    dd,
                ));
            }
        }
    }
    SmallReport {
        satisfied: shared_face.is_some() || intermediate.is_some_and(|(_, _, _, d)| d as f64 <= bound),
        shared_face,
        intermediate,
        bound,
    }
}

/// Breadth-first distances on the vertex graph, cut at `radius`.
fn bfs(t: &Triangulation, adj: &[Vec<u32>], v: VertexId, radius: usize) -> Vec<usize> {
    let mut d = vec![usize::MAX; t.vertex_count()];
    d[v.0 as usize] = 0;
    let mut q = VecDeque::from([v.0]);
    while let Some(x) = q.pop_front() {
        let dx = d[x as usize];
        if dx == radius {
            continue;
        }
        for &y in &adj[x as usize] {
            if d[y as usize] == usize::MAX {
                d[y as usize] = dx + 1;
                q.push_back(y);
            }
        }
    }
    d
}

pub fn oracle_check_tiny(t: &Triangulation, v: VertexId) -> TinyReport {
    oracle_check_tiny_with(t, &t.vertex_adjacency(), v)
}

/// As [`oracle_check_tiny`] with a precomputed vertex adjacency.
pub fn oracle_check_tiny_with(t: &Triangulation, adj: &[Vec<u32>], v: VertexId) -> TinyReport {
    let threshold = tiny_threshold(t.n());
    let d = bfs(t, adj, v, 6);
    let mut max_degree = 0;
    let mut hub: Option<(VertexId, usize)> = None;
    for (u, &du) in d.iter().enumerate() {
        if du == usize::MAX {
            continue;
        }
        let deg = t.degree(VertexId(u as u32));
        max_degree = max_degree.max(deg);
        if deg as f64 >= threshold && hub.map_or(true, |(_, hd)| du < hd) {
            hub = Some((VertexId(u as u32), du));
        }
    }
    TinyReport {
        max_degree,
        satisfied: hub.is_some(),
        hub,
    }
}

/// Re-derives a claimed witness on the full triangulation.
pub fn verify_outcome(t: &Triangulation, kind: ExplorationKind, outcome: &ExplorationOutcome) -> WitnessReport {
    use ExplorationStatus as S;
    match (kind, outcome.status, outcome.witness.as_ref()) {
        (_, S::Fail | S::DegreeMismatch, None) => WitnessReport::ok(),
        (_, S::Fail | S::DegreeMismatch, Some(_)) => WitnessReport::bad("witness on a non-success"),
        (
            ExplorationKind::Large { c1, c2, eps },
            S::SuccessFaceWitness,
            Some(&Witness::SharedFace {
                face,
                corner1,
                corner2,
                distances: Some((r1, r2)),
            }),
        ) => {
            if corner1.triangle() != face || corner2.triangle() != face {
                return WitnessReport::bad("corners not on the reported face");
            }
            if t.corner_vertex(corner1) != t.corner_vertex(c1) || t.corner_vertex(corner2) != t.corner_vertex(c2) {
                return WitnessReport::bad("face corners not on the two vertices");
            }
            let (l1, l2) = large_step_budgets(t.n(), outcome.degrees.0, outcome.degrees.1, eps);
            let (e1, e2) = (dist(t, c1, corner1), dist(t, c2, corner2));
            if e1 > r1 || e2 > r2 {
                return WitnessReport::bad(format!("reported distances ({r1}, {r2}) below true ({e1}, {e2})"));
            }
            if e1 as f64 > 3.0 * l1 || e2 as f64 > 3.0 * l2 {
                return WitnessReport::bad(format!(
                    "distances ({e1}, {e2}) exceed bounds ({:.2}, {:.2})",
                    3.0 * l1,
                    3.0 * l2
                ));
            }
            if !oracle_check_large(t, c1, c2, eps).within_bounds {
                return WitnessReport::bad("brute force finds no face within bounds");
            }
            WitnessReport::ok()
        }
        (ExplorationKind::Large { c1, c2, .. }, S::SuccessClosure, None) => {
            let cap = 3 * (outcome.steps + 1);
            let (d1, d2) = (t.degree(t.corner_vertex(c1)), t.degree(t.corner_vertex(c2)));
            if d1.min(d2) > cap {
                return WitnessReport::bad(format!("closure after {} steps but degrees ({d1}, {d2})", outcome.steps));
            }
            WitnessReport::ok()
        }
        (
            ExplorationKind::Small { c1, c2, .. },
            S::SuccessFaceWitness,
            Some(&Witness::SharedFace { face, corner1, corner2, .. }),
        ) => {
            let (v1, v2) = (t.corner_vertex(c1), t.corner_vertex(c2));
            if corner1.triangle() != face || corner2.triangle() != face {
                return WitnessReport::bad("corners not on the reported face");
            }
            if t.corner_vertex(corner1) != v1 || t.corner_vertex(corner2) != v2 {
                return WitnessReport::bad(format!("face {face} does not touch both vertices"));
            }
            WitnessReport::ok()
        }
        (
            ExplorationKind::Small { c1, c2, eps },
            S::SuccessWitness,
            Some(&Witness::Intermediate {
                corner1,
                corner2,
                distance,
            }),
        ) => {
            let (v1, v2) = (t.corner_vertex(c1), t.corner_vertex(c2));
            if t.corner_vertex(corner1) != t.corner_vertex(corner2) {
                return WitnessReport::bad("intermediate corners on different vertices");
            }
            if face_corner_at(t, corner1.triangle(), v1).next().is_none() {
                return WitnessReport::bad("first face does not touch v1");
            }
            if face_corner_at(t, corner2.triangle(), v2).next().is_none() {
                return WitnessReport::bad("second face does not touch v2");
            }
            let e = dist(t, corner1, corner2);
            let bound = small_witness_bound(t.n(), outcome.degrees.0, outcome.degrees.1, eps);
            if e > distance {
                return WitnessReport::bad(format!("reported distance {distance} below true {e}"));
            }
            if e as f64 > bound {
                return WitnessReport::bad(format!("distance {e} exceeds bound {bound:.2}"));
            }
            WitnessReport::ok()
        }
        (
            ExplorationKind::Tiny { c },
            S::SuccessWitness,
            Some(&Witness::Hub {
                corner,
                corners_seen,
                graph_distance,
            }),
        ) => {
            let hub = t.corner_vertex(corner);
            let deg = t.degree(hub);
            if (deg as f64) < tiny_threshold(t.n()) || deg < corners_seen {
                return WitnessReport::bad(format!("hub degree {deg} too small (saw {corners_seen})"));
            }
            let adj = t.vertex_adjacency();
            let d = bfs(t, &adj, t.corner_vertex(c), 6)[hub.0 as usize];
            if d == usize::MAX || d > graph_distance {
                return WitnessReport::bad(format!("hub not within distance {graph_distance} (found {d})"));
            }
            WitnessReport::ok()
        }
        (ExplorationKind::Tiny { c }, S::SuccessDisconnected, Some(&Witness::ClosedComponent { triangles })) => {
            let comp = t.component_of_triangle(c.triangle());
            let faces = t.components()[comp].faces;
            if faces != triangles {
                return WitnessReport::bad(format!("component has {faces} faces, exploration saw {triangles}"));
            }
            WitnessReport::ok()
        }
        (_, status, w) => WitnessReport::bad(format!("unexpected witness {w:?} for {}", status.as_str())),
    }
}
