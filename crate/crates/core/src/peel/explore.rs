//! The three pair/vertex explorations, each driven by a replayed pairing.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::{roots_of, Color, PeelState};
use crate::cmap::{build_triangulation, CornerRef, HalfEdge, Pairing};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ExplorationStatus {
    SuccessWitness,
    SuccessFaceWitness,
    SuccessClosure,
    SuccessDisconnected,
    DegreeMismatch,
    Fail,
}

impl ExplorationStatus {
    pub fn is_success(self) -> bool {
        matches!(
            self,
            ExplorationStatus::SuccessWitness
                | ExplorationStatus::SuccessFaceWitness
                | ExplorationStatus::SuccessClosure
                | ExplorationStatus::SuccessDisconnected
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ExplorationStatus::SuccessWitness => "success-witness",
            ExplorationStatus::SuccessFaceWitness => "success-face-witness",
            ExplorationStatus::SuccessClosure => "success-closure",
            ExplorationStatus::SuccessDisconnected => "success-disconnected",
            ExplorationStatus::DegreeMismatch => "degree-mismatch",
            ExplorationStatus::Fail => "fail",
        }
    }

    pub const ALL: [ExplorationStatus; 6] = [
        ExplorationStatus::SuccessWitness,
        ExplorationStatus::SuccessFaceWitness,
        ExplorationStatus::SuccessClosure,
        ExplorationStatus::SuccessDisconnected,
        ExplorationStatus::DegreeMismatch,
        ExplorationStatus::Fail,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Witness {
    /// A face `face` with a corner `corner1` at the first vertex and a corner
    /// `corner2` at the second. `distances` are measured along the glued
    /// part, from the starting corners, when the exploration tracks them.
    SharedFace {
        face: u32,
        corner1: CornerRef,
        corner2: CornerRef,
        distances: Option<(usize, usize)>,
    },
    /// A vertex with corners `corner1` (in a face touching the first vertex)
    /// and `corner2` (in a face touching the second), `distance` apart.
    Intermediate {
        corner1: CornerRef,
        corner2: CornerRef,
        distance: usize,
    },
    /// A vertex (named by one of its corners) seen with at least
    /// `corners_seen` corners, `graph_distance` away from the start.
    Hub {
        corner: CornerRef,
        corners_seen: usize,
        graph_distance: usize,
    },
    /// The starting vertex's component closed after `triangles` faces.
    ClosedComponent { triangles: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplorationOutcome {
    pub status: ExplorationStatus,
    pub witness: Option<Witness>,
    pub steps: usize,
    /// Length of every red phase, in steps (small-vertex exploration only).
    pub red_durations: Vec<usize>,
    /// Number of steps at which some vertex closed.
    pub closures: usize,
    /// Degrees the step budgets were computed from.
    pub degrees: (usize, usize),
}

impl ExplorationOutcome {
    fn new(status: ExplorationStatus, witness: Option<Witness>, state: &PeelState, d: (usize, usize)) -> Self {
        ExplorationOutcome {
            status,
            witness,
            steps: state.step(),
            red_durations: Vec::new(),
            closures: state.closure_times(),
            degrees: d,
        }
    }
}

/// `(l1, l2)` with `l_i = n^(b_i / (b1 + b2 - eps/2))`, `b_i = ln d_i / ln n`.
pub fn large_step_budgets(n: usize, d1: usize, d2: usize, eps: f64) -> (f64, f64) {
    let ln_n = (n as f64).ln();
    let b1 = (d1 as f64).ln() / ln_n;
    let b2 = (d2 as f64).ln() / ln_n;
    let denom = b1 + b2 - eps / 2.0;
    ((n as f64).powf(b1 / denom), (n as f64).powf(b2 / denom))
}

/// Maximum length of a red phase, `ceil(n^(1+eps) / (d1 d2))`.
pub fn red_budget(n: usize, d1: usize, d2: usize, eps: f64) -> usize {
    ((n as f64).powf(1.0 + eps) / (d1 as f64 * d2 as f64)).ceil() as usize
}

/// Bound on the intermediate corner distance, `n^(1+2eps) / (d1 d2)`.
pub fn small_witness_bound(n: usize, d1: usize, d2: usize, eps: f64) -> f64 {
    (n as f64).powf(1.0 + 2.0 * eps) / (d1 as f64 * d2 as f64)
}

/// `n^(1/4)`.
pub fn tiny_threshold(n: usize) -> f64 {
    (n as f64).powf(0.25)
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid(format!("epsilon must lie in (0, 1), got {eps}")));
    }
    Ok(())
}

fn check_corners(p: &Pairing, c1: CornerRef, c2: CornerRef) -> Result<()> {
    let m = p.half_edge_count();
    if c1.0.index() >= m || c2.0.index() >= m {
        return Err(Error::invalid("corner out of range"));
    }
    if c1.triangle() == c2.triangle() {
        return Err(Error::invalid(format!(
            "corners {} and {} lie on the same triangle",
            c1.0, c2.0
        )));
    }
    Ok(())
}

/// Slot of triangle `t` identified with the vertex of `slot`, closest to
/// `slot` along the glued arc.
fn nearest_slot_in_face(state: &PeelState, t: u32, slot: HalfEdge) -> Option<(HalfEdge, usize)> {
    (0..3)
        .map(|k| HalfEdge(3 * t + k))
        .filter(|&h| state.same_vertex(h, slot))
        .filter_map(|h| state.arc_distance(slot, h).map(|d| (h, d)))
        .min_by_key(|&(h, d)| (d, h.0))
}

fn large_face_witness(state: &PeelState, face: u32, c1: CornerRef, c2: CornerRef) -> Option<Witness> {
    let (h1, d1) = nearest_slot_in_face(state, face, c1.0)?;
    let (h2, d2) = nearest_slot_in_face(state, face, c2.0)?;
    Some(Witness::SharedFace {
        face,
        corner1: CornerRef(h1),
        corner2: CornerRef(h2),
        distances: Some((d1, d2)),
    })
}

/// Large-degree pair: peel around `v1` for `l1` steps, then around `v2` for
/// `l2` steps, looking for a face touching both.
pub fn explore_pair_large(pairing: &Pairing, c1: CornerRef, c2: CornerRef, eps: f64) -> Result<ExplorationOutcome> {
    check_eps(eps)?;
    check_corners(pairing, c1, c2)?;
    let t = build_triangulation(pairing.clone())?;
    let n = pairing.n();
    let d1 = t.degree(t.corner_vertex(c1));
    let d2 = t.degree(t.corner_vertex(c2));
    if (d1 as f64) * (d2 as f64) < (n as f64).powf(1.0 + eps) {
        return Err(Error::PreconditionUnmet(format!(
            "d1*d2 = {} is below n^(1+eps) = {:.1}",
            d1 * d2,
            (n as f64).powf(1.0 + eps)
        )));
    }
    let (l1, l2) = large_step_budgets(n, d1, d2, eps);
    let end1 = l1.floor() as usize;
    let end2 = (l1 + l2).floor() as usize;
    let d = (d1, d2);
    let f2 = c2.triangle();
    let mut state = PeelState::new(n)?;

    while state.step() < end2 {
        let phase_one = state.step() < end1;
        let anchor = if phase_one { c1 } else { c2 };
        let a = state
            .outgoing_boundary_edge(anchor.0)
            .ok_or_else(|| Error::InvalidState("peeled vertex already closed".into()))?;
        let b = pairing.partner(a);
        let hits = if phase_one {
            b.triangle() == f2
        } else {
            state.same_component(b.triangle(), c1.triangle())
        };
        state.glue(a, b)?;
        if hits {
            let face = if phase_one { f2 } else { b.triangle() };
            let w = large_face_witness(&state, face, c1, c2)
                .ok_or_else(|| Error::InvalidState("face witness not on both vertices".into()))?;
            return Ok(ExplorationOutcome::new(ExplorationStatus::SuccessFaceWitness, Some(w), &state, d));
        }
        if state.is_true_vertex(anchor.0) {
            return Ok(ExplorationOutcome::new(ExplorationStatus::SuccessClosure, None, &state, d));
        }
    }
    Ok(ExplorationOutcome::new(ExplorationStatus::Fail, None, &state, d))
}

fn small_regime(n: usize, d1: usize, d2: usize, eps: f64) -> Result<()> {
    let nf = n as f64;
    let floor = nf.powf(2.0 * eps);
    if (d1 as f64) * (d2 as f64) > nf.powf(1.0 + eps) || (d1 as f64) < floor || (d2 as f64) < floor {
        return Err(Error::PreconditionUnmet(format!(
            "degrees ({d1}, {d2}) outside the small regime at n = {n}, eps = {eps}"
        )));
    }
    Ok(())
}

/// Small-degree pair with degrees read from the pairing.
pub fn explore_pair_small(pairing: &Pairing, c1: CornerRef, c2: CornerRef, eps: f64) -> Result<ExplorationOutcome> {
    check_corners(pairing, c1, c2)?;
    let t = build_triangulation(pairing.clone())?;
    let d1 = t.degree(t.corner_vertex(c1));
    let d2 = t.degree(t.corner_vertex(c2));
    explore_pair_small_with_degrees(pairing, c1, c2, eps, (d1, d2))
}

/// Small-degree pair with caller-supplied degrees `(d1, d2)`, which set the
/// closure-time checks and the red budget. Passing wrong values exercises
/// the degree-mismatch stops.
pub fn explore_pair_small_with_degrees(
    pairing: &Pairing,
    c1: CornerRef,
    c2: CornerRef,
    eps: f64,
    degrees: (usize, usize),
) -> Result<ExplorationOutcome> {
    check_eps(eps)?;
    check_corners(pairing, c1, c2)?;
    let n = pairing.n();
    let (d1, d2) = degrees;
    small_regime(n, d1, d2, eps)?;
    let mut state = PeelState::new(n)?;
    let face_hit = |state: &PeelState, face: u32| {
        let w = Witness::SharedFace {
            face,
            corner1: CornerRef(first_slot_on(state, face, c1.0).expect("face touches v1")),
            corner2: CornerRef(first_slot_on(state, face, c2.0).expect("face touches v2")),
            distances: None,
        };
        ExplorationOutcome::new(ExplorationStatus::SuccessFaceWitness, Some(w), state, degrees)
    };

    // Phases 1 and 2: peel around v1 (resp. v2) until it closes.
    let mut tau_prev = 0usize;
    for (anchor, deg) in [(c1, d1), (c2, d2)] {
        loop {
            let a = state
                .outgoing_boundary_edge(anchor.0)
                .ok_or_else(|| Error::InvalidState("peeled vertex already closed".into()))?;
            let b = pairing.partner(a);
            let joins = !state.same_component(c1.triangle(), c2.triangle())
                && (state.same_component(b.triangle(), c1.triangle())
                    || state.same_component(b.triangle(), c2.triangle()))
                && !state.same_component(b.triangle(), anchor.triangle());
            state.glue(a, b)?;
            if joins {
                return Ok(face_hit(&state, b.triangle()));
            }
            let elapsed = state.step() - tau_prev;
            if state.is_true_vertex(anchor.0) {
                if (elapsed as f64) < deg as f64 / 4.0 {
                    return Ok(ExplorationOutcome::new(ExplorationStatus::DegreeMismatch, None, &state, degrees));
                }
                tau_prev = state.step();
                break;
            }
            if elapsed >= deg {
                return Ok(ExplorationOutcome::new(ExplorationStatus::DegreeMismatch, None, &state, degrees));
            }
        }
    }

    // Phase 3: grow the boundary of v1's component from red vertices.
    let budget = red_budget(n, d1, d2, eps);
    let mut boundary = state.component_boundary_vertices(c1.triangle());
    let mut blue: BTreeSet<(u32, u32)> = BTreeSet::new();
    for &(e, r) in &boundary {
        blue.insert((state.vertex_name(e), r));
    }
    boundary.clear();
    for &(_, r) in &blue {
        state.set_color(HalfEdge(r), Color::Blue);
    }
    let mut red: Option<HalfEdge> = None;
    let mut red_steps = 0usize;
    let mut durations = Vec::new();
    let finish = |state: &PeelState, status, witness, durations: Vec<usize>| {
        let mut o = ExplorationOutcome::new(status, witness, state, degrees);
        o.red_durations = durations;
        o
    };

    loop {
        if let Some(r) = red {
            if red_steps >= budget {
                state.set_color(r, Color::Black);
                durations.push(red_steps);
                red = None;
            }
        }
        if red.is_none() {
            let next = loop {
                match blue.pop_first() {
                    None => break None,
                    Some((_, root)) => {
                        let h = HalfEdge(root);
                        if state.color(h) == Color::Blue && !state.is_true_vertex(h) {
                            break Some(h);
                        }
                    }
                }
            };
            match next {
                None => return Ok(finish(&state, ExplorationStatus::Fail, None, durations)),
                Some(h) => {
                    state.set_color(h, Color::Red);
                    red = Some(h);
                    red_steps = 0;
                }
            }
        }
        let r = red.expect("red vertex chosen above");
        let a = state
            .outgoing_boundary_edge(r)
            .ok_or_else(|| Error::InvalidState("red vertex has no boundary edge".into()))?;
        let b = pairing.partner(a);
        let (na, nb) = (a.next(), b.next());
        // Pre-gluing classes and colours of the four endpoints.
        let pre: Vec<(u32, Color)> = [a, na, b, nb]
            .iter()
            .map(|&h| (state.vertex_root(h), state.color(h)))
            .collect();
        let red_root = state.vertex_root(r);
        let joins = state.same_component(b.triangle(), c2.triangle());
        state.glue(a, b)?;
        red_steps += 1;

        if joins {
            durations.push(red_steps);
            let bound = small_witness_bound(n, d1, d2, eps);
            return Ok(match small_intermediate_witness(&state, nb, c1.0) {
                Some(w @ Witness::Intermediate { distance, .. }) if distance as f64 <= bound => {
                    finish(&state, ExplorationStatus::SuccessWitness, Some(w), durations)
                }
                _ => finish(&state, ExplorationStatus::Fail, None, durations),
            });
        }

        // origin(a) ~ terminus(b) and terminus(a) ~ origin(b).
        let groups: [[usize; 2]; 2] = [[0, 3], [1, 2]];
        let post = [state.vertex_root(a), state.vertex_root(b)];
        let mut recolor: HashMap<u32, Vec<usize>> = HashMap::new();
        for (g, &root) in groups.iter().zip(post.iter()) {
            recolor.entry(root).or_default().extend_from_slice(g);
        }
        for (root, members) in recolor {
            let mut roots: Vec<(u32, Color)> = members.iter().map(|&k| pre[k]).collect();
            roots.sort_unstable_by_key(|x| x.0);
            roots.dedup_by_key(|x| x.0);
            let has_red = roots.iter().any(|&(x, _)| x == red_root);
            let others_colored = roots
                .iter()
                .any(|&(x, c)| x != red_root && c.is_colored());
            let color = if has_red {
                if others_colored {
                    Color::Black
                } else {
                    Color::Red
                }
            } else if roots.iter().any(|&(_, c)| c.is_colored()) {
                Color::Black
            } else {
                Color::None
            };
            state.set_color(HalfEdge(root), color);
        }
        let red_now = state.vertex_root(a);
        if state.color(HalfEdge(red_now)) != Color::Red || state.is_true_vertex(a) {
            state.set_color(HalfEdge(red_now), Color::Black);
            durations.push(red_steps);
            red = None;
        } else {
            red = Some(HalfEdge(red_now));
        }
    }
}

fn first_slot_on(state: &PeelState, face: u32, slot: HalfEdge) -> Option<HalfEdge> {
    (0..3).map(|k| HalfEdge(3 * face + k)).find(|&h| state.same_vertex(h, slot))
}

/// After the red vertex's peeled edge reached `v2`'s component: the corner of
/// the red vertex in the new face is `next(b)`; find the nearest corner of
/// the red vertex whose face also touches `v1`.
fn small_intermediate_witness(state: &PeelState, nb: HalfEdge, v1: HalfEdge) -> Option<Witness> {
    let mut best: Option<(usize, HalfEdge)> = None;
    for h in arc_slots(state, nb) {
        let face = h.triangle();
        if first_slot_on(state, face, v1).is_some() {
            if let Some(d) = state.arc_distance(nb, h) {
                if best.map_or(true, |(bd, bh)| (d, h.0) < (bd, bh.0)) {
                    best = Some((d, h));
                }
            }
        }
    }
    best.map(|(d, h)| Witness::Intermediate {
        corner1: CornerRef(h),
        corner2: CornerRef(nb),
        distance: d,
    })
}

/// Corner slots of the vertex of `slot` reachable along the glued arc.
fn arc_slots(state: &PeelState, slot: HalfEdge) -> Vec<HalfEdge> {
    let mut out = vec![slot];
    let mut h = slot;
    while let Some(p) = state.partner(h) {
        h = p.next();
        if h == slot {
            return out;
        }
        out.push(h);
    }
    let mut g = slot;
    while let Some(p) = state.partner(g.prev()) {
        g = p;
        out.push(g);
    }
    out
}

/// Tiny vertex: keep peeling from a red vertex near `v` until a vertex stays
/// open for `n^(1/4)` consecutive steps, or three closure times occur.
pub fn explore_tiny(pairing: &Pairing, c: CornerRef) -> Result<ExplorationOutcome> {
    let m = pairing.half_edge_count();
    if c.0.index() >= m {
        return Err(Error::invalid("corner out of range"));
    }
    let n = pairing.n();
    let threshold = tiny_threshold(n);
    let mut state = PeelState::new(n)?;
    let mut explored: Vec<u32> = vec![c.triangle()];
    let mut seen_tri = vec![false; 2 * n];
    seen_tri[c.triangle() as usize] = true;
    let mut red: HalfEdge = c.0;
    let mut run = 0usize;
    let mut closures = 0usize;
    let d = (0, 0);

    loop {
        if state.is_true_vertex(red) {
            match nearest_open_vertex(&state, &explored, c.0) {
                Some((h, _)) => {
                    red = h;
                }
                None => {
                    let w = Witness::ClosedComponent { triangles: explored.len() };
                    return Ok(ExplorationOutcome::new(ExplorationStatus::SuccessDisconnected, Some(w), &state, d));
                }
            }
        }
        let a = state.outgoing_boundary_edge(red).expect("red vertex is open");
        let b = pairing.partner(a);
        let ev = state.glue(a, b)?;
        if !seen_tri[b.triangle() as usize] {
            seen_tri[b.triangle() as usize] = true;
            explored.push(b.triangle());
        }
        if state.component_boundary_edges(c.triangle()) == 0 {
            let w = Witness::ClosedComponent { triangles: explored.len() };
            return Ok(ExplorationOutcome::new(ExplorationStatus::SuccessDisconnected, Some(w), &state, d));
        }
        if ev.closed.is_empty() {
            run += 1;
            if run as f64 >= threshold {
                let corner = state.outgoing_boundary_edge(red).unwrap_or(a);
                let dist = graph_distances(&state, &explored, c.0)
                    .get(&state.vertex_root(corner))
                    .copied()
                    .expect("red vertex lies in the explored component");
                let w = Witness::Hub {
                    corner: CornerRef(corner),
                    corners_seen: state.vertex_corner_count(corner),
                    graph_distance: dist,
                };
                return Ok(ExplorationOutcome::new(ExplorationStatus::SuccessWitness, Some(w), &state, d));
            }
        } else {
            run = 0;
            closures += 1;
            if closures >= 3 {
                return Ok(ExplorationOutcome::new(ExplorationStatus::Fail, None, &state, d));
            }
        }
    }
}

/// Graph distances from the vertex of `start`, over the vertices of the
/// explored triangles, keyed by vertex root.
fn graph_distances(state: &PeelState, triangles: &[u32], start: HalfEdge) -> HashMap<u32, usize> {
    let mut adj: HashMap<u32, Vec<u32>> = HashMap::new();
    for &t in triangles {
        let vs: Vec<u32> = roots_of(state, &[HalfEdge(3 * t), HalfEdge(3 * t + 1), HalfEdge(3 * t + 2)])
            .into_iter()
            .collect();
        for &x in &vs {
            for &y in &vs {
                if x != y {
                    adj.entry(x).or_default().push(y);
                }
            }
        }
    }
    let s = state.vertex_root(start);
    let mut dist = HashMap::new();
    dist.insert(s, 0usize);
    let mut queue = VecDeque::from([s]);
    while let Some(x) = queue.pop_front() {
        let dx = dist[&x];
        if let Some(ns) = adj.get(&x) {
            for &y in ns {
                if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(y) {
                    e.insert(dx + 1);
                    queue.push_back(y);
                }
            }
        }
    }
    dist
}

/// Open vertex closest to `start` in graph distance; ties go to the vertex
/// whose outgoing boundary edge has the smallest identifier.
fn nearest_open_vertex(state: &PeelState, triangles: &[u32], start: HalfEdge) -> Option<(HalfEdge, usize)> {
    let dist = graph_distances(state, triangles, start);
    dist.iter()
        .filter_map(|(&root, &d)| state.outgoing_boundary_edge(HalfEdge(root)).map(|e| (d, e.0)))
        .min()
        .map(|(d, e)| (HalfEdge(e), d))
}
