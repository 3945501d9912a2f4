//! Incremental gluing of the `2n` triangles, one side pair per step.
//!
//! A [`PeelState`] holds the partially glued surface: unmatched sides form
//! holes (cycles of the boundary successor map), corner slots are merged by
//! a union-find as sides get identified, and a vertex becomes *true* once no
//! boundary side touches it. Every temporary vertex appears exactly once
//! along the boundary, which is what lets the engine detect closures from the
//! two boundary positions a gluing rewires.

mod explore;
mod oracle;
mod trace;

use std::collections::BTreeSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cmap::{build_triangulation, HalfEdge, Pairing, Triangulation};
use crate::error::{Error, Result};
use crate::unionfind::UnionFind;

pub use explore::{
    explore_pair_large, explore_pair_small, explore_pair_small_with_degrees, explore_tiny,
    large_step_budgets, red_budget, small_witness_bound, tiny_threshold, ExplorationOutcome,
    ExplorationStatus, Witness,
};
pub use oracle::{
    oracle_check_large, oracle_check_small, oracle_check_tiny, oracle_check_tiny_with, verify_outcome, ExplorationKind,
    LargeReport, SmallReport, TinyReport, WitnessReport,
};
pub use trace::{encode_event_trace, write_event_trace, EventRecord};

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GlueCase {
    /// Glued to a neighbour along its own hole; closes one vertex, or two
    /// when the hole had perimeter 2.
    SameHoleAdjacent,
    SameHoleSplit,
    CrossHoleMerge,
    /// Two holes of perimeter 1 glued together; closes a vertex.
    LoopToLoop,
}

impl GlueCase {
    pub fn as_str(self) -> &'static str {
        match self {
            GlueCase::SameHoleAdjacent => "same-hole-adjacent",
            GlueCase::SameHoleSplit => "same-hole-split",
            GlueCase::CrossHoleMerge => "cross-hole-merge",
            GlueCase::LoopToLoop => "loop-to-loop",
        }
    }

    pub fn may_close(self) -> bool {
        matches!(self, GlueCase::SameHoleAdjacent | GlueCase::LoopToLoop)
    }
}

/// One identification step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlueEvent {
    /// Step index after the gluing, so the first event has `step == 1`.
    pub step: usize,
    pub peeled: HalfEdge,
    pub partner: HalfEdge,
    pub case: GlueCase,
    /// Closed vertices, each named by the smallest corner slot in its class.
    pub closed: Vec<u32>,
    /// Unmatched half-edges left, `6n - 2 * step`.
    pub boundary: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    #[default]
    None,
    Red,
    Blue,
    Black,
}

impl Color {
    pub fn is_colored(self) -> bool {
        self != Color::None
    }

    /// Colour of a vertex obtained by identifying two coloured vertices.
    fn merge(self, other: Color) -> Color {
        match (self, other) {
            (Color::None, c) | (c, Color::None) => c,
            _ => Color::Black,
        }
    }
}

/// Counters sampled after each step for the tracked component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceCounters {
    pub step: usize,
    /// Boundary half-edges of the tracked component.
    pub boundary_edges: usize,
    /// Temporary vertices of the tracked component.
    pub boundary_vertices: usize,
    /// Holes of perimeter 1 (whole surface).
    pub loops: usize,
    /// Steps so far at which at least one vertex closed.
    pub closure_times: usize,
}

/// Partially glued surface `S_i`.
#[derive(Debug, Clone)]
pub struct PeelState {
    n: usize,
    step: usize,
    partner: Vec<u32>,
    succ: Vec<u32>,
    pred: Vec<u32>,
    hole_of: Vec<u32>,
    hole_len: Vec<u32>,
    live_holes: usize,
    loops: usize,
    unmatched: Vec<u32>,
    unmatched_pos: Vec<u32>,
    corners: UnionFind,
    out_edge: Vec<u32>,
    class_min: Vec<u32>,
    colors: Vec<Color>,
    triangles: UnionFind,
    comp_boundary: Vec<u32>,
    comp_temp: Vec<u32>,
    true_vertices: usize,
    closure_times: usize,
    tracked: Option<u32>,
    trace: Vec<TraceCounters>,
}

impl PeelState {
    /// `S_0`: `2n` separate triangles, each bounding a hole of perimeter 3.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n must be at least 1"));
        }
        let m = 6 * n;
        let faces = 2 * n;
        let succ: Vec<u32> = (0..m as u32).map(|h| HalfEdge(h).next().0).collect();
        let pred: Vec<u32> = (0..m as u32).map(|h| HalfEdge(h).prev().0).collect();
        Ok(PeelState {
            n,
            step: 0,
            partner: vec![NONE; m],
            succ,
            pred,
            hole_of: (0..m as u32).map(|h| h / 3).collect(),
            hole_len: vec![3; faces],
            live_holes: faces,
            loops: 0,
            unmatched: (0..m as u32).collect(),
            unmatched_pos: (0..m as u32).collect(),
            corners: UnionFind::new(m),
            out_edge: (0..m as u32).collect(),
            class_min: (0..m as u32).collect(),
            colors: vec![Color::None; m],
            triangles: UnionFind::new(faces),
            comp_boundary: vec![3; faces],
            comp_temp: vec![3; faces],
            true_vertices: 0,
            closure_times: 0,
            tracked: None,
            trace: Vec::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn boundary_len(&self) -> usize {
        self.unmatched.len()
    }

    pub fn unmatched(&self) -> &[u32] {
        &self.unmatched
    }

    pub fn is_matched(&self, h: HalfEdge) -> bool {
        self.partner[h.index()] != NONE
    }

    pub fn partner(&self, h: HalfEdge) -> Option<HalfEdge> {
        let p = self.partner[h.index()];
        (p != NONE).then_some(HalfEdge(p))
    }

    /// Boundary successor of an unmatched half-edge along its hole.
    pub fn hole_successor(&self, h: HalfEdge) -> Option<HalfEdge> {
        (!self.is_matched(h)).then(|| HalfEdge(self.succ[h.index()]))
    }

    pub fn hole_predecessor(&self, h: HalfEdge) -> Option<HalfEdge> {
        (!self.is_matched(h)).then(|| HalfEdge(self.pred[h.index()]))
    }

    pub fn hole_count(&self) -> usize {
        self.live_holes
    }

    pub fn loop_count(&self) -> usize {
        self.loops
    }

    pub fn true_vertex_count(&self) -> usize {
        self.true_vertices
    }

    pub fn closure_times(&self) -> usize {
        self.closure_times
    }

    /// Holes as cyclic sequences, each starting from its smallest half-edge.
    pub fn holes(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.partner.len()];
        let mut sorted = self.unmatched.clone();
        sorted.sort_unstable();
        let mut out = Vec::with_capacity(self.live_holes);
        for h in sorted {
            if seen[h as usize] {
                continue;
            }
            let mut hole = Vec::new();
            let mut x = h;
            loop {
                seen[x as usize] = true;
                hole.push(x);
                x = self.succ[x as usize];
                if x == h {
                    break;
                }
            }
            out.push(hole);
        }
        out
    }

    pub fn hole_perimeter(&self, h: HalfEdge) -> Option<usize> {
        (!self.is_matched(h)).then(|| self.hole_len[self.hole_of[h.index()] as usize] as usize)
    }

    /// Union-find root of the vertex at corner slot `slot` (origin of that
    /// half-edge). Roots change as vertices merge.
    pub fn vertex_root(&self, slot: HalfEdge) -> u32 {
        self.corners.find_const(slot.0)
    }

    pub fn same_vertex(&self, a: HalfEdge, b: HalfEdge) -> bool {
        self.vertex_root(a) == self.vertex_root(b)
    }

    /// Smallest corner slot identified with `slot`; a stable vertex name.
    pub fn vertex_name(&self, slot: HalfEdge) -> u32 {
        self.class_min[self.vertex_root(slot) as usize]
    }

    /// Number of corners currently identified into the vertex of `slot`.
    pub fn vertex_corner_count(&self, slot: HalfEdge) -> usize {
        let mut uf = self.corners.clone();
        uf.class_size(slot.0)
    }

    pub fn is_true_vertex(&self, slot: HalfEdge) -> bool {
        self.out_edge[self.vertex_root(slot) as usize] == NONE
    }

    /// Boundary half-edge leaving the vertex of `slot`, if still temporary.
    pub fn outgoing_boundary_edge(&self, slot: HalfEdge) -> Option<HalfEdge> {
        let e = self.out_edge[self.vertex_root(slot) as usize];
        (e != NONE).then_some(HalfEdge(e))
    }

    /// Boundary half-edge arriving at the vertex of `slot`.
    pub fn incoming_boundary_edge(&self, slot: HalfEdge) -> Option<HalfEdge> {
        self.outgoing_boundary_edge(slot)
            .map(|e| HalfEdge(self.pred[e.index()]))
    }

    pub fn color(&self, slot: HalfEdge) -> Color {
        self.colors[self.vertex_root(slot) as usize]
    }

    pub fn set_color(&mut self, slot: HalfEdge, c: Color) {
        let r = self.corners.find(slot.0);
        self.colors[r as usize] = c;
    }

    pub fn same_component(&self, t1: u32, t2: u32) -> bool {
        self.triangles.find_const(t1) == self.triangles.find_const(t2)
    }

    pub fn component_boundary_edges(&self, t: u32) -> usize {
        self.comp_boundary[self.triangles.find_const(t) as usize] as usize
    }

    pub fn component_temporary_vertices(&self, t: u32) -> usize {
        self.comp_temp[self.triangles.find_const(t) as usize] as usize
    }

    /// Start recording [`TraceCounters`] for the component of triangle `t`.
    pub fn track_component(&mut self, t: u32) {
        self.tracked = Some(t);
    }

    pub fn trace(&self) -> &[TraceCounters] {
        &self.trace
    }

    /// Temporary vertices of the component of triangle `t`, as
    /// `(outgoing boundary edge, vertex root)` in hole order.
    pub fn component_boundary_vertices(&self, t: u32) -> Vec<(HalfEdge, u32)> {
        let root = self.triangles.find_const(t);
        self.unmatched
            .iter()
            .filter(|&&h| self.triangles.find_const(h / 3) == root)
            .map(|&h| (HalfEdge(h), self.vertex_root(HalfEdge(h))))
            .collect()
    }

    /// Uniform partner for `a` among the other unmatched half-edges.
    pub fn random_partner<R: Rng + ?Sized>(&self, a: HalfEdge, rng: &mut R) -> Result<HalfEdge> {
        if a.index() >= self.partner.len() || self.is_matched(a) {
            return Err(Error::InvalidState(format!("{a} is not on the boundary")));
        }
        let len = self.unmatched.len();
        if len < 2 {
            return Err(Error::InvalidState("no other unmatched half-edge".into()));
        }
        let pos_a = self.unmatched_pos[a.index()] as usize;
        let mut k = rng.gen_range(0..len - 1);
        if k >= pos_a {
            k += 1;
        }
        Ok(HalfEdge(self.unmatched[k]))
    }

    fn remove_unmatched(&mut self, h: u32) {
        let pos = self.unmatched_pos[h as usize] as usize;
        let last = *self.unmatched.last().expect("non-empty boundary");
        self.unmatched.swap_remove(pos);
        if last != h {
            self.unmatched_pos[last as usize] = pos as u32;
        }
        self.unmatched_pos[h as usize] = NONE;
    }

    fn relabel_hole(&mut self, start: u32, id: u32) {
        let mut x = start;
        loop {
            self.hole_of[x as usize] = id;
            x = self.succ[x as usize];
            if x == start {
                break;
            }
        }
    }

    fn merge_vertices(&mut self, x: u32, y: u32) {
        let (rx, ry) = (self.corners.find(x), self.corners.find(y));
        if rx == ry {
            return;
        }
        let c = self.colors[rx as usize].merge(self.colors[ry as usize]);
        let mn = self.class_min[rx as usize].min(self.class_min[ry as usize]);
        let r = self.corners.union(rx, ry);
        self.colors[r as usize] = c;
        self.class_min[r as usize] = mn;
    }

    /// Identifies boundary sides `a` (the peeled edge) and `b`.
    pub fn glue(&mut self, a: HalfEdge, b: HalfEdge) -> Result<GlueEvent> {
        let m = self.partner.len();
        if a.index() >= m || b.index() >= m {
            return Err(Error::invalid("half-edge out of range"));
        }
        if a == b {
            return Err(Error::invalid(format!("cannot glue {a} to itself")));
        }
        if self.is_matched(a) || self.is_matched(b) {
            return Err(Error::invalid(format!("{a} or {b} is already matched")));
        }
        let (a, b) = (a.0, b.0);
        let (sa, pa, sb, pb) = (
            self.succ[a as usize],
            self.pred[a as usize],
            self.succ[b as usize],
            self.pred[b as usize],
        );
        let a_loop = sa == a;
        let b_loop = sb == b;
        let hole_a = self.hole_of[a as usize];
        let hole_b = self.hole_of[b as usize];
        let same_hole = hole_a == hole_b;
        let case = if a_loop && b_loop {
            GlueCase::LoopToLoop
        } else if same_hole {
            if sa == b || sb == a {
                GlueCase::SameHoleAdjacent
            } else {
                GlueCase::SameHoleSplit
            }
        } else {
            GlueCase::CrossHoleMerge
        };

        let next_a = HalfEdge(a).next().0;
        let next_b = HalfEdge(b).next().0;
        let pre_roots = {
            let mut r = vec![
                self.corners.find(a),
                self.corners.find(next_a),
                self.corners.find(b),
                self.corners.find(next_b),
            ];
            r.sort_unstable();
            r.dedup();
            r
        };

        // Holes, part one: merges relabel the smaller hole before surgery.
        match case {
            GlueCase::LoopToLoop => {
                self.live_holes -= 2;
            }
            GlueCase::SameHoleAdjacent => {
                self.hole_len[hole_a as usize] -= 2;
                if self.hole_len[hole_a as usize] == 0 {
                    self.live_holes -= 1;
                }
            }
            GlueCase::CrossHoleMerge => {
                let (la, lb) = (self.hole_len[hole_a as usize], self.hole_len[hole_b as usize]);
                let (keep, gone_start) = if la >= lb { (hole_a, b) } else { (hole_b, a) };
                self.relabel_hole(gone_start, keep);
                self.hole_len[keep as usize] = la + lb - 2;
                self.live_holes -= 1;
            }
            GlueCase::SameHoleSplit => {}
        }

        // Boundary surgery: arriving at a (resp. b) now continues past the
        // partner's successor.
        self.loops -= a_loop as usize + b_loop as usize;
        let jump = |y: u32| -> u32 {
            let mut y = y;
            for _ in 0..4 {
                if y == a {
                    y = sb;
                } else if y == b {
                    y = sa;
                } else {
                    return y;
                }
            }
            unreachable!("boundary surgery did not settle")
        };
        let mut rewired: Vec<(u32, u32)> = Vec::with_capacity(2);
        for x in [pa, pb] {
            if x != a && x != b {
                rewired.push((x, jump(self.succ[x as usize])));
            }
        }
        for &(x, y) in &rewired {
            self.succ[x as usize] = y;
            self.pred[y as usize] = x;
            if x == y {
                self.loops += 1;
            }
        }
        self.partner[a as usize] = b;
        self.partner[b as usize] = a;
        self.remove_unmatched(a);
        self.remove_unmatched(b);

        if case == GlueCase::SameHoleSplit {
            // Walk both new cycles in lockstep and relabel the shorter one.
            let (mut x, mut y) = (sb, sa);
            let (mut lx, mut ly) = (1u32, 1u32);
            let smaller_start = loop {
                x = self.succ[x as usize];
                if x == sb {
                    break sb;
                }
                lx += 1;
                y = self.succ[y as usize];
                if y == sa {
                    break sa;
                }
                ly += 1;
            };
            let total = self.hole_len[hole_a as usize] - 2;
            let small_len = if smaller_start == sb { lx } else { ly };
            let new_id = self.hole_len.len() as u32;
            self.hole_len.push(small_len);
            self.hole_len[hole_a as usize] = total - small_len;
            self.relabel_hole(smaller_start, new_id);
            self.live_holes += 1;
        }

        // Vertex identifications: origin(a) ~ terminus(b), terminus(a) ~ origin(b).
        self.merge_vertices(a, next_b);
        self.merge_vertices(next_a, b);

        let mut post_roots = vec![self.corners.find(a), self.corners.find(b)];
        post_roots.dedup();
        let mut present = [false; 2];
        for &(x, y) in &rewired {
            let r = self.corners.find(HalfEdge(x).next().0);
            let idx = post_roots
                .iter()
                .position(|&p| p == r)
                .expect("rewired position belongs to an affected vertex");
            present[idx] = true;
            self.out_edge[r as usize] = y;
        }
        let mut closed = Vec::new();
        for (idx, &r) in post_roots.iter().enumerate() {
            if !present[idx] {
                self.out_edge[r as usize] = NONE;
                closed.push(self.class_min[r as usize]);
            }
        }
        self.true_vertices += closed.len();
        if !closed.is_empty() {
            self.closure_times += 1;
        }

        // Components.
        let temp_after = post_roots.len() - closed.len();
        let (ta, tb) = (self.triangles.find(a / 3), self.triangles.find(b / 3));
        let (boundary, temp) = if ta == tb {
            (
                self.comp_boundary[ta as usize] - 2,
                self.comp_temp[ta as usize] as usize,
            )
        } else {
            (
                self.comp_boundary[ta as usize] + self.comp_boundary[tb as usize] - 2,
                (self.comp_temp[ta as usize] + self.comp_temp[tb as usize]) as usize,
            )
        };
        let temp = temp + temp_after - pre_roots.len();
        let t = self.triangles.union(ta, tb);
        self.comp_boundary[t as usize] = boundary;
        self.comp_temp[t as usize] = temp as u32;

        self.step += 1;
        if let Some(tt) = self.tracked {
            let root = self.triangles.find(tt) as usize;
            self.trace.push(TraceCounters {
                step: self.step,
                boundary_edges: self.comp_boundary[root] as usize,
                boundary_vertices: self.comp_temp[root] as usize,
                loops: self.loops,
                closure_times: self.closure_times,
            });
        }
        closed.sort_unstable();
        Ok(GlueEvent {
            step: self.step,
            peeled: HalfEdge(a),
            partner: HalfEdge(b),
            case,
            closed,
            boundary: self.unmatched.len(),
        })
    }

    /// Pairing glued so far, if complete.
    pub fn finished_pairing(&self) -> Option<Pairing> {
        self.unmatched
            .is_empty()
            .then(|| Pairing::from_raw_unchecked(self.n, self.partner.clone()))
    }

    /// Vertex classes as sorted corner-slot lists, ordered by smallest slot.
    pub fn vertex_classes(&self) -> Vec<Vec<u32>> {
        let mut uf = self.corners.clone();
        uf.classes()
    }

    /// Distance between two corners of one vertex measured along the
    /// already-glued corners around it. `None` if `to` cannot be reached
    /// without crossing the boundary.
    pub fn arc_distance(&self, from: HalfEdge, to: HalfEdge) -> Option<usize> {
        if from == to {
            return Some(0);
        }
        let limit = self.partner.len();
        let walk = |step: &dyn Fn(u32) -> Option<u32>| -> Option<usize> {
            let mut h = from.0;
            for k in 1..=limit {
                h = step(h)?;
                if h == to.0 {
                    return Some(k);
                }
                if h == from.0 {
                    return None;
                }
            }
            None
        };
        let forward = walk(&|h| {
            let p = self.partner[h as usize];
            (p != NONE).then(|| HalfEdge(p).next().0)
        });
        let backward = walk(&|h| {
            let p = self.partner[HalfEdge(h).prev().index()];
            (p != NONE).then_some(p)
        });
        match (forward, backward) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        }
    }
}

/// Picks the next boundary half-edge to peel.
pub trait PeelAlgorithm {
    fn next_edge(&mut self, state: &PeelState) -> HalfEdge;
}

/// Always peels the smallest unmatched half-edge.
#[derive(Debug, Default, Clone)]
pub struct SmallestFirst {
    cursor: usize,
}

impl PeelAlgorithm for SmallestFirst {
    fn next_edge(&mut self, state: &PeelState) -> HalfEdge {
        while state.is_matched(HalfEdge(self.cursor as u32)) {
            self.cursor += 1;
        }
        HalfEdge(self.cursor as u32)
    }
}

/// Always peels the largest unmatched half-edge.
#[derive(Debug, Default, Clone)]
pub struct LargestFirst {
    cursor: Option<usize>,
}

impl PeelAlgorithm for LargestFirst {
    fn next_edge(&mut self, state: &PeelState) -> HalfEdge {
        let mut c = self.cursor.unwrap_or(6 * state.n() - 1);
        while state.is_matched(HalfEdge(c as u32)) {
            c -= 1;
        }
        self.cursor = Some(c);
        HalfEdge(c as u32)
    }
}

/// Peels a uniformly random boundary half-edge.
#[derive(Debug, Clone)]
pub struct UniformEdge {
    rng: ChaCha8Rng,
}

impl UniformEdge {
    pub fn new(seed: u64) -> Self {
        UniformEdge {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl PeelAlgorithm for UniformEdge {
    fn next_edge(&mut self, state: &PeelState) -> HalfEdge {
        let u = state.unmatched();
        HalfEdge(u[self.rng.gen_range(0..u.len())])
    }
}

/// Keeps peeling along the hole of the previous step, as a boundary walker
/// would.
#[derive(Debug, Default, Clone)]
pub struct FollowBoundary {
    last: Option<HalfEdge>,
}

impl PeelAlgorithm for FollowBoundary {
    fn next_edge(&mut self, state: &PeelState) -> HalfEdge {
        let pick = self
            .last
            .and_then(|h| {
                // The previous peeled edge is matched now; resume at the
                // boundary edge leaving its origin vertex.
                state.outgoing_boundary_edge(h)
            })
            .unwrap_or_else(|| {
                let mut v: Vec<u32> = state.unmatched().to_vec();
                v.sort_unstable();
                HalfEdge(v[0])
            });
        self.last = Some(pick);
        pick
    }
}

/// Where partners come from during a full run.
#[derive(Debug, Clone)]
pub enum PartnerSource<'a> {
    /// Reveal a fixed pairing.
    Replay(&'a Pairing),
    /// Draw each partner uniformly among the other boundary half-edges.
    Quenched(u64),
}

/// Glues everything, `S_0 -> ... -> S_{3n}`, and returns the resulting
/// triangulation with the event log.
pub fn run_to_completion(
    n: usize,
    algorithm: &mut dyn PeelAlgorithm,
    source: PartnerSource<'_>,
) -> Result<(Triangulation, Vec<GlueEvent>)> {
    let (state, events) = run_state_to_completion(n, algorithm, source)?;
    let pairing = state
        .finished_pairing()
        .ok_or_else(|| Error::InvalidState("run ended with unmatched half-edges".into()))?;
    Ok((build_triangulation(pairing)?, events))
}

/// As [`run_to_completion`] but hands back the final state.
pub fn run_state_to_completion(
    n: usize,
    algorithm: &mut dyn PeelAlgorithm,
    source: PartnerSource<'_>,
) -> Result<(PeelState, Vec<GlueEvent>)> {
    let mut state = PeelState::new(n)?;
    if let PartnerSource::Replay(p) = source {
        if p.n() != n {
            return Err(Error::invalid(format!(
                "replay pairing has n = {}, expected {n}",
                p.n()
            )));
        }
    }
    let mut rng = match source {
        PartnerSource::Quenched(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        PartnerSource::Replay(_) => None,
    };
    let mut events = Vec::with_capacity(3 * n);
    while state.boundary_len() > 0 {
        let a = algorithm.next_edge(&state);
        let b = match (&source, rng.as_mut()) {
            (PartnerSource::Replay(p), _) => {
                let b = p.partner(a);
                if state.is_matched(b) {
                    return Err(Error::invalid(format!(
                        "replay pairing inconsistent: partner {b} of {a} already matched"
                    )));
                }
                b
            }
            (_, Some(r)) => state.random_partner(a, r)?,
            _ => unreachable!(),
        };
        events.push(state.glue(a, b)?);
    }
    Ok((state, events))
}

/// Distinct vertex roots, for callers that need set semantics.
pub(crate) fn roots_of(state: &PeelState, slots: &[HalfEdge]) -> BTreeSet<u32> {
    slots.iter().map(|&s| state.vertex_root(s)).collect()
}

#[cfg(test)]
mod tests;
