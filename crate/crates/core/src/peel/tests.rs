use std::collections::HashMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::cmap::{sample_pairing, CornerRef, VertexId};

/// Structural invariants of a partial gluing, recomputed from scratch.
fn check_invariants(s: &PeelState) {
    let n = s.n();
    assert_eq!(s.boundary_len(), 6 * n - 2 * s.step());
    let holes = s.holes();
    assert_eq!(holes.len(), s.hole_count());
    let total: usize = holes.iter().map(Vec::len).sum();
    assert_eq!(total, s.boundary_len());
    let mut loops = 0;
    for hole in &holes {
        assert!(!hole.is_empty());
        loops += (hole.len() == 1) as usize;
        for &h in hole {
            assert_eq!(s.hole_perimeter(HalfEdge(h)), Some(hole.len()));
        }
    }
    assert_eq!(loops, s.loop_count());

    // Every temporary vertex occupies exactly one boundary position, and
    // the position between x and succ(x) belongs to the vertex of next(x).
    let mut positions: HashMap<u32, usize> = HashMap::new();
    for &x in s.unmatched() {
        let x = HalfEdge(x);
        let y = s.hole_successor(x).unwrap();
        assert_eq!(s.vertex_root(x.next()), s.vertex_root(y));
        *positions.entry(s.vertex_root(y)).or_default() += 1;
        assert_eq!(s.outgoing_boundary_edge(y), Some(y));
    }
    assert!(positions.values().all(|&c| c == 1), "vertex on two boundary arcs");
    let classes = s.vertex_classes();
    let true_count = classes
        .iter()
        .filter(|c| !positions.contains_key(&s.vertex_root(HalfEdge(c[0]))))
        .count();
    assert_eq!(true_count, s.true_vertex_count());
    for c in &classes {
        let open = positions.contains_key(&s.vertex_root(HalfEdge(c[0])));
        assert_eq!(open, !s.is_true_vertex(HalfEdge(c[0])));
    }
    for t in 0..2 * n as u32 {
        assert_eq!(s.component_boundary_edges(t), s.component_temporary_vertices(t));
    }
}

#[test]
fn initial_state() {
    let s = PeelState::new(2).unwrap();
    assert_eq!(s.hole_count(), 4);
    assert_eq!(s.boundary_len(), 12);
    assert!(s.holes().iter().all(|h| h.len() == 3));
    assert_eq!(s.true_vertex_count(), 0);
    let s1 = PeelState::new(1).unwrap();
    assert_eq!(s1.hole_count(), 2);
    assert!(PeelState::new(0).is_err());
    check_invariants(&s);
}

#[test]
fn first_gluing_merges_two_holes() {
    let mut s = PeelState::new(1).unwrap();
    let ev = s.glue(HalfEdge(0), HalfEdge(3)).unwrap();
    assert_eq!(ev.case, GlueCase::CrossHoleMerge);
    assert!(ev.closed.is_empty());
    assert_eq!(ev.boundary, 4);
    assert_eq!(s.hole_count(), 1);
    assert_eq!(s.holes()[0].len(), 4);
    assert!(s.same_component(0, 1));
    check_invariants(&s);
}

#[test]
fn neighbours_on_a_hole_close_a_vertex() {
    let mut s = PeelState::new(1).unwrap();
    s.glue(HalfEdge(0), HalfEdge(3)).unwrap();
    let a = HalfEdge(1);
    let b = s.hole_successor(a).unwrap();
    let ev = s.glue(a, b).unwrap();
    assert_eq!(ev.case, GlueCase::SameHoleAdjacent);
    assert_eq!(ev.closed.len(), 1);
    check_invariants(&s);
    // Perimeter 2 left: the last gluing closes two vertices.
    let rest: Vec<u32> = s.unmatched().to_vec();
    let ev = s.glue(HalfEdge(rest[0]), HalfEdge(rest[1])).unwrap();
    assert_eq!(ev.case, GlueCase::SameHoleAdjacent);
    assert_eq!(ev.closed.len(), 2);
    check_invariants(&s);
}

#[test]
fn two_loops_close_a_vertex() {
    // Fold each triangle onto itself except one side, leaving two loops.
    let mut s = PeelState::new(1).unwrap();
    let ev = s.glue(HalfEdge(0), HalfEdge(1)).unwrap();
    assert_eq!(ev.case, GlueCase::SameHoleAdjacent);
    s.glue(HalfEdge(3), HalfEdge(4)).unwrap();
    assert_eq!(s.loop_count(), 2);
    let ev = s.glue(HalfEdge(2), HalfEdge(5)).unwrap();
    assert_eq!(ev.case, GlueCase::LoopToLoop);
    assert_eq!(ev.closed.len(), 1);
    assert_eq!(s.hole_count(), 0);
    check_invariants(&s);
    let t = build_triangulation(s.finished_pairing().unwrap()).unwrap();
    assert_eq!(t.vertex_count(), s.true_vertex_count());
}

#[test]
fn glue_guards() {
    let mut s = PeelState::new(1).unwrap();
    assert!(s.glue(HalfEdge(0), HalfEdge(0)).is_err());
    s.glue(HalfEdge(0), HalfEdge(3)).unwrap();
    assert!(matches!(s.glue(HalfEdge(0), HalfEdge(1)), Err(Error::InvalidArgument(_))));
    assert!(s.glue(HalfEdge(1), HalfEdge(60)).is_err());
}

#[test]
fn torus_replay() {
    let p = Pairing::from_pairs(1, &[(0, 3), (1, 4), (2, 5)]).unwrap();
    for algo in [
        &mut SmallestFirst::default() as &mut dyn PeelAlgorithm,
        &mut LargestFirst::default(),
        &mut UniformEdge::new(3),
        &mut FollowBoundary::default(),
    ] {
        let (t, events) = run_to_completion(1, algo, PartnerSource::Replay(&p)).unwrap();
        assert_eq!(t.vertex_count(), 1);
        assert_eq!(t.genus(), 1);
        assert_eq!(events.len(), 3);
        let closed: usize = events.iter().map(|e| e.closed.len()).sum();
        assert_eq!(closed, 1);
    }
}

#[test]
fn replay_mismatch_is_rejected() {
    let p = sample_pairing(3, 1).unwrap();
    assert!(run_to_completion(2, &mut SmallestFirst::default(), PartnerSource::Replay(&p)).is_err());
}

#[test]
fn random_partner_guards_and_forced_choice() {
    let mut s = PeelState::new(1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    s.glue(HalfEdge(0), HalfEdge(3)).unwrap();
    assert!(matches!(s.random_partner(HalfEdge(0), &mut rng), Err(Error::InvalidState(_))));
    s.glue(HalfEdge(1), HalfEdge(4)).unwrap();
    for _ in 0..10 {
        assert_eq!(s.random_partner(HalfEdge(2), &mut rng).unwrap(), HalfEdge(5));
    }
    s.glue(HalfEdge(2), HalfEdge(5)).unwrap();
    assert!(s.random_partner(HalfEdge(2), &mut rng).is_err());
}

#[test]
fn random_partner_is_uniform() {
    let s = PeelState::new(1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let draws = 100_000;
    let mut counts = [0usize; 6];
    for _ in 0..draws {
        counts[s.random_partner(HalfEdge(0), &mut rng).unwrap().index()] += 1;
    }
    assert_eq!(counts[0], 0);
    let p = 0.2;
    let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
    for &c in &counts[1..] {
        assert!((c as f64 - draws as f64 * p).abs() < 3.0 * sigma, "{counts:?}");
    }
}

#[test]
fn trace_counters_track_component() {
    let p = sample_pairing(30, 5).unwrap();
    let mut s = PeelState::new(30).unwrap();
    s.track_component(0);
    let mut algo = FollowBoundary::default();
    // Start the walk on triangle 0.
    let mut first = true;
    while s.boundary_len() > 0 {
        let a = if first { HalfEdge(0) } else { algo.next_edge(&s) };
        first = false;
        s.glue(a, p.partner(a)).unwrap();
        algo.last = Some(a);
    }
    let tr = s.trace();
    assert_eq!(tr.len(), 90);
    assert!(tr.iter().all(|c| c.boundary_edges == c.boundary_vertices));
    assert_eq!(tr.last().unwrap().boundary_edges, 0);
    assert!(tr.windows(2).all(|w| w[1].closure_times >= w[0].closure_times));
}

#[test]
fn event_trace_lines() {
    let p = Pairing::from_pairs(1, &[(0, 3), (1, 4), (2, 5)]).unwrap();
    let (_, events) = run_to_completion(1, &mut SmallestFirst::default(), PartnerSource::Replay(&p)).unwrap();
    let text = String::from_utf8(encode_event_trace(&events)).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(
        lines[0],
        r#"{"i":1,"a":0,"b":3,"case":"cross-hole-merge","closed":[],"boundary":4}"#
    );
    let last: EventRecord = serde_json::from_str(lines[2]).unwrap();
    assert_eq!(last.boundary, 0);
    assert_eq!(last.closed.len(), 1);
}

#[test]
fn tiny_on_torus() {
    let p = Pairing::from_pairs(1, &[(0, 3), (1, 4), (2, 5)]).unwrap();
    let t = build_triangulation(p.clone()).unwrap();
    let rep = oracle_check_tiny(&t, VertexId(0));
    assert_eq!(rep.hub, Some((VertexId(0), 0)));
    assert_eq!(rep.max_degree, 6);
    let out = explore_tiny(&p, CornerRef::new(0)).unwrap();
    assert!(verify_outcome(&t, ExplorationKind::Tiny { c: CornerRef::new(0) }, &out).confirmed);
}

#[test]
fn pair_explorations_guard_inputs() {
    let p = sample_pairing(50, 2).unwrap();
    let same = explore_pair_large(&p, CornerRef::new(0), CornerRef::new(1), 0.3);
    assert!(matches!(same, Err(Error::InvalidArgument(_))));
    assert!(explore_pair_large(&p, CornerRef::new(0), CornerRef::new(3), 1.5).is_err());
    // Degrees supplied by hand far below the regime.
    let small = explore_pair_small_with_degrees(&p, CornerRef::new(0), CornerRef::new(3), 0.1, (1, 1));
    assert!(matches!(small, Err(Error::PreconditionUnmet(_))));
}

#[test]
fn large_oracle_reports_absence() {
    // Two separate tori: their vertices never share a face.
    let p = Pairing::from_pairs(2, &[(0, 3), (1, 4), (2, 5), (6, 9), (7, 10), (8, 11)]).unwrap();
    let t = build_triangulation(p).unwrap();
    let rep = oracle_check_large(&t, CornerRef::new(0), CornerRef::new(6), 0.1);
    assert!(rep.best.is_none());
    assert!(!rep.within_bounds);
    let rep = oracle_check_small(&t, VertexId(0), VertexId(1), 0.1);
    assert!(rep.shared_face.is_none() && rep.intermediate.is_none() && !rep.satisfied);
}

#[test]
fn degree_mismatch_when_degrees_are_wrong() {
    let (mut late, mut early) = (0, 0);
    for seed in 0..40 {
        let p = sample_pairing(400, seed).unwrap();
        let t = build_triangulation(p.clone()).unwrap();
        let degs = t.degrees();
        let v = (0..degs.len()).min_by_key(|&i| degs[i]).unwrap();
        let c1 = t.corners_of(VertexId(v as u32)).next().unwrap();
        let c2 = (0..2400)
            .map(CornerRef::new)
            .find(|c| c.triangle() != c1.triangle() && t.corner_vertex(*c) != t.corner_vertex(c1))
            .unwrap();
        let d1 = degs[v];
        // Understated: v1 is still open after the claimed degree.
        if d1 > 4 {
            let o = explore_pair_small_with_degrees(&p, c1, c2, 0.1, (4, 4)).unwrap();
            late += (o.status == ExplorationStatus::DegreeMismatch) as usize;
        }
        // Overstated: v1 closes before a quarter of the claimed degree.
        if 4 * (4 * d1 + 8) <= 729 {
            let o = explore_pair_small_with_degrees(&p, c1, c2, 0.1, (4 * d1 + 8, 4)).unwrap();
            early += (o.status == ExplorationStatus::DegreeMismatch) as usize;
        }
    }
    assert!(late > 0 && early > 0, "late {late}, early {early}");
}

fn run_checked(n: usize, seed: u64, algo: &mut dyn PeelAlgorithm) {
    let p = sample_pairing(n, seed).unwrap();
    let direct = build_triangulation(p.clone()).unwrap();
    let mut s = PeelState::new(n).unwrap();
    while s.boundary_len() > 0 {
        let a = algo.next_edge(&s);
        let b = p.partner(a);
        let per = s.hole_perimeter(a).unwrap();
        let ev = s.glue(a, b).unwrap();
        match ev.case {
            GlueCase::SameHoleAdjacent => {
                assert_eq!(ev.closed.len(), if per == 2 { 2 } else { 1 });
            }
            GlueCase::LoopToLoop => assert_eq!(ev.closed.len(), 1),
            _ => assert!(ev.closed.is_empty(), "{ev:?}"),
        }
        check_invariants(&s);
    }
    assert_eq!(s.true_vertex_count(), direct.vertex_count());
    let mut orbits: Vec<Vec<u32>> = direct
        .orbits()
        .iter()
        .map(|o| {
            let mut o = o.clone();
            o.sort_unstable();
            o
        })
        .collect();
    orbits.sort();
    assert_eq!(s.vertex_classes(), orbits);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn engine_invariants_hold(n in 1usize..25, seed in any::<u64>(), which in 0usize..4) {
        let mut algos: Vec<Box<dyn PeelAlgorithm>> = vec![
            Box::new(SmallestFirst::default()),
            Box::new(LargestFirst::default()),
            Box::new(UniformEdge::new(seed ^ 1)),
            Box::new(FollowBoundary::default()),
        ];
        run_checked(n, seed, algos[which].as_mut());
    }

    #[test]
    fn arc_distance_matches_corner_distance(n in 1usize..30, seed in any::<u64>(), k in any::<u32>()) {
        let p = sample_pairing(n, seed).unwrap();
        let t = build_triangulation(p.clone()).unwrap();
        let (s, _) = run_state_to_completion(n, &mut SmallestFirst::default(), PartnerSource::Replay(&p)).unwrap();
        let c = CornerRef::new(k % (6 * n as u32));
        for other in t.corners_of(t.corner_vertex(c)) {
            prop_assert_eq!(
                s.arc_distance(c.half_edge(), other.half_edge()),
                Some(corner_distance_of(&t, c, other))
            );
        }
    }
}

fn corner_distance_of(t: &Triangulation, a: CornerRef, b: CornerRef) -> usize {
    crate::cmap::corner_distance(t, a, b).unwrap()
}

#[test]
fn explorations_verify_on_random_maps() {
    let eps = 0.1;
    for seed in 0..60u64 {
        let n = 300;
        let p = sample_pairing(n, seed).unwrap();
        let t = build_triangulation(p.clone()).unwrap();
        let c = CornerRef::new((seed as u32 * 7) % (6 * n as u32));
        let out = explore_tiny(&p, c).unwrap();
        let rep = verify_outcome(&t, ExplorationKind::Tiny { c }, &out);
        assert!(rep.confirmed, "tiny seed {seed}: {}", rep.message);

        let c1 = CornerRef::new(0);
        let c2 = CornerRef::new(3 * (1 + seed as u32 % (2 * n as u32 - 1)));
        if let Ok(o) = explore_pair_large(&p, c1, c2, eps) {
            let rep = verify_outcome(&t, ExplorationKind::Large { c1, c2, eps }, &o);
            assert!(rep.confirmed, "large seed {seed}: {}", rep.message);
        }
        if let Ok(o) = explore_pair_small(&p, c1, c2, eps) {
            let rep = verify_outcome(&t, ExplorationKind::Small { c1, c2, eps }, &o);
            assert!(rep.confirmed, "small seed {seed}: {}", rep.message);
            let budget = red_budget(n, o.degrees.0, o.degrees.1, eps);
            assert!(o.red_durations.iter().all(|&d| d <= budget));
        }
    }
}

#[test]
fn quenched_law_is_uniform_at_one() {
    // 15 pairings of 6 half-edges; chi-square with 14 degrees of freedom.
    let runs = 100_000;
    let mut counts = HashMap::new();
    for seed in 0..runs {
        let mut algo = UniformEdge::new(seed ^ 0xABCD);
        let (state, _) = run_state_to_completion(1, &mut algo, PartnerSource::Quenched(seed)).unwrap();
        *counts.entry(state.finished_pairing().unwrap()).or_insert(0usize) += 1;
    }
    assert_eq!(counts.len(), 15);
    let expected = runs as f64 / 15.0;
    let chi2: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    // 99.9% quantile of chi-square(14) is 36.12.
    assert!(chi2 < 36.12, "chi2 = {chi2}");
}

#[test]
fn small_witness_beyond_bound_is_a_failure() {
    // Degrees (29, 8) at n = 150: the red budget is 2 steps but the distance
    // bound is 1.76, and the join lands at distance 3.
    let p = sample_pairing(150, 13_700_597_889_192_583_925).unwrap();
    let t = crate::cmap::build_triangulation(p.clone()).unwrap();
    let (c1, c2) = (CornerRef::new(141), CornerRef::new(182));
    assert_eq!((t.degree(t.corner_vertex(c1)), t.degree(t.corner_vertex(c2))), (29, 8));
    let o = explore_pair_small(&p, c1, c2, 0.1).unwrap();
    assert_eq!(o.status, ExplorationStatus::Fail);
    assert!(o.witness.is_none());
    assert!(verify_outcome(&t, ExplorationKind::Small { c1, c2, eps: 0.1 }, &o).confirmed);
}
