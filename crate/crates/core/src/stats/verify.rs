//! Invariant suite behind `belyi verify`.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{exact_topology_distribution, mix64};
use crate::cmap::{build_triangulation, decode_map, encode_map, pairing_count, sample_pairing, CornerRef};
use crate::error::Result;
use crate::metric::{
    build_component_graph, derive_params, diameter, hyp_chord, shortest_paths, DiameterMode, ParamOverrides,
    Sparsification,
};
use crate::peel::{
    explore_pair_large, explore_pair_small, explore_tiny, run_state_to_completion, verify_outcome, ExplorationKind,
    LargestFirst, PartnerSource, PeelAlgorithm, SmallestFirst, UniformEdge,
};
use crate::stats::Regime;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, run: impl FnOnce() -> Result<std::result::Result<String, String>>) -> CheckResult {
    let (passed, detail) = match run() {
        Ok(Ok(d)) => (true, d),
        Ok(Err(d)) => (false, d),
        Err(e) => (false, format!("error: {e}")),
    };
    CheckResult {
        name: name.into(),
        passed,
        detail,
    }
}

/// Runs every invariant check; `quick` shrinks sample counts.
pub fn run_suite(quick: bool, seed: u64) -> Vec<CheckResult> {
    let scale = if quick { 1 } else { 10 };
    vec![
        check("enumeration", || {
            let dist = exact_topology_distribution(1)?;
            let total: f64 = dist.values().sum();
            if pairing_count(1) == 15 && (total - 1.0).abs() < 1e-12 {
                Ok(Ok(format!("{} classes over 15 pairings", dist.len())))
            } else {
                Ok(Err(format!("probabilities sum to {total}")))
            }
        }),
        check("euler-parity", || {
            for (k, n) in [10usize, 100, 1000].into_iter().enumerate() {
                for i in 0..10 * scale {
                    let t = build_triangulation(sample_pairing(n, mix64(seed ^ (k * 100_000 + i) as u64))?)?;
                    for c in t.components() {
                        let chi = c.euler_characteristic();
                        if 2 * c.edges != 3 * c.faces || chi > 2 || chi % 2 != 0 || 2 - chi != 2 * c.genus as i64 {
                            return Ok(Err(format!("bad component {c:?} at n = {n}")));
                        }
                    }
                    if t.is_connected() && t.vertex_count() % 2 != n % 2 {
                        return Ok(Err(format!("V = {} with n = {n}", t.vertex_count())));
                    }
                }
            }
            Ok(Ok("all components have integral genus".into()))
        }),
        check("peel-replay", || {
            for n in [5usize, 20, 50] {
                for i in 0..5 * scale {
                    let s = mix64(seed.wrapping_add((n * 1000 + i) as u64));
                    let p = sample_pairing(n, s)?;
                    let t = build_triangulation(p.clone())?;
                    let direct: BTreeSet<Vec<u32>> = t
                        .orbits()
                        .iter()
                        .map(|o| {
                            let mut o = o.clone();
                            o.sort_unstable();
                            o
                        })
                        .collect();
                    let algos: [Box<dyn PeelAlgorithm>; 3] = [
                        Box::new(SmallestFirst::default()),
                        Box::new(LargestFirst::default()),
                        Box::new(UniformEdge::new(s)),
                    ];
                    for mut algo in algos {
                        let (state, events) = run_state_to_completion(n, algo.as_mut(), PartnerSource::Replay(&p))?;
                        if events.iter().enumerate().any(|(j, e)| e.boundary != 6 * n - 2 * (j + 1)) {
                            return Ok(Err(format!("boundary count off at n = {n}")));
                        }
                        let peeled: BTreeSet<Vec<u32>> = state
                            .vertex_classes()
                            .into_iter()
                            .map(|mut c| {
                                c.sort_unstable();
                                c
                            })
                            .collect();
                        if peeled != direct || state.finished_pairing().as_ref() != Some(&p) {
                            return Ok(Err(format!("vertex classes differ at n = {n}, seed {s}")));
                        }
                    }
                }
            }
            Ok(Ok("replay matches direct construction".into()))
        }),
        check("codec", || {
            for i in 0..10 * scale {
                let p = sample_pairing(1 + i % 40, mix64(seed ^ i as u64))?;
                if decode_map(&encode_map(&p))? != p {
                    return Ok(Err("round trip changed the pairing".into()));
                }
            }
            Ok(Ok("round trips".into()))
        }),
        check("metric", || {
            for r in [0.0, 0.5, 2.0, 6.0] {
                let d = hyp_chord(r, r, PI)?;
                if hyp_chord(r, r, 0.0)? != 0.0 || (d - 2.0 * r).abs() > 1e-12 * (2.0 * r).max(1.0) {
                    return Ok(Err(format!("chord analytic case fails at r = {r}")));
                }
            }
            let params = derive_params(0.1, 10.0, ParamOverrides::default())?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in 0..scale {
                let t = build_triangulation(sample_pairing(40, mix64(seed ^ (7 + i) as u64))?)?;
                let g = build_component_graph(&t, t.largest_component(), &params, Sparsification::Dyadic);
                let m = g.node_count() as u32;
                let all: Vec<Vec<f64>> = (0..m).map(|s| shortest_paths(&g, s)).collect::<Result<_>>()?;
                for _ in 0..500 {
                    let (a, b, c) = (
                        rng.gen_range(0..m) as usize,
                        rng.gen_range(0..m) as usize,
                        rng.gen_range(0..m) as usize,
                    );
                    if all[a][a] != 0.0
                        || (all[a][b] - all[b][a]).abs() > 1e-9
                        || all[a][c] > all[a][b] + all[b][c] + 1e-9
                    {
                        return Ok(Err("metric axioms violated".into()));
                    }
                }
                let exact = diameter(&g, DiameterMode::Exact)?.value;
                let sweep = diameter(&g, DiameterMode::Sweep { sources: 4, seed })?.value;
                if sweep > exact + 1e-9 {
                    return Ok(Err(format!("sweep {sweep} above exact {exact}")));
                }
            }
            Ok(Ok("axioms and diameter bounds hold".into()))
        }),
        check("explorations", || {
            let eps = 0.1;
            let n = 300;
            let mut checked = 0;
            for i in 0..5 * scale {
                let s = mix64(seed ^ (0xE0 + i) as u64);
                let p = sample_pairing(n, s)?;
                let t = build_triangulation(p.clone())?;
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                let c1 = CornerRef::new(rng.gen_range(0..6 * n as u32));
                let c2 = CornerRef::new(rng.gen_range(0..6 * n as u32));
                let mut runs = vec![(ExplorationKind::Tiny { c: c1 }, explore_tiny(&p, c1)?)];
                if c1.triangle() != c2.triangle() {
                    let d1 = t.degree(t.corner_vertex(c1));
                    let d2 = t.degree(t.corner_vertex(c2));
                    match Regime::classify(n, d1, d2, eps) {
                        Regime::Large => runs.push((ExplorationKind::Large { c1, c2, eps }, explore_pair_large(&p, c1, c2, eps)?)),
                        Regime::Small => runs.push((ExplorationKind::Small { c1, c2, eps }, explore_pair_small(&p, c1, c2, eps)?)),
                        Regime::Tiny => {}
                    }
                }
                for (kind, out) in runs {
                    let w = verify_outcome(&t, kind, &out);
                    if !w.confirmed {
                        return Ok(Err(format!("{kind:?}: {}", w.message)));
                    }
                    checked += 1;
                }
            }
            Ok(Ok(format!("{checked} outcomes confirmed")))
        }),
    ]
}
