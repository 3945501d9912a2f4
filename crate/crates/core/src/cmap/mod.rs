//! Half-edge combinatorial maps for gluings of `2n` oriented triangles.
//!
//! Half-edge `h` lives on triangle `h / 3`; inside its triangle the sides are
//! ordered cyclically by [`HalfEdge::next`]. A [`Pairing`] glues the sides two
//! by two. The corner at the origin of `h` is identified with the corner at
//! the origin of `next(partner(h))`, so vertices are the cycles of
//! `h -> next(partner(h))`.

mod codec;
mod enumerate;

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::unionfind::UnionFind;

pub use codec::{decode_map, encode_map, read_map_file, write_map_file, MAP_HEADER};
pub use enumerate::{enumerate_pairings, pairing_count, ENUMERATION_LIMIT};

/// A side of one of the triangles, oriented by its triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HalfEdge(pub u32);

impl HalfEdge {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn triangle(self) -> u32 {
        self.0 / 3
    }

    #[inline]
    pub fn next(self) -> HalfEdge {
        let base = self.0 - self.0 % 3;
        HalfEdge(base + (self.0 + 1) % 3)
    }

    #[inline]
    pub fn prev(self) -> HalfEdge {
        let base = self.0 - self.0 % 3;
        HalfEdge(base + (self.0 + 2) % 3)
    }
}

impl fmt::Display for HalfEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "h{}", self.0)
    }
}

/// Corner of `triangle(h)` sitting at the origin of `h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CornerRef(pub HalfEdge);

impl CornerRef {
    pub fn new(h: u32) -> Self {
        CornerRef(HalfEdge(h))
    }

    pub fn half_edge(self) -> HalfEdge {
        self.0
    }

    pub fn triangle(self) -> u32 {
        self.0.triangle()
    }
}

/// Index of a vertex (an orbit of `next ∘ partner`) in a [`Triangulation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub u32);

/// Fixed-point-free involution on the `6n` half-edges of `2n` triangles.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pairing {
    n: usize,
    partner: Vec<u32>,
}

impl Pairing {
    /// Validates `partner` as a fixed-point-free involution on `6n` points.
    pub fn new(n: usize, partner: Vec<u32>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n must be at least 1"));
        }
        if partner.len() != 6 * n {
            return Err(Error::invalid(format!(
                "expected {} partners for n = {}, got {}",
                6 * n,
                n,
                partner.len()
            )));
        }
        if let Some(pos) = involution_defect(&partner) {
            return Err(Error::invalid(format!(
                "partner table is not a fixed-point-free involution at half-edge {pos}"
            )));
        }
        Ok(Pairing { n, partner })
    }

    /// Builds from an explicit list of glued pairs.
    pub fn from_pairs(n: usize, pairs: &[(u32, u32)]) -> Result<Self> {
        let mut partner = vec![u32::MAX; 6 * n];
        for &(a, b) in pairs {
            for h in [a, b] {
                if h as usize >= partner.len() {
                    return Err(Error::invalid(format!("half-edge {h} out of range")));
                }
                if partner[h as usize] != u32::MAX {
                    return Err(Error::invalid(format!("half-edge {h} paired twice")));
                }
            }
            partner[a as usize] = b;
            partner[b as usize] = a;
        }
        Pairing::new(n, partner)
    }

    pub(crate) fn from_raw_unchecked(n: usize, partner: Vec<u32>) -> Self {
        debug_assert!(involution_defect(&partner).is_none());
        Pairing { n, partner }
    }

    /// Number of triangles is `2n`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_edge_count(&self) -> usize {
        self.partner.len()
    }

    #[inline]
    pub fn partner(&self, h: HalfEdge) -> HalfEdge {
        HalfEdge(self.partner[h.index()])
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.partner
    }

    /// The next corner around the same vertex.
    #[inline]
    pub fn rotate(&self, h: HalfEdge) -> HalfEdge {
        self.partner(h).next()
    }
}

/// First half-edge where `partner` fails to be a fixed-point-free involution.
pub(crate) fn involution_defect(partner: &[u32]) -> Option<usize> {
    let m = partner.len();
    partner.iter().enumerate().find_map(|(h, &p)| {
        let ok = (p as usize) < m && p as usize != h && partner[p as usize] as usize == h;
        (!ok).then_some(h)
    })
}

/// Uniform random gluing of `2n` triangles, deterministic in `(n, seed)`.
pub fn sample_pairing(n: usize, seed: u64) -> Result<Pairing> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sample_pairing_with(n, &mut rng))
}

/// Shuffles the half-edges and glues consecutive entries; every perfect
/// matching arises from exactly `(3n)! 2^{3n}` orderings, hence uniformity.
pub fn sample_pairing_with<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Pairing {
    let m = 6 * n;
    let mut order: Vec<u32> = (0..m as u32).collect();
    order.shuffle(rng);
    let mut partner = vec![0u32; m];
    for pair in order.chunks_exact(2) {
        partner[pair[0] as usize] = pair[1];
        partner[pair[1] as usize] = pair[0];
    }
    Pairing::from_raw_unchecked(n, partner)
}

/// Euler data of one connected component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentTopology {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub genus: usize,
}

impl ComponentTopology {
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices as i64 - self.edges as i64 + self.faces as i64
    }
}

/// A pairing together with its vertices, components and topology.
#[derive(Debug, Clone)]
pub struct Triangulation {
    pairing: Pairing,
    orbits: Vec<Vec<u32>>,
    vertex_of: Vec<u32>,
    position: Vec<u32>,
    component_of_triangle: Vec<u32>,
    component_of_vertex: Vec<u32>,
    components: Vec<ComponentTopology>,
}

/// Degree and ordered corner cycle of one vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexData {
    pub id: VertexId,
    pub degree: usize,
    pub corners: Vec<CornerRef>,
}

impl Triangulation {
    pub fn pairing(&self) -> &Pairing {
        &self.pairing
    }

    pub fn n(&self) -> usize {
        self.pairing.n
    }

    pub fn vertex_count(&self) -> usize {
        self.orbits.len()
    }

    pub fn orbits(&self) -> &[Vec<u32>] {
        &self.orbits
    }

    #[inline]
    pub fn vertex_of(&self, h: HalfEdge) -> VertexId {
        VertexId(self.vertex_of[h.index()])
    }

    #[inline]
    pub fn corner_vertex(&self, c: CornerRef) -> VertexId {
        self.vertex_of(c.0)
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.orbits[v.0 as usize].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.orbits.iter().map(Vec::len).collect()
    }

    /// Position of the corner inside its vertex's orbit.
    #[inline]
    pub fn orbit_position(&self, c: CornerRef) -> usize {
        self.position[c.0.index()] as usize
    }

    pub fn corners_of(&self, v: VertexId) -> impl Iterator<Item = CornerRef> + '_ {
        self.orbits[v.0 as usize]
            .iter()
            .map(|&h| CornerRef::new(h))
    }

    pub fn components(&self) -> &[ComponentTopology] {
        &self.components
    }

    pub fn is_connected(&self) -> bool {
        self.components.len() == 1
    }

    pub fn component_of_triangle(&self, t: u32) -> usize {
        self.component_of_triangle[t as usize] as usize
    }

    pub fn component_of_vertex(&self, v: VertexId) -> usize {
        self.component_of_vertex[v.0 as usize] as usize
    }

    /// Sum of component genera.
    pub fn genus(&self) -> usize {
        self.components.iter().map(|c| c.genus).sum()
    }

    /// Index of the component with the most triangles (lowest index on ties).
    pub fn largest_component(&self) -> usize {
        let mut best = 0;
        for (i, c) in self.components.iter().enumerate() {
            if c.faces > self.components[best].faces {
                best = i;
            }
        }
        best
    }

    /// The three vertices of a triangle, in corner order.
    pub fn triangle_vertices(&self, t: u32) -> [VertexId; 3] {
        let b = 3 * t;
        [
            VertexId(self.vertex_of[b as usize]),
            VertexId(self.vertex_of[b as usize + 1]),
            VertexId(self.vertex_of[b as usize + 2]),
        ]
    }

    /// Vertices sharing a triangle with each vertex, deduplicated and sorted.
    pub fn vertex_adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.orbits.len()];
        for t in 0..2 * self.n() as u32 {
            let vs = self.triangle_vertices(t);
            for i in 0..3 {
                for j in 0..3 {
                    if vs[i] != vs[j] {
                        adj[vs[i].0 as usize].push(vs[j].0);
                    }
                }
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }
}

/// Computes vertex orbits, components and per-component genus.
pub fn build_triangulation(pairing: Pairing) -> Result<Triangulation> {
    if let Some(pos) = involution_defect(&pairing.partner) {
        return Err(Error::invalid(format!(
            "malformed involution at half-edge {pos}"
        )));
    }
    let m = pairing.half_edge_count();
    let faces = m / 3;

    let mut vertex_of = vec![u32::MAX; m];
    let mut position = vec![0u32; m];
    let mut orbits = Vec::new();
    for start in 0..m as u32 {
        if vertex_of[start as usize] != u32::MAX {
            continue;
        }
        let id = orbits.len() as u32;
        let mut orbit = Vec::new();
        let mut h = HalfEdge(start);
        loop {
            vertex_of[h.index()] = id;
            position[h.index()] = orbit.len() as u32;
            orbit.push(h.0);
            h = pairing.rotate(h);
            if h.0 == start {
                break;
            }
        }
        orbits.push(orbit);
    }

    let mut uf = UnionFind::new(faces);
    for h in 0..m as u32 {
        let p = pairing.partner[h as usize];
        uf.union(h / 3, p / 3);
    }
    let mut component_of_triangle = vec![u32::MAX; faces];
    let mut root_slot = vec![u32::MAX; faces];
    let mut components: Vec<ComponentTopology> = Vec::new();
    for t in 0..faces as u32 {
        let r = uf.find(t) as usize;
        if root_slot[r] == u32::MAX {
            root_slot[r] = components.len() as u32;
            components.push(ComponentTopology {
                vertices: 0,
                edges: 0,
                faces: 0,
                genus: 0,
            });
        }
        component_of_triangle[t as usize] = root_slot[r];
        components[root_slot[r] as usize].faces += 1;
    }
    let mut component_of_vertex = Vec::with_capacity(orbits.len());
    for orbit in &orbits {
        let c = component_of_triangle[(orbit[0] / 3) as usize];
        component_of_vertex.push(c);
        components[c as usize].vertices += 1;
    }
    for comp in &mut components {
        comp.edges = 3 * comp.faces / 2;
        let chi = comp.euler_characteristic();
        debug_assert!(chi <= 2 && (2 - chi) % 2 == 0);
        comp.genus = ((2 - chi) / 2) as usize;
    }

    Ok(Triangulation {
        pairing,
        orbits,
        vertex_of,
        position,
        component_of_triangle,
        component_of_vertex,
        components,
    })
}

/// Degree and ordered corner cycle of every vertex.
pub fn vertex_data(t: &Triangulation) -> Vec<VertexData> {
    t.orbits
        .iter()
        .enumerate()
        .map(|(i, orbit)| VertexData {
            id: VertexId(i as u32),
            degree: orbit.len(),
            corners: orbit.iter().map(|&h| CornerRef::new(h)).collect(),
        })
        .collect()
}

/// Number of orbit steps separating two corners of the same vertex, taken
/// in the shorter direction.
pub fn corner_distance(t: &Triangulation, c1: CornerRef, c2: CornerRef) -> Result<usize> {
    let m = t.pairing.half_edge_count();
    if c1.0.index() >= m || c2.0.index() >= m {
        return Err(Error::invalid("corner out of range"));
    }
    let v = t.corner_vertex(c1);
    if v != t.corner_vertex(c2) {
        return Err(Error::invalid(format!(
            "corners {} and {} lie on different vertices",
            c1.0, c2.0
        )));
    }
    let d = t.degree(v);
    let p1 = t.orbit_position(c1);
    let p2 = t.orbit_position(c2);
    let k = (p2 + d - p1) % d;
    Ok(k.min(d - k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn torus() -> Triangulation {
        build_triangulation(Pairing::from_pairs(1, &[(0, 3), (1, 4), (2, 5)]).unwrap()).unwrap()
    }

    #[test]
    fn half_edge_navigation() {
        for h in 0..30 {
            let e = HalfEdge(h);
            assert_eq!(e.next().next().next(), e);
            assert_eq!(e.next().triangle(), e.triangle());
            assert_eq!(e.next().prev(), e);
        }
        assert_eq!(HalfEdge(5).next(), HalfEdge(3));
    }

    #[test]
    fn sample_rejects_zero() {
        assert!(matches!(sample_pairing(0, 1), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn sample_is_deterministic() {
        assert_eq!(sample_pairing(1, 42).unwrap(), sample_pairing(1, 42).unwrap());
        assert_eq!(sample_pairing(17, 9).unwrap(), sample_pairing(17, 9).unwrap());
    }

    #[test]
    fn small_sampler_hits_all_fifteen() {
        let mut seen = std::collections::HashSet::new();
        for seed in 0..2000 {
            let p = sample_pairing(1, seed).unwrap();
            assert!(involution_defect(p.as_slice()).is_none());
            seen.insert(p.as_slice().to_vec());
        }
        assert_eq!(seen.len(), 15);
    }

    #[test]
    fn torus_orbit() {
        let t = torus();
        assert_eq!(t.orbits(), &[vec![0, 4, 2, 3, 1, 5]]);
        assert_eq!(t.vertex_count(), 1);
        assert_eq!(
            t.components(),
            &[ComponentTopology {
                vertices: 1,
                edges: 3,
                faces: 2,
                genus: 1
            }]
        );
        let data = vertex_data(&t);
        assert_eq!(data.len(), 1);
        assert_eq!(data[0].degree, 6);
    }

    #[test]
    fn sphere_with_three_vertices() {
        let t = build_triangulation(Pairing::from_pairs(1, &[(0, 3), (1, 5), (2, 4)]).unwrap())
            .unwrap();
        let mut orbits: Vec<Vec<u32>> = t
            .orbits()
            .iter()
            .map(|o| {
                let mut o = o.clone();
                o.sort();
                o
            })
            .collect();
        orbits.sort();
        assert_eq!(orbits, vec![vec![0, 4], vec![1, 3], vec![2, 5]]);
        assert_eq!(t.genus(), 0);
        assert!(vertex_data(&t).iter().all(|v| v.degree == 2));
    }

    #[test]
    fn self_glued_triangles_still_connected() {
        let t = build_triangulation(Pairing::from_pairs(1, &[(0, 1), (2, 3), (4, 5)]).unwrap())
            .unwrap();
        assert_eq!(t.orbits(), &[vec![0, 2, 4, 3], vec![1], vec![5]]);
        assert!(t.is_connected());
        assert_eq!(t.genus(), 0);
    }

    #[test]
    fn corner_distance_cases() {
        let t = torus();
        assert_eq!(corner_distance(&t, CornerRef::new(0), CornerRef::new(3)).unwrap(), 3);
        assert_eq!(corner_distance(&t, CornerRef::new(0), CornerRef::new(5)).unwrap(), 1);
        assert_eq!(corner_distance(&t, CornerRef::new(2), CornerRef::new(2)).unwrap(), 0);

        let t = build_triangulation(Pairing::from_pairs(1, &[(0, 1), (2, 3), (4, 5)]).unwrap())
            .unwrap();
        assert_eq!(corner_distance(&t, CornerRef::new(1), CornerRef::new(1)).unwrap(), 0);
        assert!(matches!(
            corner_distance(&t, CornerRef::new(1), CornerRef::new(5)),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn malformed_pairings_rejected() {
        assert!(Pairing::new(1, vec![0, 4, 5, 3, 1, 2]).is_err());
        assert!(Pairing::new(1, vec![1, 2, 0, 4, 5, 3]).is_err());
        assert!(Pairing::new(1, vec![3, 4, 5, 0, 1]).is_err());
    }
}
