//! Flags of the icosahedron as the vertices of the great
//! rhombicosidodecahedron, with face classification and the hexagon-driven
//! orientation of the unit-to-unit edges.

use std::collections::HashMap;

use super::icosahedron::{add, ccw_order, normalize, scale, Icosahedron, Vec3};
use crate::embedding::RotationSystem;

/// An incident (vertex, edge, face) triple of the base polyhedron.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Flag {
    pub v: usize,
    pub e: usize,
    pub f: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlagEdgeKind {
    /// Flags differ in the vertex: joins two decagons through a square and a
    /// hexagon.
    Green,
    /// Flags differ in the edge: decagon side shared with a hexagon.
    DecagonHexagon,
    /// Flags differ in the face: decagon side shared with a square.
    DecagonSquare,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceKind {
    Decagon(usize),
    Square(usize),
    Hexagon(usize),
}

#[derive(Clone, Debug)]
pub struct FlagSolid {
    pub flags: Vec<Flag>,
    pub coords: Vec<Vec3>,
    /// `(a, b, kind)` with `a < b`.
    pub edges: Vec<(usize, usize, FlagEdgeKind)>,
    /// Flag cycles, counter-clockwise from outside.
    pub faces: Vec<(FaceKind, Vec<usize>)>,
    pub rotation: RotationSystem,
    index: HashMap<Flag, usize>,
}

impl FlagSolid {
    pub fn flag_index(&self, f: Flag) -> Option<usize> {
        self.index.get(&f).copied()
    }

    /// The three neighbours of a flag, one per coordinate change, in the order
    /// (vertex change, edge change, face change).
    pub fn neighbors(&self, i: usize, ico: &Icosahedron) -> [usize; 3] {
        let fl = self.flags[i];
        let (a, b) = ico.edges[fl.e];
        let other_v = if a == fl.v { b } else { a };
        let tri = ico.faces[fl.f];
        // the other edge of face f through v
        let other_e = (0..3)
            .map(|k| {
                let (x, y) = (tri[k], tri[(k + 1) % 3]);
                ico.edge_index(x, y).unwrap()
            })
            .find(|&e| {
                let (x, y) = ico.edges[e];
                e != fl.e && (x == fl.v || y == fl.v)
            })
            .unwrap();
        let other_f = ico
            .faces
            .iter()
            .enumerate()
            .find(|(k, t)| *k != fl.f && t.contains(&a) && t.contains(&b))
            .map(|(k, _)| k)
            .unwrap();
        [
            self.index[&Flag { v: other_v, ..fl }],
            self.index[&Flag { e: other_e, ..fl }],
            self.index[&Flag { f: other_f, ..fl }],
        ]
    }
}

/// Flag coordinates: 6:2:1 barycentric weights on vertex, edge midpoint and
/// face centroid, pushed back to the unit sphere.
fn flag_point(ico: &Icosahedron, fl: Flag) -> Vec3 {
    let (a, b) = ico.edges[fl.e];
    let mid = scale(add(ico.coords[a], ico.coords[b]), 0.5);
    let t = ico.faces[fl.f];
    let cen = scale(
        add(add(ico.coords[t[0]], ico.coords[t[1]]), ico.coords[t[2]]),
        1.0 / 3.0,
    );
    normalize(add(add(scale(ico.coords[fl.v], 6.0), scale(mid, 2.0)), cen))
}

pub fn build_flag_solid(ico: &Icosahedron) -> FlagSolid {
    let mut flags = Vec::with_capacity(120);
    for (f, tri) in ico.faces.iter().enumerate() {
        for k in 0..3 {
            let (x, y) = (tri[k], tri[(k + 1) % 3]);
            let e = ico.edge_index(x, y).expect("face edge");
            flags.push(Flag { v: x, e, f });
            flags.push(Flag { v: y, e, f });
        }
    }
    flags.sort();
    let index: HashMap<Flag, usize> = flags.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let coords: Vec<Vec3> = flags.iter().map(|&f| flag_point(ico, f)).collect();

    let mut solid = FlagSolid {
        flags,
        coords,
        edges: Vec::new(),
        faces: Vec::new(),
        rotation: RotationSystem::new(vec![]),
        index,
    };

    let kinds = [
        FlagEdgeKind::Green,
        FlagEdgeKind::DecagonHexagon,
        FlagEdgeKind::DecagonSquare,
    ];
    let mut nbrs = Vec::with_capacity(solid.flags.len());
    for i in 0..solid.flags.len() {
        let nb = solid.neighbors(i, ico);
        for (k, &j) in nb.iter().enumerate() {
            if i < j {
                solid.edges.push((i, j, kinds[k]));
            }
        }
        nbrs.push(nb);
    }

    let ordered = |members: Vec<usize>, center: Vec3| -> Vec<usize> {
        let pts: Vec<Vec3> = members.iter().map(|&i| solid.coords[i]).collect();
        ccw_order(center, center, &pts)
            .into_iter()
            .map(|k| members[k])
            .collect()
    };
    let mut faces = Vec::new();
    for v in 0..ico.vertex_count() {
        let m: Vec<usize> = (0..solid.flags.len()).filter(|&i| solid.flags[i].v == v).collect();
        faces.push((FaceKind::Decagon(v), ordered(m, ico.coords[v])));
    }
    for (e, &(a, b)) in ico.edges.iter().enumerate() {
        let m: Vec<usize> = (0..solid.flags.len()).filter(|&i| solid.flags[i].e == e).collect();
        let c = normalize(add(ico.coords[a], ico.coords[b]));
        faces.push((FaceKind::Square(e), ordered(m, c)));
    }
    for (f, t) in ico.faces.iter().enumerate() {
        let m: Vec<usize> = (0..solid.flags.len()).filter(|&i| solid.flags[i].f == f).collect();
        let c = normalize(add(add(ico.coords[t[0]], ico.coords[t[1]]), ico.coords[t[2]]));
        faces.push((FaceKind::Hexagon(f), ordered(m, c)));
    }
    solid.faces = faces;

    let mut order = Vec::with_capacity(solid.flags.len());
    for (i, nb) in nbrs.iter().enumerate() {
        let pts: Vec<Vec3> = nb.iter().map(|&j| solid.coords[j]).collect();
        let c = solid.coords[i];
        order.push(ccw_order(c, c, &pts).into_iter().map(|k| nb[k] as u32).collect());
    }
    solid.rotation = RotationSystem::new(order);
    solid
}

/// Directions of the green edges: each hexagon is walked counter-clockwise
/// from outside and its green sides follow that walk. Returns `(tail, head)`
/// flag pairs; every green edge appears exactly once.
pub fn orient_hexagons(solid: &FlagSolid) -> Vec<(usize, usize)> {
    let mut arcs = Vec::with_capacity(60);
    for (kind, cyc) in &solid.faces {
        if let FaceKind::Hexagon(_) = kind {
            for k in 0..cyc.len() {
                let (p, q) = (cyc[k], cyc[(k + 1) % cyc.len()]);
                if solid.flags[p].v != solid.flags[q].v {
                    arcs.push((p, q));
                }
            }
        }
    }
    arcs
}

#[cfg(test)]
mod tests {
    use super::super::icosahedron::build_icosahedron;
    use super::*;

    #[test]
    fn census() {
        let ico = build_icosahedron();
        let s = build_flag_solid(&ico);
        assert_eq!(s.flags.len(), 120);
        assert_eq!(s.edges.len(), 180);
        let count = |p: fn(&FaceKind) -> bool| s.faces.iter().filter(|(k, _)| p(k)).count();
        assert_eq!(count(|k| matches!(k, FaceKind::Decagon(_))), 12);
        assert_eq!(count(|k| matches!(k, FaceKind::Square(_))), 30);
        assert_eq!(count(|k| matches!(k, FaceKind::Hexagon(_))), 20);
        let green = s.edges.iter().filter(|e| e.2 == FlagEdgeKind::Green).count();
        assert_eq!(green, 60);
    }

    #[test]
    fn rotation_gives_sixty_two_faces() {
        let ico = build_icosahedron();
        let s = build_flag_solid(&ico);
        let faces = s.rotation.faces().unwrap();
        assert_eq!(faces.len(), 62);
        let mut sizes: Vec<usize> = faces.iter().map(Vec::len).collect();
        sizes.sort();
        assert_eq!(sizes.iter().filter(|&&l| l == 4).count(), 30);
        assert_eq!(sizes.iter().filter(|&&l| l == 6).count(), 20);
        assert_eq!(sizes.iter().filter(|&&l| l == 10).count(), 12);
        assert_eq!(sizes.iter().sum::<usize>(), 2 * 180);
    }

    #[test]
    fn face_cycles_are_closed_walks_on_the_solid() {
        let ico = build_icosahedron();
        let s = build_flag_solid(&ico);
        for (_, cyc) in &s.faces {
            for k in 0..cyc.len() {
                let (a, b) = (cyc[k], cyc[(k + 1) % cyc.len()]);
                assert!(s.rotation.around(a).contains(&(b as u32)));
            }
        }
    }

    #[test]
    fn hexagon_orientation_properties() {
        let ico = build_icosahedron();
        let s = build_flag_solid(&ico);
        let arcs = orient_hexagons(&s);
        assert_eq!(arcs.len(), 60);
        // every green edge directed exactly once
        let mut und: Vec<(usize, usize)> = arcs.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        und.sort();
        und.dedup();
        assert_eq!(und.len(), 60);
        // per square: the two green sides point in opposite unit directions
        for (kind, cyc) in &s.faces {
            if let FaceKind::Square(_) = kind {
                let into: Vec<usize> = arcs
                    .iter()
                    .filter(|(a, b)| cyc.contains(a) && cyc.contains(b))
                    .map(|&(_, b)| s.flags[b].v)
                    .collect();
                assert_eq!(into.len(), 2);
                assert_ne!(into[0], into[1]);
            }
        }
        // per decagon: tails and heads alternate around the cycle
        for (kind, cyc) in &s.faces {
            if let FaceKind::Decagon(_) = kind {
                let is_tail: Vec<bool> = cyc.iter().map(|i| arcs.iter().any(|&(a, _)| a == *i)).collect();
                for k in 0..10 {
                    assert_ne!(is_tail[k], is_tail[(k + 1) % 10]);
                }
            }
        }
    }
}
