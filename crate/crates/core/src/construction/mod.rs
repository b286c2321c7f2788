//! The game arena: an oriented, subdivided great rhombicosidodecahedron with
//! a hub ("unit") inside every decagon.
//!
//! Each of the 12 units is a center joined to its ten decagon corners by
//! directed spokes of `spoke` arcs. Corners alternate between exits (tails
//! of a unit-to-unit path, reached by an outbound spoke) and entries (heads
//! of such a path, left by an inbound spoke). Consecutive corners are joined
//! by a two-lane ladder that takes `chain` turns end to end in either
//! direction and one extra turn to switch lanes. Every green edge of the
//! solid becomes a one-way path of `green` arcs between neighbouring units.

mod flags;
mod icosahedron;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use flags::{build_flag_solid, orient_hexagons, FaceKind, Flag, FlagEdgeKind, FlagSolid};
pub use icosahedron::{build_icosahedron, Icosahedron, Vec3};

use crate::embedding::RotationSystem;
use crate::error::{Error, Result};
use crate::graph::{Digraph, VertexId};
use icosahedron::{add, ccw_order, cross, dot, norm, normalize, scale, slerp, sub};

pub const UNITS: usize = 12;
pub const CORNERS: usize = 10;
pub const EXITS: usize = 5;

/// Path lengths, in turns, of the three gadgets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionParams {
    /// Unit-to-unit path length.
    pub green: u32,
    /// Center-to-corner spoke length.
    pub spoke: u32,
    /// Corner-to-corner chain traverse length.
    pub chain: u32,
}

impl Default for ConstructionParams {
    fn default() -> Self {
        ConstructionParams {
            green: 1000,
            spoke: 10,
            chain: 16,
        }
    }
}

/// Timing inequality that makes the evader's exit budget fit inside the
/// travel time of a cop committed to a path toward the robber's unit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Admissibility {
    pub exit_budget: u64,
    pub threshold: u64,
    pub green: u64,
    pub admissible: bool,
}

impl std::fmt::Display for Admissibility {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let rel = if self.admissible { "<" } else { ">=" };
        write!(
            f,
            "exit budget {}, threshold {} {} green {} ({})",
            self.exit_budget,
            self.threshold,
            rel,
            self.green,
            if self.admissible {
                "admissible"
            } else {
                "not admissible"
            }
        )
    }
}

impl ConstructionParams {
    pub fn new(green: u32, spoke: u32, chain: u32) -> Self {
        ConstructionParams { green, spoke, chain }
    }

    pub fn validate(&self) -> Result<()> {
        if self.green < 2 {
            return Err(Error::InvalidParams(format!("green length {} < 2", self.green)));
        }
        if self.spoke < 1 {
            return Err(Error::InvalidParams("spoke length must be at least 1".into()));
        }
        if self.chain < 2 {
            return Err(Error::InvalidParams(format!("chain length {} < 2", self.chain)));
        }
        Ok(())
    }

    /// One lane reversal, a full perimeter circuit, then the detour back
    /// through the center (reversal, one chain, inbound spoke) and out again.
    pub fn exit_budget(&self) -> u64 {
        let (s, c) = (self.spoke as u64, self.chain as u64);
        1 + 10 * c + (1 + c + 2 * s)
    }

    /// Longest center-to-center detour guaranteed by the return subroutine.
    pub fn return_budget(&self) -> u64 {
        1 + self.chain as u64 + self.spoke as u64
    }

    pub fn admissible(&self) -> Admissibility {
        let exit_budget = self.exit_budget();
        let threshold = exit_budget + 2 * self.spoke as u64;
        Admissibility {
            exit_budget,
            threshold,
            green: self.green as u64,
            admissible: self.green as u64 > threshold,
        }
    }

    pub fn unit_size(&self) -> usize {
        let (s, c) = (self.spoke as usize, self.chain as usize);
        1 + CORNERS + CORNERS * (s - 1) + 2 * CORNERS * (c - 1)
    }

    /// Closed-form vertex count.
    pub fn vertex_count(&self) -> usize {
        UNITS * self.unit_size() + 60 * (self.green as usize - 1)
    }

    /// Closed-form arc count.
    pub fn arc_count(&self) -> usize {
        let (g, s, c) = (self.green as usize, self.spoke as usize, self.chain as usize);
        60 * g + 120 * s + 120 * (4 * c - 2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CornerKind {
    Exit,
    Entry,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpokeDir {
    Inbound,
    Outbound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lane {
    /// Runs from corner `i` to corner `i + 1`.
    Forward,
    /// Runs from corner `i + 1` back to corner `i`.
    Backward,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum VertexRole {
    Center {
        unit: u8,
    },
    /// `position` counts arcs from the center.
    Spoke {
        unit: u8,
        spoke: u8,
        position: u32,
        dir: SpokeDir,
    },
    Corner {
        unit: u8,
        corner: u8,
        kind: CornerKind,
    },
    /// `position` counts arcs from corner `chain` along the chain.
    Chain {
        unit: u8,
        chain: u8,
        lane: Lane,
        position: u32,
    },
    /// `position` counts arcs from the exit corner of unit `from`.
    Green {
        from: u8,
        to: u8,
        position: u32,
    },
}

/// Where a vertex sits at unit granularity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    Unit(usize),
    Transit { from: usize, to: usize },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Unit {
    pub id: usize,
    pub center: VertexId,
    /// Counter-clockwise from outside.
    pub corners: Vec<VertexId>,
    pub corner_kinds: Vec<CornerKind>,
    /// Neighbouring unit reached from (exit) or arriving at (entry) each corner.
    pub corner_peer: Vec<usize>,
    /// Green path index leaving (exit) or arriving at (entry) each corner.
    pub corner_path: Vec<usize>,
    /// Spoke nodes by corner, ordered by distance from the center.
    pub spokes: Vec<Vec<VertexId>>,
    /// Corner indices of the five exits, ascending.
    pub exits: Vec<usize>,
    /// Corner indices of the five entries, ascending.
    pub entries: Vec<usize>,
}

impl Unit {
    /// Exit corner index leading to `peer`, if adjacent.
    pub fn exit_toward(&self, peer: usize) -> Option<usize> {
        self.exits.iter().copied().find(|&c| self.corner_peer[c] == peer)
    }

    pub fn entry_from(&self, peer: usize) -> Option<usize> {
        self.entries.iter().copied().find(|&c| self.corner_peer[c] == peer)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GreenPath {
    pub from: usize,
    pub to: usize,
    pub exit: VertexId,
    pub entry: VertexId,
    pub exit_corner: usize,
    pub entry_corner: usize,
    /// Interior vertices in travel order.
    pub interior: Vec<VertexId>,
}

impl GreenPath {
    /// Exit, interior and entry in travel order.
    pub fn vertices(&self) -> Vec<VertexId> {
        let mut v = Vec::with_capacity(self.interior.len() + 2);
        v.push(self.exit);
        v.extend_from_slice(&self.interior);
        v.push(self.entry);
        v
    }
}

#[derive(Clone, Debug)]
pub struct Construction {
    pub params: ConstructionParams,
    pub graph: Arc<Digraph>,
    pub rotation: RotationSystem,
    pub roles: Vec<VertexRole>,
    pub units: Vec<Unit>,
    pub paths: Vec<GreenPath>,
    pub icosahedron: Icosahedron,
    /// Unit-sphere coordinates.
    pub coords: Vec<Vec3>,
}

struct Layout {
    unit_size: usize,
    s: usize,
    c: usize,
    g: usize,
}

impl Layout {
    fn base(&self, u: usize) -> usize {
        u * self.unit_size
    }
    fn center(&self, u: usize) -> usize {
        self.base(u)
    }
    fn corner(&self, u: usize, i: usize) -> usize {
        self.base(u) + 1 + i
    }
    fn spoke(&self, u: usize, i: usize, p: usize) -> usize {
        self.base(u) + 11 + i * (self.s - 1) + (p - 1)
    }
    fn chain(&self, u: usize, i: usize, lane: Lane, j: usize) -> usize {
        let b = self.base(u) + 11 + CORNERS * (self.s - 1) + i * 2 * (self.c - 1);
        match lane {
            Lane::Forward => b + (j - 1),
            Lane::Backward => b + (self.c - 1) + (j - 1),
        }
    }
    fn green(&self, path: usize, j: usize) -> usize {
        UNITS * self.unit_size + path * (self.g - 1) + (j - 1)
    }
}

impl Construction {
    pub fn assemble(params: ConstructionParams) -> Result<Self> {
        params.validate()?;
        let ico = build_icosahedron();
        let solid = build_flag_solid(&ico);
        let green_arcs = orient_hexagons(&solid);
        let (s, c, g) = (params.spoke as usize, params.chain as usize, params.green as usize);
        let lay = Layout {
            unit_size: params.unit_size(),
            s,
            c,
            g,
        };
        let n = params.vertex_count();
        let mut roles: Vec<Option<VertexRole>> = vec![None; n];
        let mut coords: Vec<Vec3> = vec![[0.0; 3]; n];
        let mut arcs: Vec<(u32, u32)> = Vec::with_capacity(params.arc_count());
        let mut units = Vec::with_capacity(UNITS);

        let is_tail: Vec<bool> = {
            let mut t = vec![false; solid.flags.len()];
            for &(a, _) in &green_arcs {
                t[a] = true;
            }
            t
        };
        let green_of: Vec<usize> = {
            // green arc index touching each flag
            let mut m = vec![usize::MAX; solid.flags.len()];
            for (k, &(a, b)) in green_arcs.iter().enumerate() {
                m[a] = k;
                m[b] = k;
            }
            m
        };
        // flag -> (unit, corner index)
        let mut corner_of = vec![(usize::MAX, usize::MAX); solid.flags.len()];

        for (kind, cyc) in &solid.faces {
            let FaceKind::Decagon(u) = *kind else { continue };
            // start the cyclic order at an exit for a stable corner numbering
            let start = (0..cyc.len()).find(|&k| is_tail[cyc[k]]).unwrap_or(0);
            let order: Vec<usize> = (0..CORNERS).map(|k| cyc[(start + k) % CORNERS]).collect();
            let center_pos = ico.coords[u];
            let center = lay.center(u);
            roles[center] = Some(VertexRole::Center { unit: u as u8 });
            coords[center] = center_pos;
            let mut corners = Vec::with_capacity(CORNERS);
            let mut kinds = Vec::with_capacity(CORNERS);
            let mut peers = Vec::with_capacity(CORNERS);
            let mut path_ids = Vec::with_capacity(CORNERS);
            let mut spokes = Vec::with_capacity(CORNERS);
            for (i, &fl) in order.iter().enumerate() {
                corner_of[fl] = (u, i);
                let v = lay.corner(u, i);
                let kind = if is_tail[fl] {
                    CornerKind::Exit
                } else {
                    CornerKind::Entry
                };
                roles[v] = Some(VertexRole::Corner {
                    unit: u as u8,
                    corner: i as u8,
                    kind,
                });
                coords[v] = solid.coords[fl];
                corners.push(VertexId::from(v));
                kinds.push(kind);
                let (a, b) = green_arcs[green_of[fl]];
                let other = if a == fl { b } else { a };
                peers.push(solid.flags[other].v);
                path_ids.push(green_of[fl]);

                // spoke
                let dir = match kind {
                    CornerKind::Exit => SpokeDir::Outbound,
                    CornerKind::Entry => SpokeDir::Inbound,
                };
                let mut chain_ids = Vec::with_capacity(s);
                chain_ids.push(center);
                let mut spoke_nodes = Vec::with_capacity(s.saturating_sub(1));
                for p in 1..s {
                    let w = lay.spoke(u, i, p);
                    roles[w] = Some(VertexRole::Spoke {
                        unit: u as u8,
                        spoke: i as u8,
                        position: p as u32,
                        dir,
                    });
                    coords[w] = slerp(center_pos, solid.coords[fl], p as f64 / s as f64);
                    chain_ids.push(w);
                    spoke_nodes.push(VertexId::from(w));
                }
                chain_ids.push(v);
                for win in chain_ids.windows(2) {
                    match dir {
                        SpokeDir::Outbound => arcs.push((win[0] as u32, win[1] as u32)),
                        SpokeDir::Inbound => arcs.push((win[1] as u32, win[0] as u32)),
                    }
                }
                spokes.push(spoke_nodes);
            }
            // ladders between consecutive corners
            for i in 0..CORNERS {
                let a = lay.corner(u, i);
                let b = lay.corner(u, (i + 1) % CORNERS);
                let (pa, pb) = (coords[a], coords[b]);
                let chord = norm(sub(pb, pa));
                let offset = 0.1 * chord;
                let mut fwd = vec![a];
                let mut bwd = vec![a];
                for j in 1..c {
                    let t = j as f64 / c as f64;
                    let p = add(scale(pa, 1.0 - t), scale(pb, t));
                    let radial = normalize(p);
                    let out = sub(p, center_pos);
                    let out = normalize(sub(out, scale(radial, dot(out, radial))));
                    let fv = lay.chain(u, i, Lane::Forward, j);
                    let bv = lay.chain(u, i, Lane::Backward, j);
                    roles[fv] = Some(VertexRole::Chain {
                        unit: u as u8,
                        chain: i as u8,
                        lane: Lane::Forward,
                        position: j as u32,
                    });
                    roles[bv] = Some(VertexRole::Chain {
                        unit: u as u8,
                        chain: i as u8,
                        lane: Lane::Backward,
                        position: j as u32,
                    });
                    coords[fv] = normalize(add(p, scale(out, offset)));
                    coords[bv] = normalize(sub(p, scale(out, offset)));
                    fwd.push(fv);
                    bwd.push(bv);
                    arcs.push((fv as u32, bv as u32));
                    arcs.push((bv as u32, fv as u32));
                }
                fwd.push(b);
                bwd.push(b);
                for w in fwd.windows(2) {
                    arcs.push((w[0] as u32, w[1] as u32));
                }
                for w in bwd.windows(2) {
                    arcs.push((w[1] as u32, w[0] as u32));
                }
            }
            let exits = (0..CORNERS).filter(|&i| kinds[i] == CornerKind::Exit).collect();
            let entries = (0..CORNERS).filter(|&i| kinds[i] == CornerKind::Entry).collect();
            units.push(Unit {
                id: u,
                center: VertexId::from(center),
                corners,
                corner_kinds: kinds,
                corner_peer: peers,
                corner_path: path_ids,
                spokes,
                exits,
                entries,
            });
        }
        units.sort_by_key(|u| u.id);

        let mut paths = Vec::with_capacity(green_arcs.len());
        for (k, &(a, b)) in green_arcs.iter().enumerate() {
            let (ua, ca) = corner_of[a];
            let (ub, cb) = corner_of[b];
            let exit = lay.corner(ua, ca);
            let entry = lay.corner(ub, cb);
            let mut seq = vec![exit];
            let mut interior = Vec::with_capacity(g - 1);
            for j in 1..g {
                let w = lay.green(k, j);
                roles[w] = Some(VertexRole::Green {
                    from: ua as u8,
                    to: ub as u8,
                    position: j as u32,
                });
                coords[w] = slerp(coords[exit], coords[entry], j as f64 / g as f64);
                seq.push(w);
                interior.push(VertexId::from(w));
            }
            seq.push(entry);
            for w in seq.windows(2) {
                arcs.push((w[0] as u32, w[1] as u32));
            }
            paths.push(GreenPath {
                from: ua,
                to: ub,
                exit: VertexId::from(exit),
                entry: VertexId::from(entry),
                exit_corner: ca,
                entry_corner: cb,
                interior,
            });
        }

        let roles: Vec<VertexRole> = roles
            .into_iter()
            .enumerate()
            .map(|(v, r)| r.ok_or_else(|| Error::InvalidParams(format!("vertex {v} has no role"))))
            .collect::<Result<_>>()?;
        let graph = Digraph::new(n, arcs)?;
        let rotation = rotation_from_coords(&graph, &coords);
        Ok(Construction {
            params,
            graph: Arc::new(graph),
            rotation,
            roles,
            units,
            paths,
            icosahedron: ico,
            coords,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn role(&self, v: VertexId) -> VertexRole {
        self.roles[v.idx()]
    }

    pub fn unit_of(&self, v: VertexId) -> Result<Location> {
        self.graph.check_vertex(v)?;
        Ok(self.location(v))
    }

    /// Infallible [`Construction::unit_of`] for known-valid vertices.
    pub fn location(&self, v: VertexId) -> Location {
        match self.roles[v.idx()] {
            VertexRole::Center { unit }
            | VertexRole::Spoke { unit, .. }
            | VertexRole::Corner { unit, .. }
            | VertexRole::Chain { unit, .. } => Location::Unit(unit as usize),
            VertexRole::Green { from, to, .. } => Location::Transit {
                from: from as usize,
                to: to as usize,
            },
        }
    }

    pub fn unit_base(&self, u: usize) -> usize {
        u * self.params.unit_size()
    }

    /// Unit-local index for vertices inside a unit.
    pub fn local_index(&self, v: VertexId) -> Option<(usize, usize)> {
        let size = self.params.unit_size();
        let i = v.idx();
        if i < UNITS * size {
            Some((i / size, i % size))
        } else {
            None
        }
    }

    pub fn path_between(&self, from: usize, to: usize) -> Option<&GreenPath> {
        self.paths.iter().find(|p| p.from == from && p.to == to)
    }

    pub fn path_index(&self, from: usize, to: usize) -> Option<usize> {
        self.paths.iter().position(|p| p.from == from && p.to == to)
    }

    /// Index along the perimeter cycle: `corner * chain + position`.
    pub fn perimeter_position(&self, v: VertexId) -> Option<u32> {
        match self.roles[v.idx()] {
            VertexRole::Corner { corner, .. } => Some(corner as u32 * self.params.chain),
            VertexRole::Chain { chain, position, .. } => Some(chain as u32 * self.params.chain + position),
            _ => None,
        }
    }

    pub fn is_perimeter(&self, v: VertexId) -> bool {
        matches!(
            self.roles[v.idx()],
            VertexRole::Corner { .. } | VertexRole::Chain { .. }
        )
    }

    pub fn center_of(&self, u: usize) -> VertexId {
        self.units[u].center
    }

    pub fn unit_neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.icosahedron.neighbors(u).iter().map(|&w| w as usize)
    }

    pub fn units_adjacent(&self, a: usize, b: usize) -> bool {
        self.icosahedron.adjacent(a, b)
    }

    /// Stereographic projection from the pole opposite a face centroid, so
    /// no vertex lands at infinity.
    pub fn planar_layout(&self) -> Vec<[f64; 2]> {
        let t = self.icosahedron.faces[0];
        let c = &self.icosahedron.coords;
        let pole = normalize(add(add(c[t[0]], c[t[1]]), c[t[2]]));
        let seed = if pole[0].abs() < 0.9 {
            [1.0, 0.0, 0.0]
        } else {
            [0.0, 1.0, 0.0]
        };
        let e1 = normalize(sub(seed, scale(pole, dot(seed, pole))));
        let e2 = cross(pole, e1);
        self.coords
            .iter()
            .map(|&p| {
                let denom = 1.0 - dot(p, pole);
                [dot(p, e1) / denom, dot(p, e2) / denom]
            })
            .collect()
    }
}

/// Rotation system from angular order in each vertex's tangent plane.
fn rotation_from_coords(g: &Digraph, coords: &[Vec3]) -> RotationSystem {
    let nb = g.undirected_neighbors();
    let order = nb
        .iter()
        .enumerate()
        .map(|(v, list)| {
            let pts: Vec<Vec3> = list.iter().map(|&w| coords[w as usize]).collect();
            ccw_order(coords[v], coords[v], &pts)
                .into_iter()
                .map(|k| list[k])
                .collect()
        })
        .collect();
    RotationSystem::new(order)
}

pub fn admissible(params: &ConstructionParams) -> Admissibility {
    params.admissible()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Direction;

    fn small() -> Construction {
        Construction::assemble(ConstructionParams::new(30, 3, 4)).unwrap()
    }

    #[test]
    fn closed_form_counts() {
        let p = ConstructionParams::default();
        assert_eq!(p.vertex_count(), 64_752);
        assert_eq!(p.arc_count(), 68_640);
        let c = small();
        assert_eq!(c.graph.vertex_count(), c.params.vertex_count());
        assert_eq!(c.graph.arc_count(), c.params.arc_count());
    }

    #[test]
    fn admissibility_examples() {
        let a = ConstructionParams::new(1000, 10, 16).admissible();
        assert_eq!(a.exit_budget, 198);
        assert_eq!(a.threshold, 218);
        assert!(a.admissible);
        assert!(!ConstructionParams::new(100, 10, 16).admissible().admissible);
        assert!(ConstructionParams::new(250, 10, 16).admissible().admissible);
        assert!(!ConstructionParams::new(218, 10, 16).admissible().admissible);
        assert!(ConstructionParams::new(219, 10, 16).admissible().admissible);
    }

    #[test]
    fn rejects_bad_params() {
        for p in [(1, 10, 16), (100, 0, 16), (100, 10, 1)] {
            assert!(Construction::assemble(ConstructionParams::new(p.0, p.1, p.2)).is_err());
        }
    }

    #[test]
    fn structure_invariants() {
        let c = small();
        assert!(c.graph.strongly_connected());
        assert_eq!(c.units.len(), 12);
        assert_eq!(c.paths.len(), 60);
        for u in &c.units {
            assert_eq!(u.exits.len(), 5);
            assert_eq!(u.entries.len(), 5);
            for k in 0..CORNERS {
                assert_ne!(u.corner_kinds[k], u.corner_kinds[(k + 1) % CORNERS]);
            }
            let mut dests: Vec<usize> = u.exits.iter().map(|&e| u.corner_peer[e]).collect();
            dests.sort();
            let mut nb: Vec<usize> = c.unit_neighbors(u.id).collect();
            nb.sort();
            assert_eq!(dests, nb);
        }
        for p in &c.paths {
            assert!(c.units_adjacent(p.from, p.to));
            assert!(c.path_between(p.to, p.from).is_some());
            assert_eq!(c.units[p.from].corners[p.exit_corner], p.exit);
            assert_eq!(c.units[p.to].corners[p.entry_corner], p.entry);
            assert_eq!(c.units[p.from].corner_kinds[p.exit_corner], CornerKind::Exit);
            assert_eq!(c.units[p.to].corner_kinds[p.entry_corner], CornerKind::Entry);
        }
    }

    #[test]
    fn rotation_is_a_sphere_embedding() {
        let c = small();
        c.rotation.check_against(&c.graph).unwrap();
        assert_eq!(c.rotation.euler_characteristic().unwrap(), 2);
    }

    #[test]
    fn chain_gadget_timing() {
        let c = Construction::assemble(ConstructionParams::new(30, 3, 6)).unwrap();
        let u = &c.units[0];
        let chain = c.params.chain;
        for i in 0..CORNERS {
            let a = u.corners[i];
            let b = u.corners[(i + 1) % CORNERS];
            let da = c.graph.bfs_distances(a, Direction::Forward).unwrap();
            let db = c.graph.bfs_distances(b, Direction::Forward).unwrap();
            assert_eq!(da[b.idx()], chain);
            assert_eq!(db[a.idx()], chain);
        }
        // switching lanes costs exactly one arc everywhere inside a chain
        for v in 0..c.vertex_count() {
            if let VertexRole::Chain {
                unit,
                chain: k,
                lane,
                position,
            } = c.roles[v]
            {
                let other = c.graph.out_neighbors(VertexId::from(v)).find(|w| {
                    matches!(c.roles[w.idx()], VertexRole::Chain { unit: u2, chain: k2, lane: l2, position: p2 }
                            if u2 == unit && k2 == k && l2 != lane && p2 == position)
                });
                assert!(other.is_some());
            }
        }
    }

    #[test]
    fn unit_of_examples() {
        let c = small();
        assert_eq!(c.unit_of(c.center_of(3)).unwrap(), Location::Unit(3));
        let p = c.path_between(2, 7).or_else(|| {
            let q = &c.paths[0];
            Some(q)
        });
        let p = p.unwrap();
        let mid = p.interior[p.interior.len() / 2];
        assert_eq!(c.unit_of(mid).unwrap(), Location::Transit { from: p.from, to: p.to });
        let chain_node = (0..c.vertex_count())
            .find(|&v| matches!(c.roles[v], VertexRole::Chain { unit: 11, .. }))
            .unwrap();
        assert_eq!(c.unit_of(VertexId::from(chain_node)).unwrap(), Location::Unit(11));
        assert!(c.unit_of(VertexId(c.vertex_count() as u32)).is_err());
    }
}
