//! Point-to-point directed distances for cop routing.

use std::collections::VecDeque;
use std::sync::Arc;

use crate::construction::{Construction, VertexRole};
use crate::evader::UnitTables;
use crate::graph::{Digraph, Direction, VertexId, UNREACHABLE};

/// Exact distances on a construction arena in O(25) per query: local unit
/// tables plus exit-to-entry distances over the whole graph.
pub struct ArenaOracle {
    arena: Arc<Construction>,
    tables: Arc<UnitTables>,
    /// `[exit path][entry path]`, both indexed by green path.
    portal: Vec<u32>,
    paths: usize,
}

impl ArenaOracle {
    pub fn new(arena: Arc<Construction>, tables: Arc<UnitTables>) -> Self {
        let paths = arena.paths.len();
        let mut portal = vec![UNREACHABLE; paths * paths];
        for (i, p) in arena.paths.iter().enumerate() {
            let d = arena
                .graph
                .bfs_distances(p.exit, Direction::Forward)
                .expect("exit is a valid vertex");
            for (j, q) in arena.paths.iter().enumerate() {
                portal[i * paths + j] = d[q.entry.idx()];
            }
        }
        ArenaOracle {
            arena,
            tables,
            portal,
            paths,
        }
    }

    pub fn arena(&self) -> &Arc<Construction> {
        &self.arena
    }

    fn unit_to_unit(&self, ux: usize, lx: usize, uy: usize, ly: usize) -> u32 {
        let c = &self.arena;
        let t = &self.tables;
        let mut best = if ux == uy { t.dist(lx, ly) } else { UNREACHABLE };
        let from = &c.units[ux];
        let to = &c.units[uy];
        for &e in &from.exits {
            let a = t.dist(lx, 1 + e);
            if a >= best {
                continue;
            }
            let pi = from.corner_path[e];
            for &f in &to.entries {
                let pj = to.corner_path[f];
                let mid = self.portal[pi * self.paths + pj];
                if mid == UNREACHABLE {
                    continue;
                }
                best = best.min(a + mid + t.dist(1 + f, ly));
            }
        }
        best
    }

    pub fn dist(&self, x: VertexId, y: VertexId) -> u32 {
        let c = &self.arena;
        let g = c.params.green;
        let rx = c.role(x);
        let ry = c.role(y);
        if let (
            VertexRole::Green {
                from: a,
                to: b,
                position: p,
            },
            VertexRole::Green {
                from: a2,
                to: b2,
                position: q,
            },
        ) = (rx, ry)
        {
            if (a, b) == (a2, b2) && q >= p {
                return q - p;
            }
        }
        // leave a green path at its entry corner
        let (x, lead) = match rx {
            VertexRole::Green { from, to, position } => {
                let p = c.path_between(from as usize, to as usize).expect("path exists");
                (p.entry, g - position)
            }
            _ => (x, 0),
        };
        // join y's green path at its exit corner
        let (y, tail) = match ry {
            VertexRole::Green { from, to, position } => {
                let p = c.path_between(from as usize, to as usize).expect("path exists");
                (p.exit, position)
            }
            _ => (y, 0),
        };
        let (ux, lx) = c.local_index(x).expect("unit vertex");
        let (uy, ly) = c.local_index(y).expect("unit vertex");
        let mid = self.unit_to_unit(ux, lx, uy, ly);
        if mid == UNREACHABLE {
            UNREACHABLE
        } else {
            lead + mid + tail
        }
    }
}

/// Backward BFS from the most recent target, recomputed on change.
#[derive(Default)]
pub struct BfsCache {
    target: Option<VertexId>,
    dist: Vec<u32>,
}

impl BfsCache {
    pub fn dist(&mut self, g: &Digraph, x: VertexId, target: VertexId) -> u32 {
        if self.target != Some(target) {
            self.dist = g.bfs_distances(target, Direction::Backward).expect("valid target");
            self.target = Some(target);
        }
        self.dist[x.idx()]
    }
}

/// Distance source used by routing strategies.
pub enum Distances {
    Bfs(BfsCache),
    Arena(Arc<ArenaOracle>),
}

impl Distances {
    pub fn bfs() -> Self {
        Distances::Bfs(BfsCache::default())
    }

    pub fn dist(&mut self, g: &Digraph, x: VertexId, target: VertexId) -> u32 {
        match self {
            Distances::Bfs(c) => c.dist(g, x, target),
            Distances::Arena(o) => o.dist(x, target),
        }
    }

    /// One step along a shortest path; stays if the target is unreachable.
    pub fn step_toward(&mut self, g: &Digraph, from: VertexId, target: VertexId) -> VertexId {
        if from == target {
            return from;
        }
        let here = self.dist(g, from, target);
        if here == UNREACHABLE {
            return from;
        }
        let mut best = from;
        let mut best_d = here;
        for &w in g.out_raw(from.idx()) {
            let w = VertexId(w);
            let d = self.dist(g, w, target);
            if d < best_d {
                best_d = d;
                best = w;
            }
        }
        best
    }
}

/// Shortest path avoiding `blocked` vertices (except the target).
pub fn path_avoiding(g: &Digraph, from: VertexId, to: VertexId, blocked: &[bool]) -> Option<Vec<VertexId>> {
    let n = g.vertex_count();
    let mut prev = vec![u32::MAX; n];
    let mut seen = vec![false; n];
    seen[from.idx()] = true;
    let mut q = VecDeque::from([from.0]);
    while let Some(x) = q.pop_front() {
        if x == to.0 {
            let mut path = vec![to];
            let mut z = x;
            while z != from.0 {
                z = prev[z as usize];
                path.push(VertexId(z));
            }
            path.reverse();
            return Some(path);
        }
        for &y in g.out_raw(x as usize) {
            let yi = y as usize;
            if !seen[yi] && (!blocked[yi] || y == to.0) {
                seen[yi] = true;
                prev[yi] = x;
                q.push_back(y);
            }
        }
    }
    None
}
