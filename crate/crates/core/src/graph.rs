//! Dense-index directed graphs with forward and backward adjacency.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a vertex in its owning [`Digraph`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for VertexId {
    #[inline]
    fn from(i: usize) -> Self {
        VertexId(i as u32)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Follow arcs tail to head.
    Forward,
    /// Follow arcs head to tail.
    Backward,
}

/// Marker for vertices a BFS did not reach.
pub const UNREACHABLE: u32 = u32::MAX;

/// An immutable directed graph stored as two CSR tables.
///
/// Parallel arcs and self-loops are rejected; antiparallel pairs are fine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    arcs: Vec<(u32, u32)>,
    out_off: Vec<u32>,
    out_adj: Vec<u32>,
    in_off: Vec<u32>,
    in_adj: Vec<u32>,
}

impl Digraph {
    /// Builds a graph from an arc list. Arc order is preserved and adjacency
    /// lists keep the order in which arcs appear.
    pub fn new(n: usize, arcs: Vec<(u32, u32)>) -> Result<Self> {
        let mut out_deg = vec![0u32; n + 1];
        let mut in_deg = vec![0u32; n + 1];
        for &(t, h) in &arcs {
            if t as usize >= n || h as usize >= n {
                return Err(Error::InvalidVertex(t.max(h) as usize));
            }
            if t == h {
                return Err(Error::SelfLoop(t as usize));
            }
            out_deg[t as usize + 1] += 1;
            in_deg[h as usize + 1] += 1;
        }
        for i in 0..n {
            out_deg[i + 1] += out_deg[i];
            in_deg[i + 1] += in_deg[i];
        }
        let mut out_adj = vec![0u32; arcs.len()];
        let mut in_adj = vec![0u32; arcs.len()];
        let mut op = out_deg.clone();
        let mut ip = in_deg.clone();
        for &(t, h) in &arcs {
            out_adj[op[t as usize] as usize] = h;
            op[t as usize] += 1;
            in_adj[ip[h as usize] as usize] = t;
            ip[h as usize] += 1;
        }
        let g = Digraph {
            n,
            arcs,
            out_off: out_deg,
            out_adj,
            in_off: in_deg,
            in_adj,
        };
        for v in 0..n {
            let outs = g.out_raw(v);
            for (i, a) in outs.iter().enumerate() {
                if outs[..i].contains(a) {
                    return Err(Error::ParallelArc(v, *a as usize));
                }
            }
        }
        Ok(g)
    }

    /// Builds a graph whose arcs are both orientations of each undirected edge.
    pub fn from_undirected(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let mut arcs = Vec::with_capacity(edges.len() * 2);
        for &(a, b) in edges {
            arcs.push((a, b));
            arcs.push((b, a));
        }
        Digraph::new(n, arcs)
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[(u32, u32)] {
        &self.arcs
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v.idx() < self.n {
            Ok(())
        } else {
            Err(Error::InvalidVertex(v.idx()))
        }
    }

    #[inline]
    pub fn out_raw(&self, v: usize) -> &[u32] {
        &self.out_adj[self.out_off[v] as usize..self.out_off[v + 1] as usize]
    }

    #[inline]
    pub fn in_raw(&self, v: usize) -> &[u32] {
        &self.in_adj[self.in_off[v] as usize..self.in_off[v + 1] as usize]
    }

    pub fn out_neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.out_raw(v.idx()).iter().map(|&w| VertexId(w))
    }

    pub fn in_neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.in_raw(v.idx()).iter().map(|&w| VertexId(w))
    }

    #[inline]
    pub fn out_degree(&self, v: VertexId) -> usize {
        self.out_raw(v.idx()).len()
    }

    #[inline]
    pub fn has_arc(&self, from: VertexId, to: VertexId) -> bool {
        self.out_raw(from.idx()).contains(&to.0)
    }

    /// Whether one agent may go from `from` to `to` in a single turn.
    #[inline]
    pub fn is_step(&self, from: VertexId, to: VertexId) -> bool {
        from == to || self.has_arc(from, to)
    }

    /// Undirected simple edges `(a, b)` with `a < b`, deduplicating
    /// antiparallel arc pairs, in first-appearance order.
    pub fn underlying_edges(&self) -> Vec<(u32, u32)> {
        let mut seen = std::collections::HashSet::with_capacity(self.arcs.len());
        let mut out = Vec::new();
        for &(t, h) in &self.arcs {
            let e = (t.min(h), t.max(h));
            if seen.insert(e) {
                out.push(e);
            }
        }
        out
    }

    /// Symmetric neighbour lists of the underlying undirected graph.
    pub fn undirected_neighbors(&self) -> Vec<Vec<u32>> {
        let mut nb = vec![Vec::new(); self.n];
        for (a, b) in self.underlying_edges() {
            nb[a as usize].push(b);
            nb[b as usize].push(a);
        }
        nb
    }

    /// Exact hop distances from `source`; [`UNREACHABLE`] marks the rest.
    pub fn bfs_distances(&self, source: VertexId, direction: Direction) -> Result<Vec<u32>> {
        self.check_vertex(source)?;
        Ok(self.multi_source_bfs(&[source], direction))
    }

    /// Distance from the nearest source (forward) or to the nearest source
    /// (backward).
    pub fn multi_source_bfs(&self, sources: &[VertexId], direction: Direction) -> Vec<u32> {
        let mut dist = vec![UNREACHABLE; self.n];
        let mut queue = VecDeque::with_capacity(self.n);
        for &s in sources {
            if dist[s.idx()] != 0 {
                dist[s.idx()] = 0;
                queue.push_back(s.0);
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize];
            let next = match direction {
                Direction::Forward => self.out_raw(u as usize),
                Direction::Backward => self.in_raw(u as usize),
            };
            for &w in next {
                if dist[w as usize] == UNREACHABLE {
                    dist[w as usize] = du + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// True iff every ordered pair of vertices is joined by a directed path.
    pub fn strongly_connected(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        let fwd = self.multi_source_bfs(&[VertexId(0)], Direction::Forward);
        let bwd = self.multi_source_bfs(&[VertexId(0)], Direction::Backward);
        fwd.iter().chain(bwd.iter()).all(|&d| d != UNREACHABLE)
    }

    /// Vertex sets of the strongly connected components (iterative Tarjan).
    pub fn strongly_connected_components(&self) -> Vec<Vec<VertexId>> {
        const NONE: u32 = u32::MAX;
        let n = self.n;
        let mut index = vec![NONE; n];
        let mut low = vec![0u32; n];
        let mut on_stack = vec![false; n];
        let mut stack: Vec<u32> = Vec::new();
        let mut comps = Vec::new();
        let mut counter = 0u32;
        let mut call: Vec<(u32, usize)> = Vec::new();
        for root in 0..n {
            if index[root] != NONE {
                continue;
            }
            call.push((root as u32, 0));
            index[root] = counter;
            low[root] = counter;
            counter += 1;
            stack.push(root as u32);
            on_stack[root] = true;
            while let Some(&mut (v, ref mut pos)) = call.last_mut() {
                let outs = self.out_raw(v as usize);
                if *pos < outs.len() {
                    let w = outs[*pos] as usize;
                    *pos += 1;
                    if index[w] == NONE {
                        index[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w as u32);
                        on_stack[w] = true;
                        call.push((w as u32, 0));
                    } else if on_stack[w] {
                        low[v as usize] = low[v as usize].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(parent, _)) = call.last() {
                        low[parent as usize] = low[parent as usize].min(low[v as usize]);
                    }
                    if low[v as usize] == index[v as usize] {
                        let mut comp = Vec::new();
                        loop {
                            let w = stack.pop().expect("tarjan stack underflow");
                            on_stack[w as usize] = false;
                            comp.push(VertexId(w));
                            if w == v {
                                break;
                            }
                        }
                        comps.push(comp);
                    }
                }
            }
        }
        comps
    }

    /// The subgraph induced by `keep`, with vertices renumbered in the order
    /// given. Returns the graph and the old-to-new map.
    pub fn induced(&self, keep: &[VertexId]) -> (Digraph, Vec<u32>) {
        let mut map = vec![UNREACHABLE; self.n];
        for (i, v) in keep.iter().enumerate() {
            map[v.idx()] = i as u32;
        }
        let arcs = self
            .arcs
            .iter()
            .filter(|(t, h)| map[*t as usize] != UNREACHABLE && map[*h as usize] != UNREACHABLE)
            .map(|&(t, h)| (map[t as usize], map[h as usize]))
            .collect();
        let g = Digraph::new(keep.len(), arcs).expect("induced subgraph of a valid graph");
        (g, map)
    }

    /// Shortest directed path from `from` to `to`, inclusive of both ends.
    pub fn shortest_path(&self, from: VertexId, to: VertexId) -> Option<Vec<VertexId>> {
        let dist = self.multi_source_bfs(&[to], Direction::Backward);
        if dist[from.idx()] == UNREACHABLE {
            return None;
        }
        let mut path = vec![from];
        let mut cur = from;
        while cur != to {
            let d = dist[cur.idx()];
            let next = self
                .out_raw(cur.idx())
                .iter()
                .copied()
                .find(|&w| dist[w as usize] + 1 == d)?;
            cur = VertexId(next);
            path.push(cur);
        }
        Some(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: u32) -> Digraph {
        Digraph::new(n as usize, (0..n).map(|i| (i, (i + 1) % n)).collect()).unwrap()
    }

    #[test]
    fn bfs_single_vertex() {
        let g = Digraph::new(1, vec![]).unwrap();
        assert_eq!(g.bfs_distances(VertexId(0), Direction::Forward).unwrap(), vec![0]);
    }

    #[test]
    fn bfs_directed_cycle() {
        let g = cycle(3);
        assert_eq!(g.bfs_distances(VertexId(0), Direction::Forward).unwrap(), vec![0, 1, 2]);
        assert_eq!(
            g.bfs_distances(VertexId(0), Direction::Backward).unwrap(),
            vec![0, 2, 1]
        );
    }

    #[test]
    fn bfs_path_unreachable() {
        let g = Digraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let d = g.bfs_distances(VertexId(2), Direction::Forward).unwrap();
        assert_eq!(d, vec![UNREACHABLE, UNREACHABLE, 0]);
    }

    #[test]
    fn bfs_rejects_bad_source() {
        let g = cycle(3);
        assert!(matches!(
            g.bfs_distances(VertexId(3), Direction::Forward),
            Err(Error::InvalidVertex(3))
        ));
    }

    #[test]
    fn strong_connectivity() {
        assert!(cycle(3).strongly_connected());
        assert!(!Digraph::new(2, vec![(0, 1)]).unwrap().strongly_connected());
        assert!(Digraph::new(1, vec![]).unwrap().strongly_connected());
    }

    #[test]
    fn rejects_loops_and_parallel_arcs() {
        assert!(matches!(Digraph::new(2, vec![(1, 1)]), Err(Error::SelfLoop(1))));
        assert!(matches!(
            Digraph::new(2, vec![(0, 1), (0, 1)]),
            Err(Error::ParallelArc(0, 1))
        ));
        assert!(Digraph::new(2, vec![(0, 1), (1, 0)]).is_ok());
    }

    #[test]
    fn scc_of_two_cycles_joined_one_way() {
        let g = Digraph::new(6, vec![(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3)]).unwrap();
        let mut comps: Vec<Vec<u32>> = g
            .strongly_connected_components()
            .into_iter()
            .map(|c| {
                let mut c: Vec<u32> = c.into_iter().map(|v| v.0).collect();
                c.sort();
                c
            })
            .collect();
        comps.sort();
        assert_eq!(comps, vec![vec![0, 1, 2], vec![3, 4, 5]]);
    }

    #[test]
    fn shortest_path_follows_arcs() {
        let g = cycle(5);
        let p = g.shortest_path(VertexId(3), VertexId(1)).unwrap();
        assert_eq!(p, vec![VertexId(3), VertexId(4), VertexId(0), VertexId(1)]);
    }
}
