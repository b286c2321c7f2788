//! Combinatorial embeddings: per-vertex cyclic neighbour orders and face
//! tracing over darts.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::Digraph;

/// Cyclic order of neighbours around each vertex of the underlying
/// undirected graph. Antiparallel arc pairs count as one edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationSystem {
    order: Vec<Vec<u32>>,
}

/// A closed face as its sequence of darts `(from, to)`.
pub type Face = Vec<(u32, u32)>;

impl RotationSystem {
    pub fn new(order: Vec<Vec<u32>>) -> Self {
        RotationSystem { order }
    }

    pub fn vertex_count(&self) -> usize {
        self.order.len()
    }

    pub fn around(&self, v: usize) -> &[u32] {
        &self.order[v]
    }

    pub fn as_lists(&self) -> &[Vec<u32>] {
        &self.order
    }

    pub fn edge_count(&self) -> usize {
        self.order.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Reverse-position lookup: `rev[v][i]` is the index of `v` in the list
    /// of its `i`-th neighbour.
    fn reverse_positions(&self) -> Result<Vec<Vec<u32>>> {
        let mut index: HashMap<(u32, u32), u32> = HashMap::new();
        for (v, nb) in self.order.iter().enumerate() {
            for (i, &w) in nb.iter().enumerate() {
                if w as usize >= self.order.len() {
                    return Err(Error::InconsistentRotation(format!("neighbour {w} out of range")));
                }
                if w as usize == v {
                    return Err(Error::InconsistentRotation(format!("loop at {v}")));
                }
                if index.insert((v as u32, w), i as u32).is_some() {
                    return Err(Error::InconsistentRotation(format!("{w} repeated around {v}")));
                }
            }
        }
        let mut rev = Vec::with_capacity(self.order.len());
        for (v, nb) in self.order.iter().enumerate() {
            let mut r = Vec::with_capacity(nb.len());
            for &w in nb {
                match index.get(&(w, v as u32)) {
                    Some(&j) => r.push(j),
                    None => return Err(Error::InconsistentRotation(format!("{w} lists no edge back to {v}"))),
                }
            }
            rev.push(r);
        }
        Ok(rev)
    }

    /// Checks that the rotation covers exactly the underlying edges of `g`.
    pub fn check_against(&self, g: &Digraph) -> Result<()> {
        if self.order.len() != g.vertex_count() {
            return Err(Error::InconsistentRotation(format!(
                "rotation has {} vertices, graph has {}",
                self.order.len(),
                g.vertex_count()
            )));
        }
        self.reverse_positions()?;
        let nb = g.undirected_neighbors();
        for (v, list) in nb.iter().enumerate() {
            let mut a = list.clone();
            let mut b = self.order[v].clone();
            a.sort_unstable();
            b.sort_unstable();
            if a != b {
                return Err(Error::InconsistentRotation(format!(
                    "neighbourhood of {v} differs from the graph"
                )));
            }
        }
        Ok(())
    }

    /// Traces every face. The successor of dart `u -> v` is `v -> w` where
    /// `w` follows `u` in the cyclic order around `v`.
    pub fn faces(&self) -> Result<Vec<Face>> {
        let rev = self.reverse_positions()?;
        let offsets: Vec<usize> = std::iter::once(0)
            .chain(self.order.iter().scan(0, |acc, nb| {
                *acc += nb.len();
                Some(*acc)
            }))
            .collect();
        let total = *offsets.last().unwrap_or(&0);
        let mut used = vec![false; total];
        let mut faces = Vec::new();
        for v in 0..self.order.len() {
            for i in 0..self.order[v].len() {
                if used[offsets[v] + i] {
                    continue;
                }
                let mut face = Vec::new();
                let (mut cu, mut ci) = (v, i);
                while !used[offsets[cu] + ci] {
                    used[offsets[cu] + ci] = true;
                    let w = self.order[cu][ci] as usize;
                    face.push((cu as u32, w as u32));
                    let back = rev[cu][ci] as usize;
                    let deg = self.order[w].len();
                    ci = (back + 1) % deg;
                    cu = w;
                }
                faces.push(face);
            }
        }
        Ok(faces)
    }

    /// `V - E + F` summed over the embedding; 2 for a connected sphere
    /// embedding.
    pub fn euler_characteristic(&self) -> Result<i64> {
        let f = self.faces()?.len() as i64;
        Ok(self.order.len() as i64 - self.edge_count() as i64 + f)
    }

    /// Restriction to the vertices with `keep[v]`, renumbered by `map`.
    pub fn restrict(&self, keep: &[u32], map: &[u32]) -> RotationSystem {
        let order = keep
            .iter()
            .map(|&v| {
                self.order[v as usize]
                    .iter()
                    .filter(|&&w| map[w as usize] != u32::MAX)
                    .map(|&w| map[w as usize])
                    .collect()
            })
            .collect();
        RotationSystem { order }
    }
}

/// Traces faces of `g` under `rot` after checking they describe the same
/// undirected graph.
pub fn trace_faces(g: &Digraph, rot: &RotationSystem) -> Result<Vec<Face>> {
    rot.check_against(g)?;
    rot.faces()
}

/// Dart-level embedding that tolerates parallel edges. Used internally by the
/// separator, which triangulates by stellating faces.
#[derive(Clone, Debug)]
pub(crate) struct DartEmbedding {
    pub tail: Vec<u32>,
    pub head: Vec<u32>,
    pub twin: Vec<u32>,
    /// Outgoing darts of each vertex in cyclic order.
    pub rot: Vec<Vec<u32>>,
    /// Position of each dart within `rot[tail]`.
    pub pos: Vec<u32>,
}

impl DartEmbedding {
    pub fn from_rotation(rot: &RotationSystem) -> Result<Self> {
        let rev = rot.reverse_positions()?;
        let n = rot.vertex_count();
        let mut first = vec![0u32; n + 1];
        for v in 0..n {
            first[v + 1] = first[v] + rot.around(v).len() as u32;
        }
        let m = first[n] as usize;
        let mut tail = vec![0u32; m];
        let mut head = vec![0u32; m];
        let mut twin = vec![0u32; m];
        let mut rotd = Vec::with_capacity(n);
        for v in 0..n {
            let mut list = Vec::with_capacity(rot.around(v).len());
            for (i, &w) in rot.around(v).iter().enumerate() {
                let d = first[v] as usize + i;
                tail[d] = v as u32;
                head[d] = w;
                twin[d] = first[w as usize] + rev[v][i];
                list.push(d as u32);
            }
            rotd.push(list);
        }
        let mut e = DartEmbedding {
            tail,
            head,
            twin,
            rot: rotd,
            pos: vec![],
        };
        e.reindex();
        Ok(e)
    }

    pub fn vertex_count(&self) -> usize {
        self.rot.len()
    }

    pub fn dart_count(&self) -> usize {
        self.tail.len()
    }

    pub fn reindex(&mut self) {
        self.pos = vec![0; self.tail.len()];
        for list in &self.rot {
            for (i, &d) in list.iter().enumerate() {
                self.pos[d as usize] = i as u32;
            }
        }
    }

    #[inline]
    pub fn face_next(&self, d: u32) -> u32 {
        let t = self.twin[d as usize];
        let v = self.tail[t as usize] as usize;
        let list = &self.rot[v];
        list[(self.pos[t as usize] as usize + 1) % list.len()]
    }

    /// Face id of every dart plus the number of faces.
    pub fn faces(&self) -> (Vec<u32>, usize) {
        let mut face = vec![u32::MAX; self.dart_count()];
        let mut count = 0;
        for d0 in 0..self.dart_count() as u32 {
            if face[d0 as usize] != u32::MAX {
                continue;
            }
            let mut d = d0;
            while face[d as usize] == u32::MAX {
                face[d as usize] = count;
                d = self.face_next(d);
            }
            count += 1;
        }
        (face, count as usize)
    }

    /// Adds one vertex inside every face that is not already a triangle on
    /// three distinct vertices, joined to each corner of the face. Returns the
    /// number of vertices added; new vertices are numbered after the old ones.
    pub fn stellate_non_triangles(&mut self) -> usize {
        let (face_of, nfaces) = self.faces();
        let mut face_darts: Vec<Vec<u32>> = vec![Vec::new(); nfaces];
        let mut seen = vec![false; nfaces];
        for d0 in 0..self.dart_count() as u32 {
            let f = face_of[d0 as usize] as usize;
            if seen[f] {
                continue;
            }
            seen[f] = true;
            let mut d = d0;
            loop {
                face_darts[f].push(d);
                d = self.face_next(d);
                if d == d0 {
                    break;
                }
            }
        }
        // insert_after[t] = new dart placed right after t in rot[tail(t)]
        let mut insert_after: HashMap<u32, u32> = HashMap::new();
        let mut added = 0;
        for darts in face_darts {
            let simple_triangle = darts.len() == 3 && {
                let a = self.tail[darts[0] as usize];
                let b = self.tail[darts[1] as usize];
                let c = self.tail[darts[2] as usize];
                a != b && b != c && a != c
            };
            if simple_triangle {
                continue;
            }
            let f = self.rot.len() as u32;
            self.rot.push(Vec::with_capacity(darts.len()));
            added += 1;
            let m = darts.len();
            let mut to_f = Vec::with_capacity(m);
            let mut from_f = Vec::with_capacity(m);
            for &d in &darts {
                let x = self.tail[d as usize];
                let g = self.tail.len() as u32;
                self.tail.push(x);
                self.head.push(f);
                self.twin.push(g + 1);
                let h = g + 1;
                self.tail.push(f);
                self.head.push(x);
                self.twin.push(g);
                to_f.push(g);
                from_f.push(h);
            }
            // corner at x_i sits between twin(d_{i-1}) and d_i
            for i in 0..m {
                let prev = darts[(i + m - 1) % m];
                let t = self.twin[prev as usize];
                insert_after.insert(t, to_f[i]);
            }
            // around f the corners appear in reverse face order
            self.rot[f as usize] = from_f.iter().rev().copied().collect();
        }
        if added > 0 {
            for v in 0..self.rot.len() {
                if insert_after.is_empty() {
                    break;
                }
                let old = std::mem::take(&mut self.rot[v]);
                let mut list = Vec::with_capacity(old.len() + 2);
                for d in old {
                    list.push(d);
                    if let Some(g) = insert_after.remove(&d) {
                        list.push(g);
                    }
                }
                self.rot[v] = list;
            }
            self.reindex();
        }
        added
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> (Digraph, RotationSystem) {
        let g = Digraph::new(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap();
        let rot = RotationSystem::new(vec![vec![1, 2], vec![2, 0], vec![0, 1]]);
        (g, rot)
    }

    #[test]
    fn triangle_has_two_faces() {
        let (g, rot) = triangle();
        let faces = trace_faces(&g, &rot).unwrap();
        assert_eq!(faces.len(), 2);
        assert_eq!(rot.euler_characteristic().unwrap(), 2);
    }

    #[test]
    fn rejects_mismatched_rotation() {
        let g = Digraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let (_, rot) = triangle();
        assert!(matches!(trace_faces(&g, &rot), Err(Error::InconsistentRotation(_))));
        let asym = RotationSystem::new(vec![vec![1], vec![], vec![]]);
        assert!(asym.faces().is_err());
    }

    #[test]
    fn path_is_one_face() {
        // a tree has a single face whose length is twice the edge count
        let rot = RotationSystem::new(vec![vec![1], vec![0, 2], vec![1]]);
        let faces = rot.faces().unwrap();
        assert_eq!(faces.len(), 1);
        assert_eq!(faces[0].len(), 4);
    }

    #[test]
    fn stellation_triangulates_a_path() {
        let rot = RotationSystem::new(vec![vec![1], vec![0, 2], vec![1]]);
        let mut e = DartEmbedding::from_rotation(&rot).unwrap();
        let added = e.stellate_non_triangles();
        assert_eq!(added, 1);
        let (face_of, nf) = e.faces();
        let mut sizes = vec![0; nf];
        for f in face_of {
            sizes[f as usize] += 1;
        }
        assert!(sizes.iter().all(|&s| s == 3));
        // the hub meets vertex 1 twice: V - E + F = 4 - 6 + 4
        assert_eq!(nf, 4);
        assert_eq!(e.vertex_count() as i64 - (e.dart_count() / 2) as i64 + nf as i64, 2);
    }
}
