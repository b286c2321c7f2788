//! Planar separators on embedded graphs.
//!
//! BFS levels around the median give two thin levels `l0 < l2`. If the
//! band strictly between them is small the two levels separate; otherwise
//! the band is cut by a fundamental cycle of a shallow spanning tree: levels
//! up to `l0` collapse into one weightless root, levels from `l2` are
//! dropped, faces are stellated into triangles, and the non-tree edge whose
//! cycle splits the band most evenly is chosen through the dual tree.
//!
//! Guarantees `|A|, |B| <= 2n/3` and `|C| <= 2·sqrt(2n)`, no edge between
//! `A` and `B`. Edge directions are ignored.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::embedding::{DartEmbedding, RotationSystem};
use crate::error::{Error, Result};
use crate::graph::{Digraph, VertexId};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparatorResult {
    pub a: Vec<u32>,
    pub b: Vec<u32>,
    pub c: Vec<u32>,
}

impl SeparatorResult {
    fn sorted(mut self) -> Self {
        self.a.sort_unstable();
        self.b.sort_unstable();
        self.c.sort_unstable();
        self
    }

    /// Partition, balance, size and cut checks against a rotation system.
    pub fn check(&self, rot: &RotationSystem, c_factor: f64) -> Result<()> {
        let n = rot.vertex_count();
        let mut side = vec![0u8; n];
        for (tag, set) in [(1u8, &self.a), (2, &self.b), (3, &self.c)] {
            for &v in set.iter() {
                let v = v as usize;
                if v >= n || side[v] != 0 {
                    return Err(Error::Format(format!(
                        "vertex {v} missing from or repeated in the partition"
                    )));
                }
                side[v] = tag;
            }
        }
        if side.contains(&0) {
            return Err(Error::Format("partition does not cover the region".into()));
        }
        let limit = 2.0 * n as f64 / 3.0;
        if self.a.len() as f64 > limit || self.b.len() as f64 > limit {
            return Err(Error::Format(format!(
                "unbalanced: |A| = {}, |B| = {}, n = {n}",
                self.a.len(),
                self.b.len()
            )));
        }
        if self.c.len() as f64 > c_factor * (n as f64).sqrt() {
            return Err(Error::Format(format!(
                "|C| = {} exceeds {c_factor}·sqrt({n})",
                self.c.len()
            )));
        }
        for v in 0..n {
            for &w in rot.around(v) {
                if side[v] | side[w as usize] == 3
                    && side[v] != side[w as usize]
                    && side[v] != 3
                    && side[w as usize] != 3
                {
                    return Err(Error::Format(format!("edge {v}-{w} joins A and B")));
                }
            }
        }
        Ok(())
    }
}

/// Splits `parts` (each at most 2n/3) into two sides of at most 2n/3.
fn combine(mut parts: Vec<Vec<u32>>, n: usize) -> (Vec<u32>, Vec<u32>) {
    parts.retain(|p| !p.is_empty());
    parts.sort_by_key(|p| std::cmp::Reverse(p.len()));
    let mut a = Vec::new();
    let mut b = Vec::new();
    let third = n as f64 / 3.0;
    let mut iter = parts.into_iter();
    for p in iter.by_ref() {
        a.extend(p);
        if a.len() as f64 >= third {
            break;
        }
    }
    for p in iter {
        b.extend(p);
    }
    (a, b)
}

fn bfs_levels(rot: &RotationSystem, root: usize) -> (Vec<u32>, Vec<u32>) {
    let n = rot.vertex_count();
    let mut level = vec![u32::MAX; n];
    let mut parent = vec![u32::MAX; n];
    level[root] = 0;
    let mut q = VecDeque::from([root]);
    while let Some(v) = q.pop_front() {
        for &w in rot.around(v) {
            if level[w as usize] == u32::MAX {
                level[w as usize] = level[v] + 1;
                parent[w as usize] = v as u32;
                q.push_back(w as usize);
            }
        }
    }
    (level, parent)
}

/// Separator of a connected embedded graph given by its rotation system.
pub fn separate(rot: &RotationSystem) -> Result<SeparatorResult> {
    let n = rot.vertex_count();
    if n == 0 {
        return Ok(SeparatorResult::default());
    }
    let emb = DartEmbedding::from_rotation(rot)?;
    let (level, parent) = bfs_levels(rot, 0);
    if level.contains(&u32::MAX) {
        return Err(Error::Disconnected);
    }
    let r = *level.iter().max().expect("nonempty") as i64;
    let mut size = vec![0usize; r as usize + 1];
    for &l in &level {
        size[l as usize] += 1;
    }
    let lsize = |l: i64| if l < 0 || l > r { 0 } else { size[l as usize] };

    let half = n.div_ceil(2);
    let mut cum = 0;
    let mut l1 = 0i64;
    for (l, &s) in size.iter().enumerate() {
        cum += s;
        if cum >= half {
            l1 = l as i64;
            break;
        }
    }
    let k = cum as f64;
    let rest = (n - cum) as f64;
    let l0 = (-1..=l1)
        .rev()
        .find(|&l| (lsize(l) as f64) + 2.0 * (l1 - l) as f64 <= 2.0 * k.sqrt())
        .unwrap_or_else(|| (-1..=l1).min_by_key(|&l| lsize(l) + 2 * (l1 - l) as usize).unwrap());
    let l2 = (l1 + 1..=r + 1)
        .find(|&l| (lsize(l) as f64) + 2.0 * (l - l1 - 1) as f64 <= 2.0 * rest.sqrt())
        .unwrap_or_else(|| {
            (l1 + 1..=r + 1)
                .min_by_key(|&l| lsize(l) + 2 * (l - l1 - 1) as usize)
                .unwrap()
        });

    let lv = |v: usize| level[v] as i64;
    let mut below = Vec::new();
    let mut above = Vec::new();
    let mut band = Vec::new();
    let mut cut = Vec::new();
    for v in 0..n {
        let l = lv(v);
        if l == l0 || l == l2 {
            cut.push(v as u32);
        } else if l < l0 {
            below.push(v as u32);
        } else if l > l2 {
            above.push(v as u32);
        } else {
            band.push(v as u32);
        }
    }
    let limit = 2.0 * n as f64 / 3.0;
    if band.len() as f64 <= limit {
        let (a, b) = combine(vec![below, above, band], n);
        return Ok(SeparatorResult { a, b, c: cut }.sorted());
    }

    let (inside, outside, cycle) = split_band(&emb, &level, &parent, l0, l2, band.len())?;
    cut.extend(cycle);
    let (a, b) = combine(vec![below, above, inside, outside], n);
    Ok(SeparatorResult { a, b, c: cut }.sorted())
}

/// Embedding of the band with the low levels contracted. Returns the
/// embedding, the original id of each new vertex (`u32::MAX` for the
/// contracted root) and the tree parent dart of each vertex.
struct Band {
    emb: DartEmbedding,
    original: Vec<u32>,
    root: u32,
    parent_dart: Vec<u32>,
}

fn build_band(emb: &DartEmbedding, level: &[u32], parent: &[u32], l0: i64, l2: i64) -> Band {
    let n = emb.vertex_count();
    let m = emb.dart_count();
    let lv = |v: usize| level[v] as i64;
    let mut next = vec![0u32; m];
    let mut prev = vec![0u32; m];
    for list in &emb.rot {
        let k = list.len();
        for i in 0..k {
            next[list[i] as usize] = list[(i + 1) % k];
            prev[list[i] as usize] = list[(i + k - 1) % k];
        }
    }
    let mut alive = vec![true; m];
    let unlink = |d: u32, next: &mut Vec<u32>, prev: &mut Vec<u32>, alive: &mut Vec<bool>| {
        let (p, x) = (prev[d as usize], next[d as usize]);
        next[p as usize] = x;
        prev[x as usize] = p;
        alive[d as usize] = false;
    };
    // dart from each vertex to its BFS parent
    let mut up = vec![u32::MAX; n];
    for v in 0..n {
        if parent[v] != u32::MAX {
            up[v] = *emb.rot[v]
                .iter()
                .find(|&&d| emb.head[d as usize] == parent[v])
                .expect("parent is a neighbour");
        }
    }
    let root_vertex = level.iter().position(|&l| l == 0).expect("root");
    if l0 >= 0 {
        let mut order: Vec<usize> = (0..n).filter(|&v| lv(v) <= l0 && v != root_vertex).collect();
        order.sort_by_key(|&v| std::cmp::Reverse(level[v]));
        for v in order {
            let d = up[v];
            let t = emb.twin[d as usize];
            let (p, x) = (prev[t as usize], next[t as usize]);
            if next[d as usize] == d {
                next[p as usize] = x;
                prev[x as usize] = p;
            } else {
                let (a1, ak) = (next[d as usize], prev[d as usize]);
                next[p as usize] = a1;
                prev[a1 as usize] = p;
                next[ak as usize] = x;
                prev[x as usize] = ak;
            }
            alive[d as usize] = false;
            alive[t as usize] = false;
        }
    }
    let contracted = |v: usize| l0 >= 0 && lv(v) <= l0;
    let kept = |v: usize| lv(v) > l0 && lv(v) < l2;

    // new vertex ids: contracted root first when present
    let mut id = vec![u32::MAX; n];
    let mut original = Vec::new();
    if l0 >= 0 {
        original.push(u32::MAX);
    }
    for (v, slot) in id.iter_mut().enumerate() {
        if kept(v) {
            *slot = original.len() as u32;
            original.push(v as u32);
        }
    }
    let map = |v: usize| if contracted(v) { 0 } else { id[v] };

    // collect rings of surviving vertices, pruning loops, dropped heads and
    // duplicate edges at the contracted root
    let mut rings: Vec<Vec<u32>> = vec![Vec::new(); original.len()];
    if l0 >= 0 {
        // tree darts died in the splices; any surviving dart of a contracted
        // vertex lies on the merged ring
        let start = (0..m as u32).find(|&d| alive[d as usize] && contracted(emb.tail[d as usize] as usize));
        if let Some(start) = start {
            let mut ring = Vec::new();
            let mut d = start;
            loop {
                ring.push(d);
                d = next[d as usize];
                if d == start {
                    break;
                }
            }
            let mut seen = vec![false; n];
            for d in ring {
                let h = emb.head[d as usize] as usize;
                let t = emb.twin[d as usize];
                if contracted(h) || !kept(h) {
                    alive[d as usize] = false;
                } else if seen[h] {
                    alive[d as usize] = false;
                    if alive[t as usize] {
                        unlink(t, &mut next, &mut prev, &mut alive);
                    }
                } else {
                    seen[h] = true;
                    rings[0].push(d);
                }
            }
        }
    }
    for v in 0..n {
        if !kept(v) {
            continue;
        }
        let list: Vec<u32> = {
            let start = emb.rot[v].iter().copied().find(|&d| alive[d as usize]);
            let mut out = Vec::new();
            if let Some(start) = start {
                let mut d = start;
                loop {
                    out.push(d);
                    d = next[d as usize];
                    if d == start {
                        break;
                    }
                }
            }
            out
        };
        for d in list {
            let h = emb.head[d as usize] as usize;
            if kept(h) || contracted(h) {
                rings[id[v] as usize].push(d);
            }
        }
    }
    // compact darts
    let mut new_id = vec![u32::MAX; m];
    let mut tail = Vec::new();
    let mut head = Vec::new();
    let mut old_of = Vec::new();
    for (nv, ring) in rings.iter().enumerate() {
        for &d in ring {
            new_id[d as usize] = tail.len() as u32;
            tail.push(nv as u32);
            head.push(map(emb.head[d as usize] as usize));
            old_of.push(d);
        }
    }
    let twin: Vec<u32> = old_of
        .iter()
        .map(|&d| {
            let t = emb.twin[d as usize];
            new_id[t as usize]
        })
        .collect();
    debug_assert!(twin.iter().all(|&t| t != u32::MAX));
    let rot: Vec<Vec<u32>> = rings
        .iter()
        .map(|ring| ring.iter().map(|&d| new_id[d as usize]).collect())
        .collect();
    let mut band = DartEmbedding {
        tail,
        head,
        twin,
        rot,
        pos: Vec::new(),
    };
    band.reindex();

    let root = if l0 >= 0 { 0 } else { id[root_vertex] };
    let mut parent_dart = vec![u32::MAX; original.len()];
    for (nv, &ov) in original.iter().enumerate() {
        if ov == u32::MAX {
            continue;
        }
        let ov = ov as usize;
        if nv as u32 == root {
            continue;
        }
        if lv(ov) == l0 + 1 {
            // the surviving edge to the contracted root
            parent_dart[nv] = *band.rot[nv]
                .iter()
                .find(|&&d| band.head[d as usize] == 0)
                .expect("band vertex next to the contracted root");
        } else {
            parent_dart[nv] = new_id[up[ov] as usize];
        }
    }
    Band {
        emb: band,
        original,
        root,
        parent_dart,
    }
}

/// Fundamental-cycle split of the band. Returns (inside, outside, cycle) in
/// original ids, cycle restricted to weighted vertices.
fn split_band(
    emb: &DartEmbedding,
    level: &[u32],
    parent: &[u32],
    l0: i64,
    l2: i64,
    band_weight: usize,
) -> Result<(Vec<u32>, Vec<u32>, Vec<u32>)> {
    let Band {
        emb: mut g,
        original,
        root,
        mut parent_dart,
    } = build_band(emb, level, parent, l0, l2);
    let real = original.len();
    g.stellate_non_triangles();
    let nv = g.vertex_count();
    let weight = |v: usize| (v < real && original[v] != u32::MAX) as usize;
    parent_dart.resize(nv, u32::MAX);
    for (f, pd) in parent_dart.iter_mut().enumerate().skip(real) {
        *pd = g.rot[f][0];
    }
    // tree parents point from child toward parent: dart child -> parent
    let mut tree_parent = vec![u32::MAX; nv];
    let mut is_tree = vec![false; g.dart_count()];
    for v in 0..nv {
        let d = parent_dart[v];
        if d == u32::MAX {
            continue;
        }
        tree_parent[v] = g.head[d as usize];
        is_tree[d as usize] = true;
        is_tree[g.twin[d as usize] as usize] = true;
    }
    // depths and binary lifting
    let mut children: Vec<Vec<u32>> = vec![Vec::new(); nv];
    for v in 0..nv {
        if tree_parent[v] != u32::MAX {
            children[tree_parent[v] as usize].push(v as u32);
        }
    }
    let mut depth = vec![u32::MAX; nv];
    depth[root as usize] = 0;
    let mut q = VecDeque::from([root]);
    while let Some(v) = q.pop_front() {
        for &w in &children[v as usize] {
            depth[w as usize] = depth[v as usize] + 1;
            q.push_back(w);
        }
    }
    if depth.contains(&u32::MAX) {
        return Err(Error::InconsistentRotation(
            "band spanning tree is not connected".into(),
        ));
    }
    let levels = (u32::BITS - (nv as u32).leading_zeros()) as usize + 1;
    let mut upt = vec![tree_parent.clone()];
    upt[0][root as usize] = root;
    for j in 1..levels {
        let prevl = &upt[j - 1];
        let row: Vec<u32> = (0..nv).map(|v| prevl[prevl[v] as usize]).collect();
        upt.push(row);
    }
    let lca = |mut a: usize, mut b: usize| -> usize {
        if depth[a] < depth[b] {
            std::mem::swap(&mut a, &mut b);
        }
        let mut diff = depth[a] - depth[b];
        let mut j = 0;
        while diff > 0 {
            if diff & 1 == 1 {
                a = upt[j][a] as usize;
            }
            diff >>= 1;
            j += 1;
        }
        if a == b {
            return a;
        }
        for j in (0..levels).rev() {
            if upt[j][a] != upt[j][b] {
                a = upt[j][a] as usize;
                b = upt[j][b] as usize;
            }
        }
        upt[0][a] as usize
    };

    // dual tree over triangles through non-tree edges
    let (face_of, nf) = g.faces();
    let mut face_darts: Vec<Vec<u32>> = vec![Vec::new(); nf];
    for d in 0..g.dart_count() {
        face_darts[face_of[d] as usize].push(d as u32);
    }
    let mut charge = vec![0usize; nf];
    let mut charged_face = vec![u32::MAX; nv];
    for v in 0..nv {
        if weight(v) == 0 {
            let f = face_of[g.rot[v][0] as usize];
            charge[f as usize] += 1;
            charged_face[v] = f;
        }
    }
    let mut dual_parent = vec![u32::MAX; nf];
    let mut order = Vec::with_capacity(nf);
    let mut tin = vec![0u32; nf];
    let mut tout = vec![0u32; nf];
    let mut visited = vec![false; nf];
    visited[0] = true;
    let mut stack: Vec<(u32, usize)> = vec![(0, 0)];
    let mut clock = 0u32;
    tin[0] = 0;
    order.push(0u32);
    while let Some(&mut (f, ref mut i)) = stack.last_mut() {
        let darts = &face_darts[f as usize];
        if *i < darts.len() {
            let d = darts[*i];
            *i += 1;
            if is_tree[d as usize] {
                continue;
            }
            let h = face_of[g.twin[d as usize] as usize];
            if !visited[h as usize] {
                visited[h as usize] = true;
                dual_parent[h as usize] = f;
                clock += 1;
                tin[h as usize] = clock;
                order.push(h);
                stack.push((h, 0));
            }
        } else {
            tout[f as usize] = clock;
            stack.pop();
        }
    }
    if visited.iter().any(|&x| !x) {
        return Err(Error::InconsistentRotation(
            "dual of non-tree edges is not spanning".into(),
        ));
    }
    let mut sub_faces = vec![1usize; nf];
    let mut sub_charge = charge.clone();
    for &f in order.iter().rev() {
        let p = dual_parent[f as usize];
        if p != u32::MAX {
            sub_faces[p as usize] += sub_faces[f as usize];
            sub_charge[p as usize] += sub_charge[f as usize];
        }
    }
    let in_subtree = |f: u32, top: u32| tin[top as usize] <= tin[f as usize] && tin[f as usize] <= tout[top as usize];

    let total = band_weight as i64;
    let mut best: Option<(i64, u32, u32)> = None;
    for d in 0..g.dart_count() as u32 {
        let t = g.twin[d as usize];
        if is_tree[d as usize] || d > t {
            continue;
        }
        let fa = face_of[d as usize];
        let fb = face_of[t as usize];
        let child = if dual_parent[fa as usize] == fb { fa } else { fb };
        let (u, v) = (g.tail[d as usize] as usize, g.head[d as usize] as usize);
        let w = lca(u, v);
        let len = (depth[u] + depth[v] - 2 * depth[w] + 1) as i64;
        let mut zero_on_cycle = Vec::with_capacity(3);
        for x in [u, v, w] {
            if weight(x) == 0 && !zero_on_cycle.contains(&x) {
                zero_on_cycle.push(x);
            }
        }
        let strictly_inside = (sub_faces[child as usize] as i64 - len + 2) / 2;
        let mut zero_inside = sub_charge[child as usize] as i64;
        for &x in &zero_on_cycle {
            if in_subtree(charged_face[x], child) {
                zero_inside -= 1;
            }
        }
        let inside_w = strictly_inside - zero_inside;
        let cycle_w = len - zero_on_cycle.len() as i64;
        let outside_w = total - inside_w - cycle_w;
        let score = inside_w.max(outside_w);
        if best.is_none_or(|b| score < b.0) {
            best = Some((score, d, child));
        }
    }
    let (_, d, child) = best.ok_or_else(|| Error::InconsistentRotation("band has no non-tree edge".into()))?;

    let (u, v) = (g.tail[d as usize] as usize, g.head[d as usize] as usize);
    let w = lca(u, v);
    let mut on_cycle = vec![false; nv];
    for mut x in [u, v] {
        loop {
            on_cycle[x] = true;
            if x == w {
                break;
            }
            x = tree_parent[x] as usize;
        }
    }
    let mut inside_flag = vec![false; nv];
    for f in 0..nf as u32 {
        if in_subtree(f, child) {
            for &dd in &face_darts[f as usize] {
                let x = g.tail[dd as usize] as usize;
                if !on_cycle[x] {
                    inside_flag[x] = true;
                }
            }
        }
    }
    let mut inside = Vec::new();
    let mut outside = Vec::new();
    let mut cycle = Vec::new();
    for x in 0..real {
        if weight(x) == 0 {
            continue;
        }
        let o = original[x];
        if on_cycle[x] {
            cycle.push(o);
        } else if inside_flag[x] {
            inside.push(o);
        } else {
            outside.push(o);
        }
    }
    Ok((inside, outside, cycle))
}

fn components(rot: &RotationSystem) -> Vec<Vec<u32>> {
    let n = rot.vertex_count();
    let mut comp = vec![u32::MAX; n];
    let mut out = Vec::new();
    for s in 0..n {
        if comp[s] != u32::MAX {
            continue;
        }
        let id = out.len() as u32;
        let mut members = vec![s as u32];
        comp[s] = id;
        let mut i = 0;
        while i < members.len() {
            let v = members[i] as usize;
            i += 1;
            for &w in rot.around(v) {
                if comp[w as usize] == u32::MAX {
                    comp[w as usize] = id;
                    members.push(w);
                }
            }
        }
        out.push(members);
    }
    out
}

/// Separator for possibly disconnected regions: oversized components are
/// separated, the rest are packed greedily into two sides.
pub fn separate_components(rot: &RotationSystem) -> Result<SeparatorResult> {
    let n = rot.vertex_count();
    let comps = components(rot);
    let limit = 2.0 * n as f64 / 3.0;
    let mut parts = Vec::new();
    let mut c = Vec::new();
    for comp in comps {
        if comp.len() as f64 > limit {
            let mut keep = comp.clone();
            keep.sort_unstable();
            let mut map = vec![u32::MAX; n];
            for (i, &v) in keep.iter().enumerate() {
                map[v as usize] = i as u32;
            }
            let sub = rot.restrict(&keep, &map);
            let r = separate(&sub)?;
            parts.push(r.a.iter().map(|&x| keep[x as usize]).collect());
            parts.push(r.b.iter().map(|&x| keep[x as usize]).collect());
            c.extend(r.c.iter().map(|&x| keep[x as usize]));
        } else {
            parts.push(comp);
        }
    }
    let (a, b) = combine(parts, n);
    Ok(SeparatorResult { a, b, c }.sorted())
}

/// Separator of the subgraph induced by `region`, in global vertex ids.
pub fn separate_region(rot: &RotationSystem, region: &[VertexId]) -> Result<SeparatorResult> {
    let mut keep: Vec<u32> = region.iter().map(|v| v.0).collect();
    keep.sort_unstable();
    keep.dedup();
    let mut map = vec![u32::MAX; rot.vertex_count()];
    for (i, &v) in keep.iter().enumerate() {
        map[v as usize] = i as u32;
    }
    let sub = rot.restrict(&keep, &map);
    let r = separate_components(&sub)?;
    let back = |s: Vec<u32>| s.into_iter().map(|x| keep[x as usize]).collect();
    Ok(SeparatorResult {
        a: back(r.a),
        b: back(r.b),
        c: back(r.c),
    }
    .sorted())
}

/// Checks the rotation against the digraph and separates its underlying graph.
pub fn separate_graph(g: &Digraph, rot: &RotationSystem) -> Result<SeparatorResult> {
    rot.check_against(g)?;
    separate_components(rot)
}
