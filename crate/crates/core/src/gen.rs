//! Small graph families and random embedded planar graphs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embedding::RotationSystem;
use crate::error::{Error, Result};
use crate::graph::Digraph;

/// A graph together with a planar rotation system of its underlying graph.
#[derive(Clone, Debug)]
pub struct Embedded {
    pub graph: Digraph,
    pub rotation: RotationSystem,
}

fn edges_of(rot: &RotationSystem) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for v in 0..rot.vertex_count() {
        for &w in rot.around(v) {
            if (v as u32) < w {
                out.push((v as u32, w));
            }
        }
    }
    out
}

pub fn single_vertex() -> Embedded {
    Embedded {
        graph: Digraph::new(1, Vec::new()).expect("valid"),
        rotation: RotationSystem::new(vec![Vec::new()]),
    }
}

/// `0 -> 1 -> ... -> n-1 -> 0`.
pub fn directed_cycle(n: usize) -> Result<Embedded> {
    let arcs = (0..n as u32).map(|i| (i, (i + 1) % n as u32)).collect();
    Ok(Embedded {
        graph: Digraph::new(n, arcs)?,
        rotation: cycle_rotation(n),
    })
}

/// Cycle with every edge as an antiparallel pair.
pub fn undirected_cycle(n: usize) -> Result<Embedded> {
    let edges: Vec<_> = (0..n as u32).map(|i| (i, (i + 1) % n as u32)).collect();
    Ok(Embedded {
        graph: Digraph::from_undirected(n, &edges)?,
        rotation: cycle_rotation(n),
    })
}

fn cycle_rotation(n: usize) -> RotationSystem {
    RotationSystem::new(
        (0..n)
            .map(|i| vec![((i + 1) % n) as u32, ((i + n - 1) % n) as u32])
            .collect(),
    )
}

/// Tree with antiparallel arcs; any neighbour order embeds a tree.
pub fn tree(n: usize, edges: &[(u32, u32)]) -> Result<Embedded> {
    let graph = Digraph::from_undirected(n, edges)?;
    let mut order = vec![Vec::new(); n];
    for &(a, b) in edges {
        order[a as usize].push(b);
        order[b as usize].push(a);
    }
    Ok(Embedded {
        graph,
        rotation: RotationSystem::new(order),
    })
}

/// Tree decoded from a Prüfer sequence over `seq.len() + 2` vertices.
pub fn prufer_tree(seq: &[u32]) -> Result<Embedded> {
    let n = seq.len() + 2;
    let mut degree = vec![1u32; n];
    for &s in seq {
        degree[s as usize] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).expect("a leaf remains");
        edges.push((leaf as u32, s));
        degree[leaf] -= 1;
        degree[s as usize] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0] as u32, rest[1] as u32));
    tree(n, &edges)
}

pub fn random_tree(n: usize, seed: u64) -> Result<Embedded> {
    if n < 2 {
        return Ok(single_vertex());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seq: Vec<u32> = (0..n - 2).map(|_| rng.random_range(0..n as u32)).collect();
    prufer_tree(&seq)
}

/// Path `0 - 1 - .. - n-1` with antiparallel arcs.
pub fn path(n: usize) -> Result<Embedded> {
    let edges: Vec<_> = (1..n as u32).map(|i| (i - 1, i)).collect();
    tree(n.max(1), &edges)
}

/// `K_n` with antiparallel arcs; planar only up to `n = 4`.
pub fn complete(n: usize) -> Result<Embedded> {
    if !(1..=4).contains(&n) {
        return Err(Error::InvalidParams(format!("K_{n} has no planar embedding here")));
    }
    let mut edges = Vec::new();
    for a in 0..n as u32 {
        for b in a + 1..n as u32 {
            edges.push((a, b));
        }
    }
    // triangle around a central vertex 0
    let pos = [(0.0, 0.0), (1.0, 0.0), (-0.5, 0.87), (-0.5, -0.87)];
    Ok(Embedded {
        graph: Digraph::from_undirected(n, &edges)?,
        rotation: rotation_from_positions(n, &edges, &pos[..n]),
    })
}

/// `w × h` grid with antiparallel arcs, embedded in the plane.
pub fn grid(w: usize, h: usize) -> Result<Embedded> {
    let id = |x: usize, y: usize| (y * w + x) as u32;
    let mut order = vec![Vec::new(); w * h];
    for y in 0..h {
        for x in 0..w {
            let v = &mut order[id(x, y) as usize];
            if x + 1 < w {
                v.push(id(x + 1, y));
            }
            if y + 1 < h {
                v.push(id(x, y + 1));
            }
            if x > 0 {
                v.push(id(x - 1, y));
            }
            if y > 0 {
                v.push(id(x, y - 1));
            }
        }
    }
    let rotation = RotationSystem::new(order);
    Ok(Embedded {
        graph: Digraph::from_undirected(w * h, &edges_of(&rotation))?,
        rotation,
    })
}

/// Counter-clockwise neighbour order from a straight-line drawing.
pub fn rotation_from_positions(n: usize, edges: &[(u32, u32)], pos: &[(f64, f64)]) -> RotationSystem {
    let mut order = vec![Vec::new(); n];
    for &(a, b) in edges {
        order[a as usize].push(b);
        order[b as usize].push(a);
    }
    for (v, list) in order.iter_mut().enumerate() {
        let (x, y) = pos[v];
        list.sort_by(|&p, &q| {
            let ap = (pos[p as usize].1 - y).atan2(pos[p as usize].0 - x);
            let aq = (pos[q as usize].1 - y).atan2(pos[q as usize].0 - x);
            ap.total_cmp(&aq)
        });
    }
    RotationSystem::new(order)
}

/// Dodecahedron skeleton drawn as nested outer pentagon, middle decagon and
/// inner pentagon.
pub fn dodecahedron() -> Result<Embedded> {
    let outer = |k: u32| k % 5;
    let middle = |j: u32| 5 + j % 10;
    let inner = |k: u32| 15 + k % 5;
    let mut edges = Vec::with_capacity(30);
    for k in 0..5 {
        edges.push((outer(k), outer(k + 1)));
        edges.push((outer(k), middle(2 * k)));
        edges.push((middle(2 * k + 1), inner(k)));
        edges.push((inner(k), inner(k + 1)));
    }
    for j in 0..10 {
        edges.push((middle(j), middle(j + 1)));
    }
    let polar = |r: f64, deg: f64| (r * deg.to_radians().cos(), r * deg.to_radians().sin());
    let mut pos = vec![(0.0, 0.0); 20];
    for k in 0..5 {
        pos[outer(k) as usize] = polar(3.0, 72.0 * k as f64);
        pos[inner(k) as usize] = polar(1.0, 72.0 * k as f64 + 36.0);
    }
    for j in 0..10 {
        pos[middle(j) as usize] = polar(2.0, 36.0 * j as f64);
    }
    Ok(Embedded {
        graph: Digraph::from_undirected(20, &edges)?,
        rotation: rotation_from_positions(20, &edges, &pos),
    })
}

fn insert_after(list: &mut Vec<u32>, after: u32, x: u32) {
    let i = list.iter().position(|&y| y == after).expect("neighbour present");
    list.insert(i + 1, x);
}

fn next_after(list: &[u32], x: u32) -> u32 {
    let i = list.iter().position(|&y| y == x).expect("neighbour present");
    list[(i + 1) % list.len()]
}

/// Random triangulation of the sphere on `n >= 3` vertices: vertices are
/// stacked into random faces, then random edge flips mix the degrees.
/// Arcs are antiparallel pairs.
pub fn random_triangulation(n: usize, seed: u64) -> Result<Embedded> {
    let n = n.max(3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rot: Vec<Vec<u32>> = vec![vec![1, 2], vec![2, 0], vec![0, 1]];
    let pick_dart = |rot: &Vec<Vec<u32>>, rng: &mut ChaCha8Rng| {
        let a = rng.random_range(0..rot.len());
        let b = rot[a][rng.random_range(0..rot[a].len())];
        (a as u32, b)
    };
    for v in 3..n as u32 {
        // face a -> b -> c on the left of dart a -> b
        let (a, b) = pick_dart(&rot, &mut rng);
        let c = next_after(&rot[b as usize], a);
        insert_after(&mut rot[b as usize], a, v);
        insert_after(&mut rot[c as usize], b, v);
        insert_after(&mut rot[a as usize], c, v);
        rot.push(vec![b, a, c]);
    }
    for _ in 0..2 * n {
        let (a, b) = pick_dart(&rot, &mut rng);
        let c = next_after(&rot[b as usize], a);
        let d = next_after(&rot[a as usize], b);
        if c == d || rot[a as usize].len() <= 3 || rot[b as usize].len() <= 3 || rot[c as usize].contains(&d) {
            continue;
        }
        rot[a as usize].retain(|&x| x != b);
        rot[b as usize].retain(|&x| x != a);
        insert_after(&mut rot[c as usize], b, d);
        insert_after(&mut rot[d as usize], a, c);
    }
    let rotation = RotationSystem::new(rot);
    Ok(Embedded {
        graph: Digraph::from_undirected(n, &edges_of(&rotation))?,
        rotation,
    })
}

/// Builds a family member from a short name: `point`, `path:<n>`,
/// `cycle:<n>`, `directed-cycle:<n>`, `complete:<n>`, `grid:<w>x<h>`,
/// `tree:<n>[:<seed>]`, `dodecahedron`, `triangulation:<n>[:<seed>]`.
pub fn family(name: &str) -> Result<Embedded> {
    let mut parts = name.split(':');
    let kind = parts.next().unwrap_or_default();
    let args: Vec<&str> = parts.collect();
    let bad = || Error::InvalidParams(format!("unknown graph family {name:?}"));
    let num = |i: usize| -> Result<usize> { args.get(i).ok_or_else(bad)?.parse().map_err(|_| bad()) };
    let seed = || -> Result<u64> { args.get(1).map_or(Ok(0), |s| s.parse().map_err(|_| bad())) };
    match kind {
        "point" => Ok(single_vertex()),
        "path" => path(num(0)?),
        "cycle" => undirected_cycle(num(0)?),
        "directed-cycle" => directed_cycle(num(0)?),
        "complete" => complete(num(0)?),
        "grid" => {
            let (w, h) = args.first().and_then(|s| s.split_once('x')).ok_or_else(bad)?;
            grid(w.parse().map_err(|_| bad())?, h.parse().map_err(|_| bad())?)
        }
        "tree" => random_tree(num(0)?, seed()?),
        "dodecahedron" => dodecahedron(),
        "triangulation" => random_triangulation(num(0)?, seed()?),
        _ => Err(bad()),
    }
}

/// Random orientation of an embedded graph's edges, with reverse arcs added
/// on every edge joining two strong components so the result is strongly
/// connected whenever the underlying graph is connected.
pub fn random_strong_orientation(rot: &RotationSystem, seed: u64) -> Result<Digraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rot.vertex_count();
    let mut edges = edges_of(rot);
    edges.shuffle(&mut rng);
    let oriented: Vec<(u32, u32)> = edges
        .iter()
        .map(|&(a, b)| if rng.random::<bool>() { (a, b) } else { (b, a) })
        .collect();
    let g = Digraph::new(n, oriented.clone())?;
    let mut comp = vec![0u32; n];
    for (i, c) in g.strongly_connected_components().iter().enumerate() {
        for v in c {
            comp[v.idx()] = i as u32;
        }
    }
    let mut arcs = oriented;
    let extra: Vec<(u32, u32)> = arcs
        .iter()
        .filter(|&&(a, b)| comp[a as usize] != comp[b as usize])
        .map(|&(a, b)| (b, a))
        .collect();
    arcs.extend(extra);
    Digraph::new(n, arcs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_are_planar() {
        let cases = [
            directed_cycle(5).unwrap(),
            undirected_cycle(6).unwrap(),
            random_tree(9, 3).unwrap(),
            grid(4, 3).unwrap(),
            dodecahedron().unwrap(),
            random_triangulation(200, 7).unwrap(),
        ];
        for e in &cases {
            e.rotation.check_against(&e.graph).unwrap();
            assert_eq!(e.rotation.euler_characteristic().unwrap(), 2);
        }
        assert_eq!(cases[4].graph.arc_count(), 60);
    }

    #[test]
    fn triangulation_counts() {
        for seed in 0..5 {
            let e = random_triangulation(100, seed).unwrap();
            assert_eq!(e.rotation.edge_count(), 3 * 100 - 6);
            let (_, faces) = crate::embedding::DartEmbedding::from_rotation(&e.rotation)
                .unwrap()
                .faces();
            assert_eq!(faces, 2 * 100 - 4);
        }
    }

    #[test]
    fn strong_orientation() {
        let e = random_triangulation(300, 1).unwrap();
        let g = random_strong_orientation(&e.rotation, 9).unwrap();
        assert!(g.strongly_connected());
        e.rotation.check_against(&g).unwrap();
        assert!(g.arc_count() < 2 * e.rotation.edge_count());
    }

    #[test]
    fn named_families() {
        assert_eq!(family("directed-cycle:6").unwrap().graph.arc_count(), 6);
        assert_eq!(family("path:5").unwrap().graph.arc_count(), 8);
        assert_eq!(family("complete:4").unwrap().graph.arc_count(), 12);
        assert_eq!(family("grid:3x4").unwrap().graph.vertex_count(), 12);
        assert!(family("complete:5").is_err());
        assert!(family("mobius:3").is_err());
        for name in ["complete:4", "complete:3", "path:4"] {
            let e = family(name).unwrap();
            e.rotation.check_against(&e.graph).unwrap();
            assert_eq!(e.rotation.euler_characteristic().unwrap(), 2);
        }
    }

    #[test]
    fn prufer_star() {
        let e = prufer_tree(&[0, 0, 0]).unwrap();
        assert_eq!(e.graph.out_degree(0.into()), 4);
    }
}
