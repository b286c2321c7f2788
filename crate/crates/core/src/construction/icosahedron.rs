//! The golden-ratio icosahedron and small vector helpers.

use crate::embedding::RotationSystem;

pub type Vec3 = [f64; 3];

#[inline]
pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn normalize(a: Vec3) -> Vec3 {
    scale(a, 1.0 / norm(a))
}

/// Spherical linear interpolation between two unit vectors.
pub fn slerp(a: Vec3, b: Vec3, t: f64) -> Vec3 {
    let cos = dot(a, b).clamp(-1.0, 1.0);
    let theta = cos.acos();
    if theta < 1e-12 {
        return a;
    }
    let s = theta.sin();
    let wa = ((1.0 - t) * theta).sin() / s;
    let wb = (t * theta).sin() / s;
    normalize(add(scale(a, wa), scale(b, wb)))
}

/// Sorts `points` counter-clockwise as seen from outside, around the axis
/// `normal` through `center`. Returns the permutation.
pub fn ccw_order(center: Vec3, normal: Vec3, points: &[Vec3]) -> Vec<usize> {
    let n = normalize(normal);
    let seed = if n[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let e1 = normalize(sub(seed, scale(n, dot(seed, n))));
    let e2 = cross(n, e1);
    let mut idx: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let d = sub(p, center);
            (dot(d, e2).atan2(dot(d, e1)), i)
        })
        .collect();
    idx.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    idx.into_iter().map(|(_, i)| i).collect()
}

#[derive(Clone, Debug)]
pub struct Icosahedron {
    /// Unit-sphere vertex positions.
    pub coords: Vec<Vec3>,
    /// Edges `(a, b)` with `a < b`.
    pub edges: Vec<(usize, usize)>,
    /// Triangles, counter-clockwise from outside.
    pub faces: Vec<[usize; 3]>,
    /// Neighbours of each vertex counter-clockwise around its outward normal.
    pub rotation: RotationSystem,
}

impl Icosahedron {
    pub fn vertex_count(&self) -> usize {
        self.coords.len()
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        self.rotation.around(v)
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.rotation.around(a).contains(&(b as u32))
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let key = (a.min(b), a.max(b));
        self.edges.iter().position(|&e| e == key)
    }

    /// Hop distance on the icosahedron skeleton (0..=3).
    pub fn distance(&self, a: usize, b: usize) -> usize {
        if a == b {
            0
        } else if self.adjacent(a, b) {
            1
        } else if self.neighbors(a).iter().any(|&m| self.adjacent(m as usize, b)) {
            2
        } else {
            3
        }
    }
}

pub fn build_icosahedron() -> Icosahedron {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut raw: Vec<Vec3> = Vec::with_capacity(12);
    for &s1 in &[-1.0, 1.0] {
        for &s2 in &[-1.0, 1.0] {
            raw.push([0.0, s1, s2 * phi]);
            raw.push([s1, s2 * phi, 0.0]);
            raw.push([s2 * phi, 0.0, s1]);
        }
    }
    let coords: Vec<Vec3> = raw.iter().map(|&p| normalize(p)).collect();
    let mut edges = Vec::new();
    for a in 0..12 {
        for b in a + 1..12 {
            // edge length 2 on the raw coordinates
            if (norm(sub(raw[a], raw[b])) - 2.0).abs() < 1e-9 {
                edges.push((a, b));
            }
        }
    }
    let adj = |a: usize, b: usize| edges.contains(&(a.min(b), a.max(b)));
    let mut faces = Vec::new();
    for a in 0..12 {
        for b in a + 1..12 {
            for c in b + 1..12 {
                if adj(a, b) && adj(b, c) && adj(a, c) {
                    let n = cross(sub(coords[b], coords[a]), sub(coords[c], coords[a]));
                    if dot(n, coords[a]) > 0.0 {
                        faces.push([a, b, c]);
                    } else {
                        faces.push([a, c, b]);
                    }
                }
            }
        }
    }
    let mut order = Vec::with_capacity(12);
    for v in 0..12 {
        let nb: Vec<usize> = (0..12).filter(|&w| adj(v, w)).collect();
        let pts: Vec<Vec3> = nb.iter().map(|&w| coords[w]).collect();
        let perm = ccw_order(coords[v], coords[v], &pts);
        order.push(perm.into_iter().map(|i| nb[i] as u32).collect());
    }
    Icosahedron {
        coords,
        edges,
        faces,
        rotation: RotationSystem::new(order),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_degrees() {
        let ico = build_icosahedron();
        assert_eq!(ico.vertex_count(), 12);
        assert_eq!(ico.edges.len(), 30);
        assert_eq!(ico.faces.len(), 20);
        assert!((0..12).all(|v| ico.neighbors(v).len() == 5));
        assert_eq!(12 - 30 + 20, 2);
    }

    #[test]
    fn rotation_traces_twenty_triangles() {
        let ico = build_icosahedron();
        let faces = ico.rotation.faces().unwrap();
        assert_eq!(faces.len(), 20);
        assert!(faces.iter().all(|f| f.len() == 3));
        assert_eq!(ico.rotation.euler_characteristic().unwrap(), 2);
    }

    #[test]
    fn neighbourhood_overlap_is_at_most_three() {
        // |N(u) ∩ N[u']| <= 3 with equality exactly for adjacent pairs
        let ico = build_icosahedron();
        for u in 0..12 {
            for w in 0..12 {
                if u == w {
                    continue;
                }
                let overlap = ico
                    .neighbors(u)
                    .iter()
                    .filter(|&&x| x as usize == w || ico.adjacent(x as usize, w))
                    .count();
                assert!(overlap <= 3);
                assert_eq!(overlap == 3, ico.adjacent(u, w), "pair {u},{w}");
            }
        }
    }
}
