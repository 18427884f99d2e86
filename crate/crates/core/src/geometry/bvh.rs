//! Bounding-volume hierarchy over all scene triangles.
//!
//! Built with binned SAH splits. Hits are ordered by `(distance, triangle id)`
//! so that ties resolve exactly like a linear scan over the triangle list.

use super::{Aabb, Scene, Vec3};
use crate::error::{Error, Result};

/// Minimum hit distance; suppresses self-intersection at interaction points.
pub const INTERSECT_EPS: f64 = 1e-6;

const LEAF_SIZE: usize = 4;
const SAH_BINS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    pub point: Vec3,
    /// Global triangle id (surface-major order over the scene).
    pub triangle: usize,
    pub surface: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, Copy)]
struct AccelTri {
    v0: Vec3,
    e1: Vec3,
    e2: Vec3,
    surface: u32,
}

#[derive(Debug, Clone, Copy)]
struct Node {
    bounds: Aabb,
    /// Leaf: first primitive index into `order`. Inner nodes keep their left
    /// child at the next slot and store the right child index.
    start: u32,
    count: u32,
    right: u32,
}

impl Node {
    fn is_leaf(&self) -> bool {
        self.count > 0
    }
}

/// Immutable acceleration structure; safe to share across worker threads.
#[derive(Debug, Clone)]
pub struct AccelStructure {
    tris: Vec<AccelTri>,
    order: Vec<u32>,
    nodes: Vec<Node>,
}

struct BuildPrim {
    bounds: Aabb,
    centroid: Vec3,
    id: u32,
}

impl AccelStructure {
    /// Builds the hierarchy. Fails on scenes without triangles.
    pub fn build(scene: &Scene) -> Result<AccelStructure> {
        let mut tris = Vec::with_capacity(scene.triangle_count());
        for (si, s) in scene.surfaces.iter().enumerate() {
            for t in &s.triangles {
                tris.push(AccelTri {
                    v0: t.a,
                    e1: t.b - t.a,
                    e2: t.c - t.a,
                    surface: si as u32,
                });
            }
        }
        if tris.is_empty() {
            return Err(Error::EmptyScene);
        }
        let mut prims: Vec<BuildPrim> = tris
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let mut b = Aabb::empty();
                b.grow(t.v0);
                b.grow(t.v0 + t.e1);
                b.grow(t.v0 + t.e2);
                BuildPrim {
                    bounds: b,
                    centroid: b.centroid(),
                    id: i as u32,
                }
            })
            .collect();
        let mut nodes = Vec::with_capacity(2 * prims.len());
        let n = prims.len();
        build_recursive(&mut prims, 0, n, &mut nodes);
        let order = prims.iter().map(|p| p.id).collect();
        Ok(AccelStructure { tris, order, nodes })
    }

    pub fn triangle_count(&self) -> usize {
        self.tris.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_leaf()).count()
    }

    pub fn bounds(&self) -> Aabb {
        self.nodes[0].bounds
    }

    /// Nearest hit with distance in `(INTERSECT_EPS, t_max]`.
    pub fn intersect(&self, origin: Vec3, direction: Vec3, t_max: f64) -> Result<Option<Hit>> {
        if !(origin.is_finite() && direction.is_finite()) || t_max.is_nan() {
            return Err(Error::NonFinite("intersect"));
        }
        if (direction.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("direction", "must be a unit vector"));
        }
        Ok(self.nearest(origin, direction, t_max))
    }

    pub(crate) fn nearest(&self, origin: Vec3, dir: Vec3, t_max: f64) -> Option<Hit> {
        let inv = Vec3::new(1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z);
        let mut best: Option<(f64, u32)> = None;
        let mut limit = t_max;
        let mut stack: Vec<u32> = Vec::with_capacity(64);
        stack.push(0);
        while let Some(ni) = stack.pop() {
            let node = &self.nodes[ni as usize];
            if node.bounds.ray_entry(origin, inv, limit).is_none() {
                continue;
            }
            if node.is_leaf() {
                for &id in &self.order[node.start as usize..(node.start + node.count) as usize] {
                    if let Some(t) = intersect_tri(&self.tris[id as usize], origin, dir, limit) {
                        let better = match best {
                            None => true,
                            Some((bt, bid)) => t < bt || (t == bt && id < bid),
                        };
                        if better {
                            best = Some((t, id));
                            limit = t;
                        }
                    }
                }
            } else {
                stack.push(node.right);
                stack.push(ni + 1);
            }
        }
        best.map(|(t, id)| Hit {
            point: origin + dir * t,
            triangle: id as usize,
            surface: self.tris[id as usize].surface as usize,
            distance: t,
        })
    }

    /// True when any triangle blocks the open segment `a -> b`, ignoring
    /// `INTERSECT_EPS` at both ends.
    pub fn occluded(&self, a: Vec3, b: Vec3) -> bool {
        let d = b - a;
        let len = d.norm();
        if len <= 2.0 * INTERSECT_EPS {
            return false;
        }
        let dir = d / len;
        let inv = Vec3::new(1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z);
        let limit = len - INTERSECT_EPS;
        let mut stack: Vec<u32> = Vec::with_capacity(64);
        stack.push(0);
        while let Some(ni) = stack.pop() {
            let node = &self.nodes[ni as usize];
            if node.bounds.ray_entry(a, inv, limit).is_none() {
                continue;
            }
            if node.is_leaf() {
                for &id in &self.order[node.start as usize..(node.start + node.count) as usize] {
                    if intersect_tri(&self.tris[id as usize], a, dir, limit).is_some() {
                        return true;
                    }
                }
            } else {
                stack.push(node.right);
                stack.push(ni + 1);
            }
        }
        false
    }
}

/// Möller–Trumbore, two-sided. Returns `t` in `(INTERSECT_EPS, t_max]`.
#[inline]
fn intersect_tri(t: &AccelTri, origin: Vec3, dir: Vec3, t_max: f64) -> Option<f64> {
    let p = dir.cross(t.e2);
    let det = t.e1.dot(p);
    if det.abs() < 1e-14 {
        return None;
    }
    let inv_det = 1.0 / det;
    let s = origin - t.v0;
    let u = s.dot(p) * inv_det;
    if !(0.0..=1.0).contains(&u) {
        return None;
    }
    let q = s.cross(t.e1);
    let v = dir.dot(q) * inv_det;
    if v < 0.0 || u + v > 1.0 {
        return None;
    }
    let dist = t.e2.dot(q) * inv_det;
    if dist > INTERSECT_EPS && dist <= t_max {
        Some(dist)
    } else {
        None
    }
}

fn build_recursive(prims: &mut [BuildPrim], start: usize, end: usize, nodes: &mut Vec<Node>) -> u32 {
    let index = nodes.len() as u32;
    let mut bounds = Aabb::empty();
    let mut cbounds = Aabb::empty();
    for p in &prims[start..end] {
        bounds = bounds.union(&p.bounds);
        cbounds.grow(p.centroid);
    }
    nodes.push(Node {
        bounds,
        start: start as u32,
        count: 0,
        right: 0,
    });
    let count = end - start;
    let make_leaf = |nodes: &mut Vec<Node>| {
        nodes[index as usize].count = count as u32;
        index
    };
    if count <= LEAF_SIZE {
        return make_leaf(nodes);
    }
    let ext = cbounds.extent();
    let axis = if ext.x >= ext.y && ext.x >= ext.z {
        0
    } else if ext.y >= ext.z {
        1
    } else {
        2
    };
    if ext[axis] <= 0.0 {
        // All centroids coincide; fall back to a median split by id.
        let mid = start + count / 2;
        split_children(prims, start, mid, end, index, nodes);
        return index;
    }

    let lo = cbounds.min[axis];
    let scale = SAH_BINS as f64 / ext[axis];
    let bin_of = |c: f64| (((c - lo) * scale) as usize).min(SAH_BINS - 1);
    let mut bin_bounds = [Aabb::empty(); SAH_BINS];
    let mut bin_counts = [0usize; SAH_BINS];
    for p in &prims[start..end] {
        let b = bin_of(p.centroid[axis]);
        bin_counts[b] += 1;
        bin_bounds[b] = bin_bounds[b].union(&p.bounds);
    }
    let mut best_cost = f64::INFINITY;
    let mut best_split = 0;
    for split in 1..SAH_BINS {
        let (mut lb, mut rb) = (Aabb::empty(), Aabb::empty());
        let (mut lc, mut rc) = (0usize, 0usize);
        for i in 0..split {
            lb = lb.union(&bin_bounds[i]);
            lc += bin_counts[i];
        }
        for i in split..SAH_BINS {
            rb = rb.union(&bin_bounds[i]);
            rc += bin_counts[i];
        }
        if lc == 0 || rc == 0 {
            continue;
        }
        let cost = lb.surface_area() * lc as f64 + rb.surface_area() * rc as f64;
        if cost < best_cost {
            best_cost = cost;
            best_split = split;
        }
    }
    let mid = if best_split == 0 {
        prims[start..end].sort_by(|a, b| a.centroid[axis].total_cmp(&b.centroid[axis]).then(a.id.cmp(&b.id)));
        start + count / 2
    } else {
        let slice = &mut prims[start..end];
        let mut i = 0;
        for j in 0..slice.len() {
            if bin_of(slice[j].centroid[axis]) < best_split {
                slice.swap(i, j);
                i += 1;
            }
        }
        start + i
    };
    split_children(prims, start, mid, end, index, nodes);
    index
}

fn split_children(prims: &mut [BuildPrim], start: usize, mid: usize, end: usize, index: u32, nodes: &mut Vec<Node>) {
    let left = build_recursive(prims, start, mid, nodes);
    debug_assert_eq!(left, index + 1);
    let right = build_recursive(prims, mid, end, nodes);
    nodes[index as usize].right = right;
}
