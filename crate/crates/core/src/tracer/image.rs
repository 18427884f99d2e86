//! Image tree for specular reflections.
//!
//! The transmitter is mirrored across every admissible facet sequence up to
//! the configured order. Node admissibility only depends on the transmitter,
//! so the tree is built once per transmitter position and reused for every
//! receiver of a sweep.

use crate::geometry::{mirror_point, Facet, Vec3};

const PLANE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
pub struct ImageNode {
    pub parent: u32,
    pub facet: u32,
    pub image: Vec3,
    pub depth: u8,
}

pub const ROOT: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct ImageTree {
    pub nodes: Vec<ImageNode>,
}

impl ImageTree {
    /// Breadth-first construction. A child `f` of a node with image `I`
    /// reflecting in facet `p` is kept only when
    /// - `f != p` and `I` is off the plane of `f`,
    /// - a one-sided `f` faces `I`,
    /// - `f` has a vertex on the real (non-image) side of `p`,
    /// - the bounding sphere of `f` meets the cone from `I` through the
    ///   bounding sphere of `p`.
    pub fn build(source: Vec3, facets: &[Facet], max_order: usize) -> ImageTree {
        let mut nodes: Vec<ImageNode> = Vec::new();
        let mut frontier: Vec<u32> = Vec::new();
        if max_order == 0 {
            return ImageTree { nodes };
        }
        let spheres: Vec<(Vec3, f64)> = facets
            .iter()
            .map(|f| (f.bounds.centroid(), 0.5 * f.bounds.extent().norm()))
            .collect();
        for (fi, f) in facets.iter().enumerate() {
            if admissible(source, f) {
                nodes.push(ImageNode {
                    parent: ROOT,
                    facet: fi as u32,
                    image: mirror_point(source, &f.plane()),
                    depth: 1,
                });
                frontier.push((nodes.len() - 1) as u32);
            }
        }
        for depth in 2..=max_order {
            let mut next = Vec::new();
            for &ni in &frontier {
                let node = nodes[ni as usize];
                let pf = &facets[node.facet as usize];
                // Real side of the parent facet is where the parent's source lies.
                let real_sign = -pf.signed_distance(node.image).signum();
                let cone = Cone::new(node.image, spheres[node.facet as usize]);
                for (fi, f) in facets.iter().enumerate() {
                    if fi as u32 == node.facet || !admissible(node.image, f) {
                        continue;
                    }
                    if let Some(c) = &cone {
                        if !c.meets(spheres[fi]) {
                            continue;
                        }
                    }
                    let reachable = f.triangles.iter().any(|t| {
                        [t.a, t.b, t.c]
                            .iter()
                            .any(|&v| pf.signed_distance(v) * real_sign > PLANE_EPS)
                    });
                    if !reachable {
                        continue;
                    }
                    nodes.push(ImageNode {
                        parent: ni,
                        facet: fi as u32,
                        image: mirror_point(node.image, &f.plane()),
                        depth: depth as u8,
                    });
                    next.push((nodes.len() - 1) as u32);
                }
            }
            frontier = next;
        }
        ImageTree { nodes }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// Reflection points (ordered from transmitter to receiver) of the path
    /// represented by `node`, or `None` if the receiver cannot be reached
    /// through the facet sequence. Occlusion is not checked here.
    pub fn reflection_points(&self, node_index: usize, facets: &[Facet], rx: Vec3) -> Option<Vec<Vec3>> {
        let depth = self.nodes[node_index].depth as usize;
        let mut points = vec![Vec3::ZERO; depth];
        let mut target = rx;
        let mut idx = node_index as u32;
        let mut slot = depth;
        while idx != ROOT {
            let node = &self.nodes[idx as usize];
            let f = &facets[node.facet as usize];
            let d_img = f.signed_distance(node.image);
            let d_tgt = f.signed_distance(target);
            // Target must be on the real side, opposite the image.
            if d_img * d_tgt >= 0.0 || d_tgt.abs() <= PLANE_EPS {
                return None;
            }
            if !f.two_sided && d_tgt <= 0.0 {
                return None;
            }
            let t = d_img / (d_img - d_tgt);
            let p = node.image + (target - node.image) * t;
            f.locate(p)?;
            slot -= 1;
            points[slot] = p;
            target = p;
            idx = node.parent;
        }
        Some(points)
    }
}

/// Circular cone from an apex through a bounding sphere.
struct Cone {
    apex: Vec3,
    axis: Vec3,
    half_angle: f64,
}

impl Cone {
    /// `None` when the apex lies inside the sphere (no restriction).
    fn new(apex: Vec3, (center, radius): (Vec3, f64)) -> Option<Cone> {
        let v = center - apex;
        let dist = v.norm();
        if dist <= radius * (1.0 + 1e-9) + 1e-9 {
            return None;
        }
        Some(Cone {
            apex,
            axis: v / dist,
            half_angle: (radius / dist).asin(),
        })
    }

    fn meets(&self, (center, radius): (Vec3, f64)) -> bool {
        let v = center - self.apex;
        let dist = v.norm();
        if dist <= radius + 1e-9 {
            return true;
        }
        let angle = (v.dot(self.axis) / dist).clamp(-1.0, 1.0).acos();
        let spread = (radius / dist).min(1.0).asin();
        angle <= self.half_angle + spread + 1e-9
    }
}

fn admissible(source: Vec3, f: &Facet) -> bool {
    let d = f.signed_distance(source);
    if d.abs() <= PLANE_EPS {
        return false;
    }
    f.two_sided || d > 0.0
}
