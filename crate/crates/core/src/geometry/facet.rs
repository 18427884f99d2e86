//! Coplanar triangle grouping.
//!
//! The image method works per reflecting plane, not per triangle. Triangles
//! that share a plane, a material and sidedness are merged into one facet,
//! which keeps the image tree small when a scene repeats an object along the
//! track (poles, columns) or splits a wall into many triangles.

use super::{Aabb, Material, Plane, Scene, Triangle, Vec3};

const NORMAL_TOL: f64 = 1e-9;
const OFFSET_TOL: f64 = 1e-6;
const INSIDE_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct Facet {
    pub normal: Vec3,
    /// Plane offset: `normal . x = offset` on the facet.
    pub offset: f64,
    pub material: Material,
    pub two_sided: bool,
    pub triangles: Vec<Triangle>,
    /// Owning surface of each triangle.
    pub surfaces: Vec<usize>,
    pub bounds: Aabb,
    tri_bounds: Vec<Aabb>,
}

impl Facet {
    pub fn plane(&self) -> Plane {
        Plane::new(self.normal * self.offset, self.normal)
    }

    #[inline]
    pub fn signed_distance(&self, p: Vec3) -> f64 {
        self.normal.dot(p) - self.offset
    }

    /// Whether a point on the facet plane falls inside one of its triangles.
    /// Returns the owning surface index.
    pub fn locate(&self, p: Vec3) -> Option<usize> {
        let tol = 1e-6;
        if p.x < self.bounds.min.x - tol
            || p.x > self.bounds.max.x + tol
            || p.y < self.bounds.min.y - tol
            || p.y > self.bounds.max.y + tol
            || p.z < self.bounds.min.z - tol
            || p.z > self.bounds.max.z + tol
        {
            return None;
        }
        for (i, t) in self.triangles.iter().enumerate() {
            let b = &self.tri_bounds[i];
            if p.x < b.min.x - tol
                || p.x > b.max.x + tol
                || p.y < b.min.y - tol
                || p.y > b.max.y + tol
                || p.z < b.min.z - tol
                || p.z > b.max.z + tol
            {
                continue;
            }
            if point_in_triangle(t, p) {
                return Some(self.surfaces[i]);
            }
        }
        None
    }

    pub fn area(&self) -> f64 {
        self.triangles.iter().map(Triangle::area).sum()
    }
}

fn point_in_triangle(t: &Triangle, p: Vec3) -> bool {
    let v0 = t.b - t.a;
    let v1 = t.c - t.a;
    let v2 = p - t.a;
    let d00 = v0.dot(v0);
    let d01 = v0.dot(v1);
    let d11 = v1.dot(v1);
    let d20 = v2.dot(v0);
    let d21 = v2.dot(v1);
    let denom = d00 * d11 - d01 * d01;
    if denom <= 0.0 {
        return false;
    }
    let v = (d11 * d20 - d01 * d21) / denom;
    let w = (d00 * d21 - d01 * d20) / denom;
    let u = 1.0 - v - w;
    u >= -INSIDE_TOL && v >= -INSIDE_TOL && w >= -INSIDE_TOL
}

/// Groups every scene triangle into planar facets. Output order follows the
/// first appearance of each plane in the scene, so it is deterministic.
pub fn build_facets(scene: &Scene) -> Vec<Facet> {
    let mut facets: Vec<Facet> = Vec::new();
    for (si, s) in scene.surfaces.iter().enumerate() {
        for t in &s.triangles {
            let offset = t.normal.dot(t.a);
            let existing = facets.iter_mut().find(|f| {
                f.two_sided == s.two_sided
                    && f.material == s.material
                    && (f.normal.dot(t.normal) - 1.0).abs() < NORMAL_TOL
                    && (f.offset - offset).abs() < OFFSET_TOL
            });
            let mut tb = Aabb::empty();
            tb.grow(t.a);
            tb.grow(t.b);
            tb.grow(t.c);
            match existing {
                Some(f) => {
                    f.triangles.push(*t);
                    f.surfaces.push(si);
                    f.bounds = f.bounds.union(&tb);
                    f.tri_bounds.push(tb);
                }
                None => facets.push(Facet {
                    normal: t.normal,
                    offset,
                    material: s.material,
                    two_sided: s.two_sided,
                    triangles: vec![*t],
                    surfaces: vec![si],
                    bounds: tb,
                    tri_bounds: vec![tb],
                }),
            }
        }
    }
    facets
}
