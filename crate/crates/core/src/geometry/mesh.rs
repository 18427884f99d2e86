use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::{Aabb, Material, MaterialKind, Vec3};
use crate::error::{Error, Result};

/// Triangles with a smaller area are rejected as degenerate.
pub const MIN_TRIANGLE_AREA: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triangle {
    pub a: Vec3,
    pub b: Vec3,
    pub c: Vec3,
    /// Unit normal following the right-hand rule over `a, b, c`.
    pub normal: Vec3,
}

impl Triangle {
    pub fn new(a: Vec3, b: Vec3, c: Vec3) -> Result<Triangle> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(Error::NonFinite("Triangle::new"));
        }
        let n = (b - a).cross(c - a);
        let area = 0.5 * n.norm();
        if area <= MIN_TRIANGLE_AREA {
            return Err(Error::invalid(
                "triangle",
                format!("degenerate triangle (area {area:e} m^2)"),
            ));
        }
        Ok(Triangle {
            a,
            b,
            c,
            normal: n.normalized(),
        })
    }

    pub fn area(&self) -> f64 {
        0.5 * (self.b - self.a).cross(self.c - self.a).norm()
    }

    pub fn centroid(&self) -> Vec3 {
        (self.a + self.b + self.c) / 3.0
    }
}

/// A group of triangles sharing a material and a descriptive tag such as
/// `"guardrail"` or `"pole"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Surface {
    pub tag: String,
    pub material: Material,
    pub triangles: Vec<Triangle>,
    /// Thin surfaces (billboards, signs) reflect on both sides. Faces of
    /// closed solids only reflect on their outward side.
    pub two_sided: bool,
    /// Whether the surface takes part in diffuse scattering.
    pub scatters: bool,
}

impl Surface {
    pub fn new(tag: impl Into<String>, material: Material) -> Self {
        Surface {
            tag: tag.into(),
            material,
            triangles: Vec::new(),
            two_sided: false,
            scatters: true,
        }
    }

    pub fn two_sided(mut self, yes: bool) -> Self {
        self.two_sided = yes;
        self
    }

    pub fn scatters(mut self, yes: bool) -> Self {
        self.scatters = yes;
        self
    }

    pub fn push_triangle(&mut self, a: Vec3, b: Vec3, c: Vec3) -> Result<()> {
        self.triangles.push(Triangle::new(a, b, c)?);
        Ok(())
    }

    /// Planar quad `a b c d` (counter-clockwise seen from the normal side),
    /// split into two triangles.
    pub fn push_quad(&mut self, a: Vec3, b: Vec3, c: Vec3, d: Vec3) -> Result<()> {
        self.push_triangle(a, b, c)?;
        self.push_triangle(a, c, d)
    }

    pub fn area(&self) -> f64 {
        self.triangles.iter().map(Triangle::area).sum()
    }
}

/// A diffracting wedge edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: Vec3,
    pub b: Vec3,
    /// Outward normal of face 0.
    pub n0: Vec3,
    /// Outward normal of face n.
    pub n1: Vec3,
    /// Interior (solid) angle of the wedge in radians.
    pub interior_angle: f64,
    pub material: Material,
}

impl Edge {
    /// Convex wedge whose interior angle follows from the face normals.
    pub fn convex(a: Vec3, b: Vec3, n0: Vec3, n1: Vec3, material: Material) -> Result<Edge> {
        let cos = n0.normalized().dot(n1.normalized()).clamp(-1.0, 1.0);
        Edge::new(a, b, n0, n1, PI - cos.acos(), material)
    }

    pub fn new(a: Vec3, b: Vec3, n0: Vec3, n1: Vec3, interior_angle: f64, material: Material) -> Result<Edge> {
        if !(a.is_finite() && b.is_finite() && n0.is_finite() && n1.is_finite()) {
            return Err(Error::NonFinite("Edge::new"));
        }
        if a.distance(b) <= 1e-9 {
            return Err(Error::invalid("edge", "endpoints coincide"));
        }
        if !(interior_angle > 0.0 && interior_angle < 2.0 * PI) {
            return Err(Error::invalid(
                "edge",
                format!("wedge angle {interior_angle} outside (0, 2pi)"),
            ));
        }
        Ok(Edge {
            a,
            b,
            n0: n0.normalized(),
            n1: n1.normalized(),
            interior_angle,
            material,
        })
    }

    pub fn direction(&self) -> Vec3 {
        (self.b - self.a).normalized()
    }

    pub fn length(&self) -> f64 {
        self.a.distance(self.b)
    }

    /// Exterior angle expressed as the UTD wedge index `n` (`n pi` is the
    /// exterior angle).
    pub fn wedge_index(&self) -> f64 {
        (2.0 * PI - self.interior_angle) / PI
    }

    /// Unit vector lying on face 0, perpendicular to the edge and pointing
    /// away from it.
    pub fn face0_tangent(&self) -> Vec3 {
        let t = self.n0.cross(self.direction());
        let convex = self.interior_angle < PI;
        let toward_face_n = t.dot(self.n1);
        // Face 0 bends behind face n on a convex wedge.
        if (convex && toward_face_n > 0.0) || (!convex && toward_face_n < 0.0) {
            -t
        } else {
            t
        }
    }
}

/// A complete propagation scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub surfaces: Vec<Surface>,
    pub edges: Vec<Edge>,
    /// Track centreline polyline (rail-head height), ordered by chainage.
    pub track: Vec<Vec3>,
    pub bounds: Aabb,
}

impl Scene {
    /// Scene with no geometry, e.g. for free-space runs.
    pub fn empty(bounds: Aabb, track: Vec<Vec3>) -> Scene {
        Scene {
            surfaces: Vec::new(),
            edges: Vec::new(),
            track,
            bounds,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.track.len() < 2 {
            return Err(Error::invalid("track", "needs at least two points"));
        }
        for p in &self.track {
            if !self.bounds.contains(*p) {
                return Err(Error::invalid(
                    "track",
                    format!("point ({:.3}, {:.3}, {:.3}) outside scene bounds", p.x, p.y, p.z),
                ));
            }
        }
        for s in &self.surfaces {
            if !(s.material.relative_permittivity > 0.0 && s.material.conductivity >= 0.0) {
                return Err(Error::invalid("material", format!("surface '{}'", s.tag)));
            }
            for t in &s.triangles {
                if t.area() <= super::MIN_TRIANGLE_AREA {
                    return Err(Error::invalid("triangle", format!("degenerate in '{}'", s.tag)));
                }
            }
        }
        Ok(())
    }

    pub fn triangle_count(&self) -> usize {
        self.surfaces.iter().map(|s| s.triangles.len()).sum()
    }

    /// Triangle count per material.
    pub fn material_census(&self) -> BTreeMap<MaterialKind, usize> {
        let mut census = BTreeMap::new();
        for s in &self.surfaces {
            *census.entry(s.material.kind).or_insert(0) += s.triangles.len();
        }
        census
    }

    pub fn surfaces_tagged<'a>(&'a self, tag: &'a str) -> impl Iterator<Item = &'a Surface> + 'a {
        self.surfaces.iter().filter(move |s| s.tag == tag)
    }

    pub fn track_length(&self) -> f64 {
        self.track.windows(2).map(|w| w[0].distance(w[1])).sum()
    }

    /// Point on the track at `chainage` metres from its start, with the unit
    /// direction of travel there. Chainages beyond the ends extrapolate along
    /// the first/last segment.
    pub fn track_at(&self, chainage: f64) -> (Vec3, Vec3) {
        let mut remaining = chainage;
        let n = self.track.len();
        for (i, w) in self.track.windows(2).enumerate() {
            let len = w[0].distance(w[1]);
            let dir = (w[1] - w[0]).normalized();
            if remaining <= len || i == n - 2 {
                return (w[0] + dir * remaining, dir);
            }
            remaining -= len;
        }
        // Validated scenes always have >= 2 points; degenerate fallback.
        (self.track[0], Vec3::X)
    }
}
