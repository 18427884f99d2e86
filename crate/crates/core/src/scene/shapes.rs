//! Primitive solids and plates used by the scene builders.

use std::f64::consts::PI;

use crate::error::Result;
use crate::geometry::{Edge, Material, Scene, Surface, Vec3};

/// Pushes the quad with its winding chosen so the normal points along
/// `outward`.
pub fn quad_facing(s: &mut Surface, a: Vec3, b: Vec3, c: Vec3, d: Vec3, outward: Vec3) -> Result<()> {
    let n = (b - a).cross(c - a);
    if n.dot(outward) >= 0.0 {
        s.push_quad(a, b, c, d)
    } else {
        s.push_quad(a, d, c, b)
    }
}

/// Faces of an axis-aligned box, in `min`/`max` terms per axis.
#[derive(Debug, Clone, Copy)]
pub struct BoxFaces {
    pub x_min: bool,
    pub x_max: bool,
    pub y_min: bool,
    pub y_max: bool,
    pub bottom: bool,
    pub top: bool,
}

impl BoxFaces {
    pub const ALL: BoxFaces = BoxFaces {
        x_min: true,
        x_max: true,
        y_min: true,
        y_max: true,
        bottom: true,
        top: true,
    };
    /// Solid standing on the ground.
    pub const STANDING: BoxFaces = BoxFaces {
        bottom: false,
        ..BoxFaces::ALL
    };
    /// Long member running along x and continuing past the scene ends.
    pub const RUNNING_X: BoxFaces = BoxFaces {
        x_min: false,
        x_max: false,
        ..BoxFaces::ALL
    };
}

/// Closed axis-aligned box as one one-sided surface with outward normals.
pub fn axis_box(tag: &str, material: Material, min: Vec3, max: Vec3, faces: BoxFaces) -> Result<Surface> {
    let mut s = Surface::new(tag, material);
    let v = |x: f64, y: f64, z: f64| Vec3::new(x, y, z);
    let (x0, y0, z0, x1, y1, z1) = (min.x, min.y, min.z, max.x, max.y, max.z);
    if faces.x_min {
        quad_facing(
            &mut s,
            v(x0, y0, z0),
            v(x0, y1, z0),
            v(x0, y1, z1),
            v(x0, y0, z1),
            -Vec3::X,
        )?;
    }
    if faces.x_max {
        quad_facing(
            &mut s,
            v(x1, y0, z0),
            v(x1, y1, z0),
            v(x1, y1, z1),
            v(x1, y0, z1),
            Vec3::X,
        )?;
    }
    if faces.y_min {
        quad_facing(
            &mut s,
            v(x0, y0, z0),
            v(x1, y0, z0),
            v(x1, y0, z1),
            v(x0, y0, z1),
            -Vec3::Y,
        )?;
    }
    if faces.y_max {
        quad_facing(
            &mut s,
            v(x0, y1, z0),
            v(x1, y1, z0),
            v(x1, y1, z1),
            v(x0, y1, z1),
            Vec3::Y,
        )?;
    }
    if faces.bottom {
        quad_facing(
            &mut s,
            v(x0, y0, z0),
            v(x1, y0, z0),
            v(x1, y1, z0),
            v(x0, y1, z0),
            -Vec3::Z,
        )?;
    }
    if faces.top {
        quad_facing(
            &mut s,
            v(x0, y0, z1),
            v(x1, y0, z1),
            v(x1, y1, z1),
            v(x0, y1, z1),
            Vec3::Z,
        )?;
    }
    Ok(s)
}

/// Horizontal rectangle at height `z` facing `up` or down.
pub fn horizontal_rect(
    tag: &str,
    material: Material,
    x: (f64, f64),
    y: (f64, f64),
    z: f64,
    up: bool,
) -> Result<Surface> {
    let mut s = Surface::new(tag, material);
    let n = if up { Vec3::Z } else { -Vec3::Z };
    quad_facing(
        &mut s,
        Vec3::new(x.0, y.0, z),
        Vec3::new(x.1, y.0, z),
        Vec3::new(x.1, y.1, z),
        Vec3::new(x.0, y.1, z),
        n,
    )?;
    Ok(s)
}

/// Vertical prism with a regular `sides`-gon cross-section and a top cap.
pub fn prism(
    tag: &str,
    material: Material,
    center: (f64, f64),
    radius: f64,
    z: (f64, f64),
    sides: usize,
) -> Result<Surface> {
    let mut s = Surface::new(tag, material);
    let ring: Vec<Vec3> = (0..sides)
        .map(|i| {
            let a = 2.0 * PI * i as f64 / sides as f64;
            Vec3::new(center.0 + radius * a.cos(), center.1 + radius * a.sin(), 0.0)
        })
        .collect();
    for i in 0..sides {
        let p = ring[i];
        let q = ring[(i + 1) % sides];
        let mid = (p + q) * 0.5 - Vec3::new(center.0, center.1, 0.0);
        quad_facing(
            &mut s,
            Vec3::new(p.x, p.y, z.0),
            Vec3::new(q.x, q.y, z.0),
            Vec3::new(q.x, q.y, z.1),
            Vec3::new(p.x, p.y, z.1),
            mid,
        )?;
    }
    let top = Vec3::new(center.0, center.1, z.1);
    for i in 0..sides {
        let p = ring[i];
        let q = ring[(i + 1) % sides];
        s.push_triangle(top, Vec3::new(p.x, p.y, z.1), Vec3::new(q.x, q.y, z.1))?;
        let last = s.triangles.len() - 1;
        if s.triangles[last].normal.z < 0.0 {
            s.triangles.pop();
            s.push_triangle(top, Vec3::new(q.x, q.y, z.1), Vec3::new(p.x, p.y, z.1))?;
        }
    }
    Ok(s)
}

/// Thin vertical plate, reflecting on both sides. `center` is the plate
/// centre, `heading` the horizontal direction of its width.
pub fn vertical_plate(
    tag: &str,
    material: Material,
    center: Vec3,
    heading: f64,
    width: f64,
    height: f64,
) -> Result<Surface> {
    let mut s = Surface::new(tag, material).two_sided(true);
    let u = Vec3::new(heading.cos(), heading.sin(), 0.0) * (width / 2.0);
    let h = Vec3::Z * (height / 2.0);
    s.push_quad(center - u - h, center + u - h, center + u + h, center - u + h)?;
    Ok(s)
}

/// The four vertical and four top edges of a standing axis-aligned box.
pub fn box_edges(min: Vec3, max: Vec3, material: Material) -> Result<Vec<Edge>> {
    let v = |x: f64, y: f64, z: f64| Vec3::new(x, y, z);
    let (x0, y0, z0, x1, y1, z1) = (min.x, min.y, min.z, max.x, max.y, max.z);
    let mut edges = Vec::with_capacity(8);
    for (x, nx) in [(x0, -Vec3::X), (x1, Vec3::X)] {
        for (y, ny) in [(y0, -Vec3::Y), (y1, Vec3::Y)] {
            edges.push(Edge::convex(v(x, y, z0), v(x, y, z1), nx, ny, material)?);
        }
    }
    edges.push(Edge::convex(v(x0, y0, z1), v(x1, y0, z1), Vec3::Z, -Vec3::Y, material)?);
    edges.push(Edge::convex(v(x0, y1, z1), v(x1, y1, z1), Vec3::Z, Vec3::Y, material)?);
    edges.push(Edge::convex(v(x0, y0, z1), v(x0, y1, z1), Vec3::Z, -Vec3::X, material)?);
    edges.push(Edge::convex(v(x1, y0, z1), v(x1, y1, z1), Vec3::Z, Vec3::X, material)?);
    Ok(edges)
}

/// Adds a surface unless it is empty.
pub fn add(scene: &mut Scene, s: Surface) {
    if !s.triangles.is_empty() {
        scene.surfaces.push(s);
    }
}
