//! Surface discretisation for single-bounce Lambertian scattering.

use crate::geometry::{Scene, Vec3};

#[derive(Debug, Clone, Copy)]
pub struct Tile {
    pub center: Vec3,
    pub normal: Vec3,
    pub area: f64,
    pub surface: usize,
    pub two_sided: bool,
}

/// Splits every scattering surface into tiles whose longest edge does not
/// exceed `tile_size` (recursive longest-edge bisection).
pub fn tessellate(scene: &Scene, tile_size: f64) -> Vec<Tile> {
    let mut tiles = Vec::new();
    for (si, s) in scene.surfaces.iter().enumerate() {
        if !s.scatters {
            continue;
        }
        for t in &s.triangles {
            split(t.a, t.b, t.c, tile_size, &mut |a, b, c| {
                let area = 0.5 * (b - a).cross(c - a).norm();
                tiles.push(Tile {
                    center: (a + b + c) / 3.0,
                    normal: t.normal,
                    area,
                    surface: si,
                    two_sided: s.two_sided,
                });
            });
        }
    }
    tiles
}

fn split(a: Vec3, b: Vec3, c: Vec3, max_edge: f64, emit: &mut impl FnMut(Vec3, Vec3, Vec3)) {
    let ab = a.distance(b);
    let bc = b.distance(c);
    let ca = c.distance(a);
    let longest = ab.max(bc).max(ca);
    if longest <= max_edge {
        emit(a, b, c);
        return;
    }
    if ab >= bc && ab >= ca {
        let m = (a + b) * 0.5;
        split(a, m, c, max_edge, emit);
        split(m, b, c, max_edge, emit);
    } else if bc >= ca {
        let m = (b + c) * 0.5;
        split(a, b, m, max_edge, emit);
        split(a, m, c, max_edge, emit);
    } else {
        let m = (c + a) * 0.5;
        split(a, b, m, max_edge, emit);
        split(m, b, c, max_edge, emit);
    }
}

#[cfg(test)]
fn tile_area_total(tiles: &[Tile]) -> f64 {
    tiles.iter().map(|t| t.area).sum()
}
