//! Seeded placement of roadside objects.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::shapes::{add, axis_box, box_edges, prism, vertical_plate, BoxFaces};
use crate::error::Result;
use crate::geometry::{Material, Scene, Vec3};

const MAX_ATTEMPTS: usize = 200;
const TRUNK_SIDES: usize = 6;

/// Rejection sampler for non-overlapping circular footprints.
pub struct Placer {
    rng: ChaCha8Rng,
    taken: Vec<(f64, f64, f64)>,
}

impl Placer {
    pub fn new(seed: u64) -> Self {
        Placer {
            rng: ChaCha8Rng::seed_from_u64(seed),
            taken: Vec::new(),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Reserves a footprint that no placed object may overlap.
    pub fn reserve(&mut self, x: f64, y: f64, r: f64) {
        self.taken.push((x, y, r));
    }

    /// Samples a centre with `x` in `xs` and `|y|` in `ys` (either side of the
    /// track) whose footprint of radius `r` is free. `None` if the region is
    /// too crowded.
    pub fn place(&mut self, xs: (f64, f64), ys: (f64, f64), r: f64) -> Option<(f64, f64)> {
        for _ in 0..MAX_ATTEMPTS {
            let x = self.rng.gen_range(xs.0 + r..=xs.1 - r);
            let side = if self.rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let y = side * self.rng.gen_range(ys.0 + r..=ys.1 - r);
            let free = self
                .taken
                .iter()
                .all(|&(tx, ty, tr)| ((x - tx).powi(2) + (y - ty).powi(2)).sqrt() >= r + tr);
            if free {
                self.taken.push((x, y, r));
                return Some((x, y));
            }
        }
        None
    }
}

/// Tree: faceted trunk plus a box crown from 40 % of the height to the top.
pub fn tree(scene: &mut Scene, x: f64, y: f64, ground: f64, height: f64) -> Result<()> {
    let crown_base = ground + 0.4 * height;
    let half = (0.2 * height).clamp(1.0, 3.0);
    add(
        scene,
        prism(
            "tree_trunk",
            Material::TRUNK,
            (x, y),
            0.25,
            (ground, crown_base),
            TRUNK_SIDES,
        )?,
    );
    add(
        scene,
        axis_box(
            "tree_crown",
            Material::LEAF,
            Vec3::new(x - half, y - half, crown_base),
            Vec3::new(x + half, y + half, ground + height),
            BoxFaces::ALL,
        )?,
    );
    Ok(())
}

/// Footprint radius used when placing a tree of the given height.
pub fn tree_radius(height: f64) -> f64 {
    (0.2 * height).clamp(1.0, 3.0) * std::f64::consts::SQRT_2
}

/// Low vegetation block.
pub fn bush(scene: &mut Scene, tag: &str, x: f64, y: f64, ground: f64, half: f64, height: f64) -> Result<()> {
    add(
        scene,
        axis_box(
            tag,
            Material::LEAF,
            Vec3::new(x - half, y - half, ground),
            Vec3::new(x + half, y + half, ground + height),
            BoxFaces::STANDING,
        )?,
    );
    Ok(())
}

/// Concrete building with diffracting corners and roof edges.
pub fn building(scene: &mut Scene, x: f64, y: f64, ground: f64, half: (f64, f64), height: f64) -> Result<()> {
    let min = Vec3::new(x - half.0, y - half.1, ground);
    let max = Vec3::new(x + half.0, y + half.1, ground + height);
    add(
        scene,
        axis_box("building", Material::CONCRETE, min, max, BoxFaces::STANDING)?,
    );
    scene.edges.extend(box_edges(min, max, Material::CONCRETE)?);
    Ok(())
}

/// Metal billboard panel raised on a post.
pub fn billboard(
    scene: &mut Scene,
    x: f64,
    y: f64,
    ground: f64,
    heading: f64,
    size: (f64, f64),
    clearance: f64,
) -> Result<()> {
    let center = Vec3::new(x, y, ground + clearance + size.1 / 2.0);
    add(
        scene,
        vertical_plate("billboard", Material::METAL, center, heading, size.0, size.1)?,
    );
    add(
        scene,
        axis_box(
            "billboard_post",
            Material::METAL,
            Vec3::new(x - 0.2, y - 0.2, ground),
            Vec3::new(x + 0.2, y + 0.2, ground + clearance),
            BoxFaces::STANDING,
        )?,
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn placements_do_not_overlap_and_repeat() {
        let run = |seed| {
            let mut p = Placer::new(seed);
            (0..50)
                .filter_map(|_| p.place((0.0, 700.0), (20.0, 200.0), 3.0))
                .collect::<Vec<_>>()
        };
        let a = run(7);
        assert_eq!(a, run(7));
        assert_ne!(a, run(8));
        for (i, p) in a.iter().enumerate() {
            assert!(p.1.abs() >= 23.0 - 1e-9 && p.1.abs() <= 197.0 + 1e-9);
            for q in &a[i + 1..] {
                assert!(((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt() >= 6.0 - 1e-9);
            }
        }
    }
}
