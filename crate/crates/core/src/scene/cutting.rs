//! Track in a U-shaped groove crossed by a narrow bridge.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::clutter::{building, bush, tree, tree_radius, Placer};
use super::shapes::{add, axis_box, horizontal_rect, quad_facing, BoxFaces};
use super::{check_extent, positive, TX_KEEPOUT};
use crate::error::{Error, Result};
use crate::geometry::{Aabb, Edge, Material, Scene, Surface, Vec3};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CuttingParams {
    pub depth: f64,
    pub bottom_width: f64,
    pub top_width: f64,
    /// Along-track width of the bridge deck crossing the cutting.
    pub bridge_width: f64,
    /// Chainage of the bridge's near side.
    pub bridge_chainage: f64,
    pub bridge_thickness: f64,
    pub pole_height: f64,
    pub pole_spacing: f64,
    /// Lateral position of the pole line (negative: away from the TX side).
    pub pole_offset: f64,
    pub tree_height_max: f64,
    pub coppice_height_max: f64,
    pub building_height_max: f64,
    pub extent_x: f64,
    pub extent_y: f64,
    pub trees: usize,
    pub coppice: usize,
    pub buildings: usize,
    pub cable_boxes: usize,
}

impl Default for CuttingParams {
    fn default() -> Self {
        CuttingParams {
            depth: 5.0,
            bottom_width: 16.0,
            top_width: 40.0,
            bridge_width: 9.77,
            bridge_chainage: 530.0,
            bridge_thickness: 1.2,
            pole_height: 9.3,
            pole_spacing: 50.0,
            pole_offset: -7.0,
            tree_height_max: 10.0,
            coppice_height_max: 3.0,
            building_height_max: 20.0,
            extent_x: 700.0,
            extent_y: 400.0,
            trees: 24,
            coppice: 20,
            buildings: 6,
            cable_boxes: 8,
        }
    }
}

impl CuttingParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("cutting.depth", self.depth),
            ("cutting.bottom_width", self.bottom_width),
            ("cutting.top_width", self.top_width),
            ("cutting.bridge_width", self.bridge_width),
            ("cutting.bridge_thickness", self.bridge_thickness),
            ("cutting.pole_height", self.pole_height),
            ("cutting.pole_spacing", self.pole_spacing),
            ("cutting.tree_height_max", self.tree_height_max),
            ("cutting.coppice_height_max", self.coppice_height_max),
            ("cutting.building_height_max", self.building_height_max),
        ] {
            positive(name, v)?;
        }
        if self.top_width <= self.bottom_width {
            return Err(Error::invalid("cutting.top_width", "must exceed bottom_width"));
        }
        if self.pole_offset.abs() >= self.bottom_width / 2.0 {
            return Err(Error::invalid(
                "cutting.pole_offset",
                "poles must stand on the cutting floor",
            ));
        }
        if self.tree_height_max < 3.0 {
            return Err(Error::invalid("cutting.tree_height_max", "must be at least 3 m"));
        }
        if self.coppice_height_max < 0.5 {
            return Err(Error::invalid("cutting.coppice_height_max", "must be at least 0.5 m"));
        }
        if self.building_height_max < 4.0 {
            return Err(Error::invalid("cutting.building_height_max", "must be at least 4 m"));
        }
        check_extent("cutting", self.extent_x, self.extent_y)?;
        if self.top_width / 2.0 + 10.0 >= self.extent_y / 2.0 {
            return Err(Error::invalid("cutting.top_width", "cutting does not fit the extent"));
        }
        if self.bridge_chainage < 0.0 || self.bridge_chainage + self.bridge_width > self.extent_x {
            return Err(Error::invalid("cutting.bridge_chainage", "bridge outside the extent"));
        }
        Ok(())
    }

    /// Pole chainages: every `pole_spacing` metres, both track ends included.
    pub fn pole_positions(&self) -> Vec<f64> {
        let n = (self.extent_x / self.pole_spacing + 1e-9).floor() as usize;
        (0..=n).map(|i| i as f64 * self.pole_spacing).collect()
    }
}

pub fn build_cutting(p: &CuttingParams, seed: u64) -> Result<Scene> {
    p.validate()?;
    let (lx, hy) = (p.extent_x, p.extent_y / 2.0);
    let (b, t, d) = (p.bottom_width / 2.0, p.top_width / 2.0, p.depth);
    let bounds = Aabb::new(
        Vec3::new(0.0, -hy, -1.0),
        Vec3::new(lx, hy, d + p.building_height_max + 40.0),
    );
    let track = vec![Vec3::new(0.0, 0.0, 0.0), Vec3::new(lx, 0.0, 0.0)];
    let mut scene = Scene::empty(bounds, track);

    add(
        &mut scene,
        horizontal_rect("track_bed", Material::SOIL, (0.0, lx), (-b, b), 0.0, true)?.scatters(false),
    );
    add(
        &mut scene,
        horizontal_rect("ground", Material::SOIL, (0.0, lx), (t, hy), d, true)?.scatters(false),
    );
    add(
        &mut scene,
        horizontal_rect("ground", Material::SOIL, (0.0, lx), (-hy, -t), d, true)?.scatters(false),
    );

    // Sloped side walls, facing into the groove.
    let slope = (t - b).hypot(d);
    for side in [1.0, -1.0] {
        let n = Vec3::new(0.0, -side * d / slope, (t - b) / slope);
        let mut wall = Surface::new("cutting_wall", Material::CONCRETE);
        quad_facing(
            &mut wall,
            Vec3::new(0.0, side * b, 0.0),
            Vec3::new(lx, side * b, 0.0),
            Vec3::new(lx, side * t, d),
            Vec3::new(0.0, side * t, d),
            n,
        )?;
        add(&mut scene, wall);
        scene.edges.push(Edge::convex(
            Vec3::new(0.0, side * t, d),
            Vec3::new(lx, side * t, d),
            Vec3::Z,
            n,
            Material::CONCRETE,
        )?);
    }

    // Narrow bridge across the top of the cutting.
    let span = t + 10.0;
    let (x0, x1) = (p.bridge_chainage, p.bridge_chainage + p.bridge_width);
    let (z0, z1) = (d, d + p.bridge_thickness);
    add(
        &mut scene,
        axis_box(
            "bridge",
            Material::CONCRETE,
            Vec3::new(x0, -span, z0),
            Vec3::new(x1, span, z1),
            BoxFaces {
                bottom: false,
                y_min: false,
                y_max: false,
                ..BoxFaces::ALL
            },
        )?,
    );
    add(
        &mut scene,
        horizontal_rect("bridge", Material::CONCRETE, (x0, x1), (-t, t), z0, false)?,
    );
    for (x, nx) in [(x0, -Vec3::X), (x1, Vec3::X)] {
        scene.edges.push(Edge::convex(
            Vec3::new(x, -t, z0),
            Vec3::new(x, t, z0),
            -Vec3::Z,
            nx,
            Material::CONCRETE,
        )?);
        scene.edges.push(Edge::convex(
            Vec3::new(x, -span, z1),
            Vec3::new(x, span, z1),
            Vec3::Z,
            nx,
            Material::CONCRETE,
        )?);
    }

    // Trackside poles.
    let half = 0.2;
    for x in p.pole_positions() {
        let (xa, xb) = ((x - half).max(0.0), (x + half).min(lx));
        add(
            &mut scene,
            axis_box(
                "pole",
                Material::METAL,
                Vec3::new(xa, p.pole_offset - half, 0.0),
                Vec3::new(xb, p.pole_offset + half, p.pole_height),
                BoxFaces::STANDING,
            )?,
        );
    }

    let mut placer = Placer::new(seed);
    // Cable and track boxes on the cutting floor, opposite the poles.
    let box_side = -p.pole_offset.signum();
    for _ in 0..p.cable_boxes {
        let x = placer.rng().gen_range(5.0..lx - 5.0);
        let y = box_side * (b - 1.5);
        add(
            &mut scene,
            axis_box(
                "cable_box",
                Material::CONCRETE,
                Vec3::new(x - 1.0, y - 0.4, 0.0),
                Vec3::new(x + 1.0, y + 0.4, 0.8),
                BoxFaces::STANDING,
            )?,
        );
    }

    placer.reserve(0.0, super::DEFAULT_TX_OFFSET, TX_KEEPOUT);
    placer.reserve(x0 + p.bridge_width / 2.0, 0.0, span + p.bridge_width);
    let xs = (0.0, lx);
    for _ in 0..p.buildings {
        let half: (f64, f64) = (placer.rng().gen_range(6.0..14.0), placer.rng().gen_range(5.0..10.0));
        let height = placer.rng().gen_range(6.0..p.building_height_max);
        let r = half.0.hypot(half.1);
        if let Some((x, y)) = placer.place(xs, (t + 40.0, hy), r) {
            building(&mut scene, x, y, d, half, height)?;
        }
    }
    for i in 0..p.trees {
        // The first tree of each run reaches the stated maximum height.
        let height = if i == 0 {
            p.tree_height_max
        } else {
            placer.rng().gen_range(3.0..=p.tree_height_max)
        };
        if let Some((x, y)) = placer.place(xs, (t + 1.0, (t + 40.0).min(hy)), tree_radius(height)) {
            tree(&mut scene, x, y, d, height)?;
        }
    }
    for i in 0..p.coppice {
        let height = if i == 0 {
            p.coppice_height_max
        } else {
            placer.rng().gen_range(0.5..=p.coppice_height_max)
        };
        let half = placer.rng().gen_range(1.0..2.5);
        if let Some((x, y)) = placer.place(xs, (t + 1.0, (t + 30.0).min(hy)), half * std::f64::consts::SQRT_2) {
            bush(&mut scene, "coppice", x, y, d, half, height)?;
        }
    }
    scene.validate()?;
    Ok(scene)
}
