//! Elevated track on a viaduct with low roadside clutter.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::clutter::{billboard, building, bush, tree, tree_radius, Placer};
use super::shapes::{add, axis_box, horizontal_rect, BoxFaces};
use super::{check_extent, positive, TX_KEEPOUT};
use crate::error::{Error, Result};
use crate::geometry::{Aabb, Edge, Material, Scene, Vec3};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ViaductParams {
    /// Track (deck top) height above ground.
    pub bridge_height: f64,
    pub top_width: f64,
    /// Zero removes the guardrails.
    pub guardrail_height: f64,
    pub guardrail_thickness: f64,
    pub deck_thickness: f64,
    pub pier_spacing: f64,
    /// Along-track length of the scene.
    pub extent_x: f64,
    /// Cross-track width of the scene, centred on the track.
    pub extent_y: f64,
    pub trees: usize,
    /// Trees taller than the deck.
    pub tall_trees: usize,
    pub bushes: usize,
    pub buildings: usize,
    pub billboards: usize,
}

impl Default for ViaductParams {
    fn default() -> Self {
        ViaductParams {
            bridge_height: 19.0,
            top_width: 13.0,
            guardrail_height: 1.5,
            guardrail_thickness: 0.3,
            deck_thickness: 2.5,
            pier_spacing: 32.0,
            extent_x: 700.0,
            extent_y: 400.0,
            trees: 16,
            tall_trees: 3,
            bushes: 12,
            buildings: 8,
            billboards: 4,
        }
    }
}

impl ViaductParams {
    pub fn validate(&self) -> Result<()> {
        positive("viaduct.bridge_height", self.bridge_height)?;
        positive("viaduct.top_width", self.top_width)?;
        positive("viaduct.deck_thickness", self.deck_thickness)?;
        positive("viaduct.pier_spacing", self.pier_spacing)?;
        positive("viaduct.guardrail_thickness", self.guardrail_thickness)?;
        if !(self.guardrail_height.is_finite() && self.guardrail_height >= 0.0) {
            return Err(Error::invalid("viaduct.guardrail_height", "must be non-negative"));
        }
        if self.deck_thickness >= self.bridge_height {
            return Err(Error::invalid(
                "viaduct.deck_thickness",
                "must be below the bridge height",
            ));
        }
        if 2.0 * self.guardrail_thickness >= self.top_width {
            return Err(Error::invalid(
                "viaduct.guardrail_thickness",
                "guardrails wider than the deck",
            ));
        }
        check_extent("viaduct", self.extent_x, self.extent_y)
    }
}

pub fn build_viaduct(p: &ViaductParams, seed: u64) -> Result<Scene> {
    p.validate()?;
    let (lx, hy) = (p.extent_x, p.extent_y / 2.0);
    let h = p.bridge_height;
    let w = p.top_width / 2.0;
    let top = h + p.guardrail_height.max(0.0) + 60.0;
    let bounds = Aabb::new(Vec3::new(0.0, -hy, -1.0), Vec3::new(lx, hy, top));
    let track = vec![Vec3::new(0.0, 0.0, h), Vec3::new(lx, 0.0, h)];
    let mut scene = Scene::empty(bounds, track);

    add(
        &mut scene,
        horizontal_rect("ground", Material::SOIL, (0.0, lx), (-hy, hy), 0.0, true)?.scatters(false),
    );

    // Deck: the top carries the track and does not scatter.
    add(
        &mut scene,
        horizontal_rect("deck_top", Material::CONCRETE, (0.0, lx), (-w, w), h, true)?.scatters(false),
    );
    let deck_sides = BoxFaces {
        top: false,
        ..BoxFaces::RUNNING_X
    };
    add(
        &mut scene,
        axis_box(
            "deck",
            Material::CONCRETE,
            Vec3::new(0.0, -w, h - p.deck_thickness),
            Vec3::new(lx, w, h),
            deck_sides,
        )?,
    );

    if p.guardrail_height > 0.0 {
        let g = p.guardrail_height;
        let t = p.guardrail_thickness;
        for (y0, y1) in [(-w, -w + t), (w - t, w)] {
            add(
                &mut scene,
                axis_box(
                    "guardrail",
                    Material::CONCRETE,
                    Vec3::new(0.0, y0, h),
                    Vec3::new(lx, y1, h + g),
                    BoxFaces {
                        bottom: false,
                        ..BoxFaces::RUNNING_X
                    },
                )?,
            );
            let outer = if y0 < 0.0 { y0 } else { y1 };
            let inner = if y0 < 0.0 { y1 } else { y0 };
            let out_n = Vec3::new(0.0, outer.signum(), 0.0);
            scene.edges.push(Edge::convex(
                Vec3::new(0.0, outer, h + g),
                Vec3::new(lx, outer, h + g),
                Vec3::Z,
                out_n,
                Material::CONCRETE,
            )?);
            scene.edges.push(Edge::convex(
                Vec3::new(0.0, inner, h + g),
                Vec3::new(lx, inner, h + g),
                Vec3::Z,
                -out_n,
                Material::CONCRETE,
            )?);
        }
    } else {
        for y in [-w, w] {
            scene.edges.push(Edge::convex(
                Vec3::new(0.0, y, h),
                Vec3::new(lx, y, h),
                Vec3::Z,
                Vec3::new(0.0, y.signum(), 0.0),
                Material::CONCRETE,
            )?);
        }
    }

    // Piers under the deck.
    let pier_half = (1.0, (w - 1.0).max(0.5));
    let mut x = p.pier_spacing / 2.0;
    while x + pier_half.0 <= lx {
        add(
            &mut scene,
            axis_box(
                "pier",
                Material::CONCRETE,
                Vec3::new(x - pier_half.0, -pier_half.1, 0.0),
                Vec3::new(x + pier_half.0, pier_half.1, h - p.deck_thickness),
                BoxFaces {
                    bottom: false,
                    top: false,
                    ..BoxFaces::ALL
                },
            )?,
        );
        x += p.pier_spacing;
    }

    let mut placer = Placer::new(seed);
    placer.reserve(0.0, super::DEFAULT_TX_OFFSET, TX_KEEPOUT);
    let corridor = w + 5.0;
    let xs = (0.0, lx);
    for _ in 0..p.buildings {
        let half: (f64, f64) = (placer.rng().gen_range(5.0..15.0), placer.rng().gen_range(5.0..10.0));
        let height = placer.rng().gen_range(6.0..(h - 1.0).max(6.5));
        let r = (half.0 * half.0 + half.1 * half.1).sqrt();
        if let Some((x, y)) = placer.place(xs, (corridor + 30.0, hy), r) {
            building(&mut scene, x, y, 0.0, half, height)?;
        }
    }
    for _ in 0..p.billboards {
        let heading = placer.rng().gen_range(0.0..std::f64::consts::PI);
        if let Some((x, y)) = placer.place(xs, (corridor + 10.0, hy.min(120.0)), 5.0) {
            billboard(&mut scene, x, y, 0.0, heading, (8.0, 4.0), 8.0)?;
        }
    }
    for i in 0..p.trees + p.tall_trees {
        let height = if i < p.tall_trees {
            placer.rng().gen_range(h + 1.0..h + 6.0)
        } else {
            placer.rng().gen_range(5.0..(h - 3.0).max(5.5))
        };
        if let Some((x, y)) = placer.place(xs, (corridor, hy.min(150.0)), tree_radius(height)) {
            tree(&mut scene, x, y, 0.0, height)?;
        }
    }
    for _ in 0..p.bushes {
        let half = placer.rng().gen_range(1.0..2.0);
        let height = placer.rng().gen_range(1.0..3.0);
        if let Some((x, y)) = placer.place(xs, (corridor, hy.min(150.0)), half * std::f64::consts::SQRT_2) {
            bush(&mut scene, "bush", x, y, 0.0, half, height)?;
        }
    }
    scene.validate()?;
    Ok(scene)
}
