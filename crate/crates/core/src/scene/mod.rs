//! Procedural railway scenes: viaduct, cutting, station, and free space.
//!
//! Axes: `x` runs along the track from chainage 0, `y` is lateral (the
//! transmitter sits on the `+y` side), `z` is up. Clutter placement is driven
//! by a seeded ChaCha generator, so a `(params, seed)` pair always produces
//! the same scene.
//!
//! Layout choices the published dimensions leave open (pier spacing, clutter
//! counts, column grid, hall position, bridge chainage, pole line offset) are
//! parameters with documented defaults.

mod clutter;
mod cutting;
pub mod shapes;
mod station;
mod viaduct;

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

pub use cutting::{build_cutting, CuttingParams};
pub use station::{build_station, StationParams};
pub use viaduct::{build_viaduct, ViaductParams};

use crate::error::{Error, Result};
use crate::geometry::{Aabb, Edge, MaterialKind, Scene, Surface, Vec3};

/// Schema identifier written into scene exports.
pub const SCENE_SCHEMA: &str = "railbeam.scene/1";

/// Lateral transmitter offset assumed when keeping clutter clear of the mast.
const DEFAULT_TX_OFFSET: f64 = 100.0;
/// Clutter-free radius around the transmitter mast footprint.
const TX_KEEPOUT: f64 = 15.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Viaduct,
    Cutting,
    Station,
    FreeSpace,
}

impl ScenarioKind {
    pub const RAILWAY: [ScenarioKind; 3] = [ScenarioKind::Viaduct, ScenarioKind::Cutting, ScenarioKind::Station];

    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::Viaduct => "viaduct",
            ScenarioKind::Cutting => "cutting",
            ScenarioKind::Station => "station",
            ScenarioKind::FreeSpace => "free-space",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "viaduct" => Ok(ScenarioKind::Viaduct),
            "cutting" => Ok(ScenarioKind::Cutting),
            "station" => Ok(ScenarioKind::Station),
            "free-space" | "freespace" | "free" => Ok(ScenarioKind::FreeSpace),
            other => Err(Error::invalid("scenario", format!("unknown scenario '{other}'"))),
        }
    }
}

/// Empty scene with a straight track, for free-space runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FreeSpaceParams {
    pub track_length: f64,
    /// Lateral half-width of the bounds.
    pub half_width: f64,
    pub height: f64,
}

impl Default for FreeSpaceParams {
    fn default() -> Self {
        FreeSpaceParams {
            track_length: 700.0,
            half_width: 200.0,
            height: 100.0,
        }
    }
}

pub fn build_free_space(p: &FreeSpaceParams) -> Result<Scene> {
    positive("free_space.track_length", p.track_length)?;
    positive("free_space.half_width", p.half_width)?;
    positive("free_space.height", p.height)?;
    let bounds = Aabb::new(
        Vec3::new(0.0, -p.half_width, -1.0),
        Vec3::new(p.track_length, p.half_width, p.height),
    );
    let scene = Scene::empty(bounds, vec![Vec3::ZERO, Vec3::new(p.track_length, 0.0, 0.0)]);
    scene.validate()?;
    Ok(scene)
}

/// Scenario selection with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Scenario {
    Viaduct(ViaductParams),
    Cutting(CuttingParams),
    Station(StationParams),
    FreeSpace(FreeSpaceParams),
}

impl Scenario {
    pub fn default_for(kind: ScenarioKind) -> Scenario {
        match kind {
            ScenarioKind::Viaduct => Scenario::Viaduct(ViaductParams::default()),
            ScenarioKind::Cutting => Scenario::Cutting(CuttingParams::default()),
            ScenarioKind::Station => Scenario::Station(StationParams::default()),
            ScenarioKind::FreeSpace => Scenario::FreeSpace(FreeSpaceParams::default()),
        }
    }

    pub fn kind(&self) -> ScenarioKind {
        match self {
            Scenario::Viaduct(_) => ScenarioKind::Viaduct,
            Scenario::Cutting(_) => ScenarioKind::Cutting,
            Scenario::Station(_) => ScenarioKind::Station,
            Scenario::FreeSpace(_) => ScenarioKind::FreeSpace,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Scenario::Viaduct(p) => p.validate(),
            Scenario::Cutting(p) => p.validate(),
            Scenario::Station(p) => p.validate(),
            Scenario::FreeSpace(p) => build_free_space(p).map(|_| ()),
        }
    }

    pub fn build(&self, seed: u64) -> Result<Scene> {
        match self {
            Scenario::Viaduct(p) => build_viaduct(p, seed),
            Scenario::Cutting(p) => build_cutting(p, seed),
            Scenario::Station(p) => build_station(p, seed),
            Scenario::FreeSpace(p) => build_free_space(p),
        }
    }
}

/// Versioned JSON form of a scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneExport {
    pub schema: String,
    pub scenario: ScenarioKind,
    pub seed: u64,
    pub bounds: Aabb,
    pub track: Vec<Vec3>,
    pub surfaces: Vec<Surface>,
    pub edges: Vec<Edge>,
}

impl SceneExport {
    pub fn new(scene: &Scene, scenario: ScenarioKind, seed: u64) -> Self {
        SceneExport {
            schema: SCENE_SCHEMA.to_string(),
            scenario,
            seed,
            bounds: scene.bounds,
            track: scene.track.clone(),
            surfaces: scene.surfaces.clone(),
            edges: scene.edges.clone(),
        }
    }

    pub fn into_scene(self) -> Result<Scene> {
        if self.schema != SCENE_SCHEMA {
            return Err(Error::invalid(
                "schema",
                format!("expected {SCENE_SCHEMA}, found {}", self.schema),
            ));
        }
        let scene = Scene {
            surfaces: self.surfaces,
            edges: self.edges,
            track: self.track,
            bounds: self.bounds,
        };
        scene.validate()?;
        Ok(scene)
    }
}

/// Scene summary printed by the command-line tool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Census {
    pub surfaces: usize,
    pub triangles: usize,
    pub edges: usize,
    /// Triangles per material.
    pub materials: Vec<(MaterialKind, usize)>,
    /// Surfaces per tag, sorted by tag.
    pub tags: Vec<(String, usize)>,
}

impl Census {
    pub fn of(scene: &Scene) -> Census {
        let mut tags = std::collections::BTreeMap::new();
        for s in &scene.surfaces {
            *tags.entry(s.tag.clone()).or_insert(0usize) += 1;
        }
        Census {
            surfaces: scene.surfaces.len(),
            triangles: scene.triangle_count(),
            edges: scene.edges.len(),
            materials: scene.material_census().into_iter().collect(),
            tags: tags.into_iter().collect(),
        }
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(field.to_string(), format!("must be positive, got {v}")))
    }
}

fn check_extent(prefix: &str, x: f64, y: f64) -> Result<()> {
    if !(x.is_finite() && x >= 100.0) {
        return Err(Error::invalid(format!("{prefix}.extent_x"), "must be at least 100 m"));
    }
    if !(y.is_finite() && y >= 100.0) {
        return Err(Error::invalid(format!("{prefix}.extent_y"), "must be at least 100 m"));
    }
    Ok(())
}

#[cfg(test)]
mod tests;
