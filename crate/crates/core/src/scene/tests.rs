use super::*;
use crate::geometry::{AccelStructure, Material};

fn tagged_triangles(scene: &Scene, tag: &str) -> usize {
    scene.surfaces_tagged(tag).map(|s| s.triangles.len()).sum()
}

fn tagged_bounds(scene: &Scene, tag: &str) -> Aabb {
    let mut b = Aabb::empty();
    for s in scene.surfaces_tagged(tag) {
        for t in &s.triangles {
            b.grow(t.a);
            b.grow(t.b);
            b.grow(t.c);
        }
    }
    b
}

fn json(scene: &Scene, kind: ScenarioKind, seed: u64) -> String {
    serde_json::to_string(&SceneExport::new(scene, kind, seed)).unwrap()
}

#[test]
fn viaduct_defaults() {
    let scene = build_viaduct(&ViaductParams::default(), 1).unwrap();
    let e = scene.bounds.extent();
    assert_eq!((e.x, e.y), (700.0, 400.0));
    assert!(scene.track.iter().all(|p| p.z == 19.0));
    let deck = tagged_bounds(&scene, "deck_top");
    assert_eq!((deck.min.y, deck.max.y, deck.max.z), (-6.5, 6.5, 19.0));
    let rail = tagged_bounds(&scene, "guardrail");
    assert_eq!(rail.max.z - 19.0, 1.5);
    assert_eq!(rail.min.z, 19.0);
    // Clutter stays under the deck except the few tall trees.
    let tall = scene
        .surfaces
        .iter()
        .filter(|s| s.tag == "tree_crown")
        .filter(|s| s.triangles.iter().any(|t| t.a.z.max(t.b.z).max(t.c.z) > 19.0))
        .count();
    assert_eq!(tall, ViaductParams::default().tall_trees);
    for tag in ["building", "billboard", "bush"] {
        assert!(tagged_bounds(&scene, tag).max.z < 19.0, "{tag}");
    }
}

#[test]
fn viaduct_is_deterministic() {
    let p = ViaductParams::default();
    let a = build_viaduct(&p, 42).unwrap();
    let b = build_viaduct(&p, 42).unwrap();
    assert_eq!(json(&a, ScenarioKind::Viaduct, 42), json(&b, ScenarioKind::Viaduct, 42));
    let c = build_viaduct(&p, 43).unwrap();
    assert_ne!(json(&a, ScenarioKind::Viaduct, 42), json(&c, ScenarioKind::Viaduct, 42));
}

#[test]
fn viaduct_without_guardrail() {
    let p = ViaductParams::default();
    let with = build_viaduct(&p, 5).unwrap();
    let without = build_viaduct(
        &ViaductParams {
            guardrail_height: 0.0,
            ..p
        },
        5,
    )
    .unwrap();
    assert_eq!(without.surfaces_tagged("guardrail").count(), 0);
    let rail_tris = tagged_triangles(&with, "guardrail");
    // Two rails, each with inner, outer and top faces.
    assert_eq!(rail_tris, 12);
    assert_eq!(with.triangle_count() - without.triangle_count(), rail_tris);
}

#[test]
fn cutting_defaults() {
    let p = CuttingParams::default();
    let scene = build_cutting(&p, 1).unwrap();
    let e = scene.bounds.extent();
    assert_eq!((e.x, e.y), (700.0, 400.0));
    let floor = tagged_bounds(&scene, "track_bed");
    assert_eq!((floor.max.y - floor.min.y, floor.max.z), (16.0, 0.0));
    let walls = tagged_bounds(&scene, "cutting_wall");
    assert_eq!(walls.max.y - walls.min.y, 40.0);
    assert_eq!((walls.min.z, walls.max.z), (0.0, 5.0));
    let bridge = tagged_bounds(&scene, "bridge");
    assert!((bridge.max.x - bridge.min.x - 9.77).abs() < 1e-9);
    assert!(bridge.min.y <= -20.0 && bridge.max.y >= 20.0);
    assert_eq!(bridge.min.z, 5.0);
    let poles = tagged_bounds(&scene, "pole");
    assert_eq!(poles.max.z, 9.3);
    assert_eq!(scene.surfaces_tagged("pole").count(), 15);
    let trees = tagged_bounds(&scene, "tree_crown");
    assert!((trees.max.z - 5.0 - 10.0).abs() < 1e-9);
    let coppice = tagged_bounds(&scene, "coppice");
    assert!((coppice.max.z - 5.0 - 3.0).abs() < 1e-9);
    assert!(tagged_bounds(&scene, "building").max.z - 5.0 <= 20.0);
}

#[test]
fn pole_count_follows_spacing() {
    for (spacing, count) in [(50.0, 15), (25.0, 29), (100.0, 8)] {
        let p = CuttingParams {
            pole_spacing: spacing,
            ..CuttingParams::default()
        };
        assert_eq!(p.pole_positions().len(), count);
        let scene = build_cutting(&p, 3).unwrap();
        assert_eq!(scene.surfaces_tagged("pole").count(), count);
    }
}

#[test]
fn station_defaults() {
    let p = StationParams::default();
    let scene = build_station(&p, 1).unwrap();
    let e = scene.bounds.extent();
    assert_eq!((e.x, e.y), (700.0, 300.0));
    let floor = tagged_bounds(&scene, "platform_floor");
    assert_eq!((floor.max.x - floor.min.x, floor.max.y - floor.min.y), (600.0, 48.0));
    let ceiling = tagged_bounds(&scene, "ceiling");
    assert_eq!(ceiling.min.z - floor.max.z, 20.0);
    assert_eq!(
        scene.surfaces_tagged("column").count(),
        p.column_rows * p.columns_per_row
    );
    let p4 = StationParams {
        column_rows: 4,
        columns_per_row: 7,
        ..p
    };
    let scene4 = build_station(&p4, 1).unwrap();
    assert_eq!(scene4.surfaces_tagged("column").count(), 28);
}

#[test]
fn station_has_los_and_nlos_track_sections() {
    let scene = build_station(&StationParams::default(), 1).unwrap();
    let accel = AccelStructure::build(&scene).unwrap();
    let tx = Vec3::new(0.0, 100.0, 22.0);
    let blocked: Vec<bool> = (0..=700)
        .step_by(10)
        .map(|x| accel.occluded(tx, Vec3::new(x as f64, 0.0, 3.1)))
        .collect();
    assert!(blocked.iter().any(|b| *b));
    assert!(blocked.iter().any(|b| !*b));
}

#[test]
fn materials_are_builtin() {
    for kind in ScenarioKind::RAILWAY {
        let scene = Scenario::default_for(kind).build(9).unwrap();
        for s in &scene.surfaces {
            assert_eq!(s.material, Material::builtin(s.material.kind), "{kind} {}", s.tag);
        }
        let census = Census::of(&scene);
        assert!(census.materials.len() <= 6);
        assert_eq!(census.triangles, scene.triangle_count());
    }
}

#[test]
fn export_round_trip() {
    let scene = build_cutting(&CuttingParams::default(), 4).unwrap();
    let text = json(&scene, ScenarioKind::Cutting, 4);
    let back: SceneExport = serde_json::from_str(&text).unwrap();
    assert_eq!(back.schema, SCENE_SCHEMA);
    assert_eq!(back.into_scene().unwrap(), scene);
}

#[test]
fn invalid_dimensions_rejected() {
    assert!(build_viaduct(
        &ViaductParams {
            bridge_height: -1.0,
            ..ViaductParams::default()
        },
        0
    )
    .is_err());
    assert!(build_cutting(
        &CuttingParams {
            top_width: 10.0,
            ..CuttingParams::default()
        },
        0
    )
    .is_err());
    assert!(build_station(
        &StationParams {
            platform_length: 800.0,
            ..StationParams::default()
        },
        0
    )
    .is_err());
    let err = build_viaduct(
        &ViaductParams {
            extent_x: 50.0,
            ..ViaductParams::default()
        },
        0,
    )
    .unwrap_err();
    assert!(err.is_validation());
    assert!(err.to_string().contains("extent_x"));
}

#[test]
fn scenario_names_parse() {
    for kind in [
        ScenarioKind::Viaduct,
        ScenarioKind::Cutting,
        ScenarioKind::Station,
        ScenarioKind::FreeSpace,
    ] {
        assert_eq!(kind.name().parse::<ScenarioKind>().unwrap(), kind);
    }
    assert!("tunnel".parse::<ScenarioKind>().is_err());
}
