//! Ray queries through the acceleration structure against a plain scan over
//! every triangle.

use railbeam::geometry::{Aabb, AccelStructure, Material, Scene, Surface, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Moller-Trumbore without culling, written independently of the library.
fn ray_triangle(o: Vec3, d: Vec3, a: Vec3, b: Vec3, c: Vec3) -> Option<f64> {
    let e1 = b - a;
    let e2 = c - a;
    let p = d.cross(e2);
    let det = e1.dot(p);
    if det.abs() < 1e-12 {
        return None;
    }
    let inv = 1.0 / det;
    let s = o - a;
    let u = s.dot(p) * inv;
    if !(0.0..=1.0).contains(&u) {
        return None;
    }
    let q = s.cross(e1);
    let v = d.dot(q) * inv;
    if v < 0.0 || u + v > 1.0 {
        return None;
    }
    let t = e2.dot(q) * inv;
    (t > 1e-6).then_some(t)
}

fn random_scene(rng: &mut ChaCha8Rng, n: usize) -> (Scene, Vec<[Vec3; 3]>) {
    let mut scene = Scene::empty(
        Aabb::new(Vec3::new(-60.0, -60.0, -60.0), Vec3::new(60.0, 60.0, 60.0)),
        vec![],
    );
    let mut tris = Vec::new();
    let mut surface = Surface::new("random", Material::CONCRETE);
    while tris.len() < n {
        let centre = Vec3::new(
            rng.gen_range(-50.0..50.0),
            rng.gen_range(-50.0..50.0),
            rng.gen_range(-50.0..50.0),
        );
        let mut corner = || {
            centre
                + Vec3::new(
                    rng.gen_range(-4.0..4.0),
                    rng.gen_range(-4.0..4.0),
                    rng.gen_range(-4.0..4.0),
                )
        };
        let (a, b, c) = (corner(), corner(), corner());
        if (b - a).cross(c - a).norm() < 0.5 {
            continue;
        }
        surface.push_triangle(a, b, c).unwrap();
        tris.push([a, b, c]);
    }
    scene.surfaces.push(surface);
    (scene, tris)
}

fn random_direction(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v * (1.0 / n);
        }
    }
}

#[test]
fn thousand_triangles_ten_thousand_rays() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let (scene, tris) = random_scene(&mut rng, 1000);
    let accel = AccelStructure::build(&scene).unwrap();
    assert_eq!(accel.triangle_count(), 1000);
    let mut hits = 0;
    for _ in 0..10_000 {
        let origin = Vec3::new(
            rng.gen_range(-70.0..70.0),
            rng.gen_range(-70.0..70.0),
            rng.gen_range(-70.0..70.0),
        );
        let dir = random_direction(&mut rng);
        let expected = tris
            .iter()
            .enumerate()
            .filter_map(|(i, t)| ray_triangle(origin, dir, t[0], t[1], t[2]).map(|d| (i, d)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        let got = accel.intersect(origin, dir, f64::INFINITY).unwrap();
        match (expected, got) {
            (None, None) => {}
            (Some((i, d)), Some(h)) => {
                hits += 1;
                assert!((h.distance - d).abs() < 1e-6, "distance {} vs {d}", h.distance);
                if h.triangle != i {
                    let other = tris[h.triangle];
                    let d2 = ray_triangle(origin, dir, other[0], other[1], other[2]).expect("reported triangle is hit");
                    assert!((d2 - d).abs() < 1e-6, "tie broken to a farther triangle");
                }
                assert!((h.point - (origin + dir * h.distance)).norm() < 1e-9);
            }
            (e, g) => panic!("hit/miss disagree: brute {e:?} accel {g:?} from {origin:?} along {dir:?}"),
        }
    }
    assert!(hits > 1000, "too few hits ({hits}) to be a meaningful check");
}

#[test]
fn occlusion_matches_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (scene, tris) = random_scene(&mut rng, 500);
    let accel = AccelStructure::build(&scene).unwrap();
    for _ in 0..2000 {
        let a = Vec3::new(
            rng.gen_range(-60.0..60.0),
            rng.gen_range(-60.0..60.0),
            rng.gen_range(-60.0..60.0),
        );
        let b = Vec3::new(
            rng.gen_range(-60.0..60.0),
            rng.gen_range(-60.0..60.0),
            rng.gen_range(-60.0..60.0),
        );
        let len = a.distance(b);
        let dir = (b - a) * (1.0 / len);
        let blocked = tris
            .iter()
            .filter_map(|t| ray_triangle(a, dir, t[0], t[1], t[2]))
            .any(|t| t < len - 1e-6);
        assert_eq!(accel.occluded(a, b), blocked);
    }
}
