use super::*;
use crate::geometry::catalog::*;
use crate::geometry::sample_uniform;
use crate::mc::{stream, Serial};
use alloc::vec;
use rand::Rng;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn random_dir(rng: &mut mc::Stream, n: usize) -> Point {
    let v: Point = (0..n).map(|_| StandardNormal.sample(rng)).collect();
    vector::normalize(&v).unwrap()
}

fn regular_simplex() -> Shape {
    let h = 3f64.sqrt() / 2.0;
    Shape::polytope_from_vertices(vec![
        vec![0.0, 0.0, 0.0],
        vec![1.0, 0.0, 0.0],
        vec![0.5, h, 0.0],
        vec![0.5, h / 3.0, (2.0f64 / 3.0).sqrt()],
    ])
    .unwrap()
}

#[test]
fn square_cones() {
    let sq = unit_square();
    let t = tangent_cone(&sq, &[0.0, 0.0]).unwrap();
    assert_eq!(t.lin_dim(), 2);
    assert!(t.contains(&[1.0, 2.0]));
    assert!(!t.contains(&[-0.1, 1.0]));
    let n = normal_cone(&sq, &[0.0, 0.0]).unwrap();
    assert!(n.contains(&[-1.0, -3.0]));
    assert!(!n.contains(&[0.1, -1.0]));
    assert_eq!(n.generators().len(), 2);

    let t = tangent_cone(&sq, &[0.5, 0.0]).unwrap();
    assert_eq!(t.lin_dim(), 2);
    assert!(t.contains(&[-5.0, 0.0]) && t.contains(&[3.0, 0.1]) && !t.contains(&[0.0, -0.1]));
    let n = normal_cone(&sq, &[0.5, 0.0]).unwrap();
    assert_eq!(n.lin_dim(), 1);
    assert!(n.contains(&[0.0, -2.0]) && !n.contains(&[0.1, -2.0]));
}

#[test]
fn ball_cones() {
    let b = Shape::ball(vec![0.0, 0.0], 1.0).unwrap();
    let t = tangent_cone(&b, &[1.0, 0.0]).unwrap();
    assert!(t.contains(&[-1.0, 5.0]) && t.contains(&[0.0, -1.0]) && !t.contains(&[0.01, 0.0]));
    assert_eq!(normal_cone(&b, &[1.0, 0.0]).unwrap().lin_dim(), 1);
    assert!(matches!(tangent_cone(&b, &[0.5, 0.0]), Err(Error::NotOnBoundary { .. })));
}

#[test]
fn cube_edge_normal_cone_is_a_quarter_plane() {
    let c = unit_cube(3);
    let n = normal_cone(&c, &[0.5, 0.0, 0.0]).unwrap();
    assert_eq!(n.lin_dim(), 2);
    assert!(n.contains(&[0.0, -1.0, -1.0]));
    assert!(!n.contains(&[0.0, 1.0, -1.0]));
    assert!(!n.contains(&[0.1, -1.0, -1.0]));
}

#[test]
fn reentrant_corner_has_no_convex_tangent_cone() {
    let l = l_shape();
    assert!(matches!(tangent_cone(&l, &[0.0, 0.0]), Err(Error::NotPositiveReach(_))));
    let pieces = tangent_cone_pieces(&l, &[0.0, 0.0]).unwrap();
    assert_eq!(pieces.len(), 2);
    // the union is the three-quarter plane
    let inside = |w: &[f64]| pieces.iter().any(|c| c.contains(w));
    assert!(inside(&[-1.0, 1.0]) && inside(&[1.0, -1.0]) && inside(&[-1.0, -1.0]));
    assert!(!inside(&[1.0, 1.0]));
    assert!(tangent_cone(&l, &[-1.0, 0.3]).is_ok());
}

#[test]
fn lattice_measures() {
    let per_dim = |s: &Shape, k: usize| -> f64 {
        strata(s).unwrap().iter().filter(|f| f.dim == k).map(|f| f.measure).sum()
    };
    let c = unit_cube(3);
    assert!(close(per_dim(&c, 2), 6.0, 1e-12));
    assert!(close(per_dim(&c, 1), 12.0, 1e-12));
    assert!(close(per_dim(&c, 0), 8.0, 1e-12));
    let s = unit_square();
    assert!(close(per_dim(&s, 1), 4.0, 1e-12));
    assert!(close(per_dim(&s, 0), 4.0, 1e-12));
    let t = regular_simplex();
    let facets: Vec<FaceStratum> = strata(&t).unwrap().into_iter().filter(|f| f.dim == 2).collect();
    assert_eq!(facets.len(), 4);
    for f in facets {
        assert!(close(f.measure, 3f64.sqrt() / 4.0, 1e-12));
    }
}

#[test]
fn cube_external_angles() {
    for f in strata(&unit_cube(3)).unwrap() {
        let want = [0.125, 0.25, 0.5][f.dim];
        assert!(close(external_angle(&f), want, 1e-12), "{} {}", f.dim, f.external_angle);
        assert!(close(f.external_angle, want, 1e-12));
        if f.dim == 1 {
            assert!(close(f.wedge_angle.unwrap(), PI / 2.0, 1e-12));
        }
    }
}

#[test]
fn curvature_measures_of_boxes() {
    let c = unit_cube(3);
    assert!(close(curvature_measure_polytope(&c, 0).unwrap(), 1.0, 1e-12));
    assert!(close(curvature_measure_polytope(&c, 1).unwrap(), 3.0, 1e-12));
    assert!(close(curvature_measure_polytope(&c, 2).unwrap(), 3.0, 1e-12));
    assert!(close(curvature_measure_polytope(&unit_square(), 1).unwrap(), 2.0, 1e-12));
    assert!(curvature_measure_polytope(&c, 3).is_err());
    assert!(curvature_measure_polytope(&l_shape(), 0).is_err());
    assert!(curvature_measure_polytope(&Shape::ball(vec![0.0, 0.0], 1.0).unwrap(), 0).is_err());
}

#[test]
fn regular_simplex_vertex_angles_sum_to_one() {
    let t = regular_simplex();
    let s: f64 = strata(&t).unwrap().iter().filter(|f| f.dim == 0).map(|f| f.external_angle).sum();
    assert!(close(s, 1.0, 1e-12));
    // dihedral angle of the regular tetrahedron
    let e = strata(&t).unwrap().into_iter().find(|f| f.dim == 1).unwrap();
    assert!(close(e.wedge_angle.unwrap(), (1.0f64 / 3.0).acos(), 1e-12));
    assert!(close(e.external_angle, (PI - (1.0f64 / 3.0).acos()) / (2.0 * PI), 1e-12));
}

#[test]
fn polygon_vertex_angles_sum_to_one() {
    let mut rng = stream(21, 0);
    for _ in 0..50 {
        let pts: Vec<Point> = (0..12).map(|_| vec![rng.random::<f64>(), rng.random::<f64>()]).collect();
        let Ok(p) = Shape::polytope_from_vertices(pts) else { continue };
        let s: f64 = strata(&p).unwrap().iter().filter(|f| f.dim == 0).map(|f| f.external_angle).sum();
        assert!(close(s, 1.0, 1e-10));
    }
    let s: f64 = strata(&staircase(12)).unwrap().iter().filter(|f| f.dim == 0).map(|f| f.external_angle).sum();
    assert!(close(s, 1.0, 1e-10));
}

#[test]
fn facet_angles_give_half_the_boundary_measure() {
    let t = regular_simplex();
    let c2 = curvature_measure_polytope(&t, 2).unwrap();
    assert!(close(c2, 3f64.sqrt() / 2.0, 1e-12));
}

#[test]
fn normal_cone_dimension_matches_stratum() {
    for s in [unit_cube(3), regular_simplex(), staircase(12), l_shape(), two_disks(1.0)] {
        let n = s.dim();
        for f in strata(&s).unwrap() {
            if f.reentrant {
                assert_eq!(f.normal_cone.lin_dim(), 0);
                continue;
            }
            assert_eq!(f.normal_cone.lin_dim() + f.dim, n);
            assert!(f.external_angle > 0.0 && f.external_angle <= 1.0);
        }
    }
}

#[test]
fn duality_round_trip() {
    let mut rng = stream(22, 0);
    for s in [unit_cube(3), regular_simplex(), staircase(12)] {
        let n = s.dim();
        for f in strata(&s).unwrap() {
            let tan = &f.tangent_cone;
            let back = tan.dual().dual();
            for _ in 0..1000 {
                let w = random_dir(&mut rng, n);
                assert_eq!(tan.contains(&w), back.contains(&w));
            }
            // a tangent direction pairs nonpositively with every normal
            for g in f.normal_cone.generators() {
                for h in tan.generators() {
                    assert!(dot(g, h) <= 1e-12);
                }
            }
        }
    }
}

#[test]
fn supporting_balls_miss_the_set() {
    for s in [unit_cube(3), regular_simplex(), unit_square(), Shape::ball(vec![0.0, 0.0], 1.0).unwrap()] {
        let pts = sample_uniform(&s, 20_000, 23, &Serial).unwrap();
        let big_r = (1.0f64).min(s.reach() / 2.0);
        for f in strata(&s).unwrap() {
            for v in f.normal_cone.generators() {
                let c = vector::axpy(&f.representative, big_r, v);
                assert!(pts.iter().all(|y| vector::dist(y, &c) >= big_r * (1.0 - 1e-12)));
            }
        }
    }
}

#[test]
fn cone_projection_matches_brute_force() {
    let c = PolyhedralCone::from_inequalities(3, &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.2], vec![-0.3, -0.3, 1.0]]);
    let mut rng = stream(24, 0);
    let inside: Vec<Point> = (0..200_000)
        .map(|_| {
            let r: f64 = 3.0 * rng.random::<f64>();
            vector::scale(&random_dir(&mut rng, 3), r)
        })
        .filter(|w| c.contains(w))
        .collect();
    for _ in 0..20 {
        let p = random_dir(&mut rng, 3);
        let d = c.distance(&p);
        let brute = inside.iter().map(|w| vector::dist(w, &p)).fold(f64::INFINITY, f64::min);
        assert!(d <= brute + 1e-12);
        assert!(brute - d < 0.05);
        assert!(c.contains(&c.project(&p)));
    }
}

#[test]
fn smooth_and_union_strata() {
    let b = Shape::ball(vec![0.0, 0.0, 0.0], 2.0).unwrap();
    let s = strata(&b).unwrap();
    assert_eq!(s.len(), 1);
    assert_eq!(s[0].dim, 2);
    assert!(close(s[0].measure, 16.0 * PI, 1e-12));
    let r = Shape::rounded(Polytope::cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 0.5).unwrap();
    let s = strata(&r).unwrap();
    assert_eq!(s.len(), 1);
    assert!(close(s[0].measure, 4.0 + PI, 1e-12));
    assert_eq!(strata(&two_disks(1.0)).unwrap().len(), 2);
}

#[test]
fn l_shape_strata_are_flagged() {
    let s = strata(&l_shape()).unwrap();
    assert_eq!(s.iter().filter(|f| f.dim == 1).count(), 6);
    let re: Vec<&FaceStratum> = s.iter().filter(|f| f.reentrant).collect();
    assert_eq!(re.len(), 1);
    assert_eq!(re[0].representative, vec![0.0, 0.0]);
    assert!(close(re[0].wedge_angle.unwrap(), 1.5 * PI, 1e-12));
    let convex: f64 = s.iter().filter(|f| f.dim == 0).map(|f| f.external_angle).sum();
    assert!(close(convex, 1.25, 1e-12));
}

#[test]
fn four_dimensional_angles_by_sampling() {
    let cfg = AngleMc { samples: 1 << 18, seed: 1 };
    let c = Polytope::cuboid(&[0.0; 4], &[1.0; 4]).unwrap();
    for f in face_lattice_with(&c, &cfg) {
        let want = 0.5f64.powi(4 - f.dim as i32);
        let tol = 4.0 * f.external_angle_stderr + 1e-12;
        assert!(close(f.external_angle, want, tol), "{} {}", f.dim, f.external_angle);
    }
    assert!(close(intrinsic_volume(&c, 2), 6.0, 1e-12));
    assert!(close(intrinsic_volume(&c, 0), 1.0, 0.0));
}
