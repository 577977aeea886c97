use super::*;
use crate::geometry::catalog::*;
use crate::mc::Serial;
use crate::real::PI;
use alloc::vec::Vec;

/// Runs chunks back to front, standing in for an out-of-order pool.
struct Reversed;

impl Executor for Reversed {
    fn map_chunks<T: Send, F: Fn(u64) -> T + Sync + Send>(&self, chunks: u64, job: F) -> Vec<T> {
        let mut out: Vec<(u64, T)> = (0..chunks).rev().map(|i| (i, job(i))).collect();
        out.sort_by_key(|x| x.0);
        out.into_iter().map(|x| x.1).collect()
    }
}

fn rotated_square(angle: f64) -> Shape {
    let (s, c) = (angle.sin(), angle.cos());
    let pts = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]
        .iter()
        .map(|p| vec![c * p[0] - s * p[1], s * p[0] + c * p[1]])
        .collect();
    Shape::polytope_from_vertices(pts).unwrap()
}

#[test]
fn box_oracle_examples() {
    let sq = unit_square();
    let one = TestFunction::one();
    let t = 0.05;
    let f = heat_content_box_exact(&sq, &one, t).unwrap().estimate;
    assert!((f - 0.109655).abs() < 1e-5);
    // exact for a ≫ t: two factors of 1 − 2t/√π... collapse to this
    assert!((f - (4.0 * t / SQRT_PI - 4.0 * t * t / PI)).abs() < 1e-12);
    let tiny = heat_content_box_exact(&sq, &one, 1e-6).unwrap().estimate;
    assert!((tiny / 1e-6 - 4.0 / SQRT_PI).abs() < 1e-5);
    let big = heat_content_box_exact(&sq, &one, 10.0).unwrap().estimate;
    assert!((big - 0.9992).abs() < 1e-4, "{big}");
    assert!(heat_content_box_exact(&sq, &one, 0.0).is_err());
    assert!(heat_content_box_exact(&Shape::ball(vec![0.0, 0.0], 1.0).unwrap(), &one, 0.1).is_err());
}

#[test]
fn mc_matches_box_oracle() {
    let sq = unit_square();
    let one = TestFunction::one();
    let s = heat_content_mc(&sq, &one, 0.05, 10_000_000, 1, &Serial).unwrap();
    let exact = heat_content_box_exact(&sq, &one, 0.05).unwrap().estimate;
    assert!((s.estimate - exact).abs() < 3.0 * s.stderr, "{} ± {}", s.estimate, s.stderr);
    let s = heat_content_mc(&sq, &one, 10.0, 10_000_000, 2, &Serial).unwrap();
    let exact = heat_content_box_exact(&sq, &one, 10.0).unwrap().estimate;
    assert!((s.estimate - exact).abs() < 3.0 * s.stderr);
    assert!(heat_content_mc(&sq, &one, 0.05, 0, 1, &Serial).is_err());
    assert!(heat_content_mc(&sq, &one, -1.0, 10, 1, &Serial).is_err());
}

#[test]
fn mc_vanishes_as_t_shrinks() {
    let sq = unit_square();
    let one = TestFunction::one();
    let mut last = f64::INFINITY;
    for t in [0.1, 0.01, 0.001, 1e-5, 1e-9] {
        let s = heat_content_mc(&sq, &one, t, 200_000, 3, &Serial).unwrap();
        assert!(s.estimate <= last);
        last = s.estimate;
    }
    assert!(last < 1e-6);
}

#[test]
fn mc_oracle_agreement_on_a_grid() {
    let sq = Shape::cuboid(&[0.0, 0.0], &[1.0, 2.0]).unwrap();
    let phi = TestFunction::linear(vec![1.0, 0.5], 0.2);
    for j in 0..10 {
        let t = 0.2 * 0.7f64.powi(j);
        let s = heat_content_mc(&sq, &phi, t, 1_000_000, 100 + j as u64, &Serial).unwrap();
        let e = heat_content_box_exact(&sq, &phi, t).unwrap().estimate;
        assert!((s.estimate - e).abs() <= 4.0 * s.stderr, "t={t}: {} ± {} vs {e}", s.estimate, s.stderr);
    }
}

#[test]
fn box_oracle_for_each_test_function_family() {
    let b = Shape::cuboid(&[-0.5, 0.0], &[1.0, 1.0]).unwrap();
    let t = 0.08;
    for phi in [
        TestFunction::constant(0.7),
        TestFunction::linear(vec![1.0, -1.0], 2.0),
        TestFunction::quadratic(vec![1.0, 0.5, 0.5, 2.0], vec![0.3, 0.0], 1.0).unwrap(),
        TestFunction::gaussian_bump(vec![0.2, 0.9], 0.3, 1.0).unwrap(),
    ] {
        let e = heat_content_box_exact(&b, &phi, t).unwrap().estimate;
        let s = heat_content_mc(&b, &phi, t, 4_000_000, 7, &Serial).unwrap();
        assert!((s.estimate - e).abs() <= 4.0 * s.stderr, "{phi}: {} ± {} vs {e}", s.estimate, s.stderr);
    }
}

#[test]
fn box_union_cross_terms() {
    // at a gap comparable to t the parts exchange heat
    let u = Shape::union(vec![
        Shape::cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap(),
        Shape::cuboid(&[1.1, 0.0], &[2.1, 0.5]).unwrap(),
    ])
    .unwrap();
    let phi = TestFunction::linear(vec![0.5, 1.0], 1.0);
    let t = 0.1;
    let e = heat_content_box_exact(&u, &phi, t).unwrap().estimate;
    let s = heat_content_mc(&u, &phi, t, 4_000_000, 8, &Serial).unwrap();
    assert!((s.estimate - e).abs() <= 4.0 * s.stderr, "{} ± {} vs {e}", s.estimate, s.stderr);
    let apart: f64 = match &u {
        Shape::Union(d) => d.parts().iter().map(|p| heat_content_box_exact(p, &phi, t).unwrap().estimate).sum(),
        _ => unreachable!(),
    };
    assert!(apart - e > 10.0 * s.stderr);
}

#[test]
fn ball_oracle_first_order() {
    let disk = Shape::ball(vec![0.0, 0.0], 1.0).unwrap();
    let one = TestFunction::one();
    let t = 0.02;
    let f = heat_content_ball_quad(&disk, &one, t, 1e-10).unwrap().estimate;
    assert!(((f / t) / (2.0 * SQRT_PI) - 1.0).abs() < 1e-3);
    assert!(heat_content_ball_quad(&disk, &one, 0.0, 1e-10).is_err());
    assert!(heat_content_ball_quad(&disk, &TestFunction::linear(vec![1.0, 0.0], 0.0), t, 1e-10).is_err());
}

#[test]
fn ball_oracle_matches_mc() {
    for (shape, t) in [
        (Shape::ball(vec![0.0, 0.0], 1.0).unwrap(), 0.1),
        (Shape::ball(vec![0.0, 0.0], 1.0).unwrap(), 0.4),
        (Shape::ball(vec![1.0, 0.0, 0.0], 0.5).unwrap(), 0.05),
    ] {
        let q = heat_content_ball_quad(&shape, &TestFunction::one(), t, 1e-10).unwrap().estimate;
        let s = heat_content_mc(&shape, &TestFunction::one(), t, 4_000_000, 9, &Serial).unwrap();
        assert!((s.estimate - q).abs() <= 4.0 * s.stderr, "{} ± {} vs {q}", s.estimate, s.stderr);
    }
}

#[test]
fn ball_oracle_second_order_is_flat() {
    // f(t) = 2√π t + a₂t² + O(t³) on the unit disk; the quadrature puts a₂
    // near 0 rather than −π (see the decisions ledger)
    let disk = Shape::ball(vec![0.0, 0.0], 1.0).unwrap();
    let one = TestFunction::one();
    let f = |t: f64| heat_content_ball_quad(&disk, &one, t, 1e-12).unwrap().estimate;
    let (t1, t2) = (0.01, 0.005);
    let g1 = f(t1) / t1 - 2.0 * SQRT_PI;
    let g2 = f(t2) / t2 - 2.0 * SQRT_PI;
    // Richardson: g(t) ≈ a₂t + a₃t²
    let a2 = (4.0 * g2 / t2 - g1 / t1) / 3.0;
    assert!(a2.abs() < 0.05, "{a2}");
}

#[test]
fn tube_matches_box_oracle() {
    let sq = unit_square();
    let one = TestFunction::one();
    let tube = heat_content_tube(&sq, &one, 0.05, 0.4, 1e-9).unwrap().estimate;
    let exact = heat_content_box_exact(&sq, &one, 0.05).unwrap().estimate;
    assert!((tube - exact).abs() < 1e-4);
    assert!((tube - exact).abs() <= tail_bound(&sq, &one, 0.05, 0.4).unwrap() + 1e-9);
    let phi = TestFunction::linear(vec![1.0, 0.0], 0.0);
    let tube = heat_content_tube(&sq, &phi, 0.05, 0.4, 1e-9).unwrap().estimate;
    let exact = heat_content_box_exact(&sq, &phi, 0.05).unwrap().estimate;
    assert!((tube - exact).abs() < 1e-4);
    let s = heat_content_mc(&sq, &phi, 0.05, 10_000_000, 10, &Serial).unwrap();
    assert!((tube - s.estimate).abs() < 4.0 * s.stderr);
}

#[test]
fn tube_on_the_cube_matches_mc() {
    let c = unit_cube(3);
    let one = TestFunction::one();
    let tube = heat_content_tube(&c, &one, 0.05, 0.4, 1e-8).unwrap().estimate;
    let exact = heat_content_box_exact(&c, &one, 0.05).unwrap().estimate;
    assert!((tube - exact).abs() < 1e-6 * exact, "{tube} {exact}");
    let s = heat_content_mc(&c, &one, 0.05, 10_000_000, 11, &Serial).unwrap();
    assert!((tube - s.estimate).abs() < 3.0 * s.stderr);
}

#[test]
fn tube_is_rotation_invariant() {
    let r = rotated_square(0.4);
    let t = 0.05;
    let one = TestFunction::one();
    let tube = heat_content_tube(&r, &one, t, 0.4, 1e-8).unwrap().estimate;
    let exact = heat_content_box_exact(&unit_square(), &one, t).unwrap().estimate;
    assert!((tube - exact).abs() < 1e-6, "{tube} {exact}");
}

#[test]
fn tube_on_a_triangle_matches_mc() {
    let tri = Shape::polytope_from_vertices(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.2, 0.8]]).unwrap();
    let phi = TestFunction::gaussian_bump(vec![0.3, 0.3], 0.5, 1.0).unwrap();
    let t = 0.04;
    let tube = heat_content_tube(&tri, &phi, t, default_truncation(&tri, &phi, t), 1e-8).unwrap().estimate;
    let s = heat_content_mc(&tri, &phi, t, 4_000_000, 12, &Serial).unwrap();
    assert!((tube - s.estimate).abs() < 4.0 * s.stderr, "{tube} vs {} ± {}", s.estimate, s.stderr);
}

#[test]
fn tube_rejects_unsupported_inputs() {
    let one = TestFunction::one();
    assert!(matches!(heat_content_tube(&l_shape(), &one, 0.05, 0.1, 1e-8), Err(Error::BeyondReach { .. })));
    let disk = Shape::ball(vec![0.0, 0.0], 1.0).unwrap();
    assert!(matches!(heat_content_tube(&disk, &one, 0.05, 0.1, 1e-8), Err(Error::Unsupported(_))));
    assert!(heat_content_tube(&unit_square(), &one, 0.05, 0.0, 1e-8).is_err());
}

#[test]
fn tail_bound_examples() {
    let sq = unit_square();
    let one = TestFunction::one();
    let b = tail_bound(&sq, &one, 0.05, 0.5).unwrap();
    assert!((b - 2.0 * (-12.5f64).exp()).abs() < 1e-18);
    assert!((b - 7.46e-6).abs() < 1e-8);
    assert_eq!(tail_bound(&sq, &one, 0.05, 1e3).unwrap(), 0.0);
    let t = 0.03;
    let r = default_truncation(&sq, &one, t);
    let first = t * 4.0 / SQRT_PI;
    assert!(tail_bound(&sq, &one, t, r).unwrap() <= 1e-3 * first * (1.0 + 1e-12));
}

#[test]
fn restricted_mc_respects_the_tail_bound() {
    let sq = unit_square();
    let one = TestFunction::one();
    for (t, r) in [(0.05, 0.1), (0.1, 0.2), (0.2, 0.3)] {
        let full = heat_content_mc(&sq, &one, t, 1_000_000, 13, &Serial).unwrap();
        let within = heat_content_mc_region(&sq, &one, t, 1_000_000, 13, Region::Within(r), &Serial).unwrap();
        let beyond = heat_content_mc_region(&sq, &one, t, 1_000_000, 13, Region::Beyond(r), &Serial).unwrap();
        // same seed: the split is exact draw by draw
        assert!((within.estimate + beyond.estimate - full.estimate).abs() < 1e-12);
        let bound = tail_bound(&sq, &one, t, r).unwrap();
        assert!(beyond.estimate <= bound + 4.0 * beyond.stderr);
        assert!((full.estimate - within.estimate).abs() <= bound + 4.0 * (full.stderr.powi(2) + within.stderr.powi(2)).sqrt());
    }
}

#[test]
fn norms_on_the_square() {
    let sq = unit_square();
    let n = heat_norms(&sq, 0.0025, 0, 0, &Serial).unwrap();
    assert!((n.l1 - 0.21931).abs() < 1e-5, "{}", n.l1);
    let k2 = heat_content_box_exact(&sq, &TestFunction::one(), (0.005f64).sqrt()).unwrap().estimate;
    assert!((n.l2_sq + k2 - 1.0).abs() < 1e-12);
    let s = 1e-6;
    let n = heat_norms(&sq, s, 0, 0, &Serial).unwrap();
    assert!((n.l1 / (8.0 * (s / PI).sqrt()) - 1.0).abs() < 1e-2);
}

#[test]
fn norms_by_mc_for_other_shapes() {
    let disk = Shape::ball(vec![0.0, 0.0], 1.0).unwrap();
    let n = heat_norms(&disk, 0.01, 1_000_000, 14, &Serial).unwrap();
    assert_eq!(n.method, Method::Mc);
    let q = heat_content_ball_quad(&disk, &TestFunction::one(), 0.1, 1e-10).unwrap().estimate;
    assert!((n.l1 - 2.0 * q).abs() < 4.0 * n.l1_stderr);
}

#[test]
fn mc_is_independent_of_chunk_order() {
    let s = l_shape();
    let phi = TestFunction::linear(vec![1.0, 2.0], 3.0);
    let a = heat_content_mc(&s, &phi, 0.1, 300_000, 15, &Serial).unwrap();
    let b = heat_content_mc(&s, &phi, 0.1, 300_000, 15, &Reversed).unwrap();
    assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
    assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
}

#[test]
fn mc_is_invariant_under_rigid_motions() {
    let t = 0.07;
    let one = TestFunction::one();
    let exact = heat_content_box_exact(&unit_square(), &one, t).unwrap().estimate;
    let s = heat_content_mc(&rotated_square(1.1), &one, t, 2_000_000, 16, &Serial).unwrap();
    assert!((s.estimate - exact).abs() < 4.0 * s.stderr);
    let moved = unit_square().rescale(&[3.0, -2.0], 1.0).unwrap();
    let s = heat_content_mc(&moved, &one, t, 2_000_000, 17, &Serial).unwrap();
    assert!((s.estimate - exact).abs() < 4.0 * s.stderr);
}

#[test]
fn estimates_stay_in_bounds() {
    for s in [unit_square(), l_shape(), staircase(12), two_disks(0.5)] {
        for t in [0.01, 0.3, 3.0] {
            let h = heat_content_mc(&s, &TestFunction::one(), t, 100_000, 18, &Serial).unwrap();
            assert!(h.estimate >= 0.0 && h.estimate <= s.volume());
        }
    }
}
