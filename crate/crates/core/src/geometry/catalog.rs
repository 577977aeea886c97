//! Named shapes used by tests, examples, and the CLI.

use alloc::vec;
use alloc::vec::Vec;

use super::Shape;
use crate::real::Real;
use crate::vector::Point;

/// `[0,1]ⁿ`.
pub fn unit_cube(n: usize) -> Shape {
    Shape::cuboid(&vec![0.0; n], &vec![1.0; n]).expect("unit cube")
}

pub fn unit_square() -> Shape {
    unit_cube(2)
}

/// Heights of the staircase nodes: `u(1/2^k) = 3 Σ_{i≤k} 1/(i 2^{i+1})`.
pub fn staircase_heights(steps: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(steps);
    let mut acc = 0.0;
    for i in 1..=steps {
        acc += 3.0 / (i as f64 * (1u64 << (i + 1)) as f64);
        out.push(acc);
    }
    out
}

/// Convex region under the piecewise-linear staircase graph through
/// `(1, 0)` and `(1/2^k, u_k)`, truncated after `steps` nodes.
pub fn staircase_vertices(steps: usize) -> Vec<Point> {
    let u = staircase_heights(steps);
    let mut v = vec![vec![0.0, 0.0], vec![1.0, 0.0]];
    for (k, h) in u.iter().enumerate() {
        v.push(vec![0.5f64.powi(k as i32 + 1), *h]);
    }
    v.push(vec![0.0, u[steps - 1]]);
    v
}

pub fn staircase(steps: usize) -> Shape {
    Shape::polygon(staircase_vertices(steps)).expect("staircase polygon")
}

/// The L-shaped hexagon `[-1,1]² ∖ (0,1]²`, reentrant at the origin.
pub fn l_shape() -> Shape {
    Shape::polygon(vec![
        vec![-1.0, -1.0],
        vec![1.0, -1.0],
        vec![1.0, 0.0],
        vec![0.0, 0.0],
        vec![0.0, 1.0],
        vec![-1.0, 1.0],
    ])
    .expect("L-shape")
}

/// Two unit balls in the plane with centers `gap + 2` apart.
pub fn two_disks(gap: f64) -> Shape {
    Shape::union(vec![
        Shape::ball(vec![0.0, 0.0], 1.0).expect("disk"),
        Shape::ball(vec![2.0 + gap, 0.0], 1.0).expect("disk"),
    ])
    .expect("separated disks")
}
