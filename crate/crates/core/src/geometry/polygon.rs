//! Simple (possibly nonconvex) polygons in the plane.

use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::real::{Real, PI};
use crate::vector::{self, Point};

use super::polytope::Polytope;

/// A simple polygon with counter-clockwise vertex order.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplePolygon {
    vertices: Vec<Point>,
    convex: bool,
    scale: f64,
}

fn cross(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn segments_intersect(p1: &[f64], p2: &[f64], q1: &[f64], q2: &[f64]) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |a: &[f64], b: &[f64], p: &[f64], d: f64| {
        d == 0.0
            && p[0] >= a[0].min(b[0])
            && p[0] <= a[0].max(b[0])
            && p[1] >= a[1].min(b[1])
            && p[1] <= a[1].max(b[1])
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

/// Closest point to `x` on the segment `[a, b]`.
pub(crate) fn segment_foot(x: &[f64], a: &[f64], b: &[f64]) -> Point {
    let ab = vector::sub(b, a);
    let l2 = vector::dot(&ab, &ab);
    let s = if l2 > 0.0 {
        (vector::dot(&vector::sub(x, a), &ab) / l2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    vector::axpy(a, s, &ab)
}

impl SimplePolygon {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidShape("polygon needs at least 3 vertices".into()));
        }
        for v in &vertices {
            check_dim(2, v.len())?;
            if !vector::all_finite(v) {
                return Err(Error::InvalidShape("non-finite polygon vertex".into()));
            }
        }
        let m = vertices.len();
        for i in 0..m {
            if vector::dist(&vertices[i], &vertices[(i + 1) % m]) == 0.0 {
                return Err(Error::InvalidShape("repeated polygon vertex".into()));
            }
        }
        for i in 0..m {
            for j in i + 1..m {
                let adjacent = j == i + 1 || (i == 0 && j == m - 1);
                if adjacent {
                    continue;
                }
                if segments_intersect(&vertices[i], &vertices[(i + 1) % m], &vertices[j], &vertices[(j + 1) % m]) {
                    return Err(Error::InvalidShape("polygon boundary self-intersects".into()));
                }
            }
        }
        let mut vertices = vertices;
        let area2: f64 = (0..m)
            .map(|i| {
                let (a, b) = (&vertices[i], &vertices[(i + 1) % m]);
                a[0] * b[1] - a[1] * b[0]
            })
            .sum();
        if area2.abs() == 0.0 {
            return Err(Error::InvalidShape("polygon has zero area".into()));
        }
        if area2 < 0.0 {
            vertices.reverse();
        }
        // drop collinear vertices so every vertex is a genuine corner
        let mut cleaned: Vec<Point> = Vec::new();
        for i in 0..m {
            let prev = &vertices[(i + m - 1) % m];
            let next = &vertices[(i + 1) % m];
            let c = cross(prev, &vertices[i], next);
            let scale = vector::dist(prev, &vertices[i]) * vector::dist(&vertices[i], next);
            if c.abs() > 1e-14 * scale {
                cleaned.push(vertices[i].clone());
            }
        }
        let vertices = cleaned;
        let m = vertices.len();
        let convex = (0..m).all(|i| cross(&vertices[(i + m - 1) % m], &vertices[i], &vertices[(i + 1) % m]) > 0.0);
        let scale = vertices
            .iter()
            .flat_map(|p| p.iter())
            .fold(1.0f64, |s, x| s.max(x.abs()));
        Ok(SimplePolygon {
            vertices,
            convex,
            scale,
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    pub fn edges(&self) -> impl Iterator<Item = (&Point, &Point)> {
        let m = self.vertices.len();
        (0..m).map(move |i| (&self.vertices[i], &self.vertices[(i + 1) % m]))
    }

    /// Interior angle at vertex `i`, in `(0, 2π)`.
    pub fn interior_angle(&self, i: usize) -> f64 {
        let m = self.vertices.len();
        let prev = &self.vertices[(i + m - 1) % m];
        let v = &self.vertices[i];
        let next = &self.vertices[(i + 1) % m];
        let a = vector::sub(prev, v);
        let b = vector::sub(next, v);
        let ang = b[1].atan2(b[0]) - a[1].atan2(a[0]);
        // counter-clockwise order: interior lies on the left of next - v
        let mut interior = -ang;
        while interior <= 0.0 {
            interior += 2.0 * PI;
        }
        while interior >= 2.0 * PI {
            interior -= 2.0 * PI;
        }
        interior
    }

    pub fn is_reentrant(&self, i: usize) -> bool {
        self.interior_angle(i) > PI
    }

    pub fn area(&self) -> f64 {
        0.5 * self
            .edges()
            .map(|(a, b)| a[0] * b[1] - a[1] * b[0])
            .sum::<f64>()
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| vector::dist(a, b)).sum()
    }

    fn boundary_foot(&self, x: &[f64]) -> (f64, Point) {
        let mut best = (f64::INFINITY, x.to_vec());
        for (a, b) in self.edges() {
            let p = segment_foot(x, a, b);
            let d = vector::dist(x, &p);
            if d < best.0 {
                best = (d, p);
            }
        }
        best
    }

    pub fn boundary_distance(&self, x: &[f64]) -> f64 {
        self.boundary_foot(x).0
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        if self.boundary_distance(x) <= 1e-12 * self.scale {
            return true;
        }
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a[1] > x[1]) != (b[1] > x[1]) {
                let xi = a[0] + (x[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                if x[0] < xi {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn distance(&self, x: &[f64]) -> f64 {
        if self.contains(x) {
            0.0
        } else {
            self.boundary_distance(x)
        }
    }

    pub fn project(&self, x: &[f64]) -> Result<Point> {
        if self.contains(x) {
            return Ok(x.to_vec());
        }
        let (d, p) = self.boundary_foot(x);
        let sep_tol = 1e-8 * self.diameter();
        for (a, b) in self.edges() {
            let q = segment_foot(x, a, b);
            let dq = vector::dist(x, &q);
            if (dq - d).abs() <= 1e-12 * self.scale {
                let sep = vector::dist(&p, &q);
                if sep > sep_tol {
                    return Err(Error::AmbiguousProjection { separation: sep });
                }
            }
        }
        Ok(p)
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = self.vertices[0].clone();
        let mut hi = self.vertices[0].clone();
        for v in &self.vertices {
            for i in 0..2 {
                lo[i] = lo[i].min(v[i]);
                hi[i] = hi[i].max(v[i]);
            }
        }
        (lo, hi)
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for a in &self.vertices {
            for b in &self.vertices {
                d = d.max(vector::dist(a, b));
            }
        }
        d
    }

    pub fn rescaled(&self, x0: &[f64], rho: f64) -> SimplePolygon {
        let vertices: Vec<Point> = self
            .vertices
            .iter()
            .map(|v| v.iter().zip(x0).map(|(a, b)| (a - b) / rho).collect())
            .collect();
        let scale = vertices
            .iter()
            .flat_map(|p: &Point| p.iter())
            .fold(1.0f64, |s, x| s.max(x.abs()));
        SimplePolygon {
            vertices,
            convex: self.convex,
            scale,
        }
    }

    /// The same set as a convex polytope, when convex.
    pub fn to_polytope(&self) -> Option<Polytope> {
        if self.convex {
            Polytope::from_vertices(self.vertices.clone()).ok()
        } else {
            None
        }
    }

    /// Index of the vertex at `x`, if any.
    pub fn vertex_at(&self, x: &[f64], tol: f64) -> Option<usize> {
        self.vertices.iter().position(|v| vector::dist(v, x) <= tol)
    }
}
