//! Integration over the reduced boundary `𝓕E` against `H^{n−1}`.
//!
//! The integrand receives the point, the outer unit normal, and the mean
//! curvature `H = (1/(n−1)) Σ κ_j` with curvatures counted positive on
//! convex pieces.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{Polytope, Shape, SimplePolygon};
use crate::heat::tube::{cone_cells, face_cells, face_normals};
use crate::quad::{self, Tolerance};
use crate::real::Real;
use crate::vector::{self, Point};

/// `∫_{𝓕E} f(x, ν(x), H(x)) dH^{n−1}(x)`.
pub fn boundary_integral<F>(shape: &Shape, f: &F, tol: Tolerance) -> Result<f64>
where
    F: Fn(&[f64], &[f64], f64) -> f64,
{
    match shape {
        Shape::Polytope(p) => facets(p, f, tol),
        Shape::Polygon(p) => match p.to_polytope() {
            Some(poly) => facets(&poly, f, tol),
            None => polygon_edges(p, f, tol),
        },
        Shape::Ball(b) => {
            let n = b.center.len();
            if n == 1 {
                let (c, r) = (b.center[0], b.radius);
                return Ok(f(&[c + r], &[1.0], 0.0) + f(&[c - r], &[-1.0], 0.0));
            }
            let h = 1.0 / b.radius;
            let area = b.radius.powi(n as i32 - 1);
            let mut total = 0.0;
            for orthant in 0..(1usize << n) {
                let gens: Vec<Point> = (0..n)
                    .map(|i| {
                        let mut e = vector::unit(n, i);
                        if orthant >> i & 1 == 1 {
                            e[i] = -1.0;
                        }
                        e
                    })
                    .collect();
                for cell in cone_cells(&gens, n)? {
                    let e = quad::integrate_simplex(
                        n - 1,
                        |u| {
                            let (nu, dens) = cell.direction(u);
                            let x = vector::axpy(&b.center, b.radius, &nu);
                            Ok(dens * f(&x, &nu, h))
                        },
                        tol,
                    )?;
                    total += area * e.value;
                }
            }
            Ok(total)
        }
        Shape::Rounded(rp) => {
            let p = &rp.core;
            let n = p.dim();
            let r = rp.radius;
            let mut total = 0.0;
            for (fi, face) in p.faces().iter().enumerate() {
                if face.dim >= n {
                    continue;
                }
                let m = n - face.dim;
                let h = if n > 1 { (m - 1) as f64 / ((n - 1) as f64 * r) } else { 0.0 };
                let cones = cone_cells(&face_normals(p, face), n)?;
                let area = r.powi(m as i32 - 1);
                for cell in face_cells(p, fi) {
                    for cone in &cones {
                        let inner = tol.inner();
                        let e = quad::integrate_simplex(
                            face.dim,
                            |u| {
                                let y = cell.point(u);
                                let e = quad::integrate_simplex(
                                    m - 1,
                                    |w| {
                                        let (nu, dens) = cone.direction(w);
                                        let x = vector::axpy(&y, r, &nu);
                                        Ok(dens * f(&x, &nu, h))
                                    },
                                    inner,
                                )?;
                                Ok(e.value)
                            },
                            tol,
                        )?;
                        total += area * cell.jac * e.value;
                    }
                }
            }
            Ok(total)
        }
        Shape::Union(u) => {
            let mut total = 0.0;
            for part in u.parts() {
                total += boundary_integral(part, f, tol)?;
            }
            Ok(total)
        }
    }
}

fn facets<F>(p: &Polytope, f: &F, tol: Tolerance) -> Result<f64>
where
    F: Fn(&[f64], &[f64], f64) -> f64,
{
    let n = p.dim();
    let mut total = 0.0;
    for (fi, face) in p.faces().iter().enumerate() {
        if face.dim + 1 != n {
            continue;
        }
        let normal = &p.facets()[face.facets[0]].normal;
        for cell in face_cells(p, fi) {
            let e = quad::integrate_simplex(n - 1, |u| Ok(f(&cell.point(u), normal, 0.0)), tol)?;
            total += cell.jac * e.value;
        }
    }
    Ok(total)
}

fn polygon_edges<F>(p: &SimplePolygon, f: &F, tol: Tolerance) -> Result<f64>
where
    F: Fn(&[f64], &[f64], f64) -> f64,
{
    let mut total = 0.0;
    for (a, b) in p.edges() {
        let d = vector::sub(b, a);
        let len = vector::norm(&d);
        if len == 0.0 {
            return Err(Error::InvalidShape("zero-length polygon edge".into()));
        }
        // vertices run counter-clockwise, so the outside is on the right
        let normal = vec![d[1] / len, -d[0] / len];
        let e = quad::integrate(|s| Ok(f(&vector::axpy(a, s, &d), &normal, 0.0)), 0.0, 1.0, tol)?;
        total += len * e.value;
    }
    Ok(total)
}

/// `∫_{Σ_{n−2}} g(x, θ(x)) dH^{n−2}(x)` over the codimension-two faces of
/// polytopes (and convex parts of unions), where `θ` is the interior
/// dihedral angle. Reentrant polygon vertices have a trivial normal cone
/// and are skipped; smooth shapes contribute nothing.
pub fn ridge_integral<F>(shape: &Shape, g: &F, tol: Tolerance) -> Result<f64>
where
    F: Fn(&[f64], f64) -> Result<f64>,
{
    match shape {
        Shape::Ball(_) | Shape::Rounded(_) => Ok(0.0),
        Shape::Union(u) => {
            let mut total = 0.0;
            for part in u.parts() {
                total += ridge_integral(part, g, tol)?;
            }
            Ok(total)
        }
        Shape::Polygon(p) if !p.is_convex() => {
            let mut total = 0.0;
            for (i, v) in p.vertices().iter().enumerate() {
                if !p.is_reentrant(i) {
                    total += g(v, p.interior_angle(i))?;
                }
            }
            Ok(total)
        }
        _ => {
            let p = shape.as_polytope().ok_or_else(|| Error::Unsupported("ridge integral".into()))?;
            let n = p.dim();
            if n < 2 {
                return Ok(0.0);
            }
            let mut total = 0.0;
            for (fi, face) in p.faces().iter().enumerate() {
                if face.dim + 2 != n {
                    continue;
                }
                let normals = face_normals(&p, face);
                if normals.len() != 2 {
                    return Err(Error::InvalidShape("ridge not bounded by two facets".into()));
                }
                let c = vector::dot(&normals[0], &normals[1]).clamp(-1.0, 1.0);
                let theta = core::f64::consts::PI - c.acos();
                for cell in face_cells(&p, fi) {
                    let e = quad::integrate_simplex(n - 2, |u| g(&cell.point(u), theta), tol)?;
                    total += cell.jac * e.value;
                }
            }
            Ok(total)
        }
    }
}
