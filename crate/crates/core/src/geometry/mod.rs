//! The closed-world family of compact shapes: membership, distance,
//! projection, reach, volume, sampling and rescaling.

pub mod catalog;
mod polygon;
mod polytope;

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

pub use polygon::SimplePolygon;
pub use polytope::{Face, Halfspace, Polytope};

use crate::error::{check_dim, Error, Result};
use crate::mc::{self, Executor};
use crate::real::{unit_ball_volume, Real};
use crate::vector::{self, Point};

/// Closed Euclidean ball.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if center.len() < 2 {
            return Err(Error::InvalidShape("ambient dimension must be at least 2".into()));
        }
        if !(radius > 0.0) || !radius.is_finite() || !vector::all_finite(&center) {
            return Err(Error::InvalidShape("ball needs a finite center and radius > 0".into()));
        }
        Ok(Ball { center, radius })
    }

    fn outward_normal(&self, x: &[f64]) -> Option<Point> {
        vector::normalize(&vector::sub(x, &self.center))
    }
}

/// Minkowski sum of a convex polytope and a closed ball.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundedPolytope {
    pub core: Polytope,
    pub radius: f64,
}

impl RoundedPolytope {
    pub fn new(core: Polytope, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidShape("rounding radius must be > 0".into()));
        }
        Ok(RoundedPolytope { core, radius })
    }

    pub fn volume(&self) -> f64 {
        rounded_volume(&self.core, self.radius)
    }
}

/// Volume of `P ⊕ B_ρ` from the intrinsic volumes of `P`.
pub fn rounded_volume(core: &Polytope, rho: f64) -> f64 {
    let n = core.dim();
    let mut v = core.volume();
    for k in 0..n {
        v += unit_ball_volume(n - k) * rho.powi((n - k) as i32) * crate::strata::intrinsic_volume(core, k);
    }
    v
}

/// Finite union of convex shapes at positive mutual distance.
#[derive(Debug, Clone, PartialEq)]
pub struct DisjointUnion {
    parts: Vec<Shape>,
    separation: f64,
}

impl DisjointUnion {
    pub fn new(parts: Vec<Shape>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidShape("union needs at least one part".into()));
        }
        let n = parts[0].dim();
        let mut flat = Vec::new();
        for p in parts {
            check_dim(n, p.dim())?;
            match p {
                Shape::Union(u) => flat.extend(u.parts),
                Shape::Polygon(ref poly) if !poly.is_convex() => {
                    return Err(Error::InvalidShape("union parts must be convex".into()))
                }
                other => flat.push(other),
            }
        }
        let mut separation = f64::INFINITY;
        for i in 0..flat.len() {
            for j in i + 1..flat.len() {
                let d = convex_distance(&flat[i], &flat[j]);
                if !(d > 1e-12) {
                    return Err(Error::InvalidShape(alloc::format!(
                        "union parts {i} and {j} are not at positive distance ({d:e})"
                    )));
                }
                separation = separation.min(d);
            }
        }
        Ok(DisjointUnion {
            parts: flat,
            separation,
        })
    }

    pub fn parts(&self) -> &[Shape] {
        &self.parts
    }

    /// Smallest distance between two parts (`+∞` for a single part).
    pub fn separation(&self) -> f64 {
        self.separation
    }
}

/// A compact set with nonempty interior from the supported family.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Ball(Ball),
    Polytope(Polytope),
    Rounded(RoundedPolytope),
    Union(DisjointUnion),
    Polygon(SimplePolygon),
}

/// Nearest-point machinery for a convex part: a core set plus an inflation
/// radius (`0` for polytopes, the radius for balls and rounded bodies).
enum Convex<'a> {
    Point(&'a [f64]),
    Polytope(&'a Polytope),
}

impl Convex<'_> {
    fn project(&self, x: &[f64]) -> Point {
        match self {
            Convex::Point(c) => c.to_vec(),
            Convex::Polytope(p) => p.project(x),
        }
    }
}

fn convex_parts(s: &Shape) -> Option<(Convex<'_>, f64)> {
    match s {
        Shape::Ball(b) => Some((Convex::Point(&b.center), b.radius)),
        Shape::Polytope(p) => Some((Convex::Polytope(p), 0.0)),
        Shape::Rounded(r) => Some((Convex::Polytope(&r.core), r.radius)),
        _ => None,
    }
}

/// Set distance between two convex shapes.
fn convex_distance(a: &Shape, b: &Shape) -> f64 {
    let a_poly;
    let b_poly;
    let (ca, ra) = match a {
        Shape::Polygon(p) => {
            a_poly = Shape::Polytope(p.to_polytope().expect("convex polygon"));
            convex_parts(&a_poly).expect("polytope")
        }
        _ => convex_parts(a).expect("convex part"),
    };
    let (cb, rb) = match b {
        Shape::Polygon(p) => {
            b_poly = Shape::Polytope(p.to_polytope().expect("convex polygon"));
            convex_parts(&b_poly).expect("polytope")
        }
        _ => convex_parts(b).expect("convex part"),
    };
    let core = match (&ca, &cb) {
        (Convex::Point(x), Convex::Point(y)) => vector::dist(x, y),
        (Convex::Point(x), other) | (other, Convex::Point(x)) => vector::dist(x, &other.project(x)),
        (Convex::Polytope(p), Convex::Polytope(q)) => polytope_distance(p, q),
    };
    core - ra - rb
}

/// Distance between two convex polytopes by alternating projections,
/// started from the closest vertex pair.
fn polytope_distance(p: &Polytope, q: &Polytope) -> f64 {
    let mut best = (f64::INFINITY, 0, 0);
    for (i, a) in p.vertices().iter().enumerate() {
        for (j, b) in q.vertices().iter().enumerate() {
            let d = vector::dist(a, b);
            if d < best.0 {
                best = (d, i, j);
            }
        }
    }
    let mut x = p.vertices()[best.1].clone();
    let mut d = best.0;
    for _ in 0..100_000 {
        let y = q.project(&x);
        let x_new = p.project(&y);
        let d_new = vector::dist(&x_new, &y);
        let moved = vector::dist(&x_new, &x);
        x = x_new;
        if d_new.is_finite() {
            d = d.min(d_new);
        }
        if moved <= 1e-15 * (1.0 + d) {
            break;
        }
    }
    d
}

impl Shape {
    pub fn ball(center: Point, radius: f64) -> Result<Shape> {
        Ok(Shape::Ball(Ball::new(center, radius)?))
    }

    pub fn polytope_from_vertices(vertices: Vec<Point>) -> Result<Shape> {
        Ok(Shape::Polytope(Polytope::from_vertices(vertices)?))
    }

    pub fn polytope_from_halfspaces(halfspaces: Vec<Halfspace>) -> Result<Shape> {
        Ok(Shape::Polytope(Polytope::from_halfspaces(halfspaces)?))
    }

    pub fn cuboid(lo: &[f64], hi: &[f64]) -> Result<Shape> {
        Ok(Shape::Polytope(Polytope::cuboid(lo, hi)?))
    }

    pub fn rounded(core: Polytope, radius: f64) -> Result<Shape> {
        Ok(Shape::Rounded(RoundedPolytope::new(core, radius)?))
    }

    pub fn union(parts: Vec<Shape>) -> Result<Shape> {
        Ok(Shape::Union(DisjointUnion::new(parts)?))
    }

    pub fn polygon(vertices: Vec<Point>) -> Result<Shape> {
        Ok(Shape::Polygon(SimplePolygon::new(vertices)?))
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        match self {
            Shape::Ball(b) => b.center.len(),
            Shape::Polytope(p) => p.dim(),
            Shape::Rounded(r) => r.core.dim(),
            Shape::Union(u) => u.parts[0].dim(),
            Shape::Polygon(_) => 2,
        }
    }

    pub fn is_convex(&self) -> bool {
        match self {
            Shape::Ball(_) | Shape::Polytope(_) | Shape::Rounded(_) => true,
            Shape::Union(u) => u.parts.len() == 1,
            Shape::Polygon(p) => p.is_convex(),
        }
    }

    /// The shape as a convex polytope, for polytopes and convex polygons.
    pub fn as_polytope(&self) -> Option<alloc::borrow::Cow<'_, Polytope>> {
        match self {
            Shape::Polytope(p) => Some(alloc::borrow::Cow::Borrowed(p)),
            Shape::Polygon(p) => p.to_polytope().map(alloc::borrow::Cow::Owned),
            _ => None,
        }
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        check_dim(self.dim(), x.len())?;
        Ok(self.contains_point(x))
    }

    pub(crate) fn contains_point(&self, x: &[f64]) -> bool {
        match self {
            Shape::Ball(b) => {
                let d2: f64 = x.iter().zip(&b.center).map(|(a, c)| (a - c) * (a - c)).sum();
                d2.sqrt() <= b.radius * (1.0 + 1e-12)
            }
            Shape::Polytope(p) => p.contains(x),
            Shape::Rounded(r) => r.core.distance(x) <= r.radius + 1e-12 * r.core.scale().max(r.radius),
            Shape::Union(u) => u.parts.iter().any(|p| p.contains_point(x)),
            Shape::Polygon(p) => p.contains(x),
        }
    }

    /// `δ_E(x)`, the distance to the set (zero on it).
    pub fn distance(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(self.distance_to(x))
    }

    pub(crate) fn distance_to(&self, x: &[f64]) -> f64 {
        match self {
            Shape::Ball(b) => (vector::dist(x, &b.center) - b.radius).max(0.0),
            Shape::Polytope(p) => p.distance(x),
            Shape::Rounded(r) => (r.core.distance(x) - r.radius).max(0.0),
            Shape::Union(u) => u
                .parts
                .iter()
                .map(|p| p.distance_to(x))
                .fold(f64::INFINITY, f64::min),
            Shape::Polygon(p) => p.distance(x),
        }
    }

    /// Distance from `x` to the topological boundary.
    pub fn boundary_distance(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(match self {
            Shape::Ball(b) => (vector::dist(x, &b.center) - b.radius).abs(),
            Shape::Polytope(p) => p.boundary_distance(x),
            Shape::Rounded(r) => (r.core.distance(x) - r.radius).abs(),
            Shape::Union(u) => {
                let mut d = f64::INFINITY;
                for p in &u.parts {
                    d = d.min(p.boundary_distance(x)?);
                }
                d
            }
            Shape::Polygon(p) => p.boundary_distance(x),
        })
    }

    /// Unique nearest point `π_E(x)`.
    pub fn project(&self, x: &[f64]) -> Result<Point> {
        check_dim(self.dim(), x.len())?;
        match self {
            Shape::Ball(b) => {
                let d = vector::dist(x, &b.center);
                if d <= b.radius {
                    Ok(x.to_vec())
                } else {
                    Ok(vector::axpy(&b.center, b.radius / d, &vector::sub(x, &b.center)))
                }
            }
            Shape::Polytope(p) => Ok(p.project(x)),
            Shape::Rounded(r) => {
                let c = r.core.project(x);
                let d = vector::dist(x, &c);
                if d <= r.radius {
                    Ok(x.to_vec())
                } else {
                    Ok(vector::axpy(&c, r.radius / d, &vector::sub(x, &c)))
                }
            }
            Shape::Union(u) => {
                let mut cands: Vec<(f64, Point)> = Vec::new();
                for p in &u.parts {
                    let q = p.project(x)?;
                    cands.push((vector::dist(x, &q), q));
                }
                let (dmin, best) = cands
                    .iter()
                    .min_by(|a, b| a.0.total_cmp(&b.0))
                    .cloned()
                    .expect("non-empty union");
                let sep_tol = 1e-8 * self.diameter();
                for (d, q) in &cands {
                    if (d - dmin).abs() <= 1e-12 * (1.0 + dmin) {
                        let sep = vector::dist(q, &best);
                        if sep > sep_tol {
                            return Err(Error::AmbiguousProjection { separation: sep });
                        }
                    }
                }
                Ok(best)
            }
            Shape::Polygon(p) => p.project(x),
        }
    }

    /// `reach(E)`: `+∞` for convex sets, half the part separation for
    /// unions, `0` for polygons with a reentrant corner.
    pub fn reach(&self) -> f64 {
        match self {
            Shape::Ball(_) | Shape::Polytope(_) | Shape::Rounded(_) => f64::INFINITY,
            Shape::Union(u) => u.separation / 2.0,
            Shape::Polygon(p) => {
                if p.is_convex() {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
        }
    }

    /// Exact Lebesgue measure.
    pub fn volume(&self) -> f64 {
        match self {
            Shape::Ball(b) => unit_ball_volume(b.center.len()) * b.radius.powi(b.center.len() as i32),
            Shape::Polytope(p) => p.volume(),
            Shape::Rounded(r) => r.volume(),
            Shape::Union(u) => u.parts.iter().map(|p| p.volume()).sum(),
            Shape::Polygon(p) => p.area(),
        }
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        match self {
            Shape::Ball(b) => (
                b.center.iter().map(|c| c - b.radius).collect(),
                b.center.iter().map(|c| c + b.radius).collect(),
            ),
            Shape::Polytope(p) => p.bounding_box(),
            Shape::Rounded(r) => {
                let (lo, hi) = r.core.bounding_box();
                (
                    lo.iter().map(|c| c - r.radius).collect(),
                    hi.iter().map(|c| c + r.radius).collect(),
                )
            }
            Shape::Union(u) => {
                let (mut lo, mut hi) = u.parts[0].bounding_box();
                for p in &u.parts[1..] {
                    let (l, h) = p.bounding_box();
                    for i in 0..lo.len() {
                        lo[i] = lo[i].min(l[i]);
                        hi[i] = hi[i].max(h[i]);
                    }
                }
                (lo, hi)
            }
            Shape::Polygon(p) => p.bounding_box(),
        }
    }

    /// Diameter of the bounding box (an upper bound for the set diameter).
    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        vector::dist(&lo, &hi)
    }

    /// `(E - x0) / ρ` in the same family.
    pub fn rescale(&self, x0: &[f64], rho: f64) -> Result<Shape> {
        check_dim(self.dim(), x0.len())?;
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::InvalidArgument("scale factor must be > 0".into()));
        }
        Ok(match self {
            Shape::Ball(b) => Shape::Ball(Ball {
                center: b.center.iter().zip(x0).map(|(c, o)| (c - o) / rho).collect(),
                radius: b.radius / rho,
            }),
            Shape::Polytope(p) => Shape::Polytope(p.rescaled(x0, rho)),
            Shape::Rounded(r) => Shape::Rounded(RoundedPolytope {
                core: r.core.rescaled(x0, rho),
                radius: r.radius / rho,
            }),
            Shape::Union(u) => Shape::Union(DisjointUnion {
                parts: u
                    .parts
                    .iter()
                    .map(|p| p.rescale(x0, rho))
                    .collect::<Result<_>>()?,
                separation: u.separation / rho,
            }),
            Shape::Polygon(p) => Shape::Polygon(p.rescaled(x0, rho)),
        })
    }

    /// Outward unit normal at a boundary point of the smooth part, where
    /// one exists (balls, rounded bodies, facet interiors).
    pub fn outward_normal(&self, x: &[f64]) -> Option<Point> {
        match self {
            Shape::Ball(b) => b.outward_normal(x),
            Shape::Rounded(r) => vector::normalize(&vector::sub(x, &r.core.project(x))),
            Shape::Polytope(p) => {
                let act = p.active_facets(x, 1e-9 * p.scale());
                (act.len() == 1).then(|| p.facets()[act[0]].normal.clone())
            }
            Shape::Union(u) => u
                .parts
                .iter()
                .min_by(|a, b| a.distance_to(x).total_cmp(&b.distance_to(x)))
                .and_then(|p| p.outward_normal(x)),
            Shape::Polygon(p) => {
                let mut found = None;
                for (a, b) in p.edges() {
                    let f = polygon::segment_foot(x, a, b);
                    if vector::dist(&f, x) <= 1e-9 && vector::dist(&f, a) > 1e-9 && vector::dist(&f, b) > 1e-9 {
                        let e = vector::sub(b, a);
                        found = vector::normalize(&[e[1], -e[0]]);
                    }
                }
                found
            }
        }
    }

    /// Perimeter `H^{n-1}(∂E)`.
    pub fn perimeter(&self) -> f64 {
        match self {
            Shape::Ball(b) => {
                let n = b.center.len();
                n as f64 * unit_ball_volume(n) * b.radius.powi(n as i32 - 1)
            }
            Shape::Polytope(p) => p.faces_of_dim(p.dim() - 1).map(|f| f.measure).sum(),
            Shape::Rounded(r) => {
                let n = r.core.dim();
                (0..n)
                    .map(|k| {
                        (n - k) as f64
                            * unit_ball_volume(n - k)
                            * r.radius.powi((n - k - 1) as i32)
                            * crate::strata::intrinsic_volume(&r.core, k)
                    })
                    .sum()
            }
            Shape::Union(u) => u.parts.iter().map(|p| p.perimeter()).sum(),
            Shape::Polygon(p) => p.perimeter(),
        }
    }

    /// Inradius lower bound used for default time grids.
    pub fn inradius(&self) -> f64 {
        match self {
            Shape::Ball(b) => b.radius,
            Shape::Polytope(p) => {
                let c = vector::centroid(p.vertices());
                p.boundary_distance(&c)
            }
            Shape::Rounded(r) => {
                let c = vector::centroid(r.core.vertices());
                r.core.boundary_distance(&c) + r.radius
            }
            Shape::Union(u) => u.parts.iter().map(|p| p.inradius()).fold(f64::INFINITY, f64::min),
            Shape::Polygon(p) => match p.to_polytope() {
                Some(poly) => poly.boundary_distance(&vector::centroid(poly.vertices())),
                None => {
                    // largest empty-ish disc among vertex-adjacent sample points
                    let (lo, hi) = p.bounding_box();
                    let mut best: f64 = 0.0;
                    let g = 64;
                    for i in 0..=g {
                        for j in 0..=g {
                            let x = [
                                lo[0] + (hi[0] - lo[0]) * i as f64 / g as f64,
                                lo[1] + (hi[1] - lo[1]) * j as f64 / g as f64,
                            ];
                            if p.contains(&x) {
                                best = best.max(p.boundary_distance(&x));
                            }
                        }
                    }
                    best
                }
            },
        }
    }
}

/// Uniform sample in the bounding box `[lo, hi]`.
pub fn sample_box(rng: &mut mc::Stream, lo: &[f64], hi: &[f64], out: &mut [f64]) {
    for i in 0..lo.len() {
        let u: f64 = rng.random();
        out[i] = lo[i] + u * (hi[i] - lo[i]);
    }
}

/// Rejection sampler for uniform points in a shape.
pub struct UniformSampler<'a> {
    shape: &'a Shape,
    lo: Point,
    hi: Point,
}

impl<'a> UniformSampler<'a> {
    pub fn new(shape: &'a Shape) -> Self {
        let (lo, hi) = shape.bounding_box();
        UniformSampler { shape, lo, hi }
    }

    /// Draws one point into `out`; gives up once the running acceptance
    /// rate falls below 10⁻⁶ after 10⁶ attempts.
    pub fn draw(&self, rng: &mut mc::Stream, out: &mut [f64], attempts: &mut u64, accepted: &mut u64) -> Result<()> {
        loop {
            sample_box(rng, &self.lo, &self.hi, out);
            *attempts += 1;
            if self.shape.contains_point(out) {
                *accepted += 1;
                return Ok(());
            }
            if *attempts >= 1_000_000 && (*accepted as f64) < 1e-6 * *attempts as f64 {
                return Err(Error::RejectionStall {
                    attempts: *attempts,
                    accepted: *accepted,
                });
            }
        }
    }
}

/// `count` i.i.d. uniform points in the shape, deterministic in `seed`.
pub fn sample_uniform<E: Executor>(shape: &Shape, count: usize, seed: u64, exec: &E) -> Result<Vec<Point>> {
    if count == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    let sampler = UniformSampler::new(shape);
    let n = shape.dim();
    let (chunks, size) = mc::chunk_plan(count as u64);
    let parts = exec.map_chunks(chunks, |i| -> Result<Vec<Point>> {
        let mut rng = mc::stream(seed, i);
        let (mut att, mut acc) = (0, 0);
        let mut out = Vec::with_capacity(size(i) as usize);
        for _ in 0..size(i) {
            let mut x = vec![0.0; n];
            sampler.draw(&mut rng, &mut x, &mut att, &mut acc)?;
            out.push(x);
        }
        Ok(out)
    });
    let mut all = Vec::with_capacity(count);
    for p in parts {
        all.extend(p?);
    }
    Ok(all)
}

/// Monte Carlo estimate of the volume from bounding-box membership.
pub fn volume_mc<E: Executor>(shape: &Shape, samples: u64, seed: u64, exec: &E) -> Result<(f64, f64)> {
    let (lo, hi) = shape.bounding_box();
    let box_vol: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let n = shape.dim();
    let m = mc::estimate_mean(exec, samples, seed, |rng| {
        let mut x = vec![0.0; n];
        sample_box(rng, &lo, &hi, &mut x);
        Ok(if shape.contains_point(&x) { 1.0 } else { 0.0 })
    })?;
    Ok((box_vol * m.mean, box_vol * m.stderr()))
}
