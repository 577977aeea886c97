//! Boundary strata: tangent and normal cones, external angles, and
//! per-face measures feeding the curvature measures.

use alloc::vec;
use alloc::vec::Vec;

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::geometry::{Face, Polytope, Shape, SimplePolygon};
use crate::linalg;
use crate::mc;
use crate::real::{Real, PI};
use crate::vector::{self, dot, Point};

const DIR_TOL: f64 = 1e-10;

/// Closed convex polyhedral cone in ℝⁿ, kept in both forms:
/// `cone(generators) = {w : ⟨a, w⟩ ≤ 0 for every facet normal a}`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PolyhedralCone {
    dim: usize,
    generators: Vec<Point>,
    facet_normals: Vec<Point>,
    lin_dim: usize,
}

fn push_unique(list: &mut Vec<Point>, v: Point) {
    if !list.iter().any(|u| vector::dist(u, &v) < 1e-9) {
        list.push(v);
    }
}

impl PolyhedralCone {
    /// `{w : ⟨a, w⟩ ≤ 0 for a in normals}`, with its extreme rays and
    /// lineality computed.
    pub fn from_inequalities(dim: usize, normals: &[Point]) -> Self {
        let mut facet_normals = Vec::new();
        for a in normals {
            if let Some(u) = vector::normalize(a) {
                push_unique(&mut facet_normals, u);
            }
        }
        let lineality = linalg::null_space(&facet_normals, dim, DIR_TOL);
        let mut generators: Vec<Point> = Vec::new();
        for b in &lineality {
            push_unique(&mut generators, b.clone());
            push_unique(&mut generators, vector::scale(b, -1.0));
        }
        let pointed_dim = dim - lineality.len();
        if pointed_dim > 0 {
            let need = pointed_dim - 1;
            let m = facet_normals.len();
            let mut subset: Vec<usize> = (0..need).collect();
            loop {
                if need <= m {
                    let mut rows: Vec<Point> = subset.iter().map(|&i| facet_normals[i].clone()).collect();
                    rows.extend(lineality.iter().cloned());
                    let ns = linalg::null_space(&rows, dim, DIR_TOL);
                    if ns.len() == 1 {
                        for s in [1.0, -1.0] {
                            let r = vector::scale(&ns[0], s);
                            if facet_normals.iter().all(|a| dot(a, &r) <= 1e-9) {
                                push_unique(&mut generators, r);
                            }
                        }
                    }
                }
                // next subset
                if need == 0 || need > m {
                    break;
                }
                let mut i = need;
                let mut advanced = false;
                while i > 0 {
                    i -= 1;
                    if subset[i] != i + m - need {
                        subset[i] += 1;
                        for j in i + 1..need {
                            subset[j] = subset[j - 1] + 1;
                        }
                        advanced = true;
                        break;
                    }
                }
                if !advanced {
                    break;
                }
            }
        }
        let lin_dim = linalg::rank(&generators, dim, DIR_TOL);
        PolyhedralCone {
            dim,
            generators,
            facet_normals,
            lin_dim,
        }
    }

    /// The whole space ℝⁿ.
    pub fn full(dim: usize) -> Self {
        Self::from_inequalities(dim, &[])
    }

    /// The trivial cone `{0}`.
    pub fn zero(dim: usize) -> Self {
        let mut normals = Vec::new();
        for i in 0..dim {
            normals.push(vector::unit(dim, i));
            normals.push(vector::scale(&vector::unit(dim, i), -1.0));
        }
        Self::from_inequalities(dim, &normals)
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Point] {
        &self.generators
    }

    pub fn facet_normals(&self) -> &[Point] {
        &self.facet_normals
    }

    /// Dimension of the linear span of the cone.
    pub fn lin_dim(&self) -> usize {
        self.lin_dim
    }

    /// `Dual(C) = {v : ⟨v, w⟩ ≤ 0 for all w ∈ C}`.
    pub fn dual(&self) -> Self {
        let lin_dim = linalg::rank(&self.facet_normals, self.dim, DIR_TOL);
        PolyhedralCone {
            dim: self.dim,
            generators: self.facet_normals.clone(),
            facet_normals: self.generators.clone(),
            lin_dim,
        }
    }

    pub fn contains(&self, w: &[f64]) -> bool {
        let tol = 1e-10 * vector::norm(w).max(1e-300);
        self.facet_normals.iter().all(|a| dot(a, w) <= tol)
    }

    /// Nearest point of the cone to `p`.
    pub fn project(&self, p: &[f64]) -> Point {
        if self.contains(p) {
            return p.to_vec();
        }
        let m = self.facet_normals.len();
        assert!(m <= 20, "cone projection enumerates active sets");
        let mut best: Option<(f64, Point)> = None;
        for mask in 1u32..(1u32 << m) {
            let rows: Vec<Point> = (0..m)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| self.facet_normals[i].clone())
                .collect();
            let basis = linalg::null_space(&rows, self.dim, DIR_TOL);
            let q = linalg::project_affine(p, &vec![0.0; self.dim], &basis);
            if self
                .facet_normals
                .iter()
                .all(|a| dot(a, &q) <= 1e-10 * (1.0 + vector::norm(p)))
            {
                let d = vector::dist(p, &q);
                if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                    best = Some((d, q));
                }
            }
        }
        best.map(|b| b.1).unwrap_or_else(|| vec![0.0; self.dim])
    }

    pub fn distance(&self, p: &[f64]) -> f64 {
        vector::dist(p, &self.project(p))
    }

    /// Orthonormal basis of the span of the generators.
    pub fn span_basis(&self) -> Vec<Point> {
        linalg::span_basis(&self.generators, self.dim, DIR_TOL)
    }
}

/// One stratum piece: a face (or smooth boundary part) with its cones.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FaceStratum {
    /// `k` with `dim Nor = n - k`.
    pub dim: usize,
    /// `H^k` measure of the piece.
    pub measure: f64,
    pub representative: Point,
    pub tangent_cone: PolyhedralCone,
    pub normal_cone: PolyhedralCone,
    /// Normalized spherical measure of the normal cone.
    pub external_angle: f64,
    /// Monte Carlo standard error of the angle (0 when exact).
    pub external_angle_stderr: f64,
    /// Interior wedge angle, for `k = n - 2`.
    pub wedge_angle: Option<f64>,
    /// Set on reentrant polygon corners, where the set has zero reach.
    pub reentrant: bool,
}

/// Monte Carlo budget for external angles of normal cones of dimension ≥ 4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleMc {
    pub samples: u64,
    pub seed: u64,
}

impl Default for AngleMc {
    fn default() -> Self {
        AngleMc {
            samples: 10_000_000,
            seed: 0x5eed_a9c1e,
        }
    }
}

/// Normalized measure `H^{m-1}(C ∩ 𝕊^{n-1}) / H^{m-1}(𝕊^{m-1})` of a
/// pointed cone spanning an m-dimensional subspace, with its standard error.
pub fn cone_angle(cone: &PolyhedralCone, mc_cfg: &AngleMc) -> (f64, f64) {
    let basis = cone.span_basis();
    let m = basis.len();
    if m == 0 {
        return (0.0, 0.0);
    }
    let gens: Vec<Point> = cone
        .generators()
        .iter()
        .map(|g| linalg::coords(g, &vec![0.0; cone.ambient_dim()], &basis))
        .collect();
    match m {
        1 => {
            // a ray or a line
            if gens.iter().any(|g| g[0] > 0.0) && gens.iter().any(|g| g[0] < 0.0) {
                (1.0, 0.0)
            } else {
                (0.5, 0.0)
            }
        }
        2 => {
            let mut best: f64 = 0.0;
            for a in &gens {
                for b in &gens {
                    let c = (dot(a, b) / (vector::norm(a) * vector::norm(b))).clamp(-1.0, 1.0);
                    best = best.max(c.acos());
                }
            }
            if gens.len() > 2 && best >= PI - 1e-12 {
                // contains a line: half-plane or plane
                let full = cone.facet_normals().is_empty();
                return (if full { 1.0 } else { 0.5 }, 0.0);
            }
            (best / (2.0 * PI), 0.0)
        }
        3 if cone.lin_dim() == 3 && is_pointed(cone) => (spherical_polygon_area(&gens) / (4.0 * PI), 0.0),
        _ => cone_angle_mc(cone, &basis, mc_cfg),
    }
}

fn is_pointed(cone: &PolyhedralCone) -> bool {
    linalg::null_space(cone.facet_normals(), cone.ambient_dim(), DIR_TOL).is_empty()
}

/// Area of the spherical polygon spanned by the extreme rays of a pointed
/// 3-dimensional cone (Van Oosterom–Strackee fan).
fn spherical_polygon_area(gens: &[Point]) -> f64 {
    let units: Vec<Point> = gens.iter().filter_map(|g| vector::normalize(g)).collect();
    let axis = vector::normalize(&vector::centroid(&units)).expect("pointed cone");
    let helper = linalg::complement(&[axis.clone()], 3);
    let mut ordered: Vec<(f64, Point)> = units
        .iter()
        .map(|u| (dot(u, &helper[1]).atan2(dot(u, &helper[0])), u.clone()))
        .collect();
    ordered.sort_by(|a, b| a.0.total_cmp(&b.0));
    let pts: Vec<Point> = ordered.into_iter().map(|x| x.1).collect();
    let mut area = 0.0;
    for i in 1..pts.len() - 1 {
        let (a, b, c) = (&pts[0], &pts[i], &pts[i + 1]);
        let triple = linalg::det(&[a.clone(), b.clone(), c.clone()]).abs();
        let denom = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
        area += 2.0 * triple.atan2(denom);
    }
    area
}

fn cone_angle_mc(cone: &PolyhedralCone, basis: &[Point], cfg: &AngleMc) -> (f64, f64) {
    let n = cone.ambient_dim();
    let m = mc::estimate_mean(&mc::Serial, cfg.samples, cfg.seed, |rng| {
        let mut v = vec![0.0; n];
        for b in basis {
            let z: f64 = StandardNormal.sample(rng);
            v.iter_mut().zip(b).for_each(|(x, y)| *x += z * y);
        }
        Ok(if cone.contains(&v) { 1.0 } else { 0.0 })
    })
    .expect("infallible sampler");
    (m.mean, m.stderr())
}

fn check_boundary(shape: &Shape, x: &[f64]) -> Result<()> {
    let d = shape.boundary_distance(x)?;
    if d > 1e-9 {
        return Err(Error::NotOnBoundary { distance: d });
    }
    Ok(())
}

fn polygon_local_normals(p: &SimplePolygon, x: &[f64]) -> Vec<Point> {
    let mut out = Vec::new();
    for (a, b) in p.edges() {
        let e = vector::sub(b, a);
        let normal = vector::normalize(&[e[1], -e[0]]).expect("non-degenerate edge");
        let ax = vector::sub(x, a);
        let s = dot(&ax, &e) / dot(&e, &e);
        let off = (dot(&ax, &normal)).abs();
        if off <= 1e-9 && (-1e-9..=1.0 + 1e-9).contains(&s) {
            out.push(normal);
        }
    }
    out
}

/// `Tan(E, x)` at a boundary point of a set with positive reach at `x`.
pub fn tangent_cone(shape: &Shape, x: &[f64]) -> Result<PolyhedralCone> {
    check_boundary(shape, x)?;
    let n = shape.dim();
    match shape {
        Shape::Polytope(p) => {
            let act = p.active_facets(x, 1e-9 * p.scale());
            let normals: Vec<Point> = act.iter().map(|&i| p.facets()[i].normal.clone()).collect();
            Ok(PolyhedralCone::from_inequalities(n, &normals))
        }
        Shape::Ball(_) | Shape::Rounded(_) => {
            let u = shape
                .outward_normal(x)
                .ok_or_else(|| Error::InvalidArgument("no outward normal at this point".into()))?;
            Ok(PolyhedralCone::from_inequalities(n, &[u]))
        }
        Shape::Union(u) => {
            let part = u
                .parts()
                .iter()
                .min_by(|a, b| a.distance_to(x).total_cmp(&b.distance_to(x)))
                .expect("non-empty union");
            tangent_cone(part, x)
        }
        Shape::Polygon(p) => {
            if let Some(i) = p.vertex_at(x, 1e-9) {
                if p.is_reentrant(i) {
                    return Err(Error::NotPositiveReach(
                        "reentrant polygon corner has a nonconvex tangent cone".into(),
                    ));
                }
            }
            Ok(PolyhedralCone::from_inequalities(n, &polygon_local_normals(p, x)))
        }
    }
}

/// `Nor(E, x) = Dual(Tan(E, x))`.
pub fn normal_cone(shape: &Shape, x: &[f64]) -> Result<PolyhedralCone> {
    Ok(tangent_cone(shape, x)?.dual())
}

/// Tangent cone as a union of convex cones; also covers reentrant polygon
/// corners, where it is the union of the two edge half-planes.
pub fn tangent_cone_pieces(shape: &Shape, x: &[f64]) -> Result<Vec<PolyhedralCone>> {
    if let Shape::Polygon(p) = shape {
        check_boundary(shape, x)?;
        if let Some(i) = p.vertex_at(x, 1e-9) {
            if p.is_reentrant(i) {
                return Ok(polygon_local_normals(p, x)
                    .into_iter()
                    .map(|nrm| PolyhedralCone::from_inequalities(2, &[nrm]))
                    .collect());
            }
        }
    }
    Ok(vec![tangent_cone(shape, x)?])
}

fn stratum_from_cones(
    dim: usize,
    measure: f64,
    representative: Point,
    tangent: PolyhedralCone,
    angle_mc: &AngleMc,
) -> FaceStratum {
    let normal = tangent.dual();
    let n = tangent.ambient_dim();
    let (external_angle, external_angle_stderr) = if dim + 1 == n {
        (0.5, 0.0)
    } else {
        cone_angle(&normal, angle_mc)
    };
    let wedge_angle = (dim + 2 == n).then(|| {
        let g = normal.generators();
        PI - (dot(&g[0], &g[1]) / (vector::norm(&g[0]) * vector::norm(&g[1])))
            .clamp(-1.0, 1.0)
            .acos()
    });
    FaceStratum {
        dim,
        measure,
        representative,
        tangent_cone: tangent,
        normal_cone: normal,
        external_angle,
        external_angle_stderr,
        wedge_angle,
        reentrant: false,
    }
}

/// One stratum per proper face of a convex polytope, `k = 0..n-1`.
pub fn face_lattice(poly: &Polytope) -> Vec<FaceStratum> {
    face_lattice_with(poly, &AngleMc::default())
}

pub fn face_lattice_with(poly: &Polytope, angle_mc: &AngleMc) -> Vec<FaceStratum> {
    poly.faces().iter().map(|f| face_stratum(poly, f, angle_mc)).collect()
}

fn face_stratum(poly: &Polytope, f: &Face, angle_mc: &AngleMc) -> FaceStratum {
    let normals: Vec<Point> = f.facets.iter().map(|&i| poly.facets()[i].normal.clone()).collect();
    let tan = PolyhedralCone::from_inequalities(poly.dim(), &normals);
    stratum_from_cones(f.dim, f.measure, f.centroid.clone(), tan, angle_mc)
}

/// `Σ_{k-faces F} γ(F) H^k(F)`.
fn angle_weighted_measure(poly: &Polytope, k: usize) -> f64 {
    let cfg = AngleMc::default();
    poly.faces_of_dim(k)
        .map(|f| {
            let s = face_stratum(poly, f, &cfg);
            s.external_angle * s.measure
        })
        .sum()
}

/// Strata of any supported shape. Smooth boundaries contribute a single
/// `k = n - 1` piece; unions concatenate their parts.
pub fn strata(shape: &Shape) -> Result<Vec<FaceStratum>> {
    strata_with(shape, &AngleMc::default())
}

pub fn strata_with(shape: &Shape, angle_mc: &AngleMc) -> Result<Vec<FaceStratum>> {
    let n = shape.dim();
    match shape {
        Shape::Polytope(p) => Ok(face_lattice_with(p, angle_mc)),
        Shape::Ball(b) => {
            let mut x = b.center.clone();
            x[0] += b.radius;
            let tan = tangent_cone(shape, &x)?;
            Ok(vec![stratum_from_cones(n - 1, shape.perimeter(), x, tan, angle_mc)])
        }
        Shape::Rounded(r) => {
            let h = &r.core.facets()[0];
            let f = r
                .core
                .faces()
                .iter()
                .find(|f| f.dim + 1 == n && f.facets == [0])
                .expect("facet 0 face");
            let x = vector::axpy(&f.centroid, r.radius, &h.normal);
            let tan = tangent_cone(shape, &x)?;
            Ok(vec![stratum_from_cones(n - 1, shape.perimeter(), x, tan, angle_mc)])
        }
        Shape::Union(u) => {
            let mut out = Vec::new();
            for p in u.parts() {
                out.extend(strata_with(p, angle_mc)?);
            }
            Ok(out)
        }
        Shape::Polygon(p) => {
            if let Some(poly) = p.to_polytope() {
                return Ok(face_lattice_with(&poly, angle_mc));
            }
            let mut out = Vec::new();
            for (a, b) in p.edges() {
                let mid = vector::scale(&vector::add(a, b), 0.5);
                let tan = tangent_cone(shape, &mid)?;
                out.push(stratum_from_cones(1, vector::dist(a, b), mid, tan, angle_mc));
            }
            for (i, v) in p.vertices().iter().enumerate() {
                if p.is_reentrant(i) {
                    out.push(FaceStratum {
                        dim: 0,
                        measure: 1.0,
                        representative: v.clone(),
                        tangent_cone: PolyhedralCone::full(2),
                        normal_cone: PolyhedralCone::zero(2),
                        external_angle: 0.0,
                        external_angle_stderr: 0.0,
                        wedge_angle: Some(p.interior_angle(i)),
                        reentrant: true,
                    });
                } else {
                    let tan = tangent_cone(shape, v)?;
                    out.push(stratum_from_cones(0, 1.0, v.clone(), tan, angle_mc));
                }
            }
            Ok(out)
        }
    }
}

/// External angle of a polytope stratum (exact for normal cones of
/// dimension ≤ 3, Monte Carlo otherwise).
pub fn external_angle(stratum: &FaceStratum) -> f64 {
    if stratum.dim + 1 == stratum.normal_cone.ambient_dim() {
        return 0.5;
    }
    cone_angle(&stratum.normal_cone, &AngleMc::default()).0
}

/// `C_k(P, ℝⁿ) = Σ_{k-faces F} γ(F, P) H^k(F)`.
pub fn curvature_measure_polytope(shape: &Shape, k: usize) -> Result<f64> {
    let poly = shape.as_polytope().ok_or_else(|| {
        if shape.reach() == 0.0 {
            Error::NotPositiveReach("curvature measures need positive reach".into())
        } else {
            Error::Unsupported("curvature_measure_polytope needs a convex polytope".into())
        }
    })?;
    let n = poly.dim();
    if k >= n {
        return Err(Error::InvalidArgument(alloc::format!("k = {k} must be below n = {n}")));
    }
    Ok(angle_weighted_measure(&poly, k))
}

/// Intrinsic volume `V_k` of a convex polytope (`V_n` is the volume,
/// `V_0 = 1`).
pub fn intrinsic_volume(poly: &Polytope, k: usize) -> f64 {
    let n = poly.dim();
    if k == n {
        return poly.volume();
    }
    if k == 0 {
        return 1.0;
    }
    angle_weighted_measure(poly, k)
}

#[cfg(test)]
mod tests;
