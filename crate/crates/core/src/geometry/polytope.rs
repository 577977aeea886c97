//! Convex polytopes with both vertex and half-space descriptions and the
//! full face lattice.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::linalg;
use crate::real::Real;
use crate::vector::{self, dot, Point};

/// Closed half-space `{x : ⟨normal, x⟩ ≤ offset}` with a unit normal.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Halfspace {
    pub normal: Point,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: Point, offset: f64) -> Result<Self> {
        let l = vector::norm(&normal);
        if !(l > 0.0) || !vector::all_finite(&normal) || !offset.is_finite() {
            return Err(Error::InvalidShape("half-space normal must be finite and nonzero".into()));
        }
        Ok(Halfspace {
            normal: vector::scale(&normal, 1.0 / l),
            offset: offset / l,
        })
    }

    #[inline]
    pub fn slack(&self, x: &[f64]) -> f64 {
        self.offset - dot(&self.normal, x)
    }
}

/// A proper face of a polytope (dimension `0..n`).
#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub dim: usize,
    /// Indices into [`Polytope::vertices`].
    pub vertices: Vec<usize>,
    /// Indices of the facets containing this face.
    pub facets: Vec<usize>,
    /// Vertex centroid, a point of the relative interior.
    pub centroid: Point,
    /// Orthonormal basis of the face's direction space.
    pub basis: Vec<Point>,
    /// k-dimensional Hausdorff measure of the face.
    pub measure: f64,
}

/// A full-dimensional convex polytope in ℝⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Point>,
    facets: Vec<Halfspace>,
    faces: Vec<Face>,
    volume: f64,
    scale: f64,
}

struct Combinations {
    idx: Vec<usize>,
    n: usize,
    first: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Combinations {
            idx: (0..k).collect(),
            n,
            first: true,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;
    fn next(&mut self) -> Option<Vec<usize>> {
        let k = self.idx.len();
        if k > self.n {
            return None;
        }
        if self.first {
            self.first = false;
            return Some(self.idx.clone());
        }
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.idx[i] != i + self.n - k {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                return Some(self.idx.clone());
            }
        }
        None
    }
}

fn coord_scale(points: &[Point]) -> f64 {
    points
        .iter()
        .flat_map(|p| p.iter())
        .fold(1.0f64, |m, x| m.max(x.abs()))
}

impl Polytope {
    /// Convex hull of `points`. Rejects lower-dimensional input.
    pub fn from_vertices(points: Vec<Point>) -> Result<Self> {
        let n = points.first().map(|p| p.len()).unwrap_or(0);
        if n < 1 {
            return Err(Error::InvalidShape("polytope needs at least one vertex".into()));
        }
        for p in &points {
            check_dim(n, p.len())?;
            if !vector::all_finite(p) {
                return Err(Error::InvalidShape("non-finite vertex coordinate".into()));
            }
        }
        let scale = coord_scale(&points);
        let tol = 1e-10 * scale;
        let mut pts: Vec<Point> = Vec::new();
        for p in points {
            if !pts.iter().any(|q| vector::dist(q, &p) <= tol) {
                pts.push(p);
            }
        }
        let diffs: Vec<Point> = pts.iter().skip(1).map(|p| vector::sub(p, &pts[0])).collect();
        let rank = linalg::rank(&diffs, n, 1e-10);
        if rank < n || pts.len() < n + 1 {
            return Err(Error::DegeneratePolytope { rank, dim: n });
        }

        // Facets: hyperplanes through n points leaving all points on one side.
        let mut facets: Vec<Halfspace> = Vec::new();
        for comb in Combinations::new(pts.len(), n) {
            let base = &pts[comb[0]];
            let d: Vec<Point> = comb[1..].iter().map(|&i| vector::sub(&pts[i], base)).collect();
            let ns = linalg::null_space(&d, n, 1e-10);
            if ns.len() != 1 {
                continue;
            }
            let mut a = ns[0].clone();
            let mut b = dot(&a, base);
            let (mut above, mut below) = (false, false);
            for p in &pts {
                let s = dot(&a, p) - b;
                if s > tol {
                    above = true;
                } else if s < -tol {
                    below = true;
                }
            }
            if above && below {
                continue;
            }
            if above {
                a = vector::scale(&a, -1.0);
                b = -b;
            }
            let dup = facets
                .iter()
                .any(|h| vector::dist(&h.normal, &a) < 1e-9 && (h.offset - b).abs() <= tol);
            if !dup {
                facets.push(Halfspace { normal: a, offset: b });
            }
        }

        // Vertices are the points where active facet normals have full rank.
        let vertices: Vec<Point> = pts
            .into_iter()
            .filter(|p| {
                let active: Vec<Point> = facets
                    .iter()
                    .filter(|h| h.slack(p).abs() <= tol)
                    .map(|h| h.normal.clone())
                    .collect();
                linalg::rank(&active, n, 1e-9) == n
            })
            .collect();
        Self::assemble(n, vertices, facets, scale)
    }

    /// Intersection of half-spaces; must be bounded and full-dimensional.
    pub fn from_halfspaces(halfspaces: Vec<Halfspace>) -> Result<Self> {
        let n = halfspaces.first().map(|h| h.normal.len()).unwrap_or(0);
        if n < 1 || halfspaces.len() < n + 1 {
            return Err(Error::InvalidShape(
                "a bounded polytope in R^n needs at least n + 1 half-spaces".into(),
            ));
        }
        let hs: Vec<Halfspace> = halfspaces
            .into_iter()
            .map(|h| {
                check_dim(n, h.normal.len())?;
                Halfspace::new(h.normal, h.offset)
            })
            .collect::<Result<_>>()?;
        let scale = hs.iter().fold(1.0f64, |m, h| m.max(h.offset.abs()));
        let tol = 1e-10 * scale;
        let mut verts: Vec<Point> = Vec::new();
        for comb in Combinations::new(hs.len(), n) {
            let rows: Vec<Point> = comb.iter().map(|&i| hs[i].normal.clone()).collect();
            let rhs: Vec<f64> = comb.iter().map(|&i| hs[i].offset).collect();
            if let Some(x) = linalg::solve(&rows, &rhs) {
                if hs.iter().all(|h| h.slack(&x) >= -tol)
                    && !verts.iter().any(|v| vector::dist(v, &x) <= tol)
                {
                    verts.push(x);
                }
            }
        }
        if verts.len() < n + 1 {
            return Err(Error::DegeneratePolytope {
                rank: verts.len().saturating_sub(1).min(n),
                dim: n,
            });
        }
        let p = Self::from_vertices(verts)?;
        // Bounded iff every facet of conv(vertices) is one of the inputs.
        for f in &p.facets {
            let matched = hs
                .iter()
                .any(|h| vector::dist(&h.normal, &f.normal) < 1e-7 && (h.offset - f.offset).abs() < 1e-7 * scale);
            if !matched {
                return Err(Error::InvalidShape("half-space intersection is unbounded".into()));
            }
        }
        Ok(p)
    }

    /// Axis-aligned box `[lo, hi]`.
    pub fn cuboid(lo: &[f64], hi: &[f64]) -> Result<Self> {
        check_dim(lo.len(), hi.len())?;
        let n = lo.len();
        if lo.iter().zip(hi).any(|(a, b)| !(b > a)) {
            return Err(Error::InvalidShape("box needs lo < hi in every coordinate".into()));
        }
        let mut verts = Vec::with_capacity(1 << n);
        for mask in 0..(1usize << n) {
            verts.push(
                (0..n)
                    .map(|i| if mask >> i & 1 == 1 { hi[i] } else { lo[i] })
                    .collect(),
            );
        }
        Self::from_vertices(verts)
    }

    fn assemble(n: usize, vertices: Vec<Point>, mut facets: Vec<Halfspace>, scale: f64) -> Result<Self> {
        let tol = 1e-10 * scale;
        let incidence: Vec<Vec<usize>> = facets
            .iter()
            .map(|h| {
                (0..vertices.len())
                    .filter(|&i| h.slack(&vertices[i]).abs() <= tol)
                    .collect()
            })
            .collect();
        // drop any hyperplane that only touches a lower-dimensional face
        let keep: Vec<bool> = incidence
            .iter()
            .map(|vs| {
                let pts: Vec<Point> = vs.iter().map(|&i| vertices[i].clone()).collect();
                affine_rank(&pts, n) == n - 1
            })
            .collect();
        let mut incid = Vec::new();
        let mut kept = Vec::new();
        for (i, h) in facets.drain(..).enumerate() {
            if keep[i] {
                kept.push(h);
                incid.push(incidence[i].clone());
            }
        }
        let facets = kept;

        // Face lattice as the intersection closure of facet vertex sets.
        let mut sets: Vec<Vec<usize>> = incid.clone();
        let mut frontier = sets.clone();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for f in &frontier {
                for g in &incid {
                    let inter: Vec<usize> = f.iter().filter(|i| g.contains(i)).cloned().collect();
                    if !inter.is_empty() && !sets.contains(&inter) {
                        sets.push(inter.clone());
                        next.push(inter);
                    }
                }
            }
            frontier = next;
        }
        for i in 0..vertices.len() {
            if !sets.contains(&vec![i]) {
                sets.push(vec![i]);
            }
        }

        let mut faces: Vec<Face> = sets
            .into_iter()
            .map(|vs| {
                let pts: Vec<Point> = vs.iter().map(|&i| vertices[i].clone()).collect();
                let centroid = vector::centroid(&pts);
                let diffs: Vec<Point> = pts.iter().map(|p| vector::sub(p, &centroid)).collect();
                let basis = linalg::span_basis(&diffs, n, 1e-10);
                let on: Vec<usize> = (0..facets.len())
                    .filter(|&f| vs.iter().all(|v| incid[f].contains(v)))
                    .collect();
                Face {
                    dim: basis.len(),
                    vertices: vs,
                    facets: on,
                    centroid,
                    basis,
                    measure: 0.0,
                }
            })
            .collect();
        faces.sort_by(|a, b| a.dim.cmp(&b.dim).then_with(|| a.vertices.cmp(&b.vertices)));

        // k-measure by the pyramid decomposition over (k-1)-subfaces.
        for i in 0..faces.len() {
            let k = faces[i].dim;
            let m = match k {
                0 => 1.0,
                1 => {
                    let vs = &faces[i].vertices;
                    let mut len: f64 = 0.0;
                    for a in vs {
                        for b in vs {
                            len = len.max(vector::dist(&vertices[*a], &vertices[*b]));
                        }
                    }
                    len
                }
                _ => {
                    let mut s = 0.0;
                    for j in 0..i {
                        let g = &faces[j];
                        if g.dim + 1 == k && g.vertices.iter().all(|v| faces[i].vertices.contains(v)) {
                            let foot = linalg::project_affine(&faces[i].centroid, &g.centroid, &g.basis);
                            s += vector::dist(&foot, &faces[i].centroid) * g.measure;
                        }
                    }
                    s / k as f64
                }
            };
            faces[i].measure = m;
        }

        let centroid = vector::centroid(&vertices);
        let volume = facets
            .iter()
            .zip(&incid)
            .map(|(h, vs)| {
                let fm = faces
                    .iter()
                    .find(|f| f.dim + 1 == n && &f.vertices == vs)
                    .map(|f| f.measure)
                    .unwrap_or(0.0);
                h.slack(&centroid) * fm
            })
            .sum::<f64>()
            / n as f64;

        Ok(Polytope {
            dim: n,
            vertices,
            facets,
            faces,
            volume,
            scale,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Halfspace] {
        &self.facets
    }

    /// All proper faces, sorted by dimension.
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn faces_of_dim(&self, k: usize) -> impl Iterator<Item = &Face> {
        self.faces.iter().filter(move |f| f.dim == k)
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Largest absolute coordinate seen at construction (at least 1).
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let tol = 1e-12 * self.scale;
        self.facets.iter().all(|h| h.slack(x) >= -tol)
    }

    /// Indices of facets whose hyperplane passes through `x` (within `tol`).
    pub fn active_facets(&self, x: &[f64], tol: f64) -> Vec<usize> {
        (0..self.facets.len())
            .filter(|&i| self.facets[i].slack(x).abs() <= tol)
            .collect()
    }

    /// Euclidean projection onto the polytope.
    pub fn project(&self, x: &[f64]) -> Point {
        if self.contains(x) {
            return x.to_vec();
        }
        let tol = 1e-9 * self.scale;
        let mut best: Option<(f64, Point)> = None;
        for f in &self.faces {
            let p = linalg::project_affine(x, &f.centroid, &f.basis);
            if self.facets.iter().all(|h| h.slack(&p) >= -tol) {
                let d = vector::dist(x, &p);
                if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                    best = Some((d, p));
                }
            }
        }
        best.map(|(_, p)| p).unwrap_or_else(|| x.to_vec())
    }

    pub fn distance(&self, x: &[f64]) -> f64 {
        if self.contains(x) {
            0.0
        } else {
            vector::dist(x, &self.project(x))
        }
    }

    /// Distance from `x` to the boundary.
    pub fn boundary_distance(&self, x: &[f64]) -> f64 {
        if self.contains(x) {
            self.facets
                .iter()
                .map(|h| h.slack(x).max(0.0))
                .fold(f64::INFINITY, f64::min)
        } else {
            self.distance(x)
        }
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = self.vertices[0].clone();
        let mut hi = self.vertices[0].clone();
        for v in &self.vertices {
            for i in 0..self.dim {
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

    /// `(P - x0) / ρ`.
    pub fn rescaled(&self, x0: &[f64], rho: f64) -> Polytope {
        let map = |p: &[f64]| -> Point { p.iter().zip(x0).map(|(a, b)| (a - b) / rho).collect() };
        let vertices: Vec<Point> = self.vertices.iter().map(|v| map(v)).collect();
        let facets = self
            .facets
            .iter()
            .map(|h| Halfspace {
                normal: h.normal.clone(),
                offset: (h.offset - dot(&h.normal, x0)) / rho,
            })
            .collect();
        let faces = self
            .faces
            .iter()
            .map(|f| Face {
                dim: f.dim,
                vertices: f.vertices.clone(),
                facets: f.facets.clone(),
                centroid: map(&f.centroid),
                basis: f.basis.clone(),
                measure: f.measure / rho.powi(f.dim as i32),
            })
            .collect();
        Polytope {
            dim: self.dim,
            vertices,
            facets,
            faces,
            volume: self.volume / rho.powi(self.dim as i32),
            scale: coord_scale(&self.vertices.iter().map(|v| map(v)).collect::<Vec<_>>()),
        }
    }

    /// Fan triangulation of a face (or of the whole polytope when `face`
    /// is `None`) into simplices, each given by its vertex coordinates.
    pub fn triangulate(&self, face: Option<usize>) -> Vec<Vec<Point>> {
        match face {
            Some(i) => self.triangulate_face(i),
            None => {
                let c = vector::centroid(&self.vertices);
                let mut out = Vec::new();
                for (i, f) in self.faces.iter().enumerate() {
                    if f.dim + 1 == self.dim {
                        for mut s in self.triangulate_face(i) {
                            s.push(c.clone());
                            out.push(s);
                        }
                    }
                }
                out
            }
        }
    }

    fn triangulate_face(&self, i: usize) -> Vec<Vec<Point>> {
        let f = &self.faces[i];
        if f.dim == 0 {
            return vec![vec![self.vertices[f.vertices[0]].clone()]];
        }
        let mut out = Vec::new();
        for (j, g) in self.faces.iter().enumerate() {
            if g.dim + 1 == f.dim && g.vertices.iter().all(|v| f.vertices.contains(v)) {
                for mut s in self.triangulate_face(j) {
                    s.push(f.centroid.clone());
                    out.push(s);
                }
            }
        }
        out
    }

    /// Index of the face whose relative interior contains `x` (a boundary
    /// point), by the set of active facets.
    pub fn face_at(&self, x: &[f64], tol: f64) -> Option<usize> {
        let active = self.active_facets(x, tol);
        if active.is_empty() {
            return None;
        }
        self.faces.iter().position(|f| f.facets == active)
    }
}

pub(crate) fn affine_rank(points: &[Point], n: usize) -> usize {
    if points.is_empty() {
        return 0;
    }
    let d: Vec<Point> = points.iter().skip(1).map(|p| vector::sub(p, &points[0])).collect();
    linalg::rank(&d, n, 1e-10)
}
