//! Numerical core for heat-content expansions of sets with positive reach:
//! geometry, boundary strata, Steiner polynomials, heat content estimators,
//! expansion fitting, and tangent-cone blow-ups.
#![no_std]
// whenever std is linked into the build, its inherent float methods shadow `Real`
#![allow(unused_imports)]

extern crate alloc;

pub mod blowup;
pub mod boundary;
pub mod error;
pub mod expansion;
pub mod geometry;
pub mod heat;
pub mod linalg;
pub mod mc;
pub mod quad;
pub mod real;
pub mod steiner;
pub mod strata;
pub mod testfn;
pub mod vector;

pub use error::{Error, Result};
pub use geometry::{Ball, DisjointUnion, Polytope, RoundedPolytope, Shape, SimplePolygon};
pub use strata::{FaceStratum, PolyhedralCone};
pub use testfn::TestFunction;
