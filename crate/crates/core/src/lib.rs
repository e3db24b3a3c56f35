//! Restricted-Delaunay mesh generation for piecewise smooth complexes.
//!
//! The crate builds conforming curve, surface and volume meshes of a domain
//! given as a curve network plus surface patches, by refining an ambient
//! Delaunay tetrahedralisation until its restricted sub-complexes meet
//! size, distance and shape bounds.

pub mod aabb_tree;
pub mod geometry;
pub mod oracle;
pub mod predicates;
pub mod delaunay;
pub mod restricted;
pub mod shapes;
pub mod quality;
pub mod refine;
pub mod io;
