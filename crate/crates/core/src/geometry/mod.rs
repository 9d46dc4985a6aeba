//! Ideal points on the sphere at infinity, Mobius transformations, shape
//! parameters of ideal tetrahedra, and hyperbolic volume.

mod lobachevsky;
mod mobius;
mod point;
mod shape;

pub use lobachevsky::lobachevsky;
pub use mobius::Mobius;
pub use point::{cross_ratio, cross_ratio_solve, IdealPoint};
pub use shape::{ideal_volume, ShapeTriple};
