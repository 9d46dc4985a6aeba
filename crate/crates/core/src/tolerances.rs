//! Numeric tolerances used across the crate, collected in one place so the
//! trade-offs are visible together.
//!
//! Everything downstream of the sampler works at the scale of unit-ish
//! complex numbers, so tolerances are absolute unless a doc says otherwise.

/// Two projective points with normalized bracket below this coincide.
pub const POINT_COINCIDENCE: f64 = 1e-12;

/// Matrices after determinant normalization must have |det - 1| below this.
pub const DET_NORMALIZATION: f64 = 1e-12;

/// Shapes closer than this to 0 or 1 are degenerate (cross-ratio collapse).
pub const SHAPE_DEGENERACY: f64 = 1e-8;

/// Acceptable magnitude for an edge equation residual |prod z^i - 1|.
pub const RESIDUAL_ACCEPT: f64 = 1e-9;

/// Residual bound a solution must meet before developing is attempted.
pub const DEVELOP_PRECONDITION: f64 = 1e-6;

/// Cyclic relation slack allowed inside an expanded shape assignment.
pub const CYCLIC_CONSISTENCY: f64 = 1e-9;

/// Relator images of a candidate input representation must be within this of
/// plus or minus the identity.
pub const RELATOR_INPUT: f64 = 1e-8;

/// Relator slack for a holonomy representation recovered from floats.
pub const RELATOR_RECOVERED: f64 = 1e-6;

/// A loop edge must map at least this far from the identity Mobius map.
pub const EDGE_NONTRIVIALITY: f64 = 1e-6;

/// Vertex placements are redrawn when two corners of a tetrahedron come
/// closer than this (normalized bracket).
pub const PLACEMENT_SEPARATION: f64 = 1e-8;

/// Maximum redraw attempts for one placement seed before giving up.
pub const PLACEMENT_ATTEMPTS: u64 = 64;

/// Trace battery agreement threshold for the conjugacy test.
pub const CONJUGACY: f64 = 1e-6;

/// Absolute accuracy target of the Lobachevsky series evaluation.
pub const LOBACHEVSKY_ACCURACY: f64 = 1e-10;
