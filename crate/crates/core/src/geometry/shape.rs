//! Shape parameters of ideal tetrahedra and their volume.

use super::lobachevsky::lobachevsky;
use crate::tolerances;
use crate::{Error, Result};
use num_complex::Complex64;

/// The three shape parameters of an ideal tetrahedron, one per pair of
/// opposite edges, in the cyclic order `z, 1/(1-z), 1 - 1/z`.
///
/// For a tetrahedron with vertices `0..4`, slot 0 sits on edges 01 and 23,
/// slot 1 on 02 and 13, slot 2 on 03 and 12. The product of the triple
/// is -1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeTriple {
    pub z: [Complex64; 3],
}

impl ShapeTriple {
    /// Derive the full triple from the slot-0 shape. Rejects shapes at the
    /// collapsed values 0 and 1 (and anything within the degeneracy guard).
    pub fn from_slot0(z: Complex64) -> Result<Self> {
        check_nondegenerate(z)?;
        let one = Complex64::new(1.0, 0.0);
        Ok(ShapeTriple { z: [z, one / (one - z), one - one / z] })
    }

    /// Accept an explicitly listed triple, checking it against the cyclic
    /// relation instead of recomputing slots 1 and 2.
    pub fn from_full(z: [Complex64; 3]) -> Result<Self> {
        check_nondegenerate(z[0])?;
        let derived = ShapeTriple::from_slot0(z[0])?;
        for s in 1..3 {
            if (derived.z[s] - z[s]).norm() > tolerances::CYCLIC_CONSISTENCY {
                return Err(Error::BadSolution(format!(
                    "slot {s} shape {} violates the cyclic relation (expected {})",
                    z[s], derived.z[s]
                )));
            }
        }
        Ok(ShapeTriple { z })
    }

    /// Max deviation of slots 1 and 2 from the values the cyclic relation
    /// forces; tiny for any triple built by this crate.
    pub fn cyclic_residual(&self) -> f64 {
        let one = Complex64::new(1.0, 0.0);
        let r1 = (self.z[1] - one / (one - self.z[0])).norm();
        let r2 = (self.z[2] - (one - one / self.z[0])).norm();
        r1.max(r2)
    }

    /// Largest imaginary part in absolute value; zero means a flat (real)
    /// tetrahedron.
    pub fn flatness(&self) -> f64 {
        self.z.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// Signed volume: the Lobachevsky sum over the triple's arguments.
    pub fn volume(&self) -> f64 {
        self.z.iter().map(|w| lobachevsky(w.arg())).sum()
    }
}

fn check_nondegenerate(z: Complex64) -> Result<()> {
    let one = Complex64::new(1.0, 0.0);
    if z.norm() < tolerances::SHAPE_DEGENERACY || (z - one).norm() < tolerances::SHAPE_DEGENERACY {
        return Err(Error::Degenerate(format!("shape {z} too close to 0 or 1")));
    }
    Ok(())
}

/// Signed hyperbolic volume of the ideal tetrahedron with slot-0 shape `z`,
/// as the Lobachevsky sum over the triple's arguments. Positive for
/// `Im z > 0`, zero for flat (real) shapes.
pub fn ideal_volume(z: Complex64) -> Result<f64> {
    Ok(ShapeTriple::from_slot0(z)?.volume())
}
