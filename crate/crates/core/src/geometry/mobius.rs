//! Mobius transformations as determinant-normalized 2x2 complex matrices.
//!
//! Matrices are kept in `SL(2,C)` but compared projectively: `m` and `-m`
//! are the same transformation, so every equality test minimizes over the
//! global sign.

use super::point::IdealPoint;
use crate::tolerances;
use crate::{Error, Result};
use num_complex::Complex64;
use std::ops::Mul;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius {
    /// Row-major entries `[m00, m01, m10, m11]` with `det = 1`.
    pub m: [Complex64; 4],
}

impl Mobius {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Mobius { m: [one, zero, zero, one] }
    }

    /// Normalize an arbitrary invertible matrix into `SL(2,C)`.
    pub fn new(m00: Complex64, m01: Complex64, m10: Complex64, m11: Complex64) -> Result<Self> {
        let det = m00 * m11 - m01 * m10;
        let scale = m00.norm().max(m01.norm()).max(m10.norm()).max(m11.norm());
        if scale == 0.0 || det.norm() < tolerances::DET_NORMALIZATION * scale * scale {
            return Err(Error::Degenerate("matrix is numerically singular".into()));
        }
        let s = det.sqrt();
        Ok(Mobius { m: [m00 / s, m01 / s, m10 / s, m11 / s] })
    }

    /// Row-major entries of the normalized matrix.
    pub fn entries(&self) -> [Complex64; 4] {
        self.m
    }

    pub fn det(&self) -> Complex64 {
        self.m[0] * self.m[3] - self.m[1] * self.m[2]
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0] + self.m[3]
    }

    pub fn inverse(&self) -> Mobius {
        // det is 1, so the adjugate is the inverse.
        Mobius { m: [self.m[3], -self.m[1], -self.m[2], self.m[0]] }
    }

    /// Apply to a projective point; infinity needs no special case.
    pub fn apply(&self, p: &IdealPoint) -> IdealPoint {
        IdealPoint {
            a: self.m[0] * p.a + self.m[1] * p.b,
            b: self.m[2] * p.a + self.m[3] * p.b,
        }
        .rescaled()
    }

    /// Entry-wise distance to another transformation, minimized over the
    /// sign ambiguity of the lift to `SL(2,C)`.
    pub fn psl_distance(&self, other: &Mobius) -> f64 {
        let plus = (0..4).map(|i| (self.m[i] - other.m[i]).norm()).fold(0.0, f64::max);
        let minus = (0..4).map(|i| (self.m[i] + other.m[i]).norm()).fold(0.0, f64::max);
        plus.min(minus)
    }

    /// Distance from the identity transformation.
    pub fn distance_from_identity(&self) -> f64 {
        self.psl_distance(&Mobius::identity())
    }

    /// The unique transformation carrying three distinct source points to
    /// three distinct target points.
    pub fn from_correspondence(src: &[IdealPoint; 3], dst: &[IdealPoint; 3]) -> Result<Mobius> {
        let a = to_zero_one_inf(src)?;
        let b = to_zero_one_inf(dst)?;
        Ok(b.inverse() * a)
    }

    /// Fixed points on the sphere: one for parabolic maps, two otherwise.
    /// The identity (either sign) has no isolated fixed points and errors.
    pub fn fixed_points(&self) -> Result<Vec<IdealPoint>> {
        if self.distance_from_identity() < 1e-12 {
            return Err(Error::Degenerate("identity fixes every point".into()));
        }
        let [a, b, c, d] = self.m;
        // Fixed points solve c w^2 + (d - a) w - b = 0 in affine w.
        if c.norm() < 1e-14 {
            // Infinity is fixed; a second fixed point exists iff a != d.
            let mut out = vec![IdealPoint::infinity()];
            if (d - a).norm() > 1e-12 {
                out.push(IdealPoint::from_homogeneous(b, d - a)?);
                out.swap(0, 1);
            }
            return Ok(out);
        }
        let disc = (d - a) * (d - a) + 4.0 * c * b;
        // tr^2 - 4 = disc, so parabolic means disc ~ 0.
        if disc.norm() < 1e-12 {
            return Ok(vec![IdealPoint::from_homogeneous(a - d, 2.0 * c)?]);
        }
        let q = disc.sqrt();
        let w1 = IdealPoint::from_homogeneous(a - d + q, 2.0 * c)?;
        let w2 = IdealPoint::from_homogeneous(a - d - q, 2.0 * c)?;
        Ok(vec![w1, w2])
    }
}

/// The transformation sending `(p0, p1, p2)` to `(0, 1, inf)`.
fn to_zero_one_inf(pts: &[IdealPoint; 3]) -> Result<Mobius> {
    for i in 0..3 {
        for j in (i + 1)..3 {
            if pts[i].separation(&pts[j]) < tolerances::POINT_COINCIDENCE {
                return Err(Error::Degenerate(format!(
                    "correspondence with coincident points ({i} and {j})"
                )));
            }
        }
    }
    let k1 = pts[1].bracket(&pts[2]);
    let k3 = pts[1].bracket(&pts[0]);
    // Row form of w -> (w - p0)(p1 - p2) / ((w - p2)(p1 - p0)).
    Mobius::new(k1 * pts[0].b, -k1 * pts[0].a, k3 * pts[2].b, -k3 * pts[2].a)
}

impl Mul for Mobius {
    type Output = Mobius;

    fn mul(self, rhs: Mobius) -> Mobius {
        let a = &self.m;
        let b = &rhs.m;
        let raw = [
            a[0] * b[0] + a[1] * b[2],
            a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3],
        ];
        // Composition of unit-determinant maps drifts only by rounding;
        // renormalize so long products stay in SL(2,C).
        let det = raw[0] * raw[3] - raw[1] * raw[2];
        let s = det.sqrt();
        Mobius { m: [raw[0] / s, raw[1] / s, raw[2] / s, raw[3] / s] }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pt(re: f64, im: f64) -> IdealPoint {
        IdealPoint::finite(c(re, im))
    }

    #[test]
    fn identity_fixes_points() {
        let id = Mobius::identity();
        let p = pt(2.5, -1.0);
        assert!(id.apply(&p).approx_eq(&p));
        assert!(id.apply(&IdealPoint::infinity()).is_infinite());
    }

    #[test]
    fn translation_moves_infinity_nowhere() {
        let t = Mobius::new(c(1.0, 0.0), c(3.0, 1.0), c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!(t.apply(&pt(0.0, 0.0)).approx_eq(&pt(3.0, 1.0)));
        assert!(t.apply(&IdealPoint::infinity()).is_infinite());
    }

    #[test]
    fn det_normalized_on_construction() {
        let m = Mobius::new(c(4.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!((m.det() - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn singular_matrix_rejected() {
        assert!(Mobius::new(c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)).is_err());
    }

    #[test]
    fn composition_matches_pointwise_action() {
        let f = Mobius::new(c(1.0, 2.0), c(0.5, 0.0), c(0.0, 1.0), c(1.0, 0.0)).unwrap();
        let g = Mobius::new(c(0.0, 1.0), c(2.0, 0.0), c(1.0, 0.0), c(1.0, 1.0)).unwrap();
        let p = pt(0.7, -0.3);
        let composed = (f * g).apply(&p);
        let stepwise = f.apply(&g.apply(&p));
        assert!(composed.approx_eq(&stepwise));
    }

    #[test]
    fn inverse_composes_to_identity() {
        let f = Mobius::new(c(1.0, 2.0), c(0.5, 0.0), c(0.0, 1.0), c(1.0, 0.0)).unwrap();
        assert!((f * f.inverse()).distance_from_identity() < 1e-14);
    }

    #[test]
    fn correspondence_hits_all_three_targets() {
        let src = [pt(0.0, 0.0), pt(1.0, 0.0), IdealPoint::infinity()];
        let dst = [pt(2.0, 1.0), pt(-1.0, 0.5), pt(0.0, -3.0)];
        let m = Mobius::from_correspondence(&src, &dst).unwrap();
        for k in 0..3 {
            assert!(m.apply(&src[k]).approx_eq(&dst[k]));
        }
    }

    #[test]
    fn correspondence_identity_when_triples_match() {
        let tri = [pt(0.3, 0.1), pt(-2.0, 1.0), pt(5.0, 5.0)];
        let m = Mobius::from_correspondence(&tri, &tri).unwrap();
        assert!(m.distance_from_identity() < 1e-12);
    }

    #[test]
    fn fixed_points_are_fixed() {
        let m = Mobius::new(c(2.0, 1.0), c(1.0, 0.0), c(0.5, -0.5), c(1.0, 0.0)).unwrap();
        for p in m.fixed_points().unwrap() {
            assert!(m.apply(&p).approx_eq(&p));
        }
    }

    #[test]
    fn parabolic_has_single_fixed_point() {
        // Unit translation: parabolic, fixes only infinity.
        let m = Mobius::new(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        let fps = m.fixed_points().unwrap();
        assert_eq!(fps.len(), 1);
        assert!(fps[0].is_infinite());
    }

    #[test]
    fn identity_has_no_isolated_fixed_points() {
        assert!(Mobius::identity().fixed_points().is_err());
    }

    #[test]
    fn psl_distance_ignores_global_sign() {
        let f = Mobius::new(c(1.0, 2.0), c(0.5, 0.0), c(0.0, 1.0), c(1.0, 0.0)).unwrap();
        let neg = Mobius { m: [-f.m[0], -f.m[1], -f.m[2], -f.m[3]] };
        assert!(f.psl_distance(&neg) < 1e-15);
    }
}
