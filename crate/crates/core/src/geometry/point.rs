//! Points of the Riemann sphere in homogeneous coordinates.

use crate::tolerances;
use crate::{Error, Result};
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A point of `CP^1`, stored as a pair `(a, b)` meaning `a/b`.
///
/// Keeping both coordinates lets the point at infinity (`b = 0`) flow through
/// cross-ratios and Mobius maps without special cases.
#[derive(Debug, Clone, Copy)]
pub struct IdealPoint {
    pub a: Complex64,
    pub b: Complex64,
}

impl IdealPoint {
    pub fn finite(z: Complex64) -> Self {
        IdealPoint { a: z, b: Complex64::new(1.0, 0.0) }
    }

    pub fn infinity() -> Self {
        IdealPoint { a: Complex64::new(1.0, 0.0), b: Complex64::new(0.0, 0.0) }
    }

    /// Build from homogeneous coordinates; `(0, 0)` is not a point.
    pub fn from_homogeneous(a: Complex64, b: Complex64) -> Result<Self> {
        if a.norm() == 0.0 && b.norm() == 0.0 {
            return Err(Error::Degenerate("homogeneous coordinates (0, 0)".into()));
        }
        Ok(IdealPoint { a, b }.rescaled())
    }

    /// Scale so the larger coordinate has norm 1. Values stay well inside
    /// f64 range no matter how many Mobius maps were applied.
    pub(crate) fn rescaled(self) -> Self {
        let m = self.a.norm().max(self.b.norm());
        IdealPoint { a: self.a / m, b: self.b / m }
    }

    pub fn is_infinite(&self) -> bool {
        self.b.norm() <= tolerances::POINT_COINCIDENCE * self.a.norm()
    }

    /// The affine value `a/b`, unless the point is (numerically) infinite.
    pub fn to_complex(&self) -> Option<Complex64> {
        if self.is_infinite() {
            None
        } else {
            Some(self.a / self.b)
        }
    }

    /// Determinant `a1*b2 - a2*b1`; zero exactly when the points coincide.
    pub fn bracket(&self, other: &IdealPoint) -> Complex64 {
        self.a * other.b - other.a * self.b
    }

    /// Bracket normalized by both coordinate norms, a scale-free coincidence
    /// measure in `[0, 1]`-ish range.
    pub fn separation(&self, other: &IdealPoint) -> f64 {
        let na = self.a.norm().hypot(self.b.norm());
        let nb = other.a.norm().hypot(other.b.norm());
        self.bracket(other).norm() / (na * nb)
    }

    pub fn approx_eq(&self, other: &IdealPoint) -> bool {
        self.separation(other) < tolerances::POINT_COINCIDENCE
    }
}

/// Cross-ratio `(p, q; r, s) = (p - r)(q - s) / ((p - s)(q - r))`, evaluated
/// projectively so infinite entries need no case split.
///
/// Errors when any two of the four points (numerically) coincide, which is
/// exactly when the value would collapse to 0, 1, or infinity.
pub fn cross_ratio(p: &IdealPoint, q: &IdealPoint, r: &IdealPoint, s: &IdealPoint) -> Result<Complex64> {
    let pts = [p, q, r, s];
    for i in 0..4 {
        for j in (i + 1)..4 {
            if pts[i].separation(pts[j]) < tolerances::POINT_COINCIDENCE {
                return Err(Error::Degenerate(format!(
                    "cross-ratio of coincident points (arguments {i} and {j})"
                )));
            }
        }
    }
    let num = p.bracket(r) * q.bracket(s);
    let den = p.bracket(s) * q.bracket(r);
    Ok(num / den)
}

/// Solve `cross_ratio(p[0], p[1]; p[2], p[3]) = z` for the one entry of `p`
/// that is `None`. The unknown appears linearly in homogeneous coordinates,
/// so the solution is the kernel of a single linear form.
pub fn cross_ratio_solve(points: [Option<IdealPoint>; 4], z: Complex64) -> Result<IdealPoint> {
    if points.iter().filter(|p| p.is_none()).count() != 1 {
        return Err(Error::Degenerate("cross_ratio_solve needs exactly one unknown".into()));
    }
    let unknown = points.iter().position(|p| p.is_none()).unwrap();
    let idx = |k: usize| points[k].unwrap();
    // cr = (b(p,r) b(q,s)) / (b(p,s) b(q,r)); write num - z*den = 0 as a
    // linear form alpha*a + beta*b in the unknown's homogeneous coordinates.
    // b(x, w) has coefficients (b_w, -a_w) in x; b(w, x) has (-b_w, a_w).
    let left = |w: IdealPoint| (w.b, -w.a);
    let right = |w: IdealPoint| (-w.b, w.a);
    let combine = |(ca, cb): (Complex64, Complex64), k: Complex64| (ca * k, cb * k);
    let (p, q, r, s) = (0usize, 1usize, 2usize, 3usize);
    let (term1, term2) = match unknown {
        0 => (
            combine(left(idx(r)), idx(q).bracket(&idx(s))),
            combine(left(idx(s)), idx(q).bracket(&idx(r))),
        ),
        1 => (
            combine(left(idx(s)), idx(p).bracket(&idx(r))),
            combine(left(idx(r)), idx(p).bracket(&idx(s))),
        ),
        2 => (
            combine(right(idx(p)), idx(q).bracket(&idx(s))),
            combine(right(idx(q)), idx(p).bracket(&idx(s))),
        ),
        _ => (
            combine(right(idx(q)), idx(p).bracket(&idx(r))),
            combine(right(idx(p)), idx(q).bracket(&idx(r))),
        ),
    };
    let alpha = term1.0 - z * term2.0;
    let beta = term1.1 - z * term2.1;
    // Kernel of alpha*a + beta*b = 0 is (a, b) = (-beta, alpha).
    IdealPoint::from_homogeneous(-beta, alpha)
}

// Wire format: finite points as [re, im], infinity as "inf"; the explicit
// homogeneous form {"a": [re, im], "b": [re, im]} is accepted on input.
#[derive(Deserialize)]
#[serde(untagged)]
enum PointWire {
    Shorthand([f64; 2]),
    Infinity(String),
    Homogeneous { a: [f64; 2], b: [f64; 2] },
}

impl Serialize for IdealPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self.to_complex() {
            Some(z) => [z.re, z.im].serialize(serializer),
            None => "inf".serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for IdealPoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        match PointWire::deserialize(deserializer)? {
            PointWire::Shorthand([re, im]) => Ok(IdealPoint::finite(Complex64::new(re, im))),
            PointWire::Infinity(s) if s == "inf" => Ok(IdealPoint::infinity()),
            PointWire::Infinity(s) => Err(D::Error::custom(format!("bad point literal {s:?}"))),
            PointWire::Homogeneous { a, b } => IdealPoint::from_homogeneous(
                Complex64::new(a[0], a[1]),
                Complex64::new(b[0], b[1]),
            )
            .map_err(|e| D::Error::custom(e.to_string())),
        }
    }
}
