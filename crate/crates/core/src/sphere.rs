//! Points, caps and slices on the unit sphere S^d ⊂ R^{d+1}.
//!
//! A cap `C(x, t)` is the open set `{y : <x, y> > t}`; a slice is the
//! intersection of two caps. Containment tests take an explicit margin so
//! that callers can choose which side of a bounding hyperplane near-boundary
//! points fall on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm};

/// Points whose norm is below this are rejected by [`SpherePoint::new`].
pub const MIN_NORM: f64 = 1e-300;

/// Default margin for emptiness checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Norm deviation treated as rounding noise by [`SpherePoint::new`].
const UNIT_SLACK: f64 = 4.0 * f64::EPSILON;

/// A unit vector in R^{d+1}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SpherePoint {
    coords: Vec<f64>,
}

impl SpherePoint {
    /// Normalizes `raw` onto the sphere. Input that is already unit length
    /// to within rounding is kept as is, so construction is idempotent and
    /// serialized points read back bit for bit.
    pub fn new(raw: &[f64]) -> Result<Self> {
        if raw.len() < 2 {
            return Err(Error::DimensionTooSmall { len: raw.len() });
        }
        let n = norm(raw);
        if !(n > MIN_NORM) || !n.is_finite() {
            return Err(Error::ZeroVector { norm: n });
        }
        if (n - 1.0).abs() <= UNIT_SLACK {
            return Ok(Self { coords: raw.to_vec() });
        }
        Ok(Self {
            coords: raw.iter().map(|v| v / n).collect(),
        })
    }

    /// Standard basis vector `e_{axis}` (0-based) in R^{d+1}.
    pub fn basis(d: usize, axis: usize) -> Self {
        assert!(d >= 1 && axis <= d, "basis vector e{axis} outside R^{}", d + 1);
        let mut coords = vec![0.0; d + 1];
        coords[axis] = 1.0;
        Self { coords }
    }

    /// Point on S^1 at the given angle.
    pub fn from_angle(angle: f64) -> Self {
        Self {
            coords: vec![angle.cos(), angle.sin()],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dot(&self, other: &SpherePoint) -> f64 {
        dot(&self.coords, &other.coords)
    }

    pub fn antipode(&self) -> SpherePoint {
        Self {
            coords: self.coords.iter().map(|v| -v).collect(),
        }
    }

    /// Great-circle distance in radians.
    pub fn angle_to(&self, other: &SpherePoint) -> f64 {
        self.dot(other).clamp(-1.0, 1.0).acos()
    }

    fn check_dim(&self, other: &SpherePoint) -> Result<()> {
        if self.coords.len() != other.coords.len() {
            return Err(Error::DimensionMismatch {
                expected: self.coords.len() - 1,
                found: other.coords.len() - 1,
            });
        }
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for SpherePoint {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        SpherePoint::new(&v)
    }
}

impl From<SpherePoint> for Vec<f64> {
    fn from(p: SpherePoint) -> Self {
        p.coords
    }
}

/// Open spherical cap `{y : <center, y> > threshold}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cap {
    pub center: SpherePoint,
    pub threshold: f64,
}

impl Cap {
    pub fn new(center: SpherePoint, threshold: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&threshold) {
            return Err(Error::OutOfRange {
                what: "cap threshold",
                value: threshold,
            });
        }
        Ok(Self { center, threshold })
    }

    /// The cap `C(center, -1)`: the whole sphere except `-center`.
    pub fn full(center: SpherePoint) -> Self {
        Self {
            center,
            threshold: -1.0,
        }
    }

    /// Hemisphere `{y : <normal, y> > 0}`.
    pub fn hemisphere(normal: SpherePoint) -> Self {
        Self {
            center: normal,
            threshold: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    /// True iff `<center, p> > threshold + tol`.
    pub fn contains(&self, p: &SpherePoint, tol: f64) -> Result<bool> {
        self.center.check_dim(p)?;
        Ok(self.center.dot(p) > self.threshold + tol)
    }

    pub fn is_central(&self) -> bool {
        self.threshold == 0.0 || self.threshold == -1.0
    }
}

/// Intersection of two caps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slice {
    pub cap_a: Cap,
    pub cap_b: Cap,
}

impl Slice {
    pub fn new(cap_a: Cap, cap_b: Cap) -> Result<Self> {
        if cap_a.dim() != cap_b.dim() {
            return Err(Error::DimensionMismatch {
                expected: cap_a.dim(),
                found: cap_b.dim(),
            });
        }
        Ok(Self { cap_a, cap_b })
    }

    /// A single cap viewed as a slice. The second factor is `C(center, -1)`,
    /// which only removes `-center`, a point outside the first cap whenever
    /// the first cap is not itself full.
    pub fn from_cap(cap: Cap) -> Self {
        let cap_b = Cap::full(cap.center.clone());
        Self { cap_a: cap, cap_b }
    }

    /// The full sphere (minus one point).
    pub fn full(d: usize) -> Self {
        Self::from_cap(Cap::full(SpherePoint::basis(d, 0)))
    }

    pub fn dim(&self) -> usize {
        self.cap_a.dim()
    }

    pub fn contains(&self, p: &SpherePoint, tol: f64) -> Result<bool> {
        Ok(self.cap_a.contains(p, tol)? && self.cap_b.contains(p, tol)?)
    }

    /// Indices of `points` inside the slice with margin `tol`.
    pub fn hits(&self, points: &[SpherePoint], tol: f64) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for (i, p) in points.iter().enumerate() {
            if self.contains(p, tol)? {
                out.push(i);
            }
        }
        Ok(out)
    }

    pub fn is_empty_of(&self, points: &[SpherePoint], tol: f64) -> Result<bool> {
        for p in points {
            if self.contains(p, tol)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Both caps bounded by hyperplanes through the origin (or full).
    pub fn is_central(&self) -> bool {
        self.cap_a.is_central() && self.cap_b.is_central()
    }
}

/// Free-function form of [`Cap::contains`].
pub fn cap_contains(cap: &Cap, p: &SpherePoint, tol: f64) -> Result<bool> {
    cap.contains(p, tol)
}

/// Free-function form of [`Slice::contains`].
pub fn slice_contains(s: &Slice, p: &SpherePoint, tol: f64) -> Result<bool> {
    s.contains(p, tol)
}

/// Normalizes `raw`; see [`SpherePoint::new`].
pub fn make_point(raw: &[f64]) -> Result<SpherePoint> {
    SpherePoint::new(raw)
}

const ORTHO_TOL: f64 = 1e-10;

fn check_plane(theta: &SpherePoint, theta_perp: &SpherePoint) -> Result<()> {
    theta.check_dim(theta_perp)?;
    let c = theta.dot(theta_perp);
    if c.abs() > ORTHO_TOL {
        return Err(Error::NotOrthogonal { dot: c });
    }
    Ok(())
}

/// Proper rotation by `alpha` in the plane spanned by the orthonormal pair
/// `(theta, theta_perp)`, oriented so that `theta` turns toward `theta_perp`.
/// The orthogonal complement of the plane is fixed.
pub fn rotate_in_plane(
    p: &SpherePoint,
    theta: &SpherePoint,
    theta_perp: &SpherePoint,
    alpha: f64,
) -> Result<SpherePoint> {
    check_plane(theta, theta_perp)?;
    p.check_dim(theta)?;
    let a = p.dot(theta);
    let b = p.dot(theta_perp);
    let (s, c) = alpha.sin_cos();
    let da = a * c - b * s - a;
    let db = a * s + b * c - b;
    let coords: Vec<f64> = p
        .coords
        .iter()
        .zip(theta.coords.iter().zip(&theta_perp.coords))
        .map(|(pi, (ti, ui))| pi + da * ti + db * ui)
        .collect();
    // renormalize to keep the unit-norm invariant after rounding
    SpherePoint::new(&coords)
}

/// Angle of the projection of `p` onto the plane `(theta, theta_perp)`,
/// in `(-pi, pi]`.
pub fn angle_in_plane(
    p: &SpherePoint,
    theta: &SpherePoint,
    theta_perp: &SpherePoint,
) -> Result<f64> {
    check_plane(theta, theta_perp)?;
    p.check_dim(theta)?;
    let a = p.dot(theta);
    let b = p.dot(theta_perp);
    if a.abs() < 1e-12 && b.abs() < 1e-12 {
        return Err(Error::DegenerateProjection);
    }
    let ang = b.atan2(a);
    Ok(if ang <= -std::f64::consts::PI { std::f64::consts::PI } else { ang })
}
