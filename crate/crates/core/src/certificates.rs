//! Constructive empty slices for arbitrary point sets.
//!
//! Each construction cuts the sphere with hyperplanes through the origin, so
//! every certificate is a *central* slice whose measure is exactly
//! `dihedral angle / (2 pi)`. The four constructions:
//!
//! | case | applies when | piece | guaranteed measure |
//! |------|--------------|-------|--------------------|
//! | 1 | `n <= d + 1` | hemisphere bounded by a hyperplane through `d` points | `1/2` |
//! | 2 | `n >= d + 1` | one of `k + 1` equal lunes of the emptier hemisphere, `k = (n - d) / 2` | `1 / (n - d + 2)` |
//! | 3 | `d + 1 < n <= 2d + 1` | a quadrant of two such hyperplanes | `1/4` |
//! | 4 | `n > 2d` | one of `k + 1` equal sub-wedges of the emptier large quadrant, `k = (n - 2d) / 2` | `1 / (2n - 4d + 4)` |
//!
//! Emptiness is always strict with margin: a point counts as inside a piece
//! only when both inner products exceed the thresholds by more than the
//! tolerance. Points lying on a cutting hyperplane (including the points
//! that define it) are therefore never inside, and distinct pieces of a
//! partition can never both contain the same point.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::bounds::{thm_a_lower, MinDispBranch};
use crate::error::{Error, Result};
use crate::linalg;
use crate::measure::exact_central_measure;
use crate::sphere::{rotate_in_plane, Cap, Slice, SpherePoint};

/// Emptiness margin used by the constructions and by default in verification.
pub const CERT_TOL: f64 = 1e-9;

/// Largest number of partition doublings tried when every piece is blocked.
const MAX_REFINEMENTS: u32 = 4;

/// Normals closer to parallel than this are treated as coplanar input.
const PARALLEL_DOT: f64 = 1.0 - 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    Case1Hemisphere,
    Case2Lune,
    Case3Quadrant,
    Case4QuadrantLune,
}

impl CaseTag {
    pub fn name(self) -> &'static str {
        match self {
            CaseTag::Case1Hemisphere => "case1_hemisphere",
            CaseTag::Case2Lune => "case2_lune",
            CaseTag::Case3Quadrant => "case3_quadrant",
            CaseTag::Case4QuadrantLune => "case4_quadrant_lune",
        }
    }

    /// The lower-bound branch this construction realizes.
    pub fn branch(self) -> MinDispBranch {
        match self {
            CaseTag::Case1Hemisphere => MinDispBranch::Half,
            CaseTag::Case2Lune => MinDispBranch::HemisphereLunes,
            CaseTag::Case3Quadrant => MinDispBranch::Quarter,
            CaseTag::Case4QuadrantLune => MinDispBranch::QuadrantLunes,
        }
    }

    /// Measure the construction guarantees for `n` points on S^d.
    pub fn guaranteed(self, n: usize, d: usize) -> f64 {
        let (n, d) = (n as f64, d as f64);
        match self {
            CaseTag::Case1Hemisphere => 0.5,
            CaseTag::Case2Lune => 1.0 / (n - d + 2.0),
            CaseTag::Case3Quadrant => 0.25,
            CaseTag::Case4QuadrantLune => 1.0 / (2.0 * n - 4.0 * d + 4.0),
        }
    }
}

impl std::fmt::Display for CaseTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Everything needed to redo a construction by hand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Construction {
    /// Normal of the first hyperplane.
    pub theta: Vec<f64>,
    /// Normal of the second hyperplane (cases 3 and 4).
    pub theta2: Option<Vec<f64>>,
    /// Second in-plane direction used to rotate the cutting hyperplanes.
    pub theta_perp: Option<Vec<f64>>,
    /// Side of the first hyperplane (`+1` or `-1`) that holds the piece.
    pub side: i8,
    /// Angle between the two normals (cases 3 and 4).
    pub gamma: Option<f64>,
    /// Number of equal pieces the region was cut into.
    pub pieces: usize,
    /// Index of the returned piece.
    pub piece: usize,
    /// Dihedral angle of each piece.
    pub alpha: f64,
    /// True when the nominal partition had no empty piece and was refined.
    pub refined: bool,
    /// Set when a degenerate input forced a different construction.
    pub fallback_from: Option<CaseTag>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub slice: Slice,
    /// Measure the construction promises (the piece's dihedral angle / 2 pi).
    pub claimed_measure: f64,
    /// Measure recomputed from the slice's two normals.
    pub exact_measure: f64,
    pub case_tag: CaseTag,
    pub construction: Construction,
}

fn check_points(points: &[SpherePoint], d: usize) -> Result<()> {
    if d < 1 {
        return Err(Error::DimensionTooSmall { len: d + 1 });
    }
    for p in points {
        if p.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: p.dim(),
            });
        }
    }
    Ok(())
}

fn unit(v: Vec<f64>) -> SpherePoint {
    SpherePoint::new(&v).expect("construction vectors are nonzero")
}

fn neg(p: &SpherePoint) -> SpherePoint {
    p.antipode()
}

/// Unit normal of a hyperplane through the origin containing `points`
/// (at most `d` of them). With a nullspace of dimension above one, the
/// result is the projection of the standard basis vector farthest from the
/// points' span, signed so its first nonzero coordinate is positive.
pub fn hyperplane_normal(points: &[SpherePoint], d: usize) -> Result<SpherePoint> {
    check_points(points, d)?;
    if points.len() > d {
        return Err(Error::Precondition(format!(
            "hyperplane_normal takes at most d = {d} points, got {}",
            points.len()
        )));
    }
    normal_of_rows(points.iter().map(|p| p.coords()).collect(), d)
}

fn normal_of_rows(rows: Vec<&[f64]>, d: usize) -> Result<SpherePoint> {
    let v = linalg::complement_vector(&rows, d + 1)
        .ok_or_else(|| Error::Precondition("rows span the whole space".into()))?;
    Ok(unit(v))
}

/// Unit vector orthogonal to `theta`: Gram-Schmidt on the first standard
/// basis vector that is not (nearly) parallel to it.
fn perpendicular(theta: &SpherePoint) -> SpherePoint {
    let d = theta.dim();
    let basis = vec![theta.coords().to_vec()];
    for axis in 0..=d {
        let e = SpherePoint::basis(d, axis);
        if let Some(v) = linalg::orthogonalize(e.coords(), &basis, 1e-3) {
            return unit(v);
        }
    }
    unreachable!("some basis vector is far from any unit vector's line")
}

fn count_inside(cap: &Cap, points: &[SpherePoint]) -> usize {
    points
        .iter()
        .filter(|p| cap.center.dot(p) > cap.threshold + CERT_TOL)
        .count()
}

fn is_empty(slice: &Slice, points: &[SpherePoint]) -> bool {
    slice.is_empty_of(points, CERT_TOL).expect("dimensions checked")
}

/// The open wedge `{ cos(phi) e + sin(phi) f + ... : phi in (lo, hi) }` of
/// the plane `(e, f)`, as a slice of two central caps. Each normal is the
/// direction `e` rotated within the plane; `lo_normal`/`hi_normal` override
/// the computed normals where an exact one is known.
fn wedge(
    e: &SpherePoint,
    f: &SpherePoint,
    lo: f64,
    hi: f64,
    lo_normal: Option<&SpherePoint>,
    hi_normal: Option<&SpherePoint>,
) -> Slice {
    let rot = |a: f64| rotate_in_plane(e, e, f, a).expect("orthonormal plane");
    let n1 = lo_normal.cloned().unwrap_or_else(|| rot(lo + FRAC_PI_2));
    if hi - lo >= PI - 1e-14 {
        return Slice::from_cap(Cap::hemisphere(n1));
    }
    let n2 = hi_normal.cloned().unwrap_or_else(|| rot(hi - FRAC_PI_2));
    Slice::new(Cap::hemisphere(n1), Cap::hemisphere(n2)).expect("same dimension")
}

fn finish(slice: Slice, claimed: f64, tag: CaseTag, construction: Construction) -> Certificate {
    let exact = exact_central_measure(&slice).expect("certificate slices are central");
    Certificate {
        slice,
        claimed_measure: claimed,
        exact_measure: exact,
        case_tag: tag,
        construction,
    }
}

/// Splits the wedge `(lo, lo + width)` into `base` equal pieces and returns
/// the first empty one, doubling the piece count if all are blocked.
#[allow(clippy::too_many_arguments)]
fn first_empty_piece(
    points: &[SpherePoint],
    e: &SpherePoint,
    f: &SpherePoint,
    lo: f64,
    width: f64,
    base: usize,
    lo_normal: Option<&SpherePoint>,
    hi_normal: Option<&SpherePoint>,
) -> Option<(Slice, usize, usize, bool)> {
    for r in 0..=MAX_REFINEMENTS {
        let pieces = base << r;
        let step = width / pieces as f64;
        for j in 0..pieces {
            let a = lo + j as f64 * step;
            let b = if j + 1 == pieces { lo + width } else { a + step };
            let s = wedge(
                e,
                f,
                a,
                b,
                if j == 0 { lo_normal } else { None },
                if j + 1 == pieces { hi_normal } else { None },
            );
            if is_empty(&s, points) {
                return Some((s, pieces, j, r > 0));
            }
        }
    }
    None
}

/// Hemisphere bounded by the hyperplane through the first `min(n, d)`
/// points, on the side away from the `(d+1)`-th point if there is one.
pub fn case1_certificate(points: &[SpherePoint], d: usize) -> Result<Certificate> {
    check_points(points, d)?;
    let n = points.len();
    if n > d + 1 {
        return Err(Error::Precondition(format!("case 1 needs n <= d + 1 (n={n}, d={d})")));
    }
    let theta = hyperplane_normal(&points[..n.min(d)], d)?;
    let side: i8 = match points.get(d) {
        Some(last) if theta.dot(last) > 0.0 => -1,
        _ => 1,
    };
    let normal = if side > 0 { theta.clone() } else { neg(&theta) };
    let slice = Slice::from_cap(Cap::hemisphere(normal));
    let construction = Construction {
        theta: theta.coords().to_vec(),
        theta2: None,
        theta_perp: None,
        side,
        gamma: None,
        pieces: 1,
        piece: 0,
        alpha: PI,
        refined: false,
        fallback_from: None,
    };
    Ok(finish(slice, 0.5, CaseTag::Case1Hemisphere, construction))
}

/// An empty lune of the hemisphere (beside the hyperplane through the first
/// `d` points) that holds at most `(n - d) / 2` of the other points.
pub fn case2_certificate(points: &[SpherePoint], d: usize) -> Result<Certificate> {
    check_points(points, d)?;
    let n = points.len();
    if n < d + 1 {
        return Err(Error::Precondition(format!("case 2 needs n >= d + 1 (n={n}, d={d})")));
    }
    case2_inner(points, d, None)
}

fn case2_inner(points: &[SpherePoint], d: usize, fallback_from: Option<CaseTag>) -> Result<Certificate> {
    let n = points.len();
    let theta = hyperplane_normal(&points[..d], d)?;
    let rest = &points[d..];
    let pos = count_inside(&Cap::hemisphere(theta.clone()), rest);
    let negc = count_inside(&Cap::hemisphere(neg(&theta)), rest);
    let side: i8 = if pos <= negc { 1 } else { -1 };
    let e = if side > 0 { theta.clone() } else { neg(&theta) };
    let f = perpendicular(&e);
    let k = (n - d) / 2;
    let (slice, pieces, piece, refined) =
        first_empty_piece(points, &e, &f, -FRAC_PI_2, PI, k + 1, Some(&e), None)
            .ok_or_else(|| Error::Precondition("no empty lune after refinement".into()))?;
    let alpha = PI / pieces as f64;
    let construction = Construction {
        theta: theta.coords().to_vec(),
        theta2: None,
        theta_perp: Some(f.coords().to_vec()),
        side,
        gamma: None,
        pieces,
        piece,
        alpha,
        refined,
        fallback_from,
    };
    Ok(finish(slice, alpha / TAU, CaseTag::Case2Lune, construction))
}

/// The two normals shared by cases 3 and 4, with `<theta1, theta2> >= 0`.
/// When fewer than `d` points follow the first `d`, `theta1` joins the rows
/// for `theta2`, which makes the two normals orthogonal.
fn two_normals(points: &[SpherePoint], d: usize) -> Result<(SpherePoint, SpherePoint)> {
    let n = points.len();
    let theta1 = hyperplane_normal(&points[..d], d)?;
    let hi = n.min(2 * d);
    let mut rows: Vec<&[f64]> = points[d..hi].iter().map(|p| p.coords()).collect();
    if hi - d < d {
        rows.push(theta1.coords());
    }
    let mut theta2 = normal_of_rows(rows, d)?;
    if theta1.dot(&theta2) < 0.0 {
        theta2 = neg(&theta2);
    }
    Ok((theta1, theta2))
}

/// A quadrant of measure at least 1/4 avoiding the (at most one) point
/// beyond the `2d` that fix the two hyperplanes.
pub fn case3_certificate(points: &[SpherePoint], d: usize) -> Result<Certificate> {
    check_points(points, d)?;
    let n = points.len();
    if !(d + 1 < n && n <= 2 * d + 1) {
        return Err(Error::Precondition(format!(
            "case 3 needs d + 1 < n <= 2d + 1 (n={n}, d={d})"
        )));
    }
    let (t1, t2) = two_normals(points, d)?;
    let rho = t1.dot(&t2);
    let gamma = rho.clamp(-1.0, 1.0).acos();
    // (+,+) and (-,-) are the two disjoint quadrants of measure (pi - gamma)/(2 pi)
    let candidates = [
        (1i8, Slice::new(Cap::hemisphere(t1.clone()), Cap::hemisphere(t2.clone()))?),
        (-1i8, Slice::new(Cap::hemisphere(neg(&t1)), Cap::hemisphere(neg(&t2)))?),
    ];
    let (side, slice) = candidates
        .into_iter()
        .find(|(_, s)| is_empty(s, points))
        .ok_or_else(|| Error::Precondition("both large quadrants blocked".into()))?;
    let construction = Construction {
        theta: t1.coords().to_vec(),
        theta2: Some(t2.coords().to_vec()),
        theta_perp: None,
        side,
        gamma: Some(gamma),
        pieces: 1,
        piece: 0,
        alpha: PI - gamma,
        refined: false,
        fallback_from: None,
    };
    Ok(finish(slice, (PI - gamma) / TAU, CaseTag::Case3Quadrant, construction))
}

/// An empty sub-wedge of the large quadrant holding at most
/// `(n - 2d) / 2` of the points beyond the first `2d`. Coplanar inputs
/// (parallel normals) fall back to case 2 on the full set.
pub fn case4_certificate(points: &[SpherePoint], d: usize) -> Result<Certificate> {
    check_points(points, d)?;
    let n = points.len();
    if n <= 2 * d {
        return Err(Error::Precondition(format!("case 4 needs n > 2d (n={n}, d={d})")));
    }
    let (t1, t2) = two_normals(points, d)?;
    let rho = t1.dot(&t2);
    if rho >= PARALLEL_DOT {
        return case2_inner(points, d, Some(CaseTag::Case4QuadrantLune));
    }
    let gamma = rho.clamp(-1.0, 1.0).acos();
    let e = t1.clone();
    let mut fv = t2.coords().to_vec();
    linalg::axpy(-rho, e.coords(), &mut fv);
    let f = unit(fv);

    let rest = &points[2 * d..];
    let pp = Slice::new(Cap::hemisphere(t1.clone()), Cap::hemisphere(t2.clone()))?;
    let mm = Slice::new(Cap::hemisphere(neg(&t1)), Cap::hemisphere(neg(&t2)))?;
    let in_pp = rest.iter().filter(|p| pp.contains(p, CERT_TOL).unwrap()).count();
    let in_mm = rest.iter().filter(|p| mm.contains(p, CERT_TOL).unwrap()).count();
    let k = (n - 2 * d) / 2;
    let width = PI - gamma;
    // (+,+) spans angles (gamma - pi/2, pi/2) in the (e, f) plane, (-,-)
    // spans (gamma + pi/2, 3 pi/2); the outer normals are exactly +-theta.
    let (side, lo, lo_n, hi_n) = if in_pp <= in_mm {
        (1i8, gamma - FRAC_PI_2, t2.clone(), t1.clone())
    } else {
        (-1i8, gamma + FRAC_PI_2, neg(&t2), neg(&t1))
    };
    let (slice, pieces, piece, refined) =
        first_empty_piece(points, &e, &f, lo, width, k + 1, Some(&lo_n), Some(&hi_n))
            .ok_or_else(|| Error::Precondition("no empty sub-wedge after refinement".into()))?;
    let alpha = width / pieces as f64;
    let construction = Construction {
        theta: t1.coords().to_vec(),
        theta2: Some(t2.coords().to_vec()),
        theta_perp: Some(f.coords().to_vec()),
        side,
        gamma: Some(gamma),
        pieces,
        piece,
        alpha,
        refined,
        fallback_from: None,
    };
    Ok(finish(slice, alpha / TAU, CaseTag::Case4QuadrantLune, construction))
}

/// Runs every applicable case and keeps the largest exact measure (ties go
/// to the lower case number).
pub fn best_certificate(points: &[SpherePoint], d: usize) -> Result<Certificate> {
    check_points(points, d)?;
    let n = points.len();
    let mut best: Option<Certificate> = None;
    let mut consider = |c: Certificate| {
        if best.as_ref().map_or(true, |b| c.exact_measure > b.exact_measure) {
            best = Some(c);
        }
    };
    if n <= d + 1 {
        consider(case1_certificate(points, d)?);
    }
    if n >= d + 1 {
        consider(case2_certificate(points, d)?);
    }
    if d + 1 < n && n <= 2 * d + 1 {
        consider(case3_certificate(points, d)?);
    }
    if n > 2 * d {
        consider(case4_certificate(points, d)?);
    }
    Ok(best.expect("at least one case applies to every n"))
}

/// Outcome of [`verify_certificate`]; never an error so batches aggregate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// No input point lies strictly inside the slice by more than `tol`.
    pub empty: bool,
    /// Indices of points found inside.
    pub offending: Vec<usize>,
    /// Independent recomputation agrees with `exact_measure` to 1e-10 and
    /// `exact_measure >= claimed_measure - 1e-12`.
    pub measure_ok: bool,
    pub recomputed_measure: Option<f64>,
    /// `exact_measure` reaches the bound this case is responsible for: the
    /// lower bound on minimal dispersion when the case's branch is the one
    /// attaining it, otherwise the case's own guarantee.
    pub bound_ok: bool,
    pub bound_target: f64,
    /// Lower bound on minimal dispersion for this `(n, d)`.
    pub theorem_bound: f64,
    /// `exact_measure >= theorem_bound - 1e-12`.
    pub meets_theorem: bool,
    pub passed: bool,
    pub messages: Vec<String>,
}

/// Re-checks a certificate against `points` without trusting any of its
/// stored numbers.
pub fn verify_certificate(c: &Certificate, points: &[SpherePoint], tol: f64) -> VerificationReport {
    let d = c.slice.dim();
    let n = points.len();
    let mut messages = Vec::new();

    let mut offending = Vec::new();
    for (i, p) in points.iter().enumerate() {
        match c.slice.contains(p, tol) {
            Ok(true) => offending.push(i),
            Ok(false) => {}
            Err(e) => {
                messages.push(format!("point {i}: {e}"));
                offending.push(i);
            }
        }
    }
    let empty = offending.is_empty();
    if !empty {
        messages.push(format!("{} point(s) inside the slice", offending.len()));
    }

    let recomputed = independent_measure(&c.slice);
    let measure_ok = match recomputed {
        Some(m) => {
            let agree = (m - c.exact_measure).abs() <= 1e-10;
            let covers = c.exact_measure >= c.claimed_measure - 1e-12;
            if !agree {
                messages.push(format!("stored measure {} but recomputed {m}", c.exact_measure));
            }
            if !covers {
                messages.push(format!(
                    "exact measure {} below claimed {}",
                    c.exact_measure, c.claimed_measure
                ));
            }
            agree && covers
        }
        None => {
            messages.push("slice is not central".into());
            false
        }
    };

    let thm = thm_a_lower(n as u64, d as u64);
    let theorem_bound = if thm.valid { thm.value } else { 0.0 };
    let bound_target = if thm.valid && thm.branch == c.case_tag.branch().name() {
        theorem_bound
    } else if n >= 1 {
        c.case_tag.guaranteed(n, d)
    } else {
        0.5
    };
    let value = recomputed.unwrap_or(f64::NAN);
    let bound_ok = value >= bound_target - 1e-12;
    if !bound_ok {
        messages.push(format!("measure {value} below bound {bound_target}"));
    }
    let meets_theorem = value >= theorem_bound - 1e-12;

    VerificationReport {
        empty,
        offending,
        measure_ok,
        recomputed_measure: recomputed,
        bound_ok,
        bound_target,
        theorem_bound,
        meets_theorem,
        passed: empty && measure_ok && bound_ok,
        messages,
    }
}

/// Measure of a central slice straight from the angle between its normals,
/// written out here rather than shared with the constructions.
fn independent_measure(s: &Slice) -> Option<f64> {
    let full = |c: &Cap| c.threshold == -1.0;
    let half = |c: &Cap| c.threshold == 0.0;
    let (a, b) = (&s.cap_a, &s.cap_b);
    if !(full(a) || half(a)) || !(full(b) || half(b)) {
        return None;
    }
    Some(match (full(a), full(b)) {
        (true, true) => 1.0,
        (true, false) | (false, true) => 0.5,
        (false, false) => {
            let c = a.center.dot(&b.center).clamp(-1.0, 1.0);
            0.5 - c.acos() / TAU
        }
    })
}
