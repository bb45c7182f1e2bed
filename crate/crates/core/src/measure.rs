//! Normalized surface measure of caps and slices.
//!
//! * Caps: `d = 1` by arc length, `d >= 2` through the incomplete-beta
//!   identity `pi_d(C(x, t)) = I_{1-t^2}(d/2, 1/2) / 2` for `t >= 0`
//!   (reflected for `t < 0`).
//! * Central slices: a wedge of dihedral angle `a` has measure `a / (2 pi)`.
//! * General slices: the pair `(<x, Z>, <y, Z>)` for uniform `Z` lives on a
//!   disk with density proportional to `(1 - |w|^2)^((d-3)/2)`. In polar
//!   coordinates both constraints cut each ray in an interval, and the
//!   radial integral is closed-form, which leaves a smooth 1-D integral over
//!   the polar angle. This avoids the boundary singularity at `d = 2`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, uniform_point};
use crate::special::{beta_reg_with, ln_beta_half};
use crate::sphere::{Slice, SpherePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureMethod {
    ExactCap,
    ExactCentral,
    /// Arc-length intersection on S^1.
    ExactArc,
    /// Closed-form lens area on S^2.
    ExactLens,
    Numint,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureEstimate {
    pub value: f64,
    pub std_error: f64,
    pub method: MeasureMethod,
}

impl MeasureEstimate {
    fn exact(value: f64, method: MeasureMethod) -> Self {
        Self {
            value: value.clamp(0.0, 1.0),
            std_error: 0.0,
            method,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SliceMeasureMode {
    Numint,
    MonteCarlo,
}

pub const MIN_MC_BUDGET: usize = 1000;

/// `pi_d(C(x, t))`.
pub fn cap_measure(d: usize, t: f64) -> Result<f64> {
    if d < 1 {
        return Err(Error::OutOfRange {
            what: "sphere dimension",
            value: d as f64,
        });
    }
    if !(-1.0..=1.0).contains(&t) {
        return Err(Error::OutOfRange {
            what: "cap threshold",
            value: t,
        });
    }
    Ok(cap_measure_unchecked(d, t))
}

pub(crate) fn cap_measure_unchecked(d: usize, t: f64) -> f64 {
    if t >= 1.0 {
        return 0.0;
    }
    if t <= -1.0 {
        return 1.0;
    }
    if d == 1 {
        return t.acos() / PI;
    }
    let a = d as f64 / 2.0;
    let x = (1.0 - t) * (1.0 + t);
    let y = t * t;
    let half = 0.5 * beta_reg_with(a, 0.5, x, y, ln_beta_half(d as u32));
    if t >= 0.0 {
        half
    } else {
        1.0 - half
    }
}

/// Measure of `{y : <theta1, y> > 0, <theta2, y> > 0}`, i.e. `(pi - g) / (2 pi)`
/// with `g` the angle between the normals.
pub fn central_slice_measure(theta1: &SpherePoint, theta2: &SpherePoint) -> Result<f64> {
    if theta1.dim() != theta2.dim() {
        return Err(Error::DimensionMismatch {
            expected: theta1.dim(),
            found: theta2.dim(),
        });
    }
    let c = theta1.dot(theta2);
    if c.abs() >= 1.0 - 1e-12 {
        return Err(Error::ParallelNormals { dot: c });
    }
    Ok(wedge_measure_from_dot(c))
}

fn wedge_measure_from_dot(c: f64) -> f64 {
    (PI - c.clamp(-1.0, 1.0).acos()) / TAU
}

/// Exact measure of a slice whose thresholds are all 0 or -1. Parallel and
/// antiparallel normals are handled (1/2 and 0).
pub fn exact_central_measure(s: &Slice) -> Option<f64> {
    if !s.is_central() {
        return None;
    }
    let (a, b) = (&s.cap_a, &s.cap_b);
    Some(match (a.threshold == -1.0, b.threshold == -1.0) {
        (true, true) => 1.0,
        (true, false) | (false, true) => 0.5,
        (false, false) => wedge_measure_from_dot(a.center.dot(&b.center)),
    })
}

/// Exact measure of a slice on S^1 from arc lengths.
pub fn arc_slice_measure(s: &Slice) -> f64 {
    debug_assert_eq!(s.dim(), 1);
    let arc = |c: &crate::sphere::Cap| {
        let x = c.center.coords();
        let mid = x[1].atan2(x[0]);
        let w = c.threshold.clamp(-1.0, 1.0).acos();
        (mid - w, mid + w)
    };
    let (a0, a1) = arc(&s.cap_a);
    let (b0, b1) = arc(&s.cap_b);
    let mut len = 0.0;
    for k in -1..=1 {
        let sh = k as f64 * TAU;
        let lo = a0.max(b0 + sh);
        let hi = a1.min(b1 + sh);
        if hi > lo {
            len += hi - lo;
        }
    }
    (len / TAU).clamp(0.0, 1.0)
}

/// Measure of a slice, choosing an exact route when one exists and falling
/// back to numerical integration otherwise.
pub fn slice_measure_auto(s: &Slice) -> MeasureEstimate {
    if s.dim() == 1 {
        return MeasureEstimate::exact(arc_slice_measure(s), MeasureMethod::ExactArc);
    }
    if let Some(v) = exact_cap_shortcut(s) {
        return MeasureEstimate::exact(v, MeasureMethod::ExactCap);
    }
    if let Some(v) = exact_central_measure(s) {
        return MeasureEstimate::exact(v, MeasureMethod::ExactCentral);
    }
    let rho = s.cap_a.center.dot(&s.cap_b.center);
    if s.dim() == 2 {
        if let Some(v) = lens_measure_s2(rho, s.cap_a.threshold, s.cap_b.threshold) {
            return MeasureEstimate::exact(v, MeasureMethod::ExactLens);
        }
    }
    let (v, e) = numint_slice(
        s.dim(),
        rho,
        s.cap_a.threshold,
        s.cap_b.threshold,
        NUMINT_TOL,
    );
    MeasureEstimate {
        value: v.clamp(0.0, 1.0),
        std_error: e,
        method: MeasureMethod::Numint,
    }
}

/// Cosines closer to ±1 than this make the `acos` terms of the lens formula
/// too ill-conditioned; such slices go to the integrator instead.
const LENS_EDGE: f64 = 1e-9;

/// Intersection of two caps on S^2 with angular radii `a = acos t`,
/// `b = acos s` and center distance `g = acos rho`. When the boundary
/// circles cross, Gauss-Bonnet on the lens gives the area
/// `2 (pi - psi) - 2 phi_a cos a - 2 phi_b cos b`, where `phi_a`, `phi_b`
/// are the half-angles the lens boundary subtends at each center and
/// `psi` the angle between the radii at a crossing point. Otherwise one
/// cap contains the other, they are disjoint, or they cover the sphere.
/// Returns `None` near degenerate configurations.
pub fn lens_measure_s2(rho: f64, t: f64, s: f64) -> Option<f64> {
    let (rho, t, s) = (rho.clamp(-1.0, 1.0), t.clamp(-1.0, 1.0), s.clamp(-1.0, 1.0));
    let (a, b, g) = (t.acos(), s.acos(), rho.acos());
    let cap = |c: f64| (1.0 - c) / 2.0;
    if g >= a + b {
        return Some(0.0);
    }
    if a >= g + b {
        return Some(cap(s));
    }
    if b >= g + a {
        return Some(cap(t));
    }
    if a + b + g >= TAU {
        return Some((cap(t) + cap(s) - 1.0).max(0.0));
    }
    let (sa, sb, sg) = ((1.0 - t * t).sqrt(), (1.0 - s * s).sqrt(), (1.0 - rho * rho).sqrt());
    let cos_phi_a = (s - t * rho) / (sa * sg);
    let cos_phi_b = (t - s * rho) / (sb * sg);
    let cos_psi = (rho - t * s) / (sa * sb);
    let args = [cos_phi_a, cos_phi_b, cos_psi];
    if args.iter().any(|c| !c.is_finite() || c.abs() > 1.0 - LENS_EDGE) {
        return None;
    }
    let (phi_a, phi_b, psi) = (cos_phi_a.acos(), cos_phi_b.acos(), cos_psi.acos());
    Some(((PI - psi - phi_a * t - phi_b * s) / TAU).clamp(0.0, 1.0))
}

/// When one factor is full or empty the slice measure is a cap measure.
fn exact_cap_shortcut(s: &Slice) -> Option<f64> {
    let d = s.dim();
    let (a, b) = (&s.cap_a, &s.cap_b);
    if a.threshold >= 1.0 || b.threshold >= 1.0 {
        return Some(0.0);
    }
    if b.threshold <= -1.0 {
        return Some(cap_measure_unchecked(d, a.threshold));
    }
    if a.threshold <= -1.0 {
        return Some(cap_measure_unchecked(d, b.threshold));
    }
    None
}

/// Slice measure by numerical integration or Monte Carlo.
pub fn slice_measure(
    s: &Slice,
    mode: SliceMeasureMode,
    budget: usize,
    seed: u64,
) -> Result<MeasureEstimate> {
    match mode {
        SliceMeasureMode::Numint => Ok(slice_measure_auto(s)),
        SliceMeasureMode::MonteCarlo => {
            if budget < MIN_MC_BUDGET {
                return Err(Error::BudgetTooSmall {
                    budget,
                    min: MIN_MC_BUDGET,
                });
            }
            let mut rng = rng_from_seed(seed);
            let d = s.dim();
            let mut hits = 0usize;
            for _ in 0..budget {
                let z = uniform_point(d, &mut rng);
                if s.contains(&z, 0.0)? {
                    hits += 1;
                }
            }
            let p = hits as f64 / budget as f64;
            Ok(MeasureEstimate {
                value: p,
                std_error: (p * (1.0 - p) / budget as f64).sqrt(),
                method: MeasureMethod::MonteCarlo,
            })
        }
    }
}

/// Absolute tolerance of the slice integrator.
pub const NUMINT_TOL: f64 = 1e-11;

/// `pi_d(C(x, t) ∩ C(y, s))` where `rho = <x, y>`, for `d >= 2`. Returns
/// `(value, error estimate)`.
pub fn numint_slice(d: usize, rho: f64, t: f64, s: f64, tol: f64) -> (f64, f64) {
    assert!(d >= 2, "numerical slice integration needs d >= 2");
    let rho = rho.clamp(-1.0, 1.0);
    let sigma = (1.0 - rho * rho).max(0.0).sqrt();
    let psi = sigma.atan2(rho);
    let k = (d as f64 - 1.0) / 2.0;
    let weight = |r: f64| -> f64 {
        let q = ((1.0 - r) * (1.0 + r)).max(0.0);
        match d {
            2 => q.sqrt(),
            3 => q,
            _ => q.powf(k),
        }
    };
    let integrand = |phi: f64| -> f64 {
        let (sa, ca) = phi.sin_cos();
        let alpha = ca;
        let beta = rho * ca + sigma * sa;
        let mut lo = 0.0_f64;
        let mut hi = 1.0_f64;
        for (coef, thr) in [(alpha, t), (beta, s)] {
            if coef > 0.0 {
                lo = lo.max(thr / coef);
            } else if coef < 0.0 {
                hi = hi.min(thr / coef);
            } else if thr >= 0.0 {
                return 0.0;
            }
        }
        if lo >= hi {
            return 0.0;
        }
        weight(lo) - weight(hi)
    };

    let mut cuts: Vec<f64> = vec![0.0, TAU];
    let mut push = |a: f64| {
        let w = a.rem_euclid(TAU);
        if w.is_finite() {
            cuts.push(w);
        }
    };
    for (thr, shift) in [(t, 0.0), (s, psi)] {
        if thr.abs() <= 1.0 {
            let a = thr.acos();
            push(shift + a);
            push(shift - a);
        }
        push(shift + PI / 2.0);
        push(shift - PI / 2.0);
    }
    // where the two radial bounds t/alpha and s/beta coincide
    let p = t * rho - s;
    let q = t * sigma;
    if p != 0.0 || q != 0.0 {
        let a = (-p).atan2(q);
        push(a);
        push(a + PI);
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);

    let mut total = 0.0;
    let mut err = 0.0;
    let piece_tol = tol / cuts.len() as f64;
    for w in cuts.windows(2) {
        if w[1] - w[0] <= 0.0 {
            continue;
        }
        let (v, e) = adaptive_gk(&integrand, w[0], w[1], piece_tol, 0);
        total += v;
        err += e;
    }
    (total / TAU, err / TAU)
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const K15_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const G7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = K15_WEIGHTS[7] * fc;
    let mut g = G7_WEIGHTS[3] * fc;
    for i in 0..7 {
        let x = h * GK_NODES[i];
        let s = f(c - x) + f(c + x);
        k += K15_WEIGHTS[i] * s;
        if i % 2 == 1 {
            g += G7_WEIGHTS[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

fn adaptive_gk<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> (f64, f64) {
    let (v, e) = gk15(f, a, b);
    if e <= tol.max(1e-17) || depth >= 40 || (b - a) < 1e-14 {
        return (v, e);
    }
    let m = 0.5 * (a + b);
    let (v1, e1) = adaptive_gk(f, a, m, 0.5 * tol, depth + 1);
    let (v2, e2) = adaptive_gk(f, m, b, 0.5 * tol, depth + 1);
    (v1 + v2, e1 + e2)
}

/// Adaptive Gauss-Kronrod quadrature on `[a, b]`; returns `(value, error)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    adaptive_gk(&f, a, b, tol, 0)
}
