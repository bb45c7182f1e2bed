//! Brute-force grid oracle for `d <= 2`.
//!
//! The oracle maximizes over a finite grid of cap parameters, so its best
//! value is attained by a genuine empty set (a lower bound), and adding a
//! resolution error gives an upper bound on the supremum over the family.
//!
//! Grids and error bounds, with `m` the resolution:
//!
//! * `d = 1`: centers at angles `2 pi k / m`; half-widths `pi j / (m - 1)`,
//!   `j = 0..m`. Moving a cap center by at most `pi / m` and rounding its
//!   half-width down costs at most `1/m + 1/(m - 1)` of measure per cap.
//!   Half-widths are used instead of equispaced thresholds because the arc
//!   length `acos(t)` has unbounded slope at `t = ±1`.
//! * `d = 2`: centers on the `m^2`-point Fibonacci grid with covering
//!   radius `delta`; thresholds `-1 + 2j / (m - 1)`. The cap measure is
//!   `(1 - t)/2`, whose slope is `1/2` in `t` and at most `1/2` per radian
//!   of radius, so each cap costs at most `delta / 2 + 1/(m - 1)`.
//!
//! A slice involves two caps and the error doubles. The shrunk cap around
//! the nearest grid center lies inside the optimal one, so the grid
//! candidate is empty whenever the optimum is.

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::arc::{gaps, sorted_angles};
use super::fibonacci::{covering_radius, fibonacci_sphere};
use super::{assert_empty, check_set, DispersionResult};
use crate::error::{Error, Result};
use crate::linalg;
use crate::measure::{arc_slice_measure, slice_measure_auto};
use crate::sphere::{Cap, Slice, SpherePoint};

/// Which test-set family the oracle maximizes over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleFamily {
    Caps,
    Slices,
}

/// Largest resolution accepted for the `d = 2` slice scan (O(m^5) work).
pub const MAX_SLICE_RESOLUTION_D2: usize = 40;

/// Resolution error of the oracle (see the module docs).
pub fn oracle_error(d: usize, m: usize, family: OracleFamily) -> Result<f64> {
    if m < 3 {
        return Err(Error::OutOfRange {
            what: "resolution",
            value: m as f64,
        });
    }
    let per_cap = match d {
        1 => 1.0 / m as f64 + 1.0 / (m - 1) as f64,
        2 => covering_radius(m * m) / 2.0 + 1.0 / (m - 1) as f64,
        _ => return Err(Error::Precondition(format!("grid oracle needs d <= 2, got {d}"))),
    };
    let caps = match family {
        OracleFamily::Caps => 1.0,
        OracleFamily::Slices => 2.0,
    };
    // room for rounding in the measure evaluations
    Ok(caps * per_cap + 1e-10)
}

/// Scans the parameter grid and returns the best empty grid set together
/// with `upper_value = best + oracle_error`.
pub fn dispersion_grid_oracle(
    points: &[SpherePoint],
    d: usize,
    resolution: usize,
    family: OracleFamily,
) -> Result<DispersionResult> {
    check_set(points, d)?;
    let err = oracle_error(d, resolution, family)?;
    if err > 0.5 {
        return Err(Error::ResolutionTooCoarse {
            resolution,
            error: err,
        });
    }
    if d == 2 && family == OracleFamily::Slices && resolution > MAX_SLICE_RESOLUTION_D2 {
        return Err(Error::BudgetExceeded {
            cost: (resolution as f64).powi(5),
            budget: (MAX_SLICE_RESOLUTION_D2 as f64).powi(5),
        });
    }
    let start = Instant::now();
    let (witness, value) = match (d, family) {
        (1, OracleFamily::Caps) => arcs_caps(points, resolution),
        (1, OracleFamily::Slices) => arcs_slices(points, resolution),
        (2, OracleFamily::Caps) => sphere_caps(points, resolution),
        _ => sphere_slices(points, resolution),
    };
    assert_empty(&witness, points);
    let name = match family {
        OracleFamily::Caps => "grid_oracle_caps",
        OracleFamily::Slices => "grid_oracle_slices",
    };
    let mut r = DispersionResult::new(witness, value, name);
    r.upper_value = Some((value + err).min(1.0));
    r.oracle_error = Some(err);
    r.elapsed_secs = start.elapsed().as_secs_f64();
    Ok(r)
}

fn angular_distance(a: f64, b: f64) -> f64 {
    let x = (a - b).rem_euclid(TAU);
    x.min(TAU - x)
}

/// Largest grid index `j` with `j * h <= x`.
fn floor_steps(x: f64, h: f64) -> usize {
    let mut j = (x / h).floor().max(0.0) as usize;
    while j > 0 && j as f64 * h > x {
        j -= 1;
    }
    j
}

/// Smallest grid index `j` with `j * h >= x`.
fn ceil_steps(x: f64, h: f64) -> usize {
    let mut j = (x / h).ceil().max(0.0) as usize;
    while (j as f64) * h < x {
        j += 1;
    }
    j
}

fn arcs_caps(points: &[SpherePoint], m: usize) -> (Slice, f64) {
    let h = PI / (m - 1) as f64;
    let angles: Vec<f64> = points.iter().map(|p| p.coords()[1].atan2(p.coords()[0])).collect();
    let mut best = (0usize, 0usize);
    for k in 0..m {
        let c = TAU * k as f64 / m as f64;
        let near = angles
            .iter()
            .map(|&a| angular_distance(a, c))
            .fold(PI, f64::min);
        let j = floor_steps(near, h).min(m - 1);
        if j > best.1 {
            best = (k, j);
        }
    }
    let (k, j) = best;
    let omega = j as f64 * h;
    let cap = Cap {
        center: SpherePoint::from_angle(TAU * k as f64 / m as f64),
        threshold: if j == m - 1 { -1.0 } else { omega.cos() },
    };
    (Slice::from_cap(cap), j as f64 / (m - 1) as f64)
}

/// Smallest grid arc complementary to a grid cap that covers the closed
/// run `[a, b]` (`b >= a`, unwrapped). Returns the cap `A` whose complement
/// is that arc.
fn covering_cap(a: f64, b: f64, m: usize) -> Cap {
    let h = PI / (m - 1) as f64;
    let step = TAU / m as f64;
    let mid = 0.5 * (a + b);
    let k0 = ((mid - PI) / step).round() as i64;
    let mut best: Option<(usize, f64)> = None;
    for k in (k0 - 1)..=(k0 + 1) {
        let c = PI + k as f64 * step;
        let need = (b - c).max(c - a).max(0.0);
        let i = ceil_steps(need, h);
        if i < m && best.map_or(true, |(bi, _)| i < bi) {
            best = Some((i, c));
        }
    }
    match best {
        Some((i, c)) => {
            // complement half-width rho = i h, so the cap half-width is pi - rho
            let j = m - 1 - i;
            let threshold = if j == m - 1 {
                -1.0
            } else if j == 0 {
                1.0
            } else {
                (j as f64 * h).cos()
            };
            Cap {
                center: SpherePoint::from_angle(c - PI),
                threshold,
            }
        }
        None => Cap {
            center: SpherePoint::from_angle(0.0),
            threshold: 1.0,
        },
    }
}

fn arcs_slices(points: &[SpherePoint], m: usize) -> (Slice, f64) {
    let n = points.len();
    if n == 0 {
        return (Slice::full(1), 1.0);
    }
    let a = sorted_angles(points);
    let g = gaps(&a);
    let at = |k: usize| a[k % n] + TAU * (k / n) as f64;

    let eval = |s: &Slice| arc_slice_measure(s);
    let mut best_val = f64::NEG_INFINITY;
    let mut best_slice = Slice::full(1);

    // one complement arc covering everything, cut at each gap
    for i in 0..n {
        let cap = covering_cap(at(i + 1), at(i + n), m);
        let s = Slice::from_cap(cap);
        let v = eval(&s);
        if v > best_val {
            best_val = v;
            best_slice = s;
        }
    }
    if n >= 2 {
        // two runs cut at gaps i < j; branch and bound on g_i + g_j
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&x, &y| g[y].partial_cmp(&g[x]).unwrap().then(x.cmp(&y)));
        'outer: for p in 0..n {
            for q in (p + 1)..n {
                let bound = (g[order[p]] + g[order[q]]) / TAU;
                if bound <= best_val {
                    if q == p + 1 {
                        break 'outer;
                    }
                    break;
                }
                let (i, j) = (order[p].min(order[q]), order[p].max(order[q]));
                let cap_a = covering_cap(at(i + 1), at(j), m);
                let cap_b = covering_cap(at(j + 1), at(i + n), m);
                let s = Slice { cap_a, cap_b };
                let v = eval(&s);
                if v > best_val {
                    best_val = v;
                    best_slice = s;
                }
            }
        }
    }
    (best_slice, best_val.max(0.0))
}

/// Threshold grid value `j` on S^2 (endpoints exact).
fn grid_t(j: usize, m: usize) -> f64 {
    if j == m - 1 {
        1.0
    } else {
        -1.0 + j as f64 * 2.0 / (m - 1) as f64
    }
}

/// Smallest threshold grid index whose value is at least `u`.
fn grid_threshold(u: f64, m: usize) -> usize {
    let j = ceil_steps(u + 1.0, 2.0 / (m - 1) as f64).min(m - 1);
    // the float grid value must dominate u for the cap to be empty
    if grid_t(j, m) < u {
        (j + 1).min(m - 1)
    } else {
        j
    }
}

fn sphere_caps(points: &[SpherePoint], m: usize) -> (Slice, f64) {
    let grid = fibonacci_sphere(m * m);
    let best = grid
        .par_iter()
        .enumerate()
        .map(|(k, x)| {
            let u = points
                .iter()
                .map(|p| linalg::dot(x, p.coords()))
                .fold(-1.0, f64::max);
            (grid_threshold(u, m), k)
        })
        .reduce(|| (usize::MAX, usize::MAX), |a, b| a.min(b));
    let (j, k) = best;
    let t = grid_t(j, m);
    let center = SpherePoint::new(&grid[k]).expect("grid points are unit");
    (Slice::from_cap(Cap { center, threshold: t }), (1.0 - t) / 2.0)
}

fn sphere_slices(points: &[SpherePoint], m: usize) -> (Slice, f64) {
    let grid = fibonacci_sphere(m * m);
    let centers: Vec<SpherePoint> = grid
        .iter()
        .map(|x| SpherePoint::new(x).expect("grid points are unit"))
        .collect();
    let dots: Vec<Vec<f64>> = centers
        .iter()
        .map(|x| points.iter().map(|p| x.dot(p)).collect())
        .collect();
    let tval = |j: usize| grid_t(j, m);
    let nc = centers.len();

    let per_a = |a: usize| -> (f64, usize, usize, usize, usize) {
        let ua = &dots[a];
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&x, &y| ua[y].partial_cmp(&ua[x]).unwrap());
        let mut best = (f64::NEG_INFINITY, a, 0, a, 0);
        for b in a..nc {
            let vb = &dots[b];
            // prefix maxima of v over points sorted by decreasing u
            let mut ptr = 0usize;
            let mut vmax = f64::NEG_INFINITY;
            for jt in (0..m).rev() {
                let t = tval(jt);
                while ptr < order.len() && ua[order[ptr]] > t {
                    vmax = vmax.max(vb[order[ptr]]);
                    ptr += 1;
                }
                let js = if vmax == f64::NEG_INFINITY { 0 } else { grid_threshold(vmax, m) };
                let s = tval(js);
                let bound = (1.0 - t.max(s)) / 2.0;
                if bound <= best.0 {
                    continue;
                }
                let sl = Slice {
                    cap_a: Cap { center: centers[a].clone(), threshold: t },
                    cap_b: Cap { center: centers[b].clone(), threshold: s },
                };
                let v = slice_measure_auto(&sl).value;
                if v > best.0 {
                    best = (v, a, jt, b, js);
                }
            }
        }
        best
    };
    let best = (0..nc)
        .into_par_iter()
        .map(per_a)
        .reduce(
            || (f64::NEG_INFINITY, usize::MAX, 0, usize::MAX, 0),
            |x, y| {
                if y.0 > x.0 || (y.0 == x.0 && (y.1, y.3) < (x.1, x.3)) {
                    y
                } else {
                    x
                }
            },
        );
    let (v, a, jt, b, js) = best;
    let s = tval(js);
    let sl = Slice {
        cap_a: Cap { center: centers[a].clone(), threshold: tval(jt) },
        cap_b: Cap { center: centers[b].clone(), threshold: s },
    };
    (sl, v.max(0.0))
}

/// Adds `q` to `points` and checks that the oracle value does not grow
/// beyond twice the resolution error. Uses the slice family on S^1 and the
/// cap family on S^2 (the slice scan on S^2 is too slow for sweeps).
pub fn check_monotonicity(
    points: &[SpherePoint],
    q: &SpherePoint,
    d: usize,
    resolution: usize,
) -> Result<bool> {
    let family = if d == 1 { OracleFamily::Slices } else { OracleFamily::Caps };
    check_monotonicity_with(points, q, d, resolution, family)
}

pub fn check_monotonicity_with(
    points: &[SpherePoint],
    q: &SpherePoint,
    d: usize,
    resolution: usize,
    family: OracleFamily,
) -> Result<bool> {
    let before = dispersion_grid_oracle(points, d, resolution, family)?;
    let mut more = points.to_vec();
    more.push(q.clone());
    let after = dispersion_grid_oracle(&more, d, resolution, family)?;
    let err = before.oracle_error.unwrap_or(0.0);
    Ok(before.lower_value >= after.lower_value - 2.0 * err)
}
