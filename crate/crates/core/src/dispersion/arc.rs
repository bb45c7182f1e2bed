//! Exact results on the circle S^1.

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use super::{assert_empty, check_set, DispersionResult};
use crate::error::Result;
use crate::sphere::{Cap, Slice, SpherePoint};

/// Angles of the points, sorted ascending in `[-pi, pi]`.
pub(crate) fn sorted_angles(points: &[SpherePoint]) -> Vec<f64> {
    let mut a: Vec<f64> = points
        .iter()
        .map(|p| p.coords()[1].atan2(p.coords()[0]))
        .collect();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    a
}

/// Gap `i` runs counter-clockwise from `angles[i]` to `angles[i + 1]`
/// (wrapping around for the last one).
pub(crate) fn gaps(angles: &[f64]) -> Vec<f64> {
    let n = angles.len();
    (0..n)
        .map(|i| {
            if i + 1 < n {
                angles[i + 1] - angles[i]
            } else {
                angles[0] + TAU - angles[i]
            }
        })
        .collect()
}

/// Open arc from angle `from` counter-clockwise over `len`, as a cap.
pub(crate) fn arc_cap(from: f64, len: f64) -> Cap {
    let half = (len / 2.0).clamp(0.0, PI);
    Cap {
        center: SpherePoint::from_angle(from + half),
        threshold: half.cos().clamp(-1.0, 1.0),
    }
}

/// Largest empty cap (arc) on S^1: the widest angular gap.
pub fn largest_empty_arc(points: &[SpherePoint]) -> Result<DispersionResult> {
    check_set(points, 1)?;
    let start = Instant::now();
    let mut res = match points.len() {
        0 => DispersionResult::new(Slice::full(1), 1.0, "exact_arc"),
        1 => {
            let cap = Cap::full(points[0].antipode());
            DispersionResult::new(Slice::from_cap(cap), 1.0, "exact_arc")
        }
        _ => {
            let a = sorted_angles(points);
            let g = gaps(&a);
            let (i, len) = g
                .iter()
                .copied()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b });
            let w = Slice::from_cap(arc_cap(a[i], len));
            DispersionResult::new(w, len / TAU, "exact_arc")
        }
    };
    assert_empty(&res.lower_witness, points);
    res.elapsed_secs = start.elapsed().as_secs_f64();
    Ok(res)
}

/// Exact slice dispersion on S^1.
///
/// The complement of a slice `A ∩ B` is the union of the two closed arcs
/// complementary to `A` and `B`. An empty slice therefore corresponds to
/// covering the points with two closed arcs, and the best cover leaves
/// open exactly the two largest gaps. For `n >= 2` the dispersion is
/// `(g1 + g2) / (2 pi)`; for `n <= 1` it is 1.
pub fn exact_slice_dispersion_s1(points: &[SpherePoint]) -> Result<DispersionResult> {
    check_set(points, 1)?;
    if points.len() <= 1 {
        let mut r = largest_empty_arc(points)?;
        r.method = "exact_slice_s1".into();
        r.upper_value = Some(1.0);
        return Ok(r);
    }
    let start = Instant::now();
    let a = sorted_angles(points);
    let g = gaps(&a);
    let n = a.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| g[y].partial_cmp(&g[x]).unwrap().then(x.cmp(&y)));
    let (i, j) = {
        let (p, q) = (order[0], order[1]);
        (p.min(q), p.max(q))
    };
    // A leaves open gap i, the run of points after it, and gap j;
    // B leaves open gap j, the run after it, and gap i.
    let at = |k: usize| if k < n { a[k] } else { a[k - n] + TAU };
    let cap_a = arc_cap(a[i], at(j + 1) - a[i]);
    let cap_b = arc_cap(a[j], at(i + 1 + n) - a[j]);
    let witness = Slice { cap_a, cap_b };
    assert_empty(&witness, points);
    let value = ((g[i] + g[j]) / TAU).min(1.0);
    let mut r = DispersionResult::new(witness, value, "exact_slice_s1");
    r.upper_value = Some(value);
    r.elapsed_secs = start.elapsed().as_secs_f64();
    Ok(r)
}
