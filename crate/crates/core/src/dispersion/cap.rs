//! Exact largest empty cap in any dimension.
//!
//! The best center minimizes `t(x) = max_j <x, p_j>` over the sphere. At a
//! minimizer the active points `S` (those attaining the max) satisfy a KKT
//! condition that puts `x` in their span, and by Carathéodory at most
//! `d + 1` of them are needed. With `G` the Gram matrix of `S` and
//! `w = G^{-1} 1`, the unit vectors equidistant from `S` inside its span are
//! `±(sum_i w_i p_i) / sqrt(1^T w)`. Enumerating all subsets of size
//! `1..=d+1` and both signs therefore visits the minimizer. When the
//! optimum has `t = 0` with rank-deficient active points, the center lies
//! in their orthogonal complement; one deterministic complement vector per
//! subset of size `<= d` covers that case.

use std::time::Instant;

use itertools::Itertools;

use super::{assert_empty, check_set, DispersionResult};
use crate::error::{Error, Result};
use crate::linalg;
use crate::measure::cap_measure;
use crate::sphere::{Cap, Slice, SpherePoint};

/// Default cap on the number of subsets examined.
pub const DEFAULT_SUBSET_BUDGET: u64 = 5_000_000;

/// Number of subsets of size `1..=d+1` of `n` points (saturating).
pub fn cap_subset_count(n: usize, d: usize) -> u64 {
    let mut total: u64 = 0;
    let mut c: u128 = 1;
    for k in 1..=(d + 1).min(n) {
        c = c * (n - k + 1) as u128 / k as u128;
        total = total.saturating_add(c.min(u64::MAX as u128) as u64);
    }
    total
}

/// See [`largest_empty_cap_with_budget`]; uses [`DEFAULT_SUBSET_BUDGET`].
pub fn largest_empty_cap_exact(points: &[SpherePoint], d: usize) -> Result<DispersionResult> {
    largest_empty_cap_with_budget(points, d, DEFAULT_SUBSET_BUDGET)
}

/// Largest empty cap by subset enumeration. Fails with `BudgetExceeded` if
/// more than `budget` subsets would be needed.
pub fn largest_empty_cap_with_budget(
    points: &[SpherePoint],
    d: usize,
    budget: u64,
) -> Result<DispersionResult> {
    check_set(points, d)?;
    let start = Instant::now();
    let n = points.len();
    if n == 0 {
        let mut r = DispersionResult::new(Slice::full(d), 1.0, "exact_cap");
        r.upper_value = Some(1.0);
        return Ok(r);
    }
    let cost = cap_subset_count(n, d);
    if cost > budget {
        return Err(Error::BudgetExceeded {
            cost: cost as f64,
            budget: budget as f64,
        });
    }

    let max_dot = |x: &[f64]| {
        points
            .iter()
            .map(|p| linalg::dot(x, p.coords()))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let mut best_t = f64::INFINITY;
    let mut best_x: Vec<f64> = Vec::new();
    let mut skipped = 0usize;
    let consider = |x: Vec<f64>, best_t: &mut f64, best_x: &mut Vec<f64>| {
        for sign in [1.0, -1.0] {
            let y = linalg::scaled(&x, sign);
            let t = max_dot(&y);
            if t < *best_t {
                *best_t = t;
                *best_x = y;
            }
        }
    };

    for k in 1..=(d + 1).min(n) {
        for subset in (0..n).combinations(k) {
            let mut g = vec![0.0; k * k];
            for (a, &i) in subset.iter().enumerate() {
                for (b, &j) in subset.iter().enumerate() {
                    g[a * k + b] = points[i].dot(&points[j]);
                }
            }
            match linalg::solve(&g, &vec![1.0; k], k, 1e-12) {
                Some(w) => {
                    let mut x = vec![0.0; d + 1];
                    for (wi, &i) in w.iter().zip(&subset) {
                        linalg::axpy(*wi, points[i].coords(), &mut x);
                    }
                    let nx = linalg::norm(&x);
                    if nx > 1e-12 {
                        consider(linalg::scaled(&x, 1.0 / nx), &mut best_t, &mut best_x);
                    } else {
                        skipped += 1;
                    }
                }
                None => skipped += 1,
            }
            if k <= d {
                let rows: Vec<&[f64]> = subset.iter().map(|&i| points[i].coords()).collect();
                if let Some(v) = linalg::complement_vector(&rows, d + 1) {
                    consider(v, &mut best_t, &mut best_x);
                }
            }
        }
    }

    let t = best_t.clamp(-1.0, 1.0);
    let center = SpherePoint::new(&best_x)?;
    let witness = Slice::from_cap(Cap::new(center, t)?);
    assert_empty(&witness, points);
    let value = cap_measure(d, t)?;
    let mut r = DispersionResult::new(witness, value, "exact_cap");
    r.upper_value = Some(value);
    r.degenerate_skipped = skipped;
    r.elapsed_secs = start.elapsed().as_secs_f64();
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(v: &[f64]) -> SpherePoint {
        SpherePoint::new(v).unwrap()
    }

    fn octahedron() -> Vec<SpherePoint> {
        let mut ps = Vec::new();
        for i in 0..3 {
            for s in [1.0, -1.0] {
                let mut v = [0.0; 3];
                v[i] = s;
                ps.push(pt(&v));
            }
        }
        ps
    }

    #[test]
    fn octahedron_value() {
        let r = largest_empty_cap_exact(&octahedron(), 2).unwrap();
        let want = (1.0 - 1.0 / 3f64.sqrt()) / 2.0;
        assert!((r.lower_value - want).abs() < 1e-12, "{}", r.lower_value);
        let c = r.lower_witness.cap_a.center.coords().to_vec();
        for x in c {
            assert!((x.abs() - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn antipodal_pair_on_circle() {
        let r = largest_empty_cap_exact(&[pt(&[1.0, 0.0]), pt(&[-1.0, 0.0])], 1).unwrap();
        assert!((r.lower_value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_point_gives_full_sphere() {
        let r = largest_empty_cap_exact(&[pt(&[0.0, 0.0, 1.0])], 2).unwrap();
        assert!((r.lower_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn budget_guard() {
        assert_eq!(cap_subset_count(5, 1), 15);
        assert_eq!(cap_subset_count(3, 5), 7);
        let ps = octahedron();
        assert!(matches!(
            largest_empty_cap_with_budget(&ps, 2, 10),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
