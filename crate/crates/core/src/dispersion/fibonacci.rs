//! Fibonacci grid on S^2 and its covering radius.
//!
//! The grid oracle's error bound needs the covering radius `delta` (the
//! largest angular distance from any sphere point to its nearest grid
//! point). It is attained at a vertex of the spherical Voronoi diagram,
//! i.e. at the circumcenter of three mutually neighbouring grid points, so
//! it is computed by scanning circumcenters of each point with pairs of its
//! nearest neighbours.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use crate::linalg;

/// Neighbours per grid point used when enumerating circumcenters.
const NEIGHBOURS: usize = 16;

/// `count` points `(sqrt(1 - z^2) cos(phi), sqrt(1 - z^2) sin(phi), z)` with
/// `z_i = 1 - (2i + 1) / count` and `phi_i = i * pi (3 - sqrt 5)`.
pub fn fibonacci_sphere(count: usize) -> Vec<[f64; 3]> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / count as f64;
            let r = ((1.0 - z) * (1.0 + z)).max(0.0).sqrt();
            let (s, c) = (golden * i as f64).sin_cos();
            [r * c, r * s, z]
        })
        .collect()
}

fn angle(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    // atan2 form stays accurate for tiny angles
    let cr = cross(a, b);
    linalg::norm(&cr).atan2(linalg::dot(a, b))
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Grid points sorted by `z` (they are generated that way), allowing range
/// queries by latitude band.
pub struct FibonacciGrid {
    pub points: Vec<[f64; 3]>,
}

impl FibonacciGrid {
    pub fn new(count: usize) -> Self {
        assert!(count >= 4, "Fibonacci grid needs at least 4 points");
        Self {
            points: fibonacci_sphere(count),
        }
    }

    /// Indices whose `z` lies within `w` of `z0`.
    fn band(&self, z0: f64, w: f64) -> std::ops::RangeInclusive<usize> {
        let n = self.points.len() as f64;
        let idx = |z: f64| ((1.0 - z) * n / 2.0 - 0.5).clamp(0.0, n - 1.0);
        let lo = idx(z0 + w).floor() as usize;
        let hi = idx(z0 - w).ceil() as usize;
        lo..=hi
    }

    fn initial_radius(&self) -> f64 {
        2.0 * (4.0 * PI / self.points.len() as f64).sqrt()
    }

    /// Angular distance from `c` to the nearest grid point.
    pub fn nearest_angle(&self, c: &[f64; 3]) -> f64 {
        // |z1 - z2| <= angle, so a band of half-width w holds every point
        // within angle w of c
        let mut w = self.initial_radius();
        loop {
            let best = self
                .band(c[2], w)
                .map(|i| angle(c, &self.points[i]))
                .fold(f64::INFINITY, f64::min);
            if best <= w || w >= PI {
                return best;
            }
            w = (2.0 * w).min(PI);
        }
    }

    /// Up to `k` nearest grid points to grid point `i` (excluding itself).
    fn neighbours(&self, i: usize, k: usize) -> Vec<usize> {
        let p = &self.points[i];
        let mut w = 2.0 * self.initial_radius();
        loop {
            let mut near: Vec<(f64, usize)> = self
                .band(p[2], w)
                .filter(|&j| j != i)
                .map(|j| (angle(p, &self.points[j]), j))
                .filter(|(a, _)| *a <= w)
                .collect();
            if near.len() >= k || w >= PI {
                near.sort_by(|a, b| a.partial_cmp(b).unwrap());
                return near.into_iter().take(k).map(|(_, j)| j).collect();
            }
            w = (2.0 * w).min(PI);
        }
    }

    /// Covering radius (angular), from circumcenters of neighbour triples.
    pub fn covering_radius(&self) -> f64 {
        let k = NEIGHBOURS.min(self.points.len() - 1);
        let mut best: f64 = 0.0;
        for i in 0..self.points.len() {
            let nb = self.neighbours(i, k);
            let pi = self.points[i];
            for a in 0..nb.len() {
                for b in (a + 1)..nb.len() {
                    let (pj, pk) = (self.points[nb[a]], self.points[nb[b]]);
                    let u = [pj[0] - pi[0], pj[1] - pi[1], pj[2] - pi[2]];
                    let v = [pk[0] - pi[0], pk[1] - pi[1], pk[2] - pi[2]];
                    let c = cross(&u, &v);
                    let nc = linalg::norm(&c);
                    if nc < 1e-14 {
                        continue;
                    }
                    let s = if linalg::dot(&c, &pi) >= 0.0 { 1.0 } else { -1.0 };
                    let c = [s * c[0] / nc, s * c[1] / nc, s * c[2] / nc];
                    best = best.max(self.nearest_angle(&c));
                }
            }
        }
        best
    }
}

/// Covering radius of the `count`-point Fibonacci grid, memoized.
pub fn covering_radius(count: usize) -> f64 {
    static CACHE: OnceLock<Mutex<HashMap<usize, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&v) = cache.lock().unwrap().get(&count) {
        return v;
    }
    let v = FibonacciGrid::new(count).covering_radius();
    cache.lock().unwrap().insert(count, v);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{task_rng, uniform_point};

    #[test]
    fn grid_points_are_unit() {
        for p in fibonacci_sphere(100) {
            assert!((linalg::norm(&p) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn covering_radius_bounds_random_points() {
        for count in [64, 400] {
            let grid = FibonacciGrid::new(count);
            let delta = covering_radius(count);
            let mut rng = task_rng(99, count as u64);
            let mut worst: f64 = 0.0;
            for _ in 0..20_000 {
                let z = uniform_point(2, &mut rng);
                let c = [z.coords()[0], z.coords()[1], z.coords()[2]];
                let a = grid.nearest_angle(&c);
                assert!(a <= delta + 1e-12, "count={count}: {a} > {delta}");
                worst = worst.max(a);
            }
            // sampling gets close to the true maximum
            assert!(worst > 0.85 * delta, "count={count}: {worst} vs {delta}");
        }
    }

    #[test]
    fn nearest_angle_matches_brute_force() {
        let grid = FibonacciGrid::new(300);
        let mut rng = task_rng(5, 0);
        for _ in 0..500 {
            let z = uniform_point(2, &mut rng);
            let c = [z.coords()[0], z.coords()[1], z.coords()[2]];
            let brute = grid.points.iter().map(|p| angle(&c, p)).fold(f64::INFINITY, f64::min);
            assert_eq!(grid.nearest_angle(&c), brute);
        }
    }
}
