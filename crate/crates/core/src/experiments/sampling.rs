//! Uniform sampling and the lune partition of the sphere.

use std::f64::consts::{FRAC_PI_2, TAU};

use crate::rng::{rng_from_seed, uniform_point};
use crate::sphere::{Cap, Slice, SpherePoint};

/// `n` independent uniform points on S^d (normalized standard normals),
/// drawn from a single stream seeded with `seed`.
pub fn sample_uniform_sphere(d: usize, n: usize, seed: u64) -> Vec<SpherePoint> {
    let mut rng = rng_from_seed(seed);
    (0..n).map(|_| uniform_point(d, &mut rng)).collect()
}

/// Point `cos(a) e_{d-1} + sin(a) e_d` of the partition plane (0-based axes).
fn plane_point(d: usize, a: f64) -> SpherePoint {
    let mut v = vec![0.0; d + 1];
    let (s, c) = a.sin_cos();
    v[d - 1] = c;
    v[d] = s;
    SpherePoint::new(&v).expect("unit vector")
}

/// `ell` central wedges of angle `2 pi / ell` around the subspace
/// orthogonal to the plane of the last two axes. Wedge `j` holds the
/// points whose angle in that plane lies in `(2 pi j / ell, 2 pi (j+1) / ell)`.
/// `ell = 1` is the whole sphere and `ell = 2` two hemispheres.
pub fn lune_partition(d: usize, ell: usize) -> Vec<Slice> {
    assert!(d >= 1 && ell >= 1, "lune_partition needs d >= 1 and ell >= 1");
    if ell == 1 {
        return vec![Slice::full(d)];
    }
    let width = TAU / ell as f64;
    (0..ell)
        .map(|j| {
            let lo = width * j as f64;
            let hi = lo + width;
            let a = Cap::hemisphere(plane_point(d, lo + FRAC_PI_2));
            if ell == 2 {
                Slice::from_cap(a)
            } else {
                Slice {
                    cap_a: a,
                    cap_b: Cap::hemisphere(plane_point(d, hi - FRAC_PI_2)),
                }
            }
        })
        .collect()
}

/// Index of the wedge of [`lune_partition`] containing `p`. Points on the
/// axis (a null set) are assigned to wedge 0.
pub fn wedge_index(p: &SpherePoint, ell: usize) -> usize {
    let d = p.dim();
    let c = p.coords();
    let (x, y) = (c[d - 1], c[d]);
    if x == 0.0 && y == 0.0 {
        return 0;
    }
    let phi = y.atan2(x).rem_euclid(TAU);
    ((phi / TAU * ell as f64).floor() as usize).min(ell - 1)
}
