//! Exact shattering test for caps and the VC-dimension experiment.
//!
//! A labeling of points on S^d is cut out by a cap `<x, .> > t` iff the
//! "in" points are strictly separated from the "out" points by an affine
//! hyperplane of R^{d+1}. Any separating hyperplane can be translated and
//! rotated, keeping the separation weak, until it passes through `d + 1`
//! of the points; conversely the hyperplane through `d + 1` affinely
//! independent points can be perturbed to give those points any sign
//! pattern while the others keep theirs. Enumerating `(d+1)`-subsets, both
//! orientations and every sign pattern on the subset therefore yields
//! exactly the realizable labelings, for points in general position.

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::sample_uniform_sphere;
use super::{Estimate, ExperimentConfig, ExperimentResult};
use crate::bounds::cap_vc;
use crate::error::{Error, Result};
use crate::linalg;
use crate::rng::split_seed;
use crate::sphere::SpherePoint;

/// Largest point count the checker accepts (2^8 labelings).
pub const MAX_SHATTER_POINTS: usize = 8;

/// Relative size below which a point counts as lying on a hyperplane.
const ON_PLANE: f64 = 1e-12;

fn check_input(points: &[SpherePoint], d: usize) -> Result<()> {
    if !(1..=2).contains(&d) {
        return Err(Error::Precondition(format!("shattering check needs d in {{1, 2}}, got {d}")));
    }
    if points.len() > MAX_SHATTER_POINTS {
        return Err(Error::TooManyPoints { m: points.len(), max: MAX_SHATTER_POINTS });
    }
    for p in points {
        if p.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: p.dim() });
        }
    }
    Ok(())
}

/// Affine hyperplane `<x, y> = c` through the points of `subset`.
fn hyperplane_through(points: &[SpherePoint], subset: &[usize], d: usize) -> Option<(Vec<f64>, f64)> {
    let k = subset.len();
    let mut g = vec![0.0; k * k];
    for (a, &i) in subset.iter().enumerate() {
        for (b, &j) in subset.iter().enumerate() {
            g[a * k + b] = points[i].dot(&points[j]);
        }
    }
    if let Some(w) = linalg::solve(&g, &vec![1.0; k], k, 1e-12) {
        let mut x = vec![0.0; d + 1];
        for (wi, &i) in w.iter().zip(subset) {
            linalg::axpy(*wi, points[i].coords(), &mut x);
        }
        return Some((x, 1.0));
    }
    // linearly dependent subset: the hyperplane passes through the origin
    let rows: Vec<&[f64]> = subset.iter().map(|&i| points[i].coords()).collect();
    linalg::complement_vector(&rows, d + 1).map(|x| (x, 0.0))
}

/// Table of all `2^m` labelings (bit `i` set = point `i` inside) marking
/// those realized by some cap. Assumes general position.
pub fn cap_labelings(points: &[SpherePoint], d: usize) -> Result<Vec<bool>> {
    check_input(points, d)?;
    let m = points.len();
    let all = (1u32 << m) - 1;
    let mut table = vec![false; 1 << m];
    // empty cap (t = 1) and a cap missing only one antipodal point (t = -1)
    table[0] = true;
    table[all as usize] = true;
    if m == 0 {
        return Ok(table);
    }
    let k = m.min(d + 1);
    for subset in (0..m).combinations(k) {
        let Some((x, c)) = hyperplane_through(points, &subset, d) else {
            continue;
        };
        let scale = linalg::norm(&x).max(c.abs()).max(1.0);
        let mut free = 0u32;
        let mut positive = 0u32;
        for (j, p) in points.iter().enumerate() {
            let v = linalg::dot(&x, p.coords()) - c;
            if subset.contains(&j) || v.abs() <= ON_PLANE * scale {
                free |= 1 << j;
            } else if v > 0.0 {
                positive |= 1 << j;
            }
        }
        let negative = all & !free & !positive;
        // iterate over all submasks of `free`
        let mut sub = free;
        loop {
            table[(positive | sub) as usize] = true;
            table[(negative | sub) as usize] = true;
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & free;
        }
    }
    Ok(table)
}

/// Whether caps realize every labeling of `points` (at most 8, `d <= 2`).
pub fn cap_shattering_check(points: &[SpherePoint], d: usize) -> Result<bool> {
    Ok(cap_labelings(points, d)?.iter().all(|&b| b))
}

/// Random search for a shattered `(d+2)`-set and a census of shattered
/// `(d+3)`-sets, each over `trials` uniform draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VcConfig {
    pub d: usize,
    pub trials: u64,
    pub seed: u64,
}

impl VcConfig {
    fn shattered_count(&self, m: usize, stream: u64) -> Result<u64> {
        let master = split_seed(self.seed, stream);
        let hits: Vec<bool> = (0..self.trials)
            .into_par_iter()
            .map(|i| cap_shattering_check(&sample_uniform_sphere(self.d, m, split_seed(master, i)), self.d))
            .collect::<Result<_>>()?;
        Ok(hits.iter().filter(|&&h| h).count() as u64)
    }

    pub fn run(&self) -> Result<ExperimentResult> {
        if !(1..=2).contains(&self.d) {
            return Err(Error::Precondition(format!("vc experiment needs d in {{1, 2}}, got {}", self.d)));
        }
        if self.trials == 0 {
            return Err(Error::Precondition("trials must be positive".into()));
        }
        let vc = cap_vc(self.d as u64) as usize;
        let at_vc = self.shattered_count(vc, 0)?;
        let above = self.shattered_count(vc + 1, 1)?;
        let mut out = ExperimentResult::new(ExperimentConfig::VcDimension(self.clone()), self.trials);
        out.bound_values.insert("vc_caps".into(), vc as f64);
        out.estimates.insert(
            format!("shattered_fraction[m={vc}]"),
            Estimate::proportion(at_vc, self.trials),
        );
        out.estimates.insert(
            format!("shattered_fraction[m={}]", vc + 1),
            Estimate::proportion(above, self.trials),
        );
        out.verdicts.insert(format!("found_shattered_{vc}_set"), at_vc > 0);
        out.verdicts.insert(format!("no_shattered_{}_set", vc + 1), above == 0);
        Ok(out)
    }
}

pub fn vc_dimension_experiment(d: usize, trials: u64, seed: u64) -> Result<ExperimentResult> {
    VcConfig { d, trials, seed }.run()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(deg: &[f64]) -> Vec<SpherePoint> {
        deg.iter().map(|a| SpherePoint::from_angle(a.to_radians())).collect()
    }

    #[test]
    fn single_point_is_shattered() {
        assert!(cap_shattering_check(&circle(&[40.0]), 1).unwrap());
        assert!(cap_shattering_check(&[SpherePoint::basis(2, 0)], 2).unwrap());
        assert!(cap_shattering_check(&[], 1).unwrap());
    }

    #[test]
    fn circle_three_yes_four_no() {
        assert!(cap_shattering_check(&circle(&[0.0, 100.0, 230.0]), 1).unwrap());
        let four = circle(&[0.0, 80.0, 170.0, 300.0]);
        let t = cap_labelings(&four, 1).unwrap();
        // alternating labelings need two arcs
        assert!(!t[0b0101] && !t[0b1010]);
        // every contiguous run is an arc
        for mask in [0b0001, 0b0011, 0b0111, 0b1110, 0b1001, 0b1100] {
            assert!(t[mask], "{mask:04b}");
        }
        assert_eq!(t.iter().filter(|&&b| b).count(), 14);
    }

    #[test]
    fn tetrahedron_shattered_random_five_not() {
        let s = 1.0 / 3f64.sqrt();
        let tet: Vec<SpherePoint> = [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]]
            .iter()
            .map(|v| SpherePoint::new(v).unwrap())
            .collect();
        assert!(cap_shattering_check(&tet, 2).unwrap());
        let five = sample_uniform_sphere(2, 5, 3);
        assert!(!cap_shattering_check(&five, 2).unwrap());
    }

    #[test]
    fn input_guards() {
        let nine = sample_uniform_sphere(1, 9, 0);
        assert!(matches!(cap_shattering_check(&nine, 1), Err(Error::TooManyPoints { m: 9, max: 8 })));
        assert!(cap_shattering_check(&sample_uniform_sphere(3, 2, 0), 3).is_err());
    }
}
