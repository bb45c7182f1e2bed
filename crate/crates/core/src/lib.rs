//! Spherical dispersion of finite point sets on S^d ⊂ R^{d+1}.
//!
//! The dispersion of a point set is the largest normalized surface measure
//! of a *slice* (intersection of two open spherical caps) that contains none
//! of the points. This crate provides:
//!
//! * [`sphere`] and [`measure`]: points, caps, slices and their measures;
//! * [`bounds`]: closed-form lower/upper bounds on minimal and expected
//!   dispersion, VC-dimension values and coupon-collector thresholds;
//! * [`certificates`]: constructive empty slices meeting the minimal
//!   dispersion lower bound for *any* input, with an independent verifier;
//! * [`dispersion`]: exact largest empty caps/arcs, a certified slice search
//!   and a brute-force grid oracle for `d <= 2`;
//! * [`experiments`]: seeded Monte Carlo studies of expected dispersion,
//!   coupon collection, lune partitions and cap shattering;
//! * [`io`]: point-set CSV files and JSON run records.

// `!(x > y)` guards reject NaN as well; range checks mirror the documented
// inequalities, e.g. `n >= d + 1`.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::int_plus_one)]

pub mod bounds;
pub mod certificates;
pub mod dispersion;
pub mod error;
pub mod experiments;
pub mod io;
pub mod linalg;
pub mod measure;
pub mod rng;
pub mod special;
pub mod sphere;

pub use error::{Error, Result};
pub use measure::{cap_measure, central_slice_measure, slice_measure, MeasureEstimate};
pub use sphere::{Cap, Slice, SpherePoint};
