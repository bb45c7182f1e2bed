//! Dispersion of a point set: the largest measure of an empty slice.
//!
//! The general supremum has no known exact algorithm, so this module works
//! with brackets:
//!
//! * [`largest_empty_slice_search`] returns a verified empty slice, i.e. a
//!   certified *lower* bound;
//! * [`dispersion_grid_oracle`] scans a parameter grid for `d <= 2` and
//!   reports its best grid value plus a rigorous resolution error, an
//!   *upper* bound;
//! * on S^1 the slice dispersion is known exactly ([`exact_slice_dispersion_s1`]).
//!
//! Exact routines for the sub-family of caps are [`largest_empty_arc`] and
//! [`largest_empty_cap_exact`].

mod arc;
mod cap;
pub mod fibonacci;
mod oracle;
mod search;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere::{Slice, SpherePoint};

pub use arc::{exact_slice_dispersion_s1, largest_empty_arc};
pub use cap::{cap_subset_count, largest_empty_cap_exact, largest_empty_cap_with_budget};
pub use oracle::{
    check_monotonicity, check_monotonicity_with, dispersion_grid_oracle, oracle_error,
    OracleFamily, MAX_SLICE_RESOLUTION_D2,
};
pub use search::{largest_empty_slice_search, SearchConfig};

/// Margin for witness emptiness checks.
pub const WITNESS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionResult {
    /// An empty slice; `lower_value` is its measure.
    pub lower_witness: Slice,
    pub lower_value: f64,
    /// Upper bound on the supremum over the searched family, when known.
    pub upper_value: Option<f64>,
    /// Resolution error already included in `upper_value` (grid oracle).
    pub oracle_error: Option<f64>,
    pub method: String,
    /// Candidate systems skipped as rank-deficient (exact cap search).
    #[serde(default)]
    pub degenerate_skipped: usize,
    /// Wall-clock time; not serialized so that records replay exactly.
    #[serde(skip)]
    pub elapsed_secs: f64,
}

impl DispersionResult {
    fn new(witness: Slice, value: f64, method: impl Into<String>) -> Self {
        Self {
            lower_witness: witness,
            lower_value: value,
            upper_value: None,
            oracle_error: None,
            method: method.into(),
            degenerate_skipped: 0,
            elapsed_secs: 0.0,
        }
    }
}

pub(crate) fn check_set(points: &[SpherePoint], d: usize) -> Result<()> {
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

/// Panics if `witness` contains a point; every public routine calls this
/// before returning, so a bug surfaces instead of an invalid bound.
pub(crate) fn assert_empty(witness: &Slice, points: &[SpherePoint]) {
    let hits = witness.hits(points, WITNESS_TOL).expect("dimensions checked");
    assert!(hits.is_empty(), "witness slice contains points {hits:?}");
}
