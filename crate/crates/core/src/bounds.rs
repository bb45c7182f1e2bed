//! Closed-form bounds.
//!
//! Logarithm conventions: `ln` is the natural log everywhere except the
//! generic expected-dispersion bound [`expected_upper_generic`] and the
//! intersection VC bound inside [`slice_vc_upper`], which use `log2`. The
//! `64 / ln 2` prefactor of [`expected_upper_sphere`] is a natural log.

use std::f64::consts::{E, LN_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bound together with the formula branch that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    /// Reported value.
    pub value: f64,
    /// Formula value before clamping.
    pub raw: f64,
    pub branch: String,
    /// False when the formula's preconditions fail.
    pub valid: bool,
}

impl BoundValue {
    fn new(raw: f64, branch: impl Into<String>) -> Self {
        Self {
            value: raw,
            raw,
            branch: branch.into(),
            valid: true,
        }
    }

    fn invalid(branch: impl Into<String>) -> Self {
        Self {
            value: f64::NAN,
            raw: f64::NAN,
            branch: branch.into(),
            valid: false,
        }
    }

    /// True when the raw formula exceeds 1, i.e. the bound says nothing.
    pub fn is_trivial(&self) -> bool {
        self.valid && self.raw > 1.0
    }
}

/// Branches of the minimal-dispersion lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MinDispBranch {
    /// `n <= d + 1`: 1/2
    Half,
    /// `d + 1 < n <= 2d + 1`: 1/4
    Quarter,
    /// `2d + 1 <= n < 3d - 2`: `1 / (2n - 4d + 4)`
    QuadrantLunes,
    /// `n >= 3d - 2`: `1 / (n - d + 2)`
    HemisphereLunes,
}

impl MinDispBranch {
    pub fn name(self) -> &'static str {
        match self {
            MinDispBranch::Half => "half",
            MinDispBranch::Quarter => "quarter",
            MinDispBranch::QuadrantLunes => "quadrant_lunes",
            MinDispBranch::HemisphereLunes => "hemisphere_lunes",
        }
    }
}

/// Every branch whose range contains `(n, d)`, with its value.
pub fn min_disp_branches(n: u64, d: u64) -> Vec<(MinDispBranch, f64)> {
    let (n_, d_) = (n as i64, d as i64);
    let mut out = Vec::with_capacity(4);
    if n_ <= d_ + 1 {
        out.push((MinDispBranch::Half, 0.5));
    }
    if d_ + 1 < n_ && n_ <= 2 * d_ + 1 {
        out.push((MinDispBranch::Quarter, 0.25));
    }
    if 2 * d_ + 1 <= n_ && n_ < 3 * d_ - 2 {
        out.push((MinDispBranch::QuadrantLunes, 1.0 / (2 * n_ - 4 * d_ + 4) as f64));
    }
    if n_ >= 3 * d_ - 2 {
        out.push((MinDispBranch::HemisphereLunes, 1.0 / (n_ - d_ + 2) as f64));
    }
    out
}

/// Lower bound on the minimal dispersion `disp*(n, d)`: the maximum over
/// all branches whose range contains `(n, d)`.
pub fn thm_a_lower(n: u64, d: u64) -> BoundValue {
    if n < 1 || d < 1 {
        return BoundValue::invalid("requires n >= 1, d >= 1");
    }
    let (branch, v) = min_disp_branches(n, d)
        .into_iter()
        .fold(None::<(MinDispBranch, f64)>, |best, cur| match best {
            Some(b) if b.1 >= cur.1 => Some(b),
            _ => Some(cur),
        })
        .expect("the branch ranges cover every n >= 1");
    BoundValue::new(v, branch.name())
}

/// `N(eps, d) >= max{1/eps + d - 2, 1/(2 eps) + 2d - 2}` for `eps in (0, 1/4)`.
pub fn inverse_min_lower(eps: f64, d: u64) -> BoundValue {
    if !(eps > 0.0 && eps < 0.25) || d < 1 {
        return BoundValue::invalid("requires eps in (0, 1/4), d >= 1");
    }
    let d = d as f64;
    let a = 1.0 / eps + d - 2.0;
    let b = 1.0 / (2.0 * eps) + 2.0 * d - 2.0;
    if a >= b {
        BoundValue::new(a, "1/eps + d - 2")
    } else {
        BoundValue::new(b, "1/(2 eps) + 2d - 2")
    }
}

/// Tail bound `min(1, (e n / vc)^vc 2^(-t n / 2))`, evaluated in log space.
pub fn behw_tail(n: u64, vc: u64, t: f64) -> Result<f64> {
    if vc < 1 || n < vc {
        return Err(Error::Precondition(format!("behw_tail needs n >= vc >= 1 (n={n}, vc={vc})")));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::OutOfRange { what: "t", value: t });
    }
    Ok(behw_tail_raw_ln(n, vc, t).exp().min(1.0))
}

/// Natural log of the unclamped tail bound.
pub fn behw_tail_raw_ln(n: u64, vc: u64, t: f64) -> f64 {
    let (n, vc) = (n as f64, vc as f64);
    vc * (E * n / vc).ln() - t * n / 2.0 * LN_2
}

/// `gamma = min{1, (2 vc / n) log2(e n / vc)}`, the split point used when
/// integrating the tail bound.
pub fn gamma_split(n: u64, vc: u64) -> f64 {
    let (n, vc) = (n as f64, vc as f64);
    (2.0 * vc / n * (E * n / vc).log2()).min(1.0)
}

/// `E[disp] <= (4 vc / n) log2(e n / vc)` for a family of VC dimension `vc`.
/// Reported raw (it can exceed 1 near `n = vc`).
pub fn expected_upper_generic(n: u64, vc: u64) -> BoundValue {
    if vc < 1 || n < vc {
        return BoundValue::invalid("requires n >= vc >= 1");
    }
    let (nf, vf) = (n as f64, vc as f64);
    BoundValue::new(4.0 * vf / nf * (E * nf / vf).log2(), "4 vc/n log2(e n/vc)")
}

/// VC dimension of caps on S^d.
pub fn cap_vc(d: u64) -> u64 {
    d + 2
}

/// Upper bound on the VC dimension of slices:
/// `min(ceil(4 (d + 2) log2 6), 32 d)`, with the winning term named.
pub fn slice_vc_upper(d: u64) -> (u64, &'static str) {
    assert!(d >= 1);
    let intersection = (4.0 * cap_vc(d) as f64 * 6f64.log2()).ceil() as u64;
    let cited = 32 * d;
    if intersection < cited {
        (intersection, "4 (d+2) log2 6")
    } else {
        (cited, "32 d")
    }
}

/// `E[disp(P_n; d)] <= (64 / ln 2) (d / n) ln(e n / (32 d))` for `n >= 32 d`.
/// Reported raw; `is_trivial` flags values above 1.
pub fn expected_upper_sphere(n: u64, d: u64) -> BoundValue {
    if d < 1 || n < 32 * d {
        return BoundValue::invalid("requires n >= 32 d");
    }
    let (nf, df) = (n as f64, d as f64);
    BoundValue::new(
        64.0 / LN_2 * df / nf * (E * nf / (32.0 * df)).ln(),
        "(64/ln2)(d/n) ln(e n/(32 d))",
    )
}

/// `E[disp(P_n; d)] >= ln(n) / (9 n)` for `n >= 2`.
pub fn expected_lower(n: u64) -> BoundValue {
    if n < 2 {
        return BoundValue::invalid("requires n >= 2");
    }
    let nf = n as f64;
    BoundValue::new(nf.ln() / (9.0 * nf), "ln(n)/(9 n)")
}

/// Bounds on the inverse expected dispersion for `eps in (0, 1/(9e))`:
/// lower `max{1/eps + d - 2, 1/(2 eps) + 2d - 2, ln(1/(9 eps))/(9 eps)}`,
/// upper `96 (d / eps) ln(96 / eps)`.
pub fn inverse_expected_bounds(eps: f64, d: u64) -> (BoundValue, BoundValue) {
    if !(eps > 0.0 && eps < 1.0 / (9.0 * E)) || d < 1 {
        let b = BoundValue::invalid("requires eps in (0, 1/(9e)), d >= 1");
        return (b.clone(), b);
    }
    let df = d as f64;
    let terms = [
        (1.0 / eps + df - 2.0, "1/eps + d - 2"),
        (1.0 / (2.0 * eps) + 2.0 * df - 2.0, "1/(2 eps) + 2d - 2"),
        ((1.0 / (9.0 * eps)).ln() / (9.0 * eps), "ln(1/(9 eps))/(9 eps)"),
    ];
    let (lv, lb) = terms
        .iter()
        .copied()
        .fold((f64::NEG_INFINITY, ""), |acc, cur| if cur.0 > acc.0 { cur } else { acc });
    let upper = 96.0 * df / eps * (96.0 / eps).ln();
    (BoundValue::new(lv, lb), BoundValue::new(upper, "96 (d/eps) ln(96/eps)"))
}

/// The constant `a = c1 (1 + c2 / e)` of the inverse-dispersion lemma.
pub fn lemma_constant(c1: f64, c2: f64) -> f64 {
    c1 * (1.0 + c2 / E)
}

/// `f(x) = c1 (d / x) ln(c2 x / d)`.
pub fn lemma_f(c1: f64, c2: f64, d: u64, x: f64) -> f64 {
    let d = d as f64;
    c1 * d / x * (c2 * x / d).ln()
}

/// `x0 = d (a / eps) ln(a / eps)` with `a = c1 (1 + c2 / e)`; every
/// `x >= x0` has `f(x) < eps`.
pub fn lemma_threshold(c1: f64, c2: f64, d: u64, eps: f64) -> Result<f64> {
    if !(c1 >= 1.0) {
        return Err(Error::OutOfRange { what: "c1", value: c1 });
    }
    if !(c2 > 0.0) {
        return Err(Error::OutOfRange { what: "c2", value: c2 });
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::OutOfRange { what: "eps", value: eps });
    }
    if d < 1 {
        return Err(Error::OutOfRange { what: "d", value: 0.0 });
    }
    let a = lemma_constant(c1, c2);
    if !(a / eps > 1.0) {
        return Err(Error::OutOfRange { what: "a/eps", value: a / eps });
    }
    Ok(d as f64 * a / eps * (a / eps).ln())
}

/// Harmonic number `H_l`, summed smallest-term first.
pub fn harmonic(ell: u64) -> f64 {
    (1..=ell).rev().map(|j| 1.0 / j as f64).sum()
}

/// Smallest `l` with `(H_l - 2) l >= 1`.
pub fn min_coupon_ell() -> u64 {
    (1..).find(|&l| (harmonic(l) - 2.0) * l as f64 >= 1.0).unwrap()
}

/// `floor((H_l - 2) l)`: every `n` up to this value has `P[tau_l > n] > 1/2`.
pub fn coupon_safe_n(ell: u64) -> Result<u64> {
    let v = (harmonic(ell) - 2.0) * ell as f64;
    if v < 1.0 {
        return Err(Error::ThresholdNonpositive { ell });
    }
    Ok(v.floor() as u64)
}

/// `ceil((1 + e) n / ln n)` for `n >= 2`.
pub fn partition_count(n: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::Precondition(format!("partition_count needs n >= 2, got {n}")));
    }
    let nf = n as f64;
    Ok(((1.0 + E) * nf / nf.ln()).ceil() as u64)
}
