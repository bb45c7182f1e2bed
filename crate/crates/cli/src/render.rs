//! Plain-text tables for the default (non-JSON) output.

use std::collections::BTreeMap;
use std::fmt::Write;

use sphdisp_core::certificates::{Certificate, VerificationReport};
use sphdisp_core::dispersion::DispersionResult;
use sphdisp_core::experiments::ExperimentResult;

use crate::commands::BoundRow;

/// `1/k` when `v` is the reciprocal of a small integer, for readability.
fn as_reciprocal(v: f64) -> Option<String> {
    if !(v > 0.0 && v <= 1.0) {
        return None;
    }
    let k = (1.0 / v).round();
    ((1.0 / k - v).abs() <= 1e-12 * v && k <= 1e9).then(|| format!("1/{k}"))
}

fn number(v: f64) -> String {
    if v.is_nan() {
        "-".into()
    } else if v.fract() == 0.0 && v.abs() < 1e12 {
        format!("{v:.0}")
    } else if v != 0.0 && (v.abs() >= 1e6 || v.abs() < 1e-4) {
        format!("{v:.6e}")
    } else {
        format!("{v:.6}")
    }
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn bounds(n: u64, d: u64, rows: &[BoundRow]) -> String {
    let mut s = format!("bounds for n = {n}, d = {d}\n");
    let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
    for r in rows {
        let exact = as_reciprocal(r.value).filter(|_| r.valid).unwrap_or_default();
        let value = if r.valid { number(r.value) } else { "n/a".into() };
        let _ = writeln!(s, "{:width$}  {:>14}  {:>8}  {}", r.name, value, exact, r.branch);
    }
    s
}

pub fn dispersion(d: usize, n: usize, results: &BTreeMap<&str, DispersionResult>) -> String {
    let mut s = format!("dispersion of {n} points on S^{d}\n");
    let _ = writeln!(s, "{:10}  {:>12}  {:>12}  method", "run", "lower", "upper");
    for (name, r) in results {
        let upper = r.upper_value.map(number).unwrap_or_else(|| "-".into());
        let _ = writeln!(s, "{:10}  {:>12}  {:>12}  {}", name, number(r.lower_value), upper, r.method);
    }
    s
}

pub fn certificate(c: &Certificate, report: Option<&VerificationReport>) -> String {
    let mut s = format!(
        "certificate {} ({} pieces, piece {})\n  exact measure   {}\n  claimed measure {}\n",
        c.case_tag,
        c.construction.pieces,
        c.construction.piece,
        number(c.exact_measure),
        number(c.claimed_measure),
    );
    if let Some(r) = report {
        let _ = writeln!(s, "  empty           {}", pass(r.empty));
        let _ = writeln!(s, "  measure         {}", pass(r.measure_ok));
        let _ = writeln!(s, "  bound {:<10}{}", number(r.bound_target), pass(r.bound_ok));
        let _ = writeln!(s, "  disp* lower     {} ({})", number(r.theorem_bound), pass(r.meets_theorem));
        for m in &r.messages {
            let _ = writeln!(s, "  note: {m}");
        }
    }
    s
}

pub fn experiment(r: &ExperimentResult) -> String {
    let mut s = format!("{} replications\n", r.replication);
    let width = r
        .estimates
        .keys()
        .chain(r.bound_values.keys())
        .chain(r.verdicts.keys())
        .map(String::len)
        .max()
        .unwrap_or(0);
    for (k, e) in &r.estimates {
        let _ = writeln!(s, "{k:width$}  {} +- {}", number(e.value), number(e.stderr));
    }
    for (k, v) in &r.bound_values {
        let _ = writeln!(s, "{k:width$}  {}", number(*v));
    }
    for (k, ok) in &r.verdicts {
        let _ = writeln!(s, "{k:width$}  {}", pass(*ok));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reciprocals() {
        assert_eq!(as_reciprocal(1.0 / 37.0).as_deref(), Some("1/37"));
        assert_eq!(as_reciprocal(0.5).as_deref(), Some("1/2"));
        assert_eq!(as_reciprocal(0.3), None);
        assert_eq!(as_reciprocal(f64::NAN), None);
        assert_eq!(as_reciprocal(13.0), None);
    }
}
