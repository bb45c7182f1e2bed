//! Structural properties of the closed-form bounds over parameter grids.

use sphdisp_core::bounds::*;

#[test]
fn min_lower_is_monotone() {
    for d in 1..=20u64 {
        for n in 1..500u64 {
            let here = thm_a_lower(n, d).value;
            assert!(thm_a_lower(n + 1, d).value <= here, "n={n} d={d}");
            assert!(thm_a_lower(n, d + 1).value >= here, "n={n} d={d}");
        }
    }
}

#[test]
fn hemisphere_lunes_win_exactly_on_their_range() {
    for d in 1..=20u64 {
        for n in (2 * d + 2)..=(6 * d + 10) {
            let b = thm_a_lower(n, d);
            assert_eq!(b.branch == "hemisphere_lunes", n + 2 >= 3 * d, "n={n} d={d}: {}", b.branch);
        }
    }
}

#[test]
fn expected_bounds_sandwich() {
    for d in 1..=10u64 {
        for n in (32 * d)..(32 * d + 3000) {
            let lo = expected_lower(n).value;
            let hi = expected_upper_sphere(n, d).value;
            assert!(lo <= hi, "n={n} d={d}: {lo} > {hi}");
        }
    }
}

#[test]
fn tail_bound_is_clamped_raw_formula() {
    for vc in 1..=10u64 {
        for n in vc..200 {
            for k in 0..=20 {
                let t = k as f64 / 20.0;
                let v = behw_tail(n, vc, t).unwrap();
                let raw = behw_tail_raw_ln(n, vc, t).exp();
                assert!(v <= 1.0);
                if raw < 1.0 {
                    assert_eq!(v, raw);
                }
            }
        }
    }
    // log space keeps large VC dimensions finite
    assert_eq!(behw_tail(10_000, 80, 0.01).unwrap(), 1.0);
    assert!(behw_tail(10_000, 80, 1.0).unwrap() < 1e-300);
}

#[test]
fn inverse_minimal_below_inverse_expected() {
    for d in 1..=20u64 {
        for k in 1..200 {
            let eps = k as f64 * (1.0 / (9.0 * std::f64::consts::E)) / 200.0;
            let lo = inverse_min_lower(eps, d);
            let (_, hi) = inverse_expected_bounds(eps, d);
            assert!(lo.value <= hi.value, "eps={eps} d={d}");
        }
    }
}

#[test]
fn remark_fixtures() {
    assert_eq!(inverse_min_lower(0.1, 5).value, 13.0);
    let a = lemma_constant(64.0 / std::f64::consts::LN_2, std::f64::consts::E / 32.0);
    assert!(a <= 96.0, "{a}");
}
