//! Certificates over random and structured inputs, and tampered copies.

use rand::Rng;
use sphdisp_core::bounds::thm_a_lower;
use sphdisp_core::certificates::*;
use sphdisp_core::experiments::sample_uniform_sphere;
use sphdisp_core::rng::task_rng;
use sphdisp_core::{Cap, Slice, SpherePoint};

#[test]
fn random_sweep_meets_theorem() {
    let mut rng = task_rng(7, 0);
    for i in 0..300u64 {
        let d = rng.gen_range(1..=8);
        let n = rng.gen_range(1..=200);
        let pts = sample_uniform_sphere(d, n, 1000 + i);
        let c = best_certificate(&pts, d).unwrap();
        let r = verify_certificate(&c, &pts, CERT_TOL);
        assert!(r.passed && r.meets_theorem, "d={d} n={n}: {:?}", r.messages);
        assert!(c.exact_measure >= thm_a_lower(n as u64, d as u64).value - 1e-12);
    }
}

fn circle_in(d: usize, count: usize) -> Vec<SpherePoint> {
    (0..count)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / count as f64;
            let mut v = vec![0.0; d + 1];
            v[0] = a.cos();
            v[1] = a.sin();
            SpherePoint::new(&v).unwrap()
        })
        .collect()
}

#[test]
fn degenerate_inputs_still_verify() {
    let mut cases: Vec<(usize, Vec<SpherePoint>)> = Vec::new();
    // every point on one great circle
    cases.push((3, circle_in(3, 12)));
    cases.push((2, circle_in(2, 9)));
    // repeated points
    let p = SpherePoint::new(&[0.2, -0.5, 0.8]).unwrap();
    cases.push((2, vec![p.clone(); 7]));
    // antipodal pairs along the axes
    let mut axes = Vec::new();
    for i in 0..4 {
        axes.push(SpherePoint::basis(3, i));
        axes.push(SpherePoint::new(&{ let mut v = vec![0.0; 4]; v[i] = -1.0; v }).unwrap());
    }
    cases.push((3, axes));
    for (d, pts) in cases {
        let c = best_certificate(&pts, d).unwrap();
        let r = verify_certificate(&c, &pts, CERT_TOL);
        assert!(r.passed, "d={d} n={}: {:?}", pts.len(), r.messages);
    }
}

#[test]
fn permuted_input_gives_valid_certificate() {
    let mut pts = sample_uniform_sphere(3, 40, 3);
    for shift in [1, 7, 19] {
        pts.rotate_left(shift);
        let c = best_certificate(&pts, 3).unwrap();
        assert!(verify_certificate(&c, &pts, CERT_TOL).passed);
    }
}

#[test]
fn tampering_is_caught() {
    let pts = sample_uniform_sphere(2, 30, 11);
    let good = best_certificate(&pts, 2).unwrap();
    assert!(verify_certificate(&good, &pts, CERT_TOL).passed);

    // a slice holding a point
    let mut holds = good.clone();
    holds.slice = Slice::from_cap(Cap::hemisphere(pts[0].clone()));
    let r = verify_certificate(&holds, &pts, CERT_TOL);
    assert!(!r.passed && !r.empty && r.offending.contains(&0));

    // an inflated stored measure
    let mut inflated = good.clone();
    inflated.exact_measure += 0.01;
    assert!(!verify_certificate(&inflated, &pts, CERT_TOL).measure_ok);

    // a non-central slice cannot be verified exactly
    let mut offset = good.clone();
    offset.slice.cap_a.threshold = 0.1;
    assert!(!verify_certificate(&offset, &pts, CERT_TOL).passed);

    // a certificate checked against more points than it was built for
    let mut more = pts.clone();
    more.extend(sample_uniform_sphere(2, 200, 12));
    let r = verify_certificate(&good, &more, CERT_TOL);
    assert!(!r.passed);
}
