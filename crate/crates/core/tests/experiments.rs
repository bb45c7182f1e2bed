//! Experiments checked against independent closed forms and samplers.

use rand::Rng;
use sphdisp_core::bounds::{coupon_safe_n, expected_lower};
use sphdisp_core::experiments::*;
use sphdisp_core::rng::{task_rng, uniform_point};
use sphdisp_core::SpherePoint;

/// `P[tau_ell > n] = sum_k (-1)^(k+1) C(ell, k) (1 - k/ell)^n`.
fn coupon_tail_exact(ell: u64, n: u64) -> f64 {
    let mut total = 0.0;
    let mut binom = 1.0;
    for k in 1..=ell {
        binom *= (ell - k + 1) as f64 / k as f64;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        total += sign * binom * (1.0 - k as f64 / ell as f64).powi(n as i32);
    }
    total
}

/// Same tail from the occupancy chain: after each draw the number of
/// distinct coupons stays or grows by one. No cancellation, so it stays
/// accurate where the alternating sum does not.
fn coupon_tail_chain(ell: u64, n: u64) -> f64 {
    let l = ell as usize;
    let mut p = vec![0.0; l + 1];
    p[0] = 1.0;
    for _ in 0..n {
        for k in (0..=l).rev() {
            let stay = p[k] * k as f64 / ell as f64;
            let arrive = if k > 0 { p[k - 1] * (l - k + 1) as f64 / ell as f64 } else { 0.0 };
            p[k] = stay + arrive;
        }
    }
    1.0 - p[l]
}

fn within_sigmas(est: f64, exact: f64, reps: u64, k: f64) -> bool {
    let se = (exact * (1.0 - exact) / reps as f64).sqrt();
    (est - exact).abs() <= k * se
}

#[test]
fn inclusion_exclusion_oracle_sanity() {
    // ell = 2: the tail after n draws is 2^(1-n)
    assert!((coupon_tail_exact(2, 5) - 1.0 / 16.0).abs() < 1e-15);
    assert!((coupon_tail_exact(3, 1) - 1.0).abs() < 1e-15);
    assert!((coupon_tail_exact(10, 50) - coupon_tail_chain(10, 50)).abs() < 1e-12);
}

#[test]
fn coupon_tail_matches_inclusion_exclusion() {
    let r = coupon_tail_sim(10, 50, 10_000, 21).unwrap();
    let est = r.estimates["tail_prob"].value;
    let exact = coupon_tail_exact(10, 50);
    assert!(within_sigmas(est, exact, 10_000, 3.0), "{est} vs {exact}");
}

#[test]
fn coupon_tail_exceeds_half_at_safe_n() {
    let n = coupon_safe_n(100).unwrap();
    assert_eq!(n, 318);
    let r = coupon_tail_sim(100, n, 10_000, 5).unwrap();
    assert!(r.verdicts["tail_above_half"], "{:?}", r.estimates);
    assert!(r.passed());
}

#[test]
fn partition_emptiness_is_the_coupon_law() {
    let r = partition_emptiness_prob(2, 100, 4000, 17).unwrap();
    assert_eq!(r.bound_values["ell"], 81.0);
    assert!(r.verdicts["matches_coupon_tail"], "{:?}", r.estimates);
    let exact = coupon_tail_chain(81, 100);
    let est = r.estimates["empty_wedge_prob"].value;
    assert!(within_sigmas(est, exact, 4000, 3.0), "{est} vs {exact}");
}

#[test]
fn lower_bound_chain_at_n64() {
    let part = partition_emptiness_prob(1, 64, 2000, 8).unwrap();
    let chain = part.estimates["expected_disp_lower"];
    let disp = mc_expected_dispersion(1, 64, 200, Estimator::Oracle, 8).unwrap();
    let mean = disp.estimates["mean_disp"];
    let err = disp.bound_values["grid_error"];
    assert!(chain.value <= mean.value + err + 3.0 * (chain.stderr + mean.stderr));
    assert!(disp.verdicts["mean_above_expected_lower"]);
    assert!(disp.verdicts["mean_below_expected_upper"]);
    assert!(mean.value >= expected_lower(64).value);
}

#[test]
fn uniform_sampler_moments() {
    let n = 100_000;
    let ps = sample_uniform_sphere(3, n, 2024);
    for k in 0..4 {
        let mean = ps.iter().map(|p| p.coords()[k]).sum::<f64>() / n as f64;
        assert!(mean.abs() < 4.0 / (n as f64).sqrt(), "coordinate {k}: {mean}");
    }
    let probe = SpherePoint::new(&[0.3, -0.2, 0.9, 0.1]).unwrap();
    let frac = ps.iter().filter(|p| p.dot(&probe) > 0.0).count() as f64 / n as f64;
    assert!((frac - 0.5).abs() < 4.0 * (0.25 / n as f64).sqrt());
}

#[test]
fn first_coordinate_on_s2_is_uniform() {
    // Archimedes: the height of a uniform point on S^2 is uniform on [-1, 1]
    let n = 100_000;
    let mut z: Vec<f64> = sample_uniform_sphere(2, n, 99).iter().map(|p| p.coords()[0]).collect();
    z.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let ks = z
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = (x + 1.0) / 2.0;
            (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
        })
        .fold(0.0, f64::max);
    // asymptotic 1% critical value
    assert!(ks < 1.628 / (n as f64).sqrt(), "KS statistic {ks}");
}

#[test]
fn quadrants_have_quarter_measure_and_cover() {
    let parts = lune_partition(2, 4);
    let n = 100_000;
    let ps = sample_uniform_sphere(2, n, 4);
    let mut counts = [0usize; 4];
    let mut boundary = 0;
    for p in &ps {
        let inside: Vec<usize> = (0..4).filter(|&j| parts[j].contains(p, 0.0).unwrap()).collect();
        match inside.as_slice() {
            [j] => counts[*j] += 1,
            _ => boundary += 1,
        }
    }
    assert!(boundary < 10);
    let se = (0.25 * 0.75 / n as f64).sqrt();
    for c in counts {
        assert!((c as f64 / n as f64 - 0.25).abs() < 4.0 * se, "{counts:?}");
    }
}

/// Labelings realized by `caps` random caps (uniform center and threshold).
fn sampled_labelings(points: &[SpherePoint], d: usize, caps: usize, seed: u64) -> Vec<bool> {
    let mut rng = task_rng(seed, 0);
    let mut table = vec![false; 1 << points.len()];
    for _ in 0..caps {
        let x = uniform_point(d, &mut rng);
        let t: f64 = rng.gen_range(-1.0..1.0);
        let mask = points
            .iter()
            .enumerate()
            .filter(|(_, p)| x.dot(p) > t)
            .fold(0usize, |m, (i, _)| m | (1 << i));
        table[mask] = true;
    }
    table
}

#[test]
fn shattering_checker_agrees_with_random_caps() {
    let mut rng = task_rng(314, 0);
    let mut disagreements = Vec::new();
    for case in 0..100u64 {
        let d = 1 + (case % 2) as usize;
        let m = rng.gen_range(d + 1..=d + 3);
        let pts: Vec<SpherePoint> = (0..m).map(|_| uniform_point(d, &mut rng)).collect();
        let label = rng.gen_range(0..1usize << m);
        let exact = cap_labelings(&pts, d).unwrap();
        let sampled = sampled_labelings(&pts, d, 1_000_000, 1000 + case);
        // anything a random cap realizes must be found by the checker
        for mask in 0..exact.len() {
            assert!(!sampled[mask] || exact[mask], "case {case}: checker missed {mask:b}");
        }
        if exact[label] != sampled[label] {
            disagreements.push((case, label));
        }
    }
    assert!(disagreements.is_empty(), "{disagreements:?}");
}

#[test]
fn vc_dimension_of_caps() {
    let r = vc_dimension_experiment(1, 500, 1).unwrap();
    assert!(r.verdicts["found_shattered_3_set"] && r.verdicts["no_shattered_4_set"]);
    let r = vc_dimension_experiment(2, 200, 1).unwrap();
    assert!(r.verdicts["found_shattered_4_set"] && r.verdicts["no_shattered_5_set"]);
}

#[test]
fn behw_tail_is_an_envelope() {
    let r = BehwConfig { d: 1, n: 50, reps: 200, grid: 20, seed: 6 }.run().unwrap();
    assert_eq!(r.verdicts.len(), 20);
    assert!(r.passed(), "{:?}", r.verdicts);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let configs = [
        ExperimentConfig::CouponTail(CouponConfig { ell: 20, n: 60, reps: 2000, seed: 1 }),
        ExperimentConfig::PartitionEmptiness(PartitionConfig { d: 2, n: 30, reps: 1000, seed: 2 }),
        ExperimentConfig::ExpectedDispersion(ExpDispConfig::new(1, 40, 40, Estimator::Oracle, 3)),
        ExperimentConfig::VcDimension(VcConfig { d: 2, trials: 50, seed: 4 }),
        ExperimentConfig::BehwEnvelope(BehwConfig { d: 1, n: 20, reps: 50, grid: 5, seed: 5 }),
    ];
    for cfg in configs {
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let many = rayon::ThreadPoolBuilder::new().num_threads(8).build().unwrap();
        let a = one.install(|| cfg.run().unwrap());
        let b = many.install(|| cfg.run().unwrap());
        assert_eq!(a, b);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
