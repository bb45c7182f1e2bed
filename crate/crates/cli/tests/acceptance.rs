//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runs as a plain binary (`harness = false`) so the
//! report is always printed.

use std::f64::consts::{E, LN_2, PI};
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use sphdisp_core::bounds::{
    behw_tail, cap_vc, coupon_safe_n, expected_lower, expected_upper_sphere, inverse_min_lower,
    lemma_constant, lemma_threshold, thm_a_lower,
};
use sphdisp_core::certificates::{best_certificate, verify_certificate, CERT_TOL};
use sphdisp_core::dispersion::{
    check_monotonicity, dispersion_grid_oracle, largest_empty_cap_exact, OracleFamily,
};
use sphdisp_core::experiments::{
    coupon_tail_sim, mc_expected_dispersion, sample_uniform_sphere, vc_dimension_experiment,
    BehwConfig, Estimator,
};
use sphdisp_core::io::RunRecord;
use sphdisp_core::rng::{task_rng, uniform_point};
use sphdisp_core::{cap_measure, SpherePoint};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_time(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t <= limit, || format!("took {t:.1?}, limit {limit:?}"))
}

// ---------------------------------------------------------------- 1

#[allow(clippy::too_many_arguments)]
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (flm, frm) = (f(0.5 * (a + m)), f(0.5 * (m + b)));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

fn quad(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    simpson(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), 1e-14, 50)
}

fn cap_measure_exactness() -> Check {
    let start = Instant::now();
    let mut worst_closed: f64 = 0.0;
    for i in 0..1000 {
        let t = -1.0 + 2.0 * i as f64 / 999.0;
        worst_closed = worst_closed
            .max((cap_measure(2, t).unwrap() - (1.0 - t) / 2.0).abs())
            .max((cap_measure(1, t).unwrap() - t.acos() / PI).abs());
    }
    ensure(worst_closed <= 1e-12, || format!("closed-form error {worst_closed:e}"))?;
    let mut rng = task_rng(0xACCE, 1);
    let mut worst_quad: f64 = 0.0;
    for d in 1..=20 {
        let f = |th: f64| th.sin().powi(d as i32 - 1);
        let total = quad(&f, 0.0, PI);
        for _ in 0..100 {
            let t: f64 = rng.gen_range(-1.0..1.0);
            let q = quad(&f, 0.0, t.acos()) / total;
            worst_quad = worst_quad.max((cap_measure(d, t).unwrap() - q).abs());
        }
    }
    ensure(worst_quad <= 1e-9, || format!("quadrature error {worst_quad:e}"))?;
    within_time(start, Duration::from_secs(10))?;
    Ok(format!("closed forms {worst_closed:.1e}, quadrature {worst_quad:.1e}"))
}

// ---------------------------------------------------------------- 2

fn certificate_sweep() -> Check {
    let start = Instant::now();
    let mut rng = task_rng(0xACCE, 2);
    let mut failures = Vec::new();
    for i in 0..1000u64 {
        let d = rng.gen_range(1..=8);
        let n = rng.gen_range(1..=200);
        let pts = sample_uniform_sphere(d, n, 10_000 + i);
        let cert = best_certificate(&pts, d).map_err(|e| format!("instance {i}: {e}"))?;
        let r = verify_certificate(&cert, &pts, CERT_TOL);
        if !(r.passed && r.meets_theorem) {
            failures.push((i, d, n));
        }
    }
    ensure(failures.is_empty(), || format!("{} failures, first {:?}", failures.len(), failures.first()))?;
    within_time(start, Duration::from_secs(60))?;
    Ok("1000 instances, 0 failures".into())
}

// ---------------------------------------------------------------- 3

fn bound_fixtures() -> Check {
    for (n, d, want) in [(5, 10, 1.0 / 2.0), (15, 7, 1.0 / 4.0), (25, 10, 1.0 / 14.0), (40, 5, 1.0 / 37.0)] {
        let got = thm_a_lower(n, d).value;
        ensure(got == want, || format!("disp* lower ({n}, {d}) = {got}, want {want}"))?;
    }
    let inv = inverse_min_lower(0.1, 5).value;
    ensure(inv == 13.0, || format!("N(0.1, 5) = {inv}"))?;
    let (c1, c2) = (64.0 / LN_2, E / 32.0);
    let a = lemma_constant(c1, c2);
    ensure(a <= 96.0, || format!("a = {a}"))?;
    // the threshold is built from that same constant
    let eps = 0.01;
    let x0 = lemma_threshold(c1, c2, 1, eps).map_err(|e| e.to_string())?;
    ensure(x0 == (a / eps) * (a / eps).ln(), || format!("threshold {x0} does not use a = {a}"))?;
    Ok(format!("a = {a:.4}"))
}

// ---------------------------------------------------------------- 4

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

fn coupon_lemma() -> Check {
    let start = Instant::now();
    let n = coupon_safe_n(100).map_err(|e| e.to_string())?;
    ensure(n == 318, || format!("safe n = {n}"))?;
    let est = coupon_tail_sim(100, n, 10_000, 0xACCE).map_err(|e| e.to_string())?.estimates["tail_prob"];
    ensure(est.value > 0.5 - 3.0 * est.stderr, || format!("tail {} +- {}", est.value, est.stderr))?;
    let small = coupon_tail_sim(10, 25, 10_000, 0xACCF).map_err(|e| e.to_string())?.estimates["tail_prob"];
    let exact = coupon_tail_exact(10, 25);
    let sigma = (exact * (1.0 - exact) / 10_000.0).sqrt();
    ensure((small.value - exact).abs() <= 3.0 * sigma, || format!("l=10: {} vs {exact}", small.value))?;
    within_time(start, Duration::from_secs(30))?;
    Ok(format!("P[tau > 318] = {:.4} +- {:.4}; l=10 {:.4} vs {exact:.4}", est.value, est.stderr, small.value))
}

// ---------------------------------------------------------------- 5

fn expected_sandwich() -> Check {
    let start = Instant::now();
    let mut detail = Vec::new();
    for (i, n) in [64usize, 256, 1024].into_iter().enumerate() {
        let r = mc_expected_dispersion(1, n, 100, Estimator::Oracle, 0xACCE + i as u64).map_err(|e| e.to_string())?;
        let m = r.estimates["mean_disp"];
        let err = r.bound_values["grid_error"];
        let lo = expected_lower(n as u64).value - 3.0 * m.stderr - err;
        let hi = expected_upper_sphere(n as u64, 1).value.min(1.0) + 3.0 * m.stderr;
        ensure(lo <= m.value && m.value <= hi, || format!("n={n}: {} not in [{lo}, {hi}]", m.value))?;
        detail.push(format!("n={n}: {:.5}", m.value));
    }
    within_time(start, Duration::from_secs(300))?;
    Ok(detail.join(", "))
}

// ---------------------------------------------------------------- 6

fn vc_dimension() -> Check {
    let start = Instant::now();
    for (d, trials) in [(1usize, 500u64), (2, 200)] {
        let r = vc_dimension_experiment(d, trials, 0xACCE).map_err(|e| e.to_string())?;
        let vc = cap_vc(d as u64);
        ensure(vc == d as u64 + 2, || format!("vc({d}) = {vc}"))?;
        let found = r.verdicts[&format!("found_shattered_{vc}_set")];
        let none = r.verdicts[&format!("no_shattered_{}_set", vc + 1)];
        ensure(found && none, || format!("d={d}: found {vc}-set {found}, no {}-set {none}", vc + 1))?;
    }
    within_time(start, Duration::from_secs(120))?;
    Ok("d=1: 3 yes 4 no; d=2: 4 yes 5 no".into())
}

// ---------------------------------------------------------------- 7

fn behw_envelope() -> Check {
    let r = BehwConfig { d: 1, n: 50, reps: 200, grid: 20, seed: 0xACCE }.run().map_err(|e| e.to_string())?;
    let mut checked = 0;
    for k in 1..=20 {
        let t = k as f64 / 20.0;
        let est = r.estimates[&format!("exceedance[t={t:.3}]")];
        let bound = behw_tail(50, 3, t).map_err(|e| e.to_string())?;
        ensure(est.value <= bound + 3.0 * est.stderr, || format!("t={t}: {} > {bound}", est.value))?;
        checked += 1;
    }
    ensure(checked == 20, || format!("{checked} thresholds"))?;
    Ok("20 thresholds under the tail bound".into())
}

// ---------------------------------------------------------------- 8

fn octahedron() -> Vec<SpherePoint> {
    let mut pts = Vec::new();
    for i in 0..3 {
        for s in [1.0, -1.0] {
            let mut v = [0.0; 3];
            v[i] = s;
            pts.push(SpherePoint::new(&v).unwrap());
        }
    }
    pts
}

fn engine_cross_validation() -> Check {
    let pts = octahedron();
    let exact = largest_empty_cap_exact(&pts, 2).map_err(|e| e.to_string())?.lower_value;
    let want = (1.0 - 1.0 / 3f64.sqrt()) / 2.0;
    ensure((exact - want).abs() <= 1e-10, || format!("octahedron {exact} vs {want}"))?;
    let in_bracket = |pts: &[SpherePoint], exact: f64| -> Result<bool, String> {
        let o = dispersion_grid_oracle(pts, 2, 60, OracleFamily::Caps).map_err(|e| e.to_string())?;
        Ok(o.lower_value <= exact + 1e-12 && exact <= o.upper_value.unwrap())
    };
    ensure(in_bracket(&pts, exact)?, || "octahedron outside oracle bracket".into())?;
    let mut rng = task_rng(0xACCE, 8);
    for i in 0..50u64 {
        let n = rng.gen_range(1..=12);
        let pts = sample_uniform_sphere(2, n, 20_000 + i);
        let exact = largest_empty_cap_exact(&pts, 2).map_err(|e| e.to_string())?.lower_value;
        ensure(in_bracket(&pts, exact)?, || format!("set {i} (n={n}): {exact} outside bracket"))?;
    }
    Ok("octahedron exact; 50/50 random sets in bracket".into())
}

// ---------------------------------------------------------------- 9

fn monotonicity() -> Check {
    let mut rng = task_rng(0xACCE, 9);
    let mut failures = 0;
    for _ in 0..200 {
        let n = rng.gen_range(0..=30);
        let pts: Vec<SpherePoint> = (0..n).map(|_| uniform_point(1, &mut rng)).collect();
        let q = uniform_point(1, &mut rng);
        if !check_monotonicity(&pts, &q, 1, 360).map_err(|e| e.to_string())? {
            failures += 1;
        }
    }
    ensure(failures == 0, || format!("{failures} failures"))?;
    Ok("200 instances, 0 failures".into())
}

// ---------------------------------------------------------------- 10

fn sphdisp(threads: usize, args: &[&str]) -> Result<i32, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_sphdisp"))
        .arg("--threads")
        .arg(threads.to_string())
        .args(args)
        .env_remove("SPHDISP_OUT_DIR")
        .output()
        .map_err(|e| e.to_string())?;
    let code = out.status.code().unwrap_or(-1);
    if code >= 2 {
        return Err(format!("{args:?}: exit {code}: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(code)
}

fn cli_replay() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let runs: [(&str, &[&str]); 6] = [
        ("expdisp", &["expdisp", "--d", "1", "--n", "64", "--reps", "40", "--seed", "1", "--estimator", "oracle"]),
        ("coupon", &["coupon", "--ell", "50", "--reps", "2000", "--seed", "2"]),
        ("partition", &["partition", "--d", "2", "--n", "40", "--reps", "1000", "--seed", "3"]),
        ("envelope", &["envelope", "--d", "1", "--n", "30", "--reps", "100", "--seed", "4"]),
        ("vc", &["vc", "--d", "2", "--trials", "40", "--seed", "5"]),
        ("search", &["expdisp", "--d", "2", "--n", "12", "--reps", "30", "--seed", "6", "--estimator", "search"]),
    ];
    for (name, args) in runs {
        let rec = |t: usize| dir.path().join(format!("{name}-{t}.json"));
        for t in [1, 8] {
            let path = rec(t);
            let mut full = args.to_vec();
            full.extend(["--out", path.to_str().unwrap()]);
            sphdisp(t, &full)?;
        }
        let load = |p: &Path| RunRecord::load(p).map_err(|e| e.to_string());
        let (one, eight) = (load(&rec(1))?, load(&rec(8))?);
        // the configs differ only in the --out path
        let same = one.payload == eight.payload && one.verdicts == eight.verdicts && one.seed == eight.seed;
        ensure(same, || format!("{name}: 1 and 8 threads differ"))?;
        for (t, other) in [(8, 1), (1, 8)] {
            let code = sphdisp(t, &["replay", "--in", rec(other).to_str().unwrap()])?;
            ensure(code == 0, || format!("{name}: replay of the {other}-thread record at {t} threads differs"))?;
        }
    }
    Ok("6 experiment records identical at 1 and 8 threads".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("cap measure exactness", cap_measure_exactness),
        ("certificate sweep", certificate_sweep),
        ("bound fixtures", bound_fixtures),
        ("coupon tail", coupon_lemma),
        ("expected dispersion sandwich", expected_sandwich),
        ("vc dimension of caps", vc_dimension),
        ("tail envelope", behw_envelope),
        ("dispersion engine cross-validation", engine_cross_validation),
        ("monotonicity", monotonicity),
        ("replay reproducibility", cli_replay),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.1} s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.1} s): {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
