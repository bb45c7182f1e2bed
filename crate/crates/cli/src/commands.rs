//! Subcommand arguments and their pure computations.
//!
//! Every argument struct doubles as the config echo stored in a run record,
//! so `replay` can deserialize it and call the same `compute` again. Nothing
//! in `compute` writes files or reads the clock.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use sphdisp_core::bounds::{
    cap_vc, coupon_safe_n, expected_lower, expected_upper_generic, expected_upper_sphere,
    inverse_expected_bounds, inverse_min_lower, lemma_threshold, min_disp_branches,
    partition_count, slice_vc_upper, thm_a_lower, BoundValue,
};
use sphdisp_core::certificates::{
    best_certificate, case1_certificate, case2_certificate, case3_certificate, case4_certificate,
    verify_certificate, Certificate, CERT_TOL,
};
use sphdisp_core::dispersion::{
    dispersion_grid_oracle, exact_slice_dispersion_s1, largest_empty_cap_exact,
    largest_empty_slice_search, DispersionResult, OracleFamily, SearchConfig,
};
use sphdisp_core::experiments::{
    sample_uniform_sphere, BehwConfig, CouponConfig, Estimator, ExpDispConfig, ExperimentConfig,
    ExperimentResult, PartitionConfig, VcConfig,
};
use sphdisp_core::io::PointSetFile;
use sphdisp_core::rng::split_seed;
use sphdisp_core::SpherePoint;

use crate::error::{CliError, CliResult};
use crate::render;

/// Result of one subcommand, before anything is written.
pub struct Outcome {
    pub seed: Option<u64>,
    pub payload: Value,
    pub verdicts: BTreeMap<String, bool>,
    /// Human-readable summary printed without `--json`.
    pub text: String,
    /// Non-JSON output file (point-set CSV, plot data).
    pub artifact: Option<(PathBuf, String)>,
    pub warnings: Vec<String>,
}

impl Outcome {
    fn new(payload: Value, text: String) -> Self {
        Self { seed: None, payload, verdicts: BTreeMap::new(), text, artifact: None, warnings: Vec::new() }
    }

    fn from_experiment(res: &ExperimentResult) -> Self {
        Self {
            seed: Some(res.config.seed()),
            payload: to_value(res),
            verdicts: res.verdicts.clone(),
            text: render::experiment(res),
            artifact: None,
            warnings: Vec::new(),
        }
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("results serialize")
}

fn load_points(path: &Path) -> CliResult<(PointSetFile, Vec<String>)> {
    Ok(PointSetFile::load(path)?)
}

/// A subcommand that can be run now and replayed later from its config.
pub trait Command: Serialize + for<'de> Deserialize<'de> {
    const NAME: &'static str;

    fn compute(&self) -> CliResult<Outcome>;

    /// Where the JSON run record goes, if requested.
    fn record_path(&self) -> Option<&Path> {
        None
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GenArgs {
    /// Sphere dimension (points live in R^{d+1}).
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: u64,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub label: Option<String>,
}

impl Command for GenArgs {
    const NAME: &'static str = "gen";

    fn compute(&self) -> CliResult<Outcome> {
        if self.d < 1 {
            return Err(CliError::Usage("--d must be at least 1".into()));
        }
        let points = sample_uniform_sphere(self.d, self.n, self.seed);
        let label = self.label.clone().or_else(|| Some(format!("uniform seed={}", self.seed)));
        let file = PointSetFile::new(self.d, points, label);
        let coords: Vec<&[f64]> = file.points.iter().map(SpherePoint::coords).collect();
        let payload = json!({ "d": self.d, "n": self.n, "label": file.label, "points": coords });
        let text = format!("wrote {} points on S^{} to {}\n", self.n, self.d, self.out.display());
        let mut out = Outcome::new(payload, text);
        out.seed = Some(self.seed);
        out.artifact = Some((self.out.clone(), file.to_csv()));
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyArg {
    Caps,
    Slices,
}

impl From<FamilyArg> for OracleFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Caps => OracleFamily::Caps,
            FamilyArg::Slices => OracleFamily::Slices,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DispArgs {
    /// Point-set CSV.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Run the grid oracle (d <= 2).
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, default_value_t = 360)]
    pub resolution: usize,
    #[arg(long, value_enum, default_value_t = FamilyArg::Slices)]
    pub family: FamilyArg,
    /// Run the multistart slice search.
    #[arg(long)]
    pub search: bool,
    #[arg(long, default_value_t = 16)]
    pub starts: usize,
    /// Seed of the search starts.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also compute the exact largest empty cap.
    #[arg(long)]
    pub exact_cap: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Command for DispArgs {
    const NAME: &'static str = "disp";

    fn record_path(&self) -> Option<&Path> {
        self.out.as_deref()
    }

    fn compute(&self) -> CliResult<Outcome> {
        let (file, warnings) = load_points(&self.input)?;
        let (pts, d) = (&file.points, file.d);
        let mut results: BTreeMap<&str, DispersionResult> = BTreeMap::new();
        let auto = !self.oracle && !self.search && !self.exact_cap;
        if self.oracle {
            results.insert("oracle", dispersion_grid_oracle(pts, d, self.resolution, self.family.into())?);
        }
        if self.search || (auto && d > 1) {
            let cfg = SearchConfig { starts: self.starts, seed: self.seed, ..SearchConfig::default() };
            results.insert("search", largest_empty_slice_search(pts, d, &cfg)?);
        }
        if auto && d == 1 {
            results.insert("exact", exact_slice_dispersion_s1(pts)?);
        }
        if self.exact_cap {
            results.insert("exact_cap", largest_empty_cap_exact(pts, d)?);
        }
        let payload = json!({ "d": d, "n": pts.len(), "results": results });
        let mut out = Outcome::new(payload, render::dispersion(d, pts.len(), &results));
        out.warnings = warnings;
        Ok(out)
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CertArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Construction to use; `auto` picks the best applicable case.
    #[arg(long, default_value = "auto", value_parser = ["auto", "1", "2", "3", "4"])]
    pub case: String,
    /// Verify the certificate against the points.
    #[arg(long)]
    pub verify: bool,
    /// Verify this stored certificate (raw JSON or a `cert` run record)
    /// instead of constructing one.
    #[arg(long)]
    pub certificate: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn load_certificate(path: &Path) -> CliResult<Certificate> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let inner = v.pointer("/payload/certificate").cloned().unwrap_or(v);
    serde_json::from_value(inner).map_err(|e| CliError::Io(format!("{}: not a certificate: {e}", path.display())))
}

impl Command for CertArgs {
    const NAME: &'static str = "cert";

    fn record_path(&self) -> Option<&Path> {
        self.out.as_deref()
    }

    fn compute(&self) -> CliResult<Outcome> {
        let (file, warnings) = load_points(&self.input)?;
        let (pts, d) = (&file.points, file.d);
        let cert = match &self.certificate {
            Some(path) => load_certificate(path)?,
            None => match self.case.as_str() {
                "1" => case1_certificate(pts, d)?,
                "2" => case2_certificate(pts, d)?,
                "3" => case3_certificate(pts, d)?,
                "4" => case4_certificate(pts, d)?,
                _ => best_certificate(pts, d)?,
            },
        };
        let verifying = self.verify || self.certificate.is_some();
        let report = verifying.then(|| verify_certificate(&cert, pts, CERT_TOL));
        let mut verdicts = BTreeMap::new();
        if let Some(r) = &report {
            verdicts.insert("empty".to_string(), r.empty);
            verdicts.insert("measure_ok".to_string(), r.measure_ok);
            verdicts.insert("bound_ok".to_string(), r.bound_ok);
            // an explicitly requested case may sit below the best branch
            if self.case == "auto" && self.certificate.is_none() {
                verdicts.insert("meets_theorem".to_string(), r.meets_theorem);
            }
        }
        let payload = json!({ "d": d, "n": pts.len(), "certificate": cert, "verification": report });
        let mut out = Outcome::new(payload, render::certificate(&cert, report.as_ref()));
        out.verdicts = verdicts;
        out.warnings = warnings;
        Ok(out)
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BoundsArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub d: u64,
    /// Also evaluate the inverse-dispersion bounds at this epsilon.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// One line of the bounds table.
#[derive(Debug, Clone, Serialize)]
pub struct BoundRow {
    pub name: String,
    pub value: f64,
    pub branch: String,
    pub valid: bool,
}

impl BoundRow {
    fn from_bound(name: &str, b: &BoundValue) -> Self {
        Self { name: name.into(), value: b.value, branch: b.branch.clone(), valid: b.valid }
    }

    fn plain(name: &str, value: f64, branch: &str) -> Self {
        Self { name: name.into(), value, branch: branch.into(), valid: true }
    }

    fn failed(name: &str, why: String) -> Self {
        Self { name: name.into(), value: f64::NAN, branch: why, valid: false }
    }
}

/// Rows for every bound that is defined at `(n, d)` (and `eps`).
pub fn bound_rows(n: u64, d: u64, eps: Option<f64>) -> Vec<BoundRow> {
    let mut rows = vec![BoundRow::from_bound("disp* lower", &thm_a_lower(n, d))];
    for (branch, v) in min_disp_branches(n, d) {
        rows.push(BoundRow::plain("  branch", v, branch.name()));
    }
    rows.push(BoundRow::from_bound("E[disp] lower", &expected_lower(n)));
    rows.push(BoundRow::from_bound("E[disp] upper (sphere)", &expected_upper_sphere(n, d)));
    let (slice_vc, slice_branch) = slice_vc_upper(d);
    rows.push(BoundRow::from_bound("E[disp] upper (vc, slices)", &expected_upper_generic(n, slice_vc)));
    rows.push(BoundRow::plain("vc(caps)", cap_vc(d) as f64, "d + 2"));
    rows.push(BoundRow::plain("vc(slices) upper", slice_vc as f64, slice_branch));
    match partition_count(n) {
        Ok(ell) => {
            rows.push(BoundRow::plain("partition count", ell as f64, "ceil((1+e) n / ln n)"));
            match coupon_safe_n(ell) {
                Ok(safe) => rows.push(BoundRow::plain("coupon safe n", safe as f64, "floor((H_l - 2) l)")),
                Err(e) => rows.push(BoundRow::failed("coupon safe n", e.to_string())),
            }
        }
        Err(e) => rows.push(BoundRow::failed("partition count", e.to_string())),
    }
    if let Some(eps) = eps {
        rows.push(BoundRow::from_bound("N(eps) lower", &inverse_min_lower(eps, d)));
        let (lo, hi) = inverse_expected_bounds(eps, d);
        rows.push(BoundRow::from_bound("N~(eps) lower", &lo));
        rows.push(BoundRow::from_bound("N~(eps) upper", &hi));
        let c1 = 64.0 / std::f64::consts::LN_2;
        let c2 = std::f64::consts::E / 32.0;
        match lemma_threshold(c1, c2, d, eps) {
            Ok(x) => rows.push(BoundRow::plain("lemma threshold", x, "d (a/eps) ln(a/eps)")),
            Err(e) => rows.push(BoundRow::failed("lemma threshold", e.to_string())),
        }
    }
    rows
}

impl Command for BoundsArgs {
    const NAME: &'static str = "bounds";

    fn record_path(&self) -> Option<&Path> {
        self.out.as_deref()
    }

    fn compute(&self) -> CliResult<Outcome> {
        if self.n < 1 || self.d < 1 {
            return Err(CliError::Usage("--n and --d must be at least 1".into()));
        }
        let rows = bound_rows(self.n, self.d, self.eps);
        let payload = json!({ "n": self.n, "d": self.d, "eps": self.eps, "rows": rows });
        Ok(Outcome::new(payload, render::bounds(self.n, self.d, &rows)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorArg {
    Oracle,
    Search,
}

impl From<EstimatorArg> for Estimator {
    fn from(e: EstimatorArg) -> Self {
        match e {
            EstimatorArg::Oracle => Estimator::Oracle,
            EstimatorArg::Search => Estimator::Search,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ExpdispArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub reps: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum)]
    pub estimator: EstimatorArg,
    /// Oracle grid resolution (default 720 on S^1, 30 on S^2).
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Search starts per replication.
    #[arg(long)]
    pub starts: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl ExpdispArgs {
    pub fn config(&self) -> ExpDispConfig {
        let mut cfg = ExpDispConfig::new(self.d, self.n, self.reps, self.estimator.into(), self.seed);
        if let Some(m) = self.resolution {
            cfg.resolution = m;
        }
        if let Some(k) = self.starts {
            cfg.starts = k;
        }
        cfg
    }
}

impl Command for ExpdispArgs {
    const NAME: &'static str = "expdisp";

    fn record_path(&self) -> Option<&Path> {
        self.out.as_deref()
    }

    fn compute(&self) -> CliResult<Outcome> {
        Ok(Outcome::from_experiment(&self.config().run()?))
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CouponArgs {
    #[arg(long)]
    pub ell: u64,
    /// Number of draws; defaults to the largest n the harmonic threshold covers.
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub reps: u64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Command for CouponArgs {
    const NAME: &'static str = "coupon";

    fn record_path(&self) -> Option<&Path> {
        self.out.as_deref()
    }

    fn compute(&self) -> CliResult<Outcome> {
        let n = match self.n {
            Some(n) => n,
            None => coupon_safe_n(self.ell)?,
        };
        let cfg = ExperimentConfig::CouponTail(CouponConfig { ell: self.ell, n, reps: self.reps, seed: self.seed });
        Ok(Outcome::from_experiment(&cfg.run()?))
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PartitionArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub reps: u64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Command for PartitionArgs {
    const NAME: &'static str = "partition";

    fn record_path(&self) -> Option<&Path> {
        self.out.as_deref()
    }

    fn compute(&self) -> CliResult<Outcome> {
        let cfg = PartitionConfig { d: self.d, n: self.n, reps: self.reps, seed: self.seed };
        Ok(Outcome::from_experiment(&ExperimentConfig::PartitionEmptiness(cfg).run()?))
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct EnvelopeArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub reps: usize,
    /// Number of thresholds t = k / grid, k = 1..grid.
    #[arg(long, default_value_t = 20)]
    pub grid: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Command for EnvelopeArgs {
    const NAME: &'static str = "envelope";

    fn record_path(&self) -> Option<&Path> {
        self.out.as_deref()
    }

    fn compute(&self) -> CliResult<Outcome> {
        let cfg = BehwConfig { d: self.d, n: self.n, reps: self.reps, grid: self.grid, seed: self.seed };
        Ok(Outcome::from_experiment(&ExperimentConfig::BehwEnvelope(cfg).run()?))
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct VcArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub trials: u64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Command for VcArgs {
    const NAME: &'static str = "vc";

    fn record_path(&self) -> Option<&Path> {
        self.out.as_deref()
    }

    fn compute(&self) -> CliResult<Outcome> {
        let cfg = VcConfig { d: self.d, trials: self.trials, seed: self.seed };
        Ok(Outcome::from_experiment(&ExperimentConfig::VcDimension(cfg).run()?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepArg {
    N,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PlotdataArgs {
    /// Swept parameter.
    #[arg(long, value_enum)]
    pub sweep: SweepArg,
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub from: u64,
    #[arg(long)]
    pub to: u64,
    #[arg(long, default_value_t = 1)]
    pub step: u64,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
    /// Add Monte Carlo columns with this many replications per row.
    #[arg(long, requires = "seed")]
    pub mc_reps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

fn csv_cell(v: f64) -> String {
    if v.is_finite() {
        v.to_string()
    } else {
        String::new()
    }
}

fn bound_cell(b: &BoundValue) -> String {
    if b.valid {
        csv_cell(b.value)
    } else {
        String::new()
    }
}

impl Command for PlotdataArgs {
    const NAME: &'static str = "plotdata";

    fn compute(&self) -> CliResult<Outcome> {
        if self.d < 1 || self.from < 2 || self.to < self.from || self.step == 0 {
            return Err(CliError::Usage("need --d >= 1, 2 <= --from <= --to and --step >= 1".into()));
        }
        let mut header = vec!["n", "thm_a_lower", "expected_lower", "expected_upper_sphere"];
        if self.mc_reps.is_some() {
            header.extend(["mc_mean", "mc_stderr", "mc_grid_error"]);
        }
        let mut csv = header.join(",") + "\n";
        let mut rows = Vec::new();
        let estimator = if self.d <= 2 { Estimator::Oracle } else { Estimator::Search };
        for n in (self.from..=self.to).step_by(self.step as usize) {
            let d = self.d as u64;
            let mut cells =
                vec![n.to_string(), bound_cell(&thm_a_lower(n, d)), bound_cell(&expected_lower(n)), bound_cell(&expected_upper_sphere(n, d))];
            let mut row = json!({
                "n": n,
                "thm_a_lower": thm_a_lower(n, d),
                "expected_lower": expected_lower(n),
                "expected_upper_sphere": expected_upper_sphere(n, d),
            });
            if let (Some(reps), Some(seed)) = (self.mc_reps, self.seed) {
                let cfg = ExpDispConfig::new(self.d, n as usize, reps, estimator, split_seed(seed, n));
                let res = cfg.run()?;
                let mean = res.estimates["mean_disp"];
                let err = res.bound_values.get("grid_error").copied().unwrap_or(0.0);
                cells.extend([csv_cell(mean.value), csv_cell(mean.stderr), csv_cell(err)]);
                row["mc"] = to_value(&res);
            }
            csv.push_str(&cells.join(","));
            csv.push('\n');
            rows.push(row);
        }
        let text = format!("wrote {} rows to {}\n", rows.len(), self.out.display());
        let mut out = Outcome::new(json!({ "rows": rows }), text);
        out.seed = self.seed;
        out.artifact = Some((self.out.clone(), csv));
        Ok(out)
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    /// Run record to replay.
    #[arg(long = "in")]
    pub input: PathBuf,
}
