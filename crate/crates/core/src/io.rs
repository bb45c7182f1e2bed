//! Point-set files and run records.
//!
//! Point sets are CSV: `#`-prefixed header lines, then one point per row
//! with `d + 1` comma-separated coordinates.
//!
//! ```text
//! # sphdisp pointset v1
//! # d=2
//! # n=3
//! # label=example
//! 1,0,0
//! 0,1,0
//! 0,0,1
//! ```
//!
//! Coordinates are written in shortest round-trip form, so a write/read
//! cycle reproduces every bit. Rows are renormalized on load; a row whose
//! norm is off by more than [`RENORM_WARN`] produces a warning.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::sphere::SpherePoint;

pub const POINTSET_MAGIC: &str = "sphdisp pointset";
pub const POINTSET_VERSION: u32 = 1;
/// Norm deviation above which loading warns.
pub const RENORM_WARN: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct PointSetFile {
    pub version: u32,
    pub d: usize,
    pub label: Option<String>,
    pub points: Vec<SpherePoint>,
}

impl PointSetFile {
    pub fn new(d: usize, points: Vec<SpherePoint>, label: Option<String>) -> Self {
        Self { version: POINTSET_VERSION, d, label, points }
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# {POINTSET_MAGIC} v{}", self.version)?;
        writeln!(w, "# d={}", self.d)?;
        writeln!(w, "# n={}", self.points.len())?;
        if let Some(label) = &self.label {
            writeln!(w, "# label={label}")?;
        }
        for p in &self.points {
            let row: Vec<String> = p.coords().iter().map(|x| x.to_string()).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    /// Parses a point set. Returns the file and any renormalization warnings.
    pub fn read_from<R: BufRead>(r: R) -> Result<(Self, Vec<String>)> {
        let mut version = None;
        let mut d: Option<usize> = None;
        let mut n: Option<usize> = None;
        let mut label = None;
        let mut points = Vec::new();
        let mut warnings = Vec::new();
        for (idx, line) in r.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::Io(e.to_string()))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |msg: String| Error::Parse { line: lineno, msg };
            if let Some(h) = line.strip_prefix('#') {
                let h = h.trim();
                if let Some(v) = h.strip_prefix(POINTSET_MAGIC) {
                    let v = v.trim().trim_start_matches('v');
                    version = Some(v.parse::<u32>().map_err(|_| parse_err(format!("bad version '{v}'")))?);
                } else if let Some((key, value)) = h.split_once('=') {
                    let value = value.trim();
                    match key.trim() {
                        "d" => d = Some(value.parse().map_err(|_| parse_err(format!("bad d '{value}'")))?),
                        "n" => n = Some(value.parse().map_err(|_| parse_err(format!("bad n '{value}'")))?),
                        "label" => label = Some(value.to_string()),
                        _ => {}
                    }
                }
                continue;
            }
            let row = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
                .map_err(|e| parse_err(e.to_string()))?;
            if row.len() < 2 {
                return Err(parse_err(format!("a row needs at least 2 coordinates, got {}", row.len())));
            }
            let dim = *d.get_or_insert(row.len() - 1);
            if row.len() != dim + 1 {
                return Err(parse_err(format!("expected {} coordinates, got {}", dim + 1, row.len())));
            }
            let norm = linalg::norm(&row);
            if (norm - 1.0).abs() > RENORM_WARN {
                warnings.push(format!("line {lineno}: norm {norm} renormalized"));
            }
            points.push(SpherePoint::new(&row).map_err(|e| parse_err(e.to_string()))?);
        }
        if let Some(v) = version {
            if v != POINTSET_VERSION {
                return Err(Error::Parse { line: 1, msg: format!("unsupported version {v}") });
            }
        }
        let d = d.ok_or_else(|| Error::Parse { line: 0, msg: "no dimension: add '# d=' or a data row".into() })?;
        if d < 1 {
            return Err(Error::DimensionTooSmall { len: d + 1 });
        }
        if let Some(n) = n {
            if n != points.len() {
                return Err(Error::Parse { line: 0, msg: format!("header says n={n}, found {} rows", points.len()) });
            }
        }
        Ok((Self { version: POINTSET_VERSION, d, label, points }, warnings))
    }

    pub fn load(path: &Path) -> Result<(Self, Vec<String>)> {
        let f = fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::read_from(BufReader::new(f))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_csv().as_bytes())
    }
}

/// Writes through a temporary sibling file and renames, so readers never
/// see a half-written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(format!("{}: {e}", path.display()));
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    fs::write(&tmp, bytes).map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

fn unix_millis() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timestamps {
    pub started_unix_ms: u64,
    pub finished_unix_ms: u64,
}

/// Everything needed to reproduce and audit one run. Replaying `config`
/// through the same subcommand must give back `payload` exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub timestamps: Timestamps,
    pub payload: serde_json::Value,
    pub verdicts: BTreeMap<String, bool>,
}

impl RunRecord {
    /// Starts a record; call [`RunRecord::finish`] once the payload is known.
    pub fn start(
        tool: &str,
        version: &str,
        subcommand: &str,
        config: serde_json::Value,
        seed: Option<u64>,
    ) -> Self {
        let now = unix_millis();
        Self {
            tool: tool.into(),
            version: version.into(),
            subcommand: subcommand.into(),
            config,
            seed,
            timestamps: Timestamps { started_unix_ms: now, finished_unix_ms: now },
            payload: serde_json::Value::Null,
            verdicts: BTreeMap::new(),
        }
    }

    pub fn finish(mut self, payload: serde_json::Value, verdicts: BTreeMap<String, bool>) -> Self {
        self.payload = payload;
        self.verdicts = verdicts;
        self.timestamps.finished_unix_ms = unix_millis();
        self
    }

    pub fn passed(&self) -> bool {
        self.verdicts.values().all(|&v| v)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("records serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&s)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut s = self.to_json();
        s.push('\n');
        write_atomic(path, s.as_bytes())
    }

    /// Same run content, ignoring timestamps.
    pub fn same_content(&self, other: &RunRecord) -> bool {
        let strip = |r: &RunRecord| RunRecord { timestamps: Timestamps { started_unix_ms: 0, finished_unix_ms: 0 }, ..r.clone() };
        strip(self) == strip(other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::sample_uniform_sphere;

    #[test]
    fn csv_roundtrip_is_exact() {
        let pts = sample_uniform_sphere(3, 50, 12);
        let f = PointSetFile::new(3, pts.clone(), Some("random".into()));
        let text = f.to_csv();
        assert!(text.starts_with("# sphdisp pointset v1\n# d=3\n# n=50\n# label=random\n"));
        let (back, warnings) = PointSetFile::read_from(text.as_bytes()).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(back, f);
    }

    #[test]
    fn loader_renormalizes_and_warns() {
        let (f, w) = PointSetFile::read_from("2,0\n0,1.0000000001\n".as_bytes()).unwrap();
        assert_eq!(f.d, 1);
        assert_eq!(f.points[0].coords(), &[1.0, 0.0]);
        assert_eq!(w.len(), 1);
        assert!(w[0].starts_with("line 1"));
    }

    #[test]
    fn loader_rejects_bad_input() {
        let bad = [
            "# d=2\n1,0\n",
            "# n=2\n1,0,0\n",
            "1,0,0\n1,0\n",
            "1,x,0\n",
            "0,0,0\n",
            "# sphdisp pointset v9\n1,0\n",
            "# label=nothing\n",
        ];
        for text in bad {
            assert!(PointSetFile::read_from(text.as_bytes()).is_err(), "{text:?}");
        }
        let (empty, _) = PointSetFile::read_from("# d=2\n# n=0\n".as_bytes()).unwrap();
        assert!(empty.points.is_empty());
    }

    #[test]
    fn record_roundtrip() {
        let rec = RunRecord::start("t", "0", "coupon", serde_json::json!({"ell": 3}), Some(4))
            .finish(serde_json::json!({"x": 0.1 + 0.2}), BTreeMap::from([("ok".to_string(), true)]));
        let back = RunRecord::from_json(&rec.to_json()).unwrap();
        assert_eq!(back, rec);
        assert!(back.passed());
        let mut later = back.clone();
        later.timestamps.finished_unix_ms += 1000;
        assert!(later.same_content(&rec));
    }
}
