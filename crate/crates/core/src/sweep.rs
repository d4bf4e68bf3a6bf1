//! Sweep records and their on-disk forms.
//!
//! A coupling sweep is written as a CSV table with one row per watched
//! eigenvalue plus a JSON sidecar holding everything that does not fit the
//! table (model, grid, detected transitions, provenance). Floats are written
//! with 17 significant digits so the pair reads back bit-for-bit.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const E3_CSV_HEADER: [&str; 5] = ["g", "index", "re_lambda", "im_lambda", "is_complex_pair"];

pub const SO3_CSV_HEADER: [&str; 8] = ["b", "c", "m", "branch", "re_lambda", "im_lambda", "is_real", "marginal"];

/// Float in scientific notation with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelTag {
    E3 { m: i32 },
    So3 { ell: u32, c_mode: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub trunc: Option<usize>,
    pub window: Option<usize>,
    pub im_threshold: f64,
    pub version: String,
}

/// Watched eigenvalues at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub param: f64,
    pub eigenvalues: Vec<Complex64>,
    pub is_complex: Vec<bool>,
    pub n_real: usize,
    pub n_complex_pairs: usize,
}

impl SweepPoint {
    pub fn new(param: f64, eigenvalues: Vec<Complex64>, is_complex: Vec<bool>) -> Self {
        assert_eq!(eigenvalues.len(), is_complex.len());
        let n_complex = is_complex.iter().filter(|&&c| c).count();
        Self {
            param,
            n_real: eigenvalues.len() - n_complex,
            n_complex_pairs: n_complex / 2,
            eigenvalues,
            is_complex,
        }
    }
}

/// Adjacent grid points between which the pair count changed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectedTransition {
    pub lower: f64,
    pub upper: f64,
    pub pairs_before: usize,
    pub pairs_after: usize,
}

pub fn detect_transitions(points: &[SweepPoint]) -> Vec<DetectedTransition> {
    points
        .windows(2)
        .filter(|w| w[0].n_complex_pairs != w[1].n_complex_pairs)
        .map(|w| DetectedTransition {
            lower: w[0].param,
            upper: w[1].param,
            pairs_before: w[0].n_complex_pairs,
            pairs_after: w[1].n_complex_pairs,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    #[serde(flatten)]
    pub model: ModelTag,
    pub grid: Vec<f64>,
    pub points: Vec<SweepPoint>,
    pub transitions: Vec<DetectedTransition>,
    pub provenance: Provenance,
}

/// Everything in a [`SweepResult`] except the per-point eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    #[serde(flatten)]
    pub model: ModelTag,
    pub columns: Vec<String>,
    pub grid: Vec<f64>,
    pub transitions: Vec<DetectedTransition>,
    pub provenance: Provenance,
}

/// `out.csv` → `out.meta.json`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta.json")
}

impl SweepResult {
    pub fn metadata(&self) -> SweepMetadata {
        SweepMetadata {
            model: self.model.clone(),
            columns: E3_CSV_HEADER.iter().map(|s| s.to_string()).collect(),
            grid: self.grid.clone(),
            transitions: self.transitions.clone(),
            provenance: self.provenance.clone(),
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(E3_CSV_HEADER)?;
        for p in &self.points {
            for (k, (z, c)) in p.eigenvalues.iter().zip(&p.is_complex).enumerate() {
                w.write_record([
                    fmt_f64(p.param),
                    k.to_string(),
                    fmt_f64(z.re),
                    fmt_f64(z.im),
                    c.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Rebuild a result from its CSV table and metadata.
    pub fn read_csv<R: Read>(input: R, meta: SweepMetadata) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        if header != E3_CSV_HEADER {
            return Err(Error::Format(format!("unexpected header {header:?}")));
        }
        let mut points: Vec<SweepPoint> = Vec::new();
        let mut current: Option<(f64, Vec<Complex64>, Vec<bool>)> = None;
        for rec in rdr.records() {
            let rec = rec?;
            let field = |i: usize| -> Result<&str> {
                rec.get(i)
                    .ok_or_else(|| Error::Format(format!("short row at {:?}", rec.position())))
            };
            let num = |i: usize| -> Result<f64> {
                field(i)?
                    .parse()
                    .map_err(|e| Error::Format(format!("bad float {:?}: {e}", rec.get(i))))
            };
            let g = num(0)?;
            let index: usize = field(1)?
                .parse()
                .map_err(|e| Error::Format(format!("bad index: {e}")))?;
            let z = Complex64::new(num(2)?, num(3)?);
            let flag: bool = field(4)?
                .parse()
                .map_err(|e| Error::Format(format!("bad flag: {e}")))?;

            match &mut current {
                Some((cg, ev, fl)) if cg.to_bits() == g.to_bits() => {
                    if index != ev.len() {
                        return Err(Error::Format(format!("index {index} out of sequence at g = {g}")));
                    }
                    ev.push(z);
                    fl.push(flag);
                }
                _ => {
                    if index != 0 {
                        return Err(Error::Format(format!("point g = {g} does not start at index 0")));
                    }
                    if let Some((cg, ev, fl)) = current.take() {
                        points.push(SweepPoint::new(cg, ev, fl));
                    }
                    current = Some((g, vec![z], vec![flag]));
                }
            }
        }
        if let Some((cg, ev, fl)) = current {
            points.push(SweepPoint::new(cg, ev, fl));
        }
        // a point without watched eigenvalues has no rows; the grid fills it in
        let mut rows = points.into_iter().peekable();
        let mut points = Vec::with_capacity(meta.grid.len());
        for &g in &meta.grid {
            match rows.next_if(|p| p.param.to_bits() == g.to_bits()) {
                Some(p) => points.push(p),
                None => points.push(SweepPoint::new(g, Vec::new(), Vec::new())),
            }
        }
        if rows.next().is_some() {
            return Err(Error::Format("CSV rows do not match the metadata grid".into()));
        }
        Ok(Self {
            model: meta.model,
            grid: meta.grid,
            points,
            transitions: meta.transitions,
            provenance: meta.provenance,
        })
    }

    /// Write `path` as CSV and its metadata next to it.
    pub fn save_csv(&self, path: &Path) -> Result<()> {
        self.write_csv(BufWriter::new(File::create(path)?))?;
        let meta = serde_json::to_string_pretty(&self.metadata())?;
        std::fs::write(sidecar_path(path), meta + "\n")?;
        Ok(())
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        let meta: SweepMetadata = serde_json::from_slice(&std::fs::read(sidecar_path(path))?)?;
        Self::read_csv(File::open(path)?, meta)
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    pub fn load_json(path: &Path) -> Result<Self> {
        Ok(serde_json::from_slice(&std::fs::read(path)?)?)
    }
}

/// Branch label for one analytic eigenvalue of the SO(3) block model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// The uncoupled `(ℓ+1)(ℓ+2)` level of `|ℓ+1, ±(ℓ+1)⟩`.
    Top,
    Plus,
    Minus,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Top => "top",
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct So3Row {
    pub b: f64,
    pub c: f64,
    /// Azimuthal index; for [`Branch::Top`] this is `±(ℓ+1)`.
    pub m: i32,
    pub branch: Branch,
    pub lambda: Complex64,
    pub is_real: bool,
    pub marginal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct So3SweepResult {
    pub ell: u32,
    pub c_mode: String,
    pub b_grid: Vec<f64>,
    pub rows: Vec<So3Row>,
    pub version: String,
}

impl So3SweepResult {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(SO3_CSV_HEADER)?;
        for r in &self.rows {
            w.write_record([
                fmt_f64(r.b),
                fmt_f64(r.c),
                r.m.to_string(),
                r.branch.as_str().to_string(),
                fmt_f64(r.lambda.re),
                fmt_f64(r.lambda.im),
                r.is_real.to_string(),
                r.marginal.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        self.write_csv(BufWriter::new(File::create(path)?))?;
        let meta = serde_json::json!({
            "model": "so3",
            "ell": self.ell,
            "c_mode": self.c_mode,
            "columns": SO3_CSV_HEADER,
            "b_grid": self.b_grid,
            "version": self.version,
        });
        std::fs::write(sidecar_path(path), serde_json::to_string_pretty(&meta)? + "\n")?;
        Ok(())
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}
