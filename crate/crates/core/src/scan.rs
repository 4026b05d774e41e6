//! Dissociation-curve scans: the full molecule → integrals → SCF → FCI → report
//! pipeline over a grid of bond lengths, plus CSV/JSON emission.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{build_ao_basis, BasisSet};
use crate::correlation::{correlation_report, rescale_entropy, CorrelationReport};
use crate::error::{Error, Result};
use crate::fci::run_fci;
use crate::integrals::compute_all;
use crate::molecule::{LengthUnit, Molecule};
use crate::scf::{run_rhf, ScfSettings};

pub const DEFAULT_R_MIN: f64 = 0.7;
pub const DEFAULT_R_MAX: f64 = 10.0;
pub const DEFAULT_POINTS: usize = 40;
/// Far point appended to the default grid, used as the reference for rescaling.
pub const DEFAULT_FAR_POINT: f64 = 20.0;

pub const CSV_FIXED_COLUMNS: [&str; 6] = ["R_bohr", "E_HF", "E_FCI", "E_corr", "entropy_bits", "entropy_rescaled"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    Linear,
    Logarithmic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Config(format!("unknown output format `{other}`"))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Csv => "csv",
            Self::Json => "json",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub basis_name: String,
    /// In `unit`.
    pub r_min: f64,
    /// In `unit`.
    pub r_max: f64,
    pub n_points: usize,
    pub grid: GridKind,
    pub unit: LengthUnit,
    /// Extra point in Bohr appended when it lies beyond `r_max`.
    pub far_point: Option<f64>,
    pub output_path: Option<PathBuf>,
    pub format: OutputFormat,
    pub rescale: bool,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            basis_name: "sto-3g".into(),
            r_min: DEFAULT_R_MIN,
            r_max: DEFAULT_R_MAX,
            n_points: DEFAULT_POINTS,
            grid: GridKind::Linear,
            unit: LengthUnit::Bohr,
            far_point: Some(DEFAULT_FAR_POINT),
            output_path: None,
            format: OutputFormat::Csv,
            rescale: false,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_min > 0.0) || !self.r_min.is_finite() {
            return Err(Error::Config(format!("r_min must be positive, got {}", self.r_min)));
        }
        if !(self.r_max > self.r_min) || !self.r_max.is_finite() {
            return Err(Error::Config(format!(
                "r_max ({}) must exceed r_min ({})",
                self.r_max, self.r_min
            )));
        }
        if self.n_points < 2 {
            return Err(Error::Config(format!(
                "at least 2 points required, got {}",
                self.n_points
            )));
        }
        if let Some(far) = self.far_point {
            if !(far > 0.0) || !far.is_finite() {
                return Err(Error::Config(format!("far point must be positive, got {far}")));
            }
        }
        Ok(())
    }

    /// Ascending bond lengths in Bohr.
    pub fn grid_points(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let lo = self.unit.to_bohr(self.r_min);
        let hi = self.unit.to_bohr(self.r_max);
        let last = (self.n_points - 1) as f64;
        let mut points: Vec<f64> = (0..self.n_points)
            .map(|i| {
                let t = i as f64 / last;
                match self.grid {
                    GridKind::Linear => lo + (hi - lo) * t,
                    GridKind::Logarithmic => (lo.ln() + (hi.ln() - lo.ln()) * t).exp(),
                }
            })
            .collect();
        points[self.n_points - 1] = hi;
        if let Some(far) = self.far_point.filter(|&far| far > hi) {
            points.push(far);
        }
        Ok(points)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    #[serde(rename = "R_bohr")]
    pub r: f64,
    #[serde(rename = "E_HF")]
    pub e_hf: f64,
    #[serde(rename = "E_FCI")]
    pub e_fci: f64,
    #[serde(rename = "E_corr")]
    pub e_corr: f64,
    #[serde(rename = "entropy_bits")]
    pub entropy: f64,
    #[serde(rename = "entropy_rescaled")]
    pub rescaled_entropy: Option<f64>,
    /// Descending.
    pub occupations: Vec<f64>,
}

impl CurvePoint {
    pub fn from_report(r: f64, report: CorrelationReport) -> Self {
        Self {
            r,
            e_hf: report.e_hf,
            e_fci: report.e_fci,
            e_corr: report.e_corr,
            entropy: report.entropy,
            rescaled_entropy: report.rescaled_entropy,
            occupations: report.occupations.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanFailure {
    pub r: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOutcome {
    pub points: Vec<CurvePoint>,
    pub failures: Vec<ScanFailure>,
}

/// H₂ at bond length `r` (Bohr) in `basis`.
pub fn run_single_point(r: f64, basis: &BasisSet) -> Result<CorrelationReport> {
    let mol = Molecule::h2(r)?;
    let ao = build_ao_basis(&mol, basis)?;
    let ints = compute_all(&ao, &mol)?;
    let scf = run_rhf(&ints, &mol, &ScfSettings::default())?;
    let ci = run_fci(&ints, &scf, &mol)?;
    correlation_report(&ci)
}

pub fn run_single_point_named(r: f64, basis_name: &str, basis_dir: Option<&Path>) -> Result<CorrelationReport> {
    run_single_point(r, &BasisSet::load(basis_name, basis_dir)?)
}

/// Runs every grid point (concurrently), keeping results in ascending R. Failed
/// points are collected in `failures`; an error is returned only if all fail.
pub fn run_scan(config: &ScanConfig, basis_dir: Option<&Path>) -> Result<ScanOutcome> {
    let grid = config.grid_points()?;
    let basis = BasisSet::load(&config.basis_name, basis_dir)?;
    let results: Vec<(f64, Result<CorrelationReport>)> =
        grid.par_iter().map(|&r| (r, run_single_point(r, &basis))).collect();

    let mut points = Vec::new();
    let mut failures = Vec::new();
    for (r, result) in results {
        match result {
            Ok(report) => points.push(CurvePoint::from_report(r, report)),
            Err(e) => failures.push(ScanFailure {
                r,
                message: e.to_string(),
            }),
        }
    }
    if points.is_empty() {
        let first = failures.first().map(|f| f.message.clone()).unwrap_or_default();
        return Err(Error::Consistency(format!(
            "all {} scan points failed (first error: {first})",
            failures.len()
        )));
    }
    if config.rescale {
        let triples: Vec<_> = points.iter().map(|p| (p.r, p.entropy, p.e_corr)).collect();
        for (p, s) in points.iter_mut().zip(rescale_entropy(&triples)?) {
            p.rescaled_entropy = Some(s);
        }
    }
    Ok(ScanOutcome { points, failures })
}

fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn to_csv(points: &[CurvePoint]) -> String {
    let n_occ = points.iter().map(|p| p.occupations.len()).max().unwrap_or(0);
    let mut header: Vec<String> = CSV_FIXED_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend((1..=n_occ).map(|k| format!("n_{k}")));
    let mut out = header.join(",");
    out.push('\n');
    for p in points {
        let mut row = vec![
            sci(p.r),
            sci(p.e_hf),
            sci(p.e_fci),
            sci(p.e_corr),
            sci(p.entropy),
            p.rescaled_entropy.map(sci).unwrap_or_default(),
        ];
        row.extend((0..n_occ).map(|k| p.occupations.get(k).copied().map(sci).unwrap_or_default()));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn to_json(points: &[CurvePoint]) -> Result<String> {
    serde_json::to_string_pretty(points)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Error::Consistency(format!("JSON serialization failed: {e}")))
}

/// Parses CSV produced by [`to_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<CurvePoint>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing header".into(),
    })?;
    let columns: Vec<&str> = header.split(',').collect();
    if columns.len() < CSV_FIXED_COLUMNS.len() || columns[..CSV_FIXED_COLUMNS.len()] != CSV_FIXED_COLUMNS {
        return Err(Error::Parse {
            line: 1,
            message: format!("unexpected header `{header}`"),
        });
    }
    let mut points = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns.len() {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("expected {} fields, found {}", columns.len(), fields.len()),
            });
        }
        let num = |s: &str| {
            s.parse::<f64>().map_err(|e| Error::Parse {
                line: i + 1,
                message: format!("`{s}`: {e}"),
            })
        };
        points.push(CurvePoint {
            r: num(fields[0])?,
            e_hf: num(fields[1])?,
            e_fci: num(fields[2])?,
            e_corr: num(fields[3])?,
            entropy: num(fields[4])?,
            rescaled_entropy: if fields[5].is_empty() {
                None
            } else {
                Some(num(fields[5])?)
            },
            occupations: fields[6..]
                .iter()
                .filter(|s| !s.is_empty())
                .map(|s| num(s))
                .collect::<Result<_>>()?,
        });
    }
    Ok(points)
}

pub fn render(points: &[CurvePoint], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => Ok(to_csv(points)),
        OutputFormat::Json => to_json(points),
    }
}

pub fn emit(points: &[CurvePoint], format: OutputFormat, path: &Path) -> Result<()> {
    fs::write(path, render(points, format)?).map_err(|e| Error::io(path, e))
}
