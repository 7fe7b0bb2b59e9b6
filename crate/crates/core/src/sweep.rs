//! Es/N0 sweeps: capacity curves, CSV emission, and minimum-Eb/N0 search.
//!
//! A sweep runs the Monte-Carlo estimator once per grid point and emits one
//! curve per family (CM, BICM, individual bit levels) plus a Shannon
//! reference curve, all re-coordinated to Eb/N0 = Es/N0 / C with C in bits
//! per symbol. Curves are written as CSV with the fixed header
//!
//! ```text
//!   esn0_db,capacity_bits,capacity_per_dim,ebno_db,std_error,flag
//! ```
//!
//! one file per family, together with a JSON sidecar carrying the full
//! sweep description and the wideband analysis for coherent runs. Points
//! whose capacity is not distinguishable from zero (<= 3 standard errors)
//! keep their capacity estimate but carry an `unreliable_ebno` flag and an
//! empty Eb/N0 field.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::channel::{ChannelModel, Detection, NoiseConfig};
use crate::constellation::{Labeling, SignalSet};
use crate::mi::{self, MiError, SamplingPlan, MIN_SAMPLES};
use crate::wideband::{
    bicm_coefficients, cm_coefficients, tangent_line, wideband_summary, TangentLine,
    TaylorCoefficients, WidebandSummary,
};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep: {0}")]
    Validation(String),
    #[error(transparent)]
    Mi(#[from] MiError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("minimum search needs at least 3 points with a defined Eb/N0, found {found}")]
    TooFewValidPoints { found: usize },
}

/// Modulation family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Ppm,
    BiPpm,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Ppm => write!(f, "ppm"),
            Scheme::BiPpm => write!(f, "bippm"),
        }
    }
}

/// Labeling selection; `Unlabeled` sweeps the CM capacity only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelingChoice {
    Natural,
    NearGray,
    Unlabeled,
}

/// Full description of one sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepSpec {
    pub scheme: Scheme,
    pub size: usize,
    pub labeling: LabelingChoice,
    pub detection: Detection,
    /// Es/N0 grid in dB, strictly increasing.
    pub esn0_db_grid: Vec<f64>,
    pub plan: SamplingPlan,
    pub seed: u64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SweepError> {
        let fail = |msg: String| Err(SweepError::Validation(msg));
        if self.size < 2 || !self.size.is_power_of_two() {
            return fail(format!(
                "constellation size must be a power of two >= 2, got {}",
                self.size
            ));
        }
        if self.labeling == LabelingChoice::NearGray && self.scheme != Scheme::BiPpm {
            return fail("near-gray labeling requires scheme=bippm".into());
        }
        match self.detection {
            Detection::Energy if self.scheme != Scheme::Ppm => {
                return fail("energy detection requires scheme=ppm".into());
            }
            Detection::Differential if self.scheme != Scheme::BiPpm || self.size != 2 => {
                return fail("differential detection requires scheme=bippm with M=2".into());
            }
            _ => {}
        }
        if self.esn0_db_grid.is_empty() {
            return fail("esn0 grid must not be empty".into());
        }
        if !self.esn0_db_grid.windows(2).all(|w| w[0] < w[1]) {
            return fail("esn0 grid must be strictly increasing".into());
        }
        if self.esn0_db_grid.len() > u16::MAX as usize {
            return fail(format!("esn0 grid is limited to {} points", u16::MAX));
        }
        if self.plan.initial_samples < MIN_SAMPLES {
            return fail(format!(
                "samples per grid point must be at least {MIN_SAMPLES}"
            ));
        }
        Ok(())
    }

    fn build_set(&self) -> SignalSet {
        match self.scheme {
            Scheme::Ppm => SignalSet::ppm(self.size).expect("validated size"),
            Scheme::BiPpm => SignalSet::bippm(self.size).expect("validated size"),
        }
    }

    fn build_labeling(&self, set: &SignalSet) -> Option<Labeling> {
        match self.labeling {
            LabelingChoice::Natural => Some(Labeling::natural(set)),
            LabelingChoice::NearGray => Some(Labeling::near_gray(set).expect("validated scheme")),
            LabelingChoice::Unlabeled => None,
        }
    }
}

/// Builds a dB grid `start, start+step, ..., stop` (inclusive within
/// floating-point slack).
pub fn esn0_grid_from_range(
    start_db: f64,
    step_db: f64,
    stop_db: f64,
) -> Result<Vec<f64>, SweepError> {
    if !step_db.is_finite() || step_db <= 0.0 {
        return Err(SweepError::Validation(format!(
            "grid step must be positive, got {step_db}"
        )));
    }
    if stop_db < start_db {
        return Err(SweepError::Validation(format!(
            "grid stop {stop_db} is below start {start_db}"
        )));
    }
    let mut grid = Vec::new();
    let mut k = 0u32;
    loop {
        let value = start_db + f64::from(k) * step_db;
        if value > stop_db + 1e-9 {
            break;
        }
        grid.push(value);
        k += 1;
    }
    Ok(grid)
}

// ---------------------------------------------------------------------------
// Curves
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointFlag {
    Ok,
    UnreliableEbno,
}

impl PointFlag {
    fn as_str(&self) -> &'static str {
        match self {
            PointFlag::Ok => "ok",
            PointFlag::UnreliableEbno => "unreliable_ebno",
        }
    }
}

/// One sweep point. `ebno_db` is defined only when the capacity estimate
/// exceeds 3 standard errors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub esn0_db: f64,
    pub esn0: f64,
    pub capacity_bits: f64,
    pub capacity_per_dim: f64,
    pub ebno_db: Option<f64>,
    pub std_error: f64,
    pub flag: PointFlag,
}

impl CurvePoint {
    pub fn new(esn0_db: f64, capacity_bits: f64, std_error: f64, dim: usize) -> Self {
        let esn0 = 10f64.powf(esn0_db / 10.0);
        let reliable = capacity_bits > 3.0 * std_error;
        CurvePoint {
            esn0_db,
            esn0,
            capacity_bits,
            capacity_per_dim: capacity_bits / dim as f64,
            ebno_db: reliable.then(|| 10.0 * (esn0 / capacity_bits).log10()),
            std_error,
            flag: if reliable {
                PointFlag::Ok
            } else {
                PointFlag::UnreliableEbno
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityCurve {
    pub family: String,
    pub points: Vec<CurvePoint>,
}

/// Real-AWGN reference: per-dimension capacity 1/2 log2(1 + 2 (Es/N0)/D),
/// which approaches the -1.59 dB limit at a slope of 1 bit/dim per 3 dB.
pub fn shannon_reference(esn0_db_grid: &[f64], dim: usize) -> CapacityCurve {
    let points = esn0_db_grid
        .iter()
        .map(|&db| {
            let esn0 = 10f64.powf(db / 10.0);
            let per_dim = 0.5 * (1.0 + 2.0 * esn0 / dim as f64).log2();
            CurvePoint::new(db, per_dim * dim as f64, 0.0, dim)
        })
        .collect();
    CapacityCurve {
        family: "shannon".into(),
        points,
    }
}

// ---------------------------------------------------------------------------
// Sweep execution
// ---------------------------------------------------------------------------

/// Wideband analysis attached to coherent sweeps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisEntry {
    pub coefficients: TaylorCoefficients,
    pub summary: WidebandSummary,
    pub tangent: TangentLine,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepAnalysis {
    pub cm: AnalysisEntry,
    pub bicm: Option<AnalysisEntry>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub dim: usize,
    pub cm: CapacityCurve,
    pub bicm: Option<CapacityCurve>,
    pub bit_levels: Vec<CapacityCurve>,
    pub shannon: CapacityCurve,
    pub analysis: Option<SweepAnalysis>,
    pub n_samples_per_point: Vec<u64>,
}

/// Runs the sweep described by `spec`. Deterministic for a fixed seed; the
/// worker count does not influence any emitted value.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult, SweepError> {
    spec.validate()?;
    let set = spec.build_set();
    let labeling = spec.build_labeling(&set);
    let dim = set.dim();
    let model_for = |db: f64| {
        ChannelModel::new(
            spec.detection,
            NoiseConfig::from_db(db).expect("grid values are finite"),
        )
    };

    let bits = labeling.as_ref().map(|l| l.bits_per_symbol() as usize);
    let mut cm_points = Vec::with_capacity(spec.esn0_db_grid.len());
    let mut bicm_points = Vec::with_capacity(spec.esn0_db_grid.len());
    let mut level_points: Vec<Vec<CurvePoint>> = vec![Vec::new(); bits.unwrap_or(0)];
    let mut n_samples = Vec::with_capacity(spec.esn0_db_grid.len());

    for (cell, &db) in spec.esn0_db_grid.iter().enumerate() {
        let model = model_for(db);
        match &labeling {
            Some(lab) => {
                let joint =
                    mi::joint_capacity_cell(&set, lab, &model, &spec.plan, spec.seed, cell as u16)?;
                cm_points.push(CurvePoint::new(
                    db,
                    joint.cm.value_bits,
                    joint.cm.std_error,
                    dim,
                ));
                bicm_points.push(CurvePoint::new(
                    db,
                    joint.bicm.value_bits,
                    joint.bicm.std_error,
                    dim,
                ));
                for (mu, level) in joint.levels.iter().enumerate() {
                    level_points[mu].push(CurvePoint::new(
                        db,
                        level.value_bits,
                        level.std_error,
                        dim,
                    ));
                }
                n_samples.push(joint.cm.n_samples);
            }
            None => {
                let est = mi::cm_capacity_cell(&set, &model, &spec.plan, spec.seed, cell as u16)?;
                cm_points.push(CurvePoint::new(db, est.value_bits, est.std_error, dim));
                n_samples.push(est.n_samples);
            }
        }
    }

    let analysis = (spec.detection == Detection::Coherent).then(|| {
        let entry = |coeffs: TaylorCoefficients| {
            let summary =
                wideband_summary(&coeffs, dim).expect("supported sets have c1 > 0, c2 != 0");
            AnalysisEntry {
                coefficients: coeffs,
                summary,
                tangent: tangent_line(&summary),
            }
        };
        SweepAnalysis {
            cm: entry(cm_coefficients(&set)),
            bicm: labeling
                .as_ref()
                .map(|lab| entry(bicm_coefficients(&set, lab))),
        }
    });

    Ok(SweepResult {
        spec: spec.clone(),
        dim,
        cm: CapacityCurve {
            family: "cm".into(),
            points: cm_points,
        },
        bicm: labeling.is_some().then(|| CapacityCurve {
            family: "bicm".into(),
            points: bicm_points,
        }),
        bit_levels: level_points
            .into_iter()
            .enumerate()
            .map(|(mu, points)| CapacityCurve {
                family: format!("bit{}", mu + 1),
                points,
            })
            .collect(),
        shannon: shannon_reference(&spec.esn0_db_grid, dim),
        analysis,
        n_samples_per_point: n_samples,
    })
}

// ---------------------------------------------------------------------------
// Minimum Eb/N0
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinEbno {
    pub ebno_db: f64,
    pub capacity_bits: f64,
    /// The argmin sits at the end of the valid range; no refinement applied.
    pub boundary: bool,
}

/// Grid argmin of Eb/N0 over the curve's valid points, refined by parabolic
/// interpolation in the (capacity, Eb/N0) plane when interior.
pub fn min_ebno(curve: &CapacityCurve) -> Result<MinEbno, SweepError> {
    let valid: Vec<&CurvePoint> = curve
        .points
        .iter()
        .filter(|p| p.ebno_db.is_some())
        .collect();
    if valid.len() < 3 {
        return Err(SweepError::TooFewValidPoints { found: valid.len() });
    }
    let argmin = valid
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            a.ebno_db
                .unwrap()
                .partial_cmp(&b.ebno_db.unwrap())
                .expect("ebno values are finite")
        })
        .map(|(i, _)| i)
        .unwrap();
    let at_grid = MinEbno {
        ebno_db: valid[argmin].ebno_db.unwrap(),
        capacity_bits: valid[argmin].capacity_bits,
        boundary: argmin == 0 || argmin == valid.len() - 1,
    };
    if at_grid.boundary {
        return Ok(at_grid);
    }

    let (x0, y0) = (
        valid[argmin - 1].capacity_bits,
        valid[argmin - 1].ebno_db.unwrap(),
    );
    let (x1, y1) = (valid[argmin].capacity_bits, valid[argmin].ebno_db.unwrap());
    let (x2, y2) = (
        valid[argmin + 1].capacity_bits,
        valid[argmin + 1].ebno_db.unwrap(),
    );
    let denom = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    if denom.abs() < 1e-30 {
        return Ok(at_grid);
    }
    let vertex = x1 - 0.5 * ((x1 - x0).powi(2) * (y1 - y2) - (x1 - x2).powi(2) * (y1 - y0)) / denom;
    let (lo, hi) = (x0.min(x2), x0.max(x2));
    if !(lo..=hi).contains(&vertex) {
        return Ok(at_grid);
    }
    let lagrange = |x: f64| {
        y0 * (x - x1) * (x - x2) / ((x0 - x1) * (x0 - x2))
            + y1 * (x - x0) * (x - x2) / ((x1 - x0) * (x1 - x2))
            + y2 * (x - x0) * (x - x1) / ((x2 - x0) * (x2 - x1))
    };
    Ok(MinEbno {
        ebno_db: lagrange(vertex),
        capacity_bits: vertex,
        boundary: false,
    })
}

// ---------------------------------------------------------------------------
// CSV and sidecar emission
// ---------------------------------------------------------------------------

pub const CSV_HEADER: &str = "esn0_db,capacity_bits,capacity_per_dim,ebno_db,std_error,flag";

pub fn curve_to_csv(curve: &CapacityCurve) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in &curve.points {
        let ebno = p.ebno_db.map(|v| v.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            p.esn0_db,
            p.capacity_bits,
            p.capacity_per_dim,
            ebno,
            p.std_error,
            p.flag.as_str()
        ));
    }
    out
}

/// Parses a curve CSV produced by [`curve_to_csv`]; the family is taken
/// from the file name stem when reading from disk.
pub fn curve_from_csv(text: &str, family: &str, path: &str) -> Result<CapacityCurve, SweepError> {
    let parse_err = |line: usize, message: String| SweepError::Parse {
        path: path.to_string(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == CSV_HEADER => {}
        other => {
            return Err(parse_err(
                1,
                format!(
                    "expected header '{CSV_HEADER}', got {:?}",
                    other.map(|(_, h)| h)
                ),
            ));
        }
    }
    let mut points = Vec::new();
    for (index, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(parse_err(
                index + 1,
                format!("expected 6 fields, got {}", fields.len()),
            ));
        }
        let number = |field: &str, name: &str| -> Result<f64, SweepError> {
            field
                .parse::<f64>()
                .map_err(|e| parse_err(index + 1, format!("bad {name} '{field}': {e}")))
        };
        let esn0_db = number(fields[0], "esn0_db")?;
        let capacity_bits = number(fields[1], "capacity_bits")?;
        let capacity_per_dim = number(fields[2], "capacity_per_dim")?;
        let ebno_db = if fields[3].is_empty() {
            None
        } else {
            Some(number(fields[3], "ebno_db")?)
        };
        let std_error = number(fields[4], "std_error")?;
        let flag = match fields[5] {
            "ok" => PointFlag::Ok,
            "unreliable_ebno" => PointFlag::UnreliableEbno,
            other => return Err(parse_err(index + 1, format!("unknown flag '{other}'"))),
        };
        points.push(CurvePoint {
            esn0_db,
            esn0: 10f64.powf(esn0_db / 10.0),
            capacity_bits,
            capacity_per_dim,
            ebno_db,
            std_error,
            flag,
        });
    }
    Ok(CapacityCurve {
        family: family.to_string(),
        points,
    })
}

pub fn read_curve_csv(path: &Path) -> Result<CapacityCurve, SweepError> {
    let family = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "curve".into());
    let text = fs::read_to_string(path)?;
    curve_from_csv(&text, &family, &path.to_string_lossy())
}

#[derive(Serialize)]
struct SweepMeta<'a> {
    spec: &'a SweepSpec,
    dim: usize,
    families: Vec<&'a str>,
    n_samples_per_point: &'a [u64],
    /// Reference-curve definition, stated here because several conventions
    /// are in circulation.
    shannon_reference: &'static str,
    analysis: &'a Option<SweepAnalysis>,
}

/// Writes one CSV per curve family plus `meta.json` into `dir`; returns the
/// paths written.
pub fn write_outputs(result: &SweepResult, dir: &Path) -> Result<Vec<PathBuf>, SweepError> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut write_curve = |curve: &CapacityCurve| -> Result<(), SweepError> {
        let path = dir.join(format!("{}.csv", curve.family));
        let mut file = fs::File::create(&path)?;
        file.write_all(curve_to_csv(curve).as_bytes())?;
        written.push(path);
        Ok(())
    };
    write_curve(&result.cm)?;
    if let Some(bicm) = &result.bicm {
        write_curve(bicm)?;
    }
    for level in &result.bit_levels {
        write_curve(level)?;
    }
    write_curve(&result.shannon)?;

    let meta = SweepMeta {
        spec: &result.spec,
        dim: result.dim,
        families: std::iter::once(result.cm.family.as_str())
            .chain(result.bicm.iter().map(|c| c.family.as_str()))
            .chain(result.bit_levels.iter().map(|c| c.family.as_str()))
            .chain(std::iter::once(result.shannon.family.as_str()))
            .collect(),
        n_samples_per_point: &result.n_samples_per_point,
        shannon_reference: "per-dimension real-AWGN capacity 0.5*log2(1 + 2*(Es/N0)/D)",
        analysis: &result.analysis,
    };
    let path = dir.join("meta.json");
    fs::write(&path, serde_json::to_string_pretty(&meta)?)?;
    written.push(path);
    Ok(written)
}
