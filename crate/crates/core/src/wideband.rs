//! Wideband-regime analysis: Taylor coefficients, Eb/N0 limits, slopes.
//!
//! Around Es/N0 = 0 the constrained capacity expands as
//!
//! ```text
//!   C(x) = (c1*x + c2*x^2) / ln 2   bits,   x = Es/N0
//! ```
//!
//! For coded modulation the coefficients are trace functionals of the
//! signal-set covariance, c1 = trace(K) and c2 = -trace(K^2); for BICM they
//! combine the full set with the 2m bit-constrained sub-constellations.
//! From (c1, c2) follow the minimum energy per bit
//!
//! ```text
//!   (Eb/N0)_lim = ln(2) / c1
//! ```
//!
//! and the wideband slope, reported both in linear scale,
//! s0 = -c1^3/(c2 ln^2 2), and as bits per dimension per 3 dB,
//! S0 = -c1^2/(D*c2).

use serde::Serialize;
use thiserror::Error;

use crate::constellation::{constrained_subset, Labeling, SignalSet};
use crate::moments::{moments, moments_of_indices};

const LN2: f64 = std::f64::consts::LN_2;

#[derive(Debug, Error, PartialEq)]
pub enum WidebandError {
    #[error("first-order coefficient {0} must be positive")]
    NonPositiveFirstOrder(f64),
    #[error("slope undefined (second order vanishes)")]
    SlopeUndefined,
}

/// Whether coefficients describe the CM or the BICM capacity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CodingScheme {
    Cm,
    Bicm,
}

/// Second-order Taylor coefficients of the capacity in nats at Es/N0 = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TaylorCoefficients {
    /// Coefficient of Es/N0 (nats per unit Es/N0).
    pub first_order: f64,
    /// Coefficient of (Es/N0)^2.
    pub second_order: f64,
    pub scheme: CodingScheme,
}

/// CM coefficients of a unit-energy signal set:
/// c1 = trace(K), c2 = -trace(K^2).
pub fn cm_coefficients(set: &SignalSet) -> TaylorCoefficients {
    let s = moments(set.points()).expect("signal sets are nonempty");
    TaylorCoefficients {
        first_order: s.trace_cov,
        second_order: -s.trace_cov_sq,
        scheme: CodingScheme::Cm,
    }
}

/// BICM coefficients of a labeled set, summed over all 2m constrained
/// sub-constellations:
///
/// ```text
///   c1 = 1/2 sum_{mu,b} ( trace(K) - trace(K_b^mu) )
///   c2 = 1/2 sum_{mu,b} ( -trace(K^2) + trace((K_b^mu)^2) )
/// ```
pub fn bicm_coefficients(set: &SignalSet, labeling: &Labeling) -> TaylorCoefficients {
    let full = moments(set.points()).expect("signal sets are nonempty");
    let mut first = 0.0;
    let mut second = 0.0;
    for mu in 1..=labeling.bits_per_symbol() as usize {
        for b in 0..2u8 {
            let sub = constrained_subset(set, labeling, mu, b)
                .expect("mu and b are in range by construction");
            let s = moments_of_indices(set.points(), &sub.member_indices)
                .expect("subsets are nonempty");
            first += 0.5 * (full.trace_cov - s.trace_cov);
            second += 0.5 * (-full.trace_cov_sq + s.trace_cov_sq);
        }
    }
    TaylorCoefficients {
        first_order: first,
        second_order: second,
        scheme: CodingScheme::Bicm,
    }
}

/// A set is wideband-optimal iff c1 = 1 and c2 = -1/D, i.e. zero mean and
/// energy spread evenly over uncorrelated dimensions. Among the supported
/// families this holds exactly for biPPM under CM.
pub fn wideband_optimal(set: &SignalSet) -> bool {
    let c = cm_coefficients(set);
    (c.first_order - 1.0).abs() <= 1e-12 && (c.second_order + 1.0 / set.dim() as f64).abs() <= 1e-12
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

/// Closed-form (c1, c2) pairs for the supported constellations, as derived
/// from the trace functionals. Used as an independent route against the
/// generic [`cm_coefficients`]/[`bicm_coefficients`] computation.
pub mod closed_form {
    /// M-PPM, CM: c1 = 1 - 1/M, c2 = -(1 - 1/M)/M.
    pub fn ppm_cm(size: usize) -> (f64, f64) {
        let m = size as f64;
        (1.0 - 1.0 / m, -(1.0 - 1.0 / m) / m)
    }

    /// M-PPM, BICM (any labeling): c1 = log2(M)/M, c2 = (log2(M)/M)(1 - 3/M).
    pub fn ppm_bicm(size: usize) -> (f64, f64) {
        let m = size as f64;
        let bits = (size.trailing_zeros()) as f64;
        (bits / m, bits / m * (1.0 - 3.0 / m))
    }

    /// M-biPPM, CM: c1 = 1, c2 = -1/D with D = M/2.
    pub fn bippm_cm(size: usize) -> (f64, f64) {
        let d = size as f64 / 2.0;
        (1.0, -1.0 / d)
    }

    /// M-biPPM, BICM with near-Gray labeling:
    /// c1 = log2(2D)/D, c2 = -log2(2D)/D^2.
    pub fn bippm_bicm_near_gray(size: usize) -> (f64, f64) {
        let d = size as f64 / 2.0;
        let bits = (size.trailing_zeros()) as f64;
        (bits / d, -bits / (d * d))
    }

    /// M-biPPM, BICM with natural labeling:
    /// c1 = 1/D, c2 = log2(2D)/D - (1/D)(1 + 1/D).
    pub fn bippm_bicm_natural(size: usize) -> (f64, f64) {
        let d = size as f64 / 2.0;
        let bits = (size.trailing_zeros()) as f64;
        (1.0 / d, bits / d - (1.0 / d) * (1.0 + 1.0 / d))
    }
}

// ---------------------------------------------------------------------------
// Summaries
// ---------------------------------------------------------------------------

/// Eb/N0 limit and wideband slopes derived from Taylor coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WidebandSummary {
    /// ln(2)/c1, dimensionless.
    pub ebno_lim_linear: f64,
    /// 10*log10 of the above.
    pub ebno_lim_db: f64,
    /// Slope in linear scale, -c1^3/(c2 ln^2 2), bits per unit Eb/N0.
    pub slope_linear: f64,
    /// Slope in bits per dimension per 3 dB, -c1^2/(D*c2).
    pub slope_per_dim_3db: f64,
}

/// Converts coefficients into the Eb/N0 limit and slopes for a set of
/// dimension `dim`.
pub fn wideband_summary(
    coeffs: &TaylorCoefficients,
    dim: usize,
) -> Result<WidebandSummary, WidebandError> {
    if coeffs.first_order <= 0.0 {
        return Err(WidebandError::NonPositiveFirstOrder(coeffs.first_order));
    }
    if coeffs.second_order == 0.0 {
        return Err(WidebandError::SlopeUndefined);
    }
    let c1 = coeffs.first_order;
    let c2 = coeffs.second_order;
    let ebno_lim_linear = LN2 / c1;
    Ok(WidebandSummary {
        ebno_lim_linear,
        ebno_lim_db: 10.0 * ebno_lim_linear.log10(),
        slope_linear: -c1 * c1 * c1 / (c2 * LN2 * LN2),
        slope_per_dim_3db: -c1 * c1 / (dim as f64 * c2),
    })
}

/// Tangent of the capacity-per-dimension curve at the Eb/N0 limit, emitted
/// over a 3 dB span for plot overlays: it runs from (ebno_lim_db, 0) to
/// (ebno_lim_db + 3, slope_per_dim_3db).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TangentLine {
    pub start_db: f64,
    pub end_db: f64,
    pub slope_per_dim_3db: f64,
    pub span_db: f64,
}

pub fn tangent_line(summary: &WidebandSummary) -> TangentLine {
    TangentLine {
        start_db: summary.ebno_lim_db,
        end_db: summary.ebno_lim_db + 3.0,
        slope_per_dim_3db: summary.slope_per_dim_3db,
        span_db: 3.0,
    }
}

impl TangentLine {
    /// The two endpoints (ebno_db, bits/dimension).
    pub fn endpoints(&self) -> ((f64, f64), (f64, f64)) {
        ((self.start_db, 0.0), (self.end_db, self.slope_per_dim_3db))
    }
}

// ---------------------------------------------------------------------------
// Reference table
// ---------------------------------------------------------------------------

/// One row of the wideband reference table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub modulation: &'static str,
    pub coding: &'static str,
    /// Labeling rule; `None` where the value is labeling-independent.
    pub labeling: Option<&'static str>,
    /// Constellation size; `None` marks a row valid for every M.
    pub size: Option<usize>,
    pub ebno_lim_db: f64,
    pub slope_per_dim_3db: f64,
}

const TABLE_SIZES: [usize; 5] = [2, 4, 8, 16, 32];

/// Builds the full table of Eb/N0 limits and wideband slopes for
/// M in {2,4,8,16,32} from trace-based coefficients.
pub fn table_rows() -> Vec<TableRow> {
    let mut rows = Vec::new();
    let summarize = |coeffs: &TaylorCoefficients, dim: usize| {
        wideband_summary(coeffs, dim).expect("supported sets have c1 > 0 and c2 != 0")
    };

    for size in TABLE_SIZES {
        let set = SignalSet::ppm(size).unwrap();
        let s = summarize(&cm_coefficients(&set), set.dim());
        rows.push(TableRow {
            modulation: "ppm",
            coding: "cm",
            labeling: None,
            size: Some(size),
            ebno_lim_db: s.ebno_lim_db,
            slope_per_dim_3db: s.slope_per_dim_3db,
        });
    }
    for size in TABLE_SIZES {
        let set = SignalSet::ppm(size).unwrap();
        let lab = Labeling::natural(&set);
        let s = summarize(&bicm_coefficients(&set, &lab), set.dim());
        rows.push(TableRow {
            modulation: "ppm",
            coding: "bicm",
            labeling: None,
            size: Some(size),
            ebno_lim_db: s.ebno_lim_db,
            slope_per_dim_3db: s.slope_per_dim_3db,
        });
    }
    // biPPM CM is wideband-optimal for every M; the summary is
    // size-independent, computed here from the smallest set.
    {
        let set = SignalSet::bippm(2).unwrap();
        let s = summarize(&cm_coefficients(&set), set.dim());
        rows.push(TableRow {
            modulation: "bippm",
            coding: "cm",
            labeling: None,
            size: None,
            ebno_lim_db: s.ebno_lim_db,
            slope_per_dim_3db: s.slope_per_dim_3db,
        });
    }
    for labeling_name in ["natural", "near-gray"] {
        for size in TABLE_SIZES {
            let set = SignalSet::bippm(size).unwrap();
            let lab = match labeling_name {
                "natural" => Labeling::natural(&set),
                _ => Labeling::near_gray(&set).unwrap(),
            };
            let s = summarize(&bicm_coefficients(&set, &lab), set.dim());
            rows.push(TableRow {
                modulation: "bippm",
                coding: "bicm",
                labeling: Some(labeling_name),
                size: Some(size),
                ebno_lim_db: s.ebno_lim_db,
                slope_per_dim_3db: s.slope_per_dim_3db,
            });
        }
    }
    rows
}

/// Renders [`table_rows`] as fixed-width text, dB values rounded to two
/// decimals.
pub fn render_table() -> String {
    let mut out = String::new();
    out.push_str(
        "modulation  coding  labeling   M    (Eb/N0)_lim [dB]  slope [bit/dim per 3 dB]\n",
    );
    for row in table_rows() {
        let size = row
            .size
            .map(|s| s.to_string())
            .unwrap_or_else(|| "any".to_string());
        out.push_str(&format!(
            "{:<10}  {:<6}  {:<9}  {:<3}  {:>16.2}  {:>24.4}\n",
            row.modulation,
            row.coding,
            row.labeling.unwrap_or("-"),
            size,
            row.ebno_lim_db,
            row.slope_per_dim_3db,
        ));
    }
    out
}
