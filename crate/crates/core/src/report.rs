//! Report records and their CSV/JSON renderings.
//!
//! Everything the command-line tool prints is assembled here so that the
//! output format can be tested without spawning a process. Numbers in CSV
//! are written with 9 significant digits; JSON uses the shortest
//! round-tripping representation.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::beamquality::{
    aadag_closed, beta_j_inferred, golden_table, m_eff_squared, mq2_closed, theta_q, uncertainty_closed, BeamGeometry,
    BetaJReport, TableRow,
};
use crate::error::{Error, Result};
use crate::fockspace::{
    build_truncated, coherent_state_truncated, eigen_defect, expectation, uncertainty_of, UncertaintyReport,
};
use crate::moments::MomentReport;
use crate::qalgebra::Deformation;
use crate::wavefunction::{sample, StateSeries};

/// Output encodings offered by every command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Formats with 9 significant digits, trimming trailing zeros.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-5..9).contains(&exponent) {
        let decimals = (8 - exponent).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        let s = format!("{x:.8e}");
        let (mantissa, exp) = s.split_once('e').expect("exponent form");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{exp}")
    }
}

fn csv_block(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub fn render_table(rows: &[TableRow], format: Format) -> String {
    match format {
        Format::Json => to_json(&rows),
        Format::Csv => csv_block(&["p", "mq2"], rows.iter().map(|r| vec![r.p.to_string(), sig9(r.mq2)])),
    }
}

/// The `|α| = 1` table for `p = 1..=p_max`.
pub fn table(p_max: u32, format: Format) -> Result<String> {
    Ok(render_table(&golden_table(p_max)?, format))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct AlphaRecord {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for AlphaRecord {
    fn from(z: Complex64) -> Self {
        AlphaRecord { re: z.re, im: z.im }
    }
}

/// Closed form against the exact matrix computation for one `(p, α)`.
#[derive(Clone, Debug, Serialize)]
pub struct Mq2Report {
    pub p: Deformation,
    pub alpha: AlphaRecord,
    pub hbar: f64,
    /// Basis size used for the exact route.
    pub levels: usize,
    pub closed_form: UncertaintyReport,
    pub exact: UncertaintyReport,
    pub eigen_defect: f64,
    pub aadag_closed: f64,
    pub aadag_exact: f64,
    pub aadag_gap: f64,
    pub mq2_gap: f64,
}

/// Builds an [`Mq2Report`]. `undeformed_levels` sets the truncation used to
/// emulate `q = 1`; it is ignored at roots of unity.
pub fn mq2_report(def: Deformation, alpha: Complex64, hbar: f64, undeformed_levels: usize) -> Result<Mq2Report> {
    let closed_form = uncertainty_closed(def, alpha, hbar)?;
    let levels = def.dimension().unwrap_or(undeformed_levels);
    let ops = build_truncated(def, levels, hbar)?;
    let state = coherent_state_truncated(def, alpha, levels)?;
    let v = state.vector();
    let exact = uncertainty_of(&ops, &v)?;
    let aadag_exact = expectation(&(&ops.a * &ops.adag), &v)?.re;
    let aadag_closed = aadag_closed(def, alpha)?;
    Ok(Mq2Report {
        p: def,
        alpha: alpha.into(),
        hbar,
        levels,
        mq2_gap: (closed_form.mq2 - exact.mq2).abs(),
        closed_form,
        exact,
        eigen_defect: eigen_defect(def, &state),
        aadag_closed,
        aadag_exact,
        aadag_gap: (aadag_exact - aadag_closed).abs(),
    })
}

pub fn render_mq2(r: &Mq2Report, format: Format) -> String {
    match format {
        Format::Json => to_json(r),
        Format::Csv => csv_block(
            &[
                "p",
                "alpha_re",
                "alpha_im",
                "mq2_closed",
                "mq2_exact",
                "mq2_gap",
                "aadag_closed",
                "aadag_exact",
                "eigen_defect",
            ],
            [vec![
                r.p.to_string(),
                sig9(r.alpha.re),
                sig9(r.alpha.im),
                sig9(r.closed_form.mq2),
                sig9(r.exact.mq2),
                sig9(r.mq2_gap),
                sig9(r.aadag_closed),
                sig9(r.aadag_exact),
                sig9(r.eigen_defect),
            ]],
        ),
    }
}

/// One grid point of a `(p, |α|)` sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub p: Deformation,
    pub abs_alpha: f64,
    /// `None` where the closed form is not real.
    pub mq2_closed: Option<f64>,
    pub mq2_exact: f64,
    pub eigen_defect: f64,
}

/// Evaluates every `(p, |α|)` pair in parallel; rows come back in grid order.
pub fn sweep(orders: &[Deformation], abs_alphas: &[f64], hbar: f64, undeformed_levels: usize) -> Result<Vec<SweepRow>> {
    let grid: Vec<(Deformation, f64)> = orders
        .iter()
        .flat_map(|&d| abs_alphas.iter().map(move |&a| (d, a)))
        .collect();
    grid.par_iter()
        .map(|&(def, abs_alpha)| {
            let alpha = Complex64::new(abs_alpha, 0.0);
            let levels = def.dimension().unwrap_or(undeformed_levels);
            let ops = build_truncated(def, levels, hbar)?;
            let state = coherent_state_truncated(def, alpha, levels)?;
            let exact = uncertainty_of(&ops, &state.vector())?;
            let closed = match mq2_closed(def, alpha) {
                Ok(m) => Some(m),
                Err(Error::ConstraintViolation { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(SweepRow {
                p: def,
                abs_alpha,
                mq2_closed: closed,
                mq2_exact: exact.mq2,
                eigen_defect: eigen_defect(def, &state),
            })
        })
        .collect()
}

pub fn render_sweep(rows: &[SweepRow], format: Format) -> String {
    match format {
        Format::Json => to_json(&rows),
        Format::Csv => csv_block(
            &["p", "abs_alpha", "mq2_closed", "mq2_exact", "eigen_defect"],
            rows.iter().map(|r| {
                vec![
                    r.p.to_string(),
                    sig9(r.abs_alpha),
                    r.mq2_closed.map(sig9).unwrap_or_default(),
                    sig9(r.mq2_exact),
                    sig9(r.eigen_defect),
                ]
            }),
        ),
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct WavefunctionSample {
    pub x: f64,
    pub psi: f64,
    pub psi_im: f64,
}

/// Samples a series on `[x_min, x_max]`. The CSV carries `x,psi`, plus
/// `psi_im` when any coefficient is complex.
pub fn wavefunction(s: &StateSeries, x_min: f64, x_max: f64, samples: usize, format: Format) -> Result<String> {
    let pts: Vec<WavefunctionSample> = sample(s, x_min, x_max, samples)?
        .into_iter()
        .map(|(x, z)| WavefunctionSample {
            x,
            psi: z.re,
            psi_im: z.im,
        })
        .collect();
    let complex = s.series.max_imag() > 0.0;
    Ok(match format {
        Format::Json => to_json(&pts),
        Format::Csv if complex => csv_block(
            &["x", "psi", "psi_im"],
            pts.iter().map(|p| vec![sig9(p.x), sig9(p.psi), sig9(p.psi_im)]),
        ),
        Format::Csv => csv_block(&["x", "psi"], pts.iter().map(|p| vec![sig9(p.x), sig9(p.psi)])),
    })
}

pub fn render_moments(r: &MomentReport, format: Format) -> String {
    match format {
        Format::Json => to_json(r),
        Format::Csv => csv_block(
            &[
                "near_centroid",
                "waist_radius",
                "far_centroid",
                "divergence",
                "wavelength",
                "m2",
            ],
            [vec![
                sig9(r.near_centroid),
                sig9(r.waist_radius),
                sig9(r.far_centroid),
                sig9(r.divergence),
                sig9(r.wavelength),
                sig9(r.m2),
            ]],
        ),
    }
}

/// Divergence, medium coupling and the effective quality factor it restores.
#[derive(Clone, Debug, Serialize)]
pub struct MediumReport {
    pub p: Deformation,
    pub alpha: AlphaRecord,
    pub geometry: BeamGeometry,
    pub mq2: f64,
    pub theta_q: f64,
    pub beta_j: BetaJReport,
    /// `M_eff²` of an ideal Gaussian in a medium with the inverted βJ.
    pub m_eff2: f64,
    pub round_trip_error: f64,
    /// `M_eff²` with the literal βJ; `None` when that βJ over-focuses.
    pub m_eff2_literal: Option<f64>,
}

pub fn medium_report(def: Deformation, alpha: Complex64, geometry: BeamGeometry) -> Result<MediumReport> {
    let mq2 = mq2_closed(def, alpha)?;
    let beta_j = beta_j_inferred(def, alpha, &geometry)?;
    let m_eff2 = m_eff_squared(1.0, &geometry, &beta_j.inversion)?;
    let m_eff2_literal = match m_eff_squared(1.0, &geometry, &beta_j.literal) {
        Ok(m) => Some(m),
        Err(Error::ConstraintViolation { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(MediumReport {
        p: def,
        alpha: alpha.into(),
        geometry,
        mq2,
        theta_q: theta_q(def, alpha, &geometry)?,
        beta_j,
        m_eff2,
        round_trip_error: (m_eff2 - mq2).abs(),
        m_eff2_literal,
    })
}

pub fn render_medium(r: &MediumReport, format: Format) -> String {
    match format {
        Format::Json => to_json(r),
        Format::Csv => csv_block(
            &[
                "p",
                "alpha_re",
                "alpha_im",
                "wavelength",
                "waist",
                "mq2",
                "theta_q",
                "beta_j_inversion",
                "beta_j_literal",
                "beta_j_abs_difference",
                "m_eff2",
                "m_eff2_literal",
            ],
            [vec![
                r.p.to_string(),
                sig9(r.alpha.re),
                sig9(r.alpha.im),
                sig9(r.geometry.wavelength),
                sig9(r.geometry.waist_radius),
                sig9(r.mq2),
                sig9(r.theta_q),
                sig9(r.beta_j.inversion.beta_j),
                sig9(r.beta_j.literal.beta_j),
                sig9(r.beta_j.abs_difference),
                sig9(r.m_eff2),
                r.m_eff2_literal.map(sig9).unwrap_or_default(),
            ]],
        ),
    }
}
