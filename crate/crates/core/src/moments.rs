//! Second-moment widths, divergences and M² from sampled 1-D profiles.
//!
//! The width of a profile is the `2σ` radius, `σ²` being the
//! intensity-weighted variance; with that convention a Gaussian
//! `exp(-2x²/w²)` has width `w` and the ideal Gaussian beam has `M² = 1`.
//! Integrals use the trapezoidal rule on the (uniform) sample grid.

use std::f64::consts::PI;
use std::io::Read;

use serde::Serialize;

use crate::error::{Error, Result};

const MIN_SAMPLES: usize = 8;
const SPACING_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// Transverse position at the waist.
    Space,
    /// Spatial frequency `s = θ/λ` in the far field.
    SpatialFrequency,
}

/// Intensity samples on a uniform grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledProfile {
    xs: Vec<f64>,
    intensities: Vec<f64>,
    domain: Domain,
}

impl SampledProfile {
    pub fn new(xs: Vec<f64>, intensities: Vec<f64>, domain: Domain) -> Result<Self> {
        if xs.len() != intensities.len() {
            return Err(Error::InvalidProfile(format!(
                "{} grid points but {} intensities",
                xs.len(),
                intensities.len()
            )));
        }
        if xs.len() < MIN_SAMPLES {
            return Err(Error::InvalidProfile(format!(
                "need at least {MIN_SAMPLES} samples, got {}",
                xs.len()
            )));
        }
        if xs.iter().chain(&intensities).any(|v| !v.is_finite()) {
            return Err(Error::InvalidProfile("non-finite sample".into()));
        }
        if let Some(bad) = intensities.iter().find(|&&i| i < 0.0) {
            return Err(Error::InvalidProfile(format!("negative intensity {bad}")));
        }
        let h = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
        if h <= 0.0 {
            return Err(Error::InvalidProfile("grid must be increasing".into()));
        }
        // relative tolerance on the step, plus representation error of the abscissae
        let scale = xs[0].abs().max(xs[xs.len() - 1].abs());
        let tolerance = SPACING_TOLERANCE * h + 4.0 * f64::EPSILON * scale;
        for (i, w) in xs.windows(2).enumerate() {
            if ((w[1] - w[0]) - h).abs() > tolerance {
                return Err(Error::InvalidProfile(format!(
                    "grid spacing at index {i} is {} instead of {h}",
                    w[1] - w[0]
                )));
            }
        }
        if intensities.iter().all(|&i| i == 0.0) {
            return Err(Error::AllZeroIntensity);
        }
        Ok(SampledProfile {
            xs,
            intensities,
            domain,
        })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn intensities(&self) -> &[f64] {
        &self.intensities
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn spacing(&self) -> f64 {
        (self.xs[self.xs.len() - 1] - self.xs[0]) / (self.xs.len() - 1) as f64
    }

    /// Same intensities with the grid multiplied by `factor > 0`.
    pub fn rescaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.xs.iter().map(|x| x * factor).collect(),
            self.intensities.clone(),
            self.domain,
        )
    }

    /// Reads `x,intensity` rows; a leading non-numeric row is taken as a header.
    pub fn from_csv<R: Read>(reader: R, domain: Domain) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut xs = Vec::new();
        let mut intensities = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::Ingestion(e.to_string()))?;
            if record.len() != 2 {
                return Err(Error::Ingestion(format!(
                    "row {}: expected 2 columns, found {}",
                    line + 1,
                    record.len()
                )));
            }
            let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
            match parsed {
                (Ok(x), Ok(i)) => {
                    xs.push(x);
                    intensities.push(i);
                }
                _ if line == 0 => continue,
                _ => {
                    return Err(Error::Ingestion(format!(
                        "row {}: cannot parse `{}`,`{}` as numbers",
                        line + 1,
                        &record[0],
                        &record[1]
                    )))
                }
            }
        }
        if xs.is_empty() {
            return Err(Error::Ingestion("no data rows".into()));
        }
        Self::new(xs, intensities, domain).map_err(|e| match e {
            Error::AllZeroIntensity => e,
            other => Error::Ingestion(other.to_string()),
        })
    }
}

fn trapezoid(h: f64, values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut first = None;
    let mut last = 0.0;
    for v in values {
        first.get_or_insert(v);
        sum += v;
        last = v;
    }
    h * (sum - 0.5 * (first.unwrap_or(0.0) + last))
}

/// Intensity-weighted centroid and `2σ` width.
pub fn centroid_and_width(profile: &SampledProfile) -> Result<(f64, f64)> {
    let h = profile.spacing();
    let pairs = || profile.xs.iter().zip(&profile.intensities);
    let total = trapezoid(h, profile.intensities.iter().copied());
    if total <= 0.0 {
        return Err(Error::AllZeroIntensity);
    }
    let mean = trapezoid(h, pairs().map(|(x, i)| x * i)) / total;
    let variance = trapezoid(h, pairs().map(|(x, i)| (x - mean).powi(2) * i)) / total;
    Ok((mean, 2.0 * variance.max(0.0).sqrt()))
}

/// Far-field divergence `θ = λ · width` of a spatial-frequency profile.
pub fn divergence(profile: &SampledProfile, wavelength: f64) -> Result<f64> {
    if profile.domain != Domain::SpatialFrequency {
        return Err(Error::InvalidProfile(
            "divergence needs a spatial-frequency profile".into(),
        ));
    }
    if !(wavelength.is_finite() && wavelength > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "wavelength must be positive, got {wavelength}"
        )));
    }
    Ok(wavelength * centroid_and_width(profile)?.1)
}

/// Second-moment beam quality factor, widths and divergence from a near/far pair.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MomentReport {
    pub near_centroid: f64,
    pub waist_radius: f64,
    pub far_centroid: f64,
    pub divergence: f64,
    pub wavelength: f64,
    pub m2: f64,
}

pub fn moment_report(near: &SampledProfile, far: &SampledProfile, wavelength: f64) -> Result<MomentReport> {
    if near.domain != Domain::Space {
        return Err(Error::InvalidProfile(
            "near-field profile must be in the space domain".into(),
        ));
    }
    let (near_centroid, waist_radius) = centroid_and_width(near)?;
    let theta = divergence(far, wavelength)?;
    let (far_centroid, _) = centroid_and_width(far)?;
    Ok(MomentReport {
        near_centroid,
        waist_radius,
        far_centroid,
        divergence: theta,
        wavelength,
        m2: PI / wavelength * theta * waist_radius,
    })
}

/// `M² = (π/λ) θ ω₀` from a waist profile and a far-field spatial-frequency profile.
pub fn m2_from_profiles(near: &SampledProfile, far: &SampledProfile, wavelength: f64) -> Result<f64> {
    moment_report(near, far, wavelength).map(|r| r.m2)
}

/// Uniform grid of `points` samples on `[start, stop]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Grid {
    pub fn new(start: f64, stop: f64, points: usize) -> Self {
        Grid { start, stop, points }
    }

    /// `[-half_span, half_span]`.
    pub fn symmetric(half_span: f64, points: usize) -> Self {
        Grid::new(-half_span, half_span, points)
    }

    pub fn values(&self) -> Vec<f64> {
        let h = (self.stop - self.start) / (self.points.max(2) - 1) as f64;
        (0..self.points).map(|i| self.start + h * i as f64).collect()
    }
}

/// Far-field radius of a Gaussian mode with waist `w`, in spatial-frequency units.
pub fn fourier_dual_width(w: f64) -> f64 {
    1.0 / (PI * w)
}

/// Physicists' Hermite polynomial `H_n(y)`.
pub fn hermite(n: usize, y: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * y);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let next = 2.0 * y * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `exp(-2x²/w²)` on the grid.
pub fn synth_gaussian(w: f64, grid: &Grid, domain: Domain) -> Result<SampledProfile> {
    synth_hermite_gaussian(0, w, grid, domain)
}

/// Intensity `H_n(√2 x/w)² exp(-2x²/w²)` of the n-th Hermite-Gaussian mode.
pub fn synth_hermite_gaussian(n: usize, w: f64, grid: &Grid, domain: Domain) -> Result<SampledProfile> {
    let xs = grid.values();
    let intensities = xs
        .iter()
        .map(|&x| {
            let y = 2f64.sqrt() * x / w;
            hermite(n, y).powi(2) * (-y * y).exp()
        })
        .collect();
    SampledProfile::new(xs, intensities, domain)
}

/// Waist and far-field profiles of the n-th Hermite-Gaussian mode, each sampled
/// on `points` samples over `±half_span_in_radii` mode radii.
pub fn hermite_gaussian_pair(
    n: usize,
    w: f64,
    half_span_in_radii: f64,
    points: usize,
) -> Result<(SampledProfile, SampledProfile)> {
    let far_w = fourier_dual_width(w);
    let near = synth_hermite_gaussian(n, w, &Grid::symmetric(half_span_in_radii * w, points), Domain::Space)?;
    let far = synth_hermite_gaussian(
        n,
        far_w,
        &Grid::symmetric(half_span_in_radii * far_w, points),
        Domain::SpatialFrequency,
    )?;
    Ok((near, far))
}
