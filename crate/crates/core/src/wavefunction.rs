//! Position-representation wavefunctions as q-power series.
//!
//! The deformed vacuum solves `d_q ψ₀ + κ² x ψ₀ = 0` with `κ = 1/√ℏ`. Its
//! series has coefficients `(-1)ⁿ κ²ⁿ / [2n]_q!!` on `x²ⁿ`; for odd `p` the
//! even chain hits `[p+1]_q = 0` immediately, so the odd companion
//! `(-1)ⁿ κ²ⁿ / [2n+1]_q!!` on `x²ⁿ⁺¹` is used instead. Excited levels come
//! from repeated application of the creation operator
//! `a† = (κ x - κ⁻¹ d_q)/√2`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fockspace::{check_hbar, coherent_state_truncated};
use crate::qalgebra::{q_bracket, q_derive, q_double_factorial, Deformation, Parity, QPowerSeries};

/// How the free constants `C₀`/`C₁` were fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    Raw,
    /// The surviving constant is set to one.
    UnitConstant,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    Level(usize),
    Coherent { re: f64, im: f64 },
}

/// A wavefunction in series form together with its provenance.
#[derive(Clone, Debug)]
pub struct StateSeries {
    pub def: Deformation,
    pub series: QPowerSeries,
    pub kind: SeriesKind,
    /// `κ = 1/√ℏ`.
    pub kappa: f64,
    pub normalization: Normalization,
    /// Truncation order asked for by the caller.
    pub requested_order: usize,
    /// Truncation order of the underlying vacuum series. Coefficients above it
    /// are affected by the truncation.
    pub valid_order: usize,
}

impl StateSeries {
    /// Wraps an arbitrary series as a vacuum-level state.
    pub fn from_series(def: Deformation, series: QPowerSeries, kappa: f64) -> Self {
        let order = series.truncation_order();
        StateSeries {
            def,
            series,
            kind: SeriesKind::Level(0),
            kappa,
            normalization: Normalization::Raw,
            requested_order: order,
            valid_order: order,
        }
    }

    pub fn parity(&self) -> Parity {
        self.series.parity()
    }

    /// Whether the retained order was reduced because a denominator vanished.
    pub fn is_capped(&self) -> bool {
        self.valid_order < self.requested_order
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.series.eval(x)
    }
}

/// Parity of the vacuum series selected by the deformation.
pub fn ground_parity(def: Deformation) -> Parity {
    match def.order() {
        Some(p) if p % 2 == 1 => Parity::Odd,
        _ => Parity::Even,
    }
}

/// Deformed vacuum ψ₀ truncated at `requested_order` or just below the
/// first vanishing q-double-factorial, whichever comes first.
pub fn ground_series(def: Deformation, hbar: f64, requested_order: usize) -> Result<StateSeries> {
    check_hbar(hbar)?;
    if requested_order < 2 {
        return Err(Error::InvalidParameter(format!(
            "series order must be >= 2, got {requested_order}"
        )));
    }
    let kappa = hbar.sqrt().recip();
    let kappa_sq = kappa * kappa;
    let parity = ground_parity(def);
    let offset = usize::from(parity == Parity::Odd);

    let mut coeffs = Vec::with_capacity(requested_order + 1);
    for degree in 0..=requested_order {
        if degree % 2 != offset {
            coeffs.push(Complex64::default());
            continue;
        }
        let denominator = q_double_factorial(def, degree as u32);
        if denominator == 0.0 {
            // keep everything strictly below the first vanishing factor
            break;
        }
        let n = (degree - offset) / 2;
        coeffs.push(Complex64::new((-kappa_sq).powi(n as i32) / denominator, 0.0));
    }
    let series = QPowerSeries::with_parity(coeffs, parity)?;
    let valid_order = series.truncation_order();
    Ok(StateSeries {
        def,
        series,
        kind: SeriesKind::Level(0),
        kappa,
        normalization: Normalization::UnitConstant,
        requested_order,
        valid_order,
    })
}

/// `(κ x - κ⁻¹ d_q) s / √2`, the creation operator in position representation.
pub fn apply_creation(def: Deformation, kappa: f64, s: &QPowerSeries) -> QPowerSeries {
    let raised = s.mul_x().scale(Complex64::new(kappa, 0.0));
    let lowered = q_derive(def, s).scale(Complex64::new(kappa.recip(), 0.0));
    raised
        .sub(&lowered)
        .scale(Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0))
}

/// `(κ x + κ⁻¹ d_q) s / √2`, the annihilation operator in position representation.
pub fn apply_annihilation(def: Deformation, kappa: f64, s: &QPowerSeries) -> QPowerSeries {
    let raised = s.mul_x().scale(Complex64::new(kappa, 0.0));
    let lowered = q_derive(def, s).scale(Complex64::new(kappa.recip(), 0.0));
    raised
        .add(&lowered)
        .scale(Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0))
}

/// Level-`n` wavefunction `ψₙ = (2ⁿ [n]_q!)^(-1/2) (κx - κ⁻¹ d_q)ⁿ ψ₀`.
///
/// Each application raises the polynomial degree by one; the result keeps
/// every produced coefficient and records the vacuum order in `valid_order`.
pub fn excited_series(def: Deformation, hbar: f64, level: usize, requested_order: usize) -> Result<StateSeries> {
    if let Some(p) = def.order() {
        if level > p as usize {
            return Err(Error::LevelOutOfRange { level, order: p });
        }
    }
    let mut state = ground_series(def, hbar, requested_order)?;
    for k in 1..=level {
        let step = apply_creation(def, state.kappa, &state.series);
        state.series = step.scale(Complex64::new(q_bracket(def, k as f64).sqrt().recip(), 0.0));
    }
    state.kind = SeriesKind::Level(level);
    Ok(state)
}

/// Coherent wavefunction `Ψ = c₀ Σₙ αⁿ/√([n]_q!) ψₙ`.
///
/// Without a root of unity the sum runs over `n ≤ requested_order`.
pub fn coherent_series(def: Deformation, hbar: f64, alpha: Complex64, requested_order: usize) -> Result<StateSeries> {
    let levels = def.dimension().unwrap_or(requested_order + 1);
    let coherent = coherent_state_truncated(def, alpha, levels)?;
    let mut state = ground_series(def, hbar, requested_order)?;
    let mut psi_n = state.series.clone();
    let mut total = psi_n.scale(coherent.coeffs[0]);
    for (k, &c) in coherent.coeffs.iter().enumerate().skip(1) {
        psi_n = apply_creation(def, state.kappa, &psi_n)
            .scale(Complex64::new(q_bracket(def, k as f64).sqrt().recip(), 0.0));
        total = total.add(&psi_n.scale(c));
    }
    state.series = total;
    state.kind = SeriesKind::Coherent {
        re: alpha.re,
        im: alpha.im,
    };
    Ok(state)
}

/// Residual series `d_q ψ + κ² x ψ`.
pub fn annihilation_residual_series(s: &StateSeries) -> QPowerSeries {
    let k2 = Complex64::new(s.kappa * s.kappa, 0.0);
    q_derive(s.def, &s.series).add(&s.series.mul_x().scale(k2))
}

/// `max |d_q ψ₀(x) + κ² x ψ₀(x)|` over the sample points.
pub fn annihilation_residual(s: &StateSeries, xs: &[f64]) -> Result<f64> {
    if s.kind != SeriesKind::Level(0) {
        return Err(Error::InvalidParameter(
            "the annihilation residual is defined for the vacuum series only".into(),
        ));
    }
    let r = annihilation_residual_series(s);
    Ok(xs.iter().map(|&x| r.eval(x).norm()).fold(0.0, f64::max))
}

/// Horner evaluation; the real part for real-valued series.
pub fn evaluate(s: &StateSeries, x: f64) -> f64 {
    s.eval(x).re
}

/// `samples` equally spaced points on `[x_min, x_max]` with the series value at each.
pub fn sample(s: &StateSeries, x_min: f64, x_max: f64, samples: usize) -> Result<Vec<(f64, Complex64)>> {
    if samples == 0 || !(x_min.is_finite() && x_max.is_finite()) || x_max < x_min {
        return Err(Error::InvalidParameter(format!(
            "bad sampling window [{x_min}, {x_max}] with {samples} samples"
        )));
    }
    if samples == 1 {
        return Ok(vec![(x_min, s.eval(x_min))]);
    }
    let step = (x_max - x_min) / (samples - 1) as f64;
    Ok((0..samples)
        .map(|i| {
            let x = if i + 1 == samples {
                x_max
            } else {
                x_min + step * i as f64
            };
            (x, s.eval(x))
        })
        .collect())
}
