//! Closed-form deformed beam quality factor and the nonlinear-medium relations.
//!
//! For a deformed coherent state the position and momentum variances both
//! equal `(ℏ/2) F` with
//!
//! ```text
//! F = √(1 - |α|⁴ sin²θ) - (1 - cos θ) |α|²
//! ```
//!
//! and the beam quality factor is `M_q² = |F|`. The radical is real only
//! while `|α|⁴ sin²θ <= 1`, which bounds `|α|²` for a given order and the
//! order for a given amplitude.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fockspace::{check_hbar, EvaluationPath, UncertaintyReport};
use crate::qalgebra::Deformation;

/// Roundoff floor of `1 - |α|⁴ sin²θ`; radicands this close to zero are treated as zero.
const RADICAND_SLACK: f64 = 16.0 * f64::EPSILON;

/// Waist, wavelength and far-field spread of a beam.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BeamGeometry {
    pub wavelength: f64,
    /// Waist radius ω₀.
    pub waist_radius: f64,
    /// Axial position z₀ of the waist.
    pub waist_location: f64,
    /// Far-field divergence θ in radians.
    pub divergence: f64,
}

impl BeamGeometry {
    /// A diffraction-limited beam: the divergence is `λ/(π ω₀)`.
    pub fn new(wavelength: f64, waist_radius: f64) -> Result<Self> {
        for (name, v) in [("wavelength", wavelength), ("waist radius", waist_radius)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(BeamGeometry {
            wavelength,
            waist_radius,
            waist_location: 0.0,
            divergence: wavelength / (std::f64::consts::PI * waist_radius),
        })
    }

    pub fn with_divergence(mut self, divergence: f64) -> Self {
        self.divergence = divergence;
        self
    }

    pub fn with_waist_location(mut self, z0: f64) -> Self {
        self.waist_location = z0;
        self
    }

    /// `λ/(π ω₀)`.
    pub fn diffraction_limit(&self) -> f64 {
        self.wavelength / (std::f64::consts::PI * self.waist_radius)
    }

    /// `(π/λ) θ ω₀`.
    pub fn m2(&self) -> f64 {
        self.divergence / self.diffraction_limit()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingSource {
    /// Direct evaluation of the published closed form for βJ.
    Literal,
    /// `βJ` solved from `θ_eff² = θ² - βJ` with an ideal Gaussian input.
    Inversion,
}

/// The product βJ of a self-focusing medium.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MediumCoupling {
    pub beta_j: f64,
    pub source: CouplingSource,
}

impl MediumCoupling {
    pub fn new(beta_j: f64) -> Self {
        MediumCoupling {
            beta_j,
            source: CouplingSource::Inversion,
        }
    }
}

/// Both routes to βJ and how far apart they land.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BetaJReport {
    pub inversion: MediumCoupling,
    pub literal: MediumCoupling,
    pub abs_difference: f64,
}

/// `1 - |α|⁴ sin²θ`, snapped to zero within roundoff of the admissibility boundary.
fn radicand(def: Deformation, abs_sq: f64) -> f64 {
    let r = 1.0 - abs_sq * abs_sq * def.sin_sq();
    if r.abs() <= RADICAND_SLACK {
        0.0
    } else {
        r
    }
}

fn admissible_radical(def: Deformation, alpha: Complex64) -> Result<f64> {
    let abs_sq = alpha.norm_sqr();
    let r = radicand(def, abs_sq);
    if r < 0.0 {
        return Err(Error::constraint(
            format!("|alpha|^2 = {abs_sq:.9} makes 1 - |alpha|^4 sin^2(pi/(p+1)) negative at p = {def}"),
            max_alpha_for_order(def),
        ));
    }
    Ok(r.sqrt())
}

/// Signed factor `F` whose absolute value is `M_q²`.
pub fn closed_form_factor(def: Deformation, alpha: Complex64) -> Result<f64> {
    if def.is_undeformed() {
        return Ok(1.0);
    }
    let radical = admissible_radical(def, alpha)?;
    Ok(radical - (1.0 - def.cos_theta()) * alpha.norm_sqr())
}

/// Closed-form deformed beam quality factor `M_q²` of the coherent state `|α⟩`.
pub fn mq2_closed(def: Deformation, alpha: Complex64) -> Result<f64> {
    closed_form_factor(def, alpha).map(f64::abs)
}

/// `⟨a a†⟩` with `⟨[N]⟩` replaced by `|α|²`: `cos θ |α|² + √(1 - |α|⁴ sin²θ)`.
pub fn aadag_closed(def: Deformation, alpha: Complex64) -> Result<f64> {
    if def.is_undeformed() {
        return Ok(1.0 + alpha.norm_sqr());
    }
    let radical = admissible_radical(def, alpha)?;
    Ok(def.cos_theta() * alpha.norm_sqr() + radical)
}

/// Uncertainty report assembled from the closed forms.
///
/// The closed forms give equal variances `(ℏ/2)F`; the report stores
/// `(ℏ/2)|F|` and keeps the sign in `closed_form_factor`.
pub fn uncertainty_closed(def: Deformation, alpha: Complex64, hbar: f64) -> Result<UncertaintyReport> {
    check_hbar(hbar)?;
    let factor = closed_form_factor(def, alpha)?;
    let var = hbar / 2.0 * factor.abs();
    let scale = (2.0 * hbar).sqrt();
    Ok(UncertaintyReport {
        mean_x: scale * alpha.re,
        mean_p: scale * alpha.im,
        var_x: var,
        var_p: var,
        product: var,
        commutator_mean: factor.abs(),
        mq2: factor.abs(),
        path: EvaluationPath::ClosedForm,
        closed_form_factor: Some(factor),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TableRow {
    pub p: u32,
    pub mq2: f64,
}

/// `M_q²` at `|α| = 1` for `p = 1..=p_max`, i.e. `|2 cos(π/(p+1)) - 1|`.
pub fn golden_table(p_max: u32) -> Result<Vec<TableRow>> {
    if p_max < 1 {
        return Err(Error::InvalidParameter(format!("p_max must be >= 1, got {p_max}")));
    }
    Ok((1..=p_max)
        .map(|p| {
            let theta = std::f64::consts::PI / (p as f64 + 1.0);
            TableRow {
                p,
                mq2: (2.0 * theta.cos() - 1.0).abs(),
            }
        })
        .collect())
}

/// Smallest order `p` at which `M_q²` is real for this amplitude.
pub fn min_order_for_alpha(alpha: Complex64) -> u32 {
    let abs_sq = alpha.norm_sqr();
    if abs_sq <= 1.0 {
        return 1;
    }
    let admissible = |p: u32| radicand(Deformation::RootOfUnity { order: p }, abs_sq) >= 0.0;
    let estimate = std::f64::consts::PI / (1.0 / abs_sq).asin() - 1.0;
    let mut p = (estimate.ceil() as u32).max(1);
    while p > 1 && admissible(p - 1) {
        p -= 1;
    }
    while !admissible(p) {
        p += 1;
    }
    p
}

/// Largest admissible `|α|²` at this order, `1/sin(π/(p+1))`; unbounded when `q = 1`.
pub fn max_alpha_for_order(def: Deformation) -> f64 {
    match def.order() {
        Some(_) => def.sin_sq().sqrt().recip(),
        None => f64::INFINITY,
    }
}

/// `M_eff² = (M⁴ - (π ω₀/λ)² βJ)^(1/2)`.
pub fn m_eff_squared(m2: f64, geom: &BeamGeometry, medium: &MediumCoupling) -> Result<f64> {
    let focus = medium.beta_j / geom.diffraction_limit().powi(2);
    let m4 = m2 * m2;
    let mut arg = m4 - focus;
    // cancellation leaves a few ulps of noise when the medium exactly cancels the divergence
    if arg.abs() <= 8.0 * f64::EPSILON * m4.max(focus.abs()) {
        arg = 0.0;
    }
    if arg < 0.0 {
        return Err(Error::constraint(
            format!("beta*J = {:.9e} exceeds the divergence budget", medium.beta_j),
            m4 * geom.diffraction_limit().powi(2),
        ));
    }
    Ok(arg.sqrt())
}

/// Deformed divergence `θ_q = (λ/(π ω₀)) M_q²`.
pub fn theta_q(def: Deformation, alpha: Complex64, geom: &BeamGeometry) -> Result<f64> {
    Ok(geom.diffraction_limit() * mq2_closed(def, alpha)?)
}

/// βJ that turns an ideal Gaussian into the deformed beam, by both routes.
pub fn beta_j_inferred(def: Deformation, alpha: Complex64, geom: &BeamGeometry) -> Result<BetaJReport> {
    let mq2 = mq2_closed(def, alpha)?;
    let k = geom.diffraction_limit().powi(2);
    let inversion = (1.0 - mq2 * mq2) * k;

    let abs_sq = alpha.norm_sqr();
    let s2 = def.sin_sq();
    let radical = radicand(def, abs_sq).max(0.0).sqrt();
    // |α|⁴ (s² + 4 s² √(..)/|α|² - 2 s²), with the 1/|α|² folded in so α = 0 is finite
    let literal = k * (abs_sq * abs_sq * s2 + 4.0 * abs_sq * s2 * radical - 2.0 * abs_sq * abs_sq * s2);

    Ok(BetaJReport {
        inversion: MediumCoupling {
            beta_j: inversion,
            source: CouplingSource::Inversion,
        },
        literal: MediumCoupling {
            beta_j: literal,
            source: CouplingSource::Literal,
        },
        abs_difference: (inversion - literal).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn p(order: i64) -> Deformation {
        Deformation::root_of_unity(order).unwrap()
    }

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn mq2_examples() {
        assert_eq!(
            mq2_closed(Deformation::Undeformed, Complex64::new(3.0, -2.0)).unwrap(),
            1.0
        );
        assert_abs_diff_eq!(mq2_closed(p(3), re(1.0)).unwrap(), 0.414, epsilon = 5e-4);
        assert_abs_diff_eq!(mq2_closed(p(2), re(1.0)).unwrap(), 0.0, epsilon = 1e-12);
        let at_bound = re(2f64.sqrt().sqrt());
        assert_abs_diff_eq!(mq2_closed(p(3), at_bound).unwrap(), 2f64.sqrt() - 1.0, epsilon = 1e-10);
        assert_eq!(mq2_closed(p(5), re(0.0)).unwrap(), 1.0);
    }

    #[test]
    fn inadmissible_amplitude_reports_bound() {
        let err = mq2_closed(p(3), re(2f64.sqrt())).unwrap_err();
        match err {
            Error::ConstraintViolation { bound, .. } => assert_abs_diff_eq!(bound, 2f64.sqrt(), epsilon = 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn table_examples() {
        let t = golden_table(7).unwrap();
        let published = [1.0, 0.0, 0.414, 0.618, 0.732, 0.802, 0.848];
        for (row, want) in t.iter().zip(published) {
            assert_abs_diff_eq!(row.mq2, want, epsilon = 5e-4);
        }
        assert_abs_diff_eq!(golden_table(100_000).unwrap().last().unwrap().mq2, 1.0, epsilon = 1e-8);
        assert!(golden_table(0).is_err());
    }

    #[test]
    fn table_matches_closed_form() {
        for row in golden_table(64).unwrap() {
            let closed = mq2_closed(p(row.p as i64), re(1.0)).unwrap();
            assert!((row.mq2 - closed).abs() < 1e-12, "p={}", row.p);
        }
    }

    #[test]
    fn order_bounds() {
        assert_eq!(min_order_for_alpha(re(1.0)), 1);
        assert_eq!(min_order_for_alpha(re(0.3)), 1);
        assert_eq!(min_order_for_alpha(re(2f64.sqrt().sqrt())), 3);
        // brute force: smallest p with sin(π/(p+1)) <= 1/2
        let brute = (1..100)
            .find(|&p| (std::f64::consts::PI / (p as f64 + 1.0)).sin() <= 0.5 + 1e-12)
            .unwrap();
        assert_eq!(brute, 5);
        assert_eq!(min_order_for_alpha(re(2f64.sqrt())), brute);

        assert_abs_diff_eq!(max_alpha_for_order(p(3)), 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(max_alpha_for_order(p(1)), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(max_alpha_for_order(p(5)), 2.0, epsilon = 1e-12);
        assert!(max_alpha_for_order(Deformation::Undeformed).is_infinite());
    }

    #[test]
    fn bounds_are_mutually_consistent() {
        for order in 1..=500u32 {
            let a2 = max_alpha_for_order(p(order as i64));
            assert!(min_order_for_alpha(re(a2.sqrt())) <= order, "p={order}");
            assert!(mq2_closed(p(order as i64), re(a2.sqrt())).is_ok());
        }
    }

    #[test]
    fn geometry_examples() {
        let g = BeamGeometry::new(10.6e-6, 1e-3).unwrap();
        assert_abs_diff_eq!(g.m2(), 1.0, epsilon = 1e-15);
        assert!(BeamGeometry::new(-1.0, 1.0).is_err());
        assert!(BeamGeometry::new(1.0, 0.0).is_err());
    }

    #[test]
    fn m_eff_examples() {
        let g = BeamGeometry::new(10.6e-6, 1e-3).unwrap();
        let k = g.diffraction_limit().powi(2);
        assert_eq!(m_eff_squared(1.7, &g, &MediumCoupling::new(0.0)).unwrap(), 1.7);
        let target = 0.414;
        let bj = k * (1.0 - target * target);
        assert_abs_diff_eq!(
            m_eff_squared(1.0, &g, &MediumCoupling::new(bj)).unwrap(),
            target,
            epsilon = 1e-12
        );
        assert!(m_eff_squared(1.0, &g, &MediumCoupling::new(0.1 * k)).unwrap() < 1.0);
        assert!(matches!(
            m_eff_squared(1.0, &g, &MediumCoupling::new(1.5 * k)),
            Err(Error::ConstraintViolation { .. })
        ));
    }

    #[test]
    fn theta_examples() {
        let g = BeamGeometry::new(10.6e-6, 1e-3).unwrap();
        assert_abs_diff_eq!(
            theta_q(Deformation::Undeformed, re(1.0), &g).unwrap(),
            g.diffraction_limit()
        );
        assert_abs_diff_eq!(theta_q(p(2), re(1.0), &g).unwrap(), 0.0, epsilon = 1e-18);
        let t = theta_q(p(3), re(1.0), &g).unwrap();
        assert_abs_diff_eq!(t, 1.397e-3, epsilon = 1e-6);
        // half-angle form: |√(1 - |α|⁴ sin²θ) - 2|α|² sin²(θ/2)|
        let th = std::f64::consts::FRAC_PI_4;
        let explicit = g.diffraction_limit() * ((1.0 - th.sin().powi(2)).sqrt() - 2.0 * (th / 2.0).sin().powi(2)).abs();
        assert_abs_diff_eq!(t, explicit, epsilon = 1e-15);
    }

    #[test]
    fn beta_j_examples() {
        let g = BeamGeometry::new(10.6e-6, 1e-3).unwrap();
        let k = g.diffraction_limit().powi(2);
        assert_eq!(
            beta_j_inferred(Deformation::Undeformed, re(1.0), &g)
                .unwrap()
                .inversion
                .beta_j,
            0.0
        );
        let r = beta_j_inferred(p(2), re(1.0), &g).unwrap();
        assert_abs_diff_eq!(r.inversion.beta_j / k, 1.0, epsilon = 1e-12);
        let r = beta_j_inferred(p(3), re(1.0), &g).unwrap();
        let m = 2f64.sqrt() - 1.0;
        assert_abs_diff_eq!(r.inversion.beta_j / k, 1.0 - m * m, epsilon = 1e-12);
        assert_eq!(r.inversion.source, CouplingSource::Inversion);
        assert_eq!(r.literal.source, CouplingSource::Literal);
        // literal form at p = 3, |α| = 1: s² + 4 s² √(1 - s²) - 2 s² with s² = 1/2
        assert_abs_diff_eq!(r.literal.beta_j / k, 0.5 + 2.0 * 0.5f64.sqrt() - 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.abs_difference, (r.inversion.beta_j - r.literal.beta_j).abs());
    }

    #[test]
    fn closed_report_saturates() {
        let r = uncertainty_closed(p(3), Complex64::new(0.6, 0.3), 2.0).unwrap();
        assert_eq!(r.path, EvaluationPath::ClosedForm);
        assert_abs_diff_eq!(r.product, r.commutator_mean * 2.0 / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.mean_x, 2.0 * 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(r.mean_p, 2.0 * 0.3, epsilon = 1e-15);
        let r = uncertainty_closed(p(1), re(1.0), 1.0).unwrap();
        assert_abs_diff_eq!(r.mq2, 1.0, epsilon = 1e-15);
        assert_eq!(aadag_closed(p(1), re(1.0)).unwrap(), 0.0);
    }

    proptest! {
        #[test]
        fn deformed_quality_never_exceeds_one(order in 1i64..2000, frac in 0.0f64..=1.0, phase in 0.0f64..6.3) {
            let def = p(order);
            let abs_sq = frac * max_alpha_for_order(def);
            let alpha = Complex64::from_polar(abs_sq.sqrt(), phase);
            let m = mq2_closed(def, alpha).unwrap();
            prop_assert!(m <= 1.0 + 1e-12);
            let real_axis = mq2_closed(def, re(abs_sq.sqrt())).unwrap();
            prop_assert!((m - real_axis).abs() < 1e-12);
        }

        #[test]
        fn quality_tends_to_one_with_order(abs in 0.0f64..3.0) {
            let alpha = re(abs);
            let start = min_order_for_alpha(alpha).max(1) as i64;
            let gaps: Vec<f64> = [start * 10, start * 100, start * 1000, start * 10000]
                .iter()
                .map(|&o| (1.0 - mq2_closed(p(o), alpha).unwrap()).abs())
                .collect();
            prop_assert!(gaps[3] < 1e-4 * (1.0 + abs * abs));
            prop_assert!(gaps.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        }

        #[test]
        fn medium_round_trip(order in 1i64..50, frac in 0.0f64..=1.0, lambda in 1e-7f64..1e-4, w0 in 1e-5f64..1e-2) {
            let def = p(order);
            let alpha = re((frac * max_alpha_for_order(def)).sqrt());
            let g = BeamGeometry::new(lambda, w0).unwrap();
            let bj = beta_j_inferred(def, alpha, &g).unwrap().inversion;
            prop_assert!(bj.beta_j >= 0.0);
            let back = m_eff_squared(1.0, &g, &bj).unwrap();
            prop_assert!((back - mq2_closed(def, alpha).unwrap()).abs() < 1e-9);
        }
    }
}
