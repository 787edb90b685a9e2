//! q-numbers and q-calculus at roots of unity.
//!
//! The deformation parameter is `q = exp(iπ/(p+1))` for an integer order
//! `p >= 1`, or the undeformed point `q = 1`. On the root-of-unity branch
//! every q-number `[a]_q = (q^a - q^-a)/(q - q^-1)` is real and equals
//! `sin(aθ)/sin(θ)` with `θ = π/(p+1)`, so that is what we evaluate.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Choice of deformation parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Deformation {
    /// `q = exp(iπ/(p+1))`; the oscillator space has `p + 1` levels.
    RootOfUnity { order: u32 },
    /// `q = 1`, the ordinary oscillator.
    Undeformed,
}

impl Deformation {
    pub fn root_of_unity(order: i64) -> Result<Self> {
        if order < 1 || order > u32::MAX as i64 {
            return Err(Error::InvalidOrder(order));
        }
        Ok(Deformation::RootOfUnity { order: order as u32 })
    }

    /// The order `p`, or `None` on the undeformed branch.
    pub fn order(&self) -> Option<u32> {
        match *self {
            Deformation::RootOfUnity { order } => Some(order),
            Deformation::Undeformed => None,
        }
    }

    /// `θ = π/(p+1)`, absent when `q = 1`.
    pub fn theta(&self) -> Option<f64> {
        self.order().map(|p| PI / (p as f64 + 1.0))
    }

    pub fn q(&self) -> Complex64 {
        match self.theta() {
            Some(theta) => Complex64::from_polar(1.0, theta),
            None => Complex64::new(1.0, 0.0),
        }
    }

    /// `sin²θ`, zero on the undeformed branch.
    pub fn sin_sq(&self) -> f64 {
        match self.order() {
            Some(p) => sin_pi(1.0 / (p as f64 + 1.0)).powi(2),
            None => 0.0,
        }
    }

    /// `cos θ`, one on the undeformed branch.
    pub fn cos_theta(&self) -> f64 {
        match self.order() {
            Some(p) => sin_pi(0.5 - 1.0 / (p as f64 + 1.0)),
            None => 1.0,
        }
    }

    /// Number of oscillator levels, `p + 1`.
    pub fn dimension(&self) -> Option<usize> {
        self.order().map(|p| p as usize + 1)
    }

    pub fn is_undeformed(&self) -> bool {
        matches!(self, Deformation::Undeformed)
    }
}

impl fmt::Display for Deformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Deformation::RootOfUnity { order } => write!(f, "{order}"),
            Deformation::Undeformed => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for Deformation {
    type Err = Error;

    /// Parses an integer order or the spelling `inf`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") {
            return Ok(Deformation::Undeformed);
        }
        let order: i64 = s
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("p must be an integer or `inf`, got `{s}`")))?;
        Deformation::root_of_unity(order)
    }
}

impl Serialize for Deformation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Deformation::RootOfUnity { order } => serializer.serialize_u32(*order),
            Deformation::Undeformed => serializer.serialize_str("inf"),
        }
    }
}

/// `sin(π t)` with exact zeros at integer `t`.
pub(crate) fn sin_pi(t: f64) -> f64 {
    let r = t.rem_euclid(2.0);
    let (sign, r) = if r >= 1.0 { (-1.0, r - 1.0) } else { (1.0, r) };
    let r = if r > 0.5 { 1.0 - r } else { r };
    sign * (PI * r).sin()
}

/// The q-number `[a]_q`.
pub fn q_bracket(def: Deformation, a: f64) -> f64 {
    match def.order() {
        None => a,
        Some(p) => {
            let n = p as f64 + 1.0;
            sin_pi(a / n) / sin_pi(1.0 / n)
        }
    }
}

/// `[a]_q` evaluated literally as `(q^a - q^-a)/(q - q^-1)` in complex arithmetic.
///
/// Kept as a cross-check for [`q_bracket`]; it loses accuracy for large `a`.
pub fn q_bracket_complex(def: Deformation, a: f64) -> Complex64 {
    let Some(theta) = def.theta() else {
        return Complex64::new(a, 0.0);
    };
    let q = Complex64::from_polar(1.0, theta);
    let qa = Complex64::from_polar(1.0, a * theta);
    (qa - qa.inv()) / (q - q.inv())
}

/// `[n]_q! = [1]_q [2]_q ... [n]_q`, with `[0]_q! = 1`.
pub fn q_factorial(def: Deformation, n: u32) -> f64 {
    (1..=n).map(|k| q_bracket(def, k as f64)).product()
}

/// Same-parity product `[m]_q [m-2]_q ...` ending at `[2]_q` or `[1]_q`.
pub fn q_double_factorial(def: Deformation, m: u32) -> f64 {
    (1..=m).rev().step_by(2).map(|k| q_bracket(def, k as f64)).product()
}

/// Parity of a power series in `x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

impl Parity {
    pub fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
            Parity::Mixed => Parity::Mixed,
        }
    }

    fn admits(self, index: usize) -> bool {
        match self {
            Parity::Even => index % 2 == 0,
            Parity::Odd => index % 2 == 1,
            Parity::Mixed => true,
        }
    }
}

/// A truncated power series `Σ coeffs[n] x^n` with complex coefficients.
///
/// The truncation order is the highest retained power, so there are always
/// `truncation_order + 1` coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct QPowerSeries {
    coeffs: Vec<Complex64>,
    parity: Parity,
}

impl QPowerSeries {
    /// Builds a series and infers its parity from exact zeros.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        let zero_at = |odd: bool| {
            coeffs
                .iter()
                .enumerate()
                .filter(|(i, _)| (i % 2 == 1) == odd)
                .all(|(_, c)| *c == Complex64::new(0.0, 0.0))
        };
        let parity = if zero_at(true) {
            Parity::Even
        } else if zero_at(false) {
            Parity::Odd
        } else {
            Parity::Mixed
        };
        QPowerSeries { coeffs, parity }
    }

    /// Builds a series with a declared parity, rejecting coefficients that contradict it.
    pub fn with_parity(coeffs: Vec<Complex64>, parity: Parity) -> Result<Self> {
        if let Some((i, _)) = coeffs
            .iter()
            .enumerate()
            .find(|(i, c)| !parity.admits(*i) && **c != Complex64::new(0.0, 0.0))
        {
            return Err(Error::InvalidParameter(format!(
                "coefficient of x^{i} is nonzero in a series declared {parity:?}"
            )));
        }
        let mut s = QPowerSeries { coeffs, parity };
        if s.coeffs.is_empty() {
            s.coeffs.push(Complex64::new(0.0, 0.0));
        }
        Ok(s)
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self::new(Vec::new())
    }

    /// `c · x^n`.
    pub fn monomial(n: usize, c: Complex64) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        coeffs[n] = c;
        let parity = if n % 2 == 0 { Parity::Even } else { Parity::Odd };
        QPowerSeries { coeffs, parity }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `x^n`, zero beyond the truncation order.
    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    pub fn truncation_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// Horner evaluation at a real point.
    pub fn eval(&self, x: f64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        QPowerSeries {
            coeffs: self.coeffs.iter().map(|&c| c * factor).collect(),
            parity: self.parity,
        }
    }

    /// Multiplication by `x`; raises the truncation order by one.
    pub fn mul_x(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Complex64::new(0.0, 0.0));
        coeffs.extend_from_slice(&self.coeffs);
        QPowerSeries {
            coeffs,
            parity: self.parity.flip(),
        }
    }

    /// Coefficient-wise sum; the result carries the larger truncation order.
    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|i| self.coeff(i) + other.coeff(i)).collect();
        if self.parity == other.parity {
            QPowerSeries {
                coeffs,
                parity: self.parity,
            }
        } else {
            Self::new(coeffs)
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Largest imaginary part among the coefficients.
    pub fn max_imag(&self) -> f64 {
        self.coeffs.iter().map(|c| c.im.abs()).fold(0.0, f64::max)
    }
}

/// q-derivative `(1/x)[x d/dx]_q`, which sends `x^n` to `[n]_q x^(n-1)`.
pub fn q_derive(def: Deformation, s: &QPowerSeries) -> QPowerSeries {
    if s.coeffs.len() <= 1 {
        return QPowerSeries::with_parity(vec![Complex64::new(0.0, 0.0)], s.parity.flip())
            .expect("zero series admits any parity");
    }
    let coeffs = s
        .coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, &c)| c * q_bracket(def, n as f64))
        .collect();
    QPowerSeries {
        coeffs,
        parity: s.parity.flip(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn p(order: i64) -> Deformation {
        Deformation::root_of_unity(order).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn bracket_examples() {
        assert_eq!(q_bracket(Deformation::Undeformed, 5.0), 5.0);
        assert_abs_diff_eq!(q_bracket(p(3), 4.0), 0.0, epsilon = 1e-12);
        // (q² - q⁻²)/(q - q⁻¹) with q = e^{iπ/4}, evaluated by hand in complex arithmetic.
        let q = Complex64::new(0.5f64.sqrt(), 0.5f64.sqrt());
        let direct = (q * q - (q * q).inv()) / (q - q.inv());
        assert_abs_diff_eq!(direct.re, std::f64::consts::SQRT_2, epsilon = 1e-7);
        assert_abs_diff_eq!(q_bracket(p(3), 2.0), direct.re, epsilon = 1e-12);
    }

    #[test]
    fn complex_form_agrees_with_sine_ratio() {
        for order in 1..=12 {
            for a in -30..=30 {
                let z = q_bracket_complex(p(order), a as f64);
                assert!(z.im.abs() < 1e-10);
                assert_abs_diff_eq!(z.re, q_bracket(p(order), a as f64), epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn factorial_examples() {
        assert_eq!(q_factorial(p(5), 0), 1.0);
        assert_eq!(q_factorial(Deformation::Undeformed, 4), 24.0);
        let brute: f64 = (1..=3).map(|k| q_bracket(p(3), k as f64)).product();
        assert_abs_diff_eq!(brute, std::f64::consts::SQRT_2, epsilon = 1e-7);
        assert_abs_diff_eq!(q_factorial(p(3), 3), brute, epsilon = 1e-12);
    }

    #[test]
    fn double_factorial_examples() {
        assert_eq!(q_double_factorial(Deformation::Undeformed, 6), 48.0);
        assert_eq!(q_double_factorial(Deformation::Undeformed, 0), 1.0);
        assert_eq!(q_double_factorial(Deformation::Undeformed, 1), 1.0);
        assert_abs_diff_eq!(q_double_factorial(p(3), 3), 1.0, epsilon = 1e-12);
        assert_eq!(q_double_factorial(p(2), 3), 0.0);
    }

    #[test]
    fn derive_examples() {
        let x = QPowerSeries::monomial(1, c(1.0));
        let d = q_derive(p(4), &x);
        assert_eq!(d.coeffs(), &[c(1.0)]);
        assert_eq!(d.truncation_order(), 0);

        let x3 = QPowerSeries::monomial(3, c(1.0));
        let d = q_derive(Deformation::Undeformed, &x3);
        assert_eq!(d.coeffs(), &[c(0.0), c(0.0), c(3.0)]);
        assert_eq!(d.parity(), Parity::Even);

        let x2 = QPowerSeries::monomial(2, c(1.0));
        let d = q_derive(p(3), &x2);
        assert_abs_diff_eq!(d.coeff(1).re, 2f64.sqrt(), epsilon = 1e-12);
        assert_eq!(d.parity(), Parity::Odd);

        let constant = QPowerSeries::from_real(&[7.0]);
        let d = q_derive(p(3), &constant);
        assert_eq!(d.coeffs(), &[c(0.0)]);
    }

    #[test]
    fn vanishing_brackets_at_multiples_of_the_period() {
        for order in 1..=200u32 {
            for n in -5i64..=5 {
                let a = n as f64 * (order as f64 + 1.0);
                assert!(q_bracket(p(order as i64), a).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn classical_limit_at_large_order() {
        for n in 0..=10 {
            assert!((q_bracket(p(1_000_000), n as f64) - n as f64).abs() < 1e-6);
            // monotone approach along a ladder of orders
            let gaps: Vec<f64> = [10, 100, 1_000, 10_000, 100_000]
                .iter()
                .map(|&o| (q_bracket(p(o), n as f64) - n as f64).abs())
                .collect();
            assert!(gaps.windows(2).all(|w| w[1] <= w[0]), "n={n}: {gaps:?}");
        }
    }

    #[test]
    fn parity_validation() {
        assert!(QPowerSeries::with_parity(vec![c(1.0), c(1.0)], Parity::Even).is_err());
        assert!(QPowerSeries::with_parity(vec![c(0.0), c(1.0)], Parity::Odd).is_ok());
        assert_eq!(QPowerSeries::from_real(&[1.0, 0.0, 2.0]).parity(), Parity::Even);
        assert_eq!(QPowerSeries::from_real(&[1.0, 3.0]).parity(), Parity::Mixed);
    }

    #[test]
    fn parse_deformation() {
        assert_eq!("inf".parse::<Deformation>().unwrap(), Deformation::Undeformed);
        assert_eq!("3".parse::<Deformation>().unwrap(), p(3));
        assert_eq!("0".parse::<Deformation>(), Err(Error::InvalidOrder(0)));
        assert!("x".parse::<Deformation>().is_err());
    }

    proptest! {
        #[test]
        fn deformation_invariants(order in 1u32..1_000) {
            let def = p(order as i64);
            let q = def.q();
            prop_assert!((q.norm() - 1.0).abs() < 1e-12);
            let q_period = q.powu(2 * (order + 1));
            prop_assert!((q_period - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            let theta = def.theta().unwrap();
            prop_assert!(theta > 0.0 && theta <= std::f64::consts::FRAC_PI_2);
        }

        #[test]
        fn bracket_is_odd(order in 1i64..500, a in -50.0f64..50.0) {
            prop_assert!((q_bracket(p(order), a) + q_bracket(p(order), -a)).abs() < 1e-12);
            prop_assert_eq!(q_bracket(Deformation::Undeformed, a), -q_bracket(Deformation::Undeformed, -a));
        }

        #[test]
        fn factorial_splits_into_double_factorials(order in 1i64..40, n in 1u32..30) {
            let def = p(order);
            let lhs = q_factorial(def, n);
            let rhs = q_double_factorial(def, n) * q_double_factorial(def, n - 1);
            prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0));
        }

        #[test]
        fn second_derivative_of_monomial(order in 1i64..40, n in 0usize..30) {
            let def = p(order);
            let x_n = QPowerSeries::monomial(n, Complex64::new(1.0, 0.0));
            let dd = q_derive(def, &q_derive(def, &x_n));
            let expected = if n >= 2 {
                q_bracket(def, n as f64) * q_bracket(def, n as f64 - 1.0)
            } else {
                0.0
            };
            let got = if n >= 2 { dd.coeff(n - 2).re } else { dd.coeff(0).re };
            prop_assert!((got - expected).abs() < 1e-12);
        }
    }
}
