//! Finite matrix realization of the deformed oscillator.
//!
//! At `q = exp(iπ/(p+1))` the ladder operators act on `p + 1` levels and
//! `a† |p⟩ = 0`, so everything here is an exact dense computation. These
//! matrices are the reference against which the closed-form beam quality
//! expressions in [`crate::beamquality`] are checked.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qalgebra::{q_bracket, Deformation};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub(crate) fn check_hbar(hbar: f64) -> Result<()> {
    if hbar.is_finite() && hbar > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")))
    }
}

/// Ladder and number operators on a finite basis `|0⟩ .. |dim-1⟩`.
#[derive(Clone, Debug)]
pub struct FockOperators {
    pub def: Deformation,
    pub dim: usize,
    pub a: CMatrix,
    pub adag: CMatrix,
    pub nq: CMatrix,
    pub hbar: f64,
}

/// Operators on the full `(p+1)`-level space of a root-of-unity deformation.
pub fn build_operators(def: Deformation, hbar: f64) -> Result<FockOperators> {
    let dim = def.dimension().ok_or(Error::UnboundedSpace)?;
    build_truncated(def, dim, hbar)
}

/// Operators restricted to the lowest `levels` states.
///
/// On the undeformed branch this is the usual truncated oscillator with
/// `a|n⟩ = √n |n-1⟩`; it is how the `q = 1` limit is emulated numerically.
pub fn build_truncated(def: Deformation, levels: usize, hbar: f64) -> Result<FockOperators> {
    check_hbar(hbar)?;
    if levels < 2 {
        return Err(Error::InvalidParameter(format!(
            "a Fock space needs at least 2 levels, got {levels}"
        )));
    }
    if let Some(dim) = def.dimension() {
        if levels > dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: levels,
            });
        }
    }
    let mut a = CMatrix::zeros(levels, levels);
    for n in 1..levels {
        a[(n - 1, n)] = Complex64::new(q_bracket(def, n as f64).sqrt(), 0.0);
    }
    let adag = a.adjoint();
    let nq = CMatrix::from_diagonal(&CVector::from_iterator(
        levels,
        (0..levels).map(|n| Complex64::new(n as f64, 0.0)),
    ));
    Ok(FockOperators {
        def,
        dim: levels,
        a,
        adag,
        nq,
        hbar,
    })
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn diag(values: impl Iterator<Item = Complex64>, dim: usize) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(dim, values))
}

impl FockOperators {
    /// `x = √(ℏ/2)(a + a†)` and `p = -i√(ℏ/2)(a - a†)`.
    pub fn position_momentum(&self) -> (CMatrix, CMatrix) {
        let s = Complex64::new((self.hbar / 2.0).sqrt(), 0.0);
        let x = (&self.a + &self.adag) * s;
        let p = (&self.a - &self.adag) * (-I * s);
        (x, p)
    }

    /// `max |a a† - q a† a - q^(-N)|`.
    pub fn deformed_commutator_residual(&self) -> f64 {
        let q = self.def.q();
        let q_minus_n = diag((0..self.dim).map(|n| q.powi(-(n as i32))), self.dim);
        let lhs = &self.a * &self.adag - (&self.adag * &self.a) * q;
        max_abs(&(lhs - q_minus_n))
    }

    /// `(max |a† a - [N]|, max |a a† - [N+1]|)`.
    pub fn number_residuals(&self) -> (f64, f64) {
        let bracket_diag = |shift: f64| {
            diag(
                (0..self.dim).map(|n| Complex64::new(q_bracket(self.def, n as f64 + shift), 0.0)),
                self.dim,
            )
        };
        let lower = &self.adag * &self.a - bracket_diag(0.0);
        let upper = &self.a * &self.adag - bracket_diag(1.0);
        (max_abs(&lower), max_abs(&upper))
    }

    /// `x p - p x` by explicit matrix products.
    pub fn commutator_xp(&self) -> CMatrix {
        let (x, p) = self.position_momentum();
        &x * &p - &p * &x
    }

    /// `max |[x, p] - iℏ([N+1] - [N])|`.
    pub fn xp_commutator_residual(&self) -> f64 {
        let expected = diag(
            (0..self.dim).map(|n| {
                let n = n as f64;
                I * self.hbar * (q_bracket(self.def, n + 1.0) - q_bracket(self.def, n))
            }),
            self.dim,
        );
        max_abs(&(self.commutator_xp() - expected))
    }

    /// Largest component of `a|0⟩`, `a†|top⟩` and `(N - n)|n⟩`.
    pub fn boundary_residual(&self) -> f64 {
        let top = self.dim - 1;
        let a_vacuum = self.a.column(0).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let adag_top = self.adag.column(top).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let number = (0..self.dim)
            .map(|n| (self.nq[(n, n)] - Complex64::new(n as f64, 0.0)).norm())
            .fold(0.0, f64::max);
        a_vacuum.max(adag_top).max(number)
    }

    /// Largest deviation of `M` from its conjugate transpose.
    pub fn hermiticity_defect(m: &CMatrix) -> f64 {
        max_abs(&(m - m.adjoint()))
    }
}

/// Convenience wrapper around [`FockOperators::position_momentum`].
pub fn position_momentum(ops: &FockOperators) -> (CMatrix, CMatrix) {
    ops.position_momentum()
}

/// Normalized deformed coherent state `c_n = c_0 αⁿ / √([n]_q!)`.
#[derive(Clone, Debug, Serialize)]
pub struct CoherentState {
    pub alpha: Complex64,
    pub coeffs: Vec<Complex64>,
    /// `c_0 = (Σ |α|^(2n) / [n]_q!)^(-1/2)`.
    pub norm_factor: f64,
    #[serde(skip)]
    pub def: Deformation,
}

impl CoherentState {
    pub fn vector(&self) -> CVector {
        CVector::from_column_slice(&self.coeffs)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

pub fn coherent_state(def: Deformation, alpha: Complex64) -> Result<CoherentState> {
    let dim = def.dimension().ok_or(Error::UnboundedSpace)?;
    coherent_state_truncated(def, alpha, dim)
}

/// Coherent-state coefficients on the lowest `levels` states.
pub fn coherent_state_truncated(def: Deformation, alpha: Complex64, levels: usize) -> Result<CoherentState> {
    if levels == 0 {
        return Err(Error::InvalidParameter("a state needs at least one level".into()));
    }
    if let Some(dim) = def.dimension() {
        if levels > dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: levels,
            });
        }
    }
    // αⁿ/√([n]!) built incrementally
    let mut raw = Vec::with_capacity(levels);
    let mut term = Complex64::new(1.0, 0.0);
    raw.push(term);
    for n in 1..levels {
        term *= alpha / q_bracket(def, n as f64).sqrt();
        raw.push(term);
    }
    let norm_factor = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt().recip();
    let coeffs = raw.into_iter().map(|c| c * norm_factor).collect();
    Ok(CoherentState {
        alpha,
        coeffs,
        norm_factor,
        def,
    })
}

/// `‖a v - α v‖₂` for the coherent-state vector.
///
/// Analytically this is `|α c_top|`: the recurrence makes every other
/// component of `a|α⟩ - α|α⟩` vanish.
pub fn eigen_defect(def: Deformation, state: &CoherentState) -> f64 {
    let v = &state.coeffs;
    let top = v.len() - 1;
    (0..=top)
        .map(|n| {
            let lowered = if n < top {
                v[n + 1] * q_bracket(def, n as f64 + 1.0).sqrt()
            } else {
                ZERO
            };
            (lowered - state.alpha * v[n]).norm_sqr()
        })
        .sum::<f64>()
        .sqrt()
}

/// `v† M v`.
pub fn expectation(op: &CMatrix, state: &CVector) -> Result<Complex64> {
    if op.nrows() != state.len() || op.ncols() != state.len() {
        return Err(Error::DimensionMismatch {
            expected: op.ncols(),
            found: state.len(),
        });
    }
    Ok(state.dotc(&(op * state)))
}

/// Which route produced an [`UncertaintyReport`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EvaluationPath {
    ClosedForm,
    ExactOracle,
}

/// Position and momentum statistics of one state.
#[derive(Clone, Debug, Serialize)]
pub struct UncertaintyReport {
    pub mean_x: f64,
    pub mean_p: f64,
    pub var_x: f64,
    pub var_p: f64,
    /// `√(var_x · var_p)`.
    pub product: f64,
    /// `|⟨[x, p]⟩| / ℏ`.
    pub commutator_mean: f64,
    /// `(2/ℏ) √(var_x · var_p)`.
    pub mq2: f64,
    pub path: EvaluationPath,
    /// Signed value inside the absolute value of the closed form, when that route was used.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form_factor: Option<f64>,
}

fn clip_variance(v: f64) -> f64 {
    if v < 0.0 && v > -1e-12 {
        0.0
    } else {
        v
    }
}

/// Exact statistics of an arbitrary normalized state vector.
pub fn uncertainty_of(ops: &FockOperators, state: &CVector) -> Result<UncertaintyReport> {
    let (x, p) = ops.position_momentum();
    let mean_x = expectation(&x, state)?.re;
    let mean_p = expectation(&p, state)?.re;
    let var_x = clip_variance(expectation(&(&x * &x), state)?.re - mean_x * mean_x);
    let var_p = clip_variance(expectation(&(&p * &p), state)?.re - mean_p * mean_p);
    let product = (var_x * var_p).sqrt();
    let commutator_mean = expectation(&ops.commutator_xp(), state)?.norm() / ops.hbar;
    Ok(UncertaintyReport {
        mean_x,
        mean_p,
        var_x,
        var_p,
        product,
        commutator_mean,
        mq2: 2.0 * product / ops.hbar,
        path: EvaluationPath::ExactOracle,
        closed_form_factor: None,
    })
}

/// Exact uncertainty report for the deformed coherent state `|α⟩`.
pub fn uncertainty_exact(def: Deformation, alpha: Complex64, hbar: f64) -> Result<UncertaintyReport> {
    let ops = build_operators(def, hbar)?;
    let state = coherent_state(def, alpha)?;
    uncertainty_of(&ops, &state.vector())
}

/// As [`uncertainty_exact`] but on the lowest `levels` states; works on both branches.
pub fn uncertainty_exact_truncated(
    def: Deformation,
    alpha: Complex64,
    hbar: f64,
    levels: usize,
) -> Result<UncertaintyReport> {
    let ops = build_truncated(def, levels, hbar)?;
    let state = coherent_state_truncated(def, alpha, levels)?;
    uncertainty_of(&ops, &state.vector())
}
