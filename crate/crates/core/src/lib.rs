//! q-deformed oscillator algebra at roots of unity, deformed coherent states,
//! and the beam quality factor they imply.
//!
//! Modules, from the bottom up:
//!
//! - [`qalgebra`]: q-numbers, q-factorials and the q-derivative on power series.
//! - [`fockspace`]: exact `(p+1)`-level matrices for `a`, `a†`, `N`, coherent
//!   states and their position/momentum statistics.
//! - [`beamquality`]: closed-form `M_q²`, admissibility bounds and the
//!   self-focusing medium relations.
//! - [`wavefunction`]: series solutions for the deformed vacuum, excited and
//!   coherent wavefunctions.
//! - [`moments`]: classical second-moment analysis of sampled beam profiles.
//! - [`report`]: CSV/JSON rendering shared by the command-line tool.

pub mod beamquality;
pub mod error;
pub mod fockspace;
pub mod moments;
pub mod qalgebra;
pub mod report;
pub mod wavefunction;

pub use beamquality::{
    beta_j_inferred, golden_table, m_eff_squared, max_alpha_for_order, min_order_for_alpha, mq2_closed, theta_q,
    BeamGeometry, BetaJReport, CouplingSource, MediumCoupling, TableRow,
};
pub use error::{Error, Result};
pub use fockspace::{
    build_operators, coherent_state, eigen_defect, expectation, uncertainty_exact, CoherentState, EvaluationPath,
    FockOperators, UncertaintyReport,
};
pub use moments::{centroid_and_width, divergence, m2_from_profiles, Domain, SampledProfile};
pub use num_complex::Complex64;
pub use qalgebra::{q_bracket, q_derive, q_double_factorial, q_factorial, Deformation, Parity, QPowerSeries};
pub use wavefunction::{coherent_series, excited_series, ground_series, StateSeries};
