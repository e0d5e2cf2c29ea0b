//! Input construction.
//!
//! [`method_s1`] and [`method_s2`] build a polynomial `p` with
//! `p(A(θ))b(θ) ≈ f(θ)` and read the discrete input off its coefficients;
//! [`method_s2_continuous`] does the same for piecewise-constant inputs of a
//! continuous-time system. Every report carries the error of an actual
//! simulation of the returned input.

mod continuous;
mod discrete;
mod hermite;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::approx::{Mode, RungeOptions};
use crate::ensemble::ConditionTolerances;
use crate::{ComplexPolynomial, EnsembleSystem, Error, InputSequence, Result, TargetFamily, C64};

pub use continuous::{method_s2_continuous, ContinuousSynthesis};
pub use discrete::{assemble_s1_poly, method_s1, method_s2, DiscreteSynthesis};
pub use hermite::{hermite_decompose, hermite_indices, HermiteDecomposition, HermiteStructure};

/// Which construction produced an input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    S1,
    S2,
    #[serde(rename = "s2ct")]
    S2Continuous,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::S1 => "s1",
            Method::S2 => "s2",
            Method::S2Continuous => "s2ct",
        })
    }
}

/// Systems and targets sampled on a second grid, used only for measuring.
#[derive(Debug, Clone)]
pub struct Validation {
    pub system: EnsembleSystem,
    pub target: TargetFamily,
}

#[derive(Debug, Clone)]
pub struct SynthesisOptions {
    pub mode: Mode,
    pub runge: RungeOptions,
    pub tolerances: ConditionTolerances,
    /// How many times all stage budgets may be halved when the simulated
    /// error misses `eps`.
    pub max_retries: usize,
    pub validation: Option<Validation>,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        Self {
            mode: Mode::default(),
            runge: RungeOptions::default(),
            tolerances: ConditionTolerances::default(),
            max_retries: 6,
            validation: None,
        }
    }
}

impl SynthesisOptions {
    pub fn with_mode(mode: Mode) -> Self {
        Self { mode, ..Self::default() }
    }
}

/// One line of the tolerance ledger.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetEntry {
    pub name: String,
    pub allotted: f64,
    pub measured: f64,
}

impl BudgetEntry {
    fn new(name: impl Into<String>, allotted: f64, measured: f64) -> Self {
        Self { name: name.into(), allotted, measured }
    }

    pub fn within(&self) -> bool {
        self.measured <= self.allotted
    }
}

/// Per-component approximation step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub index: usize,
    pub construction: String,
    pub degree: usize,
    pub allotted: f64,
    pub measured: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Horizon {
    Discrete { steps: usize },
    Continuous { tau: f64, steps: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisReport {
    pub method: Method,
    pub mode: Mode,
    pub eps: f64,
    pub components: Vec<ComponentReport>,
    pub budget: Vec<BudgetEntry>,
    /// Degree of the assembled polynomial.
    pub degree: usize,
    pub horizon: Horizon,
    /// Simulated sup error on the synthesis grid.
    pub achieved: f64,
    /// Simulated sup error on the validation grid, when one was given.
    pub validated: Option<f64>,
    /// Factor applied to every stage budget in the accepted attempt.
    pub budget_scale: f64,
    /// `max ‖T(θ)‖₂` (S2 variants) or `max ‖R(θ)‖₂` of the Kalman matrix (S1).
    pub transform_norm: f64,
    pub warnings: Vec<String>,
    /// Wall-clock time, filled in by front ends.
    pub elapsed_ms: Option<f64>,
}

impl SynthesisReport {
    /// Largest of the synthesis-grid and validation-grid errors.
    pub fn worst_error(&self) -> f64 {
        self.validated.map_or(self.achieved, |v| v.max(self.achieved))
    }
}

/// Discrete input read off `p`: `u_t` is the coefficient of `z^{T-1-t}`,
/// so that the flow after `T` steps equals `p(A)b`.
pub fn input_from_poly(p: &ComplexPolynomial) -> InputSequence {
    InputSequence::scalar(reversed_coeffs(p)).expect("at least one value")
}

/// Inverse of [`input_from_poly`].
pub fn poly_from_input(u: &[C64]) -> ComplexPolynomial {
    ComplexPolynomial::new(u.iter().rev().copied().collect())
}

pub(crate) fn reversed_coeffs(p: &ComplexPolynomial) -> Vec<C64> {
    if p.is_zero() {
        return vec![C64::new(0.0, 0.0)];
    }
    p.coeffs().iter().rev().copied().collect()
}

pub(crate) fn condition(check: &'static str, detail: impl Into<String>) -> Error {
    Error::Condition { check, detail: detail.into() }
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::invalid(format!(
            "eps must be positive (got {eps}); exact ensemble reachability is never possible"
        )));
    }
    Ok(())
}

pub(crate) trait Reported {
    fn report_mut(&mut self) -> &mut SynthesisReport;
}

/// Runs `attempt` with budget scales 1, 1/2, 1/4, … until its worst
/// simulated error is within `eps`.
pub(crate) fn with_retries<T: Reported>(
    eps: f64,
    max_retries: usize,
    stage: &str,
    mut attempt: impl FnMut(f64) -> Result<T>,
) -> Result<T> {
    let mut scale = 1.0;
    let mut best = f64::INFINITY;
    for retry in 0..=max_retries {
        let mut out = attempt(scale)?;
        let report = out.report_mut();
        let worst = report.worst_error();
        if worst <= eps {
            if retry > 0 {
                report.warnings.push(format!("budgets scaled by {scale} after {retry} retries"));
            }
            return Ok(out);
        }
        best = best.min(worst);
        scale /= 2.0;
    }
    Err(Error::NotConverged { stage: stage.into(), tolerance: eps, achieved: best })
}
