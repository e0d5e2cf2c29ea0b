//! Constructive uniform approximation on compact subsets of the plane.

mod arc;
mod bernstein;
mod fejer;
mod fit;
mod indicator;
pub mod polynomial;
mod runge;

use serde::{Deserialize, Serialize};

pub use arc::{approximate_on_arc, ArcApproximation, ArcFunction};
pub use bernstein::{bernstein_apply, bernstein_degree, bernstein_nodes, bernstein_to_monomial, MonomialConversion};
pub use fejer::{circle_grid, extend_arc_to_circle, fejer_degree, fejer_poly, fourier_coeffs};
pub use fit::{adaptive_fit, AdaptiveFit, Check};
pub use indicator::{indicator_polys, min_set_distance, IndicatorPoly};
pub use runge::{
    cauchy_lipschitz, grid_segments, pole_shift, pole_shift_per_term, polynomialize, rational_approx, runge_approx,
    runge_certified, taylor_inverse_power, RationalSum, RungeBudget, RungeOptions, RungeOutcome,
    SegmentSet, ShiftedSum, ShiftedTerm,
};

/// Which construction produced a polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// A-priori degree formulas (Bernstein, Fejér, four-step Runge).
    Certified,
    /// Least-squares fits of escalating degree accepted by measurement.
    #[default]
    Adaptive,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "certified" => Ok(Mode::Certified),
            "adaptive" => Ok(Mode::Adaptive),
            other => Err(format!("unknown mode `{other}` (expected certified or adaptive)")),
        }
    }
}

/// Degree and size limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Caps {
    /// Largest Bernstein or Fejér degree a scan may return.
    pub degree_cap: usize,
    /// Largest degree converted to the monomial basis.
    pub monomial_cap: usize,
    /// Largest per-term degree in the Runge pole shift and Taylor steps.
    pub runge_degree_cap: usize,
    /// Largest number of poles in a Runge rational sum.
    pub pole_cap: usize,
    /// Largest degree tried by adaptive fitting.
    pub adaptive_cap: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            degree_cap: 1_000_000,
            monomial_cap: 200,
            runge_degree_cap: 5000,
            pole_cap: 1_000_000,
            adaptive_cap: 60,
        }
    }
}

/// Degree above which the monomial basis is flagged as ill-conditioned.
pub const MONOMIAL_WARN_DEGREE: usize = 60;
