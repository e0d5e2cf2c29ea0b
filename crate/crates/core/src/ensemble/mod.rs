//! Parameter-dependent linear systems sampled on a finite parameter grid.

mod conditions;
mod eigen;
pub(crate) mod linalg;
pub(crate) mod simulate;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

pub use conditions::{
    check_n1, check_n2, check_s1, check_s2, ConditionTolerances, N1Report, N2Report, S1Report,
    S2Report,
};
pub use eigen::{eigendecompose_continuous, EigenDecomposition};
pub use simulate::{simulate_continuous_pwc, simulate_discrete, sup_error, sup_error_profile};

/// Safety factor applied to sampled Lipschitz slopes.
pub const LIPSCHITZ_SAFETY: f64 = 1.2;

/// Shape of a sampled curve in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArcKind {
    /// Real, strictly monotone samples.
    RealInterval,
    /// Samples on the unit circle with strictly monotone (unwrapped) argument.
    CircleArc,
    GeneralArc,
}

const REAL_AXIS_TOL: f64 = 1e-12;
const UNIT_CIRCLE_TOL: f64 = 1e-9;

/// Classifies an ordered point list as a real interval, a unit-circle arc or
/// neither.
pub fn classify_arc(points: &[C64]) -> ArcKind {
    if points.len() < 2 {
        return if points.iter().all(|z| z.im.abs() <= REAL_AXIS_TOL) {
            ArcKind::RealInterval
        } else {
            ArcKind::GeneralArc
        };
    }
    let scale = points.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if points.iter().all(|z| z.im.abs() <= REAL_AXIS_TOL * scale) {
        let increasing = points.windows(2).all(|w| w[1].re > w[0].re);
        let decreasing = points.windows(2).all(|w| w[1].re < w[0].re);
        if increasing || decreasing {
            return ArcKind::RealInterval;
        }
        return ArcKind::GeneralArc;
    }
    if points.iter().all(|z| (z.norm() - 1.0).abs() <= UNIT_CIRCLE_TOL) {
        let angles = unwrap_angles(points);
        let increasing = angles.windows(2).all(|w| w[1] > w[0]);
        let decreasing = angles.windows(2).all(|w| w[1] < w[0]);
        let span = (angles[angles.len() - 1] - angles[0]).abs();
        if (increasing || decreasing) && span < 2.0 * std::f64::consts::PI {
            return ArcKind::CircleArc;
        }
    }
    ArcKind::GeneralArc
}

/// Arguments of `points`, unwrapped so consecutive differences lie in (-π, π].
pub fn unwrap_angles(points: &[C64]) -> Vec<f64> {
    use std::f64::consts::PI;
    let mut out = Vec::with_capacity(points.len());
    let mut prev: Option<f64> = None;
    for z in points {
        let mut a = z.arg();
        if let Some(p) = prev {
            while a - p > PI {
                a -= 2.0 * PI;
            }
            while a - p <= -PI {
                a += 2.0 * PI;
            }
        }
        out.push(a);
        prev = Some(a);
    }
    out
}

/// Ordered finite sampling of the parameter arc.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterGrid {
    samples: Vec<C64>,
    kind: ArcKind,
}

impl ParameterGrid {
    /// `count` equispaced real samples on `[a, b]`, endpoints included.
    pub fn interval(a: f64, b: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::invalid("an interval grid needs at least 2 samples"));
        }
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::invalid(format!("interval [{a}, {b}] is empty or not finite")));
        }
        let step = (b - a) / (count - 1) as f64;
        let samples = (0..count)
            .map(|i| {
                let x = if i + 1 == count { b } else { a + step * i as f64 };
                C64::new(x, 0.0)
            })
            .collect();
        Ok(Self { samples, kind: ArcKind::RealInterval })
    }

    /// Arbitrary ordered samples; the arc kind is inferred.
    pub fn from_samples(samples: Vec<C64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("parameter grid is empty"));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("parameter grid contains non-finite samples"));
        }
        ensure_distinct(&samples)?;
        let kind = classify_arc(&samples);
        Ok(Self { samples, kind })
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn kind(&self) -> ArcKind {
        self.kind
    }

    /// Grid with the midpoint of every consecutive pair inserted.
    pub fn interleaved(&self) -> Self {
        let mut samples = Vec::with_capacity(2 * self.samples.len());
        for w in self.samples.windows(2) {
            samples.push(w[0]);
            samples.push((w[0] + w[1]) * 0.5);
        }
        samples.extend(self.samples.last().copied());
        Self { samples, kind: self.kind }
    }
}

/// Errors unless all points are pairwise distinct (exact comparison).
pub(crate) fn ensure_distinct(points: &[C64]) -> Result<()> {
    let mut sorted: Vec<(f64, f64, usize)> =
        points.iter().enumerate().map(|(i, z)| (z.re, z.im, i)).collect();
    sorted.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    for w in sorted.windows(2) {
        if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
            return Err(Error::invalid(format!(
                "samples {} and {} coincide",
                w[0].2.min(w[1].2),
                w[0].2.max(w[1].2)
            )));
        }
    }
    Ok(())
}

/// Per-sample system matrices `A(θ_i)` (n×n) and `B(θ_i)` (n×m).
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSystem {
    grid: ParameterGrid,
    n: usize,
    m: usize,
    a: Vec<DMatrix<C64>>,
    b: Vec<DMatrix<C64>>,
}

impl EnsembleSystem {
    pub fn new(grid: ParameterGrid, a: Vec<DMatrix<C64>>, b: Vec<DMatrix<C64>>) -> Result<Self> {
        let count = grid.len();
        if a.len() != count || b.len() != count {
            return Err(Error::dim(format!(
                "{count} grid samples but {} A and {} B matrices",
                a.len(),
                b.len()
            )));
        }
        let n = a[0].nrows();
        let m = b[0].ncols();
        if n == 0 || m == 0 {
            return Err(Error::dim("state and input dimensions must be positive"));
        }
        for (i, (ai, bi)) in a.iter().zip(&b).enumerate() {
            if ai.shape() != (n, n) {
                return Err(Error::dim(format!("A at sample {i} is {:?}, expected ({n}, {n})", ai.shape())));
            }
            if bi.shape() != (n, m) {
                return Err(Error::dim(format!("B at sample {i} is {:?}, expected ({n}, {m})", bi.shape())));
            }
        }
        Ok(Self { grid, n, m, a, b })
    }

    /// Evaluates `(A(θ), B(θ))` at every grid sample.
    pub fn from_fn<F>(grid: ParameterGrid, mut f: F) -> Result<Self>
    where
        F: FnMut(C64) -> (DMatrix<C64>, DMatrix<C64>),
    {
        let (a, b) = grid.samples().iter().map(|&t| f(t)).unzip();
        Self::new(grid, a, b)
    }

    pub fn grid(&self) -> &ParameterGrid {
        &self.grid
    }

    pub fn state_dim(&self) -> usize {
        self.n
    }

    pub fn input_dim(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn a(&self, i: usize) -> &DMatrix<C64> {
        &self.a[i]
    }

    pub fn b(&self, i: usize) -> &DMatrix<C64> {
        &self.b[i]
    }

    /// First input column at sample `i`.
    pub fn b_col(&self, i: usize) -> DVector<C64> {
        self.b[i].column(0).into_owned()
    }

    pub(crate) fn require_single_input(&self, stage: &str) -> Result<()> {
        if self.m != 1 {
            return Err(Error::dim(format!("{stage} needs a single-input system, got m = {}", self.m)));
        }
        Ok(())
    }
}

fn check_vectors(values: &[DVector<C64>], what: &str) -> Result<()> {
    let Some(first) = values.first() else {
        return Err(Error::dim(format!("{what} is empty")));
    };
    if values.iter().any(|v| v.len() != first.len()) {
        return Err(Error::dim(format!("{what} vectors have inconsistent lengths")));
    }
    Ok(())
}

/// Desired terminal state at every grid sample.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetFamily {
    values: Vec<DVector<C64>>,
}

impl TargetFamily {
    pub fn new(values: Vec<DVector<C64>>) -> Result<Self> {
        check_vectors(&values, "target family")?;
        Ok(Self { values })
    }

    pub fn from_fn<F>(grid: &ParameterGrid, f: F) -> Result<Self>
    where
        F: FnMut(C64) -> DVector<C64>,
    {
        Self::new(grid.samples().iter().copied().map(f).collect())
    }

    pub fn values(&self) -> &[DVector<C64>] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values[0].len()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub(crate) fn check_against(&self, sys: &EnsembleSystem) -> Result<()> {
        if self.len() != sys.len() || self.dim() != sys.state_dim() {
            return Err(Error::dim(format!(
                "target has {} samples of dimension {}, system has {} samples of dimension {}",
                self.len(),
                self.dim(),
                sys.len(),
                sys.state_dim()
            )));
        }
        Ok(())
    }
}

/// Simulated state at every grid sample.
#[derive(Debug, Clone, PartialEq)]
pub struct StateFamily {
    values: Vec<DVector<C64>>,
}

impl StateFamily {
    pub fn new(values: Vec<DVector<C64>>) -> Result<Self> {
        check_vectors(&values, "state family")?;
        Ok(Self { values })
    }

    pub fn values(&self) -> &[DVector<C64>] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Discrete-time input `u_0, …, u_{T-1}`; `u_0` is applied first.
#[derive(Debug, Clone, PartialEq)]
pub struct InputSequence {
    values: Vec<DVector<C64>>,
}

impl InputSequence {
    pub fn new(values: Vec<DVector<C64>>) -> Result<Self> {
        check_vectors(&values, "input sequence")?;
        Ok(Self { values })
    }

    pub fn scalar(values: Vec<C64>) -> Result<Self> {
        Self::new(values.into_iter().map(|u| DVector::from_element(1, u)).collect())
    }

    pub fn values(&self) -> &[DVector<C64>] {
        &self.values
    }

    pub fn horizon(&self) -> usize {
        self.values.len()
    }

    pub fn input_dim(&self) -> usize {
        self.values[0].len()
    }

    /// Scalar values when the input is single-channel.
    pub fn scalar_values(&self) -> Option<Vec<C64>> {
        (self.input_dim() == 1).then(|| self.values.iter().map(|v| v[0]).collect())
    }
}

/// Continuous-time input that holds `values[l]` on `[lτ, (l+1)τ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstantInput {
    tau: f64,
    values: Vec<C64>,
}

impl PiecewiseConstantInput {
    pub fn new(tau: f64, values: Vec<C64>) -> Result<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::invalid(format!("step length must be positive, got {tau}")));
        }
        if values.is_empty() {
            return Err(Error::invalid("piecewise-constant input needs at least one value"));
        }
        Ok(Self { tau, values })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn horizon(&self) -> f64 {
        self.tau * self.values.len() as f64
    }
}

/// Sampled Lipschitz constant and maximum modulus of `xs ↦ ys`.
///
/// `L` is [`LIPSCHITZ_SAFETY`] times the largest slope between consecutive
/// samples, `M` is `max |y|`.
pub fn lipschitz_estimate(xs: &[C64], ys: &[C64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() {
        return Err(Error::dim("lipschitz_estimate: xs and ys differ in length"));
    }
    if xs.len() < 2 {
        return Err(Error::invalid("lipschitz_estimate needs at least two samples"));
    }
    ensure_distinct(xs)?;
    let slope = xs
        .windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| (y[1] - y[0]).norm() / (x[1] - x[0]).norm())
        .fold(0.0, f64::max);
    let max = ys.iter().map(|y| y.norm()).fold(0.0, f64::max);
    Ok((LIPSCHITZ_SAFETY * slope, max))
}
