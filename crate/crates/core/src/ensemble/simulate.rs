use nalgebra::DVector;

use super::{EigenDecomposition, EnsembleSystem, InputSequence, PiecewiseConstantInput, StateFamily, TargetFamily};
use crate::{Error, Result, C64};

/// Terminal state `x_T` of `x_{t+1} = A x_t + B u_t`, `x_0 = 0`, at every
/// grid sample.
pub fn simulate_discrete(sys: &EnsembleSystem, u: &InputSequence) -> Result<StateFamily> {
    if u.input_dim() != sys.input_dim() {
        return Err(Error::dim(format!(
            "input has {} channels, system expects {}",
            u.input_dim(),
            sys.input_dim()
        )));
    }
    let n = sys.state_dim();
    let states = (0..sys.len())
        .map(|i| {
            let a = sys.a(i);
            let b = sys.b(i);
            u.values()
                .iter()
                .fold(DVector::zeros(n), |x, ut| a * x + b * ut)
        })
        .collect();
    StateFamily::new(states)
}

/// `(e^x - 1) / x`, continuous at zero.
pub(crate) fn exp_factor(x: C64) -> C64 {
    if x.norm() < 1e-6 {
        // degree-6 Taylor series of the removable singularity
        let mut term = C64::new(1.0, 0.0);
        let mut sum = term;
        for k in 2..=7 {
            term = term * x / k as f64;
            sum += term;
        }
        sum
    } else {
        (x.exp() - 1.0) / x
    }
}

/// Evaluates `Σ_l u_{N-1-l} z^l`: the value applied first multiplies the
/// highest power.
pub(crate) fn reversed_horner(values: &[C64], z: C64) -> C64 {
    values.iter().fold(C64::new(0.0, 0.0), |acc, &u| acc * z + u)
}

/// Closed-form response to a piecewise-constant input in the diagonalizing
/// coordinates of `eig`, mapped back through `T(θ)`.
///
/// Component `k` equals `τ·((e^{τλ}-1)/(τλ))·p(e^{τλ})` with
/// `p(z) = Σ_l u_{N-1-l} z^l`; no time stepping is involved.
pub fn simulate_continuous_pwc(eig: &EigenDecomposition, input: &PiecewiseConstantInput) -> Result<StateFamily> {
    let tau = input.tau();
    let n = eig.state_dim();
    let states = (0..eig.len())
        .map(|i| {
            let diag = DVector::from_iterator(
                n,
                (0..n).map(|k| {
                    let x = eig.lambda(k)[i] * tau;
                    exp_factor(x) * reversed_horner(input.values(), x.exp()) * tau
                }),
            );
            eig.t(i) * diag
        })
        .collect();
    StateFamily::new(states)
}

/// Euclidean error `‖x(θ_i) − f(θ_i)‖` at every sample.
pub fn sup_error_profile(x: &StateFamily, f: &TargetFamily) -> Result<Vec<f64>> {
    if x.len() != f.len() {
        return Err(Error::dim(format!("{} states vs {} targets", x.len(), f.len())));
    }
    x.values()
        .iter()
        .zip(f.values())
        .map(|(xi, fi)| {
            if xi.len() != fi.len() {
                return Err(Error::dim("state and target dimensions differ"));
            }
            Ok((xi - fi).norm())
        })
        .collect()
}

/// On-grid sup-norm distance between a state family and a target.
pub fn sup_error(x: &StateFamily, f: &TargetFamily) -> Result<f64> {
    Ok(sup_error_profile(x, f)?.into_iter().fold(0.0, f64::max))
}
