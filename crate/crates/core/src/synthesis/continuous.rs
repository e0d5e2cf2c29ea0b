use super::discrete::{component_report, require_arc, weighted_indicators};
use super::{
    check_eps, condition, reversed_coeffs, with_retries, BudgetEntry, Horizon, Method, Reported, SynthesisOptions,
    SynthesisReport,
};
use crate::approx::{approximate_on_arc, ArcFunction};
use crate::ensemble::{
    check_n1, check_n2, check_s2, eigendecompose_continuous, simulate_continuous_pwc, sup_error, EigenDecomposition,
};
use crate::ensemble::simulate::exp_factor;
use crate::{ComplexPolynomial, EnsembleSystem, Error, PiecewiseConstantInput, Result, TargetFamily, C64};

const MAX_TAU_HALVINGS: usize = 20;
const MIN_TAU: f64 = 1e-8;

/// Continuous-time synthesis result.
#[derive(Debug, Clone)]
pub struct ContinuousSynthesis {
    pub input: PiecewiseConstantInput,
    pub poly: ComplexPolynomial,
    /// `max_{k,θ} |τ p(e^{τλ_k(θ)}) − φ̃_k(θ)|` at the accepted `τ`.
    pub exp_margin: f64,
    pub report: SynthesisReport,
}

impl Reported for ContinuousSynthesis {
    fn report_mut(&mut self) -> &mut SynthesisReport {
        &mut self.report
    }
}

/// Largest `|(e^{τλ}-1)/(τλ) - 1|` over all arcs.
fn exp_deviation(eig: &EigenDecomposition, tau: f64) -> f64 {
    eig.arcs()
        .iter()
        .flatten()
        .map(|l| (exp_factor(l * tau) - 1.0).norm())
        .fold(0.0, f64::max)
}

/// The images `Ω_k = exp(τ λ_k(P))` on the grid, or why they are unusable.
fn omega_sets(eig: &EigenDecomposition, tau: f64, disjointness: f64) -> std::result::Result<Vec<Vec<C64>>, String> {
    let sets: Vec<Vec<C64>> = eig.arcs().iter().map(|arc| arc.iter().map(|l| (l * tau).exp()).collect()).collect();
    let scale = sets.iter().flatten().map(|z| z.norm()).fold(1.0, f64::max);
    for (k, s) in sets.iter().enumerate() {
        for (i, x) in s.iter().enumerate() {
            if s[i + 1..].iter().any(|y| (x - y).norm() <= 1e-12 * scale) {
                return Err(format!("θ ↦ exp(τλ_{}(θ)) is not injective at τ = {tau}", k + 1));
            }
        }
        if require_arc(s, "method_s2_continuous", "Ω").is_err() {
            return Err(format!("Ω_{} is neither a real interval nor a unit-circle arc", k + 1));
        }
    }
    for (k, a) in sets.iter().enumerate() {
        for (l, b) in sets.iter().enumerate().skip(k + 1) {
            let d = a.iter().flat_map(|x| b.iter().map(move |y| (x - y).norm())).fold(f64::INFINITY, f64::min);
            if d <= disjointness {
                return Err(format!("Ω_{} and Ω_{} are {d:e} apart at τ = {tau}", k + 1, l + 1));
            }
        }
    }
    Ok(sets)
}

/// Method S2 for `x' = A(θ)x + b(θ)u` with piecewise-constant inputs.
///
/// With `z = e^{τλ}` the response in diagonal coordinates is
/// `τ·((e^{τλ}-1)/(τλ))·p(z)`, so a polynomial with `τ p ≈ g_k` on every
/// image arc `Ω_k` gives an input once the exponential factor is close to
/// one. The step `τ` starts at 1 and is halved until the factor and the
/// geometry of the `Ω_k` allow it, and again whenever the measured
/// exponential-factor error exceeds `ε/(2·max(1, ‖T‖))`.
pub fn method_s2_continuous(
    sys: &EnsembleSystem,
    f: &TargetFamily,
    eps: f64,
    opts: &SynthesisOptions,
) -> Result<ContinuousSynthesis> {
    check_eps(eps)?;
    sys.require_single_input("method_s2_continuous")?;
    f.check_against(sys)?;
    let tol = &opts.tolerances;
    let n1 = check_n1(sys, tol);
    if !n1.pass {
        return Err(condition("check_N1", format!("Kalman matrix is rank deficient at sample {}", n1.first_failure().unwrap_or(0))));
    }
    let n2 = check_n2(sys, tol);
    if !n2.pass {
        return Err(condition("check_N2", format!("spectra at samples {:?} are {:e} apart", n2.pair, n2.min_distance)));
    }
    let s2 = check_s2(sys, tol);
    if !s2.pass {
        return Err(condition("check_S2", format!("eigenvalue gap {:e} at sample {:?}", s2.min_gap, s2.worst_sample())));
    }
    let eig = eigendecompose_continuous(sys)?;
    let g = eig.transformed_target(f)?;
    let t_norm = eig.t_norm();
    let n = sys.state_dim();
    let exp_allot = eps / (2.0 * t_norm.max(1.0));
    let validation = opts
        .validation
        .as_ref()
        .map(|v| eigendecompose_continuous(&v.system).map(|e| (e, &v.target)))
        .transpose()?;

    let mut tau0 = 1.0;
    let mut last_reason = String::new();
    loop {
        if exp_deviation(&eig, tau0) < eps / 2.0 {
            match omega_sets(&eig, tau0, tol.disjointness) {
                Ok(_) => break,
                Err(why) => last_reason = why,
            }
        }
        tau0 /= 2.0;
        if tau0 < MIN_TAU {
            return Err(Error::Infeasible {
                stage: "method_s2_continuous".into(),
                detail: format!("no step length above {MIN_TAU:e} works ({last_reason})"),
            });
        }
    }

    let build = |tau: f64, scale: f64| -> Result<ContinuousSynthesis> {
        let sets = omega_sets(&eig, tau, tol.disjointness)
            .map_err(|detail| Error::Infeasible { stage: "method_s2_continuous".into(), detail })?;
        let allotted = scale * eps / (6.0 * tau * t_norm);
        let mut ps = Vec::with_capacity(n);
        let mut components = Vec::with_capacity(n);
        let mut budget = Vec::new();
        let mut warnings = Vec::new();
        for k in 0..n {
            let values = g.iter().map(|gi| gi[k] / tau).collect();
            let arc = ArcFunction::new(sets[k].clone(), values)?;
            let approx = approximate_on_arc(&arc, allotted, opts.mode, &opts.runge.caps)?;
            budget.push(BudgetEntry::new(format!("p_{}", k + 1), allotted, approx.measured));
            components.push(component_report(k + 1, allotted, &approx));
            warnings.extend(approx.warnings.iter().cloned());
            ps.push(approx.poly);
        }
        let (qs, q_eps) = weighted_indicators(&sets, &ps, allotted, opts.mode, opts)?;
        let mut poly = ComplexPolynomial::zero();
        for (k, (p, q)) in ps.iter().zip(&qs).enumerate() {
            budget.push(BudgetEntry::new(format!("q_{}", k + 1), q_eps[k], q.measured));
            poly = &poly + &(p * &q.poly);
        }
        let exp_margin = eig
            .arcs()
            .iter()
            .flatten()
            .map(|l| {
                let x = l * tau;
                (poly.eval(x.exp()) * tau).norm() * (exp_factor(x) - 1.0).norm()
            })
            .fold(0.0, f64::max);
        budget.push(BudgetEntry::new("exp_est_2", exp_allot, exp_margin));

        let input = PiecewiseConstantInput::new(tau, reversed_coeffs(&poly))?;
        let achieved = sup_error(&simulate_continuous_pwc(&eig, &input)?, f)?;
        let validated = validation
            .as_ref()
            .map(|(e, target)| sup_error(&simulate_continuous_pwc(e, &input)?, target))
            .transpose()?;
        budget.push(BudgetEntry::new("total", eps, validated.map_or(achieved, |v| v.max(achieved))));
        let report = SynthesisReport {
            method: Method::S2Continuous,
            mode: opts.mode,
            eps,
            components,
            budget,
            degree: poly.degree().unwrap_or(0),
            horizon: Horizon::Continuous { tau, steps: input.values().len() },
            achieved,
            validated,
            budget_scale: scale,
            transform_norm: t_norm,
            warnings,
            elapsed_ms: None,
        };
        Ok(ContinuousSynthesis { input, poly, exp_margin, report })
    };

    with_retries(eps, opts.max_retries, "method_s2_continuous", |scale| {
        let mut tau = tau0;
        let mut margin = f64::INFINITY;
        for _ in 0..=MAX_TAU_HALVINGS {
            if tau < MIN_TAU {
                break;
            }
            let out = build(tau, scale)?;
            if out.exp_margin <= exp_allot {
                return Ok(out);
            }
            margin = out.exp_margin;
            tau /= 2.0;
        }
        Err(Error::NotConverged { stage: "exp_est_2".into(), tolerance: exp_allot, achieved: margin })
    })
}
