use nalgebra::DVector;

use super::{
    check_eps, condition, input_from_poly, with_retries, Reported, BudgetEntry, ComponentReport, Horizon, Method,
    SynthesisOptions, SynthesisReport,
};
use crate::approx::{approximate_on_arc, indicator_polys, ArcApproximation, ArcFunction, IndicatorPoly, Mode};
use crate::ensemble::linalg::{kalman_matrix, op_norm};
use crate::ensemble::{
    check_n1, check_n2, check_s1, check_s2, classify_arc, eigendecompose_continuous, simulate_discrete, sup_error,
    ArcKind,
};
use crate::{ComplexPolynomial, EnsembleSystem, Error, InputSequence, Result, TargetFamily, C64};

/// Discrete-time synthesis result.
#[derive(Debug, Clone)]
pub struct DiscreteSynthesis {
    pub input: InputSequence,
    pub poly: ComplexPolynomial,
    pub report: SynthesisReport,
}

impl Reported for DiscreteSynthesis {
    fn report_mut(&mut self) -> &mut SynthesisReport {
        &mut self.report
    }
}

/// `Σ_k p_k(z^n − a_{n−1}z^{n−1} − … − a_1 z)·z^{k−1}` for `n = ps.len()`.
pub fn assemble_s1_poly(ps: &[ComplexPolynomial], a: &[C64]) -> Result<ComplexPolynomial> {
    let n = ps.len();
    if n == 0 || a.len() + 1 != n {
        return Err(Error::dim(format!("assembly needs n polynomials and n-1 constants, got {} and {}", n, a.len())));
    }
    let mut inner = vec![C64::new(0.0, 0.0); n + 1];
    inner[n] = C64::new(1.0, 0.0);
    for (j, aj) in a.iter().enumerate() {
        inner[j + 1] = -aj;
    }
    let inner = ComplexPolynomial::new(inner);
    let mut p = ComplexPolynomial::zero();
    for (k, pk) in ps.iter().enumerate() {
        p = &p + &(&pk.compose(&inner) * &ComplexPolynomial::monomial(k));
    }
    Ok(p)
}

pub(crate) fn require_arc(points: &[C64], stage: &str, what: &str) -> Result<()> {
    match classify_arc(points) {
        ArcKind::RealInterval | ArcKind::CircleArc => Ok(()),
        ArcKind::GeneralArc => Err(Error::ArcClassification {
            stage: stage.into(),
            detail: format!("{what} is neither a real interval nor a unit-circle arc"),
        }),
    }
}

pub(crate) fn component_report(index: usize, allotted: f64, a: &ArcApproximation) -> ComponentReport {
    ComponentReport {
        index,
        construction: a.construction.to_string(),
        degree: a.degree,
        allotted,
        measured: a.measured,
    }
}

fn validate(opts: &SynthesisOptions, input: &InputSequence) -> Result<Option<f64>> {
    opts.validation
        .as_ref()
        .map(|v| sup_error(&simulate_discrete(&v.system, input)?, &v.target))
        .transpose()
}

/// Method S1: companion-type systems whose characteristic polynomial varies
/// only in the constant term `a_0(θ)`.
///
/// Each coordinate `g_k` of `f` in the Kalman basis `[b, Ab, …, A^{n−1}b]`
/// is approximated on the arc `a_0(P)` and the pieces are assembled by
/// [`assemble_s1_poly`].
pub fn method_s1(sys: &EnsembleSystem, f: &TargetFamily, eps: f64, opts: &SynthesisOptions) -> Result<DiscreteSynthesis> {
    check_eps(eps)?;
    sys.require_single_input("method_s1")?;
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
    let s1 = check_s1(sys, tol);
    if !s1.pass {
        return Err(condition("check_S1", format!("characteristic coefficients vary by {:e}", s1.max_deviation)));
    }
    require_arc(&s1.a0, "method_s1", "a_0(P)")?;

    let n = sys.state_dim();
    let mut r_norm: f64 = 0.0;
    let mut coords = Vec::with_capacity(sys.len());
    for (i, fi) in f.values().iter().enumerate() {
        let r = kalman_matrix(sys.a(i), sys.b(i));
        r_norm = r_norm.max(op_norm(&r));
        let g: DVector<C64> = r
            .lu()
            .solve(fi)
            .ok_or_else(|| condition("check_N1", format!("Kalman matrix is singular at sample {i}")))?;
        coords.push(g);
    }

    with_retries(eps, opts.max_retries, "method_s1", |scale| {
        let allotted = scale * eps / r_norm;
        let mut ps = Vec::with_capacity(n);
        let mut components = Vec::with_capacity(n);
        let mut budget = Vec::with_capacity(n + 1);
        let mut warnings = Vec::new();
        for k in 0..n {
            let values = coords.iter().map(|g| g[k]).collect();
            let arc = ArcFunction::new(s1.a0.clone(), values)?;
            let approx = approximate_on_arc(&arc, allotted, opts.mode, &opts.runge.caps)?;
            budget.push(BudgetEntry::new(format!("p_{}", k + 1), allotted, approx.measured));
            components.push(component_report(k + 1, allotted, &approx));
            warnings.extend(approx.warnings.iter().cloned());
            ps.push(approx.poly);
        }
        let poly = assemble_s1_poly(&ps, &s1.constants)?;
        let input = input_from_poly(&poly);
        let achieved = sup_error(&simulate_discrete(sys, &input)?, f)?;
        let validated = validate(opts, &input)?;
        budget.push(BudgetEntry::new("total", eps, validated.map_or(achieved, |v| v.max(achieved))));
        let report = SynthesisReport {
            method: Method::S1,
            mode: opts.mode,
            eps,
            components,
            budget,
            degree: poly.degree().unwrap_or(0),
            horizon: Horizon::Discrete { steps: input.horizon() },
            achieved,
            validated,
            budget_scale: scale,
            transform_norm: r_norm,
            warnings,
            elapsed_ms: None,
        };
        Ok(DiscreteSynthesis { input, poly, report })
    })
}

/// Indicator polynomials `q_k` for the sets, with tolerances derived from
/// `α_{k,l} = max |p_k|` on set `l`. Components with `p_k ≡ 0` get `q_k = 0`.
pub(crate) fn weighted_indicators(
    sets: &[Vec<C64>],
    ps: &[ComplexPolynomial],
    base: f64,
    mode: Mode,
    opts: &SynthesisOptions,
) -> Result<(Vec<IndicatorPoly>, Vec<f64>)> {
    let alpha_sums: Vec<f64> = ps.iter().map(|p| sets.iter().map(|s| p.max_abs_on(s)).sum()).collect();
    let eps: Vec<f64> = alpha_sums.iter().map(|&s| if s > 0.0 { base / s } else { 1.0 }).collect();
    let mut qs = indicator_polys(sets, &eps, mode, &opts.runge)?;
    for (q, &s) in qs.iter_mut().zip(&alpha_sums) {
        if s == 0.0 {
            *q = IndicatorPoly { poly: ComplexPolynomial::zero(), degree: 0, measured: 0.0, budget: None };
        }
    }
    Ok((qs, eps))
}

/// Method S2: systems with simple eigenvalues.
///
/// In the coordinates where `A` is diagonal and `b` is the all-ones vector,
/// component `k` of `f` is approximated on the eigenvalue arc `λ_k(P)` and
/// multiplied by a polynomial close to the indicator of that arc.
pub fn method_s2(sys: &EnsembleSystem, f: &TargetFamily, eps: f64, opts: &SynthesisOptions) -> Result<DiscreteSynthesis> {
    check_eps(eps)?;
    sys.require_single_input("method_s2")?;
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
    let arcs = eig.arcs().to_vec();
    for (k, arc) in arcs.iter().enumerate() {
        require_arc(arc, "method_s2", &format!("eigenvalue arc {}", k + 1))?;
    }
    let g = eig.transformed_target(f)?;
    let t_norm = eig.t_norm();
    let n = sys.state_dim();

    with_retries(eps, opts.max_retries, "method_s2", |scale| {
        let allotted = scale * eps / (3.0 * t_norm);
        let mut ps = Vec::with_capacity(n);
        let mut components = Vec::with_capacity(n);
        let mut budget = Vec::new();
        let mut warnings = Vec::new();
        for k in 0..n {
            let values = g.iter().map(|gi| gi[k]).collect();
            let arc = ArcFunction::new(arcs[k].clone(), values)?;
            let approx = approximate_on_arc(&arc, allotted, opts.mode, &opts.runge.caps)?;
            budget.push(BudgetEntry::new(format!("p_{}", k + 1), allotted, approx.measured));
            components.push(component_report(k + 1, allotted, &approx));
            warnings.extend(approx.warnings.iter().cloned());
            ps.push(approx.poly);
        }
        let (qs, q_eps) = weighted_indicators(&arcs, &ps, allotted, opts.mode, opts)?;
        let mut poly = ComplexPolynomial::zero();
        for (k, (p, q)) in ps.iter().zip(&qs).enumerate() {
            budget.push(BudgetEntry::new(format!("q_{}", k + 1), q_eps[k], q.measured));
            poly = &poly + &(p * &q.poly);
        }
        let input = input_from_poly(&poly);
        let achieved = sup_error(&simulate_discrete(sys, &input)?, f)?;
        let validated = validate(opts, &input)?;
        budget.push(BudgetEntry::new("total", eps, validated.map_or(achieved, |v| v.max(achieved))));
        let report = SynthesisReport {
            method: Method::S2,
            mode: opts.mode,
            eps,
            components,
            budget,
            degree: poly.degree().unwrap_or(0),
            horizon: Horizon::Discrete { steps: input.horizon() },
            achieved,
            validated,
            budget_scale: scale,
            transform_norm: t_norm,
            warnings,
            elapsed_ms: None,
        };
        Ok(DiscreteSynthesis { input, poly, report })
    })
}

#[cfg(test)]
mod tests {
    use nalgebra::{DMatrix, DVector};

    use super::*;
    use crate::c64;
    use crate::ParameterGrid;

    fn scalar_system(count: usize) -> EnsembleSystem {
        let grid = ParameterGrid::interval(0.0, 1.0, count).unwrap();
        EnsembleSystem::from_fn(grid, |t| (DMatrix::from_element(1, 1, t), DMatrix::from_element(1, 1, c64(1.0, 0.0))))
            .unwrap()
    }

    fn companion(count: usize) -> EnsembleSystem {
        let grid = ParameterGrid::interval(0.0, 1.0, count).unwrap();
        EnsembleSystem::from_fn(grid, |t| {
            let one = c64(1.0, 0.0);
            let zero = c64(0.0, 0.0);
            (
                DMatrix::from_row_slice(2, 2, &[zero, one, t, zero]),
                DMatrix::from_column_slice(2, 1, &[zero, one]),
            )
        })
        .unwrap()
    }

    fn diagonal(count: usize) -> EnsembleSystem {
        let grid = ParameterGrid::interval(0.0, 1.0, count).unwrap();
        EnsembleSystem::from_fn(grid, |t| {
            (
                DMatrix::from_diagonal(&DVector::from_vec(vec![t, t + 3.0])),
                DMatrix::from_element(2, 1, c64(1.0, 0.0)),
            )
        })
        .unwrap()
    }

    fn poly(c: &[f64]) -> ComplexPolynomial {
        ComplexPolynomial::new(c.iter().map(|&x| c64(x, 0.0)).collect())
    }

    #[test]
    fn assembly_examples() {
        let p1 = poly(&[0.0, 2.0, 1.0]);
        assert_eq!(assemble_s1_poly(std::slice::from_ref(&p1), &[]).unwrap(), p1);
        assert_eq!(assemble_s1_poly(&[poly(&[1.0]), poly(&[1.0])], &[c64(0.0, 0.0)]).unwrap(), poly(&[1.0, 1.0]));
        assert_eq!(
            assemble_s1_poly(&[poly(&[0.0, 1.0]), ComplexPolynomial::zero()], &[c64(0.0, 0.0)]).unwrap(),
            poly(&[0.0, 0.0, 1.0])
        );
        assert!(assemble_s1_poly(&[p1], &[c64(1.0, 0.0)]).is_err());
    }

    #[test]
    fn s1_scalar_identity() {
        let sys = scalar_system(21);
        let f = TargetFamily::from_fn(sys.grid(), |t| DVector::from_element(1, t)).unwrap();
        let out = method_s1(&sys, &f, 0.1, &SynthesisOptions::default()).unwrap();
        assert_eq!(out.poly.degree(), Some(1));
        assert_eq!(out.input.horizon(), 2);
        assert!(out.report.achieved < 1e-12);
        let u = out.input.scalar_values().unwrap();
        assert!((u[0] - 1.0).norm() < 1e-12 && u[1].norm() < 1e-12);
    }

    #[test]
    fn s1_constant_target() {
        let sys = scalar_system(11);
        let c = c64(0.7, -0.2);
        let f = TargetFamily::from_fn(sys.grid(), |_| DVector::from_element(1, c)).unwrap();
        let out = method_s1(&sys, &f, 0.1, &SynthesisOptions::default()).unwrap();
        assert_eq!(out.input.scalar_values().unwrap(), vec![c]);
        assert_eq!(out.report.horizon, Horizon::Discrete { steps: 1 });
    }

    #[test]
    fn s1_companion_end_to_end() {
        let sys = companion(101);
        let f = TargetFamily::from_fn(sys.grid(), |t| DVector::from_vec(vec![t, c64(1.0, 0.0)])).unwrap();
        let out = method_s1(&sys, &f, 0.1, &SynthesisOptions::default()).unwrap();
        assert!(out.report.achieved < 0.1);
        // Kalman coordinates are (1, θ), so p = 1 + z³
        assert_eq!(out.poly.degree(), Some(3));
        assert!(out.report.budget.iter().all(BudgetEntry::within));
    }

    #[test]
    fn s1_rejects_non_companion() {
        let sys = diagonal(11);
        let f = TargetFamily::from_fn(sys.grid(), |_| DVector::from_element(2, c64(1.0, 0.0))).unwrap();
        match method_s1(&sys, &f, 0.1, &SynthesisOptions::default()) {
            Err(Error::Condition { check, .. }) => assert_eq!(check, "check_S1"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn s2_diagonal_end_to_end() {
        let sys = diagonal(101);
        for f in [
            TargetFamily::from_fn(sys.grid(), |_| DVector::from_element(2, c64(1.0, 0.0))).unwrap(),
            TargetFamily::from_fn(sys.grid(), |t| DVector::from_vec(vec![c64(1.0, 0.0), t])).unwrap(),
        ] {
            let out = method_s2(&sys, &f, 0.2, &SynthesisOptions::default()).unwrap();
            assert!(out.report.achieved < 0.2, "{:?}", out.report);
            assert!(out.report.budget.iter().all(BudgetEntry::within), "{:?}", out.report.budget);
        }
    }

    #[test]
    fn zero_target_gives_zero_input() {
        let sys = diagonal(21);
        let f = TargetFamily::from_fn(sys.grid(), |_| DVector::zeros(2)).unwrap();
        let out = method_s2(&sys, &f, 0.2, &SynthesisOptions::default()).unwrap();
        assert_eq!(out.input.scalar_values().unwrap(), vec![c64(0.0, 0.0)]);
        assert_eq!(out.report.achieved, 0.0);
    }

    #[test]
    fn s1_and_s2_agree_for_scalar_systems() {
        let sys = scalar_system(31);
        let f = TargetFamily::from_fn(sys.grid(), |t| DVector::from_element(1, t * t - t * 0.5 + 0.25)).unwrap();
        let a = method_s1(&sys, &f, 0.05, &SynthesisOptions::default()).unwrap();
        let b = method_s2(&sys, &f, 0.05, &SynthesisOptions::default()).unwrap();
        let xa = simulate_discrete(&sys, &a.input).unwrap();
        let xb = simulate_discrete(&sys, &b.input).unwrap();
        for (x, y) in xa.values().iter().zip(xb.values()) {
            assert!((x - y).norm() < 1e-8);
        }
    }

    #[test]
    fn eps_must_be_positive() {
        let sys = scalar_system(5);
        let f = TargetFamily::from_fn(sys.grid(), |t| DVector::from_element(1, t)).unwrap();
        assert!(matches!(method_s1(&sys, &f, 0.0, &SynthesisOptions::default()), Err(Error::InvalidInput(_))));
    }
}
