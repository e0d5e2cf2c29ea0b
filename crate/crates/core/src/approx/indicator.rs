use super::arc::ArcFunction;
use super::fit::adaptive_fit;
use super::polynomial::ComplexPolynomial;
use super::runge::{runge_approx, RungeBudget, RungeOptions};
use super::Mode;
use crate::{Error, Result, C64};

const MIN_SET_DISTANCE: f64 = 1e-9;

/// Polynomial close to 1 on one set and to 0 on the others.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorPoly {
    pub poly: ComplexPolynomial,
    pub degree: usize,
    /// `max |q_k - h_k|` over all samples (and, in adaptive mode, midpoints).
    pub measured: f64,
    pub budget: Option<RungeBudget>,
}

/// Smallest distance between samples of different sets.
pub fn min_set_distance(sets: &[Vec<C64>]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in sets.iter().enumerate() {
        for b in &sets[i + 1..] {
            for x in a {
                for y in b {
                    best = best.min((x - y).norm());
                }
            }
        }
    }
    best
}

/// Polynomials `q_k` with `|q_k - h_k| ≤ eps[k]` on the union of the sets,
/// where `h_k` is 1 on set `k` and 0 elsewhere.
///
/// The holomorphy region is the union of disjoint tubes of radius `d/4`
/// around the sets, `d` the smallest distance between them. Each set is
/// an ordered sampling of an arc.
pub fn indicator_polys(sets: &[Vec<C64>], eps: &[f64], mode: Mode, opts: &RungeOptions) -> Result<Vec<IndicatorPoly>> {
    if sets.is_empty() || sets.len() != eps.len() || sets.iter().any(Vec::is_empty) {
        return Err(Error::dim("indicator_polys needs one non-empty set per tolerance"));
    }
    if eps.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::invalid("indicator tolerances must be positive"));
    }
    if sets.len() == 1 {
        let poly = ComplexPolynomial::constant(C64::new(1.0, 0.0));
        return Ok(vec![IndicatorPoly { poly, degree: 0, measured: 0.0, budget: None }]);
    }
    let d_min = min_set_distance(sets);
    let scale = sets.iter().flatten().map(|z| z.norm()).fold(1.0, f64::max);
    if !(d_min > MIN_SET_DISTANCE * scale) {
        return Err(Error::Infeasible {
            stage: "indicator_polys".into(),
            detail: format!("sets are {d_min:e} apart; the indicator tubes collapse"),
        });
    }
    let union: Vec<C64> = sets.iter().flatten().copied().collect();
    let owner: Vec<usize> = sets.iter().enumerate().flat_map(|(k, s)| std::iter::repeat_n(k, s.len())).collect();

    (0..sets.len())
        .map(|k| {
            let h = |j: usize| C64::new(if j == k { 1.0 } else { 0.0 }, 0.0);
            match mode {
                Mode::Adaptive => {
                    let values: Vec<C64> = owner.iter().map(|&j| h(j)).collect();
                    let mut checks = Vec::new();
                    for (j, set) in sets.iter().enumerate() {
                        let arc = ArcFunction::new(set.clone(), vec![h(j); set.len()])?;
                        checks.extend(arc.checks());
                    }
                    let fit = adaptive_fit(&union, &values, &checks, eps[k], opts.caps.adaptive_cap)?;
                    Ok(IndicatorPoly { poly: fit.poly, degree: fit.degree, measured: fit.measured, budget: None })
                }
                Mode::Certified => {
                    let nearest = |z: C64| {
                        let mut best = (f64::INFINITY, 0);
                        for (j, x) in union.iter().enumerate() {
                            let d = (z - x).norm();
                            if d < best.0 {
                                best = (d, owner[j]);
                            }
                        }
                        best.1
                    };
                    let f = move |z: C64| h(nearest(z));
                    let out = runge_approx(&f, d_min / 4.0, &union, eps[k], Mode::Certified, opts)?;
                    Ok(IndicatorPoly { poly: out.poly, degree: out.degree, measured: out.measured, budget: out.budget })
                }
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn single_set_is_one() {
        let q = indicator_polys(&[vec![c64(0.0, 0.0), c64(1.0, 0.0)]], &[0.1], Mode::Adaptive, &RungeOptions::default()).unwrap();
        assert_eq!(q[0].poly.coeffs(), &[c64(1.0, 0.0)]);
        assert_eq!(q[0].measured, 0.0);
    }

    #[test]
    fn two_singletons() {
        let sets = vec![vec![c64(0.0, 0.0)], vec![c64(10.0, 0.0)]];
        let q = indicator_polys(&sets, &[0.1, 0.1], Mode::Adaptive, &RungeOptions::default()).unwrap();
        let (a, b) = (sets[0][0], sets[1][0]);
        assert!((q[0].poly.eval(a) - 1.0).norm() <= 0.1);
        assert!(q[0].poly.eval(b).norm() <= 0.1);
        assert!((q[1].poly.eval(b) - 1.0).norm() <= 0.1);
        assert!(q[1].poly.eval(a).norm() <= 0.1);
    }

    #[test]
    fn certified_indicator_hits_degree_cap() {
        // poles between the sets sit almost as close to K as any shift center
        let sets = vec![vec![c64(-1.0, 0.0)], vec![c64(1.0, 0.0)]];
        match indicator_polys(&sets, &[0.1, 0.1], Mode::Certified, &RungeOptions::default()) {
            Err(Error::CapExceeded { required, cap, .. }) => assert!(required > cap),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn partition_of_unity() {
        let a: Vec<C64> = (0..40).map(|i| c64(i as f64 / 39.0, 0.0)).collect();
        let b: Vec<C64> = (0..40).map(|i| c64(3.0 + i as f64 / 39.0, 0.0)).collect();
        let eps = [0.01, 0.02];
        let q = indicator_polys(&[a.clone(), b.clone()], &eps, Mode::Adaptive, &RungeOptions::default()).unwrap();
        for z in a.iter().chain(&b) {
            let s = q[0].poly.eval(*z) + q[1].poly.eval(*z);
            assert!((s - 1.0).norm() <= 0.03 + 1e-12);
        }
    }

    #[test]
    fn collapsed_sets_rejected() {
        let sets = vec![vec![c64(0.0, 0.0)], vec![c64(0.0, 0.0)]];
        assert!(indicator_polys(&sets, &[0.1, 0.1], Mode::Adaptive, &RungeOptions::default()).is_err());
    }
}
