use super::bernstein::{bernstein_degree, bernstein_nodes, bernstein_to_monomial};
use super::fejer::{extend_arc_to_circle, fejer_degree, fejer_poly, fourier_coeffs};
use super::fit::{adaptive_fit, Check};
use super::polynomial::ComplexPolynomial;
use super::runge::{runge_approx, RungeOptions};
use super::{Caps, Mode};
use crate::ensemble::{classify_arc, lipschitz_estimate, unwrap_angles, ArcKind};
use crate::{Error, Result, C64};

/// A function sampled along an ordered arc, read as its piecewise-linear
/// interpolant in the arc parameter.
///
/// The parameter is `Re z` on real intervals, the unwrapped argument on
/// circle arcs and cumulative chord length otherwise; samples are stored
/// with increasing parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcFunction {
    points: Vec<C64>,
    values: Vec<C64>,
    params: Vec<f64>,
    kind: ArcKind,
}

impl ArcFunction {
    pub fn new(mut points: Vec<C64>, mut values: Vec<C64>) -> Result<Self> {
        if points.is_empty() || points.len() != values.len() {
            return Err(Error::dim("arc samples and values must be non-empty and of equal length"));
        }
        let kind = classify_arc(&points);
        let mut params: Vec<f64> = match kind {
            ArcKind::RealInterval => points.iter().map(|z| z.re).collect(),
            ArcKind::CircleArc => unwrap_angles(&points),
            ArcKind::GeneralArc => {
                let mut acc = 0.0;
                let mut out = vec![0.0];
                for w in points.windows(2) {
                    acc += (w[1] - w[0]).norm();
                    out.push(acc);
                }
                out
            }
        };
        if params.len() > 1 && params[params.len() - 1] < params[0] {
            points.reverse();
            values.reverse();
            params.reverse();
        }
        Ok(Self { points, values, params, kind })
    }

    pub fn points(&self) -> &[C64] {
        &self.points
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn kind(&self) -> ArcKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn locate(&self, s: f64) -> (usize, f64) {
        let n = self.params.len();
        if n == 1 || s <= self.params[0] {
            return (0, 0.0);
        }
        if s >= self.params[n - 1] {
            return (n - 2, 1.0);
        }
        let j = self.params.partition_point(|&p| p <= s) - 1;
        let t = (s - self.params[j]) / (self.params[j + 1] - self.params[j]);
        (j, t)
    }

    /// Interpolated value at parameter `s` (clamped to the arc).
    pub fn eval_param(&self, s: f64) -> C64 {
        if self.len() == 1 {
            return self.values[0];
        }
        let (j, t) = self.locate(s);
        self.values[j] * (1.0 - t) + self.values[j + 1] * t
    }

    /// Point of the arc at parameter `s`.
    pub fn point_at_param(&self, s: f64) -> C64 {
        match self.kind {
            ArcKind::RealInterval if self.len() > 1 => C64::new(s, 0.0),
            ArcKind::CircleArc => C64::from_polar(1.0, s),
            _ => {
                if self.len() == 1 {
                    return self.points[0];
                }
                let (j, t) = self.locate(s);
                self.points[j] * (1.0 - t) + self.points[j + 1] * t
            }
        }
    }

    /// Arc points halfway (in parameter) between consecutive samples, with
    /// the interpolated values there.
    pub fn midpoints(&self) -> Vec<(C64, C64)> {
        self.params
            .windows(2)
            .enumerate()
            .map(|(j, w)| {
                let s = 0.5 * (w[0] + w[1]);
                (self.point_at_param(s), 0.5 * (self.values[j] + self.values[j + 1]))
            })
            .collect()
    }

    /// Midpoints as fit checks. The slack is a quarter of the local second
    /// difference, which bounds the interpolation error at the midpoint for
    /// smooth data.
    pub fn checks(&self) -> Vec<Check> {
        let v = &self.values;
        let second = |j: usize| -> f64 {
            if v.len() < 3 {
                return 0.0;
            }
            let c = j.clamp(1, v.len() - 2);
            (v[c - 1] - v[c] * 2.0 + v[c + 1]).norm()
        };
        self.midpoints()
            .into_iter()
            .enumerate()
            .map(|(j, (z, value))| Check { z, value, slack: 0.25 * second(j).max(second(j + 1)) })
            .collect()
    }

    /// `(L, M)` from [`lipschitz_estimate`]; `L = 0` for a single sample.
    pub fn lipschitz(&self) -> Result<(f64, f64)> {
        if self.len() < 2 {
            return Ok((0.0, self.values[0].norm()));
        }
        lipschitz_estimate(&self.points, &self.values)
    }

    /// Largest deviation of `p` from the samples and from the midpoint
    /// values beyond their slack.
    pub fn max_error(&self, p: &ComplexPolynomial) -> f64 {
        self.points
            .iter()
            .zip(&self.values)
            .map(|(z, v)| (p.eval(*z) - v).norm())
            .chain(self.checks().iter().map(|c| ((p.eval(c.z) - c.value).norm() - c.slack).max(0.0)))
            .fold(0.0, f64::max)
    }
}

/// Polynomial approximation of an [`ArcFunction`].
#[derive(Debug, Clone, PartialEq)]
pub struct ArcApproximation {
    pub poly: ComplexPolynomial,
    /// `"bernstein"`, `"fejer"`, `"adaptive"` or `"constant"`.
    pub construction: &'static str,
    pub degree: usize,
    /// Error on the samples and the midpoints, see [`ArcFunction::max_error`].
    pub measured: f64,
    pub warnings: Vec<String>,
}

/// Approximates `arc` to within `tol`.
///
/// Certified mode uses Bernstein on real intervals and the Fejér operator of
/// the circle extension on circle arcs, replacing `1/z` in the negative
/// powers by a polynomial fitted on the arc. Adaptive mode uses
/// [`adaptive_fit`] on any arc.
pub fn approximate_on_arc(arc: &ArcFunction, tol: f64, mode: Mode, caps: &Caps) -> Result<ArcApproximation> {
    if !(tol > 0.0) {
        return Err(Error::invalid("approximation tolerance must be positive"));
    }
    let first = arc.values()[0];
    if arc.values().iter().all(|v| *v == first) {
        let poly = ComplexPolynomial::constant(first);
        return Ok(ArcApproximation { poly, construction: "constant", degree: 0, measured: 0.0, warnings: vec![] });
    }
    match mode {
        Mode::Adaptive => {
            let fit = adaptive_fit(arc.points(), arc.values(), &arc.checks(), tol, caps.adaptive_cap)?;
            Ok(ArcApproximation {
                degree: fit.degree,
                measured: fit.measured,
                poly: fit.poly,
                construction: "adaptive",
                warnings: vec![],
            })
        }
        Mode::Certified => match arc.kind() {
            ArcKind::RealInterval => bernstein_on_arc(arc, tol, caps),
            ArcKind::CircleArc => fejer_on_arc(arc, tol, caps),
            ArcKind::GeneralArc => Err(Error::ArcClassification {
                stage: "approximate_on_arc".into(),
                detail: "certified mode handles real intervals and unit-circle arcs only".into(),
            }),
        },
    }
}

fn bernstein_on_arc(arc: &ArcFunction, tol: f64, caps: &Caps) -> Result<ArcApproximation> {
    let params = arc.params();
    let (a, b) = (params[0], params[params.len() - 1]);
    let (l, m) = arc.lipschitz()?;
    let n = bernstein_degree(m, l, b - a, tol, caps.degree_cap)?;
    if n > caps.monomial_cap {
        return Err(Error::CapExceeded {
            stage: "bernstein_to_monomial".into(),
            what: "degree",
            required: n,
            cap: caps.monomial_cap,
        });
    }
    let values: Vec<C64> = bernstein_nodes(a, b, n).into_iter().map(|x| arc.eval_param(x)).collect();
    let conv = bernstein_to_monomial(&values, a, b, caps.monomial_cap)?;
    Ok(ArcApproximation {
        measured: arc.max_error(&conv.poly),
        poly: conv.poly,
        construction: "bernstein",
        degree: n,
        warnings: conv.warning.into_iter().collect(),
    })
}

fn fejer_on_arc(arc: &ArcFunction, tol: f64, caps: &Caps) -> Result<ArcApproximation> {
    let (_, l_ext) = extend_arc_to_circle(arc, 8)?;
    let n = fejer_degree(l_ext, 2.0 * tol / 3.0, caps.degree_cap)?;
    if n - 1 > caps.monomial_cap {
        return Err(Error::CapExceeded { stage: "fejer".into(), what: "degree", required: n - 1, cap: caps.monomial_cap });
    }
    let (samples, _) = extend_arc_to_circle(arc, 8 * n)?;
    let f = fejer_poly(&fourier_coeffs(&samples, n)?, n)?;
    let positive = f.nonnegative_part();
    let negative = f.negative_part();
    let mut warnings = Vec::new();
    let poly = if negative.is_zero() {
        positive
    } else {
        // |F⁻(r) - F⁻(1/z)| ≤ sup|F⁻'|·|r - 1/z| on a thin annulus around the circle
        let slope: f64 = negative
            .coeffs()
            .iter()
            .enumerate()
            .map(|(j, c)| j as f64 * c.norm() * 1.01f64.powi(j as i32 - 1))
            .sum();
        let inv_tol = (tol / 3.0 / slope.max(f64::MIN_POSITIVE)).min(0.01);
        let inv = |z: C64| z.inv();
        let r = runge_approx(&inv, 1.0, arc.points(), inv_tol, Mode::Adaptive, &RungeOptions { caps: *caps, ..Default::default() })?;
        let degree = (n - 1) * r.poly.degree().unwrap_or(0);
        if degree > caps.monomial_cap {
            return Err(Error::CapExceeded { stage: "fejer_inverse".into(), what: "degree", required: degree, cap: caps.monomial_cap });
        }
        warnings.push(format!("negative Fejér powers rewritten through a degree {} fit of 1/z", r.degree));
        &positive + &negative.compose(&r.poly)
    };
    Ok(ArcApproximation {
        measured: arc.max_error(&poly),
        degree: poly.degree().unwrap_or(0),
        poly,
        construction: "fejer",
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn orientation_is_normalized() {
        let pts: Vec<C64> = (0..5).map(|k| c64(1.0 - 0.25 * k as f64, 0.0)).collect();
        let vals: Vec<C64> = pts.iter().map(|z| z * 2.0).collect();
        let arc = ArcFunction::new(pts, vals).unwrap();
        assert_eq!(arc.params(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!((arc.eval_param(0.6) - c64(1.2, 0.0)).norm() < 1e-14);
        assert_eq!(arc.midpoints().len(), 4);
    }

    #[test]
    fn certified_real_interval_uses_bernstein() {
        let pts: Vec<C64> = (0..41).map(|k| c64(k as f64 / 40.0, 0.0)).collect();
        let vals: Vec<C64> = pts.iter().map(|z| z * 0.05 + 1.0).collect();
        let arc = ArcFunction::new(pts, vals).unwrap();
        let a = approximate_on_arc(&arc, 5.0, Mode::Certified, &Caps::default()).unwrap();
        assert_eq!(a.construction, "bernstein");
        assert!(a.measured <= 5.0);
        // tight tolerances need degrees beyond the monomial cap
        let err = approximate_on_arc(&arc, 0.01, Mode::Certified, &Caps::default()).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }));
    }

    #[test]
    fn certified_circle_arc_uses_fejer() {
        let pts: Vec<C64> = (0..60).map(|k| C64::from_polar(1.0, -0.5 + k as f64 / 59.0)).collect();
        let vals: Vec<C64> = pts.iter().map(|z| c64(0.02 * z.re, 0.0) + 1.0).collect();
        let arc = ArcFunction::new(pts, vals).unwrap();
        let a = approximate_on_arc(&arc, 1.0, Mode::Certified, &Caps::default()).unwrap();
        assert_eq!(a.construction, "fejer");
        assert!(a.measured <= 1.0, "{}", a.measured);
    }

    #[test]
    fn adaptive_handles_general_arcs() {
        let pts: Vec<C64> = (0..50).map(|k| c64(k as f64 / 49.0, (k as f64 / 49.0).powi(2))).collect();
        let vals: Vec<C64> = pts.iter().map(|z| z.exp()).collect();
        let arc = ArcFunction::new(pts, vals).unwrap();
        assert_eq!(arc.kind(), ArcKind::GeneralArc);
        let a = approximate_on_arc(&arc, 1e-4, Mode::Adaptive, &Caps::default()).unwrap();
        assert!(a.measured <= 1e-4);
        assert!(approximate_on_arc(&arc, 1e-4, Mode::Certified, &Caps::default()).is_err());
    }
}
