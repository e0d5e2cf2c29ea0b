use nalgebra::{DMatrix, DVector};

use super::polynomial::ComplexPolynomial;
use crate::{Error, Result, C64};

/// Extra validation point: the fit must be within `eps + slack` of `value`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Check {
    pub z: C64,
    pub value: C64,
    pub slack: f64,
}

/// Outcome of [`adaptive_fit`].
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveFit {
    pub poly: ComplexPolynomial,
    pub degree: usize,
    /// Largest deviation over the fitting samples and the extra checks (less
    /// their slack), evaluated in the monomial basis of `z`.
    pub measured: f64,
}

/// Least-squares polynomial fits of increasing degree.
///
/// Each degree is fitted in the scaled variable `w = (z - c)/s` that maps the
/// samples into the unit disc, converted back to powers of `z`, and accepted
/// as soon as its error on `points` and `checks` is at most `eps`.
pub fn adaptive_fit(
    points: &[C64],
    values: &[C64],
    checks: &[Check],
    eps: f64,
    max_degree: usize,
) -> Result<AdaptiveFit> {
    if points.is_empty() || points.len() != values.len() {
        return Err(Error::dim("adaptive_fit needs matching, non-empty samples"));
    }
    if !(eps > 0.0) {
        return Err(Error::invalid("adaptive_fit needs eps > 0"));
    }
    if values.iter().all(|v| *v == values[0]) && checks.iter().all(|c| c.value == values[0]) {
        return Ok(AdaptiveFit { poly: ComplexPolynomial::constant(values[0]), degree: 0, measured: 0.0 });
    }
    let (center, scale) = enclosing_disc(points);
    let to_w = ComplexPolynomial::affine(C64::new(1.0 / scale, 0.0), -center / scale);
    let ws: Vec<C64> = points.iter().map(|z| (z - center) / scale).collect();
    let rhs = DVector::from_column_slice(values);
    let top = max_degree.min(points.len() - 1);

    let mut best: Option<AdaptiveFit> = None;
    for d in 0..=top {
        let v = DMatrix::from_fn(ws.len(), d + 1, |i, j| ws[i].powu(j as u32));
        let svd = v.svd(true, true);
        let cutoff = 1e-13 * svd.singular_values.max();
        let Ok(a) = svd.solve(&rhs, cutoff) else { continue };
        let poly = ComplexPolynomial::new(a.iter().copied().collect()).compose(&to_w);
        let measured = points
            .iter()
            .zip(values)
            .map(|(z, y)| (poly.eval(*z) - y).norm())
            .chain(checks.iter().map(|c| ((poly.eval(c.z) - c.value).norm() - c.slack).max(0.0)))
            .fold(0.0, f64::max);
        let fit = AdaptiveFit { poly, degree: d, measured };
        if measured <= eps {
            return Ok(fit);
        }
        if best.as_ref().is_none_or(|b| measured < b.measured) {
            best = Some(fit);
        }
    }
    Err(Error::NotConverged {
        stage: "adaptive_fit".into(),
        tolerance: eps,
        achieved: best.map_or(f64::INFINITY, |b| b.measured),
    })
}

/// Center of the bounding box and the largest distance from it.
fn enclosing_disc(points: &[C64]) -> (C64, f64) {
    let (mut lo_re, mut hi_re, mut lo_im, mut hi_im) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for z in points {
        lo_re = lo_re.min(z.re);
        hi_re = hi_re.max(z.re);
        lo_im = lo_im.min(z.im);
        hi_im = hi_im.max(z.im);
    }
    let c = C64::new((lo_re + hi_re) / 2.0, (lo_im + hi_im) / 2.0);
    let s = points.iter().map(|z| (z - c).norm()).fold(0.0, f64::max);
    (c, if s > 0.0 { s } else { 1.0 })
}
