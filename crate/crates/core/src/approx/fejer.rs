use std::f64::consts::PI;

use super::arc::ArcFunction;
use super::polynomial::LaurentPolynomial;
use crate::ensemble::ArcKind;
use crate::{Error, Result, C64};

/// `q` equispaced points `e^{2πij/q}` on the unit circle.
pub fn circle_grid(q: usize) -> Vec<C64> {
    (0..q).map(|j| C64::from_polar(1.0, 2.0 * PI * j as f64 / q as f64)).collect()
}

/// Fourier coefficients `ĝ(k)`, `|k| < n`, of samples on [`circle_grid`].
///
/// Entry `k + n - 1` of the result holds `ĝ(k)`; each coefficient is the
/// trapezoidal rule for `(1/2π)∫ f(e^{is}) e^{-iks} ds`.
pub fn fourier_coeffs(samples: &[C64], n: usize) -> Result<Vec<C64>> {
    let q = samples.len();
    if n == 0 {
        return Err(Error::invalid("Fourier band must be at least 1"));
    }
    if q < 8 * n {
        return Err(Error::invalid(format!("{q} circle samples are fewer than 8·n = {}", 8 * n)));
    }
    let roots = circle_grid(q);
    let mut out = Vec::with_capacity(2 * n - 1);
    for k in -(n as i64 - 1)..=(n as i64 - 1) {
        let shift = (-k).rem_euclid(q as i64) as usize;
        let mut acc = C64::new(0.0, 0.0);
        for (j, f) in samples.iter().enumerate() {
            acc += f * roots[(j * shift) % q];
        }
        out.push(acc / q as f64);
    }
    Ok(out)
}

/// `F_{f,n}(z) = Σ_{|k|<n} ((n-|k|)/n) ĝ(k) z^k`.
pub fn fejer_poly(coeffs: &[C64], n: usize) -> Result<LaurentPolynomial> {
    if n == 0 || coeffs.len() != 2 * n - 1 {
        return Err(Error::dim(format!("{} coefficients do not form the band |k| < {n}", coeffs.len())));
    }
    let weighted = coeffs
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let k = j as i64 - (n as i64 - 1);
            c * ((n as i64 - k.abs()) as f64 / n as f64)
        })
        .collect();
    Ok(LaurentPolynomial::new(-(n as i64 - 1), weighted))
}

/// Smallest `n ≥ 2` with `2√2π·L·ln n / n ≤ eps`.
pub fn fejer_degree(l_f: f64, eps: f64, cap: usize) -> Result<usize> {
    if !(eps > 0.0) || !(l_f >= 0.0) {
        return Err(Error::invalid("fejer_degree needs eps > 0 and L >= 0"));
    }
    let c = 2.0 * std::f64::consts::SQRT_2 * PI * l_f;
    let mut n = 2usize;
    while c * (n as f64).ln() / n as f64 > eps {
        n += 1;
        if n > cap {
            return Err(Error::CapExceeded { stage: "fejer".into(), what: "degree", required: n, cap });
        }
    }
    Ok(n)
}

/// Samples on `circle_grid(q)` of a continuous extension of an arc function.
///
/// On the arc the piecewise-linear interpolant of the samples is used; off
/// the arc the extension is `w_1 + (w_2 - w_1)(z - z_1)/(z_2 - z_1)` between
/// the endpoint values. Also returns a Lipschitz bound for the extension.
pub fn extend_arc_to_circle(arc: &ArcFunction, q: usize) -> Result<(Vec<C64>, f64)> {
    if arc.kind() != ArcKind::CircleArc {
        return Err(Error::ArcClassification {
            stage: "extend_arc_to_circle".into(),
            detail: "samples do not form a unit-circle arc".into(),
        });
    }
    let params = arc.params();
    let (s1, s2) = (params[0], params[params.len() - 1]);
    let span = s2 - s1;
    let (z1, z2) = (arc.points()[0], arc.points()[params.len() - 1]);
    let (w1, w2) = (arc.values()[0], arc.values()[params.len() - 1]);
    let chord = z2 - z1;
    let closed = chord.norm() <= 1e-14;
    let samples = circle_grid(q)
        .into_iter()
        .enumerate()
        .map(|(j, z)| {
            let d = (2.0 * PI * j as f64 / q as f64 - s1).rem_euclid(2.0 * PI);
            if d <= span || closed {
                arc.eval_param(s1 + d.min(span))
            } else {
                w1 + (w2 - w1) * (z - z1) / chord
            }
        })
        .collect();
    let (l_arc, _) = arc.lipschitz()?;
    let l_gap = if closed { 0.0 } else { (w2 - w1).norm() / chord.norm() };
    Ok((samples, l_arc.max(l_gap)))
}
