use super::polynomial::ComplexPolynomial;
use super::MONOMIAL_WARN_DEGREE;
use crate::{Error, Result, C64};

const DE_CASTELJAU_MAX: usize = 60;

fn bernstein_bound(m_f: f64, l_f: f64, length: f64, n: usize) -> f64 {
    let n = n as f64;
    std::f64::consts::SQRT_2 * (4.0 * m_f + length * l_f / 2.0) * (n.ln() / n).sqrt()
}

/// Smallest `n ≥ 3` with `√2·(4M + |I|·L/2)·√(ln n / n) ≤ eps`.
pub fn bernstein_degree(m_f: f64, l_f: f64, length: f64, eps: f64, cap: usize) -> Result<usize> {
    if !(eps > 0.0) || !(m_f >= 0.0) || !(l_f >= 0.0) || !(length > 0.0) {
        return Err(Error::invalid("bernstein_degree needs eps > 0, M, L >= 0 and length > 0"));
    }
    if m_f == 0.0 && l_f == 0.0 {
        return Ok(3);
    }
    // ln n / n decreases for n >= 3, so the first hit is minimal
    let mut n = 3;
    while bernstein_bound(m_f, l_f, length, n) > eps {
        n += 1;
        if n > cap {
            return Err(Error::CapExceeded { stage: "bernstein".into(), what: "degree", required: n, cap });
        }
    }
    Ok(n)
}

/// Nodes `a + k(b-a)/n`, `k = 0..=n`.
pub fn bernstein_nodes(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect()
}

/// `B_{n,f}(x) = Σ_k f(x_k) C(n,k) t^k (1-t)^{n-k}` with `t = (x-a)/(b-a)`.
pub fn bernstein_apply(values: &[C64], a: f64, b: f64, x: f64) -> Result<C64> {
    if values.is_empty() {
        return Err(Error::invalid("no Bernstein node values"));
    }
    if !(b > a) {
        return Err(Error::invalid("Bernstein interval must have a < b"));
    }
    let slack = 1e-12 * (b - a);
    if !(x >= a - slack && x <= b + slack) {
        return Err(Error::invalid(format!("x = {x} lies outside [{a}, {b}]")));
    }
    let t = ((x - a) / (b - a)).clamp(0.0, 1.0);
    let n = values.len() - 1;
    if n <= DE_CASTELJAU_MAX {
        let mut work = values.to_vec();
        for r in 1..=n {
            for k in 0..=n - r {
                work[k] = work[k] * (1.0 - t) + work[k + 1] * t;
            }
        }
        return Ok(work[0]);
    }
    if t == 0.0 {
        return Ok(values[0]);
    }
    if t == 1.0 {
        return Ok(values[n]);
    }
    let (lt, ls) = (t.ln(), (1.0 - t).ln());
    let mut log_binom = 0.0;
    let mut acc = C64::new(0.0, 0.0);
    for (k, v) in values.iter().enumerate() {
        let w = (log_binom + k as f64 * lt + (n - k) as f64 * ls).exp();
        acc += v * w;
        log_binom += ((n - k) as f64).ln() - ((k + 1) as f64).ln();
    }
    Ok(acc)
}

/// A monomial-basis polynomial and an optional conditioning warning.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialConversion {
    pub poly: ComplexPolynomial,
    pub warning: Option<String>,
}

/// Rewrites `B_{n,f}` on `[a, b]` in the monomial basis of `x`.
///
/// Uses `B_{n,f}(t) = Σ_j C(n,j) Δ^j f_0 t^j` and substitutes
/// `t = (x-a)/(b-a)`.
pub fn bernstein_to_monomial(values: &[C64], a: f64, b: f64, monomial_cap: usize) -> Result<MonomialConversion> {
    if values.is_empty() {
        return Err(Error::invalid("no Bernstein node values"));
    }
    if !(b > a) {
        return Err(Error::invalid("Bernstein interval must have a < b"));
    }
    let n = values.len() - 1;
    if n > monomial_cap {
        return Err(Error::CapExceeded { stage: "bernstein_to_monomial".into(), what: "degree", required: n, cap: monomial_cap });
    }
    let mut diffs = values.to_vec();
    let mut in_t = Vec::with_capacity(n + 1);
    let mut binom = 1.0;
    for j in 0..=n {
        in_t.push(diffs[0] * binom);
        for k in 0..diffs.len() - 1 {
            diffs[k] = diffs[k + 1] - diffs[k];
        }
        diffs.pop();
        binom = binom * (n - j) as f64 / (j + 1) as f64;
    }
    let scale = 1.0 / (b - a);
    let t_of_x = ComplexPolynomial::affine(C64::new(scale, 0.0), C64::new(-a * scale, 0.0));
    let poly = ComplexPolynomial::new(in_t).compose(&t_of_x);
    let warning = (n > MONOMIAL_WARN_DEGREE).then(|| {
        format!("degree {n} Bernstein polynomial converted to the monomial basis; coefficients may be ill-conditioned")
    });
    Ok(MonomialConversion { poly, warning })
}
