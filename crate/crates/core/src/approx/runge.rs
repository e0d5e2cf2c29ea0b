//! Constructive Runge approximation: grid polygon, Cauchy Riemann sum, pole
//! shifting and Taylor truncation.

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use super::fit::adaptive_fit;
use super::polynomial::ComplexPolynomial;
use super::{Caps, Mode};
use crate::ensemble::LIPSCHITZ_SAFETY;
use crate::{Error, Result, C64};

/// Oriented axis-parallel segments of common length `delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentSet {
    segments: Vec<(C64, C64)>,
    delta: f64,
}

impl SegmentSet {
    pub fn segments(&self) -> &[(C64, C64)] {
        &self.segments
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Smallest distance between a segment and any of `points`.
    pub fn distance_to(&self, points: &[C64]) -> f64 {
        let mut best = f64::INFINITY;
        for &(a, b) in &self.segments {
            for &p in points {
                best = best.min(point_segment_distance(p, a, b));
            }
        }
        best
    }

    /// Whether `w` lies on one of the segments, up to `tol`.
    pub fn contains(&self, w: C64, tol: f64) -> bool {
        self.segments.iter().any(|&(a, b)| point_segment_distance(w, a, b) <= tol)
    }
}

fn point_segment_distance(p: C64, a: C64, b: C64) -> f64 {
    let d = b - a;
    let t = (((p - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
    (p - (a + d * t)).norm()
}

fn box_distance(p: C64, lo: C64, hi: C64) -> f64 {
    let dx = (lo.re - p.re).max(0.0).max(p.re - hi.re);
    let dy = (lo.im - p.im).max(0.0).max(p.im - hi.im);
    dx.hypot(dy)
}

/// Half the largest gap between consecutive samples closer than `delta`;
/// larger gaps separate components.
fn dilation_radius(points: &[C64], delta: f64) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1] - w[0]).norm())
        .filter(|g| *g < delta)
        .fold(0.0, f64::max)
        / 2.0
}

type Vertex = (i64, i64);

fn segments_for_offset(points: &[C64], delta: f64, rho: f64, origin: C64) -> Vec<(Vertex, Vertex)> {
    let slack = 1e-12 * delta;
    let mut boxes = std::collections::BTreeSet::new();
    for p in points {
        let rel = (p - origin) / delta;
        let r = (rho + slack) / delta;
        for i in (rel.re - r).floor() as i64..=(rel.re + r).floor() as i64 {
            for j in (rel.im - r).floor() as i64..=(rel.im + r).floor() as i64 {
                let lo = origin + C64::new(i as f64, j as f64) * delta;
                let hi = lo + C64::new(delta, delta);
                if box_distance(*p, lo, hi) <= rho + slack {
                    boxes.insert((i, j));
                }
            }
        }
    }
    let mut edges: BTreeMap<(Vertex, Vertex), (usize, Vertex, Vertex)> = BTreeMap::new();
    for &(i, j) in &boxes {
        let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
        for e in 0..4 {
            let (from, to) = (corners[e], corners[(e + 1) % 4]);
            let key = if from < to { (from, to) } else { (to, from) };
            edges.entry(key).and_modify(|x| x.0 += 1).or_insert((1, from, to));
        }
    }
    edges.into_values().filter(|x| x.0 == 1).map(|(_, a, b)| (a, b)).collect()
}

/// Boundary segments of the grid boxes of pitch `delta` that meet the
/// sampled set `points`, oriented counterclockwise around each box.
///
/// Consecutive samples closer than `delta` are treated as joined, so the
/// samples are dilated by half of such gaps. Sixteen grid offsets are tried;
/// among those keeping at least half the best achievable distance between
/// segments and samples, the one with fewest segments wins.
pub fn grid_segments(points: &[C64], omega_margin: f64, delta: f64) -> Result<SegmentSet> {
    if points.is_empty() {
        return Err(Error::invalid("grid_segments needs at least one sample"));
    }
    if !(delta > 0.0) || !(delta < omega_margin / SQRT_2) {
        return Err(Error::invalid(format!(
            "segment length {delta} must be positive and below margin/√2 = {}",
            omega_margin / SQRT_2
        )));
    }
    let rho = dilation_radius(points, delta);
    let mut candidates = Vec::with_capacity(16);
    for a in 0..4 {
        for b in 0..4 {
            let origin = C64::new(a as f64, b as f64) * (delta / 4.0);
            let to_c = |v: Vertex| origin + C64::new(v.0 as f64, v.1 as f64) * delta;
            let segments: Vec<(C64, C64)> = segments_for_offset(points, delta, rho, origin)
                .into_iter()
                .map(|(p, q)| (to_c(p), to_c(q)))
                .collect();
            let set = SegmentSet { segments, delta };
            candidates.push((set.distance_to(points), set));
        }
    }
    let best_dist = candidates.iter().map(|c| c.0).fold(0.0, f64::max);
    if best_dist <= 0.0 {
        return Err(Error::Infeasible {
            stage: "grid_segments".into(),
            detail: "every grid offset places a segment on the sampled set".into(),
        });
    }
    let (_, set) = candidates
        .into_iter()
        .filter(|c| c.0 >= best_dist / 2.0)
        .min_by(|x, y| x.1.len().cmp(&y.1.len()).then(y.0.total_cmp(&x.0)))
        .expect("the best offset qualifies");
    Ok(set)
}

/// `r(z) = Σ c_j / (w_j - z)`; the factor `1/(2πi)` is folded into `c_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalSum {
    terms: Vec<(C64, C64)>,
}

impl RationalSum {
    pub fn new(terms: Vec<(C64, C64)>) -> Self {
        Self { terms }
    }

    pub fn terms(&self) -> &[(C64, C64)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.terms.iter().map(|(w, c)| c / (w - z)).sum()
    }
}

/// Sampled Lipschitz constant of `ξ ↦ f(ξ)/(ξ - z)` along the segments,
/// maximized over `z` in `points`.
pub fn cauchy_lipschitz(f: &dyn Fn(C64) -> C64, segs: &SegmentSet, points: &[C64]) -> f64 {
    const SUB: usize = 32;
    let mut worst: f64 = 0.0;
    for &(a, b) in segs.segments() {
        let xi: Vec<C64> = (0..=SUB).map(|j| a + (b - a) * (j as f64 / SUB as f64)).collect();
        let fx: Vec<C64> = xi.iter().map(|&x| f(x)).collect();
        let h = (b - a).norm() / SUB as f64;
        for &z in points {
            let g: Vec<C64> = xi.iter().zip(&fx).map(|(x, v)| v / (x - z)).collect();
            for w in g.windows(2) {
                worst = worst.max((w[1] - w[0]).norm() / h);
            }
        }
    }
    LIPSCHITZ_SAFETY * worst
}

/// Riemann sum of the Cauchy integral over the segments.
///
/// Each segment is cut into `M` pieces, `M` the smallest integer with
/// `N·δ²·L̂/(2πM) ≤ eps_step`; the poles are the piece midpoints.
pub fn rational_approx(
    f: &dyn Fn(C64) -> C64,
    segs: &SegmentSet,
    eps_step: f64,
    l_hat: f64,
    pole_cap: usize,
) -> Result<RationalSum> {
    if !(eps_step > 0.0) || !(l_hat >= 0.0) {
        return Err(Error::invalid("rational_approx needs eps_step > 0 and L >= 0"));
    }
    let n = segs.len();
    let delta = segs.delta();
    let m = ((n as f64 * delta * delta * l_hat / (2.0 * PI * eps_step)).ceil() as usize).max(1);
    if n.saturating_mul(m) > pole_cap {
        return Err(Error::CapExceeded { stage: "rational_approx".into(), what: "poles", required: n.saturating_mul(m), cap: pole_cap });
    }
    let two_pi_i = C64::new(0.0, 2.0 * PI);
    let mut terms = Vec::with_capacity(n * m);
    for &(a, b) in segs.segments() {
        let step = (b - a) / m as f64;
        for l in 0..m {
            let w = a + step * (l as f64 + 0.5);
            terms.push((w, f(w) * step / two_pi_i));
        }
    }
    Ok(RationalSum { terms })
}

/// `Σ_{v=0}^{m} β_v / (z - b)^{v+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedTerm {
    pub center: C64,
    pub coeffs: Vec<C64>,
}

impl ShiftedTerm {
    pub fn eval(&self, z: C64) -> C64 {
        let zeta = (z - self.center).inv();
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| (acc + c) * zeta)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
}

/// Rational sum after pole shifting.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedSum {
    pub terms: Vec<ShiftedTerm>,
}

impl ShiftedSum {
    pub fn eval(&self, z: C64) -> C64 {
        self.terms.iter().map(|t| t.eval(z)).sum()
    }
}

fn max_modulus(points: &[C64]) -> f64 {
    points.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn distance(points: &[C64], b: C64) -> f64 {
    points.iter().map(|z| (z - b).norm()).fold(f64::INFINITY, f64::min)
}

/// Expands `c/(w - z) = -c Σ_v (w - b)^v/(z - b)^{v+1}` and truncates once
/// the geometric tail on `{|z - b| ≥ α}` is at most `eps_term`.
fn shift_term(w: C64, c: C64, b: C64, alpha: f64, eps_term: f64, cap: usize) -> Result<ShiftedTerm> {
    let d = w - b;
    let delta = d.norm();
    if delta <= 1e-15 * b.norm().max(1.0) || c.norm() == 0.0 {
        return Ok(ShiftedTerm { center: b, coeffs: vec![-c] });
    }
    let ratio = delta / alpha;
    let arg = eps_term * (alpha - delta) / c.norm();
    let m = if arg >= 1.0 { 0 } else { ((arg.ln() / ratio.ln()).ceil() as usize).saturating_sub(1) };
    if m > cap {
        return Err(Error::CapExceeded { stage: "pole_shift".into(), what: "degree", required: m, cap });
    }
    let mut coeffs = Vec::with_capacity(m + 1);
    let mut cur = -c;
    for _ in 0..=m {
        coeffs.push(cur);
        cur *= d;
    }
    Ok(ShiftedTerm { center: b, coeffs })
}

/// Moves every pole of `rs` to the single point `b`.
///
/// Needs `|b| > 2·max|K|` and `|w - b| < α = dist(b, K)` for every pole.
pub fn pole_shift(rs: &RationalSum, points: &[C64], b: C64, eps_step: f64, cap: usize) -> Result<ShiftedSum> {
    let eta = max_modulus(points);
    if !(b.norm() > 2.0 * eta) {
        return Err(Error::invalid(format!("shift center |b| = {} must exceed 2·max|K| = {}", b.norm(), 2.0 * eta)));
    }
    let alpha = distance(points, b);
    let eps_term = eps_step / rs.len().max(1) as f64;
    let terms = rs
        .terms()
        .iter()
        .map(|&(w, c)| {
            let delta = (w - b).norm();
            if delta >= alpha && delta > 0.0 {
                return Err(Error::Infeasible {
                    stage: "pole_shift".into(),
                    detail: format!("pole {w} is {delta} from b but K is only {alpha} away"),
                });
            }
            shift_term(w, c, b, alpha, eps_term, cap)
        })
        .collect::<Result<_>>()?;
    Ok(ShiftedSum { terms })
}

/// Pole shifting with one center per pole.
///
/// A single center cannot satisfy `|w - b| < dist(b, K)` for poles on all
/// sides of `K`. Each pole `w` with `|w| < radius` is moved to
/// `b_w = w + t·d` on the circle `|b_w| = radius`, the direction `d` chosen
/// among the outward direction from `K`, the radial direction and sixteen
/// fixed angles so that `|w - b_w| / dist(b_w, K)` is smallest. Poles already
/// outside that circle stay where they are.
pub fn pole_shift_per_term(rs: &RationalSum, points: &[C64], radius: f64, eps_step: f64, cap: usize) -> Result<ShiftedSum> {
    let eta = max_modulus(points);
    if !(radius > 2.0 * eta) && eta > 0.0 {
        return Err(Error::invalid(format!("shift radius {radius} must exceed 2·max|K| = {}", 2.0 * eta)));
    }
    let eps_term = eps_step / rs.len().max(1) as f64;
    let terms = rs
        .terms()
        .iter()
        .map(|&(w, c)| {
            if w.norm() >= radius {
                return shift_term(w, c, w, 1.0, eps_term, cap);
            }
            let nearest = points
                .iter()
                .min_by(|x, y| (*x - w).norm().total_cmp(&(*y - w).norm()))
                .copied()
                .unwrap_or_default();
            let mut dirs: Vec<C64> = (0..16).map(|j| C64::from_polar(1.0, 2.0 * PI * j as f64 / 16.0)).collect();
            if (w - nearest).norm() > 0.0 {
                dirs.push((w - nearest) / (w - nearest).norm());
            }
            if w.norm() > 0.0 {
                dirs.push(w / w.norm());
            }
            let mut best: Option<(f64, C64, f64)> = None;
            for d in dirs {
                let proj = (w.conj() * d).re;
                let t = -proj + (proj * proj - w.norm_sqr() + radius * radius).max(0.0).sqrt();
                let b = w + d * t;
                let alpha = distance(points, b);
                let q = t / alpha;
                if best.is_none_or(|x| q < x.0) {
                    best = Some((q, b, alpha));
                }
            }
            let (q, b, alpha) = best.expect("directions tried");
            if !(q < 1.0) {
                return Err(Error::Infeasible {
                    stage: "pole_shift".into(),
                    detail: format!("no shift center for pole {w} keeps the series convergent on K"),
                });
            }
            shift_term(w, c, b, alpha, eps_term, cap)
        })
        .collect::<Result<_>>()?;
    Ok(ShiftedSum { terms })
}

/// First `count` Taylor coefficients at 0 of `1/(z - b)^{v+1}`:
/// `a_μ = C(μ+v, v)(-1)^{v+1} / b^{μ+v+1}`.
pub fn taylor_inverse_power(b: C64, v: usize, count: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(count);
    let sign = if v.is_multiple_of(2) { -1.0 } else { 1.0 };
    let mut a = b.powi(-(v as i32 + 1)) * sign;
    for mu in 0..count {
        out.push(a);
        a = a * ((mu + v + 1) as f64 / (mu + 1) as f64) / b;
    }
    out
}

/// Truncation index `D` for `β/(z - b)^{v+1}` on `|z| ≤ η`: the tail
/// `Σ_{μ>D} |β| C(μ+v,v) η^μ / |b|^{μ+v+1}` is at most `eps`.
fn taylor_degree(beta: f64, b: f64, v: usize, eta: f64, eps: f64, cap: usize) -> Result<usize> {
    if eta == 0.0 || beta == 0.0 {
        return Ok(0);
    }
    let x = eta / b;
    let mut term = beta / b.powi(v as i32 + 1);
    let mut d = 0usize;
    loop {
        let ratio_next = x * (d + v + 1) as f64 / (d + 1) as f64;
        let next = term * ratio_next;
        let ratio_after = x * (d + v + 2) as f64 / (d + 2) as f64;
        if ratio_after < 1.0 && next / (1.0 - ratio_after) <= eps {
            return Ok(d);
        }
        term = next;
        d += 1;
        if d > cap {
            return Err(Error::CapExceeded { stage: "polynomialize".into(), what: "degree", required: d, cap });
        }
    }
}

/// Replaces each `β/(z - b)^{v+1}` by its Taylor polynomial at 0, truncated
/// once the tail on `|z| ≤ max|K|` fits an equal share of `eps_step`.
pub fn polynomialize(shifted: &ShiftedSum, points: &[C64], eps_step: f64, cap: usize) -> Result<ComplexPolynomial> {
    let eta = max_modulus(points);
    let pairs: usize = shifted.terms.iter().map(|t| t.coeffs.len()).sum();
    let eps_pair = eps_step / pairs.max(1) as f64;
    let mut acc: Vec<C64> = Vec::new();
    for term in &shifted.terms {
        let b = term.center;
        if !(b.norm() > 2.0 * eta) {
            return Err(Error::invalid(format!("Taylor center 0 needs |b| > 2·max|K|, got |b| = {}", b.norm())));
        }
        for (v, beta) in term.coeffs.iter().enumerate() {
            let d = taylor_degree(beta.norm(), b.norm(), v, eta, eps_pair, cap)?;
            if acc.len() < d + 1 {
                acc.resize(d + 1, C64::new(0.0, 0.0));
            }
            for (slot, a) in acc.iter_mut().zip(taylor_inverse_power(b, v, d + 1)) {
                *slot += beta * a;
            }
        }
    }
    Ok(ComplexPolynomial::new(acc))
}

/// Tuning of [`runge_approx`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RungeOptions {
    pub caps: Caps,
    /// Segment length as a fraction of `margin/√2`.
    pub delta_fraction: f64,
    /// Shift circle radius as a multiple of `max|K|`.
    pub shift_radius_factor: f64,
}

impl Default for RungeOptions {
    fn default() -> Self {
        Self { caps: Caps::default(), delta_fraction: 0.7, shift_radius_factor: 3.0 }
    }
}

/// Bookkeeping of a certified Runge construction, one third of `eps` per
/// step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RungeBudget {
    pub eps: f64,
    pub step_budget: f64,
    /// Measured `|f - r|`, `|r - r_b|`, `|r_b - p|` on the samples.
    pub step_errors: [f64; 3],
    pub eta: f64,
    pub delta: f64,
    pub segments: usize,
    pub subdivisions: usize,
    pub l_hat: f64,
    pub shift_radius: f64,
    pub max_shift_degree: usize,
    pub degree: usize,
}

/// Polynomial produced by [`runge_approx`].
#[derive(Debug, Clone, PartialEq)]
pub struct RungeOutcome {
    pub poly: ComplexPolynomial,
    pub mode: Mode,
    pub degree: usize,
    /// `max |f - p|` over the samples.
    pub measured: f64,
    pub budget: Option<RungeBudget>,
}

fn sup_diff(points: &[C64], f: impl Fn(C64) -> C64, g: impl Fn(C64) -> C64) -> f64 {
    points.iter().map(|&z| (f(z) - g(z)).norm()).fold(0.0, f64::max)
}

/// The four-step construction with `eps/3` per step.
///
/// `f` must be holomorphic on the `margin`-neighbourhood of the sampled set.
pub fn runge_certified(f: &dyn Fn(C64) -> C64, margin: f64, points: &[C64], eps: f64, opts: &RungeOptions) -> Result<RungeOutcome> {
    if !(eps > 0.0) || !(margin > 0.0) {
        return Err(Error::invalid("runge_certified needs eps > 0 and margin > 0"));
    }
    let step = eps / 3.0;
    let delta = opts.delta_fraction * margin / SQRT_2;
    let segs = grid_segments(points, margin, delta)?;
    let l_hat = cauchy_lipschitz(f, &segs, points);
    let rs = rational_approx(f, &segs, step, l_hat, opts.caps.pole_cap)?;
    let eta = max_modulus(points);
    let radius = opts.shift_radius_factor * eta;
    let shifted = pole_shift_per_term(&rs, points, radius, step, opts.caps.runge_degree_cap)?;
    let poly = polynomialize(&shifted, points, step, opts.caps.runge_degree_cap)?;

    let step_errors = [
        sup_diff(points, f, |z| rs.eval(z)),
        sup_diff(points, |z| rs.eval(z), |z| shifted.eval(z)),
        sup_diff(points, |z| shifted.eval(z), |z| poly.eval(z)),
    ];
    let measured = sup_diff(points, f, |z| poly.eval(z));
    let degree = poly.degree().unwrap_or(0);
    let budget = RungeBudget {
        eps,
        step_budget: step,
        step_errors,
        eta,
        delta,
        segments: segs.len(),
        subdivisions: rs.len() / segs.len().max(1),
        l_hat,
        shift_radius: radius,
        max_shift_degree: shifted.terms.iter().map(ShiftedTerm::degree).max().unwrap_or(0),
        degree,
    };
    Ok(RungeOutcome { poly, mode: Mode::Certified, degree, measured, budget: Some(budget) })
}

/// Polynomial approximation of a holomorphic `f` on a sampled compact set.
///
/// Certified mode runs [`runge_certified`]; adaptive mode fits least-squares
/// polynomials of escalating degree. Both return an error unless the
/// measured error on the samples is at most `eps`. Connectedness of the
/// complement of the set is the caller's responsibility.
pub fn runge_approx(
    f: &dyn Fn(C64) -> C64,
    margin: f64,
    points: &[C64],
    eps: f64,
    mode: Mode,
    opts: &RungeOptions,
) -> Result<RungeOutcome> {
    match mode {
        Mode::Certified => {
            let out = runge_certified(f, margin, points, eps, opts)?;
            if out.measured > eps {
                return Err(Error::NotConverged { stage: "runge_certified".into(), tolerance: eps, achieved: out.measured });
            }
            Ok(out)
        }
        Mode::Adaptive => {
            let values: Vec<C64> = points.iter().map(|&z| f(z)).collect();
            let fit = adaptive_fit(points, &values, &[], eps, opts.caps.adaptive_cap)?;
            Ok(RungeOutcome { degree: fit.degree, measured: fit.measured, poly: fit.poly, mode: Mode::Adaptive, budget: None })
        }
    }
}
