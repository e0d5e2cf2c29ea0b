//! Browser demo: Bernstein and Fejér approximations and an end-to-end
//! ensemble synthesis, exported through `wasm-bindgen`.
//!
//! Every export returns flat `Float64Array`s so the page can draw them
//! without any glue beyond the generated bindings.

use std::f64::consts::{PI, SQRT_2};

use ensreach::approx::{bernstein_apply, bernstein_nodes, circle_grid, fejer_poly, fourier_coeffs, Mode};
use ensreach::ensemble::{simulate_discrete, sup_error_profile};
use ensreach::synthesis::{method_s2, SynthesisOptions, Validation};
use ensreach::{EnsembleSystem, ParameterGrid, TargetFamily, C64};
use nalgebra::{DMatrix, DVector};
use wasm_bindgen::prelude::*;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `[x, f(x), B_n f(x), …]` for `f(x) = |x − kink|` on `[0, 1]`.
pub fn bernstein_samples(kink: f64, n: usize, points: usize) -> Vec<f64> {
    let n = n.max(1);
    let f = |x: f64| (x - kink).abs();
    let values: Vec<C64> = bernstein_nodes(0.0, 1.0, n).iter().map(|&x| c(f(x))).collect();
    let mut out = Vec::with_capacity(3 * points);
    for i in 0..points {
        let x = i as f64 / (points - 1).max(1) as f64;
        let y = bernstein_apply(&values, 0.0, 1.0, x).map_or(f64::NAN, |z| z.re);
        out.extend([x, f(x), y]);
    }
    out
}

/// Bound `√2 (4M + L/2) √(ln n / n)` for `|x − kink|` on `[0, 1]`.
pub fn bernstein_bound_value(kink: f64, n: usize) -> f64 {
    let m = kink.max(1.0 - kink);
    let n = n.max(2) as f64;
    SQRT_2 * (4.0 * m + 0.5) * (n.ln() / n).sqrt()
}

/// Circle test functions by index: `Re z`, a tent in `arg z`, a sawtooth.
fn circle_function(kind: u32, t: f64) -> f64 {
    match kind {
        0 => t.cos(),
        1 => 1.0 - (t.rem_euclid(2.0 * PI) - PI).abs() / PI * 2.0,
        _ => {
            let s = (3.0 * t / (2.0 * PI)).rem_euclid(1.0);
            if s < 0.5 {
                2.0 * s
            } else {
                2.0 - 2.0 * s
            }
        }
    }
}

/// Lipschitz constant in arc length of [`circle_function`].
fn arc_lipschitz(kind: u32) -> f64 {
    match kind {
        0 => 1.0,
        1 => 2.0 / PI,
        _ => 3.0 / PI,
    }
}

/// `[t, g(e^{it}), Re σ_n g(e^{it}), …]` for `t ∈ [0, 2π]`.
pub fn fejer_samples(kind: u32, n: usize, points: usize) -> Vec<f64> {
    let n = n.max(1);
    let grid = circle_grid(16 * n);
    let samples: Vec<C64> = grid.iter().map(|z| c(circle_function(kind, z.arg()))).collect();
    let poly = fourier_coeffs(&samples, n).and_then(|coeffs| fejer_poly(&coeffs, n));
    let mut out = Vec::with_capacity(3 * points);
    for i in 0..points {
        let t = 2.0 * PI * i as f64 / (points - 1).max(1) as f64;
        let y = poly.as_ref().map_or(f64::NAN, |p| p.eval(C64::from_polar(1.0, t)).re);
        out.extend([t, circle_function(kind, t), y]);
    }
    out
}

/// `2√2π L ln n / n` with `L = (π/2)·L_arc`, which bounds the chordal
/// Lipschitz constant since arcs up to `π` are at most `π/2` times their chord.
pub fn fejer_bound_value(kind: u32, n: usize) -> f64 {
    let n = n.max(2) as f64;
    2.0 * SQRT_2 * PI * (PI / 2.0 * arc_lipschitz(kind)) * n.ln() / n
}

/// Outcome of the demo synthesis.
#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct Synthesis {
    thetas: Vec<f64>,
    errors: Vec<f64>,
    input: Vec<f64>,
    achieved: f64,
    validated: f64,
    degree: usize,
    method: String,
}

#[wasm_bindgen]
impl Synthesis {
    /// Validation-grid parameters.
    #[wasm_bindgen(getter)]
    pub fn thetas(&self) -> Vec<f64> {
        self.thetas.clone()
    }

    /// `‖x(θ) − f(θ)‖` on the validation grid.
    #[wasm_bindgen(getter)]
    pub fn errors(&self) -> Vec<f64> {
        self.errors.clone()
    }

    /// `[re, im, re, im, …]` of `u_0, u_1, …`.
    #[wasm_bindgen(getter)]
    pub fn input(&self) -> Vec<f64> {
        self.input.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn achieved(&self) -> f64 {
        self.achieved
    }

    #[wasm_bindgen(getter)]
    pub fn validated(&self) -> f64 {
        self.validated
    }

    #[wasm_bindgen(getter)]
    pub fn degree(&self) -> usize {
        self.degree
    }

    #[wasm_bindgen(getter)]
    pub fn method(&self) -> String {
        self.method.clone()
    }
}

fn diagonal(shift: f64, grid: ParameterGrid) -> ensreach::Result<EnsembleSystem> {
    EnsembleSystem::from_fn(grid, |t| {
        (
            DMatrix::from_diagonal(&DVector::from_vec(vec![t, t + shift])),
            DMatrix::from_element(2, 1, c(1.0)),
        )
    })
}

fn target(grid: &ParameterGrid) -> ensreach::Result<TargetFamily> {
    TargetFamily::from_fn(grid, |t| DVector::from_vec(vec![c(1.0), t]))
}

/// Steers `x⁺ = diag(θ, θ + shift)x + (1, 1)ᵀu` toward `(1, θ)ᵀ` for all
/// `θ ∈ [0, 1]`.
pub fn synthesize_diagonal(eps: f64, shift: f64, samples: usize) -> ensreach::Result<Synthesis> {
    let grid = ParameterGrid::interval(0.0, 1.0, samples)?;
    let sys = diagonal(shift, grid.clone())?;
    let f = target(&grid)?;
    let vgrid = grid.interleaved();
    let vsys = diagonal(shift, vgrid.clone())?;
    let vtarget = target(&vgrid)?;
    let mut opts = SynthesisOptions::with_mode(Mode::Adaptive);
    opts.validation = Some(Validation { system: vsys.clone(), target: vtarget.clone() });
    let out = method_s2(&sys, &f, eps, &opts)?;
    let errors = sup_error_profile(&simulate_discrete(&vsys, &out.input)?, &vtarget)?;
    Ok(Synthesis {
        thetas: vgrid.samples().iter().map(|z| z.re).collect(),
        errors,
        input: out.input.values().iter().flat_map(|v| [v[0].re, v[0].im]).collect(),
        achieved: out.report.achieved,
        validated: out.report.worst_error(),
        degree: out.report.degree,
        method: out.report.method.to_string(),
    })
}

#[wasm_bindgen]
pub fn bernstein_curve(kink: f64, n: usize, points: usize) -> Vec<f64> {
    bernstein_samples(kink, n, points)
}

#[wasm_bindgen]
pub fn bernstein_bound(kink: f64, n: usize) -> f64 {
    bernstein_bound_value(kink, n)
}

#[wasm_bindgen]
pub fn fejer_curve(kind: u32, n: usize, points: usize) -> Vec<f64> {
    fejer_samples(kind, n, points)
}

#[wasm_bindgen]
pub fn fejer_bound(kind: u32, n: usize) -> f64 {
    fejer_bound_value(kind, n)
}

#[wasm_bindgen]
pub fn synthesize(eps: f64, shift: f64, samples: usize) -> Result<Synthesis, JsError> {
    synthesize_diagonal(eps, shift, samples).map_err(|e| JsError::new(&e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_gap(triples: &[f64]) -> f64 {
        triples.chunks(3).map(|t| (t[1] - t[2]).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn bernstein_within_bound() {
        for n in [10, 100, 1000] {
            let curve = bernstein_samples(0.5, n, 201);
            assert_eq!(curve.len(), 603);
            assert!(max_gap(&curve) <= bernstein_bound_value(0.5, n));
        }
    }

    #[test]
    fn fejer_within_bound() {
        for kind in 0..3 {
            for n in [20, 80] {
                let curve = fejer_samples(kind, n, 257);
                assert!(max_gap(&curve) <= fejer_bound_value(kind, n), "kind {kind}, n {n}");
            }
        }
    }

    #[test]
    fn circle_functions_are_lipschitz() {
        for kind in 0..3 {
            let l = arc_lipschitz(kind);
            let h = 1e-3;
            let steep = (0..6283)
                .map(|i| {
                    let t = i as f64 * h;
                    (circle_function(kind, t + h) - circle_function(kind, t)).abs() / h
                })
                .fold(0.0, f64::max);
            assert!(steep <= l * (1.0 + 1e-9), "kind {kind}: {steep} > {l}");
        }
    }

    #[test]
    fn synthesis_meets_tolerance() {
        let out = synthesize_diagonal(0.2, 3.0, 41).unwrap();
        assert_eq!(out.method, "s2");
        assert_eq!(out.thetas.len(), 81);
        let worst = out.errors.iter().copied().fold(0.0, f64::max);
        assert!(worst < 0.2);
        assert_eq!(worst, out.validated.max(out.achieved).max(worst));
        assert_eq!(out.input.len() / 2, out.degree + 1);
    }

    #[test]
    fn overlapping_spectra_rejected() {
        assert!(synthesize_diagonal(0.2, 0.5, 41).is_err());
    }
}
