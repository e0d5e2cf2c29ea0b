//! Pointwise-testable conditions for uniform ensemble reachability.
//!
//! Every verdict is an on-grid statement: disjointness of spectra, for
//! instance, is only checked between sampled parameters.

use serde::Serialize;

use super::linalg::{char_poly, eigenvalues, kalman_matrix, sigma_at};
use super::EnsembleSystem;
use crate::C64;

/// Numerical thresholds for the condition checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionTolerances {
    /// Minimum smallest singular value of the Kalman matrix.
    pub reachability: f64,
    /// Minimum distance between spectra at distinct samples.
    pub disjointness: f64,
    /// Minimum pairwise eigenvalue gap at one sample.
    pub eigengap: f64,
    /// Relative variation allowed in the constant characteristic coefficients.
    pub constancy: f64,
}

impl Default for ConditionTolerances {
    fn default() -> Self {
        Self {
            reachability: 1e-8,
            disjointness: 1e-6,
            eigengap: 1e-6,
            constancy: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct N1Report {
    pub pass: bool,
    /// Smallest singular value of the Kalman matrix at each sample.
    pub margins: Vec<f64>,
    pub passes: Vec<bool>,
}

impl N1Report {
    pub fn min_margin(&self) -> f64 {
        self.margins.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn first_failure(&self) -> Option<usize> {
        self.passes.iter().position(|p| !p)
    }
}

/// Reachability of `(A(θ_i), B(θ_i))` at every sample.
pub fn check_n1(sys: &EnsembleSystem, tol: &ConditionTolerances) -> N1Report {
    let n = sys.state_dim();
    let margins: Vec<f64> = (0..sys.len())
        .map(|i| sigma_at(&kalman_matrix(sys.a(i), sys.b(i)), n))
        .collect();
    let passes: Vec<bool> = margins.iter().map(|&s| s > tol.reachability).collect();
    N1Report { pass: passes.iter().all(|&p| p), margins, passes }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct N2Report {
    pub pass: bool,
    /// Smallest distance between eigenvalues at two distinct samples
    /// (infinite on a single-sample grid).
    pub min_distance: f64,
    /// Sample pair attaining `min_distance`.
    pub pair: Option<(usize, usize)>,
}

/// Pairwise disjointness of the sampled spectra.
pub fn check_n2(sys: &EnsembleSystem, tol: &ConditionTolerances) -> N2Report {
    let spectra: Vec<Vec<C64>> = (0..sys.len()).map(|i| eigenvalues(sys.a(i))).collect();
    let mut best = f64::INFINITY;
    let mut pair = None;
    for i in 0..spectra.len() {
        for j in i + 1..spectra.len() {
            for x in &spectra[i] {
                for y in &spectra[j] {
                    let d = (x - y).norm();
                    if d < best {
                        best = d;
                        pair = Some((i, j));
                    }
                }
            }
        }
    }
    N2Report { pass: best > tol.disjointness, min_distance: best, pair }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct S1Report {
    pub pass: bool,
    /// `a_0(θ_i)` for the characteristic polynomial
    /// `z^n − (a_{n−1} z^{n−1} + … + a_1 z + a_0(θ))`.
    pub a0: Vec<C64>,
    /// `a_1, …, a_{n−1}` as read at the first sample.
    pub constants: Vec<C64>,
    /// Largest relative deviation of `a_1..a_{n−1}` across the grid.
    pub max_deviation: f64,
}

/// Companion-type characteristic polynomial with only the constant term
/// varying.
pub fn check_s1(sys: &EnsembleSystem, tol: &ConditionTolerances) -> S1Report {
    let n = sys.state_dim();
    // a_j = -c_j for the monic characteristic polynomial c
    let coeffs: Vec<Vec<C64>> = (0..sys.len())
        .map(|i| char_poly(sys.a(i)).iter().take(n).map(|c| -c).collect())
        .collect();
    let a0 = coeffs.iter().map(|c| c[0]).collect();
    let constants: Vec<C64> = coeffs[0][1..].to_vec();
    let max_deviation = coeffs
        .iter()
        .flat_map(|c| {
            c[1..]
                .iter()
                .zip(&constants)
                .map(|(x, r)| (x - r).norm() / (1.0 + r.norm()))
        })
        .fold(0.0, f64::max);
    S1Report { pass: max_deviation <= tol.constancy, a0, constants, max_deviation }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct S2Report {
    pub pass: bool,
    /// Smallest eigenvalue gap over the grid (infinite when n = 1).
    pub min_gap: f64,
    pub gaps: Vec<f64>,
}

impl S2Report {
    pub fn worst_sample(&self) -> Option<usize> {
        self.gaps
            .iter()
            .enumerate()
            .min_by(|x, y| x.1.total_cmp(y.1))
            .map(|(i, _)| i)
    }
}

/// Simple spectrum at every sample.
pub fn check_s2(sys: &EnsembleSystem, tol: &ConditionTolerances) -> S2Report {
    let gaps: Vec<f64> = (0..sys.len())
        .map(|i| {
            let ev = eigenvalues(sys.a(i));
            let mut gap = f64::INFINITY;
            for p in 0..ev.len() {
                for q in p + 1..ev.len() {
                    gap = gap.min((ev[p] - ev[q]).norm());
                }
            }
            gap
        })
        .collect();
    let min_gap = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    S2Report { pass: min_gap > tol.eigengap, min_gap, gaps }
}

#[cfg(test)]
mod tests {
    use nalgebra::DMatrix;

    use super::*;
    use crate::c64;
    use crate::ensemble::ParameterGrid;

    fn constant_system(a: &[f64], b: &[f64]) -> EnsembleSystem {
        let n = b.len();
        let grid = ParameterGrid::interval(0.0, 1.0, 3).unwrap();
        EnsembleSystem::from_fn(grid, |_| {
            (
                DMatrix::from_row_iterator(n, n, a.iter().map(|&x| c64(x, 0.0))),
                DMatrix::from_row_iterator(n, 1, b.iter().map(|&x| c64(x, 0.0))),
            )
        })
        .unwrap()
    }

    fn diag_shift(grid: ParameterGrid) -> EnsembleSystem {
        EnsembleSystem::from_fn(grid, |t| {
            (
                DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![t, t + 3.0])),
                DMatrix::from_element(2, 1, c64(1.0, 0.0)),
            )
        })
        .unwrap()
    }

    fn scalar(grid: ParameterGrid, f: impl Fn(C64) -> C64) -> EnsembleSystem {
        EnsembleSystem::from_fn(grid, |t| {
            (DMatrix::from_element(1, 1, f(t)), DMatrix::from_element(1, 1, c64(1.0, 0.0)))
        })
        .unwrap()
    }

    #[test]
    fn n1_shift_pair() {
        let tol = ConditionTolerances::default();
        assert!(check_n1(&constant_system(&[0.0, 1.0, 0.0, 0.0], &[0.0, 1.0]), &tol).pass);
        let r = check_n1(&constant_system(&[0.0, 1.0, 0.0, 0.0], &[1.0, 0.0]), &tol);
        assert!(!r.pass);
        assert_eq!(r.first_failure(), Some(0));
        let s = scalar(ParameterGrid::interval(0.0, 1.0, 5).unwrap(), |t| t);
        assert!(check_n1(&s, &tol).pass);
    }

    #[test]
    fn n2_examples() {
        let tol = ConditionTolerances::default();
        let grid = ParameterGrid::from_samples(vec![c64(0.0, 0.0), c64(0.5, 0.0), c64(1.0, 0.0)]).unwrap();
        assert!(check_n2(&scalar(grid, |t| t), &tol).pass);

        let grid = ParameterGrid::interval(0.0, 1.0, 5).unwrap(); // contains 0.25 and 0.75
        let r = check_n2(&scalar(grid, |t| t * (1.0 - t)), &tol);
        assert!(!r.pass);
        // 0 and 1 also collide (both give 0); the first exact collision found wins
        let (i, j) = r.pair.unwrap();
        assert!(r.min_distance < 1e-12);
        assert!((i, j) == (0, 4) || (i, j) == (1, 3));
    }

    #[test]
    fn n2_diag_shift_distance_scan() {
        let tol = ConditionTolerances::default();
        let grid = ParameterGrid::interval(0.0, 1.0, 11).unwrap();
        let r = check_n2(&diag_shift(grid.clone()), &tol);
        assert!(r.pass);
        // brute-force oracle: nearest distinct-sample eigenvalues are one step apart
        let mut best = f64::INFINITY;
        let t = grid.samples();
        for i in 0..t.len() {
            for j in 0..t.len() {
                if i != j {
                    for x in [t[i], t[i] + 3.0] {
                        for y in [t[j], t[j] + 3.0] {
                            best = best.min((x - y).norm());
                        }
                    }
                }
            }
        }
        assert!((r.min_distance - best).abs() < 1e-12);
        assert!((best - 0.1).abs() < 1e-12);
    }

    #[test]
    fn n2_single_sample_passes() {
        let grid = ParameterGrid::from_samples(vec![c64(0.3, 0.0)]).unwrap();
        let r = check_n2(&scalar(grid, |t| t), &ConditionTolerances::default());
        assert!(r.pass);
        assert!(r.pair.is_none());
    }

    #[test]
    fn s1_companion_recovers_a0() {
        let grid = ParameterGrid::interval(0.0, 1.0, 6).unwrap();
        let sys = EnsembleSystem::from_fn(grid.clone(), |t| {
            let mut a = DMatrix::zeros(3, 3);
            a[(0, 1)] = c64(1.0, 0.0);
            a[(1, 2)] = c64(1.0, 0.0);
            a[(2, 0)] = t;
            let mut b = DMatrix::zeros(3, 1);
            b[(2, 0)] = c64(1.0, 0.0);
            (a, b)
        })
        .unwrap();
        let r = check_s1(&sys, &ConditionTolerances::default());
        assert!(r.pass);
        for (a0, t) in r.a0.iter().zip(grid.samples()) {
            assert!((a0 - t).norm() < 1e-14);
        }
        assert!(r.constants.iter().all(|c| c.norm() < 1e-14));
    }

    #[test]
    fn s1_fails_for_diag_shift() {
        let r = check_s1(&diag_shift(ParameterGrid::interval(0.0, 1.0, 5).unwrap()), &ConditionTolerances::default());
        assert!(!r.pass);
        // char poly z^2 - (2θ+3) z + θ(θ+3): a_1 = 2θ + 3 varies by 2 over [0,1]
        assert!((r.max_deviation - 2.0 / 4.0).abs() < 1e-12);
    }

    #[test]
    fn s1_scalar() {
        let grid = ParameterGrid::interval(0.0, 1.0, 4).unwrap();
        let r = check_s1(&scalar(grid.clone(), |t| t), &ConditionTolerances::default());
        assert!(r.pass);
        assert!(r.constants.is_empty());
        assert_eq!(r.a0, grid.samples().to_vec());
    }

    #[test]
    fn s2_examples() {
        let tol = ConditionTolerances::default();
        let r = check_s2(&diag_shift(ParameterGrid::interval(0.0, 1.0, 5).unwrap()), &tol);
        assert!(r.pass);
        assert!((r.min_gap - 3.0).abs() < 1e-12);

        assert!(!check_s2(&constant_system(&[0.0, 1.0, 0.0, 0.0], &[0.0, 1.0]), &tol).pass);

        let grid = ParameterGrid::interval(0.0, 1.0, 5).unwrap();
        let crossing = EnsembleSystem::from_fn(grid, |t| {
            (
                DMatrix::from_row_slice(2, 2, &[t, c64(1.0, 0.0), c64(0.0, 0.0), 1.0 - t]),
                DMatrix::from_row_slice(2, 1, &[c64(0.0, 0.0), c64(1.0, 0.0)]),
            )
        })
        .unwrap();
        let r = check_s2(&crossing, &tol);
        assert!(!r.pass);
        assert_eq!(r.worst_sample(), Some(2));
    }
}
