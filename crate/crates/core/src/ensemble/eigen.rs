use nalgebra::{DMatrix, DVector};

use super::linalg::{eigenvalues, null_vector, op_norm, refine_eigenvector};
use super::{EnsembleSystem, TargetFamily};
use crate::{Error, Result, C64};

/// Two eigenvalue assignments whose total displacement differs by less than
/// this are treated as a tie.
const MATCH_TIE_TOL: f64 = 1e-12;
/// Relative size below which an eigen-coordinate of `b` counts as zero.
const SCALING_TOL: f64 = 1e-8;
const BRUTE_FORCE_MAX_DIM: usize = 7;

/// Diagonalizing coordinates along the grid.
///
/// For each sample, `A(θ_i) T(θ_i) = T(θ_i) diag(λ_1(θ_i), …, λ_n(θ_i))` and
/// `T(θ_i)^{-1} b(θ_i)` is the all-ones vector. The eigenvalue arcs
/// `λ_k` are continuity-matched from one sample to the next.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    lambda: Vec<Vec<C64>>,
    t: Vec<DMatrix<C64>>,
    t_norm: f64,
}

impl EigenDecomposition {
    /// Samples of the `k`-th eigenvalue arc.
    pub fn lambda(&self, k: usize) -> &[C64] {
        &self.lambda[k]
    }

    pub fn arcs(&self) -> &[Vec<C64>] {
        &self.lambda
    }

    pub fn t(&self, i: usize) -> &DMatrix<C64> {
        &self.t[i]
    }

    /// `max_i ‖T(θ_i)‖₂`.
    pub fn t_norm(&self) -> f64 {
        self.t_norm
    }

    pub fn state_dim(&self) -> usize {
        self.lambda.len()
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// `g(θ_i) = T(θ_i)^{-1} f(θ_i)`.
    pub fn transformed_target(&self, f: &TargetFamily) -> Result<Vec<DVector<C64>>> {
        if f.len() != self.len() || f.dim() != self.state_dim() {
            return Err(Error::dim("target does not match the decomposition"));
        }
        self.t
            .iter()
            .zip(f.values())
            .enumerate()
            .map(|(i, (t, fi))| {
                t.clone()
                    .lu()
                    .solve(fi)
                    .ok_or_else(|| Error::Condition { check: "N1", detail: format!("T is singular at sample {i}") })
            })
            .collect()
    }

    /// Largest `‖A T − T Λ‖₂` and `‖T^{-1} b − 𝟙‖₂` over the grid.
    pub fn residuals(&self, sys: &EnsembleSystem) -> (f64, f64) {
        let n = self.state_dim();
        let ones = DVector::from_element(n, C64::new(1.0, 0.0));
        let mut eig_res: f64 = 0.0;
        let mut b_res: f64 = 0.0;
        for i in 0..self.len() {
            let t = &self.t[i];
            let lam = DMatrix::from_diagonal(&DVector::from_iterator(n, (0..n).map(|k| self.lambda[k][i])));
            eig_res = eig_res.max(op_norm(&(sys.a(i) * t - t * lam)));
            if let Some(c) = t.clone().lu().solve(&sys.b_col(i)) {
                b_res = b_res.max((c - &ones).norm());
            } else {
                b_res = f64::INFINITY;
            }
        }
        (eig_res, b_res)
    }
}

/// Diagonalizes a single-input system sample by sample.
///
/// Eigenvector columns are scaled so `T^{-1} b = 𝟙`; eigenvalues at
/// `θ_{i+1}` are assigned to the arcs by the matching that minimizes the
/// total displacement from `θ_i`.
pub fn eigendecompose_continuous(sys: &EnsembleSystem) -> Result<EigenDecomposition> {
    sys.require_single_input("eigendecompose_continuous")?;
    let n = sys.state_dim();
    let mut lambda: Vec<Vec<C64>> = vec![Vec::with_capacity(sys.len()); n];
    let mut t_mats = Vec::with_capacity(sys.len());
    let mut t_norm: f64 = 0.0;
    let mut prev: Option<Vec<C64>> = None;

    for i in 0..sys.len() {
        let a = sys.a(i);
        let mut ev = eigenvalues(a);
        match &prev {
            None => ev.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im))),
            Some(p) => {
                let perm = match_to_previous(p, &ev).ok_or(Error::AmbiguousMatching { sample: i - 1, next: i })?;
                ev = perm.iter().map(|&j| ev[j]).collect();
            }
        }

        let id = DMatrix::<C64>::identity(n, n);
        let columns: Vec<DVector<C64>> = ev
            .iter()
            .map(|&l| refine_eigenvector(a, l, null_vector(&(a - &id * l))))
            .collect();
        let v = DMatrix::from_columns(&columns);
        let b = sys.b_col(i);
        let coords = v.clone().lu().solve(&b).ok_or_else(|| Error::Condition {
            check: "N1",
            detail: format!("eigenvectors are dependent at sample {i}"),
        })?;
        let floor = SCALING_TOL * b.norm().max(f64::MIN_POSITIVE);
        if let Some(k) = coords.iter().position(|c| c.norm() <= floor) {
            return Err(Error::Condition {
                check: "N1",
                detail: format!("b has no component along eigenvector {k} at sample {i}"),
            });
        }
        let t = v * DMatrix::from_diagonal(&coords);
        t_norm = t_norm.max(op_norm(&t));
        for (k, l) in ev.iter().enumerate() {
            lambda[k].push(*l);
        }
        t_mats.push(t);
        prev = Some(ev);
    }
    Ok(EigenDecomposition { lambda, t: t_mats, t_norm })
}

/// Permutation `perm` with `next[perm[k]]` assigned to arc `k`, or `None`
/// on a tie.
fn match_to_previous(prev: &[C64], next: &[C64]) -> Option<Vec<usize>> {
    let n = prev.len();
    if n == 1 {
        return Some(vec![0]);
    }
    if n > BRUTE_FORCE_MAX_DIM {
        return greedy_match(prev, next);
    }
    let mut best = (f64::INFINITY, Vec::new());
    let mut second = f64::INFINITY;
    let mut perm: Vec<usize> = (0..n).collect();
    permutations(&mut perm, 0, &mut |p| {
        let cost: f64 = p.iter().enumerate().map(|(k, &j)| (prev[k] - next[j]).norm()).sum();
        if cost < best.0 {
            second = best.0;
            best = (cost, p.to_vec());
        } else if cost < second {
            second = cost;
        }
    });
    (second - best.0 > MATCH_TIE_TOL).then_some(best.1)
}

fn permutations(p: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, visit);
        p.swap(k, i);
    }
}

fn greedy_match(prev: &[C64], next: &[C64]) -> Option<Vec<usize>> {
    let mut used = vec![false; next.len()];
    let mut perm = Vec::with_capacity(prev.len());
    for p in prev {
        let mut cands: Vec<(f64, usize)> = next
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, q)| ((p - q).norm(), j))
            .collect();
        cands.sort_by(|x, y| x.0.total_cmp(&y.0));
        if cands.len() > 1 && cands[1].0 - cands[0].0 <= MATCH_TIE_TOL {
            return None;
        }
        used[cands[0].1] = true;
        perm.push(cands[0].1);
    }
    Some(perm)
}
