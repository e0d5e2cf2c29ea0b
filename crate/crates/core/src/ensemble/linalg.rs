//! Small dense complex linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::C64;

/// Kalman matrix `[B, AB, …, A^{n-1}B]`.
pub fn kalman_matrix(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    let n = a.nrows();
    let m = b.ncols();
    let mut out = DMatrix::zeros(n, n * m);
    let mut block = b.clone();
    for k in 0..n {
        out.columns_mut(k * m, m).copy_from(&block);
        if k + 1 < n {
            block = a * &block;
        }
    }
    out
}

/// Singular values, largest first.
pub fn singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// The `rank`-th singular value counted from the top (1-based), or zero when
/// the matrix has fewer singular values.
pub fn sigma_at(m: &DMatrix<C64>, rank: usize) -> f64 {
    singular_values(m).get(rank - 1).copied().unwrap_or(0.0)
}

pub fn op_norm(m: &DMatrix<C64>) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Eigenvalues through the complex Schur form.
pub fn eigenvalues(a: &DMatrix<C64>) -> Vec<C64> {
    let n = a.nrows();
    if n == 1 {
        return vec![a[(0, 0)]];
    }
    let schur = nalgebra::linalg::Schur::try_new(a.clone(), f64::EPSILON, 100_000)
        .expect("complex Schur iteration did not converge");
    let (_, t) = schur.unpack();
    (0..n).map(|i| t[(i, i)]).collect()
}

/// Monic characteristic polynomial coefficients `c_0, …, c_n` (ascending,
/// `c_n = 1`) by the Faddeev–LeVerrier recursion.
pub fn char_poly(a: &DMatrix<C64>) -> Vec<C64> {
    let n = a.nrows();
    let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
    coeffs[n] = C64::new(1.0, 0.0);
    let id = DMatrix::<C64>::identity(n, n);
    let mut mk = DMatrix::<C64>::zeros(n, n);
    for k in 1..=n {
        mk = a * &mk + &id * coeffs[n - k + 1];
        let am = a * &mk;
        coeffs[n - k] = -am.trace() / k as f64;
    }
    coeffs
}

/// Unit vector spanning the (numerical) null space of `m`: the right
/// singular vector of the smallest singular value.
pub fn null_vector(m: &DMatrix<C64>) -> DVector<C64> {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .expect("non-empty matrix");
    v_t.row(idx).transpose().map(|z| z.conj())
}

/// Refines an eigenvector by two steps of inverse iteration.
pub fn refine_eigenvector(a: &DMatrix<C64>, lambda: C64, v: DVector<C64>) -> DVector<C64> {
    let n = a.nrows();
    let scale = a.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let shift = lambda + C64::new(scale * 1e-13, 0.0);
    let m = a - DMatrix::<C64>::identity(n, n) * shift;
    let lu = m.lu();
    let mut x = v;
    for _ in 0..2 {
        match lu.solve(&x) {
            Some(y) if y.norm().is_finite() && y.norm() > 0.0 => {
                x = &y / C64::new(y.norm(), 0.0);
            }
            _ => break,
        }
    }
    x
}

/// Gram–Schmidt residual of `v` against an orthonormal list, twice
/// orthogonalized.
pub fn orthogonal_residual(basis: &[DVector<C64>], v: &DVector<C64>) -> DVector<C64> {
    let mut r = v.clone();
    for _ in 0..2 {
        for q in basis {
            let proj = q.dotc(&r);
            r -= q * proj;
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    fn real(rows: usize, data: &[f64]) -> DMatrix<C64> {
        DMatrix::from_row_iterator(rows, data.len() / rows, data.iter().map(|&x| c64(x, 0.0)))
    }

    #[test]
    fn kalman_of_shift() {
        let a = real(2, &[0.0, 1.0, 0.0, 0.0]);
        let b = real(2, &[0.0, 1.0]);
        let k = kalman_matrix(&a, &b);
        assert_eq!(k, real(2, &[0.0, 1.0, 1.0, 0.0]));
    }

    #[test]
    fn char_poly_companion() {
        // z^3 - (2 z^2 - z + 5)
        let a = real(3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 5.0, -1.0, 2.0]);
        let c = char_poly(&a);
        let expect = [-5.0, 1.0, -2.0, 1.0];
        for (x, e) in c.iter().zip(expect) {
            assert!((x - c64(e, 0.0)).norm() < 1e-12, "{c:?}");
        }
    }

    #[test]
    fn eigen_and_null_vector() {
        let a = DMatrix::from_row_slice(2, 2, &[c64(1.0, 1.0), c64(2.0, 0.0), c64(0.0, 0.0), c64(-1.0, 0.5)]);
        let mut ev = eigenvalues(&a);
        ev.sort_by(|x, y| x.re.total_cmp(&y.re));
        assert!((ev[0] - c64(-1.0, 0.5)).norm() < 1e-12);
        assert!((ev[1] - c64(1.0, 1.0)).norm() < 1e-12);
        for l in ev {
            let v = null_vector(&(&a - DMatrix::<C64>::identity(2, 2) * l));
            assert!((&a * &v - &v * l).norm() < 1e-12);
        }
    }
}
