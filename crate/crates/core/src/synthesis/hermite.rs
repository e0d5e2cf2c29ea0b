use nalgebra::{DMatrix, DVector};

use super::condition;
use crate::ensemble::linalg::orthogonal_residual;
use crate::{EnsembleSystem, Error, ParameterGrid, Result, C64};

/// Relative size below which a Gram–Schmidt residual counts as dependent.
const RANK_TOL: f64 = 1e-10;

/// Hermite indices of a pair `(A, B)` and, when reachable, the canonical
/// blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteStructure {
    pub indices: Vec<usize>,
    /// Selected columns as `(input column i, power j)` for `A^j b_i`.
    pub selected: Vec<(usize, usize)>,
    /// `(b_1, …, A^{h_1−1}b_1, …)` over the inputs with `h_i > 0`; present
    /// when the pair is reachable.
    pub transform: Option<DMatrix<C64>>,
    /// Diagonal pairs `(Ã_ii, b̃_i)` of the canonical form, one per input
    /// with `h_i > 0`.
    pub blocks: Vec<(DMatrix<C64>, DVector<C64>)>,
}

impl HermiteStructure {
    pub fn rank(&self) -> usize {
        self.indices.iter().sum()
    }

    pub fn is_reachable(&self, n: usize) -> bool {
        self.rank() == n
    }
}

/// Greedy left-to-right selection of independent columns from
/// `(b_1, Ab_1, …, A^{n−1}b_1, …, b_m, …, A^{n−1}b_m)`.
pub fn hermite_indices(a: &DMatrix<C64>, b: &DMatrix<C64>) -> Result<HermiteStructure> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n || b.ncols() == 0 {
        return Err(Error::dim(format!("A is {:?} and B is {:?}", a.shape(), b.shape())));
    }
    let m = b.ncols();
    let mut chains: Vec<Vec<DVector<C64>>> = Vec::with_capacity(m);
    let mut scale: f64 = 0.0;
    for i in 0..m {
        let mut v = b.column(i).into_owned();
        let mut chain = Vec::with_capacity(n);
        for _ in 0..n {
            scale = scale.max(v.norm());
            chain.push(v.clone());
            v = a * v;
        }
        chains.push(chain);
    }
    let floor = RANK_TOL * scale.max(f64::MIN_POSITIVE);

    let mut basis: Vec<DVector<C64>> = Vec::with_capacity(n);
    let mut selected = Vec::new();
    let mut indices = vec![0; m];
    for (i, chain) in chains.iter().enumerate() {
        for (j, v) in chain.iter().enumerate() {
            if basis.len() == n {
                break;
            }
            let r = orthogonal_residual(&basis, v);
            let norm = r.norm();
            if norm > floor {
                basis.push(r / C64::new(norm, 0.0));
                selected.push((i, j));
                indices[i] += 1;
            }
        }
    }

    let mut transform = None;
    let mut blocks = Vec::new();
    if selected.len() == n {
        let cols: Vec<DVector<C64>> = selected.iter().map(|&(i, j)| chains[i][j].clone()).collect();
        let t = DMatrix::from_columns(&cols);
        if let Some(t_inv) = t.clone().try_inverse() {
            let at = &t_inv * a * &t;
            let bt = &t_inv * b;
            let mut offset = 0;
            for (i, &h) in indices.iter().enumerate() {
                if h == 0 {
                    continue;
                }
                let block = at.view((offset, offset), (h, h)).into_owned();
                let col = bt.view((offset, i), (h, 1)).column(0).into_owned();
                blocks.push((block, col));
                offset += h;
            }
            transform = Some(t);
        }
    }
    Ok(HermiteStructure { indices, selected, transform, blocks })
}

/// Hermite structure at every sample of a multi-input ensemble.
#[derive(Debug, Clone)]
pub struct HermiteDecomposition {
    pub structures: Vec<HermiteStructure>,
    pub indices: Vec<usize>,
    pub reachable: bool,
    /// Single-input ensembles `(Ã_ii(θ), b̃_i(θ))` for every input with a
    /// nonzero index; empty unless the pair is reachable on the grid.
    pub subsystems: Vec<EnsembleSystem>,
}

/// Computes the Hermite structure along the grid and splits the ensemble
/// into its diagonal single-input subpairs.
///
/// Fails when the index tuple changes between samples.
pub fn hermite_decompose(sys: &EnsembleSystem) -> Result<HermiteDecomposition> {
    if sys.input_dim() < 2 {
        return Err(Error::dim("hermite_decompose needs at least two inputs"));
    }
    let structures = (0..sys.len()).map(|i| hermite_indices(sys.a(i), sys.b(i))).collect::<Result<Vec<_>>>()?;
    let indices = structures[0].indices.clone();
    if let Some(i) = structures.iter().position(|s| s.indices != indices) {
        return Err(condition(
            "hermite_indices",
            format!("indices {:?} at sample {i} differ from {:?} at sample 0", structures[i].indices, indices),
        ));
    }
    let n = sys.state_dim();
    let reachable = structures.iter().all(|s| s.is_reachable(n) && s.transform.is_some());
    let mut subsystems = Vec::new();
    if reachable {
        let grid: ParameterGrid = sys.grid().clone();
        for block in 0..structures[0].blocks.len() {
            let a = structures.iter().map(|s| s.blocks[block].0.clone()).collect();
            let b = structures
                .iter()
                .map(|s| {
                    let col = &s.blocks[block].1;
                    DMatrix::from_column_slice(col.len(), 1, col.as_slice())
                })
                .collect();
            subsystems.push(EnsembleSystem::new(grid.clone(), a, b)?);
        }
    }
    Ok(HermiteDecomposition { structures, indices, reachable, subsystems })
}
