use std::path::Path;

use nalgebra::{DMatrix, DVector};
use ensreach::{ArcKind, EnsembleSystem, ParameterGrid, TargetFamily, C64};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Complex number as `[re, im]`.
pub type Pair = [f64; 2];

fn complex(p: &Pair) -> C64 {
    C64::new(p[0], p[1])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeKind {
    #[default]
    Discrete,
    Continuous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Parameter {
    Interval { a: f64, b: f64, samples: usize },
    List { values: Vec<Pair> },
}

/// One matrix or target entry as a function of θ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Constant(Pair),
    /// Coefficients of `c_0 + c_1 θ + c_2 θ² + …`.
    Poly { poly: Vec<Pair> },
    /// One value per grid sample.
    Samples { samples: Vec<Pair> },
}

impl Entry {
    fn is_tabulated(&self) -> bool {
        matches!(self, Entry::Samples { .. })
    }

    fn eval(&self, i: usize, theta: C64, what: &str) -> Result<C64, CliError> {
        match self {
            Entry::Constant(c) => Ok(complex(c)),
            Entry::Poly { poly } => Ok(poly.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * theta + complex(c))),
            Entry::Samples { samples } => samples
                .get(i)
                .map(complex)
                .ok_or_else(|| CliError::Parse(format!("{what} has {} samples, the grid needs more", samples.len()))),
        }
    }

    fn check_len(&self, count: usize, what: &str) -> Result<(), CliError> {
        match self {
            Entry::Samples { samples } if samples.len() != count => Err(CliError::Parse(format!(
                "{what} has {} samples but the grid has {count}",
                samples.len()
            ))),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub n: usize,
    pub m: usize,
    #[serde(default)]
    pub time: TimeKind,
    pub parameter: Parameter,
    #[serde(rename = "A")]
    pub a: Vec<Vec<Entry>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<Entry>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    pub components: Vec<Entry>,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

impl SystemSpec {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let spec: Self = read_json(path)?;
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.n == 0 || self.m == 0 {
            return Err(CliError::Parse("n and m must be positive".into()));
        }
        let shape_ok = |rows: &Vec<Vec<Entry>>, cols: usize| rows.len() == self.n && rows.iter().all(|r| r.len() == cols);
        if !shape_ok(&self.a, self.n) {
            return Err(CliError::Parse(format!("A must be {0}×{0}", self.n)));
        }
        if !shape_ok(&self.b, self.m) {
            return Err(CliError::Parse(format!("B must be {}×{}", self.n, self.m)));
        }
        Ok(())
    }

    fn entries(&self) -> impl Iterator<Item = &Entry> {
        self.a.iter().chain(&self.b).flatten()
    }

    /// Synthesis grid, with the sample count replaced by `grid` when given.
    pub fn grid(&self, grid: Option<usize>) -> Result<ParameterGrid, CliError> {
        if grid.is_some() && !self.is_polynomial() {
            return Err(CliError::Usage("--grid cannot resample per-sample tables".into()));
        }
        let parsed = match (&self.parameter, grid) {
            (Parameter::Interval { a, b, samples }, g) => ParameterGrid::interval(*a, *b, g.unwrap_or(*samples)),
            (Parameter::List { values }, None) => ParameterGrid::from_samples(values.iter().map(complex).collect()),
            (Parameter::List { .. }, Some(_)) => {
                return Err(CliError::Usage("--grid needs an interval parameter".into()));
            }
        };
        parsed.map_err(|e| CliError::Parse(e.to_string()))
    }

    /// Whether the system can be evaluated off its own grid.
    pub fn is_polynomial(&self) -> bool {
        !self.entries().any(Entry::is_tabulated)
    }

    pub fn evaluate(&self, grid: &ParameterGrid) -> Result<EnsembleSystem, CliError> {
        for (r, row) in self.a.iter().enumerate() {
            for (c, e) in row.iter().enumerate() {
                e.check_len(grid.len(), &format!("A[{r}][{c}]"))?;
            }
        }
        for (r, row) in self.b.iter().enumerate() {
            for (c, e) in row.iter().enumerate() {
                e.check_len(grid.len(), &format!("B[{r}][{c}]"))?;
            }
        }
        let matrix = |rows: &Vec<Vec<Entry>>, i: usize, theta: C64, name: &str| -> Result<DMatrix<C64>, CliError> {
            let ncols = rows[0].len();
            let mut out = DMatrix::zeros(rows.len(), ncols);
            for (r, row) in rows.iter().enumerate() {
                for (c, e) in row.iter().enumerate() {
                    out[(r, c)] = e.eval(i, theta, &format!("{name}[{r}][{c}]"))?;
                }
            }
            Ok(out)
        };
        let mut a = Vec::with_capacity(grid.len());
        let mut b = Vec::with_capacity(grid.len());
        for (i, &theta) in grid.samples().iter().enumerate() {
            a.push(matrix(&self.a, i, theta, "A")?);
            b.push(matrix(&self.b, i, theta, "B")?);
        }
        EnsembleSystem::new(grid.clone(), a, b).map_err(|e| CliError::Parse(e.to_string()))
    }
}

impl TargetSpec {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        read_json(path)
    }

    pub fn is_polynomial(&self) -> bool {
        !self.components.iter().any(Entry::is_tabulated)
    }

    pub fn evaluate(&self, grid: &ParameterGrid, n: usize) -> Result<TargetFamily, CliError> {
        if self.components.len() != n {
            return Err(CliError::Parse(format!("target has {} components, system has n = {n}", self.components.len())));
        }
        for (k, e) in self.components.iter().enumerate() {
            e.check_len(grid.len(), &format!("target component {k}"))?;
        }
        let values = grid
            .samples()
            .iter()
            .enumerate()
            .map(|(i, &theta)| {
                let v = self
                    .components
                    .iter()
                    .enumerate()
                    .map(|(k, e)| e.eval(i, theta, &format!("target component {k}")))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(DVector::from_vec(v))
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        TargetFamily::new(values).map_err(|e| CliError::Parse(e.to_string()))
    }
}

/// Interleaved grid for measuring, when both files can be evaluated on it.
pub fn validation_grid(sys: &SystemSpec, target: &TargetSpec, grid: &ParameterGrid) -> Option<ParameterGrid> {
    (grid.kind() == ArcKind::RealInterval && sys.is_polynomial() && target.is_polynomial()).then(|| grid.interleaved())
}
