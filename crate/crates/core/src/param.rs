//! Parameter and observation types shared by every module.

use std::fmt;
use std::marker::PhantomData;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Largest tolerated `|a_ij - a_ji|`, relative to the entry magnitude, before a
/// matrix is rejected as asymmetric.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

/// Dense row-major symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Builds from row-major data, averaging with the transpose. Rejects
    /// non-finite entries and asymmetry above [`SYMMETRY_TOLERANCE`].
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::ShapeMismatch(format!(
                "expected {}x{} matrix, got {} entries",
                dim,
                dim,
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::ShapeMismatch("matrix has non-finite entries".into()));
        }
        let mut m = SymMatrix { dim, data };
        for i in 0..dim {
            for j in (i + 1)..dim {
                let (a, b) = (m.get(i, j), m.get(j, i));
                let scale = 1f64.max(a.abs()).max(b.abs());
                if (a - b).abs() > SYMMETRY_TOLERANCE * scale {
                    return Err(Error::ShapeMismatch(format!(
                        "matrix not symmetric at ({i},{j}): {a} vs {b}"
                    )));
                }
                m.set_symmetric(i, j, 0.5 * (a + b));
            }
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::ShapeMismatch("matrix rows must form a square".into()));
        }
        Self::new(dim, rows.concat())
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1.0;
        }
        SymMatrix { dim, data }
    }

    /// Symmetrizes an nalgebra matrix unconditionally (for computed results).
    pub(crate) fn from_dmatrix(m: &DMatrix<f64>) -> Self {
        let dim = m.nrows();
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                data[i * dim + j] = 0.5 * (m[(i, j)] + m[(j, i)]);
            }
        }
        SymMatrix { dim, data }
    }

    pub(crate) fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set_symmetric(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
        self.data[j * self.dim + i] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim.max(1)).map(<[f64]>::to_vec).collect()
    }

    /// `tr(AᵀB)`.
    pub fn frobenius_dot(&self, other: &SymMatrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        SymMatrix { dim: self.dim, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    fn zip_with(&self, other: &SymMatrix, f: impl Fn(f64, f64) -> f64) -> Self {
        SymMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }
}

/// Marker for natural coordinates θ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Natural {}

/// Marker for expectation coordinates η = ∇F(θ) = E[t(x)].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expectation {}

/// Composite parameter: a vector part plus an optional symmetric matrix part.
///
/// The inner product is `⟨a, b⟩ = vᵀv' + tr(MᵀM')`.
#[derive(Debug, Clone, PartialEq)]
pub struct Coords<K> {
    vector: Vec<f64>,
    matrix: Option<SymMatrix>,
    kind: PhantomData<K>,
}

pub type NaturalParam = Coords<Natural>;
pub type ExpectationParam = Coords<Expectation>;

impl<K> Coords<K> {
    pub fn new(vector: Vec<f64>, matrix: Option<SymMatrix>) -> Self {
        Coords { vector, matrix, kind: PhantomData }
    }

    pub fn scalar(x: f64) -> Self {
        Self::new(vec![x], None)
    }

    pub fn from_vec(v: Vec<f64>) -> Self {
        Self::new(v, None)
    }

    pub fn vector(&self) -> &[f64] {
        &self.vector
    }

    pub fn matrix(&self) -> Option<&SymMatrix> {
        self.matrix.as_ref()
    }

    pub(crate) fn matrix_mut(&mut self) -> Option<&mut SymMatrix> {
        self.matrix.as_mut()
    }

    pub(crate) fn vector_mut(&mut self) -> &mut [f64] {
        &mut self.vector
    }

    /// First vector component; the whole parameter for scalar families.
    pub fn first(&self) -> f64 {
        self.vector[0]
    }

    /// Number of scalar coordinates (`d_v + d_m²`).
    pub fn order(&self) -> usize {
        self.vector.len() + self.matrix.as_ref().map_or(0, |m| m.dim * m.dim)
    }

    pub fn same_shape<L>(&self, other: &Coords<L>) -> bool {
        self.vector.len() == other.vector.len()
            && self.matrix.as_ref().map(SymMatrix::dim) == other.matrix.as_ref().map(SymMatrix::dim)
    }

    /// Composite inner product. Both sides must have the same shape.
    pub fn dot<L>(&self, other: &Coords<L>) -> f64 {
        debug_assert!(self.same_shape(other));
        let v: f64 = self.vector.iter().zip(&other.vector).map(|(a, b)| a * b).sum();
        let m = match (&self.matrix, &other.matrix) {
            (Some(a), Some(b)) => a.frobenius_dot(b),
            _ => 0.0,
        };
        v + m
    }

    pub fn scaled(&self, a: f64) -> Self {
        Coords::new(
            self.vector.iter().map(|x| a * x).collect(),
            self.matrix.as_ref().map(|m| m.map(|x| a * x)),
        )
    }

    /// `a·self + b·other`.
    pub fn affine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if !self.same_shape(other) {
            return Err(Error::ShapeMismatch("parameters have different shapes".into()));
        }
        Ok(Coords::new(
            self.vector.iter().zip(&other.vector).map(|(x, y)| a * x + b * y).collect(),
            match (&self.matrix, &other.matrix) {
                (Some(m), Some(n)) => Some(m.zip_with(n, |x, y| a * x + b * y)),
                _ => None,
            },
        ))
    }

    /// `α·self + (1-α)·other`.
    pub fn mix(&self, alpha: f64, other: &Self) -> Result<Self> {
        self.affine(alpha, other, 1.0 - alpha)
    }

    /// Vector part followed by the row-major matrix part.
    pub fn coordinates(&self) -> Vec<f64> {
        let mut out = self.vector.clone();
        if let Some(m) = &self.matrix {
            out.extend_from_slice(m.as_slice());
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coordinates()
            .iter()
            .zip(other.coordinates())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coordinates().iter().all(|x| x.is_finite())
    }
}

/// The implemented exponential families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Exponential,
    Poisson,
    Bernoulli,
    Gaussian,
    MultivariateGaussian { dim: usize },
    CenteredLaplacian,
}

impl Family {
    /// The univariate families plus bivariate Gaussian, in a fixed order.
    pub const REPRESENTATIVES: [Family; 6] = [
        Family::Exponential,
        Family::Poisson,
        Family::Bernoulli,
        Family::Gaussian,
        Family::MultivariateGaussian { dim: 2 },
        Family::CenteredLaplacian,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Family::Exponential => "exponential",
            Family::Poisson => "poisson",
            Family::Bernoulli => "bernoulli",
            Family::Gaussian => "gaussian",
            Family::MultivariateGaussian { .. } => "mvn",
            Family::CenteredLaplacian => "laplacian",
        }
    }

    /// Dimension of the natural parameter space.
    pub fn order(&self) -> usize {
        match self {
            Family::Gaussian => 2,
            Family::MultivariateGaussian { dim } => dim + dim * dim,
            _ => 1,
        }
    }

    /// Dimension of one observation.
    pub fn sample_dim(&self) -> usize {
        match self {
            Family::MultivariateGaussian { dim } => *dim,
            _ => 1,
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, Family::Poisson | Family::Bernoulli)
    }

    /// Whether the carrier term k(x) is non-zero.
    pub fn has_carrier(&self) -> bool {
        matches!(self, Family::Poisson)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::MultivariateGaussian { dim } => write!(f, "mvn(d={dim})"),
            other => f.write_str(other.name()),
        }
    }
}

/// User-facing parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceParam {
    Exponential { rate: f64 },
    Poisson { rate: f64 },
    Bernoulli { p: f64 },
    Gaussian { mu: f64, var: f64 },
    MultivariateGaussian { mu: Vec<f64>, sigma: SymMatrix },
    CenteredLaplacian { scale: f64 },
}

impl SourceParam {
    /// The family this parameterization belongs to.
    pub fn family(&self) -> Family {
        match self {
            SourceParam::Exponential { .. } => Family::Exponential,
            SourceParam::Poisson { .. } => Family::Poisson,
            SourceParam::Bernoulli { .. } => Family::Bernoulli,
            SourceParam::Gaussian { .. } => Family::Gaussian,
            SourceParam::MultivariateGaussian { mu, .. } => {
                Family::MultivariateGaussian { dim: mu.len() }
            }
            SourceParam::CenteredLaplacian { .. } => Family::CenteredLaplacian,
        }
    }

    /// Largest relative deviation between two parameterizations of the same family.
    pub fn max_rel_diff(&self, other: &SourceParam) -> f64 {
        let flat = |s: &SourceParam| -> Vec<f64> {
            match s {
                SourceParam::Exponential { rate } | SourceParam::Poisson { rate } => vec![*rate],
                SourceParam::Bernoulli { p } => vec![*p],
                SourceParam::Gaussian { mu, var } => vec![*mu, *var],
                SourceParam::MultivariateGaussian { mu, sigma } => {
                    let mut v = mu.clone();
                    v.extend_from_slice(sigma.as_slice());
                    v
                }
                SourceParam::CenteredLaplacian { scale } => vec![*scale],
            }
        };
        let (a, b) = (flat(self), flat(other));
        if a.len() != b.len() || self.family() != other.family() {
            return f64::INFINITY;
        }
        a.iter()
            .zip(&b)
            .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(1e-300))
            .map(|r| if r.is_nan() { 0.0 } else { r })
            .fold(0.0, f64::max)
    }
}

/// One observation from a family's sample space.
#[derive(Debug, Clone, PartialEq)]
pub enum Observation {
    /// Exact non-negative integer (Poisson, Bernoulli).
    Count(u64),
    Real(f64),
    Vector(Vec<f64>),
}

impl Observation {
    /// The observation as real coordinates.
    pub fn to_reals(&self) -> Vec<f64> {
        match self {
            Observation::Count(k) => vec![*k as f64],
            Observation::Real(x) => vec![*x],
            Observation::Vector(v) => v.clone(),
        }
    }
}
