//! Sparse, matrix-free operators for A, L, the normalised Laplacian, the
//! modularity matrix and the 2N x 2N non-backtracking matrix.

use std::fmt;

use num_complex::Complex;
use num_traits::Zero;

use super::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;

/// A real linear operator acting on vectors of length `dim()`.
pub trait MatrixOperator<T: Scalar>: Send + Sync {
    fn dim(&self) -> usize;

    fn is_symmetric(&self) -> bool;

    /// `y = Op x`.
    fn apply(&self, x: &[T], y: &mut [T]);

    /// `y = Op x` for complex `x`; the operator is real, so real and imaginary
    /// parts are mapped separately.
    fn apply_complex(&self, x: &[Complex<T>], y: &mut [Complex<T>]) {
        let n = self.dim();
        let re: Vec<T> = x.iter().map(|z| z.re).collect();
        let im: Vec<T> = x.iter().map(|z| z.im).collect();
        let mut yr = vec![T::zero(); n];
        let mut yi = vec![T::zero(); n];
        self.apply(&re, &mut yr);
        self.apply(&im, &mut yi);
        for (out, (r, i)) in y.iter_mut().zip(yr.into_iter().zip(yi)) {
            *out = Complex::new(r, i);
        }
    }

    fn name(&self) -> &'static str;

    /// Upper bound on the spectral radius (a max absolute row sum).
    fn norm_bound(&self) -> T;

    /// Dense assembly by applying the operator to unit vectors.
    fn to_dense(&self) -> DenseMatrix<T> {
        let n = self.dim();
        let mut out = DenseMatrix::zeros(n, n);
        let mut e = vec![T::zero(); n];
        let mut col = vec![T::zero(); n];
        for c in 0..n {
            e[c] = T::one();
            self.apply(&e, &mut col);
            e[c] = T::zero();
            for (r, v) in col.iter().enumerate() {
                out[(r, c)] = *v;
            }
        }
        out
    }
}

/// Which matrix of the graph to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MatrixKind {
    Adjacency,
    Laplacian,
    NormLaplacian,
    Modularity,
    NonBacktracking,
}

impl MatrixKind {
    pub const ALL: [MatrixKind; 5] = [
        MatrixKind::Adjacency,
        MatrixKind::Laplacian,
        MatrixKind::NormLaplacian,
        MatrixKind::Modularity,
        MatrixKind::NonBacktracking,
    ];

    /// Short name used in output files: `A`, `L`, `NL`, `M`, `B`.
    pub fn short_name(self) -> &'static str {
        match self {
            MatrixKind::Adjacency => "A",
            MatrixKind::Laplacian => "L",
            MatrixKind::NormLaplacian => "NL",
            MatrixKind::Modularity => "M",
            MatrixKind::NonBacktracking => "B",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "A" | "a" | "adjacency" => Ok(MatrixKind::Adjacency),
            "L" | "laplacian" => Ok(MatrixKind::Laplacian),
            "NL" | "nl" | "normalized-laplacian" | "norm-laplacian" => {
                Ok(MatrixKind::NormLaplacian)
            }
            "M" | "m" | "modularity" => Ok(MatrixKind::Modularity),
            "B" | "b" | "non-backtracking" | "nonbacktracking" => Ok(MatrixKind::NonBacktracking),
            other => Err(Error::Input(format!("unknown matrix kind '{other}'"))),
        }
    }
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

/// Compressed sparse rows of the 0/1 adjacency matrix.
#[derive(Debug, Clone)]
struct Csr {
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Csr {
    fn new(g: &Graph) -> Self {
        let mut offsets = Vec::with_capacity(g.node_count() + 1);
        let mut targets = Vec::with_capacity(2 * g.edge_count());
        offsets.push(0);
        for i in 0..g.node_count() {
            targets.extend_from_slice(g.neighbors(i));
            offsets.push(targets.len());
        }
        Csr { offsets, targets }
    }

    fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    fn row_sum<T: Scalar>(&self, i: usize, x: &[T]) -> T {
        self.targets[self.offsets[i]..self.offsets[i + 1]]
            .iter()
            .fold(T::zero(), |s, &j| s + x[j])
    }

    fn max_degree(&self) -> usize {
        self.offsets
            .windows(2)
            .map(|w| w[1] - w[0])
            .max()
            .unwrap_or(0)
    }
}

fn degrees<T: Scalar>(g: &Graph) -> Vec<T> {
    (0..g.node_count())
        .map(|i| T::from_count(g.degree(i)))
        .collect()
}

#[derive(Debug, Clone)]
pub struct Adjacency {
    csr: Csr,
}

impl Adjacency {
    pub fn new(g: &Graph) -> Self {
        Adjacency { csr: Csr::new(g) }
    }
}

impl<T: Scalar> MatrixOperator<T> for Adjacency {
    fn dim(&self) -> usize {
        self.csr.n()
    }
    fn is_symmetric(&self) -> bool {
        true
    }
    fn apply(&self, x: &[T], y: &mut [T]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.csr.row_sum(i, x);
        }
    }
    fn name(&self) -> &'static str {
        "A"
    }
    fn norm_bound(&self) -> T {
        T::from_count(self.csr.max_degree())
    }
}

/// `L = D - A`.
#[derive(Debug, Clone)]
pub struct Laplacian<T> {
    csr: Csr,
    degree: Vec<T>,
}

impl<T: Scalar> Laplacian<T> {
    pub fn new(g: &Graph) -> Self {
        Laplacian {
            csr: Csr::new(g),
            degree: degrees(g),
        }
    }
}

impl<T: Scalar> MatrixOperator<T> for Laplacian<T> {
    fn dim(&self) -> usize {
        self.csr.n()
    }
    fn is_symmetric(&self) -> bool {
        true
    }
    fn apply(&self, x: &[T], y: &mut [T]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.degree[i] * x[i] - self.csr.row_sum(i, x);
        }
    }
    fn name(&self) -> &'static str {
        "L"
    }
    fn norm_bound(&self) -> T {
        T::lit(2.0) * T::from_count(self.csr.max_degree())
    }
}

/// `I - D^{-1/2} A D^{-1/2}`.
#[derive(Debug, Clone)]
pub struct NormLaplacian<T> {
    csr: Csr,
    inv_sqrt_degree: Vec<T>,
}

impl<T: Scalar> NormLaplacian<T> {
    pub fn new(g: &Graph) -> Result<Self> {
        if let Some(i) = (0..g.node_count()).find(|&i| g.degree(i) == 0) {
            return Err(Error::Precondition(format!(
                "normalized Laplacian undefined: node {i} has degree 0"
            )));
        }
        Ok(NormLaplacian {
            csr: Csr::new(g),
            inv_sqrt_degree: degrees::<T>(g)
                .into_iter()
                .map(|d| d.sqrt().recip())
                .collect(),
        })
    }
}

impl<T: Scalar> MatrixOperator<T> for NormLaplacian<T> {
    fn dim(&self) -> usize {
        self.csr.n()
    }
    fn is_symmetric(&self) -> bool {
        true
    }
    fn apply(&self, x: &[T], y: &mut [T]) {
        let s = &self.inv_sqrt_degree;
        for (i, yi) in y.iter_mut().enumerate() {
            let acc = self.csr.targets[self.csr.offsets[i]..self.csr.offsets[i + 1]]
                .iter()
                .fold(T::zero(), |a, &j| a + s[j] * x[j]);
            *yi = x[i] - s[i] * acc;
        }
    }
    fn name(&self) -> &'static str {
        "NL"
    }
    fn norm_bound(&self) -> T {
        T::lit(2.0)
    }
}

/// `M = (A - k k^T / K) / K`, applied without forming the rank-one term.
#[derive(Debug, Clone)]
pub struct Modularity<T> {
    csr: Csr,
    degree: Vec<T>,
    total: T,
}

impl<T: Scalar> Modularity<T> {
    pub fn new(g: &Graph) -> Result<Self> {
        if g.edge_count() == 0 {
            return Err(Error::Precondition(
                "modularity matrix needs at least one edge".into(),
            ));
        }
        Ok(Modularity {
            csr: Csr::new(g),
            degree: degrees(g),
            total: T::from_count(g.total_degree()),
        })
    }
}

impl<T: Scalar> MatrixOperator<T> for Modularity<T> {
    fn dim(&self) -> usize {
        self.csr.n()
    }
    fn is_symmetric(&self) -> bool {
        true
    }
    fn apply(&self, x: &[T], y: &mut [T]) {
        let kx = self
            .degree
            .iter()
            .zip(x)
            .fold(T::zero(), |s, (&k, &v)| s + k * v)
            / self.total;
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = (self.csr.row_sum(i, x) - self.degree[i] * kx) / self.total;
        }
    }
    fn name(&self) -> &'static str {
        "M"
    }
    fn norm_bound(&self) -> T {
        // |A| + |k k^T/K| <= 2 max degree, then divided by K
        T::lit(2.0) * T::from_count(self.csr.max_degree()) / self.total
    }
}

/// The 2N x 2N matrix `[[0, D - I], [-I, A]]` acting on `(x, y)`.
#[derive(Debug, Clone)]
pub struct NonBacktracking<T> {
    csr: Csr,
    degree_minus_one: Vec<T>,
}

impl<T: Scalar> NonBacktracking<T> {
    pub fn new(g: &Graph) -> Result<Self> {
        if let Some(i) = (0..g.node_count()).find(|&i| g.degree(i) == 0) {
            return Err(Error::Precondition(format!(
                "non-backtracking matrix needs min degree 1: node {i} is isolated"
            )));
        }
        Ok(NonBacktracking {
            csr: Csr::new(g),
            degree_minus_one: degrees::<T>(g).into_iter().map(|d| d - T::one()).collect(),
        })
    }

    pub fn node_count(&self) -> usize {
        self.csr.n()
    }
}

impl<T: Scalar> MatrixOperator<T> for NonBacktracking<T> {
    fn dim(&self) -> usize {
        2 * self.csr.n()
    }
    fn is_symmetric(&self) -> bool {
        false
    }
    fn apply(&self, input: &[T], out: &mut [T]) {
        let n = self.csr.n();
        let (x, y) = input.split_at(n);
        let (top, bottom) = out.split_at_mut(n);
        for i in 0..n {
            top[i] = self.degree_minus_one[i] * y[i];
            bottom[i] = self.csr.row_sum(i, y) - x[i];
        }
    }
    fn apply_complex(&self, input: &[Complex<T>], out: &mut [Complex<T>]) {
        let n = self.csr.n();
        let (x, y) = input.split_at(n);
        let (top, bottom) = out.split_at_mut(n);
        for i in 0..n {
            top[i] = y[i] * self.degree_minus_one[i];
            let s = self.csr.targets[self.csr.offsets[i]..self.csr.offsets[i + 1]]
                .iter()
                .fold(Complex::<T>::zero(), |s, &j| s + y[j]);
            bottom[i] = s - x[i];
        }
    }
    fn name(&self) -> &'static str {
        "B"
    }
    fn norm_bound(&self) -> T {
        // rows of the bottom block: one -1 plus deg ones
        T::from_count(self.csr.max_degree() + 1)
    }
}

/// Builds the requested operator for `g`.
pub fn build_operator<T: Scalar>(
    g: &Graph,
    kind: MatrixKind,
) -> Result<Box<dyn MatrixOperator<T>>> {
    Ok(match kind {
        MatrixKind::Adjacency => Box::new(Adjacency::new(g)),
        MatrixKind::Laplacian => Box::new(Laplacian::<T>::new(g)),
        MatrixKind::NormLaplacian => Box::new(NormLaplacian::<T>::new(g)?),
        MatrixKind::Modularity => Box::new(Modularity::<T>::new(g)?),
        MatrixKind::NonBacktracking => Box::new(NonBacktracking::<T>::new(g)?),
    })
}
