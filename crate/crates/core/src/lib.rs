//! # nbloc
//!
//! Spectral graph-partitioning toolkit built around eigenvector localization.
//!
//! The crate provides:
//!
//! - [`graph`]: a simple undirected graph with planted-block labels and motif roles.
//! - [`generators`]: sparse two-block stochastic block models, random regular
//!   graphs, block-structured regular graphs, symmetric motif-pair attachment
//!   and triangle-increasing degree-preserving rewiring.
//! - [`spectra`]: matrix-free operators for the adjacency matrix `A`, the
//!   Laplacians `L = D - A` and `D^{-1/2} L D^{-1/2}`, the modularity matrix
//!   `M = (A - k k^T / K) / K` and the `2N x 2N` non-backtracking matrix
//!   `B = [[0, D - I], [-I, A]]`, together with a dense oracle eigensolver and
//!   restarted Krylov solvers (thick-restart Lanczos, Krylov-Schur).
//! - [`analysis`]: inverse participation ratio, sign bisection, overlap with
//!   the planted partition, closed-form eigenvalue predictions and the explicit
//!   localized eigenvector of a doubled motif.
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`, which is what the experiments use.

pub mod analysis;
pub mod error;
pub mod generators;
pub mod graph;
pub mod scalar;
pub mod spectra;

pub use error::{Error, Result};
pub use graph::{Graph, MotifPair, MotifRole};
pub use scalar::Scalar;

/// Complex number over the crate's default scalar.
pub type C64 = num_complex::Complex<f64>;
/// Eigenpair over `f64`.
pub type EigenPair64 = spectra::EigenPair<f64>;
/// Dense matrix over `f64`.
pub type DenseMatrix64 = spectra::DenseMatrix<f64>;
/// Closed-form prediction over `f64`.
pub type Prediction64 = analysis::Prediction<f64>;
/// Localized eigenvector construction over `f64`.
pub type LocalizedVector64 = analysis::LocalizedVector<f64>;
/// Krylov options over `f64`.
pub type KrylovOptions64 = spectra::KrylovOptions<f64>;
