//! Graph matrices and eigensolvers.

pub mod dense;
mod krylov;
mod operators;

use num_complex::Complex;
use num_traits::Zero;

pub use dense::DenseMatrix;
pub use krylov::{topk_eigs, topk_eigs_report, EigsReport, KrylovOptions, Which};
pub use operators::{
    build_operator, Adjacency, Laplacian, MatrixKind, MatrixOperator, Modularity, NonBacktracking,
    NormLaplacian,
};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;

/// Largest operator dimension `dense_eig` accepts by default.
pub const DENSE_CAP: usize = 3000;

/// Default `|Im mu| / max(1, |mu|)` below which an eigenvalue counts as real.
pub const IMAG_TOL: f64 = 1e-8;

/// An eigenvalue with a unit right eigenvector and its residual
/// `|Op v - value v|`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair<T> {
    pub value: Complex<T>,
    pub vector: Vec<Complex<T>>,
    pub residual: T,
}

impl<T: Scalar> EigenPair<T> {
    pub fn is_real(&self, imag_tol: T) -> bool {
        self.value.im.abs() <= imag_tol * self.value.norm().max(T::one())
    }

    /// Real parts of the vector, or `None` if any imaginary part exceeds
    /// `tol` relative to the largest entry.
    pub fn real_vector(&self, tol: T) -> Option<Vec<T>> {
        real_parts(&self.vector, tol)
    }
}

pub(crate) fn real_parts<T: Scalar>(v: &[Complex<T>], tol: T) -> Option<Vec<T>> {
    let big = v.iter().fold(T::zero(), |m, z| m.max(z.norm()));
    v.iter()
        .map(|z| (z.im.abs() <= tol * big).then_some(z.re))
        .collect()
}

/// Rotates `v` so its largest-modulus entry is real and positive.
pub fn align_phase<T: Scalar>(v: &mut [Complex<T>]) {
    let Some(pivot) = v
        .iter()
        .copied()
        .reduce(|a, b| if b.norm() > a.norm() { b } else { a })
    else {
        return;
    };
    if pivot.norm() == T::zero() {
        return;
    }
    let phase = pivot.conj() / pivot.norm();
    v.iter_mut().for_each(|z| *z *= phase);
}

/// Every eigenpair of `op` from a dense decomposition, capped at [`DENSE_CAP`].
///
/// Symmetric operators come back in ascending order with real vectors; others
/// by descending real part, then descending imaginary part.
pub fn dense_eig<T: Scalar>(op: &dyn MatrixOperator<T>) -> Result<Vec<EigenPair<T>>> {
    dense_eig_capped(op, DENSE_CAP)
}

pub fn dense_eig_capped<T: Scalar>(
    op: &dyn MatrixOperator<T>,
    cap: usize,
) -> Result<Vec<EigenPair<T>>> {
    let n = op.dim();
    if n > cap {
        return Err(Error::Resource(format!(
            "dense eigensolver capped at dimension {cap}, operator has {n}"
        )));
    }
    let a = op.to_dense();
    let mut pairs = Vec::with_capacity(n);
    if op.is_symmetric() {
        let (values, vectors) = dense::symmetric_eig(&a)?;
        for (c, &value) in values.iter().enumerate() {
            let v = vectors
                .column(c)
                .into_iter()
                .map(|x| Complex::new(x, T::zero()))
                .collect();
            pairs.push(with_residual(op, Complex::new(value, T::zero()), v));
        }
    } else {
        let (values, vectors) = dense::general_eig(&a)?;
        for (c, &value) in values.iter().enumerate() {
            pairs.push(with_residual(op, value, vectors.column(c)));
        }
        pairs.sort_by(|p, q| {
            q.value
                .re
                .partial_cmp(&p.value.re)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(
                    q.value
                        .im
                        .partial_cmp(&p.value.im)
                        .unwrap_or(std::cmp::Ordering::Equal),
                )
        });
    }
    Ok(pairs)
}

fn with_residual<T: Scalar>(
    op: &dyn MatrixOperator<T>,
    value: Complex<T>,
    vector: Vec<Complex<T>>,
) -> EigenPair<T> {
    let mut y = vec![Complex::zero(); vector.len()];
    op.apply_complex(&vector, &mut y);
    let residual = y
        .iter()
        .zip(&vector)
        .map(|(a, b)| (a - value * b).norm_sqr())
        .sum::<T>()
        .sqrt();
    EigenPair {
        value,
        vector,
        residual,
    }
}

/// Pairs with `|Im mu| <= imag_tol * max(1, |mu|)`, by descending real part.
pub fn real_filter<T: Scalar>(pairs: Vec<EigenPair<T>>, imag_tol: T) -> Vec<EigenPair<T>> {
    let mut kept: Vec<EigenPair<T>> = pairs.into_iter().filter(|p| p.is_real(imag_tol)).collect();
    kept.sort_by(|p, q| {
        q.value
            .re
            .partial_cmp(&p.value.re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    kept
}

/// How [`largest_real_eigs`] looks for real eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum RealSearch {
    /// The `k + 2` eigenvalues of largest real part, real ones kept.
    #[default]
    RealPart,
    /// The `k' = max(2k, 20)` eigenvalues of largest magnitude, real ones
    /// kept, doubling `k'` up to 200 until `k` real ones turn up.
    Magnitude,
}

impl RealSearch {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "real-part" | "real" => Ok(RealSearch::RealPart),
            "magnitude" => Ok(RealSearch::Magnitude),
            other => Err(Error::Input(format!(
                "unknown real-eigenvalue search '{other}'"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RealSearch::RealPart => "real-part",
            RealSearch::Magnitude => "magnitude",
        }
    }
}

/// Batch cap for [`RealSearch::Magnitude`].
pub const BATCH_CAP: usize = 200;

/// Result of a real-eigenvalue search.
#[derive(Debug, Clone)]
pub struct RealEigs<T> {
    /// At most `k` real pairs, by descending value.
    pub real: Vec<EigenPair<T>>,
    /// Every pair the last solve returned, by descending real part.
    pub ranked: Vec<EigenPair<T>>,
}

/// The `k` largest real eigenpairs of a nonsymmetric operator, or fewer if
/// the searched part of the spectrum holds fewer.
pub fn largest_real_eigs<T: Scalar>(
    op: &dyn MatrixOperator<T>,
    k: usize,
    imag_tol: T,
    search: RealSearch,
    opts: &KrylovOptions<T>,
) -> Result<RealEigs<T>> {
    let n = op.dim();
    if k == 0 || k >= n {
        return Err(Error::Parameter(format!(
            "need 0 < k < dim, got k={k}, dim={n}"
        )));
    }
    let (which, mut batch) = match search {
        RealSearch::RealPart => (Which::LargestReal, (k + 2).min(n - 1)),
        RealSearch::Magnitude => (Which::LargestMagnitude, (2 * k).max(20).min(n - 1)),
    };
    loop {
        let local = match search {
            RealSearch::RealPart => *opts,
            RealSearch::Magnitude => KrylovOptions {
                subspace: Some(opts.subspace.unwrap_or(4 * batch).max(batch + 2).min(n)),
                ..*opts
            },
        };
        let mut ranked = topk_eigs(op, batch, which, &local)?;
        ranked.sort_by(|p, q| {
            q.value
                .re
                .partial_cmp(&p.value.re)
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut real = real_filter(ranked.clone(), imag_tol);
        let capped = search == RealSearch::RealPart || batch >= BATCH_CAP.min(n - 1);
        if real.len() >= k || capped {
            real.truncate(k);
            return Ok(RealEigs { real, ranked });
        }
        batch = (2 * batch).min(BATCH_CAP).min(n - 1);
    }
}

/// The node part of a non-backtracking eigenpair: the second block of the
/// `2N` vector, unit-normalised with its largest entry real and positive.
pub fn nb_node_part<T: Scalar>(pair: &EigenPair<T>) -> Result<Vec<Complex<T>>> {
    let len = pair.vector.len();
    if !len.is_multiple_of(2) {
        return Err(Error::Input(format!("vector length {len} is not 2N")));
    }
    let mut y = pair.vector[len / 2..].to_vec();
    let norm = y.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    let total = pair.vector.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    if norm <= T::epsilon() * total.max(T::min_positive_value()) {
        return Err(Error::Degenerate(
            "node block of the eigenvector vanishes".into(),
        ));
    }
    y.iter_mut().for_each(|z| *z /= norm);
    align_phase(&mut y);
    Ok(y)
}

/// `|(mu^2 I - mu A + D - I) v| / |v|`, the node-space form of the
/// non-backtracking eigenvalue equation.
pub fn ihara_residual<T: Scalar>(g: &Graph, mu: Complex<T>, v: &[Complex<T>]) -> T {
    let one = T::one();
    let mut acc = T::zero();
    for i in 0..g.node_count() {
        let av = g
            .neighbors(i)
            .iter()
            .fold(Complex::<T>::zero(), |s, &j| s + v[j]);
        let d = T::from_count(g.degree(i)) - one;
        let r = v[i] * (mu * mu) - av * mu + v[i] * d;
        acc += r.norm_sqr();
    }
    let nv = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    acc.sqrt() / nv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::simplify;

    #[test]
    fn real_filter_keeps_real_sorted() {
        let mk = |re: f64, im: f64| EigenPair {
            value: Complex::new(re, im),
            vector: vec![],
            residual: 0.0,
        };
        let out = real_filter(vec![mk(-1.0, 0.0), mk(1.0, 0.5), mk(2.0, 0.0)], 1e-8);
        let vals: Vec<f64> = out.iter().map(|p| p.value.re).collect();
        assert_eq!(vals, vec![2.0, -1.0]);
        assert!(real_filter(vec![mk(1.0, 0.5), mk(1.0, -0.5)], 1e-8).is_empty());
    }

    #[test]
    fn node_part_rejects_zero_block() {
        let p = EigenPair {
            value: Complex::new(0.0, 0.0),
            vector: vec![Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)],
            residual: 0.0,
        };
        assert!(matches!(nb_node_part(&p), Err(Error::Degenerate(_))));
    }

    #[test]
    fn dense_cap_enforced() {
        let g = Graph::empty(20);
        let op = Laplacian::<f64>::new(&g);
        assert!(matches!(dense_eig_capped(&op, 10), Err(Error::Resource(_))));
        let pairs = dense_eig(&op).unwrap();
        assert!(pairs.iter().all(|p| p.value.norm() == 0.0));
    }

    #[test]
    fn triangle_node_part_is_constant_at_one() {
        let g = simplify(&[(0, 1), (1, 2), (2, 0)], 3).unwrap();
        let op = NonBacktracking::<f64>::new(&g).unwrap();
        let pairs = dense_eig(&op).unwrap();
        let top = &pairs[0];
        assert!((top.value - Complex::new(1.0, 0.0)).norm() < 1e-10);
        let v = nb_node_part(top).unwrap();
        for z in &v {
            assert!((z - Complex::new(1.0 / 3f64.sqrt(), 0.0)).norm() < 1e-6);
        }
        assert!(ihara_residual(&g, top.value, &v) < 1e-8);
    }
}
