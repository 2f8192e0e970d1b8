//! The exactly localized non-backtracking eigenvector of a doubled motif.
//!
//! Put `+v` on `Omega`, `-v` on its copy and zero elsewhere, where `v` is the
//! leading eigenvector of the motif adjacency with eigenvalue `lambda`. Each
//! boundary node sees one `+v_a` and one `-v_a`, so the vector never leaks
//! into the rest of the graph, and inside the motif the node equation
//! `(mu^2 - mu A + D - I) v = 0` reduces to `mu^2 - lambda mu + (c-1) = 0`.

use num_complex::Complex;

use super::ipr;
use super::prediction::{mu_from_lambda, Mu};
use crate::error::{Error, Result};
use crate::graph::{Graph, MotifPair};
use crate::scalar::Scalar;
use crate::spectra::{ihara_residual, EigenPair, MatrixOperator, NonBacktracking};

#[derive(Debug, Clone, PartialEq)]
pub struct LocalizedVector<T> {
    pub mu: Mu<T>,
    /// Leading eigenvalue of the motif adjacency, `c - 1`.
    pub lambda: T,
    /// Degree `c` of the motif nodes.
    pub degree: usize,
    pub motif_size: usize,
    /// Unit `2N` vector `((D - I) v / mu, v)` with its measured residual.
    pub pair: EigenPair<T>,
    /// Unit node vector: `+v` on `Omega`, `-v` on the copy, 0 elsewhere.
    pub node_vector: Vec<T>,
    /// `|(mu^2 - mu A + D - I) v| / |v|`.
    pub node_residual: T,
}

impl<T: Scalar> LocalizedVector<T> {
    pub fn node_ipr(&self) -> T {
        ipr(&self.node_vector).expect("constructed vector is nonzero")
    }

    pub fn full_ipr(&self) -> T {
        ipr(&self.pair.vector).expect("constructed vector is nonzero")
    }
}

/// [`build_localized_vector_for`] on the first motif pair of `g`.
pub fn build_localized_vector<T: Scalar>(g: &Graph) -> Result<LocalizedVector<T>> {
    build_localized_vector_for(g, 0)
}

/// Builds the localized eigenpair of motif pair `index` of `g`.
///
/// The motif must be regular inside (clique or regular motif) with every
/// node joined by a single link to its boundary node, and its copy must mirror
/// it. When the quadratic has no real root the complex root is used; the
/// vector is still an exact eigenvector.
pub fn build_localized_vector_for<T: Scalar>(
    g: &Graph,
    index: usize,
) -> Result<LocalizedVector<T>> {
    let motif = g
        .motifs()
        .get(index)
        .ok_or_else(|| Error::Precondition(format!("graph has no motif pair {index}")))?;
    let inner = check_motif(g, motif)?;
    let s = motif.size();
    let c = inner + 1;
    let lambda = T::from_count(inner);
    let mu = mu_from_lambda(lambda, c);
    let muc = mu.to_complex();

    let n = g.node_count();
    let amp = T::one() / T::from_count(2 * s).sqrt();
    let mut node_vector = vec![T::zero(); n];
    for (&a, &b) in motif.omega.iter().zip(&motif.omega_tilde) {
        node_vector[a] = amp;
        node_vector[b] = -amp;
    }

    let mut w = vec![Complex::new(T::zero(), T::zero()); 2 * n];
    for i in 0..n {
        let y = Complex::new(node_vector[i], T::zero());
        w[n + i] = y;
        w[i] = y * (T::from_count(g.degree(i)) - T::one()) / muc;
    }
    let norm = w.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    w.iter_mut().for_each(|z| *z /= norm);

    let op = NonBacktracking::<T>::new(g)?;
    let mut bw = vec![Complex::new(T::zero(), T::zero()); 2 * n];
    op.apply_complex(&w, &mut bw);
    let residual = bw
        .iter()
        .zip(&w)
        .map(|(a, b)| (a - muc * b).norm_sqr())
        .sum::<T>()
        .sqrt();

    let v: Vec<Complex<T>> = node_vector
        .iter()
        .map(|&x| Complex::new(x, T::zero()))
        .collect();
    let node_residual = ihara_residual(g, muc, &v);
    Ok(LocalizedVector {
        mu,
        lambda,
        degree: c,
        motif_size: s,
        pair: EigenPair {
            value: muc,
            vector: w,
            residual,
        },
        node_vector,
        node_residual,
    })
}

/// Inner degree of the motif after checking the attachment structure.
fn check_motif(g: &Graph, motif: &MotifPair) -> Result<usize> {
    let s = motif.size();
    if s == 0 || motif.omega_tilde.len() != s || motif.boundary.len() != s {
        return Err(Error::Precondition("motif pair is malformed".into()));
    }
    let mut pos = vec![usize::MAX; g.node_count()];
    for (a, &i) in motif.omega.iter().enumerate() {
        pos[i] = a;
    }
    let mut pos_tilde = vec![usize::MAX; g.node_count()];
    for (a, &i) in motif.omega_tilde.iter().enumerate() {
        pos_tilde[i] = a;
    }
    let mut inner_degree = None;
    for a in 0..s {
        let (i, it, gb) = (motif.omega[a], motif.omega_tilde[a], motif.boundary[a]);
        let mut inner = Vec::new();
        let mut outside = Vec::new();
        for &j in g.neighbors(i) {
            if pos[j] != usize::MAX {
                inner.push(pos[j]);
            } else {
                outside.push(j);
            }
        }
        if outside != [gb] {
            return Err(Error::Precondition(format!(
                "motif node {i} must have exactly one outside link, to boundary node {gb}"
            )));
        }
        let mut inner_tilde = Vec::new();
        for &j in g.neighbors(it) {
            if pos_tilde[j] != usize::MAX {
                inner_tilde.push(pos_tilde[j]);
            } else if j != gb {
                return Err(Error::Precondition(format!(
                    "copy node {it} must link only to its copy motif and boundary node {gb}"
                )));
            }
        }
        inner.sort_unstable();
        inner_tilde.sort_unstable();
        if inner != inner_tilde || g.degree(it) != g.degree(i) {
            return Err(Error::Precondition(format!(
                "copy node {it} does not mirror motif node {i}"
            )));
        }
        match inner_degree {
            None => inner_degree = Some(inner.len()),
            Some(d) if d != inner.len() => {
                return Err(Error::Precondition("motif is not regular".into()));
            }
            _ => {}
        }
    }
    Ok(inner_degree.unwrap_or(0))
}

/// `sum_i A_gi v_i` for each boundary node `g` of motif pair `index`.
pub fn boundary_sums<T: Scalar>(g: &Graph, index: usize, v: &[T]) -> Result<Vec<T>> {
    let motif = g
        .motifs()
        .get(index)
        .ok_or_else(|| Error::Precondition(format!("graph has no motif pair {index}")))?;
    Ok(motif
        .boundary
        .iter()
        .map(|&b| g.neighbors(b).iter().fold(T::zero(), |s, &j| s + v[j]))
        .collect())
}
