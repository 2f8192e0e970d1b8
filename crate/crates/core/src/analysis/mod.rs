//! Localization and partition measures, closed-form predictions and the
//! explicit localized eigenvector of a doubled motif.

mod localized;
mod prediction;

use num_complex::Complex;

pub use localized::{
    boundary_sums, build_localized_vector, build_localized_vector_for, LocalizedVector,
};
pub use prediction::{
    mu_from_lambda, predicted_mu_clique, predicted_mu_regular, spectral_markers, Mu, Prediction,
};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;

/// Real or complex vector entries.
pub trait Modulus<T> {
    fn modulus(&self) -> T;
}

impl<T: Scalar> Modulus<T> for T {
    fn modulus(&self) -> T {
        self.abs()
    }
}

impl<T: Scalar> Modulus<T> for Complex<T> {
    fn modulus(&self) -> T {
        self.norm()
    }
}

/// Inverse participation ratio `sum |v_i|^4 / (sum |v_i|^2)^2`.
pub fn ipr<T: Scalar, E: Modulus<T>>(v: &[E]) -> Result<T> {
    let big = v.iter().fold(T::zero(), |m, x| m.max(x.modulus()));
    if !(big > T::zero()) {
        return Err(Error::Precondition("IPR of a zero vector".into()));
    }
    // scale by the largest entry to keep the fourth powers in range
    let (mut s2, mut s4) = (T::zero(), T::zero());
    for x in v {
        let r = x.modulus() / big;
        let a = r * r;
        s2 += a;
        s4 += a * a;
    }
    Ok(s4 / (s2 * s2))
}

/// Two-way split of the nodes; modules are 1 and 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    pub assignment: Vec<u8>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn flipped(&self) -> Partition {
        Partition {
            assignment: self.assignment.iter().map(|&m| 3 - m).collect(),
        }
    }
}

/// Positive (and zero) entries go to module 1, negative ones to module 2.
pub fn sign_partition<T: Scalar>(v: &[T]) -> Partition {
    Partition {
        assignment: v
            .iter()
            .map(|&x| if x < T::zero() { 2 } else { 1 })
            .collect(),
    }
}

/// [`sign_partition`] for a complex vector that must be real up to `tol`
/// (relative to its largest entry).
pub fn sign_partition_complex<T: Scalar>(v: &[Complex<T>], tol: T) -> Result<Partition> {
    crate::spectra::real_parts(v, tol)
        .map(|re| sign_partition(&re))
        .ok_or_else(|| Error::Type("sign partition needs a real vector".into()))
}

/// Fraction of labelled nodes classified correctly, maximised over the two
/// ways of matching modules to labels. Unlabelled (motif) nodes are skipped.
pub fn overlap(p: &Partition, g: &Graph) -> Result<f64> {
    if p.len() != g.node_count() {
        return Err(Error::Input(format!(
            "partition covers {} nodes, graph has {}",
            p.len(),
            g.node_count()
        )));
    }
    let (mut labelled, mut agree) = (0usize, 0usize);
    for (m, label) in p.assignment.iter().zip(g.labels()) {
        if let Some(l) = label {
            labelled += 1;
            if m == l {
                agree += 1;
            }
        }
    }
    if labelled == 0 {
        return Err(Error::Precondition("overlap needs labelled nodes".into()));
    }
    Ok(agree.max(labelled - agree) as f64 / labelled as f64)
}
