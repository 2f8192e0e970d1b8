use num_complex::Complex;

use crate::scalar::Scalar;

/// An eigenvalue that is either real or one of a complex-conjugate pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mu<T> {
    Real(T),
    /// The member with positive imaginary part.
    Complex(Complex<T>),
}

impl<T: Scalar> Mu<T> {
    pub fn real(&self) -> Option<T> {
        match *self {
            Mu::Real(x) => Some(x),
            Mu::Complex(_) => None,
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self, Mu::Real(_))
    }

    pub fn to_complex(&self) -> Complex<T> {
        match *self {
            Mu::Real(x) => Complex::new(x, T::zero()),
            Mu::Complex(z) => z,
        }
    }
}

/// Larger root of `mu^2 - lambda mu + (c - 1) = 0`, where `lambda` is an
/// eigenvalue of the motif adjacency and `c` the degree of its nodes.
pub fn mu_from_lambda<T: Scalar>(lambda: T, c: usize) -> Mu<T> {
    let two = T::lit(2.0);
    let k = T::from_count(c) - T::one();
    let disc = lambda * lambda - T::lit(4.0) * k;
    if disc >= T::zero() {
        Mu::Real((lambda + disc.sqrt()) / two)
    } else {
        Mu::Complex(Complex::new(lambda / two, (-disc).sqrt() / two))
    }
}

/// Localized eigenvalue of a doubled `n`-clique: `lambda = n - 1`, `c = n`.
///
/// Real for `n >= 5`. The other clique eigenvalue, `lambda = -1`, always
/// gives a complex pair and is not reported.
pub fn predicted_mu_clique<T: Scalar>(n: usize) -> Mu<T> {
    mu_from_lambda(T::from_count(n - 1), n)
}

/// Localized eigenvalue of a doubled `(c-1)`-regular motif, whose leading
/// adjacency eigenvalue is `c - 1`. Real for `c >= 5`.
pub fn predicted_mu_regular<T: Scalar>(c: usize) -> Mu<T> {
    mu_from_lambda(T::from_count(c - 1), c)
}

/// `(sqrt(c_bar), 2 sqrt(c_bar))`: the bulk edge of the non-backtracking
/// spectrum and the detectability threshold for `c_in - c_out`.
pub fn spectral_markers<T: Scalar>(c_bar: T) -> (T, T) {
    let edge = c_bar.sqrt();
    (edge, T::lit(2.0) * edge)
}

/// Everything predicted for a doubled motif on a sparse base graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction<T> {
    pub mu: Mu<T>,
    /// `1 / (2 |Omega|)`.
    pub ipr: T,
    pub band_edge: T,
    pub threshold: T,
}

impl<T: Scalar> Prediction<T> {
    pub fn clique(n: usize, c_bar: T) -> Self {
        Self::assemble(predicted_mu_clique(n), n, c_bar)
    }

    pub fn regular(c: usize, size: usize, c_bar: T) -> Self {
        Self::assemble(predicted_mu_regular(c), size, c_bar)
    }

    fn assemble(mu: Mu<T>, size: usize, c_bar: T) -> Self {
        let (band_edge, threshold) = spectral_markers(c_bar);
        Prediction {
            mu,
            ipr: T::one() / T::from_count(2 * size),
            band_edge,
            threshold,
        }
    }

    /// Whether the localized value lies outside the bulk.
    pub fn outside_band(&self) -> bool {
        self.mu.real().is_some_and(|m| m > self.band_edge)
    }
}
