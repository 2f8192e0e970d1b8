//! Restarted Krylov eigensolvers.
//!
//! Both solvers follow the Krylov-Schur scheme: expand an orthonormal basis
//! to `m` vectors, solve the small projected problem, keep the `p` wanted
//! Schur (or Ritz) vectors and expand again. Symmetric operators run in real
//! arithmetic with a symmetric projected matrix (thick-restart Lanczos with
//! full reorthogonalisation); general operators run in complex arithmetic with
//! a reordered complex Schur form.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::dense::{
    defective_clusters, hessenberg_schur, swap_schur, symmetric_eig, triangular_eigenvectors,
    DenseMatrix,
};
use super::operators::MatrixOperator;
use super::EigenPair;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Part of the spectrum to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Which {
    LargestReal,
    LargestMagnitude,
    /// Smallest real part (smallest algebraic for symmetric operators).
    Smallest,
}

impl Which {
    /// Ordering key: larger is more wanted.
    fn rank<T: Scalar>(self, z: Complex<T>) -> (T, T) {
        match self {
            Which::LargestReal => (z.re, z.im),
            Which::LargestMagnitude => (z.norm(), z.re),
            Which::Smallest => (-z.re, z.im),
        }
    }

    fn prefer<T: Scalar>(self, a: Complex<T>, b: Complex<T>) -> bool {
        let (ra, rb) = (self.rank(a), self.rank(b));
        ra.0 > rb.0 || (ra.0 == rb.0 && ra.1 > rb.1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovOptions<T> {
    /// Absolute residual tolerance; `None` picks 1e-10 for symmetric and 1e-8
    /// for nonsymmetric operators.
    pub tol: Option<T>,
    /// Basis size before each restart; `None` picks `max(4 nev, 20)`.
    pub subspace: Option<usize>,
    pub max_restarts: usize,
    /// Seeds the start vector and breakdown refreshes.
    pub seed: u64,
}

impl<T> Default for KrylovOptions<T> {
    fn default() -> Self {
        KrylovOptions {
            tol: None,
            subspace: None,
            max_restarts: 300,
            seed: 0x5eed,
        }
    }
}

impl<T: Scalar> KrylovOptions<T> {
    pub fn tolerance_for(&self, symmetric: bool) -> T {
        self.tol.unwrap_or_else(|| {
            if symmetric {
                T::lit(1e-10)
            } else {
                T::lit(1e-8)
            }
        })
    }

    pub fn with_tol(mut self, tol: T) -> Self {
        self.tol = Some(tol);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_subspace(mut self, m: usize) -> Self {
        self.subspace = Some(m);
        self
    }
}

/// Outcome of a Krylov run, converged or not.
#[derive(Debug, Clone)]
pub struct EigsReport<T> {
    /// The `nev` most wanted Ritz pairs, best first, with explicit residuals.
    pub pairs: Vec<EigenPair<T>>,
    /// How many of `pairs` meet the tolerance.
    pub converged: usize,
    pub restarts: usize,
    pub tol: T,
}

impl<T: Scalar> EigsReport<T> {
    pub fn is_converged(&self) -> bool {
        self.converged == self.pairs.len()
    }

    pub fn best_residual(&self) -> T {
        self.pairs
            .iter()
            .map(|p| p.residual)
            .fold(T::infinity(), |a, b| a.min(b))
    }

    pub fn into_result(self) -> Result<Vec<EigenPair<T>>> {
        if self.is_converged() {
            Ok(self.pairs)
        } else {
            let worst = self
                .pairs
                .iter()
                .map(|p| p.residual)
                .fold(T::zero(), |a, b| a.max(b));
            Err(Error::Convergence {
                iterations: self.restarts,
                requested: self.pairs.len(),
                converged: self.converged,
                best_residual: worst.to_f64().unwrap_or(f64::NAN),
            })
        }
    }
}

/// The `k` eigenpairs of `op` selected by `which`.
pub fn topk_eigs<T: Scalar>(
    op: &dyn MatrixOperator<T>,
    k: usize,
    which: Which,
    opts: &KrylovOptions<T>,
) -> Result<Vec<EigenPair<T>>> {
    topk_eigs_report(op, k, which, opts)?.into_result()
}

/// Like [`topk_eigs`] but returns the best available pairs when the iteration
/// cap is hit instead of failing.
pub fn topk_eigs_report<T: Scalar>(
    op: &dyn MatrixOperator<T>,
    k: usize,
    which: Which,
    opts: &KrylovOptions<T>,
) -> Result<EigsReport<T>> {
    let n = op.dim();
    if k == 0 || k >= n {
        return Err(Error::Parameter(format!(
            "need 0 < k < dim, got k={k}, dim={n}"
        )));
    }
    let m = opts.subspace.unwrap_or((4 * k).max(20)).max(k + 2).min(n);
    if op.is_symmetric() {
        lanczos(op, k, m, which, opts)
    } else {
        krylov_schur(op, k, m, which, opts)
    }
}

/// Field operations shared by the real and complex iterations.
trait Elem<T: Scalar>:
    Copy
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn conj(self) -> Self;
    fn abs2(self) -> T;
    fn scale(self, s: T) -> Self;
    fn real(t: T) -> Self;
    fn to_complex(self) -> Complex<T>;
}

impl<T: Scalar> Elem<T> for T {
    fn conj(self) -> Self {
        self
    }
    fn abs2(self) -> T {
        self * self
    }
    fn scale(self, s: T) -> Self {
        self * s
    }
    fn real(t: T) -> Self {
        t
    }
    fn to_complex(self) -> Complex<T> {
        Complex::new(self, T::zero())
    }
}

impl<T: Scalar> Elem<T> for Complex<T> {
    fn conj(self) -> Self {
        Complex::conj(&self)
    }
    fn abs2(self) -> T {
        self.norm_sqr()
    }
    fn scale(self, s: T) -> Self {
        self * s
    }
    fn real(t: T) -> Self {
        Complex::new(t, T::zero())
    }
    fn to_complex(self) -> Complex<T> {
        self
    }
}

fn dot<T: Scalar, E: Elem<T>>(a: &[E], b: &[E]) -> E {
    a.iter()
        .zip(b)
        .fold(E::zero(), |s, (&x, &y)| s + x.conj() * y)
}

fn norm<T: Scalar, E: Elem<T>>(a: &[E]) -> T {
    a.iter().map(|x| x.abs2()).sum::<T>().sqrt()
}

/// Orthogonalises `w` against `basis` with two Gram-Schmidt passes,
/// accumulating the coefficients into `h`.
fn orthogonalize<T: Scalar, E: Elem<T>>(basis: &[Vec<E>], w: &mut [E], h: &mut [E]) {
    h.iter_mut().for_each(|x| *x = E::zero());
    for _ in 0..2 {
        for (q, hq) in basis.iter().zip(h.iter_mut()) {
            let c = dot(q, w);
            *hq = *hq + c;
            for (wi, &qi) in w.iter_mut().zip(q) {
                *wi = *wi - qi * c;
            }
        }
    }
}

/// A unit vector orthogonal to `basis`, or `None` if the basis spans everything.
fn random_orthogonal<T: Scalar, E: Elem<T>>(
    basis: &[Vec<E>],
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<E>> {
    if basis.len() >= n {
        return None;
    }
    let mut scratch = vec![E::zero(); basis.len()];
    for _ in 0..5 {
        let mut v: Vec<E> = (0..n)
            .map(|_| E::real(T::lit(rng.random_range(-1.0..1.0))))
            .collect();
        let before = norm(&v);
        orthogonalize(basis, &mut v, &mut scratch);
        let after = norm(&v);
        if after > before * T::lit(1e-6) {
            let inv = after.recip();
            v.iter_mut().for_each(|x| *x = x.scale(inv));
            return Some(v);
        }
    }
    None
}

/// Krylov decomposition `Op V[..m] = V[..m+1] H` with `H` stored as
/// `(m+1) x m`, built up column by column from `start`.
struct Decomposition<E> {
    basis: Vec<Vec<E>>,
    h: DenseMatrix<E>,
}

impl<E: Copy + Zero> Decomposition<E> {
    fn new(m: usize, start: Vec<E>) -> Self {
        Decomposition {
            basis: vec![start],
            h: DenseMatrix::zeros(m + 1, m),
        }
    }
}

/// Extends the decomposition from `basis.len() - 1` columns to `m`.
fn expand<T: Scalar, E: Elem<T>>(
    dec: &mut Decomposition<E>,
    m: usize,
    n: usize,
    apply: &dyn Fn(&[E], &mut [E]),
    rng: &mut ChaCha8Rng,
) {
    let mut coeffs = vec![E::zero(); m + 1];
    let mut w = vec![E::zero(); n];
    for j in dec.basis.len() - 1..m {
        apply(&dec.basis[j], &mut w);
        let scale = norm(&w);
        orthogonalize(&dec.basis, &mut w, &mut coeffs[..=j]);
        for (i, &c) in coeffs[..=j].iter().enumerate() {
            dec.h[(i, j)] = c;
        }
        let beta = norm(&w);
        if beta > scale * T::epsilon() * T::lit(100.0) && beta > T::min_positive_value() {
            dec.h[(j + 1, j)] = E::real(beta);
            let inv = beta.recip();
            w.iter_mut().for_each(|x| *x = x.scale(inv));
            dec.basis.push(w.clone());
        } else {
            // invariant subspace found: continue with a fresh direction
            dec.h[(j + 1, j)] = E::zero();
            let fresh = random_orthogonal(&dec.basis, n, rng).unwrap_or_else(|| vec![E::zero(); n]);
            dec.basis.push(fresh);
        }
    }
}

fn start_vector<T: Scalar, E: Elem<T>>(n: usize, rng: &mut ChaCha8Rng) -> Vec<E> {
    let mut v: Vec<E> = (0..n)
        .map(|_| E::real(T::lit(rng.random_range(-1.0..1.0))))
        .collect();
    let inv = norm(&v).recip();
    v.iter_mut().for_each(|x| *x = x.scale(inv));
    v
}

/// `basis[..cols] * y` for an `cols x k` coefficient matrix.
fn combine<T: Scalar, E: Elem<T>>(basis: &[Vec<E>], y: &DenseMatrix<E>, col: usize) -> Vec<E> {
    let n = basis[0].len();
    let mut out = vec![E::zero(); n];
    for (r, q) in basis.iter().take(y.rows()).enumerate() {
        let c = y[(r, col)];
        if c.abs2() == T::zero() {
            continue;
        }
        for (o, &qi) in out.iter_mut().zip(q) {
            *o = *o + qi * c;
        }
    }
    out
}

fn explicit_pair<T: Scalar>(
    op: &dyn MatrixOperator<T>,
    value: Complex<T>,
    x: Vec<Complex<T>>,
) -> EigenPair<T> {
    let nx = norm(&x);
    let x: Vec<Complex<T>> = x.into_iter().map(|z| z / nx).collect();
    let mut y = vec![Complex::zero(); x.len()];
    op.apply_complex(&x, &mut y);
    let residual = y
        .iter()
        .zip(&x)
        .map(|(yi, xi)| (yi - value * xi).norm_sqr())
        .sum::<T>()
        .sqrt();
    EigenPair {
        value,
        vector: x,
        residual,
    }
}

/// Thick-restart Lanczos for symmetric operators.
fn lanczos<T: Scalar>(
    op: &dyn MatrixOperator<T>,
    nev: usize,
    m: usize,
    which: Which,
    opts: &KrylovOptions<T>,
) -> Result<EigsReport<T>> {
    let n = op.dim();
    let tol = opts.tolerance_for(true);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let apply = |x: &[T], y: &mut [T]| op.apply(x, y);
    let mut dec = Decomposition::new(m, start_vector::<T, T>(n, &mut rng));
    let keep = (nev + (m - nev) / 2).clamp(nev, m - 1);
    let mut last = None;
    for restart in 0..=opts.max_restarts {
        expand(&mut dec, m, n, &apply, &mut rng);
        let hm = DenseMatrix::from_fn(m, m, |r, c| (dec.h[(r, c)] + dec.h[(c, r)]) * T::lit(0.5));
        let (theta, y) = symmetric_eig(&hm)?;
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| {
            let (za, zb) = (
                Complex::new(theta[a], T::zero()),
                Complex::new(theta[b], T::zero()),
            );
            if which.prefer(za, zb) {
                std::cmp::Ordering::Less
            } else if which.prefer(zb, za) {
                std::cmp::Ordering::Greater
            } else {
                a.cmp(&b)
            }
        });
        let y = DenseMatrix::from_fn(m, m, |r, c| y[(r, order[c])]);
        let theta: Vec<T> = order.iter().map(|&i| theta[i]).collect();
        let b: Vec<T> = (0..m).map(|c| dec.h[(m, c)]).collect();
        let estimate = |c: usize| (0..m).fold(T::zero(), |s, r| s + b[r] * y[(r, c)]).abs();

        let done = (0..nev).all(|c| estimate(c) <= tol * T::lit(0.1));
        if done || restart == opts.max_restarts {
            let pairs: Vec<EigenPair<T>> = (0..nev)
                .map(|c| {
                    let x = combine(&dec.basis, &y, c)
                        .into_iter()
                        .map(|v| v.to_complex())
                        .collect();
                    explicit_pair(op, Complex::new(theta[c], T::zero()), x)
                })
                .collect();
            let converged = pairs.iter().filter(|p| p.residual <= tol).count();
            let report = EigsReport {
                pairs,
                converged,
                restarts: restart,
                tol,
            };
            if report.is_converged() || restart == opts.max_restarts {
                return Ok(report);
            }
            last = Some(report);
        }

        // thick restart: keep the wanted Ritz vectors
        let residual_vector = dec.basis[m].clone();
        let mut basis: Vec<Vec<T>> = (0..keep).map(|c| combine(&dec.basis, &y, c)).collect();
        basis.push(residual_vector);
        let mut h = DenseMatrix::zeros(m + 1, m);
        for c in 0..keep {
            h[(c, c)] = theta[c];
            h[(keep, c)] = (0..m).fold(T::zero(), |s, r| s + b[r] * y[(r, c)]);
        }
        dec = Decomposition { basis, h };
    }
    Ok(last.expect("loop returns at the final restart"))
}

/// Krylov-Schur with complex arithmetic for nonsymmetric operators.
fn krylov_schur<T: Scalar>(
    op: &dyn MatrixOperator<T>,
    nev: usize,
    m: usize,
    which: Which,
    opts: &KrylovOptions<T>,
) -> Result<EigsReport<T>> {
    let n = op.dim();
    let tol = opts.tolerance_for(false);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let apply = |x: &[Complex<T>], y: &mut [Complex<T>]| op.apply_complex(x, y);
    let mut dec = Decomposition::new(m, start_vector::<T, Complex<T>>(n, &mut rng));
    let keep = (nev + (m - nev) / 2).clamp(nev, m - 1);
    let mut last = None;
    for restart in 0..=opts.max_restarts {
        expand(&mut dec, m, n, &apply, &mut rng);
        let mut t = dec.h.leading(m, m);
        let mut q = DenseMatrix::identity(m);
        // H is Hessenberg except for the restart row; reduce it first
        super::dense::hessenberg(&mut t, &mut q);
        hessenberg_schur(&mut t, &mut q)?;
        order_schur(&mut t, &mut q, which, m);
        let b: Vec<Complex<T>> = (0..m).map(|c| dec.h[(m, c)]).collect();
        // Ritz vectors in the small space
        let ys = triangular_eigenvectors(&t.leading(nev, nev));
        let ritz_small = DenseMatrix::from_fn(m, nev, |r, c| {
            (0..nev).fold(Complex::<T>::zero(), |s, k| s + q[(r, k)] * ys[(k, c)])
        });
        let estimate = |c: usize| {
            (0..m)
                .fold(Complex::<T>::zero(), |s, r| s + b[r] * ritz_small[(r, c)])
                .norm()
        };
        let done = (0..nev).all(|c| estimate(c) <= tol * T::lit(0.1));
        if done || restart == opts.max_restarts {
            let (values, vectors) = ritz_pairs(&t, &q, op.norm_bound());
            let pairs: Vec<EigenPair<T>> = (0..nev)
                .map(|c| explicit_pair(op, values[c], combine(&dec.basis, &vectors, c)))
                .collect();
            let converged = pairs.iter().filter(|p| p.residual <= tol).count();
            let report = EigsReport {
                pairs,
                converged,
                restarts: restart,
                tol,
            };
            if report.is_converged() || restart == opts.max_restarts {
                return Ok(report);
            }
            last = Some(report);
        }

        let residual_vector = dec.basis[m].clone();
        let mut basis: Vec<Vec<Complex<T>>> =
            (0..keep).map(|c| combine(&dec.basis, &q, c)).collect();
        basis.push(residual_vector);
        let mut h = DenseMatrix::zeros(m + 1, m);
        for r in 0..keep {
            for c in r..keep {
                h[(r, c)] = t[(r, c)];
            }
        }
        for c in 0..keep {
            h[(keep, c)] = (0..m).fold(Complex::<T>::zero(), |s, r| s + b[r] * q[(r, c)]);
        }
        dec = Decomposition { basis, h };
    }
    Ok(last.expect("loop returns at the final restart"))
}

/// All `m` Ritz values and unit small-space vectors (columns). Each
/// numerically defective cluster is replaced by its mean value and the
/// normalized mean of its phase-aligned vectors, which is accurate to second
/// order where the individual Ritz pairs are only accurate to first. All
/// pairs take part so that a Jordan partner ranked just past `nev` counts.
fn ritz_pairs<T: Scalar>(
    t: &DenseMatrix<Complex<T>>,
    q: &DenseMatrix<Complex<T>>,
    scale: T,
) -> (Vec<Complex<T>>, DenseMatrix<Complex<T>>) {
    let m = t.rows();
    let mut vectors = q.mul(&triangular_eigenvectors(t));
    for c in 0..m {
        let col: Vec<Complex<T>> = (0..m).map(|r| vectors[(r, c)]).collect();
        let nrm = norm(&col);
        for r in 0..m {
            vectors[(r, c)] /= nrm;
        }
    }
    let values: Vec<Complex<T>> = (0..m).map(|i| t[(i, i)]).collect();
    let roots = defective_clusters(&values, &vectors, scale);
    let mut merged_values = values.clone();
    let mut merged = vectors.clone();
    for c in 0..m {
        let members: Vec<usize> = (0..m).filter(|&j| roots[j] == roots[c]).collect();
        if members.len() < 2 {
            continue;
        }
        let lead = members[0];
        let mut mean = vec![Complex::<T>::zero(); m];
        for &j in &members {
            let dot = (0..m).fold(Complex::<T>::zero(), |s, r| {
                s + vectors[(r, lead)].conj() * vectors[(r, j)]
            });
            let phase = dot.conj() / dot.norm();
            for (r, x) in mean.iter_mut().enumerate() {
                *x += vectors[(r, j)] * phase;
            }
        }
        let nrm = norm(&mean);
        for (r, x) in mean.into_iter().enumerate() {
            merged[(r, c)] = x / nrm;
        }
        merged_values[c] = members
            .iter()
            .fold(Complex::<T>::zero(), |s, &j| s + values[j])
            / T::from_count(members.len());
    }
    (merged_values, merged)
}

/// Moves the most wanted eigenvalues of the triangular `t` to the top.
fn order_schur<T: Scalar>(
    t: &mut DenseMatrix<Complex<T>>,
    q: &mut DenseMatrix<Complex<T>>,
    which: Which,
    m: usize,
) {
    for pos in 0..m {
        let mut best = pos;
        for i in pos + 1..m {
            if which.prefer(t[(i, i)], t[(best, best)]) {
                best = i;
            }
        }
        for k in (pos..best).rev() {
            swap_schur(t, q, k);
        }
    }
}
