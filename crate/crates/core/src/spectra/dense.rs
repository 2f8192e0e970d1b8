//! Small dense matrices and the dense eigen-decompositions the solvers build on:
//! Householder tridiagonalisation with implicit QL for symmetric matrices, and
//! Householder reduction to Hessenberg form with a shifted complex QR
//! iteration (Schur form, reordering, triangular eigenvectors) for general ones.

use std::ops::{Index, IndexMut};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Copy + Zero> DenseMatrix<E> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![E::zero(); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[E] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<E> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    /// Top-left `rows x cols` block.
    pub fn leading(&self, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |r, c| self[(r, c)])
    }
}

impl<E: Copy + Zero + One> DenseMatrix<E> {
    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { E::one() } else { E::zero() })
    }
}

impl<E> Index<(usize, usize)> for DenseMatrix<E> {
    type Output = E;
    fn index(&self, (r, c): (usize, usize)) -> &E {
        &self.data[r * self.cols + c]
    }
}

impl<E> IndexMut<(usize, usize)> for DenseMatrix<E> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut E {
        &mut self.data[r * self.cols + c]
    }
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(x).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    pub fn to_complex(&self) -> DenseMatrix<Complex<T>> {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|&x| Complex::new(x, T::zero()))
                .collect(),
        }
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|r| (0..r).all(|c| (self[(r, c)] - self[(c, r)]).abs() <= tol))
    }
}

impl<T: Scalar> DenseMatrix<Complex<T>> {
    pub fn mul_vec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(x)
                    .fold(Complex::<T>::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    out[(r, c)] += a * other[(k, c)];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, x| m.max(x.norm()))
    }
}

/// Eigen-decomposition of a real symmetric matrix.
///
/// Returns eigenvalues in ascending order and the matrix whose columns are the
/// matching orthonormal eigenvectors.
pub fn symmetric_eig<T: Scalar>(a: &DenseMatrix<T>) -> Result<(Vec<T>, DenseMatrix<T>)> {
    let n = a.rows();
    if n != a.cols() {
        return Err(Error::Input(format!(
            "{}x{} matrix is not square",
            n,
            a.cols()
        )));
    }
    if n == 0 {
        return Ok((Vec::new(), DenseMatrix::zeros(0, 0)));
    }
    let mut v = a.clone();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    tridiagonalize(&mut v, &mut d, &mut e);
    tridiagonal_ql(&mut v, &mut d, &mut e)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = DenseMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok((values, vectors))
}

/// Householder reduction of a symmetric matrix to tridiagonal form; `v` is
/// overwritten with the accumulated transformation, `d` / `e` receive the
/// diagonal and sub-diagonal.
fn tridiagonalize<T: Scalar>(v: &mut DenseMatrix<T>, d: &mut [T], e: &mut [T]) {
    let n = d.len();
    let zero = T::zero();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = zero;
        let mut h = zero;
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == zero {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = zero;
                v[(j, i)] = zero;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let f = d[i - 1];
            let mut g = h.sqrt();
            if f > zero {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = zero;
            }
            for j in 0..i {
                let f = d[j];
                v[(j, i)] = f;
                let mut g = e[j] + v[(j, j)] * f;
                for k in j + 1..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            let mut f = zero;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                let f = d[j];
                let g = e[j];
                for k in j..i {
                    let upd = f * e[k] + g * d[k];
                    v[(k, j)] -= upd;
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = zero;
            }
        }
        d[i] = h;
    }
    for i in 0..n - 1 {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = T::one();
        let h = d[i + 1];
        if h != zero {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = zero;
                for k in 0..=i {
                    g += v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    let upd = g * d[k];
                    v[(k, j)] -= upd;
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = zero;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = zero;
    }
    v[(n - 1, n - 1)] = T::one();
    e[0] = zero;
}

/// Implicit QL iteration on the tridiagonal `(d, e)`, accumulating into `v`.
fn tridiagonal_ql<T: Scalar>(v: &mut DenseMatrix<T>, d: &mut [T], e: &mut [T]) -> Result<()> {
    let n = d.len();
    let zero = T::zero();
    let one = T::one();
    let two = T::lit(2.0);
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = zero;
    let mut f = zero;
    let mut tst1 = zero;
    let eps = T::epsilon();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::Convergence {
                        iterations: iter,
                        requested: n,
                        converged: l,
                        best_residual: e[l].abs().to_f64().unwrap_or(f64::NAN),
                    });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(one);
                if p < zero {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = one;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = zero;
                let mut s2 = zero;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let hk = v[(k, i + 1)];
                        v[(k, i + 1)] = s * v[(k, i)] + c * hk;
                        v[(k, i)] = c * v[(k, i)] - s * hk;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = zero;
    }
    Ok(())
}

/// Reduces `a` to upper Hessenberg form `a <- Q^* a Q` with Householder
/// reflections, multiplying them into `q` from the right.
pub fn hessenberg<T: Scalar>(a: &mut DenseMatrix<Complex<T>>, q: &mut DenseMatrix<Complex<T>>) {
    let n = a.rows();
    let zero = T::zero();
    let two = T::lit(2.0);
    let mut v = vec![Complex::<T>::zero(); n];
    for k in 0..n.saturating_sub(2) {
        let norm = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<T>().sqrt();
        if norm == zero {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == zero {
            Complex::one()
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        for i in k + 1..n {
            v[i] = a[(i, k)];
        }
        v[k + 1] -= alpha;
        let vv: T = (k + 1..n).map(|i| v[i].norm_sqr()).sum();
        if vv == zero {
            continue;
        }
        let scale = two / vv;
        // a <- (I - s v v^*) a
        for j in k..n {
            let s = (k + 1..n).fold(Complex::<T>::zero(), |acc, i| acc + v[i].conj() * a[(i, j)])
                * scale;
            for i in k + 1..n {
                a[(i, j)] -= v[i] * s;
            }
        }
        // a <- a (I - s v v^*), q <- q (I - s v v^*)
        for m in [&mut *a, &mut *q] {
            for r in 0..n {
                let s =
                    (k + 1..n).fold(Complex::<T>::zero(), |acc, j| acc + m[(r, j)] * v[j]) * scale;
                for j in k + 1..n {
                    m[(r, j)] -= s * v[j].conj();
                }
            }
        }
        a[(k + 1, k)] = alpha;
        for i in k + 2..n {
            a[(i, k)] = Complex::zero();
        }
    }
}

/// Plane rotation `[c s; -conj(s) c]` with real `c` mapping `(f, g)` to `(r, 0)`.
fn givens<T: Scalar>(f: Complex<T>, g: Complex<T>) -> (T, Complex<T>) {
    let zero = T::zero();
    if g.norm() == zero {
        return (T::one(), Complex::zero());
    }
    if f.norm() == zero {
        return (zero, g.conj() / g.norm());
    }
    let fa = f.norm();
    let norm = fa.hypot(g.norm());
    let c = fa / norm;
    let s = (f / fa) * g.conj() / norm;
    (c, s)
}

/// Applies the rotation from the left to rows `k`, `k+1` over columns `cols`.
fn rotate_rows<T: Scalar>(
    m: &mut DenseMatrix<Complex<T>>,
    k: usize,
    c: T,
    s: Complex<T>,
    cols: std::ops::Range<usize>,
) {
    for j in cols {
        let a = m[(k, j)];
        let b = m[(k + 1, j)];
        m[(k, j)] = a * c + s * b;
        m[(k + 1, j)] = b * c - s.conj() * a;
    }
}

/// Applies the adjoint rotation from the right to columns `k`, `k+1` over `rows`.
fn rotate_cols<T: Scalar>(
    m: &mut DenseMatrix<Complex<T>>,
    k: usize,
    c: T,
    s: Complex<T>,
    rows: std::ops::Range<usize>,
) {
    for i in rows {
        let a = m[(i, k)];
        let b = m[(i, k + 1)];
        m[(i, k)] = a * c + b * s.conj();
        m[(i, k + 1)] = b * c - a * s;
    }
}

/// Complex Schur decomposition of an upper Hessenberg matrix by shifted QR.
///
/// On return `h` is upper triangular and `z` has been multiplied from the
/// right by the accumulated unitary transformation.
pub fn hessenberg_schur<T: Scalar>(
    h: &mut DenseMatrix<Complex<T>>,
    z: &mut DenseMatrix<Complex<T>>,
) -> Result<()> {
    let n = h.rows();
    if n == 0 {
        return Ok(());
    }
    let eps = T::epsilon();
    let tiny = T::min_positive_value() / eps;
    let norm = h.max_abs().max(tiny);
    let max_iter = 40 * n.max(10);
    let mut hi = n - 1;
    let mut since_deflation = 0;
    let mut total = 0;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let mut diag = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if diag == T::zero() {
                diag = norm;
            }
            if sub <= eps * diag || sub <= tiny {
                h[(l, l - 1)] = Complex::zero();
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        total += 1;
        since_deflation += 1;
        if total > max_iter {
            return Err(Error::Convergence {
                iterations: total,
                requested: n,
                converged: n - 1 - hi,
                best_residual: h[(hi, hi - 1)].norm().to_f64().unwrap_or(f64::NAN),
            });
        }

        let shift = if since_deflation % 11 == 0 {
            // exceptional shift to break cycles
            h[(hi, hi)] + Complex::new(T::lit(0.75) * h[(hi, hi - 1)].re.abs(), T::zero())
        } else {
            let a = h[(hi - 1, hi - 1)];
            let b = h[(hi - 1, hi)];
            let c = h[(hi, hi - 1)];
            let d = h[(hi, hi)];
            let half = T::lit(0.5);
            let mean = (a + d) * half;
            let disc = ((a - d) * half * ((a - d) * half) + b * c).sqrt();
            let r1 = mean + disc;
            let r2 = mean - disc;
            if (r1 - d).norm() <= (r2 - d).norm() {
                r1
            } else {
                r2
            }
        };

        // implicit single-shift bulge chase on the active block l..=hi
        let (c, s) = givens(h[(l, l)] - shift, h[(l + 1, l)]);
        rotate_rows(h, l, c, s, l..n);
        rotate_cols(h, l, c, s, 0..(l + 3).min(hi + 1));
        rotate_cols(z, l, c, s, 0..n);
        for k in l + 1..hi {
            let (c, s) = givens(h[(k, k - 1)], h[(k + 1, k - 1)]);
            rotate_rows(h, k, c, s, k - 1..n);
            h[(k + 1, k - 1)] = Complex::zero();
            rotate_cols(h, k, c, s, 0..(k + 3).min(hi + 1));
            rotate_cols(z, k, c, s, 0..n);
        }
    }
    for r in 1..n {
        for c in 0..r {
            h[(r, c)] = Complex::zero();
        }
    }
    Ok(())
}

/// Complex Schur decomposition `a = Q T Q^*` of a general square matrix.
pub fn schur<T: Scalar>(
    a: &DenseMatrix<Complex<T>>,
) -> Result<(DenseMatrix<Complex<T>>, DenseMatrix<Complex<T>>)> {
    let n = a.rows();
    let mut t = a.clone();
    let mut q = DenseMatrix::identity(n);
    hessenberg(&mut t, &mut q);
    hessenberg_schur(&mut t, &mut q)?;
    Ok((t, q))
}

/// Swaps the adjacent diagonal entries `k` and `k+1` of the upper triangular
/// `t`, updating the Schur vectors `q` so that `q t q^*` is unchanged.
pub fn swap_schur<T: Scalar>(
    t: &mut DenseMatrix<Complex<T>>,
    q: &mut DenseMatrix<Complex<T>>,
    k: usize,
) {
    let n = t.rows();
    let t11 = t[(k, k)];
    let t22 = t[(k + 1, k + 1)];
    let (c, s) = givens(t[(k, k + 1)], t22 - t11);
    if k + 2 < n {
        rotate_rows(t, k, c, s, k + 2..n);
    }
    rotate_cols(t, k, c, s, 0..k);
    t[(k, k)] = t22;
    t[(k + 1, k + 1)] = t11;
    rotate_cols(q, k, c, s, 0..q.rows());
}

/// Eigenvectors of an upper triangular matrix by back substitution; column
/// `i` belongs to `t[(i, i)]` and is normalised to unit length.
pub fn triangular_eigenvectors<T: Scalar>(t: &DenseMatrix<Complex<T>>) -> DenseMatrix<Complex<T>> {
    let n = t.rows();
    let eps = T::epsilon();
    let small = (t.max_abs() * eps).max(T::min_positive_value());
    let big = T::one() / eps;
    let mut out = DenseMatrix::zeros(n, n);
    let mut x = vec![Complex::<T>::zero(); n];
    for i in 0..n {
        let lambda = t[(i, i)];
        x.iter_mut().for_each(|v| *v = Complex::zero());
        x[i] = Complex::one();
        for j in (0..i).rev() {
            let rhs = (j + 1..=i).fold(Complex::<T>::zero(), |acc, k| acc + t[(j, k)] * x[k]);
            let mut denom = t[(j, j)] - lambda;
            if denom.norm() < small {
                denom = Complex::new(small, T::zero());
            }
            x[j] = -rhs / denom;
            if x[j].norm() > big {
                let scale = T::one() / x[j].norm();
                for v in x.iter_mut().take(i + 1) {
                    *v *= scale;
                }
            }
        }
        let norm = x.iter().take(i + 1).map(|v| v.norm_sqr()).sum::<T>().sqrt();
        for r in 0..=i {
            out[(r, i)] = x[r] / norm;
        }
    }
    out
}

/// Eigenvalues and unit eigenvectors (columns) of a general real matrix.
pub fn general_eig<T: Scalar>(
    a: &DenseMatrix<T>,
) -> Result<(Vec<Complex<T>>, DenseMatrix<Complex<T>>)> {
    let n = a.rows();
    if n != a.cols() {
        return Err(Error::Input(format!(
            "{}x{} matrix is not square",
            n,
            a.cols()
        )));
    }
    let (t, q) = schur(&a.to_complex())?;
    let y = triangular_eigenvectors(&t);
    let mut vectors = q.mul(&y);
    for c in 0..n {
        let norm = (0..n).map(|r| vectors[(r, c)].norm_sqr()).sum::<T>().sqrt();
        if norm > T::zero() {
            for r in 0..n {
                vectors[(r, c)] /= norm;
            }
        }
    }
    let mut values: Vec<Complex<T>> = (0..n).map(|i| t[(i, i)]).collect();
    merge_defective(&mut values, &vectors, a.max_abs());
    Ok((values, vectors))
}

/// Replaces the eigenvalues of each numerically defective cluster by the
/// cluster mean.
///
/// A Jordan block of size `p` splits into `p` computed eigenvalues spread by
/// about `eps^(1/p)`, all sharing (nearly) the same eigenvector, while their
/// mean is accurate to working precision. Clusters are formed from pairs whose
/// values are close and whose vectors are nearly parallel, so distinct but
/// close eigenvalues with independent eigenvectors are left alone.
pub(crate) fn merge_defective<T: Scalar>(
    values: &mut [Complex<T>],
    vectors: &DenseMatrix<Complex<T>>,
    scale: T,
) {
    let roots = defective_clusters(values, vectors, scale);
    let n = values.len();
    let mut sums = vec![(Complex::<T>::zero(), 0usize); n];
    for i in 0..n {
        sums[roots[i]].0 += values[i];
        sums[roots[i]].1 += 1;
    }
    for i in 0..n {
        let (sum, count) = sums[roots[i]];
        if count > 1 {
            values[i] = sum / T::from_count(count);
        }
    }
}

/// Cluster representative of every eigenpair, for the clustering described
/// on [`merge_defective`]. Singletons are their own representative.
pub(crate) fn defective_clusters<T: Scalar>(
    values: &[Complex<T>],
    vectors: &DenseMatrix<Complex<T>>,
    scale: T,
) -> Vec<usize> {
    let n = values.len();
    let eps = T::epsilon();
    let value_tol = eps.powf(T::lit(0.2)) * scale.max(T::one());
    let angle_tol = eps.sqrt().sqrt();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() > value_tol {
                continue;
            }
            let dot = (0..vectors.rows()).fold(Complex::<T>::zero(), |acc, r| {
                acc + vectors[(r, i)].conj() * vectors[(r, j)]
            });
            if T::one() - dot.norm() <= angle_tol * angle_tol {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    (0..n).map(|i| root(&mut parent, i)).collect()
}
