//! Small dense complex linear algebra.
//!
//! The channel matrices here are at most a few dozen antennas wide, so a plain
//! row-major `Vec` with cubic-cost kernels is all that is needed. Everything
//! the rest of the crate relies on lives in this file: products, Householder
//! QR, Cholesky, Hermitian log-determinants and a one-sided Jacobi SVD.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Complex<T>,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds from row-major data. Panics if the length does not match.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Self {
        assert_eq!(
            data.len(),
            rows * cols,
            "row-major data has the wrong length"
        );
        Self { rows, cols, data }
    }

    pub fn from_diag(diag: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    pub fn from_real_diag(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = Complex::new(*d, T::zero());
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex<T>] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn diagonal(&self) -> Vec<Complex<T>> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| *x * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| *a + *b)
                .collect(),
        }
    }

    /// `diag(d) * self`
    pub fn scale_rows(&self, d: &[Complex<T>]) -> Self {
        assert_eq!(d.len(), self.rows);
        Self::from_fn(self.rows, self.cols, |r, c| d[r] * self[(r, c)])
    }

    /// `self * diag(d)`
    pub fn scale_cols(&self, d: &[Complex<T>]) -> Self {
        assert_eq!(d.len(), self.cols);
        Self::from_fn(self.rows, self.cols, |r, c| self[(r, c)] * d[c])
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            let out_row = &mut out.data[r * rhs.cols..(r + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * *b;
                }
            }
        }
        out
    }

    /// `selfᴴ * rhs` without materialising the adjoint.
    pub fn adjoint_mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.rows, rhs.rows, "row counts differ");
        let mut out = Self::zeros(self.cols, rhs.cols);
        for k in 0..self.rows {
            let lhs_row = &self.data[k * self.cols..(k + 1) * self.cols];
            let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
            for (r, a) in lhs_row.iter().enumerate() {
                let a = a.conj();
                let out_row = &mut out.data[r * rhs.cols..(r + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * *b;
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    /// Largest entry of `|selfᴴ self − I|`.
    pub fn unitarity_error(&self) -> T {
        let gram = self.adjoint_mul(self);
        gram.max_abs_diff(&Self::identity(self.cols))
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Householder QR: `self = Q R` with `Q` unitary (`rows × rows`) and `R`
    /// upper triangular (`rows × cols`).
    pub fn qr(&self) -> (Self, Self) {
        let (m, n) = (self.rows, self.cols);
        let mut r = self.clone();
        let mut reflectors: Vec<(usize, Vec<Complex<T>>)> = Vec::new();
        for k in 0..m.min(n) {
            let x: Vec<Complex<T>> = (k..m).map(|i| r[(i, k)]).collect();
            let norm_x = x.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
            if norm_x.is_zero() {
                continue;
            }
            let phase = if x[0].norm().is_zero() {
                Complex::one()
            } else {
                x[0] / x[0].norm()
            };
            let alpha = -phase * norm_x;
            let mut v = x;
            v[0] -= alpha;
            let norm_v = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
            if norm_v.is_zero() {
                continue;
            }
            for z in v.iter_mut() {
                *z = *z / norm_v;
            }
            apply_reflector(&mut r, k, &v);
            for i in (k + 1)..m {
                r[(i, k)] = Complex::zero();
            }
            r[(k, k)] = alpha;
            reflectors.push((k, v));
        }
        let mut q = Self::identity(m);
        for (k, v) in reflectors.iter().rev() {
            apply_reflector(&mut q, *k, v);
        }
        (q, r)
    }

    /// Lower Cholesky factor `L` of a Hermitian positive definite matrix.
    pub fn cholesky(&self) -> Result<Self> {
        assert!(self.is_square(), "Cholesky needs a square matrix");
        let n = self.rows;
        let scale = (0..n)
            .map(|i| self[(i, i)].re.abs())
            .fold(T::zero(), T::max);
        let floor = scale * T::epsilon() * T::from_index(n.max(1));
        let mut l = Self::zeros(n, n);
        for j in 0..n {
            let mut d = self[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d > floor) {
                return Err(Error::NotPositiveDefinite);
            }
            let djj = d.sqrt();
            l[(j, j)] = Complex::new(djj, T::zero());
            for i in (j + 1)..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / djj;
            }
        }
        Ok(l)
    }

    /// `log2 det(self)` for Hermitian positive definite input.
    pub fn log2_det_hpd(&self) -> Result<T> {
        let l = self.cholesky()?;
        Ok((0..self.rows).map(|i| l[(i, i)].re.log2()).sum::<T>() * T::lit(2.0))
    }

    /// Diagonal of the inverse of a Hermitian positive definite matrix.
    pub fn inverse_diagonal_hpd(&self) -> Result<Vec<T>> {
        let l = self.cholesky()?;
        let n = self.rows;
        // Column k of L⁻¹ by forward substitution; [(L Lᴴ)⁻¹]_kk = Σ_i |(L⁻¹)_ik|².
        let mut out = vec![T::zero(); n];
        let mut col = vec![Complex::<T>::zero(); n];
        for k in 0..n {
            for (i, c) in col.iter_mut().enumerate() {
                *c = if i == k {
                    Complex::one()
                } else {
                    Complex::zero()
                };
            }
            for i in 0..n {
                let mut s = col[i];
                for j in 0..i {
                    s -= l[(i, j)] * col[j];
                }
                col[i] = s / l[(i, i)];
            }
            out[k] = col.iter().map(|c| c.norm_sqr()).sum();
        }
        Ok(out)
    }
}

/// Applies `I − 2 v vᴴ` to rows `k..` of `a`.
fn apply_reflector<T: Scalar>(a: &mut CMatrix<T>, k: usize, v: &[Complex<T>]) {
    let two = T::lit(2.0);
    for c in 0..a.cols {
        let mut dot = Complex::<T>::zero();
        for (i, vi) in v.iter().enumerate() {
            dot += vi.conj() * a[(k + i, c)];
        }
        if dot.is_zero() {
            continue;
        }
        let dot = dot * two;
        for (i, vi) in v.iter().enumerate() {
            let upd = *vi * dot;
            a[(k + i, c)] -= upd;
        }
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex<T> {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex<T> {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl<'a, T: Scalar> Mul<&'a CMatrix<T>> for &'a CMatrix<T> {
    type Output = CMatrix<T>;

    fn mul(self, rhs: &'a CMatrix<T>) -> CMatrix<T> {
        self.matmul(rhs)
    }
}

impl<T: fmt::Debug> fmt::Debug for CMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = &self.data[r * self.cols + c];
                write!(f, "({:?}, {:?}) ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Output of [`jacobi_svd`]: `a = u · diag(sigma) · vᴴ`, singular values
/// sorted in descending order.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    pub u: CMatrix<T>,
    pub sigma: Vec<T>,
    pub v: CMatrix<T>,
}

/// One-sided (Hestenes) Jacobi SVD of a complex matrix with `rows >= cols`.
///
/// Column pairs are rotated until every pair is orthogonal to within
/// `tolerance` relative to the product of their norms. Fails with
/// [`Error::NoConvergence`] after `max_sweeps` full sweeps.
pub fn jacobi_svd<T: Scalar>(a: &CMatrix<T>, max_sweeps: usize, tolerance: T) -> Result<Svd<T>> {
    if a.rows < a.cols {
        let t = jacobi_svd(&a.adjoint(), max_sweeps, tolerance)?;
        return Ok(Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        });
    }
    let (m, n) = (a.rows, a.cols);
    // Column-major working copies so the rotations touch contiguous memory.
    let mut cols: Vec<Vec<Complex<T>>> = (0..n).map(|c| a.column(c)).collect();
    let mut vcols: Vec<Vec<Complex<T>>> = (0..n)
        .map(|c| {
            let mut e = vec![Complex::zero(); n];
            e[c] = Complex::one();
            e
        })
        .collect();
    let fro2 = a.as_slice().iter().map(|z| z.norm_sqr()).sum::<T>();
    let abs_floor = fro2 * T::epsilon() * T::epsilon();

    let mut converged = n < 2;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (alpha, beta, gamma) = {
                    let (cp, cq) = (&cols[p], &cols[q]);
                    let mut alpha = T::zero();
                    let mut beta = T::zero();
                    let mut gamma = Complex::<T>::zero();
                    for (x, y) in cp.iter().zip(cq) {
                        alpha += x.norm_sqr();
                        beta += y.norm_sqr();
                        gamma += x.conj() * *y;
                    }
                    (alpha, beta, gamma)
                };
                let g = gamma.norm();
                if g <= tolerance * (alpha * beta).sqrt() || g <= abs_floor {
                    continue;
                }
                rotated = true;
                let phase_conj = (gamma / g).conj();
                let zeta = (beta - alpha) / (T::lit(2.0) * g);
                let sign = if zeta < T::zero() {
                    -T::one()
                } else {
                    T::one()
                };
                let t = sign / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate_pair(&mut cols, p, q, phase_conj, c, s);
                rotate_pair(&mut vcols, p, q, phase_conj, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: max_sweeps });
    }

    let norms: Vec<T> = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        norms[j]
            .partial_cmp(&norms[i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let sigma_max = order.first().map(|&i| norms[i]).unwrap_or(T::zero());
    let null_floor = sigma_max * T::epsilon() * T::from_index(m.max(1));

    let mut ucols: Vec<Vec<Complex<T>>> = Vec::with_capacity(m);
    let mut deficient = Vec::new();
    for (slot, &j) in order.iter().enumerate() {
        if norms[j] > null_floor {
            let inv = T::one() / norms[j];
            ucols.push(cols[j].iter().map(|z| *z * inv).collect());
        } else {
            ucols.push(vec![Complex::zero(); m]);
            deficient.push(slot);
        }
    }
    // Extra left singular vectors for tall inputs.
    for _ in n..m {
        ucols.push(vec![Complex::zero(); m]);
        deficient.push(ucols.len() - 1);
    }
    complete_orthonormal(&mut ucols, &deficient);

    let sigma: Vec<T> = order.iter().map(|&j| norms[j]).collect();
    let u = CMatrix::from_fn(m, m, |r, c| ucols[c][r]);
    let v = CMatrix::from_fn(n, n, |r, c| vcols[order[c]][r]);
    Ok(Svd { u, sigma, v })
}

fn rotate_pair<T: Scalar>(
    cols: &mut [Vec<Complex<T>>],
    p: usize,
    q: usize,
    phase_conj: Complex<T>,
    c: T,
    s: T,
) {
    let (left, right) = cols.split_at_mut(q);
    let (cp, cq) = (&mut left[p], &mut right[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let xp = *x;
        let yq = *y * phase_conj;
        *x = xp * c - yq * s;
        *y = xp * s + yq * c;
    }
}

/// Replaces the listed (zero) columns with unit vectors orthogonal to all
/// other columns, using Gram–Schmidt on the standard basis.
fn complete_orthonormal<T: Scalar>(cols: &mut [Vec<Complex<T>>], slots: &[usize]) {
    let m = cols.first().map(Vec::len).unwrap_or(0);
    let mut filled: Vec<bool> = vec![true; cols.len()];
    for &s in slots {
        filled[s] = false;
    }
    let mut basis = 0;
    for &slot in slots {
        while basis < m {
            let mut w = vec![Complex::<T>::zero(); m];
            w[basis] = Complex::one();
            basis += 1;
            // Two passes of classical Gram–Schmidt keep the result orthogonal
            // to working precision.
            for _ in 0..2 {
                for (j, col) in cols.iter().enumerate() {
                    if !filled[j] {
                        continue;
                    }
                    let dot: Complex<T> = col.iter().zip(&w).map(|(a, b)| a.conj() * *b).sum();
                    for (wi, ci) in w.iter_mut().zip(col) {
                        *wi -= *ci * dot;
                    }
                }
            }
            let norm = w.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
            if norm > T::lit(0.5) {
                cols[slot] = w.into_iter().map(|z| z / norm).collect();
                filled[slot] = true;
                break;
            }
        }
    }
}
