//! Dense complex vectors and matrices sized for desk-scale state spaces.
//!
//! Matrices are stored row-major: entry `(i, j)` of an `r x c` matrix lives at
//! `data[i * c + j]`. Every index computation in the crate assumes this layout.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest row or column count a dense matrix may have.
pub const MAX_DENSE_DIM: usize = 1 << 12;

/// Largest register width the statevector simulator accepts.
pub const MAX_STATEVECTOR_QUBITS: usize = 24;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn check_finite(entries: &[Complex64]) -> Result<()> {
    match entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        Some(i) => Err(Error::NonFinite(format!("entry {i} is {}", entries[i]))),
        None => Ok(()),
    }
}

/// A column vector of complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    entries: Vec<Complex64>,
}

impl ComplexVector {
    /// Wraps `entries`, rejecting empty input and NaN/Inf components.
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Shape("vector must have positive dimension".into()));
        }
        check_finite(&entries)?;
        Ok(Self { entries })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: vec![ZERO; dim],
        }
    }

    /// The canonical basis vector `|index>` of dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.entries[index] = ONE;
        v
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.entries
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.entries
    }

    pub fn norm2(&self) -> f64 {
        norm2(self)
    }

    /// `<self|other>`, conjugating the left argument.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::Shape(format!(
                "inner product of dims {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self.entries.iter().zip(&other.entries).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::Shape(format!("compare dims {} and {}", self.dim(), other.dim())));
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn kron(&self, other: &Self) -> Self {
        let mut entries = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.entries {
            entries.extend(other.entries.iter().map(|b| a * b));
        }
        Self { entries }
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.entries[i]
    }
}

impl IndexMut<usize> for ComplexVector {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.entries[i]
    }
}

/// Euclidean norm.
pub fn norm2(v: &ComplexVector) -> f64 {
    v.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// A dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, " ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, " {:+.4}{:+.4}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

fn check_dense_dims(rows: usize, cols: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(Error::Shape(format!("matrix dims must be positive, got {rows}x{cols}")));
    }
    if rows > MAX_DENSE_DIM || cols > MAX_DENSE_DIM {
        return Err(Error::Size(format!(
            "dense matrix {rows}x{cols} exceeds the {MAX_DENSE_DIM} dimension cap"
        )));
    }
    Ok(())
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        check_dense_dims(rows, cols)?;
        Ok(Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim, dim)?;
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        Ok(m)
    }

    /// Builds a matrix from row-major `data`.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        check_dense_dims(rows, cols)?;
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        check_finite(&data)?;
        Ok(Self { rows, cols, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        let data = rows
            .iter()
            .flat_map(|row| row.iter().map(|&x| Complex64::new(x, 0.0)))
            .collect();
        Self::from_row_major(r, c, data)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        let mut m = Self::zeros(rows, cols)?;
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        check_finite(&m.data)?;
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector {
            entries: (0..self.rows).map(|i| self[(i, j)]).collect(),
        }
    }

    pub fn set_column(&mut self, j: usize, v: &ComplexVector) -> Result<()> {
        if v.dim() != self.rows {
            return Err(Error::Shape(format!(
                "column of dim {} into {} rows",
                v.dim(),
                self.rows
            )));
        }
        for (i, z) in v.as_slice().iter().enumerate() {
            self[(i, j)] = *z;
        }
        Ok(())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn transpose(&self) -> Self {
        let mut data = vec![ZERO; self.data.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut t = self.transpose();
        t.data.iter_mut().for_each(|z| *z = z.conj());
        t
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols)?;
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let src = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &ComplexVector) -> Result<ComplexVector> {
        if self.cols != v.dim() {
            return Err(Error::Shape(format!(
                "{}x{} matrix applied to dim {}",
                self.rows,
                self.cols,
                v.dim()
            )));
        }
        let entries = (0..self.rows)
            .map(|i| self.row(i).iter().zip(v.as_slice()).map(|(a, b)| a * b).sum())
            .collect();
        Ok(ComplexVector { entries })
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// The `rows x cols` sub-matrix starting at `(row0, col0)`.
    pub fn submatrix(&self, row0: usize, col0: usize, rows: usize, cols: usize) -> Result<Self> {
        if row0 + rows > self.rows || col0 + cols > self.cols {
            return Err(Error::Shape(format!(
                "block {rows}x{cols} at ({row0},{col0}) outside {}x{}",
                self.rows, self.cols
            )));
        }
        Self::from_fn(rows, cols, |i, j| self[(row0 + i, col0 + j)])
    }

    /// Estimates the spectral norm by power iteration on `A^dagger A`.
    ///
    /// The start vector has distinct, non-symmetric entries so that it is not
    /// orthogonal to the dominant singular subspace of the circulant operators
    /// used in this crate.
    pub fn spectral_norm(&self, max_iter: usize, tol: f64) -> f64 {
        let gram = match self.adjoint().matmul(self) {
            Ok(g) => g,
            Err(_) => return f64::NAN,
        };
        let mut v = ComplexVector {
            entries: (0..self.cols)
                .map(|j| Complex64::new(1.0 + 0.37 * j as f64, 0.11 * (j % 5) as f64))
                .collect(),
        };
        let n0 = v.norm2();
        v = v.scale(Complex64::new(1.0 / n0, 0.0));
        let mut sigma2 = 0.0;
        for _ in 0..max_iter {
            let w = gram.matvec(&v).expect("square gram");
            let nw = w.norm2();
            if nw == 0.0 {
                return 0.0;
            }
            let done = (nw - sigma2).abs() <= tol * nw;
            sigma2 = nw;
            v = w.scale(Complex64::new(1.0 / nw, 0.0));
            if done {
                break;
            }
        }
        sigma2.sqrt()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Kronecker product: `kron(a, b)[i*p + k, j*q + l] = a[i, j] * b[k, l]` for `b` of shape `p x q`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a
        .rows
        .checked_mul(b.rows)
        .ok_or_else(|| Error::Size("kron row overflow".into()))?;
    let cols = a
        .cols
        .checked_mul(b.cols)
        .ok_or_else(|| Error::Size("kron column overflow".into()))?;
    let mut out = ComplexMatrix::zeros(rows, cols)?;
    for i in 0..a.rows {
        for j in 0..a.cols {
            let s = a[(i, j)];
            if s == ZERO {
                continue;
            }
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = s * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// True iff every entry of `U^dagger U - I` is at most `tol` in modulus.
pub fn is_unitary(u: &ComplexMatrix, tol: f64) -> Result<bool> {
    Ok(unitarity_residual(u)? <= tol)
}

/// `max |U^dagger U - I|` over entries.
pub fn unitarity_residual(u: &ComplexMatrix) -> Result<f64> {
    if !u.is_square() {
        return Err(Error::Shape(format!("unitarity of a {}x{} matrix", u.rows, u.cols)));
    }
    let gram = u.adjoint().matmul(u)?;
    gram.max_abs_diff(&ComplexMatrix::identity(u.rows)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    #[test]
    fn kron_of_identities() {
        let i2 = ComplexMatrix::identity(2).unwrap();
        assert_eq!(kron(&i2, &i2).unwrap(), ComplexMatrix::identity(4).unwrap());
    }

    #[test]
    fn kron_flips_leading_qubit() {
        let xi = kron(&pauli_x(), &ComplexMatrix::identity(2).unwrap()).unwrap();
        let out = xi.matvec(&ComplexVector::basis(4, 0b00)).unwrap();
        assert_eq!(out, ComplexVector::basis(4, 0b10));
    }

    #[test]
    fn kron_index_formula() {
        let a = ComplexMatrix::from_fn(2, 3, |i, j| c((i * 3 + j) as f64 + 1.0)).unwrap();
        let b = ComplexMatrix::from_fn(3, 2, |i, j| Complex64::new(i as f64, j as f64 - 0.5)).unwrap();
        let k = kron(&a, &b).unwrap();
        assert_eq!((k.rows(), k.cols()), (6, 6));
        for i in 0..2 {
            for j in 0..3 {
                for p in 0..3 {
                    for q in 0..2 {
                        assert_eq!(k[(i * 3 + p, j * 2 + q)], a[(i, j)] * b[(p, q)]);
                    }
                }
            }
        }
    }

    #[test]
    fn kron_respects_cap() {
        let big = ComplexMatrix::identity(MAX_DENSE_DIM).unwrap();
        let i2 = ComplexMatrix::identity(2).unwrap();
        assert!(matches!(kron(&big, &i2), Err(Error::Size(_))));
    }

    #[test]
    fn norms() {
        assert_eq!(ComplexVector::basis(4, 2).norm2(), 1.0);
        assert_eq!(ComplexVector::zeros(3).norm2(), 0.0);
        let v = ComplexVector::from_real(&[0.6, 0.8]).unwrap();
        assert!((v.norm2() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(matches!(
            ComplexVector::from_real(&[1.0, f64::NAN]),
            Err(Error::NonFinite(_))
        ));
        assert!(matches!(
            ComplexMatrix::from_real_rows(&[&[f64::INFINITY]]),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn unitary_checks() {
        assert!(is_unitary(&ComplexMatrix::identity(8).unwrap(), 1e-12).unwrap());
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = ComplexMatrix::from_real_rows(&[&[s, s], &[s, -s]]).unwrap();
        assert!(is_unitary(&h, 1e-12).unwrap());
        let rect = ComplexMatrix::zeros(2, 3).unwrap();
        assert!(matches!(is_unitary(&rect, 1e-12), Err(Error::Shape(_))));
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let d = ComplexMatrix::from_real_rows(&[&[0.5, 0.0, 0.0], &[0.0, -2.0, 0.0], &[0.0, 0.0, 1.0]]).unwrap();
        assert!((d.spectral_norm(500, 1e-15) - 2.0).abs() < 1e-10);
    }

    #[test]
    fn matmul_shapes() {
        let a = ComplexMatrix::zeros(2, 3).unwrap();
        assert!(matches!(a.matmul(&a), Err(Error::Shape(_))));
    }
}
