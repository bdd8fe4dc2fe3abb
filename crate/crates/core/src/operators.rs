//! Reference finite-difference matrices on the periodic unit grid, and sampled
//! grid functions.
//!
//! A `D`-dimensional grid with `N = 2^n` points per axis is vectorized with
//! axis 0 varying fastest: the point `(j0 h, j1 h, ...)` sits at index
//! `j0 + j1 N + ... + j_{D-1} N^{D-1}`, i.e. the ket `|j_{D-1}>...|j_1>|j_0>`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{kron, ComplexMatrix, ComplexVector, MAX_STATEVECTOR_QUBITS};

/// A uniform periodic grid on `[0,1)^D`; the point `x = 1` is excluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    dim: usize,
    n: usize,
}

impl GridSpec {
    pub fn new(dim: usize, n: usize) -> Result<Self> {
        if dim == 0 || n == 0 {
            return Err(Error::Parameter(format!(
                "grid needs D >= 1 and n >= 1, got D={dim}, n={n}"
            )));
        }
        if dim * n > MAX_STATEVECTOR_QUBITS {
            return Err(Error::Size(format!(
                "grid with D*n = {} exceeds {MAX_STATEVECTOR_QUBITS}",
                dim * n
            )));
        }
        Ok(Self { dim, n })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Qubits per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Points per axis, `2^n`.
    pub fn points_per_axis(&self) -> usize {
        1 << self.n
    }

    pub fn h(&self) -> f64 {
        1.0 / self.points_per_axis() as f64
    }

    /// `N_D = 2^(n D)`.
    pub fn total_points(&self) -> usize {
        1 << (self.n * self.dim)
    }

    /// Grid coordinates of vectorized index `k`, axis 0 first.
    pub fn point(&self, k: usize) -> Vec<f64> {
        let mask = self.points_per_axis() - 1;
        (0..self.dim)
            .map(|d| ((k >> (d * self.n)) & mask) as f64 * self.h())
            .collect()
    }
}

/// Grid samples of a real field, normalized to unit 2-norm.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub spec: GridSpec,
    pub values: ComplexVector,
    /// 2-norm of the samples before normalization.
    pub raw_norm: f64,
}

/// Samples `f` on every grid point and normalizes.
pub fn sample_function(f: impl Fn(&[f64]) -> f64, spec: GridSpec) -> Result<GridFunction> {
    let samples: Vec<f64> = (0..spec.total_points()).map(|k| f(&spec.point(k))).collect();
    if let Some(bad) = samples.iter().find(|x| !x.is_finite()) {
        return Err(Error::NonFinite(format!("sample value {bad}")));
    }
    let raw_norm = samples.iter().map(|x| x * x).sum::<f64>().sqrt();
    if raw_norm == 0.0 {
        return Err(Error::Degenerate("all samples are zero".into()));
    }
    let values = ComplexVector::from_real(&samples.iter().map(|x| x / raw_norm).collect::<Vec<_>>())?;
    Ok(GridFunction { spec, values, raw_norm })
}

fn circulant(n: usize, stencil: &[(isize, f64)]) -> Result<ComplexMatrix> {
    let size = 1usize << n;
    let mut m = ComplexMatrix::zeros(size, size)?;
    for i in 0..size {
        for &(offset, value) in stencil {
            let j = (i as isize + offset).rem_euclid(size as isize) as usize;
            m[(i, j)] += Complex64::new(value, 0.0);
        }
    }
    Ok(m)
}

/// `L_{1,h}`: `(1, -2, 1) / h^2` with periodic wraparound.
pub fn laplacian_1d(n: usize) -> Result<ComplexMatrix> {
    check_n(n)?;
    let inv_h2 = (1u64 << (2 * n)) as f64;
    circulant(n, &[(-1, inv_h2), (0, -2.0 * inv_h2), (1, inv_h2)])
}

/// `4 D / h^2`, the largest eigenvalue magnitude of `L_{D,h}`.
pub fn lambda_max(dim: usize, n: usize) -> f64 {
    let inv_h = (1u64 << n) as f64;
    4.0 * dim as f64 * inv_h * inv_h
}

/// `I ⊗ ... ⊗ op ⊗ ... ⊗ I` with `op` acting on axis `axis` of a `dim`-axis grid.
pub fn embed_axis(op: &ComplexMatrix, axis: usize, dim: usize) -> Result<ComplexMatrix> {
    if axis >= dim {
        return Err(Error::Parameter(format!("axis {axis} of a {dim}-dimensional grid")));
    }
    let n_axis = op.rows();
    // axis d has D-1-d identities to its left and d to its right
    let left = ComplexMatrix::identity(n_axis.pow((dim - 1 - axis) as u32))?;
    let right = ComplexMatrix::identity(n_axis.pow(axis as u32))?;
    kron(&kron(&left, op)?, &right)
}

/// `L_{D,h} = sum_d I ⊗ ... ⊗ L_{1,h} ⊗ ... ⊗ I`.
pub fn laplacian_dd(dim: usize, n: usize) -> Result<ComplexMatrix> {
    GridSpec::new(dim, n)?;
    let l1 = laplacian_1d(n)?;
    let mut total = embed_axis(&l1, 0, dim)?;
    for d in 1..dim {
        total = total.add(&embed_axis(&l1, d, dim)?)?;
    }
    Ok(total)
}

/// `L_{D,h} / lambda_max`, spectral norm one.
pub fn scaled_laplacian_dd(dim: usize, n: usize) -> Result<ComplexMatrix> {
    Ok(laplacian_dd(dim, n)?.scale_real(1.0 / lambda_max(dim, n)))
}

pub fn scaled_laplacian_1d(n: usize) -> Result<ComplexMatrix> {
    scaled_laplacian_dd(1, n)
}

/// `D_{1,h}`: central difference `(u_{j+1} - u_{j-1}) / 2h`, periodic.
pub fn central_difference_1d(n: usize) -> Result<ComplexMatrix> {
    check_n(n)?;
    let c = (1u64 << n) as f64 / 2.0;
    circulant(n, &[(-1, -c), (1, c)])
}

/// `Q_{1,h}`: trapezoid weights `h/2 (1, 2, 1)` around each point, periodic.
pub fn trapezoid_1d(n: usize) -> Result<ComplexMatrix> {
    check_n(n)?;
    let half_h = 0.5 / (1u64 << n) as f64;
    circulant(n, &[(-1, half_h), (0, 2.0 * half_h), (1, half_h)])
}

/// `h D_{1,h}` on axis `axis` of the two-dimensional grid.
pub fn first_order_tensorized(axis: usize, dim: usize, n: usize) -> Result<ComplexMatrix> {
    if dim != 2 {
        return Err(Error::Parameter(format!(
            "first-order operators are built for D = 2, got D = {dim}"
        )));
    }
    let h = 1.0 / (1u64 << n) as f64;
    embed_axis(&central_difference_1d(n)?.scale_real(h), axis, dim)
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_STATEVECTOR_QUBITS {
        return Err(Error::Parameter(format!(
            "qubits per axis must be in 1..={MAX_STATEVECTOR_QUBITS}, got {n}"
        )));
    }
    Ok(())
}

/// Matrix-free `L~_{D,h} v`: each axis contributes `(v[j-1] - 2 v[j] + v[j+1]) / (4 D)`.
pub fn apply_scaled_laplacian(spec: GridSpec, v: &[Complex64]) -> Result<Vec<Complex64>> {
    if v.len() != spec.total_points() {
        return Err(Error::Shape(format!(
            "vector of dim {} on a grid of {}",
            v.len(),
            spec.total_points()
        )));
    }
    let big_n = spec.points_per_axis();
    let weight = 1.0 / (4.0 * spec.dim() as f64);
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    for d in 0..spec.dim() {
        let stride = 1usize << (d * spec.n());
        for (k, o) in out.iter_mut().enumerate() {
            let j = (k / stride) % big_n;
            let up = if j + 1 == big_n {
                k + stride - big_n * stride
            } else {
                k + stride
            };
            let down = if j == 0 { k + (big_n - 1) * stride } else { k - stride };
            *o += (v[up] - 2.0 * v[k] + v[down]) * weight;
        }
    }
    Ok(out)
}

/// Named test fields with closed-form Laplacians.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionFamily {
    /// `sin(2 pi x)` in one dimension.
    Sin1,
    /// `cos(6 pi x)` in one dimension.
    Cos3,
    /// `prod_d sin(2 pi x_d)` in any dimension.
    SinProd,
}

impl FunctionFamily {
    pub fn name(&self) -> &'static str {
        match self {
            FunctionFamily::Sin1 => "sin1",
            FunctionFamily::Cos3 => "cos3",
            FunctionFamily::SinProd => "sinprod",
        }
    }

    pub fn supports_dim(&self, dim: usize) -> bool {
        match self {
            FunctionFamily::Sin1 | FunctionFamily::Cos3 => dim == 1,
            FunctionFamily::SinProd => dim >= 1,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            FunctionFamily::Sin1 => (2.0 * PI * x[0]).sin(),
            FunctionFamily::Cos3 => (6.0 * PI * x[0]).cos(),
            FunctionFamily::SinProd => x.iter().map(|xi| (2.0 * PI * xi).sin()).product(),
        }
    }

    /// `mu` with `L_D v = -mu v`; every family is a Laplacian eigenfunction.
    pub fn laplacian_eigenvalue(&self, dim: usize) -> f64 {
        match self {
            FunctionFamily::Sin1 => 4.0 * PI * PI,
            FunctionFamily::Cos3 => 36.0 * PI * PI,
            FunctionFamily::SinProd => dim as f64 * 4.0 * PI * PI,
        }
    }

    /// Exact `L_D v` at `x`.
    pub fn laplacian(&self, x: &[f64]) -> f64 {
        -self.laplacian_eigenvalue(x.len()) * self.eval(x)
    }

    pub fn sample(&self, spec: GridSpec) -> Result<GridFunction> {
        if !self.supports_dim(spec.dim()) {
            return Err(Error::Parameter(format!(
                "family {} is one-dimensional, got D = {}",
                self.name(),
                spec.dim()
            )));
        }
        sample_function(|x| self.eval(x), spec)
    }
}

impl fmt::Display for FunctionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FunctionFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sin1" => Ok(FunctionFamily::Sin1),
            "cos3" => Ok(FunctionFamily::Cos3),
            "sinprod" => Ok(FunctionFamily::SinProd),
            other => Err(Error::Parameter(format!("unknown function family {other:?}"))),
        }
    }
}
