//! Block extraction, verification, success probabilities and sweeps.

use std::fmt;
use std::io::Write;
use std::time::Instant;

use num_complex::Complex64;

use crate::circuit::unitary;
use crate::encodings::{encode_laplace_dd, encode_laplace_lcu, BlockEncoding};
use crate::error::{Error, Result};
use crate::linalg::{unitarity_residual, ComplexMatrix, ComplexVector, MAX_DENSE_DIM, MAX_STATEVECTOR_QUBITS, ZERO};
use crate::operators::{apply_scaled_laplacian, lambda_max, FunctionFamily, GridFunction, GridSpec};

/// Largest `N_D^2 * 2^q` for which the Gram-matrix unitarity check runs.
const GRAM_BUDGET: u128 = 1 << 32;

fn check_simulable(e: &BlockEncoding) -> Result<()> {
    if e.num_qubits() > MAX_STATEVECTOR_QUBITS {
        return Err(Error::Size(format!(
            "{} needs {} qubits, over the {MAX_STATEVECTOR_QUBITS}-qubit simulator cap",
            e.label(),
            e.num_qubits()
        )));
    }
    Ok(())
}

fn check_ancilla_index(e: &BlockEncoding, idx: usize) -> Result<()> {
    if idx >= 1 << e.ancillas {
        return Err(Error::Index(format!(
            "ancilla index {idx} out of range for m = {}",
            e.ancillas
        )));
    }
    Ok(())
}

/// Output state of the circuit on the basis input `|col>|j>`.
fn run_basis(e: &BlockEncoding, col: usize, j: usize) -> Result<Vec<Complex64>> {
    let mut amps = vec![ZERO; 1 << e.num_qubits()];
    amps[col * e.system_dim + j] = Complex64::new(1.0, 0.0);
    e.circuit.apply_in_place(&mut amps)?;
    Ok(amps)
}

/// Blocks `(r, col)` for each `r` in `rows`, using `N_D` circuit applications in total.
pub fn extract_block_column(e: &BlockEncoding, col: usize, rows: &[usize]) -> Result<Vec<ComplexMatrix>> {
    check_simulable(e)?;
    check_ancilla_index(e, col)?;
    for &r in rows {
        check_ancilla_index(e, r)?;
    }
    let nd = e.system_dim;
    if nd > MAX_DENSE_DIM {
        return Err(Error::Size(format!(
            "block of dim {nd} exceeds the dense cap {MAX_DENSE_DIM}"
        )));
    }
    let mut blocks = vec![ComplexMatrix::zeros(nd, nd)?; rows.len()];
    for j in 0..nd {
        let out = run_basis(e, col, j)?;
        for (b, &r) in blocks.iter_mut().zip(rows) {
            b.set_column(j, &ComplexVector::new(out[r * nd..(r + 1) * nd].to_vec())?)?;
        }
    }
    Ok(blocks)
}

/// Block `(row, col)` of the encoding unitary, without forming the full unitary.
pub fn extract_block(e: &BlockEncoding, row: usize, col: usize) -> Result<ComplexMatrix> {
    Ok(extract_block_column(e, col, &[row])?.remove(0))
}

/// Outcome of comparing extracted blocks against their references.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub label: String,
    /// Largest entrywise `|block - reference|` over all checked blocks.
    pub max_deviation: f64,
    /// `max |U^dagger U - I|`, over the full unitary when it fits the dense
    /// cap and otherwise over the Gram matrix of the block-column-0 outputs
    /// (the first 64 of them when all `N_D` would be too costly).
    pub unitarity_residual: f64,
    pub blocks_checked: usize,
    pub tolerance: f64,
    pub passed: bool,
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "encoding: {}", self.label)?;
        writeln!(f, "blocks checked: {}", self.blocks_checked)?;
        writeln!(f, "max deviation: {:.3e}", self.max_deviation)?;
        writeln!(f, "unitarity residual: {:.3e}", self.unitarity_residual)?;
        writeln!(f, "tolerance: {:.3e}", self.tolerance)?;
        write!(f, "result: {}", if self.passed { "PASS" } else { "FAIL" })
    }
}

/// Unitarity residual of the encoding circuit (see [`VerificationReport::unitarity_residual`]).
pub fn encoding_unitarity_residual(e: &BlockEncoding) -> Result<f64> {
    check_simulable(e)?;
    let q = e.num_qubits();
    if 1usize << q <= MAX_DENSE_DIM {
        return unitarity_residual(&unitary(&e.circuit)?);
    }
    let nd = e.system_dim;
    let cost = ((nd as u128) * (nd as u128)) << q;
    let count = if cost <= GRAM_BUDGET { nd } else { nd.min(64) };
    let columns: Vec<Vec<Complex64>> = (0..count).map(|j| run_basis(e, 0, j)).collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for (a, ca) in columns.iter().enumerate() {
        for (b, cb) in columns.iter().enumerate().skip(a) {
            let g: Complex64 = ca.iter().zip(cb).map(|(x, y)| x.conj() * y).sum();
            let expect = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((g - expect).norm());
        }
    }
    Ok(worst)
}

fn finish_report(e: &BlockEncoding, max_deviation: f64, blocks_checked: usize, tol: f64) -> Result<VerificationReport> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Parameter(format!("tolerance must be positive, got {tol}")));
    }
    let unitarity_residual = encoding_unitarity_residual(e)?;
    Ok(VerificationReport {
        label: e.label(),
        max_deviation,
        unitarity_residual,
        blocks_checked,
        tolerance: tol,
        passed: max_deviation <= tol && unitarity_residual <= tol,
    })
}

/// Compares block `(0, 0)` against `alpha * target`.
pub fn verify_encoding(e: &BlockEncoding, target: &ComplexMatrix, tol: f64) -> Result<VerificationReport> {
    if target.rows() != e.system_dim || target.cols() != e.system_dim {
        return Err(Error::Shape(format!(
            "target is {}x{}, system dim is {}",
            target.rows(),
            target.cols(),
            e.system_dim
        )));
    }
    let block = extract_block(e, 0, 0)?;
    let deviation = block.max_abs_diff(&target.scale_real(e.alpha))?;
    finish_report(e, deviation, 1, tol)
}

/// Compares every block in [`BlockEncoding::reference_blocks`].
pub fn verify_block_pattern(e: &BlockEncoding, tol: f64) -> Result<VerificationReport> {
    let refs = e.reference_blocks()?;
    let mut cols: Vec<usize> = refs.iter().map(|b| b.col).collect();
    cols.sort_unstable();
    cols.dedup();
    let mut worst = 0.0f64;
    for col in cols {
        let group: Vec<_> = refs.iter().filter(|b| b.col == col).collect();
        let rows: Vec<usize> = group.iter().map(|b| b.row).collect();
        let blocks = extract_block_column(e, col, &rows)?;
        for (got, want) in blocks.iter().zip(&group) {
            worst = worst.max(got.max_abs_diff(&want.matrix)?);
        }
    }
    finish_report(e, worst, refs.len(), tol)
}

/// How the success probability is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// `||alpha A~ v||^2` from the reference operator.
    Matrix,
    /// Simulate the circuit on `|0>|v>` and measure ancilla mass at `|0>`.
    Circuit,
}

fn check_function(e: &BlockEncoding, v: &GridFunction) -> Result<()> {
    if v.values.dim() != e.system_dim {
        return Err(Error::Shape(format!(
            "function has {} samples, encoding acts on dim {}",
            v.values.dim(),
            e.system_dim
        )));
    }
    Ok(())
}

/// Full output state `U (|0> (x) v)`.
pub fn apply_to_function(e: &BlockEncoding, v: &GridFunction) -> Result<Vec<Complex64>> {
    check_function(e, v)?;
    check_simulable(e)?;
    let mut amps = vec![ZERO; 1 << e.num_qubits()];
    amps[..e.system_dim].copy_from_slice(v.values.as_slice());
    e.circuit.apply_in_place(&mut amps)?;
    Ok(amps)
}

/// Probability mass on each ancilla basis state after applying the circuit to `|0>|v>`.
pub fn ancilla_masses(e: &BlockEncoding, v: &GridFunction) -> Result<Vec<f64>> {
    let amps = apply_to_function(e, v)?;
    Ok(amps
        .chunks(e.system_dim)
        .map(|c| c.iter().map(|a| a.norm_sqr()).sum())
        .collect())
}

/// Probability of measuring every ancilla in `|0>`.
pub fn success_probability(e: &BlockEncoding, v: &GridFunction, route: Route) -> Result<f64> {
    check_function(e, v)?;
    match route {
        Route::Matrix => Ok(e.encoded_action(&v.values)?.norm2().powi(2)),
        Route::Circuit => {
            let amps = apply_to_function(e, v)?;
            Ok(amps[..e.system_dim].iter().map(|a| a.norm_sqr()).sum())
        }
    }
}

/// Samples `f` on `spec` without normalization.
fn raw_samples(f: &impl Fn(&[f64]) -> f64, spec: GridSpec) -> Vec<f64> {
    (0..spec.total_points()).map(|k| f(&spec.point(k))).collect()
}

/// `max_j |L_{D,h} v (x_j) - exact(x_j)|`, with `L_{D,h} v` evaluated as
/// `lambda_max ||v|| L~ (v / ||v||)`.
pub fn fd_error_max(v: impl Fn(&[f64]) -> f64, exact_laplacian: impl Fn(&[f64]) -> f64, spec: GridSpec) -> Result<f64> {
    let samples = raw_samples(&v, spec);
    let values = ComplexVector::from_real(&samples)?;
    let scaled = apply_scaled_laplacian(spec, values.as_slice())?;
    let lam = lambda_max(spec.dim(), spec.n());
    Ok(scaled
        .iter()
        .enumerate()
        .map(|(k, y)| (lam * y.re - exact_laplacian(&spec.point(k))).abs())
        .fold(0.0, f64::max))
}

/// The same metric with `L~ v` read from the simulated ancilla-`|0>` output.
pub fn fd_error_from_circuit(
    e: &BlockEncoding,
    v: &GridFunction,
    exact_laplacian: impl Fn(&[f64]) -> f64,
) -> Result<f64> {
    let amps = apply_to_function(e, v)?;
    let lam = lambda_max(v.spec.dim(), v.spec.n());
    let factor = lam * v.raw_norm / e.alpha;
    Ok(amps[..e.system_dim]
        .iter()
        .enumerate()
        .map(|(k, y)| (factor * y.re - exact_laplacian(&v.spec.point(k))).abs())
        .fold(0.0, f64::max))
}

/// `alpha^2 mu^2 h^4 / (16 D^2)`, the leading-order success probability for an
/// eigenfunction with `L v = -mu v`.
pub fn predicted_success(alpha: f64, dim: usize, n: usize, mu: f64) -> f64 {
    let h = 1.0 / (1u64 << n) as f64;
    let d = dim as f64;
    alpha * alpha * mu * mu * h.powi(4) / (16.0 * d * d)
}

/// `C_D = pi^4 D^2 / D^2_hat` for the product-of-sines family.
pub fn scaling_constant(dim: usize) -> f64 {
    let ratio = dim as f64 / dim.next_power_of_two() as f64;
    std::f64::consts::PI.powi(4) * ratio * ratio
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub dim: usize,
    pub n: usize,
    pub h: f64,
    pub system_dim: usize,
    pub p_success: f64,
    pub p_predicted: f64,
    pub e_max: f64,
    pub alpha: f64,
    /// Wall time for the point in seconds; never written to CSV.
    pub runtime: f64,
}

/// Operators available to [`sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepOperator {
    Laplace,
    Lcu,
}

/// Success probability and FD error for `family` at each `n`, via the circuit route.
pub fn sweep(
    op: SweepOperator,
    dim: usize,
    ns: impl IntoIterator<Item = usize>,
    family: FunctionFamily,
) -> Result<Vec<SweepRow>> {
    if op == SweepOperator::Lcu && dim != 1 {
        return Err(Error::Parameter(format!(
            "the LCU encoding is one-dimensional, got D = {dim}"
        )));
    }
    if !family.supports_dim(dim) {
        return Err(Error::Parameter(format!("family {family} does not support D = {dim}")));
    }
    let mut rows = Vec::new();
    for n in ns {
        let start = Instant::now();
        let e = match op {
            SweepOperator::Laplace => encode_laplace_dd(dim, n)?,
            SweepOperator::Lcu => encode_laplace_lcu(n)?,
        };
        let spec = GridSpec::new(dim, n)?;
        let v = family.sample(spec)?;
        let amps = apply_to_function(&e, &v)?;
        let p_success: f64 = amps[..e.system_dim].iter().map(|a| a.norm_sqr()).sum();
        let lam = lambda_max(dim, n);
        let factor = lam * v.raw_norm / e.alpha;
        let e_max = amps[..e.system_dim]
            .iter()
            .enumerate()
            .map(|(k, y)| (factor * y.re - family.laplacian(&spec.point(k))).abs())
            .fold(0.0, f64::max);
        rows.push(SweepRow {
            dim,
            n,
            h: spec.h(),
            system_dim: e.system_dim,
            p_success,
            p_predicted: predicted_success(e.alpha, dim, n, family.laplacian_eigenvalue(dim)),
            e_max,
            alpha: e.alpha,
            runtime: start.elapsed().as_secs_f64(),
        });
    }
    if rows.is_empty() {
        return Err(Error::Parameter("empty n range".into()));
    }
    Ok(rows)
}

/// [`sweep`] over the Laplacian encoding.
pub fn sweep_success_probability(
    dim: usize,
    ns: impl IntoIterator<Item = usize>,
    family: FunctionFamily,
) -> Result<Vec<SweepRow>> {
    sweep(SweepOperator::Laplace, dim, ns, family)
}

pub const SWEEP_CSV_HEADER: &str = "D,n,h,N_D,p_success,p_predicted,e_max,alpha";

/// Writes the sweep table; floats carry 17 significant digits.
pub fn write_sweep_csv(rows: &[SweepRow], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{SWEEP_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{:.16e},{},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.dim, r.n, r.h, r.system_dim, r.p_success, r.p_predicted, r.e_max, r.alpha
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Circuit, RegisterLayout};
    use crate::encodings::{encode_laplace_1d, Operator};
    use crate::operators::{sample_function, scaled_laplacian_dd};
    use std::f64::consts::PI;

    fn empty_encoding() -> BlockEncoding {
        let layout = RegisterLayout::new([("a", 1), ("j", 2)]).unwrap();
        BlockEncoding {
            circuit: Circuit::new(layout),
            ancillas: 1,
            alpha: 1.0,
            system_dim: 4,
            operator: Operator::Derivative { n: 2 },
        }
    }

    #[test]
    fn empty_circuit_block_is_identity() {
        let b = extract_block(&empty_encoding(), 0, 0).unwrap();
        assert_eq!(b, ComplexMatrix::identity(4).unwrap());
        assert!(extract_block(&empty_encoding(), 1, 0).unwrap().max_abs() == 0.0);
        assert!(matches!(extract_block(&empty_encoding(), 2, 0), Err(Error::Index(_))));
    }

    #[test]
    fn perturbed_target_fails() {
        let e = encode_laplace_1d(3).unwrap();
        let mut target = scaled_laplacian_dd(1, 3).unwrap();
        assert!(verify_encoding(&e, &target, 1e-12).unwrap().passed);
        let bump = target[(2, 5)] + 1e-6;
        target = ComplexMatrix::from_fn(8, 8, |i, j| if (i, j) == (2, 5) { bump } else { target[(i, j)] }).unwrap();
        let r = verify_encoding(&e, &target, 1e-12).unwrap();
        assert!(!r.passed);
        assert!((r.max_deviation - 1e-6).abs() < 1e-12);
    }

    #[test]
    fn target_shape_is_checked() {
        let e = encode_laplace_1d(3).unwrap();
        let wrong = scaled_laplacian_dd(1, 2).unwrap();
        assert!(matches!(verify_encoding(&e, &wrong, 1e-12), Err(Error::Shape(_))));
    }

    #[test]
    fn constant_function_has_zero_success() {
        let e = encode_laplace_1d(4).unwrap();
        let v = sample_function(|_| 1.0, GridSpec::new(1, 4).unwrap()).unwrap();
        assert!(success_probability(&e, &v, Route::Circuit).unwrap() < 1e-28);
        assert!(success_probability(&e, &v, Route::Matrix).unwrap() < 1e-28);
    }

    #[test]
    fn sine_success_closed_form() {
        for n in 3..=6 {
            let e = encode_laplace_1d(n).unwrap();
            let v = FunctionFamily::Sin1.sample(GridSpec::new(1, n).unwrap()).unwrap();
            let h = 1.0 / (1u64 << n) as f64;
            let p = success_probability(&e, &v, Route::Circuit).unwrap();
            assert!((p - (PI * h).sin().powi(4)).abs() < 1e-12);
        }
    }

    #[test]
    fn masses_sum_to_one() {
        let e = encode_laplace_1d(4).unwrap();
        let v = FunctionFamily::Cos3.sample(GridSpec::new(1, 4).unwrap()).unwrap();
        let m = ancilla_masses(&e, &v).unwrap();
        assert_eq!(m.len(), 4);
        assert!((m.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fd_error_of_constant_vanishes() {
        let spec = GridSpec::new(1, 5).unwrap();
        assert_eq!(fd_error_max(|_| 3.0, |_| 0.0, spec).unwrap(), 0.0);
    }

    #[test]
    fn circuit_and_stencil_fd_errors_agree() {
        let spec = GridSpec::new(1, 5).unwrap();
        let fam = FunctionFamily::Sin1;
        let e = encode_laplace_1d(5).unwrap();
        let v = fam.sample(spec).unwrap();
        let a = fd_error_from_circuit(&e, &v, |x| fam.laplacian(x)).unwrap();
        let b = fd_error_max(|x| fam.eval(x), |x| fam.laplacian(x), spec).unwrap();
        assert!((a - b).abs() < 1e-9 * b.max(1.0));
    }

    #[test]
    fn scaling_constants() {
        let pi4 = PI.powi(4);
        assert_eq!(scaling_constant(1), pi4);
        assert_eq!(scaling_constant(2), pi4);
        assert_eq!(scaling_constant(4), pi4);
        assert!((scaling_constant(3) - 9.0 / 16.0 * pi4).abs() < 1e-12);
        let h4 = (1.0f64 / 8.0).powi(4);
        assert!((predicted_success(0.75, 3, 3, 12.0 * PI * PI) - scaling_constant(3) * h4).abs() < 1e-15);
    }

    #[test]
    fn sweep_rows_and_csv() {
        let rows = sweep_success_probability(1, 3..=5, FunctionFamily::Sin1).unwrap();
        assert_eq!(rows.len(), 3);
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(SWEEP_CSV_HEADER));
        assert!(lines.next().unwrap().starts_with("1,3,1.2500000000000000e-1,8,"));
        assert!(sweep_success_probability(1, 3..3, FunctionFamily::Sin1).is_err());
        assert!(sweep(SweepOperator::Lcu, 2, 1..=2, FunctionFamily::SinProd).is_err());
    }
}
