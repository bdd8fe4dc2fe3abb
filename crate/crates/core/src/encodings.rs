//! Block-encoding circuits for periodic finite-difference operators.
//!
//! Every builder returns a [`BlockEncoding`]: the circuit, the number of
//! ancilla qubits `m`, the sub-normalization `alpha` and the operator it
//! encodes. Ancilla registers always precede the system registers in the
//! layout, so block `(r, c)` of the unitary is the `N_D x N_D` sub-matrix at
//! rows `r N_D ..` and columns `c N_D ..`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use crate::circuit::{controlled, Circuit, Control, Gate, GateKind, RegisterLayout};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ComplexVector, MAX_DENSE_DIM};
use crate::operators::{
    apply_scaled_laplacian, central_difference_1d, first_order_tensorized, scaled_laplacian_dd, trapezoid_1d, GridSpec,
};

/// Widest circuit a builder will produce. Simulation has its own, smaller cap.
pub const MAX_CIRCUIT_QUBITS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftDirection {
    /// `|j> -> |j + 1 mod N>`
    Plus,
    /// `|j> -> |j - 1 mod N>`
    Minus,
}

/// Cascaded multi-controlled X gates implementing `S+` or `S-` on `register`
/// (qubits listed most significant first).
///
/// Gate `i` flips bit `register[n-1-i]` controlled on all lower bits, whose
/// controls are listed least significant first. `S-` applies the gates with
/// `i = 0, 1, ...` (flip, then borrow); `S+` applies them in reverse.
pub fn shift_gates(direction: ShiftDirection, register: &[usize]) -> Vec<Gate> {
    let n = register.len();
    let gate = |i: usize| {
        let controls = (0..i).map(|k| Control::on(register[n - 1 - k])).collect();
        Gate::controlled(GateKind::X, register[n - 1 - i], controls)
    };
    match direction {
        ShiftDirection::Minus => (0..n).map(gate).collect(),
        ShiftDirection::Plus => (0..n).rev().map(gate).collect(),
    }
}

/// `S+` or `S-` on a bare `n`-qubit register named `j`.
pub fn shift_circuit(direction: ShiftDirection, n: usize) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::Parameter("shift needs n >= 1".into()));
    }
    let mut c = Circuit::new(RegisterLayout::single("j", n)?);
    c.extend(shift_gates(direction, &(0..n).collect::<Vec<_>>()))?;
    Ok(c)
}

fn controlled_shift(
    layout: &RegisterLayout,
    register: &[usize],
    direction: ShiftDirection,
    controls: &[Control],
) -> Result<Circuit> {
    let mut bare = Circuit::new(layout.clone());
    bare.extend(shift_gates(direction, register))?;
    controlled(&bare, controls)
}

/// The operator a [`BlockEncoding`] represents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Operator {
    /// Scaled periodic Laplacian on a `dim`-dimensional grid.
    Laplace {
        dim: usize,
        n: usize,
    },
    /// Scaled 1-D Laplacian through the rotation-based LCU circuit (`alpha = -1/4`).
    LaplaceLcu {
        n: usize,
    },
    /// Banded circulant `A = circ(a0, a1, a_{-1})` through the LCU circuit (`alpha = 1/4`).
    BandedLcu {
        n: usize,
        a0: f64,
        a1: f64,
        am1: f64,
    },
    /// `h D_{1,h}`.
    Derivative {
        n: usize,
    },
    Gradient {
        n: usize,
    },
    Divergence {
        n: usize,
    },
    /// First-order wave operator `[[0, 0, dx0], [0, 0, dx1], [dx0, dx1, 0]]`.
    Wave {
        n: usize,
    },
}

impl Operator {
    pub fn name(&self) -> &'static str {
        match self {
            Operator::Laplace { .. } => "laplace",
            Operator::LaplaceLcu { .. } => "lcu",
            Operator::BandedLcu { .. } => "banded-lcu",
            Operator::Derivative { .. } => "derivative",
            Operator::Gradient { .. } => "gradient",
            Operator::Divergence { .. } => "divergence",
            Operator::Wave { .. } => "wave",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Operator::Laplace { dim, .. } => *dim,
            Operator::LaplaceLcu { .. } | Operator::BandedLcu { .. } | Operator::Derivative { .. } => 1,
            Operator::Gradient { .. } | Operator::Divergence { .. } | Operator::Wave { .. } => 2,
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            Operator::Laplace { n, .. }
            | Operator::LaplaceLcu { n }
            | Operator::BandedLcu { n, .. }
            | Operator::Derivative { n }
            | Operator::Gradient { n }
            | Operator::Divergence { n }
            | Operator::Wave { n } => n,
        }
    }

    /// Builds the encoding circuit for this operator.
    pub fn build(&self) -> Result<BlockEncoding> {
        match *self {
            Operator::Laplace { dim, n } => encode_laplace_dd(dim, n),
            Operator::LaplaceLcu { n } => encode_laplace_lcu(n),
            Operator::BandedLcu { n, a0, a1, am1 } => encode_banded_lcu(n, a0, a1, am1),
            Operator::Derivative { n } => encode_derivative_1d(n),
            Operator::Gradient { n } => encode_gradient_2d(n),
            Operator::Divergence { n } => encode_divergence_2d(n),
            Operator::Wave { n } => encode_wave_2d(n),
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operator::Laplace { dim, n } => write!(f, "laplace(D={dim}, n={n})"),
            Operator::BandedLcu { n, a0, a1, am1 } => write!(f, "banded-lcu(n={n}, a0={a0}, a1={a1}, a-1={am1})"),
            op => write!(f, "{}(n={})", op.name(), op.n()),
        }
    }
}

/// A known block of an encoding unitary, already multiplied by `alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceBlock {
    pub row: usize,
    pub col: usize,
    pub matrix: ComplexMatrix,
}

/// A circuit `U` whose `(0, 0)` block is `alpha * target`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockEncoding {
    pub circuit: Circuit,
    /// Ancilla qubits `m`, the leading qubits of the layout.
    pub ancillas: usize,
    pub alpha: f64,
    /// `N_D`, the system dimension.
    pub system_dim: usize,
    pub operator: Operator,
}

impl BlockEncoding {
    fn new(circuit: Circuit, ancillas: usize, alpha: f64, system_qubits: usize, operator: Operator) -> Result<Self> {
        if circuit.num_qubits() != ancillas + system_qubits {
            return Err(Error::Layout(format!(
                "{} qubits for {ancillas} ancillas and {system_qubits} system qubits",
                circuit.num_qubits()
            )));
        }
        if !(-1.0..=1.0).contains(&alpha) {
            return Err(Error::Parameter(format!("sub-normalization {alpha} outside [-1, 1]")));
        }
        Ok(Self {
            circuit,
            ancillas,
            alpha,
            system_dim: 1usize << system_qubits,
            operator,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.circuit.num_qubits()
    }

    pub fn system_qubits(&self) -> usize {
        self.num_qubits() - self.ancillas
    }

    pub fn label(&self) -> String {
        self.operator.to_string()
    }

    /// The normalized operator `A~` with `block(0, 0) = alpha * A~`.
    pub fn target_matrix(&self) -> Result<ComplexMatrix> {
        match self.operator {
            Operator::Laplace { dim, n } => scaled_laplacian_dd(dim, n),
            Operator::LaplaceLcu { n } => scaled_laplacian_dd(1, n),
            Operator::BandedLcu { n, a0, a1, am1 } => banded_circulant(n, a0, a1, am1),
            Operator::Derivative { n } => Ok(central_difference_1d(n)?.scale_real(1.0 / (1u64 << n) as f64)),
            Operator::Gradient { n } | Operator::Divergence { n } => first_order_tensorized(0, 2, n),
            Operator::Wave { .. } => ComplexMatrix::zeros(self.system_dim, self.system_dim),
        }
    }

    /// `alpha A~ v` from the reference operators. Laplacians beyond the dense
    /// cap use the matrix-free stencil.
    pub fn encoded_action(&self, v: &ComplexVector) -> Result<ComplexVector> {
        if v.dim() != self.system_dim {
            return Err(Error::Shape(format!(
                "vector of dim {} for system dim {}",
                v.dim(),
                self.system_dim
            )));
        }
        let stencil_spec = match self.operator {
            Operator::Laplace { dim, n } => Some(GridSpec::new(dim, n)?),
            Operator::LaplaceLcu { n } => Some(GridSpec::new(1, n)?),
            _ => None,
        };
        match stencil_spec {
            Some(spec) if self.system_dim > MAX_DENSE_DIM => {
                let out = apply_scaled_laplacian(spec, v.as_slice())?;
                Ok(ComplexVector::new(out)?.scale(self.alpha.into()))
            }
            _ => Ok(self.target_matrix()?.matvec(v)?.scale(self.alpha.into())),
        }
    }

    /// Blocks whose content is fixed by the construction, scaled by `alpha`.
    pub fn reference_blocks(&self) -> Result<Vec<ReferenceBlock>> {
        let block = |row, col, matrix| ReferenceBlock { row, col, matrix };
        let a = self.alpha;
        Ok(match self.operator {
            Operator::Laplace { dim: 1, n } => {
                let h = 1.0 / (1u64 << n) as f64;
                let lap = scaled_laplacian_dd(1, n)?;
                let diff = central_difference_1d(n)?.scale_real(h / 2.0);
                let quad = trapezoid_1d(n)?.scale_real(1.0 / (2.0 * h));
                let mut blocks = Vec::with_capacity(16);
                for r in 0..4 {
                    for c in 0..4 {
                        let m = if r == c {
                            lap.clone()
                        } else if r + c == 3 {
                            quad.clone()
                        } else {
                            diff.clone()
                        };
                        blocks.push(block(r, c, m));
                    }
                }
                blocks
            }
            Operator::Gradient { n } => {
                let d0 = first_order_tensorized(0, 2, n)?.scale_real(a);
                let d1 = first_order_tensorized(1, 2, n)?.scale_real(a);
                vec![block(0, 0, d0), block(1, 0, d1)]
            }
            Operator::Divergence { n } => {
                let d0 = first_order_tensorized(0, 2, n)?.scale_real(a);
                let d1 = first_order_tensorized(1, 2, n)?.scale_real(a);
                vec![block(0, 0, d0), block(0, 1, d1)]
            }
            Operator::Wave { n } => {
                let d0 = first_order_tensorized(0, 2, n)?.scale_real(a);
                let d1 = first_order_tensorized(1, 2, n)?.scale_real(a);
                let zero = ComplexMatrix::zeros(self.system_dim, self.system_dim)?;
                let mut blocks = vec![
                    block(0, 2, d0.clone()),
                    block(1, 2, d1.clone()),
                    block(2, 0, d0),
                    block(2, 1, d1),
                ];
                for (r, c) in [(0, 0), (0, 1), (1, 0), (1, 1), (2, 2)] {
                    blocks.push(block(r, c, zero.clone()));
                }
                blocks
            }
            _ => vec![block(0, 0, self.target_matrix()?.scale_real(a))],
        })
    }
}

/// `D / 2^ceil(log2 D)`.
pub fn alpha_d(dim: usize) -> f64 {
    assert!(dim >= 1, "alpha_d needs D >= 1");
    dim as f64 / dim.next_power_of_two() as f64
}

/// `ceil(log2 D)`, the width of the axis-selection register.
pub fn axis_register_width(dim: usize) -> usize {
    dim.next_power_of_two().trailing_zeros() as usize
}

fn check_width(total: usize) -> Result<()> {
    if total > MAX_CIRCUIT_QUBITS {
        return Err(Error::Size(format!(
            "{total} qubits exceeds the {MAX_CIRCUIT_QUBITS}-qubit builder cap"
        )));
    }
    Ok(())
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Parameter("encodings need n >= 1".into()));
    }
    Ok(())
}

/// Hadamard-sandwiched `l`-controlled shifts encoding `L~_{1,h}` with `m = 2`, `alpha = 1`.
///
/// Layout `[l:2][j:n]`; `l` qubit 0 is `l_0`, qubit 1 is `l_1`.
pub fn encode_laplace_1d(n: usize) -> Result<BlockEncoding> {
    check_n(n)?;
    check_width(n + 2)?;
    let layout = RegisterLayout::new([("l", 2), ("j", n)])?;
    let (l0, l1) = (0, 1);
    let j = layout.qubits("j")?;
    let mut c = Circuit::new(layout.clone());
    for q in [l0, l1] {
        c.single(GateKind::H, q)?;
    }
    for q in [l0, l1] {
        c.single(GateKind::Z, q)?;
    }
    c.extend(
        controlled_shift(&layout, &j, ShiftDirection::Minus, &[Control::off(l1)])?
            .gates()
            .iter()
            .cloned(),
    )?;
    c.extend(
        controlled_shift(&layout, &j, ShiftDirection::Plus, &[Control::on(l0)])?
            .gates()
            .iter()
            .cloned(),
    )?;
    for q in [l0, l1] {
        c.single(GateKind::H, q)?;
    }
    BlockEncoding::new(c, 2, 1.0, n, Operator::Laplace { dim: 1, n })
}

/// Controls selecting value `value` on the big-endian register `qubits`.
fn pattern_controls(qubits: &[usize], value: usize) -> Vec<Control> {
    let w = qubits.len();
    qubits
        .iter()
        .enumerate()
        .map(|(i, &q)| Control {
            qubit: q,
            polarity: (value >> (w - 1 - i)) & 1 == 1,
        })
        .collect()
}

/// The `D`-dimensional encoding with `m = 2 + ceil(log2 D)` and `alpha = alpha_d(D)`.
///
/// Layout `[k:d][l:2][j{D-1}:n]...[j0:n]`. `D = 1` returns [`encode_laplace_1d`].
pub fn encode_laplace_dd(dim: usize, n: usize) -> Result<BlockEncoding> {
    if dim == 0 {
        return Err(Error::Parameter("Laplacian needs D >= 1".into()));
    }
    if dim == 1 {
        return encode_laplace_1d(n);
    }
    check_n(n)?;
    let dhat = axis_register_width(dim);
    check_width(dim * n + 2 + dhat)?;
    let mut regs: Vec<(String, usize)> = vec![("k".into(), dhat), ("l".into(), 2)];
    regs.extend((0..dim).rev().map(|d| (format!("j{d}"), n)));
    let layout = RegisterLayout::new(regs)?;
    let k = layout.qubits("k")?;
    let l = layout.qubits("l")?;
    let (l0, l1) = (l[0], l[1]);

    let mut c = Circuit::new(layout.clone());
    for &q in &k {
        c.single(GateKind::H, q)?;
    }
    for q in [l0, l1] {
        c.single(GateKind::H, q)?;
    }
    for q in [l0, l1] {
        c.single(GateKind::Z, q)?;
    }
    for d in 0..dim {
        let axis = layout.qubits(&format!("j{d}"))?;
        let select = pattern_controls(&k, d);
        let mut minus = select.clone();
        minus.push(Control::off(l1));
        let mut plus = select;
        plus.push(Control::on(l0));
        c.extend(
            controlled_shift(&layout, &axis, ShiftDirection::Minus, &minus)?
                .gates()
                .iter()
                .cloned(),
        )?;
        c.extend(
            controlled_shift(&layout, &axis, ShiftDirection::Plus, &plus)?
                .gates()
                .iter()
                .cloned(),
        )?;
    }
    for q in [l0, l1] {
        c.single(GateKind::H, q)?;
    }
    for &q in &k {
        c.single(GateKind::H, q)?;
    }
    BlockEncoding::new(c, 2 + dhat, alpha_d(dim), dim * n, Operator::Laplace { dim, n })
}

/// The circulant with `a0` on the diagonal, `a1` below it and `a_{-1}` above it.
pub fn banded_circulant(n: usize, a0: f64, a1: f64, am1: f64) -> Result<ComplexMatrix> {
    let size = 1usize << n;
    ComplexMatrix::from_fn(size, size, |i, j| {
        let mut v = 0.0;
        if i == j {
            v += a0;
        }
        if i == (j + 1) % size {
            v += a1;
        }
        if i == (j + size - 1) % size {
            v += am1;
        }
        v.into()
    })
}

/// Rotation angles `(2 acos(a0 - 1), 2 acos a1, 2 acos a_{-1})`.
pub fn lcu_angles(a0: f64, a1: f64, am1: f64) -> Result<[f64; 3]> {
    for (name, x) in [("a0", a0), ("a1", a1), ("a-1", am1)] {
        if !x.is_finite() {
            return Err(Error::Parameter(format!("{name} = {x} is not finite")));
        }
    }
    if a0 <= 0.0 {
        return Err(Error::Parameter(format!("a0 = {a0} must be positive")));
    }
    if (a0 - 1.0).abs() > 1.0 || a1.abs() > 1.0 || am1.abs() > 1.0 {
        return Err(Error::Parameter(format!(
            "angle domain violated: need |a0 - 1|, |a1|, |a-1| <= 1, got a0={a0}, a1={a1}, a-1={am1}"
        )));
    }
    Ok([2.0 * (a0 - 1.0).acos(), 2.0 * a1.acos(), 2.0 * am1.acos()])
}

fn lcu_circuit(n: usize, a0: f64, a1: f64, am1: f64) -> Result<Circuit> {
    check_n(n)?;
    check_width(n + 3)?;
    let [t0, t1, t2] = lcu_angles(a0, a1, am1)?;
    let layout = RegisterLayout::new([("l", 2), ("a", 1), ("j", n)])?;
    let (l0, l1, a) = (0, 1, 2);
    let j = layout.qubits("j")?;
    let mut c = Circuit::new(layout.clone());
    for q in [l1, l0] {
        c.single(GateKind::H, q)?;
    }
    c.push(Gate::controlled(
        GateKind::Ry(t0),
        a,
        vec![Control::off(l1), Control::off(l0)],
    ))?;
    c.push(Gate::controlled(
        GateKind::Ry(t1),
        a,
        vec![Control::off(l1), Control::on(l0)],
    ))?;
    c.push(Gate::controlled(
        GateKind::Ry(t2),
        a,
        vec![Control::on(l1), Control::off(l0)],
    ))?;
    c.extend(
        controlled_shift(&layout, &j, ShiftDirection::Minus, &[Control::on(l1)])?
            .gates()
            .iter()
            .cloned(),
    )?;
    c.extend(
        controlled_shift(&layout, &j, ShiftDirection::Plus, &[Control::on(l0)])?
            .gates()
            .iter()
            .cloned(),
    )?;
    for q in [l1, l0] {
        c.single(GateKind::H, q)?;
    }
    Ok(c)
}

/// Rotation-based LCU encoding of `A/4` for the banded circulant `A`, `m = 3`.
///
/// Layout `[l:2][a:1][j:n]`. The circuit is exact whenever the angles exist;
/// `A/4` is a sub-normalized block only when `||A||_2 <= 1`.
pub fn encode_banded_lcu(n: usize, a0: f64, a1: f64, am1: f64) -> Result<BlockEncoding> {
    let c = lcu_circuit(n, a0, a1, am1)?;
    BlockEncoding::new(c, 3, 0.25, n, Operator::BandedLcu { n, a0, a1, am1 })
}

/// The LCU circuit at `a0 = 1/2`, `a1 = a_{-1} = -1/4`: `-(1/4) L~_{1,h}`.
pub fn encode_laplace_lcu(n: usize) -> Result<BlockEncoding> {
    let c = lcu_circuit(n, 0.5, -0.25, -0.25)?;
    BlockEncoding::new(c, 3, -0.25, n, Operator::LaplaceLcu { n })
}

/// `h D_{1,h}` with `m = 1`, `alpha = 1`. Layout `[l:1][j:n]`.
pub fn encode_derivative_1d(n: usize) -> Result<BlockEncoding> {
    check_n(n)?;
    check_width(n + 1)?;
    let layout = RegisterLayout::new([("l", 1), ("j", n)])?;
    let l = 0;
    let j = layout.qubits("j")?;
    let mut c = Circuit::new(layout.clone());
    c.single(GateKind::H, l)?;
    c.single(GateKind::Z, l)?;
    c.extend(
        controlled_shift(&layout, &j, ShiftDirection::Minus, &[Control::off(l)])?
            .gates()
            .iter()
            .cloned(),
    )?;
    c.extend(
        controlled_shift(&layout, &j, ShiftDirection::Plus, &[Control::on(l)])?
            .gates()
            .iter()
            .cloned(),
    )?;
    c.single(GateKind::H, l)?;
    BlockEncoding::new(c, 1, 1.0, n, Operator::Derivative { n })
}

/// The `l`-phase kickback and axis-selected shifts shared by the 2-D first-order circuits.
fn first_order_core(c: &mut Circuit, layout: &RegisterLayout, l: usize, k: usize) -> Result<()> {
    c.single(GateKind::H, l)?;
    c.single(GateKind::Z, l)?;
    for (axis, sel) in [("j0", Control::off(k)), ("j1", Control::on(k))] {
        let reg = layout.qubits(axis)?;
        c.extend(
            controlled_shift(layout, &reg, ShiftDirection::Minus, &[sel, Control::off(l)])?
                .gates()
                .iter()
                .cloned(),
        )?;
        c.extend(
            controlled_shift(layout, &reg, ShiftDirection::Plus, &[sel, Control::on(l)])?
                .gates()
                .iter()
                .cloned(),
        )?;
    }
    c.single(GateKind::H, l)
}

fn first_order_layout(n: usize, selector: &[&str]) -> Result<RegisterLayout> {
    check_n(n)?;
    check_width(2 * n + 1 + selector.len())?;
    let mut regs: Vec<(&str, usize)> = vec![("l", 1)];
    regs.extend(selector.iter().map(|&s| (s, 1)));
    regs.extend([("j1", n), ("j0", n)]);
    RegisterLayout::new(regs)
}

/// Gradient: block column 0 stacks `D~(0)/sqrt2` over `D~(1)/sqrt2`. Layout `[l:1][k:1][j1:n][j0:n]`.
pub fn encode_gradient_2d(n: usize) -> Result<BlockEncoding> {
    let layout = first_order_layout(n, &["k"])?;
    let (l, k) = (0, 1);
    let mut c = Circuit::new(layout.clone());
    c.single(GateKind::H, k)?;
    first_order_core(&mut c, &layout, l, k)?;
    BlockEncoding::new(c, 2, FRAC_1_SQRT_2, 2 * n, Operator::Gradient { n })
}

/// Divergence: block row 0 is `[D~(0)/sqrt2, D~(1)/sqrt2, *]`. Same layout as the gradient.
pub fn encode_divergence_2d(n: usize) -> Result<BlockEncoding> {
    let layout = first_order_layout(n, &["k"])?;
    let (l, k) = (0, 1);
    let mut c = Circuit::new(layout.clone());
    first_order_core(&mut c, &layout, l, k)?;
    c.single(GateKind::H, k)?;
    BlockEncoding::new(c, 2, FRAC_1_SQRT_2, 2 * n, Operator::Divergence { n })
}

/// First-order wave operator. Layout `[l:1][k0:1][k1:1][j1:n][j0:n]`; the
/// blocks `(r, c)` for `r, c < 4` (ancilla `l = 0`, index `2 k0 + k1`) carry
/// the 3x3 operator pattern, with index 3 inert.
///
/// The closing `X` on `k0` relabels output rows so that the pattern appears in
/// natural block order; without it the divergence half lands in the `k0 = 0`
/// rows and the gradient half in the `k0 = 1` rows.
pub fn encode_wave_2d(n: usize) -> Result<BlockEncoding> {
    let layout = first_order_layout(n, &["k0", "k1"])?;
    let (l, k0, k1) = (0, 1, 2);
    let mut c = Circuit::new(layout.clone());
    c.push(Gate::controlled(GateKind::H, k1, vec![Control::on(k0)]))?;
    first_order_core(&mut c, &layout, l, k1)?;
    c.push(Gate::controlled(GateKind::H, k1, vec![Control::off(k0)]))?;
    c.single(GateKind::X, k0)?;
    BlockEncoding::new(c, 3, FRAC_1_SQRT_2, 2 * n, Operator::Wave { n })
}
