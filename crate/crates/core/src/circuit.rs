//! Gate-level circuit IR, statevector simulation and unitary extraction.
//!
//! Qubit 0 is the most significant bit of a basis index: for a register of
//! `q` qubits, qubit `k` corresponds to the bit `1 << (q - 1 - k)`. Gates are
//! stored in application order.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ComplexVector, MAX_DENSE_DIM, MAX_STATEVECTOR_QUBITS};

/// Single-qubit gate kinds. `S`, `Sdg`, `T`, `Tdg` only appear in Clifford+T
/// expansions produced by the resource model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    /// `exp(-i theta/2 Y)`, angle in radians.
    Ry(f64),
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::Sdg => "SDG",
            GateKind::T => "T",
            GateKind::Tdg => "TDG",
            GateKind::Ry(_) => "RY",
        }
    }

    /// The 2x2 matrix `[[m00, m01], [m10, m11]]`.
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        let r = |x: f64| Complex64::new(x, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match *self {
            GateKind::X => [[r(0.0), r(1.0)], [r(1.0), r(0.0)]],
            GateKind::Y => [[r(0.0), -i], [i, r(0.0)]],
            GateKind::Z => [[r(1.0), r(0.0)], [r(0.0), r(-1.0)]],
            GateKind::H => [[r(s), r(s)], [r(s), r(-s)]],
            GateKind::S => [[r(1.0), r(0.0)], [r(0.0), i]],
            GateKind::Sdg => [[r(1.0), r(0.0)], [r(0.0), -i]],
            GateKind::T => [
                [r(1.0), r(0.0)],
                [r(0.0), Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)],
            ],
            GateKind::Tdg => [
                [r(1.0), r(0.0)],
                [r(0.0), Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4)],
            ],
            GateKind::Ry(theta) => {
                let (sn, cs) = (theta / 2.0).sin_cos();
                [[r(cs), r(-sn)], [r(sn), r(cs)]]
            }
        }
    }

    pub fn adjoint(&self) -> GateKind {
        match *self {
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            GateKind::T => GateKind::Tdg,
            GateKind::Tdg => GateKind::T,
            GateKind::Ry(theta) => GateKind::Ry(-theta),
            k => k,
        }
    }
}

/// A control on `qubit`; the gate fires when the qubit reads `polarity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Control {
    pub qubit: usize,
    pub polarity: bool,
}

impl Control {
    /// Fires on `|1>`.
    pub fn on(qubit: usize) -> Self {
        Self { qubit, polarity: true }
    }

    /// Fires on `|0>`.
    pub fn off(qubit: usize) -> Self {
        Self { qubit, polarity: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub target: usize,
    pub controls: Vec<Control>,
}

impl Gate {
    pub fn new(kind: GateKind, target: usize) -> Self {
        Self {
            kind,
            target,
            controls: Vec::new(),
        }
    }

    pub fn controlled(kind: GateKind, target: usize, controls: Vec<Control>) -> Self {
        Self { kind, target, controls }
    }

    fn validate(&self, num_qubits: usize) -> Result<()> {
        if self.target >= num_qubits {
            return Err(Error::Index(format!("target {} on {num_qubits} qubits", self.target)));
        }
        for (i, c) in self.controls.iter().enumerate() {
            if c.qubit >= num_qubits {
                return Err(Error::Index(format!("control {} on {num_qubits} qubits", c.qubit)));
            }
            if c.qubit == self.target {
                return Err(Error::Index(format!("qubit {} is both target and control", c.qubit)));
            }
            if self.controls[..i].iter().any(|d| d.qubit == c.qubit) {
                return Err(Error::Index(format!("duplicate control on qubit {}", c.qubit)));
            }
        }
        if let GateKind::Ry(theta) = self.kind {
            if !theta.is_finite() {
                return Err(Error::NonFinite(format!("RY angle {theta}")));
            }
        }
        Ok(())
    }

    /// Applies the gate in place to a statevector of `num_qubits` qubits.
    fn apply_to(&self, num_qubits: usize, amps: &mut [Complex64]) {
        let bit = |q: usize| 1usize << (num_qubits - 1 - q);
        let tmask = bit(self.target);
        let (mut cmask, mut cval) = (0usize, 0usize);
        for c in &self.controls {
            cmask |= bit(c.qubit);
            if c.polarity {
                cval |= bit(c.qubit);
            }
        }
        let m = self.kind.matrix();
        let is_x = matches!(self.kind, GateKind::X);
        for i in 0..amps.len() {
            if i & tmask != 0 || i & cmask != cval {
                continue;
            }
            let j = i | tmask;
            if is_x {
                amps.swap(i, j);
            } else {
                let (a, b) = (amps[i], amps[j]);
                amps[i] = m[0][0] * a + m[0][1] * b;
                amps[j] = m[1][0] * a + m[1][1] * b;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub size: usize,
}

/// Named registers listed from most to least significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterLayout {
    registers: Vec<Register>,
}

impl RegisterLayout {
    pub fn new<S: Into<String>>(registers: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let registers: Vec<Register> = registers
            .into_iter()
            .map(|(name, size)| Register {
                name: name.into(),
                size,
            })
            .collect();
        if registers.is_empty() || registers.iter().any(|r| r.size == 0) {
            return Err(Error::Layout("registers must be nonempty with positive sizes".into()));
        }
        for (i, r) in registers.iter().enumerate() {
            if r.name.is_empty() || r.name.contains([' ', ':']) {
                return Err(Error::Layout(format!("bad register name {:?}", r.name)));
            }
            if registers[..i].iter().any(|s| s.name == r.name) {
                return Err(Error::Layout(format!("duplicate register {}", r.name)));
            }
        }
        Ok(Self { registers })
    }

    /// A single register named `name`.
    pub fn single(name: &str, size: usize) -> Result<Self> {
        Self::new([(name, size)])
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn num_qubits(&self) -> usize {
        self.registers.iter().map(|r| r.size).sum()
    }

    /// Qubit indices of register `name`, most significant first.
    pub fn qubits(&self, name: &str) -> Result<Vec<usize>> {
        let mut offset = 0;
        for r in &self.registers {
            if r.name == name {
                return Ok((offset..offset + r.size).collect());
            }
            offset += r.size;
        }
        Err(Error::Layout(format!("no register named {name}")))
    }

    /// Basis index of the product state holding `values[i]` in register `i`.
    pub fn basis_index(&self, values: &[usize]) -> Result<usize> {
        if values.len() != self.registers.len() {
            return Err(Error::Layout(format!(
                "{} values for {} registers",
                values.len(),
                self.registers.len()
            )));
        }
        let mut index = 0usize;
        for (r, &v) in self.registers.iter().zip(values) {
            if v >= 1 << r.size {
                return Err(Error::Index(format!("value {v} does not fit register {}", r.name)));
            }
            index = (index << r.size) | v;
        }
        Ok(index)
    }

    /// Inverse of [`basis_index`](Self::basis_index).
    pub fn decompose(&self, mut index: usize) -> Vec<usize> {
        let mut values = vec![0; self.registers.len()];
        for (slot, r) in values.iter_mut().zip(&self.registers).rev() {
            *slot = index & ((1 << r.size) - 1);
            index >>= r.size;
        }
        values
    }
}

impl fmt::Display for RegisterLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .registers
            .iter()
            .map(|r| format!("{}:{}", r.name, r.size))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// An ordered gate list over a register layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    layout: RegisterLayout,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(layout: RegisterLayout) -> Self {
        Self {
            layout,
            gates: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.layout.num_qubits()
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.num_qubits())?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<()> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    pub fn single(&mut self, kind: GateKind, target: usize) -> Result<()> {
        self.push(Gate::new(kind, target))
    }

    /// Applies the gates in order to `amps`, a statevector of the full width.
    pub fn apply_in_place(&self, amps: &mut [Complex64]) -> Result<()> {
        let nq = self.num_qubits();
        if nq > MAX_STATEVECTOR_QUBITS {
            return Err(Error::Size(format!(
                "{nq} qubits exceeds the {MAX_STATEVECTOR_QUBITS}-qubit simulator cap"
            )));
        }
        if amps.len() != 1usize << nq {
            return Err(Error::Shape(format!("state of dim {} for {nq} qubits", amps.len())));
        }
        for g in &self.gates {
            g.apply_to(nq, amps);
        }
        Ok(())
    }

    /// The adjoint circuit: reversed gate order with each gate inverted.
    pub fn inverse(&self) -> Circuit {
        let gates = self
            .gates
            .iter()
            .rev()
            .map(|g| Gate {
                kind: g.kind.adjoint(),
                target: g.target,
                controls: g.controls.clone(),
            })
            .collect();
        Circuit {
            layout: self.layout.clone(),
            gates,
        }
    }

    /// Qubits that some gate targets.
    pub fn targeted_qubits(&self) -> Vec<usize> {
        let mut qs: Vec<usize> = self.gates.iter().map(|g| g.target).collect();
        qs.sort_unstable();
        qs.dedup();
        qs
    }
}

/// `U_c v` for the ordered gate product `U_c`.
pub fn apply(c: &Circuit, v: &ComplexVector) -> Result<ComplexVector> {
    let mut amps = v.as_slice().to_vec();
    c.apply_in_place(&mut amps)?;
    ComplexVector::new(amps)
}

/// The full `2^q x 2^q` unitary; column `j` is `apply(c, |j>)`.
pub fn unitary(c: &Circuit) -> Result<ComplexMatrix> {
    let nq = c.num_qubits();
    if nq >= usize::BITS as usize || 1usize << nq > MAX_DENSE_DIM {
        return Err(Error::Size(format!(
            "full unitary of {nq} qubits exceeds the dense cap {MAX_DENSE_DIM}"
        )));
    }
    let dim = 1usize << nq;
    let mut u = ComplexMatrix::zeros(dim, dim)?;
    for j in 0..dim {
        let col = apply(c, &ComplexVector::basis(dim, j))?;
        u.set_column(j, &col)?;
    }
    Ok(u)
}

/// Adds `controls` to every gate of `c`, ahead of any controls the gate has.
pub fn controlled(c: &Circuit, controls: &[Control]) -> Result<Circuit> {
    for (i, ctl) in controls.iter().enumerate() {
        if controls[..i].iter().any(|d| d.qubit == ctl.qubit) {
            return Err(Error::Index(format!("duplicate control on qubit {}", ctl.qubit)));
        }
        for g in &c.gates {
            if g.target == ctl.qubit || g.controls.iter().any(|d| d.qubit == ctl.qubit) {
                return Err(Error::Index(format!(
                    "control qubit {} is acted on by the circuit",
                    ctl.qubit
                )));
            }
        }
    }
    let mut out = Circuit::new(c.layout.clone());
    for g in &c.gates {
        let mut all = controls.to_vec();
        all.extend_from_slice(&g.controls);
        out.push(Gate {
            kind: g.kind,
            target: g.target,
            controls: all,
        })?;
    }
    Ok(out)
}

/// The gates of `a` followed by the gates of `b`.
pub fn compose(a: &Circuit, b: &Circuit) -> Result<Circuit> {
    if a.layout != b.layout {
        return Err(Error::Layout(format!(
            "cannot compose [{}] with [{}]",
            a.layout, b.layout
        )));
    }
    let mut out = a.clone();
    out.gates.extend(b.gates.iter().cloned());
    Ok(out)
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind.name(), self.target)?;
        if !self.controls.is_empty() {
            write!(f, " ctrl:")?;
            for (i, c) in self.controls.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}{}", if c.polarity { '+' } else { '-' }, c.qubit)?;
            }
        }
        if let GateKind::Ry(theta) = self.kind {
            write!(f, " theta={theta:?}")?;
        }
        Ok(())
    }
}

/// Text export: a `# qubits` and `# layout` header, then one gate per line as
/// `KIND target [ctrl:+q|-q ...] [theta=<float>]`.
impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# qubits {}", self.num_qubits())?;
        writeln!(f, "# layout {}", self.layout)?;
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

fn parse_err(line: usize, msg: impl fmt::Display) -> Error {
    Error::Parse(format!("line {line}: {msg}"))
}

fn parse_gate(lineno: usize, line: &str) -> Result<Gate> {
    let mut tokens = line.split_whitespace();
    let name = tokens.next().ok_or_else(|| parse_err(lineno, "empty gate line"))?;
    let target: usize = tokens
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| parse_err(lineno, "missing or bad target"))?;
    let mut controls = Vec::new();
    let mut theta = None;
    let mut in_ctrl = false;
    for tok in tokens {
        let tok = match tok.strip_prefix("ctrl:") {
            Some(rest) => {
                in_ctrl = true;
                rest
            }
            None => tok,
        };
        if let Some(value) = tok.strip_prefix("theta=") {
            theta = Some(value.parse::<f64>().map_err(|e| parse_err(lineno, e))?);
            in_ctrl = false;
            continue;
        }
        if !in_ctrl || tok.len() < 2 {
            return Err(parse_err(lineno, format!("unexpected token {tok:?}")));
        }
        let polarity = match tok.as_bytes()[0] {
            b'+' => true,
            b'-' => false,
            _ => return Err(parse_err(lineno, format!("control {tok:?} lacks a +/- sign"))),
        };
        let qubit = tok[1..].parse().map_err(|e| parse_err(lineno, e))?;
        controls.push(Control { qubit, polarity });
    }
    let kind = match (name, theta) {
        ("X", None) => GateKind::X,
        ("Y", None) => GateKind::Y,
        ("Z", None) => GateKind::Z,
        ("H", None) => GateKind::H,
        ("S", None) => GateKind::S,
        ("SDG", None) => GateKind::Sdg,
        ("T", None) => GateKind::T,
        ("TDG", None) => GateKind::Tdg,
        ("RY", Some(t)) => GateKind::Ry(t),
        _ => return Err(parse_err(lineno, format!("bad gate {name:?}"))),
    };
    Ok(Gate { kind, target, controls })
}

impl FromStr for Circuit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut qubits = None;
        let mut layout = None;
        let mut gates = Vec::new();
        for (i, raw) in s.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if let Some(q) = rest.strip_prefix("qubits ") {
                    qubits = Some(q.trim().parse::<usize>().map_err(|e| parse_err(lineno, e))?);
                } else if let Some(l) = rest.strip_prefix("layout ") {
                    let mut regs = Vec::new();
                    for part in l.split_whitespace() {
                        let (name, size) = part
                            .split_once(':')
                            .ok_or_else(|| parse_err(lineno, format!("bad register {part:?}")))?;
                        regs.push((
                            name.to_string(),
                            size.parse::<usize>().map_err(|e| parse_err(lineno, e))?,
                        ));
                    }
                    layout = Some(RegisterLayout::new(regs)?);
                }
                continue;
            }
            gates.push(parse_gate(lineno, line)?);
        }
        let layout = match (layout, qubits) {
            (Some(l), Some(q)) if l.num_qubits() != q => {
                return Err(Error::Parse(format!(
                    "layout has {} qubits, header says {q}",
                    l.num_qubits()
                )))
            }
            (Some(l), _) => l,
            (None, Some(q)) => RegisterLayout::single("q", q)?,
            (None, None) => return Err(Error::Parse("missing '# qubits' header".into())),
        };
        let mut c = Circuit::new(layout);
        c.extend(gates)?;
        Ok(c)
    }
}
