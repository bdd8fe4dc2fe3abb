//! Clifford+T resource model.
//!
//! Every controlled gate is expanded into `{X, Y, Z, H, S, Sdg, T, Tdg, RY, CNOT}`
//! and the counts are read off the expansion, so the model can be checked by
//! simulating it. Multi-controlled gates use a ladder of clean ancillas: level
//! `i` holds the AND of the first `i` control literals, level 1 being the
//! control qubit itself. Levels persist across consecutive gates that share a
//! control prefix and are uncomputed as soon as the prefix changes, a gate
//! touches one of their qubits, or the circuit ends. An isolated
//! `k`-controlled X therefore costs `2k - 3` Toffolis on `k - 2` ancillas.
//!
//! * Toffoli: 7 T, 8 Clifford.
//! * Controlled H: 2 T, 5 Clifford.
//! * Controlled Y and Z: CNOT conjugated by `S`/`Sdg` or `H`.
//! * Controlled RY: 2 rotations and 2 CNOTs. Rotations are tallied, never
//!   synthesized.
//! * Anti-controls: an X on each side of every use.
//! * Controlled S, Sdg, T and Tdg are outside the model.

use std::io::Write;

use crate::circuit::{Circuit, Control, Gate, GateKind, RegisterLayout};
use crate::encodings::Operator;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GateCounts {
    pub t_count: usize,
    pub clifford_count: usize,
    pub rotation_count: usize,
    /// Most ladder ancillas live at once.
    pub ancilla_high_water: usize,
    /// Circuit qubits plus ladder ancillas.
    pub qubit_count: usize,
}

/// A circuit rewritten into primitive gates, with ladder ancillas appended
/// as a trailing `anc` register.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    pub circuit: Circuit,
    pub ancillas: usize,
}

impl Expansion {
    pub fn counts(&self) -> GateCounts {
        let mut c = GateCounts {
            ancilla_high_water: self.ancillas,
            qubit_count: self.circuit.num_qubits(),
            ..GateCounts::default()
        };
        for g in self.circuit.gates() {
            match g.kind {
                GateKind::T | GateKind::Tdg => c.t_count += 1,
                GateKind::Ry(_) => c.rotation_count += 1,
                _ => c.clifford_count += 1,
            }
        }
        c
    }
}

/// One control literal in the ladder; `qubit` indexes the expanded circuit.
type Literal = Control;

struct Expander {
    base_qubits: usize,
    out: Vec<Gate>,
    /// Literals of levels `1..=len`.
    stack: Vec<Literal>,
    high_water: usize,
}

impl Expander {
    fn level_qubit(&self, level: usize) -> Literal {
        if level == 1 {
            self.stack[0]
        } else {
            Control::on(self.base_qubits + level - 2)
        }
    }

    fn emit(&mut self, kind: GateKind, target: usize) {
        self.out.push(Gate::new(kind, target));
    }

    fn cnot(&mut self, control: usize, target: usize) {
        self.out
            .push(Gate::controlled(GateKind::X, target, vec![Control::on(control)]));
    }

    fn flip_anti(&mut self, lits: &[Literal]) {
        for l in lits.iter().filter(|l| !l.polarity) {
            self.emit(GateKind::X, l.qubit);
        }
    }

    fn toffoli(&mut self, la: Literal, lb: Literal, t: usize) {
        self.flip_anti(&[la, lb]);
        let (a, b) = (la.qubit, lb.qubit);
        use GateKind::*;
        self.emit(H, t);
        self.cnot(b, t);
        self.emit(Tdg, t);
        self.cnot(a, t);
        self.emit(T, t);
        self.cnot(b, t);
        self.emit(Tdg, t);
        self.cnot(a, t);
        self.emit(T, b);
        self.emit(T, t);
        self.emit(H, t);
        self.cnot(a, b);
        self.emit(T, a);
        self.emit(Tdg, b);
        self.cnot(a, b);
        self.flip_anti(&[la, lb]);
    }

    fn singly_controlled(&mut self, kind: GateKind, c: Literal, t: usize) -> Result<()> {
        self.flip_anti(&[c]);
        let q = c.qubit;
        use GateKind::*;
        match kind {
            X => self.cnot(q, t),
            Y => {
                self.emit(Sdg, t);
                self.cnot(q, t);
                self.emit(S, t);
            }
            Z => {
                self.emit(H, t);
                self.cnot(q, t);
                self.emit(H, t);
            }
            H => {
                self.emit(Sdg, t);
                self.emit(H, t);
                self.emit(Tdg, t);
                self.cnot(q, t);
                self.emit(T, t);
                self.emit(H, t);
                self.emit(S, t);
            }
            Ry(theta) => {
                self.emit(Ry(theta / 2.0), t);
                self.cnot(q, t);
                self.emit(Ry(-theta / 2.0), t);
                self.cnot(q, t);
            }
            S | Sdg | T | Tdg => {
                return Err(Error::Model(format!(
                    "controlled {} has no decomposition in the model",
                    kind.name()
                )));
            }
        }
        self.flip_anti(&[c]);
        Ok(())
    }

    fn pop_to(&mut self, len: usize) {
        while self.stack.len() > len {
            let level = self.stack.len();
            if level >= 2 {
                let (prev, lit) = (self.level_qubit(level - 1), self.stack[level - 1]);
                self.toffoli(prev, lit, self.base_qubits + level - 2);
            }
            self.stack.pop();
        }
    }

    fn push_to(&mut self, controls: &[Literal], len: usize) {
        while self.stack.len() < len {
            let level = self.stack.len() + 1;
            let lit = controls[level - 1];
            self.stack.push(lit);
            if level >= 2 {
                let prev = self.level_qubit(level - 1);
                self.toffoli(prev, lit, self.base_qubits + level - 2);
                self.high_water = self.high_water.max(level - 1);
            }
        }
    }

    fn gate(&mut self, g: &Gate) -> Result<()> {
        let k = g.controls.len();
        if k > 0 && matches!(g.kind, GateKind::S | GateKind::Sdg | GateKind::T | GateKind::Tdg) {
            return Err(Error::Model(format!(
                "controlled {} has no decomposition in the model",
                g.kind.name()
            )));
        }
        let shared = self.stack.iter().zip(&g.controls).take_while(|(a, b)| a == b).count();
        let keep = if k == 0 {
            self.stack
                .iter()
                .position(|l| l.qubit == g.target)
                .unwrap_or(self.stack.len())
        } else {
            shared
        };
        self.pop_to(keep);
        match (g.kind, k) {
            (kind, 0) => self.emit(kind, g.target),
            (kind, 1) => self.singly_controlled(kind, g.controls[0], g.target)?,
            (GateKind::X, k) => {
                self.push_to(&g.controls, k - 1);
                let top = self.level_qubit(k - 1);
                self.toffoli(top, g.controls[k - 1], g.target);
            }
            (kind, k) => {
                self.push_to(&g.controls, k);
                let top = self.level_qubit(k);
                self.singly_controlled(kind, top, g.target)?;
            }
        }
        Ok(())
    }
}

/// Rewrites `c` into primitive gates under the ladder model.
pub fn expand(c: &Circuit) -> Result<Expansion> {
    let base = c.num_qubits();
    let mut ex = Expander {
        base_qubits: base,
        out: Vec::new(),
        stack: Vec::new(),
        high_water: 0,
    };
    for g in c.gates() {
        ex.gate(g)?;
    }
    ex.pop_to(0);
    let ancillas = ex.high_water;
    let layout = if ancillas == 0 {
        c.layout().clone()
    } else {
        let mut regs: Vec<(String, usize)> = c
            .layout()
            .registers()
            .iter()
            .map(|r| (r.name.clone(), r.size))
            .collect();
        regs.push(("anc".into(), ancillas));
        RegisterLayout::new(regs)?
    };
    let mut circuit = Circuit::new(layout);
    circuit.extend(ex.out)?;
    Ok(Expansion { circuit, ancillas })
}

pub fn count_resources(c: &Circuit) -> Result<GateCounts> {
    Ok(expand(c)?.counts())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResourceRow {
    pub builder: String,
    pub dim: usize,
    pub n: usize,
    pub system_dim: usize,
    pub counts: GateCounts,
}

/// Counts for each operator instance, in input order.
pub fn resource_sweep(ops: impl IntoIterator<Item = Operator>) -> Result<Vec<ResourceRow>> {
    ops.into_iter()
        .map(|op| {
            let e = op.build()?;
            Ok(ResourceRow {
                builder: op.name().to_string(),
                dim: op.dim(),
                n: op.n(),
                system_dim: e.system_dim,
                counts: count_resources(&e.circuit)?,
            })
        })
        .collect()
}

pub const RESOURCE_CSV_HEADER: &str = "builder,D,n,N_D,t_count,clifford_count,rotation_count,qubits,ancillas";

pub fn write_resource_csv(rows: &[ResourceRow], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{RESOURCE_CSV_HEADER}")?;
    for r in rows {
        let c = &r.counts;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.builder,
            r.dim,
            r.n,
            r.system_dim,
            c.t_count,
            c.clifford_count,
            c.rotation_count,
            c.qubit_count,
            c.ancilla_high_water
        )?;
    }
    Ok(())
}

/// Least-squares line through `(x, y)`: `(slope, intercept, r_squared)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Shape(format!(
            "need two or more paired points, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all x values equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok((slope, intercept, r2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{apply, unitary};
    use crate::linalg::ComplexVector;

    fn single_gate(nq: usize, g: Gate) -> Circuit {
        let mut c = Circuit::new(RegisterLayout::single("q", nq).unwrap());
        c.push(g).unwrap();
        c
    }

    /// Expanded circuit restricted to ancillas starting and ending in `|0>`.
    fn assert_sound(c: &Circuit) {
        let ex = expand(c).unwrap();
        let a = ex.ancillas;
        let u = unitary(c).unwrap();
        let dim = 1 << c.num_qubits();
        for col in 0..dim {
            let out = apply(&ex.circuit, &ComplexVector::basis(dim << a, col << a)).unwrap();
            for row in 0..(dim << a) {
                let want = if row & ((1 << a) - 1) == 0 {
                    u[(row >> a, col)]
                } else {
                    0.0.into()
                };
                assert!((out[row] - want).norm() < 1e-12, "row {row} col {col}");
            }
        }
    }

    #[test]
    fn clifford_only_has_no_t() {
        let mut c = Circuit::new(RegisterLayout::single("q", 3).unwrap());
        for (k, t) in [(GateKind::H, 0), (GateKind::X, 1), (GateKind::Z, 2)] {
            c.single(k, t).unwrap();
        }
        c.push(Gate::controlled(GateKind::X, 2, vec![Control::on(0)])).unwrap();
        let counts = count_resources(&c).unwrap();
        assert_eq!(
            counts,
            GateCounts {
                t_count: 0,
                clifford_count: 4,
                rotation_count: 0,
                ancilla_high_water: 0,
                qubit_count: 3
            }
        );
    }

    #[test]
    fn toffoli_costs_seven_t() {
        let c = single_gate(
            3,
            Gate::controlled(GateKind::X, 2, vec![Control::on(0), Control::on(1)]),
        );
        let counts = count_resources(&c).unwrap();
        assert_eq!((counts.t_count, counts.ancilla_high_water), (7, 0));
        assert_sound(&c);
    }

    #[test]
    fn isolated_multi_controlled_x() {
        for k in 2..=6 {
            let controls = (0..k).map(Control::on).collect();
            let c = single_gate(k + 1, Gate::controlled(GateKind::X, k, controls));
            let counts = count_resources(&c).unwrap();
            assert_eq!(counts.t_count, 7 * (2 * k - 3), "k = {k}");
            assert_eq!(counts.ancilla_high_water, k - 2);
        }
    }

    #[test]
    fn sound_for_every_kind_and_polarity() {
        let kinds = [GateKind::X, GateKind::Y, GateKind::Z, GateKind::H, GateKind::Ry(0.7)];
        for kind in kinds {
            for k in 0..=4 {
                for mask in 0..(1usize << k) {
                    let controls = (0..k)
                        .map(|i| Control {
                            qubit: i + 1,
                            polarity: (mask >> i) & 1 == 1,
                        })
                        .collect();
                    assert_sound(&single_gate(k + 1, Gate::controlled(kind, 0, controls)));
                }
            }
        }
    }

    #[test]
    fn prefix_reuse_is_sound() {
        let mut c = Circuit::new(RegisterLayout::single("q", 5).unwrap());
        let pre = vec![Control::on(0), Control::off(1)];
        let with = |extra: &[usize]| {
            let mut v = pre.clone();
            v.extend(extra.iter().map(|&q| Control::on(q)));
            v
        };
        c.single(GateKind::H, 2).unwrap();
        c.single(GateKind::H, 0).unwrap();
        c.push(Gate::controlled(GateKind::X, 4, with(&[2, 3]))).unwrap();
        c.push(Gate::controlled(GateKind::X, 3, with(&[2]))).unwrap();
        c.push(Gate::controlled(GateKind::H, 4, with(&[]))).unwrap();
        c.single(GateKind::H, 1).unwrap();
        c.push(Gate::controlled(GateKind::Ry(1.1), 2, with(&[3]))).unwrap();
        c.push(Gate::controlled(GateKind::Z, 0, vec![Control::on(4), Control::on(3)]))
            .unwrap();
        assert_sound(&c);
    }

    #[test]
    fn controlled_phase_gates_are_rejected() {
        for kind in [GateKind::S, GateKind::Sdg, GateKind::T, GateKind::Tdg] {
            let c = single_gate(2, Gate::controlled(kind, 0, vec![Control::on(1)]));
            assert!(matches!(count_resources(&c), Err(Error::Model(_))));
        }
    }

    #[test]
    fn controlled_ry_counts() {
        let c = single_gate(2, Gate::controlled(GateKind::Ry(0.3), 0, vec![Control::on(1)]));
        let counts = count_resources(&c).unwrap();
        assert_eq!(
            (counts.rotation_count, counts.clifford_count, counts.t_count),
            (2, 2, 0)
        );
    }

    #[test]
    fn fit_of_a_line() {
        let (s, i, r2) = linear_fit(&[1.0, 2.0, 3.0], &[3.0, 5.0, 7.0]).unwrap();
        assert!((s - 2.0).abs() < 1e-12 && (i - 1.0).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
        assert!(linear_fit(&[1.0], &[1.0]).is_err());
    }
}
