use std::f64::consts::PI;

use fdblock::analysis::{
    ancilla_masses, extract_block, success_probability, verify_block_pattern, verify_encoding, Route,
};
use fdblock::circuit::{apply, unitary, Circuit};
use fdblock::encodings::*;
use fdblock::linalg::{ComplexMatrix, ComplexVector};
use fdblock::operators::{apply_scaled_laplacian, sample_function, scaled_laplacian_dd};
use fdblock::{FunctionFamily, GridSpec};

fn golden(name: &str) -> String {
    let path = format!("{}/tests/golden/{name}.txt", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn exports_match_golden_files() {
    let cases = [
        ("laplace_d1_n3", encode_laplace_1d(3).unwrap()),
        ("laplace_d3_n1", encode_laplace_dd(3, 1).unwrap()),
        ("lcu_n3", encode_laplace_lcu(3).unwrap()),
        ("wave_n2", encode_wave_2d(2).unwrap()),
    ];
    for (name, e) in cases {
        let text = e.circuit.to_string();
        assert_eq!(text, golden(name), "{name}");
        let parsed: Circuit = text.parse().unwrap();
        assert_eq!(parsed, e.circuit, "{name} round trip");
    }
}

/// Gates strictly between the opening and closing Hadamard layers.
fn middle(e: &BlockEncoding, opening: usize, closing: usize) -> Circuit {
    let gates = e.circuit.gates();
    let mut c = Circuit::new(e.circuit.layout().clone());
    c.extend(gates[opening..gates.len() - closing].iter().cloned()).unwrap();
    c
}

#[test]
fn selection_register_routes_shifts_to_one_axis() {
    // D = 3: k has 2 qubits, so k = 3 selects no axis.
    let (dim, n) = (3, 1);
    let e = encode_laplace_dd(dim, n).unwrap();
    let part2 = middle(&e, 2 + 4, 2 + 2);
    let layout = e.circuit.layout().clone();
    let per_axis = 1usize << n;
    let total = 1usize << layout.num_qubits();
    for k in 0..4 {
        for l in 0..4 {
            for j in 0..per_axis.pow(dim as u32) {
                let mut values = vec![k, l];
                let mut coords: Vec<usize> = (0..dim).map(|d| (j >> (d * n)) % per_axis).collect();
                // registers are listed j2, j1, j0
                values.extend(coords.iter().rev());
                let input = layout.basis_index(&values).unwrap();
                if k < dim {
                    match l {
                        0 => coords[k] = (coords[k] + per_axis - 1) % per_axis,
                        3 => coords[k] = (coords[k] + 1) % per_axis,
                        _ => {}
                    }
                }
                let mut out_values = vec![k, l];
                out_values.extend(coords.iter().rev());
                let want = layout.basis_index(&out_values).unwrap();
                let out = apply(&part2, &ComplexVector::basis(total, input)).unwrap();
                assert_eq!(out, ComplexVector::basis(total, want), "k={k} l={l} j={j}");
            }
        }
    }
}

#[test]
fn one_axis_dd_equals_1d_unitary() {
    for n in 1..=4 {
        let a = unitary(&encode_laplace_dd(1, n).unwrap().circuit).unwrap();
        let b = unitary(&encode_laplace_1d(n).unwrap().circuit).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn reference_block_patterns_hold() {
    let encs = [
        encode_laplace_1d(2).unwrap(),
        encode_laplace_1d(3).unwrap(),
        encode_laplace_dd(2, 2).unwrap(),
        encode_laplace_dd(3, 2).unwrap(),
        encode_laplace_dd(5, 1).unwrap(),
        encode_laplace_lcu(4).unwrap(),
        encode_derivative_1d(4).unwrap(),
        encode_gradient_2d(3).unwrap(),
        encode_divergence_2d(3).unwrap(),
        encode_wave_2d(3).unwrap(),
    ];
    for e in &encs {
        let r = verify_block_pattern(e, 1e-12).unwrap();
        assert!(r.passed, "{r}");
    }
}

#[test]
fn four_dimensional_laplacian_via_block_extraction() {
    let e = encode_laplace_dd(4, 3).unwrap();
    assert_eq!((e.alpha, e.ancillas, e.num_qubits()), (1.0, 4, 16));
    let r = verify_encoding(&e, &scaled_laplacian_dd(4, 3).unwrap(), 1e-12).unwrap();
    assert!(r.passed, "{r}");
}

#[test]
fn lcu_instances() {
    let e = encode_laplace_lcu(3).unwrap();
    assert!(
        verify_encoding(&e, &scaled_laplacian_dd(1, 3).unwrap(), 1e-12)
            .unwrap()
            .passed
    );
    let id = encode_banded_lcu(3, 1.0, 0.0, 0.0).unwrap();
    let block = extract_block(&id, 0, 0).unwrap();
    assert!(
        block
            .max_abs_diff(&ComplexMatrix::identity(8).unwrap().scale_real(0.25))
            .unwrap()
            < 1e-12
    );
    let general = encode_banded_lcu(3, 0.4, 0.7, -0.3).unwrap();
    assert!(
        verify_encoding(&general, &banded_circulant(3, 0.4, 0.7, -0.3).unwrap(), 1e-12)
            .unwrap()
            .passed
    );
}

#[test]
fn derivative_block_is_antisymmetric_and_kills_constants() {
    let e = encode_derivative_1d(4).unwrap();
    let b = extract_block(&e, 0, 0).unwrap();
    assert!(b.add(&b.transpose()).unwrap().max_abs() < 1e-14);
    let ones = ComplexVector::from_real(&[0.25; 16]).unwrap();
    assert!(b.matvec(&ones).unwrap().norm2() < 1e-14);
}

#[test]
fn divergence_is_gradient_with_moved_hadamard() {
    let n = 2;
    let grad = encode_gradient_2d(n).unwrap();
    let div = encode_divergence_2d(n).unwrap();
    let mut hk = Circuit::new(grad.circuit.layout().clone());
    hk.single(fdblock::GateKind::H, 1).unwrap();
    let conj = fdblock::circuit::compose(&fdblock::circuit::compose(&hk, &grad.circuit).unwrap(), &hk).unwrap();
    let a = unitary(&conj).unwrap();
    let b = unitary(&div.circuit).unwrap();
    assert!(a.max_abs_diff(&b).unwrap() < 1e-12);
}

#[test]
fn success_ratio_against_lcu_is_sixteen() {
    for n in 3..=7 {
        let v = FunctionFamily::Cos3.sample(GridSpec::new(1, n).unwrap()).unwrap();
        let a = success_probability(&encode_laplace_1d(n).unwrap(), &v, Route::Circuit).unwrap();
        let b = success_probability(&encode_laplace_lcu(n).unwrap(), &v, Route::Circuit).unwrap();
        assert!((a / b - 16.0).abs() < 1e-9);
    }
}

#[test]
fn ancilla_masses_are_complete() {
    for n in 2..=6 {
        let e = encode_laplace_1d(n).unwrap();
        let v = sample_function(|x| (x[0] * 5.0).exp().sin() + 0.3, GridSpec::new(1, n).unwrap()).unwrap();
        let m = ancilla_masses(&e, &v).unwrap();
        let p = success_probability(&e, &v, Route::Matrix).unwrap();
        assert!((m[0] - p).abs() < 1e-12);
        assert!((m.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

/// Mean of `g` over an `m^D` periodic grid, the trapezoid rule on `[0,1)^D`.
fn periodic_mean(g: impl Fn(&[f64]) -> f64, dim: usize, m: usize) -> f64 {
    let total = m.pow(dim as u32);
    let mut x = vec![0.0; dim];
    let mut sum = 0.0;
    for k in 0..total {
        for (d, xd) in x.iter_mut().enumerate() {
            *xd = ((k / m.pow(d as u32)) % m) as f64 / m as f64;
        }
        sum += g(&x);
    }
    sum / total as f64
}

#[test]
fn scaled_laplacian_norm_approaches_continuum_constant() {
    // quadrature on 10x the n = 2 grid; every field here is a low-degree trig polynomial
    let m = 40;
    for (fam, dim) in [
        (FunctionFamily::Sin1, 1),
        (FunctionFamily::Cos3, 1),
        (FunctionFamily::SinProd, 2),
        (FunctionFamily::SinProd, 3),
    ] {
        let lv = periodic_mean(|x| fam.laplacian(x).powi(2), dim, m).sqrt();
        let v = periodic_mean(|x| fam.eval(x).powi(2), dim, m).sqrt();
        let c = lv / v / (4.0 * dim as f64);
        let n = 6;
        let spec = GridSpec::new(dim, n).unwrap();
        let gf = fam.sample(spec).unwrap();
        let out = apply_scaled_laplacian(spec, gf.values.as_slice()).unwrap();
        let norm = out.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let ratio = norm / spec.h().powi(2);
        assert!((ratio / c - 1.0).abs() < 0.02, "{fam} D={dim}: {ratio} vs {c}");
    }
    assert!((periodic_mean(|x| (2.0 * PI * x[0]).sin().powi(2), 1, 40) - 0.5).abs() < 1e-15);
}
