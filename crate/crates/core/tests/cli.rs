use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fdblock")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn verify_exit_codes() {
    assert_eq!(code(&run(&["verify", "--op", "laplace", "--dim", "2", "--n", "2"])), 0);
    assert_eq!(code(&run(&["verify", "--op", "wave", "--n", "2"])), 0);
    let strict = run(&["verify", "--op", "laplace", "--dim", "1", "--n", "3", "--tol", "1e-20"]);
    assert_eq!(code(&strict), 1);
    assert!(stdout(&strict).contains("FAIL"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["verify", "--op", "gradient", "--dim", "3", "--n", "2"],
        vec!["verify", "--op", "laplace", "--n", "2..4"],
        vec!["verify", "--op", "laplace", "--n", "2", "--tol", "0"],
        vec!["sweep", "--op", "laplace", "--dim", "1", "--n", "5..3"],
        vec!["sweep", "--op", "wave", "--n", "2"],
        vec!["sweep", "--op", "laplace", "--dim", "2", "--n", "2", "--family", "cos3"],
        vec!["export", "--op", "laplace", "--n", "3", "--format", "csv"],
        vec!["verify", "--op", "laplace", "--dim", "4", "--n", "6"],
        vec!["frobnicate"],
    ] {
        assert_eq!(code(&run(&args)), 2, "{args:?}");
    }
}

#[test]
fn unwritable_output_exits_three() {
    let out = run(&[
        "export",
        "--op",
        "laplace",
        "--n",
        "3",
        "--out",
        "/nonexistent-dir/x.txt",
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn sine_sweep_matches_closed_form() {
    let out = run(&[
        "sweep", "--op", "laplace", "--dim", "1", "--n", "3..8", "--family", "sin1",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "D,n,h,N_D,p_success,p_predicted,e_max,alpha");
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(str::to_owned).collect()).collect();
    assert_eq!(rows.len(), 6);
    for row in rows {
        let h: f64 = row[2].parse().unwrap();
        let p: f64 = row[4].parse().unwrap();
        assert!((p - (PI * h).sin().powi(4)).abs() < 1e-12);
    }
}

#[test]
fn three_d_sweep_uses_reduced_constant() {
    let out = run(&[
        "sweep", "--op", "laplace", "--dim", "3", "--n", "1..3", "--family", "sinprod",
    ]);
    let text = stdout(&out);
    for line in text.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        let c = f[5] / f[2].powi(4);
        assert!((c / (9.0 / 16.0 * PI.powi(4)) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn resources_csv_is_monotone() {
    let out = run(&["resources", "--op", "laplace", "--dim", "1..3", "--n", "2..8"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("builder,D,n,N_D,t_count,clifford_count,rotation_count,qubits,ancillas\n"));
    let rows: Vec<Vec<String>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect();
    assert_eq!(rows.len(), 21);
    for pair in rows.windows(2).filter(|w| w[0][1] == w[1][1]) {
        let (a, b): (usize, usize) = (pair[0][4].parse().unwrap(), pair[1][4].parse().unwrap());
        assert!(a <= b);
    }
    let lcu = stdout(&run(&["resources", "--op", "lcu", "--n", "2..8"]));
    let rotations: Vec<&str> = lcu.lines().skip(1).map(|l| l.split(',').nth(6).unwrap()).collect();
    assert!(rotations.iter().all(|&r| r == rotations[0] && r != "0"));
}

#[test]
fn export_matches_golden_and_files_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/laplace_d1_n3.txt");
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    for p in [&a, &b] {
        let out = run(&[
            "export",
            "--op",
            "laplace",
            "--dim",
            "1",
            "--n",
            "3",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
    }
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    assert_eq!(bytes, std::fs::read(golden).unwrap());

    let csv = dir.path().join("s.csv");
    let args = [
        "sweep",
        "--op",
        "lcu",
        "--n",
        "2..5",
        "--family",
        "cos3",
        "--out",
        csv.to_str().unwrap(),
    ];
    assert_eq!(code(&run(&args)), 0);
    let first = std::fs::read(&csv).unwrap();
    assert_eq!(code(&run(&args)), 0);
    assert_eq!(first, std::fs::read(&csv).unwrap());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 3);
}
