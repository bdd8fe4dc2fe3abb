//! `fdblock`: build, verify, sweep, cost and export finite-difference block encodings.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O error.

use std::fmt::Write as _;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fdblock::analysis::{sweep, verify_block_pattern, write_sweep_csv, SweepOperator, SweepRow, VerificationReport};
use fdblock::encodings::Operator;
use fdblock::resources::{resource_sweep, write_resource_csv, ResourceRow};
use fdblock::FunctionFamily;

#[derive(Parser)]
#[command(
    name = "fdblock",
    version,
    about = "Block encodings of periodic finite-difference operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the encoded blocks against reference matrices.
    Verify(CommonArgs),
    /// Success probability and finite-difference error over a range of n.
    Sweep(CommonArgs),
    /// Clifford+T gate counts over ranges of D and n.
    Resources(CommonArgs),
    /// Write the encoding circuit as text.
    Export(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    #[arg(long, value_enum)]
    op: OpName,
    /// Grid dimension D, an integer or an inclusive range `a..b`.
    #[arg(long)]
    dim: Option<Span>,
    /// Qubits per axis, an integer or an inclusive range `a..b`.
    #[arg(long)]
    n: Span,
    /// Test function for sweeps.
    #[arg(long)]
    family: Option<FunctionFamily>,
    /// Verification tolerance.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OpName {
    Laplace,
    Derivative,
    Gradient,
    Divergence,
    Wave,
    Lcu,
}

impl OpName {
    /// The grid dimension of a fixed-dimension operator.
    fn fixed_dim(self) -> Option<usize> {
        match self {
            OpName::Laplace => None,
            OpName::Derivative | OpName::Lcu => Some(1),
            OpName::Gradient | OpName::Divergence | OpName::Wave => Some(2),
        }
    }

    fn operator(self, dim: usize, n: usize) -> Operator {
        match self {
            OpName::Laplace => Operator::Laplace { dim, n },
            OpName::Derivative => Operator::Derivative { n },
            OpName::Gradient => Operator::Gradient { n },
            OpName::Divergence => Operator::Divergence { n },
            OpName::Wave => Operator::Wave { n },
            OpName::Lcu => Operator::LaplaceLcu { n },
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Txt,
}

/// `a` or `a..b`, both ends inclusive.
#[derive(Clone, Debug)]
struct Span(RangeInclusive<usize>);

impl FromStr for Span {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let int = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad integer '{t}': {e}"));
        match s.split_once("..") {
            Some((a, b)) => {
                let (a, b) = (int(a)?, int(b)?);
                if a > b {
                    return Err(format!("empty range {s}"));
                }
                Ok(Span(a..=b))
            }
            None => {
                let a = int(s)?;
                Ok(Span(a..=a))
            }
        }
    }
}

impl Span {
    fn single(&self, flag: &str) -> Result<usize, Failure> {
        if self.0.start() != self.0.end() {
            return Err(Failure::Usage(format!("--{flag} takes a single value here")));
        }
        Ok(*self.0.start())
    }
}

enum Failure {
    Verification,
    Usage(String),
    Io(String),
}

impl From<fdblock::Error> for Failure {
    fn from(e: fdblock::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn dims(args: &CommonArgs) -> Result<RangeInclusive<usize>, Failure> {
    match (args.op.fixed_dim(), &args.dim) {
        (None, Some(d)) => Ok(d.0.clone()),
        (None, None) => Ok(1..=1),
        (Some(fixed), None) => Ok(fixed..=fixed),
        (Some(fixed), Some(d)) if d.0 == (fixed..=fixed) => Ok(fixed..=fixed),
        (Some(fixed), Some(_)) => Err(Failure::Usage(format!("this operator is defined for D = {fixed} only"))),
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Io(e.to_string());
    match out {
        None => std::io::stdout().write_all(bytes).map_err(io),
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
            tmp.write_all(bytes).map_err(io)?;
            tmp.persist(path).map_err(|e| io(e.error))?;
            Ok(())
        }
    }
}

fn report_csv(r: &VerificationReport) -> String {
    format!(
        "operator,blocks,max_deviation,unitarity_residual,tolerance,passed\n\"{}\",{},{:.16e},{:.16e},{:.16e},{}\n",
        r.label, r.blocks_checked, r.max_deviation, r.unitarity_residual, r.tolerance, r.passed
    )
}

fn cmd_verify(args: &CommonArgs) -> Result<bool, Failure> {
    if args.tol.is_nan() || args.tol <= 0.0 {
        return Err(Failure::Usage("--tol must be positive".into()));
    }
    let dim = Span(dims(args)?).single("dim")?;
    let n = args.n.single("n")?;
    let e = args.op.operator(dim, n).build()?;
    let report = verify_block_pattern(&e, args.tol)?;
    let text = match args.format.unwrap_or(Format::Txt) {
        Format::Txt => format!("{report}\n"),
        Format::Csv => report_csv(&report),
    };
    emit(args.out.as_deref(), text.as_bytes())?;
    Ok(report.passed)
}

fn sweep_txt(rows: &[SweepRow]) -> String {
    let mut s = format!(
        "{:>2} {:>3} {:>12} {:>10} {:>24} {:>24} {:>24}\n",
        "D", "n", "h", "N_D", "p_success", "p_predicted", "e_max"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:>2} {:>3} {:>12.6e} {:>10} {:>24.16e} {:>24.16e} {:>24.16e}",
            r.dim, r.n, r.h, r.system_dim, r.p_success, r.p_predicted, r.e_max
        );
    }
    s
}

fn cmd_sweep(args: &CommonArgs) -> Result<(), Failure> {
    let op = match args.op {
        OpName::Laplace => SweepOperator::Laplace,
        OpName::Lcu => SweepOperator::Lcu,
        _ => return Err(Failure::Usage("sweep supports --op laplace and --op lcu".into())),
    };
    let dim = Span(dims(args)?).single("dim")?;
    let family = args.family.unwrap_or(FunctionFamily::SinProd);
    let rows = sweep(op, dim, args.n.0.clone(), family)?;
    let bytes = match args.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            write_sweep_csv(&rows, &mut buf).map_err(|e| Failure::Io(e.to_string()))?;
            buf
        }
        Format::Txt => sweep_txt(&rows).into_bytes(),
    };
    emit(args.out.as_deref(), &bytes)
}

fn resources_txt(rows: &[ResourceRow]) -> String {
    let mut s = format!(
        "{:<11} {:>2} {:>3} {:>10} {:>8} {:>9} {:>9} {:>6} {:>8}\n",
        "builder", "D", "n", "N_D", "t_count", "clifford", "rotation", "qubits", "ancillas"
    );
    for r in rows {
        let c = &r.counts;
        let _ = writeln!(
            s,
            "{:<11} {:>2} {:>3} {:>10} {:>8} {:>9} {:>9} {:>6} {:>8}",
            r.builder,
            r.dim,
            r.n,
            r.system_dim,
            c.t_count,
            c.clifford_count,
            c.rotation_count,
            c.qubit_count,
            c.ancilla_high_water
        );
    }
    s
}

fn cmd_resources(args: &CommonArgs) -> Result<(), Failure> {
    let dims = dims(args)?;
    let mut ops = Vec::new();
    for dim in dims {
        for n in args.n.0.clone() {
            ops.push(args.op.operator(dim, n));
        }
    }
    let rows = resource_sweep(ops)?;
    let bytes = match args.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            write_resource_csv(&rows, &mut buf).map_err(|e| Failure::Io(e.to_string()))?;
            buf
        }
        Format::Txt => resources_txt(&rows).into_bytes(),
    };
    emit(args.out.as_deref(), &bytes)
}

fn cmd_export(args: &CommonArgs) -> Result<(), Failure> {
    if args.format == Some(Format::Csv) {
        return Err(Failure::Usage("export writes text circuits only".into()));
    }
    let dim = Span(dims(args)?).single("dim")?;
    let n = args.n.single("n")?;
    let e = args.op.operator(dim, n).build()?;
    emit(args.out.as_deref(), e.circuit.to_string().as_bytes())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Verify(a) => cmd_verify(a).and_then(|ok| if ok { Ok(()) } else { Err(Failure::Verification) }),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Resources(a) => cmd_resources(a),
        Command::Export(a) => cmd_export(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("I/O error: {msg}");
            ExitCode::from(3)
        }
    }
}
