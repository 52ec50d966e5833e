//! Command-line front-end for the blocked multi-shift solvers,
//! eigensolvers, and pseudospectra routines.
//!
//! Exit codes: 0 success, 1 usage error, 2 file/parse error,
//! 3 numerical failure. Diagnostics go to standard error.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use trishift::generators;
use trishift::matrix::{DenseMatrix, MatRef, TriangularRef};
use trishift::multishift::multishift_trsm;
use trishift::pseudo::{spectral_cloud, spectral_portrait, spectral_window, GridSpec};
use trishift::safe::{safe_multishift_trsm, SafeConfig};
use trishift::schur::schur;
use trishift::{eig, Error as NumError};

use trishift_cli::bench::{run_bench, BenchOp, BenchReport};
use trishift_cli::field::{cloud_to_csv, field_to_csv, field_to_pgm};
use trishift_cli::fmt::g17;
use trishift_cli::io::{read_matrix, write_atomic, write_matrix, IoError};

#[derive(Parser)]
#[command(
    name = "trishift",
    about = "Blocked multi-shift triangular solves, eigensolvers, and pseudospectra",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve (U - lambda_j I) x_j = b_j with the blocked multi-shift kernel
    Solve(SolveArgs),
    /// Overflow-guarded solve; scale factors ride along as %s comments
    SafeSolve(SolveArgs),
    /// Eigenvalues and eigenvectors of a general square matrix
    Eig(EigArgs),
    /// Eigenvalues and (triangular) eigenvectors of an upper triangular matrix
    TriangEig(EigArgs),
    /// Resolvent norms at an explicit list of complex shifts
    Cloud(CloudArgs),
    /// Resolvent norms over a user-specified grid in the complex plane
    Window(WindowArgs),
    /// Resolvent norms over an automatically determined grid
    Portrait(PortraitArgs),
    /// Benchmark blocked kernels against their unblocked baselines
    Bench(BenchArgs),
    /// Write a test matrix in Matrix Market form
    Generate(GenerateArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Upper triangular matrix U (Matrix Market)
    #[arg(long)]
    matrix: String,
    /// Right-hand-side matrix B (Matrix Market)
    #[arg(long)]
    rhs: String,
    /// Shifts, one per right-hand-side column; zero shifts when omitted
    #[arg(long)]
    shifts: Option<String>,
    #[arg(long, default_value_t = 64)]
    block_size: usize,
    #[arg(long)]
    out: String,
}

#[derive(Args)]
struct EigArgs {
    #[arg(long)]
    matrix: String,
    #[arg(long, default_value_t = 64)]
    block_size: usize,
    #[arg(long)]
    out: String,
}

#[derive(Args)]
struct CloudArgs {
    #[arg(long)]
    matrix: String,
    /// Shift list (Matrix Market; entries read in column-major order)
    #[arg(long)]
    shifts: String,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 32)]
    maxit: u32,
    #[arg(long, default_value_t = 64)]
    block_size: usize,
    #[arg(long)]
    out: String,
}

#[derive(Args)]
struct WindowArgs {
    #[arg(long)]
    matrix: String,
    /// Grid as cx,cy,width,height,nx,ny
    #[arg(long)]
    grid: String,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 32)]
    maxit: u32,
    #[arg(long, default_value_t = 64)]
    block_size: usize,
    #[arg(long, default_value = "csv")]
    format: String,
    #[arg(long)]
    out: String,
}

#[derive(Args)]
struct PortraitArgs {
    #[arg(long)]
    matrix: String,
    /// Grid resolution as nx,ny (or one count for both)
    #[arg(long, default_value = "64,64")]
    resolution: String,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 32)]
    maxit: u32,
    #[arg(long, default_value_t = 64)]
    block_size: usize,
    #[arg(long, default_value = "csv")]
    format: String,
    #[arg(long)]
    out: String,
}

#[derive(Args)]
struct BenchArgs {
    /// One of trsm | multishift-trsm | safe-multishift-trsm
    #[arg(long)]
    op: String,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 64)]
    block_size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Runs per timing; the median is reported
    #[arg(long, default_value_t = 5)]
    reps: usize,
}

#[derive(Args)]
struct GenerateArgs {
    /// One of triangular-spd-spectrum | uniform-ball | grcar | jordan | diagonal
    #[arg(long)]
    kind: String,
    #[arg(long, default_value_t = 0)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Jordan eigenvalue as re,im
    #[arg(long)]
    lambda: Option<String>,
    /// Diagonal entries as a comma-separated list of reals
    #[arg(long)]
    values: Option<String>,
    #[arg(long)]
    out: String,
}

enum AppError {
    Usage(String),
    File(IoError),
    Numerical(NumError),
}

impl AppError {
    fn code(&self) -> i32 {
        match self {
            AppError::Usage(_) => 1,
            AppError::File(_) => 2,
            AppError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for AppError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AppError::Usage(m) => write!(f, "{m}"),
            AppError::File(e) => write!(f, "{e}"),
            AppError::Numerical(e) => write!(f, "{e}"),
        }
    }
}

impl From<IoError> for AppError {
    fn from(e: IoError) -> Self {
        AppError::File(e)
    }
}

impl From<NumError> for AppError {
    fn from(e: NumError) -> Self {
        AppError::Numerical(e)
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.code());
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    match cli.cmd {
        Cmd::Solve(a) => run_solve(a, false),
        Cmd::SafeSolve(a) => run_solve(a, true),
        Cmd::Eig(a) => run_eig(a, false),
        Cmd::TriangEig(a) => run_eig(a, true),
        Cmd::Cloud(a) => run_cloud(a),
        Cmd::Window(a) => run_window(a),
        Cmd::Portrait(a) => run_portrait(a),
        Cmd::Bench(a) => run_bench_cmd(a),
        Cmd::Generate(a) => run_generate(a),
    }
}

fn read_shift_list(path: &str) -> Result<Vec<Complex64>, AppError> {
    let m = read_matrix(path)?;
    let mut out = Vec::with_capacity(m.rows() * m.cols());
    for j in 0..m.cols() {
        out.extend_from_slice(m.col(j));
    }
    Ok(out)
}

/// Schur-factorize unless the matrix already is upper triangular;
/// resolvent norms are invariant under that similarity.
fn triangularize(a: &DenseMatrix) -> Result<DenseMatrix, AppError> {
    if a.as_ref().is_upper_triangular() {
        Ok(a.clone())
    } else {
        Ok(schur(a.as_ref())?.t)
    }
}

fn run_solve(a: SolveArgs, safe: bool) -> Result<(), AppError> {
    let u = read_matrix(&a.matrix)?;
    let mut b = read_matrix(&a.rhs)?;
    let shifts = match &a.shifts {
        Some(p) => read_shift_list(p)?,
        None => vec![Complex64::ZERO; b.cols()],
    };
    let ut = TriangularRef::upper(square_view(&u, &a.matrix)?);
    let mut post = Vec::new();
    if safe {
        let cfg = SafeConfig::default();
        let s = safe_multishift_trsm(ut, &shifts, b.as_mut(), &cfg, a.block_size)?;
        for (j, sv) in s.values().iter().enumerate() {
            post.push(format!("s {} {}", j + 1, g17(*sv)));
        }
    } else {
        multishift_trsm(ut, &shifts, b.as_mut(), a.block_size)?;
    }
    write_matrix(&a.out, &b, &[], &post)?;
    Ok(())
}

fn run_eig(a: EigArgs, triangular_input: bool) -> Result<(), AppError> {
    let mat = read_matrix(&a.matrix)?;
    let view = square_view(&mat, &a.matrix)?;
    let cfg = SafeConfig::default();
    let d = if triangular_input {
        eig::triang_eig(view, &cfg, a.block_size)?
    } else {
        eig::eig(view, &cfg, a.block_size)?
    };
    let mut pre = Vec::with_capacity(d.values.len());
    for (j, lam) in d.values.iter().enumerate() {
        pre.push(format!("lambda {} {} {}", j + 1, g17(lam.re), g17(lam.im)));
    }
    let mut post = Vec::with_capacity(d.scales.len());
    for (j, s) in d.scales.values().iter().enumerate() {
        post.push(format!("s {} {}", j + 1, g17(*s)));
    }
    write_matrix(&a.out, &d.vectors, &pre, &post)?;
    Ok(())
}

fn run_cloud(a: CloudArgs) -> Result<(), AppError> {
    let mat = read_matrix(&a.matrix)?;
    square_view(&mat, &a.matrix)?;
    let t = triangularize(&mat)?;
    let shifts = read_shift_list(&a.shifts)?;
    let cfg = SafeConfig::default();
    let pts = spectral_cloud(t.as_ref(), &shifts, a.tol, a.maxit, &cfg, a.block_size)?;
    write_atomic(&a.out, cloud_to_csv(&shifts, &pts).as_bytes())?;
    Ok(())
}

fn parse_grid(text: &str) -> Result<GridSpec, AppError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 6 {
        return Err(AppError::Usage(format!(
            "--grid expects cx,cy,width,height,nx,ny; got '{text}'"
        )));
    }
    let f = |s: &str| -> Result<f64, AppError> {
        s.trim()
            .parse()
            .map_err(|_| AppError::Usage(format!("cannot parse grid number '{s}'")))
    };
    let n = |s: &str| -> Result<usize, AppError> {
        s.trim()
            .parse()
            .map_err(|_| AppError::Usage(format!("cannot parse grid count '{s}'")))
    };
    GridSpec::new(
        Complex64::new(f(parts[0])?, f(parts[1])?),
        f(parts[2])?,
        f(parts[3])?,
        n(parts[4])?,
        n(parts[5])?,
    )
    .map_err(|e| AppError::Usage(e.to_string()))
}

fn write_field(
    out: &str,
    format: &str,
    field: &trishift::pseudo::ResolventField,
) -> Result<(), AppError> {
    match format {
        "csv" => write_atomic(out, field_to_csv(field).as_bytes())?,
        "pgm" => write_atomic(out, &field_to_pgm(field))?,
        other => return Err(AppError::Usage(format!("unknown format '{other}'; use csv or pgm"))),
    }
    Ok(())
}

fn run_window(a: WindowArgs) -> Result<(), AppError> {
    let mat = read_matrix(&a.matrix)?;
    square_view(&mat, &a.matrix)?;
    let t = triangularize(&mat)?;
    let grid = parse_grid(&a.grid)?;
    let cfg = SafeConfig::default();
    let field = spectral_window(t.as_ref(), grid, a.tol, a.maxit, &cfg, a.block_size)?;
    write_field(&a.out, &a.format, &field)
}

fn run_portrait(a: PortraitArgs) -> Result<(), AppError> {
    let mat = read_matrix(&a.matrix)?;
    square_view(&mat, &a.matrix)?;
    let (nx, ny) = parse_resolution(&a.resolution)?;
    let cfg = SafeConfig::default();
    let field = spectral_portrait(mat.as_ref(), nx, ny, a.tol, a.maxit, &cfg, a.block_size)?;
    write_field(&a.out, &a.format, &field)
}

fn parse_resolution(text: &str) -> Result<(usize, usize), AppError> {
    let parts: Vec<&str> = text.split(',').collect();
    let parse = |s: &str| -> Result<usize, AppError> {
        s.trim()
            .parse()
            .map_err(|_| AppError::Usage(format!("cannot parse resolution '{s}'")))
    };
    match parts.len() {
        1 => {
            let n = parse(parts[0])?;
            Ok((n, n))
        }
        2 => Ok((parse(parts[0])?, parse(parts[1])?)),
        _ => Err(AppError::Usage(format!("--resolution expects nx,ny; got '{text}'"))),
    }
}

fn run_bench_cmd(a: BenchArgs) -> Result<(), AppError> {
    let op = BenchOp::parse(&a.op)
        .ok_or_else(|| AppError::Usage(format!("unknown --op '{}'", a.op)))?;
    if a.reps == 0 {
        return Err(AppError::Usage("--reps must be at least 1".into()));
    }
    let report = run_bench(op, a.m, a.n, a.block_size, a.reps, a.seed)?;
    println!("{}", BenchReport::tsv_header());
    println!("{}", report.tsv_line());
    Ok(())
}

fn parse_complex_pair(text: &str) -> Result<Complex64, AppError> {
    let parts: Vec<&str> = text.split(',').collect();
    let parse = |s: &str| -> Result<f64, AppError> {
        s.trim()
            .parse()
            .map_err(|_| AppError::Usage(format!("cannot parse number '{s}'")))
    };
    match parts.len() {
        1 => Ok(Complex64::new(parse(parts[0])?, 0.0)),
        2 => Ok(Complex64::new(parse(parts[0])?, parse(parts[1])?)),
        _ => Err(AppError::Usage(format!("expected re or re,im; got '{text}'"))),
    }
}

fn run_generate(a: GenerateArgs) -> Result<(), AppError> {
    let mat = match a.kind.as_str() {
        "triangular-spd-spectrum" => {
            require_m(&a)?;
            generators::triangular_spd_spectrum(a.m, a.seed)
        }
        "uniform-ball" => {
            require_m(&a)?;
            generators::uniform_ball(a.m, a.seed)
        }
        "grcar" => {
            require_m(&a)?;
            generators::grcar(a.m)
        }
        "jordan" => {
            require_m(&a)?;
            let lam = match &a.lambda {
                Some(text) => parse_complex_pair(text)?,
                None => Complex64::ZERO,
            };
            generators::jordan(a.m, lam)
        }
        "diagonal" => {
            let Some(values) = &a.values else {
                return Err(AppError::Usage("--values is required for kind 'diagonal'".into()));
            };
            let mut entries = Vec::new();
            for tok in values.split(',') {
                entries.push(parse_complex_pair(tok)?);
            }
            generators::diagonal(&entries)
        }
        other => {
            return Err(AppError::Usage(format!(
                "unknown kind '{other}'; use triangular-spd-spectrum, uniform-ball, grcar, jordan, or diagonal"
            )))
        }
    };
    write_matrix(&a.out, &mat, &[], &[])?;
    Ok(())
}

fn require_m(a: &GenerateArgs) -> Result<(), AppError> {
    if a.m == 0 {
        return Err(AppError::Usage(format!("--m must be positive for kind '{}'", a.kind)));
    }
    Ok(())
}

fn square_view<'a>(m: &'a DenseMatrix, path: &str) -> Result<MatRef<'a>, AppError> {
    if m.rows() != m.cols() {
        return Err(AppError::Usage(format!(
            "{path}: expected a square matrix, found {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(m.as_ref())
}
