//! Benchmark harness: blocked solvers against their shift-by-shift
//! unblocked baselines on the well-conditioned generator.
//!
//! The baseline forms each shifted matrix explicitly (copying the upper
//! triangle and subtracting the shift from the diagonal) and runs one
//! unblocked solve per right-hand side: the same arithmetic the blocked
//! path performs, without the level-3 reorganization. Equivalence of the
//! two paths is asserted on a column sample before any timing.

use std::time::Instant;

use num_complex::Complex64;
use trishift::generators::{shift_ball, triangular_spd_spectrum, uniform_ball};
use trishift::matrix::offdiag_column_norms;
use trishift::multishift::multishift_trsm;
use trishift::safe::{safe_multishift_trsm, safe_trsv, SafeConfig};
use trishift::triangular::{trsm_blocked, trsv_unblocked};
use trishift::{DenseMatrix, Result, TriangularRef};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BenchOp {
    Trsm,
    MultishiftTrsm,
    SafeMultishiftTrsm,
}

impl BenchOp {
    pub fn parse(s: &str) -> Option<BenchOp> {
        match s {
            "trsm" => Some(BenchOp::Trsm),
            "multishift-trsm" => Some(BenchOp::MultishiftTrsm),
            "safe-multishift-trsm" => Some(BenchOp::SafeMultishiftTrsm),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BenchOp::Trsm => "trsm",
            BenchOp::MultishiftTrsm => "multishift-trsm",
            BenchOp::SafeMultishiftTrsm => "safe-multishift-trsm",
        }
    }
}

/// One benchmark measurement; written out as a TSV line.
#[derive(Clone, Debug)]
pub struct BenchReport {
    pub op: &'static str,
    pub m: usize,
    pub n: usize,
    pub nb: usize,
    pub seconds: f64,
    pub gflops: f64,
    pub baseline_seconds: f64,
    pub speedup: f64,
}

impl BenchReport {
    pub fn tsv_header() -> &'static str {
        "op\tm\tn\tnb\tseconds\tgflops\tbaseline_seconds\tspeedup"
    }

    pub fn tsv_line(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{:.6}\t{:.3}\t{:.6}\t{:.3}",
            self.op, self.m, self.n, self.nb, self.seconds, self.gflops, self.baseline_seconds, self.speedup
        )
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs[xs.len() / 2]
}

/// Copies the upper triangle of `u` into `scratch` and subtracts `shift`
/// from the diagonal; the strict lower triangle of `scratch` must already
/// be zero and stays untouched.
fn form_shifted(u: &DenseMatrix, shift: Complex64, scratch: &mut DenseMatrix) {
    let m = u.rows();
    for j in 0..m {
        let src = &u.col(j)[..=j];
        scratch.col_mut(j)[..=j].copy_from_slice(src);
        let d = scratch[(j, j)];
        scratch[(j, j)] = d - shift;
    }
}

/// Runs `op` at the given shape and returns the blocked-vs-baseline
/// measurement (median of `reps` runs each).
pub fn run_bench(op: BenchOp, m: usize, n: usize, nb: usize, reps: usize, seed: u64) -> Result<BenchReport> {
    let cfg = SafeConfig::default();
    let u = triangular_spd_spectrum(m, seed);
    let ut = TriangularRef::upper(u.as_ref());
    let shifts = match op {
        BenchOp::Trsm => vec![Complex64::ZERO; n],
        _ => shift_ball(n, Complex64::new(1.5, 0.0), 0.5, seed ^ 0x5113),
    };
    let b0 = uniform_ball_rect(m, n, seed ^ 0xb0b0);
    let norms = offdiag_column_norms(ut);

    // correctness gate on a column sample before any timing
    let sample = n.min(32);
    {
        let mut blocked = b0.clone();
        run_blocked(op, ut, &shifts, &mut blocked, &cfg, nb)?;
        let mut scratch = DenseMatrix::zeros(m, m);
        for j in 0..sample {
            let mut col = b0.col(j).to_vec();
            form_shifted(&u, shifts[j], &mut scratch);
            match op {
                BenchOp::SafeMultishiftTrsm => {
                    let s = safe_trsv(TriangularRef::upper(scratch.as_ref()), &mut col, &norms, &cfg)?;
                    assert!((s - 1.0).abs() < 1e-15, "well-conditioned baseline rescaled");
                }
                _ => trsv_unblocked(TriangularRef::upper(scratch.as_ref()), &mut col)?,
            }
            let mut cnorm = 0.0f64;
            let mut diff = 0.0f64;
            for i in 0..m {
                let r = blocked[(i, j)] - col[i];
                diff = diff.max(r.norm());
                cnorm = cnorm.max(col[i].norm());
            }
            assert!(
                diff <= 1e-10 * cnorm.max(1.0),
                "blocked and baseline disagree on column {j}: {diff}"
            );
        }
    }

    let blocked_times: Vec<f64> = (0..reps)
        .map(|_| {
            let mut b = b0.clone();
            let t0 = Instant::now();
            run_blocked(op, ut, &shifts, &mut b, &cfg, nb).map(|_| t0.elapsed().as_secs_f64())
        })
        .collect::<Result<_>>()?;

    let baseline_times: Vec<f64> = (0..reps)
        .map(|_| {
            let mut b = b0.clone();
            let mut scratch = DenseMatrix::zeros(m, m);
            let t0 = Instant::now();
            for j in 0..n {
                form_shifted(&u, shifts[j], &mut scratch);
                let st = TriangularRef::upper(scratch.as_ref());
                match op {
                    BenchOp::SafeMultishiftTrsm => {
                        safe_trsv(st, b.col_mut(j), &norms, &cfg)?;
                    }
                    _ => trsv_unblocked(st, b.col_mut(j))?,
                }
            }
            Ok(t0.elapsed().as_secs_f64())
        })
        .collect::<Result<_>>()?;

    let seconds = median(blocked_times);
    let baseline_seconds = median(baseline_times);
    let flops = 8.0 * (m as f64) * (m as f64) / 2.0 * n as f64;
    Ok(BenchReport {
        op: op.name(),
        m,
        n,
        nb,
        seconds,
        gflops: flops / seconds / 1e9,
        baseline_seconds,
        speedup: baseline_seconds / seconds,
    })
}

fn run_blocked(
    op: BenchOp,
    u: TriangularRef<'_>,
    shifts: &[Complex64],
    b: &mut DenseMatrix,
    cfg: &SafeConfig,
    nb: usize,
) -> Result<()> {
    match op {
        BenchOp::Trsm => trsm_blocked(u, b.as_mut(), nb),
        BenchOp::MultishiftTrsm => multishift_trsm(u, shifts, b.as_mut(), nb),
        BenchOp::SafeMultishiftTrsm => safe_multishift_trsm(u, shifts, b.as_mut(), cfg, nb).map(|_| ()),
    }
}

fn uniform_ball_rect(m: usize, n: usize, seed: u64) -> DenseMatrix {
    // rectangular cut of the square generator keeps seeding simple
    let square = uniform_ball(m.max(n), seed);
    DenseMatrix::from_fn(m, n, |i, j| square[(i, j)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_bench_runs_and_reports() {
        let r = run_bench(BenchOp::MultishiftTrsm, 96, 24, 16, 1, 7).unwrap();
        assert_eq!(r.op, "multishift-trsm");
        assert!(r.seconds > 0.0 && r.baseline_seconds > 0.0);
        assert!(r.speedup > 0.0);
        let line = r.tsv_line();
        assert_eq!(line.split('\t').count(), 8);
    }

    #[test]
    fn safe_bench_runs() {
        let r = run_bench(BenchOp::SafeMultishiftTrsm, 64, 16, 16, 1, 3).unwrap();
        assert!(r.speedup > 0.0);
    }
}
