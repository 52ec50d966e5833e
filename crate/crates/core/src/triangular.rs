//! Unblocked and blocked back substitution against an upper triangular
//! matrix. These are the unguarded kernels: a zero diagonal entry produces
//! infinities. Callers that need overflow protection use [`crate::safe`].

use num_complex::Complex64;

use crate::error::{contract, dim_mismatch, Result};
use crate::flops;
use crate::gemm::gemm_update;
use crate::matrix::{MatMut, TriangularRef, Uplo};
use crate::util::{axpy_neg, cdiv};

/// Bottom-up block ranges `[b0, b1)` covering `0..m` in steps of `nb`.
/// When `m` is not a multiple of `nb` the final (topmost) block is the
/// short one, keeping panel shapes regular at the bottom where most of the
/// substitution work happens.
pub(crate) fn blocks_bottom_up(m: usize, nb: usize) -> Vec<(usize, usize)> {
    assert!(nb >= 1);
    let mut out = Vec::with_capacity(m.div_ceil(nb));
    let rem = m % nb;
    let mut b0 = m.saturating_sub(nb);
    if m >= nb {
        loop {
            out.push((b0, b0 + nb));
            if b0 < nb {
                break;
            }
            b0 -= nb;
        }
    }
    if rem > 0 {
        out.push((0, rem));
    }
    out
}

/// Top-down block ranges; the final (bottom) block is the short one.
pub(crate) fn blocks_top_down(m: usize, nb: usize) -> Vec<(usize, usize)> {
    assert!(nb >= 1);
    (0..m).step_by(nb).map(|b0| (b0, (b0 + nb).min(m))).collect()
}

/// Single triangular solve by back substitution; `b` is overwritten with
/// the solution of `U x = b`.
///
/// Runs `i = m..1`, dividing by the diagonal entry and then subtracting
/// `x(i) * U(1:i-1, i)` from the remaining right-hand side. A zero diagonal
/// entry produces infinities and they propagate; this is the documented
/// unguarded path.
pub fn trsv_unblocked(u: TriangularRef<'_>, b: &mut [Complex64]) -> Result<()> {
    if u.uplo != Uplo::Upper {
        return contract("trsv_unblocked expects an upper triangular view");
    }
    let m = u.order();
    if b.len() != m {
        return dim_mismatch(format!("trsv: U is {}x{m}, b has length {}", m, b.len()));
    }
    trsv_raw(u, b);
    Ok(())
}

#[inline]
pub(crate) fn trsv_raw(u: TriangularRef<'_>, b: &mut [Complex64]) {
    let m = b.len();
    flops::add_trsv((m + m * m.saturating_sub(1) / 2) as u64);
    for i in (0..m).rev() {
        let col = u.mat.col(i);
        let xi = cdiv(b[i], col[i]);
        b[i] = xi;
        let (head, _) = b.split_at_mut(i);
        axpy_neg(head, xi, &col[..i]);
    }
}

/// Solves `U X = B` with blocked back substitution; `B` is overwritten
/// with `X`. Per-column diagonal-block solves go through
/// [`trsv_unblocked`]; each block's trailing update is a single
/// matrix-matrix product, which is where nearly all the work lands once
/// `m >> nb`.
pub fn trsm_blocked(u: TriangularRef<'_>, mut b: MatMut<'_>, nb: usize) -> Result<()> {
    if u.uplo != Uplo::Upper {
        return contract("trsm_blocked expects an upper triangular view");
    }
    if nb < 1 {
        return contract("trsm_blocked: block size must be at least 1");
    }
    let m = u.order();
    if b.rows() != m {
        return dim_mismatch(format!("trsm: U is {m}x{m}, B is {}x{}", b.rows(), b.cols()));
    }
    let n = b.cols();
    if m == 0 || n == 0 {
        return Ok(());
    }

    for (b0, b1) in blocks_bottom_up(m, nb) {
        let diag = TriangularRef::upper(u.mat.submatrix(b0, b1, b0, b1));
        for j in 0..n {
            trsv_raw(diag, &mut b.col_mut(j)[b0..b1]);
        }
        if b0 > 0 {
            let (top, bottom) = b.rb_mut().split_at_row(b0);
            let panel = u.mat.submatrix(0, b0, b0, b1);
            let solved = bottom.rb().submatrix(0, b1 - b0, 0, n);
            gemm_update(top, panel, solved, -Complex64::ONE, Complex64::ONE)?;
        }
    }
    Ok(())
}
