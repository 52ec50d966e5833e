//! Overflow-proof triangular solves.
//!
//! The guarded solvers return a per-column scale `s` in `(0, 1]` such that
//! `(U - lambda I) x = s b` holds with every intermediate quantity kept
//! strictly below the overflow threshold `Omega`. Growth is tracked with
//! two running bounds: `M` on the magnitude of the entry just produced by
//! the diagonal step, and `G` on the infinity norm of the remaining
//! right-hand side. Both are maintained as lower bounds on their
//! reciprocals so the bookkeeping itself cannot overflow, and a solve
//! first runs the full recursion once: if neither bound can reach `Omega`,
//! plain back substitution is safe and `s = 1` without further checks.

use num_complex::Complex64;

use crate::error::{contract, dim_mismatch, Result};
use crate::flops;
use crate::gemm::{gemm_conj_a_update, gemm_update};
use crate::matrix::{ColumnNorms, DenseMatrix, MatMut, MatRef, TriangularRef, Uplo};
use crate::multishift::{copy_block, shifted_block};
use crate::triangular::{blocks_bottom_up, blocks_top_down, trsv_raw};
use crate::util::{abs_c, axpy_neg, cdiv, norm_inf_vec, scale_slice};

/// Smallest positive value `s` is allowed to take. The true cumulative
/// scale can fall below what f64 represents on pathological inputs; the
/// floor keeps `s` inside `(0, 1]` instead of flushing to zero.
const S_FLOOR: f64 = f64::MIN_POSITIVE * f64::EPSILON;

/// Machine-dependent constants for safeguarded substitution.
#[derive(Clone, Copy, Debug)]
pub struct SafeConfig {
    /// Overflow threshold `Omega`; every intermediate stays below it.
    pub omega: f64,
    /// Unit roundoff.
    pub eps: f64,
    /// Smallest normalized positive value.
    pub safe_min: f64,
}

impl Default for SafeConfig {
    fn default() -> Self {
        let eps = f64::EPSILON;
        let safe_min = f64::MIN_POSITIVE;
        SafeConfig {
            omega: 1.0 / (safe_min / eps), // ~1e292 in double precision
            eps,
            safe_min,
        }
    }
}

/// Outcome of the growth estimate for one right-hand side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrowthClass {
    /// Worst-case growth stays below `Omega`; plain back substitution is safe.
    Fast,
    /// Growth may reach `Omega`; use the safeguarded loop.
    Guarded,
}

/// Running reciprocal lower bounds for the growth recursion.
///
/// `m_recip` bounds `1/M(i)` and `g_recip` bounds `1/G(i)`; both only ever
/// decrease as the recursion walks up the matrix, mirroring the monotone
/// growth of `M` and `G` themselves.
#[derive(Clone, Copy, Debug)]
pub struct GrowthState {
    m_recip: f64,
    g_recip: f64,
}

impl GrowthState {
    /// Initial state: `M(m+1) = 0`, `G(m+1) = b_inf`.
    pub fn new(b_inf: f64) -> Self {
        GrowthState {
            m_recip: f64::INFINITY,
            g_recip: if b_inf == 0.0 { f64::INFINITY } else { 1.0 / b_inf },
        }
    }

    /// One step of the recursion for a row with diagonal modulus
    /// `diag_abs` and off-diagonal column norm `offdiag_norm`:
    /// `M(i) = max(G(i+1)/|u_ii|, M(i+1))`,
    /// `G(i) = G(i+1) * (1 + cnorm_i / |u_ii|)`.
    #[inline]
    pub fn step(&mut self, diag_abs: f64, offdiag_norm: f64) {
        if diag_abs == 0.0 {
            // division by zero: both bounds blow up
            self.m_recip = 0.0;
            self.g_recip = 0.0;
            return;
        }
        self.m_recip = self.m_recip.min(self.g_recip * diag_abs);
        // an overflowing denominator drives the factor to zero, which errs
        // on the guarded side
        self.g_recip *= diag_abs / (diag_abs + offdiag_norm);
    }

    pub fn m_recip(&self) -> f64 {
        self.m_recip
    }

    pub fn g_recip(&self) -> f64 {
        self.g_recip
    }

    /// True when both bounds are certified below `omega`.
    #[inline]
    pub fn bounded_by(&self, omega: f64) -> bool {
        let inv = 1.0 / omega;
        self.m_recip > inv && self.g_recip > inv
    }
}

/// Runs the reciprocal growth recursion over the whole matrix and reports
/// whether plain back substitution is certified overflow-free for a
/// right-hand side of infinity norm `b_inf`.
pub fn growth_precheck(
    u: TriangularRef<'_>,
    norms: &ColumnNorms,
    b_inf: f64,
    cfg: &SafeConfig,
) -> Result<GrowthClass> {
    if u.uplo != Uplo::Upper {
        return contract("growth_precheck expects an upper triangular view");
    }
    if norms.len() != u.order() {
        return dim_mismatch(format!(
            "norms has {} entries for a {1}x{1} matrix",
            norms.len(),
            u.order()
        ));
    }
    if !b_inf.is_finite() || b_inf < 0.0 {
        return contract("growth_precheck: b_inf must be finite and nonnegative");
    }
    let fast = growth_is_fast(u.mat, norms.values(), b_inf, cfg);
    Ok(if fast { GrowthClass::Fast } else { GrowthClass::Guarded })
}

fn growth_is_fast(u: MatRef<'_>, norms: &[f64], b_inf: f64, cfg: &SafeConfig) -> bool {
    let m = norms.len();
    flops::add_other(m as u64);
    if b_inf == 0.0 {
        return true;
    }
    let mut st = GrowthState::new(b_inf);
    for i in (0..m).rev() {
        st.step(abs_c(u.get(i, i)), norms[i]);
        if !st.bounded_by(cfg.omega) {
            return false;
        }
    }
    true
}

/// Per-column scaling factors produced by a safeguarded solve; every entry
/// lies in `(0, 1]` and only ever decreases while the solve runs.
#[derive(Clone, Debug)]
pub struct ScaleVector(Vec<f64>);

impl ScaleVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Index<usize> for ScaleVector {
    type Output = f64;
    fn index(&self, j: usize) -> &f64 {
        &self.0[j]
    }
}

/// Rescale factor targeting `t * (num/den) = omega/2`, evaluated without
/// overflow and clamped into `[MIN_POSITIVE, 1/2]`.
#[inline]
fn shrink_ratio(num: f64, den: f64, omega: f64) -> f64 {
    let half = 0.5 * omega;
    let t = if den >= 1.0 { (half / num) * den } else { (half * den) / num };
    t.clamp(f64::MIN_POSITIVE, 0.5)
}

/// Rescale factor targeting `t * (g + mb*cn) = omega/2`; falls back to a
/// term-wise bound when the sum itself overflows f64.
#[inline]
fn shrink_sum(g: f64, mb: f64, cn: f64, omega: f64) -> f64 {
    let sum = g + mb * cn;
    let t = if sum.is_finite() {
        (0.5 * omega) / sum
    } else {
        let quarter = 0.25 * omega;
        let t1 = if g > 0.0 { quarter / g } else { 1.0 };
        let t2 = if mb > 0.0 && cn > 0.0 { (quarter / mb) / cn } else { 1.0 };
        t1.min(t2)
    };
    t.clamp(f64::MIN_POSITIVE, 0.5)
}

#[inline]
fn apply_scale(s: &mut f64, t: f64) {
    *s = (*s * t).max(S_FLOOR);
}

/// Diagonal replacement for exactly-zero pivots: `eps` times the block's
/// magnitude scale, or bare `eps` when the block is entirely zero (so that
/// `1/delta` stays far below `omega`).
fn delta_for(norms: &[f64], u: MatRef<'_>, cfg: &SafeConfig) -> f64 {
    let mut scale = 0.0f64;
    for (k, cn) in norms.iter().enumerate() {
        scale = scale.max(*cn).max(abs_c(u.get(k, k)));
    }
    if scale > 0.0 && scale.is_finite() {
        cfg.eps * scale
    } else {
        cfg.eps
    }
}

/// Single safeguarded triangular solve. `b` is overwritten with `x` and
/// the returned scale `s` satisfies `U x = s b` with all outputs finite
/// and `|x|_inf < Omega`.
///
/// Exactly-zero diagonal entries are replaced by a small positive `delta`;
/// whenever the running `M` or `G` bound would reach `Omega`, the whole
/// right-hand side and the bookkeeping are rescaled by a `t` in `(0, 1)`.
pub fn safe_trsv(
    u: TriangularRef<'_>,
    b: &mut [Complex64],
    norms: &ColumnNorms,
    cfg: &SafeConfig,
) -> Result<f64> {
    if u.uplo != Uplo::Upper {
        return contract("safe_trsv expects an upper triangular view");
    }
    let m = u.order();
    if b.len() != m || norms.len() != m {
        return dim_mismatch(format!(
            "safe_trsv: U is {m}x{m}, b has length {}, norms has {}",
            b.len(),
            norms.len()
        ));
    }
    if b.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return contract("safe_trsv: right-hand side must be finite");
    }
    if b.iter().all(|z| *z == Complex64::ZERO) {
        return contract("safe_trsv: right-hand side must be nonzero");
    }
    Ok(safe_trsv_inner(u, b, norms.values(), cfg))
}

/// Safeguarded back substitution without the public contract checks; a
/// zero segment returns `s = 1` untouched. The blocked sweeps need this:
/// individual block segments of a nonzero column are often zero.
pub(crate) fn safe_trsv_inner(
    u: TriangularRef<'_>,
    b: &mut [Complex64],
    norms: &[f64],
    cfg: &SafeConfig,
) -> f64 {
    let m = b.len();
    debug_assert_eq!(u.order(), m);
    debug_assert_eq!(norms.len(), m);
    let b_inf = norm_inf_vec(b);
    if b_inf == 0.0 {
        return 1.0;
    }
    if b_inf < cfg.omega && growth_is_fast(u.mat, norms, b_inf, cfg) {
        trsv_raw(u, b);
        return 1.0;
    }

    flops::add_trsv((m + m * m.saturating_sub(1) / 2) as u64);
    let delta = delta_for(norms, u.mat, cfg);
    let mut s = 1.0f64;
    let mut g = b_inf;
    for i in (0..m).rev() {
        let col = u.mat.col(i);
        let uii = if col[i] == Complex64::ZERO { Complex64::new(delta, 0.0) } else { col[i] };
        let uii_abs = abs_c(uii);

        // diagonal-step bound M = |b_i / u_ii|
        let bi_abs = abs_c(b[i]);
        let q = bi_abs / uii_abs;
        if !(q < cfg.omega) {
            let t = shrink_ratio(bi_abs, uii_abs, cfg.omega);
            scale_slice(b, t);
            apply_scale(&mut s, t);
            g *= t;
            flops::add_other(m as u64);
        }
        let xi = cdiv(b[i], uii);
        b[i] = xi;
        let mut mb = abs_c(xi);

        // substitution-step bound G += M * cnorm_i
        let cn = norms[i];
        let mut g_new = g + mb * cn;
        for _ in 0..4 {
            if g_new < cfg.omega {
                break;
            }
            let t = shrink_sum(g, mb, cn, cfg.omega);
            scale_slice(b, t);
            apply_scale(&mut s, t);
            g *= t;
            mb *= t;
            g_new = g + mb * cn;
            flops::add_other(m as u64);
        }
        g = g_new;

        let (head, tail) = b.split_at_mut(i);
        axpy_neg(head, tail[0], &col[..i]);
    }
    debug_assert!(s > 0.0 && s <= 1.0);
    s
}

fn check_columns_nonzero(b: &MatMut<'_>) -> Result<()> {
    for j in 0..b.cols() {
        let mut all_zero = true;
        for z in b.rb().col(j) {
            if !z.re.is_finite() || !z.im.is_finite() {
                return contract(format!("column {j} of B contains a non-finite entry"));
            }
            if *z != Complex64::ZERO {
                all_zero = false;
            }
        }
        if all_zero {
            return contract(format!(
                "column {j} of B is zero; safeguarded solves require nonzero right-hand sides"
            ));
        }
    }
    Ok(())
}

/// Safeguarded blocked multi-shift solve: column `j` of `B` is overwritten
/// with `x_j` and the returned scales satisfy `(U - lambda_j I) x_j = s_j b_j`
/// with all outputs finite.
pub fn safe_multishift_trsm(
    u: TriangularRef<'_>,
    shifts: &[Complex64],
    mut b: MatMut<'_>,
    cfg: &SafeConfig,
    nb: usize,
) -> Result<ScaleVector> {
    validate_blocked(&u, None, shifts, &b, nb)?;
    check_columns_nonzero(&b)?;
    safe_blocked_backward(u, None, shifts, b.rb_mut(), cfg, nb, false)
}

/// Safeguarded generalized solve: `(U - lambda_j V) x_j = s_j b_j`.
pub fn safe_generalized_multishift_trsm(
    u: TriangularRef<'_>,
    v: TriangularRef<'_>,
    shifts: &[Complex64],
    mut b: MatMut<'_>,
    cfg: &SafeConfig,
    nb: usize,
) -> Result<ScaleVector> {
    validate_blocked(&u, Some(&v), shifts, &b, nb)?;
    check_columns_nonzero(&b)?;
    safe_blocked_backward(u, Some(v), shifts, b.rb_mut(), cfg, nb, false)
}

/// Generalized sweep without the nonzero-column contract check, for the
/// generalized eigensolver: its strictly upper right-hand sides may have
/// legitimately zero columns (the eigenvector is then exactly `e_k`),
/// which solve to zero with scale one.
pub(crate) fn safe_generalized_multishift_trsm_any(
    u: TriangularRef<'_>,
    v: TriangularRef<'_>,
    shifts: &[Complex64],
    b: MatMut<'_>,
    cfg: &SafeConfig,
    nb: usize,
) -> Result<ScaleVector> {
    validate_blocked(&u, Some(&v), shifts, &b, nb)?;
    safe_blocked_backward(u, Some(v), shifts, b, cfg, nb, false)
}

/// Entry point for the triangular eigensolver: `B` is strictly upper
/// triangular and column `k`'s active segment is its first `k` rows.
/// Inactive rows see no arithmetic at all, and columns whose active
/// segment is exhausted drop out of the substitution products.
pub(crate) fn safe_multishift_trsm_upper_rhs(
    u: TriangularRef<'_>,
    shifts: &[Complex64],
    b: MatMut<'_>,
    cfg: &SafeConfig,
    nb: usize,
) -> Result<ScaleVector> {
    validate_blocked(&u, None, shifts, &b, nb)?;
    safe_blocked_backward(u, None, shifts, b, cfg, nb, true)
}

fn validate_blocked(
    u: &TriangularRef<'_>,
    v: Option<&TriangularRef<'_>>,
    shifts: &[Complex64],
    b: &MatMut<'_>,
    nb: usize,
) -> Result<()> {
    if u.uplo != Uplo::Upper {
        return contract("safeguarded multi-shift solve expects an upper triangular view");
    }
    if nb < 1 {
        return contract("block size must be at least 1");
    }
    if let Some(v) = v {
        if v.uplo != Uplo::Upper {
            return contract("generalized solve expects upper triangular V");
        }
        if v.order() != u.order() {
            return dim_mismatch(format!("U is {0}x{0}, V is {1}x{1}", u.order(), v.order()));
        }
    }
    if b.rows() != u.order() {
        return dim_mismatch(format!("U is {0}x{0}, B is {1}x{2}", u.order(), b.rows(), b.cols()));
    }
    if shifts.len() != b.cols() {
        return dim_mismatch(format!(
            "{} shifts for {} right-hand-side columns",
            shifts.len(),
            b.cols()
        ));
    }
    Ok(())
}

fn offdiag_norms_into(block: MatRef<'_>, bs: usize, out: &mut [f64]) {
    for k in 0..bs {
        let col = &block.col(k)[..k];
        let mut mx = 0.0f64;
        for z in col {
            let a = abs_c(*z);
            if a > mx {
                mx = a;
            }
        }
        out[k] = mx;
    }
    flops::add_other((bs * bs.saturating_sub(1) / 2) as u64);
}

/// `sum over k in b0..b1 of max_{i < b0} |M(i, k)|`: the per-block
/// coefficient of the substitution-step growth bound.
fn panel_colsum(mat: MatRef<'_>, b0: usize, b1: usize) -> f64 {
    let mut total = 0.0f64;
    for k in b0..b1 {
        let col = &mat.col(k)[..b0];
        let mut mx = 0.0f64;
        for z in col {
            let a = abs_c(*z);
            if a > mx {
                mx = a;
            }
        }
        total += mx;
    }
    flops::add_other((b0 * (b1 - b0)) as u64);
    total
}

/// The blocked backward sweep shared by the standard, generalized, and
/// upper-triangular-rhs (eigensolver shortcut) variants. With
/// `upper_rhs` set, column `j` participates only while the block start is
/// strictly below row `j`.
fn safe_blocked_backward(
    u: TriangularRef<'_>,
    v: Option<TriangularRef<'_>>,
    shifts: &[Complex64],
    mut b: MatMut<'_>,
    cfg: &SafeConfig,
    nb: usize,
    upper_rhs: bool,
) -> Result<ScaleVector> {
    debug_assert!(!(v.is_some() && upper_rhs));
    let m = u.order();
    let n = b.cols();
    let mut s = vec![1.0f64; n];
    if m == 0 || n == 0 {
        return Ok(ScaleVector(s));
    }

    let mut g: Vec<f64> = (0..n).map(|j| norm_inf_vec(b.rb().col(j))).collect();
    flops::add_other((m * n) as u64);

    let bs_max = nb.min(m);
    let mut scratch = DenseMatrix::zeros(bs_max, bs_max);
    let mut staged = v.map(|_| DenseMatrix::zeros(bs_max, n));
    let mut block_norms = vec![0.0f64; bs_max];
    let mut shift_norms = vec![0.0f64; bs_max];

    // active segment length of column j within block (b0, b1); None = skip
    let seg_of = |j: usize, b0: usize, b1: usize| -> Option<usize> {
        if upper_rhs {
            if j <= b0 {
                None
            } else {
                Some((j - b0).min(b1 - b0))
            }
        } else {
            Some(b1 - b0)
        }
    };

    for (b0, b1) in blocks_bottom_up(m, nb) {
        let bs = b1 - b0;
        // off-diagonal norms of the U diagonal block are shift-independent
        // and shared across every right-hand side
        offdiag_norms_into(u.mat.submatrix(b0, b1, b0, b1), bs, &mut block_norms);
        let su = panel_colsum(u.mat, b0, b1);
        let sv = v.map(|vt| panel_colsum(vt.mat, b0, b1));

        // diagonal-block step
        for (j, &shift) in shifts.iter().enumerate() {
            let Some(seg) = seg_of(j, b0, b1) else { continue };
            let norms_seg: &[f64] = match v {
                None => {
                    shifted_block(u.mat, b0, b0 + seg, shift, &mut scratch);
                    &block_norms[..seg]
                }
                Some(vt) => {
                    copy_block(u.mat, b0, b0 + seg, &mut scratch);
                    for jj in 0..seg {
                        let vcol = &vt.mat.col(b0 + jj)[b0..=b0 + jj];
                        let dst = &mut scratch.col_mut(jj)[..=jj];
                        for (d, vv) in dst.iter_mut().zip(vcol) {
                            *d -= shift * *vv;
                        }
                    }
                    // the shifted pencil block has shift-dependent
                    // off-diagonal entries; recompute its norms
                    offdiag_norms_into(scratch.submatrix(0, seg, 0, seg), seg, &mut shift_norms);
                    &shift_norms[..seg]
                }
            };
            let diag = TriangularRef::upper(scratch.submatrix(0, seg, 0, seg));
            let t = safe_trsv_inner(diag, &mut b.col_mut(j)[b0..b0 + seg], norms_seg, cfg);
            if t < 1.0 {
                let col = b.col_mut(j);
                scale_slice(&mut col[..b0], t);
                if !upper_rhs {
                    // rows past the active segment are exact zeros when the
                    // right-hand side is strictly upper triangular
                    scale_slice(&mut col[b1..], t);
                }
                apply_scale(&mut s[j], t);
                g[j] *= t;
                flops::add_other(m as u64);
            }
        }

        // growth bound advance ahead of the substitution step
        for (j, &shift) in shifts.iter().enumerate() {
            let Some(seg) = seg_of(j, b0, b1) else { continue };
            let colsum = match sv {
                Some(svv) => su + abs_c(shift) * svv,
                None => su,
            };
            let bseg_inf = norm_inf_vec(&b.col_mut(j)[b0..b0 + seg]);
            let mut g_new = g[j] + colsum * bseg_inf;
            for _ in 0..4 {
                if g_new < cfg.omega {
                    break;
                }
                let t = shrink_sum(g[j], colsum, bseg_inf, cfg.omega);
                scale_slice(b.col_mut(j), t);
                apply_scale(&mut s[j], t);
                g[j] *= t;
                g_new = g[j] + colsum * norm_inf_vec(&b.col_mut(j)[b0..b0 + seg]);
                flops::add_other(m as u64);
            }
            g[j] = g_new;
            if let Some(stg) = staged.as_mut() {
                // staged after all rescaling so the V panel update stays
                // consistent with the scaled solution block
                let src = &b.col_mut(j)[b0..b1];
                for (d, z) in stg.col_mut(j)[..bs].iter_mut().zip(src) {
                    *d = shift * *z;
                }
            }
        }

        // substitution step
        if b0 > 0 {
            let col_lo = if upper_rhs { (b0 + 1).min(n) } else { 0 };
            if col_lo < n {
                let (mut top, bottom) = b.rb_mut().split_at_row(b0);
                let u_panel = u.mat.submatrix(0, b0, b0, b1);
                let solved = bottom.rb().submatrix(0, bs, col_lo, n);
                let top_cols = top.rb_mut().submatrix_mut(0, b0, col_lo, n);
                gemm_update(top_cols, u_panel, solved, -Complex64::ONE, Complex64::ONE)?;
                if let (Some(vt), Some(stg)) = (v, staged.as_ref()) {
                    let v_panel = vt.mat.submatrix(0, b0, b0, b1);
                    let staged_view = stg.submatrix(0, bs, col_lo, n);
                    let top_cols = top.submatrix_mut(0, b0, col_lo, n);
                    gemm_update(top_cols, v_panel, staged_view, Complex64::ONE, Complex64::ONE)?;
                }
            }
        }
    }
    Ok(ScaleVector(s))
}

/// Safeguarded blocked multi-shift solve against the conjugate transpose:
/// `(U - lambda_j I)^H x_j = s_j b_j` with `U` upper triangular.
///
/// The conjugate transpose is lower triangular, so this kernel runs
/// forward substitution: blocks sweep top-down and each block's trailing
/// update feeds the rows below it. The diagonal block is materialized in
/// index-reversed form, which turns the inner solve back into upper
/// triangular back substitution.
pub fn safe_multishift_trsm_adjoint(
    u: TriangularRef<'_>,
    shifts: &[Complex64],
    mut b: MatMut<'_>,
    cfg: &SafeConfig,
    nb: usize,
) -> Result<ScaleVector> {
    validate_blocked(&u, None, shifts, &b, nb)?;
    check_columns_nonzero(&b)?;

    let m = u.order();
    let n = b.cols();
    let mut s = vec![1.0f64; n];
    if m == 0 || n == 0 {
        return Ok(ScaleVector(s));
    }

    let mut g: Vec<f64> = (0..n).map(|j| norm_inf_vec(b.rb().col(j))).collect();
    flops::add_other((m * n) as u64);

    let bs_max = nb.min(m);
    let mut base = DenseMatrix::zeros(bs_max, bs_max);
    let mut scratch = DenseMatrix::zeros(bs_max, bs_max);
    let mut block_norms = vec![0.0f64; bs_max];
    let mut seg = vec![Complex64::ZERO; bs_max];
    let mut rowmax = vec![0.0f64; bs_max];

    for (b0, b1) in blocks_top_down(m, nb) {
        let bs = b1 - b0;
        // base(i, jj) = conj(U(b1-1-jj, b1-1-i)) for i <= jj: the
        // index-reversed adjoint of the diagonal block, upper triangular
        for c in b0..b1 {
            let col = &u.mat.col(c)[b0..=c];
            let i_fixed = bs - 1 - (c - b0);
            for (r, z) in col.iter().enumerate() {
                base[(i_fixed, bs - 1 - r)] = z.conj();
            }
        }
        offdiag_norms_into(base.submatrix(0, bs, 0, bs), bs, &mut block_norms);

        // row norms of U(I1, I2): bound coefficients for the trailing update
        for r in rowmax.iter_mut().take(bs) {
            *r = 0.0;
        }
        for c in b1..m {
            let col = &u.mat.col(c)[b0..b1];
            for (k, z) in col.iter().enumerate() {
                let a = abs_c(*z);
                if a > rowmax[k] {
                    rowmax[k] = a;
                }
            }
        }
        let colsum: f64 = rowmax[..bs].iter().sum();
        flops::add_other(((m - b1) * bs) as u64);

        for (j, &shift) in shifts.iter().enumerate() {
            scratch.data_mut().copy_from_slice(base.data());
            let shift_conj = shift.conj();
            for d in 0..bs {
                let z = scratch[(d, d)];
                scratch[(d, d)] = z - shift_conj;
            }
            // reverse the right-hand-side segment, solve, reverse back
            let col_seg = &b.col_mut(j)[b0..b1];
            for (i, dst) in seg[..bs].iter_mut().enumerate() {
                *dst = col_seg[bs - 1 - i];
            }
            let diag = TriangularRef::upper(scratch.submatrix(0, bs, 0, bs));
            let t = safe_trsv_inner(diag, &mut seg[..bs], &block_norms[..bs], cfg);
            let col_seg = &mut b.col_mut(j)[b0..b1];
            for (i, src) in seg[..bs].iter().enumerate() {
                col_seg[bs - 1 - i] = *src;
            }
            if t < 1.0 {
                let col = b.col_mut(j);
                scale_slice(&mut col[..b0], t);
                scale_slice(&mut col[b1..], t);
                apply_scale(&mut s[j], t);
                g[j] *= t;
                flops::add_other(m as u64);
            }
        }

        for j in 0..n {
            let bseg_inf = norm_inf_vec(&b.col_mut(j)[b0..b1]);
            let mut g_new = g[j] + colsum * bseg_inf;
            for _ in 0..4 {
                if g_new < cfg.omega {
                    break;
                }
                let t = shrink_sum(g[j], colsum, bseg_inf, cfg.omega);
                scale_slice(b.col_mut(j), t);
                apply_scale(&mut s[j], t);
                g[j] *= t;
                g_new = g[j] + colsum * norm_inf_vec(&b.col_mut(j)[b0..b1]);
                flops::add_other(m as u64);
            }
            g[j] = g_new;
        }

        // trailing update: X(I2,:) -= (U(I1,I2))^H * X(I1,:)
        if b1 < m {
            let (top, bottom) = b.rb_mut().split_at_row(b1);
            let a_panel = u.mat.submatrix(b0, b1, b1, m);
            let solved = top.rb().submatrix(b0, b1, 0, n);
            gemm_conj_a_update(bottom, a_panel, solved, -Complex64::ONE, Complex64::ONE)?;
        }
    }
    Ok(ScaleVector(s))
}
