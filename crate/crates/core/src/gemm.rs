//! Cache-blocked complex matrix-matrix multiply.
//!
//! `C := alpha * op(A) * B + beta * C` with `op` either identity or
//! conjugate transpose. Panels of `A` and `B` are packed into planar
//! real/imaginary buffers and fed to an 8x8 register-tiled microkernel
//! built on fused multiply-adds.
//!
//! Every output element is accumulated in a fixed order that depends only
//! on the operand shapes, so per-column results are bitwise independent of
//! how callers partition the right-hand-side columns.

use num_complex::Complex64;

use crate::error::{dim_mismatch, Result};
use crate::flops;
use crate::matrix::{MatMut, MatRef};

const MR: usize = 8;
const NR: usize = 8;
const KC: usize = 192;
const MC: usize = 320;
const NC: usize = 4096;

#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum OpA {
    None,
    ConjTrans,
}

/// `C := alpha * A * B + beta * C`.
///
/// `A` is `m x k`, `B` is `k x n`, `C` is `m x n`; `C` must not alias `A`
/// or `B` (the borrow rules of [`MatMut`]/[`MatRef`] enforce this for views
/// created through the safe API). Every entry of `C` is updated exactly
/// once; `beta == 0` overwrites without reading `C`.
pub fn gemm_update(
    c: MatMut<'_>,
    a: MatRef<'_>,
    b: MatRef<'_>,
    alpha: Complex64,
    beta: Complex64,
) -> Result<()> {
    if a.rows() != c.rows() || a.cols() != b.rows() || b.cols() != c.cols() {
        return dim_mismatch(format!(
            "gemm: C is {}x{}, A is {}x{}, B is {}x{}",
            c.rows(),
            c.cols(),
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        ));
    }
    gemm_impl(c, OpA::None, a, b, alpha, beta);
    Ok(())
}

/// `C := alpha * A^H * B + beta * C` where `A` is stored `k x m`.
pub(crate) fn gemm_conj_a_update(
    c: MatMut<'_>,
    a: MatRef<'_>,
    b: MatRef<'_>,
    alpha: Complex64,
    beta: Complex64,
) -> Result<()> {
    if a.cols() != c.rows() || a.rows() != b.rows() || b.cols() != c.cols() {
        return dim_mismatch(format!(
            "gemm (conj-A): C is {}x{}, A^H is {}x{}, B is {}x{}",
            c.rows(),
            c.cols(),
            a.cols(),
            a.rows(),
            b.rows(),
            b.cols()
        ));
    }
    gemm_impl(c, OpA::ConjTrans, a, b, alpha, beta);
    Ok(())
}

fn gemm_impl(
    mut c: MatMut<'_>,
    op: OpA,
    a: MatRef<'_>,
    b: MatRef<'_>,
    alpha: Complex64,
    beta: Complex64,
) {
    let m = c.rows();
    let n = c.cols();
    let k = b.rows();
    flops::add_gemm((m * k) as u64 * n as u64);

    if beta == Complex64::ZERO {
        c.fill(Complex64::ZERO);
    } else if beta != Complex64::ONE {
        for j in 0..n {
            for z in c.col_mut(j) {
                *z *= beta;
            }
        }
    }
    if alpha == Complex64::ZERO || m == 0 || n == 0 || k == 0 {
        return;
    }

    let mut packs = PackBuffers::new(m.min(MC), k.min(KC), n.min(NC));
    let mut jc = 0;
    while jc < n {
        let nc_eff = NC.min(n - jc);
        let mut pc = 0;
        while pc < k {
            let kc_eff = KC.min(k - pc);
            packs.pack_b(b, pc, kc_eff, jc, nc_eff);
            let mut ic = 0;
            while ic < m {
                let mc_eff = MC.min(m - ic);
                packs.pack_a(op, a, ic, mc_eff, pc, kc_eff);
                macro_kernel(&mut c, &packs, ic, mc_eff, jc, nc_eff, kc_eff, alpha);
                ic += MC;
            }
            pc += KC;
        }
        jc += NC;
    }
}

struct PackBuffers {
    a_re: Vec<f64>,
    a_im: Vec<f64>,
    b_re: Vec<f64>,
    b_im: Vec<f64>,
}

impl PackBuffers {
    fn new(mc: usize, kc: usize, nc: usize) -> Self {
        let a_len = mc.div_ceil(MR) * MR * kc;
        let b_len = nc.div_ceil(NR) * NR * kc;
        PackBuffers {
            a_re: vec![0.0; a_len],
            a_im: vec![0.0; a_len],
            b_re: vec![0.0; b_len],
            b_im: vec![0.0; b_len],
        }
    }

    /// Tile `t` of packed A occupies `[t*MR*kc ..)`, laid out `[p*MR + r]`
    /// planar, rows past the matrix edge zero-filled.
    fn pack_a(&mut self, op: OpA, a: MatRef<'_>, ic: usize, mc: usize, pc: usize, kc: usize) {
        let tiles = mc.div_ceil(MR);
        for t in 0..tiles {
            let base = t * MR * kc;
            let r0 = ic + t * MR;
            let rows_eff = MR.min(mc - t * MR);
            match op {
                OpA::None => {
                    for p in 0..kc {
                        let col = &a.col(pc + p)[r0..r0 + rows_eff];
                        let off = base + p * MR;
                        for r in 0..rows_eff {
                            self.a_re[off + r] = col[r].re;
                            self.a_im[off + r] = col[r].im;
                        }
                        for r in rows_eff..MR {
                            self.a_re[off + r] = 0.0;
                            self.a_im[off + r] = 0.0;
                        }
                    }
                }
                OpA::ConjTrans => {
                    // op(A)(i, p) = conj(A(pc + p, i)); read A's column i.
                    for r in 0..MR {
                        if r < rows_eff {
                            let col = &a.col(r0 + r)[pc..pc + kc];
                            for p in 0..kc {
                                self.a_re[base + p * MR + r] = col[p].re;
                                self.a_im[base + p * MR + r] = -col[p].im;
                            }
                        } else {
                            for p in 0..kc {
                                self.a_re[base + p * MR + r] = 0.0;
                                self.a_im[base + p * MR + r] = 0.0;
                            }
                        }
                    }
                }
            }
        }
    }

    /// Tile `t` of packed B occupies `[t*NR*kc ..)`, laid out `[p*NR + c]`
    /// planar, columns past the matrix edge zero-filled.
    fn pack_b(&mut self, b: MatRef<'_>, pc: usize, kc: usize, jc: usize, nc: usize) {
        let tiles = nc.div_ceil(NR);
        for t in 0..tiles {
            let base = t * NR * kc;
            let c0 = jc + t * NR;
            let cols_eff = NR.min(nc - t * NR);
            for cc in 0..NR {
                if cc < cols_eff {
                    let col = &b.col(c0 + cc)[pc..pc + kc];
                    for p in 0..kc {
                        self.b_re[base + p * NR + cc] = col[p].re;
                        self.b_im[base + p * NR + cc] = col[p].im;
                    }
                } else {
                    for p in 0..kc {
                        self.b_re[base + p * NR + cc] = 0.0;
                        self.b_im[base + p * NR + cc] = 0.0;
                    }
                }
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn macro_kernel(
    c: &mut MatMut<'_>,
    packs: &PackBuffers,
    ic: usize,
    mc: usize,
    jc: usize,
    nc: usize,
    kc: usize,
    alpha: Complex64,
) {
    let row_tiles = mc.div_ceil(MR);
    let col_tiles = nc.div_ceil(NR);
    for jt in 0..col_tiles {
        let b_off = jt * NR * kc;
        let b_re = &packs.b_re[b_off..b_off + NR * kc];
        let b_im = &packs.b_im[b_off..b_off + NR * kc];
        let nr_eff = NR.min(nc - jt * NR);
        for it in 0..row_tiles {
            let a_off = it * MR * kc;
            let a_re = &packs.a_re[a_off..a_off + MR * kc];
            let a_im = &packs.a_im[a_off..a_off + MR * kc];
            let mr_eff = MR.min(mc - it * MR);

            let (acc_re, acc_im) = micro_kernel(a_re, a_im, b_re, b_im);

            let c0 = jc + jt * NR;
            let r0 = ic + it * MR;
            for cc in 0..nr_eff {
                let col = &mut c.col_mut(c0 + cc)[r0..r0 + mr_eff];
                for (r, dst) in col.iter_mut().enumerate() {
                    *dst += alpha * Complex64::new(acc_re[r][cc], acc_im[r][cc]);
                }
            }
        }
    }
}

/// 8x8 complex register tile over one packed k-panel. The row updates are
/// written out so the 16 accumulator vectors stay in registers; each row
/// keeps a fixed per-element evaluation order:
/// `re += ar*br; re -= ai*bi; im += ar*bi; im += ai*br`.
#[inline(never)]
fn micro_kernel(
    a_re: &[f64],
    a_im: &[f64],
    b_re: &[f64],
    b_im: &[f64],
) -> ([[f64; NR]; MR], [[f64; NR]; MR]) {
    let mut c0 = ([0.0f64; NR], [0.0f64; NR]);
    let mut c1 = ([0.0f64; NR], [0.0f64; NR]);
    let mut c2 = ([0.0f64; NR], [0.0f64; NR]);
    let mut c3 = ([0.0f64; NR], [0.0f64; NR]);
    let mut c4 = ([0.0f64; NR], [0.0f64; NR]);
    let mut c5 = ([0.0f64; NR], [0.0f64; NR]);
    let mut c6 = ([0.0f64; NR], [0.0f64; NR]);
    let mut c7 = ([0.0f64; NR], [0.0f64; NR]);

    let iter = a_re
        .chunks_exact(MR)
        .zip(a_im.chunks_exact(MR))
        .zip(b_re.chunks_exact(NR).zip(b_im.chunks_exact(NR)));
    for ((ar, ai), (br, bi)) in iter {
        let br: &[f64; NR] = br.try_into().unwrap();
        let bi: &[f64; NR] = bi.try_into().unwrap();
        fma_row(&mut c0, ar[0], ai[0], br, bi);
        fma_row(&mut c1, ar[1], ai[1], br, bi);
        fma_row(&mut c2, ar[2], ai[2], br, bi);
        fma_row(&mut c3, ar[3], ai[3], br, bi);
        fma_row(&mut c4, ar[4], ai[4], br, bi);
        fma_row(&mut c5, ar[5], ai[5], br, bi);
        fma_row(&mut c6, ar[6], ai[6], br, bi);
        fma_row(&mut c7, ar[7], ai[7], br, bi);
    }

    (
        [c0.0, c1.0, c2.0, c3.0, c4.0, c5.0, c6.0, c7.0],
        [c0.1, c1.1, c2.1, c3.1, c4.1, c5.1, c6.1, c7.1],
    )
}

#[inline(always)]
fn fma_row(acc: &mut ([f64; NR], [f64; NR]), xre: f64, xim: f64, br: &[f64; NR], bi: &[f64; NR]) {
    let (cre, cim) = acc;
    for cc in 0..NR {
        cre[cc] = xre.mul_add(br[cc], cre[cc]);
    }
    for cc in 0..NR {
        cre[cc] = (-xim).mul_add(bi[cc], cre[cc]);
    }
    for cc in 0..NR {
        cim[cc] = xre.mul_add(bi[cc], cim[cc]);
    }
    for cc in 0..NR {
        cim[cc] = xim.mul_add(br[cc], cim[cc]);
    }
}
