//! Blocked multi-shift triangular solves: the fast, unguarded path.
//!
//! All shifted systems `(U - lambda_j I) x_j = b_j` share the same
//! off-diagonal data, so blocked back substitution needs only a per-shift
//! tweak of the diagonal-block solve; the trailing update stays one
//! matrix-matrix product per block. The generalized variant solves
//! `(U - lambda_j V) x_j = b_j` with a second product for the `V` panel.

use num_complex::Complex64;

use crate::error::{contract, dim_mismatch, Result};
use crate::gemm::gemm_update;
use crate::matrix::{DenseMatrix, MatMut, MatRef, TriangularRef, Uplo};
use crate::triangular::{blocks_bottom_up, trsv_raw};

fn check_multishift(
    u: &TriangularRef<'_>,
    shifts: &[Complex64],
    b: &MatMut<'_>,
    nb: usize,
) -> Result<()> {
    if u.uplo != Uplo::Upper {
        return contract("multi-shift solve expects an upper triangular view");
    }
    if nb < 1 {
        return contract("block size must be at least 1");
    }
    if b.rows() != u.order() {
        return dim_mismatch(format!(
            "U is {0}x{0}, B is {1}x{2}",
            u.order(),
            b.rows(),
            b.cols()
        ));
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

/// Copies the diagonal block `U(b0..b1, b0..b1)` into `scratch`. Only the
/// upper triangle of the scratch is ever read downstream.
#[inline]
pub(crate) fn copy_block(u: MatRef<'_>, b0: usize, b1: usize, scratch: &mut DenseMatrix) {
    let bs = b1 - b0;
    for jj in 0..bs {
        let src = &u.col(b0 + jj)[b0..b1];
        scratch.col_mut(jj)[..bs].copy_from_slice(src);
    }
}

/// Copies the diagonal block and subtracts `shift` along its diagonal,
/// materializing `U(I1,I1) - shift * I` for the diagonal-block solve.
#[inline]
pub(crate) fn shifted_block(
    u: MatRef<'_>,
    b0: usize,
    b1: usize,
    shift: Complex64,
    scratch: &mut DenseMatrix,
) {
    copy_block(u, b0, b1, scratch);
    let bs = b1 - b0;
    for d in 0..bs {
        let v = scratch[(d, d)];
        scratch[(d, d)] = v - shift;
    }
}

/// Solves `(U - lambda_j I) x_j = b_j` for every column of `B`, in place.
///
/// The diagonal-block step materializes the shifted block into a scratch
/// buffer once per (block, shift) pair; a shift that coincides with a
/// diagonal entry produces infinities, exactly like [`crate::triangular::trsv_unblocked`].
/// Use [`crate::safe::safe_multishift_trsm`] when overflow is a concern.
pub fn multishift_trsm(
    u: TriangularRef<'_>,
    shifts: &[Complex64],
    mut b: MatMut<'_>,
    nb: usize,
) -> Result<()> {
    check_multishift(&u, shifts, &b, nb)?;
    let m = u.order();
    let n = b.cols();
    if m == 0 || n == 0 {
        return Ok(());
    }

    let mut scratch = DenseMatrix::zeros(nb.min(m), nb.min(m));
    for (b0, b1) in blocks_bottom_up(m, nb) {
        let bs = b1 - b0;
        for (j, &shift) in shifts.iter().enumerate() {
            shifted_block(u.mat, b0, b1, shift, &mut scratch);
            let diag = TriangularRef::upper(scratch.submatrix(0, bs, 0, bs));
            trsv_raw(diag, &mut b.col_mut(j)[b0..b1]);
        }
        if b0 > 0 {
            let (top, bottom) = b.rb_mut().split_at_row(b0);
            let panel = u.mat.submatrix(0, b0, b0, b1);
            let solved = bottom.rb().submatrix(0, bs, 0, n);
            gemm_update(top, panel, solved, -Complex64::ONE, Complex64::ONE)?;
        }
    }
    Ok(())
}

/// Solves `(U - lambda_j V) x_j = b_j` for every column of `B`, in place.
///
/// Per block, the shifted diagonal block `U' = U(I1,I1) - lambda_j V(I1,I1)`
/// is formed explicitly, the staged panel `C(:,j) = lambda_j * B(I1,j)` is
/// rebuilt, and the trailing update runs as two products:
/// `B(I0,:) -= U(I0,I1) * B(I1,:)` then `B(I0,:) += V(I0,I1) * C`.
pub fn generalized_multishift_trsm(
    u: TriangularRef<'_>,
    v: TriangularRef<'_>,
    shifts: &[Complex64],
    mut b: MatMut<'_>,
    nb: usize,
) -> Result<()> {
    check_multishift(&u, shifts, &b, nb)?;
    if v.uplo != Uplo::Upper {
        return contract("generalized multi-shift solve expects upper triangular V");
    }
    if v.order() != u.order() {
        return dim_mismatch(format!("U is {0}x{0}, V is {1}x{1}", u.order(), v.order()));
    }
    let m = u.order();
    let n = b.cols();
    if m == 0 || n == 0 {
        return Ok(());
    }

    let bs_max = nb.min(m);
    let mut scratch = DenseMatrix::zeros(bs_max, bs_max);
    let mut staged = DenseMatrix::zeros(bs_max, n);
    for (b0, b1) in blocks_bottom_up(m, nb) {
        let bs = b1 - b0;
        for (j, &shift) in shifts.iter().enumerate() {
            copy_block(u.mat, b0, b1, &mut scratch);
            for jj in 0..bs {
                let vcol = &v.mat.col(b0 + jj)[b0..=b0 + jj];
                let dst = &mut scratch.col_mut(jj)[..=jj];
                for (d, vv) in dst.iter_mut().zip(vcol) {
                    *d -= shift * *vv;
                }
            }
            let diag = TriangularRef::upper(scratch.submatrix(0, bs, 0, bs));
            trsv_raw(diag, &mut b.col_mut(j)[b0..b1]);
            for (dst, src) in staged.col_mut(j)[..bs].iter_mut().zip(&b.col_mut(j)[b0..b1]) {
                *dst = shift * *src;
            }
        }
        if b0 > 0 {
            let (mut top, bottom) = b.rb_mut().split_at_row(b0);
            let u_panel = u.mat.submatrix(0, b0, b0, b1);
            let solved = bottom.rb().submatrix(0, bs, 0, n);
            gemm_update(top.rb_mut(), u_panel, solved, -Complex64::ONE, Complex64::ONE)?;
            let v_panel = v.mat.submatrix(0, b0, b0, b1);
            let staged_view = staged.submatrix(0, bs, 0, n);
            gemm_update(top, v_panel, staged_view, Complex64::ONE, Complex64::ONE)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangular::{trsm_blocked, trsv_unblocked};
    use crate::util::abs_c;
    use num_complex::Complex64 as C;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn upper_rand(m: usize, seed: u64) -> DenseMatrix {
        let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15) | 1;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / ((1u64 << 53) as f64)
        };
        DenseMatrix::from_fn(m, m, |i, j| {
            if i < j {
                c(next() - 0.5, next() - 0.5)
            } else if i == j {
                c(1.0 + next(), 0.0)
            } else {
                C::ZERO
            }
        })
    }

    #[test]
    fn zero_shifts_reduce_to_trsm() {
        let m = 23;
        let n = 9;
        let u = upper_rand(m, 3);
        let b0 = DenseMatrix::from_fn(m, n, |i, j| c(i as f64 - 2.0, j as f64));
        let mut plain = b0.clone();
        trsm_blocked(TriangularRef::upper(u.as_ref()), plain.as_mut(), 8).unwrap();
        let mut shifted = b0.clone();
        multishift_trsm(TriangularRef::upper(u.as_ref()), &vec![C::ZERO; n], shifted.as_mut(), 8)
            .unwrap();
        assert_eq!(plain, shifted);
    }

    #[test]
    fn hand_example_single_shift() {
        // U=[[2,1],[0,4]], lambda=1, b=[1,3] -> x=[0,1]
        let u = DenseMatrix::from_rows(&[vec![c(2., 0.), c(1., 0.)], vec![c(0., 0.), c(4., 0.)]]);
        let mut b = DenseMatrix::from_rows(&[vec![c(1., 0.)], vec![c(3., 0.)]]);
        multishift_trsm(TriangularRef::upper(u.as_ref()), &[c(1., 0.)], b.as_mut(), 64).unwrap();
        assert!(abs_c(b[(0, 0)]) < 1e-15);
        assert!(abs_c(b[(1, 0)] - C::ONE) < 1e-15);
    }

    #[test]
    fn scaled_identity_system() {
        // U=I3, lambda=[-1,-1], B = 2*ones -> X = ones (system is 2I)
        let u = DenseMatrix::identity(3);
        let mut b = DenseMatrix::from_fn(3, 2, |_, _| c(2., 0.));
        multishift_trsm(
            TriangularRef::upper(u.as_ref()),
            &[c(-1., 0.), c(-1., 0.)],
            b.as_mut(),
            2,
        )
        .unwrap();
        for j in 0..2 {
            for i in 0..3 {
                assert!(abs_c(b[(i, j)] - C::ONE) < 1e-15);
            }
        }
    }

    #[test]
    fn agrees_with_explicitly_shifted_trsv() {
        let m = 37;
        let n = 11;
        let u = upper_rand(m, 17);
        let shifts: Vec<C> = (0..n).map(|j| c(0.1 * j as f64 - 0.4, 0.05 * j as f64)).collect();
        let b0 = DenseMatrix::from_fn(m, n, |i, j| c((i * j + 1) as f64 / 7.0, i as f64 / 5.0));

        let mut blocked = b0.clone();
        multishift_trsm(TriangularRef::upper(u.as_ref()), &shifts, blocked.as_mut(), 8).unwrap();

        for (j, &shift) in shifts.iter().enumerate() {
            let mut us = u.clone();
            for d in 0..m {
                us[(d, d)] -= shift;
            }
            let mut col = b0.col(j).to_vec();
            trsv_unblocked(TriangularRef::upper(us.as_ref()), &mut col).unwrap();
            let xnorm = col.iter().map(|z| abs_c(*z)).fold(0.0, f64::max);
            for i in 0..m {
                assert!(abs_c(blocked[(i, j)] - col[i]) <= 1e-12 * xnorm.max(1.0));
            }
        }
    }

    #[test]
    fn shift_permutation_equivariance() {
        let m = 19;
        let n = 6;
        let u = upper_rand(m, 23);
        let shifts: Vec<C> = (0..n).map(|j| c(0.2 * j as f64, -0.1 * j as f64)).collect();
        let b0 = DenseMatrix::from_fn(m, n, |i, j| c(i as f64 + j as f64, 1.0));

        let mut base = b0.clone();
        multishift_trsm(TriangularRef::upper(u.as_ref()), &shifts, base.as_mut(), 4).unwrap();

        let perm: Vec<usize> = (0..n).map(|j| (j + 3) % n).collect();
        let shifts_p: Vec<C> = perm.iter().map(|&p| shifts[p]).collect();
        let mut permuted = DenseMatrix::from_fn(m, n, |i, j| b0[(i, perm[j])]);
        multishift_trsm(TriangularRef::upper(u.as_ref()), &shifts_p, permuted.as_mut(), 4).unwrap();

        for j in 0..n {
            for i in 0..m {
                assert_eq!(permuted[(i, j)], base[(i, perm[j])]);
            }
        }
    }

    #[test]
    fn generalized_identity_v_matches_standard() {
        let m = 21;
        let n = 7;
        let u = upper_rand(m, 31);
        let v = DenseMatrix::identity(m);
        let shifts: Vec<C> = (0..n).map(|j| c(0.3 - 0.05 * j as f64, 0.02 * j as f64)).collect();
        let b0 = DenseMatrix::from_fn(m, n, |i, j| c(1.0 + i as f64, j as f64 / 3.0));

        let mut standard = b0.clone();
        multishift_trsm(TriangularRef::upper(u.as_ref()), &shifts, standard.as_mut(), 5).unwrap();
        let mut general = b0.clone();
        generalized_multishift_trsm(
            TriangularRef::upper(u.as_ref()),
            TriangularRef::upper(v.as_ref()),
            &shifts,
            general.as_mut(),
            5,
        )
        .unwrap();

        let mut xnorm = 0.0f64;
        for j in 0..n {
            for i in 0..m {
                xnorm = xnorm.max(abs_c(standard[(i, j)]));
            }
        }
        for j in 0..n {
            for i in 0..m {
                let err = abs_c(general[(i, j)] - standard[(i, j)]);
                assert!(err <= 10.0 * f64::EPSILON * xnorm, "({i},{j}): {err}");
            }
        }
    }

    #[test]
    fn generalized_scalar_case() {
        // U=[[2]], V=[[1]], lambda=1, b=[1] -> (2-1)x=1 -> x=1
        let u = DenseMatrix::from_rows(&[vec![c(2., 0.)]]);
        let v = DenseMatrix::from_rows(&[vec![c(1., 0.)]]);
        let mut b = DenseMatrix::from_rows(&[vec![c(1., 0.)]]);
        generalized_multishift_trsm(
            TriangularRef::upper(u.as_ref()),
            TriangularRef::upper(v.as_ref()),
            &[c(1., 0.)],
            b.as_mut(),
            4,
        )
        .unwrap();
        assert!(abs_c(b[(0, 0)] - C::ONE) < 1e-15);
    }

    #[test]
    fn generalized_hand_example() {
        // U=[[2,1],[0,3]], V=[[1,1],[0,1]], lambda=1, b=[1,2] -> x=[1,1]
        let u = DenseMatrix::from_rows(&[vec![c(2., 0.), c(1., 0.)], vec![c(0., 0.), c(3., 0.)]]);
        let v = DenseMatrix::from_rows(&[vec![c(1., 0.), c(1., 0.)], vec![c(0., 0.), c(1., 0.)]]);
        let mut b = DenseMatrix::from_rows(&[vec![c(1., 0.)], vec![c(2., 0.)]]);
        generalized_multishift_trsm(
            TriangularRef::upper(u.as_ref()),
            TriangularRef::upper(v.as_ref()),
            &[c(1., 0.)],
            b.as_mut(),
            1,
        )
        .unwrap();
        assert!(abs_c(b[(0, 0)] - C::ONE) < 1e-14);
        assert!(abs_c(b[(1, 0)] - C::ONE) < 1e-14);
    }

    #[test]
    fn generalized_residual_on_random_pencil() {
        let m = 29;
        let n = 8;
        let u = upper_rand(m, 41);
        let mut v = upper_rand(m, 43);
        // keep the pencil well conditioned: shrink V's off-diagonal part
        for j in 0..m {
            for i in 0..j {
                let z = v[(i, j)];
                v[(i, j)] = 0.1 * z;
            }
        }
        let shifts: Vec<C> = (0..n).map(|j| c(-0.3 + 0.07 * j as f64, 0.03 * j as f64)).collect();
        let b0 = DenseMatrix::from_fn(m, n, |i, j| c((i + 2 * j) as f64 / 9.0, 0.4));
        let mut x = b0.clone();
        generalized_multishift_trsm(
            TriangularRef::upper(u.as_ref()),
            TriangularRef::upper(v.as_ref()),
            &shifts,
            x.as_mut(),
            6,
        )
        .unwrap();

        for (j, &shift) in shifts.iter().enumerate() {
            let mut rnorm = 0.0f64;
            let mut xnorm = 0.0f64;
            for i in 0..m {
                let mut acc = C::ZERO;
                for l in i..m {
                    acc += (u[(i, l)] - shift * v[(i, l)]) * x[(l, j)];
                }
                rnorm = rnorm.max(abs_c(acc - b0[(i, j)]));
                xnorm = xnorm.max(abs_c(x[(i, j)]));
            }
            let unorm = TriangularRef::upper(u.as_ref()).norm_inf()
                + abs_c(shift) * TriangularRef::upper(v.as_ref()).norm_inf();
            assert!(rnorm <= 100.0 * f64::EPSILON * m as f64 * unorm * xnorm.max(1.0));
        }
    }

    #[test]
    fn empty_inputs_return_ok() {
        let u = DenseMatrix::zeros(0, 0);
        let mut b = DenseMatrix::zeros(0, 0);
        multishift_trsm(TriangularRef::upper(u.as_ref()), &[], b.as_mut(), 4).unwrap();
        let u = DenseMatrix::identity(3);
        let mut b = DenseMatrix::zeros(3, 0);
        multishift_trsm(TriangularRef::upper(u.as_ref()), &[], b.as_mut(), 4).unwrap();
    }
}
