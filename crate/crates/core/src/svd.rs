//! One-sided Jacobi singular values for small dense matrices.
//!
//! Orthogonalizes column pairs with two-sided-phase rotations until every
//! pair is numerically orthogonal; the singular values are then the column
//! norms. Jacobi delivers high relative accuracy for the smallest singular
//! value, which is what the pseudospectra oracle needs.

use num_complex::Complex64;

use crate::flops;
use crate::matrix::MatRef;
use crate::util::{abs_c, cdot, norm2};

const MAX_SWEEPS: usize = 60;

/// Singular values of `a` in descending order.
pub fn singular_values(a: MatRef<'_>) -> Vec<f64> {
    let mut w = a.to_owned();
    let m = w.rows();
    let n = w.cols();
    if m == 0 || n == 0 {
        return vec![];
    }
    let tol = 2.0 * f64::EPSILON;

    let mut sq: Vec<f64> = (0..n).map(|j| norm2(w.col(j)).powi(2)).collect();
    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let alpha = sq[p];
                let beta = sq[q];
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma = cdot(w.col(p), w.col(q));
                let ga = abs_c(gamma);
                if ga <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // absorb the phase of gamma, then a classical real rotation
                let zeta = (beta - alpha) / (2.0 * ga);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let ph = gamma.conj() / ga;

                let (wp, wq) = split_cols(&mut w, p, q);
                for (u, v) in wp.iter_mut().zip(wq.iter_mut()) {
                    let vp = ph * *v;
                    let new_u = c * *u - s * vp;
                    let new_v = s * *u + c * vp;
                    *u = new_u;
                    *v = new_v;
                }
                sq[p] = norm2(w.col(p)).powi(2);
                sq[q] = norm2(w.col(q)).powi(2);
                flops::add_other(6 * m as u64);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<f64> = sq.into_iter().map(f64::sqrt).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

fn split_cols<'a>(
    w: &'a mut crate::matrix::DenseMatrix,
    p: usize,
    q: usize,
) -> (&'a mut [Complex64], &'a mut [Complex64]) {
    debug_assert!(p < q);
    let rows = w.rows();
    let (head, tail) = w.data_mut().split_at_mut(q * rows);
    (&mut head[p * rows..p * rows + rows], &mut tail[..rows])
}
