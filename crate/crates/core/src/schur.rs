//! Schur factorization plumbing: unblocked Householder reduction to upper
//! Hessenberg form followed by a single-shift QR iteration with deflation.
//! Correctness-oriented; the solvers built on top never time it against
//! anything.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::flops;
use crate::matrix::{DenseMatrix, MatRef};
use crate::util::{abs_c, cdiv, cdot, norm2, phase};

/// Unitary `Q` and upper triangular `T` with `A = Q T Q^H`.
#[derive(Clone, Debug)]
pub struct SchurPair {
    pub q: DenseMatrix,
    pub t: DenseMatrix,
}

impl SchurPair {
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.t.diag()
    }
}

/// Reduces `A` to upper Hessenberg form by Householder similarity:
/// `A = Q H Q^H` with `Q` unitary. Unblocked.
pub fn hessenberg_reduce(a: MatRef<'_>) -> (DenseMatrix, DenseMatrix) {
    assert_eq!(a.rows(), a.cols(), "hessenberg_reduce requires a square matrix");
    let m = a.rows();
    let mut h = a.to_owned();
    let mut q = DenseMatrix::identity(m);
    if m < 3 {
        return (h, q);
    }
    flops::add_other(10 * (m as u64).pow(3) / 3);

    let mut v = vec![Complex64::ZERO; m];
    let mut w = vec![Complex64::ZERO; m];
    for k in 0..m - 2 {
        // reflector zeroing H(k+2.., k), built from x = H(k+1.., k)
        let xlen = m - k - 1;
        let x = &h.col(k)[k + 1..];
        let below = norm2(&x[1..]);
        if below == 0.0 {
            continue; // already in Hessenberg shape here
        }
        let alpha = x[0];
        let xnorm = norm2(x);
        let beta = -phase(alpha) * xnorm;
        v[..xlen].copy_from_slice(x);
        v[0] = alpha - beta;
        let vnorm2 = {
            let nv = norm2(&v[..xlen]);
            nv * nv
        };
        if vnorm2 == 0.0 {
            continue;
        }
        let tau = 2.0 / vnorm2; // P = I - tau v v^H, Hermitian unitary

        // left: H(k+1.., k+1..) = P * H(k+1.., k+1..)
        for j in k + 1..m {
            let col = &mut h.col_mut(j)[k + 1..];
            let d = cdot(&v[..xlen], col) * tau;
            for (cv, vv) in col.iter_mut().zip(&v[..xlen]) {
                *cv -= d * *vv;
            }
        }
        h.col_mut(k)[k + 1] = beta;
        for z in &mut h.col_mut(k)[k + 2..] {
            *z = Complex64::ZERO;
        }

        // right: H(.., k+1..) = H(.., k+1..) * P, via w = H v
        w[..m].fill(Complex64::ZERO);
        for (jj, vv) in v[..xlen].iter().enumerate() {
            let col = h.col(k + 1 + jj);
            for (wi, ci) in w.iter_mut().zip(col) {
                *wi += *vv * *ci;
            }
        }
        for (jj, vv) in v[..xlen].iter().enumerate() {
            let scale = tau * vv.conj();
            let col = &mut h.col_mut(k + 1 + jj)[..];
            for (ci, wi) in col.iter_mut().zip(&w[..m]) {
                *ci -= scale * *wi;
            }
        }

        // accumulate Q = Q * P
        w[..m].fill(Complex64::ZERO);
        for (jj, vv) in v[..xlen].iter().enumerate() {
            let col = q.col(k + 1 + jj);
            for (wi, ci) in w.iter_mut().zip(col) {
                *wi += *vv * *ci;
            }
        }
        for (jj, vv) in v[..xlen].iter().enumerate() {
            let scale = tau * vv.conj();
            let col = &mut q.col_mut(k + 1 + jj)[..];
            for (ci, wi) in col.iter_mut().zip(&w[..m]) {
                *ci -= scale * *wi;
            }
        }
    }
    (h, q)
}

/// A complex Givens rotation `G = [[c, s], [-conj(s), c]]` with real `c`,
/// chosen so that `G * (f, g)^T = (r, 0)^T`.
#[inline]
fn rotg(f: Complex64, g: Complex64) -> (f64, Complex64, Complex64) {
    let fa = abs_c(f);
    let ga = abs_c(g);
    if ga == 0.0 {
        return (1.0, Complex64::ZERO, f);
    }
    if fa == 0.0 {
        return (0.0, phase(g).conj(), Complex64::new(ga, 0.0));
    }
    let d = fa.hypot(ga);
    let c = fa / d;
    let fs = phase(f);
    let s = fs * g.conj() / d;
    let r = fs * d;
    (c, s, r)
}

/// Single-shift QR iteration with deflation on an upper Hessenberg matrix,
/// accumulating the given unitary `q` so that `A = Q T Q^H` holds for the
/// original `A = q H q^H`. Fails after `30 * m` sweeps without full
/// deflation. On success the strict lower triangle of `T` is exactly zero.
pub fn schur_qr(h: DenseMatrix, q: DenseMatrix) -> Result<SchurPair> {
    let m = h.rows();
    assert_eq!(h.cols(), m);
    assert_eq!(q.rows(), m);
    assert_eq!(q.cols(), m);
    let mut h = h;
    let mut q = q;
    if m > 1 {
        let budget = 30 * m;
        let mut used = 0usize;
        let hnorm = h.norm_inf().max(f64::MIN_POSITIVE);
        let mut hi = m - 1; // active window is rows 0..=hi
        let mut stagnant = 0usize;
        while hi > 0 {
            // deflate any negligible subdiagonal at the bottom of the window
            let sub = abs_c(h[(hi, hi - 1)]);
            let tol = {
                let d = abs_c(h[(hi - 1, hi - 1)]) + abs_c(h[(hi, hi)]);
                if d > 0.0 {
                    f64::EPSILON * d
                } else {
                    f64::EPSILON * hnorm
                }
            };
            if sub <= tol {
                h[(hi, hi - 1)] = Complex64::ZERO;
                hi -= 1;
                stagnant = 0;
                continue;
            }

            // find the top of the unreduced window
            let mut lo = hi;
            while lo > 0 {
                let s = abs_c(h[(lo, lo - 1)]);
                let d = abs_c(h[(lo - 1, lo - 1)]) + abs_c(h[(lo, lo)]);
                let tol = if d > 0.0 { f64::EPSILON * d } else { f64::EPSILON * hnorm };
                if s <= tol {
                    h[(lo, lo - 1)] = Complex64::ZERO;
                    break;
                }
                lo -= 1;
            }

            used += 1;
            if used > budget {
                return Err(Error::NonConvergence { iterations: budget });
            }
            stagnant += 1;

            let shift = if stagnant % 12 == 0 {
                // exceptional shift to break symmetry-induced stalls
                h[(hi, hi)] + Complex64::new(0.75 * abs_c(h[(hi, hi - 1)]), 0.0)
            } else {
                wilkinson_shift(
                    h[(hi - 1, hi - 1)],
                    h[(hi - 1, hi)],
                    h[(hi, hi - 1)],
                    h[(hi, hi)],
                )
            };
            qr_sweep(&mut h, &mut q, lo, hi, shift);
            flops::add_other(6 * (hi - lo + 1) as u64 * m as u64);
        }
    }

    // the iteration leaves tiny converged subdiagonals; zero them exactly
    for j in 0..m {
        for z in &mut h.col_mut(j)[j + 1..] {
            *z = Complex64::ZERO;
        }
    }
    Ok(SchurPair { q, t: h })
}

/// Eigenvalue of the trailing 2x2 closest to its bottom-right entry.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - 4.0 * det).sqrt();
    let r1 = 0.5 * (tr + disc);
    let r2 = 0.5 * (tr - disc);
    // evaluate the larger root first, recover the other from the product
    let (big, small) = if abs_c(r1) >= abs_c(r2) { (r1, r2) } else { (r2, r1) };
    let small = if big == Complex64::ZERO { small } else { cdiv(det, big) };
    if abs_c(big - d) < abs_c(small - d) {
        big
    } else {
        small
    }
}

/// One implicit single-shift sweep on rows/columns `lo..=hi`, applied to
/// the full matrix (columns right of the window included) and accumulated
/// into `q`.
fn qr_sweep(h: &mut DenseMatrix, q: &mut DenseMatrix, lo: usize, hi: usize, shift: Complex64) {
    let m = h.rows();
    for k in lo..hi {
        let (f, g) = if k == lo {
            (h[(lo, lo)] - shift, h[(lo + 1, lo)])
        } else {
            (h[(k, k - 1)], h[(k + 1, k - 1)])
        };
        let (c, s, r) = rotg(f, g);
        if k > lo {
            h[(k, k - 1)] = r;
            h[(k + 1, k - 1)] = Complex64::ZERO;
        }
        // left rotation on rows k, k+1 for columns k..m
        for j in k..m {
            let a = h[(k, j)];
            let b = h[(k + 1, j)];
            h[(k, j)] = c * a + s * b;
            h[(k + 1, j)] = -s.conj() * a + c * b;
        }
        // right rotation on columns k, k+1 for rows 0..=min(k+2, hi)
        let top = (k + 2).min(hi);
        for i in 0..=top {
            let a = h[(i, k)];
            let b = h[(i, k + 1)];
            h[(i, k)] = c * a + s.conj() * b;
            h[(i, k + 1)] = -s * a + c * b;
        }
        // accumulate Q on columns k, k+1
        for i in 0..m {
            let a = q[(i, k)];
            let b = q[(i, k + 1)];
            q[(i, k)] = c * a + s.conj() * b;
            q[(i, k + 1)] = -s * a + c * b;
        }
    }
}

/// Convenience composition: Hessenberg reduction followed by QR iteration.
pub fn schur(a: MatRef<'_>) -> Result<SchurPair> {
    let (h, q) = hessenberg_reduce(a);
    schur_qr(h, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn rand_mat(m: usize, seed: u64) -> DenseMatrix {
        let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15) | 1;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        DenseMatrix::from_fn(m, m, |_, _| c(next(), next()))
    }

    fn reconstruction_error(a: &DenseMatrix, q: &DenseMatrix, t: &DenseMatrix) -> f64 {
        let m = a.rows();
        // A - Q T Q^H
        let mut qt = DenseMatrix::zeros(m, m);
        crate::gemm::gemm_update(qt.as_mut(), q.as_ref(), t.as_ref(), C::ONE, C::ZERO).unwrap();
        let qh = q.adjoint();
        let mut rec = a.clone();
        crate::gemm::gemm_update(rec.as_mut(), qt.as_ref(), qh.as_ref(), -C::ONE, C::ONE).unwrap();
        rec.norm_frobenius() / a.norm_frobenius().max(f64::MIN_POSITIVE)
    }

    fn unitarity_error(q: &DenseMatrix) -> f64 {
        let m = q.rows();
        let qh = q.adjoint();
        let mut g = DenseMatrix::identity(m);
        crate::gemm::gemm_update(g.as_mut(), qh.as_ref(), q.as_ref(), C::ONE, -C::ONE).unwrap();
        g.norm_frobenius()
    }

    #[test]
    fn hessenberg_of_hessenberg_is_identity_transform() {
        let m = 6;
        let a = DenseMatrix::from_fn(m, m, |i, j| {
            if i <= j + 1 {
                c((i + 2 * j) as f64 / 5.0, 0.3)
            } else {
                C::ZERO
            }
        });
        let (h, q) = hessenberg_reduce(a.as_ref());
        assert_eq!(h, a);
        assert_eq!(q, DenseMatrix::identity(m));
    }

    #[test]
    fn hessenberg_hermitian_gives_tridiagonal() {
        let m = 12;
        let base = rand_mat(m, 5);
        let a = DenseMatrix::from_fn(m, m, |i, j| {
            if i == j {
                C::new(base[(i, j)].re, 0.0)
            } else {
                0.5 * (base[(i, j)] + base[(j, i)].conj())
            }
        });
        let (h, _q) = hessenberg_reduce(a.as_ref());
        for j in 0..m {
            for i in 0..m {
                if i + 1 < j {
                    assert!(abs_c(h[(i, j)]) < 1e-12, "H({i},{j}) = {:?}", h[(i, j)]);
                }
            }
        }
    }

    #[test]
    fn hessenberg_reconstruction() {
        let m = 50;
        let a = rand_mat(m, 9);
        let (h, q) = hessenberg_reduce(a.as_ref());
        for j in 0..m {
            for i in j + 2..m {
                assert_eq!(h[(i, j)], C::ZERO);
            }
        }
        assert!(reconstruction_error(&a, &q, &h) < 1e-13);
        assert!(unitarity_error(&q) < 1e-13 * m as f64);
    }

    #[test]
    fn schur_of_triangular_deflates_immediately() {
        let m = 8;
        let a = DenseMatrix::from_fn(m, m, |i, j| {
            if i <= j {
                c(1.0 + (i + j) as f64 / 3.0, 0.2)
            } else {
                C::ZERO
            }
        });
        let pair = schur(a.as_ref()).unwrap();
        assert!(reconstruction_error(&a, &pair.q, &pair.t) < 1e-13);
        for (dt, da) in pair.t.diag().iter().zip(a.diag()) {
            assert!(abs_c(*dt - da) < 1e-12);
        }
    }

    #[test]
    fn schur_exchange_matrix_eigenvalues() {
        // [[0,1],[1,0]] has eigenvalues {1, -1}
        let a = DenseMatrix::from_rows(&[vec![C::ZERO, C::ONE], vec![C::ONE, C::ZERO]]);
        let pair = schur(a.as_ref()).unwrap();
        let mut eigs: Vec<f64> = pair.t.diag().iter().map(|z| z.re).collect();
        eigs.sort_by(f64::total_cmp);
        assert!((eigs[0] + 1.0).abs() < 1e-14);
        assert!((eigs[1] - 1.0).abs() < 1e-14);
        assert!(abs_c(pair.t.diag()[0].conj() * pair.t.diag()[1] + C::ONE) < 1e-12);
    }

    #[test]
    fn schur_random_reconstruction() {
        for &m in &[5usize, 23, 50] {
            let a = rand_mat(m, m as u64);
            let pair = schur(a.as_ref()).unwrap();
            assert!(pair.t.as_ref().is_upper_triangular());
            let rec = reconstruction_error(&a, &pair.q, &pair.t);
            assert!(rec < 1e-12, "m={m}: reconstruction {rec}");
            let uerr = unitarity_error(&pair.q);
            assert!(uerr < 100.0 * f64::EPSILON * m as f64, "m={m}: unitarity {uerr}");
        }
    }
}
