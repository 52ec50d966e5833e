//! Deterministic test-matrix and shift generators.
//!
//! Everything is seeded; the same seed always reproduces the same matrix
//! across platforms.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::gemm::gemm_update;
use crate::matrix::DenseMatrix;
use crate::util::{cdot, norm2, phase};

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform draw from the closed complex disk `|z - center| <= radius`.
fn disk_point(rng: &mut ChaCha8Rng, center: Complex64, radius: f64) -> Complex64 {
    let r = radius * rng.gen::<f64>().sqrt();
    let theta = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
    center + Complex64::new(r * theta.cos(), r * theta.sin())
}

/// Matrix with entries drawn uniformly from the complex unit disk.
pub fn uniform_ball(m: usize, seed: u64) -> DenseMatrix {
    let mut rng = rng_for(seed);
    DenseMatrix::from_fn(m, m, |_, _| disk_point(&mut rng, Complex64::ZERO, 1.0))
}

/// Shifts drawn uniformly from the disk `B(center, radius)`.
pub fn shift_ball(n: usize, center: Complex64, radius: f64, seed: u64) -> Vec<Complex64> {
    let mut rng = rng_for(seed);
    (0..n).map(|_| disk_point(&mut rng, center, radius)).collect()
}

/// Haar-distributed unitary matrix: QR of a complex Gaussian matrix with
/// the phases of the R diagonal folded into Q.
pub fn haar_unitary(m: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
    let mut a = DenseMatrix::from_fn(m, m, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let mut q = DenseMatrix::identity(m);
    let mut v = vec![Complex64::ZERO; m];
    for k in 0..m {
        let xlen = m - k;
        let x = &a.col(k)[k..];
        let xnorm = norm2(x);
        if xnorm == 0.0 {
            continue;
        }
        let beta = -phase(x[0]) * xnorm;
        v[..xlen].copy_from_slice(x);
        v[0] = x[0] - beta;
        let vn = norm2(&v[..xlen]);
        if vn == 0.0 {
            continue;
        }
        let tau = 2.0 / (vn * vn);
        for j in k..m {
            let col = &mut a.col_mut(j)[k..];
            let d = cdot(&v[..xlen], col) * tau;
            for (cv, vv) in col.iter_mut().zip(&v[..xlen]) {
                *cv -= d * *vv;
            }
        }
        // accumulate the reflector into Q from the right
        for i in 0..m {
            let mut d = Complex64::ZERO;
            for (jj, vv) in v[..xlen].iter().enumerate() {
                d += q[(i, k + jj)] * *vv;
            }
            d *= tau;
            for (jj, vv) in v[..xlen].iter().enumerate() {
                let upd = q[(i, k + jj)] - d * vv.conj();
                q[(i, k + jj)] = upd;
            }
        }
    }
    // fold in the R diagonal phases so the distribution is Haar
    for k in 0..m {
        let ph = phase(a[(k, k)]);
        for z in q.col_mut(k) {
            *z *= ph;
        }
    }
    q
}

/// Upper triangular matrix obtained from a random Hermitian matrix with
/// eigenvalues uniform in `[1, 2]` (a Haar unitary similarity of a random
/// diagonal) by deleting the strict lower triangle. The diagonal is real
/// in `[1, 2]` by convexity, so these are comfortably well conditioned.
pub fn triangular_spd_spectrum(m: usize, seed: u64) -> DenseMatrix {
    let mut rng = rng_for(seed);
    let eigs: Vec<f64> = (0..m).map(|_| 1.0 + rng.gen::<f64>()).collect();
    let q = haar_unitary(m, &mut rng);
    // H = Q D Q^H
    let qd = DenseMatrix::from_fn(m, m, |i, j| q[(i, j)] * eigs[j]);
    let qh = q.adjoint();
    let mut h = DenseMatrix::zeros(m, m);
    gemm_update(h.as_mut(), qd.as_ref(), qh.as_ref(), Complex64::ONE, Complex64::ZERO)
        .expect("conformal by construction");
    // delete the strict lower triangle; pin the Hermitian diagonal real
    DenseMatrix::from_fn(m, m, |i, j| {
        if i < j {
            h[(i, j)]
        } else if i == j {
            Complex64::new(h[(i, j)].re, 0.0)
        } else {
            Complex64::ZERO
        }
    })
}

/// Toeplitz test matrix: -1 on the subdiagonal, 1 on the diagonal and the
/// first three superdiagonals. Strongly nonnormal with well-studied
/// pseudospectra.
pub fn grcar(m: usize) -> DenseMatrix {
    DenseMatrix::from_fn(m, m, |i, j| {
        if j + 1 == i {
            -Complex64::ONE
        } else if j >= i && j - i <= 3 {
            Complex64::ONE
        } else {
            Complex64::ZERO
        }
    })
}

/// Single Jordan block: `lambda` on the diagonal, ones above it.
pub fn jordan(m: usize, lambda: Complex64) -> DenseMatrix {
    DenseMatrix::from_fn(m, m, |i, j| {
        if i == j {
            lambda
        } else if j == i + 1 {
            Complex64::ONE
        } else {
            Complex64::ZERO
        }
    })
}

/// Diagonal matrix from an explicit list.
pub fn diagonal(values: &[Complex64]) -> DenseMatrix {
    let m = values.len();
    DenseMatrix::from_fn(m, m, |i, j| if i == j { values[i] } else { Complex64::ZERO })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::abs_c;

    #[test]
    fn jordan_shape() {
        let j = jordan(3, Complex64::ZERO);
        for r in 0..3 {
            for c in 0..3 {
                let want = if c == r + 1 { Complex64::ONE } else { Complex64::ZERO };
                assert_eq!(j[(r, c)], want);
            }
        }
    }

    #[test]
    fn diagonal_from_list() {
        let d = diagonal(&[Complex64::new(1., 0.), Complex64::new(2., 0.), Complex64::new(3., 0.)]);
        assert_eq!(d[(1, 1)], Complex64::new(2., 0.));
        assert_eq!(d[(0, 1)], Complex64::ZERO);
    }

    #[test]
    fn grcar_bandwidth() {
        let g = grcar(8);
        assert_eq!(g[(1, 0)], -Complex64::ONE);
        assert_eq!(g[(0, 0)], Complex64::ONE);
        assert_eq!(g[(0, 3)], Complex64::ONE);
        assert_eq!(g[(0, 4)], Complex64::ZERO);
        assert_eq!(g[(2, 0)], Complex64::ZERO);
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = rng_for(7);
        let q = haar_unitary(12, &mut rng);
        let qh = q.adjoint();
        let mut g = DenseMatrix::identity(12);
        gemm_update(g.as_mut(), qh.as_ref(), q.as_ref(), Complex64::ONE, -Complex64::ONE).unwrap();
        assert!(g.norm_frobenius() < 1e-13, "unitarity defect {}", g.norm_frobenius());
    }

    #[test]
    fn spd_spectrum_diagonal_in_range() {
        for seed in [1u64, 9, 42] {
            let u = triangular_spd_spectrum(60, seed);
            assert!(u.as_ref().is_upper_triangular());
            for k in 0..60 {
                let d = u[(k, k)];
                assert_eq!(d.im, 0.0);
                assert!(d.re >= 1.0 - 1e-12 && d.re <= 2.0 + 1e-12, "diag {d}");
            }
        }
    }

    #[test]
    fn generators_deterministic() {
        assert_eq!(uniform_ball(10, 3), uniform_ball(10, 3));
        assert_eq!(triangular_spd_spectrum(8, 5), triangular_spd_spectrum(8, 5));
        assert_eq!(shift_ball(4, Complex64::new(1.5, 0.0), 0.5, 2), shift_ball(4, Complex64::new(1.5, 0.0), 0.5, 2));
    }

    #[test]
    fn shift_ball_inside_radius() {
        let shifts = shift_ball(200, Complex64::new(1.5, 0.0), 0.5, 11);
        for z in shifts {
            assert!(abs_c(z - Complex64::new(1.5, 0.0)) <= 0.5 + 1e-12);
        }
    }

    #[test]
    fn uniform_ball_inside_disk() {
        let a = uniform_ball(20, 17);
        for j in 0..20 {
            for i in 0..20 {
                assert!(abs_c(a[(i, j)]) <= 1.0 + 1e-12);
            }
        }
    }
}
