// Manual performance probe; run with `cargo test -p trishift --test perf_probe -- --ignored --nocapture`.

use num_complex::Complex64 as C;
use std::time::Instant;
use trishift::gemm::gemm_update;
use trishift::matrix::{DenseMatrix, TriangularRef};
use trishift::multishift::multishift_trsm;
use trishift::triangular::trsv_unblocked;

fn upper_rand(m: usize, seed: u64) -> DenseMatrix {
    let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15) | 1;
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 11) as f64) / ((1u64 << 53) as f64)
    };
    DenseMatrix::from_fn(m, m, |i, j| {
        if i < j {
            C::new((next() - 0.5) / (m as f64).sqrt(), (next() - 0.5) / (m as f64).sqrt())
        } else if i == j {
            C::new(1.0 + next(), 0.0)
        } else {
            C::ZERO
        }
    })
}

#[test]
#[ignore]
fn gemm_throughput() {
    for &(m, k, n) in &[(1024usize, 1024usize, 1024usize), (2000, 64, 2000)] {
        let a = upper_rand(m.max(k), 1);
        let b = upper_rand(k.max(n), 2);
        let av = a.submatrix(0, m, 0, k);
        let bv = b.submatrix(0, k, 0, n);
        let mut c = DenseMatrix::zeros(m, n);
        // warm
        gemm_update(c.as_mut(), av, bv, C::ONE, C::ZERO).unwrap();
        let t0 = Instant::now();
        let reps = 3;
        for _ in 0..reps {
            gemm_update(c.as_mut(), av, bv, C::ONE, C::ZERO).unwrap();
        }
        let dt = t0.elapsed().as_secs_f64() / reps as f64;
        let flops = 8.0 * (m as f64) * (k as f64) * (n as f64);
        println!("gemm {m}x{k}x{n}: {:.3} s -> {:.1} GFLOP/s", dt, flops / dt / 1e9);
    }
}

#[test]
#[ignore]
fn criterion4_shapes() {
    let m = 2000;
    let n = 2000;
    let nb = 64;
    let u = upper_rand(m, 3);
    let shifts: Vec<C> = (0..n)
        .map(|j| C::new(1.5 + 0.3 * ((j % 7) as f64 - 3.0) / 3.0, 0.2 * ((j % 5) as f64 - 2.0) / 2.0))
        .collect();
    let b0 = DenseMatrix::from_fn(m, n, |i, j| C::new((i % 13) as f64 / 13.0, (j % 7) as f64 / 7.0));

    let mut x = b0.clone();
    let t0 = Instant::now();
    multishift_trsm(TriangularRef::upper(u.as_ref()), &shifts, x.as_mut(), nb).unwrap();
    let blocked = t0.elapsed().as_secs_f64();
    println!("multishift_trsm m=n=2000 nb=64: {blocked:.3} s");

    // baseline: explicitly shifted copy per shift + unblocked trsv
    let t0 = Instant::now();
    let mut xb = b0.clone();
    let mut scratch = u.clone();
    for (j, &shift) in shifts.iter().enumerate().take(200) {
        scratch.data_mut().copy_from_slice(u.data());
        for d in 0..m {
            let v = scratch[(d, d)];
            scratch[(d, d)] = v - shift;
        }
        trsv_unblocked(TriangularRef::upper(scratch.as_ref()), xb.col_mut(j)).unwrap();
    }
    let baseline = t0.elapsed().as_secs_f64() / 200.0 * n as f64;
    println!("per-shift trsv baseline (extrapolated from 200 cols): {baseline:.3} s");
    println!("speedup: {:.2}x", baseline / blocked);
}

#[test]
#[ignore]
fn eig_residual_raw_vs_normalized() {
    use trishift::eig::{eig, relative_residual};
    use trishift::generators::uniform_ball;
    use trishift::safe::SafeConfig;
    let cfg = SafeConfig::default();
    for &m in &[50usize, 200, 500] {
        let a = uniform_ball(m, m as u64 + 1);
        let t0 = Instant::now();
        let d = eig(a.as_ref(), &cfg, 64).unwrap();
        let dt = t0.elapsed().as_secs_f64();
        let raw = relative_residual(a.as_ref(), d.vectors.as_ref(), &d.values).unwrap();
        let z = d.normalized_vectors();
        let norm = relative_residual(a.as_ref(), z.as_ref(), &d.values).unwrap();
        println!("m={m}: eig {dt:.2}s raw residual {raw:.3e} normalized {norm:.3e}");
    }
}
