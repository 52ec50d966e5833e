//! Scalar helpers: robust complex modulus and division, unrolled dot
//! products, and vector norms used across the solver kernels.

use num_complex::Complex64;

/// Complex modulus. Uses the plain formula when safe and falls back to
/// `hypot` near the over/underflow boundary.
#[inline]
pub fn abs_c(z: Complex64) -> f64 {
    let (re, im) = (z.re.abs(), z.im.abs());
    let m = re.max(im);
    if m < 1e150 && m > 1e-150 {
        (re * re + im * im).sqrt()
    } else if m == 0.0 {
        0.0
    } else {
        re.hypot(im)
    }
}

/// Complex division by Smith's algorithm; avoids the premature overflow of
/// the textbook formula when the denominator has huge or tiny magnitude.
/// A zero denominator yields infinities, matching the unguarded real case.
#[inline]
pub fn cdiv(num: Complex64, den: Complex64) -> Complex64 {
    let (a, b) = (num.re, num.im);
    let (c, d) = (den.re, den.im);
    if c == 0.0 && d == 0.0 {
        return Complex64::new(a / 0.0, b / 0.0);
    }
    if c.abs() >= d.abs() {
        let r = d / c;
        let t = 1.0 / (c + d * r);
        Complex64::new((a + b * r) * t, (b - a * r) * t)
    } else {
        let r = c / d;
        let t = 1.0 / (c * r + d);
        Complex64::new((a * r + b) * t, (b * r - a) * t)
    }
}

/// `sum conj(x[i]) * y[i]` with fixed 4-way unrolling. The accumulation
/// order depends only on the slice lengths, never on the caller.
pub fn cdot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = [Complex64::ZERO; 4];
    let chunks = x.len() / 4;
    for k in 0..chunks {
        for l in 0..4 {
            let xv = x[4 * k + l];
            let yv = y[4 * k + l];
            acc[l] += xv.conj() * yv;
        }
    }
    for l in 4 * chunks..x.len() {
        acc[l % 4] += x[l].conj() * y[l];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3])
}

/// `y -= alpha * x` over equal-length slices.
#[inline]
pub fn axpy_neg(y: &mut [Complex64], alpha: Complex64, x: &[Complex64]) {
    debug_assert_eq!(y.len(), x.len());
    for (yv, xv) in y.iter_mut().zip(x) {
        *yv -= alpha * *xv;
    }
}

/// Euclidean norm with prescaling by the largest component magnitude.
pub fn norm2(x: &[Complex64]) -> f64 {
    let mut mx = 0.0f64;
    for z in x {
        mx = mx.max(z.re.abs()).max(z.im.abs());
    }
    if mx == 0.0 || !mx.is_finite() {
        return if mx == 0.0 { 0.0 } else { f64::INFINITY };
    }
    let inv = 1.0 / mx;
    let mut acc = [0.0f64; 4];
    for (l, z) in x.iter().enumerate() {
        let re = z.re * inv;
        let im = z.im * inv;
        acc[l % 4] += re * re + im * im;
    }
    mx * ((acc[0] + acc[1]) + (acc[2] + acc[3])).sqrt()
}

/// Max modulus of a complex slice.
#[inline]
pub fn norm_inf_vec(x: &[Complex64]) -> f64 {
    let mut mx = 0.0f64;
    for z in x {
        let a = abs_c(*z);
        if a > mx {
            mx = a;
        }
    }
    mx
}

pub fn scale_slice(x: &mut [Complex64], t: f64) {
    for z in x.iter_mut() {
        z.re *= t;
        z.im *= t;
    }
}

/// Unit phase of `z`; returns 1 for zero input.
#[inline]
pub fn phase(z: Complex64) -> Complex64 {
    let a = abs_c(z);
    if a == 0.0 {
        Complex64::ONE
    } else {
        Complex64::new(z.re / a, z.im / a)
    }
}
