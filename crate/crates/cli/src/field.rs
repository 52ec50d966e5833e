//! Serialization of resolvent-norm fields: CSV rows and binary PGM images.

use std::fmt::Write as _;

use trishift::pseudo::{CloudPoint, ResolventField};
use trishift::Complex64;

use crate::fmt::g17;

/// One CSV row per grid point, in flat index order (`a * ny + b`):
/// `re,im,value,iterations,converged` with `converged` as 1 or 0.
pub fn field_to_csv(field: &ResolventField) -> String {
    let mut out = String::new();
    for a in 0..field.grid.nx {
        for b in 0..field.grid.ny {
            let idx = field.grid.index(a, b);
            let z = field.grid.point(a, b);
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                g17(z.re),
                g17(z.im),
                g17(field.values[idx]),
                field.iterations[idx],
                u8::from(field.converged[idx]),
            );
        }
    }
    out
}

/// CSV rows for an explicit shift cloud, same column layout as
/// [`field_to_csv`].
pub fn cloud_to_csv(shifts: &[Complex64], points: &[CloudPoint]) -> String {
    let mut out = String::new();
    for (z, p) in shifts.iter().zip(points) {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            g17(z.re),
            g17(z.im),
            g17(p.value),
            p.iterations,
            u8::from(p.converged),
        );
    }
    out
}

/// Binary PGM (P5, maxval 255) of `log10(value)` mapped linearly onto
/// `[0, 255]` over the field's own range. Image rows run top-down, so row
/// zero is the grid's highest imaginary part.
pub fn field_to_pgm(field: &ResolventField) -> Vec<u8> {
    let (nx, ny) = (field.grid.nx, field.grid.ny);
    let logs: Vec<f64> = field.values.iter().map(|v| v.max(f64::MIN_POSITIVE).log10()).collect();
    let lmin = logs.iter().copied().fold(f64::INFINITY, f64::min);
    let lmax = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = lmax - lmin;

    let mut out = format!("P5\n{nx} {ny}\n255\n").into_bytes();
    for row in 0..ny {
        let b = ny - 1 - row;
        for a in 0..nx {
            let l = logs[field.grid.index(a, b)];
            let byte = if span > 0.0 {
                (255.0 * (l - lmin) / span).round().clamp(0.0, 255.0) as u8
            } else {
                0u8
            };
            out.push(byte);
        }
    }
    out
}
