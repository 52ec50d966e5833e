// deep-zone census: fraction of grid points beyond the certifiable ceiling
use num_complex::Complex64 as C;
use trishift::generators::grcar;
use trishift::pseudo::{resolvent_norm_reference, spectral_window, GridSpec};
use trishift::safe::SafeConfig;
use trishift::schur::schur;

fn main() {
    let a = grcar(100);
    let t = schur(a.as_ref()).unwrap().t;
    let cfg = SafeConfig::default();
    let cap = 1.0 / (f64::EPSILON * t.norm_inf());
    let ceiling = 1e-3 * cap;
    println!("cap {cap:.3e} ceiling {ceiling:.3e}");
    for (w, h) in [(5.0, 7.0), (7.0, 9.0), (9.0, 11.0), (12.0, 14.0)] {
        let grid = GridSpec::new(C::new(1.0, 0.0), w, h, 40, 40).unwrap();
        let mut deep = 0;
        for a_ix in 0..40 {
            for b_ix in 0..40 {
                let oracle = resolvent_norm_reference(t.as_ref(), grid.point(a_ix, b_ix)).unwrap();
                if oracle > ceiling { deep += 1; }
            }
        }
        let field = spectral_window(t.as_ref(), grid, 1e-6, 32, &cfg, 64).unwrap();
        let conv = field.converged.iter().filter(|c| **c).count();
        let mut bad = 0; let mut worst = 0.0f64;
        for a_ix in 0..40 {
            for b_ix in 0..40 {
                let idx = grid.index(a_ix, b_ix);
                if !field.converged[idx] { continue; }
                let oracle = resolvent_norm_reference(t.as_ref(), grid.point(a_ix, b_ix)).unwrap();
                let rel = (field.values[idx] - oracle).abs() / oracle;
                if rel > 1e-5 { bad += 1; }
                if rel > worst { worst = rel; }
            }
        }
        println!("window {w}x{h}: deep {deep} ({:.2}%), converged {conv} ({:.2}%), bad {bad}, worst {worst:.2e}",
            100.0*deep as f64/1600.0, 100.0*conv as f64/1600.0);
    }
}
