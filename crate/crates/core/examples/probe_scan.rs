use ibnls_core::evolution::split_step;
use ibnls_core::evolution::Scheme;
use ibnls_core::functionals;
use ibnls_core::grid::{Field, Grid, RadialGrid};
use ibnls_core::params::ModelParams;
use num_complex::Complex64 as C64;
use std::sync::Arc;

fn l2_diff(a: &Field, b: &Field) -> f64 {
    let d: Vec<f64> =
        a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm_sqr()).collect();
    functionals::integrate(a.grid(), |j| d[j]).sqrt()
}

fn main() {
    for &b in &[0.5f64, 1.0] {
        for &(m, r_max) in &[(64usize, 8.0f64), (96, 10.0), (128, 12.0), (192, 14.0), (256, 16.0)]
        {
            for &t_end in &[0.1f64, 0.2] {
                let params =
                    ModelParams::new(3, if b == 1.0 { 2.0 } else { 1.0 }, b).unwrap();
                let rg = RadialGrid::new(3, m, r_max).unwrap();
                let grid = Arc::new(Grid::Radial(rg));
                let u0 = Field::from_fn(grid.clone(), |x| {
                    let r = x[0];
                    C64::new(0.3 * (-(r / 1.5).powi(2)).exp(), 0.0)
                });
                let run = |tau: f64| -> Field {
                    let n = (t_end / tau).round() as usize;
                    let mut u = u0.clone();
                    for _ in 0..n {
                        u = split_step(&u, tau, Scheme::Strang, &params);
                    }
                    u
                };
                let taus = [1e-2, 5e-3, 2.5e-3];
                let errs: Vec<f64> =
                    taus.iter().map(|&tau| l2_diff(&run(tau), &run(tau / 4.0))).collect();
                let o1 = (errs[0] / errs[1]).log2();
                let o2 = (errs[1] / errs[2]).log2();
                println!(
                    "b={b:4.1} M={m:4} rmax={r_max:4.1} T={t_end:4.2} errs=[{:.3e} {:.3e} {:.3e}] orders=[{o1:6.3} {o2:6.3}]",
                    errs[0], errs[1], errs[2]
                );
            }
        }
    }
}
