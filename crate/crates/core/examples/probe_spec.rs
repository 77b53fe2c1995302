use ibnls_core::evolution::{split_step, Scheme};
use ibnls_core::grid::{Field, Grid, RadialGrid};
use ibnls_core::params::ModelParams;
use ibnls_core::radial::spectral;
use num_complex::Complex64 as C64;
use std::sync::Arc;

fn main() {
    let params = ModelParams::new(3, 1.0, 0.5).unwrap();
    let rg = RadialGrid::new(3, 128, 10.0).unwrap();
    let grid = Arc::new(Grid::Radial(rg.clone()));
    let u0 = Field::gaussian(grid.clone(), 1.5, 0.3);
    let t_end = 0.1;
    let run = |tau: f64| {
        let n = (t_end / tau).round() as usize;
        let mut u = u0.clone();
        for _ in 0..n {
            u = split_step(&u, tau, Scheme::Strang, &params);
        }
        u
    };
    let tau = 2.5e-3;
    let coarse = run(tau);
    let fine = run(tau / 4.0);
    let diff: Vec<C64> = coarse
        .values()
        .iter()
        .zip(fine.values())
        .map(|(a, b)| a - b)
        .collect();
    let spec = spectral(&rg);
    let coeffs = spec.to_coeffs(&diff);
    let u_coeffs = spec.to_coeffs(u0.values());
    let mut rows: Vec<(usize, f64, f64, f64)> = (0..coeffs.len())
        .map(|i| (i, spec.lam[i], coeffs[i].norm(), u_coeffs[i].norm()))
        .collect();
    rows.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap());
    println!("top 12 error modes (idx, lambda, |err coeff|, |u0 coeff|):");
    for r in rows.iter().take(12) {
        println!("  {:3}  {:12.2}  {:.3e}  {:.3e}", r.0, r.1, r.2, r.3);
    }
    let total: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let low: f64 = (0..32).map(|i| coeffs[i].norm_sqr()).sum::<f64>().sqrt();
    println!("total err {:.3e}, low-32-mode part {:.3e}", total, low);
}
