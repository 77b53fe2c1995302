use ibnls_core::evolution::{split_step, Scheme};
use ibnls_core::functionals;
use ibnls_core::grid::{Field, Grid, RadialGrid};
use ibnls_core::params::ModelParams;
use std::sync::Arc;
use std::time::Instant;

fn main() {
    for (b, ring, m, r_max, amp, width, t_end) in [
        (0.5f64, false, 128usize, 10.0f64, 0.3f64, 1.5f64, 0.1f64),
        (0.5, true, 128, 10.0, 0.3, 1.0, 0.1),
        (0.5, true, 256, 16.0, 0.3, 1.0, 0.1),
        (0.5, true, 256, 16.0, 1.0, 1.0, 0.1),
        (1.0, true, 256, 16.0, 0.3, 1.0, 0.1),
        (0.5, true, 2048, 48.0, 0.3, 1.0, 0.1),
    ] {
        let params = ModelParams::new(3, 1.0, b).unwrap();
        let grid = Arc::new(Grid::Radial(RadialGrid::new(3, m, r_max).unwrap()));
        let u0 = if ring {
            Field::from_fn(grid.clone(), |x| {
                let d = (x[0] - 3.0) / width;
                num_complex::Complex64::new(amp * (-d * d).exp(), 0.0)
            })
        } else {
            Field::gaussian(grid.clone(), width, amp)
        };
        let run = |tau: f64| {
            let n = (t_end / tau).round() as usize;
            let mut u = u0.clone();
            for _ in 0..n {
                u = split_step(&u, tau, Scheme::Strang, &params);
            }
            u
        };
        let t0 = Instant::now();
        let errs: Vec<f64> = [1e-2, 5e-3, 2.5e-3]
            .iter()
            .map(|&tau| {
                let coarse = run(tau);
                let reference = run(tau / 4.0);
                let diff: Vec<f64> = coarse
                    .values()
                    .iter()
                    .zip(reference.values())
                    .map(|(a, b)| (a - b).norm_sqr())
                    .collect();
                functionals::integrate(u0.grid(), |j| diff[j]).sqrt()
            })
            .collect();
        let o1 = (errs[0] / errs[1]).log2();
        let o2 = (errs[1] / errs[2]).log2();
        println!(
            "b={b:4} ring={ring:5} M={m:4} rmax={r_max:4} amp={amp:4} errs=[{:.3e} {:.3e} {:.3e}] orders=[{o1:.3} {o2:.3}]  ({:.2?})",
            errs[0], errs[1], errs[2], t0.elapsed()
        );
    }
}
