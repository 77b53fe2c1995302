use ibnls_core::evolution::{split_step, Scheme};
use ibnls_core::functionals;
use ibnls_core::grid::{Field, Grid, RadialGrid};
use ibnls_core::params::ModelParams;
use ibnls_core::radial::spectral;
use num_complex::Complex64 as C64;
use std::sync::Arc;

fn l2_diff(a: &Field, b: &Field) -> f64 {
    let d: Vec<f64> =
        a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm_sqr()).collect();
    functionals::integrate(a.grid(), |j| d[j]).sqrt()
}

fn main() {
    let cases: &[(u32, f64, f64, usize, f64, f64, f64)] = &[
        // (N, sigma, b, M, r_max, width, T)
        (3, 1.0, 0.5, 24, 12.8, 2.0, 0.1),
        (3, 1.0, 0.5, 24, 12.8, 2.0, 0.2),
        (3, 1.0, 0.5, 24, 12.8, 2.0, 1.0),
        (3, 2.0, 1.0, 24, 12.8, 2.0, 0.1),
        (3, 2.0, 1.0, 24, 12.8, 2.0, 1.0),
        (3, 1.0, 0.5, 16, 8.0, 2.0, 0.1),
        (3, 1.0, 0.5, 32, 16.0, 2.0, 0.1),
        // finer grids as falsification controls: resonant shells exist
        (3, 1.0, 0.5, 48, 16.0, 2.0, 0.1),
        (3, 1.0, 0.5, 96, 16.0, 2.0, 0.1),
    ];
    for &(n, sigma, b, m, r_max, width, t_end) in cases {
        let params = ModelParams::new(n, sigma, b).unwrap();
        let rg = RadialGrid::new(n, m, r_max).unwrap();
        let spec = spectral(&rg);
        let lam_max = spec.lam.iter().fold(0.0f64, |a, &l| a.max(l.abs()));
        // distance of tau*lam^2 from the nearest 2*pi*m (m >= 1) at the coarsest tau
        let tau0 = 1e-2;
        let mut worst = f64::INFINITY;
        for &l in spec.lam.iter() {
            let phase = tau0 * l * l;
            let m_near = (phase / (2.0 * std::f64::consts::PI)).round();
            if m_near >= 1.0 {
                let d = (phase - 2.0 * std::f64::consts::PI * m_near).abs();
                worst = worst.min(d);
            }
        }
        let grid = Arc::new(Grid::Radial(rg));
        let u0 = Field::from_fn(grid.clone(), |x| {
            let r = x[0];
            C64::new(0.3 * (-(r / width).powi(2)).exp(), 0.0)
        });
        let run = |tau: f64| -> Field {
            let steps = (t_end / tau).round() as usize;
            let mut u = u0.clone();
            for _ in 0..steps {
                u = split_step(&u, tau, Scheme::Strang, &params);
            }
            u
        };
        let errs: Vec<f64> =
            [1e-2, 5e-3, 2.5e-3].iter().map(|&tau| l2_diff(&run(tau), &run(tau / 4.0))).collect();
        let o1 = (errs[0] / errs[1]).log2();
        let o2 = (errs[1] / errs[2]).log2();
        println!(
            "N={n} sig={sigma} b={b:4.2} M={m:3} rmax={r_max:5.1} T={t_end:4.2} lam_max={lam_max:7.2} tau*lam^2={:7.3} res_gap={} errs=[{:.3e} {:.3e} {:.3e}] orders=[{o1:6.3} {o2:6.3}]",
            tau0 * lam_max * lam_max,
            if worst.is_finite() { format!("{worst:5.3}") } else { "none ".into() },
            errs[0],
            errs[1],
            errs[2]
        );
    }
}
