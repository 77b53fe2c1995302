use ibnls_core::functionals;
use ibnls_core::grid::{Field, Grid, RadialGrid};
use ibnls_core::radial::spectral;
use num_complex::Complex64 as C64;
use std::sync::Arc;

fn main() {
    let m = 256usize;
    let r_max = 16.0;
    let b = 0.5f64;
    let rg = RadialGrid::new(3, m, r_max).unwrap();
    let grid = Arc::new(Grid::Radial(rg.clone()));
    let spec = spectral(&rg);
    let dr = rg.dr();
    let t_end = 0.1;

    // gaussian ring datum
    let u0 = Field::from_fn(grid.clone(), |x| {
        let d = x[0] - 3.0;
        C64::new(0.3 * (-d * d).exp(), 0.0)
    });

    for s_over_dr in [0.0f64, 1.0, 4.0, 16.0, 64.0] {
        let s = s_over_dr * dr;
        let weight: Vec<f64> =
            (0..m).map(|j| (rg.radius(j).powi(2) + s * s).powf(-0.5 * b)).collect();
        let lin = |u: &[C64], tau: f64| -> Vec<C64> {
            spec.apply_function(u, |lam| C64::from_polar(1.0, tau * lam * lam))
        };
        let strang = |u: &[C64], tau: f64| -> Vec<C64> {
            let mut v = lin(u, 0.5 * tau);
            for (j, vj) in v.iter_mut().enumerate() {
                let phase = -tau * weight[j] * vj.norm_sqr();
                *vj *= C64::from_polar(1.0, phase);
            }
            lin(&v, 0.5 * tau)
        };
        let run = |tau: f64| -> Vec<C64> {
            let n = (t_end / tau).round() as usize;
            let mut u = u0.values().to_vec();
            for _ in 0..n {
                u = strang(&u, tau);
            }
            u
        };
        let errs: Vec<f64> = [1e-2, 5e-3, 2.5e-3]
            .iter()
            .map(|&tau| {
                let coarse = run(tau);
                let fine = run(tau / 4.0);
                let d: Vec<f64> =
                    coarse.iter().zip(&fine).map(|(a, c)| (a - c).norm_sqr()).collect();
                functionals::integrate(u0.grid(), |j| d[j]).sqrt()
            })
            .collect();
        println!(
            "s={:6.3} ({:4.0} dr): errs=[{:.3e} {:.3e} {:.3e}] orders=[{:.3} {:.3}]",
            s,
            s_over_dr,
            errs[0],
            errs[1],
            errs[2],
            (errs[0] / errs[1]).log2(),
            (errs[1] / errs[2]).log2()
        );
    }

    // local error: one Strang step vs two half steps, no weight regularization
    let weight: Vec<f64> = (0..m).map(|j| rg.radius(j).powf(-b)).collect();
    let lin = |u: &[C64], tau: f64| -> Vec<C64> {
        spec.apply_function(u, |lam| C64::from_polar(1.0, tau * lam * lam))
    };
    let strang = |u: &[C64], tau: f64| -> Vec<C64> {
        let mut v = lin(u, 0.5 * tau);
        for (j, vj) in v.iter_mut().enumerate() {
            let phase = -tau * weight[j] * vj.norm_sqr();
            *vj *= C64::from_polar(1.0, phase);
        }
        lin(&v, 0.5 * tau)
    };
    println!("local error (one step vs two half steps) from the ring datum:");
    for tau in [1e-2, 5e-3, 2.5e-3, 1.25e-3] {
        let one = strang(u0.values(), tau);
        let half = strang(&strang(u0.values(), 0.5 * tau), 0.5 * tau);
        let d: Vec<f64> = one.iter().zip(&half).map(|(a, c)| (a - c).norm_sqr()).collect();
        let err = functionals::integrate(u0.grid(), |j| d[j]).sqrt();
        println!("  tau={tau:.2e}  err={err:.3e}");
    }
}
