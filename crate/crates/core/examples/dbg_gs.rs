use ibnls_core::grid::RadialGrid;
use ibnls_core::groundstate::{
    ground_state_from_minimizer, minimize_quotient, optimal_constant, petviashvili_ground_state,
    pohozaev_residuals, profile_distance, variational_ground_state, SolveOptions,
};
use ibnls_core::params::ModelParams;
use std::time::Instant;

fn main() {
    let params = ModelParams::with_p(3, 1.0, 0.5, 2.0).unwrap();
    let grid = RadialGrid::new(3, 2048, 48.0).unwrap();

    // Petviashvili floor: run to stall with zero tolerance
    let t0 = Instant::now();
    let probe = SolveOptions { tolerance: 0.0, max_iterations: 300, seed_width: 1.5 };
    match petviashvili_ground_state(&params, &grid, &probe) {
        Err(ibnls_core::error::Error::NonConvergence { iters, last }) => {
            println!("petviashvili floor: {last:.3e} after {iters} iters [{:?}]", t0.elapsed());
        }
        other => println!("unexpected: {other:?}"),
    }

    let t0 = Instant::now();
    let q = petviashvili_ground_state(&params, &grid, &SolveOptions::default()).unwrap();
    println!(
        "petviashvili: residual {:.3e}, J {:.12}, iters {} [{:?}]",
        q.residual,
        q.j_value,
        q.iterations,
        t0.elapsed()
    );
    let pr = pohozaev_residuals(&q).unwrap();
    println!("pohozaev(q) max: {:.3e}", pr.max());

    let t0 = Instant::now();
    let opts = SolveOptions { tolerance: 1e-8, max_iterations: 20000, seed_width: 1.5 };
    let v = variational_ground_state(&params, &grid, &opts).unwrap();
    println!(
        "two-pass weinstein: residual {:.3e}, J {:.12}, iters {} [{:?}]",
        v.residual,
        v.j_value,
        v.iterations,
        t0.elapsed()
    );
    match v.field.grid().as_ref() {
        ibnls_core::grid::Grid::Radial(g) => {
            println!("published dr {:.6e} vs request {:.6e}", g.dr(), grid.dr())
        }
        _ => unreachable!(),
    }
    let prv = pohozaev_residuals(&v).unwrap();
    println!("pohozaev(v) max: {:.3e}", prv.max());

    let dist = profile_distance(&q.field, &v.field).unwrap();
    println!("cross-method distance: {:.3e}", dist);

    let k = optimal_constant(&v).unwrap();
    println!(
        "k_opt spread: {:.3e}, norm closed {:.10} measured {:.10}",
        k.spread(),
        k.v_norm_p,
        k.v_norm_measured
    );

    // Newton reach: what merit does the KKT phase bottom out at?
    let t0 = Instant::now();
    let reach_opts = SolveOptions { tolerance: 1e-13, max_iterations: 20000, seed_width: 1.5 };
    match minimize_quotient(&params, &grid, &reach_opts) {
        Ok(m) => println!("kkt reach: converged to 1e-13?! iters {}", m.iterations),
        Err(ibnls_core::error::Error::NonConvergence { iters, last }) => {
            println!("kkt reach at request grid: {last:.3e} after {iters} iters [{:?}]", t0.elapsed());
        }
        Err(e) => println!("kkt reach error: {e:?}"),
    }
}
