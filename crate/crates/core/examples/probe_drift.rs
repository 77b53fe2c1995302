use ibnls_core::evolution::{evolve, EvolutionConfig, Scheme};
use ibnls_core::grid::{Field, Grid, RadialGrid};
use ibnls_core::params::ModelParams;
use num_complex::Complex64 as C64;
use std::sync::Arc;
use std::time::Instant;

fn main() {
    let params = ModelParams::with_p(3, 2.0, 1.0, 2.0).unwrap();
    let rg = RadialGrid::new(3, 2048, 48.0).unwrap();
    let grid = Arc::new(Grid::Radial(rg));
    for amp in [0.05f64, 0.2] {
        let u0 = Field::from_fn(grid.clone(), |x| {
            let r = x[0];
            C64::new(amp * (-(r / 3.0).powi(2)).exp(), 0.0)
        });
        let config = EvolutionConfig {
            dt0: 1e-3,
            t_end: 1.0,
            scheme: Scheme::Strang,
            record_every: 50,
            ..EvolutionConfig::default()
        };
        let start = Instant::now();
        let trace = evolve(&u0, &config, &params).unwrap();
        let wall = start.elapsed().as_secs_f64();
        let m0 = trace.records[0].mass;
        let e0 = trace.records[0].energy;
        let mass_drift = trace
            .records
            .iter()
            .map(|r| (r.mass - m0).abs() / m0)
            .fold(0.0f64, f64::max);
        let energy_drift = trace
            .records
            .iter()
            .map(|r| (r.energy - e0).abs() / e0.abs())
            .fold(0.0f64, f64::max);
        println!(
            "amp={amp} E0={e0:.6e} mass_drift={mass_drift:.3e} energy_drift={energy_drift:.3e} steps={} boundary={:.3e} flagged={} stop={:?} wall={wall:.1}s",
            trace.steps, trace.boundary_mass, trace.boundary_flagged, trace.stop
        );
    }
}
