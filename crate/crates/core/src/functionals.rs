//! Conserved quantities, Sobolev norms, and field rescalings.
//!
//! Quadrature is composite midpoint on both grid kinds (the half-cell
//! offsets make every sample a cell center) with deterministic pairwise
//! reduction, so repeated runs produce bit-identical sums.

use num_complex::Complex64 as C64;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::params::ModelParams;
use crate::radial::RadialOp;

/// Pairwise (cascade) summation; deterministic and O(ε log n) accurate.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// ∫ f over the grid: pairwise sum of per-node integrand values times
/// quadrature weights.
pub fn integrate(grid: &Grid, integrand: impl Fn(usize) -> f64) -> f64 {
    let terms: Vec<f64> = (0..grid.len()).map(|j| integrand(j) * grid.weight(j)).collect();
    pairwise_sum(&terms)
}

/// Quadrature inner product ⟨u, v⟩ = ∫ ū v.
pub fn inner(u: &Field, v: &Field) -> C64 {
    let g = u.grid().as_ref();
    let re = integrate(g, |j| (u.values()[j].conj() * v.values()[j]).re);
    let im = integrate(g, |j| (u.values()[j].conj() * v.values()[j]).im);
    C64::new(re, im)
}

/// Mass ∫|u|².
pub fn mass(u: &Field) -> f64 {
    integrate(u.grid(), |j| u.values()[j].norm_sqr())
}

pub fn norm_l2(u: &Field) -> f64 {
    mass(u).sqrt()
}

/// ∫|u|^p.
pub fn lp_integral(u: &Field, p: f64) -> f64 {
    integrate(u.grid(), |j| u.values()[j].norm().powf(p))
}

pub fn norm_lp(u: &Field, p: f64) -> f64 {
    lp_integral(u, p).powf(1.0 / p)
}

/// Weighted integral ∫|x|^{−b}|u|^p; finite on the grid because samples
/// sit at strictly positive radii.
pub fn lpb_integral(u: &Field, p: f64, b: f64) -> f64 {
    integrate(u.grid(), |j| u.grid().radius(j).powf(-b) * u.values()[j].norm().powf(p))
}

pub fn norm_lpb(u: &Field, p: f64, b: f64) -> f64 {
    lpb_integral(u, p, b).powf(1.0 / p)
}

fn radial_op(u: &Field) -> RadialOp {
    match u.grid().as_ref() {
        Grid::Radial(g) => RadialOp::new(g),
        Grid::Cartesian(_) => unreachable!("radial operator requested on a Cartesian grid"),
    }
}

/// Applies a spectral multiplier m(|ξ|) on a Cartesian grid.
fn cartesian_multiplier(u: &Field, m: impl Fn(f64) -> f64) -> Field {
    let g = match u.grid().as_ref() {
        Grid::Cartesian(g) => g,
        Grid::Radial(_) => unreachable!(),
    };
    let hat = u.spectral();
    let mut out = hat.as_ref().clone();
    let mut k = [0.0f64; 3];
    for (flat, v) in out.iter_mut().enumerate() {
        g.frequency_vector(flat, &mut k[..g.dim()]);
        let kk = k[..g.dim()].iter().map(|x| x * x).sum::<f64>().sqrt();
        *v *= m(kk);
    }
    Field::new(u.grid().clone(), crate::fft::inverse(g.sizes(), &out)).unwrap()
}

/// Δu on either grid kind.
pub fn laplacian(u: &Field) -> Field {
    match u.grid().as_ref() {
        Grid::Cartesian(_) => cartesian_multiplier(u, |k| -k * k),
        Grid::Radial(_) => {
            let op = radial_op(u);
            let mut out = vec![C64::new(0.0, 0.0); u.len()];
            op.apply(u.values(), &mut out);
            Field::new(u.grid().clone(), out).unwrap()
        }
    }
}

/// Δ²u on either grid kind.
pub fn biharmonic(u: &Field) -> Field {
    match u.grid().as_ref() {
        Grid::Cartesian(_) => cartesian_multiplier(u, |k| k.powi(4)),
        Grid::Radial(_) => {
            let op = radial_op(u);
            let mut mid = vec![C64::new(0.0, 0.0); u.len()];
            let mut out = vec![C64::new(0.0, 0.0); u.len()];
            op.apply(u.values(), &mut mid);
            op.apply(&mid, &mut out);
            Field::new(u.grid().clone(), out).unwrap()
        }
    }
}

/// (−Δ)^{s/2} u for any real s. Negative s is a smoothing operator; on the
/// periodic Cartesian grid the zero frequency is then projected out (the
/// homogeneous norm ignores the mean).
pub fn fractional_laplacian(u: &Field, s: f64) -> Field {
    match u.grid().as_ref() {
        Grid::Cartesian(_) => cartesian_multiplier(u, |k| {
            if k == 0.0 && s < 0.0 {
                0.0
            } else {
                k.powf(s)
            }
        }),
        Grid::Radial(g) => {
            let spec = crate::radial::spectral(g);
            let values = spec.apply_function(u.values(), |lam| C64::new((-lam).powf(0.5 * s), 0.0));
            Field::new(u.grid().clone(), values).unwrap()
        }
    }
}

/// Homogeneous Sobolev seminorm ‖u‖_{Ḣ^s} = ‖(−Δ)^{s/2}u‖₂, evaluated by
/// Parseval from the cached spectral representation.
pub fn norm_hdot(u: &Field, s: f64) -> f64 {
    match u.grid().as_ref() {
        Grid::Cartesian(g) => {
            let hat = u.spectral();
            let scale = g.cell_volume() / g.len() as f64;
            let mut k = [0.0f64; 3];
            let terms: Vec<f64> = hat
                .iter()
                .enumerate()
                .map(|(flat, v)| {
                    g.frequency_vector(flat, &mut k[..g.dim()]);
                    let kk = k[..g.dim()].iter().map(|x| x * x).sum::<f64>();
                    if kk == 0.0 && s < 0.0 {
                        0.0
                    } else {
                        kk.powf(s) * v.norm_sqr() * scale
                    }
                })
                .collect();
            pairwise_sum(&terms).max(0.0).sqrt()
        }
        Grid::Radial(g) => {
            let spec = crate::radial::spectral(g);
            let coeffs = u.spectral();
            let terms: Vec<f64> =
                coeffs.iter().zip(spec.lam.iter()).map(|(a, &l)| (-l).powf(s) * a.norm_sqr()).collect();
            pairwise_sum(&terms).max(0.0).sqrt()
        }
    }
}

/// Full H² norm (‖u‖₂² + ‖Δu‖₂²)^{1/2}.
pub fn norm_h2(u: &Field) -> f64 {
    let lap = laplacian(u);
    (mass(u) + mass(&lap)).sqrt()
}

/// The two halves of the conserved energy and their difference.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct EnergyParts {
    /// ½ ∫|Δu|²
    pub kinetic: f64,
    /// 1/(2σ+2) ∫|x|^{−b}|u|^{2σ+2}
    pub potential: f64,
    /// kinetic − potential
    pub total: f64,
}

/// E[u] = ½‖Δu‖₂² − 1/(2σ+2)·∫|x|^{−b}|u|^{2σ+2}.
pub fn energy_parts(u: &Field, params: &ModelParams) -> EnergyParts {
    let lap = laplacian(u);
    let kinetic = 0.5 * mass(&lap);
    let potential =
        lpb_integral(u, 2.0 * params.sigma() + 2.0, params.b()) / (2.0 * params.sigma() + 2.0);
    EnergyParts { kinetic, potential, total: kinetic - potential }
}

pub fn energy(u: &Field, params: &ModelParams) -> f64 {
    energy_parts(u, params).total
}

/// The focusing nonlinearity |x|^{−b}|u|^{2σ}u.
pub fn nonlinear_term(u: &Field, params: &ModelParams) -> Field {
    let b = params.b();
    let two_sigma = 2.0 * params.sigma();
    let g = u.grid().clone();
    let values: Vec<C64> = u
        .values()
        .iter()
        .enumerate()
        .map(|(j, &v)| v * (g.radius(j).powf(-b) * v.norm().powf(two_sigma)))
        .collect();
    Field::new(g, values).unwrap()
}

const RESCALE_TAIL_TOL: f64 = 1e-8;

/// Evaluates u(λx) on u's own grid.
///
/// Radial grids use 4-point Lagrange interpolation with even reflection
/// across r = 0 and zero extension past r_max; Cartesian grids use exact
/// trigonometric interpolation of the periodic extension (a dense
/// per-axis nonuniform inverse transform). Fails when the |u|² fraction
/// near the boundary shows the samples needed are not negligible there.
pub fn sample_scaled(u: &Field, lambda: f64) -> Result<Field> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Domain(format!("scale factor {lambda} must be positive")));
    }
    // zooming in (λ > 1) reads the input near its boundary; zooming out
    // pushes the output's support toward the boundary
    let tail = u.tail_fraction(0.9f64.min(0.9 * lambda));
    if tail > RESCALE_TAIL_TOL {
        return Err(Error::RescaleOutOfDomain { tail });
    }
    match u.grid().as_ref() {
        Grid::Radial(g) => {
            let m = g.len();
            let fetch = |i: isize| -> C64 {
                // even reflection: node −1−k mirrors node k; zero beyond r_max
                let idx = if i < 0 { -1 - i } else { i };
                if idx as usize >= m {
                    C64::new(0.0, 0.0)
                } else {
                    u.values()[idx as usize]
                }
            };
            let values: Vec<C64> = (0..m)
                .map(|j| {
                    let xi = lambda * (j as f64 + 0.5) - 0.5; // target in index coordinates
                    let i1 = xi.floor() as isize;
                    let t = xi - i1 as f64;
                    // cubic Lagrange weights on nodes i1−1 .. i1+2
                    let w0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
                    let w1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
                    let w2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
                    let w3 = (t + 1.0) * t * (t - 1.0) / 6.0;
                    fetch(i1 - 1) * w0 + fetch(i1) * w1 + fetch(i1 + 1) * w2 + fetch(i1 + 2) * w3
                })
                .collect();
            Field::new(u.grid().clone(), values)
        }
        Grid::Cartesian(g) => {
            let dims = g.sizes().to_vec();
            let mut data = u.spectral().as_ref().clone();
            for axis in 0..g.dim() {
                let n = dims[axis];
                // dense inverse transform onto the stretched coordinates; the
                // index-space coefficients carry the phase of the first
                // sample, so the interpolant is Σ û_m e^{ik(x − x₀)}/n
                let x0 = g.coordinate(axis, 0);
                let mut e = vec![C64::new(0.0, 0.0); n * n];
                for j in 0..n {
                    let x = lambda * g.coordinate(axis, j);
                    for mm in 0..n {
                        let k = crate::fft::frequency(mm, n, g.half_widths()[axis]);
                        e[j * n + mm] = C64::new(0.0, k * (x - x0)).exp() / n as f64;
                    }
                }
                contract_axis(&dims, &mut data, axis, &e);
            }
            Field::new(u.grid().clone(), data)
        }
    }
}

/// Applies an n×n matrix to every line of `data` along `axis` (row-major).
fn contract_axis(dims: &[usize], data: &mut [C64], axis: usize, matrix: &[C64]) {
    let n = dims[axis];
    let inner: usize = dims[axis + 1..].iter().product();
    let outer: usize = dims[..axis].iter().product();
    let mut line = vec![C64::new(0.0, 0.0); n];
    let mut out = vec![C64::new(0.0, 0.0); n];
    for o in 0..outer {
        for i in 0..inner {
            let base = o * n * inner + i;
            for (m, slot) in line.iter_mut().enumerate() {
                *slot = data[base + m * inner];
            }
            for (j, slot) in out.iter_mut().enumerate() {
                let row = &matrix[j * n..(j + 1) * n];
                let mut acc = C64::new(0.0, 0.0);
                for m in 0..n {
                    acc += row[m] * line[m];
                }
                *slot = acc;
            }
            for (j, &v) in out.iter().enumerate() {
                data[base + j * inner] = v;
            }
        }
    }
}

/// The scaling map u ↦ λ^{(4−b)/(2σ)} u(λx) that leaves the equation
/// invariant; multiplies every Ḣ^s norm by λ^{s − s_c}.
pub fn rescale_field(u: &Field, lambda: f64, params: &ModelParams) -> Result<Field> {
    let amp = lambda.powf((4.0 - params.b()) / (2.0 * params.sigma()));
    Ok(sample_scaled(u, lambda)?.scaled(C64::new(amp, 0.0)))
}

/// Observed convergence order from errors at spacing h and h/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObservedOrder {
    Order(f64),
    /// Both errors are at the rounding floor; the ratio carries no signal.
    MachineLimited,
}

pub fn observed_order(err_coarse: f64, err_fine: f64, scale: f64) -> ObservedOrder {
    let floor = 1e-10 * scale.abs().max(f64::MIN_POSITIVE);
    if err_fine.abs() < floor {
        ObservedOrder::MachineLimited
    } else {
        ObservedOrder::Order((err_coarse.abs() / err_fine.abs()).log2())
    }
}

/// Convenience: a fresh Arc'd radial grid.
pub fn radial_grid(n_dim: u32, m: usize, r_max: f64) -> Result<Arc<Grid>> {
    Ok(Arc::new(Grid::Radial(crate::grid::RadialGrid::new(n_dim, m, r_max)?)))
}

/// Convenience: a fresh Arc'd Cartesian cube grid.
pub fn cube_grid(dim: usize, n: usize, half_width: f64) -> Result<Arc<Grid>> {
    Ok(Arc::new(Grid::Cartesian(crate::grid::CartesianGrid::cube(dim, n, half_width)?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn gaussian_quadrature_oracles() {
        // u = e^{−r²} in ℝ³: ∫|u|² = (π/2)^{3/2}, ∫|x|^{−1}|u|² = π,
        // ∫|u|⁴ = (π/4)^{... } use ∫e^{−4r²}dx = (π/4)^{3/2}
        let grid = radial_grid(3, 4096, 8.0).unwrap();
        let u = Field::gaussian(grid, 1.0, 1.0);
        assert_relative_eq!(mass(&u), (PI / 2.0).powf(1.5), max_relative = 1e-10);
        assert_relative_eq!(lpb_integral(&u, 2.0, 1.0), PI, max_relative = 1e-6);
        assert_relative_eq!(lp_integral(&u, 4.0), (PI / 4.0).powf(1.5), max_relative = 1e-10);
    }

    #[test]
    fn biharmonic_of_gaussian_matches_analytic() {
        // Δ²e^{−r²} = [16r⁴ − (16N+32)r² + 4N² + 8N]e^{−r²}
        let n_dim = 3u32;
        let grid = radial_grid(n_dim, 2048, 12.0).unwrap();
        let u = Field::gaussian(grid.clone(), 1.0, 1.0);
        let got = biharmonic(&u);
        let want = Field::from_fn(grid.clone(), |x| {
            let r2 = x[0] * x[0];
            let nn = n_dim as f64;
            C64::new(
                (16.0 * r2 * r2 - (16.0 * nn + 32.0) * r2 + 4.0 * nn * nn + 8.0 * nn)
                    * (-r2).exp(),
                0.0,
            )
        });
        let err = integrate(grid.as_ref(), |j| (got.values()[j] - want.values()[j]).norm_sqr());
        let den = mass(&want);
        assert!(
            (err / den).sqrt() < 1e-3,
            "relative biharmonic error {}",
            (err / den).sqrt()
        );
    }

    #[test]
    fn hdot2_matches_direct_laplacian_quadrature() {
        let grid = radial_grid(3, 512, 10.0).unwrap();
        let u = Field::from_fn(grid, |x| {
            let r = x[0];
            C64::new((1.0 - 0.4 * r * r) * (-0.7 * r * r).exp(), 0.2 * (-r * r).exp())
        });
        let lap = laplacian(&u);
        assert_relative_eq!(norm_hdot(&u, 2.0), mass(&lap).sqrt(), max_relative = 1e-11);
        assert_relative_eq!(norm_hdot(&u, 0.0), norm_l2(&u), max_relative = 1e-11);
    }

    #[test]
    fn fractional_laplacian_consistency() {
        let grid = radial_grid(3, 256, 10.0).unwrap();
        let u = Field::gaussian(grid, 1.3, 0.8);
        // (−Δ)^{1} = −Δ
        let frac = fractional_laplacian(&u, 2.0);
        let lap = laplacian(&u);
        let err = integrate(u.grid(), |j| (frac.values()[j] + lap.values()[j]).norm_sqr());
        assert!(err.sqrt() / mass(&lap).sqrt() < 1e-10);
        // ‖(−Δ)^{s/2}u‖₂ = ‖u‖_{Ḣ^s}
        let half = fractional_laplacian(&u, 1.0);
        assert_relative_eq!(norm_l2(&half), norm_hdot(&u, 1.0), max_relative = 1e-11);
    }

    #[test]
    fn cartesian_parseval_and_gaussian_laplacian() {
        let grid = cube_grid(2, 128, 8.0).unwrap();
        let u = Field::from_fn(grid.clone(), |x| {
            let r2 = x.iter().map(|v| v * v).sum::<f64>();
            C64::new((-r2).exp(), 0.5 * (-0.8 * r2).exp())
        });
        assert_relative_eq!(norm_hdot(&u, 0.0), norm_l2(&u), max_relative = 1e-12);
        let g = Field::gaussian(grid.clone(), 1.0, 1.0);
        let lap = laplacian(&g);
        let want = Field::from_fn(grid.clone(), |x| {
            let r2 = x.iter().map(|v| v * v).sum::<f64>();
            C64::new((4.0 * r2 - 4.0) * (-r2).exp(), 0.0)
        });
        let err = integrate(grid.as_ref(), |j| (lap.values()[j] - want.values()[j]).norm_sqr());
        assert!(err.sqrt() / mass(&want).sqrt() < 1e-9, "spectral Laplacian accuracy");
    }

    #[test]
    fn energy_of_gaussian_in_closed_form() {
        // N=3, σ=1, b=1, u = e^{−r²}: ‖Δu‖² = ∫(4r²−6)²e^{−2r²},
        // ∫(16r⁴ − 48r² + 36)e^{−2r²}·4πr²dr with ∫r^{2k}e^{−2r²}r²·4π dr
        // moments: ∫e^{−2r²}dx = (π/2)^{3/2} =: m0, ∫r²e^{−2r²}dx = (3/4)m0,
        // ∫r⁴e^{−2r²}dx = (15/16)m0, ∫r⁶... : 16·(15/16) − 48·(3/4) + 36 = 15.
        let grid = radial_grid(3, 2048, 10.0).unwrap();
        let u = Field::gaussian(grid, 1.0, 1.0);
        let params = ModelParams::new(3, 1.0, 1.0).unwrap();
        let m0 = (PI / 2.0).powf(1.5);
        let kin_exact = 0.5 * 15.0 * m0;
        // ∫|x|^{−1}e^{−4r²}·4πr²dr = 4π/(2·4) = π/2, so potential = (π/2)/4
        let parts = energy_parts(&u, &params);
        assert_relative_eq!(parts.kinetic, kin_exact, max_relative = 1e-3);
        assert_relative_eq!(parts.potential, PI / 8.0, max_relative = 1e-4);
        assert_relative_eq!(parts.total, parts.kinetic - parts.potential, epsilon = 1e-14);
    }

    #[test]
    fn rescale_gaussian_matches_closed_form() {
        let grid = radial_grid(3, 1024, 12.0).unwrap();
        let u = Field::gaussian(grid.clone(), 1.0, 1.0);
        let params = ModelParams::new(3, 2.0, 1.0).unwrap();
        let lambda = 1.3;
        let got = rescale_field(&u, lambda, &params).unwrap();
        let amp = lambda.powf((4.0 - 1.0) / 4.0);
        let want = Field::from_fn(grid.clone(), |x| {
            C64::new(amp * (-(lambda * x[0]).powi(2)).exp(), 0.0)
        });
        let err = integrate(grid.as_ref(), |j| (got.values()[j] - want.values()[j]).norm_sqr());
        assert!(err.sqrt() / mass(&want).sqrt() < 1e-6, "cubic interpolation accuracy");
    }

    #[test]
    fn rescale_respects_scaling_law() {
        // ‖u_λ‖_{Ḣ^s} = λ^{s−s_c}‖u‖_{Ḣ^s} for u_λ = λ^{(4−b)/(2σ)}u(λx)
        let grid = radial_grid(3, 1024, 14.0).unwrap();
        let u = Field::gaussian(grid, 1.0, 1.0);
        let params = ModelParams::new(3, 2.0, 1.0).unwrap();
        let exps = crate::params::derive_exponents(&params).unwrap();
        let lambda = 1.21;
        let scaled = rescale_field(&u, lambda, &params).unwrap();
        for s in [0.0, exps.s_c(), 2.0] {
            let want = lambda.powf(s - exps.s_c()) * norm_hdot(&u, s);
            assert_relative_eq!(norm_hdot(&scaled, s), want, max_relative = 1e-3);
        }
    }

    #[test]
    fn cartesian_rescale_trig_interpolation() {
        let grid = cube_grid(2, 64, 10.0).unwrap();
        let u = Field::gaussian(grid.clone(), 1.2, 1.0);
        let got = sample_scaled(&u, 0.8).unwrap();
        let want = Field::from_fn(grid.clone(), |x| {
            let r2 = x.iter().map(|v| (0.8 * v) * (0.8 * v)).sum::<f64>();
            C64::new((-r2 / (1.2 * 1.2)).exp(), 0.0)
        });
        let err = integrate(grid.as_ref(), |j| (got.values()[j] - want.values()[j]).norm_sqr());
        assert!(err.sqrt() / mass(&want).sqrt() < 1e-8, "trig interpolation accuracy");
    }

    #[test]
    fn rescale_rejects_fields_touching_the_boundary() {
        let grid = radial_grid(3, 256, 3.0).unwrap();
        let u = Field::gaussian(grid, 2.5, 1.0); // barely decayed at r = 3
        assert!(matches!(
            sample_scaled(&u, 1.5),
            Err(Error::RescaleOutOfDomain { .. })
        ));
    }

    #[test]
    fn observed_order_classification() {
        assert!(matches!(observed_order(4.0e-4, 1.0e-4, 1.0), ObservedOrder::Order(p) if (p - 2.0).abs() < 1e-12));
        assert_eq!(observed_order(1e-13, 1e-14, 1.0), ObservedOrder::MachineLimited);
    }
}
