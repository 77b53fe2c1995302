//! Spatial grids and complex scalar fields.
//!
//! Both grid kinds place samples at half-cell offsets, so the singular
//! weight |x|^{−b} is only ever evaluated at strictly positive radii:
//!
//! * Cartesian: x_j = −L + (j + 1/2)·(2L/n) per axis, periodic spectral ops;
//! * radial:    r_j = (j + 1/2)·dr, j = 0..M−1, with even reflection across
//!   r = 0 and Dirichlet decay beyond r_max = M·dr.

use num_complex::Complex64 as C64;
use serde::Serialize;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};

/// Surface area of the unit sphere S^{N−1} in ℝ^N.
pub fn unit_sphere_area(n_dim: u32) -> f64 {
    // ω_1 = 2, ω_2 = 2π, ω_N = 2π ω_{N−2}/(N−2)
    match n_dim {
        0 => panic!("dimension must be positive"),
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI,
        _ => 2.0 * std::f64::consts::PI * unit_sphere_area(n_dim - 2) / (n_dim - 2) as f64,
    }
}

/// Periodic Cartesian grid on [−L_a, L_a) per axis, power-of-two sizes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CartesianGrid {
    sizes: Vec<usize>,
    half_widths: Vec<f64>,
}

impl CartesianGrid {
    pub fn new(sizes: &[usize], half_widths: &[f64]) -> Result<Self> {
        if sizes.is_empty() || sizes.len() > 3 || sizes.len() != half_widths.len() {
            return Err(Error::Grid(format!(
                "need 1..=3 axes with matching extents, got {} sizes and {} extents",
                sizes.len(),
                half_widths.len()
            )));
        }
        for &n in sizes {
            if n < 8 || !n.is_power_of_two() {
                return Err(Error::Grid(format!("axis size {n} must be a power of two >= 8")));
            }
        }
        for &l in half_widths {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::Grid(format!("half width {l} must be positive")));
            }
        }
        Ok(CartesianGrid { sizes: sizes.to_vec(), half_widths: half_widths.to_vec() })
    }

    /// Cube grid: `dim` axes of `n` points spanning [−l, l) each.
    pub fn cube(dim: usize, n: usize, l: f64) -> Result<Self> {
        Self::new(&vec![n; dim], &vec![l; dim])
    }

    pub fn dim(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn half_widths(&self) -> &[f64] {
        &self.half_widths
    }

    pub fn len(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        2.0 * self.half_widths[axis] / self.sizes[axis] as f64
    }

    /// Volume element h_0·…·h_{d−1}.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).product()
    }

    pub fn coordinate(&self, axis: usize, index: usize) -> f64 {
        -self.half_widths[axis] + (index as f64 + 0.5) * self.spacing(axis)
    }

    /// Writes the position of the row-major flat index into `out`.
    pub fn position(&self, flat: usize, out: &mut [f64]) {
        let mut rem = flat;
        for axis in (0..self.dim()).rev() {
            let n = self.sizes[axis];
            out[axis] = self.coordinate(axis, rem % n);
            rem /= n;
        }
    }

    pub fn radius(&self, flat: usize) -> f64 {
        let mut x = [0.0; 3];
        self.position(flat, &mut x[..self.dim()]);
        x[..self.dim()].iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Writes the frequency vector of the row-major flat spectral index.
    pub fn frequency_vector(&self, flat: usize, out: &mut [f64]) {
        let mut rem = flat;
        for axis in (0..self.dim()).rev() {
            let n = self.sizes[axis];
            out[axis] = crate::fft::frequency(rem % n, n, self.half_widths[axis]);
            rem /= n;
        }
    }

    /// Same grid with all extents multiplied by `factor` (exact scaling).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let hw: Vec<f64> = self.half_widths.iter().map(|l| l * factor).collect();
        Self::new(&self.sizes, &hw)
    }
}

/// Radial grid for spherically symmetric fields in ℝ^N.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialGrid {
    n_dim: u32,
    m: usize,
    dr: f64,
}

impl RadialGrid {
    pub fn new(n_dim: u32, m: usize, r_max: f64) -> Result<Self> {
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(Error::Grid(format!("r_max {r_max} must be positive")));
        }
        Self::with_dr(n_dim, m, r_max / m as f64)
    }

    pub fn with_dr(n_dim: u32, m: usize, dr: f64) -> Result<Self> {
        if n_dim < 1 {
            return Err(Error::Grid("radial dimension must be >= 1".into()));
        }
        if m < 5 {
            return Err(Error::Grid(format!("need at least 5 radial nodes, got {m}")));
        }
        if !(dr.is_finite() && dr > 0.0) {
            return Err(Error::Grid(format!("dr {dr} must be positive")));
        }
        Ok(RadialGrid { n_dim, m, dr })
    }

    pub fn n_dim(&self) -> u32 {
        self.n_dim
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dr(&self) -> f64 {
        self.dr
    }

    pub fn r_max(&self) -> f64 {
        self.dr * self.m as f64
    }

    pub fn radius(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dr
    }

    /// Quadrature weight ω_N r_j^{N−1} dr of node j.
    pub fn weight(&self, j: usize) -> f64 {
        unit_sphere_area(self.n_dim) * self.radius(j).powi(self.n_dim as i32 - 1) * self.dr
    }

    /// Same grid with dr multiplied by `factor` (exact scaling).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::with_dr(self.n_dim, self.m, self.dr * factor)
    }
}

/// Either grid kind.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Grid {
    Cartesian(CartesianGrid),
    Radial(RadialGrid),
}

impl Grid {
    pub fn len(&self) -> usize {
        match self {
            Grid::Cartesian(g) => g.len(),
            Grid::Radial(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Physical space dimension N.
    pub fn n_dim(&self) -> u32 {
        match self {
            Grid::Cartesian(g) => g.dim() as u32,
            Grid::Radial(g) => g.n_dim(),
        }
    }

    /// Distance from the origin of sample `j`; strictly positive by the
    /// half-cell offset.
    pub fn radius(&self, j: usize) -> f64 {
        match self {
            Grid::Cartesian(g) => g.radius(j),
            Grid::Radial(g) => g.radius(j),
        }
    }

    /// Quadrature weight of sample `j`.
    pub fn weight(&self, j: usize) -> f64 {
        match self {
            Grid::Cartesian(g) => g.cell_volume(),
            Grid::Radial(g) => g.weight(j),
        }
    }

    /// Physical extent: min half-width (Cartesian) or r_max (radial).
    pub fn extent(&self) -> f64 {
        match self {
            Grid::Cartesian(g) => g.half_widths().iter().cloned().fold(f64::INFINITY, f64::min),
            Grid::Radial(g) => g.r_max(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Result<Grid> {
        Ok(match self {
            Grid::Cartesian(g) => Grid::Cartesian(g.scaled(factor)?),
            Grid::Radial(g) => Grid::Radial(g.scaled(factor)?),
        })
    }
}

/// A complex scalar field sampled on a grid. Values are immutable after
/// construction; the spectral representation (FFT coefficients on Cartesian
/// grids, eigenbasis coefficients on radial grids) is cached on first use.
#[derive(Debug, Clone)]
pub struct Field {
    grid: Arc<Grid>,
    values: Vec<C64>,
    spectral: OnceLock<Arc<Vec<C64>>>,
}

impl Field {
    pub fn new(grid: Arc<Grid>, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Grid(format!(
                "value count {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(Field { grid, values, spectral: OnceLock::new() })
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.len();
        Field { grid, values: vec![C64::new(0.0, 0.0); n], spectral: OnceLock::new() }
    }

    /// Samples a function of position (Cartesian) or radius (radial).
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(&[f64]) -> C64) -> Self {
        let values: Vec<C64> = match grid.as_ref() {
            Grid::Cartesian(g) => {
                let mut x = [0.0; 3];
                (0..g.len())
                    .map(|j| {
                        g.position(j, &mut x[..g.dim()]);
                        f(&x[..g.dim()])
                    })
                    .collect()
            }
            Grid::Radial(g) => (0..g.len()).map(|j| f(&[g.radius(j)])).collect(),
        };
        Field { grid, values, spectral: OnceLock::new() }
    }

    /// A·exp(−|x|²/w²).
    pub fn gaussian(grid: Arc<Grid>, width: f64, amplitude: f64) -> Self {
        let g2 = width * width;
        let n = grid.len();
        let values: Vec<C64> = (0..n)
            .map(|j| {
                let r = grid.radius(j);
                C64::new(amplitude * (-r * r / g2).exp(), 0.0)
            })
            .collect();
        Field { grid, values, spectral: OnceLock::new() }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// New field on the same grid with pointwise-mapped values.
    pub fn map(&self, f: impl Fn(C64) -> C64) -> Field {
        Field {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            spectral: OnceLock::new(),
        }
    }

    pub fn scaled(&self, factor: C64) -> Field {
        self.map(|v| v * factor)
    }

    /// Same values reinterpreted on a grid whose extents are multiplied by
    /// `factor`; realizes u(x/factor) exactly without interpolation.
    pub fn on_scaled_grid(&self, factor: f64) -> Result<Field> {
        let grid = Arc::new(self.grid.scaled(factor)?);
        Field::new(grid, self.values.clone())
    }

    /// Forward spectral representation, cached. Cartesian: unnormalized DFT.
    /// Radial: coefficients in the discrete radial Laplacian eigenbasis.
    pub fn spectral(&self) -> Arc<Vec<C64>> {
        self.spectral
            .get_or_init(|| match self.grid.as_ref() {
                Grid::Cartesian(g) => Arc::new(crate::fft::forward(g.sizes(), &self.values)),
                Grid::Radial(g) => {
                    let spec = crate::radial::spectral(g);
                    Arc::new(spec.to_coeffs(&self.values))
                }
            })
            .clone()
    }

    /// Fraction of the quadrature mass ∫|u|² lying beyond `frac`·extent.
    pub fn tail_fraction(&self, frac: f64) -> f64 {
        let cutoff = frac * self.grid.extent();
        let mut total = 0.0;
        let mut tail = 0.0;
        for (j, v) in self.values.iter().enumerate() {
            let contrib = v.norm_sqr() * self.grid.weight(j);
            total += contrib;
            if self.grid.radius(j) > cutoff {
                tail += contrib;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            tail / total
        }
    }

    /// Number of sign changes of the real part along the radial profile
    /// (radial grids only; ignores magnitudes below `floor`).
    pub fn sign_changes(&self, floor: f64) -> usize {
        let mut count = 0;
        let mut last = 0.0f64;
        for v in &self.values {
            let re = v.re;
            if re.abs() <= floor {
                continue;
            }
            if last != 0.0 && re.signum() != last.signum() {
                count += 1;
            }
            last = re;
        }
        count
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}
