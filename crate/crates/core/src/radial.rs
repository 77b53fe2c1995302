//! Discrete radial Laplacian Δ_r f = f″ + (N−1)/r·f′, its dense symmetric
//! eigendecomposition, and banded solves.
//!
//! Nodes sit at r_j = (j+1/2)dr. Two stencils are used, both exactly
//! self-adjoint under the quadrature inner product Σ f̄ g ω_N r_j^{N−1} dr:
//!
//! * N = 3: the reduction Δ_r f = (rf)″/r maps the operator onto the plain
//!   three-point second difference acting on v = rf, with odd reflection
//!   across r = 0 (v(−r) = −v(r) since f is even) and a zero ghost value
//!   beyond r_max. This is uniformly second-order accurate pointwise, all
//!   the way to the first node.
//!
//! * other N: the conservative flux form with face areas a_j = ((j+1)dr)^{N−1}
//!   and node volumes w_j = r_j^{N−1},
//!
//!     (Lf)_j = [a_j(f_{j+1} − f_j) − a_{j−1}(f_j − f_{j−1})] / (w_j dr²),
//!
//!   where the vanishing inner flux realizes even reflection at the origin.
//!   Its truncation error behaves like dr²/r² near r = 0, so eigenvalues and
//!   quadratic forms converge at second order while pointwise values of Δ²f
//!   at the first few nodes do not; quantitative pointwise work is done in
//!   dimension 3 where the reduction above applies.
//!
//! Both forms symmetrize to a tridiagonal matrix under C = diag(√(ω_N w_j dr)),
//! so one dense eigendecomposition per grid supplies fractional powers,
//! biharmonic propagators, and Ḣ^s norms through exact Parseval identities.

use num_complex::Complex64 as C64;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::grid::{unit_sphere_area, RadialGrid};

/// Largest node count for which the dense eigendecomposition is attempted.
pub const MAX_EIGEN_NODES: usize = 4096;

/// The discrete radial Laplacian on one grid, stored as a general
/// tridiagonal action (Lf)_j = lower_j f_{j−1} + diag_j f_j + upper_j f_{j+1}.
#[derive(Debug, Clone)]
pub struct RadialOp {
    m: usize,
    n_dim: u32,
    inv_dr2: f64,
    lower: Vec<f64>, // lower[0] unused
    diag: Vec<f64>,
    upper: Vec<f64>, // upper[m−1] unused (zero ghost)
    node: Vec<f64>,  // quadrature volumes w_j = r_j^{N−1}
}

impl RadialOp {
    pub fn new(grid: &RadialGrid) -> Self {
        let m = grid.len();
        let dr = grid.dr();
        let inv_dr2 = 1.0 / (dr * dr);
        let pow = grid.n_dim() as i32 - 1;
        let node: Vec<f64> = (0..m).map(|j| grid.radius(j).powi(pow)).collect();
        let mut lower = vec![0.0; m];
        let mut diag = vec![0.0; m];
        let mut upper = vec![0.0; m];
        if grid.n_dim() == 3 {
            // (rf)″/r on v = rf: plain second difference with odd reflection
            for j in 0..m {
                let r = grid.radius(j);
                if j > 0 {
                    lower[j] = grid.radius(j - 1) / r * inv_dr2;
                }
                diag[j] = if j == 0 { -3.0 * inv_dr2 } else { -2.0 * inv_dr2 };
                if j + 1 < m {
                    upper[j] = grid.radius(j + 1) / r * inv_dr2;
                }
            }
        } else {
            let face = |j: isize| -> f64 {
                if j < 0 {
                    0.0
                } else {
                    ((j as f64 + 1.0) * dr).powi(pow)
                }
            };
            for j in 0..m {
                let a_up = face(j as isize);
                let a_dn = face(j as isize - 1);
                if j > 0 {
                    lower[j] = a_dn * inv_dr2 / node[j];
                }
                diag[j] = -(a_up + a_dn) * inv_dr2 / node[j];
                if j + 1 < m {
                    upper[j] = a_up * inv_dr2 / node[j];
                }
            }
            // Dirichlet ghost: the last row keeps its outward coupling in the
            // diagonal, matching a zero value beyond r_max
        }
        RadialOp { m, n_dim: grid.n_dim(), inv_dr2, lower, diag, upper, node }
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// out = Δ_r f (complex values).
    pub fn apply(&self, f: &[C64], out: &mut [C64]) {
        let m = self.m;
        for j in 0..m {
            let mut acc = f[j] * self.diag[j];
            if j > 0 {
                acc += f[j - 1] * self.lower[j];
            }
            if j + 1 < m {
                acc += f[j + 1] * self.upper[j];
            }
            out[j] = acc;
        }
    }

    /// out = Δ_r f (real values).
    pub fn apply_real(&self, f: &[f64], out: &mut [f64]) {
        let m = self.m;
        for j in 0..m {
            let mut acc = f[j] * self.diag[j];
            if j > 0 {
                acc += f[j - 1] * self.lower[j];
            }
            if j + 1 < m {
                acc += f[j + 1] * self.upper[j];
            }
            out[j] = acc;
        }
    }

    /// Tridiagonal of the symmetrized operator S = C Δ_r C^{−1},
    /// C = diag(√w_j): returns (diagonal, superdiagonal).
    ///
    /// Both stencils satisfy w_j upper_j = w_{j+1} lower_{j+1}, so the
    /// similarity-transformed off-diagonal is the geometric mean of the two
    /// couplings. In three dimensions the string form makes that mean
    /// exactly 1/dr² (the radius ratios cancel), and it is written down
    /// directly instead of through the square root: the symmetrized
    /// operator is then a plain integer stencil times one stored scalar,
    /// which lets the split evaluation below certify residuals at machine
    /// level rather than at the ε/dr⁴ coefficient-noise floor.
    pub fn sym_tridiag(&self) -> (Vec<f64>, Vec<f64>) {
        let m = self.m;
        let d = self.diag.clone();
        let mut e = vec![0.0; m - 1];
        if self.n_dim == 3 {
            for v in e.iter_mut() {
                *v = self.inv_dr2;
            }
        } else {
            for j in 0..m - 1 {
                e[j] = (self.upper[j] * self.lower[j + 1]).sqrt();
            }
        }
        (d, e)
    }

    /// Pentadiagonal bands of S², S as in `sym_tridiag`: (main, first,
    /// second superdiagonal); the matrix is symmetric.
    pub fn squared_sym_bands(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let (d, e) = self.sym_tridiag();
        let m = d.len();
        let mut b0 = vec![0.0; m];
        let mut b1 = vec![0.0; m.saturating_sub(1)];
        let mut b2 = vec![0.0; m.saturating_sub(2)];
        for j in 0..m {
            let el = if j > 0 { e[j - 1] } else { 0.0 };
            let er = if j + 1 < m { e[j] } else { 0.0 };
            b0[j] = d[j] * d[j] + el * el + er * er;
        }
        for j in 0..m - 1 {
            b1[j] = e[j] * (d[j] + d[j + 1]);
        }
        for j in 0..m - 2 {
            b2[j] = e[j] * e[j + 1];
        }
        (b0, b1, b2)
    }
}

/// Implicit-QL eigensolver for a symmetric tridiagonal matrix.
/// Returns eigenvalues (ascending) and orthonormal eigenvectors as
/// column-major columns of an n×n matrix.
pub fn symmetric_tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    assert_eq!(off.len() + 1, n);
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    // column-major accumulator, starts as the identity
    let mut z = vec![0.0f64; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 64 {
                return Err(Error::Numerical("tridiagonal QL failed to converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                // rotate eigenvector columns i and i+1
                let (lo, hi) = z.split_at_mut((i + 1) * n);
                let col_i = &mut lo[i * n..(i + 1) * n];
                let col_ip = &mut hi[..n];
                for k in 0..n {
                    let fk = col_ip[k];
                    col_ip[k] = s * col_i[k] + c * fk;
                    col_i[k] = c * col_i[k] - s * fk;
                }
                if i == l {
                    break;
                }
            }
            if r == 0.0 {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    // sort ascending, permuting columns
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap());
    let lam: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut vecs = vec![0.0f64; n * n];
    for (new, &old) in order.iter().enumerate() {
        vecs[new * n..(new + 1) * n].copy_from_slice(&z[old * n..(old + 1) * n]);
    }
    Ok((lam, vecs))
}

/// Eigendecomposition of the discrete radial Laplacian on one grid, with
/// the isometry c_j = √(ω_N w_j dr) between field values and coefficients.
/// Parseval holds exactly: Σ|a_i|² = Σ|u_j|² ω_N w_j dr.
#[derive(Debug)]
pub struct RadialSpectral {
    m: usize,
    pub lam: Vec<f64>,  // eigenvalues of Δ_r, all strictly negative, ascending
    vecs: Vec<f64>,     // column-major orthonormal eigenvectors (symmetrized coords)
    c: Vec<f64>,        // isometry weights
}

impl RadialSpectral {
    fn build(grid: &RadialGrid) -> Result<Self> {
        let m = grid.len();
        if m > MAX_EIGEN_NODES {
            return Err(Error::Grid(format!(
                "radial spectral decomposition capped at {MAX_EIGEN_NODES} nodes, got {m}"
            )));
        }
        let op = RadialOp::new(grid);
        let (d, e) = op.sym_tridiag();
        let (lam, vecs) = symmetric_tridiagonal_eigen(&d, &e)?;
        if lam.iter().any(|&l| l >= 0.0) {
            return Err(Error::Numerical("radial Laplacian spectrum not negative".into()));
        }
        let omega = unit_sphere_area(grid.n_dim());
        let c: Vec<f64> = (0..m).map(|j| (omega * op.node[j] * grid.dr()).sqrt()).collect();
        Ok(RadialSpectral { m, lam, vecs, c })
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coefficients a_i = ⟨v_i, C u⟩ in the eigenbasis.
    pub fn to_coeffs(&self, values: &[C64]) -> Vec<C64> {
        let m = self.m;
        let weighted: Vec<C64> = (0..m).map(|j| values[j] * self.c[j]).collect();
        let mut out = vec![C64::new(0.0, 0.0); m];
        for (i, o) in out.iter_mut().enumerate() {
            let col = &self.vecs[i * m..(i + 1) * m];
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..m {
                acc += weighted[j] * col[j];
            }
            *o = acc;
        }
        out
    }

    /// Values u_j = (Σ_i a_i v_i)_j / c_j.
    pub fn from_coeffs(&self, coeffs: &[C64]) -> Vec<C64> {
        let m = self.m;
        let mut acc = vec![C64::new(0.0, 0.0); m];
        for i in 0..m {
            let a = coeffs[i];
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            let col = &self.vecs[i * m..(i + 1) * m];
            for j in 0..m {
                acc[j] += a * col[j];
            }
        }
        for j in 0..m {
            acc[j] /= self.c[j];
        }
        acc
    }

    /// Applies the spectral function φ(λ) of the radial Laplacian.
    pub fn apply_function(&self, values: &[C64], phi: impl Fn(f64) -> C64) -> Vec<C64> {
        let mut a = self.to_coeffs(values);
        for (i, ai) in a.iter_mut().enumerate() {
            *ai *= phi(self.lam[i]);
        }
        self.from_coeffs(&a)
    }
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, f64::mul_add(a, b, -p))
}

/// The symmetrized radial Laplacian S = C Δ_r C^{−1} with compensated
/// (split) evaluation: every value is carried as an unevaluated sum
/// hi + lo of two doubles.
///
/// Motivation: the row sums of Δ² cancel from terms of size ‖f‖/dr⁴ down to
/// an O(‖Δ²f‖) result, so a plain double evaluation carries an absolute
/// error ~ ε‖f‖/dr⁴ that no algebraic rearrangement can remove. That floor
/// grows quickly under grid refinement (1e-7 relative at dr ≈ 6e-3) and
/// otherwise caps every residual-based convergence certificate. Tracking
/// the product and summation errors exactly removes the floor: results are
/// exact with respect to the stored stencil, which is the defining form of
/// the discrete operator used by both the solver and the evaluations here.
#[derive(Debug, Clone)]
pub struct SymSplitOp {
    d: Vec<f64>,
    e: Vec<f64>,
    c: Vec<f64>,
}

impl SymSplitOp {
    pub fn new(grid: &RadialGrid) -> Self {
        let op = RadialOp::new(grid);
        let (d, e) = op.sym_tridiag();
        let omega = unit_sphere_area(grid.n_dim());
        let c: Vec<f64> =
            (0..op.m).map(|j| (omega * op.node[j] * grid.dr()).sqrt()).collect();
        SymSplitOp { d, e, c }
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    /// out = S x for split input and output.
    pub fn apply_split(
        &self,
        x_hi: &[f64],
        x_lo: &[f64],
        out_hi: &mut [f64],
        out_lo: &mut [f64],
    ) {
        let m = self.d.len();
        for j in 0..m {
            let (mut s, mut err) = two_prod(self.d[j], x_hi[j]);
            err += self.d[j] * x_lo[j];
            if j > 0 {
                let (p, pe) = two_prod(self.e[j - 1], x_hi[j - 1]);
                let (s2, se) = two_sum(s, p);
                s = s2;
                err += pe + se + self.e[j - 1] * x_lo[j - 1];
            }
            if j + 1 < m {
                let (p, pe) = two_prod(self.e[j], x_hi[j + 1]);
                let (s2, se) = two_sum(s, p);
                s = s2;
                err += pe + se + self.e[j] * x_lo[j + 1];
            }
            let (hi, lo) = two_sum(s, err);
            out_hi[j] = hi;
            out_lo[j] = lo;
        }
    }

    /// Δ²f = C^{−1} S² C f in split form, for a plain double field f.
    pub fn bilaplacian_split(&self, f: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let m = self.d.len();
        let mut u_hi = vec![0.0; m];
        let mut u_lo = vec![0.0; m];
        for j in 0..m {
            let (hi, lo) = two_prod(self.c[j], f[j]);
            u_hi[j] = hi;
            u_lo[j] = lo;
        }
        let mut w_hi = vec![0.0; m];
        let mut w_lo = vec![0.0; m];
        self.apply_split(&u_hi, &u_lo, &mut w_hi, &mut w_lo);
        self.apply_split(&w_hi, &w_lo, &mut u_hi, &mut u_lo);
        for j in 0..m {
            let q = u_hi[j] / self.c[j];
            let rem = f64::mul_add(q, -self.c[j], u_hi[j]);
            u_hi[j] = q;
            u_lo[j] = (rem + u_lo[j]) / self.c[j];
        }
        (u_hi, u_lo)
    }
}

/// Banded Cholesky factorization of S² + κI for the symmetrized radial
/// Laplacian S; solves (Δ_r² + κ)f = g in O(M).
#[derive(Debug, Clone)]
pub struct BiharmonicSolve {
    l0: Vec<f64>,
    m1: Vec<f64>,
    m2: Vec<f64>,
    sym: SymSplitOp,
}

impl BiharmonicSolve {
    pub fn new(grid: &RadialGrid, kappa: f64) -> Result<Self> {
        Self::from_sym(SymSplitOp::new(grid), kappa)
    }

    /// Factorization reusing an existing symmetrized stencil, so the solve
    /// and any external residual evaluation agree on the same stored
    /// operator.
    pub fn from_sym(sym: SymSplitOp, kappa: f64) -> Result<Self> {
        assert!(kappa > 0.0, "shift must be positive for definiteness");
        let (d, e) = (&sym.d, &sym.e);
        let m = d.len();
        let mut b0 = vec![0.0; m];
        let mut b1 = vec![0.0; m.saturating_sub(1)];
        let mut b2 = vec![0.0; m.saturating_sub(2)];
        for j in 0..m {
            let el = if j > 0 { e[j - 1] } else { 0.0 };
            let er = if j + 1 < m { e[j] } else { 0.0 };
            b0[j] = d[j] * d[j] + el * el + er * er + kappa;
        }
        for j in 0..m.saturating_sub(1) {
            b1[j] = e[j] * (d[j] + d[j + 1]);
        }
        for j in 0..m.saturating_sub(2) {
            b2[j] = e[j] * e[j + 1];
        }
        let mut l0 = vec![0.0; m];
        let mut m1 = vec![0.0; m];
        let mut m2 = vec![0.0; m];
        for i in 0..m {
            if i >= 2 {
                m2[i] = b2[i - 2] / l0[i - 2];
            }
            if i >= 1 {
                m1[i] = (b1[i - 1] - if i >= 2 { m2[i] * m1[i - 1] } else { 0.0 }) / l0[i - 1];
            }
            let sq = b0[i] - m1[i] * m1[i] - m2[i] * m2[i];
            if sq <= 0.0 {
                return Err(Error::Numerical("banded Cholesky lost definiteness".into()));
            }
            l0[i] = sq.sqrt();
        }
        Ok(BiharmonicSolve { l0, m1, m2, sym })
    }

    // forward/backward substitution in the symmetrized coordinates
    fn solve_sym(&self, b: &[f64]) -> Vec<f64> {
        let m = self.l0.len();
        let mut y = b.to_vec();
        for i in 0..m {
            let mut v = y[i];
            if i >= 1 {
                v -= y[i - 1] * self.m1[i];
            }
            if i >= 2 {
                v -= y[i - 2] * self.m2[i];
            }
            y[i] = v / self.l0[i];
        }
        for i in (0..m).rev() {
            let mut v = y[i];
            if i + 1 < m {
                v -= y[i + 1] * self.m1[i + 1];
            }
            if i + 2 < m {
                v -= y[i + 2] * self.m2[i + 2];
            }
            y[i] = v / self.l0[i];
        }
        y
    }

    /// Solves (Δ_r² + κ) f = rhs.
    pub fn solve(&self, rhs: &[C64]) -> Vec<C64> {
        let m = self.l0.len();
        let c = &self.sym.c;
        let re: Vec<f64> = (0..m).map(|j| rhs[j].re * c[j]).collect();
        let im: Vec<f64> = (0..m).map(|j| rhs[j].im * c[j]).collect();
        let yr = self.solve_sym(&re);
        let yi = self.solve_sym(&im);
        (0..m).map(|j| C64::new(yr[j] / c[j], yi[j] / c[j])).collect()
    }

    /// Solves for a real right-hand side.
    pub fn solve_real(&self, rhs: &[f64]) -> Vec<f64> {
        let m = self.l0.len();
        let c = &self.sym.c;
        let b: Vec<f64> = (0..m).map(|j| rhs[j] * c[j]).collect();
        let y = self.solve_sym(&b);
        (0..m).map(|j| y[j] / c[j]).collect()
    }

    /// Solve with iterative refinement against the split evaluation of
    /// S² + κ. The Cholesky substitution alone leaves a backward error
    /// ~ ε‖S²‖ ≈ 16ε/dr⁴, which dominates the residual of any fixed point
    /// computed through this solve on fine grids. Each refinement pass
    /// contracts the residual by roughly ε·cond(S²+κ), so a few passes
    /// bring it to the order of the data rounding; iteration stops when the
    /// contraction stalls.
    /// The split stencil this factorization was built from.
    pub fn sym(&self) -> &SymSplitOp {
        &self.sym
    }
}

#[derive(PartialEq, Eq, Hash, Clone)]
struct GridKey {
    m: usize,
    n_dim: u32,
    dr_bits: u64,
}

/// Cached eigendecomposition per (M, N, dr); computed once per process.
pub fn spectral(grid: &RadialGrid) -> Arc<RadialSpectral> {
    static CACHE: OnceLock<Mutex<HashMap<GridKey, Arc<RadialSpectral>>>> = OnceLock::new();
    let key = GridKey { m: grid.len(), n_dim: grid.n_dim(), dr_bits: grid.dr().to_bits() };
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&key) {
        return hit.clone();
    }
    let built = Arc::new(RadialSpectral::build(grid).expect("radial eigendecomposition"));
    cache.lock().unwrap().entry(key).or_insert(built).clone()
}
