//! Dense LU factorization with partial pivoting, sized for the moderate
//! systems the ground-state Newton solvers assemble (a few thousand
//! unknowns). Row-major storage; the elimination loop updates whole rows so
//! it stays contiguous.

use crate::error::{Error, Result};

pub struct DenseLu {
    m: usize,
    /// packed L (below diagonal, unit) and U (diagonal and above)
    lu: Vec<f64>,
    pivots: Vec<usize>,
}

impl DenseLu {
    /// Factors the row-major m-by-m matrix in place.
    pub fn factor(mut a: Vec<f64>, m: usize) -> Result<Self> {
        if a.len() != m * m {
            return Err(Error::Numerical("matrix storage does not match size".into()));
        }
        let mut pivots = vec![0usize; m];
        for k in 0..m {
            let mut piv = k;
            let mut best = a[k * m + k].abs();
            for i in k + 1..m {
                let v = a[i * m + k].abs();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if !(best > 0.0) || !best.is_finite() {
                return Err(Error::Numerical(format!("singular pivot at column {k}")));
            }
            pivots[k] = piv;
            if piv != k {
                for j in 0..m {
                    a.swap(k * m + j, piv * m + j);
                }
            }
            let inv = 1.0 / a[k * m + k];
            for i in k + 1..m {
                let l = a[i * m + k] * inv;
                a[i * m + k] = l;
                if l != 0.0 {
                    let (head, tail) = a.split_at_mut(i * m);
                    let row_k = &head[k * m + k + 1..k * m + m];
                    let row_i = &mut tail[k + 1..m];
                    for (ri, rk) in row_i.iter_mut().zip(row_k.iter()) {
                        *ri -= l * rk;
                    }
                }
            }
        }
        Ok(DenseLu { m, lu: a, pivots })
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut x = rhs.to_vec();
        // The stored L rows are fully permuted, so every interchange must be
        // applied to the right-hand side before elimination begins.
        for k in 0..m {
            x.swap(k, self.pivots[k]);
        }
        for k in 0..m {
            let xk = x[k];
            if xk != 0.0 {
                for i in k + 1..m {
                    x[i] -= self.lu[i * m + k] * xk;
                }
            }
        }
        for k in (0..m).rev() {
            let mut s = x[k];
            for j in k + 1..m {
                s -= self.lu[k * m + j] * x[j];
            }
            x[k] = s / self.lu[k * m + k];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // deterministic congruential fill, good enough to exercise pivoting
    fn pseudo(seed: &mut u64) -> f64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
    }

    #[test]
    fn factor_and_solve_recover_known_solution() {
        // No diagonal boost: a plain random matrix forces genuine row
        // interchanges, so the permutation bookkeeping is exercised too.
        let m = 60;
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut a = vec![0.0; m * m];
        for v in a.iter_mut() {
            *v = pseudo(&mut seed);
        }
        let x_true: Vec<f64> = (0..m).map(|i| ((i as f64) * 0.37).sin()).collect();
        let b: Vec<f64> = (0..m)
            .map(|i| (0..m).map(|j| a[i * m + j] * x_true[j]).sum())
            .collect();
        let lu = DenseLu::factor(a, m).unwrap();
        let x = lu.solve(&b);
        let err = x
            .iter()
            .zip(x_true.iter())
            .map(|(u, v)| (u - v).abs())
            .fold(0.0f64, f64::max);
        assert!(err < 1e-10, "max error {err}");
    }

    #[test]
    fn solve_is_exact_for_badly_scaled_bordered_system() {
        // A stiff diagonal block bordered by O(1) rows and a zero corner,
        // the shape produced by constrained Newton systems. Partial pivoting
        // must keep the solve residual at rounding level.
        let m = 40;
        let n = m + 2;
        let mut seed = 0x2545f4914f6cdd1du64;
        let mut a = vec![0.0; n * n];
        for i in 0..m {
            a[i * n + i] = 1e6 * (1.0 + pseudo(&mut seed).abs());
            for j in 0..m {
                if i != j {
                    a[i * n + j] = pseudo(&mut seed);
                }
            }
            let u = pseudo(&mut seed);
            let v = pseudo(&mut seed);
            a[i * n + m] = u;
            a[i * n + m + 1] = v;
            a[m * n + i] = u;
            a[(m + 1) * n + i] = v;
        }
        let x_true: Vec<f64> = (0..n).map(|i| ((i as f64) * 0.61).cos()).collect();
        let b: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| a[i * n + j] * x_true[j]).sum())
            .collect();
        let lu = DenseLu::factor(a.clone(), n).unwrap();
        let x = lu.solve(&b);
        let mut res = 0.0f64;
        for i in 0..n {
            let dot: f64 = (0..n).map(|j| a[i * n + j] * x[j]).sum();
            res = res.max((dot - b[i]).abs());
        }
        let scale = b.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        assert!(res <= 1e-12 * scale, "solve residual {res:.3e} vs scale {scale:.3e}");
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        // leading entry zero forces a row swap immediately
        let a = vec![0.0, 1.0, 1.0, 1.0];
        let lu = DenseLu::factor(a, 2).unwrap();
        let x = lu.solve(&[2.0, 3.0]);
        // x0 + x1 = 3, x1 = 2
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = vec![1.0, 2.0, 2.0, 4.0];
        assert!(DenseLu::factor(a, 2).is_err());
    }
}
