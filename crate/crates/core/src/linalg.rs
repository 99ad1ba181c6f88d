//! Dense LU factorization with partial pivoting for the small moment systems.
//!
//! The systems never exceed 84 unknowns (n = 3, k = 6), so a textbook O(n^3)
//! factorization is entirely adequate.

use crate::error::{Error, Result};

/// Row-major square matrix.
#[derive(Debug, Clone)]
pub(crate) struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.n + c] = v;
    }

    /// Max row sum norm.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|r| (0..self.n).map(|c| self.get(r, c).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

pub(crate) struct LuFactors {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

/// Factor A = P L U with partial pivoting.
pub(crate) fn lu_factor(a: &Matrix) -> Result<LuFactors> {
    let n = a.n;
    let mut lu = a.data.clone();
    let mut perm: Vec<usize> = (0..n).collect();

    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_val = lu[col * n + col].abs();
        for r in (col + 1)..n {
            let v = lu[r * n + col].abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = r;
            }
        }
        if pivot_val == 0.0 {
            return Err(Error::SingularSystem { cond: f64::INFINITY });
        }
        if pivot_row != col {
            for c in 0..n {
                lu.swap(col * n + c, pivot_row * n + c);
            }
            perm.swap(col, pivot_row);
        }
        let pivot = lu[col * n + col];
        for r in (col + 1)..n {
            let factor = lu[r * n + col] / pivot;
            lu[r * n + col] = factor;
            for c in (col + 1)..n {
                lu[r * n + c] -= factor * lu[col * n + c];
            }
        }
    }
    Ok(LuFactors { n, lu, perm })
}

impl LuFactors {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        // forward substitution (unit lower triangle)
        for r in 1..n {
            for c in 0..r {
                x[r] -= self.lu[r * n + c] * x[c];
            }
        }
        // back substitution
        for r in (0..n).rev() {
            for c in (r + 1)..n {
                x[r] -= self.lu[r * n + c] * x[c];
            }
            x[r] /= self.lu[r * n + r];
        }
        x
    }
}

/// Solve A x = b, rejecting systems whose infinity-norm condition number
/// exceeds `cond_limit`. The inverse norm comes from solving for the
/// identity columns, which is exact enough at these sizes.
pub(crate) fn solve_checked(a: &Matrix, b: &[f64], cond_limit: f64) -> Result<Vec<f64>> {
    let factors = lu_factor(a)?;
    let n = a.n;
    let mut inv_norm: f64 = 0.0;
    let mut col = vec![0.0; n];
    let mut row_sums = vec![0.0; n];
    for j in 0..n {
        col[j] = 1.0;
        let x = factors.solve(&col);
        col[j] = 0.0;
        for (r, v) in x.iter().enumerate() {
            row_sums[r] += v.abs();
        }
    }
    for &s in &row_sums {
        inv_norm = inv_norm.max(s);
    }
    let cond = a.norm_inf() * inv_norm;
    if !cond.is_finite() || cond > cond_limit {
        return Err(Error::SingularSystem { cond });
    }
    Ok(factors.solve(b))
}
