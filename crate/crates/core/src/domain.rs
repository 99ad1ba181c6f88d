//! Axis-aligned boxes: domains, compact subsets and sampling grids.

use crate::error::{Error, Result};

/// An axis-aligned box in R^n; open when used as a domain Omega, closed when
/// used as a compact subset.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                left: lo.len(),
                right: hi.len(),
            });
        }
        if lo.iter().zip(hi.iter()).any(|(a, b)| a >= b) {
            return Err(Error::InvalidInput("degenerate box".into()));
        }
        Ok(BoxDomain { lo, hi })
    }

    /// The symmetric cube (-half, half)^n.
    pub fn centered(n: usize, half: f64) -> Self {
        BoxDomain {
            lo: vec![-half; n],
            hi: vec![half; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter()
            .zip(self.lo.iter().zip(self.hi.iter()))
            .all(|(x, (a, b))| a <= x && x <= b)
    }

    /// Whether the closed ball B_r(center) lies inside the box.
    pub fn contains_ball(&self, center: &[f64], r: f64) -> bool {
        center
            .iter()
            .zip(self.lo.iter().zip(self.hi.iter()))
            .all(|(x, (a, b))| x - r >= *a && x + r <= *b)
    }

    /// The box shrunk by `margin` on every side.
    pub fn shrink(&self, margin: f64) -> Result<Self> {
        BoxDomain::new(
            self.lo.iter().map(|a| a + margin).collect(),
            self.hi.iter().map(|b| b - margin).collect(),
        )
    }

    /// Uniform grid with `per_axis` points per axis, endpoints included.
    pub fn grid(&self, per_axis: usize) -> Vec<Vec<f64>> {
        assert!(per_axis >= 2);
        let n = self.dim();
        let axes: Vec<Vec<f64>> = (0..n)
            .map(|i| linspace(self.lo[i], self.hi[i], per_axis))
            .collect();
        let mut out = Vec::with_capacity(per_axis.pow(n as u32));
        let mut idx = vec![0usize; n];
        loop {
            out.push((0..n).map(|i| axes[i][idx[i]]).collect());
            let mut axis = 0;
            loop {
                idx[axis] += 1;
                if idx[axis] < per_axis {
                    break;
                }
                idx[axis] = 0;
                axis += 1;
                if axis == n {
                    return out;
                }
            }
        }
    }
}

/// `count` evenly spaced values from a to b inclusive.
pub fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2);
    let step = (b - a) / (count - 1) as f64;
    (0..count).map(|i| a + step * i as f64).collect()
}

/// Euclidean norm.
pub fn norm(p: &[f64]) -> f64 {
    p.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Euclidean distance.
pub fn dist(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}
