//! Multi-indices for partial derivatives and monomials.

use std::fmt;

/// A multi-index alpha in N_0^n.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(components: Vec<u32>) -> Self {
        MultiIndex(components)
    }

    /// The zero multi-index in dimension n.
    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// The unit multi-index e_axis in dimension n.
    pub fn unit(n: usize, axis: usize) -> Self {
        Self::along_axis(n, axis, 1)
    }

    /// `count` derivatives along a single axis in dimension n.
    pub fn along_axis(n: usize, axis: usize, count: u32) -> Self {
        let mut c = vec![0; n];
        c[axis] = count;
        MultiIndex(c)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// |alpha| = sum of components.
    pub fn order(&self) -> usize {
        self.0.iter().map(|&c| c as usize).sum()
    }

    pub fn components(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Expands the multi-index into a flat list of axes, one entry per
    /// derivative application, e.g. (2,1) -> [0, 0, 1].
    pub fn axes(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.order());
        for (axis, &count) in self.0.iter().enumerate() {
            for _ in 0..count {
                out.push(axis);
            }
        }
        out
    }

    /// Component-wise sum.
    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.dim(), other.dim());
        MultiIndex(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// The monomial y^alpha.
    pub fn monomial(&self, y: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(y.iter())
            .map(|(&a, &yi)| yi.powi(a as i32))
            .product()
    }

    /// All multi-indices in dimension n with total order <= max_order,
    /// in graded lexicographic order (order 0 first).
    pub fn all_up_to(n: usize, max_order: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for order in 0..=max_order {
            let mut current = vec![0u32; n];
            fill(&mut out, &mut current, 0, order);
        }
        out
    }
}

fn fill(out: &mut Vec<MultiIndex>, current: &mut Vec<u32>, axis: usize, remaining: usize) {
    if axis + 1 == current.len() {
        current[axis] = remaining as u32;
        out.push(MultiIndex(current.clone()));
        return;
    }
    for take in 0..=remaining {
        current[axis] = take as u32;
        fill(out, current, axis + 1, remaining - take);
    }
    current[axis] = 0;
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl From<&[u32]> for MultiIndex {
    fn from(c: &[u32]) -> Self {
        MultiIndex(c.to_vec())
    }
}

/// Derivative slots for a two-point kernel: alpha acts on the base (or
/// diagonal) slot, beta on the integration slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiIndexPair {
    pub alpha: MultiIndex,
    pub beta: MultiIndex,
}

impl MultiIndexPair {
    pub fn new(alpha: MultiIndex, beta: MultiIndex) -> Self {
        debug_assert_eq!(alpha.dim(), beta.dim());
        MultiIndexPair { alpha, beta }
    }

    pub fn order(&self) -> usize {
        self.alpha.order() + self.beta.order()
    }
}
