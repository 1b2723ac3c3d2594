//! Uniform radial grid and the finite-difference stencils used on it.


#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::FlowError;

/// Uniform grid on `[r_min, r_c]` with `n` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    r_min: f64,
    r_c: f64,
    n: usize,
    h: f64,
}

impl RadialGrid {
    pub fn new(r_min: f64, r_c: f64, n: usize) -> Result<Self, FlowError> {
        if n < 5 {
            return Err(FlowError::InvalidGrid("at least five nodes are required"));
        }
        if !(r_min.is_finite() && r_c.is_finite()) || r_min >= r_c {
            return Err(FlowError::InvalidGrid("need r_min < r_c"));
        }
        let h = (r_c - r_min) / (n - 1) as f64;
        Ok(Self { r_min, r_c, n, h })
    }

    /// Grid anchored at the throat, `r ∈ [1, r_c]`.
    pub fn throat(r_c: f64, n: usize) -> Result<Self, FlowError> {
        Self::new(1.0, r_c, n)
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_c(&self) -> f64 {
        self.r_c
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    /// Coordinate of node `i`. Computed from the index, never accumulated.
    #[inline]
    pub fn r(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.r_c
        } else {
            self.r_min + i as f64 * self.h
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.r(i))
    }

    /// First derivative at node `i`: centred in the interior, four-point
    /// third-order one-sided at either end.
    #[inline]
    pub fn d1(&self, u: &[f64], i: usize) -> f64 {
        let n = self.n;
        if i == 0 {
            (-11.0 * u[0] + 18.0 * u[1] - 9.0 * u[2] + 2.0 * u[3]) / (6.0 * self.h)
        } else if i == n - 1 {
            (11.0 * u[n - 1] - 18.0 * u[n - 2] + 9.0 * u[n - 3] - 2.0 * u[n - 4]) / (6.0 * self.h)
        } else {
            (u[i + 1] - u[i - 1]) / (2.0 * self.h)
        }
    }

    /// Second derivative at node `i`: centred in the interior, five-point
    /// third-order one-sided at either end.
    #[inline]
    pub fn d2(&self, u: &[f64], i: usize) -> f64 {
        let n = self.n;
        let h2 = self.h * self.h;
        if i == 0 {
            (35.0 * u[0] - 104.0 * u[1] + 114.0 * u[2] - 56.0 * u[3] + 11.0 * u[4]) / (12.0 * h2)
        } else if i == n - 1 {
            (35.0 * u[n - 1] - 104.0 * u[n - 2] + 114.0 * u[n - 3] - 56.0 * u[n - 4] + 11.0 * u[n - 5]) / (12.0 * h2)
        } else {
            (u[i + 1] - 2.0 * u[i] + u[i - 1]) / h2
        }
    }

    /// Index of the first node of the outer window covering `fraction` of the
    /// interval.
    pub fn outer_window_start(&self, fraction: f64) -> usize {
        let r_start = self.r_c - fraction * (self.r_c - self.r_min);
        let k = ((r_start - self.r_min) / self.h).ceil() as usize;
        k.min(self.n - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn rejects_degenerate_grids() {
        assert!(RadialGrid::new(1.0, 10.0, 4).is_err());
        assert!(RadialGrid::new(2.0, 1.0, 11).is_err());
        assert!(RadialGrid::new(1.0, 1.0, 11).is_err());
    }

    #[test]
    fn nodes_have_no_drift() {
        let g = RadialGrid::throat(10.0, 2001).unwrap();
        assert_eq!(g.r(0), 1.0);
        assert_eq!(g.r(2000), 10.0);
        for i in 0..2001 {
            let exact = 1.0 + 9.0 * (i as f64) / 2000.0;
            assert!((g.r(i) - exact).abs() <= 4.0 * f64::EPSILON * exact);
        }
    }

    #[test]
    fn stencils_are_second_order() {
        // Error on u = sin r should drop by ~4 when h halves, at every node kind.
        let err = |n: usize| {
            let g = RadialGrid::new(1.0, 2.0, n).unwrap();
            let u: Vec<f64> = g.nodes().map(|r| r.sin()).collect();
            let mut e1 = 0.0f64;
            let mut e2 = 0.0f64;
            for i in 0..n {
                let r = g.r(i);
                e1 = e1.max((g.d1(&u, i) - r.cos()).abs());
                e2 = e2.max((g.d2(&u, i) + r.sin()).abs());
            }
            (e1, e2)
        };
        let (a1, a2) = err(41);
        let (b1, b2) = err(81);
        assert!((a1 / b1).log2() > 1.8);
        assert!((a2 / b2).log2() > 1.8);
    }

    #[test]
    fn outer_window() {
        let g = RadialGrid::new(0.0, 100.0, 101).unwrap();
        assert_eq!(g.outer_window_start(0.1), 90);
    }
}
