//! Banded matrices and LU factorisation with partial pivoting.

use alloc::vec;
use alloc::vec::Vec;

use crate::FlowError;

/// Square matrix with `kl` sub- and `ku` super-diagonals.
///
/// Row `i` stores columns `i - kl ..= i + ku + kl`; the extra `kl`
/// super-diagonals hold fill-in produced by row interchanges.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let kl = kl.min(n.saturating_sub(1));
        let ku = ku.min(n.saturating_sub(1));
        let width = 2 * kl + ku + 1;
        Self { n, kl, ku, width, data: vec![0.0; n * width] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lower(&self) -> usize {
        self.kl
    }

    pub fn upper(&self) -> usize {
        self.ku
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.ku + self.kl);
        i * self.width + (j + self.kl - i)
    }

    /// Whether `(i, j)` lies inside the declared band.
    #[inline]
    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && j + self.kl >= i && j <= i + self.ku
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j + self.kl < i || j > i + self.ku + self.kl {
            0.0
        } else {
            self.data[self.idx(i, j)]
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    pub fn fill_zero(&mut self) {
        self.data.iter_mut().for_each(|x| *x = 0.0);
    }

    /// `self ← scale·self + shift·I`.
    pub fn scale_shift(&mut self, scale: f64, shift: f64) {
        self.data.iter_mut().for_each(|x| *x *= scale);
        for i in 0..self.n {
            let k = self.idx(i, i);
            self.data[k] += shift;
        }
    }

    /// `self ← scale·src + shift·I`, reusing this matrix's storage.
    pub fn assign_scaled_shifted(&mut self, src: &BandMatrix, scale: f64, shift: f64) {
        assert!(self.n == src.n && self.kl == src.kl && self.ku == src.ku, "band shapes differ");
        for (d, s) in self.data.iter_mut().zip(&src.data) {
            *d = scale * s;
        }
        for i in 0..self.n {
            let k = self.idx(i, i);
            self.data[k] += shift;
        }
    }

    /// `y = A x` (band entries only).
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku + self.kl).min(self.n - 1);
            y[i] = (lo..=hi).map(|j| self.get(i, j) * x[j]).sum();
        }
    }

    /// Factorises in place; the matrix then holds `L` and `U`.
    pub fn factor(mut self) -> Result<BandLu, FlowError> {
        let n = self.n;
        let (kl, ku) = (self.kl, self.ku);
        let mut piv = vec![0usize; n];
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = self.data[self.idx(k, k)].abs();
            for i in k + 1..=last_row {
                let v = self.data[self.idx(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !(best > 0.0) || !best.is_finite() {
                return Err(FlowError::Singular);
            }
            piv[k] = p;
            let last_col = (k + ku + kl).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    let (a, b) = (self.idx(k, j), self.idx(p, j));
                    self.data.swap(a, b);
                }
            }
            let pivot = self.data[self.idx(k, k)];
            let len = last_col - k;
            // Start of row k's entries right of the diagonal.
            let k_row = self.idx(k, k) + 1;
            for i in k + 1..=last_row {
                let ik = self.idx(i, k);
                let l = self.data[ik] / pivot;
                self.data[ik] = l;
                if l != 0.0 {
                    // Row i's entries for columns k+1.. follow ik contiguously.
                    let (head, tail) = self.data.split_at_mut(ik + 1);
                    let src = &head[k_row..k_row + len];
                    for (d, s) in tail[..len].iter_mut().zip(src) {
                        *d -= l * s;
                    }
                }
            }
        }
        Ok(BandLu { m: self, piv })
    }
}

/// LU factors of a [`BandMatrix`].
#[derive(Debug, Clone)]
pub struct BandLu {
    m: BandMatrix,
    piv: Vec<usize>,
}

impl BandLu {
    /// Gives back the storage for reuse.
    pub fn into_matrix(self) -> BandMatrix {
        self.m
    }

    /// Solves `A x = b` in place.
    pub fn solve(&self, b: &mut [f64]) {
        let m = &self.m;
        let n = m.n;
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            if bk != 0.0 {
                for i in k + 1..=(k + m.kl).min(n - 1) {
                    b[i] -= m.data[m.idx(i, k)] * bk;
                }
            }
        }
        for i in (0..n).rev() {
            let hi = (i + m.ku + m.kl).min(n - 1);
            let d = m.idx(i, i);
            let row = &m.data[d + 1..d + 1 + (hi - i)];
            let acc = b[i] - row.iter().zip(&b[i + 1..=hi]).map(|(u, x)| u * x).sum::<f64>();
            b[i] = acc / m.data[d];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
    }

    #[test]
    fn solves_random_banded_systems() {
        let mut seed = 7u64;
        for &(n, kl, ku) in &[(1, 0, 0), (6, 1, 1), (40, 3, 3), (25, 24, 1), (30, 2, 5)] {
            let mut a = BandMatrix::zeros(n, kl, ku);
            for i in 0..n {
                for j in 0..n {
                    if a.in_band(i, j) {
                        // Small diagonal so pivoting is exercised.
                        let d = if i == j { 0.05 } else { 0.0 };
                        a.set(i, j, lcg(&mut seed) + d);
                    }
                }
            }
            let x: Vec<f64> = (0..n).map(|i| 1.0 + i as f64 * 0.1).collect();
            let mut b = vec![0.0; n];
            a.mul_vec(&x, &mut b);
            let lu = a.clone().factor().unwrap();
            lu.solve(&mut b);
            for i in 0..n {
                assert!((b[i] - x[i]).abs() < 1e-8, "n={n} kl={kl} ku={ku} i={i}");
            }
        }
    }

    #[test]
    fn singular_detected() {
        let a = BandMatrix::zeros(4, 1, 1);
        assert!(matches!(a.factor(), Err(FlowError::Singular)));
    }
}
