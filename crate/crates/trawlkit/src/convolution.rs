//! Matrix convolution for the slice-partition contraction: a direct
//! definition-level oracle and the fast antidiagonal implementation for the
//! ones-triangle filter.
//!
//! Both paths accumulate each window column bottom-up and add the column
//! sums left to right, so their floating-point results are bit-identical.

use crate::error::{Error, Result};
use crate::real::Real;
use crate::trawl::PlanMode;

/// Convolution of `y` (n x k matrix) with `f` (n x n filter), stride 1:
/// `out[l] = sum_{i,j} y[i][j+l] f[i][j]` over all full windows.
pub fn naive_convolution<T: Real>(y: &[Vec<T>], f: &[Vec<T>]) -> Result<Vec<T>> {
    let n = y.len();
    if n == 0 || f.len() != n {
        return Err(Error::invalid("convolution needs matching row counts"));
    }
    let k = y[0].len();
    let w = f[0].len();
    if y.iter().any(|r| r.len() != k) || f.iter().any(|r| r.len() != w) {
        return Err(Error::invalid("ragged matrix"));
    }
    if w > k {
        return Err(Error::invalid("filter wider than the matrix"));
    }
    let mut out = Vec::with_capacity(k - w + 1);
    for l in 0..=(k - w) {
        let mut acc = T::zero();
        for j in 0..w {
            let mut col = T::zero();
            for i in (0..n).rev() {
                col += y[i][j + l] * f[i][j];
            }
            acc += col;
        }
        out.push(acc);
    }
    Ok(out)
}

/// Simulated slice values `L(S_{ij})` arranged per the slice plan: `rows`
/// rows by k columns, with trailing zeros on row i beyond column
/// `k + 1 - i` in unbounded mode.
#[derive(Debug, Clone)]
pub struct SliceMatrix<T: Real> {
    pub mode: PlanMode,
    pub k: usize,
    pub values: Vec<Vec<T>>,
}

impl<T: Real> SliceMatrix<T> {
    pub fn rows(&self) -> usize {
        self.values.len()
    }

    /// Zero-padded matrix and ones-triangle filter realizing the same
    /// contraction through [`naive_convolution`].
    pub fn padded(&self) -> (Vec<Vec<T>>, Vec<Vec<T>>) {
        let rows = self.rows();
        let mut y = vec![vec![T::zero(); rows - 1 + self.k]; rows];
        for (i, row) in self.values.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                y[i][rows - 1 + j] = *v;
            }
        }
        let mut f = vec![vec![T::zero(); rows]; rows];
        for (i, row) in f.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                if i + j + 1 >= rows {
                    *v = T::one();
                }
            }
        }
        (y, f)
    }
}

/// Fast contraction `Y * F` for the ones-triangle filter: column cumulative
/// sums from the bottom, then antidiagonal sums. Output l is the trawl
/// value at time (l+1) tau.
pub fn fast_convolution<T: Real>(slices: &SliceMatrix<T>) -> Vec<T> {
    fast_convolution_counted(slices).0
}

/// As [`fast_convolution`], also returning the addition count of the
/// antidiagonal implementation: rows * k for the column sums plus
/// I(k - I) + I(I-1)/2 for the diagonals, which for I <= k totals
/// `2 I k - I^2/2 - I/2`.
pub fn fast_convolution_counted<T: Real>(slices: &SliceMatrix<T>) -> (Vec<T>, u64) {
    let rows = slices.rows();
    let k = slices.k;
    let mut ops: u64 = 0;

    // z[i][j] = sum_{i' >= i} y[i'][j], accumulated bottom-up
    let mut z = vec![vec![T::zero(); k]; rows];
    for j in 0..k {
        let mut acc = T::zero();
        for i in (0..rows).rev() {
            acc += slices.values[i][j];
            ops += 1;
            z[i][j] = acc;
        }
    }

    // x[l] = sum over the antidiagonal entries z[i][l - i], taken in
    // ascending column order; short diagonals (l + 1 <= rows) seed the
    // accumulator with their top entry, matching the published count.
    let mut x = vec![T::zero(); k];
    for l in 0..k {
        let i_hi = l.min(rows - 1);
        let mut acc;
        let mut i = i_hi;
        acc = z[i][l - i];
        if l + 1 > rows {
            ops += 1;
        }
        while i > 0 {
            i -= 1;
            acc += z[i][l - i];
            ops += 1;
        }
        x[l] = acc;
    }
    (x, ops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use rand::Rng;

    #[test]
    fn definition_example() {
        // ones 2x4 against [[0,1],[1,1]] -> [3,3,3]
        let y = vec![vec![1.0f64; 4], vec![1.0; 4]];
        let f = vec![vec![0.0, 1.0], vec![1.0, 1.0]];
        assert_eq!(naive_convolution(&y, &f).unwrap(), vec![3.0, 3.0, 3.0]);

        let zeros = vec![vec![0.0, 0.0], vec![0.0, 0.0]];
        assert_eq!(naive_convolution(&y, &zeros).unwrap(), vec![0.0, 0.0, 0.0]);

        // window equal to the filter: single entry, the masked sum
        let y1 = vec![vec![2.0, 4.0], vec![8.0, 16.0]];
        let f1 = vec![vec![0.0, 1.0], vec![1.0, 1.0]];
        assert_eq!(naive_convolution(&y1, &f1).unwrap(), vec![28.0]);
    }

    #[test]
    fn fast_matches_oracle_bitwise_on_random_instances() {
        let mut rng = RngStream::from_seed(77);
        for case in 0..100 {
            let rows = 1 + (rng.random::<u32>() as usize) % 6;
            let k = rows + (rng.random::<u32>() as usize) % 20;
            let mut values = Vec::new();
            for i in 0..rows {
                let mut row = vec![0.0f64; k];
                let len = k - i;
                for v in row.iter_mut().take(len) {
                    *v = rng.random::<f64>() * 4.0 - 2.0;
                }
                values.push(row);
            }
            let m = SliceMatrix {
                mode: PlanMode::Bounded,
                k,
                values,
            };
            let fast = fast_convolution(&m);
            let (y, f) = m.padded();
            let oracle = naive_convolution(&y, &f).unwrap();
            assert_eq!(fast.len(), oracle.len());
            for (a, b) in fast.iter().zip(&oracle) {
                assert_eq!(a.to_bits(), b.to_bits(), "case {case}");
            }
        }
    }

    #[test]
    fn single_nonzero_scatters_to_its_trawls() {
        // slice (i, m) (1-based) feeds trawls m .. m+i-1
        let (rows, k) = (3usize, 6usize);
        for i in 1..=rows {
            for m in 1..=k {
                let mut values = vec![vec![0.0f64; k]; rows];
                values[i - 1][m - 1] = 1.0;
                let m0 = SliceMatrix {
                    mode: PlanMode::Bounded,
                    k,
                    values,
                };
                let x = fast_convolution(&m0);
                for (l0, v) in x.iter().enumerate() {
                    let l = l0 + 1;
                    let expect = l >= m && l <= m + i - 1;
                    assert_eq!(*v != 0.0, expect, "i={i} m={m} l={l}");
                }
            }
        }
    }

    #[test]
    fn addition_count_matches_published_figure() {
        let mut rng = RngStream::from_seed(5);
        for (rows, k) in [(1usize, 7usize), (2, 9), (3, 3), (4, 21), (6, 40)] {
            let values = vec![
                (0..k).map(|_| rng.random::<f64>()).collect::<Vec<_>>();
                rows
            ];
            let m = SliceMatrix {
                mode: PlanMode::Bounded,
                k,
                values,
            };
            let (_, ops) = fast_convolution_counted(&m);
            let (i, kk) = (rows as i64, k as i64);
            // 2Ik - I^2/2 - I/2, kept in integer arithmetic
            let want = (4 * i * kk - i * i - i) / 2;
            assert_eq!(ops as i64, want, "I={i} k={kk}");
        }
    }
}
