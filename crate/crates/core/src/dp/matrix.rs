use std::cmp::Ordering;

use crate::weight::{LogWeight, Weight};

/// Square matrix over the max-times semiring.
#[derive(Clone, Debug, PartialEq)]
pub struct MaxPlusMatrix<W> {
    n: usize,
    data: Vec<W>,
}

/// `m[i][j]` is the best product of kernel terms over a segment for paths
/// entering at state `i` and leaving at state `j`.
pub type SegmentMaxMatrix<W> = MaxPlusMatrix<W>;

impl<W: Weight> MaxPlusMatrix<W> {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![W::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = W::one();
        }
        MaxPlusMatrix { n, data }
    }

    pub fn from_row_major(n: usize, data: Vec<W>) -> Self {
        assert_eq!(data.len(), n * n, "matrix data has wrong length");
        MaxPlusMatrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &W {
        &self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[W] {
        &self.data
    }

    /// `(self ⊗ rhs)[i][j] = max_k self[i][k] · rhs[k][j]`
    pub fn mul(&self, rhs: &Self) -> Self {
        let n = self.n;
        debug_assert_eq!(n, rhs.n);
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut best = W::zero();
                for k in 0..n {
                    let a = self.get(i, k);
                    if a.is_zero() {
                        continue;
                    }
                    let v = a.times(rhs.get(k, j));
                    if v.exact_cmp(&best) == Ordering::Greater {
                        best = v;
                    }
                }
                data.push(best);
            }
        }
        MaxPlusMatrix { n, data }
    }

    /// Row vector product `out[j] = max_i v[i] · self[i][j]`.
    pub fn left_apply(&self, v: &[W]) -> Vec<W> {
        (0..self.n)
            .map(|j| {
                let mut best = W::zero();
                for (i, vi) in v.iter().enumerate() {
                    if vi.is_zero() {
                        continue;
                    }
                    let x = vi.times(self.get(i, j));
                    if x.exact_cmp(&best) == Ordering::Greater {
                        best = x;
                    }
                }
                best
            })
            .collect()
    }

    /// Pairs `(i, j)` with a non-zero entry, in row-major order.
    pub fn support(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| (0..self.n).map(move |j| (i, j)))
            .filter(|&(i, j)| !self.get(i, j).is_zero())
            .collect()
    }

    pub fn ln_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j).ln()).collect()).collect()
    }

    /// Largest entrywise difference of natural logs (0 where both are zero,
    /// infinite where exactly one is).
    pub fn max_ln_gap(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| match (a.is_zero(), b.is_zero()) {
                (true, true) => 0.0,
                (false, false) => (a.ln() - b.ln()).abs(),
                _ => f64::INFINITY,
            })
            .fold(0.0, f64::max)
    }
}

impl MaxPlusMatrix<LogWeight> {
    pub fn from_ln_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        MaxPlusMatrix::from_row_major(n, rows.iter().flatten().map(|&v| LogWeight::new(v)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_neutral() {
        let m = MaxPlusMatrix::from_ln_rows(&[vec![-1.0, -2.0], vec![f64::NEG_INFINITY, -0.5]]);
        let id = MaxPlusMatrix::identity(2);
        assert_eq!(m.mul(&id), m);
        assert_eq!(id.mul(&m), m);
        assert_eq!(m.support(), vec![(0, 0), (0, 1), (1, 1)]);
    }

    #[test]
    fn product_takes_best_intermediate() {
        let a = MaxPlusMatrix::from_ln_rows(&[vec![-1.0, -3.0], vec![-2.0, -1.0]]);
        let p = a.mul(&a);
        assert_eq!(p.get(0, 1).value(), -4.0);
        assert_eq!(p.get(1, 0).value(), -3.0);
    }
}
