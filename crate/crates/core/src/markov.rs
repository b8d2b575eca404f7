//! Congruent embeddings by Markov mappings `S_{m-1} -> S_{n-1}`.
//!
//! A map is a partition `{A_1, ..., A_m}` of the target indices together with
//! an `m x n` row-stochastic matrix `q` whose row `a` is supported exactly on
//! `A_a`. Embedding is `P~^b = sum_a P^a q_ab`; coarse-graining sums each cell.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;
use crate::simplex::{inner_product, tol_norm, Alpha, ProbabilityVector, TangentVector};

#[derive(Debug, Clone, PartialEq)]
pub struct MarkovMap<T> {
    partition: Vec<Vec<usize>>,
    q: Matrix<T>,
}

impl<T: Real> MarkovMap<T> {
    /// Validates a partition of `0..n` and the matching weight matrix.
    ///
    /// Zero weights inside a cell are rejected rather than shrinking the cell.
    pub fn new(partition: Vec<Vec<usize>>, q: Matrix<T>) -> Result<Self> {
        let m = partition.len();
        let n = q.cols();
        if m == 0 {
            return Err(Error::InvalidMarkovMap("empty partition".into()));
        }
        if q.rows() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: q.rows(),
            });
        }
        if m > n {
            return Err(Error::InvalidMarkovMap(format!(
                "source dimension {m} exceeds target dimension {n}"
            )));
        }
        let mut owner = vec![None; n];
        for (a, cell) in partition.iter().enumerate() {
            if cell.is_empty() {
                return Err(Error::InvalidMarkovMap(format!("cell {a} is empty")));
            }
            for &b in cell {
                if b >= n {
                    return Err(Error::InvalidMarkovMap(format!("cell {a} refers to index {b} >= {n}")));
                }
                if let Some(prev) = owner[b].replace(a) {
                    return Err(Error::InvalidMarkovMap(format!(
                        "index {b} appears in cells {prev} and {a}"
                    )));
                }
            }
        }
        if let Some(b) = owner.iter().position(Option::is_none) {
            return Err(Error::InvalidMarkovMap(format!("index {b} is not covered")));
        }
        for a in 0..m {
            let mut sum = T::zero();
            for b in 0..n {
                let w = q[(a, b)];
                let inside = owner[b] == Some(a);
                if inside && !(w > T::zero()) {
                    return Err(Error::InvalidMarkovMap(format!(
                        "q[{a}][{b}] = {w} must be positive inside cell {a}"
                    )));
                }
                if !inside && w != T::zero() {
                    return Err(Error::InvalidMarkovMap(format!(
                        "q[{a}][{b}] = {w} must vanish outside cell {a}"
                    )));
                }
                sum += w;
            }
            if (sum - T::one()).abs() > tol_norm::<T>() {
                return Err(Error::InvalidMarkovMap(format!("row {a} sums to {sum}, not 1")));
            }
        }
        Ok(Self { partition, q })
    }

    /// Reads the partition off the support of `q`.
    pub fn from_weights(q: Matrix<T>) -> Result<Self> {
        let partition = (0..q.rows())
            .map(|a| (0..q.cols()).filter(|&b| q[(a, b)] != T::zero()).collect())
            .collect();
        Self::new(partition, q)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            partition: (0..n).map(|i| vec![i]).collect(),
            q: Matrix::identity(n),
        }
    }

    /// Permutation sending source component `a` to target slot `targets[a]`.
    pub fn permutation(targets: &[usize]) -> Result<Self> {
        let n = targets.len();
        let q = Matrix::from_fn(n, n, |a, b| if targets[a] == b { T::one() } else { T::zero() });
        Self::new(targets.iter().map(|&b| vec![b]).collect(), q)
    }

    /// Source dimension `m`.
    pub fn source_dim(&self) -> usize {
        self.partition.len()
    }

    /// Target dimension `n`.
    pub fn target_dim(&self) -> usize {
        self.q.cols()
    }

    pub fn partition(&self) -> &[Vec<usize>] {
        &self.partition
    }

    pub fn weights(&self) -> &Matrix<T> {
        &self.q
    }

    fn push(&self, x: &[T]) -> Vec<T> {
        (0..self.target_dim())
            .map(|b| (0..self.source_dim()).map(|a| x[a] * self.q[(a, b)]).sum())
            .collect()
    }

    fn check_source(&self, found: usize) -> Result<()> {
        if found != self.source_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.source_dim(),
                found,
            });
        }
        Ok(())
    }

    /// `P~^b = sum_a P^a q_ab`.
    pub fn embed(&self, p: &ProbabilityVector<T>) -> Result<ProbabilityVector<T>> {
        self.check_source(p.dim())?;
        ProbabilityVector::new(self.push(p.as_slice()))
    }

    /// `P^a = sum_{b in A_a} P~^b`; left inverse of [`embed`](Self::embed).
    pub fn coarse_grain(&self, p_tilde: &ProbabilityVector<T>) -> Result<ProbabilityVector<T>> {
        if p_tilde.dim() != self.target_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.target_dim(),
                found: p_tilde.dim(),
            });
        }
        let pt = p_tilde.as_slice();
        ProbabilityVector::new(
            self.partition
                .iter()
                .map(|cell| cell.iter().map(|&b| pt[b]).sum())
                .collect(),
        )
    }

    /// Pushes a tangent vector forward; the result is based at the embedded point.
    pub fn pushforward(&self, v: &TangentVector<T>) -> Result<TangentVector<T>> {
        self.check_source(v.dim())?;
        let base = self.embed(v.base())?;
        TangentVector::new(self.push(v.as_slice()), base)
    }

    /// `second ∘ self`: first embed with `self`, then with `second`.
    pub fn compose(&self, second: &MarkovMap<T>) -> Result<MarkovMap<T>> {
        if self.target_dim() != second.source_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.target_dim(),
                found: second.source_dim(),
            });
        }
        let q = &self.q * &second.q;
        let partition = self
            .partition
            .iter()
            .map(|cell| {
                let mut merged: Vec<usize> = cell.iter().flat_map(|&b| second.partition[b].iter().copied()).collect();
                merged.sort_unstable();
                merged
            })
            .collect();
        MarkovMap::new(partition, q).map_err(|e| Error::InvalidComposition(e.to_string()))
    }
}

/// The `n = m + 1` map splitting component `split_index` into
/// `(k P^j, (1 - k) P^j)`, with the new component placed right after it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitMap<T> {
    m: usize,
    k: T,
    split_index: usize,
}

impl<T: Real> SplitMap<T> {
    pub fn new(m: usize, k: T, split_index: usize) -> Result<Self> {
        if !(k > T::zero() && k < T::one()) {
            return Err(Error::InvalidSplit(k.as_f64()));
        }
        if split_index >= m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: split_index + 1,
            });
        }
        Ok(Self { m, k, split_index })
    }

    /// Splits the last component.
    pub fn last(m: usize, k: T) -> Result<Self> {
        Self::new(m, k, m.saturating_sub(1))
    }

    pub fn source_dim(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> T {
        self.k
    }

    pub fn split_index(&self) -> usize {
        self.split_index
    }

    pub fn to_markov_map(&self) -> MarkovMap<T> {
        let (m, j) = (self.m, self.split_index);
        let mut q = Matrix::zeros(m, m + 1);
        let mut partition = Vec::with_capacity(m);
        for a in 0..m {
            match a.cmp(&j) {
                std::cmp::Ordering::Less => {
                    q[(a, a)] = T::one();
                    partition.push(vec![a]);
                }
                std::cmp::Ordering::Equal => {
                    q[(a, a)] = self.k;
                    q[(a, a + 1)] = T::one() - self.k;
                    partition.push(vec![a, a + 1]);
                }
                std::cmp::Ordering::Greater => {
                    q[(a, a + 1)] = T::one();
                    partition.push(vec![a + 1]);
                }
            }
        }
        MarkovMap { partition, q }
    }
}

impl<T: Real> From<SplitMap<T>> for MarkovMap<T> {
    fn from(s: SplitMap<T>) -> Self {
        s.to_markov_map()
    }
}

/// Metric used when measuring how well a map preserves inner products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SimplexMetric<T> {
    Information(Alpha<T>),
    /// Euclidean `diag(1, ..., 1)`; serves as a negative control.
    Flat,
}

impl<T: Real> SimplexMetric<T> {
    pub fn inner(&self, a: &TangentVector<T>, b: &TangentVector<T>) -> Result<T> {
        match *self {
            SimplexMetric::Information(alpha) => inner_product(a, b, a.base(), alpha),
            SimplexMetric::Flat => Ok(a.as_slice().iter().zip(b.as_slice()).map(|(&x, &y)| x * y).sum()),
        }
    }
}

/// `|<f_* a, f_* b>_{f(P)} - <a, b>_P|` for the chosen metric.
pub fn preservation_residual<T: Real>(
    map: &MarkovMap<T>,
    metric: SimplexMetric<T>,
    a: &TangentVector<T>,
    b: &TangentVector<T>,
) -> Result<T> {
    let before = metric.inner(a, b)?;
    let after = metric.inner(&map.pushforward(a)?, &map.pushforward(b)?)?;
    Ok((after - before).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pv(p: &[f64]) -> ProbabilityVector<f64> {
        ProbabilityVector::new(p.to_vec()).unwrap()
    }

    fn close(a: &ProbabilityVector<f64>, b: &[f64]) {
        assert_eq!(a.dim(), b.len());
        for (x, y) in a.as_slice().iter().zip(b) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-15);
        }
    }

    #[test]
    fn split_embeds() {
        let p = pv(&[0.3, 0.7]);
        let half = SplitMap::last(2, 0.5).unwrap().to_markov_map();
        close(&half.embed(&p).unwrap(), &[0.3, 0.35, 0.35]);
        let quarter = SplitMap::last(2, 0.25).unwrap().to_markov_map();
        close(&quarter.embed(&p).unwrap(), &[0.3, 0.175, 0.525]);
    }

    #[test]
    fn split_in_the_middle() {
        let p = pv(&[0.2, 0.5, 0.3]);
        let map = SplitMap::new(3, 0.4, 1).unwrap().to_markov_map();
        close(&map.embed(&p).unwrap(), &[0.2, 0.2, 0.3, 0.3]);
        assert_eq!(map.partition(), &[vec![0], vec![1, 2], vec![3]]);
    }

    #[test]
    fn identity_and_permutation() {
        let p = pv(&[0.1, 0.2, 0.7]);
        close(&MarkovMap::identity(3).embed(&p).unwrap(), &[0.1, 0.2, 0.7]);
        let perm = MarkovMap::permutation(&[2, 0, 1]).unwrap();
        let moved = perm.embed(&p).unwrap();
        close(&moved, &[0.2, 0.7, 0.1]);
        close(&perm.coarse_grain(&moved).unwrap(), &[0.1, 0.2, 0.7]);
    }

    #[test]
    fn coarse_grain_sums_cells() {
        let map = SplitMap::last(2, 0.5).unwrap().to_markov_map();
        close(&map.coarse_grain(&pv(&[0.3, 0.35, 0.35])).unwrap(), &[0.3, 0.7]);
    }

    #[test]
    fn pushforward_examples() {
        let p = pv(&[0.3, 0.7]);
        let map = SplitMap::last(2, 0.5).unwrap().to_markov_map();
        let v = TangentVector::new(vec![1.0, -1.0], p.clone()).unwrap();
        let w = map.pushforward(&v).unwrap();
        assert_eq!(w.as_slice(), &[1.0, -0.5, -0.5]);
        let zero = map.pushforward(&TangentVector::zero(p.clone())).unwrap();
        assert!(zero.as_slice().iter().all(|&x| x == 0.0));

        let perm = MarkovMap::permutation(&[1, 0]).unwrap();
        assert_eq!(perm.pushforward(&v).unwrap().as_slice(), &[-1.0, 1.0]);
    }

    #[test]
    fn dimension_checks() {
        let map = SplitMap::last(2, 0.5).unwrap().to_markov_map();
        assert!(matches!(
            map.embed(&pv(&[0.2, 0.3, 0.5])),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            map.coarse_grain(&pv(&[0.5, 0.5])),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(map.compose(&map), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn rejects_invalid_maps() {
        // zero weight inside a cell
        let q = Matrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]);
        assert!(MarkovMap::new(vec![vec![0], vec![1, 2]], q).is_err());
        // overlapping cells
        let q = Matrix::from_rows(&[vec![0.5, 0.5], vec![0.0, 1.0]]);
        assert!(MarkovMap::new(vec![vec![0, 1], vec![1]], q).is_err());
        // rows not stochastic
        let q = Matrix::from_rows(&[vec![0.5, 0.0], vec![0.0, 1.0]]);
        assert!(MarkovMap::new(vec![vec![0], vec![1]], q).is_err());
        // m > n
        let q = Matrix::from_rows(&[vec![1.0], vec![1.0]]);
        assert!(MarkovMap::new(vec![vec![0], vec![0]], q).is_err());
        assert!(SplitMap::last(2, 1.0).is_err());
        assert!(SplitMap::last(2, 0.0).is_err());
    }

    #[test]
    fn from_weights_reads_partition() {
        let q = Matrix::from_rows(&[
            vec![0.0, 0.25, 0.0, 0.75],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
        ]);
        let map = MarkovMap::from_weights(q).unwrap();
        assert_eq!(map.partition(), &[vec![1, 3], vec![0], vec![2]]);
    }

    #[test]
    fn compose_with_identity() {
        let split: MarkovMap<f64> = SplitMap::last(3, 0.3).unwrap().into();
        assert_eq!(MarkovMap::identity(3).compose(&split).unwrap(), split);
        assert_eq!(split.compose(&MarkovMap::identity(4)).unwrap(), split);
    }

    #[test]
    fn compose_split_then_permutation() {
        let split: MarkovMap<f64> = SplitMap::last(2, 0.3).unwrap().into();
        let perm = MarkovMap::permutation(&[2, 0, 1]).unwrap();
        let both = split.compose(&perm).unwrap();
        assert_eq!(both.partition(), &[vec![2], vec![0, 1]]);
        let p = pv(&[0.4, 0.6]);
        let direct = perm.embed(&split.embed(&p).unwrap()).unwrap();
        close(&both.embed(&p).unwrap(), direct.as_slice());
    }

    #[test]
    fn information_metric_is_preserved_flat_is_not() {
        let p = pv(&[0.2, 0.3, 0.5]);
        let map: MarkovMap<f64> = SplitMap::last(3, 0.3).unwrap().into();
        let a = TangentVector::new(vec![0.1, 0.4, -0.5], p.clone()).unwrap();
        let b = TangentVector::new(vec![-0.3, 0.1, 0.2], p).unwrap();
        let alpha = Alpha::new(0.7).unwrap();
        let info = preservation_residual(&map, SimplexMetric::Information(alpha), &a, &b).unwrap();
        assert!(info < 1e-15);
        // flat residual is 2 k (1 - k) a_m b_m
        let flat = preservation_residual(&map, SimplexMetric::Flat, &a, &b).unwrap();
        assert_abs_diff_eq!(flat, 2.0 * 0.3 * 0.7 * 0.5 * 0.2, epsilon = 1e-15);
    }
}
