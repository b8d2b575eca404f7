//! Probability vectors on the simplex, their tangent vectors, and the
//! information (Fisher) metric `G_ij = alpha / (2 P^i) delta_ij`.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{resolvable_tolerance, Real};

/// Tolerance for sum-to-one and sum-to-zero checks.
pub fn tol_norm<T: Real>() -> T {
    resolvable_tolerance(1e-12)
}

/// Components at or below this value count as lying on the boundary.
pub fn tol_boundary<T: Real>() -> T {
    resolvable_tolerance(1e-12)
}

/// Positive action-like scale multiplying the information metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alpha<T>(T);

impl<T: Real> Alpha<T> {
    pub fn new(alpha: T) -> Result<Self> {
        if alpha > T::zero() && alpha.is_finite() {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidAlpha(alpha.as_f64()))
        }
    }

    #[inline]
    pub fn value(self) -> T {
        self.0
    }
}

/// A point `P = (P^1, ..., P^n)` of the simplex `S_{n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector<T> {
    p: Vec<T>,
}

impl<T: Real> ProbabilityVector<T> {
    pub fn new(p: Vec<T>) -> Result<Self> {
        Self::with_tolerance(p, tol_norm())
    }

    pub fn with_tolerance(p: Vec<T>, tol: T) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidProbability("empty vector".into()));
        }
        if let Some((i, v)) = p
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v >= T::zero()) || !v.is_finite())
        {
            return Err(Error::InvalidProbability(format!(
                "component {i} = {v} is negative or not finite"
            )));
        }
        let sum: T = p.iter().copied().sum();
        if (sum - T::one()).abs() > tol {
            return Err(Error::InvalidProbability(format!("components sum to {sum}, not 1")));
        }
        Ok(Self { p })
    }

    /// Normalizes non-negative weights onto the simplex.
    pub fn from_weights(w: &[T]) -> Result<Self> {
        let total: T = w.iter().copied().sum();
        if !(total > T::zero()) || !total.is_finite() {
            return Err(Error::InvalidProbability(
                "weights must have a positive finite sum".into(),
            ));
        }
        Self::new(w.iter().map(|&x| x / total).collect())
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform distribution needs n >= 1");
        Self {
            p: vec![T::one() / T::from_count(n); n],
        }
    }

    /// Wraps components produced by an integrator; only finiteness is assumed.
    pub(crate) fn from_flow(p: Vec<T>) -> Self {
        Self { p }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.p.len()
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.p
    }

    pub fn into_vec(self) -> Vec<T> {
        self.p
    }

    /// Fails with `DegenerateProbability` on the first component `<= tol_boundary`.
    pub fn ensure_interior(&self) -> Result<()> {
        let tol = tol_boundary::<T>();
        match self.p.iter().enumerate().find(|(_, &v)| v <= tol) {
            Some((index, &v)) => Err(Error::DegenerateProbability {
                index,
                value: v.as_f64(),
            }),
            None => Ok(()),
        }
    }

    pub fn total(&self) -> T {
        self.p.iter().copied().sum()
    }

    pub(crate) fn same_point(&self, other: &Self) -> bool {
        self.dim() == other.dim()
            && self
                .p
                .iter()
                .zip(&other.p)
                .all(|(&a, &b)| (a - b).abs() <= tol_norm::<T>())
    }
}

/// A displacement tangent to the simplex at `base` (components sum to zero).
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector<T> {
    v: Vec<T>,
    base: ProbabilityVector<T>,
}

impl<T: Real> TangentVector<T> {
    pub fn new(v: Vec<T>, base: ProbabilityVector<T>) -> Result<Self> {
        if v.len() != base.dim() {
            return Err(Error::DimensionMismatch {
                expected: base.dim(),
                found: v.len(),
            });
        }
        let sum: T = v.iter().copied().sum();
        let scale = v.iter().fold(T::one(), |m, x| m.max(x.abs()));
        if sum.abs() > tol_norm::<T>() * scale {
            return Err(Error::NotTangent { sum: sum.as_f64() });
        }
        Ok(Self { v, base })
    }

    pub fn zero(base: ProbabilityVector<T>) -> Self {
        Self {
            v: vec![T::zero(); base.dim()],
            base,
        }
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.v
    }

    #[inline]
    pub fn base(&self) -> &ProbabilityVector<T> {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }
}

/// Diagonal entries `alpha / (2 P^i)` of the information metric.
pub fn metric_diagonal<T: Real>(p: &ProbabilityVector<T>, alpha: Alpha<T>) -> Result<Vec<T>> {
    p.ensure_interior()?;
    let two = T::lit(2.0);
    Ok(p.as_slice().iter().map(|&pi| alpha.value() / (two * pi)).collect())
}

/// The information metric as an `n x n` diagonal matrix.
pub fn information_metric<T: Real>(p: &ProbabilityVector<T>, alpha: Alpha<T>) -> Result<Matrix<T>> {
    Ok(Matrix::from_diagonal(&metric_diagonal(p, alpha)?))
}

/// `<a, b> = sum_i alpha a^i b^i / (2 P^i)`.
pub fn inner_product<T: Real>(
    a: &TangentVector<T>,
    b: &TangentVector<T>,
    p: &ProbabilityVector<T>,
    alpha: Alpha<T>,
) -> Result<T> {
    if !a.base.same_point(p) || !b.base.same_point(p) {
        return Err(Error::BaseMismatch);
    }
    let g = metric_diagonal(p, alpha)?;
    Ok(g.iter()
        .zip(a.as_slice().iter().zip(b.as_slice()))
        .map(|(&gi, (&ai, &bi))| gi * ai * bi)
        .sum())
}

/// Squared statistical line element `ds^2 = G_ij dP^i dP^j`.
pub fn line_element_sq<T: Real>(p: &ProbabilityVector<T>, dp: &TangentVector<T>, alpha: Alpha<T>) -> Result<T> {
    inner_product(dp, dp, p, alpha)
}
