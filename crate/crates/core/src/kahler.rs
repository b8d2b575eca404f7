//! Kähler structures `(Omega, g, J)` on the `(P, S)` phase space.
//!
//! Given the information metric `G` and a matrix `A` with `G A G^-1 = A^T`,
//!
//! ```text
//! g = [[G, A^T], [A, (1 + A^2) G^-1]]
//! J = [[A, (1 + A^2) G^-1], [-G, -G A G^-1]]
//! ```
//!
//! satisfy `Omega = g J`, `J^T g J = g` and `J J = -1` with the canonical
//! symplectic form.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::phase::{PhasePoint, SymplecticForm};
use crate::scalar::{resolvable_tolerance, Real};
use crate::simplex::{metric_diagonal, Alpha, ProbabilityVector};

/// Relative bound on `|G A G^-1 - A^T|`.
pub fn tol_compatibility<T: Real>() -> T {
    resolvable_tolerance(1e-12)
}

/// Blocks of the phase-space metric `g = [[G, E], [E^T, F]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricBlocks<T> {
    pub g: Matrix<T>,
    pub e: Matrix<T>,
    pub f: Matrix<T>,
}

impl<T: Real> MetricBlocks<T> {
    pub fn assemble(&self) -> Matrix<T> {
        Matrix::from_blocks(&self.g, &self.e, &self.e.transpose(), &self.f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KahlerStructure<T> {
    alpha: Alpha<T>,
    point: ProbabilityVector<T>,
    a: Matrix<T>,
    blocks: MetricBlocks<T>,
    omega: Matrix<T>,
    metric: Matrix<T>,
    complex_structure: Matrix<T>,
}

impl<T: Real> KahlerStructure<T> {
    pub fn dim(&self) -> usize {
        self.point.dim()
    }
    pub fn alpha(&self) -> Alpha<T> {
        self.alpha
    }
    pub fn point(&self) -> &ProbabilityVector<T> {
        &self.point
    }
    pub fn a_matrix(&self) -> &Matrix<T> {
        &self.a
    }
    pub fn blocks(&self) -> &MetricBlocks<T> {
        &self.blocks
    }
    pub fn omega(&self) -> &Matrix<T> {
        &self.omega
    }
    pub fn metric(&self) -> &Matrix<T> {
        &self.metric
    }
    pub fn complex_structure(&self) -> &Matrix<T> {
        &self.complex_structure
    }
}

/// `G A G^-1` computed entrywise for diagonal `G`.
fn conjugate_by_diagonal<T: Real>(g: &[T], a: &Matrix<T>) -> Matrix<T> {
    Matrix::from_fn(a.rows(), a.cols(), |j, k| g[j] * a[(j, k)] / g[k])
}

/// Max-abs of `G A G^-1 - A^T`.
pub fn compatibility_residual<T: Real>(p: &ProbabilityVector<T>, alpha: Alpha<T>, a: &Matrix<T>) -> Result<T> {
    if a.rows() != p.dim() || a.cols() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: a.rows().max(a.cols()),
        });
    }
    let g = metric_diagonal(p, alpha)?;
    Ok(conjugate_by_diagonal(&g, a).max_abs_diff(&a.transpose()))
}

/// `A_jk = sqrt(P_j / P_k) B_jk` for symmetric `B`; always satisfies `G A G^-1 = A^T`.
pub fn compatible_from_symmetric<T: Real>(b: &Matrix<T>, p: &ProbabilityVector<T>) -> Matrix<T> {
    let pv = p.as_slice();
    Matrix::from_fn(b.rows(), b.cols(), |j, k| (pv[j] / pv[k]).sqrt() * b[(j, k)])
}

/// Builds `(Omega, g, J)` at `p` from `alpha` and a compatible `A`.
pub fn build_structure<T: Real>(
    p: &ProbabilityVector<T>,
    alpha: Alpha<T>,
    a: &Matrix<T>,
) -> Result<KahlerStructure<T>> {
    let n = p.dim();
    let residual = compatibility_residual(p, alpha, a)?;
    if residual > tol_compatibility::<T>() * (T::one() + a.max_abs()) {
        return Err(Error::IncompatibleA {
            residual: residual.as_f64(),
        });
    }
    let g_diag = metric_diagonal(p, alpha)?;
    let g_inv: Vec<T> = g_diag.iter().map(|&x| T::one() / x).collect();
    let g = Matrix::from_diagonal(&g_diag);

    let one = Matrix::identity(n);
    let one_plus_a2 = &one + &(a * a);
    let f = Matrix::from_fn(n, n, |i, j| one_plus_a2[(i, j)] * g_inv[j]);
    let blocks = MetricBlocks {
        g: g.clone(),
        e: a.transpose(),
        f: f.clone(),
    };
    let metric = blocks.assemble();
    let gag = conjugate_by_diagonal(&g_diag, a);
    let complex_structure = Matrix::from_blocks(a, &f, &-&g, &-&gag);
    Ok(KahlerStructure {
        alpha,
        point: p.clone(),
        a: a.clone(),
        blocks,
        omega: SymplecticForm::new(n).matrix(),
        metric,
        complex_structure,
    })
}

/// The scalar case `A = a 1`.
pub fn build_scalar_structure<T: Real>(p: &ProbabilityVector<T>, alpha: Alpha<T>, a: T) -> Result<KahlerStructure<T>> {
    build_structure(p, alpha, &Matrix::identity(p.dim()).scale(a))
}

/// Max-abs residuals of the three Kähler conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KahlerResiduals<T> {
    /// `Omega - g J`
    pub compatibility: T,
    /// `J^T g J - g`
    pub hermitian: T,
    /// `J J + 1`
    pub complex: T,
}

impl<T: Real> KahlerResiduals<T> {
    pub fn max(&self) -> T {
        self.compatibility.max(self.hermitian).max(self.complex)
    }
}

pub fn kahler_residuals<T: Real>(omega: &Matrix<T>, g: &Matrix<T>, j: &Matrix<T>) -> KahlerResiduals<T> {
    let n2 = j.rows();
    let gj = g * j;
    let jtgj = &(&j.transpose() * g) * j;
    let jj = j * j;
    KahlerResiduals {
        compatibility: omega.max_abs_diff(&gj),
        hermitian: jtgj.max_abs_diff(g),
        complex: jj.max_abs_diff(&-&Matrix::identity(n2)),
    }
}

pub fn verify_kahler<T: Real>(structure: &KahlerStructure<T>) -> KahlerResiduals<T> {
    kahler_residuals(&structure.omega, &structure.metric, &structure.complex_structure)
}

/// `dl^2 = sum_k [alpha dP^2 / (2P) + 2 a dP dS + (2P / alpha)(1 + a^2) dS^2]`.
pub fn flat_line_element<T: Real>(x: &PhasePoint<T>, dp: &[T], ds: &[T], alpha: Alpha<T>, a: T) -> Result<T> {
    let n = x.dim();
    for len in [dp.len(), ds.len()] {
        if len != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: len,
            });
        }
    }
    x.probability().ensure_interior()?;
    let two = T::lit(2.0);
    let al = alpha.value();
    Ok((0..n)
        .map(|k| {
            let p = x.p()[k];
            al * dp[k] * dp[k] / (two * p) + two * a * dp[k] * ds[k] + two * p / al * (T::one() + a * a) * ds[k] * ds[k]
        })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(p: &[f64]) -> ProbabilityVector<f64> {
        ProbabilityVector::new(p.to_vec()).unwrap()
    }

    #[test]
    fn a_zero_uniform() {
        let s = build_scalar_structure(&pv(&[0.5, 0.5]), Alpha::new(1.0).unwrap(), 0.0).unwrap();
        assert_eq!(s.metric(), &Matrix::identity(4));
        let expected_j = Matrix::from_rows(&[
            vec![0.0, 0.0, 1.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
            vec![-1.0, 0.0, 0.0, 0.0],
            vec![0.0, -1.0, 0.0, 0.0],
        ]);
        assert_eq!(s.complex_structure(), &expected_j);
        let r = verify_kahler(&s);
        assert_eq!(r.max(), 0.0);
    }

    #[test]
    fn scalar_a_blocks() {
        let p = pv(&[0.2, 0.8]);
        let alpha = Alpha::new(1.5).unwrap();
        let a = 0.7;
        let s = build_scalar_structure(&p, alpha, a).unwrap();
        let g = s.metric();
        for k in 0..2 {
            let gk = 1.5 / (2.0 * p.as_slice()[k]);
            assert!((g[(k, k)] - gk).abs() < 1e-15);
            assert!((g[(k, k + 2)] - a).abs() < 1e-15);
            assert!((g[(k + 2, k)] - a).abs() < 1e-15);
            assert!((g[(k + 2, k + 2)] - (1.0 + a * a) / gk).abs() < 1e-15);
        }
        assert!(verify_kahler(&s).max() < 1e-14);
        assert!(g.is_positive_definite());
    }

    #[test]
    fn incompatible_a_is_rejected() {
        let p = pv(&[0.2, 0.8]);
        // symmetric A is incompatible unless P is uniform
        let a = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!(matches!(
            build_structure(&p, Alpha::new(1.0).unwrap(), &a),
            Err(Error::IncompatibleA { .. })
        ));
    }

    #[test]
    fn symmetric_parameterisation_is_compatible() {
        let p = pv(&[0.1, 0.3, 0.6]);
        let b = Matrix::from_rows(&[vec![0.3, -0.2, 0.5], vec![-0.2, 0.1, 0.4], vec![0.5, 0.4, -0.6]]);
        let a = compatible_from_symmetric(&b, &p);
        let alpha = Alpha::new(0.8).unwrap();
        assert!(compatibility_residual(&p, alpha, &a).unwrap() < 1e-15);
        let s = build_structure(&p, alpha, &a).unwrap();
        assert!(verify_kahler(&s).max() < 1e-13);
        assert!(s.metric().symmetry_residual() < 1e-15);
    }

    #[test]
    fn corrupted_j_is_detected() {
        let s = build_scalar_structure(&pv(&[0.3, 0.7]), Alpha::new(1.0).unwrap(), 0.4).unwrap();
        let mut j = s.complex_structure().clone();
        j[(1, 2)] += 1e-3;
        let r = kahler_residuals(s.omega(), s.metric(), &j);
        assert!(r.max() >= 1e-4);
    }

    #[test]
    fn flat_line_element_examples() {
        let alpha = Alpha::new(1.0).unwrap();
        let x = PhasePoint::from_vecs(vec![0.5, 0.5], vec![0.0, 0.0]).unwrap();
        let h: f64 = 1e-2;
        let v = flat_line_element(&x, &[0.0, 0.0], &[h, 0.0], alpha, 1.0).unwrap();
        assert!((v - 2.0 * h * h).abs() < 1e-18);
        // a = 0, dS = 0 reduces to the simplex line element 2 eps^2
        let v = flat_line_element(&x, &[h, -h], &[0.0, 0.0], alpha, 0.0).unwrap();
        assert!((v - 2.0 * h * h).abs() < 1e-18);
    }

    #[test]
    fn flat_line_element_on_boundary() {
        let x = PhasePoint::from_vecs(vec![1.0, 0.0], vec![0.0, 0.0]).unwrap();
        assert!(matches!(
            flat_line_element(&x, &[0.0, 0.0], &[0.0, 0.0], Alpha::new(1.0).unwrap(), 0.0),
            Err(Error::DegenerateProbability { .. })
        ));
    }
}
