//! Canonical extension of the split Markov map to phase space.
//!
//! The `m`-state phase space is first enlarged by a pair `(P^{m+1}, S^{m+1})`
//! that the Hamiltonian ignores, then mapped linearly onto the `(m+1)`-state
//! phase space `(P~, S~)` by the transformation generated by
//!
//! ```text
//! K = sum_{i<m} P~^i S^i + (P~^m + P~^{m+1}) S^m + ((1-k) P~^m - k P~^{m+1}) S^{m+1}
//! ```
//!
//! with `P^k = dK/dS^k` and `S~^k = dK/dP~^k`. On the constraint surface
//! `P^{m+1} ≈ 0`, `S^{m+1} ≈ 0` this reduces to the ordinary split map on
//! probabilities and duplicates the split phase.
//!
//! Indices in code are zero-based: the split component is `m - 1` and the
//! added component is `m`.

use crate::error::{Error, Result};
use crate::kahler::{build_structure, compatible_from_symmetric};
use crate::linalg::Matrix;
use crate::markov::SplitMap;
use crate::phase::{hamiltonian_flow, Observable, PhaseGradient, PhasePoint, Trajectory};
use crate::scalar::{resolvable_tolerance, Real};
use crate::simplex::{Alpha, ProbabilityVector};

/// Constraint tolerance for algebraic checks.
pub fn tol_constraint<T: Real>() -> T {
    resolvable_tolerance(1e-12)
}

/// Constraint tolerance along integrated trajectories.
pub fn tol_constraint_flow<T: Real>() -> T {
    resolvable_tolerance(1e-9)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalSplitMap<T> {
    m: usize,
    k: T,
}

/// Values of the auxiliary coordinates `(P^{m+1}, S^{m+1})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintPair<T> {
    pub value_p: T,
    pub value_s: T,
}

impl<T: Real> ConstraintPair<T> {
    pub fn max_abs(&self) -> T {
        self.value_p.abs().max(self.value_s.abs())
    }

    pub fn is_satisfied(&self, tol: T) -> bool {
        self.value_p.abs() <= tol && self.value_s.abs() <= tol
    }
}

impl<T: Real> CanonicalSplitMap<T> {
    /// Splits the last of `m >= 1` components with weight `k` in `(0, 1)`.
    pub fn new(m: usize, k: T) -> Result<Self> {
        if m == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        if !(k > T::zero() && k < T::one()) {
            return Err(Error::InvalidSplit(k.as_f64()));
        }
        Ok(Self { m, k })
    }

    pub fn source_dim(&self) -> usize {
        self.m
    }

    pub fn target_dim(&self) -> usize {
        self.m + 1
    }

    pub fn k(&self) -> T {
        self.k
    }

    /// The probability-level split map this transformation extends.
    pub fn split_map(&self) -> SplitMap<T> {
        SplitMap::last(self.m, self.k).expect("validated on construction")
    }

    /// Matrix of `(P, S) = M (P~, S~)` on `2(m+1)` coordinates, both sides
    /// ordered `(P^1..P^{m+1}, S^1..S^{m+1})`.
    pub fn original_from_split_matrix(&self) -> Matrix<T> {
        let n = self.m + 1;
        let (j, e) = (self.m - 1, self.m);
        let k = self.k;
        let one = T::one();
        let mut mat = Matrix::zeros(2 * n, 2 * n);
        for i in 0..j {
            mat[(i, i)] = one;
            mat[(n + i, n + i)] = one;
        }
        mat[(j, j)] = one;
        mat[(j, e)] = one;
        mat[(e, j)] = one - k;
        mat[(e, e)] = -k;
        mat[(n + j, n + j)] = k;
        mat[(n + j, n + e)] = one - k;
        mat[(n + e, n + j)] = one;
        mat[(n + e, n + e)] = -one;
        mat
    }

    /// Matrix of `(P~, S~) = M^-1 (P, S)`.
    pub fn split_from_original_matrix(&self) -> Matrix<T> {
        let n = self.m + 1;
        let (j, e) = (self.m - 1, self.m);
        let k = self.k;
        let one = T::one();
        let mut mat = Matrix::zeros(2 * n, 2 * n);
        for i in 0..j {
            mat[(i, i)] = one;
            mat[(n + i, n + i)] = one;
        }
        mat[(j, j)] = k;
        mat[(j, e)] = one;
        mat[(e, j)] = one - k;
        mat[(e, e)] = -one;
        mat[(n + j, n + j)] = one;
        mat[(n + j, n + e)] = one - k;
        mat[(n + e, n + j)] = one;
        mat[(n + e, n + e)] = -k;
        mat
    }

    fn check_extended(&self, len: usize) -> Result<()> {
        if len != 2 * (self.m + 1) {
            return Err(Error::DimensionMismatch {
                expected: 2 * (self.m + 1),
                found: len,
            });
        }
        Ok(())
    }

    /// Original extended coordinates from split coordinates.
    pub fn to_original(&self, split: &[T]) -> Result<Vec<T>> {
        self.check_extended(split.len())?;
        let n = self.m + 1;
        let (j, e) = (self.m - 1, self.m);
        let k = self.k;
        let (pt, st) = split.split_at(n);
        let mut p = pt.to_vec();
        let mut s = st.to_vec();
        p[j] = pt[j] + pt[e];
        p[e] = (T::one() - k) * pt[j] - k * pt[e];
        s[j] = k * st[j] + (T::one() - k) * st[e];
        s[e] = st[j] - st[e];
        p.extend(s);
        Ok(p)
    }

    /// Split coordinates from original extended coordinates.
    pub fn to_split(&self, original: &[T]) -> Result<Vec<T>> {
        self.check_extended(original.len())?;
        let n = self.m + 1;
        let (j, e) = (self.m - 1, self.m);
        let k = self.k;
        let (p, s) = original.split_at(n);
        let mut pt = p.to_vec();
        let mut st = s.to_vec();
        pt[j] = k * p[j] + p[e];
        pt[e] = (T::one() - k) * p[j] - p[e];
        st[j] = s[j] + (T::one() - k) * s[e];
        st[e] = s[j] - k * s[e];
        pt.extend(st);
        Ok(pt)
    }

    /// `(P^{m+1}, S^{m+1})` at a point of the split phase space.
    pub fn constraints(&self, x_tilde: &PhasePoint<T>) -> Result<ConstraintPair<T>> {
        self.check_extended(2 * x_tilde.dim())?;
        Ok(self.constraints_raw(x_tilde.p(), x_tilde.s()))
    }

    fn constraints_raw(&self, pt: &[T], st: &[T]) -> ConstraintPair<T> {
        let (j, e) = (self.m - 1, self.m);
        ConstraintPair {
            value_p: (T::one() - self.k) * pt[j] - self.k * pt[e],
            value_s: st[j] - st[e],
        }
    }

    /// Image on the constraint surface: `P~ = (P^i, k P^m, (1-k) P^m)`,
    /// `S~ = (S^i, S^m, S^m)`.
    pub fn lift_forward(&self, x: &PhasePoint<T>) -> Result<PhasePoint<T>> {
        if x.dim() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                found: x.dim(),
            });
        }
        let j = self.m - 1;
        let mut p = x.p().to_vec();
        let mut s = x.s().to_vec();
        let pm = p[j];
        p[j] = self.k * pm;
        p.push((T::one() - self.k) * pm);
        s.push(s[j]);
        PhasePoint::from_vecs(p, s)
    }

    /// Inverse of [`lift_forward`](Self::lift_forward), checking the constraints
    /// against [`tol_constraint`].
    pub fn project_back(&self, x_tilde: &PhasePoint<T>) -> Result<PhasePoint<T>> {
        self.project_back_with_tol(x_tilde, tol_constraint())
    }

    pub fn project_back_with_tol(&self, x_tilde: &PhasePoint<T>, tol: T) -> Result<PhasePoint<T>> {
        let c = self.constraints(x_tilde)?;
        if !c.is_satisfied(tol) {
            return Err(Error::ConstraintViolation {
                p_residual: c.value_p.abs().as_f64(),
                s_residual: c.value_s.abs().as_f64(),
            });
        }
        let (p, s) = self.project_raw(x_tilde.p(), x_tilde.s());
        PhasePoint::new(
            ProbabilityVector::with_tolerance(p, tol.max(crate::simplex::tol_norm()))?,
            s,
        )
    }

    fn project_raw(&self, pt: &[T], st: &[T]) -> (Vec<T>, Vec<T>) {
        let (j, e) = (self.m - 1, self.m);
        let mut p = pt[..self.m].to_vec();
        let mut s = st[..self.m].to_vec();
        p[j] = pt[j] + pt[e];
        s[j] = self.k * st[j] + (T::one() - self.k) * st[e];
        (p, s)
    }

    /// Linear map `(dP, dS) -> (dP~, dS~)` of tangent vectors on the constraint
    /// surface, as a `2(m+1) x 2m` matrix.
    pub fn embedding_matrix(&self) -> Matrix<T> {
        let (m, n) = (self.m, self.m + 1);
        let j = m - 1;
        let mut e = Matrix::zeros(2 * n, 2 * m);
        for i in 0..j {
            e[(i, i)] = T::one();
            e[(n + i, m + i)] = T::one();
        }
        e[(j, j)] = self.k;
        e[(j + 1, j)] = T::one() - self.k;
        e[(n + j, m + j)] = T::one();
        e[(n + j + 1, m + j)] = T::one();
        e
    }

    /// Swaps the two halves of the split component.
    pub fn relabel(&self, x_tilde: &PhasePoint<T>) -> Result<PhasePoint<T>> {
        self.check_extended(2 * x_tilde.dim())?;
        let (j, e) = (self.m - 1, self.m);
        let mut p = x_tilde.p().to_vec();
        let mut s = x_tilde.s().to_vec();
        p.swap(j, e);
        s.swap(j, e);
        PhasePoint::from_vecs(p, s)
    }

    /// The generating function `K(P~, S)` on the extended spaces.
    pub fn generating_function(&self, p_tilde: &[T], s: &[T]) -> Result<T> {
        generating_function(self.m, self.k, p_tilde, s)
    }
}

/// `K = sum_{i<m} P~^i S^i + (P~^m + P~^{m+1}) S^m + ((1-k) P~^m - k P~^{m+1}) S^{m+1}`.
pub fn generating_function<T: Real>(m: usize, k: T, p_tilde: &[T], s: &[T]) -> Result<T> {
    for len in [p_tilde.len(), s.len()] {
        if len != m + 1 {
            return Err(Error::DimensionMismatch {
                expected: m + 1,
                found: len,
            });
        }
    }
    if m == 0 {
        return Err(Error::DimensionMismatch { expected: 1, found: 0 });
    }
    let (j, e) = (m - 1, m);
    let head: T = (0..j).map(|i| p_tilde[i] * s[i]).sum();
    Ok(head + (p_tilde[j] + p_tilde[e]) * s[j] + ((T::one() - k) * p_tilde[j] - k * p_tilde[e]) * s[e])
}

/// `H~(P~, S~) = H(P(P~), S(S~))`: an `m`-state Hamiltonian expressed on the
/// split phase space. The auxiliary pair does not enter.
pub struct SplitHamiltonian<'a, T, H: ?Sized> {
    pub map: CanonicalSplitMap<T>,
    pub inner: &'a H,
}

impl<T: Real, H: Observable<T> + ?Sized> Observable<T> for SplitHamiltonian<'_, T, H> {
    fn value(&self, p: &[T], s: &[T]) -> T {
        let (p0, s0) = self.map.project_raw(p, s);
        self.inner.value(&p0, &s0)
    }

    fn gradient(&self, p: &[T], s: &[T]) -> Result<PhaseGradient<T>> {
        let (p0, s0) = self.map.project_raw(p, s);
        let g = self.inner.gradient(&p0, &s0)?;
        let j = self.map.m - 1;
        let k = self.map.k;
        let mut dp = g.dp.clone();
        dp.push(g.dp[j]);
        let mut ds = g.ds.clone();
        ds[j] = k * g.ds[j];
        ds.push((T::one() - k) * g.ds[j]);
        Ok(PhaseGradient { dp, ds })
    }
}

/// Outcome of integrating the same dynamics in both phase spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsReport<T> {
    /// Max-abs difference between the direct trajectory and the projected
    /// split trajectory, over all sampled times and coordinates.
    pub discrepancy: T,
    /// Max `|P^{m+1}|` along the split trajectory.
    pub constraint_drift_p: T,
    /// Max `|S^{m+1}|` along the split trajectory.
    pub constraint_drift_s: T,
}

impl<T: Real> DynamicsReport<T> {
    pub fn constraint_drift(&self) -> T {
        self.constraint_drift_p.max(self.constraint_drift_s)
    }
}

/// Integrates `h` from `x0` directly and, in parallel, its split form from
/// `lift_forward(x0)`, then compares after projecting back.
pub fn verify_dynamics_preservation<T: Real, H: Observable<T> + ?Sized>(
    map: &CanonicalSplitMap<T>,
    h: &H,
    x0: &PhasePoint<T>,
    t: T,
    steps: usize,
) -> Result<DynamicsReport<T>> {
    let lifted = map.lift_forward(x0)?;
    let split_h = SplitHamiltonian { map: *map, inner: h };
    let (direct, split): (Result<Trajectory<T>>, Result<Trajectory<T>>) = std::thread::scope(|scope| {
        let handle = scope.spawn(|| hamiltonian_flow(&split_h, &lifted, t, steps));
        let direct = hamiltonian_flow(h, x0, t, steps);
        (direct, handle.join().expect("split flow thread panicked"))
    });
    let (direct, split) = (direct?, split?);

    let mut discrepancy = T::zero();
    let mut drift_p = T::zero();
    let mut drift_s = T::zero();
    for (a, b) in direct.points.iter().zip(&split.points) {
        let c = map.constraints_raw(b.p(), b.s());
        drift_p = drift_p.max(c.value_p.abs());
        drift_s = drift_s.max(c.value_s.abs());
        let (p, s) = map.project_raw(b.p(), b.s());
        for (x, y) in a.p().iter().chain(a.s()).zip(p.iter().chain(&s)) {
            discrepancy = discrepancy.max((*x - *y).abs());
        }
    }
    Ok(DynamicsReport {
        discrepancy,
        constraint_drift_p: drift_p,
        constraint_drift_s: drift_s,
    })
}

/// Symmetric matrix `B` parameterising compatible `A` through
/// `A_jk = sqrt(P_j / P_k) B_jk`.
#[derive(Debug, Clone, PartialEq)]
pub struct BMatrix<T> {
    b: Matrix<T>,
}

impl<T: Real> BMatrix<T> {
    pub fn new(b: Matrix<T>) -> Result<Self> {
        if !b.is_square() {
            return Err(Error::DimensionMismatch {
                expected: b.rows(),
                found: b.cols(),
            });
        }
        let residual = b.symmetry_residual();
        if residual > resolvable_tolerance::<T>(1e-12) * (T::one() + b.max_abs()) {
            return Err(Error::NotSymmetric {
                residual: residual.as_f64(),
            });
        }
        Ok(Self { b })
    }

    /// `b 1` of size `n`.
    pub fn scalar(n: usize, b: T) -> Self {
        Self {
            b: Matrix::identity(n).scale(b),
        }
    }

    pub fn dim(&self) -> usize {
        self.b.rows()
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.b
    }

    pub fn is_scalar(&self) -> bool {
        let d = self.b[(0, 0)];
        (0..self.dim()).all(|i| (0..self.dim()).all(|j| self.b[(i, j)] == if i == j { d } else { T::zero() }))
    }

    pub fn to_a_matrix(&self, p: &ProbabilityVector<T>) -> Matrix<T> {
        compatible_from_symmetric(&self.b, p)
    }

    /// The `(m+1)`-state candidate `B~` used to test invariance under `map`.
    ///
    /// Each index of the split space inherits the row and column of the
    /// component it came from; the two halves of the split component are
    /// not coupled to each other. Scalar `B` maps to the scalar `B~` of the
    /// same value.
    pub fn split_target(&self, map: &CanonicalSplitMap<T>) -> Result<Self> {
        let m = map.source_dim();
        if self.dim() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: self.dim(),
            });
        }
        let origin = |a: usize| a.min(m - 1);
        let b = Matrix::from_fn(m + 1, m + 1, |a, c| {
            if a != c && origin(a) == origin(c) {
                T::zero()
            } else {
                self.b[(origin(a), origin(c))]
            }
        });
        Ok(Self { b })
    }
}

/// Max-abs difference between the source Kähler metric and the pullback of
/// the split-space metric through [`CanonicalSplitMap::embedding_matrix`],
/// maximised over `samples`.
///
/// The entries of `E^T g~ E - g` are the polarised differences of the two line
/// elements on coordinate displacements, so this bounds the line-element
/// mismatch for every displacement.
pub fn pullback_metric_residual<T: Real>(
    b: &BMatrix<T>,
    map: &CanonicalSplitMap<T>,
    samples: &[ProbabilityVector<T>],
    alpha: Alpha<T>,
) -> Result<T> {
    let b_split = b.split_target(map)?;
    let split = map.split_map().to_markov_map();
    let e = map.embedding_matrix();
    let et = e.transpose();
    let mut worst = T::zero();
    for p in samples {
        p.ensure_interior()?;
        let source = build_structure(p, alpha, &b.to_a_matrix(p))?;
        let p_split = split.embed(p)?;
        let target = build_structure(&p_split, alpha, &b_split.to_a_matrix(&p_split))?;
        let pulled = &(&et * target.metric()) * &e;
        worst = worst.max(pulled.max_abs_diff(source.metric()));
    }
    Ok(worst)
}
