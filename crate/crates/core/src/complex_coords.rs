//! Complex coordinates on the Kähler phase space.
//!
//! The Madelung map `psi^k = sqrt(P^k) exp(i S^k / alpha)` and its gauged
//! variant `phi^k = sqrt(P^k) exp[i (Lambda S^k / alpha - gamma ln sqrt(P^k))]`
//! turn `(P, S)` into wave-function components. Tensors are pulled back
//! through a numerical Jacobian and compared with the flat form
//!
//! ```text
//! Omega' = [[0, i a' 1], [-i a' 1, 0]]
//! g'     = [[0,   a' 1], [  a' 1, 0]]
//! J'     = diag(-i 1, i 1)
//! ```
//!
//! with scale `a' = alpha / Lambda`. The identification `alpha = hbar` is a
//! physical interpretation only; nothing here fixes alpha.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::kahler::build_scalar_structure;
use crate::linalg::{ComplexMatrix, Matrix};
use crate::phase::{fd_step, Observable, PhaseGradient, PhasePoint};
use crate::scalar::{resolvable_tolerance, Real};
use crate::simplex::{tol_norm, Alpha, ProbabilityVector};

/// Parameters `(Lambda, gamma)` of the phase `Lambda S / alpha - gamma ln sqrt(P)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gauge<T> {
    pub lambda: T,
    pub gamma: T,
}

impl<T: Real> Gauge<T> {
    /// `(1, 0)`: the plain Madelung transformation.
    pub fn plain() -> Self {
        Self {
            lambda: T::one(),
            gamma: T::zero(),
        }
    }

    /// `Lambda = 1 / (1 + a^2)`, `gamma = -a / (1 + a^2)`.
    pub fn modified(a: T) -> Self {
        let d = T::one() + a * a;
        Self {
            lambda: T::one() / d,
            gamma: -a / d,
        }
    }

    /// `Lambda = 1 + a^2`, `gamma = -a`.
    ///
    /// These are the unique parameters for which the coordinates are
    /// holomorphic for the scalar-`a` complex structure; the flat scale is
    /// then `alpha / (1 + a^2)`.
    pub fn holomorphic(a: T) -> Self {
        Self {
            lambda: T::one() + a * a,
            gamma: -a,
        }
    }

    pub fn is_plain(&self) -> bool {
        self.lambda == T::one() && self.gamma == T::zero()
    }
}

/// Wave-function components together with the scale and gauge that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveVector<T> {
    psi: Vec<Complex<T>>,
    alpha: Alpha<T>,
    gauge: Gauge<T>,
}

impl<T: Real> WaveVector<T> {
    pub fn new(psi: Vec<Complex<T>>, alpha: Alpha<T>, gauge: Gauge<T>) -> Self {
        Self { psi, alpha, gauge }
    }

    pub fn components(&self) -> &[Complex<T>] {
        &self.psi
    }

    pub fn alpha(&self) -> Alpha<T> {
        self.alpha
    }

    pub fn gauge(&self) -> Gauge<T> {
        self.gauge
    }

    pub fn dim(&self) -> usize {
        self.psi.len()
    }

    /// Scale `alpha / Lambda` of the flat tensors in these coordinates.
    pub fn scale(&self) -> T {
        self.alpha.value() / self.gauge.lambda
    }

    pub fn norm_sqr(&self) -> T {
        self.psi.iter().map(|z| z.norm_sqr()).sum()
    }
}

fn phase<T: Real>(p: T, s: T, alpha: T, gauge: Gauge<T>) -> T {
    gauge.lambda * s / alpha - gauge.gamma * p.sqrt().ln()
}

fn gauged_raw<T: Real>(p: &[T], s: &[T], alpha: T, gauge: Gauge<T>) -> Vec<Complex<T>> {
    p.iter()
        .zip(s)
        .map(|(&pk, &sk)| Complex::from_polar(pk.sqrt(), phase(pk, sk, alpha, gauge)))
        .collect()
}

/// `phi^k = sqrt(P^k) exp[i (Lambda S^k / alpha - gamma ln sqrt(P^k))]`.
pub fn gauged_madelung<T: Real>(x: &PhasePoint<T>, alpha: Alpha<T>, gauge: Gauge<T>) -> Result<WaveVector<T>> {
    x.probability().ensure_interior()?;
    Ok(WaveVector::new(
        gauged_raw(x.p(), x.s(), alpha.value(), gauge),
        alpha,
        gauge,
    ))
}

/// `psi^k = sqrt(P^k) exp(i S^k / alpha)`.
pub fn madelung<T: Real>(x: &PhasePoint<T>, alpha: Alpha<T>) -> Result<WaveVector<T>> {
    gauged_madelung(x, alpha, Gauge::plain())
}

/// Madelung map with `Lambda = 1 / (1 + a^2)`, `gamma = -a / (1 + a^2)`.
pub fn modified_madelung<T: Real>(x: &PhasePoint<T>, alpha: Alpha<T>, a: T) -> Result<WaveVector<T>> {
    gauged_madelung(x, alpha, Gauge::modified(a))
}

/// Recovers `(P, S)` using the principal argument, so `S` is determined
/// modulo `2 pi alpha / Lambda`.
pub fn inverse_gauged_madelung<T: Real>(w: &WaveVector<T>) -> Result<PhasePoint<T>> {
    let p: Vec<T> = w.psi.iter().map(|z| z.norm_sqr()).collect();
    let p = ProbabilityVector::new(p)?;
    p.ensure_interior()?;
    let alpha = w.alpha.value();
    let Gauge { lambda, gamma } = w.gauge;
    let s = w
        .psi
        .iter()
        .zip(p.as_slice())
        .map(|(z, &pk)| alpha * (z.arg() + gamma * pk.sqrt().ln()) / lambda)
        .collect();
    PhasePoint::new(p, s)
}

pub fn inverse_madelung<T: Real>(w: &WaveVector<T>) -> Result<PhasePoint<T>> {
    if !w.gauge.is_plain() {
        return Err(Error::GaugeMismatch);
    }
    inverse_gauged_madelung(w)
}

/// Re-expresses a plain wave vector in the modified gauge of parameter `a`,
/// preserving every amplitude.
pub fn doebner_goldin<T: Real>(psi: &WaveVector<T>, a: T) -> Result<WaveVector<T>> {
    let x = inverse_madelung(psi)?;
    modified_madelung(&x, psi.alpha, a)
}

/// Maps a wave vector in any gauge back to the plain gauge.
pub fn inverse_doebner_goldin<T: Real>(phi: &WaveVector<T>) -> Result<WaveVector<T>> {
    let x = inverse_gauged_madelung(phi)?;
    madelung(&x, phi.alpha)
}

/// Tensor components in the coordinates `(phi^1..phi^n, phibar^1..phibar^n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTensors<T> {
    pub omega: ComplexMatrix<T>,
    pub metric: ComplexMatrix<T>,
    pub complex_structure: ComplexMatrix<T>,
    /// Scale `alpha / Lambda` expected in the flat form.
    pub scale: T,
}

/// Max-abs deviation of each pulled-back tensor from the flat form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatResiduals<T> {
    pub omega: T,
    pub metric: T,
    pub complex_structure: T,
}

impl<T: Real> FlatResiduals<T> {
    pub fn max(&self) -> T {
        self.omega.max(self.metric).max(self.complex_structure)
    }
}

/// The flat Kähler tensors `(Omega', g', J')` of scale `s` on `n` complex coordinates.
pub fn flat_form<T: Real>(n: usize, scale: T) -> (ComplexMatrix<T>, ComplexMatrix<T>, ComplexMatrix<T>) {
    let z = Matrix::zeros(n, n);
    let one = Matrix::identity(n);
    let s1 = one.scale(scale);
    let omega = ComplexMatrix::new(Matrix::zeros(2 * n, 2 * n), Matrix::from_blocks(&z, &s1, &-&s1, &z));
    let metric = ComplexMatrix::from_real(Matrix::from_blocks(&z, &s1, &s1, &z));
    let j = ComplexMatrix::new(Matrix::zeros(2 * n, 2 * n), Matrix::from_blocks(&-&one, &z, &z, &one));
    (omega, metric, j)
}

impl<T: Real> ComplexTensors<T> {
    pub fn dim(&self) -> usize {
        self.omega.rows() / 2
    }

    /// Compares against the flat form at the scale `alpha / Lambda`.
    pub fn flat_residuals(&self) -> FlatResiduals<T> {
        self.flat_residuals_at(self.scale)
    }

    pub fn flat_residuals_at(&self, scale: T) -> FlatResiduals<T> {
        let (omega, metric, j) = flat_form(self.dim(), scale);
        FlatResiduals {
            omega: self.omega.max_abs_diff(&omega),
            metric: self.metric.max_abs_diff(&metric),
            complex_structure: self.complex_structure.max_abs_diff(&j),
        }
    }
}

/// Jacobian `d(phi, phibar) / d(P, S)` by central differences.
pub fn numerical_jacobian<T: Real>(x: &PhasePoint<T>, alpha: Alpha<T>, gauge: Gauge<T>) -> ComplexMatrix<T> {
    let n = x.dim();
    let h = fd_step::<T>();
    let two_h = h + h;
    let mut coords = x.to_coordinates();
    let mut jac = ComplexMatrix::zeros(2 * n, 2 * n);
    for c in 0..2 * n {
        let orig = coords[c];
        coords[c] = orig + h;
        let plus = gauged_raw(&coords[..n], &coords[n..], alpha.value(), gauge);
        coords[c] = orig - h;
        let minus = gauged_raw(&coords[..n], &coords[n..], alpha.value(), gauge);
        coords[c] = orig;
        for a in 0..n {
            let d = (plus[a] - minus[a]) / two_h;
            jac.re[(a, c)] = d.re;
            jac.im[(a, c)] = d.im;
            jac.re[(n + a, c)] = d.re;
            jac.im[(n + a, c)] = -d.im;
        }
    }
    jac
}

/// Closed-form Jacobian: `dphi/dP = phi (1 - i gamma) / (2P)`, `dphi/dS = i Lambda phi / alpha`.
pub fn analytic_jacobian<T: Real>(x: &PhasePoint<T>, alpha: Alpha<T>, gauge: Gauge<T>) -> ComplexMatrix<T> {
    let n = x.dim();
    let phi = gauged_raw(x.p(), x.s(), alpha.value(), gauge);
    let mut jac = ComplexMatrix::zeros(2 * n, 2 * n);
    let two = T::lit(2.0);
    for (a, (&f, &p)) in phi.iter().zip(x.p()).enumerate() {
        let dp = f * Complex::new(T::one(), -gauge.gamma) / (two * p);
        let ds = f * Complex::new(T::zero(), gauge.lambda / alpha.value());
        for (col, d) in [(a, dp), (n + a, ds)] {
            jac.re[(a, col)] = d.re;
            jac.im[(a, col)] = d.im;
            jac.re[(n + a, col)] = d.re;
            jac.im[(n + a, col)] = -d.im;
        }
    }
    jac
}

fn transform_tensors<T: Real>(
    x: &PhasePoint<T>,
    alpha: Alpha<T>,
    a: T,
    gauge: Gauge<T>,
    jac: ComplexMatrix<T>,
) -> Result<ComplexTensors<T>> {
    let structure = build_scalar_structure(x.probability(), alpha, a)?;
    let inv = jac.inverse().ok_or(Error::SingularJacobian)?;
    if !inv.is_finite() {
        return Err(Error::SingularJacobian);
    }
    let inv_t = inv.transpose();
    let omega = ComplexMatrix::from_real(structure.omega().clone());
    let metric = ComplexMatrix::from_real(structure.metric().clone());
    let j = ComplexMatrix::from_real(structure.complex_structure().clone());
    Ok(ComplexTensors {
        omega: &(&inv_t * &omega) * &inv,
        metric: &(&inv_t * &metric) * &inv,
        complex_structure: &(&jac * &j) * &inv,
        scale: alpha.value() / gauge.lambda,
    })
}

/// Pulls `(Omega, g, J)` of the scalar-`a` structure back to the coordinates
/// produced by [`modified_madelung`] (plain Madelung when `a = 0`), using a
/// finite-difference Jacobian.
pub fn pullback_tensors<T: Real>(x: &PhasePoint<T>, alpha: Alpha<T>, a: T) -> Result<ComplexTensors<T>> {
    pullback_tensors_in_gauge(x, alpha, a, Gauge::modified(a))
}

/// As [`pullback_tensors`] with an explicit coordinate gauge.
pub fn pullback_tensors_in_gauge<T: Real>(
    x: &PhasePoint<T>,
    alpha: Alpha<T>,
    a: T,
    gauge: Gauge<T>,
) -> Result<ComplexTensors<T>> {
    x.probability().ensure_interior()?;
    let jac = numerical_jacobian(x, alpha, gauge);
    transform_tensors(x, alpha, a, gauge, jac)
}

/// As [`pullback_tensors_in_gauge`] with the closed-form Jacobian.
pub fn pullback_tensors_analytic<T: Real>(
    x: &PhasePoint<T>,
    alpha: Alpha<T>,
    a: T,
    gauge: Gauge<T>,
) -> Result<ComplexTensors<T>> {
    x.probability().ensure_interior()?;
    let jac = analytic_jacobian(x, alpha, gauge);
    transform_tensors(x, alpha, a, gauge, jac)
}

/// `2 a' sum_k |dphi^k|^2`, the flat line element in complex coordinates.
pub fn wave_line_element<T: Real>(w: &WaveVector<T>, dphi: &[Complex<T>]) -> Result<T> {
    if dphi.len() != w.dim() {
        return Err(Error::DimensionMismatch {
            expected: w.dim(),
            found: dphi.len(),
        });
    }
    Ok(T::lit(2.0) * w.scale() * dphi.iter().map(|z| z.norm_sqr()).sum::<T>())
}

fn check_pair<T: Real>(psi: &WaveVector<T>, phi: &WaveVector<T>) -> Result<()> {
    if psi.dim() != phi.dim() {
        return Err(Error::DimensionMismatch {
            expected: psi.dim(),
            found: phi.dim(),
        });
    }
    if psi.gauge != phi.gauge || psi.alpha != phi.alpha {
        return Err(Error::GaugeMismatch);
    }
    Ok(())
}

/// `<psi|phi> = sum_i conj(psi^i) phi^i`.
pub fn dirac_product<T: Real>(psi: &WaveVector<T>, phi: &WaveVector<T>) -> Result<Complex<T>> {
    check_pair(psi, phi)?;
    Ok(psi
        .psi
        .iter()
        .zip(&phi.psi)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b))
}

/// `<psi|phi> = (psi, psibar) [g' + i Omega'] (phi, phibar)^T / (2 a')` with the
/// flat tensors of scale `a'`.
pub fn dirac_product_via_tensors<T: Real>(psi: &WaveVector<T>, phi: &WaveVector<T>) -> Result<Complex<T>> {
    check_pair(psi, phi)?;
    let n = psi.dim();
    let scale = psi.scale();
    let (omega, metric, _) = flat_form(n, scale);
    let i_omega = omega.scale(Complex::new(T::zero(), T::one()));
    let form = &metric + &i_omega;
    let row: Vec<Complex<T>> = psi
        .psi
        .iter()
        .copied()
        .chain(psi.psi.iter().map(|z| z.conj()))
        .collect();
    let col: Vec<Complex<T>> = phi
        .psi
        .iter()
        .copied()
        .chain(phi.psi.iter().map(|z| z.conj()))
        .collect();
    let fc = form.mul_vec(&col);
    let total = row
        .iter()
        .zip(&fc)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a * b);
    Ok(total / (T::lit(2.0) * scale))
}

/// Membership of a real `2n x 2n` matrix, acting on `(Re psi, Im psi)`, in
/// `Sp(2n)`, `O(2n)` and `U(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification<T> {
    pub symplectic: bool,
    pub orthogonal: bool,
    pub unitary: bool,
    pub symplectic_residual: T,
    pub orthogonal_residual: T,
    /// The equivalent complex matrix, when the input is unitary.
    pub unitary_matrix: Option<ComplexMatrix<T>>,
}

pub fn tol_classification<T: Real>() -> T {
    resolvable_tolerance(1e-10)
}

/// In `(Re psi, Im psi)` coordinates the flat structures are
/// `Omega = 2 alpha [[0, 1], [-1, 0]]` and `g = 2 alpha 1`.
pub fn classify_transformation<T: Real>(m: &Matrix<T>, alpha: Alpha<T>) -> Classification<T> {
    let tol = tol_classification::<T>();
    let n2 = m.rows();
    if !m.is_square() || !n2.is_multiple_of(2) {
        return Classification {
            symplectic: false,
            orthogonal: false,
            unitary: false,
            symplectic_residual: T::infinity(),
            orthogonal_residual: T::infinity(),
            unitary_matrix: None,
        };
    }
    let n = n2 / 2;
    let two_alpha = T::lit(2.0) * alpha.value();
    let omega = crate::phase::SymplecticForm::new(n).matrix::<T>().scale(two_alpha);
    let g = Matrix::identity(n2).scale(two_alpha);
    let mt = m.transpose();
    let symplectic_residual = (&(&mt * &omega) * m).max_abs_diff(&omega) / two_alpha;
    let orthogonal_residual = (&(&mt * &g) * m).max_abs_diff(&g) / two_alpha;
    let symplectic = symplectic_residual <= tol;
    let orthogonal = orthogonal_residual <= tol;

    let unitary_matrix = if symplectic && orthogonal {
        let re = m.block(0, 0, n, n);
        let im = m.block(n, 0, n, n);
        let block_residual = m
            .block(n, n, n, n)
            .max_abs_diff(&re)
            .max(m.block(0, n, n, n).max_abs_diff(&-&im));
        let u = ComplexMatrix::new(re, im);
        let unitarity = (&u.adjoint() * &u).max_abs_diff(&ComplexMatrix::identity(n));
        (block_residual <= tol && unitarity <= tol).then_some(u)
    } else {
        None
    };
    Classification {
        symplectic,
        orthogonal,
        unitary: unitary_matrix.is_some(),
        symplectic_residual,
        orthogonal_residual,
        unitary_matrix,
    }
}

/// The observable `<psi|M|psi>` for Hermitian `M`, with `psi` the Madelung
/// image of `(P, S)`. With `M` the Hamiltonian matrix its flow is the
/// Schrödinger evolution `i alpha dpsi/dt = M psi`.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearObservable<T> {
    m: ComplexMatrix<T>,
    alpha: Alpha<T>,
}

impl<T: Real> BilinearObservable<T> {
    pub fn new(m: ComplexMatrix<T>, alpha: Alpha<T>) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::DimensionMismatch {
                expected: m.rows(),
                found: m.cols(),
            });
        }
        let residual = m.hermitian_residual();
        if residual > resolvable_tolerance::<T>(1e-12) {
            return Err(Error::NotHermitian {
                residual: residual.as_f64(),
            });
        }
        Ok(Self { m, alpha })
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.m
    }

    pub fn alpha(&self) -> Alpha<T> {
        self.alpha
    }

    fn psi(&self, p: &[T], s: &[T]) -> Vec<Complex<T>> {
        gauged_raw(p, s, self.alpha.value(), Gauge::plain())
    }
}

impl<T: Real> Observable<T> for BilinearObservable<T> {
    fn value(&self, p: &[T], s: &[T]) -> T {
        let psi = self.psi(p, s);
        let w = self.m.mul_vec(&psi);
        psi.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// `dH/dP^j = Re(conj(psi_j) w_j) / P^j`, `dH/dS^j = 2 Im(conj(psi_j) w_j) / alpha`
    /// with `w = M psi`.
    fn gradient(&self, p: &[T], s: &[T]) -> Result<PhaseGradient<T>> {
        if p.iter().any(|&x| !(x > T::zero())) {
            return Err(Error::GradientUnavailable(
                "bilinear observable needs strictly positive P".into(),
            ));
        }
        let psi = self.psi(p, s);
        let w = self.m.mul_vec(&psi);
        let two_over_alpha = T::lit(2.0) / self.alpha.value();
        let mut dp = Vec::with_capacity(p.len());
        let mut ds = Vec::with_capacity(p.len());
        for j in 0..p.len() {
            let c = psi[j].conj() * w[j];
            dp.push(c.re / p[j]);
            ds.push(two_over_alpha * c.im);
        }
        Ok(PhaseGradient { dp, ds })
    }
}

/// `exp(-i H t / alpha) psi0` through the real representation of the generator.
pub fn schrodinger_evolve<T: Real>(
    h: &ComplexMatrix<T>,
    psi0: &[Complex<T>],
    t: T,
    alpha: Alpha<T>,
) -> Vec<Complex<T>> {
    let n = psi0.len();
    let c = t / alpha.value();
    let generator = ComplexMatrix::new(h.im.scale(c), h.re.scale(-c));
    let u = generator.to_real_representation().exp();
    let xy: Vec<T> = psi0.iter().map(|z| z.re).chain(psi0.iter().map(|z| z.im)).collect();
    let out = u.mul_vec(&xy);
    (0..n).map(|k| Complex::new(out[k], out[n + k])).collect()
}

/// `|sum_k |psi^k|^2 - 1|`.
pub fn normalization_defect<T: Real>(psi: &[Complex<T>]) -> T {
    (psi.iter().map(|z| z.norm_sqr()).sum::<T>() - T::one()).abs()
}

/// True when `psi` is normalized within the simplex tolerance.
pub fn is_normalized<T: Real>(psi: &[Complex<T>]) -> bool {
    normalization_defect(psi) <= tol_norm::<T>()
}
