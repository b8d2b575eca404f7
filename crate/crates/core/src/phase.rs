//! The `2n`-dimensional phase space with coordinates `(P^i, S^i)`.
//!
//! Observables are functions of raw coordinate slices so that finite
//! differences and integrator stages may step off the simplex slightly.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;
use crate::simplex::{tol_boundary, tol_norm, ProbabilityVector};

/// Central-difference step for numerically differentiated observables.
pub fn fd_step<T: Real>() -> T {
    T::lit(1e-6).max(T::epsilon().cbrt() * T::lit(0.1))
}

/// Gauge shifts `S^i -> S^i + chi` probed by [`check_admissible`].
pub const GAUGE_TEST_VALUES: [f64; 3] = [0.1, 1.0, std::f64::consts::PI];

#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint<T> {
    p: ProbabilityVector<T>,
    s: Vec<T>,
}

impl<T: Real> PhasePoint<T> {
    pub fn new(p: ProbabilityVector<T>, s: Vec<T>) -> Result<Self> {
        if s.len() != p.dim() {
            return Err(Error::DimensionMismatch {
                expected: p.dim(),
                found: s.len(),
            });
        }
        Ok(Self { p, s })
    }

    pub fn from_vecs(p: Vec<T>, s: Vec<T>) -> Result<Self> {
        Self::new(ProbabilityVector::new(p)?, s)
    }

    pub(crate) fn from_flow(p: Vec<T>, s: Vec<T>) -> Self {
        Self {
            p: ProbabilityVector::from_flow(p),
            s,
        }
    }

    pub fn dim(&self) -> usize {
        self.s.len()
    }

    pub fn probability(&self) -> &ProbabilityVector<T> {
        &self.p
    }

    pub fn p(&self) -> &[T] {
        self.p.as_slice()
    }

    pub fn s(&self) -> &[T] {
        &self.s
    }

    /// `(P^1..P^n, S^1..S^n)`.
    pub fn to_coordinates(&self) -> Vec<T> {
        self.p().iter().chain(&self.s).copied().collect()
    }
}

/// `(dO/dP, dO/dS)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGradient<T> {
    pub dp: Vec<T>,
    pub ds: Vec<T>,
}

impl<T: Real> PhaseGradient<T> {
    pub fn to_vec(&self) -> Vec<T> {
        self.dp.iter().chain(&self.ds).copied().collect()
    }

    fn is_finite(&self) -> bool {
        self.dp.iter().chain(&self.ds).all(|x| x.is_finite())
    }
}

/// A phase-space function `O(P, S)`.
pub trait Observable<T: Real>: Send + Sync {
    fn value(&self, p: &[T], s: &[T]) -> T;

    /// Defaults to central differences with [`fd_step`].
    fn gradient(&self, p: &[T], s: &[T]) -> Result<PhaseGradient<T>> {
        finite_difference_gradient(self, p, s, fd_step())
    }
}

impl<T: Real, O: Observable<T> + ?Sized> Observable<T> for &O {
    fn value(&self, p: &[T], s: &[T]) -> T {
        (**self).value(p, s)
    }
    fn gradient(&self, p: &[T], s: &[T]) -> Result<PhaseGradient<T>> {
        (**self).gradient(p, s)
    }
}

impl<T: Real, O: Observable<T> + ?Sized> Observable<T> for Box<O> {
    fn value(&self, p: &[T], s: &[T]) -> T {
        (**self).value(p, s)
    }
    fn gradient(&self, p: &[T], s: &[T]) -> Result<PhaseGradient<T>> {
        (**self).gradient(p, s)
    }
}

pub fn finite_difference_gradient<T: Real, O: Observable<T> + ?Sized>(
    o: &O,
    p: &[T],
    s: &[T],
    h: T,
) -> Result<PhaseGradient<T>> {
    let two_h = h + h;
    let mut pw = p.to_vec();
    let mut sw = s.to_vec();
    let mut dp = Vec::with_capacity(p.len());
    for i in 0..p.len() {
        let orig = pw[i];
        pw[i] = orig + h;
        let plus = o.value(&pw, &sw);
        pw[i] = orig - h;
        let minus = o.value(&pw, &sw);
        pw[i] = orig;
        dp.push((plus - minus) / two_h);
    }
    let mut ds = Vec::with_capacity(s.len());
    for i in 0..s.len() {
        let orig = sw[i];
        sw[i] = orig + h;
        let plus = o.value(&pw, &sw);
        sw[i] = orig - h;
        let minus = o.value(&pw, &sw);
        sw[i] = orig;
        ds.push((plus - minus) / two_h);
    }
    let g = PhaseGradient { dp, ds };
    if g.is_finite() {
        Ok(g)
    } else {
        Err(Error::GradientUnavailable(
            "finite differences produced a non-finite value".into(),
        ))
    }
}

fn checked_gradient<T: Real, O: Observable<T> + ?Sized>(o: &O, p: &[T], s: &[T]) -> Result<PhaseGradient<T>> {
    let g = o.gradient(p, s)?;
    if g.dp.len() != p.len() || g.ds.len() != s.len() {
        return Err(Error::GradientUnavailable(format!(
            "gradient has shape ({}, {}), expected ({}, {})",
            g.dp.len(),
            g.ds.len(),
            p.len(),
            s.len()
        )));
    }
    if !g.is_finite() {
        return Err(Error::GradientUnavailable("non-finite gradient".into()));
    }
    Ok(g)
}

/// Observable backed by a closure, differentiated numerically.
pub struct FnObservable<F>(pub F);

impl<T: Real, F> Observable<T> for FnObservable<F>
where
    F: Fn(&[T], &[T]) -> T + Send + Sync,
{
    fn value(&self, p: &[T], s: &[T]) -> T {
        (self.0)(p, s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant<T>(pub T);

impl<T: Real> Observable<T> for Constant<T> {
    fn value(&self, _p: &[T], _s: &[T]) -> T {
        self.0
    }
    fn gradient(&self, p: &[T], s: &[T]) -> Result<PhaseGradient<T>> {
        Ok(PhaseGradient {
            dp: vec![T::zero(); p.len()],
            ds: vec![T::zero(); s.len()],
        })
    }
}

/// The coordinate function `P^i` or `S^i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coordinate {
    P(usize),
    S(usize),
}

impl<T: Real> Observable<T> for Coordinate {
    fn value(&self, p: &[T], s: &[T]) -> T {
        match *self {
            Coordinate::P(i) => p[i],
            Coordinate::S(i) => s[i],
        }
    }
    fn gradient(&self, p: &[T], s: &[T]) -> Result<PhaseGradient<T>> {
        let mut g = PhaseGradient {
            dp: vec![T::zero(); p.len()],
            ds: vec![T::zero(); s.len()],
        };
        match *self {
            Coordinate::P(i) => g.dp[i] = T::one(),
            Coordinate::S(i) => g.ds[i] = T::one(),
        }
        Ok(g)
    }
}

/// The observable `{f, g}`, differentiated numerically.
pub struct Bracket<F, G> {
    pub f: F,
    pub g: G,
}

impl<T: Real, F: Observable<T>, G: Observable<T>> Observable<T> for Bracket<F, G> {
    fn value(&self, p: &[T], s: &[T]) -> T {
        bracket_raw(&self.f, &self.g, p, s).unwrap_or_else(|_| T::nan())
    }
}

/// The constant symplectic form `[[0, 1], [-1, 0]]` on `2n` coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymplecticForm {
    n: usize,
}

impl SymplecticForm {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn matrix<T: Real>(&self) -> Matrix<T> {
        let n = self.n;
        let zero = Matrix::zeros(n, n);
        let one = Matrix::identity(n);
        Matrix::from_blocks(&zero, &one, &-&one, &zero)
    }
}

fn bracket_raw<T: Real, F: Observable<T> + ?Sized, G: Observable<T> + ?Sized>(
    f: &F,
    g: &G,
    p: &[T],
    s: &[T],
) -> Result<T> {
    let gf = checked_gradient(f, p, s)?;
    let gg = checked_gradient(g, p, s)?;
    Ok((0..p.len()).map(|i| gf.dp[i] * gg.ds[i] - gf.ds[i] * gg.dp[i]).sum())
}

/// `{f, g} = sum_i (df/dP^i dg/dS^i - df/dS^i dg/dP^i)`.
pub fn poisson_bracket<T: Real, F: Observable<T> + ?Sized, G: Observable<T> + ?Sized>(
    f: &F,
    g: &G,
    x: &PhasePoint<T>,
) -> Result<T> {
    bracket_raw(f, g, x.p(), x.s())
}

/// `{f, g} = (grad f)^T Omega (grad g)`, evaluated with the explicit matrix.
pub fn bracket_via_omega<T: Real, F: Observable<T> + ?Sized, G: Observable<T> + ?Sized>(
    f: &F,
    g: &G,
    x: &PhasePoint<T>,
) -> Result<T> {
    let gf = checked_gradient(f, x.p(), x.s())?.to_vec();
    let gg = checked_gradient(g, x.p(), x.s())?.to_vec();
    let omega = SymplecticForm::new(x.dim()).matrix::<T>();
    Ok(omega.bilinear(&gf, &gg))
}

/// Sampled solution of Hamilton's equations.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub points: Vec<PhasePoint<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn last(&self) -> &PhasePoint<T> {
        self.points.last().expect("trajectory holds the initial point")
    }
}

/// Hamiltonian vector field `(dH/dS, -dH/dP)`.
fn vector_field<T: Real, H: Observable<T> + ?Sized>(h: &H, p: &[T], s: &[T], time: T) -> Result<(Vec<T>, Vec<T>)> {
    if let Some((index, &value)) = p.iter().enumerate().find(|(_, &v)| !(v > T::zero())) {
        return Err(Error::BoundaryExit {
            time: time.as_f64(),
            index,
            value: value.as_f64(),
        });
    }
    let g = checked_gradient(h, p, s)?;
    Ok((g.ds, g.dp.into_iter().map(|x| -x).collect()))
}

fn axpy<T: Real>(x: &[T], a: T, d: &[T]) -> Vec<T> {
    x.iter().zip(d).map(|(&xi, &di)| xi + a * di).collect()
}

/// Integrates `dP/dt = {P, H}`, `dS/dt = {S, H}` with fixed-step classical RK4.
///
/// Returns all `steps + 1` states. Leaving `[tol_boundary, 1]` is an error.
pub fn hamiltonian_flow<T: Real, H: Observable<T> + ?Sized>(
    h: &H,
    x0: &PhasePoint<T>,
    t: T,
    steps: usize,
) -> Result<Trajectory<T>> {
    assert!(steps > 0, "at least one integration step is required");
    let dt = t / T::from_count(steps);
    let half = dt / T::lit(2.0);
    let sixth = dt / T::lit(6.0);
    let two = T::lit(2.0);
    let lo = tol_boundary::<T>();
    let hi = T::one() + tol_norm::<T>();

    let mut p = x0.p().to_vec();
    let mut s = x0.s().to_vec();
    let mut times = Vec::with_capacity(steps + 1);
    let mut points = Vec::with_capacity(steps + 1);
    times.push(T::zero());
    points.push(x0.clone());

    for step in 0..steps {
        let t0 = dt * T::from_count(step);
        let (k1p, k1s) = vector_field(h, &p, &s, t0)?;
        let (k2p, k2s) = vector_field(h, &axpy(&p, half, &k1p), &axpy(&s, half, &k1s), t0 + half)?;
        let (k3p, k3s) = vector_field(h, &axpy(&p, half, &k2p), &axpy(&s, half, &k2s), t0 + half)?;
        let (k4p, k4s) = vector_field(h, &axpy(&p, dt, &k3p), &axpy(&s, dt, &k3s), t0 + dt)?;
        for i in 0..p.len() {
            p[i] += sixth * (k1p[i] + two * k2p[i] + two * k3p[i] + k4p[i]);
            s[i] += sixth * (k1s[i] + two * k2s[i] + two * k3s[i] + k4s[i]);
        }
        let t1 = t0 + dt;
        if let Some((index, &value)) = p.iter().enumerate().find(|(_, &v)| !(v >= lo && v <= hi)) {
            return Err(Error::BoundaryExit {
                time: t1.as_f64(),
                index,
                value: value.as_f64(),
            });
        }
        times.push(t1);
        points.push(PhasePoint::from_flow(p.clone(), s.clone()));
    }
    Ok(Trajectory { times, points })
}

/// Settings for [`check_admissible_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityOptions<T> {
    /// Bound on `|O(P, S + chi) - O(P, S)|`.
    pub gauge_tol: T,
    /// Values of `P^i` at which `dO/dS^i` is probed, in decreasing order.
    pub probes: Vec<T>,
    /// Minimum fitted exponent `d` in `|dO/dS^i| ~ (P^i)^d`.
    pub min_decay_exponent: T,
    /// Derivatives below this everywhere count as identically zero.
    pub zero_tol: T,
}

impl<T: Real> Default for AdmissibilityOptions<T> {
    fn default() -> Self {
        Self {
            gauge_tol: T::lit(1e-10).max(T::epsilon() * T::lit(1e3)),
            probes: vec![T::lit(1e-3), T::lit(1e-4), T::lit(1e-5)],
            min_decay_exponent: T::lit(0.25),
            zero_tol: T::lit(1e-12).max(T::epsilon() * T::lit(1e2)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaugeResidual<T> {
    pub sample: usize,
    pub chi: T,
    pub residual: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryDecay<T> {
    pub sample: usize,
    pub index: usize,
    /// `|dO/dS^index|` at each probe value of `P^index`.
    pub derivatives: Vec<T>,
    /// Least-squares slope of `ln |dO/dS|` against `ln P`; `None` when the
    /// derivative vanishes at every probe.
    pub exponent: Option<T>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport<T> {
    pub gauge: Vec<GaugeResidual<T>>,
    pub boundary: Vec<BoundaryDecay<T>>,
    pub gauge_pass: bool,
    pub boundary_pass: bool,
}

impl<T: Real> AdmissibilityReport<T> {
    pub fn pass(&self) -> bool {
        self.gauge_pass && self.boundary_pass
    }

    pub fn max_gauge_residual(&self) -> T {
        self.gauge.iter().fold(T::zero(), |m, g| m.max(g.residual))
    }
}

/// Checks the two admissibility conditions for an observable: invariance
/// under the global shift `S -> S + chi`, and `dO/dS^i -> 0` as `P^i -> 0`.
pub fn check_admissible<T: Real, O: Observable<T> + ?Sized>(
    o: &O,
    samples: &[PhasePoint<T>],
    chi_values: &[T],
) -> AdmissibilityReport<T> {
    check_admissible_with(o, samples, chi_values, &AdmissibilityOptions::default())
}

pub fn check_admissible_with<T: Real, O: Observable<T> + ?Sized>(
    o: &O,
    samples: &[PhasePoint<T>],
    chi_values: &[T],
    opts: &AdmissibilityOptions<T>,
) -> AdmissibilityReport<T> {
    let mut gauge = Vec::new();
    for (idx, x) in samples.iter().enumerate() {
        let base = o.value(x.p(), x.s());
        for &chi in chi_values {
            let shifted: Vec<T> = x.s().iter().map(|&v| v + chi).collect();
            let residual = (o.value(x.p(), &shifted) - base).abs();
            gauge.push(GaugeResidual {
                sample: idx,
                chi,
                residual: if residual.is_nan() { T::infinity() } else { residual },
            });
        }
    }
    let gauge_pass = gauge.iter().all(|g| g.residual < opts.gauge_tol);

    let mut boundary = Vec::new();
    for (idx, x) in samples.iter().enumerate() {
        let n = x.dim();
        if n < 2 {
            continue;
        }
        for i in 0..n {
            let derivatives: Vec<T> = opts
                .probes
                .iter()
                .map(|&eps| {
                    let p = squeeze_component(x.p(), i, eps);
                    o.gradient(&p, x.s())
                        .map(|g| g.ds[i].abs())
                        .unwrap_or_else(|_| T::infinity())
                })
                .collect();
            boundary.push(decay(idx, i, &opts.probes, derivatives, opts));
        }
    }
    let boundary_pass = boundary.iter().all(|b| b.pass);
    AdmissibilityReport {
        gauge,
        boundary,
        gauge_pass,
        boundary_pass,
    }
}

/// Moves `P^i` to `eps`, rescaling the other components to keep the total.
fn squeeze_component<T: Real>(p: &[T], i: usize, eps: T) -> Vec<T> {
    let rest = T::one() - p[i];
    let factor = (T::one() - eps) / rest;
    p.iter()
        .enumerate()
        .map(|(j, &v)| if j == i { eps } else { v * factor })
        .collect()
}

fn decay<T: Real>(
    sample: usize,
    index: usize,
    probes: &[T],
    derivatives: Vec<T>,
    opts: &AdmissibilityOptions<T>,
) -> BoundaryDecay<T> {
    if derivatives.iter().all(|d| d.is_finite() && *d <= opts.zero_tol) {
        return BoundaryDecay {
            sample,
            index,
            derivatives,
            exponent: None,
            pass: true,
        };
    }
    let finite = derivatives.iter().all(|d| d.is_finite() && *d > T::zero());
    let exponent = if finite {
        let xs: Vec<T> = probes.iter().map(|p| p.ln()).collect();
        let ys: Vec<T> = derivatives.iter().map(|d| d.ln()).collect();
        let k = T::from_count(xs.len());
        let mx = xs.iter().copied().sum::<T>() / k;
        let my = ys.iter().copied().sum::<T>() / k;
        let sxy: T = xs.iter().zip(&ys).map(|(&x, &y)| (x - mx) * (y - my)).sum();
        let sxx: T = xs.iter().map(|&x| (x - mx) * (x - mx)).sum();
        Some(sxy / sxx)
    } else {
        None
    };
    let decreasing = derivatives.windows(2).all(|w| w[1] <= w[0]);
    let pass = matches!(exponent, Some(e) if e >= opts.min_decay_exponent) && decreasing;
    BoundaryDecay {
        sample,
        index,
        derivatives,
        exponent,
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn point(p: &[f64], s: &[f64]) -> PhasePoint<f64> {
        PhasePoint::from_vecs(p.to_vec(), s.to_vec()).unwrap()
    }

    #[test]
    fn canonical_pairs() {
        let x = point(&[0.2, 0.3, 0.5], &[0.1, -0.4, 2.0]);
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { 1.0 } else { 0.0 };
                let pb = poisson_bracket(&Coordinate::P(i), &Coordinate::S(j), &x).unwrap();
                let om = bracket_via_omega(&Coordinate::P(i), &Coordinate::S(j), &x).unwrap();
                assert_eq!(pb, expected);
                assert_eq!(om, expected);
            }
        }
    }

    #[test]
    fn squared_probability_against_phase() {
        let x = point(&[0.3, 0.7], &[0.0, 0.0]);
        let f = FnObservable(|p: &[f64], _: &[f64]| p[0] * p[0]);
        let pb = poisson_bracket(&f, &Coordinate::S(0), &x).unwrap();
        assert_abs_diff_eq!(pb, 0.6, epsilon = 1e-9);
    }

    #[test]
    fn self_bracket_vanishes() {
        let x = point(&[0.3, 0.7], &[0.4, -1.0]);
        let f = FnObservable(|p: &[f64], s: &[f64]| p[0] * s[1].sin() + s[0] * s[0] * p[1]);
        assert_eq!(poisson_bracket(&f, &f, &x).unwrap(), 0.0);
        assert_abs_diff_eq!(bracket_via_omega(&f, &f, &x).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn omega_structure() {
        let om = SymplecticForm::new(3).matrix::<f64>();
        assert_eq!(om.transpose(), -&om);
        assert_eq!(&om * &om, -&Matrix::identity(6));
    }

    #[test]
    fn non_finite_gradient_is_reported() {
        let x = point(&[0.5, 0.5], &[0.0, 0.0]);
        let bad = FnObservable(|_: &[f64], _: &[f64]| f64::NAN);
        assert!(matches!(
            poisson_bracket(&bad, &Coordinate::S(0), &x),
            Err(Error::GradientUnavailable(_))
        ));
    }

    #[test]
    fn constant_hamiltonian_does_not_move() {
        let x0 = point(&[0.2, 0.8], &[1.0, -2.0]);
        let traj = hamiltonian_flow(&Constant(3.5), &x0, 1.0, 50).unwrap();
        assert_eq!(traj.points.len(), 51);
        assert!(traj.points.iter().all(|x| x == &x0));
    }

    #[test]
    fn phase_independent_hamiltonian_keeps_probabilities() {
        let x0 = point(&[0.2, 0.8], &[1.0, -2.0]);
        let h = FnObservable(|p: &[f64], _: &[f64]| p[0] * p[0] + 3.0 * p[1]);
        let traj = hamiltonian_flow(&h, &x0, 1.0, 100).unwrap();
        let last = traj.last();
        assert_eq!(last.p(), x0.p());
        // dS/dt = -dH/dP is constant here
        assert_abs_diff_eq!(last.s()[0], 1.0 - 0.4, epsilon = 1e-8);
        assert_abs_diff_eq!(last.s()[1], -2.0 - 3.0, epsilon = 1e-8);
    }

    #[test]
    fn leaving_the_simplex_is_an_error() {
        // dP^0/dt = dH/dS^0 = -1 drives P^0 through zero
        let h = FnObservable(|_: &[f64], s: &[f64]| s[1] - s[0]);
        let x0 = point(&[0.1, 0.9], &[0.0, 0.0]);
        match hamiltonian_flow(&h, &x0, 1.0, 100) {
            Err(Error::BoundaryExit { time, index, .. }) => {
                assert_eq!(index, 0);
                assert!(time > 0.09 && time < 0.12, "exit at {time}");
            }
            other => panic!("expected BoundaryExit, got {other:?}"),
        }
    }

    #[test]
    fn admissibility_of_simple_observables() {
        let samples = vec![point(&[0.2, 0.3, 0.5], &[0.1, 0.2, 0.3])];
        let chi: Vec<f64> = GAUGE_TEST_VALUES.to_vec();

        let phase = check_admissible(&Coordinate::S(0), &samples, &chi);
        assert!(!phase.gauge_pass);
        assert!(!phase.pass());

        let total = FnObservable(|p: &[f64], _: &[f64]| p.iter().sum::<f64>());
        let report = check_admissible(&total, &samples, &chi);
        assert!(report.pass());
        assert!(report.boundary.iter().all(|b| b.exponent.is_none()));
    }

    #[test]
    fn decay_exponent_of_sqrt_dependence() {
        // O = sqrt(P^0 P^1) cos(S^0 - S^1): dO/dS^i ~ sqrt(P^i)
        let o = FnObservable(|p: &[f64], s: &[f64]| (p[0] * p[1]).sqrt() * (s[0] - s[1]).cos());
        let samples = vec![point(&[0.4, 0.6], &[0.3, -0.5])];
        let report = check_admissible(&o, &samples, &[0.1, 1.0]);
        assert!(report.pass(), "{report:?}");
        for b in &report.boundary {
            assert_abs_diff_eq!(b.exponent.unwrap(), 0.5, epsilon = 1e-3);
        }
    }
}
