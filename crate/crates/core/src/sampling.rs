//! Random instances for property checks and verification sweeps.
//!
//! Every sampler takes the generator explicitly, so a seeded generator gives
//! a reproducible stream.

use num_complex::Complex;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::generalized_markov::BMatrix;
use crate::linalg::{ComplexMatrix, Matrix};
use crate::markov::MarkovMap;
use crate::phase::PhasePoint;
use crate::scalar::Real;
use crate::simplex::{inner_product, Alpha, ProbabilityVector, TangentVector};

/// Flat Dirichlet sample blended with the uniform distribution:
/// `(1 - mix) D + mix / n`. A positive `mix` bounds every entry below by `mix / n`.
pub fn probability<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize, mix: f64) -> ProbabilityVector<T> {
    let w: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = w.iter().sum();
    let nf = n as f64;
    let p: Vec<T> = w.iter().map(|x| T::lit((1.0 - mix) * x / total + mix / nf)).collect();
    ProbabilityVector::from_weights(&p).expect("positive weights")
}

/// Gaussian tangent vector at `base`, projected onto `sum v = 0`.
pub fn tangent<T: Real, R: Rng + ?Sized>(rng: &mut R, base: &ProbabilityVector<T>) -> TangentVector<T> {
    let n = base.dim();
    let raw: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let mean = raw.iter().sum::<f64>() / n as f64;
    let v = raw.iter().map(|x| T::lit(x - mean)).collect();
    TangentVector::new(v, base.clone()).expect("projected onto the tangent space")
}

/// As [`tangent`], rescaled to unit length in the information metric.
/// For `n = 1` the tangent space is `{0}` and the zero vector is returned.
pub fn unit_tangent<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    base: &ProbabilityVector<T>,
    alpha: Alpha<T>,
) -> TangentVector<T> {
    if base.dim() < 2 {
        return TangentVector::zero(base.clone());
    }
    loop {
        let v = tangent(rng, base);
        let norm = inner_product(&v, &v, base, alpha).expect("interior base").sqrt();
        if norm > T::zero() {
            let scaled = v.as_slice().iter().map(|&x| x / norm).collect();
            return TangentVector::new(scaled, base.clone()).expect("scaled tangent");
        }
    }
}

/// `P` from [`probability`] and `S` uniform in `[-s_range, s_range]`.
pub fn phase_point<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize, mix: f64, s_range: f64) -> PhasePoint<T> {
    let p = probability(rng, n, mix);
    let s = (0..n).map(|_| T::lit(rng.random_range(-s_range..=s_range))).collect();
    PhasePoint::new(p, s).expect("matching dimensions")
}

/// Uniform in `[0.05, 0.95]`.
pub fn split_parameter<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::lit(rng.random_range(0.05..=0.95))
}

/// A Markov map from `n` to `target` components: a random partition with
/// flat Dirichlet weights on each cell.
pub fn markov_map<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize, target: usize) -> MarkovMap<T> {
    assert!(
        target >= n && n > 0,
        "target dimension must be at least the source dimension"
    );
    let mut owner: Vec<usize> = (0..n).chain((n..target).map(|_| rng.random_range(0..n))).collect();
    owner.shuffle(rng);
    let mut partition = vec![Vec::new(); n];
    for (a, &i) in owner.iter().enumerate() {
        partition[i].push(a);
    }
    let mut q = Matrix::zeros(n, target);
    for (i, block) in partition.iter().enumerate() {
        let w = probability::<f64, _>(rng, block.len(), 0.0);
        for (&a, &x) in block.iter().zip(w.as_slice()) {
            q[(i, a)] = T::lit(x);
        }
    }
    MarkovMap::new(partition, q).expect("valid by construction")
}

/// Symmetric matrix with diagonal in `[-1, 1]` and off-diagonal magnitudes in
/// `[0.1, 1]` with random sign.
pub fn symmetric_matrix<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix<T> {
    let mut b = Matrix::zeros(n, n);
    for i in 0..n {
        b[(i, i)] = T::lit(rng.random_range(-1.0..=1.0));
        for j in i + 1..n {
            let mag: f64 = rng.random_range(0.1..=1.0);
            let v = if rng.random_bool(0.5) { mag } else { -mag };
            b[(i, j)] = T::lit(v);
            b[(j, i)] = T::lit(v);
        }
    }
    b
}

/// A non-scalar `B` (for `n >= 2` it always has nonzero off-diagonal entries).
pub fn b_matrix<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> BMatrix<T> {
    BMatrix::new(symmetric_matrix(rng, n)).expect("symmetric by construction")
}

fn gaussian_complex<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    Complex::new(T::lit(rng.sample(StandardNormal)), T::lit(rng.sample(StandardNormal)))
}

/// Hermitian matrix `(X + X^dagger) / 2` with Gaussian `X`.
pub fn hermitian<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix<T> {
    let x = ComplexMatrix::from_fn(n, n, |_, _| gaussian_complex(rng));
    (&x + &x.adjoint()).scale(Complex::new(T::lit(0.5), T::zero()))
}

/// Normalized Gaussian wave vector.
pub fn wave_vector<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex<T>> {
    let v: Vec<Complex<T>> = (0..n).map(|_| gaussian_complex(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Unitary from Gram-Schmidt orthonormalisation of Gaussian columns.
pub fn unitary<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix<T> {
    let mut cols: Vec<Vec<Complex<T>>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<Complex<T>> = (0..n).map(|_| gaussian_complex(rng)).collect();
        // two passes keep the columns orthogonal to working precision
        for _ in 0..2 {
            for c in &cols {
                let proj = c
                    .iter()
                    .zip(&v)
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b);
                for (vi, ci) in v.iter_mut().zip(c) {
                    *vi -= proj * ci;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if norm > T::lit(1e-6) {
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// Real `2n x 2n` matrix acting on `(Re psi, Im psi)` for a unitary `U`.
pub fn unitary_real<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix<T> {
    unitary(rng, n).to_real_representation()
}

/// Symplectic but not orthogonal: a squeeze `diag(c, 1/c)` with
/// `c` in `[1.2, 3]`, sandwiched between two unitaries.
pub fn squeeze<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix<T> {
    let c: Vec<f64> = (0..n).map(|_| rng.random_range(1.2..=3.0)).collect();
    let d: Vec<T> = c
        .iter()
        .map(|&x| T::lit(x))
        .chain(c.iter().map(|&x| T::lit(1.0 / x)))
        .collect();
    let left = unitary_real::<T, _>(rng, n);
    let right = unitary_real::<T, _>(rng, n);
    &(&left * &Matrix::from_diagonal(&d)) * &right
}

/// Orthogonal but not symplectic: complex conjugation followed by a unitary.
pub fn antiunitary<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix<T> {
    let conj: Vec<T> = (0..2 * n).map(|i| if i < n { T::one() } else { -T::one() }).collect();
    &unitary_real::<T, _>(rng, n) * &Matrix::from_diagonal(&conj)
}
