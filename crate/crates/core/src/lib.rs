//! Information geometry on the probability simplex, Markov embeddings, and the
//! Kähler structure of the `(P, S)` phase space of discrete quantum mechanics.
//!
//! Everything is generic over the scalar type through [`Real`] (implemented
//! for `f32` and `f64`). The aliases at the crate root fix the scalar to `f64`.
//!
//! ```
//! use infokahler::{Alpha, ProbabilityVectorF64, TangentVector, line_element_sq};
//!
//! let p = ProbabilityVectorF64::new(vec![0.5, 0.5]).unwrap();
//! let dp = TangentVector::new(vec![1e-3, -1e-3], p.clone()).unwrap();
//! let ds2 = line_element_sq(&p, &dp, Alpha::new(1.0).unwrap()).unwrap();
//! assert!((ds2 - 2e-6).abs() < 1e-18);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod complex_coords;
pub mod error;
pub mod generalized_markov;
pub mod kahler;
pub mod linalg;
pub mod markov;
pub mod phase;
pub mod sampling;
pub mod scalar;
pub mod simplex;

pub use complex_coords::{
    analytic_jacobian, classify_transformation, dirac_product, dirac_product_via_tensors, doebner_goldin, flat_form,
    gauged_madelung, inverse_doebner_goldin, inverse_gauged_madelung, inverse_madelung, madelung, modified_madelung,
    numerical_jacobian, pullback_tensors, pullback_tensors_analytic, pullback_tensors_in_gauge, schrodinger_evolve,
    wave_line_element, BilinearObservable, Classification, ComplexTensors, FlatResiduals, Gauge, WaveVector,
};
pub use error::{Error, Result};
pub use generalized_markov::{
    generating_function, pullback_metric_residual, verify_dynamics_preservation, BMatrix, CanonicalSplitMap,
    ConstraintPair, DynamicsReport, SplitHamiltonian,
};
pub use kahler::{
    build_scalar_structure, build_structure, compatibility_residual, compatible_from_symmetric, flat_line_element,
    kahler_residuals, verify_kahler, KahlerResiduals, KahlerStructure, MetricBlocks,
};
pub use linalg::{ComplexMatrix, Matrix};
pub use markov::{preservation_residual, MarkovMap, SimplexMetric, SplitMap};
pub use phase::{
    check_admissible, check_admissible_with, hamiltonian_flow, poisson_bracket, AdmissibilityOptions,
    AdmissibilityReport, Observable, PhaseGradient, PhasePoint, SymplecticForm, Trajectory,
};
pub use scalar::Real;
pub use simplex::{
    information_metric, inner_product, line_element_sq, metric_diagonal, Alpha, ProbabilityVector, TangentVector,
};

pub type AlphaF64 = Alpha<f64>;
pub type ProbabilityVectorF64 = ProbabilityVector<f64>;
pub type ProbabilityVectorF32 = ProbabilityVector<f32>;
pub type TangentVectorF64 = TangentVector<f64>;
pub type MatrixF64 = Matrix<f64>;
pub type ComplexMatrixF64 = ComplexMatrix<f64>;
pub type MarkovMapF64 = MarkovMap<f64>;
pub type SplitMapF64 = SplitMap<f64>;
pub type PhasePointF64 = PhasePoint<f64>;
pub type PhasePointF32 = PhasePoint<f32>;
pub type KahlerStructureF64 = KahlerStructure<f64>;
pub type CanonicalSplitMapF64 = CanonicalSplitMap<f64>;
pub type BMatrixF64 = BMatrix<f64>;
pub type WaveVectorF64 = WaveVector<f64>;
pub type GaugeF64 = Gauge<f64>;
