use infokahler::{
    classify_transformation, dirac_product, flat_line_element, hamiltonian_flow, madelung, pullback_tensors,
    pullback_tensors_in_gauge, sampling, wave_line_element, Alpha, BilinearObservable, ComplexTensors, Gauge,
    MatrixF64, PhasePointF64, WaveVector,
};
use num_complex::Complex;
use rand::Rng;
use serde_json::json;

use super::{min_probability_along, phase_coordinates, Context};
use crate::report::{Expectation, Record};

pub const FLOW_STEPS: usize = 10_000;
/// Minimum `P^k` along the exact evolution for an initial state to be used.
pub const MIN_INTERIOR: f64 = 0.02;

fn flat_record(
    ctx: &Context<'_>,
    id: &str,
    a: f64,
    gauge_name: &str,
    gauge: Gauge<f64>,
    build: impl Fn(&PhasePointF64) -> infokahler::Result<ComplexTensors<f64>>,
) -> Record {
    let mut rng = ctx.rng(id);
    let points = ctx.trials();
    let (mut omega, mut metric, mut j) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..points {
        let n = rng.random_range(1..=ctx.scenario.n.max(1));
        let x: PhasePointF64 = sampling::phase_point(&mut rng, n, 0.5, 3.0);
        match build(&x) {
            Ok(t) => {
                let r = t.flat_residuals();
                omega = omega.max(r.omega);
                metric = metric.max(r.metric);
                j = j.max(r.complex_structure);
            }
            Err(_) => {
                omega = f64::INFINITY;
            }
        }
    }
    Record::below(
        id,
        json!({
            "a": a,
            "gauge": gauge_name,
            "lambda": gauge.lambda,
            "gamma": gauge.gamma,
            "scale": ctx.alpha().value() / gauge.lambda,
            "points": points,
            "omega_residual": omega,
            "metric_residual": metric,
            "complex_structure_residual": j,
        }),
        omega.max(metric).max(j),
        ctx.tol.get("complex_flat"),
    )
}

/// A random Hermitian matrix and a normalized state whose exact evolution
/// stays at least [`MIN_INTERIOR`] from the simplex boundary on `[0, t]`.
pub(crate) fn interior_problem<R: Rng>(
    rng: &mut R,
    n: usize,
    t: f64,
    alpha: Alpha<f64>,
) -> (infokahler::ComplexMatrixF64, Vec<Complex<f64>>) {
    loop {
        let h = sampling::hermitian(rng, n);
        let psi0 = sampling::wave_vector(rng, n);
        if min_probability_along(&h, &psi0, t, alpha) >= MIN_INTERIOR {
            return (h, psi0);
        }
    }
}

pub fn run(ctx: &Context<'_>) -> Vec<Record> {
    let alpha = ctx.alpha();
    let a = ctx.scenario.a_param;
    let mut out = Vec::new();

    let mut a_values = vec![0.0];
    if a != 0.0 {
        a_values.push(a);
    }
    for &av in &a_values {
        out.push(flat_record(
            ctx,
            &format!("complex.flat_tensors[a={av}]"),
            av,
            "modified",
            Gauge::modified(av),
            |x| pullback_tensors(x, alpha, av),
        ));
    }
    if a != 0.0 {
        let g = Gauge::holomorphic(a);
        out.push(flat_record(
            ctx,
            &format!("complex.flat_tensors_holomorphic[a={a}]"),
            a,
            "holomorphic",
            g,
            |x| pullback_tensors_in_gauge(x, alpha, a, g),
        ));
    }

    let id = "complex.schrodinger";
    let mut rng = ctx.rng(id);
    let cases = ctx.trials().min(4);
    let mut worst = 0.0f64;
    let mut dirac_drift = 0.0f64;
    for case in 0..cases {
        let n = 2 + case % 2;
        let (h, psi0) = interior_problem(&mut rng, n, 1.0, alpha);
        let (p, s) = phase_coordinates(&psi0, alpha);
        let x0 = PhasePointF64::from_vecs(p, s).expect("normalized state");
        let obs = BilinearObservable::new(h.clone(), alpha).expect("hermitian");
        match hamiltonian_flow(&obs, &x0, 1.0, FLOW_STEPS) {
            Ok(traj) => {
                let psi = madelung(traj.last(), alpha).expect("interior");
                let exact = infokahler::schrodinger_evolve(&h, &psi0, 1.0, alpha);
                for (u, v) in psi.components().iter().zip(&exact) {
                    worst = worst.max((u - v).norm());
                }
                // <psi(t)|psi_exact(t)> stays 1 for unitary evolution
                let reference = WaveVector::new(exact, alpha, Gauge::plain());
                let overlap = dirac_product(&psi, &reference).expect("same gauge");
                dirac_drift = dirac_drift.max((overlap - Complex::new(1.0, 0.0)).norm());
            }
            Err(_) => worst = f64::INFINITY,
        }
    }
    out.push(Record::below(
        id,
        json!({"cases": cases, "dims": [2, 3], "t": 1.0, "steps": FLOW_STEPS, "min_interior": MIN_INTERIOR}),
        worst,
        ctx.tol.get("complex_schrodinger"),
    ));
    out.push(Record::below(
        "complex.dirac_drift",
        json!({"cases": cases, "t": 1.0}),
        dirac_drift,
        ctx.tol.get("complex_dirac_drift"),
    ));

    let id = "complex.line_element";
    let mut rng = ctx.rng(id);
    let mut worst = 0.0f64;
    let h = 1e-6;
    for _ in 0..ctx.trials() {
        let n = rng.random_range(1..=ctx.scenario.n.max(1));
        let x: PhasePointF64 = sampling::phase_point(&mut rng, n, 0.5, 3.0);
        let mut d: Vec<f64> = (0..2 * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mean = d[..n].iter().sum::<f64>() / n as f64;
        d[..n].iter_mut().for_each(|v| *v -= mean);
        let shifted = |sign: f64| {
            let c: Vec<f64> = x
                .to_coordinates()
                .iter()
                .zip(&d)
                .map(|(c, v)| c + sign * h * v)
                .collect();
            let p = c[..n].to_vec();
            let s = c[n..].to_vec();
            madelung(
                &PhasePointF64::new(infokahler::ProbabilityVectorF64::from_weights(&p).expect("positive"), s)
                    .expect("dims"),
                alpha,
            )
        };
        let residual = match (shifted(1.0), shifted(-1.0), madelung(&x, alpha)) {
            (Ok(plus), Ok(minus), Ok(w)) => {
                let dpsi: Vec<Complex<f64>> = plus
                    .components()
                    .iter()
                    .zip(minus.components())
                    .map(|(u, v)| (u - v) / (2.0 * h))
                    .collect();
                let lhs = flat_line_element(&x, &d[..n], &d[n..], alpha, 0.0).unwrap_or(f64::NAN);
                let rhs = wave_line_element(&w, &dpsi).unwrap_or(f64::NAN);
                (lhs - rhs).abs() / (1.0 + lhs.abs())
            }
            _ => f64::INFINITY,
        };
        worst = worst.max(residual);
    }
    out.push(Record::below(
        id,
        json!({"trials": ctx.trials(), "a": 0.0}),
        worst,
        ctx.tol.get("complex_line_element"),
    ));

    let id = "complex.classification";
    let mut rng = ctx.rng(id);
    let per_class = ctx.trials();
    let mut errors = 0usize;
    for _ in 0..per_class {
        let n = rng.random_range(1..=4);
        let cases: [(MatrixF64, [bool; 3]); 3] = [
            (sampling::unitary_real(&mut rng, n), [true, true, true]),
            (sampling::squeeze(&mut rng, n), [true, false, false]),
            (sampling::antiunitary(&mut rng, n), [false, true, false]),
        ];
        for (m, expected) in &cases {
            let c = classify_transformation(m, alpha);
            if [c.symplectic, c.orthogonal, c.unitary] != *expected {
                errors += 1;
            }
        }
    }
    out.push(Record::new(
        id,
        json!({"per_class": per_class, "classes": ["unitary", "squeeze", "antiunitary"]}),
        errors as f64,
        0.0,
        Expectation::AtMost,
    ));
    out
}
