use infokahler::{
    build_scalar_structure, build_structure, compatible_from_symmetric, flat_line_element, sampling, verify_kahler,
    Error, MatrixF64, PhasePointF64,
};
use rand::Rng;
use serde_json::json;

use super::Context;
use crate::report::{Expectation, Record};

pub const MAX_DIM: usize = 16;

pub fn run(ctx: &Context<'_>) -> Vec<Record> {
    let alpha = ctx.alpha();
    let trials = ctx.trials();
    let a = ctx.scenario.a_param;
    let mut out = Vec::new();

    let id = "kahler.conditions";
    let mut rng = ctx.rng(id);
    let mut worst = 0.0f64;
    let mut rejected = 0usize;
    for _ in 0..trials {
        let n = rng.random_range(1..=MAX_DIM);
        let p = sampling::probability(&mut rng, n, 0.5);
        let b: MatrixF64 = sampling::symmetric_matrix(&mut rng, n);
        let am = compatible_from_symmetric(&b, &p);
        match build_structure(&p, alpha, &am) {
            Ok(s) => worst = worst.max(verify_kahler(&s).max()),
            Err(_) => rejected += 1,
        }
    }
    let residual = if rejected > 0 { f64::INFINITY } else { worst };
    out.push(Record::below(
        id,
        json!({"trials": trials, "max_dim": MAX_DIM, "rejected": rejected, "alpha": alpha.value()}),
        residual,
        ctx.tol.get("kahler_residual"),
    ));

    let id = "kahler.scalar_positive_definite";
    let mut rng = ctx.rng(id);
    let mut failures = 0usize;
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let n = rng.random_range(1..=MAX_DIM);
        let p = sampling::probability(&mut rng, n, 0.5);
        match build_scalar_structure(&p, alpha, a) {
            Ok(s) => {
                worst = worst.max(verify_kahler(&s).max());
                if !s.metric().is_positive_definite() {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    out.push(Record::new(
        id,
        json!({"trials": trials, "a": a, "max_kahler_residual": worst}),
        failures as f64,
        0.0,
        Expectation::AtMost,
    ));

    let id = "kahler.incompatible_rejected";
    let mut rng = ctx.rng(id);
    let mut accepted = 0usize;
    for _ in 0..trials {
        let n = rng.random_range(2..=MAX_DIM);
        // far from uniform so a symmetric off-diagonal A cannot be compatible
        let mut p = sampling::probability::<f64, _>(&mut rng, n, 0.5).into_vec();
        p[0] += 0.5;
        let p = infokahler::ProbabilityVectorF64::from_weights(&p).expect("positive");
        let am = sampling::symmetric_matrix(&mut rng, n);
        if !matches!(build_structure(&p, alpha, &am), Err(Error::IncompatibleA { .. })) {
            accepted += 1;
        }
    }
    out.push(Record::new(
        id,
        json!({"trials": trials}),
        accepted as f64,
        0.0,
        Expectation::AtMost,
    ));

    let id = "kahler.line_element";
    let mut rng = ctx.rng(id);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let n = rng.random_range(1..=MAX_DIM);
        let x: PhasePointF64 = sampling::phase_point(&mut rng, n, 0.5, 3.0);
        let d: Vec<f64> = (0..2 * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let s = build_scalar_structure(x.probability(), alpha, a).expect("interior");
        let direct = s.metric().bilinear(&d, &d);
        let closed = flat_line_element(&x, &d[..n], &d[n..], alpha, a).unwrap_or(f64::NAN);
        worst = worst.max((direct - closed).abs() / (1.0 + direct.abs()));
    }
    out.push(Record::below(
        id,
        json!({"trials": trials, "a": a}),
        worst,
        ctx.tol.get("kahler_residual"),
    ));
    out
}
