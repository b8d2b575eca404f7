use infokahler::{information_metric, inner_product, line_element_sq, sampling, Alpha, Error, ProbabilityVectorF64};
use rand::Rng;
use serde_json::json;

use super::Context;
use crate::report::{Expectation, Record};

pub fn run(ctx: &Context<'_>) -> Vec<Record> {
    let n = ctx.scenario.n;
    let alpha = ctx.alpha();
    let trials = ctx.trials();
    let mut out = Vec::new();

    let id = "simplex.positivity";
    let mut rng = ctx.rng(id);
    let mut violations = 0usize;
    for _ in 0..trials {
        let p: ProbabilityVectorF64 = sampling::probability(&mut rng, n, 0.1);
        let v = sampling::tangent(&mut rng, &p);
        let q = inner_product(&v, &v, &p, alpha).unwrap_or(f64::NAN);
        let nonzero = v.as_slice().iter().any(|&x| x != 0.0);
        if q.is_nan() || q < 0.0 || (nonzero && q <= 0.0) {
            violations += 1;
        }
    }
    out.push(Record::new(
        id,
        json!({"n": n, "trials": trials}),
        violations as f64,
        0.0,
        Expectation::AtMost,
    ));

    let id = "simplex.line_element";
    let mut rng = ctx.rng(id);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let p: ProbabilityVectorF64 = sampling::probability(&mut rng, n, 0.1);
        let v = sampling::tangent(&mut rng, &p);
        let a = line_element_sq(&p, &v, alpha).unwrap_or(f64::NAN);
        let b = inner_product(&v, &v, &p, alpha).unwrap_or(f64::NAN);
        worst = worst.max((a - b).abs() / (1.0 + b.abs()));
    }
    out.push(Record::below(
        id,
        json!({"n": n, "trials": trials}),
        worst,
        ctx.tol.get("simplex_line_element"),
    ));

    let id = "simplex.alpha_linearity";
    let mut rng = ctx.rng(id);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let p: ProbabilityVectorF64 = sampling::probability(&mut rng, n, 0.1);
        let c: f64 = rng.random_range(0.1..10.0);
        let scaled = Alpha::new(c * alpha.value()).expect("positive");
        let g1 = information_metric(&p, alpha).map(|g| g.scale(c));
        let g2 = information_metric(&p, scaled);
        worst = match (g1, g2) {
            (Ok(a), Ok(b)) => worst.max(a.max_abs_diff(&b) / b.max_abs()),
            _ => f64::INFINITY,
        };
    }
    out.push(Record::below(
        id,
        json!({"n": n, "trials": trials}),
        worst,
        ctx.tol.get("simplex_alpha_linearity"),
    ));

    if n >= 2 {
        let id = "simplex.boundary_rejection";
        let mut accepted = 0usize;
        for i in 0..n {
            let mut p = vec![1.0 / (n - 1) as f64; n];
            p[i] = 0.0;
            let p = ProbabilityVectorF64::new(p).expect("on the simplex");
            if !matches!(information_metric(&p, alpha), Err(Error::DegenerateProbability { .. })) {
                accepted += 1;
            }
        }
        out.push(Record::new(
            id,
            json!({"n": n}),
            accepted as f64,
            0.0,
            Expectation::AtMost,
        ));
    }
    out
}
