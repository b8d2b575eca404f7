use infokahler::{pullback_metric_residual, sampling, BMatrixF64, CanonicalSplitMapF64, ProbabilityVectorF64};
use serde_json::json;

use super::Context;
use crate::config::BCandidates;
use crate::report::Record;

/// Base points per candidate.
const SAMPLES: usize = 4;

const CONVENTION: &str = "split row and column duplicated; the two split halves are uncoupled";

pub fn run(ctx: &Context<'_>) -> Vec<Record> {
    let alpha = ctx.alpha();
    let m = ctx.scenario.n.max(2);
    let which = ctx.scenario.b_candidates;
    let mut out = Vec::new();

    for &k in &ctx.scenario.k_values {
        let map = CanonicalSplitMapF64::new(m, k).expect("validated k");

        if which != BCandidates::OffDiagonal {
            let id = format!("uniqueness.scalar[k={k}]");
            let mut rng = ctx.rng(&id);
            let samples: Vec<ProbabilityVectorF64> =
                (0..SAMPLES).map(|_| sampling::probability(&mut rng, m, 0.5)).collect();
            let values = [0.0, ctx.scenario.a_param, -0.7, 2.5];
            let worst = values
                .iter()
                .map(|&b| {
                    pullback_metric_residual(&BMatrixF64::scalar(m, b), &map, &samples, alpha).unwrap_or(f64::INFINITY)
                })
                .fold(0.0f64, f64::max);
            out.push(Record::below(
                id,
                json!({"k": k, "m": m, "b_values": values.to_vec(), "samples": SAMPLES}),
                worst,
                ctx.tol.get("uniqueness_scalar"),
            ));
        }

        if which != BCandidates::Scalar {
            let id = format!("uniqueness.off_diagonal[k={k}]");
            let mut rng = ctx.rng(&id);
            let trials = ctx.trials();
            let mut weakest = f64::INFINITY;
            for _ in 0..trials {
                let b: BMatrixF64 = sampling::b_matrix(&mut rng, m);
                let samples: Vec<ProbabilityVectorF64> =
                    (0..SAMPLES).map(|_| sampling::probability(&mut rng, m, 0.5)).collect();
                let r = pullback_metric_residual(&b, &map, &samples, alpha).unwrap_or(f64::INFINITY);
                weakest = weakest.min(r);
            }
            out.push(Record::above(
                id,
                json!({"k": k, "m": m, "candidates": trials, "samples": SAMPLES, "b_tilde_convention": CONVENTION}),
                weakest,
                ctx.tol.get("uniqueness_falsification"),
            ));
        }
    }
    out
}
