use infokahler::{preservation_residual, sampling, MarkovMapF64, SimplexMetric, SplitMapF64};
use rand::Rng;
use serde_json::json;

use super::Context;
use crate::report::{Expectation, Record};

/// Tangent pairs per map for the flat-metric control.
const FLAT_PAIRS: usize = 8;

pub fn run(ctx: &Context<'_>) -> Vec<Record> {
    let alpha = ctx.alpha();
    let info = SimplexMetric::Information(alpha);
    let trials = ctx.trials();
    let max_source = ctx.scenario.n.max(2);
    let mut out = Vec::new();

    let id = "markov.metric_preservation";
    let mut rng = ctx.rng(id);
    let mut worst = 0.0f64;
    let mut worst_total = 0.0f64;
    for _ in 0..trials {
        let m = rng.random_range(2..=max_source);
        let target = m + rng.random_range(0..=m + 2);
        let map: MarkovMapF64 = sampling::markov_map(&mut rng, m, target);
        let p = sampling::probability(&mut rng, m, 0.5);
        let a = sampling::unit_tangent(&mut rng, &p, alpha);
        let b = sampling::unit_tangent(&mut rng, &p, alpha);
        worst = worst.max(preservation_residual(&map, info, &a, &b).unwrap_or(f64::INFINITY));
        let total = map.embed(&p).map(|q| (q.total() - 1.0).abs()).unwrap_or(f64::INFINITY);
        worst_total = worst_total.max(total);
    }
    out.push(Record::below(
        id,
        json!({"trials": trials, "max_source_dim": max_source, "alpha": alpha.value()}),
        worst,
        ctx.tol.get("markov_preservation"),
    ));
    out.push(Record::below(
        "markov.embed_total",
        json!({"trials": trials}),
        worst_total,
        ctx.tol.get("markov_total"),
    ));

    let id = "markov.flat_falsification";
    let mut rng = ctx.rng(id);
    let threshold = ctx.tol.get("markov_flat_threshold");
    let mut violating = 0usize;
    for _ in 0..trials {
        let m = rng.random_range(2..=max_source);
        let k = loop {
            let k: f64 = sampling::split_parameter(&mut rng);
            if (k - 0.5).abs() > 1e-3 {
                break k;
            }
        };
        let map = SplitMapF64::last(m, k).expect("valid split").to_markov_map();
        let p = sampling::probability(&mut rng, m, 0.5);
        let mut map_residual = 0.0f64;
        for _ in 0..FLAT_PAIRS {
            let a = sampling::unit_tangent(&mut rng, &p, alpha);
            let b = sampling::unit_tangent(&mut rng, &p, alpha);
            let r = preservation_residual(&map, SimplexMetric::Flat, &a, &b).unwrap_or(0.0);
            map_residual = map_residual.max(r);
        }
        if map_residual > threshold {
            violating += 1;
        }
    }
    out.push(Record::new(
        id,
        json!({"trials": trials, "threshold": threshold, "tangent_pairs": FLAT_PAIRS}),
        violating as f64 / trials as f64,
        ctx.tol.get("markov_flat_fraction"),
        Expectation::AtLeast,
    ));

    for (i, map) in ctx.scenario.markov_maps().iter().enumerate() {
        let id = format!("markov.scenario_map[{i}]");
        let mut rng = ctx.rng(&id);
        let mut worst = 0.0f64;
        for _ in 0..trials {
            let p = sampling::probability(&mut rng, map.source_dim(), 0.5);
            let a = sampling::unit_tangent(&mut rng, &p, alpha);
            let b = sampling::unit_tangent(&mut rng, &p, alpha);
            worst = worst.max(preservation_residual(map, info, &a, &b).unwrap_or(f64::INFINITY));
        }
        out.push(Record::below(
            id,
            json!({"source_dim": map.source_dim(), "target_dim": map.target_dim(), "trials": trials}),
            worst,
            ctx.tol.get("markov_preservation"),
        ));
    }
    out
}
