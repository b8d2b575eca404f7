use infokahler::{sampling, CanonicalSplitMapF64, MatrixF64, PhasePointF64, SymplecticForm};
use rand::Rng;
use serde_json::json;

use super::Context;
use crate::report::{Expectation, Record};

pub const MAX_SOURCE_DIM: usize = 16;

fn symplectic_residual(m: &MatrixF64, omega: &MatrixF64) -> f64 {
    (&(&m.transpose() * omega) * m).max_abs_diff(omega)
}

pub fn run(ctx: &Context<'_>) -> Vec<Record> {
    let trials = ctx.trials();
    let mut out = Vec::new();

    let id = "gmm.symplectic";
    let mut rng = ctx.rng(id);
    let mut worst_symp = 0.0f64;
    let mut worst_roundtrip = 0.0f64;
    for _ in 0..trials {
        let m = rng.random_range(1..=MAX_SOURCE_DIM);
        let k = sampling::split_parameter(&mut rng);
        let map = CanonicalSplitMapF64::new(m, k).expect("valid split");
        let ct = map.original_from_split_matrix();
        let ict = map.split_from_original_matrix();
        let omega = SymplecticForm::new(m + 1).matrix::<f64>();
        worst_symp = worst_symp
            .max(symplectic_residual(&ct, &omega))
            .max(symplectic_residual(&ict, &omega));
        let one = MatrixF64::identity(2 * (m + 1));
        worst_roundtrip = worst_roundtrip
            .max((&ct * &ict).max_abs_diff(&one))
            .max((&ict * &ct).max_abs_diff(&one));
    }
    out.push(Record::below(
        id,
        json!({"trials": trials, "max_source_dim": MAX_SOURCE_DIM}),
        worst_symp,
        ctx.tol.get("gmm_symplectic"),
    ));
    out.push(Record::below(
        "gmm.roundtrip",
        json!({"trials": trials, "max_source_dim": MAX_SOURCE_DIM}),
        worst_roundtrip,
        ctx.tol.get("gmm_roundtrip"),
    ));

    let id = "gmm.constraints";
    let mut rng = ctx.rng(id);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let m = rng.random_range(1..=MAX_SOURCE_DIM);
        let k = sampling::split_parameter(&mut rng);
        let map = CanonicalSplitMapF64::new(m, k).expect("valid split");
        let x: PhasePointF64 = sampling::phase_point(&mut rng, m, 0.3, 3.0);
        let residual = map
            .lift_forward(&x)
            .and_then(|lifted| {
                let c = map.constraints(&lifted)?.max_abs();
                let back = map.project_back(&lifted)?;
                let err = back
                    .to_coordinates()
                    .iter()
                    .zip(x.to_coordinates())
                    .fold(0.0f64, |acc, (u, v)| acc.max((u - v).abs()));
                Ok(c.max(err))
            })
            .unwrap_or(f64::INFINITY);
        worst = worst.max(residual);
    }
    out.push(Record::below(
        id,
        json!({"trials": trials}),
        worst,
        ctx.tol.get("gmm_constraint"),
    ));

    // P = dK/dS and S~ = dK/dP~ by central differences against the linear maps
    let id = "gmm.generating_function";
    let mut rng = ctx.rng(id);
    let h = 1e-5;
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let m = rng.random_range(1..=MAX_SOURCE_DIM);
        let k = sampling::split_parameter(&mut rng);
        let map = CanonicalSplitMapF64::new(m, k).expect("valid split");
        let n = m + 1;
        let pt: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let s: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let kf = |pt: &[f64], s: &[f64]| map.generating_function(pt, s).expect("dimensions");
        let partial = |i: usize, wrt_s: bool| {
            let (mut up, mut down) = if wrt_s {
                (s.clone(), s.clone())
            } else {
                (pt.clone(), pt.clone())
            };
            up[i] += h;
            down[i] -= h;
            if wrt_s {
                (kf(&pt, &up) - kf(&pt, &down)) / (2.0 * h)
            } else {
                (kf(&up, &s) - kf(&down, &s)) / (2.0 * h)
            }
        };
        let p_orig: Vec<f64> = (0..n).map(|i| partial(i, true)).collect();
        let s_tilde: Vec<f64> = (0..n).map(|i| partial(i, false)).collect();
        let split: Vec<f64> = pt.iter().chain(&s_tilde).copied().collect();
        let original = map.to_original(&split).expect("dimensions");
        for i in 0..n {
            worst = worst
                .max((original[i] - p_orig[i]).abs())
                .max((original[n + i] - s[i]).abs());
        }
    }
    out.push(Record::below(
        id,
        json!({"trials": trials, "fd_step": h}),
        worst,
        ctx.tol.get("gmm_generating"),
    ));

    let id = "gmm.half_split_relabeling";
    let mut rng = ctx.rng(id);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let m = rng.random_range(1..=MAX_SOURCE_DIM);
        let map = CanonicalSplitMapF64::new(m, 0.5).expect("valid split");
        let x: PhasePointF64 = sampling::phase_point(&mut rng, m, 0.3, 3.0);
        let residual = map
            .lift_forward(&x)
            .and_then(|lifted| {
                let swapped = map.relabel(&lifted)?;
                Ok(lifted
                    .to_coordinates()
                    .iter()
                    .zip(swapped.to_coordinates())
                    .fold(0.0f64, |acc, (u, v)| acc.max((u - v).abs())))
            })
            .unwrap_or(f64::INFINITY);
        worst = worst.max(residual);
    }
    out.push(Record::new(
        id,
        json!({"trials": trials}),
        worst,
        0.0,
        Expectation::AtMost,
    ));
    out
}
