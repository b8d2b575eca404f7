use infokahler::{verify_dynamics_preservation, BilinearObservable, CanonicalSplitMapF64, PhasePointF64};
use serde_json::json;

use super::complex::interior_problem;
use super::{phase_coordinates, Context};
use crate::report::Record;

pub const STEPS: usize = 10_000;
pub const T_FINAL: f64 = 1.0;

pub fn run(ctx: &Context<'_>) -> Vec<Record> {
    let alpha = ctx.alpha();
    let mut out = Vec::new();
    for m in [2usize, 3] {
        for &k in &ctx.scenario.k_values {
            let label = format!("dynamics[m={m},k={k}]");
            let mut rng = ctx.rng(&label);
            let (h, psi0) = interior_problem(&mut rng, m, T_FINAL, alpha);
            let (p, s) = phase_coordinates(&psi0, alpha);
            let x0 = PhasePointF64::from_vecs(p, s).expect("normalized state");
            let obs = BilinearObservable::new(h, alpha).expect("hermitian");
            let map = CanonicalSplitMapF64::new(m, k).expect("validated k");
            let params = json!({"m": m, "k": k, "t": T_FINAL, "steps": STEPS, "hamiltonian": "random hermitian"});
            match verify_dynamics_preservation(&map, &obs, &x0, T_FINAL, STEPS) {
                Ok(r) => {
                    out.push(Record::below(
                        format!("dynamics.discrepancy[m={m},k={k}]"),
                        params.clone(),
                        r.discrepancy,
                        ctx.tol.get("dynamics_discrepancy"),
                    ));
                    out.push(Record::below(
                        format!("dynamics.constraint_drift[m={m},k={k}]"),
                        params,
                        r.constraint_drift(),
                        ctx.tol.get("dynamics_drift"),
                    ));
                }
                Err(e) => out.push(Record::error(
                    format!("dynamics.discrepancy[m={m},k={k}]"),
                    params,
                    ctx.tol.get("dynamics_discrepancy"),
                    e.to_string(),
                )),
            }
        }
    }
    out
}
