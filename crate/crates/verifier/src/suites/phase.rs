use infokahler::phase::{bracket_via_omega, Bracket, FnObservable, GAUGE_TEST_VALUES};
use infokahler::{
    check_admissible, hamiltonian_flow, poisson_bracket, sampling, BilinearObservable, MatrixF64, Observable,
    PhaseGradient, PhasePointF64, SymplecticForm,
};
use rand::Rng;
use serde_json::json;

use super::Context;
use crate::report::{Expectation, Record};

const FLOW_STEPS: usize = 2000;

/// `sum_i (c_i P^i S^i + d_i P^i (S^i)^2 + e_i (P^i)^2) + f P^1 P^2 S^2`.
struct Polynomial {
    coeffs: Vec<[f64; 3]>,
    f: f64,
}

impl Polynomial {
    fn random<R: Rng>(rng: &mut R, n: usize) -> Self {
        let coeffs = (0..n)
            .map(|_| {
                [
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                ]
            })
            .collect();
        Polynomial {
            coeffs,
            f: rng.random_range(-1.0..1.0),
        }
    }
}

impl Observable<f64> for Polynomial {
    fn value(&self, p: &[f64], s: &[f64]) -> f64 {
        let mut v = self.f * p[0] * p[1] * s[1];
        for (i, [c, d, e]) in self.coeffs.iter().enumerate() {
            v += c * p[i] * s[i] + d * p[i] * s[i] * s[i] + e * p[i] * p[i];
        }
        v
    }

    fn gradient(&self, p: &[f64], s: &[f64]) -> infokahler::Result<PhaseGradient<f64>> {
        let mut dp = vec![0.0; p.len()];
        let mut ds = vec![0.0; s.len()];
        for (i, [c, d, e]) in self.coeffs.iter().enumerate() {
            dp[i] = c * s[i] + d * s[i] * s[i] + 2.0 * e * p[i];
            ds[i] = c * p[i] + 2.0 * d * p[i] * s[i];
        }
        dp[0] += self.f * p[1] * s[1];
        dp[1] += self.f * p[0] * s[1];
        ds[1] += self.f * p[0] * p[1];
        Ok(PhaseGradient { dp, ds })
    }
}

pub fn run(ctx: &Context<'_>) -> Vec<Record> {
    let alpha = ctx.alpha();
    let n = ctx.scenario.n.max(2);
    let trials = ctx.trials();
    let mut out = Vec::new();

    let id = "phase.antisymmetry";
    let mut rng = ctx.rng(id);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let f = BilinearObservable::new(sampling::hermitian(&mut rng, n), alpha).expect("hermitian");
        let g = BilinearObservable::new(sampling::hermitian(&mut rng, n), alpha).expect("hermitian");
        let x: PhasePointF64 = sampling::phase_point(&mut rng, n, 0.3, 3.0);
        let fg = poisson_bracket(&f, &g, &x).unwrap_or(f64::NAN);
        let gf = poisson_bracket(&g, &f, &x).unwrap_or(f64::NAN);
        let via = bracket_via_omega(&f, &g, &x).unwrap_or(f64::NAN);
        worst = worst.max((fg + gf).abs()).max((fg - via).abs());
    }
    out.push(Record::below(
        id,
        json!({"n": n, "trials": trials}),
        worst,
        ctx.tol.get("phase_antisymmetry"),
    ));

    let id = "phase.jacobi";
    let mut rng = ctx.rng(id);
    let mut worst = 0.0f64;
    let mut magnitude = 0.0f64;
    for _ in 0..trials {
        let obs: Vec<_> = (0..3).map(|_| Polynomial::random(&mut rng, n)).collect();
        let x: PhasePointF64 = sampling::phase_point(&mut rng, n, 0.3, 1.0);
        let (f, g, h) = (&obs[0], &obs[1], &obs[2]);
        let terms = [
            poisson_bracket(f, &Bracket { f: g, g: h }, &x).unwrap_or(f64::NAN),
            poisson_bracket(g, &Bracket { f: h, g: f }, &x).unwrap_or(f64::NAN),
            poisson_bracket(h, &Bracket { f, g }, &x).unwrap_or(f64::NAN),
        ];
        let cyclic = terms.iter().sum::<f64>();
        magnitude = terms.iter().fold(magnitude, |m, t| m.max(t.abs()));
        worst = worst.max(cyclic.abs());
    }
    out.push(Record::below(
        id,
        json!({"n": n, "trials": trials, "observables": "random cubic polynomials", "s_range": 1.0, "max_term": magnitude}),
        worst,
        ctx.tol.get("phase_jacobi"),
    ));

    let omega = SymplecticForm::new(n).matrix::<f64>();
    let antisym = omega.transpose().max_abs_diff(&-&omega);
    let square = (&omega * &omega).max_abs_diff(&-&MatrixF64::identity(2 * n));
    out.push(Record::new(
        "phase.symplectic_form",
        json!({"n": n}),
        antisym.max(square),
        0.0,
        Expectation::AtMost,
    ));

    let id = "phase.norm_conservation";
    let mut rng = ctx.rng(id);
    let h = ctx.scenario.hamiltonian();
    let dim = ctx.scenario.n;
    let mut worst = 0.0f64;
    let mut exits = 0usize;
    let flows = trials.min(10);
    for _ in 0..flows {
        let x0: PhasePointF64 = sampling::phase_point(&mut rng, dim, 0.5, 3.0);
        match hamiltonian_flow(&h, &x0, 1.0, FLOW_STEPS) {
            Ok(traj) => {
                for pt in &traj.points {
                    worst = worst.max((pt.probability().total() - 1.0).abs());
                }
            }
            Err(_) => exits += 1,
        }
    }
    out.push(Record::below(
        id,
        json!({"n": dim, "flows": flows, "t": 1.0, "steps": FLOW_STEPS, "boundary_exits": exits}),
        worst,
        ctx.tol.get("phase_norm_drift"),
    ));

    let id = "phase.admissibility";
    let mut rng = ctx.rng(id);
    let samples: Vec<PhasePointF64> = (0..trials.min(20))
        .map(|_| sampling::phase_point(&mut rng, n, 0.3, 3.0))
        .collect();
    let obs = BilinearObservable::new(sampling::hermitian(&mut rng, n), alpha).expect("hermitian");
    let report = check_admissible(&obs, &samples, &GAUGE_TEST_VALUES);
    out.push(Record::below(
        "phase.admissibility_gauge",
        json!({"n": n, "samples": samples.len(), "chi": GAUGE_TEST_VALUES.to_vec()}),
        report.max_gauge_residual(),
        ctx.tol.get("phase_gauge"),
    ));
    let min_exponent = report
        .boundary
        .iter()
        .filter_map(|b| b.exponent)
        .fold(f64::INFINITY, f64::min);
    let failures = report.boundary.iter().filter(|b| !b.pass).count();
    out.push(Record::new(
        "phase.admissibility_boundary",
        json!({"n": n, "samples": samples.len(), "min_decay_exponent": finite_or_null(min_exponent)}),
        failures as f64,
        0.0,
        Expectation::AtMost,
    ));

    let phase_coordinate = FnObservable(|_p: &[f64], s: &[f64]| s[0]);
    let report = check_admissible(&phase_coordinate, &samples, &GAUGE_TEST_VALUES);
    out.push(Record::above(
        "phase.gauge_falsification",
        json!({"observable": "S^1"}),
        report.max_gauge_residual(),
        ctx.tol.get("phase_gauge"),
    ));
    out
}

fn finite_or_null(x: f64) -> serde_json::Value {
    if x.is_finite() {
        json!(x)
    } else {
        serde_json::Value::Null
    }
}
