//! Sampled trajectories of the quantum Hamiltonian flow, for external plotting.

use std::io::Write;

use infokahler::{hamiltonian_flow, madelung, schrodinger_evolve, Error as GeometryError, Observable, PhasePointF64};

use crate::config::{ConfigError, Scenario};

#[derive(Debug, thiserror::Error)]
pub enum DemoError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("trajectory left the simplex interior at t = {time} (P[{index}] = {value})")]
    BoundaryExit { time: f64, index: usize, value: f64 },
    #[error(transparent)]
    Geometry(GeometryError),
    #[error("writing trajectory: {0}")]
    Io(#[from] std::io::Error),
    #[error("writing trajectory: {0}")]
    Csv(#[from] csv::Error),
}

impl From<GeometryError> for DemoError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::BoundaryExit { time, index, value } => DemoError::BoundaryExit { time, index, value },
            other => DemoError::Geometry(other),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemoRow {
    pub t: f64,
    pub p: Vec<f64>,
    pub s: Vec<f64>,
    pub psi_re: Vec<f64>,
    pub psi_im: Vec<f64>,
    /// `|sum P - 1|`
    pub norm_drift: f64,
    /// `|H(t) - H(0)|`
    pub energy_drift: f64,
    /// Max-abs distance to `exp(-i H t / alpha) psi0`.
    pub oracle_error: f64,
}

/// Default start: `P` proportional to `(n, n-1, ..., 1)`, `S = 0`.
pub fn initial_state(scenario: &Scenario) -> PhasePointF64 {
    match &scenario.initial {
        Some(init) => PhasePointF64::from_vecs(init.p.clone(), init.s.clone()).expect("validated scenario"),
        None => {
            let n = scenario.n;
            let total = (n * (n + 1)) as f64 / 2.0;
            let p = (0..n).map(|i| (n - i) as f64 / total).collect();
            PhasePointF64::from_vecs(p, vec![0.0; n]).expect("normalized")
        }
    }
}

/// Integrates the scenario Hamiltonian for time `t` in `steps` RK4 steps.
pub fn run_demo_flow(scenario: &Scenario, t: f64, steps: usize) -> Result<Vec<DemoRow>, DemoError> {
    scenario.validate()?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(ConfigError::single("t", format!("must be finite and non-negative, got {t}")).into());
    }
    if steps == 0 {
        return Err(ConfigError::single("steps", "must be at least 1").into());
    }
    let alpha = scenario.alpha();
    let h_matrix = scenario.hamiltonian_matrix();
    let h = scenario.hamiltonian();
    let x0 = initial_state(scenario);
    let psi0 = madelung(&x0, alpha)?.components().to_vec();
    let e0 = h.value(x0.p(), x0.s());

    let traj = hamiltonian_flow(&h, &x0, t, steps)?;
    let mut rows = Vec::with_capacity(traj.points.len());
    for (&time, x) in traj.times.iter().zip(&traj.points) {
        let psi = madelung(x, alpha)?;
        let exact = schrodinger_evolve(&h_matrix, &psi0, time, alpha);
        let oracle_error = psi
            .components()
            .iter()
            .zip(&exact)
            .fold(0.0f64, |acc, (u, v)| acc.max((u - v).norm()));
        rows.push(DemoRow {
            t: time,
            p: x.p().to_vec(),
            s: x.s().to_vec(),
            psi_re: psi.components().iter().map(|z| z.re).collect(),
            psi_im: psi.components().iter().map(|z| z.im).collect(),
            norm_drift: (x.probability().total() - 1.0).abs(),
            energy_drift: (h.value(x.p(), x.s()) - e0).abs(),
            oracle_error,
        });
    }
    Ok(rows)
}

pub fn csv_header(n: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend((1..=n).map(|i| format!("p{i}")));
    h.extend((1..=n).map(|i| format!("s{i}")));
    for i in 1..=n {
        h.push(format!("psi{i}_re"));
        h.push(format!("psi{i}_im"));
    }
    h.extend(["norm_drift", "energy_drift", "oracle_error"].map(String::from));
    h
}

/// Writes every `stride`-th row plus the final one.
pub fn write_csv<W: Write>(rows: &[DemoRow], stride: usize, out: W) -> Result<(), DemoError> {
    let Some(first) = rows.first() else {
        return Ok(());
    };
    let n = first.p.len();
    let stride = stride.max(1);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(csv_header(n))?;
    let last = rows.len() - 1;
    for (i, r) in rows.iter().enumerate() {
        if i % stride != 0 && i != last {
            continue;
        }
        let mut rec = vec![r.t.to_string()];
        rec.extend(r.p.iter().map(f64::to_string));
        rec.extend(r.s.iter().map(f64::to_string));
        for (re, im) in r.psi_re.iter().zip(&r.psi_im) {
            rec.push(re.to_string());
            rec.push(im.to_string());
        }
        rec.extend([r.norm_drift, r.energy_drift, r.oracle_error].map(|x| x.to_string()));
        w.write_record(rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Builtin, HamiltonianSpec, InitialState};

    fn pauli_x() -> Scenario {
        Scenario {
            n: 2,
            hamiltonian: HamiltonianSpec::Matrix {
                hermitian_matrix: vec![vec![[0.0, 0.0], [1.0, 0.0]], vec![[1.0, 0.0], [0.0, 0.0]]],
            },
            initial: Some(InitialState {
                p: vec![0.8, 0.2],
                s: vec![0.0, 0.0],
            }),
            ..Scenario::default()
        }
    }

    #[test]
    fn rabi_oscillation_returns() {
        let rows = run_demo_flow(&pauli_x(), std::f64::consts::PI, 20_000).unwrap();
        let end = rows.last().unwrap();
        assert!((end.p[0] - 0.8).abs() < 1e-6, "{}", end.p[0]);
        let mid = &rows[rows.len() / 2];
        assert!((mid.p[0] - 0.2).abs() < 1e-6);
    }

    #[test]
    fn zero_hamiltonian_is_constant() {
        let s = Scenario {
            hamiltonian: HamiltonianSpec::Builtin { builtin: Builtin::Zero },
            ..Scenario::default()
        };
        let rows = run_demo_flow(&s, 1.0, 100).unwrap();
        let x0 = initial_state(&s);
        for r in &rows {
            assert_eq!(r.p, x0.p());
            assert_eq!(r.s, x0.s());
        }
    }

    #[test]
    fn drift_columns_are_small() {
        let rows = run_demo_flow(&pauli_x(), 1.0, 10_000).unwrap();
        for r in &rows {
            assert!(r.norm_drift < 1e-9 && r.energy_drift < 1e-9 && r.oracle_error < 1e-9);
        }
    }

    #[test]
    fn boundary_exit_is_reported() {
        // P^2 = (cos t - sin t)^2 / 2 vanishes at t = pi / 4
        let s = Scenario {
            initial: Some(InitialState {
                p: vec![0.5, 0.5],
                s: vec![0.0, std::f64::consts::FRAC_PI_2],
            }),
            ..pauli_x()
        };
        match run_demo_flow(&s, 2.0, 2000) {
            Err(DemoError::BoundaryExit { time, index, .. }) => {
                assert_eq!(index, 1);
                assert!((time - std::f64::consts::FRAC_PI_4).abs() < 0.05, "{time}");
            }
            other => panic!("expected a boundary exit, got {other:?}"),
        }
    }

    #[test]
    fn csv_layout() {
        let rows = run_demo_flow(&pauli_x(), 0.1, 10).unwrap();
        let mut buf = Vec::new();
        write_csv(&rows, 5, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "t,p1,p2,s1,s2,psi1_re,psi1_im,psi2_re,psi2_im,norm_drift,energy_drift,oracle_error"
        );
        assert_eq!(lines.len(), 1 + 3);
    }
}
