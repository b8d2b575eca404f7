//! Verification suites. Each check draws from its own random stream, so
//! suites can run in any order or concurrently.

use infokahler::{schrodinger_evolve, Alpha, ComplexMatrixF64};
use num_complex::Complex;
use rand_chacha::ChaCha8Rng;

use crate::config::{ConfigError, Scenario, Tolerances};
use crate::report::{Record, Report};
use crate::streams;

mod complex;
mod dynamics;
mod gmm;
mod kahler;
mod markov;
mod phase;
mod simplex;
mod uniqueness;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SuiteSelector {
    Simplex,
    Markov,
    Phase,
    Kahler,
    Gmm,
    Uniqueness,
    Complex,
    Dynamics,
    All,
}

const ORDER: [SuiteSelector; 8] = [
    SuiteSelector::Simplex,
    SuiteSelector::Markov,
    SuiteSelector::Phase,
    SuiteSelector::Kahler,
    SuiteSelector::Gmm,
    SuiteSelector::Uniqueness,
    SuiteSelector::Complex,
    SuiteSelector::Dynamics,
];

impl SuiteSelector {
    pub fn expand(self) -> Vec<SuiteSelector> {
        match self {
            SuiteSelector::All => ORDER.to_vec(),
            s => vec![s],
        }
    }
}

pub struct Context<'a> {
    pub scenario: &'a Scenario,
    pub tol: Tolerances,
    pub seed: u64,
}

impl Context<'_> {
    pub fn rng(&self, check_id: &str) -> ChaCha8Rng {
        streams::stream(self.seed, check_id)
    }

    pub fn alpha(&self) -> Alpha<f64> {
        self.scenario.alpha()
    }

    pub fn trials(&self) -> usize {
        self.scenario.trials
    }
}

fn run_one(suite: SuiteSelector, ctx: &Context<'_>) -> Vec<Record> {
    match suite {
        SuiteSelector::Simplex => simplex::run(ctx),
        SuiteSelector::Markov => markov::run(ctx),
        SuiteSelector::Phase => phase::run(ctx),
        SuiteSelector::Kahler => kahler::run(ctx),
        SuiteSelector::Gmm => gmm::run(ctx),
        SuiteSelector::Uniqueness => uniqueness::run(ctx),
        SuiteSelector::Complex => complex::run(ctx),
        SuiteSelector::Dynamics => dynamics::run(ctx),
        SuiteSelector::All => unreachable!("expanded before dispatch"),
    }
}

/// Validates `scenario` and runs the selected suites concurrently. Records
/// appear in a fixed suite order.
pub fn run_verify(scenario: &Scenario, selector: SuiteSelector) -> Result<Report, ConfigError> {
    scenario.validate()?;
    let seed = scenario.resolved_seed()?;
    let ctx = Context {
        scenario,
        tol: scenario.tolerances(),
        seed,
    };
    let suites = selector.expand();
    let results: Vec<Vec<Record>> = std::thread::scope(|scope| {
        let handles: Vec<_> = suites
            .iter()
            .map(|&s| {
                let ctx = &ctx;
                scope.spawn(move || run_one(s, ctx))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("suite thread panicked"))
            .collect()
    });
    Ok(Report::new(seed, results.into_iter().flatten().collect()))
}

/// Smallest `|psi^k(t)|^2` of the exact evolution sampled on `[0, t]`.
pub(crate) fn min_probability_along(h: &ComplexMatrixF64, psi0: &[Complex<f64>], t: f64, alpha: Alpha<f64>) -> f64 {
    (0..=20)
        .flat_map(|i| schrodinger_evolve(h, psi0, t * i as f64 / 20.0, alpha))
        .map(|z| z.norm_sqr())
        .fold(f64::INFINITY, f64::min)
}

/// `(P, S)` coordinates of a normalized wave vector.
pub(crate) fn phase_coordinates(psi: &[Complex<f64>], alpha: Alpha<f64>) -> (Vec<f64>, Vec<f64>) {
    (
        psi.iter().map(|z| z.norm_sqr()).collect(),
        psi.iter().map(|z| alpha.value() * z.arg()).collect(),
    )
}
