//! Builds the grid and the initial state described by a configuration.

use pcf_core::initdata::{
    bump_data, sample_state, ClosedForm, FiniteEnergySoliton, SingularSoliton, TravelingWaveField,
};
use pcf_core::{FieldState, Grid};

use crate::config::{ExperimentConfig, InitialData};
use crate::error::CliResult;

pub struct Setup {
    pub grid: Grid,
    pub initial: FieldState,
    /// Exact solution, when the data come from a closed form.
    pub exact: Option<Box<dyn ClosedForm + Send>>,
    /// Amplitude used to normalise the pointwise monitors.
    pub epsilon: f64,
}

impl Setup {
    pub fn new(cfg: &ExperimentConfig) -> CliResult<Self> {
        Self::on_grid(cfg, cfg.grid()?)
    }

    pub fn on_grid(cfg: &ExperimentConfig, grid: Grid) -> CliResult<Self> {
        let amplitude = |a: f64, b: f64| {
            let m = a.abs().max(b.abs());
            if m > 0.0 {
                m
            } else {
                1.0
            }
        };
        let setup = match &cfg.initial {
            InitialData::Bump { lambda, ltil, phi } => Setup {
                initial: bump_data(&ltil.spec(), &phi.spec(), *lambda, &grid)?,
                exact: None,
                epsilon: amplitude(ltil.epsilon, phi.epsilon),
                grid,
            },
            InitialData::TravelingWave {
                lambda,
                direction,
                ltil,
                phi,
            } => {
                let field = TravelingWaveField {
                    h: ltil.spec(),
                    k: phi.spec(),
                    direction: InitialData::direction(*direction),
                    lambda_bg: *lambda,
                };
                Setup {
                    initial: sample_state(&field, &grid, 0.0, *lambda)?,
                    exact: Some(Box::new(field)),
                    epsilon: amplitude(ltil.epsilon, phi.epsilon),
                    grid,
                }
            }
            InitialData::SingularSoliton { mu } => {
                let sol = SingularSoliton::new(*mu)?;
                Setup {
                    initial: sample_state(&sol, &grid, 0.0, sol.background())?,
                    exact: Some(Box::new(sol)),
                    epsilon: 1.0,
                    grid,
                }
            }
            InitialData::FiniteEnergySoliton {
                lambda,
                epsilon,
                mu,
                theta,
            } => {
                let sol = FiniteEnergySoliton::new(*lambda, *epsilon, theta.spec(), *mu)?;
                let (rest, _) = sol.rest_values()?;
                Setup {
                    initial: sample_state(&sol, &grid, 0.0, rest)?,
                    exact: Some(Box::new(sol)),
                    epsilon: amplitude(*epsilon, 0.0),
                    grid,
                }
            }
        };
        Ok(setup)
    }

    /// Exact state at time `t`, if known.
    pub fn exact_state(&self, t: f64) -> CliResult<Option<FieldState>> {
        match &self.exact {
            Some(f) => Ok(Some(sample_state(f.as_ref(), &self.grid, t, self.initial.lambda_bg)?)),
            None => Ok(None),
        }
    }
}
