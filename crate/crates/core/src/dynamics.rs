//! Plants the learning engine and the gain search can drive.

use crate::error::Result;
use crate::plant::{self, PlantParams, PlantState};

/// Internal quantities logged next to the output in trial traces.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Probe {
    pub x_v: f64,
    pub p_a: f64,
    pub p_b: f64,
}

/// A sampled single-input single-output plant.
///
/// `disturbance` enters where the plant takes it: as a force on the piston
/// for the pneumatic model, added to the input for linear models.
pub trait Plant: Sync {
    type State: Clone + Send;

    /// Canonical initial state whose output is (as close as possible to) `y0`.
    fn initial_state(&self, y0: f64) -> Self::State;

    fn step(&self, state: &Self::State, u: f64, disturbance: f64, dt: f64) -> Result<Self::State>;

    fn output(&self, state: &Self::State) -> f64;

    fn probe(&self, _state: &Self::State) -> Probe {
        Probe::default()
    }

    /// Admissible output range, if the plant has one.
    fn output_range(&self) -> Option<(f64, f64)> {
        None
    }
}

/// The pneumatic cylinder as a [`Plant`]; output is piston position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PneumaticPlant {
    pub params: PlantParams,
}

impl PneumaticPlant {
    pub fn new(params: PlantParams) -> Result<Self> {
        params.validate()?;
        Ok(PneumaticPlant { params })
    }
}

impl Plant for PneumaticPlant {
    type State = PlantState;

    fn initial_state(&self, y0: f64) -> PlantState {
        PlantState::rest(y0.clamp(0.0, self.params.stroke), &self.params)
    }

    fn step(&self, state: &PlantState, u: f64, disturbance: f64, dt: f64) -> Result<PlantState> {
        plant::step_with_force(state, u, disturbance, dt, &self.params)
    }

    fn output(&self, state: &PlantState) -> f64 {
        state.x_p
    }

    fn probe(&self, state: &PlantState) -> Probe {
        Probe {
            x_v: state.x_v,
            p_a: state.p_a,
            p_b: state.p_b,
        }
    }

    fn output_range(&self) -> Option<(f64, f64)> {
        Some((0.0, self.params.stroke))
    }
}
