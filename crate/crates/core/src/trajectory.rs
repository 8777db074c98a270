//! Reference trajectories repeated every trial.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::Signal;

/// Shape of the desired output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TrajectorySpec {
    /// `center + amplitude·sin(2π·frequency·t)`.
    Sinusoid {
        center: f64,
        amplitude: f64,
        frequency: f64,
    },
    /// Fifth-order point-to-point move from `start` to `end` over `move_time`
    /// seconds with zero velocity and acceleration at both ends, then held.
    Quintic {
        start: f64,
        end: f64,
        move_time: f64,
    },
}

impl Default for TrajectorySpec {
    fn default() -> Self {
        TrajectorySpec::Sinusoid {
            center: 0.25,
            amplitude: 0.1,
            frequency: 0.5,
        }
    }
}

impl TrajectorySpec {
    /// Checks the profile stays inside `range` (the plant's admissible output).
    pub fn validate(&self, range: Option<(f64, f64)>) -> Result<()> {
        let (lo, hi) = match *self {
            TrajectorySpec::Sinusoid {
                center,
                amplitude,
                frequency,
            } => {
                if !(amplitude >= 0.0) {
                    return Err(Error::config("trajectory.amplitude", "must be >= 0"));
                }
                if !(frequency > 0.0) {
                    return Err(Error::config("trajectory.frequency", "must be > 0"));
                }
                (center - amplitude, center + amplitude)
            }
            TrajectorySpec::Quintic {
                start,
                end,
                move_time,
            } => {
                if !(move_time > 0.0) {
                    return Err(Error::config("trajectory.move_time", "must be > 0"));
                }
                (start.min(end), start.max(end))
            }
        };
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::config("trajectory", "values must be finite"));
        }
        if let Some((a, b)) = range {
            if lo < a || hi > b {
                return Err(Error::config(
                    "trajectory",
                    format!("profile spans [{lo}, {hi}], outside the stroke [{a}, {b}]"),
                ));
            }
        }
        Ok(())
    }

    pub fn value(&self, t: f64) -> f64 {
        match *self {
            TrajectorySpec::Sinusoid {
                center,
                amplitude,
                frequency,
            } => center + amplitude * (2.0 * PI * frequency * t).sin(),
            TrajectorySpec::Quintic {
                start,
                end,
                move_time,
            } => {
                let s = (t / move_time).clamp(0.0, 1.0);
                start + (end - start) * s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
            }
        }
    }
}

/// Sample `spec` at `n·T_s` for `n = 0..N`.
pub fn generate_trajectory(
    spec: &TrajectorySpec,
    len: usize,
    sample_period: f64,
    range: Option<(f64, f64)>,
) -> Result<Signal> {
    spec.validate(range)?;
    if len == 0 {
        return Err(Error::config(
            "trajectory.duration",
            "trial must contain at least one sample",
        ));
    }
    Signal::new(
        (0..len)
            .map(|n| spec.value(n as f64 * sample_period))
            .collect(),
        sample_period,
    )
}
