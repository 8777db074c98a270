//! Bootstrap PID for the first learning trial, tuned from the stability limit.

use serde::{Deserialize, Serialize};

use crate::dynamics::Plant;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
}

/// Ultimate proportional gain and the period of the sustained oscillation it produces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UltimatePoint {
    pub ku: f64,
    pub tu: f64,
}

/// Classic stability-limit tuning: `K_p = 0.6 K_u`, `K_i = 1.2 K_u / T_u`, `K_D = 0.075 K_u T_u`.
pub fn zn_tune(up: &UltimatePoint) -> PidGains {
    PidGains {
        kp: 0.6 * up.ku,
        ki: 1.2 * up.ku / up.tu,
        kd: 0.075 * up.ku * up.tu,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PidState {
    pub integral: f64,
    pub e_prev: f64,
}

/// One discrete PID update with trapezoidal integration, backward-difference
/// derivative and output clamped to `±limit`. The integrator holds its value
/// on samples where the output saturates in the direction the error pushes.
pub fn pid_control(
    e: f64,
    state: &PidState,
    sample_period: f64,
    gains: &PidGains,
    limit: f64,
) -> (f64, PidState) {
    let derivative = (e - state.e_prev) / sample_period;
    let integral = state.integral + 0.5 * sample_period * (e + state.e_prev);
    let unsat = gains.kp * e + gains.ki * integral + gains.kd * derivative;
    if unsat.abs() > limit && unsat.signum() == e.signum() {
        (
            unsat.clamp(-limit, limit),
            PidState {
                integral: state.integral,
                e_prev: e,
            },
        )
    } else if unsat.abs() > limit {
        (
            unsat.clamp(-limit, limit),
            PidState {
                integral,
                e_prev: e,
            },
        )
    } else {
        (
            unsat,
            PidState {
                integral,
                e_prev: e,
            },
        )
    }
}

/// Settings for the proportional-gain bisection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UltimateSearch {
    /// Initial plant output.
    pub start: f64,
    /// Step reference.
    pub target: f64,
    /// Lower gain, expected to give a decaying response.
    pub k_lo: f64,
    /// Upper gain, expected to give a non-decaying response.
    pub k_hi: f64,
    /// Simulated time per candidate (s).
    pub horizon: f64,
    pub sample_period: f64,
    /// Actuator clamp on the proportional command.
    pub u_limit: Option<f64>,
}

impl UltimateSearch {
    fn min_swing(&self) -> f64 {
        MIN_SWING * (self.target - self.start).abs()
    }
}

impl Default for UltimateSearch {
    fn default() -> Self {
        UltimateSearch {
            start: 0.0,
            target: 1.0,
            k_lo: 0.01,
            k_hi: 100.0,
            horizon: 60.0,
            sample_period: 0.01,
            u_limit: None,
        }
    }
}

pub const MAX_BISECTIONS: usize = 40;
/// Bracket width, relative to the gain, at which bisection stops.
pub const GAIN_TOLERANCE: f64 = 0.01;
/// Peak-to-peak amplitude ratios accepted as a sustained oscillation.
pub const SUSTAINED_BAND: (f64, f64) = (0.95, 1.05);
pub const PEAKS_USED: usize = 4;
/// A response counts as decaying when its mean peak ratio is below `1 - DECAY_MARGIN`;
/// saturated limit cycles sit within a fraction of a percent of one.
pub const DECAY_MARGIN: f64 = 0.01;
/// Swings smaller than this fraction of the step size are not counted as
/// peaks, so friction hunting around the setpoint is not mistaken for the
/// loop's own oscillation.
pub const MIN_SWING: f64 = 0.05;

/// Oscillation summary from the last few peaks of an error trace.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakAnalysis {
    pub ratios: Vec<f64>,
    pub period: f64,
}

impl PeakAnalysis {
    pub fn mean_ratio(&self) -> f64 {
        self.ratios.iter().sum::<f64>() / self.ratios.len() as f64
    }

    pub fn is_sustained(&self) -> bool {
        self.ratios
            .iter()
            .all(|r| (SUSTAINED_BAND.0..=SUSTAINED_BAND.1).contains(r))
    }
}

/// Amplitude ratios between the last [`PEAKS_USED`] maxima of `e`, each
/// measured from the minimum preceding it. Swings below `min_swing` are
/// ignored. `None` if fewer peaks exist.
pub fn analyze_peaks(e: &[f64], sample_period: f64, min_swing: f64) -> Option<PeakAnalysis> {
    let mut peaks: Vec<(usize, f64)> = Vec::new();
    let mut last_min: Option<f64> = None;
    for i in 1..e.len().saturating_sub(1) {
        if e[i] < e[i - 1] && e[i] <= e[i + 1] {
            last_min = Some(e[i]);
        } else if e[i] > e[i - 1] && e[i] >= e[i + 1] {
            if let Some(m) = last_min {
                if e[i] - m > min_swing {
                    peaks.push((i, e[i] - m));
                }
            }
        }
    }
    if peaks.len() < PEAKS_USED {
        return None;
    }
    let tail = &peaks[peaks.len() - PEAKS_USED..];
    if tail.iter().any(|(_, a)| *a <= 0.0) {
        return None;
    }
    let ratios = tail.windows(2).map(|w| w[1].1 / w[0].1).collect();
    let period =
        (tail[PEAKS_USED - 1].0 - tail[0].0) as f64 * sample_period / (PEAKS_USED - 1) as f64;
    Some(PeakAnalysis { ratios, period })
}

/// Error trace of the proportional loop at gain `k`.
pub fn proportional_response<P: Plant>(
    plant: &P,
    k: f64,
    search: &UltimateSearch,
) -> Result<Vec<f64>> {
    let n = (search.horizon / search.sample_period).round() as usize;
    let mut state = plant.initial_state(search.start);
    let mut errors = Vec::with_capacity(n);
    for _ in 0..n {
        let e = search.target - plant.output(&state);
        let mut u = k * e;
        if let Some(l) = search.u_limit {
            u = u.clamp(-l, l);
        }
        errors.push(e);
        state = plant.step(&state, u, 0.0, search.sample_period)?;
    }
    Ok(errors)
}

fn is_decaying<P: Plant>(
    plant: &P,
    k: f64,
    search: &UltimateSearch,
) -> Result<(bool, Option<PeakAnalysis>)> {
    let e = proportional_response(plant, k, search)?;
    let analysis = analyze_peaks(&e, search.sample_period, search.min_swing());
    let decaying = match &analysis {
        None => true,
        Some(a) => a.mean_ratio() < 1.0 - DECAY_MARGIN,
    };
    Ok((decaying, analysis))
}

/// Bisects the proportional gain between a decaying and a non-decaying
/// closed-loop step response until the bracket is within 1%, then measures
/// the oscillation period at the final gain.
pub fn find_ultimate_gain<P: Plant>(plant: &P, search: &UltimateSearch) -> Result<UltimatePoint> {
    let not_found = || Error::UltimateGainNotFound {
        lo: search.k_lo,
        hi: search.k_hi,
    };
    if !(search.k_lo > 0.0
        && search.k_hi > search.k_lo
        && search.horizon > 0.0
        && search.sample_period > 0.0)
    {
        return Err(Error::Domain(
            "gain search needs 0 < k_lo < k_hi, positive horizon and sample period".into(),
        ));
    }
    if !is_decaying(plant, search.k_lo, search)?.0 {
        return Err(not_found());
    }
    if is_decaying(plant, search.k_hi, search)?.0 {
        return Err(not_found());
    }
    let (mut lo, mut hi) = (search.k_lo, search.k_hi);
    let mut iterations = 0;
    while hi - lo > GAIN_TOLERANCE * hi && iterations < MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if is_decaying(plant, mid, search)?.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let ku = 0.5 * (lo + hi);
    let e = proportional_response(plant, ku, search)?;
    match analyze_peaks(&e, search.sample_period, search.min_swing()) {
        Some(a) if a.is_sustained() && a.period > 0.0 => Ok(UltimatePoint { ku, tu: a.period }),
        _ => Err(not_found()),
    }
}
