//! Trial-to-trial learning with wavelet-filtered feedback.
//!
//! Each trial applies `u_k = u_k^l + u_k^f`, where `u_k^f` is the feedback
//! command computed on-line from the tracking error and `u_k^l` is the
//! feedforward profile. Between trials the profile absorbs the low-frequency
//! part of the previous feedback effort:
//! `u_k^l = u_{k-1}^l + α · W*(u_{k-1}^f)`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dynamics::{Plant, Probe};
use crate::error::{Error, Result};
use crate::fuzzy::{delta_error, fuzzy_pd, FuzzyPdConfig};
use crate::pid::{pid_control, PidGains, PidState};
use crate::signal::Signal;
use crate::wavelet::{wfilter, WaveletConfig};

pub use crate::linear::{
    frequency_response, positive_real_cutoff, predicted_ratio, LinearPlant, TransferFunction,
};

/// Learning runs abort once a trial's rms exceeds this multiple of the first trial's.
pub const DIVERGENCE_FACTOR: f64 = 1e3;

/// Feedback law used inside a trial.
#[derive(Debug, Clone, PartialEq)]
pub enum Feedback {
    Fuzzy(FuzzyPdConfig),
    /// Linear PD on the raw per-sample difference: `kp·e + kd·Δe`.
    Pd {
        kp: f64,
        kd: f64,
    },
    Pid(PidGains),
}

/// How the first trial is controlled.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum LearningMode {
    /// Every trial uses the configured feedback.
    #[default]
    Normal,
    /// Trial 1 runs under the given PID so every candidate starts from the
    /// same initial error; later trials use the configured feedback.
    GaBootstrap(PidGains),
}

/// Force disturbances applied to the plant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DisturbanceSpec {
    /// Identical every trial; must match the trial length.
    #[serde(skip)]
    pub repeatable: Option<Signal>,
    /// Standard deviation of the per-trial band-limited noise (N for the
    /// pneumatic plant, input units for linear plants).
    pub nonrepeatable_std: f64,
    /// First-order low-pass corner of the noise (Hz).
    pub bandwidth: f64,
    /// Set from the run seed; not read from config files.
    #[serde(skip)]
    pub seed: u64,
}

impl Default for DisturbanceSpec {
    fn default() -> Self {
        DisturbanceSpec {
            repeatable: None,
            nonrepeatable_std: 0.0,
            bandwidth: 20.0,
            seed: 0,
        }
    }
}

impl DisturbanceSpec {
    pub fn validate(&self, len: usize) -> Result<()> {
        if !(self.nonrepeatable_std >= 0.0) {
            return Err(Error::config(
                "disturbance.nonrepeatable_std",
                "must be >= 0",
            ));
        }
        if !(self.bandwidth > 0.0) {
            return Err(Error::config("disturbance.bandwidth", "must be > 0"));
        }
        if let Some(r) = &self.repeatable {
            if r.len() != len {
                return Err(Error::Length(format!(
                    "repeatable disturbance has {} samples, trial has {len}",
                    r.len()
                )));
            }
        }
        Ok(())
    }

    /// Disturbance samples for trial `k`; the noise stream depends only on `(seed, k)`.
    pub fn realize(&self, k: usize, len: usize, sample_period: f64) -> Vec<f64> {
        let mut d = match &self.repeatable {
            Some(r) => r.samples().to_vec(),
            None => vec![0.0; len],
        };
        if self.nonrepeatable_std > 0.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            rng.set_stream(k as u64);
            let a = 1.0 - (-2.0 * std::f64::consts::PI * self.bandwidth * sample_period).exp();
            // stationary std of the filtered unit white sequence
            let filtered_std = (a / (2.0 - a)).sqrt();
            let gain = self.nonrepeatable_std / filtered_std;
            let z: f64 = StandardNormal.sample(&mut rng);
            let mut y = filtered_std * z;
            for v in d.iter_mut() {
                let w: f64 = StandardNormal.sample(&mut rng);
                y += a * (w - y);
                *v += gain * y;
            }
        }
        d
    }
}

/// Everything that defines a learning run.
#[derive(Debug, Clone)]
pub struct TrialSetup<P> {
    pub reference: Signal,
    pub plant: P,
    pub feedback: Feedback,
    pub alpha: f64,
    pub wavelet: WaveletConfig,
    /// When false, the raw feedback effort updates the profile (no wavelet filtering).
    pub filter: bool,
    pub iterations: usize,
    pub mode: LearningMode,
    pub disturbance: DisturbanceSpec,
    /// Actuator clamp applied to `u_l + u_f`.
    pub u_limit: f64,
}

impl<P: Plant> TrialSetup<P> {
    pub fn new(reference: Signal, plant: P, feedback: Feedback) -> Self {
        TrialSetup {
            reference,
            plant,
            feedback,
            alpha: 1.0,
            wavelet: WaveletConfig::default(),
            filter: true,
            iterations: 10,
            mode: LearningMode::Normal,
            disturbance: DisturbanceSpec::default(),
            u_limit: 1.0,
        }
    }

    pub fn sample_period(&self) -> f64 {
        self.reference.sample_period()
    }

    pub fn len(&self) -> usize {
        self.reference.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reference.is_empty()
    }

    /// `alpha = 0` is accepted as the degenerate no-learning case.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha < 2.0) {
            return Err(Error::config(
                "ilc.alpha",
                format!("must lie in [0, 2), got {}", self.alpha),
            ));
        }
        if self.iterations == 0 {
            return Err(Error::config("ilc.iterations", "must be >= 1"));
        }
        if !(self.u_limit > 0.0) {
            return Err(Error::config("u_limit", "must be > 0"));
        }
        if self.filter {
            self.wavelet
                .adapted_to(self.len())
                .validate_for(self.len())?;
        }
        self.disturbance.validate(self.len())
    }
}

/// Signals recorded over one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    /// 1-based trial index.
    pub k: usize,
    pub y: Signal,
    pub e: Signal,
    /// Feedforward profile applied this trial.
    pub u_l: Signal,
    /// Feedback command before the actuator clamp.
    pub u_f: Signal,
    /// Command the plant received, after the clamp.
    pub u_total: Signal,
    pub probes: Vec<Probe>,
    /// `sqrt((1/N) Σ e²)` over the N samples.
    pub rms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearningCurve {
    pub records: Vec<IterationRecord>,
    /// `‖e_k‖₂ / ‖e_{k-1}‖₂` for k = 2..K (NaN where the previous error is zero).
    pub ratios: Vec<f64>,
}

impl LearningCurve {
    pub fn rms(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.rms).collect()
    }

    pub fn last(&self) -> &IterationRecord {
        self.records
            .last()
            .expect("learning curve holds at least one record")
    }

    /// Smallest per-trial rms.
    pub fn min_rms(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.rms)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Run one trial from the canonical initial state with the given profile.
pub fn run_trial<P: Plant>(
    setup: &TrialSetup<P>,
    u_l: &Signal,
    k: usize,
) -> Result<IterationRecord> {
    run_trial_with(setup, u_l, k, &setup.feedback)
}

fn run_trial_with<P: Plant>(
    setup: &TrialSetup<P>,
    u_l: &Signal,
    k: usize,
    feedback: &Feedback,
) -> Result<IterationRecord> {
    let n = setup.len();
    let ts = setup.sample_period();
    if u_l.len() != n {
        return Err(Error::Length(format!(
            "profile has {} samples, trial has {n}",
            u_l.len()
        )));
    }
    let reference = setup.reference.samples();
    let disturbance = setup.disturbance.realize(k, n, ts);
    let plant = &setup.plant;
    let mut state = plant.initial_state(reference[0]);

    let mut y = Vec::with_capacity(n);
    let mut e = Vec::with_capacity(n);
    let mut u_f = Vec::with_capacity(n);
    let mut u_total = Vec::with_capacity(n);
    let mut probes = Vec::with_capacity(n);
    let mut e_prev = 0.0;
    let mut pid = PidState::default();

    for i in 0..n {
        let out = plant.output(&state);
        let err = reference[i] - out;
        let fb = match feedback {
            Feedback::Fuzzy(cfg) => fuzzy_pd(err, delta_error(err, e_prev), cfg),
            Feedback::Pd { kp, kd } => kp * err + kd * delta_error(err, e_prev),
            Feedback::Pid(gains) => {
                let (u, next) = pid_control(err, &pid, ts, gains, setup.u_limit);
                pid = next;
                u
            }
        };
        let u = (u_l[i] + fb).clamp(-setup.u_limit, setup.u_limit);
        y.push(out);
        e.push(err);
        u_f.push(fb);
        u_total.push(u);
        probes.push(plant.probe(&state));
        state = plant.step(&state, u, disturbance[i], ts)?;
        e_prev = err;
    }

    let rms = crate::signal::rms(&e);
    Ok(IterationRecord {
        k,
        y: Signal::new(y, ts)?,
        e: Signal::new(e, ts)?,
        u_l: u_l.clone(),
        u_f: Signal::new(u_f, ts)?,
        u_total: Signal::new(u_total, ts)?,
        probes,
        rms,
    })
}

/// Next feedforward profile `u_l_prev + α·W*(u_f_prev)`.
pub fn update_feedforward(
    u_l_prev: &Signal,
    u_f_prev: &Signal,
    alpha: f64,
    cfg: &WaveletConfig,
) -> Result<Signal> {
    if u_l_prev.len() != u_f_prev.len() {
        return Err(Error::Length(format!(
            "profile {} vs feedback {} samples",
            u_l_prev.len(),
            u_f_prev.len()
        )));
    }
    let learnable = wfilter(u_f_prev, &cfg.adapted_to(u_f_prev.len()))?;
    u_l_prev.add_scaled(&learnable, alpha)
}

fn next_profile<P: Plant>(setup: &TrialSetup<P>, prev: &IterationRecord) -> Result<Signal> {
    if setup.filter {
        update_feedforward(&prev.u_l, &prev.u_f, setup.alpha, &setup.wavelet)
    } else {
        prev.u_l.add_scaled(&prev.u_f, setup.alpha)
    }
}

/// Run `setup.iterations` trials, updating the profile between them.
pub fn run_learning<P: Plant>(setup: &TrialSetup<P>) -> Result<LearningCurve> {
    setup.validate()?;
    let first_feedback = match setup.mode {
        LearningMode::Normal => setup.feedback.clone(),
        LearningMode::GaBootstrap(gains) => Feedback::Pid(gains),
    };
    let zeros = Signal::zeros(setup.len(), setup.sample_period())?;
    let first = run_trial_with(setup, &zeros, 1, &first_feedback)?;
    let guard = DIVERGENCE_FACTOR * first.rms;
    check_divergence(&first, guard)?;

    let mut records = vec![first];
    let mut ratios = Vec::with_capacity(setup.iterations.saturating_sub(1));
    for k in 2..=setup.iterations {
        let prev = records.last().expect("non-empty");
        let u_l = next_profile(setup, prev)?;
        let rec = run_trial(setup, &u_l, k)?;
        check_divergence(&rec, guard)?;
        ratios.push(convergence_ratio(&rec.e, &prev.e).unwrap_or(f64::NAN));
        records.push(rec);
    }
    Ok(LearningCurve { records, ratios })
}

fn check_divergence(rec: &IterationRecord, guard: f64) -> Result<()> {
    if !rec.rms.is_finite() || (guard > 0.0 && rec.rms > guard) {
        return Err(Error::Divergence {
            iteration: rec.k,
            rms: rec.rms,
            guard,
        });
    }
    Ok(())
}

/// `‖e_k‖₂ / ‖e_{k-1}‖₂`.
pub fn convergence_ratio(e_k: &Signal, e_prev: &Signal) -> Result<f64> {
    let d = e_prev.norm2();
    if d == 0.0 {
        return Err(Error::DivisionByZero("previous error has zero norm".into()));
    }
    Ok(e_k.norm2() / d)
}

/// Complex amplitude of the component of `s` at `freq` Hz
/// (`(2/N) Σ s[n]·exp(-j2πf·nT_s)`).
pub fn tone(s: &Signal, freq: f64) -> Complex64 {
    let w = 2.0 * std::f64::consts::PI * freq * s.sample_period();
    let sum = s
        .samples()
        .iter()
        .enumerate()
        .fold(Complex64::new(0.0, 0.0), |acc, (n, v)| {
            acc + Complex64::from_polar(*v, -w * n as f64)
        });
    sum * (2.0 / s.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavelet::Wavelet;

    fn first_order() -> LinearPlant {
        LinearPlant::new(TransferFunction::new(vec![1.0], vec![1.0, 1.0]).unwrap()).unwrap()
    }

    fn sine(n: usize, ts: f64, freq: f64) -> Signal {
        Signal::new(
            (0..n)
                .map(|i| (2.0 * std::f64::consts::PI * freq * i as f64 * ts).sin())
                .collect(),
            ts,
        )
        .unwrap()
    }

    #[test]
    fn ratio_cases() {
        let e = Signal::new(vec![1.0, -2.0, 0.5], 0.1).unwrap();
        assert_eq!(convergence_ratio(&e, &e).unwrap(), 1.0);
        assert_eq!(convergence_ratio(&e.scaled(0.0), &e).unwrap(), 0.0);
        assert!((convergence_ratio(&e.scaled(0.5), &e).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(
            convergence_ratio(&e, &e.scaled(0.0)),
            Err(Error::DivisionByZero(_))
        ));
    }

    #[test]
    fn zero_feedback_is_open_loop() {
        let reference = sine(500, 0.01, 0.5);
        let setup = TrialSetup::new(
            reference.clone(),
            first_order(),
            Feedback::Pd { kp: 0.0, kd: 0.0 },
        );
        let u_l = Signal::zeros(500, 0.01).unwrap();
        let rec = run_trial(&setup, &u_l, 1).unwrap();
        assert!(rec.y.norm_inf() == 0.0);
        assert_eq!(rec.e, reference);
    }

    #[test]
    fn feedforward_update_cases() {
        let cfg = WaveletConfig::new(Wavelet::Haar, 2);
        let u_l = sine(64, 0.01, 1.0);
        let zero = Signal::zeros(64, 0.01).unwrap();
        assert_eq!(update_feedforward(&u_l, &zero, 1.0, &cfg).unwrap(), u_l);
        let c = Signal::constant(0.3, 64, 0.01).unwrap();
        let r = update_feedforward(&u_l, &c, 1.0, &cfg).unwrap();
        for (a, b) in r.samples().iter().zip(u_l.samples()) {
            assert!((a - b - 0.3).abs() < 1e-12);
        }
        let alt = Signal::new(
            (0..64)
                .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
                .collect(),
            0.01,
        )
        .unwrap();
        let r = update_feedforward(&u_l, &alt, 1.0, &cfg).unwrap();
        for (a, b) in r.samples().iter().zip(u_l.samples()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(update_feedforward(&u_l, &Signal::zeros(10, 0.01).unwrap(), 1.0, &cfg).is_err());
    }

    #[test]
    fn single_iteration_has_no_ratios() {
        let mut setup = TrialSetup::new(
            sine(400, 0.01, 0.5),
            first_order(),
            Feedback::Pd { kp: 1.0, kd: 0.0 },
        );
        setup.iterations = 1;
        let c = run_learning(&setup).unwrap();
        assert_eq!(c.records.len(), 1);
        assert!(c.ratios.is_empty());
    }

    #[test]
    fn zero_alpha_freezes_profile() {
        let mut setup = TrialSetup::new(
            sine(400, 0.01, 0.5),
            first_order(),
            Feedback::Pd { kp: 1.0, kd: 0.0 },
        );
        setup.alpha = 0.0;
        setup.iterations = 4;
        setup.wavelet = WaveletConfig::new(Wavelet::Db(4), 3);
        let c = run_learning(&setup).unwrap();
        let r0 = c.records[0].rms;
        assert!(c
            .records
            .iter()
            .all(|r| r.rms == r0 && r.u_l.norm_inf() == 0.0));
    }

    #[test]
    fn invalid_alpha_rejected() {
        let mut setup = TrialSetup::new(
            sine(400, 0.01, 0.5),
            first_order(),
            Feedback::Pd { kp: 1.0, kd: 0.0 },
        );
        setup.alpha = 2.0;
        assert!(matches!(run_learning(&setup), Err(Error::Config { .. })));
    }

    #[test]
    fn noise_is_seeded_per_trial() {
        let d = DisturbanceSpec {
            nonrepeatable_std: 2.0,
            bandwidth: 20.0,
            seed: 9,
            repeatable: None,
        };
        let a = d.realize(1, 4000, 1e-3);
        assert_eq!(a, d.realize(1, 4000, 1e-3));
        assert_ne!(a, d.realize(2, 4000, 1e-3));
        let std = crate::signal::rms(&a);
        assert!((std - 2.0).abs() < 0.4, "{std}");
    }

    #[test]
    fn tone_recovers_amplitude_and_phase() {
        let s = Signal::new(
            (0..1000)
                .map(|i| 0.7 * (2.0 * std::f64::consts::PI * 2.0 * i as f64 * 0.001 + 0.3).cos())
                .collect(),
            0.001,
        )
        .unwrap();
        let t = tone(&s, 2.0);
        assert!((t.norm() - 0.7).abs() < 1e-9);
        assert!((t.arg() - 0.3).abs() < 1e-9);
    }
}
