//! Orthogonal dyadic discrete wavelet transform and the low-pass learning
//! filter built on it.
//!
//! Analysis uses the convention `a[i] = Σ_j h[j]·x[2i+1-j]` over an extended
//! signal. With [`Boundary::Symmetric`] the extension is half-sample
//! symmetric and each level produces `floor((N+F-1)/2)` coefficients, so any
//! length is supported and the stored per-level lengths trim the synthesis
//! output back exactly. [`Boundary::Periodization`] wraps the signal and is an
//! exactly orthogonal transform, but needs the length divisible by `2^level`.
//!
//! Filter taps are the standard Daubechies scaling filters (reconstruction
//! low-pass, the same values PyWavelets ships), listed in `docs/wavelets.md`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::Signal;

const HAAR: [f64; 2] = [
    std::f64::consts::FRAC_1_SQRT_2,
    std::f64::consts::FRAC_1_SQRT_2,
];

const DB2: [f64; 4] = [
    0.48296291314453416,
    0.8365163037378079,
    0.2241438680420134,
    -0.12940952255126037,
];

const DB3: [f64; 6] = [
    0.33267055295008263,
    0.8068915093110925,
    0.45987750211849154,
    -0.13501102001025458,
    -0.08544127388202666,
    0.03522629188570953,
];

const DB4: [f64; 8] = [
    0.2303778133088965,
    0.7148465705529157,
    0.6308807679298589,
    -0.027983769416859854,
    -0.18703481171909309,
    0.030841381835560764,
    0.0328830116668852,
    -0.010597401785069032,
];

const DB5: [f64; 10] = [
    0.16010239797419293,
    0.6038292697971896,
    0.7243085284377729,
    0.13842814590132074,
    -0.24229488706638203,
    -0.032244869584638375,
    0.07757149384004572,
    -0.006241490212798274,
    -0.012580751999081999,
    0.0033357252854737712,
];

const DB6: [f64; 12] = [
    0.11154074335010947,
    0.49462389039845306,
    0.7511339080210954,
    0.31525035170919763,
    -0.22626469396543983,
    -0.12976686756726194,
    0.09750160558732304,
    0.027522865530305727,
    -0.03158203931748603,
    0.0005538422011614961,
    0.004777257510945511,
    -0.0010773010853084796,
];

const DB7: [f64; 14] = [
    0.07785205408500918,
    0.3965393194819173,
    0.7291320908462351,
    0.4697822874051931,
    -0.14390600392856498,
    -0.22403618499387498,
    0.07130921926683026,
    0.08061260915108308,
    -0.03802993693501441,
    -0.01657454163066688,
    0.01255099855609984,
    0.0004295779729213665,
    -0.0018016407040474908,
    0.00035371379997452024,
];

const DB8: [f64; 16] = [
    0.05441584224310401,
    0.31287159091429995,
    0.6756307362972898,
    0.5853546836542067,
    -0.015829105256349306,
    -0.2840155429615469,
    0.0004724845739132828,
    0.12874742662047847,
    -0.017369301001807547,
    -0.044088253930794755,
    0.013981027917398282,
    0.008746094047405777,
    -0.004870352993451574,
    -0.00039174037337694705,
    0.0006754494064505693,
    -0.00011747678412476953,
];

/// Supported orthogonal wavelets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Wavelet {
    Haar,
    /// Daubechies with the given number of vanishing moments (2..=8).
    Db(u8),
}

impl Wavelet {
    pub const ALL: [Wavelet; 8] = [
        Wavelet::Haar,
        Wavelet::Db(2),
        Wavelet::Db(3),
        Wavelet::Db(4),
        Wavelet::Db(5),
        Wavelet::Db(6),
        Wavelet::Db(7),
        Wavelet::Db(8),
    ];

    /// Reconstruction low-pass taps.
    pub fn scaling_filter(self) -> &'static [f64] {
        match self {
            Wavelet::Haar | Wavelet::Db(1) => &HAAR,
            Wavelet::Db(2) => &DB2,
            Wavelet::Db(3) => &DB3,
            Wavelet::Db(4) => &DB4,
            Wavelet::Db(5) => &DB5,
            Wavelet::Db(6) => &DB6,
            Wavelet::Db(7) => &DB7,
            Wavelet::Db(8) => &DB8,
            Wavelet::Db(n) => unreachable!("db{n} is rejected at construction"),
        }
    }

    pub fn filter_len(self) -> usize {
        self.scaling_filter().len()
    }

    fn filters(self) -> FilterBank {
        let rec_lo = self.scaling_filter().to_vec();
        let f = rec_lo.len();
        let dec_lo: Vec<f64> = rec_lo.iter().rev().copied().collect();
        let dec_hi: Vec<f64> = (0..f)
            .map(|k| if k % 2 == 0 { -rec_lo[k] } else { rec_lo[k] })
            .collect();
        let rec_hi: Vec<f64> = dec_hi.iter().rev().copied().collect();
        FilterBank {
            dec_lo,
            dec_hi,
            rec_lo,
            rec_hi,
        }
    }
}

impl fmt::Display for Wavelet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Wavelet::Haar => write!(f, "haar"),
            Wavelet::Db(n) => write!(f, "db{n}"),
        }
    }
}

impl FromStr for Wavelet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        if lower == "haar" || lower == "db1" {
            return Ok(Wavelet::Haar);
        }
        if let Some(n) = lower.strip_prefix("db").and_then(|n| n.parse::<u8>().ok()) {
            if (2..=8).contains(&n) {
                return Ok(Wavelet::Db(n));
            }
        }
        Err(Error::config(
            "wavelet",
            format!("unknown wavelet `{s}` (expected haar or db1..db8)"),
        ))
    }
}

impl Serialize for Wavelet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Wavelet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

struct FilterBank {
    dec_lo: Vec<f64>,
    dec_hi: Vec<f64>,
    rec_lo: Vec<f64>,
    rec_hi: Vec<f64>,
}

/// Signal extension used at the trial edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Half-sample symmetric extension; any length.
    #[default]
    Symmetric,
    /// Periodic wrap; exactly orthogonal, length must be divisible by `2^level`.
    Periodization,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WaveletConfig {
    pub wavelet: Wavelet,
    pub level: usize,
    pub boundary: Boundary,
}

impl Default for WaveletConfig {
    fn default() -> Self {
        WaveletConfig {
            wavelet: Wavelet::Db(4),
            level: 8,
            boundary: Boundary::Symmetric,
        }
    }
}

impl WaveletConfig {
    pub fn new(wavelet: Wavelet, level: usize) -> Self {
        WaveletConfig {
            wavelet,
            level,
            boundary: Boundary::Symmetric,
        }
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn validate_for(&self, len: usize) -> Result<()> {
        if self.level == 0 {
            return Err(Error::Length("decomposition level must be >= 1".into()));
        }
        if self.level >= usize::BITS as usize || (1usize << self.level) > len {
            return Err(Error::Length(format!(
                "2^{} exceeds signal length {len}",
                self.level
            )));
        }
        if self.boundary == Boundary::Periodization && !len.is_multiple_of(1usize << self.level) {
            return Err(Error::Length(format!(
                "periodization needs length divisible by 2^{}, got {len}",
                self.level
            )));
        }
        Ok(())
    }

    /// The configured level, reduced to `floor(log2(len)) - 1` for short signals.
    pub fn level_for(&self, len: usize) -> usize {
        let max = (usize::BITS - 1 - len.max(2).leading_zeros()) as usize;
        let cap = max.saturating_sub(1).max(1);
        if self.level > cap {
            log::warn!(
                "wavelet level {} too deep for {len} samples, using {cap}",
                self.level
            );
            cap
        } else {
            self.level
        }
    }

    /// This config with its level adapted to `len` samples.
    pub fn adapted_to(&self, len: usize) -> WaveletConfig {
        WaveletConfig {
            level: self.level_for(len),
            ..*self
        }
    }
}

/// Coefficients of an `n`-level decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionTree {
    /// Approximation coefficients `A_n`.
    pub approximation: Vec<f64>,
    /// Detail coefficients, `details[0]` = `D_1` (finest) .. `details[n-1]` = `D_n`.
    pub details: Vec<Vec<f64>>,
    pub level: usize,
    pub wavelet: Wavelet,
    pub boundary: Boundary,
    /// Length of the signal entering each level; `input_lengths[0]` is the original length.
    pub input_lengths: Vec<usize>,
    pub sample_period: f64,
}

impl DecompositionTree {
    pub fn original_length(&self) -> usize {
        self.input_lengths[0]
    }

    /// Copy with all detail bands set to zero.
    pub fn approximation_only(&self) -> DecompositionTree {
        let mut t = self.clone();
        for d in &mut t.details {
            d.iter_mut().for_each(|v| *v = 0.0);
        }
        t
    }

    /// Copy with the approximation band set to zero.
    pub fn details_only(&self) -> DecompositionTree {
        let mut t = self.clone();
        t.approximation.iter_mut().for_each(|v| *v = 0.0);
        t
    }

    fn check(&self) -> Result<()> {
        let f = self.wavelet.filter_len();
        if self.level == 0
            || self.details.len() != self.level
            || self.input_lengths.len() != self.level
        {
            return Err(Error::Inconsistent(format!(
                "level {} with {} detail bands and {} lengths",
                self.level,
                self.details.len(),
                self.input_lengths.len()
            )));
        }
        for j in 0..self.level {
            let expect = coeff_len(self.input_lengths[j], f, self.boundary);
            if self.details[j].len() != expect {
                return Err(Error::Inconsistent(format!(
                    "D_{} has {} coefficients, expected {expect}",
                    j + 1,
                    self.details[j].len()
                )));
            }
            if j + 1 < self.level && self.input_lengths[j + 1] != expect {
                return Err(Error::Inconsistent(format!(
                    "level {} input length mismatch",
                    j + 2
                )));
            }
        }
        let last = coeff_len(self.input_lengths[self.level - 1], f, self.boundary);
        if self.approximation.len() != last {
            return Err(Error::Inconsistent(format!(
                "A_{} has {} coefficients, expected {last}",
                self.level,
                self.approximation.len()
            )));
        }
        Ok(())
    }
}

fn coeff_len(n: usize, f: usize, boundary: Boundary) -> usize {
    match boundary {
        Boundary::Symmetric => (n + f - 1) / 2,
        Boundary::Periodization => n / 2,
    }
}

/// Index into a half-sample symmetric extension of a length-`n` signal.
fn symmetric_index(k: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let m = k.rem_euclid(period);
    if m < n as isize {
        m as usize
    } else {
        (period - 1 - m) as usize
    }
}

fn analyze(x: &[f64], bank: &FilterBank, boundary: Boundary) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let f = bank.dec_lo.len();
    let out = coeff_len(n, f, boundary);
    let mut lo = vec![0.0; out];
    let mut hi = vec![0.0; out];
    for i in 0..out {
        let (mut a, mut d) = (0.0, 0.0);
        for j in 0..f {
            let idx = match boundary {
                Boundary::Symmetric => symmetric_index(2 * i as isize + 1 - j as isize, n),
                // phase F/2, as PyWavelets uses for this mode
                Boundary::Periodization => {
                    (2 * i as isize + (f / 2) as isize - j as isize).rem_euclid(n as isize) as usize
                }
            };
            a += bank.dec_lo[j] * x[idx];
            d += bank.dec_hi[j] * x[idx];
        }
        lo[i] = a;
        hi[i] = d;
    }
    (lo, hi)
}

fn synthesize(
    a: &[f64],
    d: &[f64],
    bank: &FilterBank,
    boundary: Boundary,
    out_len: usize,
) -> Vec<f64> {
    let f = bank.rec_lo.len();
    let mut x = vec![0.0; out_len];
    match boundary {
        Boundary::Symmetric => {
            // x[p] = Σ_i a[i]·g_lo[p + F - 2 - 2i] + d[i]·g_hi[p + F - 2 - 2i]
            for (i, (&ai, &di)) in a.iter().zip(d).enumerate() {
                let base = 2 * i as isize + 2 - f as isize;
                for k in 0..f {
                    let p = base + k as isize;
                    if p >= 0 && (p as usize) < out_len {
                        x[p as usize] += ai * bank.rec_lo[k] + di * bank.rec_hi[k];
                    }
                }
            }
        }
        Boundary::Periodization => {
            // adjoint of the wrapped analysis
            let n = out_len as isize;
            for (i, (&ai, &di)) in a.iter().zip(d).enumerate() {
                for j in 0..f {
                    let p = (2 * i as isize + (f / 2) as isize - j as isize).rem_euclid(n) as usize;
                    x[p] += bank.dec_lo[j] * ai + bank.dec_hi[j] * di;
                }
            }
        }
    }
    x
}

/// Cascade filter-bank analysis of `f` to `cfg.level` levels.
pub fn decompose(f: &Signal, cfg: &WaveletConfig) -> Result<DecompositionTree> {
    cfg.validate_for(f.len())?;
    let bank = cfg.wavelet.filters();
    let mut current = f.samples().to_vec();
    let mut details = Vec::with_capacity(cfg.level);
    let mut input_lengths = Vec::with_capacity(cfg.level);
    for _ in 0..cfg.level {
        input_lengths.push(current.len());
        let (lo, hi) = analyze(&current, &bank, cfg.boundary);
        details.push(hi);
        current = lo;
    }
    Ok(DecompositionTree {
        approximation: current,
        details,
        level: cfg.level,
        wavelet: cfg.wavelet,
        boundary: cfg.boundary,
        input_lengths,
        sample_period: f.sample_period(),
    })
}

/// Synthesis filter bank; inverse of [`decompose`].
pub fn reconstruct(tree: &DecompositionTree) -> Result<Signal> {
    tree.check()?;
    let bank = tree.wavelet.filters();
    let mut current = tree.approximation.clone();
    for j in (0..tree.level).rev() {
        current = synthesize(
            &current,
            &tree.details[j],
            &bank,
            tree.boundary,
            tree.input_lengths[j],
        );
    }
    Signal::new(current, tree.sample_period)
}

/// Low-pass learning filter: decompose, drop every detail band, rebuild from `A_n`.
pub fn wfilter(f: &Signal, cfg: &WaveletConfig) -> Result<Signal> {
    reconstruct(&decompose(f, cfg)?.approximation_only())
}

/// Time-domain components `(A_n(t), [D_1(t) .. D_n(t)])`; they sum to `f`.
pub fn components(f: &Signal, cfg: &WaveletConfig) -> Result<(Signal, Vec<Signal>)> {
    let tree = decompose(f, cfg)?;
    let approx = reconstruct(&tree.approximation_only())?;
    let mut details = Vec::with_capacity(tree.level);
    for j in 0..tree.level {
        let mut t = tree.details_only();
        for (i, d) in t.details.iter_mut().enumerate() {
            if i != j {
                d.iter_mut().for_each(|v| *v = 0.0);
            }
        }
        details.push(reconstruct(&t)?);
    }
    Ok((approx, details))
}

/// One-norms of `(1 - α·W*)^j f` for `j = 0..=iterations`.
pub fn contraction_check(
    f: &Signal,
    alpha: f64,
    cfg: &WaveletConfig,
    iterations: usize,
) -> Result<Vec<f64>> {
    let mut g = f.clone();
    let mut norms = Vec::with_capacity(iterations + 1);
    norms.push(g.norm1());
    for _ in 0..iterations {
        let w = wfilter(&g, cfg)?;
        g = g.add_scaled(&w, -alpha)?;
        norms.push(g.norm1());
    }
    Ok(norms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(v: &[f64]) -> Signal {
        Signal::new(v.to_vec(), 1.0).unwrap()
    }

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{x} vs {y}");
        }
    }

    #[test]
    fn filters_are_orthonormal() {
        for w in Wavelet::ALL {
            let h = w.scaling_filter();
            let sum: f64 = h.iter().sum();
            assert!((sum - std::f64::consts::SQRT_2).abs() < 1e-12, "{w}");
            for shift in (0..h.len()).step_by(2) {
                let dot: f64 = (0..h.len() - shift).map(|k| h[k] * h[k + shift]).sum();
                let expect = if shift == 0 { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-12, "{w} shift {shift}");
            }
        }
    }

    // Reference coefficients from PyWavelets (`wavedec`, mode="symmetric").
    #[test]
    fn matches_reference_db2_level2() {
        let x = sig(&[
            1.0, 4.0, 2.0, 8.0, 5.0, 7.0, 3.0, 9.0, 6.0, 0.0, 2.0, 5.0, 1.0,
        ]);
        let t = decompose(&x, &WaveletConfig::new(Wavelet::Db(2), 2)).unwrap();
        assert_close(
            &t.approximation,
            &[
                3.7712341226347257,
                4.665385682970027,
                12.273316684934153,
                8.136057158514987,
                4.167468245269452,
            ],
            1e-12,
        );
        assert_close(
            &t.details[1],
            &[
                -0.46979128114971314,
                1.7822912811497136,
                4.569069860407206,
                1.391746824526946,
                -1.8750000000000009,
            ],
            1e-12,
        );
        assert_close(
            &t.details[0],
            &[
                -1.8371173070873834,
                -3.216655692399971,
                -1.2501288627613267,
                -4.053171996137779,
                2.6135744423949463,
                -1.518239093554617,
                -1.025984994719314,
                2.863102301806698,
            ],
            1e-12,
        );
        let r = reconstruct(&t).unwrap();
        assert_close(r.samples(), x.samples(), 1e-12);
    }

    #[test]
    fn matches_reference_haar_odd_length() {
        let x = sig(&[
            1.0, 4.0, 2.0, 8.0, 5.0, 7.0, 3.0, 9.0, 6.0, 0.0, 2.0, 5.0, 1.0,
        ]);
        let t = decompose(&x, &WaveletConfig::new(Wavelet::Haar, 1)).unwrap();
        let s = std::f64::consts::SQRT_2;
        assert_close(
            &t.approximation,
            &[
                5.0 / s,
                10.0 / s,
                12.0 / s,
                12.0 / s,
                6.0 / s,
                7.0 / s,
                2.0 / s,
            ],
            1e-12,
        );
        assert_close(
            &t.details[0],
            &[
                -3.0 / s,
                -6.0 / s,
                -2.0 / s,
                -6.0 / s,
                6.0 / s,
                -3.0 / s,
                0.0,
            ],
            1e-12,
        );
    }

    #[test]
    fn constant_has_no_detail() {
        let t = decompose(&sig(&[2.0; 4]), &WaveletConfig::new(Wavelet::Haar, 1)).unwrap();
        assert!(t.details[0].iter().all(|d| d.abs() < 1e-15));
    }

    #[test]
    fn alternating_has_no_approximation() {
        let f = sig(&[1.0, -1.0, 1.0, -1.0]);
        let cfg = WaveletConfig::new(Wavelet::Haar, 1);
        let t = decompose(&f, &cfg).unwrap();
        assert!(t.approximation.iter().all(|a| a.abs() < 1e-15));
        assert!(wfilter(&f, &cfg).unwrap().norm_inf() < 1e-15);
        let r = reconstruct(&t.details_only()).unwrap();
        assert_close(r.samples(), f.samples(), 1e-15);
    }

    #[test]
    fn constant_survives_filtering() {
        for w in Wavelet::ALL {
            let f = Signal::constant(3.5, 100, 0.01).unwrap();
            let cfg = WaveletConfig::new(w, 3);
            let g = wfilter(&f, &cfg).unwrap();
            assert_close(g.samples(), f.samples(), 1e-12);
            let r = reconstruct(&decompose(&f, &cfg).unwrap().approximation_only()).unwrap();
            assert_close(r.samples(), f.samples(), 1e-12);
        }
    }

    #[test]
    fn level_too_deep_is_length_error() {
        let f = Signal::zeros(100, 1.0).unwrap();
        assert!(matches!(
            decompose(&f, &WaveletConfig::new(Wavelet::Haar, 7)),
            Err(Error::Length(_))
        ));
        assert!(decompose(&f, &WaveletConfig::new(Wavelet::Haar, 6)).is_ok());
        assert!(matches!(
            decompose(&f, &WaveletConfig::new(Wavelet::Haar, 0)),
            Err(Error::Length(_))
        ));
    }

    #[test]
    fn level_adapts_to_short_signals() {
        let cfg = WaveletConfig::default();
        assert_eq!(cfg.level_for(4000), 8);
        assert_eq!(cfg.level_for(256), 7);
        assert_eq!(cfg.level_for(100), 5);
        assert_eq!(cfg.level_for(2), 1);
    }

    #[test]
    fn mismatched_tree_is_rejected() {
        let f = Signal::new((0..64).map(|i| i as f64).collect(), 1.0).unwrap();
        let mut t = decompose(&f, &WaveletConfig::new(Wavelet::Db(4), 3)).unwrap();
        t.details[1].pop();
        assert!(matches!(reconstruct(&t), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn periodization_requires_divisible_length() {
        let f = Signal::zeros(100, 1.0).unwrap();
        let cfg = WaveletConfig::new(Wavelet::Db(2), 3).with_boundary(Boundary::Periodization);
        assert!(decompose(&f, &cfg).is_err());
        let f = Signal::new((0..96).map(|i| (i as f64 * 0.3).sin()).collect(), 1.0).unwrap();
        let r = reconstruct(&decompose(&f, &cfg).unwrap()).unwrap();
        assert_close(r.samples(), f.samples(), 1e-12);
    }

    #[test]
    fn contraction_on_constants() {
        let f = Signal::constant(2.0, 64, 1.0).unwrap();
        let cfg = WaveletConfig::new(Wavelet::Db(4), 3);
        let s = contraction_check(&f, 1.0, &cfg, 3).unwrap();
        assert!((s[0] - 128.0).abs() < 1e-12);
        assert!(s[1..].iter().all(|v| *v < 1e-9));
        let s = contraction_check(&f, 0.5, &cfg, 4).unwrap();
        for j in 1..s.len() {
            assert!((s[j] / s[j - 1] - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn wavelet_names_parse() {
        assert_eq!("db4".parse::<Wavelet>().unwrap(), Wavelet::Db(4));
        assert_eq!("Haar".parse::<Wavelet>().unwrap(), Wavelet::Haar);
        assert_eq!("db1".parse::<Wavelet>().unwrap(), Wavelet::Haar);
        assert!("db9".parse::<Wavelet>().is_err());
        assert!("sym4".parse::<Wavelet>().is_err());
    }
}
