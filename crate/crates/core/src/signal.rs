//! Uniformly sampled scalar time series.

use std::ops::Index;

use crate::error::{Error, Result};

/// A uniformly sampled scalar signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    sample_period: f64,
}

impl Signal {
    pub fn new(samples: Vec<f64>, sample_period: f64) -> Result<Self> {
        if !(sample_period > 0.0) || !sample_period.is_finite() {
            return Err(Error::Domain(format!(
                "sample period must be positive, got {sample_period}"
            )));
        }
        if samples.is_empty() {
            return Err(Error::Length("signal must hold at least one sample".into()));
        }
        Ok(Signal {
            samples,
            sample_period,
        })
    }

    pub fn zeros(len: usize, sample_period: f64) -> Result<Self> {
        Signal::new(vec![0.0; len], sample_period)
    }

    pub fn constant(value: f64, len: usize, sample_period: f64) -> Result<Self> {
        Signal::new(vec![value; len], sample_period)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_period(&self) -> f64 {
        self.sample_period
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sample times `n * T_s`.
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |n| n as f64 * self.sample_period)
    }

    pub fn norm1(&self) -> f64 {
        norm1(&self.samples)
    }

    pub fn norm2(&self) -> f64 {
        norm2(&self.samples)
    }

    pub fn norm_inf(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Root mean square over the N stored samples.
    pub fn rms(&self) -> f64 {
        rms(&self.samples)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Signal {
        Signal {
            samples: self.samples.iter().map(|&v| f(v)).collect(),
            sample_period: self.sample_period,
        }
    }

    pub fn scaled(&self, k: f64) -> Signal {
        self.map(|v| k * v)
    }

    /// `self + k * other`; lengths must match.
    pub fn add_scaled(&self, other: &Signal, k: f64) -> Result<Signal> {
        if self.len() != other.len() {
            return Err(Error::Length(format!(
                "length mismatch: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a + k * b)
            .collect();
        Ok(Signal {
            samples,
            sample_period: self.sample_period,
        })
    }

    pub fn sub(&self, other: &Signal) -> Result<Signal> {
        self.add_scaled(other, -1.0)
    }
}

impl Index<usize> for Signal {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.samples[i]
    }
}

pub fn norm1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn rms(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_period_and_empty() {
        assert!(Signal::new(vec![1.0], 0.0).is_err());
        assert!(Signal::new(vec![1.0], -1.0).is_err());
        assert!(Signal::new(vec![], 1.0).is_err());
    }

    #[test]
    fn norms() {
        let s = Signal::new(vec![3.0, -4.0], 0.1).unwrap();
        assert_eq!(s.norm1(), 7.0);
        assert_eq!(s.norm2(), 5.0);
        assert_eq!(s.norm_inf(), 4.0);
        assert!((s.rms() - (12.5f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn add_scaled_checks_length() {
        let a = Signal::zeros(3, 1.0).unwrap();
        let b = Signal::zeros(4, 1.0).unwrap();
        assert!(matches!(a.add_scaled(&b, 1.0), Err(Error::Length(_))));
    }
}
