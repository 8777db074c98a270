//! Rational transfer functions used as linear diagnostic plants.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::Plant;
use crate::error::{Error, Result};

/// `G(s) = num(s) / den(s)`, coefficients in descending powers of `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferFunction {
    pub num: Vec<f64>,
    pub den: Vec<f64>,
}

fn polyval(coeffs: &[f64], s: Complex64) -> Complex64 {
    coeffs
        .iter()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * s + c)
}

impl TransferFunction {
    pub fn new(num: Vec<f64>, den: Vec<f64>) -> Result<Self> {
        let num = trim_leading_zeros(num);
        let den = trim_leading_zeros(den);
        if den.is_empty() {
            return Err(Error::Domain("denominator must be non-zero".into()));
        }
        if num.iter().chain(&den).any(|c| !c.is_finite()) {
            return Err(Error::Domain("coefficients must be finite".into()));
        }
        Ok(TransferFunction { num, den })
    }

    pub fn order(&self) -> usize {
        self.den.len() - 1
    }

    pub fn is_strictly_proper(&self) -> bool {
        self.num.len() < self.den.len()
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        polyval(&self.num, s) / polyval(&self.den, s)
    }
}

fn trim_leading_zeros(mut v: Vec<f64>) -> Vec<f64> {
    let first = v.iter().position(|c| *c != 0.0).unwrap_or(v.len());
    v.drain(..first);
    v
}

/// `G(jω)`.
pub fn frequency_response(tf: &TransferFunction, omega: f64) -> Result<Complex64> {
    if !(omega > 0.0) {
        return Err(Error::Domain(format!(
            "frequency must be positive, got {omega}"
        )));
    }
    let s = Complex64::new(0.0, omega);
    let d = polyval(&tf.den, s);
    let scale = tf.den.iter().map(|c| c.abs()).fold(0.0, f64::max).max(1.0)
        * omega.max(1.0).powi(tf.order() as i32);
    if d.norm() <= 1e-12 * scale {
        return Err(Error::PoleOnAxis { omega });
    }
    Ok(polyval(&tf.num, s) / d)
}

/// First frequency at which `Re G(jω)` stops being positive, searched on a
/// logarithmic grid over `[omega_min, omega_max]` and refined by bisection.
/// `None` when the real part stays positive over the whole range.
pub fn positive_real_cutoff(
    tf: &TransferFunction,
    omega_min: f64,
    omega_max: f64,
) -> Result<Option<f64>> {
    const GRID: usize = 4000;
    let ratio = (omega_max / omega_min).ln();
    let mut prev = omega_min;
    if frequency_response(tf, prev)?.re <= 0.0 {
        return Ok(Some(prev));
    }
    for k in 1..=GRID {
        let w = omega_min * (ratio * k as f64 / GRID as f64).exp();
        if frequency_response(tf, w)?.re <= 0.0 {
            let (mut lo, mut hi) = (prev, w);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if frequency_response(tf, mid)?.re > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(Some(0.5 * (lo + hi)));
        }
        prev = w;
    }
    Ok(None)
}

/// Predicted per-iteration error ratio `|1 + (1-α)·G·C| / |1 + G·C|` for a
/// linear feedback `C(jω)` at one frequency. At `α = 1` this is `1/|1 + G·C|`.
pub fn predicted_ratio(g: Complex64, c: Complex64, alpha: f64) -> f64 {
    let gc = g * c;
    (Complex64::new(1.0, 0.0) + gc * (1.0 - alpha)).norm() / (Complex64::new(1.0, 0.0) + gc).norm()
}

/// A strictly proper transfer function realized in controllable canonical
/// form and integrated with RK4 under a held input.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearPlant {
    tf: TransferFunction,
    /// Monic denominator coefficients `a_{n-1} .. a_0`.
    a: Vec<f64>,
    /// Output row, `c[i]` multiplies `x_i` (`x_0` is the deepest integrator).
    c: Vec<f64>,
}

impl LinearPlant {
    pub fn new(tf: TransferFunction) -> Result<Self> {
        if !tf.is_strictly_proper() {
            return Err(Error::Domain("linear plant must be strictly proper".into()));
        }
        let n = tf.order();
        let lead = tf.den[0];
        let a: Vec<f64> = tf.den[1..].iter().map(|v| v / lead).collect();
        let mut c = vec![0.0; n];
        for (k, b) in tf.num.iter().rev().enumerate() {
            c[k] = b / lead;
        }
        Ok(LinearPlant { tf, a, c })
    }

    pub fn transfer_function(&self) -> &TransferFunction {
        &self.tf
    }

    fn deriv(&self, x: &[f64], u: f64, out: &mut [f64]) {
        let n = x.len();
        out[..n - 1].copy_from_slice(&x[1..]);
        // x_n' = -a_0 x_0 - a_1 x_1 - ... - a_{n-1} x_{n-1} + u
        let mut acc = u;
        for (i, xi) in x.iter().enumerate() {
            acc -= self.a[n - 1 - i] * xi;
        }
        out[n - 1] = acc;
    }
}

impl Plant for LinearPlant {
    type State = Vec<f64>;

    /// Zero state; references for linear plants start at zero.
    fn initial_state(&self, _y0: f64) -> Vec<f64> {
        vec![0.0; self.tf.order()]
    }

    fn step(&self, x: &Vec<f64>, u: f64, disturbance: f64, dt: f64) -> Result<Vec<f64>> {
        if !(dt > 0.0) {
            return Err(Error::Domain(format!(
                "time step must be positive, got {dt}"
            )));
        }
        let n = x.len();
        let u = u + disturbance;
        let mut k1 = vec![0.0; n];
        let mut k2 = vec![0.0; n];
        let mut k3 = vec![0.0; n];
        let mut k4 = vec![0.0; n];
        let mut tmp = vec![0.0; n];
        self.deriv(x, u, &mut k1);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * dt * k1[i];
        }
        self.deriv(&tmp, u, &mut k2);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * dt * k2[i];
        }
        self.deriv(&tmp, u, &mut k3);
        for i in 0..n {
            tmp[i] = x[i] + dt * k3[i];
        }
        self.deriv(&tmp, u, &mut k4);
        Ok((0..n)
            .map(|i| x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect())
    }

    fn output(&self, x: &Vec<f64>) -> f64 {
        x.iter().zip(&self.c).map(|(a, b)| a * b).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tf(num: &[f64], den: &[f64]) -> TransferFunction {
        TransferFunction::new(num.to_vec(), den.to_vec()).unwrap()
    }

    #[test]
    fn first_order_at_unit_frequency() {
        let g = frequency_response(&tf(&[1.0], &[1.0, 1.0]), 1.0).unwrap();
        assert!((g.re - 0.5).abs() < 1e-15 && (g.im + 0.5).abs() < 1e-15);
    }

    #[test]
    fn first_order_is_positive_real_everywhere() {
        let g = tf(&[1.0], &[1.0, 1.0]);
        for k in 0..200 {
            let w = 10f64.powf(-3.0 + 6.0 * k as f64 / 199.0);
            let r = frequency_response(&g, w).unwrap();
            assert!((r.re - 1.0 / (1.0 + w * w)).abs() < 1e-12);
        }
        assert_eq!(positive_real_cutoff(&g, 1e-3, 1e3).unwrap(), None);
    }

    #[test]
    fn second_order_cutoff_at_two() {
        let g = tf(&[1.0], &[1.0, 0.8, 4.0]);
        let wc = positive_real_cutoff(&g, 1e-3, 1e3).unwrap().unwrap();
        assert!((wc - 2.0).abs() < 1e-9, "{wc}");
    }

    #[test]
    fn pole_on_axis() {
        let g = tf(&[1.0], &[1.0, 0.0, 4.0]);
        assert!(matches!(
            frequency_response(&g, 2.0),
            Err(Error::PoleOnAxis { .. })
        ));
        assert!(frequency_response(&g, 1.0).is_ok());
        assert!(frequency_response(&g, 0.0).is_err());
    }

    #[test]
    fn alpha_one_prediction() {
        let g = Complex64::new(0.5, -0.5);
        let r = predicted_ratio(g, Complex64::new(2.0, 0.0), 1.0);
        assert!((r - 1.0 / Complex64::new(2.0, -1.0).norm()).abs() < 1e-15);
    }

    #[test]
    fn step_response_of_first_order() {
        let p = LinearPlant::new(tf(&[2.0], &[1.0, 1.0])).unwrap();
        let mut x = p.initial_state(0.0);
        let dt = 0.01;
        for _ in 0..100 {
            x = p.step(&x, 1.0, 0.0, dt).unwrap();
        }
        let expect = 2.0 * (1.0 - (-1.0f64).exp());
        assert!((p.output(&x) - expect).abs() < 1e-9);
    }

    #[test]
    fn numerator_dynamics_realized() {
        // G(s) = (s + 3) / (s^2 + 3s + 2): steady-state gain 1.5
        let p = LinearPlant::new(tf(&[1.0, 3.0], &[1.0, 3.0, 2.0])).unwrap();
        let mut x = p.initial_state(0.0);
        for _ in 0..2000 {
            x = p.step(&x, 1.0, 0.0, 0.01).unwrap();
        }
        assert!((p.output(&x) - 1.5).abs() < 1e-6);
        assert!(LinearPlant::new(tf(&[1.0, 0.0], &[1.0, 1.0])).is_err());
    }
}
