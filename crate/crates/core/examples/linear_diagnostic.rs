//! Learning on a first-order linear plant under proportional feedback: the
//! measured per-trial shrink of the reference tone against `1/|1 + G·K_p|`.

use std::f64::consts::PI;

use num_complex::Complex64;
use wilc::ilc::{
    frequency_response, positive_real_cutoff, predicted_ratio, run_learning, tone, Feedback,
    LinearPlant, TransferFunction, TrialSetup,
};
use wilc::wavelet::{Wavelet, WaveletConfig};
use wilc::Signal;

fn main() -> wilc::Result<()> {
    let tf = TransferFunction::new(vec![1.0], vec![1.0, 1.0])?;
    let second = TransferFunction::new(vec![2.0], vec![1.0, 3.0, 2.0])?;
    println!(
        "Re G > 0 up to: first order {:?}, 2/(s^2+3s+2) {:.3?} rad/s",
        positive_real_cutoff(&tf, 1e-3, 1e3)?,
        positive_real_cutoff(&second, 1e-3, 1e3)?
    );

    let (ts, n, freq) = (0.01, 2000, 0.5);
    let reference = Signal::new(
        (0..n)
            .map(|i| (2.0 * PI * freq * i as f64 * ts).sin())
            .collect(),
        ts,
    )?;
    let g = frequency_response(&tf, 2.0 * PI * freq)?;
    for kp in [0.5, 1.0, 2.0] {
        let mut s = TrialSetup::new(
            reference.clone(),
            LinearPlant::new(tf.clone())?,
            Feedback::Pd { kp, kd: 0.0 },
        );
        s.wavelet = WaveletConfig::new(Wavelet::Db(4), 4);
        s.iterations = 6;
        s.u_limit = 1e6;
        let curve = run_learning(&s)?;
        let measured: Vec<String> = curve
            .records
            .windows(2)
            .map(|w| {
                format!(
                    "{:.4}",
                    tone(&w[1].e, freq).norm() / tone(&w[0].e, freq).norm()
                )
            })
            .collect();
        println!(
            "K_p {kp}: predicted {:.4}, measured {}",
            predicted_ratio(g, Complex64::new(kp, 0.0), 1.0),
            measured.join(" ")
        );
    }
    Ok(())
}
