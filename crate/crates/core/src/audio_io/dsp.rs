//! Signal-processing building blocks for the obfuscations.

use std::f64::consts::{PI, TAU};

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub(super) enum FilterKind {
    LowPass,
    HighPass,
}

/// Second-order Butterworth section (Q = 1/√2), direct form I.
pub(super) fn biquad(samples: &[f64], kind: FilterKind, cutoff: f64, sample_rate: u32) -> Vec<f64> {
    let w0 = TAU * cutoff / sample_rate as f64;
    let (sin, cos) = w0.sin_cos();
    let alpha = sin / (2.0 * std::f64::consts::FRAC_1_SQRT_2);
    let (b0, b1, b2) = match kind {
        FilterKind::LowPass => ((1.0 - cos) / 2.0, 1.0 - cos, (1.0 - cos) / 2.0),
        FilterKind::HighPass => ((1.0 + cos) / 2.0, -(1.0 + cos), (1.0 + cos) / 2.0),
    };
    let a0 = 1.0 + alpha;
    let (b0, b1, b2, a1, a2) = (b0 / a0, b1 / a0, b2 / a0, -2.0 * cos / a0, (1.0 - alpha) / a0);
    let (mut x1, mut x2, mut y1, mut y2) = (0.0, 0.0, 0.0, 0.0);
    samples
        .iter()
        .map(|&x| {
            let y = b0 * x + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
            x2 = x1;
            x1 = x;
            y2 = y1;
            y1 = y;
            y
        })
        .collect()
}

// Schroeder's delays in seconds and gains.
const COMBS: [(f64, f64); 4] = [(0.0297, 0.805), (0.0371, 0.827), (0.0411, 0.783), (0.0437, 0.764)];
const ALLPASSES: [(f64, f64); 2] = [(0.0050, 0.7), (0.0017, 0.7)];

/// Four parallel feedback combs followed by two series all-passes; the
/// output has the input's length (the tail is cut).
pub(super) fn schroeder_reverb(samples: &[f64], sample_rate: u32) -> Vec<f64> {
    let delay = |secs: f64| ((secs * sample_rate as f64).round() as usize).max(1);
    let mut wet = vec![0.0; samples.len()];
    for &(secs, gain) in &COMBS {
        let d = delay(secs);
        let mut y = vec![0.0; samples.len()];
        for n in 0..samples.len() {
            let fb = if n >= d { y[n - d] } else { 0.0 };
            y[n] = samples[n] + gain * fb;
        }
        for (w, v) in wet.iter_mut().zip(&y) {
            *w += v / COMBS.len() as f64;
        }
    }
    for &(secs, gain) in &ALLPASSES {
        let d = delay(secs);
        let x = wet.clone();
        for n in 0..x.len() {
            let xd = if n >= d { x[n - d] } else { 0.0 };
            let yd = if n >= d { wet[n - d] } else { 0.0 };
            wet[n] = -gain * x[n] + xd + gain * yd;
        }
    }
    wet
}

/// Voss–McCartney pink noise with `rows` random generators updated at
/// octave-spaced rates plus one white term.
pub(super) fn voss_mccartney(n: usize, rows: usize, mut uniform: impl FnMut() -> f64) -> Vec<f64> {
    let mut state: Vec<f64> = (0..rows).map(|_| uniform()).collect();
    let mut sum: f64 = state.iter().sum();
    (0..n)
        .map(|i| {
            if i > 0 {
                let k = i.trailing_zeros() as usize;
                if k < rows {
                    sum -= state[k];
                    state[k] = uniform();
                    sum += state[k];
                }
            }
            sum + uniform()
        })
        .collect()
}

const STRETCH_FFT: usize = 2048;
const STRETCH_HOP: usize = STRETCH_FFT / 4;

fn wrap_phase(x: f64) -> f64 {
    x - TAU * ((x + PI) / TAU).floor()
}

/// Phase-vocoder time stretch: `rate > 1` speeds up. The output has
/// `round(len / rate)` samples and the input's pitch.
pub fn time_stretch(samples: &[f64], rate: f64) -> Result<Vec<f64>> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::invalid(format!("stretch rate must be positive, got {rate}")));
    }
    if samples.is_empty() {
        return Err(Error::EmptyInput("nothing to stretch"));
    }
    let n_fft = STRETCH_FFT;
    let hop = STRETCH_HOP;
    let n_bins = n_fft / 2 + 1;
    let window: Vec<f64> = (0..n_fft).map(|k| 0.5 * (1.0 - (TAU * k as f64 / n_fft as f64).cos())).collect();
    let out_len = ((samples.len() as f64 / rate).round() as usize).max(1);

    // centred analysis with zero padding
    let pad = n_fft / 2;
    let mut padded = vec![0.0; samples.len() + 2 * pad];
    padded[pad..pad + samples.len()].copy_from_slice(samples);
    let n_frames = 1 + (padded.len().saturating_sub(n_fft)) / hop;

    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n_fft);
    let inv = planner.plan_fft_inverse(n_fft);
    let mut spectra: Vec<Vec<Complex<f64>>> = Vec::with_capacity(n_frames + 1);
    let mut buf = vec![Complex::new(0.0, 0.0); n_fft];
    for f in 0..n_frames {
        let frame = &padded[f * hop..f * hop + n_fft];
        for (slot, (&x, &w)) in buf.iter_mut().zip(frame.iter().zip(&window)) {
            *slot = Complex::new(x * w, 0.0);
        }
        fwd.process(&mut buf);
        spectra.push(buf[..n_bins].to_vec());
    }
    spectra.push(vec![Complex::new(0.0, 0.0); n_bins]);

    let expected: Vec<f64> = (0..n_bins).map(|k| TAU * k as f64 * hop as f64 / n_fft as f64).collect();
    let mut phase: Vec<f64> = spectra[0].iter().map(|c| c.arg()).collect();
    // synthesis frames only where analysis frames exist
    let n_out_frames = ((n_frames - 1) as f64 / rate).floor() as usize + 1;
    let mut out = vec![0.0; ((n_out_frames - 1) * hop + n_fft).max(out_len + 2 * pad)];
    let mut norm = vec![0.0; out.len()];
    let mut full = vec![Complex::new(0.0, 0.0); n_fft];
    for m in 0..n_out_frames {
        let t = m as f64 * rate;
        let k = (t.floor() as usize).min(n_frames - 1);
        let alpha = t - k as f64;
        let (a, b) = (&spectra[k], &spectra[k + 1]);
        for bin in 0..n_bins {
            let mag = (1.0 - alpha) * a[bin].norm() + alpha * b[bin].norm();
            full[bin] = Complex::from_polar(mag, phase[bin]);
            let advance = b[bin].arg() - a[bin].arg() - expected[bin];
            phase[bin] += expected[bin] + wrap_phase(advance);
        }
        for bin in 1..n_fft - n_bins + 1 {
            full[n_fft - bin] = full[bin].conj();
        }
        full[0].im = 0.0;
        full[n_bins - 1].im = 0.0;
        inv.process(&mut full);
        let start = m * hop;
        for i in 0..n_fft {
            out[start + i] += full[i].re / n_fft as f64 * window[i];
            norm[start + i] += window[i] * window[i];
        }
    }
    let peak_norm = norm.iter().copied().fold(0.0, f64::max);
    Ok((0..out_len)
        .map(|i| {
            let j = i + pad;
            if norm[j] > 1e-3 * peak_norm {
                out[j] / norm[j]
            } else {
                0.0
            }
        })
        .collect())
}

const SINC_ZERO_CROSSINGS: f64 = 32.0;
const KAISER_BETA: f64 = 8.0;

/// Modified Bessel function of the first kind, order zero.
fn bessel_i0(x: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    let q = x * x / 4.0;
    for k in 1..200 {
        term *= q / (k * k) as f64;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Band-limited resampling to exactly `out_len` samples with a
/// Kaiser-windowed sinc (β = 8, 32 zero crossings per side). When
/// shrinking, the cutoff drops to the output Nyquist.
pub fn resample(samples: &[f64], out_len: usize) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("nothing to resample"));
    }
    if out_len == 0 {
        return Err(Error::invalid("resampled length must be positive"));
    }
    if out_len == samples.len() {
        return Ok(samples.to_vec());
    }
    let step = samples.len() as f64 / out_len as f64;
    let cutoff = (1.0 / step).min(1.0);
    let half_width = SINC_ZERO_CROSSINGS / cutoff;
    let i0_beta = bessel_i0(KAISER_BETA);
    let n = samples.len() as isize;
    Ok((0..out_len)
        .map(|i| {
            let x = i as f64 * step;
            let lo = (x - half_width).ceil() as isize;
            let hi = (x + half_width).floor() as isize;
            let mut acc = 0.0;
            for k in lo.max(0)..=hi.min(n - 1) {
                let d = x - k as f64;
                let u = d / half_width;
                let taper = bessel_i0(KAISER_BETA * (1.0 - u * u).max(0.0).sqrt()) / i0_beta;
                acc += samples[k as usize] * cutoff * sinc(cutoff * d) * taper;
            }
            acc
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone(f: f64, n: usize, sr: f64) -> Vec<f64> {
        (0..n).map(|i| (TAU * f * i as f64 / sr).sin()).collect()
    }

    #[test]
    fn bessel_reference_values() {
        // I0(1) and I0(8) from tables
        assert!((bessel_i0(1.0) - 1.266_065_877_752_008_4).abs() < 1e-14);
        assert!((bessel_i0(8.0) - 427.564_115_721_804_7).abs() < 1e-9);
    }

    #[test]
    fn stretch_identity_reconstructs() {
        let x = tone(440.0, 20000, 44100.0);
        let y = time_stretch(&x, 1.0).unwrap();
        assert_eq!(y.len(), x.len());
        let err = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn stretch_lengths() {
        let x = tone(300.0, 44100, 44100.0);
        assert_eq!(time_stretch(&x, 2.0).unwrap().len(), 22050);
        assert_eq!(time_stretch(&x, 0.5).unwrap().len(), 88200);
        assert!(time_stretch(&x, 0.0).is_err());
        assert!(time_stretch(&[], 1.0).is_err());
    }

    #[test]
    fn resample_preserves_low_tone() {
        let x = tone(200.0, 8800, 44100.0);
        let y = resample(&x, 8000).unwrap();
        let sr_out = 44100.0 * 8000.0 / 8800.0;
        let expect = tone(200.0, 8000, sr_out);
        // ignore edges where the kernel is truncated
        let err = y[200..7800].iter().zip(&expect[200..7800]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-3, "{err}");
    }

    #[test]
    fn lowpass_dc_gain_is_unity() {
        let y = biquad(&vec![1.0; 4000], FilterKind::LowPass, 500.0, 44100);
        assert!((y[3999] - 1.0).abs() < 1e-9);
        let y = biquad(&vec![1.0; 4000], FilterKind::HighPass, 500.0, 44100);
        assert!(y[3999].abs() < 1e-9);
    }

    #[test]
    fn reverb_impulse_decays() {
        let mut x = vec![0.0; 44100];
        x[0] = 1.0;
        let y = schroeder_reverb(&x, 44100);
        let early: f64 = y[..4410].iter().map(|v| v * v).sum();
        let late: f64 = y[39690..].iter().map(|v| v * v).sum();
        assert!(early > 100.0 * late);
    }
}
