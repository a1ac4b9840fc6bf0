use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Waveform;
use crate::error::{Error, Result};

pub const DEFAULT_SAMPLE_RATE: u32 = 44100;

/// Deterministic test signals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SynthSpec {
    Sine { freq: f64, duration: f64 },
    /// Linear sweep from `f0` to `f1`.
    Chirp { f0: f64, f1: f64, duration: f64 },
    /// Consecutive unit-amplitude sines, `(frequency, duration)` each.
    ToneSequence { tones: Vec<(f64, f64)> },
    /// Partials `k · fundamental` for `k = 1..=partials` with amplitude `1/k`,
    /// normalised so the amplitudes sum to one.
    HarmonicMix { fundamental: f64, partials: u32, duration: f64 },
    /// Uniform noise in `[-0.5, 0.5)`.
    SeededNoise { duration: f64, seed: u64 },
}

fn sample_count(duration: f64, sample_rate: u32) -> Result<usize> {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::invalid(format!("duration must be positive, got {duration}")));
    }
    let n = (duration * sample_rate as f64).round() as usize;
    if n == 0 {
        return Err(Error::invalid(format!("duration {duration} s is shorter than one sample")));
    }
    Ok(n)
}

fn check_freq(f: f64, sample_rate: u32) -> Result<()> {
    let nyquist = sample_rate as f64 / 2.0;
    if !(f.is_finite() && f > 0.0) {
        return Err(Error::invalid(format!("frequency must be positive, got {f}")));
    }
    if f >= nyquist {
        return Err(Error::invalid(format!("frequency {f} Hz is at or above Nyquist ({nyquist} Hz)")));
    }
    Ok(())
}

fn sine(freq: f64, n: usize, sample_rate: u32) -> impl Iterator<Item = f64> {
    let sr = sample_rate as f64;
    (0..n).map(move |i| (TAU * freq * i as f64 / sr).sin())
}

pub fn synth(spec: &SynthSpec, sample_rate: u32) -> Result<Waveform> {
    if sample_rate == 0 {
        return Err(Error::invalid("sample rate must be positive"));
    }
    let sr = sample_rate as f64;
    let samples: Vec<f64> = match spec {
        SynthSpec::Sine { freq, duration } => {
            check_freq(*freq, sample_rate)?;
            sine(*freq, sample_count(*duration, sample_rate)?, sample_rate).collect()
        }
        SynthSpec::Chirp { f0, f1, duration } => {
            check_freq(*f0, sample_rate)?;
            check_freq(*f1, sample_rate)?;
            let n = sample_count(*duration, sample_rate)?;
            let sweep = (f1 - f0) / (2.0 * duration);
            (0..n)
                .map(|i| {
                    let t = i as f64 / sr;
                    (TAU * (f0 * t + sweep * t * t)).sin()
                })
                .collect()
        }
        SynthSpec::ToneSequence { tones } => {
            if tones.is_empty() {
                return Err(Error::invalid("tone sequence is empty"));
            }
            let mut out = Vec::new();
            for &(f, d) in tones {
                check_freq(f, sample_rate)?;
                out.extend(sine(f, sample_count(d, sample_rate)?, sample_rate));
            }
            out
        }
        SynthSpec::HarmonicMix { fundamental, partials, duration } => {
            if *partials == 0 {
                return Err(Error::invalid("harmonic mix needs at least one partial"));
            }
            check_freq(*fundamental, sample_rate)?;
            check_freq(fundamental * *partials as f64, sample_rate)?;
            let n = sample_count(*duration, sample_rate)?;
            let norm: f64 = (1..=*partials).map(|k| 1.0 / k as f64).sum();
            (0..n)
                .map(|i| {
                    let t = i as f64 / sr;
                    (1..=*partials)
                        .map(|k| (TAU * fundamental * k as f64 * t).sin() / k as f64)
                        .sum::<f64>()
                        / norm
                })
                .collect()
        }
        SynthSpec::SeededNoise { duration, seed } => {
            let n = sample_count(*duration, sample_rate)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            (0..n).map(|_| rng.random::<f64>() - 0.5).collect()
        }
    };
    Waveform::new(samples, sample_rate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{stft_magnitude, StftConfig};

    #[test]
    fn sine_closed_form() {
        let w = synth(&SynthSpec::Sine { freq: 440.0, duration: 1.0 }, 44100).unwrap();
        assert_eq!(w.len(), 44100);
        for n in [0usize, 1, 100, 44099] {
            assert_eq!(w.samples()[n], (TAU * 440.0 * n as f64 / 44100.0).sin());
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let bad = [
            SynthSpec::Sine { freq: 0.0, duration: 1.0 },
            SynthSpec::Sine { freq: 440.0, duration: 0.0 },
            SynthSpec::Sine { freq: 22050.0, duration: 1.0 },
            SynthSpec::Chirp { f0: 100.0, f1: 30000.0, duration: 1.0 },
            SynthSpec::ToneSequence { tones: vec![] },
            SynthSpec::ToneSequence { tones: vec![(440.0, -1.0)] },
            SynthSpec::HarmonicMix { fundamental: 4000.0, partials: 6, duration: 1.0 },
            SynthSpec::SeededNoise { duration: -2.0, seed: 1 },
        ];
        for spec in bad {
            assert!(synth(&spec, 44100).is_err(), "{spec:?}");
        }
    }

    #[test]
    fn tone_sequence_peaks() {
        let spec = SynthSpec::ToneSequence { tones: vec![(261.63, 0.5), (329.63, 0.5)] };
        let w = synth(&spec, 44100).unwrap();
        assert_eq!(w.len(), 44100);
        let cfg = StftConfig { window_size: 4096, hop: 1024, ..Default::default() };
        let mag = stft_magnitude(&w, &cfg).unwrap();
        let bin_hz = 44100.0 / 4096.0;
        let first = mag.argmax_in_column(8) as f64 * bin_hz;
        let second = mag.argmax_in_column(35) as f64 * bin_hz;
        assert!((first - 261.63).abs() <= bin_hz, "{first}");
        assert!((second - 329.63).abs() <= bin_hz, "{second}");
    }

    #[test]
    fn noise_is_reproducible() {
        let a = synth(&SynthSpec::SeededNoise { duration: 0.5, seed: 9 }, 8000).unwrap();
        let b = synth(&SynthSpec::SeededNoise { duration: 0.5, seed: 9 }, 8000).unwrap();
        let c = synth(&SynthSpec::SeededNoise { duration: 0.5, seed: 10 }, 8000).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.samples().iter().all(|s| (-0.5..0.5).contains(s)));
    }

    #[test]
    fn harmonic_mix_bounded() {
        let w = synth(&SynthSpec::HarmonicMix { fundamental: 220.0, partials: 5, duration: 0.2 }, 44100).unwrap();
        assert!(w.samples().iter().all(|s| s.abs() <= 1.0));
    }

    #[test]
    fn chirp_sweeps_up() {
        let w = synth(&SynthSpec::Chirp { f0: 200.0, f1: 4000.0, duration: 2.0 }, 44100).unwrap();
        let mag = stft_magnitude(&w, &StftConfig::default()).unwrap();
        let early = mag.argmax_in_column(20);
        let late = mag.argmax_in_column(mag.cols - 20);
        assert!(late > early);
    }
}
