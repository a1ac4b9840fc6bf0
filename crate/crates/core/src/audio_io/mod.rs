//! Audio ingestion, synthetic test signals and obfuscations.

mod dsp;
mod obfuscate;
mod synth;
mod wav;

use crate::error::{Error, Result};

pub use dsp::{resample, time_stretch};
pub use obfuscate::{obfuscate, ObfuscationKind, ObfuscationSpec};
pub use synth::{synth, SynthSpec, DEFAULT_SAMPLE_RATE};
pub use wav::{load_wav, save_wav};

/// Mono signal with its sampling rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    samples: Vec<f64>,
    sample_rate: u32,
}

impl Waveform {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::invalid("sample rate must be positive"));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::invalid(format!("sample {i} is not finite")));
        }
        Ok(Self { samples, sample_rate })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Duration in seconds.
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    pub fn rms(&self) -> f64 {
        rms(&self.samples)
    }

    pub fn scaled(&self, gain: f64) -> Result<Self> {
        Self::new(self.samples.iter().map(|s| s * gain).collect(), self.sample_rate)
    }

    /// Samples in `[start, end)` seconds, clamped to the signal.
    pub fn slice_seconds(&self, start: f64, end: f64) -> Self {
        let sr = self.sample_rate as f64;
        let a = ((start * sr).round().max(0.0) as usize).min(self.len());
        let b = ((end * sr).round().max(0.0) as usize).clamp(a, self.len());
        Self { samples: self.samples[a..b].to_vec(), sample_rate: self.sample_rate }
    }

    /// `self` followed by `other`; sample rates must agree.
    pub fn concat(&self, other: &Waveform) -> Result<Self> {
        if self.sample_rate != other.sample_rate {
            return Err(Error::invalid(format!(
                "cannot join {} Hz and {} Hz audio",
                self.sample_rate, other.sample_rate
            )));
        }
        let mut samples = self.samples.clone();
        samples.extend_from_slice(&other.samples);
        Ok(Self { samples, sample_rate: self.sample_rate })
    }
}

pub(crate) fn rms(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    (xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64).sqrt()
}
