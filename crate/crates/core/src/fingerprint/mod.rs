//! Windowed topological fingerprints.

mod io;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::audio_io::Waveform;
use crate::cubical::{betti_curve, upper_star_persistence, BettiCurve, IntensityImage};
use crate::error::{Error, Result};
use crate::spectral::{mel_spectrogram, MelSpectrogram, StftConfig};

pub use io::{read_fingerprint, write_fingerprint, FORMAT_VERSION};

/// Betti curves are sampled on normalised intensities.
pub const BETTI_DOMAIN: (f64, f64) = (0.0, 1.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FingerprintConfig {
    /// Window length ω in seconds.
    pub window_seconds: f64,
    /// Overlap τ between consecutive windows, in `[0, 1)`.
    pub overlap: f64,
    /// Weight λ of the dimension-0 distance when matching.
    pub lambda: f64,
    pub betti_resolution: usize,
    pub stft: StftConfig,
}

impl Default for FingerprintConfig {
    fn default() -> Self {
        Self { window_seconds: 1.0, overlap: 0.4, lambda: 0.5, betti_resolution: 256, stft: StftConfig::default() }
    }
}

impl FingerprintConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.window_seconds.is_finite() && self.window_seconds > 0.0) {
            return Err(Error::invalid(format!("window must be positive, got {}", self.window_seconds)));
        }
        if !(0.0..1.0).contains(&self.overlap) {
            return Err(Error::invalid(format!("overlap must be in [0, 1), got {}", self.overlap)));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::invalid(format!("lambda must be in [0, 1], got {}", self.lambda)));
        }
        if self.betti_resolution < 2 {
            return Err(Error::invalid(format!("Betti resolution must be at least 2, got {}", self.betti_resolution)));
        }
        self.stft.validate()
    }

    /// Seconds between consecutive window starts.
    pub fn stride(&self) -> f64 {
        (1.0 - self.overlap) * self.window_seconds
    }

    /// Midpoint of window `i`.
    pub fn window_midpoint(&self, i: usize) -> f64 {
        i as f64 * self.stride() + self.window_seconds / 2.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FingerprintEntry {
    /// Window midpoint in seconds.
    pub t: f64,
    pub beta0: BettiCurve,
    pub beta1: BettiCurve,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fingerprint {
    pub entries: Vec<FingerprintEntry>,
    pub config: FingerprintConfig,
    pub source_duration: f64,
}

impl Fingerprint {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.t).collect()
    }
}

fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor().max(0.0) as usize
}

/// Cuts the spectrogram into windows that fit entirely; partial trailing
/// windows are dropped.
pub fn window_slices(spec: &MelSpectrogram, cfg: &FingerprintConfig) -> Result<Vec<(f64, IntensityImage)>> {
    cfg.validate()?;
    let fps = spec.frame_rate();
    let width = round_half_up(cfg.window_seconds * fps);
    if width == 0 {
        return Err(Error::invalid(format!("window of {} s spans no spectrogram columns", cfg.window_seconds)));
    }
    let rows = spec.n_mels();
    let n_cols = spec.n_frames();
    let mut out = Vec::new();
    for i in 0.. {
        let start = round_half_up(i as f64 * cfg.stride() * fps);
        if start + width > n_cols {
            break;
        }
        let mut values = Vec::with_capacity(rows * width);
        for r in 0..rows {
            values.extend_from_slice(&spec.values.row(r)[start..start + width]);
        }
        out.push((cfg.window_midpoint(i), IntensityImage::new(rows, width, values)?));
    }
    if out.is_empty() {
        return Err(Error::TrackTooShort {
            duration: (n_cols - 1) as f64 / fps,
            window: cfg.window_seconds,
        });
    }
    Ok(out)
}

/// Affine map of the window onto `[0, 1]`; constant windows become zero.
pub fn normalize_window(w: &IntensityImage) -> IntensityImage {
    let (lo, hi) = (w.min(), w.max());
    let range = hi - lo;
    if range > 0.0 {
        w.map(|v| ((v - lo) / range).clamp(0.0, 1.0)).expect("normalised values are finite")
    } else {
        w.map(|_| 0.0).expect("zero is finite")
    }
}

/// Betti curves of one normalised window.
pub fn window_entry(t: f64, window: &IntensityImage, cfg: &FingerprintConfig) -> Result<FingerprintEntry> {
    let barcode = upper_star_persistence(&normalize_window(window));
    let (lo, hi) = BETTI_DOMAIN;
    Ok(FingerprintEntry {
        t,
        beta0: betti_curve(&barcode, 0, lo, hi, cfg.betti_resolution)?,
        beta1: betti_curve(&barcode, 1, lo, hi, cfg.betti_resolution)?,
    })
}

pub fn fingerprint_spectrogram(spec: &MelSpectrogram, cfg: &FingerprintConfig, source_duration: f64) -> Result<Fingerprint> {
    let windows = window_slices(spec, cfg)?;
    let entries = windows
        .par_iter()
        .map(|(t, img)| window_entry(*t, img, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(Fingerprint { entries, config: cfg.clone(), source_duration })
}

/// The full pipeline: mel spectrogram, windows, normalisation, persistence
/// and Betti curves.
pub fn fingerprint_track(w: &Waveform, cfg: &FingerprintConfig) -> Result<Fingerprint> {
    cfg.validate()?;
    if w.duration() < cfg.window_seconds {
        return Err(Error::TrackTooShort { duration: w.duration(), window: cfg.window_seconds });
    }
    let spec = mel_spectrogram(w, &cfg.stft)?;
    fingerprint_spectrogram(&spec, cfg, w.duration())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audio_io::{synth, SynthSpec};

    fn silence(seconds: f64) -> Waveform {
        Waveform::new(vec![0.0; (seconds * 44100.0) as usize], 44100).unwrap()
    }

    #[test]
    fn thirty_seconds_gives_49_windows() {
        let spec = mel_spectrogram(&silence(30.0), &StftConfig::default()).unwrap();
        assert_eq!(spec.n_frames(), 5168);
        let windows = window_slices(&spec, &FingerprintConfig::default()).unwrap();
        assert_eq!(windows.len(), 49);
        for (i, (t, img)) in windows.iter().enumerate() {
            assert!((t - (0.5 + 0.6 * i as f64)).abs() < 1e-12);
            assert_eq!((img.rows(), img.cols()), (128, 172));
        }
    }

    #[test]
    fn one_second_single_window() {
        let spec = mel_spectrogram(&silence(1.0), &StftConfig::default()).unwrap();
        let windows = window_slices(&spec, &FingerprintConfig::default()).unwrap();
        assert_eq!(windows.len(), 1);
        assert_eq!(windows[0].0, 0.5);
    }

    #[test]
    fn disjoint_windows() {
        let spec = mel_spectrogram(&silence(5.0), &StftConfig::default()).unwrap();
        let cfg = FingerprintConfig { overlap: 0.0, ..Default::default() };
        let windows = window_slices(&spec, &cfg).unwrap();
        assert_eq!(windows.len(), 5);
        for (i, (t, _)) in windows.iter().enumerate() {
            assert_eq!(*t, i as f64 + 0.5);
        }
    }

    #[test]
    fn short_track_rejected() {
        let cfg = FingerprintConfig::default();
        assert!(matches!(fingerprint_track(&silence(0.9), &cfg), Err(Error::TrackTooShort { .. })));
        let spec = mel_spectrogram(&silence(0.99), &StftConfig::default()).unwrap();
        assert!(matches!(window_slices(&spec, &cfg), Err(Error::TrackTooShort { .. })));
    }

    #[test]
    fn normalization() {
        let img = IntensityImage::from_rows(&[[0.2, 0.5], [0.9, 0.3]]).unwrap();
        let n = normalize_window(&img);
        assert_eq!(n.min(), 0.0);
        assert_eq!(n.max(), 1.0);
        assert_eq!(normalize_window(&n), n);
        let flat = IntensityImage::new(3, 3, vec![-80.0; 9]).unwrap();
        assert!(normalize_window(&flat).values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn silence_fingerprint() {
        let fp = fingerprint_track(&silence(5.0), &FingerprintConfig::default()).unwrap();
        assert!(!fp.is_empty());
        for e in &fp.entries {
            // the single class (0, -inf) is dead on the whole midpoint grid of (0, 1)
            assert!(e.beta0.samples.iter().all(|&s| s == 0));
            assert!(e.beta1.samples.iter().all(|&s| s == 0));
        }
    }

    #[test]
    fn gain_invariance_sine() {
        let w = synth(&SynthSpec::Sine { freq: 440.0, duration: 5.0 }, 44100).unwrap();
        let cfg = FingerprintConfig::default();
        let a = fingerprint_track(&w, &cfg).unwrap();
        let b = fingerprint_track(&w.scaled(0.5).unwrap(), &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn config_validation() {
        let bad = [
            FingerprintConfig { window_seconds: 0.0, ..Default::default() },
            FingerprintConfig { overlap: 1.0, ..Default::default() },
            FingerprintConfig { overlap: -0.1, ..Default::default() },
            FingerprintConfig { lambda: 1.5, ..Default::default() },
            FingerprintConfig { betti_resolution: 1, ..Default::default() },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }
}
