//! Hann-windowed STFT, triangular mel filterbank and max-referenced dB.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::audio_io::Waveform;
use crate::error::{Error, Result};

/// Guard for the dB reference of silent input.
const POWER_REFERENCE_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StftConfig {
    pub window_size: usize,
    pub hop: usize,
    pub n_mels: usize,
    /// Lowest filter edge in Hz; `None` means the Rayleigh frequency `f_s / N_w`.
    pub f_min: Option<f64>,
    /// Highest filter edge in Hz; `None` means Nyquist.
    pub f_max: Option<f64>,
    /// Dynamic range kept below the spectrogram maximum, in dB.
    pub db_floor: f64,
}

impl Default for StftConfig {
    fn default() -> Self {
        Self { window_size: 1024, hop: 256, n_mels: 128, f_min: None, f_max: None, db_floor: 80.0 }
    }
}

impl StftConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window_size < 2 {
            return Err(Error::invalid(format!("window size must be at least 2, got {}", self.window_size)));
        }
        if self.hop == 0 || self.hop > self.window_size {
            return Err(Error::invalid(format!("hop must be in 1..={}, got {}", self.window_size, self.hop)));
        }
        if self.n_mels < 2 {
            return Err(Error::invalid(format!("need at least 2 mel bins, got {}", self.n_mels)));
        }
        if !(self.db_floor.is_finite() && self.db_floor > 0.0) {
            return Err(Error::invalid(format!("db_floor must be positive, got {}", self.db_floor)));
        }
        Ok(())
    }

    /// Filterbank edges `(f_min, f_max)` in Hz for the given sample rate.
    pub fn frequency_range(&self, sample_rate: u32) -> Result<(f64, f64)> {
        let nyquist = sample_rate as f64 / 2.0;
        let lo = self.f_min.unwrap_or(sample_rate as f64 / self.window_size as f64);
        let hi = self.f_max.unwrap_or(nyquist);
        if !(lo > 0.0 && lo < hi && hi <= nyquist) {
            return Err(Error::invalid(format!(
                "mel range must satisfy 0 < f_min < f_max <= {nyquist}, got [{lo}, {hi}]"
            )));
        }
        Ok((lo, hi))
    }

    /// Number of STFT frames for `n` samples with centred framing.
    pub fn frame_count(&self, n: usize) -> usize {
        n / self.hop + 1
    }
}

/// Row-major real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, values: vec![0.0; rows * cols] }
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.values[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.values[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    /// Index of the largest entry in column `c`, first on ties.
    pub fn argmax_in_column(&self, c: usize) -> usize {
        argmax(&self.column(c))
    }
}

pub(crate) fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// Mel spectrogram in dB relative to its own maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct MelSpectrogram {
    /// `n_mels` rows from low to high frequency, one column per frame.
    pub values: Matrix,
    pub frame_times: Vec<f64>,
    pub sample_rate: u32,
    pub config: StftConfig,
}

impl MelSpectrogram {
    pub fn n_mels(&self) -> usize {
        self.values.rows
    }

    pub fn n_frames(&self) -> usize {
        self.values.cols
    }

    /// Frames per second.
    pub fn frame_rate(&self) -> f64 {
        self.sample_rate as f64 / self.config.hop as f64
    }

    /// Per-bin average over all frames.
    pub fn time_average(&self) -> Vec<f64> {
        (0..self.n_mels())
            .map(|r| self.values.row(r).iter().sum::<f64>() / self.n_frames() as f64)
            .collect()
    }
}

/// `w_k = (1 - cos(2πk / (N - 1))) / 2`.
pub fn hann_window(n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::invalid(format!("Hann window needs at least 2 points, got {n}")));
    }
    let denom = (n - 1) as f64;
    Ok((0..n).map(|k| 0.5 * (1.0 - (2.0 * std::f64::consts::PI * k as f64 / denom).cos())).collect())
}

/// Mirror index into `0..len` as if the signal were reflected (without
/// repeating the edge sample) as many times as needed.
fn reflect_index(i: isize, len: usize) -> usize {
    if len == 1 {
        return 0;
    }
    let period = 2 * (len as isize - 1);
    let m = i.rem_euclid(period);
    if m < len as isize {
        m as usize
    } else {
        (period - m) as usize
    }
}

struct FramePlan {
    fft: Arc<dyn Fft<f64>>,
    window: Vec<f64>,
}

impl FramePlan {
    fn new(n: usize) -> Result<Self> {
        Ok(Self { fft: FftPlanner::new().plan_fft_forward(n), window: hann_window(n)? })
    }

    /// Magnitudes of the non-negative frequency bins of every centred frame.
    fn magnitudes(&self, samples: &[f64], cfg: &StftConfig) -> Matrix {
        let n_w = cfg.window_size;
        let n_bins = n_w / 2 + 1;
        let n_frames = cfg.frame_count(samples.len());
        let half = (n_w / 2) as isize;
        let mut out = Matrix::zeros(n_bins, n_frames);
        let mut buf = vec![Complex::new(0.0, 0.0); n_w];
        for frame in 0..n_frames {
            let start = (frame * cfg.hop) as isize - half;
            for (k, slot) in buf.iter_mut().enumerate() {
                let s = samples[reflect_index(start + k as isize, samples.len())];
                *slot = Complex::new(s * self.window[k], 0.0);
            }
            self.fft.process(&mut buf);
            for (bin, c) in buf[..n_bins].iter().enumerate() {
                out.values[bin * n_frames + frame] = c.norm();
            }
        }
        out
    }
}

/// `|STFT|` with `N_w / 2 + 1` rows and `floor(N / h) + 1` columns.
pub fn stft_magnitude(w: &Waveform, cfg: &StftConfig) -> Result<Matrix> {
    cfg.validate()?;
    if w.is_empty() {
        return Err(Error::EmptyInput("waveform has no samples"));
    }
    Ok(FramePlan::new(cfg.window_size)?.magnitudes(w.samples(), cfg))
}

pub fn hz_to_mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

pub fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

/// Unit-peak triangular filters.
#[derive(Debug, Clone)]
pub struct MelFilterbank {
    /// `n_mels + 2` edge frequencies in Hz; filter `m` rises on
    /// `[edges[m], edges[m+1]]` and falls on `[edges[m+1], edges[m+2]]`.
    pub edges: Vec<f64>,
    /// `n_mels` rows of `n_bins` weights.
    pub weights: Matrix,
}

impl MelFilterbank {
    pub fn new(cfg: &StftConfig, sample_rate: u32) -> Result<Self> {
        cfg.validate()?;
        let (lo, hi) = cfg.frequency_range(sample_rate)?;
        let (mel_lo, mel_hi) = (hz_to_mel(lo), hz_to_mel(hi));
        let n_edges = cfg.n_mels + 2;
        let edges: Vec<f64> = (0..n_edges)
            .map(|i| mel_to_hz(mel_lo + (mel_hi - mel_lo) * i as f64 / (n_edges - 1) as f64))
            .collect();
        let n_bins = cfg.window_size / 2 + 1;
        let bin_hz = sample_rate as f64 / cfg.window_size as f64;
        let mut weights = Matrix::zeros(cfg.n_mels, n_bins);
        for m in 0..cfg.n_mels {
            let (left, centre, right) = (edges[m], edges[m + 1], edges[m + 2]);
            for bin in 0..n_bins {
                let f = bin as f64 * bin_hz;
                let w = if f > left && f <= centre {
                    (f - left) / (centre - left)
                } else if f > centre && f < right {
                    (right - f) / (right - centre)
                } else {
                    0.0
                };
                weights.values[m * n_bins + bin] = w;
            }
        }
        Ok(Self { edges, weights })
    }

    pub fn centres(&self) -> &[f64] {
        &self.edges[1..self.edges.len() - 1]
    }

    /// Applies the filterbank to a power spectrogram with `n_bins` rows.
    fn apply(&self, power: &Matrix) -> Matrix {
        let n_mels = self.weights.rows;
        let mut out = Matrix::zeros(n_mels, power.cols);
        for m in 0..n_mels {
            let wrow = self.weights.row(m);
            let orow = &mut out.values[m * power.cols..(m + 1) * power.cols];
            for (bin, &w) in wrow.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                for (o, &p) in orow.iter_mut().zip(power.row(bin)) {
                    *o += w * p;
                }
            }
        }
        out
    }
}

/// Power → mel filterbank → `10 log10(p / max p)`, floored at `-db_floor`.
pub fn mel_spectrogram(w: &Waveform, cfg: &StftConfig) -> Result<MelSpectrogram> {
    let bank = MelFilterbank::new(cfg, w.sample_rate())?;
    let mut power = stft_magnitude(w, cfg)?;
    for v in &mut power.values {
        *v *= *v;
    }
    let mut mel = bank.apply(&power);
    let reference = mel.values.iter().copied().fold(0.0, f64::max).max(POWER_REFERENCE_FLOOR);
    for v in &mut mel.values {
        *v = (10.0 * (*v / reference).log10()).max(-cfg.db_floor);
    }
    let frame_times =
        (0..mel.cols).map(|n| (n * cfg.hop) as f64 / w.sample_rate() as f64).collect();
    Ok(MelSpectrogram { values: mel, frame_times, sample_rate: w.sample_rate(), config: cfg.clone() })
}
