use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::dsp::{self, FilterKind};
use super::{rms, Waveform};
use crate::error::{Error, Result};

const PINK_ROWS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObfuscationKind {
    WhiteNoise,
    PinkNoise,
    Reverb,
    HighPass,
    LowPass,
    TempoShift,
    PitchShift,
}

impl ObfuscationKind {
    pub const ALL: [ObfuscationKind; 7] = [
        Self::WhiteNoise,
        Self::PinkNoise,
        Self::Reverb,
        Self::HighPass,
        Self::LowPass,
        Self::TempoShift,
        Self::PitchShift,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::WhiteNoise => "white_noise",
            Self::PinkNoise => "pink_noise",
            Self::Reverb => "reverb",
            Self::HighPass => "high_pass",
            Self::LowPass => "low_pass",
            Self::TempoShift => "tempo_shift",
            Self::PitchShift => "pitch_shift",
        }
    }
}

impl fmt::Display for ObfuscationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ObfuscationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown obfuscation kind '{s}'")))
    }
}

/// An obfuscation and its degree:
///
/// | kind | degree |
/// |---|---|
/// | `white_noise`, `pink_noise` | noise RMS as a fraction of the signal RMS, `>= 0` |
/// | `reverb` | wet percentage in `[0, 100]` |
/// | `high_pass`, `low_pass` | cutoff in Hz, below Nyquist |
/// | `tempo_shift` | speed factor, `> 0`; 1 is the identity |
/// | `pitch_shift` | integer semitones in `[-12, 12]` |
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObfuscationSpec {
    pub kind: ObfuscationKind,
    pub degree: f64,
}

impl ObfuscationSpec {
    pub fn new(kind: ObfuscationKind, degree: f64) -> Result<Self> {
        let spec = Self { kind, degree };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.degree;
        let ok = d.is_finite()
            && match self.kind {
                ObfuscationKind::WhiteNoise | ObfuscationKind::PinkNoise => d >= 0.0,
                ObfuscationKind::Reverb => (0.0..=100.0).contains(&d),
                ObfuscationKind::HighPass | ObfuscationKind::LowPass => d > 0.0,
                ObfuscationKind::TempoShift => d > 0.0,
                ObfuscationKind::PitchShift => d.fract() == 0.0 && (-12.0..=12.0).contains(&d),
            };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("illegal degree {d} for {}", self.kind)))
        }
    }
}

impl fmt::Display for ObfuscationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind, self.degree)
    }
}

/// Parses `kind:degree`, e.g. `pitch_shift:-2`.
impl FromStr for ObfuscationSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, degree) = s
            .split_once(':')
            .ok_or_else(|| Error::invalid(format!("obfuscation '{s}' is not of the form kind:degree")))?;
        let degree: f64 =
            degree.trim().parse().map_err(|_| Error::invalid(format!("bad obfuscation degree in '{s}'")))?;
        Self::new(kind.trim().parse()?, degree)
    }
}

/// Zero-mean noise rescaled to `degree · RMS(signal)`.
fn add_noise(w: &Waveform, degree: f64, mut noise: Vec<f64>) -> Result<Waveform> {
    let target = degree * w.rms();
    let mean = noise.iter().sum::<f64>() / noise.len() as f64;
    noise.iter_mut().for_each(|x| *x -= mean);
    let scale = match rms(&noise) {
        r if r > 0.0 => target / r,
        _ => 0.0,
    };
    Waveform::new(w.samples().iter().zip(&noise).map(|(s, n)| s + scale * n).collect(), w.sample_rate())
}

/// Applies `spec` to `w`. `seed` drives the noise kinds only; the result is
/// a pure function of the arguments.
pub fn obfuscate(w: &Waveform, spec: &ObfuscationSpec, seed: u64) -> Result<Waveform> {
    spec.validate()?;
    if w.is_empty() {
        return Err(Error::EmptyInput("cannot obfuscate an empty waveform"));
    }
    let sr = w.sample_rate();
    let d = spec.degree;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match spec.kind {
        ObfuscationKind::WhiteNoise | ObfuscationKind::PinkNoise if d == 0.0 => Ok(w.clone()),
        ObfuscationKind::WhiteNoise => {
            let noise = (0..w.len()).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            add_noise(w, d, noise)
        }
        ObfuscationKind::PinkNoise => {
            let noise = dsp::voss_mccartney(w.len(), PINK_ROWS, || rng.random::<f64>() - 0.5);
            add_noise(w, d, noise)
        }
        ObfuscationKind::Reverb => {
            let mix = d / 100.0;
            let wet = dsp::schroeder_reverb(w.samples(), sr);
            Waveform::new(w.samples().iter().zip(&wet).map(|(x, y)| (1.0 - mix) * x + mix * y).collect(), sr)
        }
        ObfuscationKind::HighPass | ObfuscationKind::LowPass => {
            if d >= sr as f64 / 2.0 {
                return Err(Error::invalid(format!("cutoff {d} Hz is at or above Nyquist for {sr} Hz audio")));
            }
            let kind = if spec.kind == ObfuscationKind::LowPass { FilterKind::LowPass } else { FilterKind::HighPass };
            Waveform::new(dsp::biquad(w.samples(), kind, d, sr), sr)
        }
        ObfuscationKind::TempoShift => Waveform::new(dsp::time_stretch(w.samples(), d)?, sr),
        ObfuscationKind::PitchShift => {
            let ratio = 2f64.powf(d / 12.0);
            let stretched = dsp::time_stretch(w.samples(), 1.0 / ratio)?;
            Waveform::new(dsp::resample(&stretched, w.len())?, sr)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audio_io::{synth, SynthSpec};
    use crate::spectral::{mel_spectrogram, MelFilterbank, StftConfig};

    fn noise_track(seconds: f64) -> Waveform {
        synth(&SynthSpec::SeededNoise { duration: seconds, seed: 3 }, 44100).unwrap()
    }

    #[test]
    fn parse_specs() {
        let s: ObfuscationSpec = "pitch_shift:-2".parse().unwrap();
        assert_eq!(s, ObfuscationSpec { kind: ObfuscationKind::PitchShift, degree: -2.0 });
        assert_eq!(s.to_string(), "pitch_shift:-2");
        assert!("pitch_shift:1.5".parse::<ObfuscationSpec>().is_err());
        assert!("pitch_shift:13".parse::<ObfuscationSpec>().is_err());
        assert!("tempo_shift:0".parse::<ObfuscationSpec>().is_err());
        assert!("reverb:101".parse::<ObfuscationSpec>().is_err());
        assert!("wobble:1".parse::<ObfuscationSpec>().is_err());
        assert!("white_noise".parse::<ObfuscationSpec>().is_err());
        for k in ObfuscationKind::ALL {
            assert_eq!(k.name().parse::<ObfuscationKind>().unwrap(), k);
        }
    }

    #[test]
    fn zero_noise_is_identity() {
        let w = noise_track(0.5);
        for kind in [ObfuscationKind::WhiteNoise, ObfuscationKind::PinkNoise] {
            assert_eq!(obfuscate(&w, &ObfuscationSpec::new(kind, 0.0).unwrap(), 1).unwrap(), w);
        }
    }

    #[test]
    fn noise_statistics() {
        let w = synth(&SynthSpec::HarmonicMix { fundamental: 220.0, partials: 4, duration: 1.5 }, 44100).unwrap();
        for kind in [ObfuscationKind::WhiteNoise, ObfuscationKind::PinkNoise] {
            for degree in [0.05, 0.4] {
                let out = obfuscate(&w, &ObfuscationSpec::new(kind, degree).unwrap(), 11).unwrap();
                let diff: Vec<f64> = out.samples().iter().zip(w.samples()).map(|(a, b)| a - b).collect();
                let mean = diff.iter().sum::<f64>() / diff.len() as f64;
                assert!(mean.abs() < 0.01);
                let ratio = rms(&diff) / (degree * w.rms());
                assert!((ratio - 1.0).abs() < 0.05, "{kind} {degree}: {ratio}");
            }
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let w = noise_track(0.3);
        let spec = ObfuscationSpec::new(ObfuscationKind::PinkNoise, 0.2).unwrap();
        assert_eq!(obfuscate(&w, &spec, 5).unwrap(), obfuscate(&w, &spec, 5).unwrap());
        assert_ne!(obfuscate(&w, &spec, 5).unwrap(), obfuscate(&w, &spec, 6).unwrap());
        let reverb = ObfuscationSpec::new(ObfuscationKind::Reverb, 50.0).unwrap();
        assert_eq!(obfuscate(&w, &reverb, 5).unwrap(), obfuscate(&w, &reverb, 6).unwrap());
    }

    /// Mean periodogram power in octave bands starting at `f_lo`.
    fn octave_band_power(x: &[f64], sr: f64, f_lo: f64, bands: usize) -> Vec<f64> {
        let cfg = StftConfig { window_size: 4096, hop: 2048, ..Default::default() };
        let w = Waveform::new(x.to_vec(), sr as u32).unwrap();
        let mag = crate::spectral::stft_magnitude(&w, &cfg).unwrap();
        let bin_hz = sr / 4096.0;
        (0..bands)
            .map(|b| {
                let (lo, hi) = (f_lo * 2f64.powi(b as i32), f_lo * 2f64.powi(b as i32 + 1));
                let bins: Vec<usize> = (0..mag.rows).filter(|&k| (k as f64 * bin_hz) >= lo && (k as f64 * bin_hz) < hi).collect();
                let mut total = 0.0;
                for &k in &bins {
                    total += mag.row(k).iter().map(|m| m * m).sum::<f64>();
                }
                total / (bins.len() * mag.cols) as f64
            })
            .collect()
    }

    #[test]
    fn pink_noise_slope() {
        let silent = Waveform::new(vec![1e-9; 5 * 44100], 44100).unwrap();
        // silent has RMS 1e-9, so degree 1e8 yields unit-RMS pink noise
        let out = obfuscate(&silent, &ObfuscationSpec::new(ObfuscationKind::PinkNoise, 1e8).unwrap(), 2).unwrap();
        let bands = octave_band_power(out.samples(), 44100.0, 100.0, 6);
        assert!(bands.windows(2).all(|p| p[0] > p[1]), "{bands:?}");
    }

    #[test]
    fn low_pass_attenuation() {
        let w = noise_track(3.0);
        let cutoff = 1000.0;
        let out = obfuscate(&w, &ObfuscationSpec::new(ObfuscationKind::LowPass, cutoff).unwrap(), 0).unwrap();
        let band = |x: &[f64]| octave_band_power(x, 44100.0, 4.0 * cutoff, 2).iter().sum::<f64>();
        let atten_db = 10.0 * (band(w.samples()) / band(out.samples())).log10();
        assert!(atten_db >= 12.0, "{atten_db}");
        assert_eq!(out.len(), w.len());
    }

    #[test]
    fn high_pass_attenuates_low_band() {
        let w = noise_track(3.0);
        let out = obfuscate(&w, &ObfuscationSpec::new(ObfuscationKind::HighPass, 2000.0).unwrap(), 0).unwrap();
        let band = |x: &[f64]| octave_band_power(x, 44100.0, 125.0, 2).iter().sum::<f64>();
        assert!(10.0 * (band(w.samples()) / band(out.samples())).log10() >= 12.0);
        assert!(obfuscate(&w, &ObfuscationSpec::new(ObfuscationKind::HighPass, 30000.0).unwrap(), 0).is_err());
    }

    #[test]
    fn tempo_durations() {
        let w = synth(&SynthSpec::Sine { freq: 330.0, duration: 4.0 }, 44100).unwrap();
        let fast = obfuscate(&w, &ObfuscationSpec::new(ObfuscationKind::TempoShift, 2.0).unwrap(), 0).unwrap();
        assert!((fast.duration() - 2.0).abs() < 1e-3);
        let g = 1.1;
        let there = obfuscate(&w, &ObfuscationSpec::new(ObfuscationKind::TempoShift, g).unwrap(), 0).unwrap();
        let back = obfuscate(&there, &ObfuscationSpec::new(ObfuscationKind::TempoShift, 1.0 / g).unwrap(), 0).unwrap();
        assert!((back.len() as i64 - w.len() as i64).abs() <= 256);
    }

    #[test]
    fn pitch_octave_up() {
        let w = synth(&SynthSpec::Sine { freq: 440.0, duration: 1.0 }, 44100).unwrap();
        let up = obfuscate(&w, &ObfuscationSpec::new(ObfuscationKind::PitchShift, 12.0).unwrap(), 0).unwrap();
        assert_eq!(up.len(), w.len());
        let cfg = StftConfig::default();
        let mel = mel_spectrogram(&up, &cfg).unwrap();
        let peak = crate::spectral::argmax(&mel.time_average());
        let bank = MelFilterbank::new(&cfg, 44100).unwrap();
        let target = bank
            .centres()
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - 880.0).abs().total_cmp(&(b.1 - 880.0).abs()))
            .unwrap()
            .0;
        assert!((peak as i64 - target as i64).abs() <= 1, "peak {peak} target {target}");
    }

    #[test]
    fn rejects_bad_input() {
        let empty = Waveform::new(vec![], 44100).unwrap();
        let spec = ObfuscationSpec { kind: ObfuscationKind::Reverb, degree: 10.0 };
        assert!(matches!(obfuscate(&empty, &spec, 0), Err(Error::EmptyInput(_))));
        let bad = ObfuscationSpec { kind: ObfuscationKind::TempoShift, degree: -1.0 };
        assert!(obfuscate(&noise_track(0.1), &bad, 0).is_err());
    }
}
