use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use super::Waveform;
use crate::error::{Error, Result};

fn hound_error(path: &Path, err: hound::Error) -> Error {
    match err {
        hound::Error::IoError(source) => Error::io(path, source),
        hound::Error::Unsupported => {
            Error::UnsupportedFormat { path: path.into(), reason: "unsupported WAV encoding".into() }
        }
        other => Error::Decode { path: path.into(), reason: other.to_string() },
    }
}

/// Reads a PCM (8/16/24/32-bit integer) or 32-bit float WAV file and
/// averages stereo to mono. Integer samples are scaled by `2^-(bits-1)`.
pub fn load_wav(path: impl AsRef<Path>) -> Result<Waveform> {
    let path = path.as_ref();
    let mut reader = WavReader::open(path).map_err(|e| hound_error(path, e))?;
    let spec = reader.spec();
    let channels = spec.channels as usize;
    if !(1..=2).contains(&channels) {
        return Err(Error::UnsupportedFormat {
            path: path.into(),
            reason: format!("{channels} channels (only mono and stereo are supported)"),
        });
    }
    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| hound_error(path, e))?,
        (SampleFormat::Int, bits @ (8 | 16 | 24 | 32)) => {
            let scale = 1.0 / (1u64 << (bits - 1)) as f64;
            reader
                .samples::<i32>()
                .map(|s| s.map(|v| v as f64 * scale))
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| hound_error(path, e))?
        }
        (format, bits) => {
            return Err(Error::UnsupportedFormat {
                path: path.into(),
                reason: format!("{bits}-bit {format:?} samples"),
            })
        }
    };
    if interleaved.len() < channels {
        return Err(Error::EmptyInput("WAV file contains no samples"));
    }
    let samples = if channels == 1 {
        interleaved
    } else {
        interleaved.chunks_exact(2).map(|f| 0.5 * (f[0] + f[1])).collect()
    };
    Waveform::new(samples, spec.sample_rate)
}

/// Writes 16-bit mono PCM. Samples outside `[-1, 1]` are clipped.
pub fn save_wav(w: &Waveform, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if w.is_empty() {
        return Err(Error::EmptyInput("refusing to write an empty waveform"));
    }
    let spec = WavSpec {
        channels: 1,
        sample_rate: w.sample_rate(),
        bits_per_sample: 16,
        sample_format: SampleFormat::Int,
    };
    let mut writer = WavWriter::create(path, spec).map_err(|e| hound_error(path, e))?;
    for &s in w.samples() {
        let q = (s * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        writer.write_sample(q).map_err(|e| hound_error(path, e))?;
    }
    writer.finalize().map_err(|e| hound_error(path, e))
}
