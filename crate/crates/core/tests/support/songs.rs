//! Synthetic "songs": two harmonic voices with rhythm and percussive clicks.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topoprint::Waveform;

pub const SAMPLE_RATE: u32 = 44100;

fn midi_to_hz(m: f64) -> f64 {
    440.0 * 2f64.powf((m - 69.0) / 12.0)
}

/// Adds one note with `partials` harmonics and an attack/exponential-decay
/// envelope into `out` starting at sample `start`.
fn add_note(out: &mut [f64], start: usize, len: usize, freq: f64, partials: u32, amp: f64, decay: f64) {
    let sr = SAMPLE_RATE as f64;
    let attack = (0.01 * sr) as usize;
    let nyquist = sr / 2.0;
    let norm: f64 = (1..=partials).map(|k| 1.0 / k as f64).sum();
    for n in 0..len.min(out.len().saturating_sub(start)) {
        let t = n as f64 / sr;
        let env = if n < attack { n as f64 / attack as f64 } else { (-(t - 0.01) * decay).exp() };
        let release = ((len - n) as f64 / (0.02 * sr)).min(1.0);
        let mut v = 0.0;
        for k in 1..=partials {
            let f = freq * k as f64;
            if f >= nyquist {
                break;
            }
            v += (TAU * f * t).sin() / k as f64;
        }
        out[start + n] += amp * env * release * v / norm;
    }
}

pub fn song(seed: u64, seconds: f64) -> Waveform {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sr = SAMPLE_RATE as f64;
    let n = (seconds * sr) as usize;
    let mut out = vec![0.0; n];
    let beat = rng.random_range(0.25..0.45);

    // melody
    let mut t = 0.0;
    let mut pitch: f64 = rng.random_range(60.0..76.0);
    while t < seconds {
        let len = beat * [0.5, 1.0, 1.0, 1.5, 2.0][rng.random_range(0..5)];
        if rng.random::<f64>() > 0.12 {
            pitch = (pitch + rng.random_range(-7..=7) as f64).clamp(52.0, 88.0);
            let partials = rng.random_range(3..9);
            let amp = rng.random_range(0.3..0.8);
            let decay = rng.random_range(1.0..6.0);
            add_note(&mut out, (t * sr) as usize, (len * sr) as usize, midi_to_hz(pitch), partials, amp, decay);
        }
        t += len;
    }

    // bass on the beat grid
    let mut t = 0.0;
    while t < seconds {
        let len = beat * [1.0, 2.0, 2.0, 4.0][rng.random_range(0..4)];
        let pitch = rng.random_range(33.0..52.0f64).round();
        add_note(&mut out, (t * sr) as usize, (len * sr) as usize, midi_to_hz(pitch), 6, 0.5, 2.0);
        t += len;
    }

    // percussive noise bursts
    let mut t = 0.0;
    while t < seconds {
        if rng.random::<f64>() < 0.6 {
            let start = (t * sr) as usize;
            let amp = rng.random_range(0.1..0.3);
            for k in 0..(0.05 * sr) as usize {
                if start + k >= n {
                    break;
                }
                let env = (-(k as f64) / (0.01 * sr)).exp();
                out[start + k] += amp * env * (rng.random::<f64>() - 0.5);
            }
        }
        t += beat / 2.0;
    }

    let peak = out.iter().fold(0.0f64, |a, &x| a.max(x.abs())).max(1e-9);
    Waveform::new(out.into_iter().map(|x| 0.9 * x / peak).collect(), SAMPLE_RATE).unwrap()
}
