//! Topological audio fingerprinting.
//!
//! Audio is turned into a mel-spectrogram, cut into overlapping one-second
//! windows, and each window is summarised by the Betti curves of the
//! upper-star persistent homology of its cubical complex. Two tracks are
//! compared by solving a minimum-cost assignment between their windows and
//! measuring how well the matching preserves temporal order.

pub mod audio_io;
pub mod cli;
pub mod cubical;
pub mod error;
pub mod fingerprint;
pub mod matching;
pub mod spectral;

pub use audio_io::{load_wav, obfuscate, save_wav, synth, ObfuscationKind, ObfuscationSpec, SynthSpec, Waveform};
pub use cubical::{betti_curve, betti_l1, upper_star_persistence, Bar, Barcode, BettiCurve, IntensityImage};
pub use error::{Error, Result};
pub use fingerprint::{
    fingerprint_track, normalize_window, read_fingerprint, window_slices, write_fingerprint, Fingerprint,
    FingerprintConfig, FingerprintEntry,
};
pub use matching::{
    classify_batch, compare, cost_matrix, min_cost_assignment, neighborhood_median, neighborhood_median_with, order_score, BatchMetrics,
    CompareParams, CostMatrix, Decision, Label, MatchResult, MedianEdges,
};
pub use spectral::{hann_window, mel_spectrogram, stft_magnitude, MelSpectrogram, StftConfig};
