//! Versioned JSON fingerprint files with a CRC32 over the canonical body.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Fingerprint, FingerprintConfig, FingerprintEntry, BETTI_DOMAIN};
use crate::cubical::BettiCurve;
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Serialize, Deserialize)]
struct EntryRecord {
    t: f64,
    beta0: Vec<u32>,
    beta1: Vec<u32>,
}

/// Field order is part of the format: version, config, source_duration,
/// entries, then the checksum.
#[derive(Serialize, Deserialize)]
struct Envelope {
    version: u64,
    config: FingerprintConfig,
    source_duration: f64,
    entries: Vec<EntryRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    crc32: Option<u32>,
}

impl Envelope {
    fn checksum(&self) -> Result<u32> {
        let body = Envelope {
            version: self.version,
            config: self.config.clone(),
            source_duration: self.source_duration,
            entries: self
                .entries
                .iter()
                .map(|e| EntryRecord { t: e.t, beta0: e.beta0.clone(), beta1: e.beta1.clone() })
                .collect(),
            crc32: None,
        };
        let bytes = serde_json::to_vec(&body).map_err(|e| Error::Malformed(e.to_string()))?;
        Ok(crc32fast::hash(&bytes))
    }
}

pub fn to_json(fp: &Fingerprint) -> Result<String> {
    let mut env = Envelope {
        version: FORMAT_VERSION,
        config: fp.config.clone(),
        source_duration: fp.source_duration,
        entries: fp
            .entries
            .iter()
            .map(|e| EntryRecord { t: e.t, beta0: e.beta0.samples.clone(), beta1: e.beta1.samples.clone() })
            .collect(),
        crc32: None,
    };
    env.crc32 = Some(env.checksum()?);
    serde_json::to_string(&env).map_err(|e| Error::Malformed(e.to_string()))
}

pub fn from_json(text: &str) -> Result<Fingerprint> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    let version = value
        .get("version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| Error::Malformed("missing or non-integer version".into()))?;
    if version != FORMAT_VERSION {
        return Err(Error::VersionMismatch { found: version, expected: FORMAT_VERSION });
    }
    let env: Envelope = serde_json::from_value(value).map_err(|e| Error::Malformed(e.to_string()))?;
    let stored = env.crc32.ok_or_else(|| Error::Malformed("missing crc32".into()))?;
    let computed = env.checksum()?;
    if stored != computed {
        return Err(Error::Checksum { stored, computed });
    }
    env.config.validate().map_err(|e| Error::Malformed(e.to_string()))?;
    let r = env.config.betti_resolution;
    let (lo, hi) = BETTI_DOMAIN;
    let mut entries = Vec::with_capacity(env.entries.len());
    for (i, e) in env.entries.into_iter().enumerate() {
        if e.beta0.len() != r || e.beta1.len() != r {
            return Err(Error::Malformed(format!("entry {i} does not have {r} Betti samples")));
        }
        if !e.t.is_finite() || entries.last().is_some_and(|p: &FingerprintEntry| p.t >= e.t) {
            return Err(Error::Malformed(format!("entry {i} time is not increasing")));
        }
        entries.push(FingerprintEntry {
            t: e.t,
            beta0: BettiCurve { lo, hi, samples: e.beta0 },
            beta1: BettiCurve { lo, hi, samples: e.beta1 },
        });
    }
    Ok(Fingerprint { entries, config: env.config, source_duration: env.source_duration })
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_fingerprint(fp: &Fingerprint, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = to_json(fp)?;
    text.push('\n');
    crate::cli::write_atomic(path, text.as_bytes())
}

pub fn read_fingerprint(path: impl AsRef<Path>) -> Result<Fingerprint> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_json(&text)
}
