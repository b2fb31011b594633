//! Key-value run configuration.
//!
//! Config files are flat `key = value` text with `#` comments; dotted keys
//! group related settings (`species.a_hz = 3.0e7`). Every run carries an
//! explicit seed, and all physical overrides are echoed into output
//! metadata together with a hash of the canonicalized configuration.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::species::DonorSpecies;

/// Parsed key-value configuration (keys sorted).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KvConfig {
    entries: BTreeMap<String, String>,
}

impl KvConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::config(format!("line {}: expected `key = value`: {raw}", lineno + 1))
            })?;
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::config(format!("line {}: empty key", lineno + 1)));
            }
            entries.insert(key.to_string(), value.trim().to_string());
        }
        Ok(KvConfig { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|s| s.as_str())
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|_| Error::config(format!("{key}: not a number: {v}"))),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Canonical serialization: sorted `key = value` lines.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(v);
            out.push('\n');
        }
        out
    }

    /// FNV-1a hash of the canonical form, for output metadata.
    pub fn hash(&self) -> u64 {
        fnv1a(self.canonical().as_bytes())
    }

    /// Build a species from defaults plus any `species.*` overrides.
    pub fn species(&self) -> Result<DonorSpecies> {
        let mut sp = DonorSpecies::si_p();
        if let Some(name) = self.get("species.name") {
            sp.name = name.to_string();
        }
        if let Some(v) = self.get_f64("species.a_hz")? {
            sp.hyperfine_hz = v;
        }
        if let Some(v) = self.get_f64("species.g_n")? {
            sp.g_n = v;
        }
        if let Some(v) = self.get_f64("species.e_b_ev")? {
            sp.binding_energy_ev = v;
        }
        if let Some(v) = self.get_f64("species.a_bohr_m")? {
            sp.bohr_radius_m = v;
        }
        if let Some(v) = self.get_f64("species.t1_s")? {
            sp.t1_electron_s = v;
        }
        if let Some(v) = self.get_f64("species.t_phi_s")? {
            sp.t_phi_s = v;
        }
        if let Some(v) = self.get_f64("species.strain_factor")? {
            sp.strain_factor = v;
        }
        sp.validate()?;
        Ok(sp)
    }
}

pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}
