//! On-disk result cache: one versioned JSON file per entry, named by the hash of every
//! value-affecting parameter. Writers serialize on an advisory lock.

use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::Config;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub schema_version: u32,
    pub kind: String,
    pub params_hash: String,
    /// the canonical parameter object the hash was taken over
    pub params: Value,
    pub payload: Value,
    pub error: Value,
    /// seconds since the Unix epoch
    pub timestamp: String,
}

/// Canonical parameters of a computation: kind, arguments and configuration.
pub fn canonical_params(kind: &str, args: &Value, cfg: &Config) -> Value {
    json!({ "schema_version": SCHEMA_VERSION, "kind": kind, "args": args, "config": cfg })
}

/// SHA-256 of the canonical JSON (serde_json maps keep their keys sorted).
pub fn params_hash(params: &Value) -> String {
    hex::encode(Sha256::digest(params.to_string().as_bytes()))
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn open(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create cache directory {}", dir.display()))?;
        Ok(Cache { dir: dir.to_path_buf() })
    }

    pub fn path(&self, hash: &str) -> PathBuf {
        self.dir.join(format!("{hash}.json"))
    }

    /// The entry for `params`, if present and written by this schema version.
    pub fn load(&self, params: &Value) -> Result<Option<CacheEntry>> {
        let hash = params_hash(params);
        let path = self.path(&hash);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e).with_context(|| format!("reading {}", path.display())),
        };
        let entry: CacheEntry = match serde_json::from_str(&text) {
            Ok(e) => e,
            Err(e) => {
                eprintln!("warning: ignoring unreadable cache entry {}: {e}", path.display());
                return Ok(None);
            }
        };
        if entry.schema_version != SCHEMA_VERSION || entry.params != *params {
            return Ok(None);
        }
        Ok(Some(entry))
    }

    /// Writes the entry atomically (temporary file + rename) under the directory lock.
    pub fn store(&self, kind: &str, params: &Value, payload: &Value, error: Value) -> Result<PathBuf> {
        let hash = params_hash(params);
        let entry = CacheEntry {
            schema_version: SCHEMA_VERSION,
            kind: kind.to_string(),
            params_hash: hash.clone(),
            params: params.clone(),
            payload: payload.clone(),
            error,
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0).to_string(),
        };
        let lock = OpenOptions::new().create(true).truncate(false).write(true).open(self.dir.join(".lock")).context("opening cache lock")?;
        lock.lock().context("acquiring cache lock")?;
        let path = self.path(&hash);
        let tmp = self.dir.join(format!(".{hash}.{}.tmp", std::process::id()));
        let result = (|| -> Result<()> {
            let mut f = File::create(&tmp)?;
            f.write_all(serde_json::to_string_pretty(&entry)?.as_bytes())?;
            f.sync_all()?;
            fs::rename(&tmp, &path)?;
            Ok(())
        })();
        let _ = lock.unlock();
        if result.is_err() {
            let _ = fs::remove_file(&tmp);
        }
        result.with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{default_config, Accel, Format};

    #[test]
    fn round_trip_is_bit_identical() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::open(dir.path()).unwrap();
        let cfg = default_config();
        let params = canonical_params("bcoeff", &json!({"m": 3, "n": 4}), &cfg);
        assert!(cache.load(&params).unwrap().is_none());
        let payload = json!({"value": "-0.000230612345678901234567890123456789", "error_estimate": "1.2e-5"});
        let path = cache.store("bcoeff", &params, &payload, json!({"error_estimate": "1.2e-5"})).unwrap();
        assert_eq!(path.file_name().unwrap().to_str().unwrap(), format!("{}.json", params_hash(&params)));
        let back = cache.load(&params).unwrap().unwrap();
        assert_eq!(back.payload, payload);
        assert_eq!(back.payload.to_string(), payload.to_string());
        assert_eq!(back.schema_version, SCHEMA_VERSION);
    }

    #[test]
    fn hash_covers_every_config_field() {
        let base = default_config();
        let args = json!({"m": 3});
        let h0 = params_hash(&canonical_params("bcoeff", &args, &base));
        let variants: Vec<Box<dyn Fn(&mut Config)>> = vec![
            Box::new(|c| c.precision_bits = 320),
            Box::new(|c| c.c_max = 20000),
            Box::new(|c| c.coeff_c_max = 2000),
            Box::new(|c| c.window = 32),
            Box::new(|c| c.n_terms = 24),
            Box::new(|c| c.tol = 1e-4),
            Box::new(|c| c.h = 5e-4),
            Box::new(|c| c.acceleration = Accel::Cesaro),
            Box::new(|c| c.format = Format::Csv),
        ];
        let config_fields = serde_json::to_value(&base).unwrap().as_object().unwrap().len();
        assert_eq!(variants.len(), config_fields, "a Config field is missing from this test");
        for (i, v) in variants.iter().enumerate() {
            let mut c = base.clone();
            v(&mut c);
            assert_ne!(params_hash(&canonical_params("bcoeff", &args, &c)), h0, "variant {i}");
        }
        assert_ne!(params_hash(&canonical_params("bcoeff", &json!({"m": 4}), &base)), h0);
        assert_ne!(params_hash(&canonical_params("trace", &args, &base)), h0);
        // the cache location is not a parameter
        let mut c = base.clone();
        c.cache_dir = Some("/elsewhere".into());
        assert_eq!(params_hash(&canonical_params("bcoeff", &args, &c)), h0);
    }

    #[test]
    fn foreign_schema_versions_are_ignored() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::open(dir.path()).unwrap();
        let params = canonical_params("hurwitz", &json!({"n": 3}), &default_config());
        let path = cache.store("hurwitz", &params, &json!({"value": "1/3"}), Value::Null).unwrap();
        let mut e: CacheEntry = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        e.schema_version = SCHEMA_VERSION + 1;
        fs::write(&path, serde_json::to_string(&e).unwrap()).unwrap();
        assert!(cache.load(&params).unwrap().is_none());
        fs::write(&path, "not json").unwrap();
        assert!(cache.load(&params).unwrap().is_none());
    }
}
