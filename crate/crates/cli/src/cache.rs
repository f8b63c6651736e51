//! Persistent expansion cache.
//!
//! One JSON file per entry, named by the SHA-256 of (name, params, prec,
//! format version). The payload carries its own checksum; an entry whose
//! checksum or key does not match is treated as a miss and overwritten.
//! Readers take a shared lock, writers an exclusive one.

use std::fs::{self, File, OpenOptions};
use std::io::{self, Read, Write};
use std::path::PathBuf;

use sha2::{Digest, Sha256};
use theta_orbits::{FJSeries, Rat};

pub const FORMAT_VERSION: u32 = 1;
const ENV_VAR: &str = "THETA_ORBIT_CACHE";
const DEFAULT_DIR: &str = ".theta_cache";

fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheKey(String);

impl CacheKey {
    pub fn new(name: &str, params: &str, prec: Rat) -> Self {
        let material = format!("v{FORMAT_VERSION}\0{name}\0{params}\0{prec}");
        CacheKey(hex_digest(material.as_bytes()))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CacheStats {
    pub entries: usize,
    pub bytes: u64,
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    pub fn from_env() -> Self {
        Cache::new(
            std::env::var_os(ENV_VAR).map_or_else(|| PathBuf::from(DEFAULT_DIR), PathBuf::from),
        )
    }

    fn path(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(format!("{}.json", key.0))
    }

    /// None on a miss, an unreadable entry or a checksum mismatch.
    pub fn get(&self, key: &CacheKey) -> Option<FJSeries> {
        let mut file = File::open(self.path(key)).ok()?;
        file.lock_shared().ok()?;
        let mut text = String::new();
        file.read_to_string(&mut text).ok()?;
        let entry: serde_json::Value = serde_json::from_str(&text).ok()?;
        if entry["version"].as_u64() != Some(FORMAT_VERSION as u64)
            || entry["key"].as_str() != Some(&key.0)
        {
            return None;
        }
        let payload = entry["payload"].as_str()?;
        if entry["checksum"].as_str() != Some(&hex_digest(payload.as_bytes())) {
            return None;
        }
        FJSeries::from_json(&serde_json::from_str(payload).ok()?).ok()
    }

    pub fn put(&self, key: &CacheKey, series: &FJSeries) -> io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let payload = series.to_json().to_string();
        let entry = serde_json::json!({
            "version": FORMAT_VERSION,
            "key": key.0,
            "checksum": hex_digest(payload.as_bytes()),
            "payload": payload,
        });
        let mut file = OpenOptions::new()
            .write(true)
            .create(true)
            .truncate(false)
            .open(self.path(key))?;
        file.lock()?;
        file.set_len(0)?;
        file.write_all(entry.to_string().as_bytes())?;
        file.sync_data()
    }

    fn entries(&self) -> io::Result<Vec<PathBuf>> {
        match fs::read_dir(&self.dir) {
            Ok(rd) => Ok(rd
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect()),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(Vec::new()),
            Err(e) => Err(e),
        }
    }

    /// Removes every entry; returns how many were removed.
    pub fn clear(&self) -> io::Result<usize> {
        let entries = self.entries()?;
        for p in &entries {
            fs::remove_file(p)?;
        }
        Ok(entries.len())
    }

    pub fn stats(&self) -> io::Result<CacheStats> {
        let mut stats = CacheStats::default();
        for p in self.entries()? {
            stats.entries += 1;
            stats.bytes += fs::metadata(&p)?.len();
        }
        Ok(stats)
    }

    pub fn dir(&self) -> &std::path::Path {
        &self.dir
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use theta_orbits::rational::int;
    use theta_orbits::thetas::theta;

    fn scratch(name: &str) -> Cache {
        let dir =
            std::env::temp_dir().join(format!("theta-cache-unit-{name}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        Cache::new(dir)
    }

    #[test]
    fn round_trip_is_exact() {
        let cache = scratch("rt");
        let s = theta(int(4));
        let key = CacheKey::new("v", "", int(4));
        assert!(cache.get(&key).is_none());
        cache.put(&key, &s).unwrap();
        assert_eq!(cache.get(&key).unwrap(), s);
        assert_eq!(cache.stats().unwrap().entries, 1);
        assert_eq!(cache.clear().unwrap(), 1);
        assert!(cache.get(&key).is_none());
    }

    #[test]
    fn corruption_is_a_miss() {
        let cache = scratch("corrupt");
        let key = CacheKey::new("v", "", int(3));
        cache.put(&key, &theta(int(3))).unwrap();
        let path = cache.path(&key);
        let text = fs::read_to_string(&path)
            .unwrap()
            .replacen("\\\"n\\\":", "\\\"n\\\":1", 1);
        fs::write(&path, text).unwrap();
        assert!(cache.get(&key).is_none());
        cache.clear().unwrap();
    }

    #[test]
    fn keys_separate_precisions() {
        assert_ne!(
            CacheKey::new("v", "", int(3)),
            CacheKey::new("v", "", int(4))
        );
        assert_ne!(
            CacheKey::new("v", "a", int(3)),
            CacheKey::new("v", "b", int(3))
        );
    }
}
