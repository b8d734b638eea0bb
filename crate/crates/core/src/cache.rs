//! On-disk cache of orbit tables, keyed by group fingerprint and truncation.
//!
//! Files are bincode-encoded with a small header carrying a format tag and
//! version; any mismatch is treated as a miss and the table is rebuilt.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::GroupConfig;
use crate::orbits::{build_orbit_table_with, OrbitTable, PowerOptions};

pub const CACHE_FORMAT: &str = "szeta-orbit-table";
pub const CACHE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    fingerprint: String,
    max_len: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    /// Built and written.
    Stored,
    /// Built; an existing file was stale or unreadable and has been replaced.
    Replaced,
}

pub fn cache_path(dir: &Path, fingerprint: &str, max_len: usize) -> PathBuf {
    dir.join(format!("orbits-{fingerprint}-M{max_len}.bin"))
}

fn config() -> bincode::config::Configuration {
    bincode::config::standard()
}

pub fn save(path: &Path, table: &OrbitTable) -> Result<()> {
    let header = Header {
        format: CACHE_FORMAT.into(),
        version: CACHE_VERSION,
        fingerprint: table.fingerprint.clone(),
        max_len: table.max_len,
    };
    let mut bytes = bincode::serde::encode_to_vec(&header, config()).map_err(|e| Error::Cache(e.to_string()))?;
    bytes.extend(bincode::serde::encode_to_vec(table, config()).map_err(|e| Error::Cache(e.to_string()))?);
    // write next to the target, then rename, so readers never see a partial file
    let tmp = path.with_extension("tmp");
    let io = |e: std::io::Error| Error::Cache(format!("{}: {e}", path.display()));
    let mut file = fs::File::create(&tmp).map_err(io)?;
    file.write_all(&bytes).map_err(io)?;
    file.sync_all().map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

/// Reads a cached table, checking it against the expected key.
pub fn load(path: &Path, fingerprint: &str, max_len: usize, power: &PowerOptions) -> Result<OrbitTable> {
    let bytes = fs::read(path).map_err(|e| Error::Cache(format!("{}: {e}", path.display())))?;
    let (header, used): (Header, usize) =
        bincode::serde::decode_from_slice(&bytes, config()).map_err(|e| Error::Cache(e.to_string()))?;
    if header.format != CACHE_FORMAT || header.version != CACHE_VERSION {
        return Err(Error::Cache(format!(
            "{}: format {} v{}, expected {CACHE_FORMAT} v{CACHE_VERSION}",
            path.display(),
            header.format,
            header.version
        )));
    }
    if header.fingerprint != fingerprint || header.max_len != max_len {
        return Err(Error::Cache(format!("{}: key mismatch", path.display())));
    }
    let (table, _): (OrbitTable, usize) =
        bincode::serde::decode_from_slice(&bytes[used..], config()).map_err(|e| Error::Cache(e.to_string()))?;
    if table.fingerprint != fingerprint || table.max_len != max_len {
        return Err(Error::Cache(format!("{}: table does not match its header", path.display())));
    }
    if table.power != *power {
        return Err(Error::Cache(format!("{}: built with different power-iteration settings", path.display())));
    }
    Ok(table)
}

/// Cached table for `config` up to `max_len`, building and storing it on a miss.
pub fn load_or_build(
    dir: &Path,
    config: &GroupConfig,
    max_len: usize,
    power: &PowerOptions,
) -> Result<(OrbitTable, CacheStatus)> {
    let fingerprint = config.fingerprint();
    let path = cache_path(dir, &fingerprint, max_len);
    let existed = path.exists();
    if existed {
        if let Ok(table) = load(&path, &fingerprint, max_len, power) {
            return Ok((table, CacheStatus::Hit));
        }
    }
    let table = build_orbit_table_with(config, max_len, power)?;
    fs::create_dir_all(dir).map_err(|e| Error::Cache(format!("{}: {e}", dir.display())))?;
    save(&path, &table)?;
    Ok((table, if existed { CacheStatus::Replaced } else { CacheStatus::Stored }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbits::build_orbit_table;

    fn p() -> PowerOptions {
        PowerOptions::default()
    }

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let config = GroupConfig::symmetric(30.0, 3).unwrap();
        let (built, status) = load_or_build(dir.path(), &config, 8, &p()).unwrap();
        assert_eq!(status, CacheStatus::Stored);
        let (cached, status) = load_or_build(dir.path(), &config, 8, &p()).unwrap();
        assert_eq!(status, CacheStatus::Hit);
        assert_eq!(built, cached);
        assert!(built.iter().zip(cached.iter()).all(|(a, b)| a.u.to_bits() == b.u.to_bits()));
    }

    #[test]
    fn key_is_fingerprint_and_order() {
        let dir = tempfile::tempdir().unwrap();
        let a = GroupConfig::symmetric(30.0, 3).unwrap();
        let b = GroupConfig::symmetric(40.0, 3).unwrap();
        load_or_build(dir.path(), &a, 6, &p()).unwrap();
        assert_eq!(load_or_build(dir.path(), &b, 6, &p()).unwrap().1, CacheStatus::Stored);
        assert_eq!(load_or_build(dir.path(), &a, 7, &p()).unwrap().1, CacheStatus::Stored);
        let path = cache_path(dir.path(), &a.fingerprint(), 6);
        assert_eq!(load(&path, &b.fingerprint(), 6, &p()).unwrap_err().kind(), "Cache");
        let other = PowerOptions { tol: 1e-13, ..p() };
        assert_eq!(load(&path, &a.fingerprint(), 6, &other).unwrap_err().kind(), "Cache");
        assert_eq!(load_or_build(dir.path(), &a, 6, &other).unwrap().1, CacheStatus::Replaced);
    }

    #[test]
    fn corrupt_files_are_replaced() {
        let dir = tempfile::tempdir().unwrap();
        let config = GroupConfig::symmetric(30.0, 3).unwrap();
        let path = cache_path(dir.path(), &config.fingerprint(), 5);
        fs::write(&path, b"not a table").unwrap();
        let (table, status) = load_or_build(dir.path(), &config, 5, &p()).unwrap();
        assert_eq!(status, CacheStatus::Replaced);
        assert_eq!(table, build_orbit_table(&config, 5).unwrap());
        assert_eq!(load_or_build(dir.path(), &config, 5, &p()).unwrap().1, CacheStatus::Hit);
    }
}
