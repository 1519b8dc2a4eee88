//! Content-addressed result cache: one JSON file per input hash.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Environment variable naming the cache directory.
pub const CACHE_ENV: &str = "GWLOC_CACHE_DIR";
pub const DEFAULT_DIR: &str = ".gwloc-cache";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CachedResult {
    /// Canonical text of the rational function.
    pub value: String,
    pub trees: usize,
    pub point_seed: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

/// SHA-256 of canonical input text, hex encoded.
pub fn hash_input(canonical: &str) -> String {
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

impl Cache {
    pub fn at(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    pub fn from_env() -> Self {
        Cache::at(std::env::var_os(CACHE_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(DEFAULT_DIR)))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn get(&self, key: &str) -> Option<CachedResult> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        serde_json::from_str(&text).ok()
    }

    /// Writes to a temporary file in the cache directory, then renames it into place.
    pub fn put(&self, key: &str, value: &CachedResult) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(serde_json::to_string(value).expect("serializable").as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(self.path(key)).map_err(|e| e.error)?;
        Ok(())
    }

    fn files(&self) -> Vec<PathBuf> {
        let Ok(rd) = fs::read_dir(&self.dir) else { return Vec::new() };
        rd.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.extension().is_some_and(|x| x == "json")).collect()
    }

    pub fn len(&self) -> usize {
        self.files().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Removes every entry; returns how many were removed.
    pub fn clear(&self) -> std::io::Result<usize> {
        let files = self.files();
        for f in &files {
            fs::remove_file(f)?;
        }
        Ok(files.len())
    }
}

/// Looks `canonical` up, computing and storing on a miss. Returns the result and whether it was a hit.
/// Write failures are ignored: the cache is an optimization.
pub fn cached<E>(
    cache: Option<&Cache>,
    canonical: &str,
    compute: impl FnOnce() -> Result<CachedResult, E>,
) -> Result<(CachedResult, bool), E> {
    let Some(cache) = cache else { return compute().map(|r| (r, false)) };
    let key = hash_input(canonical);
    if let Some(hit) = cache.get(&key) {
        return Ok((hit, true));
    }
    let r = compute()?;
    let _ = cache.put(&key, &r);
    Ok((r, false))
}

/// Canonical text of an invariant computation, including everything that affects its value.
pub fn canonical_problem(p: &crate::engine::Problem, opts: &crate::engine::EngineOptions) -> String {
    use crate::io::{canonical_class, canonical_target};
    let mut s = format!("gwloc {}\n", env!("CARGO_PKG_VERSION"));
    s += &canonical_target(p.target);
    s += &format!("beta ({})\n", p.beta);
    for ins in &p.insertions {
        s += &format!("insertion psi^{} {}\n", ins.psi, canonical_class(&ins.class));
    }
    if let Some(tw) = p.twist {
        s += &format!("twist {:?} aux {}\n", tw.euler, tw.auxiliary_weight);
        for sm in &tw.summands {
            let ws: Vec<String> = sm.bundle.weights.iter().map(|w| w.to_string()).collect();
            s += &format!("summand {:?} [{}]\n", sm.orientation, ws.join("; "));
        }
    }
    s += &format!("cone {} limit_x {}\nmode {:?}\n", p.cone, p.limit_x, opts.mode);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_clear() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::at(dir.path().join("c"));
        let key = hash_input("P1 <pt,pt>_1");
        assert_eq!(key.len(), 64);
        assert!(cache.get(&key).is_none());
        let v = CachedResult { value: "1".into(), trees: 1, point_seed: None };
        cache.put(&key, &v).unwrap();
        assert_eq!(cache.get(&key), Some(v));
        assert_eq!(cache.len(), 1);
        assert_eq!(cache.clear().unwrap(), 1);
        assert!(cache.is_empty());
    }
}
