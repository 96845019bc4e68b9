use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use super::{check_args, compute_universal_polys, polar_degree_check, UnivWittPoly, WittKind};
use crate::error::Result;
use crate::exact::{poly_from_json, poly_to_json, PolyJson};

pub const FORMAT: &str = "wittpolar/1";

/// On-disk form of one `(p, n, kind)` family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheFile {
    pub format: String,
    pub p: u32,
    pub n: usize,
    pub kind: WittKind,
    pub polys: Vec<PolyJson>,
}

impl CacheFile {
    pub fn new(p: u32, n: usize, kind: WittKind, polys: &[UnivWittPoly]) -> Self {
        CacheFile {
            format: FORMAT.into(),
            p,
            n,
            kind,
            polys: polys.iter().map(|u| poly_to_json(&u.poly)).collect(),
        }
    }

    /// Decodes and re-certifies the polynomials; `None` on any mismatch.
    pub fn decode(&self) -> Option<Vec<UnivWittPoly>> {
        if self.format != FORMAT || self.polys.len() != self.n {
            return None;
        }
        let polys: Vec<UnivWittPoly> = self
            .polys
            .iter()
            .enumerate()
            .map(|(level, j)| {
                Some(UnivWittPoly {
                    p: self.p,
                    kind: self.kind,
                    level,
                    poly: poly_from_json(j).ok()?.to_integer()?,
                })
            })
            .collect::<Option<_>>()?;
        polys.iter().all(polar_degree_check).then_some(polys)
    }
}

/// `(p ≤ 5, n ≤ 2)` or `(p ≤ 3, n ≤ 4)`.
pub fn within_envelope(p: u32, n: usize) -> bool {
    (p <= 5 && n <= 2) || (p <= 3 && n <= 4)
}

pub fn cost_warning(p: u32, n: usize) -> Option<String> {
    (!within_envelope(p, n)).then(|| {
        format!("warning: Witt polynomials for p = {p}, n = {n} are outside the desk-scale envelope and may be slow")
    })
}

/// `$WITTPOLAR_CACHE`, or a directory under the system temp dir.
pub fn cache_dir() -> PathBuf {
    match std::env::var_os("WITTPOLAR_CACHE") {
        Some(d) if !d.is_empty() => PathBuf::from(d),
        _ => std::env::temp_dir().join("wittpolar-cache"),
    }
}

fn cache_path(dir: &Path, p: u32, n: usize, kind: WittKind) -> PathBuf {
    dir.join("wittpolys").join(format!("p{p}_n{n}_{kind}.json"))
}

type Key = (u32, WittKind);

fn memory() -> &'static Mutex<HashMap<Key, Arc<Vec<UnivWittPoly>>>> {
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<Vec<UnivWittPoly>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Universal polynomials of length `n`, from the in-process cache, the disk
/// cache, or a fresh derivation (in that order). Level `m` does not depend
/// on `n`, so a longer cached family serves shorter requests.
pub fn universal_polys(p: u32, n: usize, kind: WittKind) -> Result<Arc<Vec<UnivWittPoly>>> {
    check_args(p, n)?;
    if let Some(hit) = memory().lock().expect("cache lock").get(&(p, kind)) {
        if hit.len() >= n {
            return Ok(if hit.len() == n {
                hit.clone()
            } else {
                Arc::new(hit[..n].to_vec())
            });
        }
    }
    let dir = cache_dir();
    let polys = match read_disk(&dir, p, n, kind) {
        Some(polys) => polys,
        None => {
            let polys = compute_universal_polys(p, n, kind)?;
            // the disk cache is best effort
            let _ = write_disk(&dir, &CacheFile::new(p, n, kind, &polys));
            polys
        }
    };
    let polys = Arc::new(polys);
    let mut mem = memory().lock().expect("cache lock");
    let keep = mem.get(&(p, kind)).is_none_or(|old| old.len() < n);
    if keep {
        mem.insert((p, kind), polys.clone());
    }
    Ok(polys)
}

fn read_disk(dir: &Path, p: u32, n: usize, kind: WittKind) -> Option<Vec<UnivWittPoly>> {
    let text = fs::read_to_string(cache_path(dir, p, n, kind)).ok()?;
    let file: CacheFile = serde_json::from_str(&text).ok()?;
    if file.p != p || file.n != n || file.kind != kind {
        return None;
    }
    file.decode()
}

/// Writes to a unique temporary file and renames it into place, so readers
/// never see a partial file.
pub fn write_disk(dir: &Path, file: &CacheFile) -> std::io::Result<PathBuf> {
    static COUNTER: AtomicU64 = AtomicU64::new(0);
    let path = cache_path(dir, file.p, file.n, file.kind);
    let parent = path.parent().expect("cache path has a parent");
    fs::create_dir_all(parent)?;
    let tmp = parent.join(format!(
        ".{}.{}.{}.tmp",
        path.file_name().and_then(|s| s.to_str()).unwrap_or("poly"),
        std::process::id(),
        COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    let mut out = fs::File::create(&tmp)?;
    out.write_all(serde_json::to_string(file)?.as_bytes())?;
    out.write_all(b"\n")?;
    out.sync_all()?;
    drop(out);
    fs::rename(&tmp, &path)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope() {
        assert!(within_envelope(5, 2));
        assert!(within_envelope(3, 4));
        assert!(!within_envelope(5, 3));
        assert!(cost_warning(2, 5).is_some());
        assert!(cost_warning(2, 4).is_none());
    }

    #[test]
    fn disk_round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let polys = compute_universal_polys(3, 2, WittKind::Sum).unwrap();
        let path = write_disk(dir.path(), &CacheFile::new(3, 2, WittKind::Sum, &polys)).unwrap();
        assert!(path.ends_with("wittpolys/p3_n2_sum.json"));
        assert_eq!(read_disk(dir.path(), 3, 2, WittKind::Sum).unwrap(), polys);
        fs::write(&path, "{\"format\":\"wittpolar/1\"").unwrap();
        assert!(read_disk(dir.path(), 3, 2, WittKind::Sum).is_none());
    }

    #[test]
    fn longer_family_serves_prefix() {
        let long = universal_polys(2, 3, WittKind::Neg).unwrap();
        let short = universal_polys(2, 2, WittKind::Neg).unwrap();
        assert_eq!(&long[..2], &short[..]);
    }
}
