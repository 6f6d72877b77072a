//! Checksummed on-disk storage of assembled stabilizer bases.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! "ROMB" | u32 version | u32 n | u64 columns | u64 nonzeros
//! payload: row index per nonzero (u16 for n ≤ 4, u32 for n = 5),
//!          then ⌈nonzeros/8⌉ sign bytes (bit i%8 of byte i/8 set means -1)
//! u64 CRC-64/XZ of the payload
//! ```

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use crc::{Crc, CRC_64_XZ};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::pauli::MAX_DENSE_QUBITS;
use crate::robustness::{basis_memory_estimate, BasisMatrix, DEFAULT_MAX_QUBITS};
use crate::stabilizer::stabilizer_state_count;

pub const MAGIC: &[u8; 4] = b"ROMB";
pub const FORMAT_VERSION: u32 = 1;
/// Environment variable overriding the cache directory.
pub const CACHE_DIR_ENV: &str = "ROM_CACHE_DIR";

const CRC64: Crc<u64> = Crc::<u64>::new(&CRC_64_XZ);
const CHUNK: usize = 1 << 16;

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("basis file not found: {0}")]
    Missing(PathBuf),
    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path} is not a basis file (bad magic bytes)")]
    BadMagic { path: PathBuf },
    #[error("{path} has format version {found}, expected {expected}")]
    Version { path: PathBuf, found: u32, expected: u32 },
    #[error("{path} is corrupt: {reason}")]
    Corrupt { path: PathBuf, reason: String },
    #[error("{path} failed its checksum (stored {stored:#018x}, computed {computed:#018x})")]
    Checksum { path: PathBuf, stored: u64, computed: u64 },
}

fn io_err(path: &Path) -> impl Fn(io::Error) -> CacheError + '_ {
    move |source| CacheError::Io { path: path.to_path_buf(), source }
}

/// Writes `basis` to `path`.
pub fn save_basis(basis: &BasisMatrix, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    let n = basis.num_qubits();
    let nnz = basis.nnz();
    let mut header = Vec::with_capacity(28);
    header.extend_from_slice(MAGIC);
    header.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    header.extend_from_slice(&(n as u32).to_le_bytes());
    header.extend_from_slice(&(basis.num_cols() as u64).to_le_bytes());
    header.extend_from_slice(&(nnz as u64).to_le_bytes());
    w.write_all(&header).map_err(io_err(path))?;

    let mut digest = CRC64.digest();
    let mut buf = Vec::with_capacity(CHUNK * 4);
    for chunk in basis.raw_rows().chunks(CHUNK) {
        buf.clear();
        for &r in chunk {
            if n <= DEFAULT_MAX_QUBITS {
                buf.extend_from_slice(&r.to_le_bytes());
            } else {
                buf.extend_from_slice(&(r as u32).to_le_bytes());
            }
        }
        digest.update(&buf);
        w.write_all(&buf).map_err(io_err(path))?;
    }
    let sign_bytes = nnz.div_ceil(8);
    let mut written = 0;
    for word in basis.raw_negative() {
        let bytes = word.to_le_bytes();
        let take = (sign_bytes - written).min(8);
        digest.update(&bytes[..take]);
        w.write_all(&bytes[..take]).map_err(io_err(path))?;
        written += take;
    }
    w.write_all(&digest.finalize().to_le_bytes()).map_err(io_err(path))?;
    w.flush().map_err(io_err(path))?;
    Ok(())
}

fn read_exact(r: &mut impl Read, buf: &mut [u8], path: &Path) -> std::result::Result<(), CacheError> {
    r.read_exact(buf).map_err(|e| {
        if e.kind() == io::ErrorKind::UnexpectedEof {
            CacheError::Corrupt { path: path.to_path_buf(), reason: "file is truncated".into() }
        } else {
            CacheError::Io { path: path.to_path_buf(), source: e }
        }
    })
}

/// Reads and validates a basis file.
pub fn load_basis(path: &Path) -> Result<BasisMatrix> {
    Ok(load_inner(path)?)
}

fn load_inner(path: &Path) -> std::result::Result<BasisMatrix, CacheError> {
    let file = File::open(path).map_err(|e| {
        if e.kind() == io::ErrorKind::NotFound {
            CacheError::Missing(path.to_path_buf())
        } else {
            CacheError::Io { path: path.to_path_buf(), source: e }
        }
    })?;
    let file_len = file.metadata().map_err(io_err(path))?.len();
    let mut r = BufReader::new(file);
    let corrupt = |reason: String| CacheError::Corrupt { path: path.to_path_buf(), reason };

    let mut header = [0u8; 28];
    read_exact(&mut r, &mut header[..4], path)?;
    if &header[..4] != MAGIC {
        return Err(CacheError::BadMagic { path: path.to_path_buf() });
    }
    read_exact(&mut r, &mut header[4..], path)?;
    let u32_at = |i: usize| u32::from_le_bytes(header[i..i + 4].try_into().expect("4 bytes"));
    let u64_at = |i: usize| u64::from_le_bytes(header[i..i + 8].try_into().expect("8 bytes"));
    let version = u32_at(4);
    if version != FORMAT_VERSION {
        return Err(CacheError::Version { path: path.to_path_buf(), found: version, expected: FORMAT_VERSION });
    }
    let n = u32_at(8) as usize;
    let cols = u64_at(12);
    let nnz = u64_at(20);
    if !(1..=MAX_DENSE_QUBITS).contains(&n) {
        return Err(corrupt(format!("qubit count {n} out of range")));
    }
    if cols != stabilizer_state_count(n) || nnz != cols << n {
        return Err(corrupt(format!("{cols} columns and {nnz} nonzeros do not match n = {n}")));
    }
    let width = if n <= DEFAULT_MAX_QUBITS { 2 } else { 4 };
    let expected_len = 28 + nnz * width + nnz.div_ceil(8) + 8;
    if file_len != expected_len {
        return Err(corrupt(format!("length {file_len} bytes, expected {expected_len}")));
    }
    let nnz = nnz as usize;
    let m = 1usize << (2 * n);

    let mut digest = CRC64.digest();
    let mut rows = Vec::with_capacity(nnz);
    let mut buf = vec![0u8; CHUNK * width as usize];
    let mut remaining = nnz;
    while remaining > 0 {
        let take = remaining.min(CHUNK);
        let bytes = &mut buf[..take * width as usize];
        read_exact(&mut r, bytes, path)?;
        digest.update(bytes);
        for c in bytes.chunks_exact(width as usize) {
            let v = if width == 2 {
                u16::from_le_bytes([c[0], c[1]]) as usize
            } else {
                u32::from_le_bytes([c[0], c[1], c[2], c[3]]) as usize
            };
            if v >= m {
                return Err(corrupt(format!("row index {v} out of range")));
            }
            rows.push(v as u16);
        }
        remaining -= take;
    }
    let sign_bytes = nnz.div_ceil(8);
    let mut negative = vec![0u64; nnz.div_ceil(64)];
    let mut signs = vec![0u8; sign_bytes];
    read_exact(&mut r, &mut signs, path)?;
    digest.update(&signs);
    for (i, chunk) in signs.chunks(8).enumerate() {
        let mut word = [0u8; 8];
        word[..chunk.len()].copy_from_slice(chunk);
        negative[i] = u64::from_le_bytes(word);
    }
    drop(signs);
    let mut trailer = [0u8; 8];
    read_exact(&mut r, &mut trailer, path)?;
    let stored = u64::from_le_bytes(trailer);
    let computed = digest.finalize();
    if stored != computed {
        return Err(CacheError::Checksum { path: path.to_path_buf(), stored, computed });
    }
    BasisMatrix::from_raw(n, cols as usize, rows, negative).map_err(|e| corrupt(e.to_string()))
}

/// File name used for the `n`-qubit basis inside a cache directory.
pub fn basis_file_name(n: usize) -> String {
    format!("stabilizer_basis_n{n}.romb")
}

/// Default cache directory: `$ROM_CACHE_DIR`, else `$HOME/.cache/magic-rom`.
pub fn default_cache_dir() -> Option<PathBuf> {
    if let Some(dir) = std::env::var_os(CACHE_DIR_ENV) {
        return Some(PathBuf::from(dir));
    }
    std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("magic-rom"))
}

/// Shares assembled bases across computations, backed by an optional cache
/// directory. Five-qubit bases require [`allow_heavy`](Self::allow_heavy).
#[derive(Debug)]
pub struct BasisStore {
    dir: Option<PathBuf>,
    allow_heavy: bool,
    budget_bytes: u64,
    loaded: Mutex<HashMap<usize, Arc<BasisMatrix>>>,
}

impl Default for BasisStore {
    fn default() -> Self {
        Self::in_memory()
    }
}

impl BasisStore {
    /// No disk cache.
    pub fn in_memory() -> Self {
        BasisStore { dir: None, allow_heavy: false, budget_bytes: u64::MAX, loaded: Mutex::new(HashMap::new()) }
    }

    pub fn with_dir(dir: impl Into<PathBuf>) -> Self {
        BasisStore { dir: Some(dir.into()), ..Self::in_memory() }
    }

    /// Uses [`default_cache_dir`].
    pub fn from_env() -> Self {
        BasisStore { dir: default_cache_dir(), ..Self::in_memory() }
    }

    pub fn allow_heavy(mut self, allow: bool) -> Self {
        self.allow_heavy = allow;
        self
    }

    pub fn memory_budget(mut self, bytes: u64) -> Self {
        self.budget_bytes = bytes;
        self
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn path_for(&self, n: usize) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(basis_file_name(n)))
    }

    /// Returns the `n`-qubit basis from memory, disk or fresh assembly, in
    /// that order. Fresh assemblies are written back to the cache directory
    /// when one is configured.
    pub fn get(&self, n: usize) -> Result<Arc<BasisMatrix>> {
        if let Some(b) = self.loaded.lock().expect("basis store lock").get(&n) {
            return Ok(b.clone());
        }
        if n > DEFAULT_MAX_QUBITS && n <= MAX_DENSE_QUBITS && !self.allow_heavy {
            return Err(Error::BasisTooLarge {
                n,
                bytes: basis_memory_estimate(n),
                reason: "enable heavy runs to assemble it".into(),
            });
        }
        let basis = match self.path_for(n) {
            Some(path) if path.exists() => load_basis(&path)?,
            path => {
                let b = BasisMatrix::assemble_heavy(n, self.budget_bytes)?;
                if let Some(path) = path {
                    if std::fs::create_dir_all(path.parent().expect("file inside a directory")).is_ok() {
                        // Best effort: an unwritable cache must not fail the computation.
                        let tmp = path.with_extension("romb.tmp");
                        if save_basis(&b, &tmp).is_ok() {
                            let _ = std::fs::rename(&tmp, &path);
                        }
                    }
                }
                b
            }
        };
        let basis = Arc::new(basis);
        self.loaded.lock().expect("basis store lock").insert(n, basis.clone());
        Ok(basis)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_n2() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b.romb");
        let b = BasisMatrix::assemble(2).unwrap();
        save_basis(&b, &path).unwrap();
        assert_eq!(load_basis(&path).unwrap(), b);
    }

    #[test]
    fn distinct_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b.romb");
        assert!(matches!(load_basis(&path), Err(Error::Cache(CacheError::Missing(_)))));

        let b = BasisMatrix::assemble(1).unwrap();
        save_basis(&b, &path).unwrap();
        let good = std::fs::read(&path).unwrap();

        let mut bytes = good.clone();
        bytes[30] ^= 0x01;
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(load_basis(&path), Err(Error::Cache(CacheError::Checksum { .. }))));

        let mut bytes = good.clone();
        bytes[4] = 9;
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(load_basis(&path), Err(Error::Cache(CacheError::Version { found: 9, .. }))));

        let mut bytes = good.clone();
        bytes[0] = b'X';
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(load_basis(&path), Err(Error::Cache(CacheError::BadMagic { .. }))));

        std::fs::write(&path, &good[..good.len() - 3]).unwrap();
        assert!(matches!(load_basis(&path), Err(Error::Cache(CacheError::Corrupt { .. }))));
    }

    #[test]
    fn store_writes_through() {
        let dir = tempfile::tempdir().unwrap();
        let store = BasisStore::with_dir(dir.path());
        let b = store.get(2).unwrap();
        assert!(dir.path().join(basis_file_name(2)).exists());
        let again = BasisStore::with_dir(dir.path()).get(2).unwrap();
        assert_eq!(*b, *again);
        assert!(matches!(store.get(5), Err(Error::BasisTooLarge { n: 5, .. })));
    }
}
