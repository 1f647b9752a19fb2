//! On-disk coefficient cache.
//!
//! Format: a header line `SCSLAB-COEFFS v1 weight=<k> N=<N>` followed by
//! lines `<n> <a(n)>` for n = 1..=N in decimal.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_traits::Zero;
use sha2::{Digest, Sha256};

use super::eigenform::{build_eigenform, check_weight, Eigenform};
use crate::error::{Error, Result};
use crate::num::Real;

/// Environment variable overriding the cache directory.
pub const CACHE_DIR_ENV: &str = "SCSLAB_CACHE_DIR";
const MAGIC: &str = "SCSLAB-COEFFS v1";

pub fn default_cache_dir() -> PathBuf {
    std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(".scslab-cache"))
}

pub fn cache_file_name(weight: u32, n: usize) -> String {
    format!("coeffs-k{weight}-N{n}.txt")
}

pub fn write_coefficients<W: Write>(out: W, weight: u32, coeffs: &[BigInt]) -> Result<()> {
    let mut w = BufWriter::new(out);
    let n = coeffs.len().saturating_sub(1);
    writeln!(w, "{MAGIC} weight={weight} N={n}")?;
    for (i, a) in coeffs.iter().enumerate().skip(1) {
        writeln!(w, "{i} {a}")?;
    }
    w.flush()?;
    Ok(())
}

/// Parses a cache stream; returns (weight, coefficients indexed from 0).
pub fn read_coefficients<R: BufRead>(input: R, origin: &Path) -> Result<(u32, Vec<BigInt>)> {
    let corrupt = |reason: String| Error::Cache { path: origin.to_path_buf(), reason };
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| corrupt("empty file".into()))??;
    let rest = header
        .strip_prefix(MAGIC)
        .ok_or_else(|| corrupt(format!("bad header {header:?}")))?;
    let mut weight = None;
    let mut n = None;
    for field in rest.split_whitespace() {
        if let Some(v) = field.strip_prefix("weight=") {
            weight = v.parse::<u32>().ok();
        } else if let Some(v) = field.strip_prefix("N=") {
            n = v.parse::<usize>().ok();
        }
    }
    let (weight, n) = match (weight, n) {
        (Some(w), Some(n)) => (w, n),
        _ => return Err(corrupt(format!("bad header {header:?}"))),
    };
    let mut coeffs = Vec::with_capacity(n + 1);
    coeffs.push(BigInt::zero());
    for (expected, line) in (1..).zip(lines) {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let (idx, val) = line.split_once(' ').ok_or_else(|| corrupt(format!("malformed line {expected}")))?;
        if idx.parse::<usize>().ok() != Some(expected) {
            return Err(corrupt(format!("expected index {expected}, found {idx:?}")));
        }
        let a = val
            .parse::<BigInt>()
            .map_err(|_| corrupt(format!("bad coefficient at n = {expected}")))?;
        coeffs.push(a);
    }
    if coeffs.len() != n + 1 {
        return Err(corrupt(format!("header declares N = {n} but {} coefficients present", coeffs.len() - 1)));
    }
    Ok((weight, coeffs))
}

/// Cache keyed by (weight, N) in a directory.
#[derive(Clone, Debug)]
pub struct CoefficientCache {
    dir: PathBuf,
}

impl CoefficientCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn from_env() -> Self {
        Self::new(default_cache_dir())
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, weight: u32, n: usize) -> PathBuf {
        self.dir.join(cache_file_name(weight, n))
    }

    pub fn store(&self, f_weight: u32, coeffs: &[BigInt]) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let n = coeffs.len() - 1;
        let path = self.path(f_weight, n);
        let tmp = path.with_extension("tmp");
        write_coefficients(fs::File::create(&tmp)?, f_weight, coeffs)?;
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    /// Loads (weight, N) if present. A present-but-inconsistent file is an
    /// error, never silently truncated or rebuilt.
    pub fn load<T: Real>(&self, weight: u32, n: usize) -> Result<Option<Eigenform<T>>> {
        check_weight(weight)?;
        let path = self.path(weight, n);
        if !path.exists() {
            return Ok(None);
        }
        let (w, coeffs) = read_coefficients(BufReader::new(fs::File::open(&path)?), &path)?;
        if w != weight || coeffs.len() != n + 1 {
            return Err(Error::Cache {
                path,
                reason: format!("contents are weight={w} N={} but file is keyed weight={weight} N={n}", coeffs.len() - 1),
            });
        }
        Ok(Some(Eigenform::from_coefficients(weight, coeffs)?))
    }

    pub fn load_or_build<T: Real>(&self, weight: u32, n: usize) -> Result<Eigenform<T>> {
        if let Some(f) = self.load(weight, n)? {
            return Ok(f);
        }
        let f = build_eigenform::<T>(weight, n)?;
        self.store(weight, f.coefficients())?;
        Ok(f)
    }

    /// Loads the smallest cached table for `weight` holding at least `n`
    /// coefficients, truncated to exactly `n`.
    pub fn load_at_least<T: Real>(&self, weight: u32, n: usize) -> Result<Option<Eigenform<T>>> {
        check_weight(weight)?;
        let prefix = format!("coeffs-k{weight}-N");
        let best = match fs::read_dir(&self.dir) {
            Ok(entries) => entries
                .flatten()
                .filter_map(|e| {
                    let name = e.file_name().into_string().ok()?;
                    name.strip_prefix(&prefix)?.strip_suffix(".txt")?.parse::<usize>().ok()
                })
                .filter(|&m| m >= n)
                .min(),
            Err(_) => None,
        };
        let Some(m) = best else { return Ok(None) };
        let Some(f) = self.load::<T>(weight, m)? else { return Ok(None) };
        if m == n {
            return Ok(Some(f));
        }
        Ok(Some(Eigenform::from_coefficients(weight, f.coefficients()[..=n].to_vec())?))
    }

    /// Cached table of at least `n` coefficients if present, else a fresh
    /// build that is stored.
    pub fn acquire<T: Real>(&self, weight: u32, n: usize) -> Result<Eigenform<T>> {
        if let Some(f) = self.load_at_least(weight, n)? {
            return Ok(f);
        }
        let f = build_eigenform::<T>(weight, n)?;
        self.store(weight, f.coefficients())?;
        Ok(f)
    }

    /// Builds and overwrites unconditionally.
    pub fn rebuild<T: Real>(&self, weight: u32, n: usize) -> Result<Eigenform<T>> {
        let f = build_eigenform::<T>(weight, n)?;
        self.store(weight, f.coefficients())?;
        Ok(f)
    }
}

struct HashWriter(Sha256);

impl Write for HashWriter {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        self.0.update(buf);
        Ok(buf.len())
    }

    fn flush(&mut self) -> std::io::Result<()> {
        Ok(())
    }
}

/// `k<weight>-N<N>-<hash>` where the hash is a SHA-256 prefix of the
/// serialized coefficient table, so equal tables give equal ids however
/// they were obtained.
pub fn coefficient_id<T: Real>(f: &Eigenform<T>) -> Result<String> {
    let mut h = HashWriter(Sha256::new());
    write_coefficients(&mut h, f.weight(), f.coefficients())?;
    let digest = h.0.finalize();
    let hex: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
    Ok(format!("k{}-N{}-{hex}", f.weight(), f.len()))
}
