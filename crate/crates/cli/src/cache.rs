//! Binary window caches.
//!
//! Table files ("PGL1"): magic, window_start and window_len as 8-byte
//! little-endian unsigned integers, then the smallest-prime-factor array as
//! 8-byte little-endian entries. The Möbius and von Mangoldt columns are
//! recomputed on load, and the recomputed spf array is compared against the
//! file; any mismatch is treated as corruption and triggers a rebuild.
//!
//! Divisor-sum windows ("PGLR") use the same header followed by the
//! truncation level as an 8-byte IEEE double and the values as 8-byte
//! doubles. Sixteen sample entries are re-derived by direct divisor
//! enumeration before the file is trusted.

use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use pgl_core::arith::ArithTable;
use pgl_core::divisor::{lambda_r, LambdaRWindow};

pub const TABLE_MAGIC: &[u8; 4] = b"PGL1";
pub const WINDOW_MAGIC: &[u8; 4] = b"PGLR";

pub fn table_cache_path(dir: &Path, start: u64, len: u64) -> PathBuf {
    dir.join(format!("table-{start}-{len}.pgl1"))
}

pub fn window_cache_path(dir: &Path, start: u64, len: u64, big_r: f64) -> PathBuf {
    dir.join(format!("window-{start}-{len}-r{:016x}.pglr", big_r.to_bits()))
}

pub fn write_table(path: &Path, table: &ArithTable) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut w = BufWriter::new(fs::File::create(path)?);
    w.write_all(TABLE_MAGIC)?;
    w.write_all(&table.window_start().to_le_bytes())?;
    w.write_all(&table.window_len().to_le_bytes())?;
    for &v in table.spf_values() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

/// Read the raw header and spf payload of a table file.
pub fn read_table_file(path: &Path) -> Result<(u64, u64, Vec<u64>)> {
    let mut r = BufReader::new(fs::File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != TABLE_MAGIC {
        bail!("bad magic in {}", path.display());
    }
    let start = read_u64(&mut r)?;
    let len = read_u64(&mut r)?;
    let mut spf = Vec::with_capacity(len as usize);
    let mut buf = vec![0u8; 8 * 8192];
    let mut remaining = len as usize;
    while remaining > 0 {
        let take = remaining.min(8192);
        let bytes = &mut buf[..8 * take];
        r.read_exact(bytes)?;
        for c in bytes.chunks_exact(8) {
            spf.push(u64::from_le_bytes(c.try_into().unwrap()));
        }
        remaining -= take;
    }
    Ok((start, len, spf))
}

/// Load a cached table, recomputing mu/lambda and validating the stored spf
/// column; on any inconsistency the table is rebuilt and the cache
/// rewritten.
pub fn load_or_build_table(
    dir: Option<&Path>,
    start: u64,
    len: u64,
    budget: u64,
) -> Result<ArithTable> {
    let built = || -> Result<ArithTable> {
        pgl_core::arith::build_tables_capped(start, len, budget)
            .context("building arithmetic table")
    };
    let Some(dir) = dir else {
        return built();
    };
    let path = table_cache_path(dir, start, len);
    if path.exists() {
        match read_table_file(&path) {
            Ok((fstart, flen, spf)) if fstart == start && flen == len => {
                // mu and lambda always come from a fresh derivation; the
                // derived spf column doubles as an integrity check
                let table = built()?;
                if table.spf_values() == &spf[..] {
                    return Ok(table);
                }
                eprintln!(
                    "warning: cache {} is corrupted (spf mismatch); rebuilding",
                    path.display()
                );
            }
            Ok(_) => {
                eprintln!(
                    "warning: cache {} header disagrees with request; rebuilding",
                    path.display()
                );
            }
            Err(e) => {
                eprintln!("warning: cache {} unreadable ({e}); rebuilding", path.display());
            }
        }
    }
    let table = built()?;
    if let Err(e) = write_table(&path, &table) {
        eprintln!("warning: could not write cache {}: {e}", path.display());
    }
    Ok(table)
}

pub fn write_window(path: &Path, window: &LambdaRWindow) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut w = BufWriter::new(fs::File::create(path)?);
    w.write_all(WINDOW_MAGIC)?;
    w.write_all(&window.window_start().to_le_bytes())?;
    w.write_all(&window.window_len().to_le_bytes())?;
    w.write_all(&window.big_r().to_bits().to_le_bytes())?;
    for &v in window.values() {
        w.write_all(&v.to_bits().to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_window_file(path: &Path) -> Result<LambdaRWindow> {
    let mut r = BufReader::new(fs::File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != WINDOW_MAGIC {
        bail!("bad magic in {}", path.display());
    }
    let start = read_u64(&mut r)?;
    let len = read_u64(&mut r)?;
    let big_r = f64::from_bits(read_u64(&mut r)?);
    let mut values = Vec::with_capacity(len as usize);
    let mut buf = vec![0u8; 8 * 8192];
    let mut remaining = len as usize;
    while remaining > 0 {
        let take = remaining.min(8192);
        let bytes = &mut buf[..8 * take];
        r.read_exact(bytes)?;
        for c in bytes.chunks_exact(8) {
            values.push(f64::from_bits(u64::from_le_bytes(c.try_into().unwrap())));
        }
        remaining -= take;
    }
    LambdaRWindow::from_parts(start, big_r, values).map_err(|e| anyhow::anyhow!("{e}"))
}

/// Spot-check a loaded window at 16 sample points against direct divisor
/// enumeration.
fn window_spot_check(window: &LambdaRWindow) -> bool {
    let start = window.window_start();
    let len = window.window_len();
    let samples = 16u64;
    for s in 0..=samples {
        let n = start + (len - 1) * s / samples;
        let direct = lambda_r(n, window.big_r());
        match window.value(n) {
            Ok(v) if (v - direct).abs() <= 1e-9 * direct.abs().max(1.0) => {}
            _ => return false,
        }
    }
    true
}

pub fn load_or_build_window(
    dir: Option<&Path>,
    start: u64,
    len: u64,
    big_r: f64,
    budget: u64,
) -> Result<LambdaRWindow> {
    let built = || -> Result<LambdaRWindow> {
        pgl_core::divisor::build_lambda_r_window_capped(start, len, big_r, budget)
            .context("building divisor-sum window")
    };
    let Some(dir) = dir else {
        return built();
    };
    let path = window_cache_path(dir, start, len, big_r);
    if path.exists() {
        match read_window_file(&path) {
            Ok(w)
                if w.window_start() == start
                    && w.window_len() == len
                    && w.big_r() == big_r
                    && window_spot_check(&w) =>
            {
                return Ok(w);
            }
            Ok(_) => eprintln!(
                "warning: cache {} failed validation; rebuilding",
                path.display()
            ),
            Err(e) => eprintln!("warning: cache {} unreadable ({e}); rebuilding", path.display()),
        }
    }
    let window = built()?;
    if let Err(e) = write_window(&path, &window) {
        eprintln!("warning: could not write cache {}: {e}", path.display());
    }
    Ok(window)
}
