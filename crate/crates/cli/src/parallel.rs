//! Range partitioning across threads. Partial results are merged in chunk
//! order, so a given thread count always reproduces the same value.

use anyhow::Result;
use pgl_core::arith::ArithTable;
use pgl_core::divisor::LambdaRWindow;

/// Split the inclusive range `[lo, hi]` into at most `parts` contiguous
/// chunks.
pub fn chunk_ranges(lo: u64, hi: u64, parts: usize) -> Vec<(u64, u64)> {
    if hi < lo {
        return Vec::new();
    }
    let total = hi - lo + 1;
    let parts = (parts.max(1) as u64).min(total);
    let base = total / parts;
    let extra = total % parts;
    let mut out = Vec::with_capacity(parts as usize);
    let mut cur = lo;
    for i in 0..parts {
        let size = base + if i < extra { 1 } else { 0 };
        out.push((cur, cur + size - 1));
        cur += size;
    }
    out
}

/// Evaluate `f` on each chunk of `[lo, hi]` (in parallel when
/// `threads > 1`) and sum the partials in chunk order.
pub fn sum_chunked<F>(lo: u64, hi: u64, threads: usize, f: F) -> Result<f64>
where
    F: Fn(u64, u64) -> Result<f64> + Sync,
{
    let chunks = chunk_ranges(lo, hi, threads);
    if chunks.len() <= 1 {
        return match chunks.first() {
            Some(&(a, b)) => f(a, b),
            None => Ok(0.0),
        };
    }
    let mut partials: Vec<Result<f64>> = Vec::new();
    std::thread::scope(|scope| {
        let mut handles = Vec::with_capacity(chunks.len());
        for &(a, b) in &chunks {
            let f = &f;
            handles.push(scope.spawn(move || f(a, b)));
        }
        for h in handles {
            partials.push(h.join().expect("worker thread panicked"));
        }
    });
    let mut total = 0.0;
    for p in partials {
        total += p?;
    }
    Ok(total)
}

/// Sieve a table for `[start, start + len)` across threads, one contiguous
/// sub-window per thread, joined afterwards.
pub fn build_table_parallel(start: u64, len: u64, threads: usize, budget: u64) -> Result<ArithTable> {
    let chunks = chunk_ranges(start, start + len - 1, threads);
    if chunks.len() <= 1 {
        return Ok(pgl_core::arith::build_tables_capped(start, len, budget)?);
    }
    let mut parts: Vec<ArithTable> = Vec::new();
    std::thread::scope(|scope| -> Result<()> {
        let mut handles = Vec::new();
        for &(a, b) in &chunks {
            handles.push(
                scope.spawn(move || pgl_core::arith::build_tables_capped(a, b - a + 1, budget)),
            );
        }
        for h in handles {
            parts.push(h.join().expect("sieve thread panicked")?);
        }
        Ok(())
    })?;
    Ok(ArithTable::concat(parts)?)
}

/// Same partitioning for divisor-sum windows.
pub fn build_window_parallel(
    start: u64,
    len: u64,
    big_r: f64,
    threads: usize,
    budget: u64,
) -> Result<LambdaRWindow> {
    let chunks = chunk_ranges(start, start + len - 1, threads);
    if chunks.len() <= 1 {
        return Ok(pgl_core::divisor::build_lambda_r_window_capped(
            start, len, big_r, budget,
        )?);
    }
    let mut parts: Vec<LambdaRWindow> = Vec::new();
    std::thread::scope(|scope| -> Result<()> {
        let mut handles = Vec::new();
        for &(a, b) in &chunks {
            handles.push(scope.spawn(move || {
                pgl_core::divisor::build_lambda_r_window_capped(a, b - a + 1, big_r, budget)
            }));
        }
        for h in handles {
            parts.push(h.join().expect("window thread panicked")?);
        }
        Ok(())
    })?;
    Ok(LambdaRWindow::concat(parts)?)
}
