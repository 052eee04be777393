//! In-memory store of tables and windows, keyed by their parameters, with
//! optional disk caching behind it. Shared freely across threads; entries
//! are immutable once built.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use anyhow::Result;
use pgl_core::arith::ArithTable;
use pgl_core::divisor::LambdaRWindow;

use crate::cache;
use crate::parallel;

pub struct Store {
    pub cache_dir: Option<PathBuf>,
    pub budget: u64,
    pub threads: usize,
    tables: Mutex<HashMap<(u64, u64), Arc<ArithTable>>>,
    windows: Mutex<HashMap<(u64, u64, u64), Arc<LambdaRWindow>>>,
}

impl Store {
    pub fn new(cache_dir: Option<PathBuf>, budget: u64, threads: usize) -> Self {
        Store {
            cache_dir,
            budget,
            threads,
            tables: Mutex::new(HashMap::new()),
            windows: Mutex::new(HashMap::new()),
        }
    }

    pub fn table(&self, start: u64, len: u64) -> Result<Arc<ArithTable>> {
        if let Some(t) = self.tables.lock().unwrap().get(&(start, len)) {
            return Ok(Arc::clone(t));
        }
        let table = if self.cache_dir.is_some() {
            cache::load_or_build_table(self.cache_dir.as_deref(), start, len, self.budget)?
        } else {
            parallel::build_table_parallel(start, len, self.threads, self.budget)?
        };
        let arc = Arc::new(table);
        self.tables
            .lock()
            .unwrap()
            .insert((start, len), Arc::clone(&arc));
        Ok(arc)
    }

    pub fn window(&self, start: u64, len: u64, big_r: f64) -> Result<Arc<LambdaRWindow>> {
        let key = (start, len, big_r.to_bits());
        if let Some(w) = self.windows.lock().unwrap().get(&key) {
            return Ok(Arc::clone(w));
        }
        let window = if self.cache_dir.is_some() {
            cache::load_or_build_window(self.cache_dir.as_deref(), start, len, big_r, self.budget)?
        } else {
            parallel::build_window_parallel(start, len, big_r, self.threads, self.budget)?
        };
        let arc = Arc::new(window);
        self.windows.lock().unwrap().insert(key, Arc::clone(&arc));
        Ok(arc)
    }

    /// Drop everything cached in memory (the disk cache stays).
    pub fn clear_memory(&self) {
        self.tables.lock().unwrap().clear();
        self.windows.lock().unwrap().clear();
    }
}
