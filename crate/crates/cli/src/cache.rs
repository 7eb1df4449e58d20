//! On-disk cache of approximations, keyed by presentation and word.
//!
//! Layout: `<dir>/<sha256 of presentation and word>/<rounds>.json`. A
//! lookup returns the entry with the largest budget not above the request;
//! the caller refines it the rest of the way.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use invmon::igraph::{export_json, import_json};
use invmon::stephen::{approximate_with, refine_with, Approximation, ExpansionLimits};
use invmon::{Presentation, Word};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

const FORMAT: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Entry {
    format: u32,
    presentation: String,
    word: String,
    rounds: usize,
    graph: String,
}

/// How a request was served.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lookup {
    Miss,
    Hit,
    /// Refined from a stored entry with this smaller budget.
    Partial(usize),
}

#[derive(Debug, Clone)]
pub struct ApproxCache {
    dir: PathBuf,
}

impl ApproxCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ApproxCache { dir: dir.into() }
    }

    pub fn key(p: &Presentation, w: &Word) -> String {
        let mut h = Sha256::new();
        h.update(p.to_string().as_bytes());
        h.update(b"\n");
        h.update(w.to_string().as_bytes());
        hex::encode(h.finalize())
    }

    fn bucket(&self, p: &Presentation, w: &Word) -> PathBuf {
        self.dir.join(Self::key(p, w))
    }

    /// The stored approximation with the largest budget at most `rounds`.
    /// Unreadable or mismatched entries are deleted with a warning.
    pub fn get(&self, p: &Presentation, w: &Word, rounds: usize) -> Option<Approximation> {
        let bucket = self.bucket(p, w);
        let mut budgets: Vec<usize> = fs::read_dir(&bucket)
            .ok()?
            .filter_map(|e| e.ok())
            .filter_map(|e| {
                let name = e.file_name().into_string().ok()?;
                name.strip_suffix(".json")?.parse().ok()
            })
            .filter(|&r| r <= rounds)
            .collect();
        budgets.sort_unstable();
        while let Some(r) = budgets.pop() {
            let path = bucket.join(format!("{r}.json"));
            match load(&path, p, w, r) {
                Ok(a) => return Some(a),
                Err(e) => {
                    eprintln!(
                        "warning: evicting corrupt cache entry {}: {e:#}",
                        path.display()
                    );
                    let _ = fs::remove_file(&path);
                }
            }
        }
        None
    }

    /// Stores atomically; concurrent writers of the same key race benignly.
    pub fn put(&self, a: &Approximation) -> Result<()> {
        let bucket = self.bucket(&a.presentation, &a.word);
        fs::create_dir_all(&bucket).with_context(|| format!("creating {}", bucket.display()))?;
        let entry = Entry {
            format: FORMAT,
            presentation: a.presentation.to_string(),
            word: a.word.to_string(),
            rounds: a.rounds,
            graph: export_json(&a.graph),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(&bucket)?;
        tmp.write_all(serde_json::to_string(&entry)?.as_bytes())?;
        tmp.persist(bucket.join(format!("{}.json", a.rounds)))?;
        Ok(())
    }
}

fn load(path: &Path, p: &Presentation, w: &Word, rounds: usize) -> Result<Approximation> {
    let entry: Entry = serde_json::from_str(&fs::read_to_string(path)?)?;
    anyhow::ensure!(entry.format == FORMAT, "format {}", entry.format);
    anyhow::ensure!(entry.presentation == p.to_string(), "presentation mismatch");
    anyhow::ensure!(entry.word == w.to_string(), "word mismatch");
    anyhow::ensure!(entry.rounds == rounds, "budget mismatch");
    let graph = import_json(&entry.graph)?;
    Ok(Approximation {
        presentation: p.clone(),
        word: w.clone(),
        graph,
        rounds,
    })
}

/// Approximates through the cache when one is given.
pub fn approximate_cached(
    cache: Option<&ApproxCache>,
    p: &Presentation,
    w: &Word,
    rounds: usize,
    limits: ExpansionLimits,
) -> Result<(Approximation, Lookup)> {
    let Some(cache) = cache else {
        return Ok((approximate_with(p, w, rounds, limits)?, Lookup::Miss));
    };
    let (a, lookup) = match cache.get(p, w, rounds) {
        Some(a) if a.rounds == rounds => return Ok((a, Lookup::Hit)),
        Some(a) => {
            let from = a.rounds;
            (
                refine_with(a, rounds - from, limits)?,
                Lookup::Partial(from),
            )
        }
        None => (approximate_with(p, w, rounds, limits)?, Lookup::Miss),
    };
    if let Err(e) = cache.put(&a) {
        eprintln!("warning: could not write cache entry: {e:#}");
    }
    Ok((a, lookup))
}
