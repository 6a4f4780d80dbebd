//! On-disk cache of plus-construction results, keyed by specification digest.

use std::fs;
use std::path::PathBuf;

use ruleform::transform::{digest, plus_pipeline, PipelineOptions};
use ruleform::{parse_tss, print_tss, Tss};

use crate::commands::CliError;

/// Directory for cached results; unset disables the cache.
pub const CACHE_ENV: &str = "RULEFORM_CACHE_DIR";

fn entry(tss: &Tss) -> Option<PathBuf> {
    let dir = std::env::var_os(CACHE_ENV)?;
    Some(PathBuf::from(dir).join(format!("{}.plus.tss", digest(tss))))
}

/// The plus construction of `tss`, read from the cache when present.
pub fn plus(tss: &Tss) -> Result<Tss, CliError> {
    let path = entry(tss);
    if let Some(p) = &path {
        if let Ok(src) = fs::read_to_string(p) {
            if let Ok(cached) = parse_tss(&src) {
                return Ok(cached);
            }
        }
    }
    let (out, _) = plus_pipeline(tss, &PipelineOptions::default()).map_err(|e| CliError::Failed(e.to_string()))?;
    if let Some(p) = path {
        let written = p.parent().map_or(Ok(()), fs::create_dir_all).and_then(|_| fs::write(&p, print_tss(&out)));
        if let Err(e) = written {
            eprintln!("warning: cannot write cache entry {}: {e}", p.display());
        }
    }
    Ok(out)
}
