//! Builtin model names and the on-demand Bryant cache.
//!
//! Builtins: cigar, euclidean2, euclidean3, sphere-warp, bryant3..bryant6.
//! Bryant models integrate on first use and cache to `<dir>/bryantN.json`
//! in the interchange schema; a cache hit reproduces the freshly built
//! table bit for bit (shortest-roundtrip float serialization).

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use isolab_core::bryant::{integrate_unstable, reconstruct_metric, BryantParams};
use isolab_core::WarpModel;

use crate::artifacts::write_atomic;

pub const BUILTIN_NAMES: &[&str] = &[
    "cigar",
    "euclidean2",
    "euclidean3",
    "sphere-warp",
    "bryant3",
    "bryant4",
    "bryant5",
    "bryant6",
];

pub fn resolve_model(name: &str, cache_dir: &Path) -> Result<WarpModel> {
    match name {
        "cigar" => Ok(WarpModel::cigar()),
        "euclidean2" => Ok(WarpModel::euclidean(2)?),
        "euclidean3" => Ok(WarpModel::euclidean(3)?),
        "sphere-warp" => Ok(WarpModel::sphere_warp(3)?),
        "bryant3" => bryant_cached(3, cache_dir),
        "bryant4" => bryant_cached(4, cache_dir),
        "bryant5" => bryant_cached(5, cache_dir),
        "bryant6" => bryant_cached(6, cache_dir),
        path if Path::new(path).extension().is_some_and(|e| e == "json") => {
            let text =
                std::fs::read_to_string(path).with_context(|| format!("reading model {path}"))?;
            Ok(WarpModel::from_json(&text)?)
        }
        other => bail!(
            "unknown model {other:?}; builtins: {}",
            BUILTIN_NAMES.join(", ")
        ),
    }
}

pub fn bryant_cache_path(n: usize, cache_dir: &Path) -> PathBuf {
    cache_dir.join(format!("bryant{n}.json"))
}

pub fn bryant_cached(n: usize, cache_dir: &Path) -> Result<WarpModel> {
    let path = bryant_cache_path(n, cache_dir);
    if path.exists() {
        let text = std::fs::read_to_string(&path)
            .with_context(|| format!("reading cached model {}", path.display()))?;
        let model = WarpModel::from_json(&text)?;
        if model.n() != n {
            bail!(
                "cache {} holds dimension {}, expected {n}",
                path.display(),
                model.n()
            );
        }
        return Ok(model);
    }
    let traj = integrate_unstable(n, &BryantParams::default())?;
    let model = reconstruct_metric(&traj, BryantParams::default().phi0)?;
    write_atomic(&path, &model.to_json(0)?)?;
    Ok(model)
}
