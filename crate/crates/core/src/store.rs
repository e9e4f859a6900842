//! Catalog snapshot files.
//!
//! A snapshot is a JSON document holding the resource records together with
//! the canonical form and opaque id derived for each. The derived columns are
//! a cache: loading rebuilds every index from the records and refuses a file
//! whose cached identifiers disagree with the rebuilt ones.

use std::fs;
use std::io::{BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{Catalog, CatalogError, LearningResource, ResourceRecord};

pub const FORMAT: &str = "muir-catalog";
pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed snapshot: {0}")]
    Malformed(String),
    #[error("snapshot entry {index} is stale: cached {field} `{cached}` but records give `{rebuilt}`")]
    Stale {
        index: usize,
        field: &'static str,
        cached: String,
        rebuilt: String,
    },
}

#[derive(Debug, Serialize, Deserialize)]
struct Snapshot {
    format: String,
    version: u32,
    host: String,
    resources: Vec<SnapshotEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SnapshotEntry {
    #[serde(flatten)]
    record: ResourceRecord,
    canonical: String,
    opaque: String,
}

/// Serializes the catalog as a snapshot document.
pub fn to_snapshot_json(catalog: &Catalog) -> String {
    let snapshot = Snapshot {
        format: FORMAT.to_string(),
        version: VERSION,
        host: catalog.host().to_string(),
        resources: catalog
            .entries()
            .iter()
            .map(|e| SnapshotEntry {
                record: e.resource.to_record(),
                canonical: e.canonical.to_string(),
                opaque: e.opaque.to_string(),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&snapshot).expect("snapshot serializes");
    out.push('\n');
    out
}

pub fn save(catalog: &Catalog, path: &Path) -> Result<(), StoreError> {
    fs::write(path, to_snapshot_json(catalog)).map_err(|source| StoreError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Reads a snapshot, rebuilding the catalog under `host` when given and under
/// the snapshot's own host otherwise. Cached identifiers are checked only
/// when the hosts agree.
pub fn from_snapshot_json(text: &str, host: Option<&str>) -> Result<Catalog, StoreError> {
    let snapshot: Snapshot = serde_json::from_str(text).map_err(|e| StoreError::Malformed(e.to_string()))?;
    if snapshot.format != FORMAT || snapshot.version != VERSION {
        return Err(StoreError::Malformed(format!(
            "unsupported format {} v{}",
            snapshot.format, snapshot.version
        )));
    }
    let target_host = host.unwrap_or(&snapshot.host);
    let mut cached = Vec::with_capacity(snapshot.resources.len());
    let mut resources = Vec::with_capacity(snapshot.resources.len());
    for entry in snapshot.resources {
        resources.push(LearningResource::from_record(entry.record)?);
        cached.push((entry.canonical, entry.opaque));
    }
    let catalog = Catalog::build(target_host, resources)?;
    if target_host == snapshot.host {
        for (index, (entry, (canonical, opaque))) in catalog.entries().iter().zip(cached).enumerate() {
            let rebuilt = entry.canonical.to_string();
            if rebuilt != canonical {
                return Err(StoreError::Stale {
                    index,
                    field: "canonical",
                    cached: canonical,
                    rebuilt,
                });
            }
            if entry.opaque.as_str() != opaque {
                return Err(StoreError::Stale {
                    index,
                    field: "opaque",
                    cached: opaque,
                    rebuilt: entry.opaque.to_string(),
                });
            }
        }
    }
    Ok(catalog)
}

/// Loads either a snapshot document or a raw JSON Lines resource dump.
///
/// Without an explicit `host`, a raw dump is built under `default_host`.
pub fn load(path: &Path, host: Option<&str>, default_host: &str) -> Result<Catalog, StoreError> {
    let io_err = |source| StoreError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut text = String::new();
    BufReader::new(fs::File::open(path).map_err(io_err)?)
        .read_to_string(&mut text)
        .map_err(io_err)?;
    if is_snapshot(&text) {
        from_snapshot_json(&text, host)
    } else {
        Ok(Catalog::ingest(host.unwrap_or(default_host), text.as_bytes())?)
    }
}

fn is_snapshot(text: &str) -> bool {
    #[derive(Deserialize)]
    struct Probe {
        format: String,
    }
    serde_json::from_str::<Probe>(text).is_ok_and(|p| p.format == FORMAT)
}
