//! CSV tables, the JSON summary and the run manifest.

use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::{LabError, ScenarioConfig, ScenarioName, Summary};

/// A named CSV table held in memory.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Table {
    pub fn from_rows<T: Serialize>(name: &str, rows: &[T]) -> Result<Table, LabError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| LabError::Csv(e.into_error().into()))?;
        Ok(Table { name: format!("{name}.csv"), bytes })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileDigest {
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub scenario: ScenarioName,
    pub config_sha256: String,
    pub grid_nodes: usize,
    pub lx: f64,
    pub ly: f64,
    pub seed: u64,
    pub version: String,
    pub tables: Vec<FileDigest>,
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash of the canonical JSON form of the config, output path excluded.
pub fn config_hash(cfg: &ScenarioConfig) -> Result<String, LabError> {
    let mut c = cfg.clone();
    c.output = None;
    Ok(digest(&serde_json::to_vec(&c)?))
}

impl Manifest {
    pub fn new(cfg: &ScenarioConfig, tables: &[Table]) -> Result<Manifest, LabError> {
        Ok(Manifest {
            scenario: cfg.scenario,
            config_sha256: config_hash(cfg)?,
            grid_nodes: cfg.grid.n,
            lx: cfg.grid.lx,
            ly: cfg.grid.ly,
            seed: cfg.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            tables: tables.iter().map(|t| FileDigest { name: t.name.clone(), sha256: digest(&t.bytes) }).collect(),
        })
    }
}

pub fn write_artifacts(dir: &Path, summary: &Summary, tables: &[Table], manifest: &Manifest) -> Result<(), LabError> {
    fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    let write = |name: &str, bytes: &[u8]| {
        let path = dir.join(name);
        fs::write(&path, bytes).map_err(|e| LabError::io(&path, e))
    };
    for t in tables {
        write(&t.name, &t.bytes)?;
    }
    write("summary.json", &serde_json::to_vec_pretty(summary)?)?;
    write("manifest.json", &serde_json::to_vec_pretty(manifest)?)?;
    Ok(())
}
