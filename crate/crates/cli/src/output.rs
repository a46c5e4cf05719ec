//! Artifact writing: CSV and JSON files, written atomically, each recorded
//! in the run manifest with its checksum and producing config hash.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use cqed_core::wigner::WignerMap;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const CONVENTION: &str =
    "alpha = (q1 + i q2)/sqrt(2), hbar = 1; W(alpha) = 2 Tr[rho D(alpha) P D(alpha)^dagger], |W| <= 2, integral of W d^2alpha/pi = 1";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// 17 significant digits, enough for an exact round trip.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_float(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

#[derive(Debug, Clone, Serialize)]
pub struct Artifact {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
    pub config_hash: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a, C: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub experiment: &'a str,
    pub config_hash: &'a str,
    pub config: &'a C,
    pub artifacts: &'a [Artifact],
    pub warnings: &'a [String],
}

pub struct OutputDir {
    root: PathBuf,
    config_hash: String,
    artifacts: Vec<Artifact>,
    warnings: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path, config_hash: String) -> std::io::Result<Self> {
        fs::create_dir_all(root)?;
        Ok(Self { root: root.to_path_buf(), config_hash, artifacts: Vec::new(), warnings: Vec::new() })
    }

    pub fn warn(&mut self, message: String) {
        eprintln!("warning: {message}");
        self.warnings.push(message);
    }

    fn write_atomic(&self, name: &str, bytes: &[u8]) -> std::io::Result<()> {
        let mut tmp = tempfile::NamedTempFile::new_in(&self.root)?;
        tmp.write_all(bytes)?;
        tmp.as_file().sync_all()?;
        tmp.persist(self.root.join(name)).map_err(|e| e.error)?;
        Ok(())
    }

    fn record(&mut self, name: &str, bytes: &[u8]) -> std::io::Result<String> {
        self.write_atomic(name, bytes)?;
        let sha = sha256_hex(bytes);
        self.artifacts.push(Artifact {
            path: name.to_string(),
            sha256: sha.clone(),
            bytes: bytes.len(),
            config_hash: self.config_hash.clone(),
        });
        Ok(sha)
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> std::io::Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        self.record(name, &bytes)
    }

    pub fn json(&mut self, name: &str, value: &impl Serialize) -> std::io::Result<String> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.record(name, &bytes)
    }

    /// `<stem>.csv` with columns (q1, q2, W) and a `<stem>.json` header
    /// describing grid, convention, provenance and the CSV checksum.
    pub fn wigner(&mut self, stem: &str, map: &WignerMap, extra: serde_json::Value) -> std::io::Result<()> {
        let mut rows = Vec::with_capacity(map.grid.len());
        for i in 0..map.grid.n1 {
            for j in 0..map.grid.n2 {
                rows.push(vec![float(map.grid.q1(i)), float(map.grid.q2(j)), float(map.value(i, j))]);
            }
        }
        let csv_name = format!("{stem}.csv");
        let sha = self.csv(&csv_name, &["q1", "q2", "W"], &rows)?;
        let header = serde_json::json!({
            "data": csv_name,
            "columns": ["q1", "q2", "W"],
            "order": "q1 outer, q2 inner",
            "grid": map.grid,
            "convention": CONVENTION,
            "provenance": map.kind,
            "checks": map.checks(),
            "sha256": sha,
            "details": extra,
        });
        self.json(&format!("{stem}.json"), &header)?;
        Ok(())
    }

    /// Writes `manifest.json`; always the last artifact of a run.
    pub fn finish<C: Serialize>(self, experiment: &str, config: &C) -> std::io::Result<PathBuf> {
        let manifest = Manifest {
            tool: "cqed",
            version: env!("CARGO_PKG_VERSION"),
            experiment,
            config_hash: &self.config_hash,
            config,
            artifacts: &self.artifacts,
            warnings: &self.warnings,
        };
        let mut bytes = serde_json::to_vec_pretty(&manifest)?;
        bytes.push(b'\n');
        self.write_atomic("manifest.json", &bytes)?;
        Ok(self.root.join("manifest.json"))
    }
}
