//! Artifact writers. Numbers use Rust's shortest round-trip formatting, so
//! identical results give identical bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ibvp_core::solver::SolutionField;
use ibvp_core::traffic::SweepRow;
use ibvp_core::verify::CertificateReport;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

pub fn write_file(dir: &Path, name: &str, body: &str) -> CliResult<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

pub fn profile_csv(field: &SolutionField, stride: usize) -> String {
    let centers = field.grid.centers();
    let mut s = String::from("t,x,u\n");
    let last = field.len() - 1;
    for (i, (t, u)) in field.times.iter().zip(&field.profiles).enumerate() {
        if i % stride != 0 && i != last {
            continue;
        }
        for (x, v) in centers.iter().zip(u) {
            writeln!(s, "{t},{x},{v}").unwrap();
        }
    }
    s
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("V_kmh,J,total_discharge,emptying_time\n");
    for r in rows {
        let empty = r.emptying_time.map_or_else(|| "NA".to_string(), |t| t.to_string());
        writeln!(s, "{},{},{},{}", r.v_red_kmh, r.j, r.total_discharge, empty).unwrap();
    }
    s
}

/// Rows prefixed by their group label, e.g. `main.tv`.
pub fn certificates_csv(groups: &[(String, Vec<CertificateReport>)]) -> String {
    let mut s = String::from("check,bound,empirical,margin,pass\n");
    for (label, reports) in groups {
        for r in reports {
            writeln!(s, "{label}.{},{},{},{},{}", r.check, r.bound, r.empirical, r.margin, r.pass).unwrap();
        }
    }
    s
}

pub struct GammaLevel {
    pub cells: usize,
    pub dx: f64,
    pub l1_gap: f64,
    pub mass: f64,
}

pub fn gamma_csv(levels: &[GammaLevel]) -> String {
    let mut s = String::from("cells,dx,l1_gap,mass\n");
    for l in levels {
        writeln!(s, "{},{},{},{}", l.cells, l.dx, l.l1_gap, l.mass).unwrap();
    }
    s
}

#[derive(Debug, Serialize)]
struct ManifestGrid {
    cells: usize,
    cfl: f64,
    x_lo: f64,
    x_hi: f64,
    dx: f64,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    config_sha256: String,
    artifacts: Vec<String>,
    grid: ManifestGrid,
    config: &'a RunConfig,
}

/// Hash of the resolved config with the output directory blanked, so the
/// same run written to two places hashes the same.
pub fn config_hash(cfg: &RunConfig) -> String {
    let mut c = cfg.clone();
    c.out = PathBuf::new();
    let digest = Sha256::digest(c.to_toml().as_bytes());
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        write!(s, "{b:02x}").unwrap();
        s
    })
}

/// Manifest text; `config` holds the resolved run configuration.
pub fn manifest(cfg: &RunConfig, x_lo: f64, x_hi: f64, artifacts: &[PathBuf]) -> String {
    let m = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config_sha256: config_hash(cfg),
        artifacts: artifacts
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect(),
        grid: ManifestGrid {
            cells: cfg.grid.cells,
            cfl: cfg.grid.cfl,
            x_lo,
            x_hi,
            dx: (x_hi - x_lo) / cfg.grid.cells as f64,
        },
        config: cfg,
    };
    toml::to_string(&m).expect("manifest serializes")
}

/// Recovers the run configuration stored in a manifest.
pub fn config_from_manifest(text: &str) -> CliResult<RunConfig> {
    #[derive(serde::Deserialize)]
    struct Stored {
        config: RunConfig,
    }
    let stored: Stored = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    Ok(stored.config)
}
