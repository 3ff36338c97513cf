//! Plot-ready text artifacts. Every file starts with a `#` header carrying
//! the config hash and an echo of the effective configuration; bodies use a
//! fixed float format so identical configs give byte-identical files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::config::RunConfig;
use crate::error::{Error, Result};

pub const ECHO_PREFIX: &str = "# cfg ";

/// Axis scalings used when plotting: times in `1e10`, frequencies in `1e-8`,
/// scales in `1e8` atomic units.
pub const DISPLAY_SCALES: &str = "time = 1e10, frequency = 1e-8, scale = 1e8";

pub fn fmt_f(x: f64) -> String {
    format!("{x:.15e}")
}

#[derive(Debug, Clone)]
pub struct Provenance {
    pub hash: String,
    echo: String,
}

impl Provenance {
    pub fn new(cfg: &RunConfig) -> Self {
        let echo = cfg.canonical_toml();
        let hash = format!("{:x}", Sha256::digest(echo.as_bytes()));
        Self { hash, echo }
    }

    pub fn header(&self, artifact: &str, extra: &[(&str, String)]) -> String {
        let mut h = String::new();
        let _ = writeln!(h, "# revival-cwt {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(h, "# artifact = {artifact}");
        let _ = writeln!(h, "# config_sha256 = {}", self.hash);
        let _ = writeln!(h, "# units = atomic (hbar = 1)");
        let _ = writeln!(h, "# display_scale: {DISPLAY_SCALES}");
        for (k, v) in extra {
            let _ = writeln!(h, "# {k} = {v}");
        }
        for line in self.echo.lines().filter(|l| !l.trim().is_empty()) {
            let _ = writeln!(h, "{ECHO_PREFIX}{line}");
        }
        h
    }
}

/// Re-parses the configuration echoed in an artifact header.
pub fn parse_echo(text: &str) -> Result<RunConfig> {
    let src: String = text
        .lines()
        .filter_map(|l| l.strip_prefix(ECHO_PREFIX))
        .map(|l| format!("{l}\n"))
        .collect();
    RunConfig::from_toml_str(&src)
}

pub(crate) fn write_file(dir: &Path, name: &str, body: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(Error::Io)?;
    let path = dir.join(name);
    std::fs::write(&path, body)?;
    Ok(path)
}
