//! Per-run manifest. The file is itself a valid config (run metadata sits
//! in comments), so `vacuum-refine <cmd> --config <manifest>` repeats the run.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use vacuum_core::adiabatic::SCHEDULE_DISCRETIZATION;

use crate::config::ExperimentConfig;

pub const CODE_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug)]
pub struct RunManifest {
    pub command: String,
    pub config: ExperimentConfig,
    pub seed: u64,
    pub duration: Duration,
    pub outputs: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

impl RunManifest {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# command: {}", self.command);
        let _ = writeln!(out, "# version: {CODE_VERSION}");
        let _ = writeln!(out, "# seed: {}", self.seed);
        let _ = writeln!(out, "# schedule discretization: {SCHEDULE_DISCRETIZATION}");
        let _ = writeln!(out, "# wall clock: {:.3} s", self.duration.as_secs_f64());
        for o in &self.outputs {
            let _ = writeln!(out, "# output: {}", o.display());
        }
        for w in &self.warnings {
            let _ = writeln!(out, "# warning: {w}");
        }
        out.push_str(&self.config.to_text());
        out
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, self.render())
    }
}
