use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::config::Settings;

#[derive(Debug, Serialize)]
struct Versions {
    holostab: &'static str,
    holostab_cli: &'static str,
}

#[derive(Debug, Serialize)]
struct Timings {
    total_seconds: Option<f64>,
}

#[derive(Debug, Serialize)]
struct Body<'a> {
    command: &'static str,
    status: &'a str,
    config_file: Option<&'a Path>,
    threads: usize,
    versions: Versions,
    settings: &'a Settings,
    outputs: &'a [String],
    timings: Timings,
}

/// `manifest.json` in the run directory, written before any result and
/// rewritten with outputs and timings on completion.
pub struct Manifest {
    path: PathBuf,
    config_file: Option<PathBuf>,
    settings: Settings,
    outputs: Vec<String>,
    start: Instant,
}

impl Manifest {
    pub fn begin(settings: &Settings, config_file: Option<PathBuf>) -> std::io::Result<Self> {
        std::fs::create_dir_all(&settings.out)?;
        let m = Manifest {
            path: settings.out.join("manifest.json"),
            config_file,
            settings: settings.clone(),
            outputs: Vec::new(),
            start: Instant::now(),
        };
        m.write("running", None)?;
        Ok(m)
    }

    pub fn output(&mut self, name: impl Into<String>) {
        self.outputs.push(name.into());
    }

    pub fn finish(&self, status: &str) -> std::io::Result<()> {
        self.write(status, Some(self.start.elapsed().as_secs_f64()))
    }

    fn write(&self, status: &str, total: Option<f64>) -> std::io::Result<()> {
        let body = Body {
            command: self.settings.command.name(),
            status,
            config_file: self.config_file.as_deref(),
            threads: rayon::current_num_threads(),
            versions: Versions { holostab: holostab::VERSION, holostab_cli: env!("CARGO_PKG_VERSION") },
            settings: &self.settings,
            outputs: &self.outputs,
            timings: Timings { total_seconds: total },
        };
        let text = serde_json::to_string_pretty(&body).expect("serializable");
        std::fs::write(&self.path, text + "\n")
    }
}
