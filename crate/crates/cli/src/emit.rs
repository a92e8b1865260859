//! Single writer for all outputs, so the manifest lists every file once.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Serialize)]
pub struct RunManifest<'a, C: Serialize> {
    pub config: &'a C,
    pub seed: u64,
    pub command: String,
    pub versions: Versions,
    pub stages: Vec<StageTiming>,
    /// Paths relative to the output directory, in write order.
    pub files: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct Versions {
    pub massscale: &'static str,
    pub cli: &'static str,
}

pub struct Emitter {
    root: PathBuf,
    files: Vec<String>,
    seen: BTreeSet<String>,
    stages: Vec<StageTiming>,
}

pub const MANIFEST: &str = "manifest.json";

impl Emitter {
    pub fn new(root: &Path) -> std::io::Result<Self> {
        std::fs::create_dir_all(root)?;
        Ok(Self {
            root: root.to_path_buf(),
            files: Vec::new(),
            seen: BTreeSet::new(),
            stages: Vec::new(),
        })
    }

    /// A file name under `dir` not used yet in this run.
    pub fn unique(&mut self, dir: &str, stem: &str, ext: &str) -> String {
        let mut name = format!("{dir}/{stem}.{ext}");
        let mut k = 2;
        while self.seen.contains(&name) {
            name = format!("{dir}/{stem}_{k}.{ext}");
            k += 1;
        }
        self.seen.insert(name.clone());
        name
    }

    pub fn write(&mut self, rel: &str, contents: &str) -> std::io::Result<()> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(&path, contents)?;
        self.seen.insert(rel.to_string());
        if !self.files.iter().any(|f| f == rel) {
            self.files.push(rel.to_string());
        }
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, rel: &str, value: &T) -> std::io::Result<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
        text.push('\n');
        self.write(rel, &text)
    }

    pub fn time<T>(&mut self, stage: &str, f: impl FnOnce(&mut Self) -> T) -> T {
        let start = Instant::now();
        let out = f(self);
        self.stages.push(StageTiming {
            stage: stage.to_string(),
            seconds: start.elapsed().as_secs_f64(),
        });
        out
    }

    pub fn finish<C: Serialize>(
        mut self,
        config: &C,
        seed: u64,
        command: &str,
    ) -> std::io::Result<Vec<String>> {
        self.files.push(MANIFEST.to_string());
        let manifest = RunManifest {
            config,
            seed,
            command: command.to_string(),
            versions: Versions {
                massscale: massscale_version(),
                cli: env!("CARGO_PKG_VERSION"),
            },
            stages: std::mem::take(&mut self.stages),
            files: self.files.clone(),
        };
        let mut text = serde_json::to_string_pretty(&manifest).map_err(std::io::Error::other)?;
        text.push('\n');
        std::fs::write(self.root.join(MANIFEST), text)?;
        Ok(self.files)
    }
}

fn massscale_version() -> &'static str {
    massscale::VERSION
}
