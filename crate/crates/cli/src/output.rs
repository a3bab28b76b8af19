//! Output directory handling: every file carries the config hash and the
//! tolerances actually used, so runs are auditable and byte-reproducible.

use anyhow::{Context, Result};
use serde_json::json;
use std::path::PathBuf;

pub struct OutputDir {
    dir: PathBuf,
    config_hash: String,
    config_json: serde_json::Value,
}

impl OutputDir {
    pub fn create(dir: PathBuf, cfg: &crate::config::RunConfig) -> Result<Self> {
        std::fs::create_dir_all(&dir)
            .with_context(|| format!("creating output dir {}", dir.display()))?;
        Ok(OutputDir {
            dir,
            config_hash: cfg.hash(),
            config_json: serde_json::to_value(cfg)?,
        })
    }

    pub fn hash(&self) -> &str {
        &self.config_hash
    }

    /// CSV with a `# config_hash=…` header comment.
    pub fn write_csv(&self, name: &str, rows: &[String]) -> Result<()> {
        let mut text = format!("# config_hash={}\n", self.config_hash);
        for row in rows {
            text.push_str(row);
            text.push('\n');
        }
        let path = self.dir.join(name);
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }

    /// `summary.json` embedding the hash and the materialized config
    /// (defaults included), per the reproducibility contract.
    pub fn write_summary(&self, mut body: serde_json::Value) -> Result<()> {
        if let Some(map) = body.as_object_mut() {
            map.insert("config_hash".into(), json!(self.config_hash));
            map.insert("config".into(), self.config_json.clone());
        }
        let path = self.dir.join("summary.json");
        std::fs::write(&path, serde_json::to_string_pretty(&body)?)
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}
