//! Output directory handling: atomic writes and the provenance file.

use std::fmt::Debug;
use std::io::Write;
use std::path::PathBuf;

use schauder::{Error, Result};

/// Environment variable that overrides the default output directory.
pub const OUT_DIR_ENV: &str = "SCHAUDER_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "schauder-out";

pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    /// `--out-dir`, else the environment override, else the default.
    pub fn resolve(flag: Option<PathBuf>) -> Result<Self> {
        let root = flag
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
        std::fs::create_dir_all(&root)?;
        Ok(OutDir { root })
    }

    /// Writes through a temporary file in the same directory, then renames.
    pub fn write(&self, name: &str, contents: &[u8]) -> Result<()> {
        let mut tmp = tempfile::NamedTempFile::new_in(&self.root)?;
        tmp.write_all(contents)?;
        tmp.flush()?;
        tmp.persist(self.root.join(name)).map_err(|e| Error::Io(e.to_string()))?;
        Ok(())
    }

    pub fn write_str(&self, name: &str, contents: &str) -> Result<()> {
        self.write(name, contents.as_bytes())
    }

    /// `meta.txt`: tool version, subcommand and its full resolved flags.
    /// Thread count and output location are execution details and left out,
    /// so the file is identical across them.
    pub fn write_meta(&self, command: &str, config: &impl Debug) -> Result<()> {
        let text = format!(
            "tool=schauder {}\ncommand={command}\nconfig={config:#?}\n",
            env!("CARGO_PKG_VERSION")
        );
        self.write_str("meta.txt", &text)
    }
}
