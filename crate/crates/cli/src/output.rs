//! Output directory writer; every file carries the resolved config.

use std::cell::RefCell;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;
use crate::CliError;

pub struct Output {
    dir: PathBuf,
    config: RefCell<Option<RunConfig>>,
}

impl Output {
    pub fn new(dir: &Path) -> Self {
        Output {
            dir: dir.to_path_buf(),
            config: RefCell::new(None),
        }
    }

    /// Records the resolved config and writes it as `config.json`, the
    /// input of `rerun`.
    pub fn set_config(&self, config: &RunConfig) -> Result<(), CliError> {
        *self.config.borrow_mut() = Some(config.clone());
        self.write("config.json", pretty(config)?)
    }

    pub fn config_json(&self) -> Value {
        self.config.borrow().as_ref().expect("config set before output").to_json()
    }

    fn write(&self, name: &str, bytes: Vec<u8>) -> Result<(), CliError> {
        fs::create_dir_all(&self.dir)?;
        fs::write(self.dir.join(name), bytes)?;
        Ok(())
    }

    /// Writes a CSV file whose first line is `# config=<json>`.
    pub fn csv(&self, name: &str, body: impl FnOnce(&mut Vec<u8>) -> Result<(), CliError>) -> Result<(), CliError> {
        let line = self.config.borrow().as_ref().expect("config set before output").to_line();
        let mut buf = format!("# config={line}\n").into_bytes();
        body(&mut buf)?;
        self.write(name, buf)
    }

    /// Writes a JSON object, adding a `config` key unless one is present.
    pub fn json(&self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        let mut v = serde_json::to_value(value)?;
        if let Value::Object(map) = &mut v {
            map.entry("config").or_insert_with(|| self.config_json());
        }
        self.write(name, pretty(&v)?)
    }
}

fn pretty(v: &impl Serialize) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(v)?;
    bytes.push(b'\n');
    Ok(bytes)
}
