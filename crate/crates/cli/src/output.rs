//! CSV tables and JSON summaries, each carrying the resolved configuration.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliResult;

/// Where files go; with no directory nothing is written.
pub struct Sink {
    dir: Option<PathBuf>,
    command: &'static str,
    config: serde_json::Value,
    header: Vec<String>,
}

/// Number formatting shared by all tables.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

impl Sink {
    pub fn new(command: &'static str, config: &RunConfig) -> CliResult<Self> {
        let value = serde_json::to_value(config)?;
        let header = vec![
            format!("ctsplit {command} {}", env!("CARGO_PKG_VERSION")),
            format!("config: {value}"),
        ];
        Ok(Self {
            dir: config.out.clone(),
            command,
            config: value,
            header,
        })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn path(&self, name: &str) -> CliResult<Option<PathBuf>> {
        match &self.dir {
            None => Ok(None),
            Some(d) => {
                fs::create_dir_all(d)?;
                Ok(Some(d.join(name)))
            }
        }
    }

    /// `# ` comment lines, then a one-line header and the rows.
    pub fn csv(
        &self,
        name: &str,
        extra_comments: &[String],
        columns: &[String],
        rows: &[Vec<String>],
    ) -> CliResult<()> {
        let Some(path) = self.path(name)? else { return Ok(()) };
        let mut buf = Vec::new();
        for line in self.header.iter().chain(extra_comments) {
            buf.extend_from_slice(format!("# {line}\n").as_bytes());
        }
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(columns)?;
            for r in rows {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        fs::write(path, buf)?;
        Ok(())
    }

    /// Pretty JSON with `command` and `config` fields added at the top.
    pub fn json<T: Serialize>(&self, name: &str, body: &T) -> CliResult<()> {
        let Some(path) = self.path(name)? else { return Ok(()) };
        let mut value = serde_json::json!({
            "command": self.command,
            "version": env!("CARGO_PKG_VERSION"),
            "config": self.config,
        });
        if let (Some(obj), serde_json::Value::Object(extra)) = (value.as_object_mut(), serde_json::to_value(body)?) {
            obj.extend(extra);
        }
        let mut text = serde_json::to_string_pretty(&value)?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }
}
