//! Output files of one run directory.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::analysis::{EnergySample, Verdict};
use crate::error::Result;

use super::config::FileConfig;

pub const SCHEMA_VERSION: u32 = 1;
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    kind: &'a str,
    report: &'a T,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub artifact_version: String,
    pub command: String,
    pub config: FileConfig,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<String>,
    pub verdicts: Vec<(String, Verdict)>,
}

/// Collects the files of one run and writes the manifest last.
pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root)?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        fs::write(self.root.join(name), contents)?;
        if !self.written.iter().any(|w| w == name) {
            self.written.push(name.to_string());
        }
        Ok(())
    }

    /// `t,E,V,V_bound,sup_y`; `V_bound = V(0) exp(-lambda t)` is left empty
    /// when `lambda` is `None`.
    pub fn energy_csv(&mut self, series: &[EnergySample], lambda: Option<f64>) -> Result<()> {
        let mut out = String::from("t,E,V,V_bound,sup_y\n");
        let (t0, v0) = series.first().map_or((0.0, 0.0), |s| (s.t, s.v));
        for s in series {
            let bound = lambda.map_or(String::new(), |l| num(v0 * (-l * (s.t - t0)).exp()));
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                num(s.t),
                num(s.e),
                num(s.v),
                bound,
                num(s.sup_y)
            );
        }
        self.write("energy.csv", &out)
    }

    /// Free-form table; `rows` are already formatted cells.
    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut out = header.join(",");
        out.push('\n');
        for r in rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        self.write(name, &out)
    }

    pub fn report<T: Serialize>(&mut self, kind: &str, report: &T) -> Result<()> {
        let env = Envelope {
            schema_version: SCHEMA_VERSION,
            kind,
            report,
        };
        let mut text = serde_json::to_string_pretty(&env)?;
        text.push('\n');
        self.write(&format!("{kind}.json"), &text)
    }

    pub fn manifest(
        mut self,
        command: &str,
        config: &FileConfig,
        seconds: f64,
        verdicts: Vec<(String, Verdict)>,
    ) -> Result<RunManifest> {
        let manifest = RunManifest {
            schema_version: SCHEMA_VERSION,
            artifact_version: ARTIFACT_VERSION.to_string(),
            command: command.to_string(),
            config: config.clone(),
            wall_clock_seconds: seconds,
            outputs: self.written.clone(),
            verdicts,
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        self.write("manifest.json", &text)?;
        Ok(manifest)
    }
}

/// Cell formatter for optional numbers.
pub fn cell(x: Option<f64>) -> String {
    x.map_or(String::new(), num)
}

pub fn cell_f(x: f64) -> String {
    num(x)
}
