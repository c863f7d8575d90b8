//! Run manifests and JSON / CSV writers.
//!
//! JSON outputs embed the manifest. CSV outputs get a sidecar
//! `<out>.manifest.json`, or the manifest goes to stderr when the table is
//! written to stdout. Floats use the shortest representation that parses
//! back to the same value; nothing time- or host-dependent is recorded.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::cmd::Failure;
use crate::{Common, Format};

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub payoffs: BTreeMap<&'static str, f64>,
    pub payoff_ordering: &'static str,
    pub strategies: Vec<String>,
    pub parameters: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prng: Option<&'static str>,
}

impl RunManifest {
    pub fn new(command: &str, common: &Common) -> Self {
        let [r, s, t, p] = common.payoffs;
        RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            payoffs: BTreeMap::from([("R", r), ("S", s), ("T", t), ("P", p)]),
            payoff_ordering: if common.permissive {
                "permissive"
            } else {
                "strict"
            },
            strategies: Vec::new(),
            parameters: BTreeMap::new(),
            prng: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.parameters.insert(
            key.to_string(),
            serde_json::to_value(value).expect("serializable parameter"),
        );
        self
    }

    pub fn strategy(mut self, spec: impl ToString) -> Self {
        self.strategies.push(spec.to_string());
        self
    }
}

/// Shortest round-trip rendering for CSV cells.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

fn write_bytes(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        Some(path) => fs::write(path, bytes)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| Failure::usage(format!("cannot write to stdout: {e}")))
        }
    }
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn json_bytes(value: &impl Serialize) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializable output");
    bytes.push(b'\n');
    bytes
}

/// Writes a tabular result as CSV or as JSON `{manifest, rows}`.
pub fn emit_table<R: Serialize>(
    common: &Common,
    default: Format,
    manifest: &RunManifest,
    header: &[String],
    csv_rows: &[Vec<String>],
    json_rows: &[R],
) -> Result<(), Failure> {
    match common.format.unwrap_or(default) {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a, R> {
                manifest: &'a RunManifest,
                rows: &'a [R],
            }
            write_bytes(
                common.out.as_deref(),
                &json_bytes(&Doc {
                    manifest,
                    rows: json_rows,
                }),
            )
        }
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::CRLF)
                .from_writer(Vec::new());
            w.write_record(header).map_err(Failure::internal)?;
            for row in csv_rows {
                w.write_record(row).map_err(Failure::internal)?;
            }
            let bytes = w.into_inner().map_err(Failure::internal)?;
            write_bytes(common.out.as_deref(), &bytes)?;
            emit_sidecar(common, manifest)
        }
    }
}

/// Writes a single-object result as JSON `{manifest, result}`.
pub fn emit_object(
    common: &Common,
    manifest: &RunManifest,
    result: &impl Serialize,
) -> Result<(), Failure> {
    #[derive(Serialize)]
    struct Doc<'a, T> {
        manifest: &'a RunManifest,
        result: &'a T,
    }
    write_bytes(
        common.out.as_deref(),
        &json_bytes(&Doc { manifest, result }),
    )
}

fn emit_sidecar(common: &Common, manifest: &RunManifest) -> Result<(), Failure> {
    match &common.out {
        Some(out) => write_bytes(Some(&manifest_path(out)), &json_bytes(manifest)),
        None => {
            eprintln!(
                "{}",
                serde_json::to_string(manifest).expect("serializable manifest")
            );
            Ok(())
        }
    }
}
