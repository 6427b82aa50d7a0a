// Copyright 2026 The fluxpulse Authors
// SPDX-License-Identifier: Apache-2.0

//! Artifact collection and atomic output directories.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use crate::config::RunConfig;

pub const MANIFEST: &str = "manifest.json";

/// Named artifact bodies, kept in memory until the run succeeds.
#[derive(Debug, Default)]
pub struct Artifacts {
    files: BTreeMap<String, Vec<u8>>,
}

impl Artifacts {
    /// Renders one artifact through a core writer.
    pub fn write<F>(&mut self, name: impl Into<String>, render: F) -> Result<()>
    where
        F: FnOnce(&mut Vec<u8>) -> fluxpulse::Result<()>,
    {
        let name = name.into();
        let mut buf = Vec::new();
        render(&mut buf).with_context(|| format!("rendering {name}"))?;
        if self.files.insert(name.clone(), buf).is_some() {
            bail!("artifact {name} written twice");
        }
        Ok(())
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, name: impl Into<String>, value: &T) -> Result<()> {
        self.write(name, |buf| fluxpulse::io::write_json(buf, value))
    }

    pub fn names(&self) -> Vec<&str> {
        self.files.keys().map(String::as_str).collect()
    }
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    core_version: &'static str,
    command: &'a str,
    deterministic: bool,
    config: &'a RunConfig,
    files: Vec<&'a str>,
}

/// Writes every artifact plus the manifest into a fresh directory beside
/// `out`, then renames it into place. An existing `out` is replaced only if
/// it holds a previous manifest (or is empty).
pub fn commit(out: &Path, command: &str, config: &RunConfig, mut artifacts: Artifacts) -> Result<()> {
    let manifest = Manifest {
        tool: "fluxpulse",
        version: env!("CARGO_PKG_VERSION"),
        core_version: fluxpulse::VERSION,
        command,
        deterministic: true,
        config,
        files: artifacts.names(),
    };
    let mut body = serde_json::to_vec_pretty(&manifest)?;
    body.push(b'\n');
    artifacts.files.insert(MANIFEST.to_string(), body);

    let parent = match out.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => std::env::current_dir()?,
    };
    fs::create_dir_all(&parent).with_context(|| format!("creating {}", parent.display()))?;
    if out.exists() {
        check_replaceable(out)?;
    }
    let staging = tempfile::Builder::new()
        .prefix(".fluxpulse-")
        .tempdir_in(&parent)
        .with_context(|| format!("creating staging directory in {}", parent.display()))?;
    for (name, body) in &artifacts.files {
        fs::write(staging.path().join(name), body).with_context(|| format!("writing {name}"))?;
    }
    if out.exists() {
        fs::remove_dir_all(out).with_context(|| format!("removing previous {}", out.display()))?;
    }
    let staged = staging.keep();
    if let Err(e) = fs::rename(&staged, out) {
        let _ = fs::remove_dir_all(&staged);
        return Err(e).with_context(|| format!("moving results into {}", out.display()));
    }
    Ok(())
}

fn check_replaceable(out: &Path) -> Result<()> {
    if !out.is_dir() {
        bail!("output path {} exists and is not a directory", out.display());
    }
    let empty = fs::read_dir(out)?.next().is_none();
    if !empty && !out.join(MANIFEST).is_file() {
        bail!(
            "output directory {} is not empty and holds no {MANIFEST}; refusing to overwrite it",
            out.display()
        );
    }
    Ok(())
}
