//! Reading and writing instance files.
//!
//! An instance file is a JSON object with the fields `version`, `epoch`,
//! `horizon_s`, `rp`, `msid_s`, `sigma_s`, `satellites`, `stations`, `oids`
//! and `vtws`. Times are seconds (floats), angles degrees. Floats are written
//! in shortest round-trip form, so `load(save(x)) == x` bit for bit.
//!
//! Window lists computed elsewhere can be ingested on their own, either as a
//! bare array or as an object holding a `vtws` array.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::model::{check_windows, Instance, VisibleTimeWindow};

pub fn to_json(inst: &Instance) -> String {
    serde_json::to_string_pretty(inst).expect("instance serialization cannot fail")
}

pub fn from_json(text: &str) -> Result<Instance> {
    let inst: Instance =
        serde_json::from_str(text).map_err(|e| Error::parse("instance file", e.to_string()))?;
    inst.validate()?;
    Ok(inst)
}

pub fn save_instance(inst: &Instance, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_json(inst)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    from_json(&text)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum WindowBlock {
    Bare(Vec<VisibleTimeWindow>),
    Wrapped { vtws: Vec<VisibleTimeWindow> },
}

/// Parses a standalone window list (STK exports converted to this schema).
pub fn vtws_from_json(text: &str) -> Result<Vec<VisibleTimeWindow>> {
    let block: WindowBlock =
        serde_json::from_str(text).map_err(|e| Error::parse("vtw file", e.to_string()))?;
    let vtws = match block {
        WindowBlock::Bare(v) | WindowBlock::Wrapped { vtws: v } => v,
    };
    check_windows(&vtws, None)?;
    Ok(vtws)
}

pub fn load_vtws(path: impl AsRef<Path>) -> Result<Vec<VisibleTimeWindow>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    vtws_from_json(&text)
}

impl Instance {
    /// Replaces the window set, e.g. with externally computed windows.
    pub fn with_vtws(mut self, vtws: Vec<VisibleTimeWindow>) -> Result<Self> {
        self.vtws = vtws;
        self.validate()?;
        Ok(self)
    }
}
