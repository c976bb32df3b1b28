//! File formats: scenario documents, sweep CSV, reference traces.

mod scenario_file;
mod sweep_csv;

use std::fs;
use std::path::Path;

pub use scenario_file::{
    load_scenario, load_scenario_file, parse_scenario, save_scenario, LoadedScenario, ScenarioDoc,
    SCHEMA_VERSION, VLOS_SCENARIO, ZONE_A_SCENARIO,
};
pub use sweep_csv::{
    deembed, export_sweep, ingest_sweep, read_reference, read_sweep, reference_to_csv, sweep_from_csv,
    sweep_to_csv, ReferenceTrace, REFERENCE_HEADER, SWEEP_HEADER,
};

use crate::error::{Error, Result};

/// Writes `contents` to a sibling temp file and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::invalid(format!("not a file path: {}", path.display())))?;
    let mut tmp_name = file_name.to_os_string();
    tmp_name.push(format!(".tmp-{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}
