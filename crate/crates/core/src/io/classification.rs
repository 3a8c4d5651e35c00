use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::write_atomic;

/// One row of the classification table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationRow {
    pub index: usize,
    pub impact_parameter_mm: f64,
    #[serde(rename = "gamma_over_gammaF")]
    pub gamma_over_gamma_f: f64,
    pub label: String,
    pub first_crossing_time_s: Option<f64>,
    pub detector_side: String,
}

pub fn encode_classification(rows: &[ClassificationRow]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Error::Validation(format!("classification row: {e}")))?;
    }
    if rows.is_empty() {
        w.write_record([
            "index",
            "impact_parameter_mm",
            "gamma_over_gammaF",
            "label",
            "first_crossing_time_s",
            "detector_side",
        ])
        .map_err(|e| Error::Validation(e.to_string()))?;
    }
    w.into_inner().map_err(|e| Error::Validation(e.to_string()))
}

pub fn write_classification(rows: &[ClassificationRow], path: &Path) -> Result<()> {
    write_atomic(path, &encode_classification(rows)?)
}

pub fn read_classification(path: &Path) -> Result<Vec<ClassificationRow>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    csv::Reader::from_reader(bytes.as_slice())
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Validation(format!("{}: {e}", path.display())))
}
