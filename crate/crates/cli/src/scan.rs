use std::time::Duration;

use serde::Serialize;

use trigsum::{ExtremumCertificate, FrequencySet};

/// One CSV row per (construction, size). Failed rows keep the name and size
/// and leave the rest empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub construction: String,
    pub n: Option<u64>,
    pub lambda_n: Option<u64>,
    pub m1_value: Option<f64>,
    pub m1_bound: Option<f64>,
    pub m2_value: Option<f64>,
    pub m2_bound: Option<f64>,
    pub parseval_floor: Option<f64>,
    pub runtime_ms: Option<u128>,
}

pub const HEADER: &str =
    "construction,n,lambda_n,m1_value,m1_bound,m2_value,m2_bound,parseval_floor,runtime_ms";

impl ScanRow {
    pub fn filled(
        name: &str,
        set: &FrequencySet,
        m1: &ExtremumCertificate,
        m2: &ExtremumCertificate,
        floor: f64,
        elapsed: Duration,
    ) -> Self {
        ScanRow {
            construction: name.to_string(),
            n: Some(set.len() as u64),
            lambda_n: Some(set.max()),
            m1_value: Some(m1.value),
            m1_bound: Some(m1.certified_bound),
            m2_value: Some(m2.value),
            m2_bound: Some(m2.certified_bound),
            parseval_floor: Some(floor),
            runtime_ms: Some(elapsed.as_millis()),
        }
    }

    pub fn failed(name: &str, n: Option<u64>) -> Self {
        ScanRow {
            construction: name.to_string(),
            n,
            lambda_n: None,
            m1_value: None,
            m1_bound: None,
            m2_value: None,
            m2_bound: None,
            parseval_floor: None,
            runtime_ms: None,
        }
    }
}

pub fn to_csv(rows: &[ScanRow]) -> csv::Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv is utf-8");
    Ok(format!("{HEADER}\n{body}"))
}
