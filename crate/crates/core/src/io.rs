//! File formats: trace CSV, outcome JSON, point-set files, and atomic writes.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iterator::{IterationTrace, Outcome};
use crate::mapping::{SetSpec, Side};
use crate::metric::{Point, PointSet, SetLabel};

/// Fixed-point rendering with 7 decimals, trailing zeros dropped.
pub fn fmt_num(x: f64) -> String {
    let s = format!("{x:.7}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

/// Scalars print bare, points of higher dimension as `[a,b,...]`.
pub fn fmt_point(p: &Point) -> String {
    match p.coords() {
        [x] => fmt_num(*x),
        cs => format!(
            "[{}]",
            cs.iter().map(|c| fmt_num(*c)).collect::<Vec<_>>().join(",")
        ),
    }
}

/// Writes `bytes` to a temporary file next to `path` and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn trace_csv_header(dim: usize) -> Vec<String> {
    let mut h = vec!["n".to_string(), "side".to_string()];
    h.extend((0..dim).map(|i| format!("coord_{i}")));
    h.extend(
        ["step_dist", "two_step_dist", "bound_rhs", "partial_sum"]
            .iter()
            .map(|s| s.to_string()),
    );
    h
}

/// One row per iterate `x_n` (1-based `n`). Row `n` carries `d(x_n, x_{n+1})`,
/// `d(x_n, x_{n+2})`, the bound for step `n` and the sum through step `n`;
/// cells past the end of the trace are empty.
pub fn trace_to_csv(trace: &IterationTrace) -> Result<Vec<u8>> {
    let dim = trace.points.first().map_or(0, Point::dim);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(trace_csv_header(dim))?;
    let cell = |v: Option<&f64>| v.map_or(String::new(), |x| x.to_string());
    for (i, (p, side)) in trace.points.iter().zip(&trace.sides).enumerate() {
        let mut row = vec![(i + 1).to_string(), side.to_string()];
        row.extend(p.coords().iter().map(|c| c.to_string()));
        row.push(cell(trace.step_dist.get(i)));
        row.push(cell(trace.two_step_dist.get(i)));
        row.push(cell(trace.bound_rhs.get(i)));
        row.push(cell(trace.partial_sums.get(i)));
        w.write_record(row)?;
    }
    w.into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
}

/// Sibling JSON written next to a trace CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub outcome: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Point>,
    #[serde(rename = "z_A", default, skip_serializing_if = "Option::is_none")]
    pub z_a: Option<Point>,
    #[serde(rename = "z_B", default, skip_serializing_if = "Option::is_none")]
    pub z_b: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(rename = "D")]
    pub d: f64,
    pub omega: f64,
    pub iterations: usize,
    pub start_side: Side,
    pub stopped: bool,
    /// Every step passes the lower bound and both geometric bounds.
    pub step_bound_ok: bool,
    /// Every step satisfies `d_n >= D` (within the ledger slack).
    pub lower_envelope_ok: bool,
}

impl OutcomeRecord {
    pub fn new(trace: &IterationTrace, step_bound_ok: bool, lower_envelope_ok: bool) -> Self {
        let mut rec = OutcomeRecord {
            outcome: String::new(),
            z: None,
            z_a: None,
            z_b: None,
            reason: None,
            d: trace.d,
            omega: trace.omega,
            iterations: trace.iterations(),
            start_side: trace.sides[0],
            stopped: trace.stopped,
            step_bound_ok,
            lower_envelope_ok,
        };
        match &trace.outcome {
            Some(Outcome::FixedPoint { z }) => {
                rec.outcome = "FixedPoint".into();
                rec.z = Some(z.clone());
            }
            Some(Outcome::BestProximityPair { z_a, z_b }) => {
                rec.outcome = "BestProximityPair".into();
                rec.z_a = Some(z_a.clone());
                rec.z_b = Some(z_b.clone());
            }
            Some(Outcome::NotConverged { reason }) => {
                rec.outcome = "NotConverged".into();
                rec.reason = Some(reason.clone());
            }
            None => {
                rec.outcome = "NotConverged".into();
                rec.reason = Some("limit detection not run".into());
            }
        }
        rec
    }
}

/// Reads a point-set file (same schema as the `A`/`B` entries of an instance).
pub fn read_point_set(text: &str) -> Result<PointSet> {
    let spec: SetSpec =
        serde_json::from_str(text).map_err(|e| Error::InstanceFormat(e.to_string()))?;
    spec.discretize(SetLabel::A)
}
