//! Maps between raw coordinates and the unit sphere.
//!
//! Learning assumes unit rows, so every pipeline starts here: plain
//! normalization, center-then-normalize, or the stereographic lift that
//! embeds R^d isometrically-enough into the sphere S^d one dimension up.

use ndarray::{Array1, Array2};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::model::DataSet;

const ZERO_NORM_CUTOFF: f64 = 1e-12;

/// How close the last coordinate may get to the north pole before the
/// inverse projection blows up.
pub const POLE_CUTOFF: f64 = 1.0 - 1e-12;

/// Scale every row to unit length.
pub fn normalize(points: &Array2<f64>) -> Result<DataSet> {
    let mut out = points.clone();
    for (i, mut row) in out.outer_iter_mut().enumerate() {
        let norm = row.dot(&row).sqrt();
        if !norm.is_finite() || norm <= ZERO_NORM_CUTOFF {
            return Err(Error::DegenerateInput {
                row: i,
                message: format!("norm {norm} cannot be scaled to 1"),
            });
        }
        row.mapv_inplace(|v| v / norm);
    }
    let mut data = DataSet::new(out, None)?;
    data.meta_mut().insert("norm".into(), Value::String("unit".into()));
    Ok(data)
}

/// Subtract the sample mean, then scale rows to unit length. The mean comes
/// back to the caller so model output can be mapped into the original frame;
/// the mean of the row norms is stored as `scale` for the same reason.
pub fn center_normalize(points: &Array2<f64>) -> Result<(DataSet, Array1<f64>)> {
    let n = points.nrows() as f64;
    let mean = points.sum_axis(ndarray::Axis(0)) / n;
    let mut out = points.clone();
    let mut norm_sum = 0.0;
    for (i, mut row) in out.outer_iter_mut().enumerate() {
        row.zip_mut_with(&mean, |v, m| *v -= m);
        let norm = row.dot(&row).sqrt();
        if !norm.is_finite() || norm <= ZERO_NORM_CUTOFF {
            return Err(Error::DegenerateInput {
                row: i,
                message: "row coincides with the sample mean".into(),
            });
        }
        norm_sum += norm;
        row.mapv_inplace(|v| v / norm);
    }
    let mut data = DataSet::new(out, None)?;
    let meta = data.meta_mut();
    meta.insert("norm".into(), Value::String("center-unit".into()));
    meta.insert(
        "mean".into(),
        Value::Array(mean.iter().map(|v| json_num(*v)).collect()),
    );
    meta.insert("scale".into(), json_num(norm_sum / n));
    Ok((data, mean))
}

/// Inverse stereographic projection from the north pole: R^d -> S^d.
/// Output rows are unit by construction.
pub fn stereographic_lift(points: &Array2<f64>) -> Result<DataSet> {
    let (n, d) = points.dim();
    let mut out = Array2::zeros((n, d + 1));
    for (i, row) in points.outer_iter().enumerate() {
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateInput {
                row: i,
                message: "non-finite coordinate".into(),
            });
        }
        let s = row.dot(&row);
        let f = 2.0 / (1.0 + s);
        for j in 0..d {
            out[(i, j)] = f * row[j];
        }
        out[(i, d)] = 1.0 - f; // equals (s - 1) / (s + 1)
    }
    let mut data = DataSet::new(out, None)?;
    data.meta_mut()
        .insert("norm".into(), Value::String("stereographic".into()));
    Ok(data)
}

/// Stereographic projection back down: points near S^d minus the pole to
/// R^d. Rows whose last coordinate reaches the pole cutoff are rejected.
pub fn stereographic_drop(points: &Array2<f64>) -> Result<Array2<f64>> {
    let (n, dd) = points.dim();
    if dd < 2 {
        return Err(Error::Validation(
            "inverse projection needs dimension >= 2".into(),
        ));
    }
    let d = dd - 1;
    let mut out = Array2::zeros((n, d));
    for (i, row) in points.outer_iter().enumerate() {
        let last = row[d];
        if last >= POLE_CUTOFF {
            return Err(Error::PoleSingularity { row: i });
        }
        let f = 1.0 / (1.0 - last);
        for j in 0..d {
            out[(i, j)] = f * row[j];
        }
    }
    Ok(out)
}

fn json_num(v: f64) -> Value {
    serde_json::Number::from_f64(v)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}
