//! CSV and JSON rendering of point and sweep results.
//!
//! Every floating value is rendered with 17 significant digits
//! (`{:.16e}`), enough for bit-exact f64 round trips: parsing an emitted
//! table and re-serializing it reproduces the bytes. CSV needs no quoting —
//! fields are numbers and bare status words — and uses `\n` line endings.

use crate::method::PointObservables;
use crate::sweep::SweepResult;

/// Observable column names, in emission order.
const OBSERVABLE_COLUMNS: [&str; 10] = [
    "re_s_plus",
    "im_s_plus",
    "re_s_minus",
    "im_s_minus",
    "re_diff",
    "im_diff",
    "t_x",
    "t_y",
    "phi_rot",
    "residual",
];

/// Renders a float with 17 significant digits (lossless for f64).
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Observable values in column order for one successful point.
fn observable_values(obs: &PointObservables) -> [f64; 10] {
    let s = &obs.susceptibilities;
    let t = &obs.transmission;
    let diff = s.s_plus - s.s_minus;
    [
        s.s_plus.re,
        s.s_plus.im,
        s.s_minus.re,
        s.s_minus.im,
        diff.re,
        diff.im,
        t.t_x,
        t.t_y,
        t.phi_rot,
        obs.residual,
    ]
}

/// Serializes a sweep as CSV. The header is
/// `axis1[,axis2],re_s_plus,...,residual,status`; failed rows carry `NaN`
/// observables and a machine-readable status word.
pub fn sweep_to_csv(result: &SweepResult) -> String {
    let two_axes = result.axis2.is_some();
    let mut out = String::new();
    out.push_str("axis1");
    if two_axes {
        out.push_str(",axis2");
    }
    for column in OBSERVABLE_COLUMNS {
        out.push(',');
        out.push_str(column);
    }
    out.push_str(",status\n");
    for row in &result.rows {
        out.push_str(&format_float(row.axis1));
        if let Some(axis2) = row.axis2 {
            out.push(',');
            out.push_str(&format_float(axis2));
        }
        match &row.outcome {
            Ok(obs) => {
                for value in observable_values(obs) {
                    out.push(',');
                    out.push_str(&format_float(value));
                }
            }
            Err(_) => {
                for _ in OBSERVABLE_COLUMNS {
                    out.push_str(",NaN");
                }
            }
        }
        out.push(',');
        out.push_str(row.status());
        out.push('\n');
    }
    out
}

/// Serializes a sweep as a JSON array of records mirroring the CSV columns;
/// failed rows carry `null` observables.
pub fn sweep_to_json(result: &SweepResult) -> String {
    let mut out = String::from("[\n");
    for (idx, row) in result.rows.iter().enumerate() {
        out.push_str("  {");
        push_json_field(&mut out, "axis1", &format_float(row.axis1), true);
        if let Some(axis2) = row.axis2 {
            push_json_field(&mut out, "axis2", &format_float(axis2), false);
        }
        match &row.outcome {
            Ok(obs) => {
                for (name, value) in OBSERVABLE_COLUMNS.iter().zip(observable_values(obs)) {
                    push_json_field(&mut out, name, &format_float(value), false);
                }
            }
            Err(_) => {
                for name in OBSERVABLE_COLUMNS {
                    push_json_field(&mut out, name, "null", false);
                }
            }
        }
        push_json_field(&mut out, "status", &format!("\"{}\"", row.status()), false);
        out.push('}');
        if idx + 1 < result.rows.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("]\n");
    out
}

/// Serializes one point evaluation as a JSON object.
pub fn point_to_json(obs: &PointObservables) -> String {
    let mut out = String::from("{\n");
    for (name, value) in OBSERVABLE_COLUMNS.iter().zip(observable_values(obs)) {
        out.push_str(&format!("  \"{name}\": {},\n", format_float(value)));
    }
    out.push_str(&format!(
        "  \"degenerate_rotation\": {},\n",
        obs.transmission.degenerate_rotation
    ));
    out.push_str("  \"status\": \"ok\"\n}\n");
    out
}

fn push_json_field(out: &mut String, name: &str, rendered: &str, first: bool) {
    if !first {
        out.push_str(", ");
    }
    out.push_str(&format!("\"{name}\": {rendered}"));
}
