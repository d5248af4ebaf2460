//! Canonical JSON for maps and states, CSV for sweeps.
//!
//! Every float is written as `{:.16e}` (17 significant digits), so parsing a
//! canonical file and writing it back reproduces it byte for byte.

use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use serde_json::{Map, Value};

use crate::casestudy::SweepRow;
use crate::channels::{ChoiMatrix, CpVerdict, DensityMatrix, KrausMap};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

pub const SWEEP_HEADER: &str = "t,b0,b1,b2,b3,trace_defect,choi_min_eig,offdiag_B_max";

/// A Kraus map with an optional label, as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct MapFile {
    pub label: Option<String>,
    pub map: KrausMap,
}

fn float(x: f64, field: &str) -> Result<String> {
    if x.is_finite() {
        Ok(format!("{x:.16e}"))
    } else {
        Err(Error::format(field, format!("non-finite value {x}")))
    }
}

fn write_matrix(out: &mut String, m: &ComplexMatrix, indent: &str, field: &str) -> Result<()> {
    let d = m.dim();
    out.push_str("[\n");
    for i in 0..d {
        out.push_str(indent);
        out.push_str("  [");
        for j in 0..d {
            let z = m[(i, j)];
            let at = format!("{field}[{i}][{j}]");
            write!(out, "[{}, {}]", float(z.re, &at)?, float(z.im, &at)?).unwrap();
            if j + 1 < d {
                out.push_str(", ");
            }
        }
        out.push(']');
        if i + 1 < d {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str(indent);
    out.push(']');
    Ok(())
}

impl MapFile {
    pub fn new(map: KrausMap, label: Option<String>) -> Self {
        Self { label, map }
    }

    pub fn to_canonical_json(&self) -> Result<String> {
        let mut out = String::new();
        writeln!(out, "{{\n  \"dim\": {},", self.map.dim()).unwrap();
        if let Some(label) = &self.label {
            writeln!(out, "  \"label\": {},", Value::String(label.clone())).unwrap();
        }
        out.push_str("  \"kraus\": [\n");
        let n = self.map.len();
        for (k, op) in self.map.operators().iter().enumerate() {
            out.push_str("    ");
            write_matrix(&mut out, op, "    ", &format!("kraus[{k}]"))?;
            out.push_str(if k + 1 < n { ",\n" } else { "\n" });
        }
        out.push_str("  ]\n}\n");
        Ok(out)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let root = parse_object(text, &["dim", "label", "kraus"])?;
        let dim = parse_dim(&root)?;
        let label = match root.get("label") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => return Err(Error::format("label", "expected a string")),
        };
        let kraus = root
            .get("kraus")
            .ok_or_else(|| Error::format("kraus", "missing field"))?
            .as_array()
            .ok_or_else(|| Error::format("kraus", "expected an array of matrices"))?;
        if kraus.is_empty() {
            return Err(Error::format("kraus", "at least one operator is required"));
        }
        let ops = kraus
            .iter()
            .enumerate()
            .map(|(k, v)| parse_matrix(v, dim, &format!("kraus[{k}]")))
            .collect::<Result<Vec<_>>>()?;
        let map = KrausMap::new(ops).map_err(|e| Error::format("kraus", e.to_string()))?;
        Ok(Self { label, map })
    }
}

fn parse_object(text: &str, allowed: &[&str]) -> Result<Map<String, Value>> {
    let value: Value = serde_json::from_str(text).map_err(|e| {
        Error::format(
            format!("line {} column {}", e.line(), e.column()),
            format!("invalid JSON: {e}"),
        )
    })?;
    let Value::Object(root) = value else {
        return Err(Error::format("<root>", "expected a JSON object"));
    };
    if let Some(key) = root.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(Error::format(key.clone(), "unknown field"));
    }
    Ok(root)
}

fn parse_dim(root: &Map<String, Value>) -> Result<usize> {
    let v = root
        .get("dim")
        .ok_or_else(|| Error::format("dim", "missing field"))?;
    match v.as_u64() {
        Some(d) if d > 0 => Ok(d as usize),
        _ => Err(Error::format(
            "dim",
            format!("expected a positive integer, got {v}"),
        )),
    }
}

fn parse_matrix(v: &Value, dim: usize, field: &str) -> Result<ComplexMatrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::format(field, "expected an array of rows"))?;
    if rows.len() != dim {
        return Err(Error::format(
            field,
            format!("expected {dim} rows, found {}", rows.len()),
        ));
    }
    let mut entries = Vec::with_capacity(dim * dim);
    for (i, row) in rows.iter().enumerate() {
        let at = format!("{field}[{i}]");
        let row = row
            .as_array()
            .ok_or_else(|| Error::format(&at, "expected an array of [re, im] pairs"))?;
        if row.len() != dim {
            return Err(Error::format(
                &at,
                format!("expected {dim} entries, found {}", row.len()),
            ));
        }
        for (j, z) in row.iter().enumerate() {
            entries.push(parse_complex(z, &format!("{at}[{j}]"))?);
        }
    }
    Ok(ComplexMatrix::new(dim, entries).expect("square by construction"))
}

fn parse_complex(v: &Value, field: &str) -> Result<C64> {
    let pair = v.as_array().filter(|p| p.len() == 2);
    let parts = pair.and_then(|p| Some((p[0].as_f64()?, p[1].as_f64()?)));
    match parts {
        Some((re, im)) => Ok(C64::new(re, im)),
        None => Err(Error::format(field, format!("expected [re, im], got {v}"))),
    }
}

pub fn parse_density(text: &str) -> Result<DensityMatrix> {
    let root = parse_object(text, &["dim", "rho"])?;
    let dim = parse_dim(&root)?;
    let rho = root
        .get("rho")
        .ok_or_else(|| Error::format("rho", "missing field"))?;
    let m = parse_matrix(rho, dim, "rho")?;
    DensityMatrix::new(m).map_err(|e| Error::format("rho", e.to_string()))
}

pub fn density_to_json(rho: &DensityMatrix) -> Result<String> {
    let mut out = format!("{{\n  \"dim\": {},\n  \"rho\": ", rho.dim());
    write_matrix(&mut out, rho.matrix(), "  ", "rho")?;
    out.push_str("\n}\n");
    Ok(out)
}

/// Choi matrix together with its CP verdict.
pub fn choi_to_json(choi: &ChoiMatrix, verdict: &CpVerdict) -> Result<String> {
    let mut out = format!(
        "{{\n  \"dim\": {},\n  \"min_eigenvalue\": {},\n  \"is_cp\": {},\n  \"choi\": ",
        choi.dim(),
        float(verdict.min_eigenvalue, "min_eigenvalue")?,
        verdict.is_cp
    );
    write_matrix(&mut out, choi.matrix(), "  ", "choi")?;
    out.push_str("\n}\n");
    Ok(out)
}

pub fn sweep_csv(rows: &[SweepRow]) -> Result<String> {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for (n, r) in rows.iter().enumerate() {
        let fields = [
            r.t,
            r.b[0],
            r.b[1],
            r.b[2],
            r.b[3],
            r.trace_defect,
            r.choi_min_eig,
            r.offdiag_b_max,
        ];
        let cells = fields
            .iter()
            .map(|&x| float(x, &format!("row {n}")))
            .collect::<Result<Vec<_>>>()?;
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(SWEEP_HEADER) {
        return Err(Error::format(
            "header",
            format!("expected `{SWEEP_HEADER}`"),
        ));
    }
    lines
        .enumerate()
        .map(|(n, line)| {
            let at = format!("row {n}");
            let v = line
                .split(',')
                .map(|c| {
                    c.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::format(&at, e.to_string()))
                })
                .collect::<Result<Vec<_>>>()?;
            if v.len() != 8 {
                return Err(Error::format(
                    &at,
                    format!("expected 8 columns, found {}", v.len()),
                ));
            }
            Ok(SweepRow {
                t: v[0],
                b: [v[1], v[2], v[3], v[4]],
                trace_defect: v[5],
                choi_min_eig: v[6],
                offdiag_b_max: v[7],
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;

    fn sample() -> MapFile {
        let ops = vec![
            pauli::identity().scale_real(0.8f64.sqrt()),
            pauli::y().scale_real(0.2f64.sqrt()),
        ];
        MapFile::new(
            KrausMap::trace_preserving(ops).unwrap(),
            Some("dephase \"y\"".into()),
        )
    }

    #[test]
    fn canonical_round_trip() {
        let text = sample().to_canonical_json().unwrap();
        let back = MapFile::parse(&text).unwrap();
        assert_eq!(back.to_canonical_json().unwrap(), text);
        assert_eq!(back.label.as_deref(), Some("dephase \"y\""));
        assert!(text.contains("[0.0000000000000000e0, -4.4721359549995793e-1]"));
    }

    #[test]
    fn errors_name_the_field() {
        let cases = [
            (r#"{"dim": 2}"#, "kraus"),
            (r#"{"dim": 0, "kraus": []}"#, "dim"),
            (r#"{"dim": 2, "kraus": [], "extra": 1}"#, "extra"),
            (r#"{"dim": 1, "kraus": [[[[1, 0]]]], "label": 3}"#, "label"),
            (
                r#"{"dim": 2, "kraus": [[[[1, 0], [0, 0]], [[0, 0]]]]}"#,
                "kraus[0][1]",
            ),
            (
                r#"{"dim": 1, "kraus": [[[[1, 0]]], [[[1]]]]}"#,
                "kraus[1][0][0]",
            ),
            (r#"{"dim": 1, "kraus": [[[["a", 0]]]]}"#, "kraus[0][0][0]"),
            ("{\"dim\": 1,\n \"kraus\": [}", "line 2"),
        ];
        for (text, field) in cases {
            match MapFile::parse(text) {
                Err(Error::Format { field: f, .. }) => {
                    assert!(f.starts_with(field), "{f} vs {field}")
                }
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn density_round_trip_and_validation() {
        let rho = DensityMatrix::maximally_mixed(3);
        let text = density_to_json(&rho).unwrap();
        assert_eq!(parse_density(&text).unwrap(), rho);
        let bad = r#"{"dim": 2, "rho": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]}"#;
        assert!(matches!(parse_density(bad), Err(Error::Format { field, .. }) if field == "rho"));
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![SweepRow {
            t: 0.1,
            b: [1.5, 0.2, 0.2, 0.1],
            trace_defect: 1e-17,
            choi_min_eig: -0.0,
            offdiag_b_max: 3e-18,
        }];
        let text = sweep_csv(&rows).unwrap();
        assert!(text.starts_with(SWEEP_HEADER));
        assert_eq!(parse_sweep_csv(&text).unwrap(), rows);
        let nan = SweepRow {
            t: f64::NAN,
            ..rows[0]
        };
        assert!(sweep_csv(&[nan]).is_err());
    }
}
