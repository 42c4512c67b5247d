//! Plain-text tables: CSV with one leading `#`-prefixed JSON metadata line,
//! or a single JSON document.
//!
//! Numbers are written in the shortest form that parses back to the same
//! `f64`, so CSV files round-trip bit for bit.

use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::limits::{CoarseSeries, SourceKind, StudyRow};
use crate::model::{EnergySlice, PotentialModel, Region};
use crate::qhj::{ActionField, CauchySeed, MomentumSeries, Provenance};
use crate::spectrum::{EigenResult, Method};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Parse(format!("unknown format '{s}' (csv or json)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub meta: Map<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Shortest round-trip text for a float.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:?}")
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    match s {
        "nan" => Ok(f64::NAN),
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => s
            .parse()
            .map_err(|_| Error::Parse(format!("not a number: '{s}'"))),
    }
}

impl Table {
    pub fn new<S: Into<String>>(
        meta: Map<String, Value>,
        columns: impl IntoIterator<Item = S>,
    ) -> Self {
        Self {
            meta,
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_numbers(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|v| fmt_f64(*v)).collect());
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    /// Table from equal-length numeric columns.
    pub fn from_columns(meta: Map<String, Value>, columns: &[(&str, &[f64])]) -> Result<Self> {
        let len = columns.first().map_or(0, |c| c.1.len());
        if columns.iter().any(|c| c.1.len() != len) {
            return Err(Error::Domain("columns differ in length".into()));
        }
        let mut t = Table::new(meta, columns.iter().map(|c| c.0));
        for i in 0..len {
            t.push_numbers(&columns.iter().map(|c| c.1[i]).collect::<Vec<_>>());
        }
        Ok(t)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::Parse(format!("missing column '{name}'")))
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.columns.iter().any(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let i = self.index(name)?;
        self.rows.iter().map(|r| parse_f64(&r[i])).collect()
    }

    pub fn text_column(&self, name: &str) -> Result<Vec<String>> {
        let i = self.index(name)?;
        Ok(self.rows.iter().map(|r| r[i].clone()).collect())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "#{}", Value::Object(self.meta.clone()))?;
        writeln!(w, "{}", self.columns.join(","))?;
        for r in &self.rows {
            writeln!(w, "{}", r.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("utf-8 table")
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let first = lines
            .next()
            .ok_or_else(|| Error::Parse("empty file".into()))??;
        let meta = first
            .strip_prefix('#')
            .ok_or_else(|| Error::Parse("first line must be '#' followed by JSON".into()))?;
        let meta = match serde_json::from_str(meta).map_err(|e| Error::Parse(e.to_string()))? {
            Value::Object(m) => m,
            _ => return Err(Error::Parse("metadata must be a JSON object".into())),
        };
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing header line".into()))??;
        let columns: Vec<String> = header.split(',').map(str::to_owned).collect();
        let mut rows = Vec::new();
        for line in lines {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let row: Vec<String> = line.split(',').map(str::to_owned).collect();
            if row.len() != columns.len() {
                return Err(Error::Parse(format!(
                    "row has {} fields, header has {}",
                    row.len(),
                    columns.len()
                )));
            }
            rows.push(row);
        }
        Ok(Self {
            meta,
            columns,
            rows,
        })
    }

    pub fn from_csv_str(s: &str) -> Result<Self> {
        Self::read_csv(s.as_bytes())
    }

    /// `{"meta": ..., "columns": ..., "rows": [[...]]}` with numeric cells
    /// as JSON numbers where possible.
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                Value::Array(
                    r.iter()
                        .map(|c| match c.parse::<f64>() {
                            Ok(v) if v.is_finite() => json!(v),
                            _ => Value::String(c.clone()),
                        })
                        .collect(),
                )
            })
            .collect();
        json!({ "meta": self.meta, "columns": self.columns, "rows": rows })
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv_string(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
                s.push('\n');
                s
            }
        }
    }

    pub fn save(&self, path: &Path, format: Format) -> Result<()> {
        std::fs::write(path, self.render(format))?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_csv(std::io::BufReader::new(f))
    }

    fn meta_value<T: for<'de> Deserialize<'de>>(&self, key: &str) -> Result<T> {
        let v = self
            .meta
            .get(key)
            .ok_or_else(|| Error::Parse(format!("metadata lacks '{key}'")))?;
        serde_json::from_value(v.clone())
            .map_err(|e| Error::Parse(format!("metadata '{key}': {e}")))
    }
}

fn meta(pairs: Vec<(&str, Value)>) -> Map<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_owned(), v)).collect()
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

/// Metadata shared by series tied to one energy slice.
pub fn slice_meta(kind: &str, slice: &EnergySlice) -> Map<String, Value> {
    meta(vec![
        ("kind", json!(kind)),
        ("model", to_value(&slice.model)),
        ("E", json!(slice.energy)),
        ("hbar", json!(slice.hbar())),
        ("x1", json!(slice.x1)),
        ("x2", json!(slice.x2)),
    ])
}

fn slice_from_meta(t: &Table) -> Result<EnergySlice> {
    Ok(EnergySlice {
        energy: t.meta_value("E")?,
        x1: t.meta_value("x1")?,
        x2: t.meta_value("x2")?,
        model: t.meta_value::<PotentialModel>("model")?,
    })
}

/// Columns `x, X, X1, X2, Y, Y1` and `XE` when present.
pub fn action_table(f: &ActionField) -> Table {
    let mut m = slice_meta("action", &f.slice);
    m.insert("region".into(), to_value(&f.region));
    m.insert("seed".into(), to_value(&f.seed));
    let mut cols: Vec<(&str, &[f64])> = vec![
        ("x", &f.grid),
        ("X", &f.real),
        ("X1", &f.real_d1),
        ("X2", &f.real_d2),
        ("Y", &f.imag),
        ("Y1", &f.imag_d1),
    ];
    if let Some(xe) = &f.energy_derivative {
        cols.push(("XE", xe));
    }
    Table::from_columns(m, &cols).expect("field columns share the grid")
}

pub fn action_from_table(t: &Table) -> Result<ActionField> {
    Ok(ActionField {
        slice: slice_from_meta(t)?,
        region: t.meta_value::<Region>("region")?,
        grid: t.column("x")?,
        real: t.column("X")?,
        real_d1: t.column("X1")?,
        real_d2: t.column("X2")?,
        imag: t.column("Y")?,
        imag_d1: t.column("Y1")?,
        energy_derivative: if t.has_column("XE") {
            Some(t.column("XE")?)
        } else {
            None
        },
        seed: t.meta_value::<Option<CauchySeed>>("seed")?,
    })
}

/// Columns `x, re, im`; provenance in the metadata.
pub fn momentum_table(slice: &EnergySlice, p: &MomentumSeries) -> Table {
    let mut m = slice_meta("momentum", slice);
    m.insert("provenance".into(), to_value(&p.provenance));
    Table::from_columns(m, &[("x", &p.grid), ("re", &p.re), ("im", &p.im)]).expect("equal lengths")
}

pub fn momentum_from_table(t: &Table) -> Result<MomentumSeries> {
    Ok(MomentumSeries {
        grid: t.column("x")?,
        re: t.column("re")?,
        im: t.column("im")?,
        provenance: t.meta_value::<Provenance>("provenance")?,
    })
}

/// Columns `bin_center, bin_mean` and `classical` when a reference is given.
pub fn coarse_table(slice: &EnergySlice, c: &CoarseSeries, reference: Option<&[f64]>) -> Table {
    let mut m = slice_meta("coarse", slice);
    m.insert("bins".into(), json!(c.bins));
    m.insert("source_kind".into(), to_value(&c.source_kind));
    m.insert("edges".into(), to_value(&c.edges));
    let mut cols: Vec<(&str, &[f64])> =
        vec![("bin_center", &c.bin_centers), ("bin_mean", &c.bin_means)];
    if let Some(r) = reference {
        cols.push(("classical", r));
    }
    Table::from_columns(m, &cols).expect("one value per bin")
}

pub fn coarse_from_table(t: &Table) -> Result<CoarseSeries> {
    let centers = t.column("bin_center")?;
    Ok(CoarseSeries {
        bins: centers.len(),
        bin_centers: centers,
        bin_means: t.column("bin_mean")?,
        source_kind: t.meta_value::<SourceKind>("source_kind")?,
        edges: t.meta_value("edges")?,
    })
}

/// Columns `n, E, mismatch, method, iterations`.
pub fn eigen_table(model: &PotentialModel, rows: &[EigenResult]) -> Table {
    let m = meta(vec![("kind", json!("eigen")), ("model", to_value(model))]);
    let mut t = Table::new(m, ["n", "E", "mismatch", "method", "iterations"]);
    for r in rows {
        t.push(vec![
            r.n.to_string(),
            fmt_f64(r.energy),
            fmt_f64(r.mismatch),
            r.method.to_string(),
            r.iterations.to_string(),
        ]);
    }
    t
}

pub fn eigen_from_table(t: &Table) -> Result<Vec<EigenResult>> {
    let n = t.column("n")?;
    let e = t.column("E")?;
    let mm = t.column("mismatch")?;
    let it = t.column("iterations")?;
    let method = t.text_column("method")?;
    (0..t.len())
        .map(|i| {
            Ok(EigenResult {
                n: n[i] as usize,
                energy: e[i],
                mismatch: mm[i],
                iterations: it[i] as usize,
                method: match method[i].as_str() {
                    "matching" => Method::Matching,
                    "shooting-oracle" => Method::ShootingOracle,
                    other => return Err(Error::Parse(format!("unknown method '{other}'"))),
                },
            })
        })
        .collect()
}

/// One row per study level; failed levels carry their message in `error`.
pub fn study_table(model: &PotentialModel, rows: &[StudyRow]) -> Table {
    let m = meta(vec![("kind", json!("study")), ("model", to_value(model))]);
    let mut t = Table::new(
        m,
        [
            "n",
            "E",
            "bins",
            "momentum_rel_rms",
            "momentum_im_rel_rms",
            "action_rel_rms",
            "energy_derivative_rel_rms",
            "ripples",
            "action_max_dev",
            "error",
        ],
    );
    for r in rows {
        t.push(vec![
            r.n.to_string(),
            fmt_f64(r.energy),
            r.bins.to_string(),
            fmt_f64(r.momentum_rel_rms),
            fmt_f64(r.momentum_im_rel_rms),
            fmt_f64(r.action_rel_rms),
            fmt_f64(r.energy_derivative_rel_rms),
            r.ripples.to_string(),
            fmt_f64(r.action_max_dev),
            r.error.as_deref().unwrap_or("").replace(',', ";"),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_text_round_trips() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, 0.0, -0.0] {
            assert_eq!(parse_f64(&fmt_f64(v)).unwrap().to_bits(), v.to_bits());
        }
        assert!(parse_f64(&fmt_f64(f64::NAN)).unwrap().is_nan());
    }

    #[test]
    fn csv_round_trip() {
        let mut t = Table::new(meta(vec![("a", json!(1))]), ["x", "y"]);
        t.push_numbers(&[0.1, 0.2]);
        t.push_numbers(&[1e-17, -3.0]);
        let s = t.to_csv_string();
        assert!(s.starts_with("#{\"a\":1}\nx,y\n"));
        assert_eq!(Table::from_csv_str(&s).unwrap(), t);
    }

    #[test]
    fn rejects_missing_metadata() {
        assert!(Table::from_csv_str("x,y\n1,2\n").is_err());
        assert!(Table::from_csv_str("#{}\nx,y\n1\n").is_err());
    }
}
