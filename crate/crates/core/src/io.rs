//! Design files: a CSV with header `x1,...,xm,o1,...,om` and one run per line,
//! plus a JSON sidecar `<stem>.meta.json` holding provenance and metrics.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::design::{evaluate, Bounds, DesignMeta, MetricsReport, QSDesign, QuantDesign, Route, SeqDesign};
use crate::error::{Error, Result};

/// Machine-readable form of a [`MetricsReport`]. `r_ave` is kept exactly as
/// numerator and denominator when it is rational.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub n: usize,
    pub m: usize,
    pub d1: u64,
    pub d2sq: u64,
    pub dh: u64,
    pub r_ave: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_ave_num: Option<i128>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_ave_den: Option<i128>,
    /// Common adjacent-pair count, when balanced.
    pub pair_count: Option<u64>,
    pub bounds: Bounds,
    pub coupled_bounds: Option<(u64, u64)>,
    pub d1_ratio: f64,
    pub d2_ratio: f64,
    pub is_lhd: bool,
    pub is_pair_balanced: bool,
    pub is_marginally_coupled: bool,
}

impl From<&MetricsReport> for MetricsSummary {
    fn from(r: &MetricsReport) -> Self {
        Self {
            n: r.n,
            m: r.m,
            d1: r.d1,
            d2sq: r.d2sq,
            dh: r.dh,
            r_ave: r.r_ave.value,
            r_ave_num: r.r_ave.exact.map(|q| *q.numer()),
            r_ave_den: r.r_ave.exact.map(|q| *q.denom()),
            pair_count: r.pair_counts.balanced_value(),
            bounds: r.bounds,
            coupled_bounds: r.coupled_bounds,
            d1_ratio: r.d1_ratio(),
            d2_ratio: r.d2_ratio(),
            is_lhd: r.is_lhd,
            is_pair_balanced: r.is_pair_balanced,
            is_marginally_coupled: r.is_marginally_coupled,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub n: usize,
    pub m: usize,
    #[serde(flatten)]
    pub meta: DesignMeta,
    pub metrics: MetricsSummary,
}

pub fn sidecar_path(design: &Path) -> PathBuf {
    design.with_extension("meta.json")
}

pub fn write_csv<W: Write>(w: W, d: &QSDesign) -> Result<()> {
    let m = d.m();
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    let header: Vec<String> = (1..=m)
        .map(|j| format!("x{j}"))
        .chain((1..=m).map(|j| format!("o{j}")))
        .collect();
    out.write_record(&header).map_err(csv_err)?;
    for i in 0..d.n() {
        let rec: Vec<String> = d
            .x()
            .row(i)
            .iter()
            .chain(d.o().row(i))
            .map(ToString::to_string)
            .collect();
        out.write_record(&rec).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Parses the CSV body; `row` in errors is the 1-based line number.
pub fn read_csv<R: Read>(r: R) -> Result<(QuantDesign, SeqDesign)> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(r);
    let header = rdr.headers().map_err(|e| parse_err(1, 1, e.to_string()))?.clone();
    let width = header.len();
    if width == 0 || width % 2 != 0 {
        return Err(parse_err(1, width.max(1), format!("expected an even number of columns, got {width}")));
    }
    let m = width / 2;
    for (j, name) in header.iter().enumerate() {
        let expected = if j < m { format!("x{}", j + 1) } else { format!("o{}", j - m + 1) };
        if name.trim() != expected {
            return Err(parse_err(1, j + 1, format!("expected header {expected:?}, found {name:?}")));
        }
    }
    let mut x = Vec::new();
    let mut o = Vec::new();
    let mut n = 0;
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| parse_err(line, 1, e.to_string()))?;
        if rec.len() != width {
            return Err(parse_err(line, rec.len().min(width) + 1, format!("expected {width} fields, got {}", rec.len())));
        }
        for (j, field) in rec.iter().enumerate() {
            let v: u32 = field
                .trim()
                .parse()
                .map_err(|e| parse_err(line, j + 1, format!("{field:?} is not a positive integer: {e}")))?;
            if j < m { x.push(v) } else { o.push(v) }
        }
        n += 1;
    }
    if n == 0 {
        return Err(parse_err(2, 1, "no runs".into()));
    }
    Ok((QuantDesign::new(n, m, x)?, SeqDesign::new(n, m, o)?))
}

fn parse_err(row: usize, column: usize, message: String) -> Error {
    Error::Parse { row, column, message }
}

pub fn sidecar_for(d: &QSDesign) -> Result<Sidecar> {
    let report = evaluate(d)?;
    Ok(Sidecar {
        n: d.n(),
        m: d.m(),
        meta: d.meta.clone(),
        metrics: MetricsSummary::from(&report),
    })
}

/// Writes the CSV and its sidecar, returning the sidecar.
pub fn write_design(path: &Path, d: &QSDesign) -> Result<Sidecar> {
    let mut buf = Vec::new();
    write_csv(&mut buf, d)?;
    fs::write(path, buf)?;
    let side = sidecar_for(d)?;
    let mut json = serde_json::to_string_pretty(&side).map_err(|e| Error::Io(e.to_string()))?;
    json.push('\n');
    fs::write(sidecar_path(path), json)?;
    Ok(side)
}

/// Reads a design; provenance comes from the sidecar when one exists.
pub fn read_design(path: &Path) -> Result<QSDesign> {
    let (x, o) = read_csv(fs::File::open(path)?)?;
    let side = sidecar_path(path);
    let meta = if side.exists() {
        let text = fs::read_to_string(&side)?;
        let s: Sidecar = serde_json::from_str(&text).map_err(|e| Error::Parse {
            row: e.line(),
            column: e.column(),
            message: format!("{}: {e}", side.display()),
        })?;
        s.meta
    } else {
        DesignMeta::new(Route::External)
    };
    QSDesign::new(x, o, meta)
}
