//! Point-set CSV files.
//!
//! Header `x1,...,xN,weight`, then one row per component. Values are written
//! with 17 significant digits so a write/read round trip is exact. Weights
//! must sum to one within [`crate::mixture::WEIGHT_SUM_TOLERANCE`].

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::metrics::marginal_histogram;
use crate::mixture::DiracMixture;

pub fn read_point_set(path: impl AsRef<Path>) -> Result<DiracMixture> {
    let path = path.as_ref();
    let file = File::open(path)?;
    parse_point_set(file, path)
}

/// Parses CSV from any reader; `path` is only used in error messages.
pub fn parse_point_set(reader: impl Read, path: &Path) -> Result<DiracMixture> {
    let parse_err = |line: u64, message: String| Error::Parse {
        path: PathBuf::from(path),
        line,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let header = rdr
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    let fields: Vec<&str> = header.iter().collect();
    if fields.len() < 2 || fields.last() != Some(&"weight") {
        return Err(parse_err(
            1,
            "header must be `x1,...,xN,weight` with N >= 1".to_string(),
        ));
    }
    let dim = fields.len() - 1;
    for (k, name) in fields[..dim].iter().enumerate() {
        if *name != format!("x{}", k + 1) {
            return Err(parse_err(
                1,
                format!("expected column `x{}`, found `{name}`", k + 1),
            ));
        }
    }

    let mut locations = Vec::new();
    let mut weights = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        if record.len() != dim + 1 {
            return Err(parse_err(
                line,
                format!("expected {} fields, found {}", dim + 1, record.len()),
            ));
        }
        for (k, field) in record.iter().enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| parse_err(line, format!("invalid number `{field}`")))?;
            if !v.is_finite() {
                return Err(parse_err(line, format!("non-finite value `{field}`")));
            }
            if k < dim {
                locations.push(v);
            } else {
                if v <= 0.0 {
                    return Err(parse_err(line, format!("non-positive weight {v}")));
                }
                weights.push(v);
            }
        }
    }
    DiracMixture::new_normalized(dim, locations, weights)
}

pub fn write_point_set(m: &DiracMixture, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    format_point_set(m, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn format_point_set(m: &DiracMixture, out: &mut impl Write) -> Result<()> {
    let header: Vec<String> = (1..=m.dim())
        .map(|k| format!("x{k}"))
        .chain(std::iter::once("weight".to_string()))
        .collect();
    writeln!(out, "{}", header.join(","))?;
    for (p, w) in m.points().zip(m.weights()) {
        let mut line = String::new();
        for v in p {
            line.push_str(&format!("{v:.16e},"));
        }
        line.push_str(&format!("{w:.16e}"));
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Marginal histograms of the original and each named set as CSV with
/// columns `set,axis,bin,lower,upper,mass`. Axes are numbered from 1. A set
/// without in-range mass on an axis gets no rows for that axis.
pub fn format_histogram_csv(
    original: &DiracMixture,
    sets: &[(String, DiracMixture)],
    bins: usize,
    range: (f64, f64),
    out: impl Write,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["set", "axis", "bin", "lower", "upper", "mass"])
        .map_err(csv_error)?;
    let all = std::iter::once(("original", original)).chain(sets.iter().map(|(n, m)| (n.as_str(), m)));
    for (name, m) in all {
        for axis in 0..m.dim() {
            let h = match marginal_histogram(m, axis, bins, range) {
                Ok(h) => h,
                Err(Error::EmptyHistogram) => continue,
                Err(e) => return Err(e),
            };
            for (i, mass) in h.masses.iter().enumerate() {
                w.write_record([
                    name.to_string(),
                    (axis + 1).to_string(),
                    i.to_string(),
                    format!("{:.16e}", h.edges[i]),
                    format!("{:.16e}", h.edges[i + 1]),
                    format!("{mass:.16e}"),
                ])
                .map_err(csv_error)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_histogram_csv(
    original: &DiracMixture,
    sets: &[(String, DiracMixture)],
    bins: usize,
    range: (f64, f64),
    path: impl AsRef<Path>,
) -> Result<()> {
    let file = BufWriter::new(File::create(path)?);
    format_histogram_csv(original, sets, bins, range, file)
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::invalid(format!("{other:?}")),
    }
}
