//! CSV readers for points, prescribed values, and prescribed differences.
//!
//! All readers require a header row. Point coordinates are real; value and
//! difference entries may be complex, written either as plain numbers or as
//! `a+bi` strings. Expected headers:
//!
//! * points: `x_1,...,x_d`
//! * values: `x_1,...,x_d,v_1,...,v_m`
//! * differences: `x_1,...,x_d,y_1,...,y_d,d_1,...,d_m`

use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::base::{OutVector, Point};
use crate::complexfmt::parse_complex;
use crate::error::{Error, Result};
use crate::relative::DifferenceConstraint;
use crate::rkhs::ValueConstraint;

fn csv_reader<R: Read>(source: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(source)
}

/// Splits a header into contiguous `prefix_1..prefix_k` groups in order,
/// returning the group sizes keyed by the order given in `prefixes`.
fn header_groups(headers: &csv::StringRecord, prefixes: &[&str]) -> Result<Vec<usize>> {
    let mut sizes = vec![0usize; prefixes.len()];
    let mut group = 0usize;
    for field in headers.iter() {
        let accepted = loop {
            if group >= prefixes.len() {
                break false;
            }
            let expected = format!("{}_{}", prefixes[group], sizes[group] + 1);
            if field == expected {
                sizes[group] += 1;
                break true;
            }
            if sizes[group] > 0 {
                // current group closed; try the next prefix on this field
                group += 1;
                continue;
            }
            break false;
        };
        if !accepted {
            return Err(Error::Csv(format!(
                "unexpected header column {field:?}; expected columns like {}",
                prefixes
                    .iter()
                    .map(|p| format!("{p}_1,{p}_2,..."))
                    .collect::<Vec<_>>()
                    .join(" then ")
            )));
        }
    }
    if sizes.contains(&0) {
        return Err(Error::Csv(format!(
            "header must contain at least one column for each of {prefixes:?}"
        )));
    }
    Ok(sizes)
}

fn parse_real(field: &str, line: usize) -> Result<f64> {
    field
        .parse::<f64>()
        .map_err(|_| Error::Csv(format!("line {line}: {field:?} is not a real number")))
}

fn record_slice_point(record: &csv::StringRecord, start: usize, d: usize, line: usize) -> Result<Point> {
    let coords = (start..start + d)
        .map(|i| parse_real(&record[i], line))
        .collect::<Result<Vec<_>>>()?;
    Point::new(coords)
}

fn record_slice_vector(
    record: &csv::StringRecord,
    start: usize,
    m: usize,
    line: usize,
) -> Result<OutVector> {
    let entries = (start..start + m)
        .map(|i| {
            parse_complex(&record[i])
                .map_err(|e| Error::Csv(format!("line {line}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    OutVector::new(entries)
}

fn check_width(record: &csv::StringRecord, width: usize, line: usize) -> Result<()> {
    if record.len() != width {
        return Err(Error::Csv(format!(
            "line {line}: expected {width} fields, got {}",
            record.len()
        )));
    }
    Ok(())
}

/// Reads bare points with header `x_1..x_d`.
pub fn read_points<R: Read>(source: R) -> Result<Vec<Point>> {
    let mut reader = csv_reader(source);
    let sizes = header_groups(reader.headers().map_err(csv_err)?, &["x"])?;
    let d = sizes[0];
    let mut points = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx + 2;
        let record = record.map_err(csv_err)?;
        check_width(&record, d, line)?;
        points.push(record_slice_point(&record, 0, d, line)?);
    }
    if points.is_empty() {
        return Err(Error::EmptyInput("points file"));
    }
    Ok(points)
}

/// Reads value constraints with header `x_1..x_d,v_1..v_m`.
pub fn read_value_constraints<R: Read>(source: R) -> Result<Vec<ValueConstraint>> {
    let mut reader = csv_reader(source);
    let sizes = header_groups(reader.headers().map_err(csv_err)?, &["x", "v"])?;
    let (d, m) = (sizes[0], sizes[1]);
    let mut constraints = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx + 2;
        let record = record.map_err(csv_err)?;
        check_width(&record, d + m, line)?;
        constraints.push(ValueConstraint::new(
            record_slice_point(&record, 0, d, line)?,
            record_slice_vector(&record, d, m, line)?,
        ));
    }
    if constraints.is_empty() {
        return Err(Error::EmptyInput("values file"));
    }
    Ok(constraints)
}

/// Reads difference constraints with header `x_1..x_d,y_1..y_d,d_1..d_m`.
pub fn read_difference_constraints<R: Read>(source: R) -> Result<Vec<DifferenceConstraint>> {
    let mut reader = csv_reader(source);
    let sizes = header_groups(reader.headers().map_err(csv_err)?, &["x", "y", "d"])?;
    let (dx, dy, m) = (sizes[0], sizes[1], sizes[2]);
    if dx != dy {
        return Err(Error::Csv(format!(
            "x and y blocks must have equal width, got {dx} and {dy}"
        )));
    }
    let mut constraints = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx + 2;
        let record = record.map_err(csv_err)?;
        check_width(&record, dx + dy + m, line)?;
        constraints.push(DifferenceConstraint::new(
            record_slice_point(&record, 0, dx, line)?,
            record_slice_point(&record, dx, dy, line)?,
            record_slice_vector(&record, dx + dy, m, line)?,
        ));
    }
    if constraints.is_empty() {
        return Err(Error::EmptyInput("differences file"));
    }
    Ok(constraints)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Csv(e.to_string())
}

/// Path-based wrapper around [`read_points`].
pub fn read_points_file(path: &Path) -> Result<Vec<Point>> {
    read_points(File::open(path)?)
}

/// Path-based wrapper around [`read_value_constraints`].
pub fn read_value_constraints_file(path: &Path) -> Result<Vec<ValueConstraint>> {
    read_value_constraints(File::open(path)?)
}

/// Path-based wrapper around [`read_difference_constraints`].
pub fn read_difference_constraints_file(path: &Path) -> Result<Vec<DifferenceConstraint>> {
    read_difference_constraints(File::open(path)?)
}
