use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use super::IoError;
use crate::rule_core::{AttributeKind, AttributeSignature, Case, Dataset, Value};

/// Column holding case ids. Optional; without it cases are numbered from 1.
pub const ID_COLUMN: &str = "id";

/// Reads a comma-separated case table with a header row. Every signature
/// attribute needs a column; column order is free.
pub fn load_cases_csv(path: impl AsRef<Path>, signature: &AttributeSignature) -> Result<Dataset, IoError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| IoError::io(path, e))?;
    read_cases_csv(file, signature)
}

pub fn read_cases_csv(reader: impl Read, signature: &AttributeSignature) -> Result<Dataset, IoError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| csv_error(&e))?.clone();
    if headers.is_empty() || headers.iter().all(str::is_empty) {
        return Err(IoError::EmptyFile);
    }
    let mut column_of: HashMap<&str, usize> = HashMap::new();
    for (i, h) in headers.iter().enumerate() {
        if column_of.insert(h, i).is_some() {
            return Err(IoError::Csv {
                row: 1,
                column: h.to_string(),
                message: "duplicate column".into(),
            });
        }
        if h != ID_COLUMN && signature.index_of(h).is_none() {
            return Err(IoError::Csv {
                row: 1,
                column: h.to_string(),
                message: "column not in the signature".into(),
            });
        }
    }
    let columns = signature
        .attributes()
        .iter()
        .map(|a| {
            column_of
                .get(a.name.as_str())
                .copied()
                .ok_or_else(|| IoError::MissingColumn(a.name.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let id_column = column_of.get(ID_COLUMN).copied();

    let mut cases = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (i, record) in rdr.records().enumerate() {
        // header is row 1
        let row = i + 2;
        let record = record.map_err(|e| csv_error(&e))?;
        let id = match id_column {
            Some(c) => record.get(c).unwrap_or_default().to_string(),
            None => (i + 1).to_string(),
        };
        if let Some(first) = seen.insert(id.clone(), row) {
            return Err(IoError::Csv {
                row,
                column: ID_COLUMN.into(),
                message: format!("duplicate id `{id}` (first on row {first})"),
            });
        }
        let values = signature
            .attributes()
            .iter()
            .zip(&columns)
            .map(|(attr, &c)| {
                let raw = record.get(c).unwrap_or_default();
                parse_value(raw, &attr.kind).map_err(|message| IoError::Csv {
                    row,
                    column: attr.name.clone(),
                    message,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        cases.push(Case::new(id, values));
    }
    if cases.is_empty() {
        return Err(IoError::EmptyFile);
    }
    Ok(Dataset::new(signature.clone(), cases)?)
}

fn parse_value(raw: &str, kind: &AttributeKind) -> Result<Value, String> {
    match kind {
        AttributeKind::Binary => match raw {
            "1" | "true" | "TRUE" | "True" => Ok(Value::Binary(true)),
            "0" | "false" | "FALSE" | "False" => Ok(Value::Binary(false)),
            _ => Err(format!("`{raw}` is not a binary value (0/1)")),
        },
        AttributeKind::Numeric => match raw.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(Value::Numeric(x)),
            _ => Err(format!("`{raw}` is not a finite number")),
        },
        AttributeKind::Categorical(values) => {
            if values.iter().any(|v| v == raw) {
                Ok(Value::Categorical(raw.to_string()))
            } else {
                Err(format!("`{raw}` is not one of {}", values.join(", ")))
            }
        }
    }
}

fn csv_error(e: &csv::Error) -> IoError {
    let row = e.position().map_or(0, |p| p.line() as usize);
    IoError::Csv {
        row,
        column: String::new(),
        message: e.to_string(),
    }
}

/// Writes cases as CSV with an id column first.
pub fn write_cases_csv(d: &Dataset, writer: impl std::io::Write) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(writer);
    let sig = d.signature();
    let header = std::iter::once(ID_COLUMN).chain(sig.attributes().iter().map(|a| a.name.as_str()));
    w.write_record(header).map_err(|e| csv_error(&e))?;
    for case in d.cases() {
        let values = case.values.iter().map(|v| v.to_string());
        w.write_record(std::iter::once(case.id.clone()).chain(values))
            .map_err(|e| csv_error(&e))?;
    }
    w.flush().map_err(|e| IoError::io(Path::new("<writer>"), e))?;
    Ok(())
}
