//! Sweep output: rows of typed cells written as CSV.

use serde::Serialize;

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl Cell {
    /// Floats carry 17 significant digits, enough to round-trip exactly.
    pub fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) if x.is_finite() => format!("{x:.16e}"),
            Cell::Float(x) if x.is_nan() => "nan".into(),
            Cell::Float(x) => if *x > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

/// One parameter point: either its value cells or the error that stopped it.
pub type RowResult = Result<Vec<Cell>, String>;

#[derive(Clone, Debug)]
pub struct Table {
    /// Parameter columns, always filled.
    pub keys: Vec<&'static str>,
    /// Value columns, empty on error rows.
    pub values: Vec<&'static str>,
    pub rows: Vec<(Vec<Cell>, RowResult)>,
}

impl Table {
    pub fn failed_rows(&self) -> usize {
        self.rows.iter().filter(|(_, r)| r.is_err()).count()
    }

    pub fn all_failed(&self) -> bool {
        !self.rows.is_empty() && self.failed_rows() == self.rows.len()
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header: Vec<&str> = self.keys.iter().chain(&self.values).copied().chain(["error"]).collect();
        w.write_record(&header)?;
        for (key, result) in &self.rows {
            let mut rec: Vec<String> = key.iter().map(Cell::render).collect();
            match result {
                Ok(vals) => {
                    rec.extend(vals.iter().map(Cell::render));
                    rec.push(String::new());
                }
                Err(e) => {
                    rec.extend(self.values.iter().map(|_| String::new()));
                    rec.push(e.clone());
                }
            }
            w.write_record(&rec)?;
        }
        w.into_inner().map_err(|e| CliError::Usage(format!("csv buffer: {e}")))
    }
}
