//! Numeric comparison of two result tables, for checking outputs across
//! platforms where the last printed digit may differ.

use std::fs;
use std::path::Path;

use anyhow::{ensure, Context, Result};

use crate::table::ResultTable;

#[derive(Debug, Clone, PartialEq)]
pub struct Mismatch {
    pub row: usize,
    pub column: String,
    pub left: f64,
    pub right: f64,
}

#[derive(Debug, Clone, Default)]
pub struct DiffReport {
    pub compared: usize,
    pub max_abs: f64,
    pub max_rel: f64,
    pub mismatches: Vec<Mismatch>,
}

impl DiffReport {
    pub fn is_match(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// `.json` files are read as JSON tables, anything else as CSV.
pub fn load_table(path: &Path) -> Result<ResultTable> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let table = if path.extension().is_some_and(|e| e == "json") {
        ResultTable::from_json(&text)
    } else {
        ResultTable::from_csv(&text)
    };
    table.with_context(|| format!("loading {}", path.display()))
}

/// Cells agree when `|a - b| <= atol + rtol * max(|a|, |b|)`. Differing
/// headers or shapes are errors rather than mismatches.
pub fn compare(left: &ResultTable, right: &ResultTable, rtol: f64, atol: f64) -> Result<DiffReport> {
    ensure!(
        left.columns == right.columns,
        "column headers differ: {:?} vs {:?}",
        left.columns,
        right.columns
    );
    ensure!(
        left.rows.len() == right.rows.len(),
        "row counts differ: {} vs {}",
        left.rows.len(),
        right.rows.len()
    );
    let mut report = DiffReport::default();
    for (i, (a, b)) in left.rows.iter().zip(&right.rows).enumerate() {
        for (j, (&x, &y)) in a.iter().zip(b).enumerate() {
            let abs = (x - y).abs();
            let scale = x.abs().max(y.abs());
            report.compared += 1;
            report.max_abs = report.max_abs.max(abs);
            if scale > 0.0 {
                report.max_rel = report.max_rel.max(abs / scale);
            }
            if abs > atol + rtol * scale || x.is_nan() != y.is_nan() {
                report.mismatches.push(Mismatch {
                    row: i,
                    column: left.columns[j].clone(),
                    left: x,
                    right: y,
                });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(vals: &[f64]) -> ResultTable {
        let mut t = ResultTable::new(["a"]);
        vals.iter().for_each(|&v| t.push(vec![v]));
        t
    }

    #[test]
    fn tolerances() {
        let r = compare(&table(&[1.0, 0.0]), &table(&[1.0 + 1e-12, 1e-14]), 1e-9, 1e-12).unwrap();
        assert!(r.is_match());
        assert_eq!(r.compared, 2);
        let r = compare(&table(&[1.0]), &table(&[1.0 + 1e-6]), 1e-9, 0.0).unwrap();
        assert_eq!(r.mismatches.len(), 1);
        assert_eq!(r.mismatches[0].column, "a");
    }

    #[test]
    fn shape_errors() {
        assert!(compare(&table(&[1.0]), &table(&[1.0, 2.0]), 0.0, 0.0).is_err());
        assert!(compare(&table(&[1.0]), &ResultTable::new(["b"]), 0.0, 0.0).is_err());
    }
}
