//! Rectangular numeric tables and their CSV/JSON encodings.
//!
//! CSV floats are written as `{:.11e}` (12 significant digits, scientific), so
//! identical runs give byte-identical files. CSV holds the table only; JSON
//! wraps the same table with its metadata.

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub meta: Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl ResultTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            meta: Value::Null,
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width differs from header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn check(&self) -> Result<()> {
        for (i, row) in self.rows.iter().enumerate() {
            ensure!(
                row.len() == self.columns.len(),
                "row {i} has {} values for {} columns",
                row.len(),
                self.columns.len()
            );
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                bail!("non-finite value in row {i}, column `{}`", self.columns[j]);
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.11e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().context("empty CSV")?;
        let mut table = Self::new(header.split(',').map(str::trim));
        for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let row = line
                .split(',')
                .map(|cell| cell.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .with_context(|| format!("CSV line {}", i + 2))?;
            ensure!(
                row.len() == table.columns.len(),
                "CSV line {} has {} cells",
                i + 2,
                row.len()
            );
            table.rows.push(row);
        }
        Ok(table)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let table: Self = serde_json::from_str(text).context("parsing JSON table")?;
        table.check()?;
        Ok(table)
    }
}
