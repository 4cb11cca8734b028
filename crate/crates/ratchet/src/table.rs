use std::path::Path;

use anyhow::Context;

/// One CSV cell. Floats print in shortest round-trip form, so equal values
/// always produce equal bytes.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn number(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::Float(v) => Some(*v),
            Cell::Text(_) => None,
        }
    }
}

/// A metrics table whose first column is the time index.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, path: &Path) -> anyhow::Result<()> {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Column-wise value of `col` in every row, if numeric.
    pub fn numeric(&self, col: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == col)?;
        self.rows.iter().map(|r| r[j].number()).collect()
    }
}

/// Mean and sample standard deviation across replicate tables, row by row,
/// for every numeric column after the index. Text columns are dropped.
pub fn aggregate(tables: &[Table]) -> Option<Table> {
    let first = tables.first()?;
    let numeric: Vec<usize> = (1..first.columns.len())
        .filter(|&j| first.rows.iter().all(|r| r[j].number().is_some()))
        .collect();
    let mut columns = vec![first.columns[0].clone()];
    for &j in &numeric {
        let name = &first.columns[j];
        columns.push(format!("{name}_mean"));
        columns.push(format!("{name}_sd"));
    }
    let mut out = Table::new(columns);
    let rows = tables.iter().map(|t| t.rows.len()).min().unwrap_or(0);
    for i in 0..rows {
        let mut row = vec![first.rows[i][0].clone()];
        for &j in &numeric {
            let values: Vec<f64> = tables.iter().filter_map(|t| t.rows[i][j].number()).collect();
            let (mean, sd) = mean_sd(&values);
            row.push(Cell::Float(mean));
            row.push(Cell::Float(sd));
        }
        out.push(row);
    }
    Some(out)
}

pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
