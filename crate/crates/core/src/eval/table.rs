use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::str::FromStr;

use super::wins::{count_wins, WinsTally};
use crate::error::{Error, Result};

/// One (method, dataset, horizon) test score.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultEntry {
    pub method: String,
    pub dataset: String,
    pub horizon: usize,
    pub mae: f64,
    pub mse: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableLayout {
    /// One row per (dataset, horizon) plus a per-dataset average row.
    PerHorizon,
    /// Only the per-dataset average rows.
    HorizonAveraged,
}

impl FromStr for TableLayout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per-horizon" => Ok(TableLayout::PerHorizon),
            "horizon-averaged" | "averaged" => Ok(TableLayout::HorizonAveraged),
            _ => Err(Error::Config(format!("unknown table layout '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Markdown,
    Csv,
}

impl FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "markdown" | "md" => Ok(TableFormat::Markdown),
            "csv" => Ok(TableFormat::Csv),
            _ => Err(Error::Config(format!("unknown table format '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Metric {
    Mae,
    Mse,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Mae => "MAE",
            Metric::Mse => "MSE",
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mae" => Ok(Metric::Mae),
            "mse" => Ok(Metric::Mse),
            _ => Err(Error::Config(format!("unknown metric '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub dataset: String,
    /// `None` marks the average over horizons.
    pub horizon: Option<usize>,
    /// `(mae, mse)` per method, in `ResultGrid::methods` order.
    pub values: Vec<(f64, f64)>,
}

impl GridRow {
    pub fn label(&self) -> String {
        match self.horizon {
            Some(h) => format!("{}/{h}", self.dataset),
            None => format!("{}/avg", self.dataset),
        }
    }
}

/// Rectangular result table: rows are dataset/horizon cells, columns are
/// methods x {MAE, MSE}.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultGrid {
    pub methods: Vec<String>,
    pub rows: Vec<GridRow>,
}

impl ResultGrid {
    pub fn new(methods: Vec<String>, rows: Vec<GridRow>) -> Result<Self> {
        for row in &rows {
            if row.values.len() != methods.len() {
                return Err(Error::Format(format!(
                    "row {} has {} method values, expected {}",
                    row.label(),
                    row.values.len(),
                    methods.len()
                )));
            }
        }
        Ok(ResultGrid { methods, rows })
    }

    /// Builds a grid with methods and datasets in sorted order. Every method
    /// must report every (dataset, horizon) pair exactly once.
    pub fn from_entries(entries: &[ResultEntry], layout: TableLayout) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Data("no results to tabulate".into()));
        }
        let methods: Vec<String> = entries
            .iter()
            .map(|e| e.method.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut cells: BTreeMap<(String, usize), BTreeMap<&str, (f64, f64)>> = BTreeMap::new();
        for e in entries {
            let slot = cells.entry((e.dataset.clone(), e.horizon)).or_default();
            if slot.insert(&e.method, (e.mae, e.mse)).is_some() {
                return Err(Error::Data(format!(
                    "duplicate result for {} on {}/{}",
                    e.method, e.dataset, e.horizon
                )));
            }
        }
        let mut rows = Vec::new();
        let mut by_dataset: BTreeMap<String, Vec<GridRow>> = BTreeMap::new();
        for ((dataset, horizon), per_method) in &cells {
            let values = methods
                .iter()
                .map(|m| {
                    per_method.get(m.as_str()).copied().ok_or_else(|| {
                        Error::Format(format!("{m} has no result for {dataset}/{horizon}"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            by_dataset.entry(dataset.clone()).or_default().push(GridRow {
                dataset: dataset.clone(),
                horizon: Some(*horizon),
                values,
            });
        }
        for (dataset, horizon_rows) in by_dataset {
            let avg = average_row(&dataset, &horizon_rows, methods.len());
            if layout == TableLayout::PerHorizon {
                rows.extend(horizon_rows);
            }
            rows.push(avg);
        }
        ResultGrid::new(methods, rows)
    }

    /// Wins over per-horizon rows when present, otherwise over average rows.
    /// Each row contributes one cell per requested metric.
    pub fn wins(&self, metrics: &[Metric]) -> Result<WinsTally> {
        let has_horizon_rows = self.rows.iter().any(|r| r.horizon.is_some());
        let mut results: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
        for row in self.rows.iter().filter(|r| r.horizon.is_some() == has_horizon_rows) {
            for (m, &(mae, mse)) in self.methods.iter().zip(&row.values) {
                let slot = results.entry(m.clone()).or_default();
                for metric in metrics {
                    let v = if *metric == Metric::Mae { mae } else { mse };
                    slot.insert(format!("{} {}", row.label(), metric.name()), v);
                }
            }
        }
        count_wins(&results)
    }
}

fn average_row(dataset: &str, rows: &[GridRow], methods: usize) -> GridRow {
    let n = rows.len() as f64;
    let values = (0..methods)
        .map(|j| {
            let (a, s) = rows
                .iter()
                .fold((0.0, 0.0), |(a, s), r| (a + r.values[j].0, s + r.values[j].1));
            (a / n, s / n)
        })
        .collect();
    GridRow {
        dataset: dataset.to_string(),
        horizon: None,
        values,
    }
}

fn fmt_value(v: f64, precision: Option<usize>) -> String {
    match precision {
        Some(p) => format!("{v:.p$}"),
        None => format!("{v}"),
    }
}

/// Renders the grid. Markdown bolds every minimal value per (row, metric);
/// CSV is plain data that `parse_csv_table` reads back. `precision = None`
/// prints shortest round-trip representations.
pub fn emit_table(grid: &ResultGrid, format: TableFormat, precision: Option<usize>) -> Result<String> {
    let mut header = vec!["dataset".to_string(), "horizon".to_string()];
    for m in &grid.methods {
        header.push(format!("{m} MAE"));
        header.push(format!("{m} MSE"));
    }
    match format {
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Error::Format(e.to_string());
            w.write_record(&header).map_err(io)?;
            for row in &grid.rows {
                let mut rec = vec![
                    row.dataset.clone(),
                    row.horizon.map_or("avg".into(), |h| h.to_string()),
                ];
                for &(a, s) in &row.values {
                    rec.push(fmt_value(a, precision));
                    rec.push(fmt_value(s, precision));
                }
                w.write_record(&rec).map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
        }
        TableFormat::Markdown => {
            let mut out = String::new();
            let _ = writeln!(out, "| {} |", header.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(header.len()));
            for row in &grid.rows {
                let best_mae = row.values.iter().map(|v| v.0).fold(f64::INFINITY, f64::min);
                let best_mse = row.values.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
                let mark = |v: f64, best: f64| {
                    let s = fmt_value(v, precision);
                    if v == best { format!("**{s}**") } else { s }
                };
                let mut cells = vec![
                    row.dataset.clone(),
                    row.horizon.map_or("avg".into(), |h| h.to_string()),
                ];
                for &(a, s) in &row.values {
                    cells.push(mark(a, best_mae));
                    cells.push(mark(s, best_mse));
                }
                let _ = writeln!(out, "| {} |", cells.join(" | "));
            }
            Ok(out)
        }
    }
}

/// Inverse of the CSV form of `emit_table`.
pub fn parse_csv_table(text: &str) -> Result<ResultGrid> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| Error::Format(e.to_string()))?.clone();
    if header.len() < 2 || header.len() % 2 != 0 {
        return Err(Error::Format(format!("table header has {} columns", header.len())));
    }
    let mut methods = Vec::new();
    for pair in header.iter().skip(2).collect::<Vec<_>>().chunks(2) {
        let m = pair[0]
            .strip_suffix(" MAE")
            .filter(|m| pair[1].strip_suffix(" MSE") == Some(m))
            .ok_or_else(|| Error::Format(format!("bad method columns {pair:?}")))?;
        methods.push(m.to_string());
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Format(e.to_string()))?;
        if rec.len() != header.len() {
            return Err(Error::Format(format!(
                "table row {} has {} columns, expected {}",
                i + 1,
                rec.len(),
                header.len()
            )));
        }
        let num = |col: usize| -> Result<f64> {
            rec[col].parse().map_err(|_| Error::Parse {
                row: i + 2,
                column: header[col].to_string(),
                message: format!("'{}' is not a number", &rec[col]),
            })
        };
        let horizon = match &rec[1] {
            "avg" => None,
            h => Some(h.parse().map_err(|_| Error::Parse {
                row: i + 2,
                column: "horizon".into(),
                message: format!("'{h}' is not a horizon"),
            })?),
        };
        let values = (0..methods.len())
            .map(|j| Ok((num(2 + 2 * j)?, num(3 + 2 * j)?)))
            .collect::<Result<Vec<_>>>()?;
        rows.push(GridRow {
            dataset: rec[0].to_string(),
            horizon,
            values,
        });
    }
    ResultGrid::new(methods, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(method: &str, dataset: &str, horizon: usize, mae: f64, mse: f64) -> ResultEntry {
        ResultEntry {
            method: method.into(),
            dataset: dataset.into(),
            horizon,
            mae,
            mse,
        }
    }

    #[test]
    fn csv_round_trip() {
        let grid = ResultGrid::from_entries(
            &[entry("pattn", "ETTh1", 96, 0.1 + 0.2, 1.0 / 3.0)],
            TableLayout::HorizonAveraged,
        )
        .unwrap();
        let text = emit_table(&grid, TableFormat::Csv, None).unwrap();
        assert_eq!(parse_csv_table(&text).unwrap(), grid);
    }

    #[test]
    fn markdown_marks_best() {
        let grid = ResultGrid::from_entries(
            &[entry("a", "d", 96, 0.3, 0.5), entry("b", "d", 96, 0.4, 0.2)],
            TableLayout::HorizonAveraged,
        )
        .unwrap();
        let md = emit_table(&grid, TableFormat::Markdown, Some(3)).unwrap();
        let row = md.lines().nth(2).unwrap();
        assert_eq!(row, "| d | avg | **0.300** | 0.500 | 0.400 | **0.200** |");
    }

    #[test]
    fn average_row_is_mean() {
        let grid = ResultGrid::from_entries(
            &[entry("a", "d", 96, 0.2, 0.4), entry("a", "d", 192, 0.4, 0.8)],
            TableLayout::PerHorizon,
        )
        .unwrap();
        assert_eq!(grid.rows.len(), 3);
        let avg = &grid.rows[2];
        assert_eq!(avg.horizon, None);
        assert!((avg.values[0].0 - 0.3).abs() < 1e-12);
        assert!((avg.values[0].1 - 0.6).abs() < 1e-12);
    }

    #[test]
    fn ragged_and_duplicate_inputs() {
        assert!(ResultGrid::from_entries(
            &[entry("a", "d", 96, 0.2, 0.4), entry("b", "d", 192, 0.4, 0.8)],
            TableLayout::PerHorizon
        )
        .is_err());
        assert!(ResultGrid::from_entries(
            &[entry("a", "d", 96, 0.2, 0.4), entry("a", "d", 96, 0.2, 0.4)],
            TableLayout::PerHorizon
        )
        .is_err());
        assert!(ResultGrid::new(
            vec!["a".into()],
            vec![GridRow { dataset: "d".into(), horizon: None, values: vec![] }]
        )
        .is_err());
        assert!(parse_csv_table("dataset,horizon,a MAE,a MSE\nd,avg,0.1\n").is_err());
    }

    #[test]
    fn grid_wins() {
        let grid = ResultGrid::from_entries(
            &[entry("a", "d", 96, 0.3, 0.5), entry("b", "d", 96, 0.4, 0.2)],
            TableLayout::PerHorizon,
        )
        .unwrap();
        let w = grid.wins(&[Metric::Mae, Metric::Mse]).unwrap();
        assert_eq!((w.get("a"), w.get("b"), w.cells), (1, 1, 2));
        let w = grid.wins(&[Metric::Mse]).unwrap();
        assert_eq!((w.get("a"), w.get("b"), w.cells), (0, 1, 1));
    }
}
