//! Dataset rendering: `#` header block plus CSV rows, or a JSON document.

use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Map, Value};

use crate::settings::Format;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Text(b.to_string())
    }
}

#[derive(Debug)]
pub struct Dataset {
    pub command: &'static str,
    pub params: Vec<(String, String)>,
    pub notes: Vec<String>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Dataset {
    pub fn new(command: &'static str, columns: &[&'static str]) -> Self {
        Dataset { command, params: Vec::new(), notes: Vec::new(), columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.params.push((key.to_string(), value.to_string()));
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    /// Two-column (quantity, value) table.
    pub fn scalar(&mut self, name: &str, value: impl Into<Cell>) {
        self.row(vec![Cell::Text(name.to_string()), value.into()]);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.render_csv(),
            Format::Json => self.render_json(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# bogoliubov {} {}\n", env!("CARGO_PKG_VERSION"), self.command));
        out.push_str("# units: hbar=2m=kB=1\n");
        for (k, v) in &self.params {
            out.push_str(&format!("# {k}={v}\n"));
        }
        for n in &self.notes {
            out.push_str(&format!("# note: {n}\n"));
        }
        out.push_str(&format!("# generated: {}\n", timestamp()));
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(format_cell).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn render_json(&self) -> String {
        let params: Map<String, Value> = self.params.iter().map(|(k, v)| (k.clone(), Value::from(v.as_str()))).collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                Value::Array(
                    r.iter()
                        .map(|c| match c {
                            Cell::Num(x) if x.is_finite() => json!(x),
                            Cell::Num(x) => json!(x.to_string()),
                            Cell::Text(s) => json!(s),
                        })
                        .collect(),
                )
            })
            .collect();
        let doc = json!({
            "program": "bogoliubov",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "units": "hbar=2m=kB=1",
            "parameters": params,
            "notes": self.notes,
            "generated": timestamp(),
            "columns": self.columns,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("JSON serialization of plain values");
        s.push('\n');
        s
    }
}

/// 17 significant digits.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn format_cell(c: &Cell) -> String {
    match c {
        Cell::Num(x) => format_number(*x),
        Cell::Text(s) => s.clone(),
    }
}

fn timestamp() -> String {
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    format!("unix {secs}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut d = Dataset::new("demo", &["x", "y"]);
        d.param("nu", "8pi");
        d.row(vec![1.0.into(), 0.1.into()]);
        let s = d.render(Format::Csv);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], format!("# bogoliubov {} demo", env!("CARGO_PKG_VERSION")));
        assert_eq!(lines[1], "# units: hbar=2m=kB=1");
        assert_eq!(lines[2], "# nu=8pi");
        assert!(lines[3].starts_with("# generated: "));
        assert_eq!(lines[4], "x,y");
        assert_eq!(lines[5], "1.0000000000000000e0,1.0000000000000001e-1");
    }

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, std::f64::consts::PI, -1.234e-300, 6.02e23] {
            assert_eq!(format_number(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn json_is_valid() {
        let mut d = Dataset::new("demo", &["name", "value"]);
        d.scalar("a", 2.0);
        let v: Value = serde_json::from_str(&d.render(Format::Json)).unwrap();
        assert_eq!(v["rows"][0][1], json!(2.0));
        assert_eq!(v["units"], "hbar=2m=kB=1");
    }
}
