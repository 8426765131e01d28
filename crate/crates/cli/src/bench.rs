//! OSPF overhead reference table (point-to-multipoint simulation and
//! emulation against SpiroPlanck). Values are reference data only; nothing
//! here recomputes them.

use crate::error::{CliError, Result};

pub const BUNDLED_CSV: &str = include_str!("../data/ospf_overhead.csv");
pub const COLUMNS: [&str; 4] = ["nodes", "pt_mpt_sim", "pt_mpt_emu", "spiroplanck"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReferenceRow {
    pub nodes: u64,
    pub pt_mpt_simulation: u64,
    pub pt_mpt_emulation: u64,
    pub spiroplanck: u64,
}

impl ReferenceRow {
    fn values(&self) -> [u64; 4] {
        [self.nodes, self.pt_mpt_simulation, self.pt_mpt_emulation, self.spiroplanck]
    }
}

pub fn bundled() -> Vec<ReferenceRow> {
    parse(BUNDLED_CSV, "bundled table").expect("bundled table parses")
}

pub fn parse(text: &str, origin: &str) -> Result<Vec<ReferenceRow>> {
    let err = |message: String| CliError::Parse {
        path: origin.to_owned(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let headers = reader.headers().map_err(|e| err(format!("unreadable header: {e}")))?.clone();
    if headers.iter().all(str::is_empty) {
        return Err(err("empty file: missing header row".into()));
    }
    for (i, expected) in COLUMNS.iter().enumerate() {
        match headers.get(i) {
            Some(h) if h == *expected => {}
            Some(h) => return Err(err(format!("column {}: expected `{expected}`, found `{h}`", i + 1))),
            None => return Err(err(format!("column {}: missing `{expected}`", i + 1))),
        }
    }
    if headers.len() > COLUMNS.len() {
        return Err(err(format!("unexpected extra column `{}`", &headers[COLUMNS.len()])));
    }

    let mut rows: Vec<ReferenceRow> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        // header is line 1
        let line = idx + 2;
        let record = record.map_err(|e| err(format!("row {line}: {e}")))?;
        let mut values = [0u64; 4];
        for (col, value) in values.iter_mut().enumerate() {
            let raw = record.get(col).unwrap_or("");
            *value = raw.parse().map_err(|_| {
                err(format!(
                    "row {line}, column `{}`: expected a nonnegative integer, found `{raw}`",
                    COLUMNS[col]
                ))
            })?;
        }
        let row = ReferenceRow {
            nodes: values[0],
            pt_mpt_simulation: values[1],
            pt_mpt_emulation: values[2],
            spiroplanck: values[3],
        };
        if let Some(prev) = rows.last() {
            if row.nodes <= prev.nodes {
                return Err(err(format!(
                    "row {line}, column `nodes`: {} does not increase on {}",
                    row.nodes, prev.nodes
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(err("no data rows".into()));
    }
    Ok(rows)
}

pub fn render(rows: &[ReferenceRow]) -> String {
    let mut out = COLUMNS.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.values().iter().map(u64::to_string).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
