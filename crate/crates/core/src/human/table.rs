use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// A wide table of per-system scores: one row per system, one column per
/// human or metric score, blanks for missing values.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    pub columns: Vec<String>,
    pub rows: Vec<(String, Vec<Option<f64>>)>,
}

impl ScoreTable {
    /// Parse comma-separated text. The first column holds system names; the
    /// header row names the score columns. Quoting is not supported.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| Error::Parse {
            line: 1,
            message: "empty score table".into(),
        })?;
        let columns: Vec<String> = header.split(',').skip(1).map(|c| c.trim().to_string()).collect();
        let mut rows = Vec::new();
        for (i, line) in lines {
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            if cells.len() != columns.len() + 1 {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("expected {} cells, found {}", columns.len() + 1, cells.len()),
                });
            }
            let values = cells[1..]
                .iter()
                .map(|c| {
                    if c.is_empty() {
                        Ok(None)
                    } else {
                        c.parse::<f64>().map(Some).map_err(|e| Error::Parse {
                            line: i + 1,
                            message: format!("`{c}`: {e}"),
                        })
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push((cells[0].to_string(), values));
        }
        Ok(Self { columns, rows })
    }

    /// Non-blank values of one column keyed by system.
    pub fn column(&self, name: &str) -> Option<BTreeMap<String, f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(
            self.rows
                .iter()
                .filter_map(|(s, v)| v[k].map(|x| (s.clone(), x)))
                .collect(),
        )
    }
}
