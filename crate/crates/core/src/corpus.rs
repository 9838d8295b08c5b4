//! Evaluation items and JSONL ingestion.

use std::collections::HashSet;
use std::io::BufRead;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One passage / answer / candidate question, optionally with a reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalItem {
    pub id: String,
    pub system: String,
    pub passage: String,
    pub question: String,
    pub answer: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<String>,
}

impl EvalItem {
    fn validate(&self) -> std::result::Result<(), String> {
        for (name, v) in [("passage", &self.passage), ("question", &self.question), ("answer", &self.answer)] {
            if v.trim().is_empty() {
                return Err(format!("item `{}`: {name} is empty", self.id));
            }
        }
        Ok(())
    }
}

/// Read one JSON record per non-blank line. Errors carry the 1-based line.
pub fn read_jsonl<T: DeserializeOwned, R: BufRead>(reader: R) -> Result<Vec<T>> {
    Ok(read_numbered(reader)?.into_iter().map(|(_, rec)| rec).collect())
}

fn read_numbered<T: DeserializeOwned, R: BufRead>(reader: R) -> Result<Vec<(usize, T)>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push((i + 1, rec));
    }
    Ok(out)
}

/// Read and validate an EvalItem corpus: non-empty fields and unique ids.
pub fn read_items<R: BufRead>(reader: R) -> Result<Vec<EvalItem>> {
    let numbered: Vec<(usize, EvalItem)> = read_numbered(reader)?;
    let mut seen = HashSet::new();
    for (line, item) in &numbered {
        item.validate().map_err(|message| Error::Parse { line: *line, message })?;
        if !seen.insert(item.id.as_str()) {
            return Err(Error::Parse {
                line: *line,
                message: format!("duplicate item id `{}`", item.id),
            });
        }
    }
    Ok(numbered.into_iter().map(|(_, item)| item).collect())
}
