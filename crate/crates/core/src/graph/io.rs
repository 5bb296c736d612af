use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use super::{TemporalEdge, WeightedGraph};
use crate::error::{Error, Result};

/// One column of a whitespace-separated edge-list line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    Source,
    Target,
    Weight,
    Time,
    Skip,
}

/// Column layout of an edge-list file, written as a string of the letters
/// `u`, `v`, `w`, `t` and `_` (ignored column), e.g. `uvwt` or `tuv`.
///
/// Columns after the last of `u`/`v` may be missing from a line, in which case
/// weight defaults to 1 and time to 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeListFormat {
    columns: Vec<Column>,
}

impl Default for EdgeListFormat {
    fn default() -> Self {
        EdgeListFormat {
            columns: vec![Column::Source, Column::Target, Column::Weight, Column::Time],
        }
    }
}

impl FromStr for EdgeListFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let columns = s
            .chars()
            .filter(|c| !matches!(c, ',' | ' '))
            .map(|c| match c.to_ascii_lowercase() {
                'u' => Ok(Column::Source),
                'v' => Ok(Column::Target),
                'w' => Ok(Column::Weight),
                't' => Ok(Column::Time),
                '_' => Ok(Column::Skip),
                _ => Err(Error::Format(s.to_string(), "unknown column letter")),
            })
            .collect::<Result<Vec<_>>>()?;
        let count = |c: Column| columns.iter().filter(|&&x| x == c).count();
        if count(Column::Source) != 1 || count(Column::Target) != 1 {
            return Err(Error::Format(
                s.to_string(),
                "need exactly one `u` and one `v`",
            ));
        }
        if count(Column::Weight) > 1 || count(Column::Time) > 1 {
            return Err(Error::Format(
                s.to_string(),
                "`w` and `t` may appear at most once",
            ));
        }
        Ok(EdgeListFormat { columns })
    }
}

impl fmt::Display for EdgeListFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.columns {
            let ch = match c {
                Column::Source => 'u',
                Column::Target => 'v',
                Column::Weight => 'w',
                Column::Time => 't',
                Column::Skip => '_',
            };
            write!(f, "{ch}")?;
        }
        Ok(())
    }
}

impl EdgeListFormat {
    fn required(&self) -> usize {
        1 + self
            .columns
            .iter()
            .rposition(|c| matches!(c, Column::Source | Column::Target))
            .unwrap()
    }
}

/// Parsed interactions plus the token of every raw node id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EdgeList {
    pub edges: Vec<TemporalEdge>,
    pub labels: Vec<String>,
}

impl EdgeList {
    /// Labels `0..n` for edges whose raw ids are already dense integers.
    pub fn with_numeric_labels(edges: Vec<TemporalEdge>) -> Self {
        let n = edges.iter().map(|e| e.u.max(e.v) + 1).max().unwrap_or(0);
        EdgeList {
            edges,
            labels: (0..n).map(|i| i.to_string()).collect(),
        }
    }

    pub fn label(&self, raw: u32) -> &str {
        &self.labels[raw as usize]
    }

    /// True when at least two interactions carry different timestamps.
    pub fn has_temporal_spread(&self) -> bool {
        match self.edges.first() {
            Some(first) => self.edges.iter().any(|e| e.t != first.t),
            None => false,
        }
    }
}

/// Reads a line-oriented edge list. Node tokens are interned to raw ids in
/// order of first appearance.
pub fn parse_edge_list<R: BufRead>(reader: R, format: &EdgeListFormat) -> Result<EdgeList> {
    let mut ids: HashMap<String, u32> = HashMap::new();
    let mut out = EdgeList::default();
    let required = format.required();

    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() < required {
            return Err(Error::Parse {
                line: lineno,
                msg: format!(
                    "expected at least {required} columns, found {}",
                    tokens.len()
                ),
            });
        }
        let (mut u, mut v, mut w, mut t) = ("", "", None, None);
        for (col, tok) in format.columns.iter().zip(&tokens) {
            match col {
                Column::Source => u = tok,
                Column::Target => v = tok,
                Column::Weight => w = Some(*tok),
                Column::Time => t = Some(*tok),
                Column::Skip => {}
            }
        }
        if u == v {
            return Err(Error::SelfLoop {
                line: lineno,
                node: u.to_string(),
            });
        }
        let number = |tok: Option<&str>, default: f64, what: &str| -> Result<f64> {
            match tok {
                None => Ok(default),
                Some(s) => match s.parse::<f64>() {
                    Ok(x) if x.is_finite() => Ok(x),
                    _ => Err(Error::Parse {
                        line: lineno,
                        msg: format!("invalid {what} `{s}`"),
                    }),
                },
            }
        };
        let w = number(w, 1.0, "weight")?;
        if w < 0.0 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("negative weight {w}"),
            });
        }
        let t = number(t, 0.0, "timestamp")?;
        let mut intern = |tok: &str| -> u32 {
            if let Some(&id) = ids.get(tok) {
                return id;
            }
            let id = out.labels.len() as u32;
            out.labels.push(tok.to_string());
            ids.insert(tok.to_string(), id);
            id
        };
        let u = intern(u);
        let v = intern(v);
        out.edges.push(TemporalEdge { u, v, w, t });
    }
    Ok(out)
}

/// Writes `u v w t` lines using `labels` indexed by raw id. Weights and
/// timestamps use shortest round-trip formatting.
pub fn write_edge_list<W: Write>(g: &WeightedGraph, labels: &[String], mut out: W) -> Result<()> {
    for e in g.edges() {
        writeln!(
            out,
            "{} {} {} {}",
            labels[g.raw_id(e.u) as usize],
            labels[g.raw_id(e.v) as usize],
            e.w,
            e.t
        )?;
    }
    Ok(())
}
