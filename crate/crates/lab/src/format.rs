//! Text formats: measure files, measure lists, and `#`-headed CSV tables.
//!
//! A measure file is a line `offset <min_index>` followed by one weight per
//! line. A list file holds several such blocks back to back. `#` starts a
//! comment anywhere; blank lines are ignored.

use std::fmt::Write as _;

use convergence_core::LatticeMeasure;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("measure starting at line {line}: {source}")]
    Measure {
        line: usize,
        #[source]
        source: convergence_core::Error,
    },
    #[error("no measure found")]
    Empty,
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

pub fn parse_measure_list(text: &str) -> Result<Vec<LatticeMeasure>, FormatError> {
    let mut out = Vec::new();
    let mut current: Option<(usize, i64, Vec<f64>)> = None;
    let finish = |block: Option<(usize, i64, Vec<f64>)>,
                  out: &mut Vec<LatticeMeasure>|
     -> Result<(), FormatError> {
        if let Some((line, offset, weights)) = block {
            let m = LatticeMeasure::new(offset, weights)
                .map_err(|source| FormatError::Measure { line, source })?;
            out.push(m);
        }
        Ok(())
    };
    for (line, l) in content_lines(text) {
        if let Some(rest) = l.strip_prefix("offset") {
            let offset = rest
                .trim()
                .parse::<i64>()
                .map_err(|e| FormatError::Syntax {
                    line,
                    message: format!("bad offset `{}`: {e}", rest.trim()),
                })?;
            finish(current.take(), &mut out)?;
            current = Some((line, offset, Vec::new()));
            continue;
        }
        let w = l.parse::<f64>().map_err(|e| FormatError::Syntax {
            line,
            message: format!("bad weight `{l}`: {e}"),
        })?;
        match current.as_mut() {
            Some((_, _, ws)) => ws.push(w),
            None => {
                return Err(FormatError::Syntax {
                    line,
                    message: "weight before any `offset` line".into(),
                })
            }
        }
    }
    finish(current, &mut out)?;
    if out.is_empty() {
        return Err(FormatError::Empty);
    }
    Ok(out)
}

pub fn parse_measure(text: &str) -> Result<LatticeMeasure, FormatError> {
    let mut list = parse_measure_list(text)?;
    if list.len() > 1 {
        return Err(FormatError::Syntax {
            line: 1,
            message: format!("expected one measure, found {}", list.len()),
        });
    }
    Ok(list.remove(0))
}

pub fn write_measure(mu: &LatticeMeasure) -> String {
    let mut s = String::new();
    if mu.mass_defect() > 0.0 {
        let _ = writeln!(s, "# mass_defect {:?}", mu.mass_defect());
    }
    let _ = writeln!(s, "offset {}", mu.min_index());
    for w in mu.weights() {
        let _ = writeln!(s, "{w:?}");
    }
    s
}

/// Shortest round-trip form.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// A CSV table: `# key: value` header lines, a column row, then data rows.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CsvTable {
    meta: Vec<(String, String)>,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(columns: &[&str]) -> Self {
        CsvTable {
            meta: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn echo(&mut self, lines: &[String]) -> &mut Self {
        for l in lines {
            self.meta("config", l);
        }
        self
    }

    pub fn row(&mut self, cells: Vec<String>) -> &mut Self {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
        self
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for (k, v) in &self.meta {
            // Header rows stay single-line whatever the value holds.
            let v = v.replace(['\n', '\r'], " ");
            out.extend_from_slice(format!("# {k}: {v}\n").as_bytes());
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        // Writing into a Vec cannot fail.
        w.write_record(&self.columns).expect("in-memory csv");
        for r in &self.rows {
            w.write_record(r).expect("in-memory csv");
        }
        w.into_inner().expect("in-memory csv")
    }
}
