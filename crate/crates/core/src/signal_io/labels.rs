use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WindowLabel {
    Clean,
    Artifact,
}

impl WindowLabel {
    pub fn is_artifact(self) -> bool {
        matches!(self, WindowLabel::Artifact)
    }

    pub fn from_bit(bit: u8) -> Option<Self> {
        match bit {
            0 => Some(WindowLabel::Clean),
            1 => Some(WindowLabel::Artifact),
            _ => None,
        }
    }

    pub fn as_bit(self) -> u8 {
        self as u8
    }
}

/// Artifact iff at least two of the three experts say so.
pub fn majority_label(e1: WindowLabel, e2: WindowLabel, e3: WindowLabel) -> WindowLabel {
    let votes = [e1, e2, e3].iter().filter(|l| l.is_artifact()).count();
    if votes >= 2 {
        WindowLabel::Artifact
    } else {
        WindowLabel::Clean
    }
}

/// Three expert labels per window, indexed by window position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpertLabels {
    labels: Vec<[WindowLabel; 3]>,
}

impl ExpertLabels {
    pub fn new(labels: Vec<[WindowLabel; 3]>) -> Self {
        Self { labels }
    }

    /// All three experts agree with the given ground truth.
    pub fn unanimous(truth: &[WindowLabel]) -> Self {
        Self {
            labels: truth.iter().map(|&l| [l; 3]).collect(),
        }
    }

    pub fn window_count(&self) -> usize {
        self.labels.len()
    }

    pub fn rows(&self) -> &[[WindowLabel; 3]] {
        &self.labels
    }

    pub fn fused(&self) -> Vec<WindowLabel> {
        self.labels
            .iter()
            .map(|&[a, b, c]| majority_label(a, b, c))
            .collect()
    }
}

fn parse_err(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Reads a `window_index,expert1,expert2,expert3` file. Rows must be in
/// window order starting at 0.
pub fn read_labels_csv(path: impl AsRef<Path>, expected_window_count: usize) -> Result<ExpertLabels> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::io(path, std::io::Error::other(e)))?;
    let headers = reader
        .headers()
        .map_err(|e| parse_err(path, 1, e.to_string()))?
        .clone();
    let expected = ["window_index", "expert1", "expert2", "expert3"];
    if headers.iter().ne(expected) {
        return Err(parse_err(
            path,
            1,
            format!("header must be `{}`", expected.join(",")),
        ));
    }
    let mut labels = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            parse_err(path, e.position().map_or(0, |p| p.line()), e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let index: usize = record[0]
            .parse()
            .map_err(|_| parse_err(path, line, format!("bad window_index {:?}", &record[0])))?;
        if index != labels.len() {
            return Err(parse_err(
                path,
                line,
                format!("window_index {index} out of order, expected {}", labels.len()),
            ));
        }
        let mut row = [WindowLabel::Clean; 3];
        for (slot, cell) in row.iter_mut().zip(record.iter().skip(1)) {
            *slot = cell
                .parse::<u8>()
                .ok()
                .and_then(WindowLabel::from_bit)
                .ok_or_else(|| parse_err(path, line, format!("label {cell:?} is not 0 or 1")))?;
        }
        labels.push(row);
    }
    if labels.len() != expected_window_count {
        return Err(Error::invalid(format!(
            "{}: {} label rows, expected {expected_window_count}",
            path.display(),
            labels.len()
        )));
    }
    Ok(ExpertLabels { labels })
}

pub fn write_labels_csv(labels: &ExpertLabels, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    writeln!(w, "window_index,expert1,expert2,expert3").map_err(io)?;
    for (i, [a, b, c]) in labels.rows().iter().enumerate() {
        writeln!(w, "{i},{},{},{}", a.as_bit(), b.as_bit(), c.as_bit()).map_err(io)?;
    }
    w.flush().map_err(io)
}
