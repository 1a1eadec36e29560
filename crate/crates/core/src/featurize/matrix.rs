use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::numkit::Matrix;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RowId {
    pub subject_id: String,
    pub segment_id: String,
    pub window_index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeatureGroup {
    Eda,
    Acc,
}

/// Windows × named features.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    row_ids: Vec<RowId>,
    names: Vec<String>,
    groups: Vec<FeatureGroup>,
    values: Matrix,
}

impl FeatureMatrix {
    pub fn new(
        row_ids: Vec<RowId>,
        names: Vec<String>,
        groups: Vec<FeatureGroup>,
        values: Matrix,
    ) -> Result<Self> {
        if row_ids.len() != values.n_rows() {
            return Err(Error::invalid("row id count differs from matrix rows"));
        }
        if names.len() != values.n_cols() || groups.len() != values.n_cols() {
            return Err(Error::invalid("feature name count differs from matrix columns"));
        }
        let mut sorted: Vec<&String> = names.iter().collect();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("duplicate feature names"));
        }
        if values.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("feature matrix contains non-finite values"));
        }
        Ok(Self {
            row_ids,
            names,
            groups,
            values,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.values.n_rows()
    }

    pub fn n_cols(&self) -> usize {
        self.values.n_cols()
    }

    pub fn row_ids(&self) -> &[RowId] {
        &self.row_ids
    }

    pub fn feature_names(&self) -> &[String] {
        &self.names
    }

    pub fn groups(&self) -> &[FeatureGroup] {
        &self.groups
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn into_values(self) -> Matrix {
        self.values
    }

    pub fn select_rows(&self, indices: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            row_ids: indices.iter().map(|&i| self.row_ids[i].clone()).collect(),
            names: self.names.clone(),
            groups: self.groups.clone(),
            values: self.values.select_rows(indices),
        }
    }

    /// Columns by name, in the order given. Every name must be present.
    pub fn select_named(&self, names: &[String]) -> Result<FeatureMatrix> {
        let cols = names
            .iter()
            .map(|n| {
                self.names
                    .iter()
                    .position(|m| m == n)
                    .ok_or_else(|| Error::invalid(format!("feature {n:?} is missing")))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut data = Vec::with_capacity(self.n_rows() * cols.len());
        for r in self.values.rows_iter() {
            data.extend(cols.iter().map(|&c| r[c]));
        }
        FeatureMatrix::new(
            self.row_ids.clone(),
            names.to_vec(),
            cols.iter().map(|&c| self.groups[c]).collect(),
            Matrix::from_vec(self.n_rows(), cols.len(), data)?,
        )
    }
}

/// Header `subject_id,segment_id,window_index,<feature names>`.
pub fn write_feature_csv(m: &FeatureMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    write!(w, "subject_id,segment_id,window_index").map_err(io)?;
    for n in m.feature_names() {
        write!(w, ",{n}").map_err(io)?;
    }
    writeln!(w).map_err(io)?;
    for (id, row) in m.row_ids().iter().zip(m.values().rows_iter()) {
        write!(w, "{},{},{}", id.subject_id, id.segment_id, id.window_index).map_err(io)?;
        for v in row {
            write!(w, ",{v}").map_err(io)?;
        }
        writeln!(w).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn read_feature_csv(path: impl AsRef<Path>) -> Result<FeatureMatrix> {
    let path = path.as_ref();
    let perr = |line: u64, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| Error::io(path, std::io::Error::other(e)))?;
    let headers = reader.headers().map_err(|e| perr(1, e.to_string()))?.clone();
    let lead = ["subject_id", "segment_id", "window_index"];
    if headers.len() < 3 || headers.iter().take(3).ne(lead) {
        return Err(perr(1, "first columns must be subject_id,segment_id,window_index".into()));
    }
    let names: Vec<String> = headers.iter().skip(3).map(str::to_string).collect();
    let mut ids = Vec::new();
    let mut data = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| perr(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let window_index = record[2]
            .parse()
            .map_err(|_| perr(line, format!("bad window_index {:?}", &record[2])))?;
        ids.push(RowId {
            subject_id: record[0].to_string(),
            segment_id: record[1].to_string(),
            window_index,
        });
        for cell in record.iter().skip(3) {
            data.push(
                cell.parse::<f64>()
                    .map_err(|_| perr(line, format!("not a number: {cell:?}")))?,
            );
        }
    }
    let groups = names
        .iter()
        .map(|n| if n.starts_with("eda_") { FeatureGroup::Eda } else { FeatureGroup::Acc })
        .collect();
    let values = Matrix::from_vec(ids.len(), names.len(), data)?;
    FeatureMatrix::new(ids, names, groups, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::segment_windows;
    use crate::featurize::{assemble, FeatureSet};
    use crate::signal_io::{generate_synthetic_recording, SynthConfig};

    #[test]
    fn csv_round_trip() {
        let (mut rec, _) =
            generate_synthetic_recording(&SynthConfig { duration_s: 30.0, seed: 5, ..Default::default() })
                .unwrap();
        rec.subject_id = "s1".into();
        rec.segment_id = "a".into();
        let m = assemble(&segment_windows(&rec).unwrap(), FeatureSet::All).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.csv");
        write_feature_csv(&m, &p).unwrap();
        assert_eq!(read_feature_csv(&p).unwrap(), m);
    }

    #[test]
    fn rejects_duplicates_and_nan() {
        let names = vec!["a".to_string(), "a".to_string()];
        let g = vec![FeatureGroup::Eda; 2];
        assert!(FeatureMatrix::new(vec![], names, g.clone(), Matrix::zeros(0, 2)).is_err());
        let id = RowId { subject_id: "s".into(), segment_id: "g".into(), window_index: 0 };
        let bad = Matrix::from_vec(1, 2, vec![1.0, f64::NAN]).unwrap();
        assert!(FeatureMatrix::new(vec![id], vec!["a".into(), "b".into()], g, bad).is_err());
    }
}
