use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::{Error, Result};

/// Sampling rate every ingested recording must have, in Hz.
pub const CANONICAL_RATE_HZ: f64 = 8.0;

const COLUMNS: [&str; 5] = ["time_s", "eda_us", "acc_x_g", "acc_y_g", "acc_z_g"];

/// A uniformly sampled EDA + 3-axis accelerometer trace.
#[derive(Debug, Clone, PartialEq)]
pub struct Recording {
    pub subject_id: String,
    pub segment_id: String,
    pub sampling_rate_hz: f64,
    pub start_time_s: f64,
    pub eda_us: Vec<f64>,
    pub acc_x_g: Vec<f64>,
    pub acc_y_g: Vec<f64>,
    pub acc_z_g: Vec<f64>,
}

impl Recording {
    pub fn new(
        subject_id: impl Into<String>,
        segment_id: impl Into<String>,
        sampling_rate_hz: f64,
        eda_us: Vec<f64>,
        acc: [Vec<f64>; 3],
    ) -> Result<Self> {
        let [acc_x_g, acc_y_g, acc_z_g] = acc;
        let rec = Self {
            subject_id: subject_id.into(),
            segment_id: segment_id.into(),
            sampling_rate_hz,
            start_time_s: 0.0,
            eda_us,
            acc_x_g,
            acc_y_g,
            acc_z_g,
        };
        rec.validate()?;
        Ok(rec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sampling_rate_hz > 0.0) || !self.sampling_rate_hz.is_finite() {
            return Err(Error::invalid(format!(
                "sampling rate must be positive, got {}",
                self.sampling_rate_hz
            )));
        }
        let n = self.eda_us.len();
        if self.acc_x_g.len() != n || self.acc_y_g.len() != n || self.acc_z_g.len() != n {
            return Err(Error::invalid("recording channels differ in length"));
        }
        if let Some(i) = self.eda_us.iter().position(|&v| !(v >= 0.0)) {
            return Err(Error::invalid(format!(
                "EDA sample {i} is negative or not a number"
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.eda_us.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eda_us.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.len() as f64 / self.sampling_rate_hz
    }
}

fn parse_err(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Reads a recording CSV.
///
/// Leading `# key: value` comment lines may carry `subject_id`,
/// `segment_id`, `start_time_s` and `sampling_rate_hz`; without the last
/// one the rate is inferred from the time column. Only
/// [`CANONICAL_RATE_HZ`] is accepted.
pub fn read_recording_csv(path: impl AsRef<Path>) -> Result<Recording> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut meta: Vec<(String, String)> = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let Some(rest) = line.trim_start().strip_prefix('#') else {
            break;
        };
        if let Some((k, v)) = rest.split_once(':').or_else(|| rest.split_once('=')) {
            meta.push((k.trim().to_string(), v.trim().to_string()));
        }
    }
    let lookup = |key: &str| meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.clone());

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::io(path, std::io::Error::other(e)))?;
    let headers = reader
        .headers()
        .map_err(|e| parse_err(path, 1, e.to_string()))?
        .clone();
    let mut idx = [0usize; 5];
    for (slot, name) in idx.iter_mut().zip(COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| parse_err(path, 1, format!("missing column `{name}`")))?;
    }

    let mut cols: [Vec<f64>; 5] = Default::default();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != headers.len() {
            return Err(parse_err(
                path,
                line,
                format!("expected {} fields, found {}", headers.len(), record.len()),
            ));
        }
        for (c, &j) in cols.iter_mut().zip(&idx) {
            let cell = &record[j];
            let v: f64 = cell.parse().map_err(|_| {
                parse_err(path, line, format!("column `{}`: not a number: {cell:?}", &headers[j]))
            })?;
            if !v.is_finite() {
                return Err(parse_err(path, line, format!("column `{}`: non-finite value", &headers[j])));
            }
            c.push(v);
        }
    }
    let [time, eda, ax, ay, az] = cols;
    if time.is_empty() {
        return Err(parse_err(path, 2, "no samples"));
    }

    let rate = match lookup("sampling_rate_hz") {
        Some(v) => v
            .parse::<f64>()
            .map_err(|_| parse_err(path, 1, format!("bad sampling_rate_hz {v:?}")))?,
        None if time.len() >= 2 => {
            (time.len() - 1) as f64 / (time[time.len() - 1] - time[0])
        }
        None => CANONICAL_RATE_HZ,
    };
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(Error::invalid(format!(
            "{}: sampling rate must be positive, got {rate}",
            path.display()
        )));
    }
    let step = 1.0 / rate;
    for (i, w) in time.windows(2).enumerate() {
        if ((w[1] - w[0]) - step).abs() > 1e-6 {
            // header is line 1, samples start at line 2 (ignoring comments)
            return Err(parse_err(
                path,
                i as u64 + 3,
                format!("time step {} differs from 1/{rate}", w[1] - w[0]),
            ));
        }
    }
    if (rate - CANONICAL_RATE_HZ).abs() > 1e-6 {
        return Err(Error::invalid(format!(
            "{}: sampling rate {rate} Hz is not the canonical {CANONICAL_RATE_HZ} Hz",
            path.display()
        )));
    }

    let mut rec = Recording::new(
        lookup("subject_id").unwrap_or_default(),
        lookup("segment_id").unwrap_or_default(),
        CANONICAL_RATE_HZ,
        eda,
        [ax, ay, az],
    )?;
    rec.start_time_s = match lookup("start_time_s") {
        Some(v) => v
            .parse()
            .map_err(|_| parse_err(path, 1, format!("bad start_time_s {v:?}")))?,
        None => time[0],
    };
    Ok(rec)
}

/// Writes a recording in the canonical CSV layout. Values use the shortest
/// round-trip float formatting, so reading the file back is lossless.
pub fn write_recording_csv(rec: &Recording, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    rec.validate()?;
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    writeln!(w, "# subject_id: {}", rec.subject_id).map_err(io)?;
    writeln!(w, "# segment_id: {}", rec.segment_id).map_err(io)?;
    writeln!(w, "# sampling_rate_hz: {}", rec.sampling_rate_hz).map_err(io)?;
    writeln!(w, "# start_time_s: {}", rec.start_time_s).map_err(io)?;
    writeln!(w, "{}", COLUMNS.join(",")).map_err(io)?;
    for i in 0..rec.len() {
        let t = rec.start_time_s + i as f64 / rec.sampling_rate_hz;
        writeln!(
            w,
            "{t},{},{},{},{}",
            rec.eda_us[i], rec.acc_x_g[i], rec.acc_y_g[i], rec.acc_z_g[i]
        )
        .map_err(io)?;
    }
    w.flush().map_err(io)
}
