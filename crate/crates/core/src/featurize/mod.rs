//! Window feature vectors and the named feature registry.
//!
//! Every channel yields six signals (amplitude, first and second derivative,
//! Haar details at 4, 2 and 1 Hz) and each signal four statistics (mean,
//! population std, max, min): 24 features per channel. EDA is one channel;
//! the accelerometer contributes x, y, z and magnitude, 96 features in all.

mod matrix;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use matrix::{read_feature_csv, write_feature_csv, FeatureGroup, FeatureMatrix, RowId};

use crate::dsp::{acc_magnitude, first_derivative, haar_dwt, Window};
use crate::numkit::{summary_stats, Matrix};
use crate::{Error, Result};

pub const FEATURES_PER_CHANNEL: usize = 24;
pub const EDA_FEATURES: usize = FEATURES_PER_CHANNEL;
pub const ACC_FEATURES: usize = 4 * FEATURES_PER_CHANNEL;

pub const SIGNALS: [&str; 6] = ["amp", "d1", "d2", "dwt4hz", "dwt2hz", "dwt1hz"];
pub const STATS: [&str; 4] = ["mean", "std", "max", "min"];
pub const ACC_CHANNELS: [&str; 4] = ["accx", "accy", "accz", "accmag"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureSet {
    EdaOnly,
    AccOnly,
    All,
}

impl FeatureSet {
    pub const ALL: [FeatureSet; 3] = [FeatureSet::All, FeatureSet::AccOnly, FeatureSet::EdaOnly];

    pub fn n_features(self) -> usize {
        match self {
            FeatureSet::EdaOnly => EDA_FEATURES,
            FeatureSet::AccOnly => ACC_FEATURES,
            FeatureSet::All => EDA_FEATURES + ACC_FEATURES,
        }
    }

    /// Short name used on the command line: `eda`, `acc`, `all`.
    pub fn short_name(self) -> &'static str {
        match self {
            FeatureSet::EdaOnly => "eda",
            FeatureSet::AccOnly => "acc",
            FeatureSet::All => "all",
        }
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for FeatureSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eda" | "eda-only" => Ok(FeatureSet::EdaOnly),
            "acc" | "acc-only" => Ok(FeatureSet::AccOnly),
            "all" => Ok(FeatureSet::All),
            _ => Err(Error::invalid(format!("unknown feature set {s:?} (eda, acc, all)"))),
        }
    }
}

fn channel_names(channel: &str) -> impl Iterator<Item = String> + '_ {
    SIGNALS
        .iter()
        .flat_map(move |sig| STATS.iter().map(move |st| format!("{channel}_{sig}_{st}")))
}

/// Registry order: EDA features, then accelerometer x, y, z, magnitude.
pub fn feature_names(set: FeatureSet) -> Vec<String> {
    let eda = || channel_names("eda");
    let acc = || ACC_CHANNELS.iter().flat_map(|c| channel_names(c));
    match set {
        FeatureSet::EdaOnly => eda().collect(),
        FeatureSet::AccOnly => acc().collect(),
        FeatureSet::All => eda().chain(acc()).collect(),
    }
}

/// The 24 statistics of one channel, in registry order.
pub fn channel_features(samples: &[f64], fs: f64) -> Result<Vec<f64>> {
    let d1 = first_derivative(samples, fs)?;
    let d2 = first_derivative(&d1, fs)?;
    let dwt = haar_dwt(samples)?;
    let signals: [&[f64]; 6] = [samples, &d1, &d2, &dwt.level1, &dwt.level2, &dwt.level3];
    let mut out = Vec::with_capacity(FEATURES_PER_CHANNEL);
    for s in signals {
        out.extend(summary_stats(s)?.to_array());
    }
    Ok(out)
}

pub fn eda_features(window: &Window) -> Result<Vec<f64>> {
    channel_features(&window.eda_us, window.sampling_rate_hz)
}

pub fn acc_features(window: &Window) -> Result<Vec<f64>> {
    let mag = acc_magnitude(&window.acc_x_g, &window.acc_y_g, &window.acc_z_g)?;
    let mut out = Vec::with_capacity(ACC_FEATURES);
    for axis in window.acc_axes() {
        out.extend(channel_features(axis, window.sampling_rate_hz)?);
    }
    out.extend(channel_features(&mag, window.sampling_rate_hz)?);
    Ok(out)
}

/// One row per window, in input order.
pub fn assemble(windows: &[Window], set: FeatureSet) -> Result<FeatureMatrix> {
    if windows.is_empty() {
        return Err(Error::invalid("assemble: no windows"));
    }
    let width = set.n_features();
    let mut data = Vec::with_capacity(windows.len() * width);
    for w in windows {
        if matches!(set, FeatureSet::EdaOnly | FeatureSet::All) {
            data.extend(eda_features(w)?);
        }
        if matches!(set, FeatureSet::AccOnly | FeatureSet::All) {
            data.extend(acc_features(w)?);
        }
    }
    let values = Matrix::from_vec(windows.len(), width, data)?;
    let row_ids = windows
        .iter()
        .map(|w| RowId {
            subject_id: w.subject_id.clone(),
            segment_id: w.segment_id.clone(),
            window_index: w.window_index,
        })
        .collect();
    let names = feature_names(set);
    let groups = names
        .iter()
        .map(|n| if n.starts_with("eda_") { FeatureGroup::Eda } else { FeatureGroup::Acc })
        .collect();
    FeatureMatrix::new(row_ids, names, groups, values)
}
