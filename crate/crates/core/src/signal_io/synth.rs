//! Seeded synthetic EDA + accelerometer generator.
//!
//! Skin conductance is a drifting baseline plus skin-conductance responses
//! (smooth rise, exponential decay) plus motion artifacts, plus white noise.
//! Artifacts come in three shapes, each containing an abrupt sample-to-sample
//! change of at least `ma_drop_min_us`:
//!
//! * `Drop`: sudden fall, held for a while, then a sudden return;
//! * `Step`: a permanent sudden level shift (mostly downward);
//! * `Plateau`: sudden rise to a flat top without decay, then a sudden fall.
//!
//! Accelerometer bursts are attached to each artifact with probability
//! `acc_motion_prob_given_ma` and dropped into each artifact-free 5 s slot
//! with probability `acc_motion_prob_given_clean`, so motion shows up both
//! with and without artifacts.

use serde::{Deserialize, Serialize};

use super::{ExpertLabels, Recording, WindowLabel, CANONICAL_RATE_HZ};
use crate::dsp::WINDOW_SECONDS;
use crate::numkit::RngStream;
use crate::{Error, Result};

/// Rise time range of a skin-conductance response, in seconds.
pub const SCR_RISE_RANGE_S: [f64; 2] = [0.5, 2.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub duration_s: f64,
    /// Starting skin-conductance level.
    pub baseline_us: f64,
    pub scr_rate_per_min: f64,
    pub scr_amplitude_range_us: [f64; 2],
    pub scr_decay_tau_range_s: [f64; 2],
    pub ma_rate_per_min: f64,
    pub ma_drop_min_us: f64,
    /// Permits `ma_drop_min_us` below 0.1 µS.
    pub allow_small_ma: bool,
    pub ma_step_range_us: [f64; 2],
    /// How long `Drop` and `Plateau` artifacts hold their level.
    pub ma_hold_range_s: [f64; 2],
    /// Standard deviation of the baseline random walk per √s.
    pub baseline_drift_scale: f64,
    pub acc_motion_prob_given_ma: f64,
    pub acc_motion_prob_given_clean: f64,
    pub acc_burst_amplitude_range_g: [f64; 2],
    pub acc_noise_std_g: f64,
    pub noise_std_us: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            duration_s: 600.0,
            baseline_us: 4.0,
            scr_rate_per_min: 2.0,
            scr_amplitude_range_us: [0.05, 0.5],
            scr_decay_tau_range_s: [2.0, 6.0],
            ma_rate_per_min: 1.5,
            ma_drop_min_us: 0.1,
            allow_small_ma: false,
            ma_step_range_us: [0.2, 1.0],
            ma_hold_range_s: [0.5, 3.0],
            baseline_drift_scale: 0.01,
            acc_motion_prob_given_ma: 0.7,
            acc_motion_prob_given_clean: 0.1,
            acc_burst_amplitude_range_g: [0.2, 1.0],
            acc_noise_std_g: 0.01,
            noise_std_us: 0.005,
            seed: 0,
        }
    }
}

fn check_range(name: &str, r: [f64; 2], positive: bool) -> Result<()> {
    let ok = r[0].is_finite() && r[1].is_finite() && r[0] <= r[1] && (!positive || r[0] > 0.0);
    if ok && r[0] >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name}: invalid range {r:?}")))
    }
}

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be >= 0, got {v}")))
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.duration_s >= WINDOW_SECONDS) || !self.duration_s.is_finite() {
            return Err(Error::invalid(format!(
                "duration {} s is shorter than one {WINDOW_SECONDS} s window",
                self.duration_s
            )));
        }
        check_nonneg("baseline_us", self.baseline_us)?;
        check_nonneg("scr_rate_per_min", self.scr_rate_per_min)?;
        check_nonneg("ma_rate_per_min", self.ma_rate_per_min)?;
        check_nonneg("baseline_drift_scale", self.baseline_drift_scale)?;
        check_nonneg("noise_std_us", self.noise_std_us)?;
        check_nonneg("acc_noise_std_g", self.acc_noise_std_g)?;
        check_nonneg("ma_drop_min_us", self.ma_drop_min_us)?;
        check_range("scr_amplitude_range_us", self.scr_amplitude_range_us, false)?;
        check_range("scr_decay_tau_range_s", self.scr_decay_tau_range_s, true)?;
        check_range("ma_step_range_us", self.ma_step_range_us, false)?;
        check_range("ma_hold_range_s", self.ma_hold_range_s, false)?;
        check_range("acc_burst_amplitude_range_g", self.acc_burst_amplitude_range_g, false)?;
        if self.ma_drop_min_us < 0.1 && !self.allow_small_ma {
            return Err(Error::invalid(format!(
                "ma_drop_min_us {} is below 0.1 µS; set allow_small_ma to override",
                self.ma_drop_min_us
            )));
        }
        if self.ma_step_range_us[1] < self.ma_drop_min_us {
            return Err(Error::invalid(
                "ma_step_range_us lies entirely below ma_drop_min_us",
            ));
        }
        for (name, p) in [
            ("acc_motion_prob_given_ma", self.acc_motion_prob_given_ma),
            ("acc_motion_prob_given_clean", self.acc_motion_prob_given_clean),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MaKind {
    Drop,
    Step,
    Plateau,
}

/// Ground-truth artifact extent. Covers samples `first_sample..=last_sample`,
/// i.e. the half-open time range `[start_s, end_s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaInterval {
    pub kind: MaKind,
    pub start_s: f64,
    pub end_s: f64,
    pub first_sample: usize,
    pub last_sample: usize,
    pub magnitude_us: f64,
}

impl MaInterval {
    pub fn duration_s(&self) -> f64 {
        self.end_s - self.start_s
    }
}

/// Labels window `w` Artifact iff it shares at least one sample with an
/// interval.
pub fn window_labels(intervals: &[MaInterval], n_windows: usize, samples_per_window: usize) -> Vec<WindowLabel> {
    let mut out = vec![WindowLabel::Clean; n_windows];
    for iv in intervals {
        let first = iv.first_sample / samples_per_window;
        let last = (iv.last_sample / samples_per_window).min(n_windows.saturating_sub(1));
        for label in out.iter_mut().take(last + 1).skip(first) {
            *label = WindowLabel::Artifact;
        }
    }
    out
}

struct Burst {
    start: usize,
    len: usize,
}

/// Generates one recording and the exact extents of the artifacts injected
/// into it. Identifiers are left empty.
pub fn generate_synthetic_recording(config: &SynthConfig) -> Result<(Recording, Vec<MaInterval>)> {
    config.validate()?;
    let fs = CANONICAL_RATE_HZ;
    let n = (config.duration_s * fs).floor() as usize;
    let dt = 1.0 / fs;
    let mut rng = RngStream::new(config.seed);
    // Independent sub-streams keep, e.g., the SCR draws unchanged when only
    // the accelerometer settings differ.
    let mut scr_rng = RngStream::derived(config.seed, 0x5C5);
    let mut ma_rng = RngStream::derived(config.seed, 0x3A);
    let mut acc_rng = RngStream::derived(config.seed, 0xACC);

    // tonic level: random walk
    let mut eda = Vec::with_capacity(n);
    let mut level = config.baseline_us;
    let drift_step = config.baseline_drift_scale * dt.sqrt();
    for _ in 0..n {
        eda.push(level);
        level += drift_step * rng.normal();
    }

    // phasic responses
    if config.scr_rate_per_min > 0.0 {
        let rate = config.scr_rate_per_min / 60.0;
        let mut t = scr_rng.exponential(rate);
        while t < config.duration_s {
            let [alo, ahi] = config.scr_amplitude_range_us;
            let amp = scr_rng.uniform(alo, ahi);
            let rise = scr_rng.uniform(SCR_RISE_RANGE_S[0], SCR_RISE_RANGE_S[1]);
            let [tlo, thi] = config.scr_decay_tau_range_s;
            let tau = scr_rng.uniform(tlo, thi);
            let first = (t * fs).ceil() as usize;
            let last = (((t + rise + 8.0 * tau) * fs).ceil() as usize).min(n);
            for (i, v) in eda.iter_mut().enumerate().take(last).skip(first) {
                let u = i as f64 * dt - t;
                *v += if u <= rise {
                    amp * 0.5 * (1.0 - (std::f64::consts::PI * u / rise).cos())
                } else {
                    amp * (-(u - rise) / tau).exp()
                };
            }
            t += scr_rng.exponential(rate);
        }
    }

    // artifacts
    let mut intervals = Vec::new();
    if config.ma_rate_per_min > 0.0 {
        let rate = config.ma_rate_per_min / 60.0;
        let mut t = ma_rng.exponential(rate);
        while t < config.duration_s {
            let s = ((t * fs).ceil() as usize).max(1);
            if s >= n {
                break;
            }
            let lo = config.ma_step_range_us[0].max(config.ma_drop_min_us);
            let m = ma_rng.uniform(lo, config.ma_step_range_us[1]);
            let kind = match ma_rng.below(3) {
                0 => MaKind::Drop,
                1 => MaKind::Step,
                _ => MaKind::Plateau,
            };
            let hold = ((ma_rng.uniform(config.ma_hold_range_s[0], config.ma_hold_range_s[1]) * fs)
                .round() as usize)
                .max(1);
            let (offset, end) = match kind {
                MaKind::Drop => (-m, (s + hold).min(n)),
                MaKind::Plateau => (m, (s + hold).min(n)),
                MaKind::Step => {
                    let sign = if ma_rng.bernoulli(0.7) { -1.0 } else { 1.0 };
                    (sign * m, n)
                }
            };
            for v in &mut eda[s..end] {
                *v += offset;
            }
            // The abrupt change sits between samples s-1 and s (and, for a
            // held artifact, between end-1 and end).
            let last_sample = match kind {
                MaKind::Step => s,
                _ => end.min(n - 1),
            };
            let first_sample = s - 1;
            intervals.push(MaInterval {
                kind,
                start_s: first_sample as f64 * dt,
                end_s: (last_sample + 1) as f64 * dt,
                first_sample,
                last_sample,
                magnitude_us: m,
            });
            t += ma_rng.exponential(rate);
        }
    }

    for v in eda.iter_mut() {
        *v = (*v + config.noise_std_us * rng.normal()).max(0.0);
    }

    // accelerometer
    let mut bursts = Vec::new();
    for iv in &intervals {
        if acc_rng.bernoulli(config.acc_motion_prob_given_ma) {
            let len = (acc_rng.uniform(1.0, 3.0) * fs) as usize;
            let lead = (acc_rng.uniform(0.0, 1.0) * fs) as usize;
            let start = iv.first_sample.saturating_sub(lead);
            bursts.push(Burst { start, len: len.min(n - start) });
        }
    }
    let spw = (WINDOW_SECONDS * fs) as usize;
    let n_slots = n / spw;
    let truth = window_labels(&intervals, n_slots, spw);
    for (slot, label) in truth.iter().enumerate() {
        // draw unconditionally so the stream position does not depend on labels
        let hit = acc_rng.bernoulli(config.acc_motion_prob_given_clean);
        let len = (acc_rng.uniform(1.0, 4.0) * fs) as usize;
        let offset = acc_rng.index(spw - len + 1);
        if hit && *label == WindowLabel::Clean {
            bursts.push(Burst { start: slot * spw + offset, len });
        }
    }
    bursts.sort_by_key(|b| b.start);

    let mut orientation = random_orientation(&mut acc_rng);
    let mut acc = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let mut next_burst = 0;
    let mut i = 0;
    while i < n {
        if next_burst < bursts.len() && bursts[next_burst].start <= i {
            let b = &bursts[next_burst];
            next_burst += 1;
            let [alo, ahi] = config.acc_burst_amplitude_range_g;
            let amp = acc_rng.uniform(alo, ahi);
            let axes: [(f64, f64, f64); 3] = std::array::from_fn(|_| {
                (
                    amp * acc_rng.uniform(0.3, 1.0),
                    acc_rng.uniform(0.5, 3.0),
                    acc_rng.uniform(0.0, std::f64::consts::TAU),
                )
            });
            let end = (b.start + b.len).min(n);
            for k in b.start.max(i)..end {
                let u = (k - b.start) as f64 / b.len.max(1) as f64;
                let taper = 0.5 * (1.0 - (std::f64::consts::TAU * u).cos());
                let tk = k as f64 * dt;
                for (ch, &(a, f, ph)) in acc.iter_mut().zip(&axes) {
                    ch[k] += taper
                        * (a * (std::f64::consts::TAU * f * tk + ph).sin()
                            + 0.2 * a * acc_rng.normal());
                }
            }
            if acc_rng.bernoulli(0.5) {
                orientation = random_orientation(&mut acc_rng);
            }
            continue;
        }
        for (ch, g) in acc.iter_mut().zip(orientation) {
            ch[i] += g + config.acc_noise_std_g * acc_rng.normal();
        }
        i += 1;
    }

    let recording = Recording::new(String::new(), String::new(), fs, eda, acc)?;
    Ok((recording, intervals))
}

fn random_orientation(rng: &mut RngStream) -> [f64; 3] {
    let tilt = rng.uniform(0.0, 0.6);
    let azimuth = rng.uniform(0.0, std::f64::consts::TAU);
    [
        tilt.sin() * azimuth.cos(),
        tilt.sin() * azimuth.sin(),
        tilt.cos(),
    ]
}

/// A multi-subject, multi-segment synthetic dataset description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthDatasetConfig {
    pub name: String,
    pub subjects: usize,
    pub segments_per_subject: usize,
    pub recording: SynthConfig,
    /// Per-subject starting SC level is drawn from this range.
    pub subject_baseline_range_us: [f64; 2],
    /// Each expert independently flips each ground-truth label with this
    /// probability before majority fusion.
    pub expert_flip_prob: f64,
    pub activity_tag: String,
    pub seed: u64,
}

impl Default for SynthDatasetConfig {
    fn default() -> Self {
        Self {
            name: "synthetic".into(),
            subjects: 2,
            segments_per_subject: 5,
            recording: SynthConfig::default(),
            subject_baseline_range_us: [2.0, 8.0],
            expert_flip_prob: 0.0,
            activity_tag: "synthetic".into(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticSegment {
    pub recording: Recording,
    pub intervals: Vec<MaInterval>,
    pub labels: ExpertLabels,
    pub activity_tag: String,
}

/// Generates every segment of a dataset. Subjects are named `s01, s02, …`
/// and segments `<subject>_seg<k>`.
pub fn generate_synthetic_dataset(config: &SynthDatasetConfig) -> Result<Vec<SyntheticSegment>> {
    if config.subjects == 0 || config.segments_per_subject == 0 {
        return Err(Error::invalid("dataset needs at least one subject and one segment"));
    }
    check_range("subject_baseline_range_us", config.subject_baseline_range_us, false)?;
    if !(0.0..=1.0).contains(&config.expert_flip_prob) {
        return Err(Error::invalid("expert_flip_prob must lie in [0, 1]"));
    }
    config.recording.validate()?;
    let mut subject_rng = RngStream::derived(config.seed, 0x5B);
    let mut expert_rng = RngStream::derived(config.seed, 0xE7);
    let spw = (WINDOW_SECONDS * CANONICAL_RATE_HZ) as usize;
    let mut out = Vec::new();
    for s in 0..config.subjects {
        let [lo, hi] = config.subject_baseline_range_us;
        let baseline = subject_rng.uniform(lo, hi);
        let subject_id = format!("s{:02}", s + 1);
        for k in 0..config.segments_per_subject {
            let index = (s * config.segments_per_subject + k) as u64;
            let rc = SynthConfig {
                baseline_us: baseline,
                seed: mix_seed(config.seed, index),
                ..config.recording.clone()
            };
            let (mut recording, intervals) = generate_synthetic_recording(&rc)?;
            recording.subject_id = subject_id.clone();
            recording.segment_id = format!("{subject_id}_seg{k}");
            let truth = window_labels(&intervals, recording.len() / spw, spw);
            let rows = truth
                .iter()
                .map(|&t| {
                    std::array::from_fn(|_| {
                        if expert_rng.bernoulli(config.expert_flip_prob) {
                            match t {
                                WindowLabel::Clean => WindowLabel::Artifact,
                                WindowLabel::Artifact => WindowLabel::Clean,
                            }
                        } else {
                            t
                        }
                    })
                })
                .collect();
            out.push(SyntheticSegment {
                recording,
                intervals,
                labels: ExpertLabels::new(rows),
                activity_tag: config.activity_tag.clone(),
            });
        }
    }
    Ok(out)
}

fn mix_seed(seed: u64, index: u64) -> u64 {
    RngStream::derived(seed, index.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(1)).next_u64()
}
