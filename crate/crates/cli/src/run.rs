//! Run configuration shared by `eval` and `sweep`, and the two commands.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::Args;
use eda_artifacts::detectors::{Algorithm, Hyperparameters};
use eda_artifacts::eval::{
    run_in_sample, run_out_of_sample, sensitivity_sweep, Dataset, EvalConfig, Grid, Grouping, SelectionMetric,
    SweepTarget,
};
use eda_artifacts::featurize::FeatureSet;
use eda_artifacts::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::commands::{create_dir, read_json, write_text};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolChoice {
    #[default]
    InSample,
    OutOfSample,
}

impl std::str::FromStr for ProtocolChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "in-sample" => Ok(Self::InSample),
            "out-of-sample" => Ok(Self::OutOfSample),
            _ => Err(Error::InvalidArgument(format!(
                "unknown protocol {s:?} (in-sample, out-of-sample)"
            ))),
        }
    }
}

/// Experiment definition. Relative paths are taken from the working
/// directory; command-line flags replace the matching fields.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub protocol: ProtocolChoice,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifest: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train_manifest: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_manifest: Option<PathBuf>,
    /// Algorithm names, or `["all"]`.
    pub algorithms: Vec<String>,
    /// Feature-set names, or `["all-sets"]` / `["*"]` for all three.
    pub feature_sets: Vec<String>,
    /// Out-of-sample only: restrict the test side to another feature set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_feature_set: Option<String>,
    /// Per-algorithm grid replacing the default one.
    pub grids: BTreeMap<String, Grid>,
    /// Per-algorithm fixed hyperparameter values.
    pub hyperparameters: BTreeMap<String, BTreeMap<String, f64>>,
    pub grouping: Option<Grouping>,
    pub selection: Option<SelectionMetric>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Sweep only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub param: Option<String>,
    /// Sweep only.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Run configuration (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long)]
    train_manifest: Option<PathBuf>,
    #[arg(long)]
    test_manifest: Option<PathBuf>,
    /// `in-sample` or `out-of-sample`.
    #[arg(long)]
    protocol: Option<String>,
    /// Comma-separated algorithm names, or `all`.
    #[arg(long, visible_alias = "algorithms", value_delimiter = ',')]
    algorithm: Vec<String>,
    /// Comma-separated `eda`, `acc`, `all`; `--feature-sets all` selects all three.
    #[arg(long, value_delimiter = ',')]
    feature_set: Vec<String>,
    #[arg(long, value_delimiter = ',', conflicts_with = "feature_set")]
    feature_sets: Vec<String>,
    #[arg(long)]
    test_feature_set: Option<String>,
    /// Grid JSON: `{"name": [values]}` or `{"<algorithm>": {"name": [values]}}`.
    #[arg(long)]
    grid: Option<PathBuf>,
    /// `subject`, `segment` or `auto`.
    #[arg(long)]
    grouping: Option<String>,
    /// `pooled-auc` or `accuracy`.
    #[arg(long)]
    selection: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Parent of the per-run output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct EvalArgs {
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Hyperparameter to vary.
    #[arg(long)]
    param: Option<String>,
    /// Comma-separated values, or an inclusive range `start:end[:step]`.
    #[arg(long)]
    values: Option<String>,
}

fn parse_values(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidArgument(format!("cannot parse values {s:?}"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let (start, end) = (num(parts[0])?, num(parts.get(1).ok_or_else(bad)?)?);
        let step = parts.get(2).map(|t| num(t)).transpose()?.unwrap_or(1.0);
        if parts.len() > 3 || !(step > 0.0) || end < start {
            return Err(bad());
        }
        let n = ((end - start) / step + 1e-9).floor() as usize;
        Ok((0..=n).map(|i| start + i as f64 * step).collect())
    } else {
        s.split(',').map(num).collect()
    }
}

fn load_grids(path: &Path, algorithms: &[Algorithm]) -> Result<BTreeMap<String, Grid>> {
    let v: serde_json::Value = read_json(path)?;
    let obj = v
        .as_object()
        .ok_or_else(|| Error::InvalidArgument(format!("{}: grid must be a JSON object", path.display())))?;
    let per_algorithm = !obj.is_empty() && obj.keys().all(|k| k.parse::<Algorithm>().is_ok());
    if per_algorithm {
        Ok(serde_json::from_value(v)?)
    } else {
        let g: Grid = serde_json::from_value(v)?;
        Ok(algorithms.iter().map(|a| (a.name().to_string(), g.clone())).collect())
    }
}

fn feature_set_list(names: &[String]) -> Result<Vec<FeatureSet>> {
    if names.is_empty() {
        return Ok(vec![FeatureSet::EdaOnly]);
    }
    if names.len() == 1 && matches!(names[0].as_str(), "*" | "all-sets") {
        return Ok(FeatureSet::ALL.to_vec());
    }
    names.iter().map(|n| n.parse()).collect()
}

fn algorithm_list(names: &[String]) -> Result<Vec<Algorithm>> {
    if names.len() == 1 && names[0] == "all" {
        return Ok(Algorithm::ALL.to_vec());
    }
    if names.is_empty() {
        return Err(Error::InvalidArgument("no algorithm given (--algorithm)".into()));
    }
    names.iter().map(|n| n.parse()).collect()
}

impl RunConfig {
    fn resolve(args: &RunArgs) -> Result<RunConfig> {
        let mut c: RunConfig = match &args.config {
            Some(p) => read_json(p)?,
            None => RunConfig::default(),
        };
        if let Some(p) = &args.protocol {
            c.protocol = p.parse()?;
        }
        for (slot, flag) in [
            (&mut c.manifest, &args.manifest),
            (&mut c.train_manifest, &args.train_manifest),
            (&mut c.test_manifest, &args.test_manifest),
            (&mut c.out, &args.out),
        ] {
            if flag.is_some() {
                slot.clone_from(flag);
            }
        }
        if !args.algorithm.is_empty() {
            c.algorithms = args.algorithm.clone();
        }
        // `--feature-sets all` means every set; `--feature-set all` is the 120-column set
        if !args.feature_sets.is_empty() {
            c.feature_sets = if args.feature_sets == ["all"] {
                vec!["*".into()]
            } else {
                args.feature_sets.clone()
            };
        } else if !args.feature_set.is_empty() {
            c.feature_sets = args.feature_set.clone();
        }
        if args.test_feature_set.is_some() {
            c.test_feature_set.clone_from(&args.test_feature_set);
        }
        if let Some(g) = &args.grouping {
            c.grouping = Some(g.parse()?);
        }
        if let Some(s) = &args.selection {
            c.selection = Some(match s.as_str() {
                "pooled-auc" | "auc" => SelectionMetric::PooledAuc,
                "accuracy" => SelectionMetric::Accuracy,
                _ => return Err(Error::InvalidArgument(format!("unknown selection metric {s:?}"))),
            });
        }
        if args.seed.is_some() {
            c.seed = args.seed;
        }
        if let Some(p) = &args.grid {
            let algs = algorithm_list(&c.algorithms)?;
            c.grids.extend(load_grids(p, &algs)?);
        }
        if c.seed.is_none() {
            return Err(Error::InvalidArgument("a seed is required (--seed or \"seed\" in the config)".into()));
        }
        Ok(c)
    }

    fn seed(&self) -> u64 {
        self.seed.expect("resolved config has a seed")
    }

    /// Eight hex digits of SHA-256 over the config without seed and output
    /// location.
    fn hash(&self) -> Result<String> {
        let mut c = self.clone();
        c.seed = None;
        c.out = None;
        let canonical = serde_json::to_string(&serde_json::to_value(&c)?)?;
        Ok(hex::encode(Sha256::digest(canonical.as_bytes()))[..8].to_string())
    }

    fn run_dir(&self, kind: &str) -> Result<PathBuf> {
        let parent = self.out.clone().unwrap_or_else(|| PathBuf::from("runs"));
        let dir = parent.join(format!("{kind}-{}-seed{}", self.hash()?, self.seed()));
        create_dir(&dir)?;
        let mut text = serde_json::to_string_pretty(&serde_json::to_value(self)?)?;
        text.push('\n');
        write_text(&dir.join("run.json"), &text)?;
        Ok(dir)
    }

    fn eval_config(&self, algorithm: Algorithm, set: FeatureSet) -> Result<EvalConfig> {
        let mut cfg = EvalConfig::new(algorithm, set, self.seed());
        if let Some(g) = self.grids.get(algorithm.name()) {
            cfg.grid = g.clone();
        }
        if let Some(values) = self.hyperparameters.get(algorithm.name()) {
            for (name, v) in values {
                cfg.base.set(name, *v)?;
            }
        }
        if let Some(g) = self.grouping {
            cfg.grouping = g;
        }
        if let Some(s) = self.selection {
            cfg.selection = s;
        }
        Ok(cfg)
    }

    fn datasets(&self) -> Result<Datasets> {
        let need = |p: &Option<PathBuf>, flag: &str| {
            p.clone()
                .ok_or_else(|| Error::InvalidArgument(format!("{flag} is required for this protocol")))
        };
        match self.protocol {
            ProtocolChoice::InSample => Ok(Datasets::InSample(Dataset::load(need(&self.manifest, "--manifest")?)?)),
            ProtocolChoice::OutOfSample => Ok(Datasets::OutOfSample(
                Dataset::load(need(&self.train_manifest, "--train-manifest")?)?,
                Dataset::load(need(&self.test_manifest, "--test-manifest")?)?,
            )),
        }
    }

    fn test_side(&self, test: &Dataset) -> Result<Dataset> {
        match &self.test_feature_set {
            Some(name) => {
                let ts: FeatureSet = name.parse()?;
                Dataset::from_features(test.id.clone(), test.view(ts)?, test.labels().to_vec())
            }
            None => Ok(test.clone()),
        }
    }
}

enum Datasets {
    InSample(Dataset),
    OutOfSample(Dataset, Dataset),
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into())
}

pub fn eval(args: &EvalArgs) -> Result<()> {
    let cfg = RunConfig::resolve(&args.run)?;
    let algorithms = algorithm_list(&cfg.algorithms)?;
    let sets = feature_set_list(&cfg.feature_sets)?;
    let data = cfg.datasets()?;
    let dir = cfg.run_dir("eval")?;
    let mut summary = String::from("algorithm,feature_set,pooled_auc,mean_fold_auc\n");
    let mut table: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (ai, &a) in algorithms.iter().enumerate() {
        for (si, &set) in sets.iter().enumerate() {
            let ec = cfg.eval_config(a, set)?;
            let report = match &data {
                Datasets::InSample(d) => run_in_sample(d, &ec)?,
                Datasets::OutOfSample(train, test) => run_out_of_sample(train, &cfg.test_side(test)?, &ec)?,
            };
            let stem = format!("{}-{a}-{}", report.protocol, set.short_name());
            report.write_json(dir.join(format!("{stem}.json")))?;
            report.write_roc_csv(dir.join(format!("{stem}.roc.csv")))?;
            writeln!(summary, "{a},{},{},{}", set.short_name(), report.pooled_auc, fmt_opt(report.mean_fold_auc)).unwrap();
            eprintln!(
                "{a} / {}: pooled AUC {:.4} ({:.1} s)",
                set.short_name(),
                report.pooled_auc,
                report.wall_clock_s
            );
            table.insert((ai, si), report.pooled_auc);
        }
    }
    write_text(&dir.join("summary.csv"), &summary)?;
    let mut out = format!("{:<20}", "algorithm");
    for s in &sets {
        write!(out, " {:>8}", s.short_name()).unwrap();
    }
    out.push('\n');
    for (ai, a) in algorithms.iter().enumerate() {
        write!(out, "{:<20}", a.name()).unwrap();
        for si in 0..sets.len() {
            write!(out, " {:>8.4}", table[&(ai, si)]).unwrap();
        }
        out.push('\n');
    }
    print!("{out}");
    println!("reports in {}", dir.display());
    Ok(())
}

pub fn sweep(args: &SweepArgs) -> Result<()> {
    let mut cfg = RunConfig::resolve(&args.run)?;
    if let Some(p) = &args.param {
        cfg.param = Some(p.clone());
    }
    if let Some(v) = &args.values {
        cfg.values = parse_values(v)?;
    }
    let algorithms = algorithm_list(&cfg.algorithms)?;
    let sets = feature_set_list(&cfg.feature_sets)?;
    if algorithms.len() != 1 || sets.len() != 1 {
        return Err(Error::InvalidArgument("sweep takes exactly one algorithm and one feature set".into()));
    }
    let param = cfg
        .param
        .clone()
        .ok_or_else(|| Error::InvalidArgument("sweep needs --param".into()))?;
    if cfg.values.is_empty() {
        return Err(Error::InvalidArgument("sweep needs --values".into()));
    }
    // the swept name must exist before any data is read
    Hyperparameters::default_for(algorithms[0]).set(&param, cfg.values[0])?;
    let ec = cfg.eval_config(algorithms[0], sets[0])?;
    let data = cfg.datasets()?;
    let dir = cfg.run_dir("sweep")?;
    let report = match &data {
        Datasets::InSample(d) => sensitivity_sweep(SweepTarget::InSample(d), &ec, &param, &cfg.values)?,
        Datasets::OutOfSample(train, test) => sensitivity_sweep(
            SweepTarget::OutOfSample { train, test },
            &ec,
            &param,
            &cfg.values,
        )?,
    };
    let stem = format!("sweep-{}-{param}-{}", algorithms[0], sets[0].short_name());
    report.write_csv(dir.join(format!("{stem}.csv")))?;
    report.write_json(dir.join(format!("{stem}.json")))?;
    print!("{}", report.csv());
    eprintln!(
        "{} {param} over {} values: AUC spread {:.4}",
        algorithms[0],
        report.points.len(),
        report.spread
    );
    println!("reports in {}", dir.display());
    Ok(())
}
