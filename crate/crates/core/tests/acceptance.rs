//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Every tolerance and budget is pinned below.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::path::Path;
use std::time::{Duration, Instant};

use eda_artifacts::detectors::{logistic, mlp, svm, Algorithm, Hyperparameters};
use eda_artifacts::dsp::{haar_dwt, haar_inverse};
use eda_artifacts::eval::{
    roc_auc, roc_curve, run_in_sample, run_out_of_sample, sensitivity_sweep, trapezoid_area, Dataset,
    EvalConfig, EvalReport, Grid, SweepTarget,
};
use eda_artifacts::featurize::{assemble, FeatureSet};
use eda_artifacts::numkit::{squared_distance, Matrix, RngStream};
use eda_artifacts::signal_io::{generate_synthetic_dataset, SynthConfig, SynthDatasetConfig, WindowLabel};
use eda_artifacts::dsp::segment_windows;

// 1
const FEATURE_BUDGET: Duration = Duration::from_secs(1);
// 2
const DWT_WINDOWS: usize = 10_000;
const DWT_REL_TOL: f64 = 1e-9;
const DWT_FIRST_DETAIL_TOL: f64 = 1e-12;
const DWT_BUDGET: Duration = Duration::from_secs(5);
// 3
const AUC_SETS: usize = 1000;
const AUC_RANK_TOL: f64 = 1e-12;
const AUC_TRAPEZOID_TOL: f64 = 1e-9;
const AUC_BUDGET: Duration = Duration::from_secs(10);
// 4
const GRAD_PROBLEMS: usize = 100;
const GRAD_STEP: f64 = 1e-6;
const GRAD_REL_TOL: f64 = 1e-4;
const GRAD_BUDGET: Duration = Duration::from_secs(30);
// 5
const SMO_PROBLEMS: u64 = 50;
const SMO_EQUALITY_TOL: f64 = 1e-8;
const SMO_KKT_TOL: f64 = 1e-3;
const SMO_NUS: [f64; 3] = [0.1, 0.25, 0.5];
const SMO_BUDGET: Duration = Duration::from_secs(120);
// 6
const CORPUS_SEED: u64 = 2024;
const CORPUS_MINUTES: f64 = 12.0;
const PREVALENCE_BAND: [f64; 2] = [0.10, 0.20];
const EVAL_SEED: u64 = 1;
const MIN_AUC_UNSUPERVISED: f64 = 0.85;
const MIN_AUC_LOGISTIC: f64 = 0.90;
const PIN_TOL: f64 = 0.02;
// observed on the first run of this suite
const PINNED_KNN_DISTANCE: f64 = 0.9832;
const PINNED_ISOLATION_FOREST: f64 = 0.9846;
const PINNED_LOGISTIC: f64 = 0.9736;
const END_TO_END_BUDGET: Duration = Duration::from_secs(300);
// 7
const WEAK_P_GIVEN_CLEAN: f64 = 0.5;
const WEAK_P_GIVEN_MA: f64 = 0.5;
const MIN_UNSUPERVISED_DROP: f64 = 0.02;
const SUPERVISED_BAND: f64 = 0.02;
// 8
const FIELD_SEED: u64 = 7331;
const MAX_KNN_SPREAD: f64 = 0.05;
const SWEEP_BUDGET: Duration = Duration::from_secs(600);
// 10
const REAL_DATA_TOL: f64 = 0.05;

struct Outcome {
    id: u8,
    name: &'static str,
    status: Status,
    detail: String,
    elapsed: Duration,
}

#[derive(PartialEq)]
enum Status {
    Pass,
    Fail,
    Skip,
}

fn outcome(id: u8, name: &'static str, ok: bool, detail: String, start: Instant, budget: Option<Duration>) -> Outcome {
    let elapsed = start.elapsed();
    let in_budget = budget.is_none_or(|b| elapsed <= b);
    let mut detail = detail;
    if !in_budget {
        detail.push_str(&format!("; over budget {:.0?}", budget.unwrap()));
    }
    Outcome {
        id,
        name,
        status: if ok && in_budget { Status::Pass } else { Status::Fail },
        detail,
        elapsed,
    }
}

fn report(o: &Outcome) {
    let tag = match o.status {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Skip => "SKIP",
    };
    println!("{tag} [{}] {}: {} ({:.2}s)", o.id, o.name, o.detail, o.elapsed.as_secs_f64());
}

fn feature_counts() -> Outcome {
    let start = Instant::now();
    let segs = generate_synthetic_dataset(&SynthDatasetConfig {
        subjects: 1,
        segments_per_subject: 1,
        recording: SynthConfig {
            duration_s: 60.0,
            ..SynthConfig::default()
        },
        ..SynthDatasetConfig::default()
    })
    .unwrap();
    let windows = segment_windows(&segs[0].recording).unwrap();
    let widths: Vec<usize> = [FeatureSet::EdaOnly, FeatureSet::AccOnly, FeatureSet::All]
        .iter()
        .map(|&s| assemble(&windows, s).unwrap().n_cols())
        .collect();
    outcome(
        1,
        "feature counts",
        widths == [24, 96, 120],
        format!("eda {}, acc {}, all {}", widths[0], widths[1], widths[2]),
        start,
        Some(FEATURE_BUDGET),
    )
}

fn dwt_correctness() -> Outcome {
    let start = Instant::now();
    let mut rng = RngStream::new(12);
    let (mut worst_energy, mut worst_recon) = (0.0f64, 0.0f64);
    for _ in 0..DWT_WINDOWS {
        let x: Vec<f64> = (0..40).map(|_| rng.uniform(-5.0, 5.0)).collect();
        let d = haar_dwt(&x).unwrap();
        let e: f64 = x.iter().map(|v| v * v).sum();
        worst_energy = worst_energy.max((d.energy() - e).abs() / e);
        let back = haar_inverse(&d).unwrap();
        let err = back.iter().zip(&x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        worst_recon = worst_recon.max(err / e.sqrt());
    }
    let ramp: Vec<f64> = (1..=40).map(f64::from).collect();
    let first = haar_dwt(&ramp).unwrap().level1[0];
    let first_err = (first + FRAC_1_SQRT_2).abs();
    outcome(
        2,
        "haar dwt",
        worst_energy <= DWT_REL_TOL && worst_recon <= DWT_REL_TOL && first_err <= DWT_FIRST_DETAIL_TOL,
        format!("energy rel {worst_energy:.1e}, reconstruction rel {worst_recon:.1e}, first detail err {first_err:.1e}"),
        start,
        Some(DWT_BUDGET),
    )
}

fn pair_count_auc(s: &[f64], y: &[WindowLabel]) -> f64 {
    let (mut wins, mut pairs) = (0.0, 0.0);
    for (i, yi) in y.iter().enumerate() {
        if !yi.is_artifact() {
            continue;
        }
        for (j, yj) in y.iter().enumerate() {
            if yj.is_artifact() {
                continue;
            }
            pairs += 1.0;
            if s[i] > s[j] {
                wins += 1.0;
            } else if s[i] == s[j] {
                wins += 0.5;
            }
        }
    }
    wins / pairs
}

fn auc_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = RngStream::new(3);
    let (mut worst_rank, mut worst_trap) = (0.0f64, 0.0f64);
    for t in 0..AUC_SETS {
        let n = 2 + rng.index(200);
        // every third set draws from a handful of levels
        let levels = if t % 3 == 0 { 1 + rng.below(4) } else { 0 };
        let s: Vec<f64> = (0..n)
            .map(|_| if levels > 0 { rng.below(levels) as f64 } else { rng.normal() })
            .collect();
        let mut y: Vec<WindowLabel> = (0..n)
            .map(|_| if rng.bernoulli(0.3) { WindowLabel::Artifact } else { WindowLabel::Clean })
            .collect();
        y[rng.index(n)] = WindowLabel::Artifact;
        let clean = (0..n).find(|&i| !y[i].is_artifact());
        if clean.is_none() {
            y[0] = WindowLabel::Clean;
            y[1] = WindowLabel::Artifact;
        }
        let auc = roc_auc(&s, &y).unwrap();
        worst_rank = worst_rank.max((auc - pair_count_auc(&s, &y)).abs());
        worst_trap = worst_trap.max((trapezoid_area(&roc_curve(&s, &y).unwrap()) - auc).abs());
    }
    outcome(
        3,
        "auc oracle",
        worst_rank <= AUC_RANK_TOL && worst_trap <= AUC_TRAPEZOID_TOL,
        format!("rank vs pairs {worst_rank:.1e}, trapezoid vs rank {worst_trap:.1e}"),
        start,
        Some(AUC_BUDGET),
    )
}

fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let num = a.iter().zip(b).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt();
    let den = a.iter().map(|u| u * u).sum::<f64>().sqrt().max(b.iter().map(|v| v * v).sum::<f64>().sqrt());
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

fn random_problem(rng: &mut RngStream) -> (Matrix, Vec<f64>, Vec<f64>) {
    let n = 5 + rng.index(20);
    let d = 1 + rng.index(6);
    let data: Vec<f64> = (0..n * d).map(|_| rng.normal()).collect();
    let y: Vec<f64> = (0..n).map(|_| f64::from(u8::from(rng.bernoulli(0.5)))).collect();
    let w: Vec<f64> = (0..n).map(|_| rng.uniform(0.5, 2.0)).collect();
    (Matrix::from_vec(n, d, data).unwrap(), y, w)
}

fn central_difference(params: &[f64], f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    (0..params.len())
        .map(|k| {
            let mut p = params.to_vec();
            p[k] += GRAD_STEP;
            let up = f(&p);
            p[k] -= 2.0 * GRAD_STEP;
            (up - f(&p)) / (2.0 * GRAD_STEP)
        })
        .collect()
}

fn gradient_checks() -> Outcome {
    let start = Instant::now();
    let mut rng = RngStream::new(4);
    let (mut worst_lr, mut worst_mlp) = (0.0f64, 0.0f64);
    for t in 0..GRAD_PROBLEMS {
        let (x, y, w) = random_problem(&mut rng);
        let l2 = rng.uniform(0.0, 0.5);
        let params: Vec<f64> = (0..=x.n_cols()).map(|_| rng.normal()).collect();
        let (_, g) = logistic::loss_and_gradient(&x, &y, &w, &params, l2);
        let fd = central_difference(&params, |p| logistic::loss_and_gradient(&x, &y, &w, p, l2).0);
        worst_lr = worst_lr.max(relative_error(&g, &fd));

        let layers = 1 + t % 2;
        let width = 2 + rng.index(6);
        let model = mlp::MlpModel::init(x.n_cols(), layers, width, &mut rng);
        let mut flat = model.to_flat();
        flat.iter_mut().for_each(|p| *p += 0.1 * rng.normal());
        let mut model = model;
        model.set_flat(&flat);
        let rows: Vec<usize> = (0..x.n_rows()).collect();
        let g = mlp::loss_and_gradient(&model, &x, &y, &w, &rows, l2).1.to_flat();
        let fd = central_difference(&flat, |p| {
            let mut m = model.clone();
            m.set_flat(p);
            mlp::loss_and_gradient(&m, &x, &y, &w, &rows, l2).0
        });
        worst_mlp = worst_mlp.max(relative_error(&g, &fd));
    }
    outcome(
        4,
        "gradient checks",
        worst_lr <= GRAD_REL_TOL && worst_mlp <= GRAD_REL_TOL,
        format!("worst relative error logistic {worst_lr:.1e}, mlp {worst_mlp:.1e}"),
        start,
        Some(GRAD_BUDGET),
    )
}

/// Gradient rebuilt from the kernel, then the maximal violating pair gap.
fn kkt_gap(x: &Matrix, y: &[f64], p: &[f64], upper: &[f64], alpha: &[f64], gamma: f64) -> f64 {
    let n = x.n_rows();
    let g: Vec<f64> = (0..n)
        .map(|i| {
            p[i] + (0..n)
                .map(|j| y[i] * y[j] * (-gamma * squared_distance(x.row(i), x.row(j))).exp() * alpha[j])
                .sum::<f64>()
        })
        .collect();
    let up = (0..n).filter(|&t| (y[t] > 0.0 && alpha[t] < upper[t]) || (y[t] < 0.0 && alpha[t] > 0.0));
    let low = (0..n).filter(|&t| (y[t] > 0.0 && alpha[t] > 0.0) || (y[t] < 0.0 && alpha[t] < upper[t]));
    up.map(|t| -y[t] * g[t]).fold(f64::NEG_INFINITY, f64::max) - low.map(|t| -y[t] * g[t]).fold(f64::INFINITY, f64::min)
}

fn smo_validity() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let (mut worst_gap, mut worst_eq) = (0.0f64, 0.0f64);
    for seed in 0..SMO_PROBLEMS {
        let mut rng = RngStream::new(1000 + seed);
        let n = 30 + rng.index(31);
        let d = 2 + rng.index(3);
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for i in 0..n {
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            rows.push((0..d).map(|_| s * 2.0 + 0.4 * rng.normal()).collect::<Vec<f64>>());
            y.push(s);
        }
        let x = Matrix::from_rows(&rows, d).unwrap();
        let c = [0.5, 1.0, 10.0][seed as usize % 3];
        let gamma = rng.uniform(0.1, 1.0);
        let ones = vec![1.0; n];
        let sol = svm::solve_csvm(&x, &y, &ones, c, gamma).unwrap();
        let eq: f64 = sol.alpha.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>().abs();
        worst_eq = worst_eq.max(eq);
        if !sol.alpha.iter().all(|&a| (0.0..=c).contains(&a)) {
            failures.push(format!("seed {seed}: c-svm box"));
        }
        let gap = kkt_gap(&x, &y, &vec![-1.0; n], &vec![c; n], &sol.alpha, gamma);
        worst_gap = worst_gap.max(gap);
        let model = svm::fit_csvm(&x, &y, &ones, c, gamma).unwrap();
        let correct = x.rows_iter().zip(&y).filter(|(r, &t)| (model.decision(r) > 0.0) == (t > 0.0)).count();
        if correct != n {
            failures.push(format!("seed {seed}: training accuracy {correct}/{n}"));
        }
        for nu in SMO_NUS {
            let sol = svm::solve_one_class(&x, nu, gamma).unwrap();
            if !sol.alpha.iter().all(|&a| (0.0..=1.0).contains(&a)) {
                failures.push(format!("seed {seed}: one-class box"));
            }
            let total: f64 = sol.alpha.iter().sum();
            worst_eq = worst_eq.max((total - nu * n as f64).abs());
            let gap = kkt_gap(&x, &ones, &vec![0.0; n], &ones, &sol.alpha, gamma);
            worst_gap = worst_gap.max(gap);
            let bounded = sol.alpha.iter().filter(|&&a| a >= 1.0).count() as f64 / n as f64;
            let support = sol.alpha.iter().filter(|&&a| a > 0.0).count() as f64 / n as f64;
            if !(bounded <= nu && nu <= support) {
                failures.push(format!("seed {seed}: nu {nu} bounds {bounded:.3}..{support:.3}"));
            }
        }
    }
    let ok = failures.is_empty() && worst_eq <= SMO_EQUALITY_TOL && worst_gap <= SMO_KKT_TOL;
    let mut detail = format!("{SMO_PROBLEMS} problems, worst equality residual {worst_eq:.1e}, worst KKT gap {worst_gap:.1e}");
    if !failures.is_empty() {
        detail.push_str(&format!("; {}", failures.join(", ")));
    }
    outcome(5, "smo validity", ok, detail, start, Some(SMO_BUDGET))
}

fn corpus(p_clean: f64, p_ma: f64) -> Dataset {
    let cfg = SynthDatasetConfig {
        name: "corpus-a".into(),
        subjects: 2,
        segments_per_subject: 5,
        recording: SynthConfig {
            duration_s: CORPUS_MINUTES * 60.0,
            acc_motion_prob_given_clean: p_clean,
            acc_motion_prob_given_ma: p_ma,
            ..SynthConfig::default()
        },
        seed: CORPUS_SEED,
        ..SynthDatasetConfig::default()
    };
    Dataset::from_synthetic("corpus-a", &generate_synthetic_dataset(&cfg).unwrap()).unwrap()
}

/// A noisier corpus with more and larger responses and fewer artifacts,
/// playing the role of free-living data next to the lab-like corpus A.
fn field_corpus() -> Dataset {
    let cfg = SynthDatasetConfig {
        name: "corpus-b".into(),
        subjects: 2,
        segments_per_subject: 5,
        recording: SynthConfig {
            duration_s: CORPUS_MINUTES * 60.0,
            scr_rate_per_min: 3.0,
            scr_amplitude_range_us: [0.05, 0.7],
            ma_rate_per_min: 1.2,
            noise_std_us: 0.008,
            baseline_drift_scale: 0.015,
            ..SynthConfig::default()
        },
        subject_baseline_range_us: [3.0, 10.0],
        seed: FIELD_SEED,
        ..SynthDatasetConfig::default()
    };
    Dataset::from_synthetic("corpus-b", &generate_synthetic_dataset(&cfg).unwrap()).unwrap()
}

fn p2(e: i32) -> f64 {
    2f64.powi(e)
}

/// Compact grids sized for a single-core budget.
fn acceptance_grid(a: Algorithm) -> Grid {
    let ks = vec![1.0, 3.0, 5.0, 10.0, 20.0, 30.0];
    match a {
        Algorithm::LogisticRegression => Grid::new().with("l2_lambda", vec![p2(-10), p2(-6), p2(-2)]),
        Algorithm::Mlp => Grid::single(),
        Algorithm::Svm => Grid::new().with("c", vec![p2(-3), p2(1), p2(5)]).with("gamma", vec![p2(-9), p2(-5)]),
        Algorithm::KnnClassifier | Algorithm::KnnDistance => Grid::new().with("k", ks),
        Algorithm::RandomForest => Grid::single(),
        Algorithm::OneClassSvm => Grid::new().with("nu", vec![p2(-3), p2(-1)]).with("gamma", vec![p2(-7), p2(-5), p2(-3)]),
        Algorithm::IsolationForest => Grid::new().with("n_trees", vec![50.0, 100.0]),
    }
}

fn acceptance_config(a: Algorithm, set: FeatureSet) -> EvalConfig {
    let mut cfg = EvalConfig::new(a, set, EVAL_SEED).with_grid(acceptance_grid(a));
    if let Hyperparameters::RandomForest(p) = &mut cfg.base {
        p.n_trees = 50;
    }
    cfg
}

/// Reports written by criteria 6-8, keyed by file name.
type Artifacts = BTreeMap<String, String>;

struct EndToEnd {
    eda: BTreeMap<Algorithm, EvalReport>,
    all: BTreeMap<Algorithm, EvalReport>,
    eda_secs: BTreeMap<Algorithm, f64>,
    prevalence: f64,
    eda_identical: bool,
}

fn run_end_to_end(out: &mut Artifacts) -> EndToEnd {
    let base = corpus(SynthConfig::default().acc_motion_prob_given_clean, SynthConfig::default().acc_motion_prob_given_ma);
    let weak = corpus(WEAK_P_GIVEN_CLEAN, WEAK_P_GIVEN_MA);
    // ACC draws use their own stream, so the EDA features must not move
    let eda_identical = base.view(FeatureSet::EdaOnly).unwrap() == weak.view(FeatureSet::EdaOnly).unwrap()
        && base.labels() == weak.labels();
    let mut e = EndToEnd {
        eda: BTreeMap::new(),
        all: BTreeMap::new(),
        eda_secs: BTreeMap::new(),
        prevalence: base.artifact_fraction(),
        eda_identical,
    };
    for a in Algorithm::ALL {
        let t = Instant::now();
        let r = run_in_sample(&base, &acceptance_config(a, FeatureSet::EdaOnly)).unwrap();
        e.eda_secs.insert(a, t.elapsed().as_secs_f64());
        out.insert(format!("in-sample-{a}-eda.json"), r.to_canonical_json().unwrap());
        out.insert(format!("in-sample-{a}-eda.roc.csv"), r.roc_csv());
        e.eda.insert(a, r);
        let r = run_in_sample(&weak, &acceptance_config(a, FeatureSet::All)).unwrap();
        out.insert(format!("in-sample-{a}-all-weak.json"), r.to_canonical_json().unwrap());
        e.all.insert(a, r);
    }
    e
}

fn end_to_end(e: &EndToEnd, start: Instant) -> Outcome {
    let targets = [
        (Algorithm::KnnDistance, MIN_AUC_UNSUPERVISED, PINNED_KNN_DISTANCE),
        (Algorithm::IsolationForest, MIN_AUC_UNSUPERVISED, PINNED_ISOLATION_FOREST),
        (Algorithm::LogisticRegression, MIN_AUC_LOGISTIC, PINNED_LOGISTIC),
    ];
    let mut ok = (PREVALENCE_BAND[0]..=PREVALENCE_BAND[1]).contains(&e.prevalence);
    let mut parts = vec![format!("prevalence {:.3}", e.prevalence)];
    let mut secs = 0.0;
    for (a, min, pinned) in targets {
        let auc = e.eda[&a].pooled_auc;
        secs += e.eda_secs[&a];
        ok &= auc >= min && (auc - pinned).abs() <= PIN_TOL;
        parts.push(format!("{a} {auc:.4} (min {min}, pinned {pinned:.4})"));
    }
    let mut o = outcome(6, "synthetic end-to-end", ok, parts.join(", "), start, None);
    o.elapsed = Duration::from_secs_f64(secs);
    if o.elapsed > END_TO_END_BUDGET {
        o.status = Status::Fail;
        o.detail.push_str("; over budget");
    }
    o
}

fn ablation(e: &EndToEnd, start: Instant) -> Outcome {
    let mut ok = e.eda_identical;
    let mut parts = Vec::new();
    if !e.eda_identical {
        parts.push("EDA features differ between corpora".to_string());
    }
    for a in Algorithm::ALL {
        let (eda, all) = (e.eda[&a].pooled_auc, e.all[&a].pooled_auc);
        let delta = all - eda;
        let pass = if a.is_supervised() {
            delta.abs() <= SUPERVISED_BAND
        } else {
            delta <= -MIN_UNSUPERVISED_DROP
        };
        ok &= pass;
        parts.push(format!("{a} {eda:.3}->{all:.3} ({delta:+.3}{})", if pass { "" } else { " !" }));
    }
    outcome(7, "feature-set ablation", ok, parts.join(", "), start, None)
}

struct Sensitivity {
    knn_spread: f64,
    ocsvm_spread: f64,
    reverse_knn_spread: f64,
}

/// Trains on the field-like corpus and tests on the lab-like one.
fn run_sensitivity(out: &mut Artifacts) -> Sensitivity {
    let a = corpus(SynthConfig::default().acc_motion_prob_given_clean, SynthConfig::default().acc_motion_prob_given_ma);
    let b = field_corpus();
    let target = SweepTarget::OutOfSample { train: &b, test: &a };
    let ks: Vec<f64> = (1..=30).map(f64::from).collect();
    let knn_cfg = EvalConfig::new(Algorithm::KnnDistance, FeatureSet::EdaOnly, EVAL_SEED);
    let knn = sensitivity_sweep(target, &knn_cfg, "k", &ks).unwrap();
    let reverse = sensitivity_sweep(SweepTarget::OutOfSample { train: &a, test: &b }, &knn_cfg, "k", &ks).unwrap();
    let oc_cfg = EvalConfig::new(Algorithm::OneClassSvm, FeatureSet::EdaOnly, EVAL_SEED);
    let gammas = Grid::default_for(Algorithm::OneClassSvm).axes["gamma"].clone();
    let oc = sensitivity_sweep(target, &oc_cfg, "gamma", &gammas).unwrap();
    let tuned = run_out_of_sample(&b, &a, &acceptance_config(Algorithm::KnnDistance, FeatureSet::EdaOnly)).unwrap();
    out.insert("sweep-knn-distance-k.json".into(), knn.to_canonical_json().unwrap());
    out.insert("sweep-knn-distance-k.csv".into(), knn.csv());
    out.insert("sweep-knn-distance-k-reverse.csv".into(), reverse.csv());
    out.insert("sweep-one-class-svm-gamma.json".into(), oc.to_canonical_json().unwrap());
    out.insert("sweep-one-class-svm-gamma.csv".into(), oc.csv());
    out.insert("out-of-sample-knn-distance-eda.json".into(), tuned.to_canonical_json().unwrap());
    Sensitivity {
        knn_spread: knn.spread,
        ocsvm_spread: oc.spread,
        reverse_knn_spread: reverse.spread,
    }
}

fn sensitivity(s: &Sensitivity, start: Instant) -> Outcome {
    outcome(
        8,
        "hyperparameter sensitivity",
        s.knn_spread <= MAX_KNN_SPREAD && s.ocsvm_spread > s.knn_spread,
        format!(
            "field->lab: knn-distance k spread {:.4} (max {MAX_KNN_SPREAD}), one-class-svm gamma spread {:.4}; \
             lab->field knn-distance k spread {:.4} (not scored)",
            s.knn_spread, s.ocsvm_spread, s.reverse_knn_spread
        ),
        start,
        Some(SWEEP_BUDGET),
    )
}

fn write_all(dir: &Path, files: &Artifacts) {
    for (name, text) in files {
        std::fs::write(dir.join(name), text).unwrap();
    }
}

fn determinism(first: &Artifacts, start: Instant) -> Outcome {
    let dir1 = tempfile::tempdir().unwrap();
    let dir2 = tempfile::tempdir().unwrap();
    write_all(dir1.path(), first);
    let mut second = Artifacts::new();
    run_end_to_end(&mut second);
    run_sensitivity(&mut second);
    write_all(dir2.path(), &second);
    let mut differing = Vec::new();
    for name in first.keys().chain(second.keys()) {
        let a = std::fs::read(dir1.path().join(name)).ok();
        let b = std::fs::read(dir2.path().join(name)).ok();
        if a.is_none() || a != b {
            differing.push(name.clone());
        }
    }
    differing.dedup();
    outcome(
        9,
        "determinism",
        differing.is_empty(),
        format!("{} report files compared, {} differ {:?}", first.len(), differing.len(), differing),
        start,
        None,
    )
}

fn real_data() -> Outcome {
    let start = Instant::now();
    let vars = ["EDA_UTD_MANIFEST", "EDA_AWW_MANIFEST", "EDA_AWW_RESTING_MANIFEST", "EDA_AWW_WALKING_MANIFEST"];
    let paths: Vec<Option<String>> = vars.iter().map(|v| std::env::var(v).ok()).collect();
    if paths.iter().any(Option::is_none) {
        return Outcome {
            id: 10,
            name: "real data",
            status: Status::Skip,
            detail: format!("set {} to run", vars.join(", ")),
            elapsed: start.elapsed(),
        };
    }
    let load = |i: usize| Dataset::load(paths[i].as_ref().unwrap()).unwrap();
    let (utd, aww, rest, walk) = (load(0), load(1), load(2), load(3));
    let knn_d = |set| EvalConfig::new(Algorithm::KnnDistance, set, EVAL_SEED);
    let knn_c = EvalConfig::new(Algorithm::KnnClassifier, FeatureSet::EdaOnly, EVAL_SEED);
    let checks = [
        ("kNN-distance UTD", run_in_sample(&utd, &knn_d(FeatureSet::EdaOnly)).unwrap().pooled_auc, 0.930),
        ("kNN-distance AWW resting", run_in_sample(&rest, &knn_d(FeatureSet::EdaOnly)).unwrap().pooled_auc, 0.898),
        ("kNN-distance AWW walking", run_in_sample(&walk, &knn_d(FeatureSet::EdaOnly)).unwrap().pooled_auc, 0.847),
        ("kNN classifier AWW->UTD", run_out_of_sample(&aww, &utd, &knn_c).unwrap().pooled_auc, 0.946),
        ("kNN-distance UTD->AWW", run_out_of_sample(&utd, &aww, &knn_d(FeatureSet::EdaOnly)).unwrap().pooled_auc, 0.854),
    ];
    let ok = checks.iter().all(|(_, got, want)| (got - want).abs() <= REAL_DATA_TOL);
    let detail = checks
        .iter()
        .map(|(n, got, want)| format!("{n} {got:.3} (target {want})"))
        .collect::<Vec<_>>()
        .join(", ");
    outcome(10, "real data", ok, detail, start, None)
}

fn main() {
    let mut outcomes = Vec::new();
    let emit = |o: Outcome, all: &mut Vec<Outcome>| {
        report(&o);
        all.push(o);
    };
    emit(feature_counts(), &mut outcomes);
    emit(dwt_correctness(), &mut outcomes);
    emit(auc_oracle(), &mut outcomes);
    emit(gradient_checks(), &mut outcomes);
    emit(smo_validity(), &mut outcomes);

    let mut artifacts = Artifacts::new();
    let start = Instant::now();
    let e = run_end_to_end(&mut artifacts);
    emit(end_to_end(&e, start), &mut outcomes);
    emit(ablation(&e, start), &mut outcomes);
    let start = Instant::now();
    let s = run_sensitivity(&mut artifacts);
    emit(sensitivity(&s, start), &mut outcomes);
    emit(determinism(&artifacts, Instant::now()), &mut outcomes);
    emit(real_data(), &mut outcomes);

    let failed: Vec<u8> = outcomes.iter().filter(|o| o.status == Status::Fail).map(|o| o.id).collect();
    if failed.is_empty() {
        println!("acceptance: all criteria passed or skipped");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
