use serde::{Deserialize, Serialize};

use crate::signal_io::WindowLabel;
use crate::{Error, Result};

/// One operating point. `threshold` is `None` at the two endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub threshold: Option<f64>,
    pub false_positive_rate: f64,
    pub true_positive_rate: f64,
}

fn class_counts(scores: &[f64], labels: &[WindowLabel]) -> Result<(usize, usize)> {
    if scores.len() != labels.len() {
        return Err(Error::invalid(format!(
            "{} scores for {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::invalid("scores must be finite"));
    }
    let pos = labels.iter().filter(|l| l.is_artifact()).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::UndefinedAuc(format!(
            "{} windows with {pos} artifact and {neg} clean labels",
            labels.len()
        )));
    }
    Ok((pos, neg))
}

/// Indices sorted by ascending score.
fn ascending(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    order
}

/// Mann-Whitney AUC with average ranks for ties.
pub fn roc_auc(scores: &[f64], labels: &[WindowLabel]) -> Result<f64> {
    let (pos, neg) = class_counts(scores, labels)?;
    let order = ascending(scores);
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // ranks i+1 ..= j+1 share their mean
        let avg = (i + j + 2) as f64 / 2.0;
        let tied_pos = order[i..=j].iter().filter(|&&k| labels[k].is_artifact()).count();
        rank_sum += avg * tied_pos as f64;
        i = j + 1;
    }
    let (p, n) = (pos as f64, neg as f64);
    Ok((rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}

/// Points from (0, 0) to (1, 1), one per distinct score, predicting
/// artifact when `score >= threshold`.
pub fn roc_curve(scores: &[f64], labels: &[WindowLabel]) -> Result<Vec<RocPoint>> {
    let (pos, neg) = class_counts(scores, labels)?;
    let mut order = ascending(scores);
    order.reverse();
    let mut points = vec![RocPoint {
        threshold: None,
        false_positive_rate: 0.0,
        true_positive_rate: 0.0,
    }];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let t = scores[order[i]];
        while i < order.len() && scores[order[i]] == t {
            if labels[order[i]].is_artifact() {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(RocPoint {
            threshold: Some(t),
            false_positive_rate: fp as f64 / neg as f64,
            true_positive_rate: tp as f64 / pos as f64,
        });
    }
    points.push(RocPoint {
        threshold: None,
        false_positive_rate: 1.0,
        true_positive_rate: 1.0,
    });
    Ok(points)
}

pub fn trapezoid_area(points: &[RocPoint]) -> f64 {
    points
        .windows(2)
        .map(|w| {
            (w[1].false_positive_rate - w[0].false_positive_rate)
                * (w[1].true_positive_rate + w[0].true_positive_rate)
                / 2.0
        })
        .sum()
}

/// 0/1 accuracy of `score >= threshold` as the artifact call.
pub fn accuracy_at(scores: &[f64], labels: &[WindowLabel], threshold: f64) -> Result<f64> {
    if scores.len() != labels.len() || scores.is_empty() {
        return Err(Error::invalid("accuracy needs equally many scores and labels"));
    }
    let hits = scores
        .iter()
        .zip(labels)
        .filter(|(&s, l)| (s >= threshold) == l.is_artifact())
        .count();
    Ok(hits as f64 / scores.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::RngStream;
    use proptest::prelude::*;

    fn labels(bits: &[u8]) -> Vec<WindowLabel> {
        bits.iter().map(|&b| WindowLabel::from_bit(b).unwrap()).collect()
    }

    fn pair_count(scores: &[f64], y: &[WindowLabel]) -> f64 {
        let (mut wins, mut pairs) = (0.0, 0.0);
        for (i, yi) in y.iter().enumerate() {
            for (j, yj) in y.iter().enumerate() {
                if yi.is_artifact() && !yj.is_artifact() {
                    pairs += 1.0;
                    if scores[i] > scores[j] {
                        wins += 1.0;
                    } else if scores[i] == scores[j] {
                        wins += 0.5;
                    }
                }
            }
        }
        wins / pairs
    }

    #[test]
    fn small_cases() {
        assert_eq!(roc_auc(&[0.9, 0.8, 0.2, 0.1], &labels(&[1, 1, 0, 0])).unwrap(), 1.0);
        assert_eq!(roc_auc(&[0.3; 6], &labels(&[1, 0, 1, 0, 0, 0])).unwrap(), 0.5);
        assert_eq!(roc_auc(&[0.1, 0.2, 0.3, 0.4], &labels(&[0, 1, 0, 1])).unwrap(), 0.75);
        assert!(matches!(
            roc_auc(&[0.1, 0.2], &labels(&[0, 0])),
            Err(Error::UndefinedAuc(_))
        ));
    }

    #[test]
    fn curve_shapes() {
        let perfect = roc_curve(&[0.9, 0.8, 0.2, 0.1], &labels(&[1, 1, 0, 0])).unwrap();
        assert!(perfect
            .iter()
            .any(|p| p.false_positive_rate == 0.0 && p.true_positive_rate == 1.0));
        let flat = roc_curve(&[1.0; 4], &labels(&[1, 0, 0, 1])).unwrap();
        assert_eq!(flat.len(), 3);
        assert_eq!(trapezoid_area(&flat), 0.5);
    }

    #[test]
    fn matches_pair_counting_with_heavy_ties() {
        let mut rng = RngStream::new(17);
        for _ in 0..300 {
            let n = 2 + rng.index(60);
            let levels = 1 + rng.index(5) as u64;
            let s: Vec<f64> = (0..n).map(|_| rng.below(levels) as f64).collect();
            let mut y: Vec<WindowLabel> = (0..n)
                .map(|_| WindowLabel::from_bit(u8::from(rng.bernoulli(0.3))).unwrap())
                .collect();
            y[0] = WindowLabel::Artifact;
            y[1] = WindowLabel::Clean;
            let auc = roc_auc(&s, &y).unwrap();
            assert!((auc - pair_count(&s, &y)).abs() <= 1e-12);
            assert!((trapezoid_area(&roc_curve(&s, &y).unwrap()) - auc).abs() <= 1e-9);
        }
    }

    #[test]
    fn accuracy_counts_hits() {
        let acc = accuracy_at(&[0.9, 0.4, 0.6, 0.1], &labels(&[1, 1, 0, 0]), 0.5).unwrap();
        assert_eq!(acc, 0.5);
    }

    proptest! {
        #[test]
        fn invariant_under_monotone_maps(
            raw in proptest::collection::vec((-5.0f64..5.0, 0u8..2), 4..80),
            a in 0.1f64..10.0,
            b in -3.0f64..3.0,
        ) {
            let mut y: Vec<WindowLabel> = raw.iter().map(|&(_, l)| WindowLabel::from_bit(l).unwrap()).collect();
            y[0] = WindowLabel::Artifact;
            y[1] = WindowLabel::Clean;
            let s: Vec<f64> = raw.iter().map(|&(v, _)| v).collect();
            let mapped: Vec<f64> = s.iter().map(|v| (a * v + b).exp()).collect();
            let base = roc_auc(&s, &y).unwrap();
            prop_assert!((0.0..=1.0).contains(&base));
            prop_assert_eq!(base, roc_auc(&mapped, &y).unwrap());
            let curve = roc_curve(&s, &y).unwrap();
            for w in curve.windows(2) {
                prop_assert!(w[1].false_positive_rate >= w[0].false_positive_rate);
                prop_assert!(w[1].true_positive_rate >= w[0].true_positive_rate);
            }
        }

        #[test]
        fn label_as_score_is_perfect(bits in proptest::collection::vec(0u8..2, 2..100)) {
            let mut y = labels(&bits);
            y[0] = WindowLabel::Artifact;
            y[1] = WindowLabel::Clean;
            let s: Vec<f64> = y.iter().map(|l| f64::from(l.as_bit())).collect();
            prop_assert_eq!(roc_auc(&s, &y).unwrap(), 1.0);
        }
    }
}
