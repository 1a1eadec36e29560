use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::featurize::RowId;
use crate::{Error, Result};

/// One held-out group. Indices refer to the rows the folding was built from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub held_out_id: String,
    pub train_row_indices: Vec<usize>,
    pub test_row_indices: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Grouping {
    Subject,
    Segment,
    /// Subject when there are at least three subjects, segment otherwise.
    Auto,
}

impl Grouping {
    pub fn resolve(self, rows: &[RowId]) -> Grouping {
        match self {
            Grouping::Auto => {
                let mut subjects: Vec<&str> = rows.iter().map(|r| r.subject_id.as_str()).collect();
                subjects.sort_unstable();
                subjects.dedup();
                if subjects.len() >= 3 {
                    Grouping::Subject
                } else {
                    Grouping::Segment
                }
            }
            g => g,
        }
    }
}

impl fmt::Display for Grouping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Grouping::Subject => "subject",
            Grouping::Segment => "segment",
            Grouping::Auto => "auto",
        })
    }
}

impl FromStr for Grouping {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "subject" | "loso" => Ok(Grouping::Subject),
            "segment" | "loseg" => Ok(Grouping::Segment),
            "auto" => Ok(Grouping::Auto),
            _ => Err(Error::invalid(format!("unknown grouping {s:?} (subject, segment, auto)"))),
        }
    }
}

/// Groups in order of first appearance.
fn folds_by<K: PartialEq + Clone>(
    keys: &[K],
    name: impl Fn(&K) -> String,
    what: &str,
) -> Result<Vec<Fold>> {
    let mut groups: Vec<K> = Vec::new();
    for k in keys {
        if !groups.contains(k) {
            groups.push(k.clone());
        }
    }
    if groups.len() < 2 {
        return Err(Error::invalid(format!(
            "leave-one-{what}-out needs at least 2 {what}s, found {}",
            groups.len()
        )));
    }
    Ok(groups
        .iter()
        .map(|g| {
            let (test, train): (Vec<usize>, Vec<usize>) = (0..keys.len()).partition(|&i| &keys[i] == g);
            Fold {
                held_out_id: name(g),
                train_row_indices: train,
                test_row_indices: test,
            }
        })
        .collect())
}

pub fn loso_folds(rows: &[RowId]) -> Result<Vec<Fold>> {
    let keys: Vec<&str> = rows.iter().map(|r| r.subject_id.as_str()).collect();
    folds_by(&keys, |k| k.to_string(), "subject")
}

/// Segments are keyed by (subject, segment), so equal segment ids under
/// different subjects stay separate.
pub fn loseg_folds(rows: &[RowId]) -> Result<Vec<Fold>> {
    let keys: Vec<(&str, &str)> = rows
        .iter()
        .map(|r| (r.subject_id.as_str(), r.segment_id.as_str()))
        .collect();
    folds_by(&keys, |k| k.1.to_string(), "segment")
}

pub fn folds_for(rows: &[RowId], grouping: Grouping) -> Result<Vec<Fold>> {
    match grouping.resolve(rows) {
        Grouping::Subject => loso_folds(rows),
        _ => loseg_folds(rows),
    }
}

/// Folding for tuning inside a training set: same grouping as the outer
/// loop, falling back to segments when only one subject remains.
pub fn inner_folds(rows: &[RowId], grouping: Grouping) -> Result<Vec<Fold>> {
    match grouping {
        Grouping::Subject => loso_folds(rows).or_else(|_| loseg_folds(rows)),
        g => folds_for(rows, g),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rows(spec: &[(&str, &str, usize)]) -> Vec<RowId> {
        spec.iter()
            .flat_map(|&(s, g, n)| {
                (0..n).map(move |w| RowId {
                    subject_id: s.into(),
                    segment_id: g.into(),
                    window_index: w,
                })
            })
            .collect()
    }

    fn assert_partition(folds: &[Fold], n: usize) {
        let mut seen = vec![0; n];
        for f in folds {
            assert_eq!(f.train_row_indices.len() + f.test_row_indices.len(), n);
            for &i in &f.test_row_indices {
                seen[i] += 1;
                assert!(!f.train_row_indices.contains(&i));
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn two_subjects_give_complementary_folds() {
        let r = rows(&[("a", "a0", 3), ("b", "b0", 2), ("a", "a1", 1)]);
        let f = loso_folds(&r).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f[0].test_row_indices, f[1].train_row_indices);
        assert_eq!(f[0].test_row_indices, vec![0, 1, 2, 5]);
        assert_partition(&f, r.len());
        assert_eq!(loseg_folds(&r).unwrap().len(), 3);
    }

    #[test]
    fn one_group_is_rejected() {
        let r = rows(&[("a", "a0", 4)]);
        assert!(loso_folds(&r).is_err());
        assert!(loseg_folds(&r).is_err());
        let r2 = rows(&[("a", "a0", 4), ("a", "a1", 4)]);
        assert_eq!(inner_folds(&r2, Grouping::Subject).unwrap().len(), 2);
    }

    #[test]
    fn twenty_subjects_twenty_folds() {
        let names: Vec<String> = (0..20).map(|i| format!("s{i}")).collect();
        let spec: Vec<(&str, &str, usize)> = names.iter().map(|n| (n.as_str(), "x", 3)).collect();
        let r = rows(&spec);
        assert_eq!(loso_folds(&r).unwrap().len(), 20);
        assert_eq!(Grouping::Auto.resolve(&r), Grouping::Subject);
        // same segment id under every subject still splits per subject
        assert_eq!(loseg_folds(&r).unwrap().len(), 20);
    }

    proptest! {
        #[test]
        fn folds_partition_rows(keys in proptest::collection::vec((0u8..4, 0u8..3), 2..60)) {
            let r: Vec<RowId> = keys
                .iter()
                .enumerate()
                .map(|(i, &(s, g))| RowId {
                    subject_id: format!("s{s}"),
                    segment_id: format!("g{g}"),
                    window_index: i,
                })
                .collect();
            for grouping in [Grouping::Subject, Grouping::Segment] {
                if let Ok(f) = folds_for(&r, grouping) {
                    assert_partition(&f, r.len());
                }
            }
        }
    }
}
