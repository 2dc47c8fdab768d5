//! Confusion-matrix classification metrics: per-class precision, recall
//! and F1, macro and support-weighted aggregates, accuracy, and the most
//! frequent confusion pairs.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// K-class confusion matrix. Rows index the true class, columns the
/// predicted class; row sums are the per-class support.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConfusionMatrix {
    pub class_names: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(class_names: Vec<String>, counts: Vec<Vec<u64>>) -> Result<Self> {
        let k = class_names.len();
        if k == 0 {
            return Err(Error::InvalidConfig(
                "confusion matrix needs at least one class".into(),
            ));
        }
        if counts.len() != k || counts.iter().any(|row| row.len() != k) {
            return Err(Error::DimMismatch {
                expected: alloc::format!("{k}x{k} counts"),
                got: alloc::format!("{} rows", counts.len()),
            });
        }
        Ok(Self {
            class_names,
            counts,
        })
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn support(&self, class: usize) -> u64 {
        self.counts[class].iter().sum()
    }

    fn col_sum(&self, class: usize) -> u64 {
        self.counts.iter().map(|row| row[class]).sum()
    }
}

/// Metrics for a single class. `zero_division` records that at least one
/// denominator (row or column sum) was zero and the affected values were
/// reported as 0.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassMetrics {
    pub class_name: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
    pub zero_division: bool,
}

/// Unweighted or support-weighted mean of per-class (P, R, F1).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AverageMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassReport {
    pub per_class: Vec<ClassMetrics>,
    pub macro_avg: AverageMetrics,
    pub weighted_avg: AverageMetrics,
    pub accuracy: f64,
}

fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

/// Full classification report from a confusion matrix.
///
/// Precision is diagonal over column sum, recall diagonal over row sum;
/// classes with a zero denominator report 0 and set `zero_division`.
/// Macro averages are unweighted means over classes, weighted averages
/// are support-weighted means, and accuracy is trace over total.
pub fn report(cm: &ConfusionMatrix) -> Result<ClassReport> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::DegenerateInput(
            "confusion matrix has zero total count".into(),
        ));
    }
    let per_class: Vec<ClassMetrics> = (0..cm.num_classes())
        .map(|k| {
            let diag = cm.counts[k][k] as f64;
            let row = cm.support(k);
            let col = cm.col_sum(k);
            let precision = if col > 0 { diag / col as f64 } else { 0.0 };
            let recall = if row > 0 { diag / row as f64 } else { 0.0 };
            ClassMetrics {
                class_name: cm.class_names[k].clone(),
                precision,
                recall,
                f1: f1_score(precision, recall),
                support: row,
                zero_division: row == 0 || col == 0,
            }
        })
        .collect();
    let rows: Vec<(f64, f64, f64, u64)> = per_class
        .iter()
        .map(|m| (m.precision, m.recall, m.f1, m.support))
        .collect();
    let (macro_avg, weighted_avg) = aggregate(&rows);
    let trace: u64 = (0..cm.num_classes()).map(|k| cm.counts[k][k]).sum();
    Ok(ClassReport {
        per_class,
        macro_avg,
        weighted_avg,
        accuracy: trace as f64 / total as f64,
    })
}

/// Macro (unweighted) and support-weighted means over per-class
/// `(precision, recall, f1, support)` rows. Macro-F1 is the mean of the
/// per-class F1 values, not the F1 of the macro P and R.
pub fn aggregate(per_class: &[(f64, f64, f64, u64)]) -> (AverageMetrics, AverageMetrics) {
    let k = per_class.len() as f64;
    let total_support: u64 = per_class.iter().map(|r| r.3).sum();
    let mut macro_avg = AverageMetrics {
        precision: 0.0,
        recall: 0.0,
        f1: 0.0,
    };
    let mut weighted = AverageMetrics {
        precision: 0.0,
        recall: 0.0,
        f1: 0.0,
    };
    for &(p, r, f1, support) in per_class {
        macro_avg.precision += p / k;
        macro_avg.recall += r / k;
        macro_avg.f1 += f1 / k;
        if total_support > 0 {
            let w = support as f64 / total_support as f64;
            weighted.precision += p * w;
            weighted.recall += r * w;
            weighted.f1 += f1 * w;
        }
    }
    (macro_avg, weighted)
}

/// One off-diagonal confusion cell.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Confusion {
    pub true_class: String,
    pub pred_class: String,
    pub count: u64,
    pub fraction_of_true_class: f64,
}

/// The `k` most frequent nonzero off-diagonal cells, sorted by count
/// descending with ties broken by (true, pred) label order.
pub fn top_confusions(cm: &ConfusionMatrix, k: usize) -> Vec<Confusion> {
    let mut cells: Vec<Confusion> = Vec::new();
    for t in 0..cm.num_classes() {
        let support = cm.support(t);
        for p in 0..cm.num_classes() {
            let count = cm.counts[t][p];
            if t != p && count > 0 {
                cells.push(Confusion {
                    true_class: cm.class_names[t].clone(),
                    pred_class: cm.class_names[p].clone(),
                    count,
                    fraction_of_true_class: count as f64 / support as f64,
                });
            }
        }
    }
    cells.sort_by(|a, b| {
        b.count
            .cmp(&a.count)
            .then_with(|| a.true_class.cmp(&b.true_class))
            .then_with(|| a.pred_class.cmp(&b.pred_class))
    });
    cells.truncate(k);
    cells
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| alloc::format!("c{i}")).collect()
    }

    #[test]
    fn diagonal_matrix_is_perfect() {
        let cm = ConfusionMatrix::new(names(3), vec![vec![5, 0, 0], vec![0, 7, 0], vec![0, 0, 2]])
            .unwrap();
        let rep = report(&cm).unwrap();
        assert_eq!(rep.accuracy, 1.0);
        for m in &rep.per_class {
            assert_eq!((m.precision, m.recall, m.f1), (1.0, 1.0, 1.0));
            assert!(!m.zero_division);
        }
        assert_eq!(rep.macro_avg.f1, 1.0);
        assert!(top_confusions(&cm, 5).is_empty());
    }

    #[test]
    fn zero_support_class_is_flagged() {
        let cm = ConfusionMatrix::new(names(2), vec![vec![3, 0], vec![0, 0]]).unwrap();
        let rep = report(&cm).unwrap();
        assert!(rep.per_class[1].zero_division);
        assert_eq!(rep.per_class[1].f1, 0.0);
        assert!(!rep.per_class[0].zero_division);
    }

    #[test]
    fn known_two_class_report() {
        // true a: 8 correct, 2 as b; true b: 1 as a, 9 correct.
        let cm = ConfusionMatrix::new(
            vec!["a".to_string(), "b".to_string()],
            vec![vec![8, 2], vec![1, 9]],
        )
        .unwrap();
        let rep = report(&cm).unwrap();
        let a = &rep.per_class[0];
        assert!((a.precision - 8.0 / 9.0).abs() < 1e-15);
        assert!((a.recall - 0.8).abs() < 1e-15);
        assert!((rep.accuracy - 17.0 / 20.0).abs() < 1e-15);
    }

    #[test]
    fn confusion_fraction_uses_row_support() {
        let mut counts = vec![vec![0_u64; 2]; 2];
        counts[0][0] = 2280 - 39;
        counts[0][1] = 39;
        counts[1][1] = 10;
        let cm =
            ConfusionMatrix::new(vec!["sleep".to_string(), "lying".to_string()], counts).unwrap();
        let top = top_confusions(&cm, 3);
        assert_eq!(top.len(), 1);
        assert_eq!(top[0].count, 39);
        assert!((top[0].fraction_of_true_class - 39.0 / 2280.0).abs() < 1e-15);
    }

    #[test]
    fn equal_count_confusions_tie_break_by_labels() {
        let cm = ConfusionMatrix::new(names(3), vec![vec![1, 4, 0], vec![0, 1, 4], vec![0, 0, 1]])
            .unwrap();
        let top = top_confusions(&cm, 2);
        assert_eq!(top[0].true_class, "c0");
        assert_eq!(top[0].pred_class, "c1");
        assert_eq!(top[1].true_class, "c1");
        assert_eq!(top[1].pred_class, "c2");
    }

    #[test]
    fn accuracy_equals_weighted_recall() {
        let cm = ConfusionMatrix::new(
            names(3),
            vec![vec![10, 3, 1], vec![2, 20, 5], vec![0, 4, 9]],
        )
        .unwrap();
        let rep = report(&cm).unwrap();
        assert!((rep.accuracy - rep.weighted_avg.recall).abs() < 1e-12);
    }

    #[test]
    fn f1_between_min_and_max_of_p_and_r() {
        let cm = ConfusionMatrix::new(
            names(3),
            vec![vec![10, 3, 1], vec![2, 20, 5], vec![0, 4, 9]],
        )
        .unwrap();
        let rep = report(&cm).unwrap();
        for m in &rep.per_class {
            let lo = m.precision.min(m.recall);
            let hi = m.precision.max(m.recall);
            assert!(m.f1 >= lo - 1e-12 && m.f1 <= hi + 1e-12);
        }
    }

    #[test]
    fn macro_invariant_under_class_permutation() {
        let rows = [
            (0.9, 0.8, 0.85, 10_u64),
            (0.5, 0.7, 0.58, 90),
            (1.0, 1.0, 1.0, 5),
        ];
        let (m1, w1) = aggregate(&rows);
        let permuted = [rows[2], rows[0], rows[1]];
        let (m2, w2) = aggregate(&permuted);
        assert!((m1.f1 - m2.f1).abs() < 1e-15);
        assert!((w1.f1 - w2.f1).abs() < 1e-15);
    }

    #[test]
    fn empty_matrix_rejected() {
        let cm = ConfusionMatrix::new(names(2), vec![vec![0, 0], vec![0, 0]]).unwrap();
        assert!(report(&cm).is_err());
        assert!(ConfusionMatrix::new(vec![], vec![]).is_err());
    }
}
