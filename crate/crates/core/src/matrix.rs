//! Positive reciprocal comparison matrices.
//!
//! Only the strict upper triangle is stored. The diagonal is 1 and the lower
//! triangle is read back as reciprocals, so reciprocity holds by construction.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::judgment::{Judgment, JudgmentError, ScaleMode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("comparison matrix needs at least 2 elements, got {0}")]
    OrderTooSmall(usize),
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("pair ({i}, {j}) is outside the upper triangle of an order-{order} matrix")]
    PairOutOfRange { i: usize, j: usize, order: usize },
    #[error("pair ({i}, {j}) judged more than once")]
    DuplicateJudgment { i: usize, j: usize },
    #[error("missing judgments for pairs {missing:?}")]
    IncompleteJudgments { missing: Vec<(usize, usize)> },
    #[error("pair ({i}, {j}): {source}")]
    InvalidScaleValue {
        i: usize,
        j: usize,
        #[source]
        source: JudgmentError,
    },
    #[error("expected {expected} upper-triangle judgments, got {got}")]
    UpperLength { expected: usize, got: usize },
}

/// Index of pair `(i, j)`, `i < j`, in row-major upper-triangle order.
fn upper_index(order: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < order);
    i * (2 * order - i - 1) / 2 + (j - i - 1)
}

fn pair_count(order: usize) -> usize {
    order * (order - 1) / 2
}

/// An `n x n` positive reciprocal matrix of pairwise judgments over labelled
/// elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonMatrix {
    labels: Vec<String>,
    upper: Vec<Judgment>,
}

impl ComparisonMatrix {
    /// Builds a matrix from upper-triangle judgments `(i, j, value)` with
    /// `i < j`. Every pair must appear exactly once.
    pub fn from_pairs(
        labels: Vec<String>,
        pairs: &[(usize, usize, Judgment)],
        mode: ScaleMode,
    ) -> Result<Self, MatrixError> {
        let order = check_labels(&labels)?;
        let mut slots: Vec<Option<Judgment>> = vec![None; pair_count(order)];
        for &(i, j, value) in pairs {
            if i >= j || j >= order {
                return Err(MatrixError::PairOutOfRange { i, j, order });
            }
            let value = value
                .check(mode)
                .map_err(|source| MatrixError::InvalidScaleValue { i, j, source })?;
            let slot = &mut slots[upper_index(order, i, j)];
            if slot.is_some() {
                return Err(MatrixError::DuplicateJudgment { i, j });
            }
            *slot = Some(value);
        }
        let missing: Vec<(usize, usize)> = upper_pairs(order)
            .filter(|&(i, j)| slots[upper_index(order, i, j)].is_none())
            .collect();
        if !missing.is_empty() {
            return Err(MatrixError::IncompleteJudgments { missing });
        }
        Ok(Self {
            labels,
            upper: slots.into_iter().flatten().collect(),
        })
    }

    /// Builds a matrix from the full upper triangle in row-major order.
    pub fn from_upper(
        labels: Vec<String>,
        upper: Vec<Judgment>,
        mode: ScaleMode,
    ) -> Result<Self, MatrixError> {
        let order = check_labels(&labels)?;
        if upper.len() != pair_count(order) {
            return Err(MatrixError::UpperLength {
                expected: pair_count(order),
                got: upper.len(),
            });
        }
        for ((i, j), value) in upper_pairs(order).zip(&upper) {
            value
                .check(mode)
                .map_err(|source| MatrixError::InvalidScaleValue { i, j, source })?;
        }
        Ok(Self { labels, upper })
    }

    /// Convenience constructor from label and judgment strings.
    ///
    /// ```
    /// use anp_core::matrix::ComparisonMatrix;
    /// let m = ComparisonMatrix::parse(&["a", "b"], &["4"]).unwrap();
    /// assert_eq!(m.entry(1, 0), 0.25);
    /// ```
    pub fn parse(labels: &[&str], upper: &[&str]) -> Result<Self, MatrixError> {
        let order = labels.len();
        let values = upper
            .iter()
            .zip(upper_pairs(order))
            .map(|(s, (i, j))| {
                s.parse::<Judgment>()
                    .map_err(|source| MatrixError::InvalidScaleValue { i, j, source })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_upper(
            labels.iter().map(|s| s.to_string()).collect(),
            values,
            ScaleMode::Relaxed,
        )
    }

    /// All-ones matrix: every element judged equal.
    pub fn indifferent(labels: Vec<String>) -> Result<Self, MatrixError> {
        let order = check_labels(&labels)?;
        Ok(Self {
            labels,
            upper: vec![Judgment::EQUAL; pair_count(order)],
        })
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Judgment of element `i` over element `j`, for any `i`, `j`.
    pub fn judgment(&self, i: usize, j: usize) -> Judgment {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => Judgment::EQUAL,
            Less => self.upper[upper_index(self.order(), i, j)],
            Greater => self.upper[upper_index(self.order(), j, i)].reciprocal(),
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.judgment(i, j).value()
    }

    /// Upper-triangle judgments `(i, j, a_ij)` in row-major order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, Judgment)> + '_ {
        upper_pairs(self.order())
            .zip(self.upper.iter().copied())
            .map(|((i, j), v)| (i, j, v))
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        let n = self.order();
        DMatrix::from_fn(n, n, |i, j| self.entry(i, j))
    }

    /// Returns a copy with `a_ij` replaced. Either orientation is accepted;
    /// `(j, i)` stores the reciprocal at `(i, j)`.
    pub fn with_judgment(
        &self,
        i: usize,
        j: usize,
        value: Judgment,
        mode: ScaleMode,
    ) -> Result<Self, MatrixError> {
        let order = self.order();
        if i == j || i >= order || j >= order {
            return Err(MatrixError::PairOutOfRange { i, j, order });
        }
        let value = value
            .check(mode)
            .map_err(|source| MatrixError::InvalidScaleValue { i, j, source })?;
        let (i, j, value) = if i < j {
            (i, j, value)
        } else {
            (j, i, value.reciprocal())
        };
        let mut out = self.clone();
        out.upper[upper_index(order, i, j)] = value;
        Ok(out)
    }

    /// Reorders elements: element `k` of the result is element `perm[k]` of
    /// `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, MatrixError> {
        let order = self.order();
        let distinct: BTreeSet<usize> = perm.iter().copied().collect();
        if perm.len() != order || distinct.len() != order || distinct.iter().any(|&p| p >= order) {
            return Err(MatrixError::UpperLength {
                expected: order,
                got: perm.len(),
            });
        }
        let labels = perm.iter().map(|&p| self.labels[p].clone()).collect();
        let upper = upper_pairs(order)
            .map(|(i, j)| self.judgment(perm[i], perm[j]))
            .collect();
        Ok(Self { labels, upper })
    }

    /// `a_ij * a_jk == a_ik` for every triple, within `tol` (relative).
    pub fn is_consistent(&self, tol: f64) -> bool {
        let n = self.order();
        (0..n).all(|i| {
            (0..n).all(|j| {
                (0..n).all(|k| {
                    let lhs = self.entry(i, j) * self.entry(j, k);
                    let rhs = self.entry(i, k);
                    (lhs - rhs).abs() <= tol * rhs.max(1.0)
                })
            })
        })
    }
}

fn check_labels(labels: &[String]) -> Result<usize, MatrixError> {
    if labels.len() < 2 {
        return Err(MatrixError::OrderTooSmall(labels.len()));
    }
    let mut seen = BTreeSet::new();
    for label in labels {
        if !seen.insert(label.as_str()) {
            return Err(MatrixError::DuplicateLabel(label.clone()));
        }
    }
    Ok(labels.len())
}

/// Upper-triangle index pairs `(i, j)`, `i < j`, row-major.
pub fn upper_pairs(order: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..order).flat_map(move |i| (i + 1..order).map(move |j| (i, j)))
}
