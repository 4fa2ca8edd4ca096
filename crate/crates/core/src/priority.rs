//! Principal eigenvector extraction and consistency measurement.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::ComparisonMatrix;

/// Power iteration stops once successive iterates agree to this max-norm.
pub const EIGEN_TOLERANCE: f64 = 1e-12;
pub const EIGEN_MAX_ITERATIONS: usize = 10_000;

/// CR threshold of the general rule, applied by [`ConsistencyPolicy::Uniform`].
pub const UNIFORM_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PriorityError {
    #[error("no random consistency index for matrices of order {0}")]
    UnsupportedOrder(usize),
    #[error(
        "power iteration did not converge after {iterations} iterations (last step {residual:.2e})"
    )]
    ConvergenceFailure { iterations: usize, residual: f64 },
    #[error("invalid random consistency index table: {0}")]
    InvalidRciTable(String),
}

/// Random consistency index per matrix order.
#[derive(Debug, Clone, PartialEq)]
pub struct RciTable {
    values: BTreeMap<usize, f64>,
}

impl Default for RciTable {
    fn default() -> Self {
        let values = [
            (1, 0.0),
            (2, 0.0),
            (3, 0.58),
            (4, 0.90),
            (5, 1.12),
            (6, 1.24),
            (7, 1.32),
            (8, 1.41),
            (9, 1.45),
            (10, 1.49),
        ];
        Self {
            values: values.into_iter().collect(),
        }
    }
}

impl RciTable {
    /// Orders 1 and 2 must map to 0 and every order from 3 up must be
    /// positive. Orders 1 and 2 are filled in when absent.
    pub fn new(values: BTreeMap<usize, f64>) -> Result<Self, PriorityError> {
        let mut values = values;
        for n in [1, 2] {
            match values.get(&n) {
                None => {
                    values.insert(n, 0.0);
                }
                Some(&v) if v != 0.0 => {
                    return Err(PriorityError::InvalidRciTable(format!(
                        "order {n} must have index 0, got {v}"
                    )))
                }
                _ => {}
            }
        }
        if let Some((n, v)) = values
            .iter()
            .find(|(&n, &v)| n >= 3 && !(v > 0.0 && v.is_finite()))
        {
            return Err(PriorityError::InvalidRciTable(format!(
                "order {n} must have a positive index, got {v}"
            )));
        }
        Ok(Self { values })
    }

    pub fn get(&self, order: usize) -> Result<f64, PriorityError> {
        self.values
            .get(&order)
            .copied()
            .ok_or(PriorityError::UnsupportedOrder(order))
    }

    pub fn max_order(&self) -> usize {
        self.values.keys().next_back().copied().unwrap_or(0)
    }

    pub fn values(&self) -> &BTreeMap<usize, f64> {
        &self.values
    }
}

/// Normalized Perron vector of a comparison matrix, with its consistency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorityVector {
    pub labels: Vec<String>,
    pub weights: Vec<f64>,
    pub lambda_max: f64,
    pub ci: f64,
    pub cr: f64,
    /// `cr <= 0.1`, the general acceptability rule.
    pub consistent: bool,
}

impl PriorityVector {
    /// The degenerate vector for a single compared element.
    pub fn single(label: &str) -> Self {
        Self {
            labels: vec![label.to_string()],
            weights: vec![1.0],
            lambda_max: 1.0,
            ci: 0.0,
            cr: 0.0,
            consistent: true,
        }
    }

    pub fn order(&self) -> usize {
        self.weights.len()
    }

    pub fn weight_of(&self, label: &str) -> Option<f64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.weights[i])
    }
}

/// Dominant eigenpair by power iteration on the matrix itself, each iterate
/// normalized to unit 1-norm.
pub fn principal_eigenvector(
    m: &ComparisonMatrix,
    rci: &RciTable,
) -> Result<PriorityVector, PriorityError> {
    let n = m.order();
    // Check the order before iterating so an unsupported size fails fast.
    rci.get(n)?;
    let a = m.to_dmatrix();
    let mut x = vec![1.0 / n as f64; n];
    let mut y = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..EIGEN_MAX_ITERATIONS {
        mul_into(&a, &x, &mut y);
        let norm: f64 = y.iter().sum();
        residual = 0.0;
        for (xi, yi) in x.iter_mut().zip(&mut y) {
            *yi /= norm;
            residual = residual.max((*yi - *xi).abs());
            *xi = *yi;
        }
        if residual < EIGEN_TOLERANCE {
            mul_into(&a, &x, &mut y);
            let lambda_max: f64 = y.iter().sum::<f64>() / x.iter().sum::<f64>();
            let (ci, cr) = consistency_ratio(lambda_max, n, rci)?;
            return Ok(PriorityVector {
                labels: m.labels().to_vec(),
                weights: x,
                lambda_max,
                ci,
                cr,
                consistent: cr <= UNIFORM_THRESHOLD,
            });
        }
    }
    Err(PriorityError::ConvergenceFailure {
        iterations: EIGEN_MAX_ITERATIONS,
        residual,
    })
}

/// Row-major, left-to-right summation so results are bitwise reproducible.
fn mul_into(a: &nalgebra::DMatrix<f64>, x: &[f64], out: &mut [f64]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (j, xj) in x.iter().enumerate() {
            acc += a[(i, j)] * xj;
        }
        *o = acc;
    }
}

/// `CI = (lambda_max - n) / (n - 1)` and `CR = CI / RCI(n)`. CR is 0 where
/// the index is 0 (orders 1 and 2 are always consistent).
pub fn consistency_ratio(
    lambda_max: f64,
    n: usize,
    rci: &RciTable,
) -> Result<(f64, f64), PriorityError> {
    let index = rci.get(n)?;
    if n < 2 {
        return Ok((0.0, 0.0));
    }
    // Rounding can leave lambda_max a hair under n for consistent matrices.
    let ci = ((lambda_max - n as f64) / (n as f64 - 1.0)).max(0.0);
    let cr = if index > 0.0 { ci / index } else { 0.0 };
    Ok((ci, cr))
}

/// How CR values are screened.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConsistencyPolicy {
    /// Size-dependent limits: 0.05 for 3x3, 0.08 for 4x4, 0.1 otherwise.
    /// Exceeding the limit is a failure.
    #[default]
    Saaty1994,
    /// A single 0.1 limit. Exceeding it is a warning.
    Uniform,
}

impl ConsistencyPolicy {
    pub fn threshold(self, n: usize) -> f64 {
        match (self, n) {
            (ConsistencyPolicy::Saaty1994, 3) => 0.05,
            (ConsistencyPolicy::Saaty1994, 4) => 0.08,
            _ => UNIFORM_THRESHOLD,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ConsistencyPolicy::Saaty1994 => "saaty1994",
            ConsistencyPolicy::Uniform => "uniform",
        }
    }
}

impl std::str::FromStr for ConsistencyPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "saaty1994" => Ok(Self::Saaty1994),
            "uniform" => Ok(Self::Uniform),
            other => Err(format!(
                "unknown policy {other:?} (expected saaty1994 or uniform)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ConsistencyVerdict {
    Pass,
    Warn { threshold: f64 },
    Fail { threshold: f64 },
}

impl ConsistencyVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, ConsistencyVerdict::Pass)
    }

    pub fn label(&self) -> &'static str {
        match self {
            ConsistencyVerdict::Pass => "pass",
            ConsistencyVerdict::Warn { .. } => "warn",
            ConsistencyVerdict::Fail { .. } => "fail",
        }
    }
}

/// Screens a priority vector's CR. A CR equal to the threshold passes.
pub fn screen_consistency(
    pv: &PriorityVector,
    n: usize,
    policy: ConsistencyPolicy,
) -> ConsistencyVerdict {
    let threshold = policy.threshold(n);
    if pv.cr <= threshold {
        ConsistencyVerdict::Pass
    } else {
        match policy {
            ConsistencyPolicy::Saaty1994 => ConsistencyVerdict::Fail { threshold },
            ConsistencyPolicy::Uniform => ConsistencyVerdict::Warn { threshold },
        }
    }
}

/// Policy plus the strict switch that turns any non-pass verdict into an
/// error.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyOptions {
    pub policy: ConsistencyPolicy,
    pub strict: bool,
}
