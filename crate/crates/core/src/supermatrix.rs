//! Supermatrix assembly, cluster weighting, limit powers and ranking.
//!
//! Column `j` holds the influence priorities with respect to node `j`; row
//! `i` is the influenced node. Blocks follow cluster order, and node order
//! within each cluster.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{DecisionNetwork, SlotKey};
use crate::priority::{
    principal_eigenvector, screen_consistency, ConsistencyOptions, ConsistencyVerdict,
    PriorityError, PriorityVector, RciTable,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SupermatrixError {
    #[error("no priorities for slots {0:?}")]
    IncompleteModel(Vec<SlotKey>),
    #[error("priority vector for {slot} does not cover its elements {elements:?}")]
    PriorityMismatch {
        slot: SlotKey,
        elements: Vec<String>,
    },
    #[error("cluster weights for {cluster}: {source}")]
    ClusterPriority {
        cluster: String,
        #[source]
        source: PriorityError,
    },
    #[error("cluster comparison for {cluster} failed consistency screening (cr {cr:.4}, threshold {threshold})")]
    ClusterInconsistent {
        cluster: String,
        cr: f64,
        threshold: f64,
    },
    #[error("limit did not converge by power {power} (residual {residual:.2e}): {detail}")]
    ConvergenceFailure {
        power: u64,
        residual: f64,
        detail: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixState {
    Unweighted,
    Weighted,
    Limit,
}

/// How the limit was reached.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Convergence {
    /// Exponent of the returned power of the weighted matrix.
    pub power: u64,
    pub squarings: u32,
    /// Max-norm difference between the last two compared powers.
    pub residual: f64,
    pub cesaro_used: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceOptions {
    pub tolerance: f64,
    pub max_power: u64,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_power: 1 << 20,
        }
    }
}

/// A node-indexed square matrix in one of its three states.
#[derive(Debug, Clone, PartialEq)]
pub struct Supermatrix {
    pub index: Vec<String>,
    /// `(cluster id, first row, row count)` per cluster, in order.
    pub blocks: Vec<(String, usize, usize)>,
    pub entries: DMatrix<f64>,
    pub state: MatrixState,
    pub convergence: Option<Convergence>,
}

impl Supermatrix {
    fn empty(net: &DecisionNetwork) -> Self {
        let mut blocks = Vec::new();
        let mut start = 0;
        for c in net.clusters() {
            blocks.push((c.id.clone(), start, c.nodes.len()));
            start += c.nodes.len();
        }
        let index: Vec<String> = net.node_ids().into_iter().map(str::to_string).collect();
        let n = index.len();
        Self {
            index,
            blocks,
            entries: DMatrix::zeros(n, n),
            state: MatrixState::Unweighted,
            convergence: None,
        }
    }

    pub fn order(&self) -> usize {
        self.index.len()
    }

    pub fn position(&self, node: &str) -> Option<usize> {
        self.index.iter().position(|n| n == node)
    }

    /// Entry by (row node, column node).
    pub fn get(&self, row: &str, col: &str) -> Option<f64> {
        Some(self.entries[(self.position(row)?, self.position(col)?)])
    }

    pub fn column(&self, node: &str) -> Option<Vec<f64>> {
        let j = self.position(node)?;
        Some(self.entries.column(j).iter().copied().collect())
    }

    pub fn column_sums(&self) -> Vec<f64> {
        (0..self.order())
            .map(|j| self.entries.column(j).sum())
            .collect()
    }

    fn block_of_row(&self, row: usize) -> usize {
        self.blocks
            .iter()
            .position(|&(_, start, len)| row >= start && row < start + len)
            .expect("row inside some block")
    }

    fn cluster_of_position(&self, pos: usize) -> &str {
        &self.blocks[self.block_of_row(pos)].0
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.order())
            .map(|i| self.entries.row(i).iter().copied().collect())
            .collect()
    }
}

/// Places each slot's priority vector in the column of its control node.
/// Elements a slot leaves out (the control node itself) and undeclared
/// blocks stay zero. Single-element slots contribute weight 1 without
/// needing a priority vector.
pub fn assemble_unweighted(
    net: &DecisionNetwork,
    priorities: &BTreeMap<SlotKey, PriorityVector>,
) -> Result<Supermatrix, SupermatrixError> {
    let mut sm = Supermatrix::empty(net);
    let mut missing = Vec::new();
    for edge in net.edges() {
        let slot = &edge.slot;
        let (Some(col), Some(elements)) = (sm.position(&slot.control), net.slot_elements(slot))
        else {
            continue;
        };
        if elements.len() == 1 {
            let row = sm.position(&elements[0]).expect("slot element in index");
            sm.entries[(row, col)] = 1.0;
            continue;
        }
        let Some(pv) = priorities.get(slot) else {
            if !elements.is_empty() {
                missing.push(slot.clone());
            }
            continue;
        };
        if pv.labels != elements {
            return Err(SupermatrixError::PriorityMismatch {
                slot: slot.clone(),
                elements,
            });
        }
        for (label, w) in pv.labels.iter().zip(&pv.weights) {
            let row = sm.position(label).expect("slot element in index");
            sm.entries[(row, col)] = *w;
        }
    }
    if !missing.is_empty() {
        return Err(SupermatrixError::IncompleteModel(missing));
    }
    Ok(sm)
}

/// Weight of each influenced cluster, per source (column) cluster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterWeights {
    pub by_source: BTreeMap<String, Vec<(String, f64)>>,
    /// Priority vectors of explicit cluster comparisons, keyed by source.
    pub derived: BTreeMap<String, ClusterPriority>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterPriority {
    pub priority: PriorityVector,
    pub verdict: ConsistencyVerdict,
}

impl ClusterWeights {
    pub fn weight(&self, source: &str, target: &str) -> Option<f64> {
        self.by_source
            .get(source)?
            .iter()
            .find(|(t, _)| t == target)
            .map(|&(_, w)| w)
    }
}

/// Cluster weights from explicit cluster comparisons where present, and an
/// equal split over influenced clusters otherwise. [`weight`] renormalizes
/// each column over its nonzero blocks, so a column that reaches fewer
/// clusters than its source cluster ends up split equally over the blocks it
/// does reach.
pub fn derive_cluster_weights(
    net: &DecisionNetwork,
    rci: &RciTable,
    consistency: ConsistencyOptions,
) -> Result<ClusterWeights, SupermatrixError> {
    let mut by_source = BTreeMap::new();
    let mut derived = BTreeMap::new();
    for cluster in net.clusters() {
        let targets = net.influenced_clusters(&cluster.id);
        if targets.is_empty() {
            continue;
        }
        let weights = match net.cluster_matrices().get(&cluster.id) {
            Some(m) => {
                let pv = principal_eigenvector(m, rci).map_err(|source| {
                    SupermatrixError::ClusterPriority {
                        cluster: cluster.id.clone(),
                        source,
                    }
                })?;
                let verdict = screen_consistency(&pv, m.order(), consistency.policy);
                if consistency.strict {
                    if let ConsistencyVerdict::Warn { threshold }
                    | ConsistencyVerdict::Fail { threshold } = verdict
                    {
                        return Err(SupermatrixError::ClusterInconsistent {
                            cluster: cluster.id.clone(),
                            cr: pv.cr,
                            threshold,
                        });
                    }
                }
                let weights = targets
                    .iter()
                    .map(|t| (t.clone(), pv.weight_of(t).unwrap_or(0.0)))
                    .collect();
                derived.insert(
                    cluster.id.clone(),
                    ClusterPriority {
                        priority: pv,
                        verdict,
                    },
                );
                weights
            }
            None => {
                let share = 1.0 / targets.len() as f64;
                targets.into_iter().map(|t| (t, share)).collect()
            }
        };
        by_source.insert(cluster.id.clone(), weights);
    }
    Ok(ClusterWeights { by_source, derived })
}

/// Scales every block by its cluster weight and renormalizes each nonzero
/// column to sum to 1. All-zero (sink) columns become the node's own unit
/// column.
pub fn weight(unweighted: &Supermatrix, cw: &ClusterWeights) -> Supermatrix {
    let mut out = unweighted.clone();
    let n = out.order();
    for col in 0..n {
        let source = out.cluster_of_position(col).to_string();
        for (target, start, len) in unweighted.blocks.iter() {
            let w = cw.weight(&source, target).unwrap_or(0.0);
            for row in *start..start + len {
                out.entries[(row, col)] *= w;
            }
        }
        let sum: f64 = out.entries.column(col).sum();
        if sum > 0.0 {
            out.entries.column_mut(col).unscale_mut(sum);
        } else {
            out.entries[(col, col)] = 1.0;
        }
    }
    out.state = MatrixState::Weighted;
    out
}

fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn renormalize_columns(m: &mut DMatrix<f64>) {
    for mut col in m.column_iter_mut() {
        let s = col.sum();
        if s > 0.0 {
            col.unscale_mut(s);
        }
    }
}

/// Raises a column-stochastic matrix to limiting powers by repeated
/// squaring. Converged once `W^(2k)` and `W^(2k+1)` agree within the
/// tolerance. If even powers settle while odd ones do not, the chain has
/// period 2 and the Cesaro average of the two is returned. Longer periods
/// are reported as a convergence failure.
pub fn limit(
    weighted: &Supermatrix,
    opts: &ConvergenceOptions,
) -> Result<Supermatrix, SupermatrixError> {
    let w = &weighted.entries;
    let tol = opts.tolerance;
    let mut p = w.clone();
    let mut power: u64 = 1;
    let mut squarings = 0u32;
    loop {
        if power.saturating_mul(2) > opts.max_power {
            let residual = max_abs_diff(&(&p * w), &p);
            return Err(SupermatrixError::ConvergenceFailure {
                power,
                residual,
                detail: "powers still changing at the power cap".into(),
            });
        }
        let mut next = &p * &p;
        renormalize_columns(&mut next);
        squarings += 1;
        let odd = &next * w;
        let step = max_abs_diff(&odd, &next);
        if step <= tol {
            return Ok(limit_matrix(
                weighted,
                next,
                power * 2,
                squarings,
                step,
                false,
            ));
        }
        let even_step = max_abs_diff(&next, &p);
        if even_step <= tol && power >= 2 {
            let avg = (&next + &odd) * 0.5;
            let check = max_abs_diff(&(&avg * w), &avg);
            if check <= tol {
                return Ok(limit_matrix(
                    weighted,
                    avg,
                    power * 2,
                    squarings,
                    check,
                    true,
                ));
            }
            return Err(SupermatrixError::ConvergenceFailure {
                power: power * 2,
                residual: check,
                detail:
                    "even powers are stable but the period-2 average is not; period greater than 2"
                        .into(),
            });
        }
        p = next;
        power *= 2;
    }
}

fn limit_matrix(
    weighted: &Supermatrix,
    entries: DMatrix<f64>,
    power: u64,
    squarings: u32,
    residual: f64,
    cesaro_used: bool,
) -> Supermatrix {
    Supermatrix {
        entries,
        state: MatrixState::Limit,
        convergence: Some(Convergence {
            power,
            squarings,
            residual,
            cesaro_used,
        }),
        ..weighted.clone()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedAlternative {
    pub node: String,
    pub label: String,
    /// Weight in the limit column.
    pub weight: f64,
    /// Weight renormalized over the alternatives.
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeWeight {
    pub node: String,
    pub weight: f64,
}

/// Final alternative weights, best first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingReport {
    pub alternatives: Vec<RankedAlternative>,
    /// Node whose limit column was read.
    pub column: String,
    pub limit_column: Vec<NodeWeight>,
    pub convergence: Option<Convergence>,
}

impl RankingReport {
    pub fn order(&self) -> Vec<&str> {
        self.alternatives.iter().map(|a| a.node.as_str()).collect()
    }

    pub fn weight_of(&self, node: &str) -> Option<&RankedAlternative> {
        self.alternatives.iter().find(|a| a.node == node)
    }

    pub(crate) fn from_scores(
        net: &DecisionNetwork,
        column: &str,
        scores: Vec<(String, f64)>,
        convergence: Option<Convergence>,
    ) -> Self {
        let alt_total: f64 = net
            .alternatives()
            .map(|a| scores.iter().find(|(n, _)| n == &a.id).map_or(0.0, |s| s.1))
            .sum();
        let mut alternatives: Vec<RankedAlternative> = net
            .alternatives()
            .map(|a| {
                let weight = scores
                    .iter()
                    .find(|(n, _)| n == &a.id)
                    .map_or(0.0, |s| s.1)
                    .max(0.0);
                RankedAlternative {
                    node: a.id.clone(),
                    label: a.label.clone(),
                    weight,
                    normalized: if alt_total > 0.0 {
                        weight / alt_total
                    } else {
                        0.0
                    },
                }
            })
            .collect();
        alternatives.sort_by(|x, y| {
            y.weight
                .total_cmp(&x.weight)
                .then_with(|| x.node.cmp(&y.node))
        });
        RankingReport {
            alternatives,
            column: column.to_string(),
            limit_column: scores
                .into_iter()
                .map(|(node, weight)| NodeWeight { node, weight })
                .collect(),
            convergence,
        }
    }
}

/// Reads alternative weights from the limit matrix. The goal node's column
/// is used when there is one (it is the column that carries the
/// goal-relative synthesis when the chain is reducible); otherwise the first
/// column.
pub fn rank(limit_m: &Supermatrix, net: &DecisionNetwork) -> RankingReport {
    let column = net
        .goal_cluster()
        .and_then(|g| g.nodes.first())
        .map(|n| n.id.clone())
        .or_else(|| limit_m.index.first().cloned())
        .unwrap_or_default();
    let values = limit_m.column(&column).unwrap_or_default();
    let scores = limit_m.index.iter().cloned().zip(values).collect();
    RankingReport::from_scores(net, &column, scores, limit_m.convergence)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ComparisonMatrix;
    use crate::network::{Cluster, ClusterKind};

    fn sm(entries: DMatrix<f64>, ids: &[&str]) -> Supermatrix {
        Supermatrix {
            index: ids.iter().map(|s| s.to_string()).collect(),
            blocks: vec![("all".into(), 0, ids.len())],
            entries,
            state: MatrixState::Weighted,
            convergence: None,
        }
    }

    #[test]
    fn two_cycle_uses_cesaro_average() {
        let w = sm(
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]),
            &["a", "b"],
        );
        let l = limit(&w, &ConvergenceOptions::default()).unwrap();
        assert!(l.convergence.unwrap().cesaro_used);
        for v in l.entries.iter() {
            assert!((v - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn three_cycle_fails_loudly() {
        let w = sm(
            DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]),
            &["a", "b", "c"],
        );
        let err = limit(&w, &ConvergenceOptions::default()).unwrap_err();
        assert!(matches!(err, SupermatrixError::ConvergenceFailure { .. }));
    }

    #[test]
    fn four_cycle_reports_long_period() {
        let mut e = DMatrix::zeros(4, 4);
        for i in 0..4 {
            e[((i + 1) % 4, i)] = 1.0;
        }
        let err = limit(
            &sm(e, &["a", "b", "c", "d"]),
            &ConvergenceOptions::default(),
        )
        .unwrap_err();
        match err {
            SupermatrixError::ConvergenceFailure { detail, .. } => {
                assert!(detail.contains("period greater than 2"))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn power_cap_is_honoured() {
        let w = sm(
            DMatrix::from_row_slice(2, 2, &[0.9, 0.2, 0.1, 0.8]),
            &["a", "b"],
        );
        let opts = ConvergenceOptions {
            tolerance: 1e-10,
            max_power: 2,
        };
        assert!(matches!(
            limit(&w, &opts),
            Err(SupermatrixError::ConvergenceFailure { .. })
        ));
        let l = limit(&w, &ConvergenceOptions::default()).unwrap();
        // stationary distribution of the 2-state chain: (2/3, 1/3)
        assert!((l.entries[(0, 0)] - 2.0 / 3.0).abs() < 1e-9);
        assert!((l.entries[(1, 1)] - 1.0 / 3.0).abs() < 1e-9);
    }

    fn tiny_net() -> DecisionNetwork {
        DecisionNetwork::new(
            vec![
                Cluster::new(
                    "crit",
                    "Criteria",
                    ClusterKind::Criteria,
                    &[("c1", "C1"), ("c2", "C2")],
                ),
                Cluster::new(
                    "alts",
                    "Alternatives",
                    ClusterKind::Alternatives,
                    &[("a1", "A1"), ("a2", "A2")],
                ),
            ],
            vec![
                SlotKey::new("c1", "crit"),
                SlotKey::new("c2", "crit"),
                SlotKey::new("c1", "alts"),
                SlotKey::new("c2", "alts"),
                SlotKey::new("a1", "crit"),
                SlotKey::new("a2", "crit"),
            ],
        )
    }

    #[test]
    fn no_edges_gives_zero_matrix() {
        let net = DecisionNetwork::new(tiny_net().clusters().to_vec(), vec![]);
        let u = assemble_unweighted(&net, &BTreeMap::new()).unwrap();
        assert!(u.entries.iter().all(|&v| v == 0.0));
        // every column is a sink, so weighting yields the identity
        let w = weight(
            &u,
            &derive_cluster_weights(&net, &RciTable::default(), Default::default()).unwrap(),
        );
        assert_eq!(w.entries, DMatrix::identity(4, 4));
    }

    #[test]
    fn missing_priority_is_incomplete() {
        let net = tiny_net();
        let err = assemble_unweighted(&net, &BTreeMap::new()).unwrap_err();
        match err {
            SupermatrixError::IncompleteModel(slots) => {
                assert_eq!(
                    slots.len(),
                    4,
                    "single-element slots need no priorities: {slots:?}"
                )
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn default_cluster_weights_split_equally() {
        let net = tiny_net();
        let cw = derive_cluster_weights(&net, &RciTable::default(), Default::default()).unwrap();
        assert_eq!(cw.weight("crit", "crit"), Some(0.5));
        assert_eq!(cw.weight("crit", "alts"), Some(0.5));
        assert_eq!(cw.weight("alts", "crit"), Some(1.0));
        assert!(cw.derived.is_empty());
    }

    #[test]
    fn explicit_cluster_matrix_overrides_default() {
        let net = tiny_net()
            .with_cluster_matrix(
                "crit",
                ComparisonMatrix::parse(&["crit", "alts"], &["3"]).unwrap(),
            )
            .unwrap();
        let cw = derive_cluster_weights(&net, &RciTable::default(), Default::default()).unwrap();
        assert!((cw.weight("crit", "crit").unwrap() - 0.75).abs() < 1e-12);
        assert!((cw.weight("crit", "alts").unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn identity_weighting_leaves_stochastic_matrix_unchanged() {
        let e = DMatrix::from_row_slice(2, 2, &[0.3, 0.6, 0.7, 0.4]);
        let mut u = sm(e.clone(), &["a", "b"]);
        u.state = MatrixState::Unweighted;
        let cw = ClusterWeights {
            by_source: [("all".to_string(), vec![("all".to_string(), 1.0)])]
                .into_iter()
                .collect(),
            derived: BTreeMap::new(),
        };
        assert_eq!(weight(&u, &cw).entries, e);
    }

    #[test]
    fn ranking_ties_break_by_id() {
        let net = DecisionNetwork::new(
            vec![Cluster::new(
                "alts",
                "A",
                ClusterKind::Alternatives,
                &[("b", "B"), ("a", "A")],
            )],
            vec![],
        );
        let r =
            RankingReport::from_scores(&net, "a", vec![("b".into(), 0.5), ("a".into(), 0.5)], None);
        assert_eq!(r.order(), vec!["a", "b"]);
        assert_eq!(r.alternatives[0].normalized, 0.5);
    }
}
