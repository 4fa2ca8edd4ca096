//! End-to-end solving: priorities per slot, consistency screening,
//! supermatrix weighting, limit and ranking.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::judgment::{Judgment, ScaleMode};
use crate::matrix::MatrixError;
use crate::network::{
    ClusterKind, DecisionNetwork, NetworkError, PairKey, SlotKey, ValidationReport,
};
use crate::priority::{
    principal_eigenvector, screen_consistency, ConsistencyOptions, ConsistencyVerdict,
    PriorityError, PriorityVector, RciTable,
};
use crate::supermatrix::{
    assemble_unweighted, derive_cluster_weights, limit, rank, weight, ClusterWeights,
    ConvergenceOptions, RankingReport, Supermatrix, SupermatrixError,
};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveOptions {
    pub consistency: ConsistencyOptions,
    pub rci: RciTable,
    pub convergence: ConvergenceOptions,
}

/// A slot whose matrix did not pass screening.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotFailure {
    pub slot: String,
    pub cr: f64,
    pub verdict: ConsistencyVerdict,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("network is invalid:\n{0}")]
    Invalid(ValidationReport),
    #[error("model is incomplete; unrated slots: {}", join(.0))]
    Incomplete(Vec<SlotKey>),
    #[error("{} failed consistency screening: {}", plural(.0.len(), "matrix", "matrices"), .0.iter().map(|f| format!("{} (cr {:.4})", f.slot, f.cr)).collect::<Vec<_>>().join(", "))]
    Inconsistent(Vec<SlotFailure>),
    #[error("slot {slot}: {source}")]
    Priority {
        slot: SlotKey,
        #[source]
        source: PriorityError,
    },
    #[error(transparent)]
    Supermatrix(#[from] SupermatrixError),
    #[error("not a strict goal -> criteria -> alternatives hierarchy: {0}")]
    NotAHierarchy(String),
    #[error("override {slot} {pair}: {reason}")]
    InvalidOverride {
        slot: String,
        pair: String,
        reason: String,
    },
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

fn plural(n: usize, one: &str, many: &str) -> String {
    format!("{n} {}", if n == 1 { one } else { many })
}

fn join(slots: &[SlotKey]) -> String {
    slots
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlotPriority {
    pub slot: SlotKey,
    pub priority: PriorityVector,
    pub verdict: ConsistencyVerdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub slots: Vec<SlotPriority>,
    pub cluster_weights: ClusterWeights,
    pub unweighted: Supermatrix,
    pub weighted: Supermatrix,
    pub limit: Supermatrix,
    pub ranking: RankingReport,
}

impl Solution {
    pub fn slot(&self, key: &SlotKey) -> Option<&SlotPriority> {
        self.slots.iter().find(|s| &s.slot == key)
    }
}

/// Priority vector and verdict for every rated slot, in edge order.
pub fn slot_priorities(
    net: &DecisionNetwork,
    opts: &SolveOptions,
) -> Result<Vec<SlotPriority>, SolveError> {
    net.edges()
        .iter()
        .filter_map(|e| e.matrix.as_ref().map(|m| (e, m)))
        .map(|(edge, m)| {
            let priority =
                principal_eigenvector(m, &opts.rci).map_err(|source| SolveError::Priority {
                    slot: edge.slot.clone(),
                    source,
                })?;
            let verdict = screen_consistency(&priority, m.order(), opts.consistency.policy);
            Ok(SlotPriority {
                slot: edge.slot.clone(),
                priority,
                verdict,
            })
        })
        .collect()
}

/// Runs the whole pipeline. In strict mode any non-passing verdict aborts
/// with [`SolveError::Inconsistent`] listing every offending slot.
pub fn solve(net: &DecisionNetwork, opts: &SolveOptions) -> Result<Solution, SolveError> {
    let report = net.validate();
    if !report.is_clean() {
        return Err(SolveError::Invalid(report));
    }
    let pending = net.required_judgments();
    if !pending.is_empty() {
        return Err(SolveError::Incomplete(
            pending.into_iter().map(|s| s.key).collect(),
        ));
    }
    let slots = slot_priorities(net, opts)?;
    if opts.consistency.strict {
        let failures: Vec<SlotFailure> = slots
            .iter()
            .filter(|s| !s.verdict.is_pass())
            .map(|s| SlotFailure {
                slot: s.slot.to_string(),
                cr: s.priority.cr,
                verdict: s.verdict,
            })
            .collect();
        if !failures.is_empty() {
            return Err(SolveError::Inconsistent(failures));
        }
    }
    let priorities: BTreeMap<SlotKey, PriorityVector> = slots
        .iter()
        .map(|s| (s.slot.clone(), s.priority.clone()))
        .collect();
    let unweighted = assemble_unweighted(net, &priorities)?;
    let cluster_weights = derive_cluster_weights(net, &opts.rci, opts.consistency)?;
    let weighted = weight(&unweighted, &cluster_weights);
    let limit_m = limit(&weighted, &opts.convergence)?;
    let ranking = rank(&limit_m, net);
    Ok(Solution {
        slots,
        cluster_weights,
        unweighted,
        weighted,
        limit: limit_m,
        ranking,
    })
}

/// Classical hierarchic synthesis: the score of an alternative is the sum
/// over criteria of (criterion weight under the goal) x (alternative weight
/// under that criterion).
pub fn solve_hierarchy(net: &DecisionNetwork, rci: &RciTable) -> Result<RankingReport, SolveError> {
    let not = |msg: String| SolveError::NotAHierarchy(msg);
    let goal = net
        .goal_cluster()
        .ok_or_else(|| not("no goal cluster".into()))?;
    let [goal_node] = goal.nodes.as_slice() else {
        return Err(not(format!(
            "goal cluster has {} nodes, expected 1",
            goal.nodes.len()
        )));
    };
    let goal_edges: Vec<_> = net
        .edges()
        .iter()
        .filter(|e| e.slot.control == goal_node.id)
        .collect();
    let [goal_edge] = goal_edges.as_slice() else {
        return Err(not(format!(
            "goal has {} dependencies, expected 1",
            goal_edges.len()
        )));
    };
    let criteria = net
        .cluster(&goal_edge.slot.cluster)
        .filter(|c| c.kind == ClusterKind::Criteria)
        .ok_or_else(|| not("goal must point at a criteria cluster".into()))?;
    let alternatives: Vec<_> = net
        .clusters()
        .iter()
        .filter(|c| c.kind == ClusterKind::Alternatives)
        .collect();
    let [alternatives] = alternatives.as_slice() else {
        return Err(not("expected exactly one alternatives cluster".into()));
    };

    for edge in net.edges() {
        let from = net.cluster_of(&edge.slot.control).map(|c| c.id.as_str());
        let ok = (from == Some(goal.id.as_str()) && edge.slot.cluster == criteria.id)
            || (from == Some(criteria.id.as_str()) && edge.slot.cluster == alternatives.id);
        if !ok {
            return Err(not(format!(
                "dependency {} is feedback or a loop",
                edge.slot
            )));
        }
    }

    let priority_of = |slot: &SlotKey| -> Result<PriorityVector, SolveError> {
        let elements = net.slot_elements(slot).unwrap_or_default();
        if elements.len() == 1 {
            return Ok(PriorityVector::single(&elements[0]));
        }
        let m = net
            .edge(slot)
            .and_then(|e| e.matrix.as_ref())
            .ok_or_else(|| SolveError::Incomplete(vec![slot.clone()]))?;
        principal_eigenvector(m, rci).map_err(|source| SolveError::Priority {
            slot: slot.clone(),
            source,
        })
    };

    let goal_pv = priority_of(&goal_edge.slot)?;
    let mut scores: BTreeMap<&str, f64> = alternatives.node_ids().map(|id| (id, 0.0)).collect();
    for (criterion, cw) in goal_pv.labels.iter().zip(&goal_pv.weights) {
        let slot = SlotKey::new(criterion, &alternatives.id);
        if net.edge(&slot).is_none() {
            return Err(not(format!(
                "criterion {criterion} has no alternatives comparison"
            )));
        }
        let pv = priority_of(&slot)?;
        for (alt, aw) in pv.labels.iter().zip(&pv.weights) {
            *scores.get_mut(alt.as_str()).expect("alternative node") += cw * aw;
        }
    }
    let scores = alternatives
        .node_ids()
        .map(|id| (id.to_string(), scores[id]))
        .collect();
    Ok(RankingReport::from_scores(net, &goal_node.id, scores, None))
}

/// One perturbed judgment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Override {
    pub slot: SlotKey,
    pub pair: PairKey,
    pub value: Judgment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankDelta {
    pub node: String,
    pub baseline: f64,
    pub perturbed: f64,
    pub delta: f64,
    pub baseline_rank: usize,
    pub perturbed_rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhatIf {
    pub baseline: RankingReport,
    pub perturbed: RankingReport,
    pub delta: Vec<RankDelta>,
}

/// Applies overrides to a copy of `net`.
pub fn apply_overrides(
    net: &DecisionNetwork,
    overrides: &[Override],
) -> Result<DecisionNetwork, SolveError> {
    let mut out = net.clone();
    for o in overrides {
        let bad = |reason: String| SolveError::InvalidOverride {
            slot: o.slot.to_string(),
            pair: o.pair.to_string(),
            reason,
        };
        let edge = out
            .edge(&o.slot)
            .ok_or_else(|| bad("unknown slot".into()))?;
        let m = edge
            .matrix
            .as_ref()
            .ok_or_else(|| bad("slot has no judgments yet".into()))?;
        let i = m
            .index_of(&o.pair.a)
            .ok_or_else(|| bad(format!("{} is not compared in this slot", o.pair.a)))?;
        let j = m
            .index_of(&o.pair.b)
            .ok_or_else(|| bad(format!("{} is not compared in this slot", o.pair.b)))?;
        let edited = m
            .with_judgment(i, j, o.value, ScaleMode::Saaty)
            .map_err(|e| bad(e.to_string()))?;
        out = out.attach_judgments(&o.slot, edited)?;
    }
    Ok(out)
}

/// Re-solves with `overrides` applied, leaving `net` untouched. Screening is
/// reported but never aborts an exploration, so strict mode is ignored here.
pub fn whatif(
    net: &DecisionNetwork,
    overrides: &[Override],
    opts: &SolveOptions,
) -> Result<WhatIf, SolveError> {
    let relaxed = SolveOptions {
        consistency: ConsistencyOptions {
            strict: false,
            ..opts.consistency
        },
        ..opts.clone()
    };
    let baseline = solve(net, &relaxed)?.ranking;
    let perturbed = solve(&apply_overrides(net, overrides)?, &relaxed)?.ranking;
    let delta = baseline
        .alternatives
        .iter()
        .enumerate()
        .map(|(baseline_rank, b)| {
            let (perturbed_rank, p) = perturbed
                .alternatives
                .iter()
                .enumerate()
                .find(|(_, p)| p.node == b.node)
                .expect("same alternatives");
            RankDelta {
                node: b.node.clone(),
                baseline: b.weight,
                perturbed: p.weight,
                delta: p.weight - b.weight,
                baseline_rank: baseline_rank + 1,
                perturbed_rank: perturbed_rank + 1,
            }
        })
        .collect();
    Ok(WhatIf {
        baseline,
        perturbed,
        delta,
    })
}
