//! Decision networks: clusters of nodes, declared influence edges and the
//! comparison matrices attached to them.
//!
//! An influence edge `control -> cluster` says the nodes of `cluster` are
//! compared pairwise with respect to `control`. When `control` itself lives
//! in `cluster` it is left out of the comparison, so a criterion is never
//! judged against itself.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::matrix::{upper_pairs, ComparisonMatrix};

/// Separator used in slot and pair keys (`control:cluster`, `a:b`).
pub const KEY_SEPARATOR: char = ':';

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusterKind {
    Goal,
    Criteria,
    Alternatives,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Node {
    pub id: String,
    pub label: String,
}

/// Node order inside a cluster fixes supermatrix row/column order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cluster {
    pub id: String,
    pub label: String,
    pub kind: ClusterKind,
    pub nodes: Vec<Node>,
}

impl Cluster {
    pub fn new(id: &str, label: &str, kind: ClusterKind, nodes: &[(&str, &str)]) -> Self {
        Self {
            id: id.to_string(),
            label: label.to_string(),
            kind,
            nodes: nodes
                .iter()
                .map(|(id, label)| Node {
                    id: id.to_string(),
                    label: label.to_string(),
                })
                .collect(),
        }
    }

    pub fn node_ids(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().map(|n| n.id.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KeyError {
    #[error("malformed key {0:?}: expected \"<a>:<b>\"")]
    Malformed(String),
}

fn split_key(s: &str) -> Result<(String, String), KeyError> {
    match s.split_once(KEY_SEPARATOR) {
        Some((a, b)) if !a.is_empty() && !b.is_empty() && !b.contains(KEY_SEPARATOR) => {
            Ok((a.to_string(), b.to_string()))
        }
        _ => Err(KeyError::Malformed(s.to_string())),
    }
}

/// Identifies one comparison: the nodes of `cluster` judged with respect to
/// `control`. Written as `control:cluster`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SlotKey {
    pub control: String,
    pub cluster: String,
}

impl SlotKey {
    pub fn new(control: &str, cluster: &str) -> Self {
        Self {
            control: control.to_string(),
            cluster: cluster.to_string(),
        }
    }
}

impl fmt::Display for SlotKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{KEY_SEPARATOR}{}", self.control, self.cluster)
    }
}

impl FromStr for SlotKey {
    type Err = KeyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (control, cluster) = split_key(s)?;
        Ok(Self { control, cluster })
    }
}

/// An element pair `(a, b)` inside a slot; `a` must precede `b` in the slot's
/// element order. Written as `a:b`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairKey {
    pub a: String,
    pub b: String,
}

impl PairKey {
    pub fn new(a: &str, b: &str) -> Self {
        Self {
            a: a.to_string(),
            b: b.to_string(),
        }
    }

    pub fn reversed(&self) -> Self {
        Self {
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }
}

impl fmt::Display for PairKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{KEY_SEPARATOR}{}", self.a, self.b)
    }
}

impl FromStr for PairKey {
    type Err = KeyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = split_key(s)?;
        Ok(Self { a, b })
    }
}

macro_rules! string_serde {
    ($ty:ty) => {
        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                let s = String::deserialize(deserializer)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(SlotKey);
string_serde!(PairKey);

/// A declared dependency and, once rated, its comparison matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceEdge {
    pub slot: SlotKey,
    pub matrix: Option<ComparisonMatrix>,
}

/// A comparison the network still needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JudgmentSlot {
    pub key: SlotKey,
    /// Compared node ids in cluster order (control node excluded).
    pub elements: Vec<String>,
}

impl JudgmentSlot {
    pub fn pairs(&self) -> Vec<PairKey> {
        upper_pairs(self.elements.len())
            .map(|(i, j)| PairKey::new(&self.elements[i], &self.elements[j]))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            path: path.into(),
            message: message.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return writeln!(f, "network is valid");
        }
        for v in &self.violations {
            writeln!(f, "{}: {}", v.path, v.message)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetworkError {
    #[error("slot {0} is not a declared dependency")]
    UnknownSlot(SlotKey),
    #[error("slot {slot} compares {expected} elements but the matrix has order {got}")]
    SlotShapeMismatch {
        slot: SlotKey,
        expected: usize,
        got: usize,
    },
    #[error("slot {slot} expects elements {expected:?}, matrix is labelled {got:?}")]
    SlotLabelMismatch {
        slot: SlotKey,
        expected: Vec<String>,
        got: Vec<String>,
    },
    #[error("unknown cluster {0}")]
    UnknownCluster(String),
    #[error("cluster {cluster} influences {expected:?}, matrix is labelled {got:?}")]
    ClusterLabelMismatch {
        cluster: String,
        expected: Vec<String>,
        got: Vec<String>,
    },
}

/// Clusters, influence edges and attached judgments. Values are immutable:
/// every edit returns a new network.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionNetwork {
    clusters: Vec<Cluster>,
    edges: Vec<InfluenceEdge>,
    cluster_matrices: BTreeMap<String, ComparisonMatrix>,
}

impl DecisionNetwork {
    /// Builds a network from declared dependencies with no judgments yet.
    pub fn new(clusters: Vec<Cluster>, dependencies: Vec<SlotKey>) -> Self {
        let edges = dependencies
            .into_iter()
            .map(|slot| InfluenceEdge { slot, matrix: None })
            .collect();
        Self::from_parts(clusters, edges, BTreeMap::new())
    }

    /// Assembles a network without checking it; see [`Self::validate`].
    pub fn from_parts(
        clusters: Vec<Cluster>,
        edges: Vec<InfluenceEdge>,
        cluster_matrices: BTreeMap<String, ComparisonMatrix>,
    ) -> Self {
        Self {
            clusters,
            edges,
            cluster_matrices,
        }
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn edges(&self) -> &[InfluenceEdge] {
        &self.edges
    }

    pub fn cluster_matrices(&self) -> &BTreeMap<String, ComparisonMatrix> {
        &self.cluster_matrices
    }

    pub fn cluster(&self, id: &str) -> Option<&Cluster> {
        self.clusters.iter().find(|c| c.id == id)
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.clusters
            .iter()
            .flat_map(|c| &c.nodes)
            .find(|n| n.id == id)
    }

    /// Cluster owning node `id`.
    pub fn cluster_of(&self, node_id: &str) -> Option<&Cluster> {
        self.clusters
            .iter()
            .find(|c| c.nodes.iter().any(|n| n.id == node_id))
    }

    /// All node ids in supermatrix order.
    pub fn node_ids(&self) -> Vec<&str> {
        self.clusters.iter().flat_map(|c| c.node_ids()).collect()
    }

    pub fn goal_cluster(&self) -> Option<&Cluster> {
        self.clusters.iter().find(|c| c.kind == ClusterKind::Goal)
    }

    pub fn alternatives(&self) -> impl Iterator<Item = &Node> {
        self.clusters
            .iter()
            .filter(|c| c.kind == ClusterKind::Alternatives)
            .flat_map(|c| &c.nodes)
    }

    pub fn edge(&self, slot: &SlotKey) -> Option<&InfluenceEdge> {
        self.edges.iter().find(|e| &e.slot == slot)
    }

    /// Compared elements of a slot: the dependent cluster's nodes minus the
    /// control node. `None` if the slot does not resolve.
    pub fn slot_elements(&self, slot: &SlotKey) -> Option<Vec<String>> {
        self.node(&slot.control)?;
        let cluster = self.cluster(&slot.cluster)?;
        Some(
            cluster
                .node_ids()
                .filter(|id| *id != slot.control)
                .map(str::to_string)
                .collect(),
        )
    }

    /// Clusters influenced by some node of `source`, in cluster order.
    pub fn influenced_clusters(&self, source: &str) -> Vec<String> {
        let targets: BTreeSet<&str> = self
            .edges
            .iter()
            .filter(|e| {
                self.cluster_of(&e.slot.control)
                    .is_some_and(|c| c.id == source)
            })
            .map(|e| e.slot.cluster.as_str())
            .collect();
        self.clusters
            .iter()
            .filter(|c| targets.contains(c.id.as_str()))
            .map(|c| c.id.clone())
            .collect()
    }

    /// Declared comparisons that still lack a matrix. Slots with a single
    /// element need no judgment and are never listed.
    pub fn required_judgments(&self) -> Vec<JudgmentSlot> {
        self.edges
            .iter()
            .filter(|e| e.matrix.is_none())
            .filter_map(|e| {
                let elements = self.slot_elements(&e.slot)?;
                (elements.len() >= 2).then(|| JudgmentSlot {
                    key: e.slot.clone(),
                    elements,
                })
            })
            .collect()
    }

    /// Returns a copy with `matrix` attached to `slot` (replacing any
    /// existing one).
    pub fn attach_judgments(
        &self,
        slot: &SlotKey,
        matrix: ComparisonMatrix,
    ) -> Result<Self, NetworkError> {
        let idx = self
            .edges
            .iter()
            .position(|e| &e.slot == slot)
            .ok_or_else(|| NetworkError::UnknownSlot(slot.clone()))?;
        let expected = self
            .slot_elements(slot)
            .ok_or_else(|| NetworkError::UnknownSlot(slot.clone()))?;
        if expected.len() != matrix.order() {
            return Err(NetworkError::SlotShapeMismatch {
                slot: slot.clone(),
                expected: expected.len(),
                got: matrix.order(),
            });
        }
        if expected.as_slice() != matrix.labels() {
            return Err(NetworkError::SlotLabelMismatch {
                slot: slot.clone(),
                expected,
                got: matrix.labels().to_vec(),
            });
        }
        let mut out = self.clone();
        out.edges[idx].matrix = Some(matrix);
        Ok(out)
    }

    /// Returns a copy with a cluster-level comparison attached for `source`.
    /// Labels must be the clusters `source` influences, in cluster order.
    pub fn with_cluster_matrix(
        &self,
        source: &str,
        matrix: ComparisonMatrix,
    ) -> Result<Self, NetworkError> {
        if self.cluster(source).is_none() {
            return Err(NetworkError::UnknownCluster(source.to_string()));
        }
        let expected = self.influenced_clusters(source);
        if expected.as_slice() != matrix.labels() {
            return Err(NetworkError::ClusterLabelMismatch {
                cluster: source.to_string(),
                expected,
                got: matrix.labels().to_vec(),
            });
        }
        let mut out = self.clone();
        out.cluster_matrices.insert(source.to_string(), matrix);
        Ok(out)
    }

    pub fn without_cluster_matrices(&self) -> Self {
        let mut out = self.clone();
        out.cluster_matrices.clear();
        out
    }

    /// Copy keeping only the edges for which `keep` holds.
    pub fn retain_edges(&self, keep: impl Fn(&InfluenceEdge) -> bool) -> Self {
        let mut out = self.clone();
        out.edges.retain(|e| keep(e));
        let live: BTreeSet<String> = out
            .clusters
            .iter()
            .map(|c| c.id.clone())
            .filter(|c| !out.influenced_clusters(c).is_empty())
            .collect();
        out.cluster_matrices.retain(|k, _| live.contains(k));
        out
    }

    /// Lists every structural problem. An empty report plus an empty
    /// [`Self::required_judgments`] means the network can be solved.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let mut cluster_ids = BTreeSet::new();
        let mut node_ids = BTreeSet::new();

        for (ci, cluster) in self.clusters.iter().enumerate() {
            let path = format!("clusters[{ci}]");
            check_id(&mut report, &format!("{path}.id"), &cluster.id);
            if !cluster_ids.insert(cluster.id.as_str()) {
                report.push(
                    format!("{path}.id"),
                    format!("duplicate cluster id {:?}", cluster.id),
                );
            }
            if cluster.nodes.is_empty() && cluster.kind != ClusterKind::Alternatives {
                report.push(&path, format!("cluster {:?} has no nodes", cluster.id));
            }
            for (ni, node) in cluster.nodes.iter().enumerate() {
                let npath = format!("{path}.nodes[{ni}].id");
                check_id(&mut report, &npath, &node.id);
                if !node_ids.insert(node.id.as_str()) {
                    report.push(npath, format!("duplicate node id {:?}", node.id));
                }
            }
        }

        let goals: Vec<&Cluster> = self
            .clusters
            .iter()
            .filter(|c| c.kind == ClusterKind::Goal)
            .collect();
        if goals.len() > 1 {
            report.push(
                "clusters",
                format!("{} goal clusters, at most one allowed", goals.len()),
            );
        }
        if self.alternatives().next().is_none() {
            report.push("clusters", "no alternatives");
        }

        let mut seen_slots = BTreeSet::new();
        for (ei, edge) in self.edges.iter().enumerate() {
            let path = format!("dependencies[{ei}]");
            let slot = &edge.slot;
            if !seen_slots.insert(slot) {
                report.push(&path, format!("duplicate dependency {slot}"));
            }
            if self.node(&slot.control).is_none() {
                report.push(
                    &path,
                    format!("edge {slot}: unknown control node {:?}", slot.control),
                );
            }
            match self.cluster(&slot.cluster) {
                None => report.push(
                    &path,
                    format!("edge {slot}: unknown cluster {:?}", slot.cluster),
                ),
                Some(c) if c.kind == ClusterKind::Goal => report.push(
                    &path,
                    format!("edge {slot}: the goal cluster cannot depend on other nodes"),
                ),
                Some(_) => {}
            }
            let Some(elements) = self.slot_elements(slot) else {
                continue;
            };
            if elements.is_empty() {
                report.push(
                    &path,
                    format!(
                        "edge {slot}: nothing left to compare once the control node is excluded"
                    ),
                );
            }
            if let Some(m) = &edge.matrix {
                if m.labels() != elements.as_slice() {
                    let strangers: Vec<&String> = m
                        .labels()
                        .iter()
                        .filter(|l| !elements.contains(l))
                        .collect();
                    let detail = if strangers.is_empty() {
                        String::new()
                    } else {
                        format!(
                            " ({strangers:?} not in cluster {:?} or excluded)",
                            slot.cluster
                        )
                    };
                    report.push(
                        format!("{path}.matrix"),
                        format!("edge {slot}: matrix labels {:?} do not match slot elements {elements:?}{detail}", m.labels()),
                    );
                }
            }
        }

        for (source, m) in &self.cluster_matrices {
            let path = format!("cluster_judgments.{source}");
            if self.cluster(source).is_none() {
                report.push(&path, format!("unknown cluster {source:?}"));
                continue;
            }
            let expected = self.influenced_clusters(source);
            if m.labels() != expected.as_slice() {
                report.push(
                    &path,
                    format!(
                        "cluster matrix labels {:?} do not match influenced clusters {expected:?}",
                        m.labels()
                    ),
                );
            }
        }

        if let [goal] = goals.as_slice() {
            let reached = self.reachable_clusters(&goal.id);
            for cluster in &self.clusters {
                if !reached.contains(cluster.id.as_str()) {
                    report.push(
                        "clusters",
                        format!("cluster {:?} is not reachable from the goal", cluster.id),
                    );
                }
            }
        }
        report
    }

    fn reachable_clusters<'a>(&'a self, start: &'a str) -> BTreeSet<&'a str> {
        let mut adjacency: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for edge in &self.edges {
            if let (Some(from), Some(to)) = (
                self.cluster_of(&edge.slot.control),
                self.cluster(&edge.slot.cluster),
            ) {
                adjacency
                    .entry(from.id.as_str())
                    .or_default()
                    .insert(to.id.as_str());
            }
        }
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(c) = queue.pop_front() {
            for &next in adjacency.get(c).into_iter().flatten() {
                if seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        seen
    }
}

fn check_id(report: &mut ValidationReport, path: &str, id: &str) {
    let ok = !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'));
    if !ok {
        report.push(
            path,
            format!("id {id:?} must be non-empty and use only [A-Za-z0-9_.-]"),
        );
    }
}
