//! The `.anp.json` model file and the solved result document.
//!
//! Model files store topology plus upper-triangle judgments only; the
//! reciprocal half of every matrix is derived, never stored. Saving is
//! canonical: field order is fixed, maps are sorted and judgments are exact
//! rational strings, so identical documents produce identical bytes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::judgment::{Judgment, ScaleMode};
use crate::matrix::{upper_pairs, ComparisonMatrix};
use crate::network::{Cluster, DecisionNetwork, InfluenceEdge, PairKey, SlotKey, ValidationReport};
use crate::pipeline::{Solution, SolveOptions};
use crate::priority::{ConsistencyOptions, ConsistencyPolicy, ConsistencyVerdict, RciTable};
use crate::supermatrix::{ConvergenceOptions, RankingReport, Supermatrix};

pub const FORMAT_VERSION: u32 = 1;
pub const FILE_EXTENSION: &str = ".anp.json";
pub const ENGINE_VERSION: &str = concat!("anp-core ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("unsupported format_version {0} (this build reads version {FORMAT_VERSION})")]
    UnsupportedVersion(u64),
    #[error("schema error at {path}: {message}")]
    SchemaError { path: String, message: String },
}

impl ModelError {
    fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        ModelError::SchemaError {
            path: path.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub title: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default)]
    pub raters: Vec<String>,
    /// Free-form annotations. Never read by the solver.
    #[serde(default)]
    pub annotations: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dependency {
    pub control: String,
    pub cluster: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Topology {
    pub clusters: Vec<Cluster>,
    pub dependencies: Vec<Dependency>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelOptions {
    pub policy: ConsistencyPolicy,
    pub strict: bool,
    pub scale: ScaleMode,
    pub convergence: ConvergenceOptions,
    /// Replaces the built-in random consistency index table.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rci: Option<BTreeMap<usize, f64>>,
}

impl ModelOptions {
    pub fn solve_options(&self) -> Result<SolveOptions, ModelError> {
        let rci = match &self.rci {
            Some(values) => RciTable::new(values.clone())
                .map_err(|e| ModelError::schema("options.rci", e.to_string()))?,
            None => RciTable::default(),
        };
        Ok(SolveOptions {
            consistency: ConsistencyOptions {
                policy: self.policy,
                strict: self.strict,
            },
            rci,
            convergence: self.convergence,
        })
    }
}

pub type PairJudgments = BTreeMap<PairKey, Judgment>;

/// A model file: topology, (possibly partial) judgments, options and
/// metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub format_version: u32,
    pub metadata: Metadata,
    #[serde(default)]
    pub options: ModelOptions,
    pub network: Topology,
    #[serde(default)]
    pub judgments: BTreeMap<SlotKey, PairJudgments>,
    /// Cluster-level comparisons keyed by source cluster; pairs name target
    /// clusters.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub cluster_judgments: BTreeMap<String, PairJudgments>,
}

/// A slot still missing judgments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PendingSlot {
    pub slot: SlotKey,
    pub elements: Vec<String>,
    pub missing: Vec<PairKey>,
}

/// Fill state of one slot after an edit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotState {
    pub slot: SlotKey,
    pub elements: Vec<String>,
    pub filled: usize,
    pub total: usize,
}

impl ModelDocument {
    pub fn new(metadata: Metadata, topology: Topology) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            metadata,
            options: ModelOptions::default(),
            network: topology,
            judgments: BTreeMap::new(),
            cluster_judgments: BTreeMap::new(),
        }
    }

    /// Topology-only network (no matrices attached).
    pub fn topology_network(&self) -> DecisionNetwork {
        DecisionNetwork::new(
            self.network.clusters.clone(),
            self.network
                .dependencies
                .iter()
                .map(|d| SlotKey::new(&d.control, &d.cluster))
                .collect(),
        )
    }

    /// The network with a matrix attached to every fully rated slot.
    pub fn to_network(&self) -> DecisionNetwork {
        let topo = self.topology_network();
        let edges = topo
            .edges()
            .iter()
            .map(|e| InfluenceEdge {
                slot: e.slot.clone(),
                matrix: topo
                    .slot_elements(&e.slot)
                    .and_then(|elements| complete_matrix(elements, self.judgments.get(&e.slot))),
            })
            .collect();
        let cluster_matrices = self
            .cluster_judgments
            .iter()
            .filter_map(|(source, pairs)| {
                complete_matrix(topo.influenced_clusters(source), Some(pairs))
                    .map(|m| (source.clone(), m))
            })
            .collect();
        DecisionNetwork::from_parts(topo.clusters().to_vec(), edges, cluster_matrices)
    }

    /// Document for `net`, storing every attached matrix's upper triangle.
    pub fn from_network(net: &DecisionNetwork, metadata: Metadata, options: ModelOptions) -> Self {
        let upper = |m: &ComparisonMatrix| -> PairJudgments {
            m.pairs()
                .map(|(i, j, v)| (PairKey::new(&m.labels()[i], &m.labels()[j]), v))
                .collect()
        };
        Self {
            format_version: FORMAT_VERSION,
            metadata,
            options,
            network: Topology {
                clusters: net.clusters().to_vec(),
                dependencies: net
                    .edges()
                    .iter()
                    .map(|e| Dependency {
                        control: e.slot.control.clone(),
                        cluster: e.slot.cluster.clone(),
                    })
                    .collect(),
            },
            judgments: net
                .edges()
                .iter()
                .filter_map(|e| e.matrix.as_ref().map(|m| (e.slot.clone(), upper(m))))
                .collect(),
            cluster_judgments: net
                .cluster_matrices()
                .iter()
                .map(|(k, m)| (k.clone(), upper(m)))
                .collect(),
        }
    }

    pub fn validate(&self) -> ValidationReport {
        self.to_network().validate()
    }

    /// Slots with at least two elements and at least one unrated pair.
    pub fn pending(&self) -> Vec<PendingSlot> {
        let topo = self.topology_network();
        topo.required_judgments()
            .into_iter()
            .filter_map(|slot| {
                let have = self.judgments.get(&slot.key);
                let missing: Vec<PairKey> = slot
                    .pairs()
                    .into_iter()
                    .filter(|p| have.is_none_or(|h| !h.contains_key(p)))
                    .collect();
                (!missing.is_empty()).then_some(PendingSlot {
                    slot: slot.key,
                    elements: slot.elements,
                    missing,
                })
            })
            .collect()
    }

    pub fn slot_state(&self, slot: &SlotKey) -> Option<SlotState> {
        let elements = self.topology_network().slot_elements(slot)?;
        let total = elements.len() * elements.len().saturating_sub(1) / 2;
        let filled = self.judgments.get(slot).map_or(0, |p| p.len());
        Some(SlotState {
            slot: slot.clone(),
            elements,
            filled,
            total,
        })
    }

    /// Stores one judgment. A pair given in reverse element order is stored
    /// as the reciprocal under the canonical key.
    pub fn set_judgment(
        &mut self,
        slot: &SlotKey,
        pair: &PairKey,
        value: Judgment,
    ) -> Result<(), JudgmentEditError> {
        let topo = self.topology_network();
        if topo.edge(slot).is_none() {
            return Err(JudgmentEditError::UnknownSlot(slot.clone()));
        }
        let elements = topo
            .slot_elements(slot)
            .ok_or_else(|| JudgmentEditError::UnknownSlot(slot.clone()))?;
        let pos = |id: &str| elements.iter().position(|e| e == id);
        let (i, j) = match (pos(&pair.a), pos(&pair.b)) {
            (Some(i), Some(j)) if i != j => (i, j),
            _ => return Err(JudgmentEditError::UnknownPair(slot.clone(), pair.clone())),
        };
        let value = value
            .check(self.options.scale)
            .map_err(|e| JudgmentEditError::OffScale(e.to_string()))?;
        let (key, value) = if i < j {
            (pair.clone(), value)
        } else {
            (pair.reversed(), value.reciprocal())
        };
        self.judgments
            .entry(slot.clone())
            .or_default()
            .insert(key, value);
        Ok(())
    }

    pub fn clear_slot(&mut self, slot: &SlotKey) {
        self.judgments.remove(slot);
    }

    /// Effective solve options, with command-line style overrides applied.
    pub fn solve_options(
        &self,
        policy: Option<ConsistencyPolicy>,
        strict: Option<bool>,
    ) -> Result<SolveOptions, ModelError> {
        let mut opts = self.options.solve_options()?;
        if let Some(p) = policy {
            opts.consistency.policy = p;
        }
        if let Some(s) = strict {
            opts.consistency.strict = s;
        }
        Ok(opts)
    }

    /// Checks judgment keys against the topology: declared slot, pairs drawn
    /// from the slot's elements in upper-triangle order, values on the
    /// model's scale.
    fn check_judgments(&self) -> Result<(), ModelError> {
        let topo = self.topology_network();
        for (slot, pairs) in &self.judgments {
            let path = format!("judgments.{slot}");
            if topo.edge(slot).is_none() {
                return Err(ModelError::schema(
                    path,
                    "judgment for an undeclared dependency",
                ));
            }
            let Some(elements) = topo.slot_elements(slot) else {
                continue;
            };
            check_pairs(&path, &elements, pairs, self.options.scale)?;
        }
        for (source, pairs) in &self.cluster_judgments {
            let path = format!("cluster_judgments.{source}");
            if topo.cluster(source).is_none() {
                return Err(ModelError::schema(path, "unknown cluster"));
            }
            check_pairs(
                &path,
                &topo.influenced_clusters(source),
                pairs,
                self.options.scale,
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JudgmentEditError {
    #[error("unknown slot {0}")]
    UnknownSlot(SlotKey),
    #[error("slot {0} has no pair {1}")]
    UnknownPair(SlotKey, PairKey),
    #[error("{0}")]
    OffScale(String),
}

fn check_pairs(
    path: &str,
    elements: &[String],
    pairs: &PairJudgments,
    scale: ScaleMode,
) -> Result<(), ModelError> {
    let pos = |id: &str| elements.iter().position(|e| e == id);
    for (pair, value) in pairs {
        let ppath = format!("{path}.{pair}");
        match (pos(&pair.a), pos(&pair.b)) {
            (Some(i), Some(j)) if i < j => {}
            (Some(i), Some(j)) if i > j => {
                return Err(ModelError::schema(
                    ppath,
                    format!("reciprocal stored: only {} may be given", pair.reversed()),
                ))
            }
            _ => {
                return Err(ModelError::schema(
                    ppath,
                    format!("pair is not among the compared elements {elements:?}"),
                ))
            }
        }
        value
            .check(scale)
            .map_err(|e| ModelError::schema(&ppath, e.to_string()))?;
    }
    Ok(())
}

fn complete_matrix(
    elements: Vec<String>,
    pairs: Option<&PairJudgments>,
) -> Option<ComparisonMatrix> {
    let pairs = pairs?;
    if elements.len() < 2 {
        return None;
    }
    let upper = upper_pairs(elements.len())
        .map(|(i, j)| {
            pairs
                .get(&PairKey::new(&elements[i], &elements[j]))
                .copied()
        })
        .collect::<Option<Vec<_>>>()?;
    ComparisonMatrix::from_upper(elements, upper, ScaleMode::Relaxed).ok()
}

/// Parses and checks a model file.
pub fn load(bytes: &[u8]) -> Result<ModelDocument, ModelError> {
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Err(ModelError::schema("$", "empty document"));
    }
    let value: Value = serde_json::from_slice(bytes).map_err(|e| {
        ModelError::schema(
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    match value.get("format_version") {
        None => return Err(ModelError::schema("format_version", "missing field")),
        Some(v) => match v.as_u64() {
            Some(v) if v == u64::from(FORMAT_VERSION) => {}
            Some(v) => return Err(ModelError::UnsupportedVersion(v)),
            None => {
                return Err(ModelError::schema(
                    "format_version",
                    "expected a positive integer",
                ))
            }
        },
    }
    let doc: ModelDocument = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        ModelError::schema(path, e.into_inner().to_string())
    })?;
    doc.check_judgments()?;
    doc.options.solve_options()?;
    Ok(doc)
}

/// Canonical bytes: pretty JSON, two-space indent, trailing newline.
pub fn save(doc: &ModelDocument) -> Vec<u8> {
    to_canonical_json(doc)
}

pub(crate) fn to_canonical_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("serializable");
    out.push(b'\n');
    out
}

/// `sha256:<hex>` of the canonical bytes.
pub fn digest(doc: &ModelDocument) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(save(doc))))
}

/// A node-labelled matrix for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixTable {
    pub nodes: Vec<String>,
    pub labels: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl MatrixTable {
    fn from_supermatrix(sm: &Supermatrix, net: &DecisionNetwork) -> Self {
        Self {
            nodes: sm.index.clone(),
            labels: sm
                .index
                .iter()
                .map(|id| net.node(id).map_or_else(|| id.clone(), |n| n.label.clone()))
                .collect(),
            rows: sm.rows(),
        }
    }

    pub fn get(&self, row: &str, col: &str) -> Option<f64> {
        let r = self.nodes.iter().position(|n| n == row)?;
        let c = self.nodes.iter().position(|n| n == col)?;
        Some(self.rows[r][c])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotResult {
    pub slot: SlotKey,
    pub control_label: String,
    pub elements: Vec<String>,
    /// Full matrix, row-major.
    pub matrix: Vec<Vec<Judgment>>,
    pub weights: Vec<f64>,
    pub lambda_max: f64,
    pub ci: f64,
    pub cr: f64,
    pub verdict: ConsistencyVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterWeightResult {
    pub source: String,
    pub targets: Vec<String>,
    pub weights: Vec<f64>,
    /// Present when the weights come from an explicit cluster comparison.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<ConsistencyVerdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveOptions {
    pub policy: ConsistencyPolicy,
    pub strict: bool,
    pub tolerance: f64,
    pub max_power: u64,
}

/// Everything a solve produced, tied to its input by digest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultDocument {
    pub format_version: u32,
    pub engine_version: String,
    pub input_digest: String,
    pub title: String,
    pub options: EffectiveOptions,
    pub slots: Vec<SlotResult>,
    pub cluster_weights: Vec<ClusterWeightResult>,
    pub unweighted: MatrixTable,
    pub weighted: MatrixTable,
    pub limit: MatrixTable,
    pub ranking: RankingReport,
}

impl ResultDocument {
    pub fn new(doc: &ModelDocument, solution: &Solution, opts: &SolveOptions) -> Self {
        let net = doc.to_network();
        let slots = solution
            .slots
            .iter()
            .map(|s| {
                let m = net
                    .edge(&s.slot)
                    .and_then(|e| e.matrix.as_ref())
                    .expect("solved slot has a matrix");
                let n = m.order();
                SlotResult {
                    slot: s.slot.clone(),
                    control_label: net
                        .node(&s.slot.control)
                        .map_or_else(|| s.slot.control.clone(), |n| n.label.clone()),
                    elements: s.priority.labels.clone(),
                    matrix: (0..n)
                        .map(|i| (0..n).map(|j| m.judgment(i, j)).collect())
                        .collect(),
                    weights: s.priority.weights.clone(),
                    lambda_max: s.priority.lambda_max,
                    ci: s.priority.ci,
                    cr: s.priority.cr,
                    verdict: s.verdict,
                }
            })
            .collect();
        let cluster_weights = solution
            .cluster_weights
            .by_source
            .iter()
            .map(|(source, targets)| {
                let derived = solution.cluster_weights.derived.get(source);
                ClusterWeightResult {
                    source: source.clone(),
                    targets: targets.iter().map(|(t, _)| t.clone()).collect(),
                    weights: targets.iter().map(|(_, w)| *w).collect(),
                    cr: derived.map(|d| d.priority.cr),
                    verdict: derived.map(|d| d.verdict),
                }
            })
            .collect();
        Self {
            format_version: FORMAT_VERSION,
            engine_version: ENGINE_VERSION.to_string(),
            input_digest: digest(doc),
            title: doc.metadata.title.clone(),
            options: EffectiveOptions {
                policy: opts.consistency.policy,
                strict: opts.consistency.strict,
                tolerance: opts.convergence.tolerance,
                max_power: opts.convergence.max_power,
            },
            slots,
            cluster_weights,
            unweighted: MatrixTable::from_supermatrix(&solution.unweighted, &net),
            weighted: MatrixTable::from_supermatrix(&solution.weighted, &net),
            limit: MatrixTable::from_supermatrix(&solution.limit, &net),
            ranking: solution.ranking.clone(),
        }
    }

    pub fn matches(&self, doc: &ModelDocument) -> bool {
        self.input_digest == digest(doc)
    }

    pub fn to_json(&self) -> Vec<u8> {
        to_canonical_json(self)
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, ModelError> {
        let mut de = serde_json::Deserializer::from_slice(bytes);
        serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let path = e.path().to_string();
            ModelError::schema(path, e.into_inner().to_string())
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::ClusterKind;

    fn doc() -> ModelDocument {
        let mut d = ModelDocument::new(
            Metadata {
                title: "t".into(),
                ..Default::default()
            },
            Topology {
                clusters: vec![
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
                        &[("a1", "A1"), ("a2", "A2"), ("a3", "A3")],
                    ),
                ],
                dependencies: vec![
                    Dependency {
                        control: "c1".into(),
                        cluster: "alts".into(),
                    },
                    Dependency {
                        control: "c2".into(),
                        cluster: "alts".into(),
                    },
                    Dependency {
                        control: "a1".into(),
                        cluster: "crit".into(),
                    },
                ],
            },
        );
        d.set_judgment(
            &SlotKey::new("c1", "alts"),
            &PairKey::new("a1", "a2"),
            "1/3".parse().unwrap(),
        )
        .unwrap();
        d
    }

    #[test]
    fn empty_and_garbage_are_schema_errors() {
        assert!(matches!(load(b""), Err(ModelError::SchemaError { .. })));
        assert!(matches!(load(b"  \n"), Err(ModelError::SchemaError { .. })));
        assert!(matches!(load(b"{"), Err(ModelError::SchemaError { .. })));
        assert!(
            matches!(load(b"{}"), Err(ModelError::SchemaError { path, .. }) if path == "format_version")
        );
    }

    #[test]
    fn unknown_version_rejected() {
        let mut v: Value = serde_json::from_slice(&save(&doc())).unwrap();
        v["format_version"] = 2.into();
        assert_eq!(
            load(&serde_json::to_vec(&v).unwrap()),
            Err(ModelError::UnsupportedVersion(2))
        );
    }

    #[test]
    fn schema_errors_carry_paths() {
        let mut v: Value = serde_json::from_slice(&save(&doc())).unwrap();
        v["network"]["clusters"][1]["kind"] = "bogus".into();
        match load(&serde_json::to_vec(&v).unwrap()) {
            Err(ModelError::SchemaError { path, .. }) => {
                assert_eq!(path, "network.clusters[1].kind")
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reciprocal_storage_rejected() {
        let mut v: Value = serde_json::from_slice(&save(&doc())).unwrap();
        v["judgments"]["c1:alts"]["a2:a1"] = "3".into();
        match load(&serde_json::to_vec(&v).unwrap()) {
            Err(ModelError::SchemaError { message, .. }) => {
                assert!(message.contains("reciprocal stored"), "{message}")
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn off_scale_and_undeclared_rejected() {
        let mut v: Value = serde_json::from_slice(&save(&doc())).unwrap();
        v["judgments"]["c1:alts"]["a1:a3"] = "10".into();
        assert!(load(&serde_json::to_vec(&v).unwrap()).is_err());
        v["options"]["scale"] = "relaxed".into();
        assert!(load(&serde_json::to_vec(&v).unwrap()).is_ok());

        let mut v: Value = serde_json::from_slice(&save(&doc())).unwrap();
        v["judgments"]["c2:crit"] = serde_json::json!({});
        assert!(load(&serde_json::to_vec(&v).unwrap()).is_err());
    }

    #[test]
    fn fraction_saved_literally() {
        let bytes = save(&doc());
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.contains("\"a1:a2\": \"1/3\""), "{text}");
        assert!(!text.contains("0.333"));
        assert_eq!(bytes, save(&load(&bytes).unwrap()));
    }

    #[test]
    fn reversed_edit_stores_reciprocal() {
        let mut d = doc();
        d.set_judgment(
            &SlotKey::new("c1", "alts"),
            &PairKey::new("a3", "a1"),
            "5".parse().unwrap(),
        )
        .unwrap();
        assert_eq!(
            d.judgments[&SlotKey::new("c1", "alts")][&PairKey::new("a1", "a3")].to_string(),
            "1/5"
        );
        assert!(matches!(
            d.set_judgment(
                &SlotKey::new("c1", "alts"),
                &PairKey::new("a1", "c2"),
                Judgment::EQUAL
            ),
            Err(JudgmentEditError::UnknownPair(..))
        ));
        assert!(matches!(
            d.set_judgment(
                &SlotKey::new("x", "alts"),
                &PairKey::new("a1", "a2"),
                Judgment::EQUAL
            ),
            Err(JudgmentEditError::UnknownSlot(..))
        ));
        assert!(matches!(
            d.set_judgment(
                &SlotKey::new("c1", "alts"),
                &PairKey::new("a1", "a2"),
                "12".parse().unwrap()
            ),
            Err(JudgmentEditError::OffScale(_))
        ));
    }

    #[test]
    fn pending_tracks_partial_slots() {
        let d = doc();
        let pending = d.pending();
        assert_eq!(pending.len(), 3);
        assert_eq!(pending[0].slot, SlotKey::new("c1", "alts"));
        assert_eq!(pending[0].missing.len(), 2);
        assert_eq!(d.slot_state(&SlotKey::new("c1", "alts")).unwrap().filled, 1);
        assert!(d
            .to_network()
            .edge(&SlotKey::new("c1", "alts"))
            .unwrap()
            .matrix
            .is_none());
    }
}
