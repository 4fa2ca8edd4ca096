//! Seeded generators and independent numeric oracles shared by the
//! integration suites.
#![allow(dead_code)]

use anp_core::model::{Dependency, Metadata, ModelDocument, Topology};
use anp_core::network::{Cluster, ClusterKind, PairKey, SlotKey};
use anp_core::{ComparisonMatrix, Judgment, ScaleMode};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_judgment(rng: &mut ChaCha8Rng) -> Judgment {
    let scale: Vec<Judgment> = Judgment::scale().collect();
    scale[rng.random_range(0..scale.len())]
}

pub fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// Random reciprocal matrix with every entry on the 1–9 scale.
pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> ComparisonMatrix {
    let upper = (0..n * (n - 1) / 2).map(|_| random_judgment(rng)).collect();
    ComparisonMatrix::from_upper(labels("e", n), upper, ScaleMode::Saaty).unwrap()
}

/// Integer weights and the perfectly consistent matrix a_ij = w_i / w_j.
pub fn consistent_matrix(rng: &mut ChaCha8Rng, n: usize) -> (Vec<u64>, ComparisonMatrix) {
    let w: Vec<u64> = (0..n).map(|_| rng.random_range(1..=20)).collect();
    let mut upper = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            upper.push(Judgment::new(w[i], w[j]).unwrap());
        }
    }
    (
        w.clone(),
        ComparisonMatrix::from_upper(labels("e", n), upper, ScaleMode::Relaxed).unwrap(),
    )
}

pub fn normalized(w: &[f64]) -> Vec<f64> {
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

/// Perron root from a dense general eigensolver, eigenvector from the null
/// space of (A - lambda I).
pub fn dense_eigen(a: &DMatrix<f64>) -> (Vec<f64>, f64) {
    let n = a.nrows();
    let lambda = a
        .complex_eigenvalues()
        .iter()
        .max_by(|x, y| x.re.total_cmp(&y.re))
        .unwrap()
        .re;
    let shifted = a - DMatrix::identity(n, n) * lambda;
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.unwrap();
    let (k, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .unwrap();
    let v: Vec<f64> = v_t.row(k).iter().map(|x| x.abs()).collect();
    (normalized(&v), lambda)
}

pub fn geometric_mean(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let g: Vec<f64> = (0..n)
        .map(|i| a.row(i).iter().product::<f64>().powf(1.0 / n as f64))
        .collect();
    normalized(&g)
}

/// Raises `w` to successive powers one multiplication at a time until two
/// consecutive powers agree.
pub fn naive_limit(w: &DMatrix<f64>, tol: f64, cap: usize) -> DMatrix<f64> {
    let mut p = w.clone();
    for _ in 0..cap {
        let next = w * &p;
        if (&next - &p).amax() < tol {
            return next;
        }
        p = next;
    }
    panic!("naive power did not settle within {cap} steps");
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn column(m: &DMatrix<f64>, j: usize) -> DVector<f64> {
    m.column(j).into_owned()
}

fn fill(doc: &mut ModelDocument, rng: &mut ChaCha8Rng) {
    for pending in doc.pending() {
        for pair in pending.missing {
            doc.set_judgment(&pending.slot, &pair, random_judgment(rng))
                .unwrap();
        }
    }
}

fn nodes(ids: &[String]) -> Vec<(&str, &str)> {
    ids.iter().map(|s| (s.as_str(), s.as_str())).collect()
}

/// Goal, criteria and alternatives with a criteria self-loop and
/// alternatives-to-criteria feedback, fully rated.
pub fn random_network_model(rng: &mut ChaCha8Rng) -> ModelDocument {
    let crit = labels("c", rng.random_range(2..=5));
    let alts = labels("a", rng.random_range(2..=5));
    let mut deps = vec![Dependency {
        control: "g".into(),
        cluster: "crit".into(),
    }];
    for c in &crit {
        deps.push(Dependency {
            control: c.clone(),
            cluster: "crit".into(),
        });
        deps.push(Dependency {
            control: c.clone(),
            cluster: "alts".into(),
        });
    }
    for a in &alts {
        deps.push(Dependency {
            control: a.clone(),
            cluster: "crit".into(),
        });
    }
    let mut doc = ModelDocument::new(
        Metadata {
            title: "random network".into(),
            ..Default::default()
        },
        Topology {
            clusters: vec![
                Cluster::new("goal", "Goal", ClusterKind::Goal, &[("g", "Goal")]),
                Cluster::new("crit", "Criteria", ClusterKind::Criteria, &nodes(&crit)),
                Cluster::new(
                    "alts",
                    "Alternatives",
                    ClusterKind::Alternatives,
                    &nodes(&alts),
                ),
            ],
            dependencies: deps,
        },
    );
    fill(&mut doc, rng);
    if rng.random_bool(0.5) {
        doc.cluster_judgments.insert(
            "crit".into(),
            [(PairKey::new("crit", "alts"), random_judgment(rng))]
                .into_iter()
                .collect(),
        );
    }
    doc
}

/// Goal, `k` criteria, `m` alternatives, no feedback.
pub fn random_hierarchy_model(rng: &mut ChaCha8Rng, k: usize, m: usize) -> ModelDocument {
    let crit = labels("c", k);
    let alts = labels("a", m);
    let mut deps = vec![Dependency {
        control: "g".into(),
        cluster: "crit".into(),
    }];
    deps.extend(crit.iter().map(|c| Dependency {
        control: c.clone(),
        cluster: "alts".into(),
    }));
    let mut doc = ModelDocument::new(
        Metadata {
            title: "random hierarchy".into(),
            ..Default::default()
        },
        Topology {
            clusters: vec![
                Cluster::new("goal", "Goal", ClusterKind::Goal, &[("g", "Goal")]),
                Cluster::new("crit", "Criteria", ClusterKind::Criteria, &nodes(&crit)),
                Cluster::new(
                    "alts",
                    "Alternatives",
                    ClusterKind::Alternatives,
                    &nodes(&alts),
                ),
            ],
            dependencies: deps,
        },
    );
    fill(&mut doc, rng);
    doc
}

pub fn slot(control: &str, cluster: &str) -> SlotKey {
    SlotKey::new(control, cluster)
}
