mod support;

use anp_core::fixtures::{kwic, KWIC_JSON};
use anp_core::model::{
    digest, load, save, Dependency, Metadata, ModelDocument, ModelError, Topology,
};
use anp_core::network::{Cluster, ClusterKind};
use anp_core::{export_report, solve, ReportFormat, ResultDocument};

fn kwic_result() -> ResultDocument {
    let doc = kwic();
    let opts = doc.solve_options(None, None).unwrap();
    let solution = solve(&doc.to_network(), &opts).unwrap();
    ResultDocument::new(&doc, &solution, &opts)
}

#[test]
fn fixture_round_trips_byte_for_byte() {
    let doc = load(KWIC_JSON.as_bytes()).unwrap();
    assert_eq!(save(&doc), KWIC_JSON.as_bytes());
    assert_eq!(save(&doc), save(&doc.clone()));
    assert_eq!(load(&save(&doc)).unwrap(), doc);
}

#[test]
fn syntax_errors_report_position() {
    let broken = &KWIC_JSON[..KWIC_JSON.len() / 2];
    match load(broken.as_bytes()) {
        Err(ModelError::SchemaError { path, .. }) => assert!(path.starts_with("line "), "{path}"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn result_is_tied_to_its_input() {
    let result = kwic_result();
    let doc = kwic();
    assert!(result.matches(&doc));
    assert_eq!(result.input_digest, digest(&doc));
    assert!(result.input_digest.starts_with("sha256:"));

    let mut edited = doc.clone();
    edited.metadata.title.push('!');
    assert!(!result.matches(&edited));
}

#[test]
fn json_export_is_lossless() {
    let result = kwic_result();
    let bytes = export_report(&result, ReportFormat::Json).unwrap();
    assert_eq!(ResultDocument::from_json(&bytes).unwrap(), result);
    assert_eq!(bytes, export_report(&result, ReportFormat::Json).unwrap());
}

#[test]
fn markdown_export_has_ranking_table() {
    let md =
        String::from_utf8(export_report(&kwic_result(), ReportFormat::Markdown).unwrap()).unwrap();
    assert!(md.contains("| Rank | Alternative | Limit weight | Normalized |"));
    let row = md
        .lines()
        .find(|l| l.starts_with("| 1 | Pipes & Filters |"))
        .expect("ranking row");
    assert!(row.contains("0.067"), "{row}");
    assert!(md.contains("| P:alternatives | 4 |"));
}

#[test]
fn csv_export_sections() {
    let csv = String::from_utf8(export_report(&kwic_result(), ReportFormat::Csv).unwrap()).unwrap();
    assert!(!csv.contains('\r'));
    let headers: Vec<&str> = csv.lines().filter(|l| l.starts_with("section,")).collect();
    assert_eq!(headers.len(), 13 + 1 + 3 + 1);
    assert!(headers.contains(&"section,supermatrix,limit"));
    assert!(csv.contains("1,PF,Pipes & Filters,"));
    for block in csv.split("\n\n") {
        assert!(block.starts_with("section,"), "{block}");
    }
}

#[test]
fn single_alternative_report_has_one_row() {
    let doc = ModelDocument::new(
        Metadata {
            title: "one".into(),
            ..Default::default()
        },
        Topology {
            clusters: vec![
                Cluster::new("goal", "Goal", ClusterKind::Goal, &[("g", "Goal")]),
                Cluster::new(
                    "alts",
                    "Alternatives",
                    ClusterKind::Alternatives,
                    &[("only", "Only option")],
                ),
            ],
            dependencies: vec![Dependency {
                control: "g".into(),
                cluster: "alts".into(),
            }],
        },
    );
    let opts = doc.solve_options(None, None).unwrap();
    let solution = solve(&doc.to_network(), &opts).unwrap();
    assert_eq!(solution.ranking.alternatives[0].normalized, 1.0);
    let md = String::from_utf8(
        export_report(
            &ResultDocument::new(&doc, &solution, &opts),
            ReportFormat::Markdown,
        )
        .unwrap(),
    )
    .unwrap();
    let rows: Vec<_> = md
        .lines()
        .filter(|l| l.starts_with("| 1 |") || l.starts_with("| 2 |"))
        .collect();
    assert_eq!(rows, ["| 1 | Only option | 1.0000 | 1.0000 |"]);
}
