//! Rendering a [`ResultDocument`] as JSON, CSV or Markdown.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{MatrixTable, ResultDocument};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(ReportError::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("unknown report format {0:?} (expected json, csv or markdown)")]
    UnknownFormat(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub fn export_report(
    result: &ResultDocument,
    format: ReportFormat,
) -> Result<Vec<u8>, ReportError> {
    match format {
        ReportFormat::Json => Ok(result.to_json()),
        ReportFormat::Csv => csv_report(result),
        ReportFormat::Markdown => Ok(markdown_report(result).into_bytes()),
    }
}

/// Sections separated by a blank line; the first row of each section names
/// it.
fn csv_report(result: &ResultDocument) -> Result<Vec<u8>, ReportError> {
    let mut sections: Vec<Vec<u8>> = Vec::new();
    let writer = || {
        csv::WriterBuilder::new()
            .flexible(true)
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new())
    };

    for slot in &result.slots {
        let mut w = writer();
        w.write_record(["section", "judgment", &slot.slot.to_string()])?;
        w.write_record(
            std::iter::once("")
                .chain(slot.elements.iter().map(String::as_str))
                .chain(["weight"]),
        )?;
        for (i, row) in slot.matrix.iter().enumerate() {
            let mut rec = vec![slot.elements[i].clone()];
            rec.extend(row.iter().map(ToString::to_string));
            rec.push(slot.weights[i].to_string());
            w.write_record(&rec)?;
        }
        w.write_record(["lambda_max", &slot.lambda_max.to_string()])?;
        w.write_record(["ci", &slot.ci.to_string()])?;
        w.write_record(["cr", &slot.cr.to_string()])?;
        w.write_record(["verdict", slot.verdict.label()])?;
        sections.push(
            w.into_inner()
                .map_err(|e| csv::Error::from(e.into_error()))?,
        );
    }

    let mut w = writer();
    w.write_record(["section", "cluster"])?;
    w.write_record(["source", "target", "weight"])?;
    for cw in &result.cluster_weights {
        for (t, wt) in cw.targets.iter().zip(&cw.weights) {
            w.write_record([cw.source.as_str(), t, &wt.to_string()])?;
        }
    }
    sections.push(
        w.into_inner()
            .map_err(|e| csv::Error::from(e.into_error()))?,
    );

    for (name, table) in [
        ("unweighted", &result.unweighted),
        ("weighted", &result.weighted),
        ("limit", &result.limit),
    ] {
        let mut w = writer();
        w.write_record(["section", "supermatrix", name])?;
        w.write_record(std::iter::once("").chain(table.nodes.iter().map(String::as_str)))?;
        for (node, row) in table.nodes.iter().zip(&table.rows) {
            let mut rec = vec![node.clone()];
            rec.extend(row.iter().map(ToString::to_string));
            w.write_record(&rec)?;
        }
        sections.push(
            w.into_inner()
                .map_err(|e| csv::Error::from(e.into_error()))?,
        );
    }

    let mut w = writer();
    w.write_record(["section", "ranking"])?;
    w.write_record(["rank", "node", "label", "limit_weight", "normalized"])?;
    for (i, alt) in result.ranking.alternatives.iter().enumerate() {
        w.write_record([
            (i + 1).to_string(),
            alt.node.clone(),
            alt.label.clone(),
            alt.weight.to_string(),
            alt.normalized.to_string(),
        ])?;
    }
    sections.push(
        w.into_inner()
            .map_err(|e| csv::Error::from(e.into_error()))?,
    );

    Ok(sections.join(&b"\n"[..]))
}

fn markdown_table(out: &mut String, table: &MatrixTable) {
    let _ = writeln!(out, "| | {} |", table.nodes.join(" | "));
    let _ = writeln!(out, "|---|{}", "---:|".repeat(table.nodes.len()));
    for (node, row) in table.nodes.iter().zip(&table.rows) {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.4}")).collect();
        let _ = writeln!(out, "| **{node}** | {} |", cells.join(" | "));
    }
}

fn markdown_report(result: &ResultDocument) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {}\n", result.title);
    let _ = writeln!(
        out,
        "Input `{}`, {}.\n",
        result.input_digest, result.engine_version
    );

    out.push_str("## Ranking\n\n");
    out.push_str("| Rank | Alternative | Limit weight | Normalized |\n");
    out.push_str("|---:|---|---:|---:|\n");
    for (i, alt) in result.ranking.alternatives.iter().enumerate() {
        let _ = writeln!(
            out,
            "| {} | {} | {:.4} | {:.4} |",
            i + 1,
            alt.label,
            alt.weight,
            alt.normalized
        );
    }

    let _ = writeln!(
        out,
        "\n## Consistency ({} policy)\n",
        result.options.policy.as_str()
    );
    out.push_str("| Slot | n | lambda_max | CI | CR | Verdict |\n");
    out.push_str("|---|---:|---:|---:|---:|---|\n");
    for s in &result.slots {
        let _ = writeln!(
            out,
            "| {} | {} | {:.4} | {:.4} | {:.4} | {} |",
            s.slot,
            s.elements.len(),
            s.lambda_max,
            s.ci,
            s.cr,
            s.verdict.label()
        );
    }

    out.push_str("\n## Priority vectors\n\n");
    for s in &result.slots {
        let _ = writeln!(out, "### {} ({})\n", s.slot, s.control_label);
        let _ = writeln!(out, "| | {} | Weight |", s.elements.join(" | "));
        let _ = writeln!(out, "|---|{}---:|", "---:|".repeat(s.elements.len()));
        for (i, row) in s.matrix.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            let _ = writeln!(
                out,
                "| **{}** | {} | {:.4} |",
                s.elements[i],
                cells.join(" | "),
                s.weights[i]
            );
        }
        out.push('\n');
    }

    for (name, table) in [
        ("Unweighted supermatrix", &result.unweighted),
        ("Weighted supermatrix", &result.weighted),
        ("Limit supermatrix", &result.limit),
    ] {
        let _ = writeln!(out, "## {name}\n");
        markdown_table(&mut out, table);
        out.push('\n');
    }
    out
}
