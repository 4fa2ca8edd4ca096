//! Terminal questionnaire for missing pairwise judgments.
//!
//! The model file is rewritten after every answer, so quitting (`q`, end of
//! input or Ctrl-C) never loses more than the question being asked.

use std::io::{BufRead, Write};
use std::path::Path;

use anp_core::model::save;
use anp_core::priority::screen_consistency;
use anp_core::{
    principal_eigenvector, ConsistencyPolicy, Judgment, ModelDocument, PairKey, SlotKey,
};

use crate::output::{verdict_line, Style};
use crate::{load_model, write_file, CmdResult, Failure};

const SCALE_REMINDER: &str =
    "Answer on the 1-9 scale: 1 equal, 3 moderate, 5 strong, 7 very strong, 9 extreme \
(2, 4, 6, 8 in between), or 1/2 ... 1/9 when the second is the more important. q saves and quits.";

enum Answer {
    Value(Judgment),
    Quit,
}

fn label(doc: &ModelDocument, id: &str) -> String {
    doc.topology_network()
        .node(id)
        .map_or_else(|| id.to_string(), |n| n.label.clone())
}

fn io_fail(e: std::io::Error) -> Failure {
    Failure::input(format!("terminal: {e}"))
}

fn read_answer(input: &mut impl BufRead) -> Result<Option<String>, Failure> {
    let mut line = String::new();
    if input.read_line(&mut line).map_err(io_fail)? == 0 {
        return Ok(None);
    }
    Ok(Some(line.trim().to_string()))
}

fn ask(
    doc: &ModelDocument,
    slot: &SlotKey,
    pair: &PairKey,
    input: &mut impl BufRead,
    out: &mut impl Write,
) -> Result<Answer, Failure> {
    let question = format!(
        "With respect to {}: how much more important is {} than {}? ",
        label(doc, &slot.control),
        label(doc, &pair.a),
        label(doc, &pair.b)
    );
    loop {
        write!(out, "{question}")
            .and_then(|_| out.flush())
            .map_err(io_fail)?;
        let Some(text) = read_answer(input)? else {
            writeln!(out).map_err(io_fail)?;
            return Ok(Answer::Quit);
        };
        if text.eq_ignore_ascii_case("q") || text.eq_ignore_ascii_case("quit") {
            return Ok(Answer::Quit);
        }
        match text
            .parse::<Judgment>()
            .and_then(|j| j.check(doc.options.scale))
        {
            Ok(j) => return Ok(Answer::Value(j)),
            Err(_) => {
                writeln!(out, "{text:?} is not on the scale. {SCALE_REMINDER}").map_err(io_fail)?
            }
        }
    }
}

fn stop(path: &Path, doc: &ModelDocument, out: &mut impl Write) -> CmdResult {
    writeln!(
        out,
        "Saved {}: {} slots remaining",
        path.display(),
        doc.pending().len()
    )
    .map_err(io_fail)?;
    Ok(0)
}

pub fn rate(
    path: &Path,
    policy: Option<ConsistencyPolicy>,
    input: &mut impl BufRead,
    out: &mut impl Write,
    style: Style,
) -> CmdResult {
    let mut doc = load_model(path)?;
    let opts = doc
        .solve_options(policy, None)
        .map_err(|e| Failure::input(e.to_string()))?;
    let policy = opts.consistency.policy;
    let total = doc.pending().len();
    if total == 0 {
        writeln!(
            out,
            "Nothing to rate: every judgment slot in {} is complete.",
            path.display()
        )
        .map_err(io_fail)?;
        return Ok(0);
    }
    writeln!(out, "{total} matrices to rate. {SCALE_REMINDER}").map_err(io_fail)?;

    let mut done = 0;
    while let Some(pending) = doc.pending().into_iter().next() {
        done += 1;
        let slot = pending.slot.clone();
        let cluster = doc
            .topology_network()
            .cluster(&slot.cluster)
            .map_or_else(|| slot.cluster.clone(), |c| c.label.clone());
        writeln!(
            out,
            "\n[{done}/{total}] {} with respect to {}",
            cluster,
            label(&doc, &slot.control)
        )
        .map_err(io_fail)?;

        for pair in &pending.missing {
            match ask(&doc, &slot, pair, input, out)? {
                Answer::Value(j) => {
                    doc.set_judgment(&slot, pair, j)
                        .map_err(|e| Failure::input(e.to_string()))?;
                    write_file(path, &save(&doc))?;
                }
                Answer::Quit => return stop(path, &doc, out),
            }
        }

        let net = doc.to_network();
        let matrix = net
            .edge(&slot)
            .and_then(|e| e.matrix.as_ref())
            .expect("slot just completed");
        let pv =
            principal_eigenvector(matrix, &opts.rci).map_err(|e| Failure::input(e.to_string()))?;
        let verdict = screen_consistency(&pv, matrix.order(), policy);
        let weights: Vec<String> = pv
            .labels
            .iter()
            .zip(&pv.weights)
            .map(|(l, w)| format!("{} {w:.3}", label(&doc, l)))
            .collect();
        writeln!(out, "Priorities: {}", weights.join(", ")).map_err(io_fail)?;
        writeln!(
            out,
            "{}",
            verdict_line(&slot.to_string(), pv.cr, &verdict, policy, style)
        )
        .map_err(io_fail)?;

        if !verdict.is_pass() {
            write!(out, "Re-rate this matrix? [y/N] ")
                .and_then(|_| out.flush())
                .map_err(io_fail)?;
            let again = read_answer(input)?;
            if matches!(again.as_deref(), Some("y" | "Y" | "yes")) {
                doc.clear_slot(&slot);
                write_file(path, &save(&doc))?;
                done -= 1;
            } else if again.is_none() {
                writeln!(out).map_err(io_fail)?;
                return stop(path, &doc, out);
            }
        }
    }
    writeln!(out, "\nAll judgments entered; saved {}", path.display()).map_err(io_fail)?;
    Ok(0)
}
