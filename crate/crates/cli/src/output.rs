//! Terminal formatting.

use std::fmt::Write as _;
use std::io::IsTerminal;

use anp_core::{ConsistencyPolicy, ConsistencyVerdict, ResultDocument};

#[derive(Debug, Clone, Copy)]
pub struct Style {
    color: bool,
}

impl Style {
    /// Color only on a terminal, and never when `ANP_NO_COLOR` is set.
    pub fn detect() -> Self {
        Self {
            color: std::env::var_os("ANP_NO_COLOR").is_none() && std::io::stdout().is_terminal(),
        }
    }

    fn paint(self, code: &str, text: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }

    pub fn good(self, text: &str) -> String {
        self.paint("32", text)
    }

    pub fn warn(self, text: &str) -> String {
        self.paint("33", text)
    }

    pub fn bad(self, text: &str) -> String {
        self.paint("31", text)
    }

    pub fn verdict(self, v: &ConsistencyVerdict) -> String {
        match v {
            ConsistencyVerdict::Pass => self.good("pass"),
            ConsistencyVerdict::Warn { .. } => self.warn("warn"),
            ConsistencyVerdict::Fail { .. } => self.bad("fail"),
        }
    }
}

pub fn verdict_line(
    slot: &str,
    cr: f64,
    verdict: &ConsistencyVerdict,
    policy: ConsistencyPolicy,
    style: Style,
) -> String {
    match verdict {
        ConsistencyVerdict::Pass => format!("{slot}: CR {cr:.4} {}", style.verdict(verdict)),
        ConsistencyVerdict::Warn { threshold } | ConsistencyVerdict::Fail { threshold } => format!(
            "{}: {slot} CR {cr:.4} exceeds {threshold} ({} policy)",
            style.verdict(verdict),
            policy.as_str()
        ),
    }
}

pub fn ranking_summary(result: &ResultDocument, style: Style) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", result.title);
    let width = result
        .ranking
        .alternatives
        .iter()
        .map(|a| a.label.chars().count())
        .max()
        .unwrap_or(0);
    for (i, alt) in result.ranking.alternatives.iter().enumerate() {
        let _ = writeln!(
            out,
            "{:>3}. {:<width$}  {:.4}  ({:.1}%)",
            i + 1,
            alt.label,
            alt.weight,
            alt.normalized * 100.0
        );
    }
    let failing = result.slots.iter().filter(|s| !s.verdict.is_pass()).count();
    let _ = writeln!(
        out,
        "{} matrices, {} over threshold ({} policy)",
        result.slots.len(),
        if failing == 0 {
            style.good("0")
        } else {
            style.warn(&failing.to_string())
        },
        result.options.policy.as_str()
    );
    if let Some(c) = &result.ranking.convergence {
        let _ = writeln!(
            out,
            "limit reached at power {} (residual {:.1e}{})",
            c.power,
            c.residual,
            if c.cesaro_used {
                ", Cesaro average"
            } else {
                ""
            }
        );
    }
    out
}
