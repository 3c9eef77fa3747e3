//! Report documents and their text rendering.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::analysis::{profile_label, BilinearityVerdict, DecompositionReport, Method};
use crate::game::Game;
use crate::utility::UtilitySpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditMode {
    /// `u_d` supplied; `s` induced.
    VerifyTheorem,
    /// `s` supplied; `u_d` constructed.
    Counterbalance,
}

/// Everything `audit` prints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub mode: AuditMode,
    pub u_d_spec: UtilitySpec,
    pub report: DecompositionReport,
}

fn describe_verdict(game: &Game, v: &BilinearityVerdict) -> String {
    let status = if v.passed { "passed" } else { "FAILED" };
    match v.method {
        Method::Structural => format!("{status} (structural: every leaf is a table)"),
        Method::Sampled => {
            let mut out = format!(
                "{status} (sampled: max deviation {:e} over {} probes, tolerance {:e}",
                v.max_deviation, v.probes_used, v.config.tolerance
            );
            if let Some(w) = &v.witness {
                if v.max_deviation > 0.0 {
                    let _ = write!(out, ", witness {}", profile_label(game, w));
                }
            }
            out.push(')');
            out
        }
    }
}

/// Renders the report as a table of `s = u_g - u_d` rows followed by both
/// verdicts.
pub fn render_audit(game: &Game, audit: &AuditReport) -> String {
    let r = &audit.report;
    let mut out = String::new();
    let mode = match audit.mode {
        AuditMode::VerifyTheorem => "verify theorem (u_d given, s induced)",
        AuditMode::Counterbalance => "counterbalance (s given, u_d = u_g - s)",
    };
    let _ = writeln!(out, "mode: {mode}");
    let width = r
        .probes
        .iter()
        .map(|row| display_width(&row.label))
        .max()
        .unwrap_or(0)
        .max(7);
    let _ = writeln!(
        out,
        "{}  {:>12}     {:>12}     {:>12}",
        pad("profile", width),
        "s",
        "u_g",
        "u_d"
    );
    for row in &r.probes {
        let _ = writeln!(
            out,
            "{}  {:>12}  =  {:>12}  -  {:>12}",
            pad(&row.label, width),
            fmt_util(row.s),
            fmt_util(row.u_g),
            fmt_util(row.u_d),
        );
    }
    let _ = writeln!(
        out,
        "u_d expected utility: {}",
        describe_verdict(game, &r.u_d_verdict)
    );
    let _ = writeln!(
        out,
        "s bilinear:           {}",
        describe_verdict(game, &r.s_verdict)
    );
    let _ = write!(
        out,
        "theorem consistent:   {}",
        if r.theorem_consistent { "yes" } else { "NO" }
    );
    if let Some(note) = &r.note {
        let _ = write!(out, "\nnote: {note}");
    }
    out
}

/// Column width of `s`, not counting combining marks such as the hat in `τ̂`.
pub fn display_width(s: &str) -> usize {
    s.chars()
        .filter(|c| !('\u{300}'..='\u{36f}').contains(c))
        .count()
}

/// Left-aligns `s` in `width` columns.
pub fn pad(s: &str, width: usize) -> String {
    let fill = width.saturating_sub(display_width(s));
    format!("{s}{}", " ".repeat(fill))
}

fn fmt_util(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{x:.0}")
    } else {
        format!("{x:.6}")
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Structural => "structural",
            Method::Sampled => "sampled",
        })
    }
}
