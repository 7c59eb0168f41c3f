use std::fmt::Write;

use super::{Certificate, Verdict};
use crate::poly::{MonomialOrder, Polynomial};

fn poly_text(p: &Polynomial) -> String {
    p.to_text(&MonomialOrder::degrevlex())
}

fn set_text(ps: &[Polynomial]) -> String {
    let items: Vec<String> = ps.iter().map(poly_text).collect();
    format!("{{{}}}", items.join(", "))
}

/// Human-readable report.
pub fn text_report(v: &Verdict) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{}: {}", v.question.name(), v.outcome.name());
    match &v.certificate {
        Certificate::None => {}
        Certificate::Witness { tree, value } => {
            let _ = writeln!(s, "  witness tree: {tree}");
            let _ = writeln!(s, "  output: {}", poly_text(value));
        }
        Certificate::TwoOutputs { tree, first, second } => {
            let _ = writeln!(s, "  witness tree: {tree}");
            let _ = writeln!(s, "  outputs: {} and {}", poly_text(first), poly_text(second));
        }
        Certificate::Distinguishing { tree, left, right } => {
            let _ = writeln!(s, "  witness tree: {tree}");
            let _ = writeln!(s, "  first outputs: {}", set_text(left));
            let _ = writeln!(s, "  second outputs: {}", set_text(right));
        }
        Certificate::Family { states, family } => {
            let _ = writeln!(s, "  certificate: inductive ideal family");
            if family.is_zero() {
                let _ = writeln!(s, "    (all ideals zero)");
            }
            for line in family.describe(states) {
                let _ = writeln!(s, "    {line}");
            }
        }
        Certificate::Deterministic => {
            let _ = writeln!(s, "  certificate: automaton is deterministic");
        }
        Certificate::Domain { tree, accepted_by } => {
            let _ = writeln!(s, "  tree {tree} has an output only in automaton {accepted_by}");
        }
    }
    let r = &v.report;
    let _ = write!(
        s,
        "  budget: steps={} tree-size={} degree={} ideal-rounds={} elapsed={}ms",
        r.steps, r.tree_size, r.degree, r.ideal_rounds, r.elapsed_ms
    );
    if r.saturated {
        s.push_str(" saturated");
    }
    if let Some(e) = &r.exhausted {
        let _ = write!(s, " exhausted={e}");
    }
    s.push('\n');
    s
}

/// `key=value` lines, stable across runs except for `elapsed_ms`.
pub fn machine_report(v: &Verdict) -> String {
    let mut lines = vec![
        format!("question={}", v.question.name()),
        format!("verdict={}", v.outcome.name()),
        format!("certificate={}", v.certificate.kind()),
    ];
    if let Some(t) = v.certificate.tree() {
        lines.push(format!("tree={t}"));
    }
    match &v.certificate {
        Certificate::Witness { value, .. } => lines.push(format!("output={}", poly_text(value))),
        Certificate::TwoOutputs { first, second, .. } => {
            lines.push(format!("output={}", poly_text(first)));
            lines.push(format!("output={}", poly_text(second)));
        }
        Certificate::Distinguishing { left, right, .. } => {
            lines.push(format!("first={}", set_text(left)));
            lines.push(format!("second={}", set_text(right)));
        }
        Certificate::Family { states, family } => {
            for line in family.describe(states) {
                lines.push(format!("ideal={line}"));
            }
        }
        Certificate::Domain { accepted_by, .. } => lines.push(format!("accepted_by={accepted_by}")),
        _ => {}
    }
    let r = &v.report;
    lines.push(format!("steps={}", r.steps));
    lines.push(format!("tree_size={}", r.tree_size));
    lines.push(format!("degree={}", r.degree));
    lines.push(format!("ideal_rounds={}", r.ideal_rounds));
    lines.push(format!("saturated={}", r.saturated));
    if let Some(e) = &r.exhausted {
        lines.push(format!("exhausted={e}"));
    }
    lines.push(format!("elapsed_ms={}", r.elapsed_ms));
    lines.join("\n") + "\n"
}
