//! Graphviz rendering of a diagram.
//!
//! Observables are nodes, each context is a small point node joined to its
//! members. With an assignment, value 1 is a box, value 0 a filled circle
//! and an undefined observable a hollow circle.

use std::fmt::Write;

use crate::diagram::Diagram;
use crate::engine::{Assignment, DeductionStep};

pub fn export_dot(d: &Diagram, assignment: Option<&Assignment>) -> String {
    export_dot_with_header(d, assignment, None)
}

/// `header` is emitted as a leading comment line.
pub fn export_dot_with_header(d: &Diagram, assignment: Option<&Assignment>, header: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(h) = header {
        writeln!(out, "// {h}").unwrap();
    }
    out.push_str("graph greechie {\n  node [fontsize=10];\n");
    for o in d.observables() {
        let style = match assignment.and_then(|a| a.get(o.id)) {
            Some(1) => "shape=box, style=filled, fillcolor=black, fontcolor=white",
            Some(_) => "shape=circle, style=filled, fillcolor=gray40, fontcolor=white",
            None => "shape=circle",
        };
        writeln!(out, "  o{} [label=\"{}\", {style}];", o.id, escape(&d.display_name(o.id))).unwrap();
    }
    for (cid, c) in d.contexts().iter().enumerate() {
        writeln!(out, "  c{cid} [shape=point, label=\"\", xlabel=\"C{}\"];", cid + 1).unwrap();
        for m in &c.members {
            writeln!(out, "  c{cid} -- o{m};").unwrap();
        }
    }
    out.push_str("}\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Values established by a trace, leaving out any step that opposes an
/// earlier one.
pub fn assignment_from_trace(trace: &[DeductionStep]) -> Assignment {
    let mut a = Assignment::new();
    for s in trace {
        let (id, v) = s.conclusion;
        if a.get(id).is_none() {
            a.set(id, v);
        }
    }
    a
}
