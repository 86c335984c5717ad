//! Graphviz export of Hasse diagrams, drawn bottom to top.

use std::fmt::Write;

use crate::abstract_lattice::AbstractLattice;
use crate::lattice::FiniteLattice;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn render(name: &str, labels: &[String], edges: &[(usize, usize)]) -> String {
    let mut out = String::new();
    writeln!(out, "digraph \"{}\" {{", escape(name)).unwrap();
    writeln!(out, "  rankdir=BT;").unwrap();
    writeln!(out, "  node [shape=plaintext];").unwrap();
    writeln!(out, "  edge [arrowhead=none];").unwrap();
    for (i, l) in labels.iter().enumerate() {
        writeln!(out, "  n{i} [label=\"{}\"];", escape(l)).unwrap();
    }
    for (a, b) in edges {
        writeln!(out, "  n{a} -> n{b};").unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn finite_lattice_dot(name: &str, l: &FiniteLattice) -> String {
    let labels: Vec<String> = l.names().to_vec();
    let edges: Vec<(usize, usize)> = l
        .covers()
        .iter()
        .map(|&(a, b)| (a.index(), b.index()))
        .collect();
    render(name, &labels, &edges)
}

pub fn abstract_lattice_dot(l: &AbstractLattice) -> String {
    let labels: Vec<String> = l.elements().iter().map(|x| l.schema().format_tuple(x)).collect();
    render("abstract", &labels, &l.covers())
}
