//! Graphviz renderings of the defect filtration and of rigidity islands.

use std::fmt::Write;

use crate::criterion::PhaseObject;
use crate::filtration::{defect_degree, DefectFiltration};
use crate::rigidity::Island;
use crate::structure::{ElementSet, InteractionStructure};

fn escape(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}

fn quote(text: &str) -> String {
    format!("\"{}\"", escape(text))
}

/// A quoted label whose parts sit on separate lines.
fn quote_lines(parts: &[&str]) -> String {
    let escaped: Vec<String> = parts.iter().map(|p| escape(p)).collect();
    format!("\"{}\"", escaped.join("\\n"))
}

fn set_label(s: &InteractionStructure, set: &ElementSet) -> String {
    let names: Vec<&str> = set.iter().map(|&p| s.name_of(p)).collect();
    format!("{{{}}}", names.join(","))
}

/// One ranked cluster per defect degree, each element a node labelled with
/// its degree; elements the filtration never reaches share a final cluster.
/// Invisible edges stack the clusters in degree order.
pub fn filtration_dot(s: &InteractionStructure, filtration: &DefectFiltration) -> String {
    let degrees = defect_degree(filtration, s.size());
    let mut out = String::new();
    writeln!(out, "digraph filtration {{").unwrap();
    writeln!(out, "  label={};", quote(&format!("{} defect filtration", s.name))).unwrap();
    writeln!(out, "  rankdir=BT;").unwrap();
    writeln!(out, "  node [shape=circle];").unwrap();
    let mut anchors = Vec::new();
    let groups = (0..=filtration.depth()).map(Some).chain([None]);
    for (cluster, k) in groups.enumerate() {
        let members: Vec<_> = s.ids().filter(|&q| degrees.get(q) == k).collect();
        if members.is_empty() {
            continue;
        }
        let (title, mark) = match k {
            Some(k) => (format!("degree {k}"), format!("δ={k}")),
            None => ("unreached".to_string(), "δ=∞".to_string()),
        };
        writeln!(out, "  subgraph cluster_{cluster} {{").unwrap();
        writeln!(out, "    label={};", quote(&title)).unwrap();
        writeln!(out, "    rank=same;").unwrap();
        for &q in &members {
            writeln!(out, "    n{} [label={}];", q.0, quote_lines(&[s.name_of(q), &mark])).unwrap();
        }
        writeln!(out, "  }}").unwrap();
        anchors.push(members[0].0);
    }
    for pair in anchors.windows(2) {
        writeln!(out, "  n{} -> n{} [style=invis];", pair[0], pair[1]).unwrap();
    }
    writeln!(out, "}}").unwrap();
    out
}

/// [`filtration_dot`] of a phase object's carrier.
pub fn phase_dot(phase: &PhaseObject) -> String {
    filtration_dot(phase.structure(), &phase.filtration)
}

/// Hasse diagram of the islands under the whole carrier.
pub fn islands_dot(carrier: &InteractionStructure, islands: &[Island]) -> String {
    let mut sets: Vec<ElementSet> = islands.iter().map(|i| i.elements.clone()).collect();
    sets.push(carrier.all());
    let below = |a: usize, b: usize| a != b && sets[a].is_subset(&sets[b]) && sets[a] != sets[b];
    let mut out = String::new();
    writeln!(out, "digraph islands {{").unwrap();
    writeln!(out, "  label={};", quote(&format!("{} rigidity islands", carrier.name))).unwrap();
    writeln!(out, "  rankdir=BT;").unwrap();
    writeln!(out, "  node [shape=box];").unwrap();
    let top = sets.len() - 1;
    for (i, set) in sets.iter().enumerate() {
        let label = if i == top {
            quote(&carrier.name)
        } else {
            let depth = format!("depth {}", islands[i].internal_depth);
            quote_lines(&[&set_label(carrier, set), &depth])
        };
        writeln!(out, "  s{i} [label={label}];").unwrap();
    }
    for a in 0..sets.len() {
        for b in 0..sets.len() {
            let covers = below(a, b) && !(0..sets.len()).any(|m| below(a, m) && below(m, b));
            if covers {
                writeln!(out, "  s{a} -> s{b};").unwrap();
            }
        }
    }
    writeln!(out, "}}").unwrap();
    out
}
