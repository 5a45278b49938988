use std::fmt::Write;

use cantorspeed::{KRPartition, OrderedBratteliDiagram};

/// Levels `0..=levels` of the diagram; edge labels are positions in the order.
pub fn diagram(d: &OrderedBratteliDiagram, levels: usize) -> String {
    let mut s = String::from("digraph bratteli {\n  rankdir=TB;\n  node [shape=circle];\n");
    for n in 0..=levels {
        let names: Vec<String> = (0..d.vertex_count(n)).map(|v| format!("v{n}_{v}")).collect();
        writeln!(s, "  {{ rank=same; {} }}", names.join("; ")).unwrap();
        for (v, name) in names.iter().enumerate() {
            writeln!(s, "  {name} [label=\"{v}\"];").unwrap();
        }
    }
    for n in 0..levels {
        for w in 0..d.vertex_count(n + 1) {
            for (pos, &src) in d.in_edges(n, w).iter().enumerate() {
                writeln!(s, "  v{n}_{src} -> v{}_{w} [label=\"{pos}\"];", n + 1).unwrap();
            }
        }
    }
    s.push_str("}\n");
    s
}

/// One cluster per column, levels stacked from base to top.
pub fn towers(p: &KRPartition) -> String {
    let mut s = String::from("digraph towers {\n  rankdir=BT;\n  node [shape=box];\n");
    for (i, c) in p.columns.iter().enumerate() {
        writeln!(s, "  subgraph cluster_{i} {{\n    label=\"column {i}\";").unwrap();
        for (j, l) in c.levels.iter().enumerate() {
            let atoms: Vec<String> = l.iter().map(|a| a.to_string()).collect();
            writeln!(s, "    c{i}_{j} [label=\"{}\"];", atoms.join(" ")).unwrap();
        }
        for j in 1..c.levels.len() {
            writeln!(s, "    c{i}_{} -> c{i}_{j};", j - 1).unwrap();
        }
        s.push_str("  }\n");
    }
    s.push_str("}\n");
    s
}
