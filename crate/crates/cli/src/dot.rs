use std::fmt::Write;

use locsim::freeness::PingPongWitness;
use locsim::poset::refines;
use locsim::ultrametric::{Ball, ClopenSet, Partition, Space};

fn node_id(b: &Ball) -> String {
    format!("b_{b}")
}

fn depth_label(b: &Ball) -> String {
    if b.is_root() {
        "X\\ndepth 0".to_string()
    } else {
        format!("\\\"{b}\\\"\\ndepth {}", b.depth())
    }
}

fn hierarchy_balls(space: &Space, depth: usize) -> Vec<Ball> {
    match space.hierarchy() {
        Some(h) => h.nodes().cloned().collect(),
        None => space.balls_up_to_depth(depth),
    }
}

/// Ball hierarchy with depth labels; word spaces are cut at `depth`.
pub fn hierarchy_dot(space: &Space, depth: usize) -> String {
    let mut out = String::from("digraph hierarchy {\n  node [shape=ellipse];\n");
    let balls = hierarchy_balls(space, depth);
    for b in &balls {
        writeln!(out, "  {} [label=\"{}\"];", node_id(b), depth_label(b)).unwrap();
    }
    for b in &balls {
        if let Some(p) = b.parent() {
            writeln!(out, "  {} -> {};", node_id(&p), node_id(b)).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

/// Same hierarchy as an indented list.
pub fn hierarchy_text(space: &Space, depth: usize) -> String {
    let mut balls = hierarchy_balls(space, depth);
    balls.sort();
    let mut out = String::new();
    for b in balls {
        writeln!(out, "{}{} depth {}", "  ".repeat(b.depth()), b.quoted(), b.depth()).unwrap();
    }
    out
}

fn role(w: &PingPongWitness, b: &Ball) -> &'static str {
    let set = ClopenSet::ball(b.clone());
    if set == w.x1 {
        " (X1)"
    } else if set == w.x2 {
        " (X2)"
    } else {
        ""
    }
}

/// The two contracted copies `A₁, A₂` with the four balls `Bᵢ` inside them
/// and the `δ` arrows cycling `B₂ → B₃ → B₄ → B₂`.
pub fn pingpong_dot(w: &PingPongWitness) -> String {
    let mut out = String::from("digraph pingpong {\n  compound=true;\n  node [shape=box];\n");
    for (i, a) in w.a.iter().enumerate() {
        writeln!(out, "  subgraph cluster_A{} {{", i + 1).unwrap();
        writeln!(out, "    label=\"A{} = \\\"{a}\\\"{}\";", i + 1, role(w, a)).unwrap();
        for (j, b) in w.b.iter().enumerate().filter(|(_, b)| b.is_within(a)) {
            writeln!(out, "    B{} [label=\"B{} = \\\"{b}\\\"{}\"];", j + 1, j + 1, role(w, b)).unwrap();
        }
        out.push_str("  }\n");
    }
    for (k, d) in w.deltas.iter().enumerate() {
        let from = w.b.iter().position(|b| b == d.dom()).expect("delta domain is a B ball") + 1;
        let to = w.b.iter().position(|b| b == d.cod()).expect("delta codomain is a B ball") + 1;
        writeln!(out, "  B{from} -> B{to} [label=\"delta{} : {}\"];", k + 2, d.map().to_text()).unwrap();
    }
    out.push_str("}\n");
    out
}

/// `q` covers `p` when it splits exactly one block of `p`, a ball, into
/// that ball's children.
fn covers(space: &Space, p: &Partition, q: &Partition) -> bool {
    if !refines(space, p, q) {
        return false;
    }
    let gone: Vec<&ClopenSet> = p.blocks().iter().filter(|b| !q.blocks().contains(b)).collect();
    let new: Vec<&ClopenSet> = q.blocks().iter().filter(|b| !p.blocks().contains(b)).collect();
    let [split] = gone.as_slice() else { return false };
    let Some(ball) = split.as_ball() else { return false };
    let Ok(children) = space.maximal_proper_subballs(ball) else { return false };
    new.len() == children.len() && children.iter().all(|c| new.iter().any(|n| n.as_ball() == Some(c)))
}

/// Hasse diagram of the refinement order, edges pointing to finer partitions.
pub fn hasse_dot(space: &Space, partitions: &[Partition]) -> String {
    let mut out = String::from("digraph hasse {\n  node [shape=box];\n");
    for (i, p) in partitions.iter().enumerate() {
        writeln!(out, "  p{i} [label=\"{}\"];", p.to_string().replace('"', "\\\"")).unwrap();
    }
    for (i, p) in partitions.iter().enumerate() {
        for (j, q) in partitions.iter().enumerate() {
            if covers(space, p, q) {
                writeln!(out, "  p{i} -> p{j};").unwrap();
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use locsim::poset::enumerate_partitions;

    #[test]
    fn hierarchy_has_depth_labels() {
        let s = Space::word(2).unwrap();
        let dot = hierarchy_dot(&s, 1);
        assert!(dot.contains("b_ [label=\"X\\ndepth 0\"];"));
        assert!(dot.contains("b_1 [label=\"\\\"1\\\"\\ndepth 1\"];"));
        assert!(dot.contains("b_ -> b_0;"));
        assert_eq!(hierarchy_text(&s, 1), "\"\" depth 0\n  \"0\" depth 1\n  \"1\" depth 1\n");
    }

    #[test]
    fn hasse_edges_are_single_splits() {
        let s = Space::word(2).unwrap();
        let parts = enumerate_partitions(&s, 2, 100).unwrap();
        assert_eq!(parts.len(), 5);
        let dot = hasse_dot(&s, &parts);
        // whole → {0,1}; {0,1} → two one-sided splits; each of those → the depth-2 partition.
        assert_eq!(dot.matches(" -> ").count(), 5);
    }

    #[test]
    fn finite_hierarchy_lists_every_node() {
        let s = Space::finite("((..).)").unwrap();
        assert_eq!(hierarchy_text(&s, 0).lines().count(), 5);
    }
}
