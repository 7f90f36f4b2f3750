//! Artifact emission: Graphviz DOT, constraint tables and assertion text.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use thiserror::Error;

use crate::analysis::{unroll, AnalysisError, StateGraph};
use crate::config::TimingValue;
use crate::dram::DramNet;
use crate::petri::{ArcId, ArcKind, Marking, NodeRef, PetriNet, TransitionId};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn node_id(node: NodeRef) -> String {
    match node {
        NodeRef::Place(p) => format!("p{}", p.0),
        NodeRef::Transition(t) => format!("t{}", t.0),
    }
}

/// DOT for a net under `marking`. Timing arcs are labelled by
/// `timing_label`, falling back to the bare delay.
pub fn export_dot_with(
    net: &PetriNet,
    marking: &Marking,
    timing_label: impl Fn(ArcId) -> Option<String>,
) -> String {
    let mut out = String::from("digraph petri {\n  rankdir=LR;\n");
    for p in net.place_ids() {
        let label = format!("{}\n{}", net.place(p), marking[p]);
        let _ = writeln!(
            out,
            "  {} [shape=circle, label={}];",
            node_id(p.into()),
            quote(&label)
        );
    }
    for t in net.transition_ids() {
        let _ = writeln!(
            out,
            "  {} [shape=box, label={}];",
            node_id(t.into()),
            quote(&net.transition(t).to_string())
        );
    }
    for (i, arc) in net.arcs().iter().enumerate() {
        let attrs = match arc.kind {
            ArcKind::Normal { weight: 1 } => String::new(),
            ArcKind::Normal { weight } => format!(" [label={}]", quote(&weight.to_string())),
            ArcKind::Inhibitor { weight: 1 } => " [arrowhead=dot]".into(),
            ArcKind::Inhibitor { weight } => {
                format!(" [arrowhead=dot, label={}]", quote(&weight.to_string()))
            }
            ArcKind::Reset => " [arrowhead=normalnormal]".into(),
            ArcKind::TimedInhibitor {
                from,
                to,
                threshold,
            } => format!(
                " [arrowhead=odot, label={}]",
                quote(&format!("[{from},{to}] >= {threshold}"))
            ),
            ArcKind::Timing { delay } => {
                let label = timing_label(ArcId(i as u32)).unwrap_or_else(|| delay.to_string());
                format!(" [style=dashed, label={}]", quote(&label))
            }
        };
        let _ = writeln!(
            out,
            "  {} -> {}{};",
            node_id(arc.from),
            node_id(arc.to),
            attrs
        );
    }
    out.push_str("}\n");
    out
}

pub fn export_dot(net: &PetriNet, marking: &Marking) -> String {
    export_dot_with(net, marking, |_| None)
}

/// DOT for a DRAM net at idle, timing arcs labelled `tRCD=11`.
pub fn export_dram_dot(dnet: &DramNet) -> String {
    export_dot_with(dnet.net(), &dnet.idle_marking(), |arc| {
        dnet.timing_arc(arc)
            .map(|info| format!("{}={}", info.name(), info.delay))
    })
}

fn marking_label(net: &PetriNet, marking: &Marking) -> String {
    let marked: Vec<String> = net
        .place_ids()
        .filter(|&p| marking[p] > 0)
        .map(|p| match marking[p] {
            1 => net.place(p).to_string(),
            n => format!("{}x{}", n, net.place(p)),
        })
        .collect();
    if marked.is_empty() {
        "idle".into()
    } else {
        marked.join("\n")
    }
}

/// DOT for a reachability graph. State 0 is the initial marking.
pub fn export_dot_stategraph(sg: &StateGraph) -> String {
    let net = sg.net();
    let mut out = String::from("digraph states {\n");
    for (i, m) in sg.states().iter().enumerate() {
        let shape = if i == 0 { "doublecircle" } else { "ellipse" };
        let _ = writeln!(
            out,
            "  s{i} [shape={shape}, label={}];",
            quote(&marking_label(net, m))
        );
    }
    for e in sg.edges() {
        let _ = writeln!(
            out,
            "  s{} -> s{} [label={}];",
            e.from,
            e.to,
            quote(&net.transition(e.transition).to_string())
        );
    }
    out.push_str("}\n");
    out
}

pub const CONSTRAINT_TABLE_HEADER: &str =
    "from_command,from_coord,to_command,to_coord,timing,value";

/// One CSV row per timing arc, sorted by source, target, then timing name.
pub fn emit_constraint_table(dnet: &DramNet) -> String {
    let mut rows: Vec<_> = dnet
        .timing_arcs()
        .iter()
        .map(|info| {
            (
                dnet.label(info.from),
                dnet.label(info.to),
                info.name(),
                info.delay,
            )
        })
        .collect();
    rows.sort();
    let mut out = String::from(CONSTRAINT_TABLE_HEADER);
    out.push('\n');
    for (from, to, name, value) in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            from.command, from.coord, to.command, to.coord, name, value
        );
    }
    out
}

fn compact(net: &PetriNet, t: TransitionId) -> String {
    let tr = net.transition(t);
    match tr.coord {
        Some(coord) => format!("{}({})", tr.kind, coord),
        None => tr.kind.to_string(),
    }
}

/// Guard and timing assertions, one per line:
///
/// ```text
/// on RD(RA0BA0): ACTIVE(RA0BA0) >= 1
/// on ACT(RA0BA0): ACTIVE(RA0BA0) < 1
/// t(RD RA0BA0) - t(ACT RA0BA0) >= tRCD (11) when intra_bank
/// ```
pub fn emit_assertions(dnet: &DramNet) -> String {
    let net = dnet.net();
    let mut out = String::new();
    for t in net.transition_ids() {
        let flow = net.flow(t);
        for &(p, w) in &flow.consume {
            let _ = writeln!(out, "on {}: {} >= {}", compact(net, t), net.place(p), w);
        }
        for &(p, w) in &flow.inhibit {
            let _ = writeln!(out, "on {}: {} < {}", compact(net, t), net.place(p), w);
        }
    }
    let mut timing: Vec<_> = dnet
        .timing_arcs()
        .iter()
        .map(|info| {
            let value = match &info.value {
                TimingValue::Named(name) => format!("{name} ({})", info.delay),
                TimingValue::Literal(v) => v.to_string(),
            };
            let (from, to) = (dnet.label(info.from), dnet.label(info.to));
            (
                (from, to, info.constraint),
                format!(
                    "t({} {}) - t({} {}) >= {} when {}",
                    to.command, to.coord, from.command, from.coord, value, info.scope
                ),
            )
        })
        .collect();
    timing.sort();
    for (_, line) in timing {
        out.push_str(&line);
        out.push('\n');
    }
    for rule in dnet.window_rules() {
        let watched: Vec<String> = rule.watched.iter().map(|&t| compact(net, t)).collect();
        let _ = writeln!(
            out,
            "window {}: at most {} of [{}] within {}",
            rule.name,
            rule.threshold,
            watched.join(", "),
            rule.length
        );
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EmissionTarget {
    DotNet,
    DotStateGraph,
    ConstraintTable,
    AssertionText,
}

impl EmissionTarget {
    pub const ALL: [EmissionTarget; 4] = [
        EmissionTarget::DotNet,
        EmissionTarget::DotStateGraph,
        EmissionTarget::ConstraintTable,
        EmissionTarget::AssertionText,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EmissionTarget::DotNet => "dot-net",
            EmissionTarget::DotStateGraph => "dot-stategraph",
            EmissionTarget::ConstraintTable => "constraint-table",
            EmissionTarget::AssertionText => "assertion-text",
        }
    }
}

impl fmt::Display for EmissionTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown emission target `{0}` (expected dot-net, dot-stategraph, constraint-table or assertion-text)")]
pub struct UnknownTarget(pub String);

impl FromStr for EmissionTarget {
    type Err = UnknownTarget;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| UnknownTarget(s.to_string()))
    }
}

pub fn emit(dnet: &DramNet, target: EmissionTarget) -> Result<String, AnalysisError> {
    Ok(match target {
        EmissionTarget::DotNet => export_dram_dot(dnet),
        EmissionTarget::DotStateGraph => export_dot_stategraph(&unroll(dnet)?),
        EmissionTarget::ConstraintTable => emit_constraint_table(dnet),
        EmissionTarget::AssertionText => emit_assertions(dnet),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ProtocolConfig;

    const CFG: &str = "\
[hierarchy]
ranks = 1
banks_per_rank = 2
[timings]
tRCD = 11
[constraints]
intra_bank, [ACT], [RD, WR], tRCD
inter_bank, [ACT], [ACT], 3
";

    fn dnet() -> DramNet {
        DramNet::from_config(&ProtocolConfig::parse(CFG).unwrap()).unwrap()
    }

    #[test]
    fn dot_net_shapes_and_arrowheads() {
        let dot = export_dram_dot(&dnet());
        assert!(dot.starts_with("digraph petri {"));
        assert!(dot.contains("shape=circle, label=\"ACTIVE(RA0BA0)\\n0\""));
        assert!(dot.contains("shape=box, label=\"ACT (RA0BA0)\""));
        assert!(dot.contains("arrowhead=dot"));
        assert!(dot.contains("arrowhead=normalnormal"));
        assert!(dot.contains("style=dashed, label=\"tRCD=11\""));
        assert!(dot.contains("style=dashed, label=\"3=3\""));
    }

    #[test]
    fn dot_stategraph_counts() {
        let d = dnet();
        let sg = unroll(&d).unwrap();
        let dot = export_dot_stategraph(&sg);
        assert_eq!(dot.matches("shape=").count(), 9);
        assert_eq!(dot.matches(" -> ").count(), sg.edges().len());
        assert!(dot.contains("label=\"idle\""));
    }

    #[test]
    fn constraint_table_sorted() {
        let table = emit_constraint_table(&dnet());
        let lines: Vec<_> = table.lines().collect();
        assert_eq!(lines[0], CONSTRAINT_TABLE_HEADER);
        assert_eq!(lines.len(), 1 + 4 + 2);
        assert_eq!(lines[1], "ACT,RA0BA0,ACT,RA0BA1,3,3");
        assert_eq!(lines[2], "ACT,RA0BA0,RD,RA0BA0,tRCD,11");
        assert_eq!(lines[3], "ACT,RA0BA0,WR,RA0BA0,tRCD,11");
        assert_eq!(lines[4], "ACT,RA0BA1,ACT,RA0BA0,3,3");
    }

    #[test]
    fn assertion_lines() {
        let text = emit_assertions(&dnet());
        assert!(text.contains("on RD(RA0BA0): ACTIVE(RA0BA0) >= 1\n"));
        assert!(text.contains("on ACT(RA0BA0): ACTIVE(RA0BA0) < 1\n"));
        assert!(text.contains("t(RD RA0BA0) - t(ACT RA0BA0) >= tRCD (11) when intra_bank\n"));
        assert!(text.contains("t(ACT RA0BA1) - t(ACT RA0BA0) >= 3 when inter_bank\n"));
    }

    #[test]
    fn target_names_round_trip() {
        for t in EmissionTarget::ALL {
            assert_eq!(t.name().parse::<EmissionTarget>().unwrap(), t);
        }
        assert!("svg".parse::<EmissionTarget>().is_err());
    }
}
