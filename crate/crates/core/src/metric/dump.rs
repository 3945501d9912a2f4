use std::fmt::Write as _;
use std::path::Path;

use super::{MetricGraph, NodeKind};
use crate::error::Result;

pub fn encode_edges_csv(g: &MetricGraph) -> Vec<u8> {
    let mut s = String::from("u,v,weight\n");
    for (u, v, w) in g.edges() {
        writeln!(s, "{u},{v},{w}").unwrap();
    }
    s.into_bytes()
}

pub fn encode_nodes_csv(g: &MetricGraph) -> Vec<u8> {
    let mut s = String::from("id,kind,vertex,angle\n");
    for id in 0..g.node_count() as u32 {
        let kind = match g.kind(id) {
            NodeKind::Center(_) => "center",
            NodeKind::Corner(_) => "corner",
        };
        writeln!(s, "{id},{kind},{},{}", g.node_vertex(id).0, g.node_angle(id)).unwrap();
    }
    s.into_bytes()
}

/// Writes the edge table to `edges` and the node table to `nodes`.
pub fn write_graph_csv(g: &MetricGraph, edges: &Path, nodes: &Path) -> Result<()> {
    crate::io::write_atomic(edges, &encode_edges_csv(g))?;
    crate::io::write_atomic(nodes, &encode_nodes_csv(g))
}
