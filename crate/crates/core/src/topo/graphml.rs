//! GraphML reader/writer for Topology Zoo style files.
//!
//! Nodes are identified by their `id` attribute, which becomes the node
//! label. Undirected graphs (the Zoo default) are expanded into two
//! antiparallel directed edges; per-edge `directed` attributes override
//! the graph default. Self-loops and parallel links are preserved.

use crate::graph::Graph;

use super::{TopoError, TopologyRecord};

pub fn parse_graphml(name: &str, bytes: &[u8]) -> Result<TopologyRecord, TopoError> {
    let text = std::str::from_utf8(bytes).map_err(|_| TopoError::Utf8)?;
    let doc = roxmltree::Document::parse(text).map_err(|e| TopoError::Xml(e.to_string()))?;
    let graph_el = doc
        .descendants()
        .find(|n| n.has_tag_name("graph"))
        .ok_or_else(|| TopoError::Xml("no <graph> element".into()))?;
    let default_directed = graph_el.attribute("edgedefault") == Some("directed");

    let mut graph = Graph::new();
    for node in graph_el.children().filter(|n| n.has_tag_name("node")) {
        let id = node.attribute("id").ok_or(TopoError::MissingNodeId)?;
        graph.add_node(Some(id))?;
    }

    let mut links = 0usize;
    for edge in graph_el.children().filter(|n| n.has_tag_name("edge")) {
        let src_id = edge
            .attribute("source")
            .ok_or_else(|| TopoError::Xml("edge without source".into()))?;
        let dst_id = edge
            .attribute("target")
            .ok_or_else(|| TopoError::Xml("edge without target".into()))?;
        let src = graph
            .node_by_label(src_id)
            .ok_or_else(|| TopoError::UnknownNodeRef(src_id.to_owned()))?;
        let dst = graph
            .node_by_label(dst_id)
            .ok_or_else(|| TopoError::UnknownNodeRef(dst_id.to_owned()))?;
        let directed = match edge.attribute("directed") {
            Some(v) => v == "true",
            None => default_directed,
        };
        graph.add_edge(src, dst)?;
        if !directed && src != dst {
            graph.add_edge(dst, src)?;
        }
        links += 1;
    }

    Ok(TopologyRecord::new(name, graph, links))
}

/// Emits a directed GraphML document; every edge is written as-is.
pub fn write_graphml(graph: &Graph) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    out.push_str("  <graph edgedefault=\"directed\">\n");
    for v in graph.node_ids() {
        let id = xml_escape(&graph.node_name(v));
        out.push_str(&format!("    <node id=\"{id}\"/>\n"));
    }
    for e in graph.edge_ids() {
        let (s, t) = graph.endpoints(e).expect("own edge");
        out.push_str(&format!(
            "    <edge source=\"{}\" target=\"{}\"/>\n",
            xml_escape(&graph.node_name(s)),
            xml_escape(&graph.node_name(t))
        ));
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRIANGLE: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
<graphml xmlns="http://graphml.graphdrawing.org/xmlns">
  <graph edgedefault="undirected">
    <node id="x"/>
    <node id="y"/>
    <node id="z"/>
    <edge source="x" target="y"/>
    <edge source="y" target="z"/>
    <edge source="z" target="x"/>
  </graph>
</graphml>
"#;

    #[test]
    fn undirected_triangle_expands_to_six_edges() {
        let rec = parse_graphml("triangle", TRIANGLE.as_bytes()).unwrap();
        assert_eq!(rec.graph.node_count(), 3);
        assert_eq!(rec.graph.edge_count(), 6);
        assert_eq!(rec.links, 3);
        assert!(rec.connected);
    }

    #[test]
    fn unknown_endpoint_is_named_in_error() {
        let bad = TRIANGLE.replace("target=\"z\"/>\n    <edge", "target=\"w\"/>\n    <edge");
        let err = parse_graphml("bad", bad.as_bytes()).unwrap_err();
        match err {
            TopoError::UnknownNodeRef(n) => assert_eq!(n, "w"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn malformed_xml_reports_parse_error() {
        let err = parse_graphml("broken", b"<graphml><graph>").unwrap_err();
        assert!(matches!(err, TopoError::Xml(_)));
    }

    #[test]
    fn directed_default_keeps_single_edges() {
        let doc = TRIANGLE.replace("edgedefault=\"undirected\"", "edgedefault=\"directed\"");
        let rec = parse_graphml("tri", doc.as_bytes()).unwrap();
        assert_eq!(rec.graph.edge_count(), 3);
    }

    #[test]
    fn graphml_round_trip_preserves_structure() {
        let rec = parse_graphml("triangle", TRIANGLE.as_bytes()).unwrap();
        let emitted = write_graphml(&rec.graph);
        let back = parse_graphml("again", emitted.as_bytes()).unwrap();
        assert_eq!(back.graph.node_count(), rec.graph.node_count());
        assert_eq!(back.graph.edge_count(), rec.graph.edge_count());
    }
}
