//! Graph document round trips and validation-on-import.
//!
//! ```bash
//! cargo run --release --example graph_io
//! ```

use std::error::Error;
use std::path::Path;

use vesselkit::graph::{VesselGraph, VesselNode};
use vesselkit::io::{graph_from_json, graph_to_json};

fn main() -> Result<(), Box<dyn Error>> {
    // a small hand-built tree: root with two branches
    let mut g = VesselGraph::new(3.0);
    g.add_node(VesselNode::new(0, 1.5, 1.5, 0.15, 0.02));
    g.add_node(VesselNode::new(1, 1.8, 1.6, 0.15, 0.015));
    g.add_node(VesselNode::new(2, 1.2, 1.3, 0.15, 0.012));
    g.link(0, 1)?;
    g.link(0, 2)?;
    g.set_root(Some(0));

    let json = graph_to_json(&g);
    println!("document:\n{json}\n");

    let back = graph_from_json(&json, Path::new("inline"))?;
    assert_eq!(back, g);
    println!("round trip is exact: {} nodes, {} edges", back.node_count(), back.edges().len());

    // imports run validation; a negative radius is rejected with context
    let bad = json.replace("0.012", "-0.012");
    match graph_from_json(&bad, Path::new("corrupted")) {
        Err(e) => println!("corrupted document rejected: {e}"),
        Ok(_) => unreachable!("validation catches the negative radius"),
    }
    Ok(())
}
