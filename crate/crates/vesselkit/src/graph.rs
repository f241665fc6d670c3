//! Vessel graphs: centerline nodes carrying radii, plus directed edges.
//!
//! A [`VesselGraph`] stores vessel centerline points `(x, y, z | r)` and
//! directed `from -> to` edges whose weight is the radius of the `from`
//! node. Graphs produced by synthesis are rooted trees; graphs built from
//! point sets use paired directed edges to realize undirected adjacency.
//!
//! Types are immutable values once constructed: all operations here are
//! pure functions returning reports or new graphs.

use std::collections::HashMap;
use std::fmt;
use std::hash::{BuildHasherDefault, Hasher};

use thiserror::Error;

/// Node identifier. Unique within a graph, not necessarily dense.
pub type NodeId = u32;

/// Multiplicative hasher for small integer keys. Graph id lookups sit on
/// hot paths where SipHash costs show up at the 10^5-node scale.
#[derive(Default)]
pub(crate) struct IdHasher(u64);

impl Hasher for IdHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0 ^ b as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        }
    }

    fn write_u32(&mut self, i: u32) {
        let mut z = (self.0 ^ i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        z ^= z >> 29;
        self.0 = z;
    }
}

pub(crate) type IdIndexMap = HashMap<NodeId, usize, BuildHasherDefault<IdHasher>>;

/// A vessel centerline point with its local radius, in millimeters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VesselNode {
    pub id: NodeId,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// Local vessel radius, must be finite and > 0 in a valid graph.
    pub r: f64,
}

impl VesselNode {
    pub fn new(id: NodeId, x: f64, y: f64, z: f64, r: f64) -> Self {
        Self { id, x, y, z, r }
    }

    pub fn position(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn distance_to(&self, other: &VesselNode) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// A directed vessel segment. `weight` is the radius of the `from` node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VesselEdge {
    pub from: NodeId,
    pub to: NodeId,
    pub weight: f64,
}

/// Structured vessel representation: nodes, directed edges, optional root.
#[derive(Debug, Clone)]
pub struct VesselGraph {
    nodes: Vec<VesselNode>,
    edges: Vec<VesselEdge>,
    root: Option<NodeId>,
    /// En-face field of view this graph was generated for, in millimeters.
    fov_mm: f64,
    index: IdIndexMap,
}

impl PartialEq for VesselGraph {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes
            && self.edges == other.edges
            && self.root == other.root
            && self.fov_mm == other.fov_mm
    }
}

impl Default for VesselGraph {
    fn default() -> Self {
        Self::new(3.0)
    }
}

impl VesselGraph {
    /// Empty graph with the given field of view.
    pub fn new(fov_mm: f64) -> Self {
        Self {
            nodes: Vec::new(),
            edges: Vec::new(),
            root: None,
            fov_mm,
            index: IdIndexMap::default(),
        }
    }

    /// Empty graph with index capacity reserved for `nodes` insertions.
    pub(crate) fn with_capacity(fov_mm: f64, nodes: usize) -> Self {
        let mut g = Self::new(fov_mm);
        g.nodes.reserve(nodes);
        g.index.reserve(nodes);
        g
    }

    /// Append a node. Duplicate ids are accepted here and flagged by
    /// [`VesselGraph::validate`]; lookups resolve to the first occurrence.
    pub fn add_node(&mut self, node: VesselNode) {
        self.index.entry(node.id).or_insert(self.nodes.len());
        self.nodes.push(node);
    }

    /// Append an edge verbatim. No endpoint or weight checking.
    pub fn add_edge_raw(&mut self, edge: VesselEdge) {
        self.edges.push(edge);
    }

    /// Append an edge `from -> to` with weight set to the radius of `from`.
    pub fn link(&mut self, from: NodeId, to: NodeId) -> Result<(), GraphError> {
        let weight = self
            .node(from)
            .ok_or(GraphError::NodeNotFound(from))?
            .r;
        if self.node(to).is_none() {
            return Err(GraphError::NodeNotFound(to));
        }
        self.edges.push(VesselEdge { from, to, weight });
        Ok(())
    }

    pub fn set_root(&mut self, root: Option<NodeId>) {
        self.root = root;
    }

    pub fn set_fov_mm(&mut self, fov_mm: f64) {
        self.fov_mm = fov_mm;
    }

    pub fn nodes(&self) -> &[VesselNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[VesselEdge] {
        &self.edges
    }

    pub fn root(&self) -> Option<NodeId> {
        self.root
    }

    pub fn fov_mm(&self) -> f64 {
        self.fov_mm
    }

    /// Number of nodes N.
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> Option<&VesselNode> {
        self.index.get(&id).map(|&i| &self.nodes[i])
    }

    pub fn node_index(&self, id: NodeId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    /// Undirected adjacency as node-index lists, ignoring edges whose
    /// endpoints are missing. Each list is deduplicated and sorted.
    pub(crate) fn adjacency_undirected(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            if let (Some(a), Some(b)) = (self.node_index(e.from), self.node_index(e.to)) {
                if a != b {
                    adj[a].push(b);
                    adj[b].push(a);
                }
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// Subgraph induced on `keep` (a predicate over node ids). Preserves
    /// node and edge order, keeps the root only if it survives.
    pub fn induced_subgraph(&self, keep: impl Fn(NodeId) -> bool) -> VesselGraph {
        let mut out = VesselGraph::new(self.fov_mm);
        for n in &self.nodes {
            if keep(n.id) {
                out.add_node(*n);
            }
        }
        for e in &self.edges {
            if out.node(e.from).is_some() && out.node(e.to).is_some() {
                out.add_edge_raw(*e);
            }
        }
        out.root = self.root.filter(|&r| out.node(r).is_some());
        out
    }

    /// Report every violated structural invariant. Never aborts.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let mut seen: HashMap<NodeId, usize> = HashMap::new();
        for n in &self.nodes {
            *seen.entry(n.id).or_insert(0) += 1;
        }
        let mut dup: Vec<NodeId> = seen
            .iter()
            .filter(|&(_, &c)| c > 1)
            .map(|(&id, _)| id)
            .collect();
        dup.sort_unstable();
        for id in dup {
            violations.push(Violation::DuplicateNodeId(id));
        }
        for n in &self.nodes {
            if !(n.r > 0.0) || !n.r.is_finite() {
                violations.push(Violation::NonPositiveRadius(n.id));
            }
            if !(n.x.is_finite() && n.y.is_finite() && n.z.is_finite()) {
                violations.push(Violation::NonFiniteCoordinate(n.id));
            }
        }
        for e in &self.edges {
            if self.node(e.from).is_none() {
                violations.push(Violation::DanglingEdge(e.from));
            }
            if self.node(e.to).is_none() {
                violations.push(Violation::DanglingEdge(e.to));
            }
            if e.from == e.to {
                violations.push(Violation::SelfLoop(e.from));
            }
            if let Some(n) = self.node(e.from) {
                if e.weight != n.r {
                    violations.push(Violation::WeightMismatch {
                        from: e.from,
                        to: e.to,
                    });
                }
            }
        }
        if let Some(r) = self.root {
            if self.node(r).is_none() {
                violations.push(Violation::MissingRoot(r));
            }
        }
        ValidationReport { violations }
    }

    /// [`VesselGraph::validate`] plus rooted-forest checks: in-degree at
    /// most one per node, no directed cycles, and a parentless root when
    /// one is set.
    pub fn validate_tree(&self) -> ValidationReport {
        let mut report = self.validate();
        let mut indeg: HashMap<NodeId, u32> = HashMap::new();
        let mut parent: HashMap<NodeId, NodeId> = HashMap::new();
        for e in &self.edges {
            if self.node(e.from).is_some() && self.node(e.to).is_some() && e.from != e.to {
                *indeg.entry(e.to).or_insert(0) += 1;
                parent.entry(e.to).or_insert(e.from);
            }
        }
        let mut multi: Vec<NodeId> = indeg
            .iter()
            .filter(|&(_, &c)| c > 1)
            .map(|(&id, _)| id)
            .collect();
        multi.sort_unstable();
        for id in multi {
            report.violations.push(Violation::MultipleParents(id));
        }
        if let Some(r) = self.root {
            if indeg.get(&r).copied().unwrap_or(0) > 0 {
                report.violations.push(Violation::RootHasParent(r));
            }
        }
        // Walk parent chains; revisiting a node within one walk is a cycle.
        let mut state: HashMap<NodeId, u8> = HashMap::new(); // 1 = on path, 2 = done
        for n in &self.nodes {
            let mut path = Vec::new();
            let mut cur = n.id;
            loop {
                match state.get(&cur).copied() {
                    Some(2) => break,
                    Some(1) => {
                        report.violations.push(Violation::Cycle(cur));
                        break;
                    }
                    _ => {}
                }
                state.insert(cur, 1);
                path.push(cur);
                match parent.get(&cur) {
                    Some(&p) => cur = p,
                    None => break,
                }
            }
            for id in path {
                state.insert(id, 2);
            }
        }
        report
    }

    /// Maximum radius over all nodes.
    pub fn max_radius(&self) -> Result<f64, GraphError> {
        self.nodes
            .iter()
            .map(|n| n.r)
            .fold(None, |acc: Option<f64>, r| {
                Some(match acc {
                    Some(m) if m >= r => m,
                    _ => r,
                })
            })
            .ok_or(GraphError::EmptyGraph)
    }

    /// Induced subgraph on the undirected connected component with the most
    /// nodes; ties go to the component containing the smallest node id.
    pub fn largest_connected_component(&self) -> VesselGraph {
        if self.nodes.is_empty() {
            return VesselGraph::new(self.fov_mm);
        }
        let adj = self.adjacency_undirected();
        let n = self.nodes.len();
        let mut comp = vec![usize::MAX; n];
        let mut comp_count = 0usize;
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            comp[start] = comp_count;
            while let Some(u) = stack.pop() {
                for &v in &adj[u] {
                    if comp[v] == usize::MAX {
                        comp[v] = comp_count;
                        stack.push(v);
                    }
                }
            }
            comp_count += 1;
        }
        let mut sizes = vec![0usize; comp_count];
        let mut min_id = vec![NodeId::MAX; comp_count];
        for (i, n) in self.nodes.iter().enumerate() {
            sizes[comp[i]] += 1;
            min_id[comp[i]] = min_id[comp[i]].min(n.id);
        }
        let best = (0..comp_count)
            .max_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(min_id[b].cmp(&min_id[a])))
            .expect("at least one component");
        let keep: Vec<bool> = (0..n).map(|i| comp[i] == best).collect();
        let keep_ids: std::collections::HashSet<NodeId> = self
            .nodes
            .iter()
            .enumerate()
            .filter(|(i, _)| keep[*i])
            .map(|(_, n)| n.id)
            .collect();
        self.induced_subgraph(|id| keep_ids.contains(&id))
    }
}

/// A single violated invariant found by validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    DuplicateNodeId(NodeId),
    DanglingEdge(NodeId),
    NonPositiveRadius(NodeId),
    NonFiniteCoordinate(NodeId),
    SelfLoop(NodeId),
    WeightMismatch { from: NodeId, to: NodeId },
    MissingRoot(NodeId),
    MultipleParents(NodeId),
    RootHasParent(NodeId),
    Cycle(NodeId),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateNodeId(id) => write!(f, "duplicate-node-id({id})"),
            Violation::DanglingEdge(id) => write!(f, "dangling-edge({id})"),
            Violation::NonPositiveRadius(id) => write!(f, "non-positive-radius({id})"),
            Violation::NonFiniteCoordinate(id) => write!(f, "non-finite-coordinate({id})"),
            Violation::SelfLoop(id) => write!(f, "self-loop({id})"),
            Violation::WeightMismatch { from, to } => {
                write!(f, "weight-mismatch({from}->{to})")
            }
            Violation::MissingRoot(id) => write!(f, "missing-root({id})"),
            Violation::MultipleParents(id) => write!(f, "multiple-parents({id})"),
            Violation::RootHasParent(id) => write!(f, "root-has-parent({id})"),
            Violation::Cycle(id) => write!(f, "cycle({id})"),
        }
    }
}

/// Validation output: empty means every checked invariant holds.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn contains(&self, v: &Violation) -> bool {
        self.violations.contains(v)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            write!(f, "valid")
        } else {
            for (i, v) in self.violations.iter().enumerate() {
                if i > 0 {
                    writeln!(f)?;
                }
                write!(f, "{v}")?;
            }
            Ok(())
        }
    }
}

/// Errors from graph operations.
#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("graph is empty")]
    EmptyGraph,
    #[error("node {0} not found")]
    NodeNotFound(NodeId),
    #[error("graph is not a rooted tree: {0}")]
    NotATree(String),
}
