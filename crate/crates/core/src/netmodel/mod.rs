//! Directed power-flow graphs: vertices with roles, edges oriented from head
//! to tail and weighted by a positive susceptance.

mod builtins;
mod format;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use crate::error::NetworkError;

pub use builtins::{builtin_case, builtin_text, BUILTIN_CASES};
pub use format::{parse_network, serialize_network, ParseWarning, ParsedNetwork};

/// Dense 0-based vertex position; fixes every matrix row/column ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RoleKind {
    Source,
    Sink,
    Interior,
}

impl RoleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RoleKind::Source => "source",
            RoleKind::Sink => "sink",
            RoleKind::Interior => "interior",
        }
    }
}

/// What sits outside the network at a bus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Attachment {
    Generator,
    Loading,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VertexRole {
    pub kind: RoleKind,
    pub attachment: Option<Attachment>,
}

impl VertexRole {
    pub const INTERIOR: Self = Self { kind: RoleKind::Interior, attachment: None };

    pub fn new(kind: RoleKind, attachment: Option<Attachment>) -> Self {
        Self { kind, attachment }
    }

    pub fn source() -> Self {
        Self::new(RoleKind::Source, Some(Attachment::Generator))
    }

    pub fn sink() -> Self {
        Self::new(RoleKind::Sink, Some(Attachment::Loading))
    }
}

/// Edge weight `b = −1/x > 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Susceptance(f64);

impl Susceptance {
    pub fn new(b: f64) -> Result<Self, NetworkError> {
        if b.is_finite() && b > 0.0 {
            Ok(Self(b))
        } else {
            Err(NetworkError::NonPositiveSusceptance(b))
        }
    }

    /// Converts a line reactance. `None` when `x ≥ 0`: such lines are not
    /// part of the directed model.
    pub fn from_reactance(x: f64) -> Option<Self> {
        (x < 0.0).then(|| -1.0 / x).and_then(|b| Self::new(b).ok())
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub label: String,
    pub role: VertexRole,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectedEdge {
    pub head: VertexId,
    pub tail: VertexId,
    pub susceptance: Susceptance,
}

/// An immutable directed weighted graph. Construct through [`NetworkBuilder`].
#[derive(Debug, Clone)]
pub struct Network {
    name: String,
    vertices: Vec<Vertex>,
    edges: Vec<DirectedEdge>,
    index: HashMap<String, usize>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
}

impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.vertices == other.vertices && self.edges == other.edges
    }
}

impl Network {
    pub fn builder(name: impl Into<String>) -> NetworkBuilder {
        NetworkBuilder::new(name)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[DirectedEdge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.vertices[v.0].label
    }

    pub fn role(&self, v: VertexId) -> VertexRole {
        self.vertices[v.0].role
    }

    pub fn labels(&self) -> Vec<String> {
        self.vertices.iter().map(|v| v.label.clone()).collect()
    }

    /// Edge labels `e1, e2, …` in edge order.
    pub fn edge_labels(&self) -> Vec<String> {
        (1..=self.edges.len()).map(|k| format!("e{k}")).collect()
    }

    pub fn id_of(&self, label: &str) -> Option<VertexId> {
        self.index.get(label).copied().map(VertexId)
    }

    pub fn ids(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertices.len()).map(VertexId)
    }

    /// Edge indices with `v` as head.
    pub fn out_edges(&self, v: VertexId) -> &[usize] {
        &self.out_adj[v.0]
    }

    /// Edge indices with `v` as tail.
    pub fn in_edges(&self, v: VertexId) -> &[usize] {
        &self.in_adj[v.0]
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.out_adj[v.0].len()
    }

    pub fn in_degree(&self, v: VertexId) -> usize {
        self.in_adj[v.0].len()
    }

    pub fn successors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.out_adj[v.0].iter().map(|&e| self.edges[e].tail)
    }

    pub fn predecessors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.in_adj[v.0].iter().map(|&e| self.edges[e].head)
    }

    pub fn edge_between(&self, head: VertexId, tail: VertexId) -> Option<&DirectedEdge> {
        self.out_adj[head.0].iter().map(|&e| &self.edges[e]).find(|e| e.tail == tail)
    }

    /// Head-only vertex: at least one edge, none incoming.
    pub fn is_topological_source(&self, v: VertexId) -> bool {
        self.in_degree(v) == 0 && self.out_degree(v) > 0
    }

    /// Tail-only vertex: at least one edge, none outgoing.
    pub fn is_topological_sink(&self, v: VertexId) -> bool {
        self.out_degree(v) == 0 && self.in_degree(v) > 0
    }

    pub fn is_isolated(&self, v: VertexId) -> bool {
        self.out_degree(v) == 0 && self.in_degree(v) == 0
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Network {
        self.name = name.into();
        self
    }

    /// Copy with every role kind recomputed from topology and attachments
    /// looked up in `roles_from` by label.
    pub(crate) fn with_topological_roles(&self, roles_from: Option<&Network>) -> Network {
        let mut b = NetworkBuilder::new(self.name.clone());
        for v in self.ids() {
            let kind = if self.is_topological_source(v) {
                RoleKind::Source
            } else if self.is_topological_sink(v) {
                RoleKind::Sink
            } else {
                RoleKind::Interior
            };
            let attachment = roles_from
                .and_then(|n| n.id_of(self.label(v)).map(|w| n.role(w).attachment))
                .flatten();
            b.add_vertex(self.label(v), VertexRole::new(kind, attachment))
                .expect("labels already unique");
        }
        for e in &self.edges {
            b.add_edge(self.label(e.head), self.label(e.tail), e.susceptance)
                .expect("edges already valid");
        }
        b.build()
    }
}

#[derive(Debug, Clone)]
pub struct NetworkBuilder {
    name: String,
    vertices: Vec<Vertex>,
    edges: Vec<DirectedEdge>,
    index: HashMap<String, usize>,
    pairs: HashMap<(usize, usize), usize>,
}

impl NetworkBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            vertices: Vec::new(),
            edges: Vec::new(),
            index: HashMap::new(),
            pairs: HashMap::new(),
        }
    }

    pub fn add_vertex(&mut self, label: &str, role: VertexRole) -> Result<VertexId, NetworkError> {
        if label.is_empty() || label.starts_with('#') || label.chars().any(char::is_whitespace) {
            return Err(NetworkError::InvalidLabel(label.to_owned()));
        }
        if self.index.contains_key(label) {
            return Err(NetworkError::DuplicateVertex(label.to_owned()));
        }
        let id = self.vertices.len();
        self.index.insert(label.to_owned(), id);
        self.vertices.push(Vertex { label: label.to_owned(), role });
        Ok(VertexId(id))
    }

    pub fn add_edge(&mut self, head: &str, tail: &str, b: Susceptance) -> Result<usize, NetworkError> {
        let h = self.lookup(head)?;
        let t = self.lookup(tail)?;
        if h == t {
            return Err(NetworkError::SelfLoop(head.to_owned()));
        }
        if self.pairs.contains_key(&(h, t)) {
            return Err(NetworkError::DuplicateEdge { head: head.to_owned(), tail: tail.to_owned() });
        }
        let id = self.edges.len();
        self.pairs.insert((h, t), id);
        self.edges.push(DirectedEdge { head: VertexId(h), tail: VertexId(t), susceptance: b });
        Ok(id)
    }

    fn lookup(&self, label: &str) -> Result<usize, NetworkError> {
        self.index.get(label).copied().ok_or_else(|| NetworkError::UnknownVertex(label.to_owned()))
    }

    pub fn build(self) -> Network {
        let n = self.vertices.len();
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for (k, e) in self.edges.iter().enumerate() {
            out_adj[e.head.0].push(k);
            in_adj[e.tail.0].push(k);
        }
        Network {
            name: self.name,
            vertices: self.vertices,
            edges: self.edges,
            index: self.index,
            out_adj,
            in_adj,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Declared source that is the tail of some edge.
    SourceWithInEdge(String),
    /// Declared sink that is the head of some edge.
    SinkWithOutEdge(String),
    /// Vertex with no incident edge. Non-fatal.
    Isolated(String),
    MinSize(usize),
}

impl Violation {
    pub fn code(&self) -> &'static str {
        match self {
            Violation::SourceWithInEdge(_) => "source-with-in-edge",
            Violation::SinkWithOutEdge(_) => "sink-with-out-edge",
            Violation::Isolated(_) => "isolated-vertex",
            Violation::MinSize(_) => "min-size",
        }
    }

    pub fn is_fatal(&self) -> bool {
        !matches!(self, Violation::Isolated(_))
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SourceWithInEdge(v) | Violation::SinkWithOutEdge(v) | Violation::Isolated(v) => {
                write!(f, "{}: vertex {v}", self.code())
            }
            Violation::MinSize(n) => write!(f, "{}: {n} vertices, need at least 2", self.code()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    /// No fatal violations (isolated vertices are tolerated).
    pub fn is_valid(&self) -> bool {
        !self.violations.iter().any(Violation::is_fatal)
    }
}

pub fn validate_network(net: &Network) -> ValidationReport {
    let mut violations = Vec::new();
    if net.vertex_count() < 2 {
        violations.push(Violation::MinSize(net.vertex_count()));
    }
    for v in net.ids() {
        let label = net.label(v).to_owned();
        match net.role(v).kind {
            RoleKind::Source if net.in_degree(v) > 0 => {
                violations.push(Violation::SourceWithInEdge(label.clone()))
            }
            RoleKind::Sink if net.out_degree(v) > 0 => {
                violations.push(Violation::SinkWithOutEdge(label.clone()))
            }
            _ => {}
        }
        if net.is_isolated(v) {
            violations.push(Violation::Isolated(label));
        }
    }
    ValidationReport { violations }
}

/// Orders labels numerically when both parse as integers, lexically otherwise.
pub fn label_cmp(a: &str, b: &str) -> Ordering {
    match (a.parse::<u64>(), b.parse::<u64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        _ => a.cmp(b),
    }
}
