//! Vertex classification, reachability and connectivity classes: the
//! existence machinery for Kron reduction.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{NetworkError, PartitionError};
use crate::netmodel::{label_cmp, Network, RoleKind, VertexId};

/// Boundary/interior split plus, once chosen, the retained/eliminated split.
///
/// Eliminated vertices are always interior; at least two vertices are retained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexPartition {
    pub boundary: Vec<VertexId>,
    pub interior: Vec<VertexId>,
    selection: Option<Selection>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Selection {
    retained: Vec<VertexId>,
    eliminated: Vec<VertexId>,
}

impl VertexPartition {
    pub fn is_complete(&self) -> bool {
        self.selection.is_some()
    }

    pub fn retained(&self) -> Result<&[VertexId], PartitionError> {
        self.selection.as_ref().map(|s| s.retained.as_slice()).ok_or(PartitionError::Incomplete)
    }

    pub fn eliminated(&self) -> Result<&[VertexId], PartitionError> {
        self.selection.as_ref().map(|s| s.eliminated.as_slice()).ok_or(PartitionError::Incomplete)
    }

    pub fn is_boundary(&self, v: VertexId) -> bool {
        self.boundary.binary_search(&v).is_ok()
    }
}

/// Which vertices to keep when completing a [`VertexPartition`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RetainRequest {
    /// Eliminate every interior vertex.
    AllInterior,
    EliminateSet(Vec<VertexId>),
    /// Keep exactly these vertices (must cover the boundary).
    RetainSet(Vec<VertexId>),
    /// Keep the boundary and every vertex sharing an edge with it.
    BoundaryPlusNeighbors,
}

/// Sources and sinks (declared or topological) and vertices with an external
/// generator/load attachment are boundary; all others are interior.
pub fn classify_vertices(net: &Network) -> VertexPartition {
    let (boundary, interior) = net.ids().partition(|&v| {
        let role = net.role(v);
        role.kind != RoleKind::Interior
            || role.attachment.is_some()
            || net.is_topological_source(v)
            || net.is_topological_sink(v)
            || net.is_isolated(v)
    });
    VertexPartition { boundary, interior, selection: None }
}

pub fn choose_retained(
    net: &Network,
    part: &VertexPartition,
    request: &RetainRequest,
) -> Result<VertexPartition, PartitionError> {
    let n = net.vertex_count();
    let mut eliminate = vec![false; n];
    match request {
        RetainRequest::AllInterior => {
            for &v in &part.interior {
                eliminate[v.0] = true;
            }
        }
        RetainRequest::EliminateSet(set) => {
            for &v in set {
                check_id(net, v)?;
                eliminate[v.0] = true;
            }
        }
        RetainRequest::RetainSet(set) => {
            eliminate = vec![true; n];
            for &v in set {
                check_id(net, v)?;
                eliminate[v.0] = false;
            }
        }
        RetainRequest::BoundaryPlusNeighbors => {
            eliminate = vec![true; n];
            for &b in &part.boundary {
                eliminate[b.0] = false;
                for w in net.successors(b).chain(net.predecessors(b)) {
                    eliminate[w.0] = false;
                }
            }
        }
    }
    if let Some(&b) = part.boundary.iter().find(|b| eliminate[b.0]) {
        return Err(PartitionError::BoundaryElimination(net.label(b).to_owned()));
    }
    let (eliminated, retained): (Vec<_>, Vec<_>) = net.ids().partition(|v| eliminate[v.0]);
    if retained.len() < 2 {
        return Err(PartitionError::TooFewRetained(retained.len()));
    }
    Ok(VertexPartition {
        boundary: part.boundary.clone(),
        interior: part.interior.clone(),
        selection: Some(Selection { retained, eliminated }),
    })
}

fn check_id(net: &Network, v: VertexId) -> Result<(), PartitionError> {
    if v.0 < net.vertex_count() {
        Ok(())
    } else {
        Err(PartitionError::UnknownVertex(format!("#{}", v.0)))
    }
}

/// Resolves vertex labels to ids.
pub fn resolve_labels<S: AsRef<str>>(net: &Network, labels: &[S]) -> Result<Vec<VertexId>, PartitionError> {
    labels
        .iter()
        .map(|l| net.id_of(l.as_ref()).ok_or_else(|| PartitionError::UnknownVertex(l.as_ref().to_owned())))
        .collect()
}

/// Vertices outside `alpha` with no directed path into `alpha`.
pub fn unreachable_from_outside(net: &Network, alpha: &[VertexId]) -> Vec<VertexId> {
    // reverse BFS from alpha marks everything that can reach it
    let mut reaches = vec![false; net.vertex_count()];
    let mut queue: VecDeque<VertexId> = VecDeque::new();
    for &a in alpha {
        if !reaches[a.0] {
            reaches[a.0] = true;
            queue.push_back(a);
        }
    }
    while let Some(v) = queue.pop_front() {
        for u in net.predecessors(v) {
            if !reaches[u.0] {
                reaches[u.0] = true;
                queue.push_back(u);
            }
        }
    }
    net.ids().filter(|v| !reaches[v.0]).collect()
}

/// `alpha` is a reachable subset when every vertex outside it has a directed
/// path to some vertex inside it.
pub fn is_reachable_subset(net: &Network, alpha: &[VertexId]) -> Result<bool, PartitionError> {
    let mut inside = vec![false; net.vertex_count()];
    for &a in alpha {
        check_id(net, a)?;
        inside[a.0] = true;
    }
    let size = inside.iter().filter(|&&b| b).count();
    if size == net.vertex_count() {
        return Err(PartitionError::NotProper);
    }
    if size < 2 {
        return Err(PartitionError::TooFewRetained(size));
    }
    Ok(unreachable_from_outside(net, alpha).is_empty())
}

/// Forward reachability from `start` (including `start`).
pub fn reachable_from(net: &Network, start: VertexId) -> Vec<bool> {
    let mut seen = vec![false; net.vertex_count()];
    seen[start.0] = true;
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for w in net.successors(v) {
            if !seen[w.0] {
                seen[w.0] = true;
                stack.push(w);
            }
        }
    }
    seen
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConnectivityClass {
    StronglyConnected,
    QuasiStronglyConnected { root: VertexId },
    Neither,
}

impl ConnectivityClass {
    /// True for strongly connected graphs too.
    pub fn is_quasi(self) -> bool {
        !matches!(self, ConnectivityClass::Neither)
    }

    pub fn describe(self, net: &Network) -> String {
        match self {
            ConnectivityClass::StronglyConnected => "strongly-connected".to_owned(),
            ConnectivityClass::QuasiStronglyConnected { root } => {
                format!("quasi-strongly-connected, root={}", net.label(root))
            }
            ConnectivityClass::Neither => "neither".to_owned(),
        }
    }
}

impl fmt::Display for ConnectivityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConnectivityClass::StronglyConnected => "strongly-connected",
            ConnectivityClass::QuasiStronglyConnected { .. } => "quasi-strongly-connected",
            ConnectivityClass::Neither => "neither",
        })
    }
}

/// Strongly connected components (Tarjan, iterative). Returns the component
/// index of each vertex; components are numbered in reverse topological
/// order of the condensation.
pub fn strongly_connected_components(net: &Network) -> (usize, Vec<usize>) {
    const UNVISITED: usize = usize::MAX;
    let n = net.vertex_count();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNVISITED; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut ncomp = 0;

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        // (vertex, position in its out-edge list)
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            let outs = net.out_edges(VertexId(v));
            if *pos < outs.len() {
                let w = net.edges()[outs[*pos]].tail.0;
                *pos += 1;
                if index[w] == UNVISITED {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    comp[w] = ncomp;
                    if w == v {
                        break;
                    }
                }
                ncomp += 1;
            }
        }
    }
    (ncomp, comp)
}

/// Strongly connected, quasi-strongly connected (reporting the smallest root
/// label), or neither.
pub fn connectivity_class(net: &Network) -> ConnectivityClass {
    let (ncomp, comp) = strongly_connected_components(net);
    if ncomp <= 1 {
        return ConnectivityClass::StronglyConnected;
    }
    let mut has_incoming = vec![false; ncomp];
    for e in net.edges() {
        let (ch, ct) = (comp[e.head.0], comp[e.tail.0]);
        if ch != ct {
            has_incoming[ct] = true;
        }
    }
    let mut sources = (0..ncomp).filter(|&c| !has_incoming[c]);
    let (Some(top), None) = (sources.next(), sources.next()) else {
        return ConnectivityClass::Neither;
    };
    // a unique source component of a finite DAG reaches every component
    let root = net
        .ids()
        .filter(|v| comp[v.0] == top)
        .min_by(|a, b| label_cmp(net.label(*a), net.label(*b)))
        .expect("component is non-empty");
    ConnectivityClass::QuasiStronglyConnected { root }
}

/// Product of adjacency weights along consecutive vertex pairs; zero when a
/// hop is not an edge.
pub fn walk_product<S: AsRef<str>>(net: &Network, walk: &[S]) -> Result<f64, NetworkError> {
    if walk.len() < 2 {
        return Err(NetworkError::ShortWalk);
    }
    let ids: Vec<VertexId> = walk
        .iter()
        .map(|l| net.id_of(l.as_ref()).ok_or_else(|| NetworkError::UnknownVertex(l.as_ref().to_owned())))
        .collect::<Result<_, _>>()?;
    Ok(ids
        .windows(2)
        .map(|w| net.edge_between(w[0], w[1]).map_or(0.0, |e| e.susceptance.get()))
        .product())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::{builtin_case, parse_network};

    fn load(text: &str) -> Network {
        parse_network(text).unwrap().network
    }

    fn labels(net: &Network, ids: &[VertexId]) -> Vec<String> {
        ids.iter().map(|&v| net.label(v).to_owned()).collect()
    }

    fn ids(net: &Network, labels: &[&str]) -> Vec<VertexId> {
        resolve_labels(net, labels).unwrap()
    }

    #[test]
    fn ieee3_boundary() {
        let net = builtin_case("ieee3").unwrap();
        let p = classify_vertices(&net);
        assert_eq!(labels(&net, &p.boundary), ["1", "3"]);
        assert_eq!(labels(&net, &p.interior), ["2"]);
        assert!(!p.is_complete());
        assert_eq!(p.retained(), Err(PartitionError::Incomplete));
    }

    #[test]
    fn ieee9_boundary() {
        let net = builtin_case("ieee9").unwrap();
        let p = classify_vertices(&net);
        assert_eq!(labels(&net, &p.boundary), ["1", "2", "3", "5", "6", "8"]);
    }

    #[test]
    fn ieee14_boundary_and_stage_one() {
        let net = builtin_case("ieee14").unwrap();
        let p = classify_vertices(&net);
        assert_eq!(labels(&net, &p.boundary), ["1", "8", "13"]);
        let stage1 = choose_retained(&net, &p, &RetainRequest::BoundaryPlusNeighbors).unwrap();
        assert_eq!(labels(&net, stage1.eliminated().unwrap()), ["3", "4", "9", "10", "11"]);
        assert_eq!(
            labels(&net, stage1.retained().unwrap()),
            ["1", "2", "5", "6", "7", "8", "12", "13", "14"]
        );
    }

    #[test]
    fn directed_cycle_has_no_boundary() {
        let net = load(include_str!("../tests/data/cycle4.dgnet"));
        assert!(classify_vertices(&net).boundary.is_empty());
    }

    #[test]
    fn isolated_vertices_are_boundary() {
        let net = load("vertex 1 interior\nvertex 2 interior\nvertex 3 interior\nvertex 4 interior\nedge 1 2 b=1\nedge 2 3 b=1");
        let part = classify_vertices(&net);
        assert_eq!(labels(&net, &part.boundary), ["1", "3", "4"]);
        let sel = choose_retained(&net, &part, &RetainRequest::AllInterior).unwrap();
        assert_eq!(labels(&net, sel.eliminated().unwrap()), ["2"]);
    }

    #[test]
    fn retain_requests() {
        let net = builtin_case("ieee9").unwrap();
        let p = classify_vertices(&net);
        let all = choose_retained(&net, &p, &RetainRequest::AllInterior).unwrap();
        assert_eq!(labels(&net, all.eliminated().unwrap()), ["4", "7", "9"]);
        let none = choose_retained(&net, &p, &RetainRequest::EliminateSet(vec![])).unwrap();
        assert_eq!(none.retained().unwrap().len(), 9);
        assert!(none.eliminated().unwrap().is_empty());
        let set = choose_retained(&net, &p, &RetainRequest::EliminateSet(ids(&net, &["4", "7"]))).unwrap();
        assert_eq!(labels(&net, set.eliminated().unwrap()), ["4", "7"]);
        let keep = choose_retained(
            &net,
            &p,
            &RetainRequest::RetainSet(ids(&net, &["1", "2", "3", "5", "6", "8", "9"])),
        )
        .unwrap();
        assert_eq!(keep, set);
    }

    #[test]
    fn boundary_vertices_cannot_be_eliminated() {
        let net = builtin_case("ieee9").unwrap();
        let p = classify_vertices(&net);
        let err = choose_retained(&net, &p, &RetainRequest::EliminateSet(ids(&net, &["4", "5"]))).unwrap_err();
        assert_eq!(err, PartitionError::BoundaryElimination("5".into()));
        let err = choose_retained(&net, &p, &RetainRequest::RetainSet(ids(&net, &["1", "2"]))).unwrap_err();
        assert!(matches!(err, PartitionError::BoundaryElimination(_)));
    }

    #[test]
    fn at_least_two_vertices_are_retained() {
        let net = load(include_str!("../tests/data/cycle4.dgnet"));
        let p = classify_vertices(&net);
        let err = choose_retained(&net, &p, &RetainRequest::EliminateSet(ids(&net, &["1", "2", "3"]))).unwrap_err();
        assert_eq!(err, PartitionError::TooFewRetained(1));
    }

    #[test]
    fn reachable_subsets() {
        let sc = load(include_str!("../tests/data/strong5.dgnet"));
        for alpha in [&["1", "2"][..], &["3", "5"], &["1", "2", "3"], &["2", "3", "4", "5"]] {
            assert!(is_reachable_subset(&sc, &ids(&sc, alpha)).unwrap());
        }
        let quasi = load(include_str!("../tests/data/quasi-acyclic.dgnet"));
        assert!(!is_reachable_subset(&quasi, &ids(&quasi, &["1", "3", "4"])).unwrap());
        assert!(is_reachable_subset(&quasi, &ids(&quasi, &["1", "2"])).unwrap());
        let dyads = load(
            "vertex a interior\nvertex b interior\nvertex c interior\nvertex d interior\n\
             edge a b b=1\nedge b a b=1\nedge c d b=1\nedge d c b=1",
        );
        assert!(!is_reachable_subset(&dyads, &ids(&dyads, &["a", "b"])).unwrap());
    }

    #[test]
    fn reachable_subset_requires_proper_alpha() {
        let net = builtin_case("ieee3").unwrap();
        assert_eq!(is_reachable_subset(&net, &ids(&net, &["1", "2", "3"])), Err(PartitionError::NotProper));
        assert_eq!(is_reachable_subset(&net, &ids(&net, &["1"])), Err(PartitionError::TooFewRetained(1)));
    }

    #[test]
    fn connectivity_classes() {
        let sc = load(include_str!("../tests/data/strong5.dgnet"));
        assert_eq!(connectivity_class(&sc), ConnectivityClass::StronglyConnected);
        let ieee3 = builtin_case("ieee3").unwrap();
        let class = connectivity_class(&ieee3);
        assert_eq!(class.describe(&ieee3), "quasi-strongly-connected, root=1");
        let pair = load("vertex 1 interior\nvertex 2 interior");
        assert_eq!(connectivity_class(&pair), ConnectivityClass::Neither);
        assert_eq!(connectivity_class(&builtin_case("ieee9").unwrap()), ConnectivityClass::Neither);
        assert!(connectivity_class(&builtin_case("ieee5").unwrap()).is_quasi());
    }

    #[test]
    fn quasi_root_is_smallest_label_in_top_component() {
        // 10 <-> 2 form the top component, both reach 3
        let net = load("vertex 10 interior\nvertex 2 interior\nvertex 3 interior\nedge 10 2 b=1\nedge 2 10 b=1\nedge 2 3 b=1");
        let root = match connectivity_class(&net) {
            ConnectivityClass::QuasiStronglyConnected { root } => root,
            other => panic!("{other:?}"),
        };
        assert_eq!(net.label(root), "2");
    }

    #[test]
    fn walk_products() {
        let net = load(include_str!("../tests/data/four-bus-weighted.dgnet"));
        // [A]_13 · [A]_32 = 1 · 4
        assert_eq!(walk_product(&net, &["1", "3", "2"]).unwrap(), 4.0);
        assert_eq!(walk_product(&net, &["1", "4", "3", "2"]).unwrap(), 2.0 * 3.0 * 4.0);
        assert_eq!(walk_product(&net, &["2", "3"]).unwrap(), 0.0);
        assert_eq!(walk_product(&net, &["4", "2"]).unwrap(), 5.0);
        assert_eq!(walk_product(&net, &["1"]), Err(NetworkError::ShortWalk));
        assert_eq!(walk_product(&net, &["1", "9"]), Err(NetworkError::UnknownVertex("9".into())));
    }
}
