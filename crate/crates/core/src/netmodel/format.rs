//! The line-oriented `.dgnet` text format.
//!
//! ```text
//! # comment
//! net <name>
//! vertex <label> <source|sink|interior> [gen] [load]
//! edge <head-label> <tail-label> (b=<float> | x=<float>)
//! ```
//!
//! Declarations may appear in any order. Reactances are converted with
//! `b = −1/x`; an edge given with `x ≥ 0` is dropped and reported as a
//! [`ParseWarning`].

use std::fmt::Write as _;

use super::{Attachment, Network, NetworkBuilder, RoleKind, Susceptance, VertexRole};
use crate::error::{ParseError, ParseErrorKind};

#[derive(Debug, Clone, PartialEq)]
pub enum ParseWarning {
    DroppedEdge { line: usize, head: String, tail: String, reactance: f64 },
}

impl std::fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParseWarning::DroppedEdge { line, head, tail, reactance } => write!(
                f,
                "line {line}: edge {head} -> {tail} dropped (non-negative reactance x={reactance})"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedNetwork {
    pub network: Network,
    pub warnings: Vec<ParseWarning>,
}

enum Weight {
    Susceptance(f64),
    Reactance(f64),
}

struct EdgeDecl<'a> {
    line: usize,
    head: &'a str,
    tail: &'a str,
    weight: Weight,
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError { line, kind: ParseErrorKind::Syntax(msg.into()) }
}

pub fn parse_network(text: &str) -> Result<ParsedNetwork, ParseError> {
    let mut name: Option<String> = None;
    let mut vertices = Vec::new();
    let mut edges = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut toks = trimmed.split_whitespace();
        match toks.next() {
            Some("net") => {
                if name.is_some() {
                    return Err(syntax(line, "duplicate `net` declaration"));
                }
                let rest = trimmed["net".len()..].trim();
                if rest.is_empty() {
                    return Err(syntax(line, "`net` needs a name"));
                }
                name = Some(rest.to_owned());
            }
            Some("vertex") => {
                let label = toks.next().ok_or_else(|| syntax(line, "`vertex` needs a label"))?;
                let kind = match toks.next() {
                    Some("source") => RoleKind::Source,
                    Some("sink") => RoleKind::Sink,
                    Some("interior") => RoleKind::Interior,
                    Some(other) => return Err(syntax(line, format!("unknown vertex kind {other:?}"))),
                    None => return Err(syntax(line, "`vertex` needs a kind")),
                };
                let (mut gen, mut load) = (false, false);
                for tok in toks {
                    match tok {
                        "gen" if !gen => gen = true,
                        "load" if !load => load = true,
                        other => return Err(syntax(line, format!("unexpected token {other:?}"))),
                    }
                }
                let attachment = match (gen, load) {
                    (true, true) => Some(Attachment::Both),
                    (true, false) => Some(Attachment::Generator),
                    (false, true) => Some(Attachment::Loading),
                    (false, false) => None,
                };
                vertices.push((line, label, VertexRole::new(kind, attachment)));
            }
            Some("edge") => {
                let (Some(head), Some(tail), Some(w)) = (toks.next(), toks.next(), toks.next()) else {
                    return Err(syntax(line, "`edge` needs head, tail and b=/x="));
                };
                if let Some(extra) = toks.next() {
                    return Err(syntax(line, format!("unexpected token {extra:?}")));
                }
                let weight = match w.split_once('=') {
                    Some(("b", v)) => Weight::Susceptance(parse_float(line, v)?),
                    Some(("x", v)) => Weight::Reactance(parse_float(line, v)?),
                    _ => return Err(syntax(line, format!("expected b=<float> or x=<float>, got {w:?}"))),
                };
                edges.push(EdgeDecl { line, head, tail, weight });
            }
            Some(other) => return Err(syntax(line, format!("unknown declaration {other:?}"))),
            None => unreachable!("blank lines skipped"),
        }
    }

    let mut builder = NetworkBuilder::new(name.unwrap_or_else(|| "network".to_owned()));
    for (line, label, role) in vertices {
        builder
            .add_vertex(label, role)
            .map_err(|e| ParseError { line, kind: e.into() })?;
    }
    let mut warnings = Vec::new();
    for decl in edges {
        let b = match decl.weight {
            Weight::Susceptance(b) => Some(b),
            Weight::Reactance(x) if x < 0.0 => Some(-1.0 / x),
            Weight::Reactance(x) => {
                // endpoints are still checked so typos do not hide behind the drop
                check_endpoints(&builder, &decl)?;
                warnings.push(ParseWarning::DroppedEdge {
                    line: decl.line,
                    head: decl.head.to_owned(),
                    tail: decl.tail.to_owned(),
                    reactance: x,
                });
                None
            }
        };
        if let Some(b) = b {
            let b = Susceptance::new(b).map_err(|e| ParseError { line: decl.line, kind: e.into() })?;
            builder
                .add_edge(decl.head, decl.tail, b)
                .map_err(|e| ParseError { line: decl.line, kind: e.into() })?;
        }
    }
    Ok(ParsedNetwork { network: builder.build(), warnings })
}

fn check_endpoints(builder: &NetworkBuilder, decl: &EdgeDecl<'_>) -> Result<(), ParseError> {
    let err = |e: crate::error::NetworkError| ParseError { line: decl.line, kind: e.into() };
    builder.lookup(decl.head).map_err(err)?;
    builder.lookup(decl.tail).map_err(err)?;
    if decl.head == decl.tail {
        return Err(err(crate::error::NetworkError::SelfLoop(decl.head.to_owned())));
    }
    Ok(())
}

fn parse_float(line: usize, v: &str) -> Result<f64, ParseError> {
    let x: f64 = v.parse().map_err(|_| syntax(line, format!("invalid number {v:?}")))?;
    if !x.is_finite() {
        return Err(syntax(line, format!("non-finite number {v:?}")));
    }
    Ok(x)
}

/// Writes `net` in `.dgnet` form. Weights use the shortest representation
/// that parses back to the same `f64`.
pub fn serialize_network(net: &Network) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "net {}", net.name());
    for v in net.vertices() {
        out.push_str("vertex ");
        out.push_str(&v.label);
        out.push(' ');
        out.push_str(v.role.kind.as_str());
        match v.role.attachment {
            Some(Attachment::Generator) => out.push_str(" gen"),
            Some(Attachment::Loading) => out.push_str(" load"),
            Some(Attachment::Both) => out.push_str(" gen load"),
            None => {}
        }
        out.push('\n');
    }
    for e in net.edges() {
        let _ = writeln!(out, "edge {} {} b={}", net.label(e.head), net.label(e.tail), e.susceptance.get());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::NetworkError;
    use crate::netmodel::VertexId;

    #[test]
    fn minimal_network() {
        let p = parse_network("vertex 1 interior\nvertex 2 sink\nedge 1 2 b=1.0").unwrap();
        assert_eq!(p.network.vertex_count(), 2);
        assert_eq!(p.network.edge_count(), 1);
        assert!(p.warnings.is_empty());
    }

    #[test]
    fn negative_reactance_becomes_susceptance() {
        let p = parse_network("vertex 1 interior\nvertex 2 sink\nedge 1 2 x=-0.5").unwrap();
        assert_eq!(p.network.edges()[0].susceptance.get(), 2.0);
    }

    #[test]
    fn non_negative_reactance_drops_the_edge() {
        let p = parse_network("vertex 1 interior\nvertex 2 sink\nedge 1 2 x=0.4").unwrap();
        assert_eq!(p.network.edge_count(), 0);
        assert_eq!(
            p.warnings,
            vec![ParseWarning::DroppedEdge { line: 3, head: "1".into(), tail: "2".into(), reactance: 0.4 }]
        );
    }

    #[test]
    fn declarations_in_any_order() {
        let p = parse_network("edge a b b=3\n# c\nvertex b sink load\nnet demo net\nvertex a source gen")
            .unwrap();
        let n = p.network;
        assert_eq!(n.name(), "demo net");
        assert_eq!(n.label(VertexId(0)), "b");
        assert_eq!(n.role(VertexId(0)).attachment, Some(Attachment::Loading));
        assert_eq!(n.edges()[0].head, VertexId(1));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases: &[(&str, usize)] = &[
            ("vertex 1 interior\nvertex 1 sink", 2),
            ("vertex 1 interior\n\nedge 1 1 b=1", 3),
            ("vertex 1 interior\nedge 1 9 b=1", 2),
            ("vertex 1 interior\nvertex 2 interior\nedge 1 2 b=1\nedge 1 2 b=2", 4),
            ("vertex 1 junction", 1),
            ("vertex 1 interior\nvertex 2 interior\nedge 1 2 w=1", 3),
            ("vertex 1 interior\nvertex 2 interior\nedge 1 2 b=-1", 3),
            ("vertex 1 interior\nvertex 2 interior\nedge 1 2 b=abc", 3),
            ("bus 1", 1),
            ("vertex 1 interior\nedge 1 7 x=0.3", 2),
        ];
        for (text, line) in cases {
            let err = parse_network(text).unwrap_err();
            assert_eq!(err.line, *line, "{text:?}: {err}");
        }
        let err = parse_network("vertex 1 interior\nvertex 2 interior\nedge 1 2 b=1\nedge 1 2 b=2").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Network(NetworkError::DuplicateEdge { .. })));
    }

    #[test]
    fn serialize_isolated_pair() {
        let p = parse_network("net pair\nvertex u interior\nvertex v interior").unwrap();
        let text = serialize_network(&p.network);
        assert_eq!(text.lines().filter(|l| l.starts_with("vertex")).count(), 2);
        assert_eq!(text.lines().filter(|l| l.starts_with("edge")).count(), 0);
        assert_eq!(parse_network(&text).unwrap().network, p.network);
    }

    #[test]
    fn serialization_preserves_awkward_weights() {
        let p = parse_network("vertex 1 interior\nvertex 2 interior\nedge 1 2 x=-0.3\nedge 2 1 b=0.1").unwrap();
        let back = parse_network(&serialize_network(&p.network)).unwrap().network;
        assert_eq!(back, p.network);
    }
}
