//! DC power flow on original and reduced networks: `φ = Hᵀθ`,
//! `P_edge = −B·φ`, `P_v = −H_o·P_edge = L·θ`.
//!
//! Angles are carried as a reference plus per-vertex shifts. Every quantity
//! that depends only on angle differences is computed from the shifts, so
//! results are bit-for-bit independent of the reference.

use std::collections::HashMap;
use std::fmt;

use crate::error::{FlowError, OrientError, UnorientableLine};
use crate::matrix::{format_sig, LabeledMatrix, OUTPUT_DIGITS};
use crate::netmodel::{Network, NetworkBuilder, RoleKind, Susceptance, VertexRole};
use crate::reduction::ReductionResult;

/// Largest admissible phase shift magnitude in a built profile.
pub const MAX_SHIFT: f64 = 0.6;

/// Per-vertex real values (angles or power extractions) keyed by label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledVector {
    labels: Vec<String>,
    values: Vec<f64>,
}

impl LabeledVector {
    pub fn new(labels: Vec<String>, values: Vec<f64>) -> Result<Self, FlowError> {
        if labels.len() != values.len() {
            return Err(FlowError::Dimension(format!("{} labels, {} values", labels.len(), values.len())));
        }
        Ok(Self { labels, values })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.labels.iter().position(|l| l == label).map(|i| self.values[i])
    }

    /// Values reordered to `labels`; the first absent label is an error.
    pub fn gather<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<f64>, FlowError> {
        let index: HashMap<&str, usize> = self.labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        labels
            .iter()
            .map(|l| {
                index
                    .get(l.as_ref())
                    .map(|&i| self.values[i])
                    .ok_or_else(|| FlowError::MissingValue(l.as_ref().to_owned()))
            })
            .collect()
    }

    /// Parses `<label> <value>` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, FlowError> {
        let mut labels = Vec::new();
        let mut values = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| FlowError::Parse { line: no + 1, msg };
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let [label, value] = tokens[..] else {
                return Err(err(format!("expected `<label> <value>`, got {line:?}")));
            };
            let v: f64 = value.parse().map_err(|_| err(format!("invalid number {value:?}")))?;
            if !v.is_finite() {
                return Err(err(format!("non-finite value {value:?}")));
            }
            if labels.iter().any(|l| l == label) {
                return Err(err(format!("duplicate vertex {label:?}")));
            }
            labels.push(label.to_owned());
            values.push(v);
        }
        Ok(Self { labels, values })
    }

    pub fn to_text(&self) -> String {
        self.labels
            .iter()
            .zip(&self.values)
            .map(|(l, v)| format!("{l} {}\n", format_sig(*v, OUTPUT_DIGITS)))
            .collect()
    }
}

/// `θ_i = reference + shift_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleProfile {
    labels: Vec<String>,
    shifts: Vec<f64>,
    reference: f64,
}

impl AngleProfile {
    pub fn new(labels: Vec<String>, shifts: Vec<f64>, reference: f64) -> Result<Self, FlowError> {
        if labels.len() != shifts.len() {
            return Err(FlowError::Dimension(format!("{} labels, {} shifts", labels.len(), shifts.len())));
        }
        Ok(Self { labels, shifts, reference })
    }

    /// Absolute angles taken as shifts over a zero reference.
    pub fn from_angles(v: &LabeledVector) -> Self {
        Self { labels: v.labels.clone(), shifts: v.values.clone(), reference: 0.0 }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn shifts(&self) -> &[f64] {
        &self.shifts
    }

    pub fn reference(&self) -> f64 {
        self.reference
    }

    pub fn theta(&self) -> Vec<f64> {
        self.shifts.iter().map(|s| self.reference + s).collect()
    }

    pub fn with_reference(&self, reference: f64) -> Self {
        Self { reference, ..self.clone() }
    }

    /// Profile restricted and reordered to `labels`.
    pub fn select<S: AsRef<str>>(&self, labels: &[S]) -> Result<Self, FlowError> {
        let shifts = self.shift_vector().gather(labels)?;
        Ok(Self { labels: labels.iter().map(|l| l.as_ref().to_owned()).collect(), shifts, reference: self.reference })
    }

    fn shift_vector(&self) -> LabeledVector {
        LabeledVector { labels: self.labels.clone(), values: self.shifts.clone() }
    }

    /// `θ_i` as `alpha + shift`, the way angles are tabulated.
    pub fn symbolic(&self, i: usize) -> String {
        let s = self.shifts[i];
        let mag = format_sig(s.abs(), OUTPUT_DIGITS);
        if s < 0.0 {
            format!("alpha - {mag}")
        } else {
            format!("alpha + {mag}")
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    /// Profile in network vertex order.
    pub theta: AngleProfile,
    pub phi: Vec<f64>,
    pub p_edge: Vec<f64>,
    pub p_v: LabeledVector,
}

/// Evaluates the flow chain on `net`. Profile entries for vertices not in
/// `net` are ignored.
pub fn evaluate_flow(net: &Network, theta: &AngleProfile) -> Result<FlowState, FlowError> {
    let theta = theta.select(&net.labels())?;
    let s = theta.shifts();
    let phi: Vec<f64> = net.edges().iter().map(|e| s[e.head.0] - s[e.tail.0]).collect();
    let p_edge: Vec<f64> = net.edges().iter().zip(&phi).map(|(e, f)| -e.susceptance.get() * f).collect();
    let mut p_v = vec![0.0; net.vertex_count()];
    for (e, pe) in net.edges().iter().zip(&p_edge) {
        p_v[e.head.0] -= pe;
    }
    Ok(FlowState { theta, phi, p_edge, p_v: LabeledVector { labels: net.labels(), values: p_v } })
}

/// `L·θ` for a square Laplacian labelled by vertex, using the profile shifts.
pub fn laplacian_injection(l: &LabeledMatrix, theta: &AngleProfile) -> Result<LabeledVector, FlowError> {
    if !l.is_square() {
        return Err(FlowError::Dimension(format!("{}x{} matrix", l.nrows(), l.ncols())));
    }
    let s = theta.select(l.col_labels())?;
    let values = l.mat_vec(s.shifts()).map_err(|e| FlowError::Dimension(e.to_string()))?;
    Ok(LabeledVector { labels: l.row_labels().to_vec(), values })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedFlow {
    /// `P_vred = L_red·θ_α`.
    pub p_red: LabeledVector,
    /// `L_ac·P_vα^c`: eliminated extractions moved onto retained vertices.
    pub transferred: LabeledVector,
    /// `‖P_vα + L_ac·P_vα^c − L_red·θ_α‖∞` against a full-network state.
    pub residual: Option<f64>,
}

pub fn reduced_flow(
    result: &ReductionResult,
    theta_alpha: &AngleProfile,
    p_v_eliminated: &LabeledVector,
    full: Option<&FlowState>,
) -> Result<ReducedFlow, FlowError> {
    let p_red = laplacian_injection(&result.reduced, theta_alpha)?;
    let p_elim = p_v_eliminated.gather(&result.eliminated)?;
    let transferred = result.accompanying.mat_vec(&p_elim).map_err(|e| FlowError::Dimension(e.to_string()))?;
    let residual = match full {
        None => None,
        Some(state) => {
            let p_alpha = state.p_v.gather(&result.retained)?;
            let p_ac = state.p_v.gather(&result.eliminated)?;
            let moved = result.accompanying.mat_vec(&p_ac).map_err(|e| FlowError::Dimension(e.to_string()))?;
            let full_red = laplacian_injection(&result.reduced, &state.theta)?;
            Some(
                (0..p_alpha.len())
                    .map(|i| (p_alpha[i] + moved[i] - full_red.values[i]).abs())
                    .fold(0.0, f64::max),
            )
        }
    };
    Ok(ReducedFlow {
        p_red,
        transferred: LabeledVector { labels: result.retained.clone(), values: transferred },
        residual,
    })
}

/// A directed edge whose angle difference is negative: power would flow
/// against the edge direction.
#[derive(Debug, Clone, PartialEq)]
pub struct BackwardFlow {
    pub head: String,
    pub tail: String,
    pub phi: f64,
}

impl fmt::Display for BackwardFlow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "edge {} -> {} carries power backwards (phi = {})", self.head, self.tail, format_sig(self.phi, 6))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuiltProfile {
    pub profile: AngleProfile,
    pub warnings: Vec<BackwardFlow>,
}

/// Builds `θ = alpha + shifts` over the vertices of `net`, rejecting shifts
/// outside `[−0.6, 0.6]`.
pub fn build_angle_profile(net: &Network, shifts: &LabeledVector, alpha: f64) -> Result<BuiltProfile, FlowError> {
    let labels = net.labels();
    let s = shifts.gather(&labels)?;
    if let Some(i) = s.iter().position(|v| v.abs() > MAX_SHIFT) {
        return Err(FlowError::ShiftOutOfRange { label: labels[i].clone(), shift: s[i] });
    }
    let warnings = net
        .edges()
        .iter()
        .filter_map(|e| {
            let phi = s[e.head.0] - s[e.tail.0];
            (phi < 0.0).then(|| BackwardFlow {
                head: net.label(e.head).to_owned(),
                tail: net.label(e.tail).to_owned(),
                phi,
            })
        })
        .collect();
    Ok(BuiltProfile { profile: AngleProfile { labels, shifts: s, reference: alpha }, warnings })
}

/// An undirected line between two buses.
#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    pub a: String,
    pub b: String,
    pub susceptance: Susceptance,
}

/// Buses with roles and undirected lines, before orientation.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct UndirectedNetwork {
    pub name: String,
    pub buses: Vec<(String, VertexRole)>,
    pub lines: Vec<Line>,
}

impl UndirectedNetwork {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), ..Default::default() }
    }

    pub fn add_bus(&mut self, label: &str, role: VertexRole) -> &mut Self {
        self.buses.push((label.to_owned(), role));
        self
    }

    pub fn add_line(&mut self, a: &str, b: &str, susceptance: Susceptance) -> &mut Self {
        self.lines.push(Line { a: a.to_owned(), b: b.to_owned(), susceptance });
        self
    }
}

/// Directs every line: towards a sink, away from a source, and between two
/// interior buses towards the one adjacent to a sink. Lines that no rule
/// settles are all reported together.
pub fn orient_edges(buses: &UndirectedNetwork) -> Result<Network, OrientError> {
    let mut builder = NetworkBuilder::new(buses.name.clone());
    let mut kind = HashMap::new();
    for (label, role) in &buses.buses {
        builder.add_vertex(label, *role)?;
        kind.insert(label.as_str(), role.kind);
    }
    let kind_of = |l: &str| {
        kind.get(l).copied().ok_or_else(|| crate::error::NetworkError::UnknownVertex(l.to_owned()))
    };
    let mut sink_adjacent = HashMap::new();
    for line in &buses.lines {
        let (ka, kb) = (kind_of(&line.a)?, kind_of(&line.b)?);
        if kb == RoleKind::Sink {
            sink_adjacent.insert(line.a.as_str(), true);
        }
        if ka == RoleKind::Sink {
            sink_adjacent.insert(line.b.as_str(), true);
        }
    }
    let near_sink = |l: &str| sink_adjacent.get(l).copied().unwrap_or(false);

    let mut unorientable = Vec::new();
    for line in &buses.lines {
        use RoleKind::*;
        let (a, b) = (line.a.as_str(), line.b.as_str());
        let directed = match (kind_of(a)?, kind_of(b)?) {
            (Sink, Sink) => Err("both endpoints are sinks"),
            (Source, Source) => Err("both endpoints are sources"),
            (_, Sink) | (Source, _) => Ok((a, b)),
            (Sink, _) | (_, Source) => Ok((b, a)),
            (Interior, Interior) => match (near_sink(a), near_sink(b)) {
                (false, true) => Ok((a, b)),
                (true, false) => Ok((b, a)),
                (true, true) => Err("both endpoints are adjacent to a sink"),
                (false, false) => Err("neither endpoint is adjacent to a sink"),
            },
        };
        match directed {
            Ok((h, t)) => {
                builder.add_edge(h, t, line.susceptance)?;
            }
            Err(reason) => unorientable.push(UnorientableLine { a: a.to_owned(), b: b.to_owned(), reason }),
        }
    }
    if unorientable.is_empty() {
        Ok(builder.build())
    } else {
        Err(OrientError::UnorientableLines(unorientable))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::parse_network;

    fn single_edge() -> Network {
        parse_network("vertex 1 source gen\nvertex 2 sink load\nedge 1 2 b=2").unwrap().network
    }

    fn profile(pairs: &[(&str, f64)], reference: f64) -> AngleProfile {
        AngleProfile::new(
            pairs.iter().map(|p| p.0.to_owned()).collect(),
            pairs.iter().map(|p| p.1).collect(),
            reference,
        )
        .unwrap()
    }

    #[test]
    fn single_edge_chain() {
        let state = evaluate_flow(&single_edge(), &profile(&[("1", 0.1), ("2", -0.1)], 0.3)).unwrap();
        assert!((state.phi[0] - 0.2).abs() < 1e-15);
        assert!((state.p_edge[0] + 0.4).abs() < 1e-15);
        assert!((state.p_v.values()[0] - 0.4).abs() < 1e-15);
        assert_eq!(state.p_v.values()[1], 0.0);
    }

    #[test]
    fn uniform_angles_give_zero_power() {
        let state = evaluate_flow(&single_edge(), &profile(&[("2", 0.0), ("1", 0.0)], 7.0)).unwrap();
        assert_eq!(state.p_v.values(), &[0.0, 0.0]);
        assert_eq!(state.theta.labels(), ["1", "2"]);
    }

    #[test]
    fn missing_angle_is_reported() {
        let err = evaluate_flow(&single_edge(), &profile(&[("1", 0.0)], 0.0)).unwrap_err();
        assert_eq!(err, FlowError::MissingValue("2".into()));
    }

    #[test]
    fn reference_does_not_change_the_flow() {
        let net = single_edge();
        let p = profile(&[("1", 0.25), ("2", -0.5)], 0.0);
        let base = evaluate_flow(&net, &p).unwrap();
        for c in [-5.0, 0.7, 100.0] {
            let moved = evaluate_flow(&net, &p.with_reference(c)).unwrap();
            assert_eq!(moved.p_v, base.p_v);
            assert_eq!(moved.phi, base.phi);
        }
    }

    #[test]
    fn vector_text_round_trip() {
        let v = LabeledVector::parse("# angles\n1 0.5\n\n2 -0.25 # trailing\n").unwrap();
        assert_eq!(v.labels(), ["1", "2"]);
        assert_eq!(LabeledVector::parse(&v.to_text()).unwrap(), v);
        assert!(matches!(LabeledVector::parse("1 0.5 3"), Err(FlowError::Parse { line: 1, .. })));
        assert!(matches!(LabeledVector::parse("1 x"), Err(FlowError::Parse { .. })));
        assert!(matches!(LabeledVector::parse("1 1\n1 2"), Err(FlowError::Parse { line: 2, .. })));
    }

    #[test]
    fn profile_builder_checks_range_and_direction() {
        let net = single_edge();
        let ok = build_angle_profile(&net, &LabeledVector::parse("1 0\n2 0").unwrap(), 0.0).unwrap();
        assert!(ok.warnings.is_empty());
        let back = build_angle_profile(&net, &LabeledVector::parse("1 -0.2\n2 0.3").unwrap(), 1.0).unwrap();
        assert_eq!(back.warnings.len(), 1);
        assert_eq!(back.profile.theta(), vec![0.8, 1.3]);
        let err = build_angle_profile(&net, &LabeledVector::parse("1 0.61\n2 0").unwrap(), 0.0).unwrap_err();
        assert_eq!(err, FlowError::ShiftOutOfRange { label: "1".into(), shift: 0.61 });
    }

    #[test]
    fn symbolic_angles() {
        let p = profile(&[("1", 0.5271), ("2", -0.4629)], 0.0);
        assert_eq!(p.symbolic(0), "alpha + 0.5271");
        assert_eq!(p.symbolic(1), "alpha - 0.4629");
    }

    fn one() -> Susceptance {
        Susceptance::new(1.0).unwrap()
    }

    #[test]
    fn orient_triangle() {
        let mut u = UndirectedNetwork::new("tri");
        u.add_bus("s", VertexRole::source())
            .add_bus("i", VertexRole::INTERIOR)
            .add_bus("t", VertexRole::sink())
            .add_line("i", "s", one())
            .add_line("t", "i", one())
            .add_line("t", "s", one());
        let net = orient_edges(&u).unwrap();
        let pairs: Vec<(&str, &str)> = net.edges().iter().map(|e| (net.label(e.head), net.label(e.tail))).collect();
        assert_eq!(pairs, [("s", "i"), ("i", "t"), ("s", "t")]);
    }

    #[test]
    fn orient_interior_pairs() {
        let mut u = UndirectedNetwork::new("chain");
        u.add_bus("s", VertexRole::source())
            .add_bus("a", VertexRole::INTERIOR)
            .add_bus("b", VertexRole::INTERIOR)
            .add_bus("t", VertexRole::sink())
            .add_line("s", "a", one())
            .add_line("b", "a", one())
            .add_line("b", "t", one());
        let net = orient_edges(&u).unwrap();
        let a = net.id_of("a").unwrap();
        let b = net.id_of("b").unwrap();
        assert!(net.edge_between(a, b).is_some());

        u.add_line("a", "t", one());
        match orient_edges(&u) {
            Err(OrientError::UnorientableLines(lines)) => {
                assert_eq!(lines.len(), 1);
                assert_eq!((lines[0].a.as_str(), lines[0].b.as_str()), ("b", "a"));
            }
            other => panic!("{other:?}"),
        }
    }
}
