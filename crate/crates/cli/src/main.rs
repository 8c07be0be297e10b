use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use dckron_core::connectivity::{
    choose_retained, classify_vertices, connectivity_class, is_reachable_subset, resolve_labels, RetainRequest,
    VertexPartition,
};
use dckron_core::graph_algebra::{laplacian_report, weighted_laplacian, DEFAULT_TOL};
use dckron_core::linalg::Lu;
use dckron_core::matrix::{format_sig, LabeledMatrix, OUTPUT_DIGITS};
use dckron_core::netmodel::{builtin_text, parse_network, serialize_network, validate_network, BUILTIN_CASES};
use dckron_core::powerflow::{build_angle_profile, evaluate_flow, reduced_flow, LabeledVector};
use dckron_core::reduction::{kron_reduce, restore_graph, ReduceOptions};
use dckron_core::{FlowError, MatrixError, Network, ReductionError};

const EXIT_USAGE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_VALIDATION: u8 = 3;
const EXIT_NONEXISTENCE: u8 = 4;

#[derive(Parser)]
#[command(name = "dckron", version, about = "Kron reduction of directed DC power-flow networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify vertices, check the Laplacian and report reduction existence.
    Analyze {
        input: PathBuf,
        #[command(flatten)]
        elim: Elimination,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Kron-reduce a network; writes l_red.txt, l_ac.txt, reduced.dgnet and summary.txt.
    Reduce {
        input: PathBuf,
        #[command(flatten)]
        elim: Elimination,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Evaluate vertex power extractions from an angle file.
    Flow {
        input: PathBuf,
        /// `<vertex> <shift>` lines; angles are alpha + shift.
        #[arg(long)]
        theta: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        alpha: f64,
        /// Evaluate on the reduced network given by the elimination flags.
        #[arg(long)]
        reduced: bool,
        #[command(flatten)]
        elim: Elimination,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rebuild a network from a Laplacian matrix file.
    Restore {
        matrix: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a network as a Graphviz digraph, its Laplacian, or normalised .dgnet.
    Export {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Graph)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a bundled test case; lists the cases when no name is given.
    Builtin {
        name: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Default)]
#[group(multiple = false)]
struct Elimination {
    /// Comma-separated vertices to eliminate.
    #[arg(long, value_delimiter = ',')]
    eliminate: Option<Vec<String>>,
    /// Comma-separated vertices to keep; all others are eliminated.
    #[arg(long, value_delimiter = ',')]
    retain: Option<Vec<String>>,
    /// Eliminate every interior vertex.
    #[arg(long)]
    all_interior: bool,
    /// Keep boundary vertices and their neighbours.
    #[arg(long)]
    stage1: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Matrix,
    Dgnet,
    Graph,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    error: anyhow::Error,
}

type Outcome<T = ()> = Result<T, Failure>;

fn fail(code: u8) -> impl FnOnce(anyhow::Error) -> Failure {
    move |error| Failure { code, error }
}

fn io<T>(r: std::io::Result<T>, what: &Path) -> Outcome<T> {
    r.with_context(|| format!("{}", what.display())).map_err(fail(EXIT_USAGE))
}

fn reduction_code(e: &ReductionError) -> u8 {
    match e {
        ReductionError::NotReducible { .. } | ReductionError::SingularBlock { .. } | ReductionError::ZeroPivot { .. } => {
            EXIT_NONEXISTENCE
        }
        ReductionError::Matrix(MatrixError::Parse { .. }) => EXIT_PARSE,
        _ => EXIT_VALIDATION,
    }
}

fn flow_code(e: &FlowError) -> u8 {
    match e {
        FlowError::Parse { .. } => EXIT_PARSE,
        _ => EXIT_VALIDATION,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Analyze { input, elim, tol } => analyze(&input, &elim, tol),
        Command::Reduce { input, elim, tol, out } => reduce(&input, &elim, tol, &out),
        Command::Flow { input, theta, alpha, reduced, elim, tol, out } => {
            flow(&input, &theta, alpha, reduced, &elim, tol, out.as_deref())
        }
        Command::Restore { matrix, tol, out } => restore(&matrix, tol, out.as_deref()),
        Command::Export { input, format, out } => export(&input, format, out.as_deref()),
        Command::Builtin { name, out } => builtin(name.as_deref(), out.as_deref()),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Outcome {
    match out {
        Some(path) => io(fs::write(path, text), path),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Reads and validates a network; parse warnings go to stderr.
fn load(path: &Path) -> Outcome<Network> {
    let text = io(fs::read_to_string(path), path)?;
    let parsed = parse_network(&text)
        .with_context(|| format!("{}", path.display()))
        .map_err(fail(EXIT_PARSE))?;
    for w in &parsed.warnings {
        eprintln!("warning: {w}");
    }
    let report = validate_network(&parsed.network);
    for v in report.violations.iter().filter(|v| !v.is_fatal()) {
        eprintln!("warning: {v}");
    }
    if !report.is_valid() {
        let msgs: Vec<String> = report.violations.iter().filter(|v| v.is_fatal()).map(|v| v.to_string()).collect();
        return Err(fail(EXIT_VALIDATION)(anyhow!("invalid network: {}", msgs.join("; "))));
    }
    Ok(parsed.network)
}

impl Elimination {
    fn request(&self, net: &Network) -> Outcome<Option<RetainRequest>> {
        let ids = |labels: &[String]| resolve_labels(net, labels).map_err(|e| fail(EXIT_VALIDATION)(e.into()));
        Ok(Some(if let Some(e) = &self.eliminate {
            RetainRequest::EliminateSet(ids(e)?)
        } else if let Some(r) = &self.retain {
            RetainRequest::RetainSet(ids(r)?)
        } else if self.all_interior {
            RetainRequest::AllInterior
        } else if self.stage1 {
            RetainRequest::BoundaryPlusNeighbors
        } else {
            return Ok(None);
        }))
    }

    fn partition(&self, net: &Network) -> Outcome<VertexPartition> {
        let request = self.request(net)?.ok_or_else(|| {
            fail(EXIT_USAGE)(anyhow!("one of --eliminate, --retain, --all-interior or --stage1 is required"))
        })?;
        choose_retained(net, &classify_vertices(net), &request).map_err(|e| fail(EXIT_VALIDATION)(e.into()))
    }
}

fn labels_of(net: &Network, ids: &[dckron_core::VertexId]) -> String {
    ids.iter().map(|&v| net.label(v)).collect::<Vec<_>>().join(" ")
}

fn analyze(input: &Path, elim: &Elimination, tol: f64) -> Outcome {
    let net = load(input)?;
    let part = classify_vertices(&net);
    let l = weighted_laplacian(&net);
    let report = laplacian_report(&l, tol).map_err(|e| fail(EXIT_VALIDATION)(e.into()))?;

    let mut out = String::new();
    let _ = writeln!(out, "network {}", net.name());
    let _ = writeln!(out, "vertices {} edges {}", net.vertex_count(), net.edge_count());
    let _ = writeln!(out, "boundary: {}", labels_of(&net, &part.boundary));
    let _ = writeln!(out, "interior: {}", labels_of(&net, &part.interior));
    let _ = writeln!(out, "connectivity: {}", connectivity_class(&net).describe(&net));
    let _ = writeln!(out, "laplacian:");
    out.push_str(&l.to_text());
    let _ = writeln!(out, "zero row sums: {} (max |row sum| {})", report.zero_row_sums, format_sig(report.max_row_sum, 3));
    let _ = writeln!(out, "sign pattern: {}", report.sign_pattern_ok);
    let _ = writeln!(out, "eigenvalue real parts nonnegative: {}", report.nonneg_real_parts);
    let eigs: Vec<String> = report
        .eigenvalues
        .iter()
        .map(|z| {
            if z.im.abs() <= tol {
                format_sig(z.re, OUTPUT_DIGITS)
            } else {
                format!("{}{:+}i", format_sig(z.re, OUTPUT_DIGITS), format_sig(z.im, OUTPUT_DIGITS))
            }
        })
        .collect();
    let _ = writeln!(out, "eigenvalues: {}", eigs.join(" "));
    let _ = writeln!(out, "zero-diagonal vertices: {}", report.zero_diag_vertices.join(" "));

    let request = elim.request(&net)?.unwrap_or(RetainRequest::AllInterior);
    match choose_retained(&net, &part, &request) {
        Ok(sel) => {
            let retained = sel.retained().expect("selection made");
            let eliminated = sel.eliminated().expect("selection made");
            // nothing to eliminate is vacuously reachable
            let reachable = eliminated.is_empty() || is_reachable_subset(&net, retained).unwrap_or(false);
            let lu = if eliminated.is_empty() {
                "trivial"
            } else {
                let idx: Vec<usize> = eliminated.iter().map(|v| v.0).collect();
                match Lu::factor(idx.len(), l.select(&idx, &idx).data().to_vec()) {
                    Ok(_) => "nonsingular",
                    Err(_) => "singular",
                }
            };
            let _ = writeln!(out, "eliminate: {}", labels_of(&net, eliminated));
            let _ = writeln!(out, "reachable subset: {}", if reachable { "yes" } else { "no" });
            let _ = writeln!(out, "eliminated block: {lu}");
        }
        Err(e) => {
            let _ = writeln!(out, "elimination request rejected: {e}");
        }
    }
    print!("{out}");
    if report.is_laplacian() {
        Ok(())
    } else {
        Err(fail(EXIT_VALIDATION)(anyhow!("Laplacian checks failed")))
    }
}

fn reduce(input: &Path, elim: &Elimination, tol: f64, out: &Path) -> Outcome {
    let net = load(input)?;
    let part = elim.partition(&net)?;
    let opts = ReduceOptions { tol, ..Default::default() };
    let result = kron_reduce(&net, &part, opts).map_err(|e| fail(reduction_code(&e))(e.into()))?;
    io(fs::create_dir_all(out), out)?;
    let files = [
        ("l_red.txt", result.reduced.to_text()),
        ("l_ac.txt", result.accompanying.to_text()),
        ("reduced.dgnet", serialize_network(&result.reduced_net)),
        ("summary.txt", result.summary(&net)),
    ];
    for (name, text) in files {
        let path = out.join(name);
        io(fs::write(&path, text), &path)?;
    }
    print!("{}", result.summary(&net));
    Ok(())
}

fn flow(
    input: &Path,
    theta: &Path,
    alpha: f64,
    reduced: bool,
    elim: &Elimination,
    tol: f64,
    out: Option<&Path>,
) -> Outcome {
    let net = load(input)?;
    let text = io(fs::read_to_string(theta), theta)?;
    let shifts = LabeledVector::parse(&text)
        .with_context(|| format!("{}", theta.display()))
        .map_err(fail(EXIT_PARSE))?;
    let built = build_angle_profile(&net, &shifts, alpha).map_err(|e| fail(flow_code(&e))(e.into()))?;
    for w in &built.warnings {
        eprintln!("warning: {w}");
    }
    let state = evaluate_flow(&net, &built.profile).map_err(|e| fail(flow_code(&e))(e.into()))?;
    if !reduced {
        return emit(&state.p_v.to_text(), out);
    }
    let part = elim.partition(&net)?;
    let opts = ReduceOptions { tol, ..Default::default() };
    let result = kron_reduce(&net, &part, opts).map_err(|e| fail(reduction_code(&e))(e.into()))?;
    let red = reduced_flow(&result, &built.profile, &state.p_v, Some(&state))
        .map_err(|e| fail(flow_code(&e))(e.into()))?;
    let residual = red.residual.expect("full state supplied");
    let mut text = format!("# residual {}\n", format_sig(residual, 3));
    text.push_str(&red.p_red.to_text());
    emit(&text, out)
}

fn restore(matrix: &Path, tol: f64, out: Option<&Path>) -> Outcome {
    let text = io(fs::read_to_string(matrix), matrix)?;
    let l = LabeledMatrix::parse_text(&text)
        .with_context(|| format!("{}", matrix.display()))
        .map_err(fail(EXIT_PARSE))?;
    let net = restore_graph(&l, tol).map_err(|e| fail(reduction_code(&e))(e.into()))?;
    let back = weighted_laplacian(&net);
    let diff = back.max_abs_diff(&l).unwrap_or(f64::INFINITY);
    if diff > tol {
        return Err(fail(EXIT_VALIDATION)(anyhow!("restored Laplacian differs from input by {diff:e}")));
    }
    emit(&serialize_network(&net), out)
}

fn export(input: &Path, format: Format, out: Option<&Path>) -> Outcome {
    let net = load(input)?;
    let text = match format {
        Format::Matrix => weighted_laplacian(&net).to_text(),
        Format::Dgnet => serialize_network(&net),
        Format::Graph => to_dot(&net),
    };
    emit(&text, out)
}

/// Graphviz digraph; boundary vertices drawn in red.
fn to_dot(net: &Network) -> String {
    let part = classify_vertices(net);
    let mut s = format!("digraph {:?} {{\n", net.name());
    for v in net.ids() {
        let style = if part.is_boundary(v) { ", color=red, fontcolor=red" } else { "" };
        let _ = writeln!(s, "  {:?} [shape=circle{style}];", net.label(v));
    }
    for e in net.edges() {
        let _ = writeln!(
            s,
            "  {:?} -> {:?} [label={:?}];",
            net.label(e.head),
            net.label(e.tail),
            format_sig(e.susceptance.get(), OUTPUT_DIGITS)
        );
    }
    s.push_str("}\n");
    s
}

fn builtin(name: Option<&str>, out: Option<&Path>) -> Outcome {
    let Some(name) = name else {
        return emit(&BUILTIN_CASES.map(|c| format!("{c}\n")).concat(), out);
    };
    let text = builtin_text(name).ok_or_else(|| {
        fail(EXIT_USAGE)(anyhow!("unknown builtin {name:?}; available: {}", BUILTIN_CASES.join(", ")))
    })?;
    emit(text, out)
}
