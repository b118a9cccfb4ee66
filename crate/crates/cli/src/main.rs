//! Command-line front end: reads exchange matrices and unfolding
//! descriptions from JSON files, runs the library's enumerations and
//! searches, and emits deterministic JSON reports (or DOT renderings).
//!
//! Exit codes: 0 success, 2 invalid input, 3 inconclusive (a cap cut the
//! computation short), 4 internal invariant violation.

use clap::{Parser, Subcommand};
use cluster_kit::{
    cluster_automorphism_group, default_max_len, embed_automorphism, embedding_context,
    enumerate_ball, enumerate_labelled_ball, find_maximal_green_sequences, graph_automorphisms,
    induced_automorphism, initial_seed, validate_unfolding, AutGroup, ClusterAutomorphism,
    Direction, Error, ExchangeGraph, ExchangeMatrix, GraphJson, GroupTag, LabelledExchangeGraph,
    MarkedExchangeGraph, MutationClassGraphs, Result, Severity, Symmetrizer, UnfoldingJson,
    UnfoldingValidation,
};
use cluster_kit::matrix::MatrixJson;
use cluster_kit::seed::{LabelledClass, SeedClass};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "cluster-kit",
    version,
    about = "Exact mutation classes, exchange graphs, automorphisms, unfoldings and green sequences"
)]
struct Cli {
    /// Cap on explored states for enumerations and closure checks.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..), default_value_t = cluster_kit::DEFAULT_CAP as u64)]
    cap: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the minimal positive symmetrizer of an exchange matrix.
    Symmetrize {
        /// Matrix file: `{"n": 2, "B": [[0,1],[-2,0]]}` (optional `"D"`).
        file: PathBuf,
    },
    /// Build the exchange graph of a matrix's mutation class.
    Graph {
        /// Matrix file for the initial seed.
        file: PathBuf,
        /// Labelled exchange graph (one vertex per labelled seed).
        #[arg(long, conflicts_with = "marked")]
        labelled: bool,
        /// Marked exchange graph (edges carry symmetrizer entries).
        #[arg(long)]
        marked: bool,
        /// Emit DOT instead of JSON.
        #[arg(long, conflicts_with = "json")]
        dot: bool,
        /// Emit JSON (the default).
        #[arg(long)]
        json: bool,
        /// Error out when one cluster appears with two different matrices
        /// (affects unlabelled seed identification only).
        #[arg(long)]
        strict_seeds: bool,
        /// Only explore seeds within this many mutations of the start;
        /// the report then says whether the class continues beyond.
        #[arg(long, conflicts_with = "marked")]
        radius: Option<usize>,
    },
    /// Automorphism group of the exchange graph, classified seed-wise.
    Auts {
        /// Matrix file for the initial seed.
        file: PathBuf,
        /// Use the marked exchange graph (mark-preserving automorphisms
        /// only), and report the direct subgroup.
        #[arg(long)]
        marked: bool,
    },
    /// Validate a blockwise unfolding; optionally embed the base class's
    /// marked automorphisms into the unfolded exchange graph.
    Unfold {
        /// Unfolding file: `{"B": .., "blocks": [[1],[2,3]], "C": ..}`
        /// (1-based block indices).
        file: PathBuf,
        /// Also embed every mark-preserving base automorphism.
        #[arg(long)]
        embed: bool,
    },
    /// Find all maximal green sequences of a quiver.
    Green {
        /// Matrix file; must be skew-symmetric.
        file: PathBuf,
        /// Longest sequence to look for (default: twice the arrow count
        /// plus rank, reported as truncated if it bites).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_len: Option<u64>,
    },
}

#[derive(Serialize)]
struct Report<B: Serialize> {
    schema: u32,
    command: &'static str,
    input: serde_json::Value,
    #[serde(flatten)]
    body: B,
}

fn render<B: Serialize>(
    command: &'static str,
    input: serde_json::Value,
    body: B,
) -> Result<String> {
    let report = Report {
        schema: 1,
        command,
        input,
        body,
    };
    let text = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::Internal(format!("report serialization failed: {e}")))?;
    Ok(text + "\n")
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse {
        what: "input file",
        text: path.display().to_string(),
        reason: e.to_string(),
    })
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_file(path)?).map_err(|e| Error::Parse {
        what: "input file",
        text: path.display().to_string(),
        reason: e.to_string(),
    })
}

fn read_matrix(path: &Path) -> Result<(ExchangeMatrix, Option<Symmetrizer>)> {
    parse_json::<MatrixJson>(path)?.into_matrix()
}

/// Canonical echo of a matrix input, including a validated `D` override.
fn echo_matrix(matrix: &ExchangeMatrix, sym: &Option<Symmetrizer>) -> Result<serde_json::Value> {
    let mut json = MatrixJson::of(matrix);
    json.d = sym.as_ref().map(|s| s.entries().to_vec());
    serde_json::to_value(&json).map_err(|e| Error::Internal(e.to_string()))
}

#[derive(Serialize)]
struct SymmetrizeBody {
    #[serde(rename = "D")]
    d: Vec<i64>,
}

fn cmd_symmetrize(file: &Path) -> Result<(String, u8)> {
    let (matrix, sym) = read_matrix(file)?;
    let d = matrix.componentwise_symmetrizer()?.entries().to_vec();
    let out = render("symmetrize", echo_matrix(&matrix, &sym)?, SymmetrizeBody { d })?;
    Ok((out, 0))
}

#[derive(Serialize)]
struct GraphBody {
    kind: &'static str,
    vertex_count: usize,
    edge_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    radius: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    truncated: Option<bool>,
    #[serde(flatten)]
    graph: GraphJson,
}

fn labelled_ball_artifacts(class: &LabelledClass) -> (GraphJson, String) {
    let vertices: Vec<Vec<String>> = class.seeds.iter().map(|s| s.render_cluster("x")).collect();
    let edges = class
        .edges
        .iter()
        .map(|&(u, v, k)| cluster_kit::EdgeJson {
            u,
            v,
            label: Some(k + 1),
            mark: None,
        })
        .collect();
    let mut dot = String::from("graph labelled_ball {\n");
    for (i, vars) in vertices.iter().enumerate() {
        dot.push_str(&format!("  s{} [label=\"{}\"];\n", i + 1, vars.join(", ")));
    }
    for &(u, v, k) in &class.edges {
        dot.push_str(&format!("  s{} -- s{} [label=\"{}\"];\n", u + 1, v + 1, k + 1));
    }
    dot.push_str("}\n");
    (GraphJson { vertices, edges }, dot)
}

fn ball_artifacts(class: &SeedClass) -> (GraphJson, String) {
    let vertices: Vec<Vec<String>> = class.seeds.iter().map(|s| s.render_cluster("x")).collect();
    let edges = class
        .edges
        .iter()
        .map(|&(u, v)| cluster_kit::EdgeJson {
            u,
            v,
            label: None,
            mark: None,
        })
        .collect();
    let mut dot = String::from("graph exchange_ball {\n");
    for (i, vars) in vertices.iter().enumerate() {
        dot.push_str(&format!("  s{} [label=\"{}\"];\n", i + 1, vars.join(", ")));
    }
    for &(u, v) in &class.edges {
        dot.push_str(&format!("  s{} -- s{};\n", u + 1, v + 1));
    }
    dot.push_str("}\n");
    (GraphJson { vertices, edges }, dot)
}

#[allow(clippy::too_many_arguments)]
fn cmd_graph(
    file: &Path,
    labelled: bool,
    marked: bool,
    dot: bool,
    strict: bool,
    radius: Option<usize>,
    cap: usize,
) -> Result<(String, u8)> {
    let (matrix, sym) = read_matrix(file)?;
    let seed = initial_seed(&matrix)?;
    let input = echo_matrix(&matrix, &sym)?;

    let (kind, graph_json, dot_text, truncated) = if let Some(radius) = radius {
        if labelled {
            let (class, truncated) = enumerate_labelled_ball(&seed, radius, cap)?;
            let (json, dot) = labelled_ball_artifacts(&class);
            ("labelled-ball", json, dot, Some(truncated))
        } else {
            let (class, truncated) = enumerate_ball(&seed, radius, cap, strict)?;
            let (json, dot) = ball_artifacts(&class);
            ("exchange-ball", json, dot, Some(truncated))
        }
    } else if labelled {
        let graph = LabelledExchangeGraph::build(&seed, cap)?;
        ("labelled", graph.to_json(), graph.to_dot(true), None)
    } else if marked {
        let graph = MarkedExchangeGraph::build_checked(&seed, cap, strict)?;
        ("marked", graph.to_json(), graph.to_dot(true), None)
    } else {
        let graph = ExchangeGraph::build_checked(&seed, cap, strict)?;
        ("exchange", graph.to_json(), graph.to_dot(true), None)
    };

    if dot {
        return Ok((dot_text, 0));
    }
    let body = GraphBody {
        kind,
        vertex_count: graph_json.vertices.len(),
        edge_count: graph_json.edges.len(),
        radius,
        truncated,
        graph: graph_json,
    };
    Ok((render("graph", input, body)?, 0))
}

#[derive(Serialize)]
struct AutElementBody {
    perm: String,
    direction: Direction,
    realization: Vec<String>,
    image_matrix: Vec<Vec<i64>>,
}

#[derive(Serialize)]
struct PlusBody {
    order: usize,
    tag: GroupTag,
    index: usize,
    minus_b_in_class: bool,
}

#[derive(Serialize)]
struct AutsBody {
    marked: bool,
    order: usize,
    tag: GroupTag,
    generators: Vec<String>,
    elements: Vec<AutElementBody>,
    #[serde(skip_serializing_if = "Option::is_none")]
    plus: Option<PlusBody>,
}

fn aut_elements(aut: &AutGroup, classified: &[ClusterAutomorphism]) -> Vec<AutElementBody> {
    aut.elements
        .iter()
        .zip(classified)
        .map(|(phi, c)| AutElementBody {
            perm: phi.to_string(),
            direction: c.direction,
            realization: c.realization.iter().map(|p| p.render("x")).collect(),
            image_matrix: c.image_matrix.rows(),
        })
        .collect()
}

fn cmd_auts(file: &Path, marked: bool, cap: usize) -> Result<(String, u8)> {
    let (matrix, sym) = read_matrix(file)?;
    let seed = initial_seed(&matrix)?;
    let input = echo_matrix(&matrix, &sym)?;

    let body = if marked {
        let analysis = cluster_automorphism_group(&seed, cap)?;
        AutsBody {
            marked: true,
            order: analysis.aut.order,
            tag: analysis.aut.tag,
            generators: analysis.aut.generators.iter().map(|g| g.to_string()).collect(),
            elements: aut_elements(&analysis.aut, &analysis.classified),
            plus: Some(PlusBody {
                order: analysis.aut_plus.order,
                tag: analysis.aut_plus.tag,
                index: analysis.aut.order / analysis.aut_plus.order,
                minus_b_in_class: analysis.minus_b_in_class,
            }),
        }
    } else {
        let graphs = MutationClassGraphs::build(&seed, cap)?;
        let aut = graph_automorphisms(graphs.exchange())?;
        let classified: Vec<ClusterAutomorphism> = aut
            .elements
            .iter()
            .map(|phi| cluster_kit::classify(phi, &graphs))
            .collect::<Result<_>>()?;
        AutsBody {
            marked: false,
            order: aut.order,
            tag: aut.tag,
            generators: aut.generators.iter().map(|g| g.to_string()).collect(),
            elements: aut_elements(&aut, &classified),
            plus: None,
        }
    };
    Ok((render("auts", input, body)?, 0))
}

#[derive(Serialize)]
struct EmbeddingBody {
    source_automorphism: String,
    direction: Direction,
    word: String,
    lifted_word: String,
    image: String,
    realization: Vec<String>,
}

#[derive(Serialize)]
struct UnfoldBody {
    valid: Option<bool>,
    validation: UnfoldingValidation,
    #[serde(skip_serializing_if = "Option::is_none")]
    embeddings: Option<Vec<EmbeddingBody>>,
}

fn cmd_unfold(file: &Path, embed: bool, cap: usize) -> Result<(String, u8)> {
    let spec = parse_json::<UnfoldingJson>(file)?.into_spec()?;
    let input = serde_json::to_value(UnfoldingJson::of(&spec))
        .map_err(|e| Error::Internal(e.to_string()))?;

    if !embed {
        let validation = validate_unfolding(&spec, cap)?;
        let (valid, code) = match &validation {
            UnfoldingValidation::Valid { .. } => (Some(true), 0),
            UnfoldingValidation::Invalid { .. } => (Some(false), 0),
            UnfoldingValidation::Inconclusive { .. } => (None, 3),
        };
        let body = UnfoldBody {
            valid,
            validation,
            embeddings: None,
        };
        return Ok((render("unfold", input, body)?, code));
    }

    let context = embedding_context(spec, cap)?;
    let aut = cluster_kit::marked_graph_automorphisms(&context.base_graphs.marked)?;
    let embeddings = aut
        .elements
        .iter()
        .map(|phi| {
            let e = embed_automorphism(&context, phi)?;
            Ok(EmbeddingBody {
                source_automorphism: e.source.vertex_map.to_string(),
                direction: e.direction,
                word: e.word.to_string(),
                lifted_word: e.lifted_word.to_string(),
                image: e.image.to_string(),
                realization: e.realization.iter().map(|p| p.render("y")).collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let body = UnfoldBody {
        valid: Some(true),
        validation: context.validation.clone(),
        embeddings: Some(embeddings),
    };
    Ok((render("unfold", input, body)?, 0))
}

#[derive(Serialize)]
struct SequenceBody {
    sequence: String,
    sigma: String,
    alignments: Vec<String>,
    word: String,
    realization: Vec<String>,
}

#[derive(Serialize)]
struct GreenBody {
    max_len: usize,
    explored: usize,
    length_truncated: bool,
    sequence_count: usize,
    sequences: Vec<SequenceBody>,
}

fn cmd_green(file: &Path, max_len: Option<u64>, cap: usize) -> Result<(String, u8)> {
    let (matrix, sym) = read_matrix(file)?;
    let input = echo_matrix(&matrix, &sym)?;
    let max_len = max_len.map_or_else(|| default_max_len(&matrix), |v| v as usize);
    let search = find_maximal_green_sequences(&matrix, max_len, cap)?;
    let sequences = search
        .sequences
        .iter()
        .map(|s| {
            let induced = induced_automorphism(&matrix, s)?;
            Ok(SequenceBody {
                sequence: s
                    .mutations
                    .iter()
                    .map(|k| format!("m{}", k + 1))
                    .collect::<Vec<_>>()
                    .join(" "),
                sigma: s.sigma.to_string(),
                alignments: s.alignments.iter().map(|p| p.to_string()).collect(),
                word: induced.word.to_string(),
                realization: induced.realization.iter().map(|p| p.render("x")).collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let body = GreenBody {
        max_len,
        explored: search.explored,
        length_truncated: search.length_truncated,
        sequence_count: sequences.len(),
        sequences,
    };
    Ok((render("green", input, body)?, 0))
}

fn run(cli: Cli) -> Result<(String, u8)> {
    let cap = cli.cap as usize;
    match cli.command {
        Command::Symmetrize { file } => cmd_symmetrize(&file),
        Command::Graph {
            file,
            labelled,
            marked,
            dot,
            json: _,
            strict_seeds,
            radius,
        } => cmd_graph(&file, labelled, marked, dot, strict_seeds, radius, cap),
        Command::Auts { file, marked } => cmd_auts(&file, marked, cap),
        Command::Unfold { file, embed } => cmd_unfold(&file, embed, cap),
        Command::Green { file, max_len } => cmd_green(&file, max_len, cap),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e.severity() {
        Severity::InvalidInput => 2,
        Severity::Inconclusive => 3,
        Severity::Internal => 4,
    }
}

fn main() -> ExitCode {
    let threads = cluster_kit::configured_threads();
    if threads > 1 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match run(Cli::parse()) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
