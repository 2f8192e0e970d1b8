use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use nbloc::analysis::{overlap, sign_partition};
use nbloc::generators::{
    attach_motif_pair, regular_graph, regular_sbm, rewire_increase_triangles, sbm_sample,
    MotifSpec, RngSeed, SbmParams,
};
use nbloc::spectra::{dense_eig, MatrixKind};
use nbloc::Graph;
use nbloc_harness::experiments::REWIRE_RANKS;
use nbloc_harness::output::write_csv;
use nbloc_harness::pipeline::{leading_pairs, nb_top_two};
use nbloc_harness::*;

#[derive(Parser)]
#[command(
    name = "nbloc",
    version,
    about = "Eigenvector localization in spectral graph partitioning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a synthetic graph and write it as an edge list.
    Gen(GenArgs),
    /// Leading eigenvalues of one matrix of an edge-list graph.
    Spectrum(MatrixArgs),
    /// IPR of the leading eigenvectors of one matrix.
    Ipr(MatrixArgs),
    /// Sign bisection by one matrix's informative eigenvector.
    Partition(PartitionArgs),
    /// Run a synthetic experiment.
    Experiment(ExperimentArgs),
    /// IPR survey of edge-list networks.
    RealIpr(RealIprArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Sbm,
    RegularSbm,
    Regular,
}

#[derive(clap::Args)]
struct GenArgs {
    #[arg(long, value_enum, default_value = "sbm")]
    model: Model,
    #[arg(long, default_value_t = 1000)]
    nodes: usize,
    /// Mean degree (sbm).
    #[arg(long, default_value_t = 3.0)]
    mean_degree: f64,
    /// c_in - c_out (sbm).
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    /// Node degree (regular, regular-sbm).
    #[arg(long, default_value_t = 3)]
    degree: usize,
    /// c_in (regular-sbm); c_out = 2 degree - c_in.
    #[arg(long)]
    c_in: Option<f64>,
    /// Attach a pair of n-cliques.
    #[arg(long, conflicts_with = "regular_motif")]
    clique: Option<usize>,
    /// Attach a pair of regular motifs, as SIZE,INNER_DEGREE.
    #[arg(long, value_parser = parse_motif)]
    regular_motif: Option<(usize, usize)>,
    /// Rewire to gain this many triangles per node.
    #[arg(long)]
    rewire_tau: Option<f64>,
    #[arg(long)]
    giant_component: Option<bool>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Edge-list output (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write `node label` lines here.
    #[arg(long)]
    labels: Option<PathBuf>,
}

#[derive(clap::Args)]
struct MatrixArgs {
    edges: PathBuf,
    #[arg(long, default_value = "B", value_parser = parse_kind)]
    matrix: MatrixKind,
    #[arg(long, default_value_t = 6)]
    k: usize,
    /// Use the dense solver and print the whole spectrum.
    #[arg(long)]
    dense: bool,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    giant_component: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(clap::Args)]
struct PartitionArgs {
    edges: PathBuf,
    #[arg(long, default_value = "B", value_parser = parse_kind)]
    matrix: MatrixKind,
    /// `node label` lines (labels 1 and 2); prints the overlap.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    giant_component: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(clap::Args)]
struct SolverArgs {
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    solver_seed: u64,
    #[arg(long, default_value = "real-part")]
    real_search: String,
}

#[derive(clap::Args)]
struct ExperimentArgs {
    #[arg(value_enum)]
    experiment: SyntheticExperiment,
    #[command(flatten)]
    common: RunArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum SyntheticExperiment {
    Fig3,
    Fig4,
    RewireScan,
}

#[derive(clap::Args)]
struct RealIprArgs {
    /// Edge-list files; each is named by its file stem.
    #[arg(required = true)]
    edges: Vec<PathBuf>,
    #[command(flatten)]
    common: RunArgs,
}

#[derive(clap::Args)]
struct RunArgs {
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    #[command(flatten)]
    patch: ConfigPatch,
}

fn parse_motif(s: &str) -> Result<(usize, usize), String> {
    let bad = || format!("expected SIZE,INNER_DEGREE, got '{s}'");
    let (size, inner) = s.split_once(',').ok_or_else(bad)?;
    Ok((
        size.trim().parse().map_err(|_| bad())?,
        inner.trim().parse().map_err(|_| bad())?,
    ))
}

fn parse_kind(s: &str) -> Result<MatrixKind, String> {
    MatrixKind::parse(s).map_err(|e| e.to_string())
}

fn main() {
    if let Err(e) = dispatch(Cli::parse()) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(a) => gen(a),
        Command::Spectrum(a) => spectrum(a, false),
        Command::Ipr(a) => spectrum(a, true),
        Command::Partition(a) => partition(a),
        Command::Experiment(a) => {
            let id = match a.experiment {
                SyntheticExperiment::Fig3 => ExperimentId::Fig3,
                SyntheticExperiment::Fig4 => ExperimentId::Fig4,
                SyntheticExperiment::RewireScan => ExperimentId::RewireScan,
            };
            let cfg = ExperimentConfig::resolve(id, a.common.config.as_deref(), &a.common.patch)?;
            finish(run(&cfg)?, &a.common.out)
        }
        Command::RealIpr(a) => {
            let cfg = ExperimentConfig::resolve(
                ExperimentId::RealIpr,
                a.common.config.as_deref(),
                &a.common.patch,
            )?;
            let opts = IngestOptions {
                giant_component: cfg.giant_component,
            };
            let mut networks = Vec::new();
            for path in &a.edges {
                let name = path.file_stem().map_or_else(
                    || path.display().to_string(),
                    |s| s.to_string_lossy().into_owned(),
                );
                networks.push((name, ingest_edge_list(path, &opts)?.graph));
            }
            finish(run_real_ipr(&networks, &cfg)?, &a.common.out)
        }
    }
}

fn finish(output: ExperimentOutput, dir: &Path) -> Result<()> {
    for path in emit(&output, dir)? {
        println!("wrote {}", path.display());
    }
    let excluded = output.records.iter().filter(|r| r.is_excluded()).count();
    if excluded > 0 {
        eprintln!("{excluded} record(s) flagged and excluded from means");
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| HarnessError::Io {
            path: path.to_path_buf(),
            source: e,
        })
}

fn gen(a: GenArgs) -> Result<()> {
    let seed = RngSeed(a.seed);
    let mut g = match a.model {
        Model::Sbm => sbm_sample(
            &SbmParams::from_mean_degree(a.nodes, a.mean_degree, a.delta)?,
            seed.child(0),
        )?,
        Model::Regular => regular_graph(a.nodes, a.degree, seed.child(0))?,
        Model::RegularSbm => {
            let c_in = a.c_in.unwrap_or(a.degree as f64);
            regular_sbm(
                a.nodes,
                a.degree,
                c_in,
                2.0 * a.degree as f64 - c_in,
                seed.child(0),
            )?
        }
    };
    if a.giant_component
        .unwrap_or(a.clique.is_some() || a.regular_motif.is_some() || a.rewire_tau.is_some())
    {
        g = g.largest_component().0;
    }
    if let Some(n) = a.clique {
        g = attach_motif_pair(&g, MotifSpec::Clique { n }, seed.child(1))?;
    }
    if let Some((size, inner_degree)) = a.regular_motif {
        let spec = MotifSpec::Regular { size, inner_degree };
        g = attach_motif_pair(&g, spec, seed.child(1))?;
    }
    if let Some(tau) = a.rewire_tau {
        let target = (tau * g.node_count() as f64).round() as usize;
        let out = rewire_increase_triangles(&g, target, seed.child(2), None)?;
        eprintln!("rewiring gained {} of {target} triangles", out.achieved);
        g = out.graph;
    }
    match &a.out {
        Some(path) => write_edge_list(&g, None, create(path)?),
        None => write_edge_list(&g, None, std::io::stdout().lock()),
    }
    .map_err(|e| HarnessError::Io {
        path: a.out.clone().unwrap_or_else(|| "<stdout>".into()),
        source: e,
    })?;
    if let Some(path) = &a.labels {
        let mut w = create(path)?;
        let io = |e| HarnessError::Io {
            path: path.clone(),
            source: e,
        };
        for (i, l) in g.labels().iter().enumerate() {
            match l {
                Some(l) => writeln!(w, "{i} {l}").map_err(io)?,
                None => writeln!(w, "{i} -").map_err(io)?,
            }
        }
        w.flush().map_err(io)?;
    }
    Ok(())
}

fn load(path: &Path, giant_component: bool) -> Result<EdgeList> {
    ingest_edge_list(path, &IngestOptions { giant_component })
}

fn solver_config(s: &SolverArgs) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::defaults(ExperimentId::RealIpr);
    cfg.tol = s.tol;
    cfg.real_search = s.real_search.clone();
    cfg.validate()?;
    Ok(cfg)
}

#[derive(serde::Serialize)]
struct SpectrumRow {
    rank: usize,
    re: f64,
    im: f64,
    residual: f64,
    ipr_node: Option<f64>,
}

fn spectrum(a: MatrixArgs, with_ipr: bool) -> Result<()> {
    let el = load(&a.edges, a.giant_component)?;
    let cfg = solver_config(&a.solver)?;
    let rows: Vec<SpectrumRow> = if a.dense {
        let op = nbloc::spectra::build_operator::<f64>(&el.graph, a.matrix)?;
        dense_eig(op.as_ref())?
            .iter()
            .enumerate()
            .map(|(i, p)| SpectrumRow {
                rank: i + 1,
                re: p.value.re,
                im: p.value.im,
                residual: p.residual,
                ipr_node: with_ipr
                    .then(|| nbloc::analysis::ipr(&p.vector).ok())
                    .flatten(),
            })
            .collect()
    } else {
        leading_pairs(
            &el.graph,
            a.matrix,
            a.k,
            &solve_params(&cfg, a.solver.solver_seed),
        )?
        .iter()
        .map(|s| SpectrumRow {
            rank: s.rank,
            re: s.value.re,
            im: s.value.im,
            residual: s.residual,
            ipr_node: with_ipr.then(|| s.ipr_node().ok()).flatten(),
        })
        .collect()
    };
    write_csv(&rows, std::io::stdout().lock()).map_err(|source| HarnessError::Csv {
        path: "<stdout>".into(),
        source,
    })
}

fn read_labels(path: &Path, ids: &[String]) -> Result<Vec<Option<u8>>> {
    let f = File::open(path).map_err(|e| HarnessError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut by_id = HashMap::new();
    for (no, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| HarnessError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(id), Some(label)) = (it.next(), it.next()) else {
            return Err(HarnessError::Parse {
                line: no + 1,
                message: "expected `node label`".into(),
            });
        };
        let label = match label {
            "1" => Some(1),
            "2" => Some(2),
            "-" => None,
            other => {
                return Err(HarnessError::Parse {
                    line: no + 1,
                    message: format!("label {other} is not 1, 2 or -"),
                })
            }
        };
        by_id.insert(id.to_string(), label);
    }
    Ok(ids
        .iter()
        .map(|id| by_id.get(id).copied().flatten())
        .collect())
}

fn partition(a: PartitionArgs) -> Result<()> {
    let el = load(&a.edges, a.giant_component)?;
    let cfg = solver_config(&a.solver)?;
    let params = solve_params(&cfg, a.solver.solver_seed);
    let rank = REWIRE_RANKS
        .iter()
        .find(|(k, _)| *k == a.matrix)
        .map_or(1, |r| r.1);
    let selected = if a.matrix == MatrixKind::NonBacktracking {
        nb_top_two(&el.graph, &params)?
    } else {
        leading_pairs(&el.graph, a.matrix, rank, &params)?
    };
    let s = selected.iter().find(|s| s.rank == rank).ok_or_else(|| {
        HarnessError::Config(format!("{} has no rank-{rank} eigenpair", a.matrix))
    })?;
    let re: Vec<f64> = s.node_vector.iter().map(|z| z.re).collect();
    let p = sign_partition(&re);
    let mut out = std::io::stdout().lock();
    let io = |e| HarnessError::Io {
        path: "<stdout>".into(),
        source: e,
    };
    writeln!(out, "node,module").map_err(io)?;
    for (id, m) in el.ids.iter().zip(&p.assignment) {
        writeln!(out, "{id},{m}").map_err(io)?;
    }
    if let Some(path) = &a.labels {
        let g: Graph = el.graph.clone().with_labels(read_labels(path, &el.ids)?)?;
        eprintln!("overlap {:.6}", overlap(&p, &g)?);
    }
    Ok(())
}
