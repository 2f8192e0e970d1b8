//! Experiment drivers. Every (grid point, sample) job is independent and
//! seeded from the grid key, so the output does not depend on scheduling.

use std::collections::HashMap;
use std::time::Instant;

use nbloc::analysis::{predicted_mu_clique, predicted_mu_regular, Mu};
use nbloc::generators::{
    attach_motif_pair, regular_sbm, rewire_increase_triangles, sbm_sample, MotifSpec, RngSeed,
    SbmParams,
};
use nbloc::spectra::MatrixKind;
use nbloc::Graph;
use rayon::prelude::*;

use crate::config::{sample_seed, ExperimentConfig, ExperimentId, GridPoint};
use crate::error::{HarnessError, Result};
use crate::output::*;
use crate::pipeline::{leading_pairs, nb_top_two, Selected, SolveParams};

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "NBLOC_WORKERS";

/// Thread pool sized by [`WORKERS_ENV`], or rayon's default when unset.
pub fn worker_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        let n: usize = v.trim().parse().map_err(|_| {
            HarnessError::Config(format!("{WORKERS_ENV}={v} is not a worker count"))
        })?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| HarnessError::Config(format!("cannot start worker pool: {e}")))
}

/// Runs a synthetic experiment (fig3, fig4 or rewire-scan).
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    match cfg.experiment {
        ExperimentId::Fig3 => run_fig3(cfg),
        ExperimentId::Fig4 => run_fig4(cfg),
        ExperimentId::RewireScan => run_rewire_scan(cfg),
        ExperimentId::RealIpr => Err(HarnessError::Config("real-ipr needs input networks".into())),
    }
}

struct Job {
    point: GridPoint,
    key: String,
    sample: usize,
    seed: u64,
}

fn jobs(cfg: &ExperimentConfig, grid: Vec<GridPoint>) -> Vec<Job> {
    grid.into_iter()
        .flat_map(|point| {
            let key = point.key();
            (0..cfg.samples).map(move |sample| Job {
                point: point.clone(),
                key: key.clone(),
                sample,
                seed: sample_seed(cfg.base_seed, &key, sample),
            })
        })
        .collect()
}

/// Solver settings for a validated config.
pub fn solve_params(cfg: &ExperimentConfig, seed: u64) -> SolveParams {
    SolveParams {
        opts: cfg.krylov(seed),
        imag_tol: cfg.imag_tol,
        search: cfg.search().unwrap_or_default(),
    }
}

fn blank(cfg: &ExperimentConfig, job: &Job, kind: MatrixKind, rank: usize) -> ResultRecord {
    ResultRecord {
        experiment: cfg.experiment.to_string(),
        grid: job.key.clone(),
        sample: job.sample,
        seed: job.seed,
        matrix: kind.short_name().to_string(),
        rank,
        re: None,
        im: None,
        ipr_node: None,
        ipr_full: None,
        overlap: None,
        residual: None,
        flags: String::new(),
        wall_time: None,
    }
}

fn failure(
    cfg: &ExperimentConfig,
    job: &Job,
    kind: MatrixKind,
    err: &nbloc::Error,
) -> ResultRecord {
    let mut r = blank(cfg, job, kind, 0);
    match err {
        nbloc::Error::Convergence { .. } => r.add_flag(FLAG_NONCONVERGED),
        _ => r.add_flag(FLAG_ERROR),
    }
    r
}

fn measured(
    cfg: &ExperimentConfig,
    job: &Job,
    g: &Graph,
    kind: MatrixKind,
    s: &Selected,
    tol: f64,
    elapsed: Option<f64>,
) -> ResultRecord {
    let mut r = blank(cfg, job, kind, s.rank);
    r.re = Some(s.value.re);
    r.im = Some(s.value.im);
    r.ipr_node = s.ipr_node().ok();
    r.ipr_full = s.full_ipr;
    r.overlap = s.overlap(g);
    r.residual = Some(s.residual);
    r.wall_time = elapsed;
    if s.complex_fallback {
        r.add_flag(FLAG_COMPLEX);
    }
    if !(s.residual <= tol) {
        r.add_flag(FLAG_NONCONVERGED);
    }
    r
}

/// Records for the `ranks` of `kind`'s selected eigenpairs.
fn matrix_records(
    cfg: &ExperimentConfig,
    job: &Job,
    g: &Graph,
    kind: MatrixKind,
    ranks: &[usize],
) -> Vec<ResultRecord> {
    let p = solve_params(cfg, job.seed);
    let tol = p.opts.tolerance_for(kind != MatrixKind::NonBacktracking);
    let start = Instant::now();
    let k = ranks.iter().copied().max().unwrap_or(1);
    let result = if kind == MatrixKind::NonBacktracking && k == 2 {
        nb_top_two(g, &p)
    } else {
        leading_pairs(g, kind, k, &p)
    };
    let elapsed = cfg.record_timing.then(|| start.elapsed().as_secs_f64());
    match result {
        Ok(sel) => sel
            .iter()
            .filter(|s| ranks.contains(&s.rank))
            .map(|s| measured(cfg, job, g, kind, s, tol, elapsed))
            .collect(),
        Err(e) => vec![failure(cfg, job, kind, &e)],
    }
}

fn giant(cfg: &ExperimentConfig, g: Graph) -> Graph {
    if cfg.giant_component {
        g.largest_component().0
    } else {
        g
    }
}

fn prediction(mu: Mu<f64>, size: usize) -> (f64, f64, f64) {
    let z = mu.to_complex();
    (z.re, z.im, 1.0 / (2 * size) as f64)
}

fn finish(
    cfg: &ExperimentConfig,
    records: Vec<ResultRecord>,
    predict: HashMap<String, (f64, f64, f64)>,
) -> ExperimentOutput {
    let summary = summarize(&records, |grid, matrix, rank| {
        (matrix == "B" && rank == 2)
            .then(|| predict.get(grid).copied())
            .flatten()
    });
    ExperimentOutput {
        config: cfg.clone(),
        records,
        summary,
        density: Vec::new(),
        max_ipr: Vec::new(),
    }
}

/// Clique pairs on a sparse SBM: the two largest real B eigenpairs per
/// sample, with the motif-free control when configured.
pub fn run_fig3(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let grid = cfg.grid();
    let predict: HashMap<String, (f64, f64, f64)> = grid
        .iter()
        .filter_map(|pt| match pt {
            GridPoint::Fig3 {
                clique: Some(n), ..
            } => Some((pt.key(), prediction(predicted_mu_clique(*n), *n))),
            _ => None,
        })
        .collect();
    let jobs = jobs(cfg, grid);
    let records: Vec<Vec<ResultRecord>> = worker_pool()?.install(|| {
        jobs.par_iter()
            .map(|job| {
                let GridPoint::Fig3 { delta, clique } = job.point else {
                    unreachable!("fig3 grid")
                };
                let seed = RngSeed(job.seed);
                let graph = SbmParams::from_mean_degree(cfg.nodes, cfg.mean_degree, delta)
                    .and_then(|p| sbm_sample(&p, seed.child(0)))
                    .map(|g| giant(cfg, g))
                    .and_then(|g| match clique {
                        Some(n) => attach_motif_pair(&g, MotifSpec::Clique { n }, seed.child(1)),
                        None => Ok(g),
                    });
                match graph {
                    Ok(g) => matrix_records(cfg, job, &g, MatrixKind::NonBacktracking, &[1, 2]),
                    Err(e) => vec![failure(cfg, job, MatrixKind::NonBacktracking, &e)],
                }
            })
            .collect()
    });
    Ok(finish(cfg, records.concat(), predict))
}

/// Regular motif pairs on a block-structured regular graph with
/// `c_in - c_out = 2 c0 - 1` and `c_in + c_out = 2 c0`.
pub fn run_fig4(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let grid = cfg.grid();
    let predict: HashMap<String, (f64, f64, f64)> = grid
        .iter()
        .filter_map(|pt| match pt {
            GridPoint::Fig4 { c, .. } => Some((
                pt.key(),
                prediction(predicted_mu_regular(*c), cfg.omega_size),
            )),
            _ => None,
        })
        .collect();
    let jobs = jobs(cfg, grid);
    let records: Vec<Vec<ResultRecord>> = worker_pool()?.install(|| {
        jobs.par_iter()
            .map(|job| {
                let GridPoint::Fig4 { c, c0 } = job.point else {
                    unreachable!("fig4 grid")
                };
                let seed = RngSeed(job.seed);
                let c_in = 2.0 * c0 as f64 - 0.5;
                let spec = MotifSpec::Regular {
                    size: cfg.omega_size,
                    inner_degree: c.saturating_sub(1),
                };
                let graph = regular_sbm(cfg.nodes, c0, c_in, 0.5, seed.child(0))
                    .map(|g| giant(cfg, g))
                    .and_then(|g| attach_motif_pair(&g, spec, seed.child(1)));
                match graph {
                    Ok(g) => matrix_records(cfg, job, &g, MatrixKind::NonBacktracking, &[1, 2]),
                    Err(e) => vec![failure(cfg, job, MatrixKind::NonBacktracking, &e)],
                }
            })
            .collect()
    });
    Ok(finish(cfg, records.concat(), predict))
}

/// Which eigenpair each matrix contributes to the rewire scan.
pub const REWIRE_RANKS: [(MatrixKind, usize); 4] = [
    (MatrixKind::Laplacian, 2),
    (MatrixKind::NormLaplacian, 2),
    (MatrixKind::Modularity, 1),
    (MatrixKind::NonBacktracking, 2),
];

/// SBM samples rewired to gain `tau * N` triangles, with the IPR of the
/// L and NL second-smallest, M largest and B second-largest real eigenvectors.
pub fn run_rewire_scan(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let jobs = jobs(cfg, cfg.grid());
    let results: Vec<(Vec<ResultRecord>, f64)> = worker_pool()?.install(|| {
        jobs.par_iter()
            .map(|job| {
                let GridPoint::Rewire { delta, tau } = job.point else {
                    unreachable!("rewire grid")
                };
                let seed = RngSeed(job.seed);
                let target = (tau * cfg.nodes as f64).round() as usize;
                let outcome = SbmParams::from_mean_degree(cfg.nodes, cfg.mean_degree, delta)
                    .and_then(|p| sbm_sample(&p, seed.child(0)))
                    .map(|g| giant(cfg, g))
                    .and_then(|g| rewire_increase_triangles(&g, target, seed.child(1), None));
                let out = match outcome {
                    Ok(o) => o,
                    Err(e) => {
                        let recs = REWIRE_RANKS
                            .iter()
                            .map(|&(kind, _)| failure(cfg, job, kind, &e))
                            .collect();
                        return (recs, 0.0);
                    }
                };
                let short = (out.achieved as f64) < 0.95 * target as f64;
                let mut recs = Vec::new();
                for &(kind, rank) in &REWIRE_RANKS {
                    recs.extend(matrix_records(cfg, job, &out.graph, kind, &[rank]));
                }
                if short {
                    recs.iter_mut().for_each(|r| r.add_flag(FLAG_SHORTFALL));
                }
                (recs, out.achieved as f64 / cfg.nodes as f64)
            })
            .collect()
    });

    let mut density = Vec::new();
    for (gi, point) in cfg.grid().iter().enumerate() {
        let GridPoint::Rewire { delta, tau } = *point else {
            continue;
        };
        let chunk = &results[gi * cfg.samples..(gi + 1) * cfg.samples];
        let achieved: Vec<f64> = chunk.iter().map(|(_, a)| *a).collect();
        for &(kind, rank) in &REWIRE_RANKS {
            let rows: Vec<&ResultRecord> = chunk
                .iter()
                .flat_map(|(recs, _)| recs)
                .filter(|r| r.matrix == kind.short_name() && (r.rank == rank || r.rank == 0))
                .collect();
            let iprs: Vec<f64> = rows
                .iter()
                .filter(|r| !r.is_excluded())
                .filter_map(|r| r.ipr_node)
                .collect();
            let (mean_ipr, se_ipr) = mean_se(&iprs);
            density.push(DensityRow {
                delta,
                tau_per_node: tau,
                matrix: kind.short_name().to_string(),
                samples: iprs.len(),
                excluded: cfg.samples - iprs.len(),
                mean_ipr,
                se_ipr,
                mean_achieved_per_node: mean_se(&achieved).0.unwrap_or(0.0),
                shortfalls: chunk
                    .iter()
                    .filter(|(recs, _)| recs.iter().any(|r| r.has_flag(FLAG_SHORTFALL)))
                    .count(),
            });
        }
    }
    let records: Vec<ResultRecord> = results.into_iter().flat_map(|(r, _)| r).collect();
    let summary = summarize(&records, |_, _, _| None);
    Ok(ExperimentOutput {
        config: cfg.clone(),
        records,
        summary,
        density,
        max_ipr: Vec::new(),
    })
}

/// IPR of the `k_eigs` smallest (L, NL), largest (M) and largest real (B)
/// eigenvectors of each named network, plus the per-matrix maximum.
pub fn run_real_ipr(
    networks: &[(String, Graph)],
    cfg: &ExperimentConfig,
) -> Result<ExperimentOutput> {
    cfg.validate()?;
    if networks.is_empty() {
        return Err(HarnessError::Config(
            "real-ipr needs at least one network".into(),
        ));
    }
    let kinds = [
        MatrixKind::Laplacian,
        MatrixKind::NormLaplacian,
        MatrixKind::Modularity,
        MatrixKind::NonBacktracking,
    ];
    let ranks: Vec<usize> = (1..=cfg.k_eigs).collect();
    let work: Vec<(Job, &Graph, MatrixKind)> = networks
        .iter()
        .flat_map(|(name, g)| {
            let point = GridPoint::Network { name: name.clone() };
            kinds.iter().map(move |&kind| {
                let key = point.key();
                let seed = sample_seed(cfg.base_seed, &key, 0);
                (
                    Job {
                        point: point.clone(),
                        key,
                        sample: 0,
                        seed,
                    },
                    g,
                    kind,
                )
            })
        })
        .collect();
    let records: Vec<Vec<ResultRecord>> = worker_pool()?.install(|| {
        work.par_iter()
            .map(|(job, g, kind)| {
                if !g.is_connected() || g.min_degree().unwrap_or(0) == 0 {
                    let e = nbloc::Error::Precondition(
                        "network must be connected with no isolated nodes".into(),
                    );
                    return vec![failure(cfg, job, *kind, &e)];
                }
                matrix_records(cfg, job, g, *kind, &ranks)
            })
            .collect()
    });
    let max_ipr = networks
        .iter()
        .zip(records.chunks(kinds.len()))
        .flat_map(|((name, _), per_kind)| {
            kinds.iter().zip(per_kind).map(move |(kind, recs)| {
                let best = recs
                    .iter()
                    .filter(|r| !r.is_excluded())
                    .filter_map(|r| r.ipr_node.map(|v| (v, r.rank)))
                    .reduce(|a, b| if b.0 > a.0 { b } else { a });
                MaxIprRow {
                    network: name.clone(),
                    matrix: kind.short_name().to_string(),
                    pairs: recs.iter().filter(|r| !r.is_excluded()).count(),
                    max_ipr: best.map(|b| b.0),
                    rank_of_max: best.map(|b| b.1),
                }
            })
        })
        .collect();
    let records = records.concat();
    let summary = summarize(&records, |_, _, _| None);
    Ok(ExperimentOutput {
        config: cfg.clone(),
        records,
        summary,
        density: Vec::new(),
        max_ipr,
    })
}
