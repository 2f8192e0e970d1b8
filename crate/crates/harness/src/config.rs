use std::fmt;
use std::path::Path;

use nbloc::spectra::RealSearch;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentId {
    /// Clique pair on a sparse two-block SBM.
    Fig3,
    /// Regular motif pair on a block-structured regular graph.
    Fig4,
    /// Triangle-increasing rewiring of an SBM.
    RewireScan,
    /// IPR survey of supplied networks.
    RealIpr,
}

impl ExperimentId {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::Fig3 => "fig3",
            ExperimentId::Fig4 => "fig4",
            ExperimentId::RewireScan => "rewire-scan",
            ExperimentId::RealIpr => "real-ipr",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Full description of a run. Together with `base_seed` it determines every
/// output record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    /// Base graph size before any motif nodes are added.
    pub nodes: usize,
    /// Mean degree of the SBM base graph.
    pub mean_degree: f64,
    /// `c_in - c_out` values.
    pub deltas: Vec<f64>,
    /// Clique sizes `n` (fig3).
    pub clique_sizes: Vec<usize>,
    /// Run the motif-free SBM alongside (fig3).
    pub control: bool,
    /// Motif node degrees `c` (fig4).
    pub motif_degrees: Vec<usize>,
    /// Base graph degrees `c0` (fig4).
    pub base_degrees: Vec<usize>,
    /// `|Omega|` for regular motifs (fig4).
    pub omega_size: usize,
    /// Triangle targets as `delta tau / N` (rewire-scan).
    pub tau_per_node: Vec<f64>,
    pub samples: usize,
    pub base_seed: u64,
    pub k_eigs: usize,
    /// Krylov residual tolerance; solver defaults when absent.
    pub tol: Option<f64>,
    pub imag_tol: f64,
    pub giant_component: bool,
    /// `real-part` or `magnitude`.
    pub real_search: String,
    /// Fill the wall_time column (makes output nondeterministic).
    pub record_timing: bool,
}

impl ExperimentConfig {
    /// Desk-scale defaults for `id`.
    pub fn defaults(id: ExperimentId) -> Self {
        let mut cfg = ExperimentConfig {
            experiment: id,
            nodes: 1000,
            mean_degree: 3.0,
            deltas: vec![1.0, 2.0, 3.0, 4.0, 5.0, 5.5],
            clique_sizes: vec![4, 5, 6, 7],
            control: true,
            motif_degrees: vec![4, 5, 6, 7, 8, 9, 10],
            base_degrees: vec![3],
            omega_size: 50,
            tau_per_node: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            samples: 10,
            base_seed: 20_171_010,
            k_eigs: 6,
            tol: None,
            imag_tol: nbloc::spectra::IMAG_TOL,
            giant_component: true,
            real_search: RealSearch::default().name().to_string(),
            record_timing: false,
        };
        match id {
            ExperimentId::Fig4 => cfg.nodes = 2000,
            ExperimentId::RewireScan => {
                cfg.mean_degree = 5.0;
                cfg.deltas = vec![0.0, 2.0, 4.0, 6.0, 8.0];
            }
            ExperimentId::Fig3 | ExperimentId::RealIpr => {}
        }
        cfg
    }

    /// Defaults, then the JSON file, then the flags.
    pub fn resolve(id: ExperimentId, file: Option<&Path>, flags: &ConfigPatch) -> Result<Self> {
        let mut cfg = Self::defaults(id);
        if let Some(path) = file {
            cfg.apply(&ConfigPatch::from_file(id, path)?);
        }
        cfg.apply(flags);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&mut self, p: &ConfigPatch) {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if let Some(v) = &p.$field { self.$field = v.clone(); })*
            };
        }
        take!(
            nodes,
            mean_degree,
            deltas,
            clique_sizes,
            control,
            motif_degrees,
            base_degrees,
            omega_size,
            tau_per_node,
            samples,
            base_seed,
            k_eigs,
            imag_tol,
            giant_component,
            real_search,
            record_timing
        );
        if p.tol.is_some() {
            self.tol = p.tol;
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.samples == 0 {
            return bad("samples must be at least 1".into());
        }
        if self.k_eigs == 0 {
            return bad("k_eigs must be at least 1".into());
        }
        if !(self.imag_tol > 0.0) || self.tol.is_some_and(|t| !(t > 0.0)) {
            return bad("tolerances must be positive".into());
        }
        self.search()?;
        let empty = match self.experiment {
            ExperimentId::Fig3 => {
                self.deltas.is_empty() || (self.clique_sizes.is_empty() && !self.control)
            }
            ExperimentId::Fig4 => self.motif_degrees.is_empty() || self.base_degrees.is_empty(),
            ExperimentId::RewireScan => self.deltas.is_empty() || self.tau_per_node.is_empty(),
            ExperimentId::RealIpr => false,
        };
        if empty {
            return bad(format!("{} grid is empty", self.experiment));
        }
        if self.experiment != ExperimentId::RealIpr && self.nodes < 4 {
            return bad(format!("nodes = {} is too small", self.nodes));
        }
        if self.tau_per_node.iter().any(|t| !(*t >= 0.0)) {
            return bad("tau_per_node entries must be nonnegative".into());
        }
        Ok(())
    }

    pub fn search(&self) -> Result<RealSearch> {
        RealSearch::parse(&self.real_search).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn krylov(&self, seed: u64) -> nbloc::KrylovOptions64 {
        let opts = nbloc::KrylovOptions64::default().with_seed(seed);
        match self.tol {
            Some(t) => opts.with_tol(t),
            None => opts,
        }
    }

    /// Grid points in emission order.
    pub fn grid(&self) -> Vec<GridPoint> {
        match self.experiment {
            ExperimentId::Fig3 => {
                let mut sizes: Vec<Option<usize>> = Vec::new();
                if self.control {
                    sizes.push(None);
                }
                sizes.extend(self.clique_sizes.iter().map(|&n| Some(n)));
                self.deltas
                    .iter()
                    .flat_map(|&delta| {
                        sizes
                            .iter()
                            .map(move |&clique| GridPoint::Fig3 { delta, clique })
                    })
                    .collect()
            }
            ExperimentId::Fig4 => self
                .base_degrees
                .iter()
                .flat_map(|&c0| {
                    self.motif_degrees
                        .iter()
                        .map(move |&c| GridPoint::Fig4 { c, c0 })
                })
                .collect(),
            ExperimentId::RewireScan => self
                .deltas
                .iter()
                .flat_map(|&delta| {
                    self.tau_per_node
                        .iter()
                        .map(move |&tau| GridPoint::Rewire { delta, tau })
                })
                .collect(),
            ExperimentId::RealIpr => Vec::new(),
        }
    }

    /// Where the configuration departs from the published runs.
    pub fn scale_notes(&self) -> Vec<String> {
        let (n, samples) = match self.experiment {
            ExperimentId::Fig3 => (1000, 100),
            ExperimentId::Fig4 => (10_000, 20),
            ExperimentId::RewireScan => (1000, 20),
            ExperimentId::RealIpr => return Vec::new(),
        };
        let mut notes = Vec::new();
        if self.nodes != n {
            notes.push(format!("nodes {} (published runs used {n})", self.nodes));
        }
        if self.samples != samples {
            notes.push(format!(
                "samples {} (published runs used {samples})",
                self.samples
            ));
        }
        notes
    }
}

/// Optional overrides, from a JSON file or from command-line flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct ConfigPatch {
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub mean_degree: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub deltas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub clique_sizes: Option<Vec<usize>>,
    #[arg(long)]
    pub control: Option<bool>,
    #[arg(long, value_delimiter = ',')]
    pub motif_degrees: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub base_degrees: Option<Vec<usize>>,
    #[arg(long)]
    pub omega_size: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub tau_per_node: Option<Vec<f64>>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub base_seed: Option<u64>,
    #[arg(long)]
    pub k_eigs: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub imag_tol: Option<f64>,
    #[arg(long)]
    pub giant_component: Option<bool>,
    #[arg(long)]
    pub real_search: Option<String>,
    #[arg(long)]
    pub record_timing: Option<bool>,
}

impl ConfigPatch {
    /// Reads a JSON config; an `experiment` key, if present, must match `id`.
    pub fn from_file(id: ExperimentId, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let json_err = |source| HarnessError::Json {
            context: path.display().to_string(),
            source,
        };
        let mut value: serde_json::Value = serde_json::from_str(&text).map_err(json_err)?;
        if let Some(obj) = value.as_object_mut() {
            if let Some(exp) = obj.remove("experiment") {
                let named: ExperimentId = serde_json::from_value(exp).map_err(json_err)?;
                if named != id {
                    return Err(HarnessError::Config(format!(
                        "{} configures experiment {named}, not {id}",
                        path.display()
                    )));
                }
            }
        }
        serde_json::from_value(value).map_err(json_err)
    }
}

/// One point of an experiment's parameter grid.
#[derive(Debug, Clone, PartialEq)]
pub enum GridPoint {
    Fig3 { delta: f64, clique: Option<usize> },
    Fig4 { c: usize, c0: usize },
    Rewire { delta: f64, tau: f64 },
    Network { name: String },
}

impl GridPoint {
    pub fn key(&self) -> String {
        match self {
            GridPoint::Fig3 {
                delta,
                clique: Some(n),
            } => format!("delta={delta};n={n}"),
            GridPoint::Fig3 {
                delta,
                clique: None,
            } => format!("delta={delta};n=none"),
            GridPoint::Fig4 { c, c0 } => format!("c={c};c0={c0}"),
            GridPoint::Rewire { delta, tau } => format!("delta={delta};tau={tau}"),
            GridPoint::Network { name } => name.clone(),
        }
    }
}

/// `base_seed` xor the first eight bytes of SHA-256 over the grid key and
/// sample index.
pub fn sample_seed(base_seed: u64, grid_key: &str, sample: usize) -> u64 {
    let digest = Sha256::digest(format!("{grid_key}#{sample}").as_bytes());
    let mut head = [0u8; 8];
    head.copy_from_slice(&digest[..8]);
    base_seed ^ u64::from_le_bytes(head)
}
