use rand::Rng;

use super::RngSeed;
use crate::error::{Error, Result};
use crate::graph::{simplify, Graph};

/// Sparse two-block stochastic block model with equal blocks.
///
/// Nodes `0..n/2` form block 1 and `n/2..n` block 2. A pair inside a block is
/// linked with probability `c_in / n`, a pair across blocks with `c_out / n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SbmParams {
    pub n: usize,
    pub c_in: f64,
    pub c_out: f64,
}

impl SbmParams {
    pub fn new(n: usize, c_in: f64, c_out: f64) -> Result<Self> {
        let p = SbmParams { n, c_in, c_out };
        p.validate()?;
        Ok(p)
    }

    /// Parameters from the mean degree `c_bar = (c_in + c_out) / 2` and the
    /// block strength `delta = c_in - c_out`.
    pub fn from_mean_degree(n: usize, c_bar: f64, delta: f64) -> Result<Self> {
        Self::new(n, c_bar + delta / 2.0, c_bar - delta / 2.0)
    }

    pub fn validate(&self) -> Result<()> {
        let nf = self.n as f64;
        if !self.n.is_multiple_of(2) {
            return Err(Error::Parameter(format!(
                "node count {} must be even",
                self.n
            )));
        }
        for (name, c) in [("c_in", self.c_in), ("c_out", self.c_out)] {
            if !c.is_finite() || c < 0.0 {
                return Err(Error::Parameter(format!(
                    "{name} = {c} must be finite and >= 0"
                )));
            }
            if c > nf {
                return Err(Error::Parameter(format!(
                    "{name} = {c} exceeds N = {}; link probability would exceed 1",
                    self.n
                )));
            }
        }
        if self.c_out > self.c_in {
            return Err(Error::Parameter(format!(
                "c_out = {} exceeds c_in = {}",
                self.c_out, self.c_in
            )));
        }
        Ok(())
    }

    pub fn p_in(&self) -> f64 {
        self.c_in / self.n as f64
    }

    pub fn p_out(&self) -> f64 {
        self.c_out / self.n as f64
    }

    pub fn c_bar(&self) -> f64 {
        (self.c_in + self.c_out) / 2.0
    }

    /// Planted block (1 or 2) of `node`.
    pub fn block_of(&self, node: usize) -> u8 {
        if node < self.n / 2 {
            1
        } else {
            2
        }
    }
}

/// Draws one labeled SBM sample.
pub fn sbm_sample(params: &SbmParams, seed: RngSeed) -> Result<Graph> {
    params.validate()?;
    let n = params.n;
    let (p_in, p_out) = (params.p_in(), params.p_out());
    let mut rng = seed.rng();
    let mut edges = Vec::new();
    for a in 0..n {
        let block_a = params.block_of(a);
        for b in a + 1..n {
            let p = if params.block_of(b) == block_a {
                p_in
            } else {
                p_out
            };
            if p > 0.0 && rng.random::<f64>() < p {
                edges.push((a, b));
            }
        }
    }
    let labels = (0..n).map(|i| Some(params.block_of(i))).collect();
    simplify(&edges, n)?.with_labels(labels)
}
