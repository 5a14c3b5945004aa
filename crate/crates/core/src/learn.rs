//! Basis learning by alternating simplex-constrained solves with projected
//! block coordinate descent on the bases.
//!
//! One epoch visits every point in a seeded random order. Coefficients for
//! each point feed the sufficient statistics A = sum(b b') and B = sum(y b');
//! after each batch every basis column moves toward the minimizer of the
//! statistics surrogate and is projected back into the unit ball. With
//! `batch_size >= N` the statistics are rebuilt from scratch each epoch, so
//! the recorded objective is the exact alternating-minimization objective
//! and never increases. Smaller batches keep accumulating statistics across
//! the run, which is the online regime: the recorded objective is the mean
//! of the per-point errors measured at solve time.

use ndarray::{Array2, ArrayView1};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{BasisSet, CoefficientVector, DataSet};
use crate::solver::{solve_simplex_ls, SolverConfig};

#[derive(Debug, Clone)]
pub struct TrainConfig {
    /// Number of basis vectors to learn.
    pub basis_count: usize,
    /// Coefficient mass handed to the solver; smaller values push
    /// representations onto lower dimensional facets.
    pub radius: f64,
    pub epochs: usize,
    /// Points per statistics flush. Anything >= N is the full-batch variant.
    pub batch_size: usize,
    pub seed: u64,
    /// Stop once the relative objective change over an epoch drops below this.
    pub tol_rel_objective: f64,
    /// Down-weight old statistics by (1 - 1/t) each step. Off by default.
    pub forget: bool,
    pub solver: SolverConfig,
}

impl TrainConfig {
    pub fn new(basis_count: usize) -> Self {
        Self {
            basis_count,
            radius: 1.0,
            epochs: 50,
            batch_size: 1,
            seed: 0,
            tol_rel_objective: 1e-6,
            forget: false,
            solver: SolverConfig::default(),
        }
    }
}

/// Accumulated second moments of the coefficients (A, p x p) and the
/// coefficient-weighted data (B, d x p).
#[derive(Debug, Clone)]
pub struct SufficientStats {
    a: Array2<f64>,
    b: Array2<f64>,
    count: usize,
}

impl SufficientStats {
    pub fn new(dim: usize, basis_count: usize) -> Self {
        Self {
            a: Array2::zeros((basis_count, basis_count)),
            b: Array2::zeros((dim, basis_count)),
            count: 0,
        }
    }

    pub fn a(&self) -> &Array2<f64> {
        &self.a
    }

    pub fn b(&self) -> &Array2<f64> {
        &self.b
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn reset(&mut self) {
        self.a.fill(0.0);
        self.b.fill(0.0);
        self.count = 0;
    }

    /// Multiply both moment matrices by `factor` (the forgetting step).
    pub fn decay(&mut self, factor: f64) {
        self.a.mapv_inplace(|v| v * factor);
        self.b.mapv_inplace(|v| v * factor);
    }

    /// Rank-one update from one solved point. Only support entries touch
    /// the matrices, so this is cheap even for wide coefficient vectors.
    pub fn add(&mut self, coeffs: &CoefficientVector, point: ArrayView1<'_, f64>) {
        let values = coeffs.values();
        for &i in coeffs.support() {
            let vi = values[i];
            for &j in coeffs.support() {
                self.a[(i, j)] += vi * values[j];
            }
            for (row, y) in point.iter().enumerate() {
                self.b[(row, i)] += y * vi;
            }
        }
        self.count += 1;
    }
}

/// One block coordinate descent sweep over the columns: each column moves to
/// the surrogate minimizer and is projected back into the unit ball. Columns
/// the statistics never saw (A_jj ~ 0) stay where they are.
pub fn update_bases(stats: &SufficientStats, bases: &BasisSet) -> Result<BasisSet> {
    let mut x = bases.bases().clone();
    let p = x.ncols();
    for j in 0..p {
        let ajj = stats.a[(j, j)];
        if ajj <= 1e-12 {
            continue;
        }
        let xa = x.dot(&stats.a.column(j));
        let mut col = x.column(j).to_owned();
        for i in 0..col.len() {
            col[i] += (stats.b[(i, j)] - xa[i]) / ajj;
        }
        let norm = col.dot(&col).sqrt();
        if norm > 1.0 {
            col.mapv_inplace(|v| v / norm);
        }
        x.column_mut(j).assign(&col);
    }
    BasisSet::new(x, bases.radius())
}

/// Everything a training run produces: the bases, the final-pass coefficient
/// vector for every training point, and the per-epoch objective trace.
#[derive(Debug)]
pub struct TrainOutcome {
    pub basis_set: BasisSet,
    pub activations: Vec<CoefficientVector>,
    pub objective_trace: Vec<f64>,
}

/// Learn `cfg.basis_count` bases for unit-row data.
pub fn train(data: &DataSet, cfg: &TrainConfig) -> Result<TrainOutcome> {
    let n = data.n();
    let d = data.dim();
    let p = cfg.basis_count;
    if p < 2 {
        return Err(Error::Config(format!("basis_count {p} must be at least 2")));
    }
    if !(cfg.radius > 0.0 && cfg.radius <= 1.0) {
        return Err(Error::Config(format!("radius {} outside (0, 1]", cfg.radius)));
    }
    if cfg.epochs == 0 {
        return Err(Error::Config("epochs must be at least 1".into()));
    }
    if cfg.batch_size == 0 {
        return Err(Error::Config("batch_size must be at least 1".into()));
    }
    data.require_unit_rows()?;
    if n < p {
        log::warn!("{n} points for {p} bases; initial bases will repeat");
    }

    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);

    // Initial bases: p distinct data points (cycling when p > N).
    let mut picks: Vec<usize> = (0..n).collect();
    picks.shuffle(&mut rng);
    let mut bases = Array2::zeros((d, p));
    for j in 0..p {
        bases.column_mut(j).assign(&data.row(picks[j % n]));
    }
    let mut basis_set = BasisSet::new(bases, cfg.radius)?;

    let full_batch = cfg.batch_size >= n;
    let mut stats = SufficientStats::new(d, p);
    let mut trace: Vec<f64> = Vec::with_capacity(cfg.epochs);
    let mut steps = 0usize;

    for epoch in 0..cfg.epochs {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        if full_batch {
            stats.reset();
        }

        let mut sq_err = vec![0.0f64; n];
        let mut active = vec![false; p];
        let mut err_sum = 0.0;

        for chunk in order.chunks(cfg.batch_size) {
            let solved = solve_chunk(data, &basis_set, chunk, &cfg.solver, epoch)?;
            for (&i, (coeffs, sq)) in chunk.iter().zip(&solved) {
                err_sum += sq;
                sq_err[i] = *sq;
                for &s in coeffs.support() {
                    active[s] = true;
                }
                if cfg.forget && !full_batch {
                    steps += 1;
                    stats.decay(1.0 - 1.0 / steps as f64);
                }
                stats.add(coeffs, data.row(i));
            }
            basis_set = update_bases(&stats, &basis_set)?;
        }

        let objective = err_sum / n as f64;
        trace.push(objective);

        if epoch > 0 {
            let prev = trace[epoch - 1];
            if (prev - objective).abs() / prev.max(1e-12) < cfg.tol_rel_objective {
                break;
            }
        }

        if epoch + 1 < cfg.epochs {
            reseed_dead_columns(&mut basis_set, &active, &sq_err, data, cfg.radius)?;
        }
    }

    // Final pass: activations for every point against the final bases.
    let order: Vec<usize> = (0..n).collect();
    let solved = solve_chunk(data, &basis_set, &order, &cfg.solver, cfg.epochs)?;
    let activations = solved.into_iter().map(|(c, _)| c).collect();

    Ok(TrainOutcome {
        basis_set,
        activations,
        objective_trace: trace,
    })
}

fn solve_chunk(
    data: &DataSet,
    basis_set: &BasisSet,
    chunk: &[usize],
    solver: &SolverConfig,
    epoch: usize,
) -> Result<Vec<(CoefficientVector, f64)>> {
    let solve_one = |&i: &usize| -> Result<(CoefficientVector, f64)> {
        let y = data.row(i);
        let coeffs = solve_simplex_ls(basis_set.bases().view(), y, basis_set.radius(), solver)
            .map_err(|e| Error::Training {
                epoch,
                point: i,
                source: Box::new(e),
            })?;
        let resid = &basis_set.bases().dot(coeffs.values()) - &y;
        Ok((coeffs, resid.dot(&resid)))
    };
    if chunk.len() < 16 {
        chunk.iter().map(solve_one).collect()
    } else {
        chunk.par_iter().map(solve_one).collect()
    }
}

/// A column no point activated all epoch restarts at a badly reconstructed
/// point; distinct dead columns get distinct points, worst first. Dead
/// columns carry no coefficient mass, so this never changes the objective.
fn reseed_dead_columns(
    basis_set: &mut BasisSet,
    active: &[bool],
    sq_err: &[f64],
    data: &DataSet,
    radius: f64,
) -> Result<()> {
    if active.iter().all(|a| *a) {
        return Ok(());
    }
    let mut ranked: Vec<usize> = (0..sq_err.len()).collect();
    ranked.sort_by(|&a, &b| {
        sq_err[b]
            .partial_cmp(&sq_err[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut bases = basis_set.bases().clone();
    let mut next = 0usize;
    for (j, is_active) in active.iter().enumerate() {
        if !is_active {
            bases
                .column_mut(j)
                .assign(&data.row(ranked[next % ranked.len()]));
            next += 1;
        }
    }
    *basis_set = BasisSet::new(bases, radius)?;
    Ok(())
}
