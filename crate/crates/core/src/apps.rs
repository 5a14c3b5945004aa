//! What a trained model is for: nearest-reconstruction classification,
//! a Dirichlet density per simplex, sampling new points, and lifting 2-d
//! observations back to the pose hull they came from.

use std::collections::BTreeMap;

use ndarray::{Array1, Array2, ArrayView1};
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::Gamma;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{CoefficientVector, DirichletParams, SimplicialModel};
use crate::solver::{project_onto_model, solve_simplex_ls, SolverConfig};
use crate::special::{digamma, inverse_digamma};

/// One model per label; prediction is the label whose model reconstructs
/// the point best.
#[derive(Debug)]
pub struct ClassModel {
    classes: BTreeMap<String, SimplicialModel>,
}

impl ClassModel {
    pub fn new(classes: BTreeMap<String, SimplicialModel>) -> Result<Self> {
        if classes.len() < 2 {
            return Err(Error::Validation(format!(
                "classification needs at least 2 classes, got {}",
                classes.len()
            )));
        }
        let mut dims = classes.values().map(|m| m.basis_set().dim());
        let d = dims.next().expect("non-empty");
        if dims.any(|other| other != d) {
            return Err(Error::Validation(
                "class models disagree on the data dimension".into(),
            ));
        }
        Ok(Self { classes })
    }

    pub fn classes(&self) -> &BTreeMap<String, SimplicialModel> {
        &self.classes
    }

    pub fn dim(&self) -> usize {
        self.classes
            .values()
            .next()
            .map(|m| m.basis_set().dim())
            .unwrap_or(0)
    }

    /// Predicted label plus the projection error under every class model.
    /// Ties go to the lexicographically smallest label.
    pub fn classify(
        &self,
        point: ArrayView1<'_, f64>,
        cfg: &SolverConfig,
    ) -> Result<(String, BTreeMap<String, f64>)> {
        let scored: Vec<(&str, f64)> = self
            .classes
            .par_iter()
            .map(|(label, model)| {
                let (_, _, err) = project_onto_model(point, model, cfg)?;
                Ok((label.as_str(), err))
            })
            .collect::<Result<_>>()?;
        let mut best: Option<(&str, f64)> = None;
        for &(label, err) in &scored {
            if best.map_or(true, |(_, e)| err < e) {
                best = Some((label, err));
            }
        }
        let errors = scored
            .iter()
            .map(|&(label, err)| (label.to_string(), err))
            .collect();
        let (label, _) = best.expect("at least two classes");
        Ok((label.to_string(), errors))
    }
}

/// Maximum likelihood Dirichlet concentration for barycentric samples
/// (rows sum to 1). Fixed-point iteration on the digamma identity, started
/// from moment matching; inputs are smoothed by 1e-6 so vertex-heavy
/// samples keep their logarithms finite.
pub fn fit_dirichlet(samples: &Array2<f64>, min_samples: usize) -> Result<DirichletParams> {
    let (m, k) = samples.dim();
    if k == 0 {
        return Err(Error::Validation("samples have no columns".into()));
    }
    for (i, row) in samples.outer_iter().enumerate() {
        if row.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Validation(format!(
                "sample {i} has a negative or non-finite entry"
            )));
        }
        if (row.sum() - 1.0).abs() > 1e-8 {
            return Err(Error::Validation(format!(
                "sample {i} sums to {}, expected 1",
                row.sum()
            )));
        }
    }
    if m < min_samples || k == 1 {
        return DirichletParams::new(vec![1.0; k]);
    }

    const EPS: f64 = 1e-6;
    let scale = 1.0 + k as f64 * EPS;
    let smoothed = samples.mapv(|v| (v + EPS) / scale);

    let mean_log: Vec<f64> = (0..k)
        .map(|j| smoothed.column(j).mapv(f64::ln).sum() / m as f64)
        .collect();

    // Moment matching for the starting point.
    let means: Vec<f64> = (0..k).map(|j| smoothed.column(j).sum() / m as f64).collect();
    let mut conc_votes = Vec::new();
    for j in 0..k {
        let mu = means[j];
        let var = smoothed
            .column(j)
            .iter()
            .map(|v| (v - mu) * (v - mu))
            .sum::<f64>()
            / m as f64;
        if var > 1e-12 {
            let s = mu * (1.0 - mu) / var - 1.0;
            if s.is_finite() && s > 0.0 {
                conc_votes.push(s);
            }
        }
    }
    let conc = if conc_votes.is_empty() {
        k as f64
    } else {
        conc_votes.iter().sum::<f64>() / conc_votes.len() as f64
    };
    let mut alpha: Vec<f64> = means.iter().map(|mu| (mu * conc).max(1e-6)).collect();

    for _ in 0..1000 {
        let psi_total = digamma(alpha.iter().sum());
        let mut delta = 0.0f64;
        for j in 0..k {
            let next = inverse_digamma(psi_total + mean_log[j]).max(1e-12);
            delta = delta.max((next - alpha[j]).abs());
            alpha[j] = next;
        }
        if delta < 1e-10 {
            break;
        }
    }
    DirichletParams::new(alpha)
}

/// Sample `count` points from the model: a simplex drawn with probability
/// proportional to its activation count, barycentric coordinates from its
/// Dirichlet scaled to the radius. One sequential seed stream, so a
/// (model, count, seed) triple always reproduces the same matrix.
pub fn synthesize(model: &SimplicialModel, count: usize, seed: u64) -> Result<Array2<f64>> {
    synthesize_with_indices(model, count, seed).map(|(points, _)| points)
}

/// [`synthesize`], also reporting which simplex produced each row.
pub fn synthesize_with_indices(
    model: &SimplicialModel,
    count: usize,
    seed: u64,
) -> Result<(Array2<f64>, Vec<usize>)> {
    if model.simplices().is_empty() {
        return Err(Error::EmptyModel);
    }
    let weights: Vec<f64> = model
        .simplices()
        .iter()
        .map(|s| s.activation_count() as f64)
        .collect();
    if weights.iter().sum::<f64>() <= 0.0 {
        return Err(Error::Synthesis(
            "every simplex has activation count 0".into(),
        ));
    }
    for (t, s) in model.simplices().iter().enumerate() {
        if s.dirichlet().is_none() {
            return Err(Error::Synthesis(format!(
                "simplex {t} has no dirichlet parameters; fit them first"
            )));
        }
    }

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let chooser = WeightedIndex::new(&weights)
        .map_err(|e| Error::Synthesis(format!("bad activation weights: {e}")))?;
    let d = model.basis_set().dim();
    let radius = model.basis_set().radius();
    let mut out = Array2::zeros((count, d));
    let mut picked = Vec::with_capacity(count);

    for row in 0..count {
        let t = chooser.sample(&mut rng);
        let simplex = model.simplex(t);
        let alpha = simplex.dirichlet().expect("checked above").alpha();
        let beta = sample_dirichlet(alpha, &mut rng)?;
        for (v, b) in simplex.vertices().iter().zip(&beta) {
            let col = model.basis_set().column(*v);
            for i in 0..d {
                out[(row, i)] += radius * b * col[i];
            }
        }
        picked.push(t);
    }
    Ok((out, picked))
}

/// Gamma draws normalized to the simplex. Retries the astronomically rare
/// all-underflow draw so the result always sums to one.
fn sample_dirichlet(alpha: &[f64], rng: &mut ChaCha20Rng) -> Result<Vec<f64>> {
    if alpha.len() == 1 {
        return Ok(vec![1.0]);
    }
    let gammas: Vec<Gamma<f64>> = alpha
        .iter()
        .map(|&a| Gamma::new(a, 1.0).map_err(|e| Error::Synthesis(format!("alpha {a}: {e}"))))
        .collect::<Result<_>>()?;
    for _ in 0..100 {
        let draws: Vec<f64> = gammas.iter().map(|g| g.sample(rng)).collect();
        let total: f64 = draws.iter().sum();
        if total > 1e-300 {
            return Ok(draws.into_iter().map(|v| v / total).collect());
        }
    }
    Err(Error::Synthesis("dirichlet draws kept underflowing".into()))
}

/// Weak-perspective camera: two rows of a 3-column matrix.
#[derive(Debug, Clone)]
pub struct CameraMatrix {
    m: Array2<f64>,
}

impl CameraMatrix {
    pub fn new(m: Array2<f64>) -> Result<Self> {
        if m.dim() != (2, 3) {
            return Err(Error::Validation(format!(
                "camera must be 2x3, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("camera has a non-finite entry".into()));
        }
        // Smallest singular value of a 2x3 matrix, closed form via M M'.
        let g00 = m.row(0).dot(&m.row(0));
        let g01 = m.row(0).dot(&m.row(1));
        let g11 = m.row(1).dot(&m.row(1));
        let tr = g00 + g11;
        let det = g00 * g11 - g01 * g01;
        let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
        let s_min = (tr / 2.0 - disc).max(0.0).sqrt();
        let s_max = (tr / 2.0 + disc).sqrt();
        if s_min <= 1e-12 * s_max.max(1.0) {
            log::warn!("camera matrix is rank deficient; observations lose a direction");
        }
        Ok(Self { m })
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.m
    }

    /// Apply to a joint-major pose vector [x1 y1 z1 x2 ...], producing
    /// joint-major image coordinates [u1 v1 u2 ...].
    pub fn project_pose(&self, pose: ArrayView1<'_, f64>) -> Array1<f64> {
        let joints = pose.len() / 3;
        let mut out = Array1::zeros(2 * joints);
        for j in 0..joints {
            let p = pose.slice(ndarray::s![3 * j..3 * j + 3]);
            out[2 * j] = self.m.row(0).dot(&p);
            out[2 * j + 1] = self.m.row(1).dot(&p);
        }
        out
    }
}

/// A 3-d pose flattened joint-major to length 3n.
#[derive(Debug, Clone)]
pub struct PoseVector {
    values: Array1<f64>,
}

impl PoseVector {
    pub fn new(values: Array1<f64>) -> Result<Self> {
        if values.is_empty() || values.len() % 3 != 0 {
            return Err(Error::Validation(format!(
                "pose length {} is not a positive multiple of 3",
                values.len()
            )));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &Array1<f64> {
        &self.values
    }

    pub fn joints(&self) -> usize {
        self.values.len() / 3
    }
}

/// Result of lifting one 2-d observation through the model.
#[derive(Debug)]
pub struct PoseEstimate {
    pub pose: PoseVector,
    pub simplex: usize,
    pub coeffs: CoefficientVector,
    pub residual: f64,
}

/// Brute-force search over the simplices: project every vertex through the
/// camera, solve the constrained fit in image space, keep the simplex with
/// the smallest residual (lowest index on ties). The model dimension must
/// be 3n and the observation 2n, joint-major.
pub fn estimate_pose(
    model: &SimplicialModel,
    camera: &CameraMatrix,
    observed: ArrayView1<'_, f64>,
    cfg: &SolverConfig,
) -> Result<PoseEstimate> {
    let d = model.basis_set().dim();
    if d % 3 != 0 {
        return Err(Error::Validation(format!(
            "model dimension {d} is not a multiple of 3"
        )));
    }
    if model.simplices().is_empty() {
        return Err(Error::EmptyModel);
    }
    let joints = d / 3;
    if observed.len() != 2 * joints {
        return Err(Error::Validation(format!(
            "observation length {} does not match {joints} joints",
            observed.len()
        )));
    }

    let radius = model.basis_set().radius();
    let fits: Vec<Option<(usize, CoefficientVector, f64)>> = model
        .simplices()
        .par_iter()
        .enumerate()
        .map(|(t, s)| {
            let mut design = Array2::zeros((2 * joints, s.vertices().len()));
            for (col, &v) in s.vertices().iter().enumerate() {
                design
                    .column_mut(col)
                    .assign(&camera.project_pose(model.basis_set().column(v)));
            }
            let coeffs = solve_simplex_ls(design.view(), observed, radius, cfg).ok()?;
            let resid = &design.dot(coeffs.values()) - &observed;
            Some((t, coeffs, resid.dot(&resid).sqrt()))
        })
        .collect();
    let attempted = fits.len();
    let mut best: Option<(usize, CoefficientVector, f64)> = None;
    for fit in fits.into_iter().flatten() {
        if best.as_ref().map_or(true, |(_, _, r)| fit.2 < *r) {
            best = Some(fit);
        }
    }
    let (simplex, coeffs, residual) = best.ok_or_else(|| {
        Error::Estimation(format!("solver failed on all {attempted} simplices"))
    })?;

    let s = model.simplex(simplex);
    let mut pose = Array1::zeros(d);
    for (b, &v) in coeffs.values().iter().zip(s.vertices()) {
        let col = model.basis_set().column(v);
        for i in 0..d {
            pose[i] += b * col[i];
        }
    }
    Ok(PoseEstimate {
        pose: PoseVector::new(pose)?,
        simplex,
        coeffs,
        residual,
    })
}

/// Sliding-window stacking: row i of the result is rows i..i+window of the
/// input laid end to end. The usual preparation for sequence snippets.
pub fn stack_snippets(points: &Array2<f64>, window: usize) -> Result<Array2<f64>> {
    let (n, d) = points.dim();
    if window == 0 {
        return Err(Error::Config("window must be at least 1".into()));
    }
    if n < window {
        return Err(Error::Config(format!(
            "{n} rows cannot fill a window of {window}"
        )));
    }
    let mut out = Array2::zeros((n - window + 1, d * window));
    for i in 0..=n - window {
        for w in 0..window {
            for j in 0..d {
                out[(i, w * d + j)] = points[(i + w, j)];
            }
        }
    }
    Ok(out)
}
