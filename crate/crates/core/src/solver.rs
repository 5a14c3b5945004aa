//! Least squares over a scaled probability simplex.
//!
//! Solves min ||y - X b||^2 subject to b >= 0 and sum(b) = r with a primal
//! active-set iteration: solve the equality-constrained problem on the
//! current working support, step to the boundary when a coordinate would go
//! negative, and grow the support by the coordinate with the most negative
//! reduced gradient until the KKT conditions hold.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};
use crate::model::{
    BasisSet, CoefficientVector, SimplicialModel, DEFAULT_ACTIVATION_THRESHOLD,
};

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Slack allowed in the dual feasibility check.
    pub kkt_tolerance: f64,
    /// Cap on working-set solves; `None` means 10x the column count.
    pub max_iterations: Option<usize>,
    /// Fraction of the mass below which an entry does not make the support.
    pub activation_threshold: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            kkt_tolerance: 1e-9,
            max_iterations: None,
            activation_threshold: DEFAULT_ACTIVATION_THRESHOLD,
        }
    }
}

/// Minimize ||y - X b||^2 over { b >= 0, sum(b) = radius }.
///
/// Ties (equal inner products at init, equal ratios at the boundary step,
/// equal reduced gradients) always resolve to the lowest index, so the
/// result is deterministic down to the bit.
pub fn solve_simplex_ls(
    design: ArrayView2<'_, f64>,
    target: ArrayView1<'_, f64>,
    radius: f64,
    cfg: &SolverConfig,
) -> Result<CoefficientVector> {
    let (d, k) = design.dim();
    if k == 0 {
        return Err(Error::Config("design has no columns".into()));
    }
    if target.len() != d {
        return Err(Error::Config(format!(
            "target length {} does not match design rows {d}",
            target.len()
        )));
    }
    if !(radius > 0.0 && radius <= 1.0) {
        return Err(Error::Config(format!("radius {radius} outside (0, 1]")));
    }
    if k == 1 {
        return CoefficientVector::new(
            Array1::from_elem(1, radius),
            radius,
            cfg.activation_threshold,
        );
    }

    let xty = design.t().dot(&target);
    let mut beta = Array1::<f64>::zeros(k);
    let mut start = 0usize;
    for i in 1..k {
        if xty[i] > xty[start] {
            start = i;
        }
    }
    beta[start] = radius;
    let mut support = vec![start];

    let max_iter = cfg.max_iterations.unwrap_or(10 * k).max(1);
    let mut iters = 0usize;
    let mut mu;

    loop {
        // Restricted solves until the working support is primal feasible.
        loop {
            iters += 1;
            if iters > max_iter {
                return Err(fail(design, &xty, &beta, &support, radius, iters - 1));
            }
            let (sol, m) = match restricted_kkt(design, &xty, &support, radius) {
                Some(v) => v,
                None => return Err(fail(design, &xty, &beta, &support, radius, iters)),
            };
            if sol.iter().all(|v| *v >= -1e-12) {
                for (idx, &i) in support.iter().enumerate() {
                    beta[i] = sol[idx].max(0.0);
                }
                mu = m;
                break;
            }
            // Step from the current iterate toward the restricted solution
            // until the first coordinate hits zero, then drop it.
            let mut theta = 1.0;
            let mut blocker = usize::MAX;
            for (idx, &i) in support.iter().enumerate() {
                if sol[idx] < 0.0 {
                    let t = beta[i] / (beta[i] - sol[idx]);
                    if t < theta {
                        theta = t;
                        blocker = idx;
                    }
                }
            }
            if blocker == usize::MAX {
                return Err(fail(design, &xty, &beta, &support, radius, iters));
            }
            for (idx, &i) in support.iter().enumerate() {
                beta[i] += theta * (sol[idx] - beta[i]);
            }
            beta[support[blocker]] = 0.0;
            support.remove(blocker);
            if support.is_empty() {
                return Err(fail(design, &xty, &beta, &support, radius, iters));
            }
        }

        // Dual feasibility: off-support gradients may not undercut mu.
        let grad = gradient(design, &xty, &beta);
        let mut entering = usize::MAX;
        let mut worst = -cfg.kkt_tolerance;
        for i in 0..k {
            if support.binary_search(&i).is_err() {
                let reduced = grad[i] - mu;
                if reduced < worst {
                    worst = reduced;
                    entering = i;
                }
            }
        }
        if entering == usize::MAX {
            let total = beta.sum();
            beta.mapv_inplace(|v| v * radius / total);
            return CoefficientVector::new(beta, radius, cfg.activation_threshold);
        }
        let pos = support.binary_search(&entering).unwrap_err();
        support.insert(pos, entering);
    }
}

/// Distance from `point` to the hull of the given basis columns, together
/// with the barycentric coefficients realizing it.
pub fn project_onto_simplex(
    point: ArrayView1<'_, f64>,
    basis_set: &BasisSet,
    vertices: &[usize],
    cfg: &SolverConfig,
) -> Result<(CoefficientVector, f64)> {
    let design = basis_set.columns_for(vertices);
    let coeffs = solve_simplex_ls(design.view(), point, basis_set.radius(), cfg)?;
    let residual = &design.dot(coeffs.values()) - &point;
    Ok((coeffs, residual.dot(&residual).sqrt()))
}

/// Best simplex of the model for `point`: lowest projection error, ties to
/// the lowest simplex index.
pub fn project_onto_model(
    point: ArrayView1<'_, f64>,
    model: &SimplicialModel,
    cfg: &SolverConfig,
) -> Result<(usize, CoefficientVector, f64)> {
    if model.simplices().is_empty() {
        return Err(Error::EmptyModel);
    }
    let mut best: Option<(usize, CoefficientVector, f64)> = None;
    for (t, s) in model.simplices().iter().enumerate() {
        let (coeffs, err) = project_onto_simplex(point, model.basis_set(), s.vertices(), cfg)?;
        if best.as_ref().map_or(true, |(_, _, e)| err < *e) {
            best = Some((t, coeffs, err));
        }
    }
    Ok(best.expect("at least one simplex"))
}

fn gradient(design: ArrayView2<'_, f64>, xty: &Array1<f64>, beta: &Array1<f64>) -> Array1<f64> {
    let fitted = design.dot(beta);
    2.0 * (design.t().dot(&fitted) - xty)
}

/// Equality-constrained solve on the support via the bordered KKT system
/// [2G 1; 1' 0] (b, -mu) = (2c, r), refactored from scratch on every call.
fn restricted_kkt(
    design: ArrayView2<'_, f64>,
    xty: &Array1<f64>,
    support: &[usize],
    radius: f64,
) -> Option<(Vec<f64>, f64)> {
    let s = support.len();
    let mut a = Array2::<f64>::zeros((s + 1, s + 1));
    let mut b = vec![0.0; s + 1];
    for (ii, &i) in support.iter().enumerate() {
        let ci = design.column(i);
        for (jj, &j) in support.iter().enumerate().skip(ii) {
            let g = 2.0 * ci.dot(&design.column(j));
            a[(ii, jj)] = g;
            a[(jj, ii)] = g;
        }
        a[(ii, s)] = 1.0;
        a[(s, ii)] = 1.0;
        b[ii] = 2.0 * xty[i];
    }
    b[s] = radius;
    if !lu_solve(&mut a, &mut b) {
        // Near-duplicate columns can make the Gram block defective; a tiny
        // ridge keeps the step deterministic without moving the optimum
        // beyond solver tolerance.
        let mut a2 = Array2::<f64>::zeros((s + 1, s + 1));
        let mut b2 = vec![0.0; s + 1];
        for (ii, &i) in support.iter().enumerate() {
            let ci = design.column(i);
            for (jj, &j) in support.iter().enumerate().skip(ii) {
                let g = 2.0 * ci.dot(&design.column(j));
                a2[(ii, jj)] = g;
                a2[(jj, ii)] = g;
            }
            a2[(ii, ii)] += 1e-10;
            a2[(ii, s)] = 1.0;
            a2[(s, ii)] = 1.0;
            b2[ii] = 2.0 * xty[i];
        }
        b2[s] = radius;
        if !lu_solve(&mut a2, &mut b2) {
            return None;
        }
        let nu = b2[s];
        return Some((b2[..s].to_vec(), -nu));
    }
    let nu = b[s];
    Some((b[..s].to_vec(), -nu))
}

/// In-place LU with partial pivoting; false means numerically singular.
fn lu_solve(a: &mut Array2<f64>, b: &mut [f64]) -> bool {
    let n = b.len();
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    for col in 0..n {
        let mut piv = col;
        for row in col + 1..n {
            if a[(row, col)].abs() > a[(piv, col)].abs() {
                piv = row;
            }
        }
        if a[(piv, col)].abs() < 1e-14 * scale {
            return false;
        }
        if piv != col {
            for j in 0..n {
                let tmp = a[(col, j)];
                a[(col, j)] = a[(piv, j)];
                a[(piv, j)] = tmp;
            }
            b.swap(col, piv);
        }
        for row in col + 1..n {
            let f = a[(row, col)] / a[(col, col)];
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                a[(row, j)] -= f * a[(col, j)];
            }
            b[row] -= f * b[col];
        }
    }
    for col in (0..n).rev() {
        let mut v = b[col];
        for j in col + 1..n {
            v -= a[(col, j)] * b[j];
        }
        b[col] = v / a[(col, col)];
    }
    true
}

fn fail(
    design: ArrayView2<'_, f64>,
    xty: &Array1<f64>,
    beta: &Array1<f64>,
    support: &[usize],
    radius: f64,
    iterations: usize,
) -> Error {
    let grad = gradient(design, xty, beta);
    let mu = if support.is_empty() {
        0.0
    } else {
        support.iter().map(|&i| grad[i]).sum::<f64>() / support.len() as f64
    };
    let mut residual = (beta.sum() - radius).abs();
    for i in 0..beta.len() {
        let r = if support.binary_search(&i).is_ok() {
            (grad[i] - mu).abs()
        } else {
            (mu - grad[i]).max(0.0)
        };
        residual = residual.max(r);
    }
    Error::SolverFailure {
        iterations,
        kkt_residual: residual,
        best: beta.to_vec(),
    }
}
