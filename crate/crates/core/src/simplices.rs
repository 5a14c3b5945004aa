//! From coefficients to structure: which simplices the data activated,
//! which of those to keep, and where the resulting complex has a boundary.

use std::collections::{BTreeMap, BTreeSet};

use ndarray::Array2;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{BasisSet, CoefficientVector, DataSet, Simplex, SimplicialModel};
use crate::solver::{project_onto_simplex, SolverConfig};

/// Group the coefficient supports of all training points: one simplex per
/// distinct support, counting how many points landed on it. Ordered by
/// descending count, ties in lexicographic vertex order.
pub fn extract_simplices(activations: &[CoefficientVector]) -> Result<Vec<Simplex>> {
    let mut counts: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for (point, c) in activations.iter().enumerate() {
        if c.support().is_empty() {
            return Err(Error::EmptySupport { point });
        }
        *counts.entry(c.support().to_vec()).or_insert(0) += 1;
    }
    let mut entries: Vec<(Vec<usize>, usize)> = counts.into_iter().collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    entries
        .into_iter()
        .map(|(vertices, count)| Simplex::new(vertices, count))
        .collect()
}

#[derive(Debug, Clone)]
pub struct PruneConfig {
    /// Penalty per kept simplex; `None` means 0.001 / candidate count.
    pub lambda1: Option<f64>,
    /// Penalty per kept dimension; `None` means 0.01 / candidate count.
    pub lambda2: Option<f64>,
    pub solver: SolverConfig,
}

impl Default for PruneConfig {
    fn default() -> Self {
        Self {
            lambda1: None,
            lambda2: None,
            solver: SolverConfig::default(),
        }
    }
}

/// One accepted greedy step: which candidate went in and where that left
/// the loss and the penalized objective.
#[derive(Debug, Clone)]
pub struct PruneStep {
    pub candidate: usize,
    pub selected_count: usize,
    pub loss: f64,
    pub objective: f64,
}

/// Forward selection over the candidate simplices, minimizing
/// mean projection distance + lambda1 * count + lambda2 * total dimension.
/// Steps are accepted only while the objective strictly decreases.
pub fn prune(
    candidates: &[Simplex],
    data: &DataSet,
    basis_set: &BasisSet,
    cfg: &PruneConfig,
) -> Result<SimplicialModel> {
    prune_with_trace(candidates, data, basis_set, cfg).map(|(m, _)| m)
}

/// Like [`prune`] but also reports the greedy trajectory.
pub fn prune_with_trace(
    candidates: &[Simplex],
    data: &DataSet,
    basis_set: &BasisSet,
    cfg: &PruneConfig,
) -> Result<(SimplicialModel, Vec<PruneStep>)> {
    if candidates.is_empty() {
        return Err(Error::EmptyModel);
    }
    let t_count = candidates.len();
    let n = data.n();
    let lambda1 = cfg.lambda1.unwrap_or(0.001 / t_count as f64);
    let lambda2 = cfg.lambda2.unwrap_or(0.01 / t_count as f64);

    // Projection distance of every point onto every candidate, once.
    let rows: Vec<Vec<f64>> = candidates
        .par_iter()
        .map(|s| -> Result<Vec<f64>> {
            (0..n)
                .map(|i| {
                    project_onto_simplex(data.row(i), basis_set, s.vertices(), &cfg.solver)
                        .map(|(_, err)| err)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut table = Array2::zeros((t_count, n));
    for (t, row) in rows.into_iter().enumerate() {
        for (i, v) in row.into_iter().enumerate() {
            table[(t, i)] = v;
        }
    }

    // With nothing selected each point is approximated by nothing at all:
    // its distance is its own norm (1 for unit data).
    let mut best_err: Vec<f64> = (0..n).map(|i| data.row(i).dot(&data.row(i)).sqrt()).collect();
    let mut objective = best_err.iter().sum::<f64>() / n as f64;
    let mut selected = vec![false; t_count];
    let mut dim_total = 0usize;
    let mut trace = Vec::new();

    loop {
        let mut pick: Option<(usize, f64, f64)> = None;
        for t in 0..t_count {
            if selected[t] {
                continue;
            }
            let mut sum = 0.0;
            for i in 0..n {
                sum += best_err[i].min(table[(t, i)]);
            }
            let loss = sum / n as f64;
            let count = trace.len() + 1;
            let obj = loss
                + lambda1 * count as f64
                + lambda2 * (dim_total + candidates[t].dimension()) as f64;
            if pick.as_ref().map_or(true, |(_, _, o)| obj < *o) {
                pick = Some((t, loss, obj));
            }
        }
        match pick {
            Some((t, loss, obj)) if obj < objective => {
                selected[t] = true;
                dim_total += candidates[t].dimension();
                for i in 0..n {
                    best_err[i] = best_err[i].min(table[(t, i)]);
                }
                objective = obj;
                trace.push(PruneStep {
                    candidate: t,
                    selected_count: trace.len() + 1,
                    loss,
                    objective: obj,
                });
            }
            _ => break,
        }
    }

    let kept: Vec<Simplex> = candidates
        .iter()
        .enumerate()
        .filter(|(t, _)| selected[*t])
        .map(|(_, s)| s.clone())
        .collect();
    let model = SimplicialModel::new(
        basis_set.clone(),
        kept,
        true,
        Vec::new(),
        serde_json::Map::new(),
    )?;
    Ok((model, trace))
}

/// Indices of the simplices whose vertex set is not a strict subset of any
/// other simplex in the model.
pub fn maximal_simplices(model: &SimplicialModel) -> Vec<usize> {
    let sets: Vec<&[usize]> = model.simplices().iter().map(|s| s.vertices()).collect();
    (0..sets.len())
        .filter(|&i| {
            !sets
                .iter()
                .enumerate()
                .any(|(j, other)| j != i && sets[i].len() < other.len() && is_subset(sets[i], other))
        })
        .collect()
}

/// Codimension-one faces of the maximal simplices that belong to exactly one
/// maximal simplex. Purely combinatorial; faces come back sorted.
pub fn boundary_simplices(model: &SimplicialModel) -> Vec<Vec<usize>> {
    let maximal: Vec<&[usize]> = maximal_simplices(model)
        .into_iter()
        .map(|i| model.simplex(i).vertices())
        .collect();
    let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
    for m in &maximal {
        if m.len() < 2 {
            continue;
        }
        for drop in 0..m.len() {
            let face: Vec<usize> = m
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != drop)
                .map(|(_, v)| *v)
                .collect();
            faces.insert(face);
        }
    }
    faces
        .into_iter()
        .filter(|face| {
            maximal.iter().filter(|m| is_subset(face, m)).count() == 1
        })
        .collect()
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    let mut it = b.iter();
    'outer: for v in a {
        for w in it.by_ref() {
            if w == v {
                continue 'outer;
            }
            if w > v {
                return false;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BasisSet, CoefficientVector};
    use ndarray::{array, Array1};

    fn coeffs(values: Array1<f64>) -> CoefficientVector {
        CoefficientVector::new(values, 1.0, 1e-6).unwrap()
    }

    #[test]
    fn extraction_groups_identical_supports() {
        let acts = vec![
            coeffs(array![1.0, 0.0]),
            coeffs(array![1.0, 0.0]),
            coeffs(array![0.5, 0.5]),
        ];
        let simplices = extract_simplices(&acts).unwrap();
        assert_eq!(simplices.len(), 2);
        assert_eq!(simplices[0].vertices(), &[0]);
        assert_eq!(simplices[0].activation_count(), 2);
        assert_eq!(simplices[1].vertices(), &[0, 1]);
        assert_eq!(simplices[1].activation_count(), 1);
    }

    #[test]
    fn extraction_order_breaks_count_ties_lexicographically() {
        let acts = vec![coeffs(array![0.0, 0.5, 0.5]), coeffs(array![0.5, 0.5, 0.0])];
        let simplices = extract_simplices(&acts).unwrap();
        assert_eq!(simplices[0].vertices(), &[0, 1]);
        assert_eq!(simplices[1].vertices(), &[1, 2]);
    }

    #[test]
    fn pruning_keeps_the_simplex_that_explains_the_data() {
        // all points sit on vertex 0; the segment only adds penalty
        let bases = BasisSet::new(array![[1.0, 0.0], [0.0, 1.0]], 1.0).unwrap();
        let pts = array![[1.0, 0.0], [1.0, 0.0], [1.0, 0.0], [1.0, 0.0]];
        let data = crate::geometry::normalize(&pts).unwrap();
        let candidates = vec![
            Simplex::new(vec![0], 4).unwrap(),
            Simplex::new(vec![0, 1], 1).unwrap(),
        ];
        let (model, trace) =
            prune_with_trace(&candidates, &data, &bases, &PruneConfig::default()).unwrap();
        assert_eq!(model.simplices().len(), 1);
        assert_eq!(model.simplex(0).vertices(), &[0]);
        assert!(model.pruned());
        assert_eq!(trace.len(), 1);
        assert!(trace[0].loss < 1e-12);
    }

    #[test]
    fn greedy_objective_strictly_decreases() {
        let bases = BasisSet::new(array![[1.0, 0.0, -1.0], [0.0, 1.0, 0.0]], 1.0).unwrap();
        let pts = array![[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.6, 0.8]];
        let data = crate::geometry::normalize(&pts).unwrap();
        let candidates = vec![
            Simplex::new(vec![0], 1).unwrap(),
            Simplex::new(vec![1], 1).unwrap(),
            Simplex::new(vec![2], 1).unwrap(),
            Simplex::new(vec![0, 1], 1).unwrap(),
        ];
        let (_, trace) =
            prune_with_trace(&candidates, &data, &bases, &PruneConfig::default()).unwrap();
        assert!(!trace.is_empty());
        let mut last = 1.0;
        for step in &trace {
            assert!(step.objective < last);
            last = step.objective;
        }
    }

    #[test]
    fn empty_candidate_list_is_an_error() {
        let bases = BasisSet::new(array![[1.0, 0.0], [0.0, 1.0]], 1.0).unwrap();
        let data = crate::geometry::normalize(&array![[1.0, 0.0]]).unwrap();
        assert!(matches!(
            prune(&[], &data, &bases, &PruneConfig::default()),
            Err(Error::EmptyModel)
        ));
    }

    fn model_with(simplices: Vec<Vec<usize>>) -> SimplicialModel {
        let p = 1 + simplices.iter().flatten().max().copied().unwrap_or(1);
        let mut bases = Array2::zeros((p, p));
        for j in 0..p {
            bases[(j, j)] = 1.0;
        }
        let simplices = simplices
            .into_iter()
            .map(|v| Simplex::new(v, 1).unwrap())
            .collect();
        SimplicialModel::new(
            BasisSet::new(bases, 1.0).unwrap(),
            simplices,
            false,
            vec![],
            serde_json::Map::new(),
        )
        .unwrap()
    }

    use ndarray::Array2;

    #[test]
    fn maximal_excludes_strict_subsets() {
        let model = model_with(vec![vec![0, 1], vec![0, 1, 2], vec![3]]);
        assert_eq!(maximal_simplices(&model), vec![1, 2]);
    }

    #[test]
    fn two_triangles_share_one_interior_edge() {
        let model = model_with(vec![vec![0, 1, 2], vec![1, 2, 3]]);
        let boundary = boundary_simplices(&model);
        assert_eq!(
            boundary,
            vec![vec![0, 1], vec![0, 2], vec![1, 3], vec![2, 3]]
        );
    }

    #[test]
    fn lone_triangle_is_all_boundary() {
        let model = model_with(vec![vec![0, 1, 2]]);
        let boundary = boundary_simplices(&model);
        assert_eq!(boundary, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn zero_dimensional_maximal_simplices_have_no_faces() {
        let model = model_with(vec![vec![0], vec![1, 2]]);
        let boundary = boundary_simplices(&model);
        assert_eq!(boundary, vec![vec![1], vec![2]]);
    }
}
