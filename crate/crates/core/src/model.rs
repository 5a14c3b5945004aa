//! Core data types and the on-disk model format.
//!
//! A model is a set of bases (columns of a d x p matrix, each inside the unit
//! ball) together with the simplices the training data activated on their
//! hull. Models are stored as versioned JSON with scalars printed to 17
//! significant digits, so a save/load round trip reproduces every float
//! bit for bit.

use std::collections::BTreeSet;
use std::io;
use std::path::Path;

use ndarray::{Array1, Array2, ArrayView1};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

/// Fraction of the coefficient mass below which an entry does not count as
/// an activation.
pub const DEFAULT_ACTIVATION_THRESHOLD: f64 = 1e-6;

/// Rows are observations. Labels, when present, run parallel to the rows.
#[derive(Debug, Clone)]
pub struct DataSet {
    points: Array2<f64>,
    labels: Option<Vec<String>>,
    meta: Map<String, Value>,
}

impl DataSet {
    pub fn new(points: Array2<f64>, labels: Option<Vec<String>>) -> Result<Self> {
        if points.nrows() == 0 || points.ncols() == 0 {
            return Err(Error::Validation("data set must be non-empty".into()));
        }
        if let Some((row, _)) = points
            .outer_iter()
            .enumerate()
            .find(|(_, r)| r.iter().any(|v| !v.is_finite()))
        {
            return Err(Error::DegenerateInput {
                row,
                message: "non-finite coordinate".into(),
            });
        }
        if let Some(l) = &labels {
            if l.len() != points.nrows() {
                return Err(Error::Validation(format!(
                    "{} labels for {} rows",
                    l.len(),
                    points.nrows()
                )));
            }
        }
        Ok(Self {
            points,
            labels,
            meta: Map::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.points.nrows()
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn points(&self) -> &Array2<f64> {
        &self.points
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.points.row(i)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn meta(&self) -> &Map<String, Value> {
        &self.meta
    }

    pub fn meta_mut(&mut self) -> &mut Map<String, Value> {
        &mut self.meta
    }

    /// Verify every row sits on the unit sphere (tolerance 1e-9).
    pub fn require_unit_rows(&self) -> Result<()> {
        for (i, r) in self.points.outer_iter().enumerate() {
            let norm = r.dot(&r).sqrt();
            if (norm - 1.0).abs() > 1e-9 {
                return Err(Error::Validation(format!(
                    "row {i} has norm {norm}; expected unit rows"
                )));
            }
        }
        Ok(())
    }
}

/// Learned vertices: columns of `bases` (d x p), plus the coefficient mass
/// `radius` the solver distributes over them.
#[derive(Debug, Clone)]
pub struct BasisSet {
    bases: Array2<f64>,
    radius: f64,
}

impl BasisSet {
    pub fn new(bases: Array2<f64>, radius: f64) -> Result<Self> {
        if bases.ncols() < 2 {
            return Err(Error::Validation(format!(
                "need at least 2 bases, got {}",
                bases.ncols()
            )));
        }
        if bases.nrows() == 0 {
            return Err(Error::Validation("bases must have dimension >= 1".into()));
        }
        if !(radius > 0.0 && radius <= 1.0) {
            return Err(Error::Validation(format!(
                "radius {radius} outside (0, 1]"
            )));
        }
        for (j, col) in bases.columns().into_iter().enumerate() {
            if col.iter().any(|v| !v.is_finite()) {
                return Err(Error::Validation(format!("basis {j} has a non-finite entry")));
            }
            let norm = col.dot(&col).sqrt();
            if norm > 1.0 + 1e-9 {
                return Err(Error::Validation(format!(
                    "basis {j} has norm {norm} > 1"
                )));
            }
        }
        Ok(Self { bases, radius })
    }

    pub fn dim(&self) -> usize {
        self.bases.nrows()
    }

    pub fn count(&self) -> usize {
        self.bases.ncols()
    }

    pub fn bases(&self) -> &Array2<f64> {
        &self.bases
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn column(&self, j: usize) -> ArrayView1<'_, f64> {
        self.bases.column(j)
    }

    /// Columns picked out by `indices`, as a fresh d x k matrix.
    pub fn columns_for(&self, indices: &[usize]) -> Array2<f64> {
        let mut out = Array2::zeros((self.dim(), indices.len()));
        for (k, &j) in indices.iter().enumerate() {
            out.column_mut(k).assign(&self.bases.column(j));
        }
        out
    }
}

/// Output of a simplex-constrained solve: nonnegative, sums to the radius.
/// `support` holds the indices that carry more than a threshold fraction of
/// the mass; it is what turns coefficients into simplices.
#[derive(Debug, Clone)]
pub struct CoefficientVector {
    values: Array1<f64>,
    support: Vec<usize>,
}

impl CoefficientVector {
    pub fn new(values: Array1<f64>, radius: f64, activation_threshold: f64) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Validation(
                "coefficients must be finite and nonnegative".into(),
            ));
        }
        let sum: f64 = values.sum();
        if (sum - radius).abs() > 1e-8 {
            return Err(Error::Validation(format!(
                "coefficient mass {sum} differs from radius {radius}"
            )));
        }
        let cut = activation_threshold * radius;
        let support = values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v > cut)
            .map(|(i, _)| i)
            .collect();
        Ok(Self { values, support })
    }

    pub fn values(&self) -> &Array1<f64> {
        &self.values
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Values restricted to the support, in support order.
    pub fn support_values(&self) -> Vec<f64> {
        self.support.iter().map(|&i| self.values[i]).collect()
    }
}

/// Dirichlet concentration over the barycentric coordinates of one simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletParams {
    alpha: Vec<f64>,
}

impl DirichletParams {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::Validation("alpha must be non-empty".into()));
        }
        if alpha.iter().any(|a| !a.is_finite() || *a <= 0.0) {
            return Err(Error::Validation(
                "alpha entries must be finite and positive".into(),
            ));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }
}

/// A facet of the basis hull, identified by the sorted vertex indices that
/// some training points activated together.
#[derive(Debug, Clone)]
pub struct Simplex {
    vertices: Vec<usize>,
    activation_count: usize,
    dirichlet: Option<DirichletParams>,
}

impl Simplex {
    pub fn new(vertices: Vec<usize>, activation_count: usize) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Validation("simplex needs at least one vertex".into()));
        }
        if vertices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Validation(format!(
                "vertices {vertices:?} are not strictly increasing"
            )));
        }
        Ok(Self {
            vertices,
            activation_count,
            dirichlet: None,
        })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn dimension(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn activation_count(&self) -> usize {
        self.activation_count
    }

    pub fn dirichlet(&self) -> Option<&DirichletParams> {
        self.dirichlet.as_ref()
    }

    pub fn set_dirichlet(&mut self, params: DirichletParams) -> Result<()> {
        if params.len() != self.vertices.len() {
            return Err(Error::Validation(format!(
                "alpha length {} does not match {} vertices",
                params.len(),
                self.vertices.len()
            )));
        }
        self.dirichlet = Some(params);
        Ok(())
    }
}

/// A basis set plus the simplices activated on it.
#[derive(Debug, Clone)]
pub struct SimplicialModel {
    basis_set: BasisSet,
    simplices: Vec<Simplex>,
    pruned: bool,
    training_stats: Vec<f64>,
    meta: Map<String, Value>,
}

impl SimplicialModel {
    pub fn new(
        basis_set: BasisSet,
        simplices: Vec<Simplex>,
        pruned: bool,
        training_stats: Vec<f64>,
        meta: Map<String, Value>,
    ) -> Result<Self> {
        let p = basis_set.count();
        let d = basis_set.dim();
        let mut seen = BTreeSet::new();
        for s in &simplices {
            if let Some(&last) = s.vertices().last() {
                if last >= p {
                    return Err(Error::Validation(format!(
                        "vertex index {last} out of range for {p} bases"
                    )));
                }
            }
            if s.dimension() > d || s.dimension() > p - 1 {
                return Err(Error::Validation(format!(
                    "simplex {:?} has dimension {} in ambient dimension {d} with {p} bases",
                    s.vertices(),
                    s.dimension()
                )));
            }
            if let Some(dir) = s.dirichlet() {
                if dir.len() != s.vertices().len() {
                    return Err(Error::Validation(format!(
                        "alpha length {} does not match simplex {:?}",
                        dir.len(),
                        s.vertices()
                    )));
                }
            }
            if !seen.insert(s.vertices().to_vec()) {
                return Err(Error::Validation(format!(
                    "duplicate simplex {:?}",
                    s.vertices()
                )));
            }
        }
        if training_stats.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("objective trace must be finite".into()));
        }
        Ok(Self {
            basis_set,
            simplices,
            pruned,
            training_stats,
            meta,
        })
    }

    pub fn basis_set(&self) -> &BasisSet {
        &self.basis_set
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn simplex(&self, t: usize) -> &Simplex {
        &self.simplices[t]
    }

    pub fn pruned(&self) -> bool {
        self.pruned
    }

    pub fn training_stats(&self) -> &[f64] {
        &self.training_stats
    }

    pub fn meta(&self) -> &Map<String, Value> {
        &self.meta
    }

    pub fn meta_mut(&mut self) -> &mut Map<String, Value> {
        &mut self.meta
    }

    pub fn set_dirichlet(&mut self, simplex: usize, params: DirichletParams) -> Result<()> {
        self.simplices
            .get_mut(simplex)
            .ok_or(Error::EmptyModel)?
            .set_dirichlet(params)
    }

    /// Serialize to the versioned JSON format.
    pub fn to_json(&self) -> String {
        let doc = ModelDoc::from(self);
        let mut buf = Vec::new();
        let fmt = SigDigitFormatter::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, fmt);
        doc.serialize(&mut ser).expect("in-memory serialization");
        buf.push(b'\n');
        String::from_utf8(buf).expect("serializer emits utf-8")
    }

    /// Parse and validate the JSON format. Rejects anything that would
    /// violate a model invariant, not just malformed syntax.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDoc = serde_json::from_str(text).map_err(|e| Error::Parse {
            context: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        doc.into_model()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }
}

pub(crate) const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct SimplexDoc {
    vertices: Vec<usize>,
    count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    version: u32,
    d: usize,
    p: usize,
    radius: f64,
    bases: Vec<Vec<f64>>,
    simplices: Vec<SimplexDoc>,
    pruned: bool,
    meta: Map<String, Value>,
}

impl From<&SimplicialModel> for ModelDoc {
    fn from(m: &SimplicialModel) -> Self {
        let b = m.basis_set();
        let mut meta = m.meta.clone();
        if !m.training_stats.is_empty() {
            meta.insert(
                "objective_trace".into(),
                Value::Array(
                    m.training_stats
                        .iter()
                        .map(|v| serde_json::Number::from_f64(*v).map(Value::Number))
                        .map(|v| v.expect("trace is finite"))
                        .collect(),
                ),
            );
        }
        ModelDoc {
            version: FORMAT_VERSION,
            d: b.dim(),
            p: b.count(),
            radius: b.radius(),
            bases: b
                .bases()
                .columns()
                .into_iter()
                .map(|c| c.to_vec())
                .collect(),
            simplices: m
                .simplices
                .iter()
                .map(|s| SimplexDoc {
                    vertices: s.vertices().to_vec(),
                    count: s.activation_count(),
                    alpha: s.dirichlet().map(|d| d.alpha().to_vec()),
                })
                .collect(),
            pruned: m.pruned,
            meta,
        }
    }
}

impl ModelDoc {
    fn into_model(self) -> Result<SimplicialModel> {
        if self.version != FORMAT_VERSION {
            return Err(Error::Validation(format!(
                "unsupported format version {}",
                self.version
            )));
        }
        if self.bases.len() != self.p {
            return Err(Error::Validation(format!(
                "p = {} but {} basis columns present",
                self.p,
                self.bases.len()
            )));
        }
        let mut bases = Array2::zeros((self.d, self.p));
        for (j, col) in self.bases.iter().enumerate() {
            if col.len() != self.d {
                return Err(Error::Validation(format!(
                    "basis {j} has {} coordinates, expected {}",
                    col.len(),
                    self.d
                )));
            }
            for (i, v) in col.iter().enumerate() {
                bases[(i, j)] = *v;
            }
        }
        let basis_set = BasisSet::new(bases, self.radius)?;
        let mut simplices = Vec::with_capacity(self.simplices.len());
        for sd in self.simplices {
            let mut s = Simplex::new(sd.vertices, sd.count)?;
            if let Some(alpha) = sd.alpha {
                s.set_dirichlet(DirichletParams::new(alpha)?)?;
            }
            simplices.push(s);
        }
        let mut meta = self.meta;
        let training_stats = match meta.remove("objective_trace") {
            None => Vec::new(),
            Some(Value::Array(vals)) => vals
                .into_iter()
                .map(|v| {
                    v.as_f64().ok_or_else(|| {
                        Error::Validation("objective trace must be numeric".into())
                    })
                })
                .collect::<Result<Vec<f64>>>()?,
            Some(_) => {
                return Err(Error::Validation("objective trace must be an array".into()));
            }
        };
        SimplicialModel::new(basis_set, simplices, self.pruned, training_stats, meta)
    }
}

/// Pretty printer that forces floats to 17 significant digits, enough to
/// reproduce any f64 exactly on reload.
struct SigDigitFormatter<'a> {
    inner: serde_json::ser::PrettyFormatter<'a>,
}

impl SigDigitFormatter<'_> {
    fn new() -> Self {
        Self {
            inner: serde_json::ser::PrettyFormatter::new(),
        }
    }
}

impl serde_json::ser::Formatter for SigDigitFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object_value(writer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    fn toy_model() -> SimplicialModel {
        let bases = array![[1.0, 0.0, 0.6], [0.0, 1.0, 0.8]];
        let basis_set = BasisSet::new(bases, 1.0).unwrap();
        let mut s0 = Simplex::new(vec![0, 1], 7).unwrap();
        s0.set_dirichlet(DirichletParams::new(vec![2.0, 5.0]).unwrap())
            .unwrap();
        let s1 = Simplex::new(vec![2], 3).unwrap();
        let mut meta = Map::new();
        meta.insert("norm".into(), Value::String("unit".into()));
        SimplicialModel::new(
            basis_set,
            vec![s0, s1],
            false,
            vec![0.5, 0.25, 0.125],
            meta,
        )
        .unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let m = toy_model();
        let text = m.to_json();
        let back = SimplicialModel::from_json(&text).unwrap();
        assert_eq!(back.basis_set().bases(), m.basis_set().bases());
        assert_eq!(back.basis_set().radius(), m.basis_set().radius());
        assert_eq!(back.simplices().len(), 2);
        assert_eq!(back.simplex(0).vertices(), &[0, 1]);
        assert_eq!(back.simplex(0).activation_count(), 7);
        assert_eq!(back.simplex(0).dirichlet().unwrap().alpha(), &[2.0, 5.0]);
        assert!(back.simplex(1).dirichlet().is_none());
        assert_eq!(back.training_stats(), m.training_stats());
        assert_eq!(back.meta(), m.meta());
        assert!(!back.pruned());
    }

    #[test]
    fn floats_are_written_with_17_significant_digits() {
        let m = toy_model();
        let text = m.to_json();
        // 0.8 is not representable; 17 digits pin down the actual f64
        assert!(text.contains("8.0000000000000004e-1"), "{text}");
    }

    #[test]
    fn save_load_round_trip_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("toy.asx");
        let m = toy_model();
        m.save(&path).unwrap();
        let back = SimplicialModel::load(&path).unwrap();
        assert_eq!(back.basis_set().bases(), m.basis_set().bases());
        assert_eq!(back.training_stats().len(), m.training_stats().len());
    }

    fn doc(simplices: &str) -> String {
        format!(
            r#"{{"version":1,"d":2,"p":2,"radius":1.0,
                "bases":[[1.0,0.0],[0.0,1.0]],
                "simplices":[{simplices}],"pruned":false,"meta":{{}}}}"#
        )
    }

    #[test]
    fn load_rejects_oversized_basis_norm() {
        let text = toy_model().to_json().replace("8.0000000000000004e-1", "1.5e0");
        let err = SimplicialModel::from_json(&text).unwrap_err();
        assert!(err.to_string().contains("norm"), "{err}");
    }

    #[test]
    fn load_rejects_out_of_range_vertex() {
        let err =
            SimplicialModel::from_json(&doc(r#"{"vertices":[0,9],"count":1}"#)).unwrap_err();
        assert!(err.to_string().contains("out of range"), "{err}");
    }

    #[test]
    fn load_rejects_bad_alpha() {
        let err = SimplicialModel::from_json(&doc(
            r#"{"vertices":[0,1],"count":1,"alpha":[1.0,-2.0]}"#,
        ))
        .unwrap_err();
        assert!(err.to_string().contains("positive"), "{err}");
        let err = SimplicialModel::from_json(&doc(
            r#"{"vertices":[0,1],"count":1,"alpha":[1.0,2.0,3.0]}"#,
        ))
        .unwrap_err();
        assert!(err.to_string().contains("alpha length"), "{err}");
    }

    #[test]
    fn load_rejects_unknown_version() {
        let text = toy_model().to_json().replace("\"version\": 1", "\"version\": 9");
        let err = SimplicialModel::from_json(&text).unwrap_err();
        assert!(err.to_string().contains("version"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = SimplicialModel::from_json("{\"version\": 1,").unwrap_err();
        match err {
            Error::Parse { context, .. } => assert!(context.contains("line 1")),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn duplicate_vertex_sets_are_rejected() {
        let bases = array![[1.0, 0.0], [0.0, 1.0]];
        let basis_set = BasisSet::new(bases, 1.0).unwrap();
        let s = Simplex::new(vec![0, 1], 1).unwrap();
        let err =
            SimplicialModel::new(basis_set, vec![s.clone(), s], false, vec![], Map::new())
                .unwrap_err();
        assert!(err.to_string().contains("duplicate"));
    }

    #[test]
    fn unsorted_vertices_are_rejected() {
        assert!(Simplex::new(vec![1, 0], 1).is_err());
        assert!(Simplex::new(vec![0, 0], 1).is_err());
    }

    #[test]
    fn support_uses_threshold_fraction_of_radius() {
        let v = array![0.5 - 2e-7, 0.5, 1e-7, 1e-7 - 2e-22];
        let c = CoefficientVector::new(v, 1.0, 1e-7).unwrap();
        // strictly-above comparison: 1e-7 and below stay out
        assert_eq!(c.support(), &[0, 1]);
    }

    #[test]
    fn coefficient_mass_must_match_radius() {
        let v = array![0.5, 0.4];
        assert!(CoefficientVector::new(v, 1.0, 1e-6).is_err());
    }

    proptest! {
        #[test]
        fn random_models_round_trip(cols in 2usize..5, d in 1usize..4, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
            let mut bases = Array2::zeros((d, cols));
            for j in 0..cols {
                let mut col: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm > 1.0 {
                    for v in &mut col {
                        *v /= norm + 1e-12;
                    }
                }
                for (i, v) in col.iter().enumerate() {
                    bases[(i, j)] = *v;
                }
            }
            let radius = rng.gen_range(0.05..=1.0_f64);
            let basis_set = BasisSet::new(bases, radius).unwrap();
            let k = 1 + (d).min(cols - 1);
            let simplex = Simplex::new((0..k).collect(), rng.gen_range(1..50)).unwrap();
            let model = SimplicialModel::new(
                basis_set,
                vec![simplex],
                rng.gen_bool(0.5),
                vec![rng.gen_range(0.0..2.0)],
                Map::new(),
            )
            .unwrap();
            let back = SimplicialModel::from_json(&model.to_json()).unwrap();
            prop_assert_eq!(back.basis_set().bases(), model.basis_set().bases());
            prop_assert_eq!(back.basis_set().radius(), model.basis_set().radius());
            prop_assert_eq!(back.training_stats(), model.training_stats());
            prop_assert_eq!(back.pruned(), model.pruned());
        }
    }
}
