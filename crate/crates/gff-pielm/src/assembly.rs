//! Assembly of the physics-informed linear system `H beta = Y`.
//!
//! PDE rows apply the governing operator to every feature at an interior
//! point against the source term; condition rows do the same with each
//! condition's operator and target. All rows enter with unit weight. For an
//! inverse problem one extra column carries the unknown source coefficient
//! and one extra row per labelled sample ties the prediction to data.

use ndarray::{Array1, Array2};
use ndarray::parallel::prelude::*;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::feature::FeatureLayer;
use crate::pde::{LinearOperator, PdeProblem};
use crate::sampling::CollocationSet;

/// What a column of `H` multiplies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnTag {
    /// Output weight of feature `m`.
    Feature(usize),
    /// The inverse-problem source coefficient.
    InverseParam,
}

/// Where a row of `H` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowTag {
    /// PDE residual at an interior point.
    Pde,
    /// Condition `k` at one of its region points.
    Condition(usize),
    /// Labelled solution sample (inverse problems).
    Data,
}

/// Dense assembled system with row/column provenance.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub h: Array2<f64>,
    pub y: Array1<f64>,
    pub column_meta: Vec<ColumnTag>,
    pub row_meta: Vec<RowTag>,
    /// Input point behind each row, kept for augmentation and debug dumps.
    pub row_points: Vec<Vec<f64>>,
}

impl LinearSystem {
    pub fn rows(&self) -> usize {
        self.h.nrows()
    }

    pub fn cols(&self) -> usize {
        self.h.ncols()
    }

    /// CSV dump of `[H | Y]` for small systems.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.rows() {
            let mut row: Vec<String> = (0..self.cols())
                .map(|j| format!("{:.17e}", self.h[[i, j]]))
                .collect();
            row.push(format!("{:.17e}", self.y[i]));
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Operator rows evaluated in one pass per point.
///
/// The per-neuron factor `prod_i (delta_m w_mi)^{a_i}` of each term does not
/// depend on the input point, so it is precomputed once per operator.
struct OpEvaluator<'a> {
    layer: &'a FeatureLayer,
    terms: Vec<(Array1<f64>, u32, &'a crate::pde::ScalarFn)>,
}

impl<'a> OpEvaluator<'a> {
    fn new(layer: &'a FeatureLayer, op: &'a LinearOperator) -> Self {
        let terms = op
            .terms()
            .iter()
            .map(|t| {
                (
                    layer.weight_power(t.orders()),
                    t.orders().iter().sum::<u32>(),
                    t.coefficient(),
                )
            })
            .collect();
        Self { layer, terms }
    }

    fn fill_row(&self, v: &[f64], out: &mut [f64]) {
        let z = self.layer.preactivation_row(v);
        let mut phi = Array1::zeros(self.layer.neurons());
        out.fill(0.0);
        for (coef, n, cfn) in &self.terms {
            let c = cfn.eval(v);
            self.layer.phi_row(&z, *n, &mut phi);
            for m in 0..out.len() {
                out[m] += c * coef[m] * phi[m];
            }
        }
    }
}

/// Builds the collocation system for a forward problem (or the feature block
/// of an inverse problem; see [`augment_inverse`]).
pub fn assemble_system(
    problem: &PdeProblem,
    layer: &FeatureLayer,
    colloc: &CollocationSet,
) -> Result<LinearSystem> {
    problem.validate()?;
    if layer.d_in() != problem.domain.dim() {
        return Err(Error::DimensionMismatch {
            expected: problem.domain.dim(),
            got: layer.d_in(),
        });
    }
    if colloc.per_condition.len() != problem.conditions.len() {
        return Err(Error::DimensionMismatch {
            expected: problem.conditions.len(),
            got: colloc.per_condition.len(),
        });
    }
    let m = layer.neurons();
    let tanh_cap = problem
        .operator
        .terms()
        .iter()
        .chain(problem.conditions.iter().flat_map(|c| c.operator.terms()))
        .map(|t| t.orders().iter().sum::<u32>())
        .max()
        .unwrap_or(0);
    if layer.kind() == crate::feature::ActivationKind::VanillaTanh && tanh_cap > 2 {
        return Err(Error::UnsupportedOrder {
            activation: "tanh",
            order: tanh_cap,
            max: 2,
        });
    }

    // row layout: interior block, then each condition block in order
    let mut row_points: Vec<Vec<f64>> = Vec::new();
    let mut row_meta: Vec<RowTag> = Vec::new();
    let mut row_kind: Vec<usize> = Vec::new(); // 0 = pde, 1 + k = condition k
    for p in &colloc.interior {
        row_points.push(p.clone());
        row_meta.push(RowTag::Pde);
        row_kind.push(0);
    }
    for (k, pts) in colloc.per_condition.iter().enumerate() {
        for p in pts {
            row_points.push(p.clone());
            row_meta.push(RowTag::Condition(k));
            row_kind.push(1 + k);
        }
    }
    let n_rows = row_points.len();

    let pde_eval = OpEvaluator::new(layer, &problem.operator);
    let cond_evals: Vec<OpEvaluator> = problem
        .conditions
        .iter()
        .map(|c| OpEvaluator::new(layer, &c.operator))
        .collect();

    let mut h = Array2::zeros((n_rows, m));
    let mut y = Array1::zeros(n_rows);
    let y_slice = y.as_slice_mut().expect("contiguous rhs");

    h.axis_iter_mut(ndarray::Axis(0))
        .into_par_iter()
        .zip(y_slice.par_iter_mut())
        .enumerate()
        .for_each(|(i, (mut row, yi))| {
            let v = &row_points[i];
            let out = row.as_slice_mut().expect("contiguous row");
            match row_kind[i] {
                0 => {
                    pde_eval.fill_row(v, out);
                    *yi = problem.source.eval(v);
                }
                k => {
                    let cond = &problem.conditions[k - 1];
                    cond_evals[k - 1].fill_row(v, out);
                    *yi = cond.target.eval(v);
                }
            }
        });

    for (i, yi) in y.iter().enumerate() {
        if !yi.is_finite() {
            return Err(Error::NonFinite {
                context: "right-hand side",
                row: i,
            });
        }
    }
    if let Some((i, _)) = h
        .axis_iter(ndarray::Axis(0))
        .enumerate()
        .find(|(_, row)| row.iter().any(|x| !x.is_finite()))
    {
        return Err(Error::NonFinite {
            context: "design matrix",
            row: i,
        });
    }

    Ok(LinearSystem {
        h,
        y,
        column_meta: (0..m).map(ColumnTag::Feature).collect(),
        row_meta,
        row_points,
    })
}

/// Adds the inverse-parameter column and the labelled data rows.
///
/// The governing equation reads `D[u] = source + alpha * g`; moving the
/// unknown across the equality puts `-g(v)` into the parameter column of
/// every PDE row. Conditions do not involve `alpha`, so their entries are
/// zero. Each labelled `(point, value)` pair appends one row of raw feature
/// values with the measured value on the right-hand side.
pub fn augment_inverse(
    system: &LinearSystem,
    problem: &PdeProblem,
    layer: &FeatureLayer,
    data_points: &[(Vec<f64>, f64)],
) -> Result<LinearSystem> {
    let profile = problem.inverse_profile.as_ref().ok_or_else(|| {
        Error::InvalidParameter("augment_inverse needs an inverse_profile".into())
    })?;
    if system.column_meta.iter().any(|c| *c == ColumnTag::InverseParam) {
        return Err(Error::InvalidParameter(
            "system already carries an inverse-parameter column".into(),
        ));
    }
    let m = layer.neurons();
    let old_rows = system.rows();
    let n_rows = old_rows + data_points.len();
    let mut h = Array2::zeros((n_rows, m + 1));
    let mut y = Array1::zeros(n_rows);
    h.slice_mut(ndarray::s![..old_rows, ..m]).assign(&system.h);
    y.slice_mut(ndarray::s![..old_rows]).assign(&system.y);

    for i in 0..old_rows {
        if system.row_meta[i] == RowTag::Pde {
            h[[i, m]] = -profile.eval(&system.row_points[i]);
        }
    }
    let mut row_meta = system.row_meta.clone();
    let mut row_points = system.row_points.clone();
    for (j, (p, value)) in data_points.iter().enumerate() {
        let i = old_rows + j;
        let feats = layer.row(p)?;
        h.slice_mut(ndarray::s![i, ..m]).assign(&feats);
        y[i] = *value;
        row_meta.push(RowTag::Data);
        row_points.push(p.clone());
    }
    let mut column_meta = system.column_meta.clone();
    column_meta.push(ColumnTag::InverseParam);

    Ok(LinearSystem {
        h,
        y,
        column_meta,
        row_meta,
        row_points,
    })
}
