use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::spaces::{BasePoint, ModelSpec, SpaceModel};

use super::{
    check_branch_continuity, indicator_projection, verify_projection, AlgebraElement, ConvError,
    Region, VerificationReport, CONTINUITY_TOL,
};

/// A complex number on the wire: a bare real or `[re, im]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexWire {
    Real(f64),
    Pair([f64; 2]),
}

impl From<ComplexWire> for Complex64 {
    fn from(w: ComplexWire) -> Self {
        match w {
            ComplexWire::Real(r) => Complex64::new(r, 0.0),
            ComplexWire::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridEntry {
    pub point: BasePoint,
    pub matrix: Vec<Vec<ComplexWire>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Builtin {
    Identity,
    Zero,
    TwistedSphereProjection,
}

/// File form of an element, tagged by `"rule"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum ElementSpec {
    Builtin {
        name: Builtin,
    },
    Indicator {
        charts: Vec<String>,
    },
    Grid {
        entries: Vec<GridEntry>,
    },
    Perturbed {
        base: Box<ElementSpec>,
        delta: f64,
        #[serde(default)]
        index: usize,
    },
}

impl ElementSpec {
    pub fn build(&self, model: &Arc<SpaceModel>) -> Result<AlgebraElement, ConvError> {
        match self {
            ElementSpec::Builtin { name } => match name {
                Builtin::Identity => Ok(AlgebraElement::identity(model.clone())),
                Builtin::Zero => Ok(AlgebraElement::zero(model.clone())),
                Builtin::TwistedSphereProjection => {
                    AlgebraElement::twisted_sphere_projection(model.clone())
                }
            },
            ElementSpec::Indicator { charts } => {
                let names: Vec<&str> = charts.iter().map(|s| s.as_str()).collect();
                indicator_projection(model, &Region::by_names(model, &names)?)
            }
            ElementSpec::Grid { entries } => {
                let mut values = Vec::with_capacity(entries.len());
                for e in entries {
                    let n = e.matrix.len();
                    if e.matrix.iter().any(|r| r.len() != n) {
                        return Err(ConvError::Shape(format!(
                            "matrix over {} is not square",
                            e.point
                        )));
                    }
                    let m = DMatrix::from_fn(n, n, |i, j| Complex64::from(e.matrix[i][j]));
                    values.push((e.point.clone(), m));
                }
                AlgebraElement::grid(model.clone(), values)
            }
            ElementSpec::Perturbed { base, delta, index } => Ok(base
                .build(model)?
                .perturbed(*index, Complex64::new(*delta, 0.0))),
        }
    }

    fn grid_points(&self) -> Option<Vec<BasePoint>> {
        match self {
            ElementSpec::Grid { entries } => {
                Some(entries.iter().map(|e| e.point.clone()).collect())
            }
            ElementSpec::Perturbed { base, .. } => base.grid_points(),
            _ => None,
        }
    }
}

pub const DEFAULT_SAMPLES: usize = 10_000;
pub const DEFAULT_TOL: f64 = 1e-12;
pub const APPROACH_STEPS: usize = 12;
pub const APPROACH_EPS0: f64 = 0.05;

/// A verification request: model, element and sampling options.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySpec {
    pub model: ModelSpec,
    pub element: ElementSpec,
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Check continuity along approach sequences of every branch class.
    /// Defaults to on, except for grid elements.
    #[serde(default)]
    pub continuity: Option<bool>,
}

/// Builds the model and element and runs every requested check. Grid
/// elements are checked at their own points.
pub fn run_verification(
    spec: &VerifySpec,
    samples: Option<usize>,
    tol: Option<f64>,
) -> Result<VerificationReport, ConvError> {
    let model = Arc::new(spec.model.build()?);
    let f = spec.element.build(&model)?;
    let tol = tol.or(spec.tol).unwrap_or(DEFAULT_TOL);
    if tol.is_nan() || tol < 0.0 {
        return Err(ConvError::Parameter(format!(
            "tolerance {tol} must be non-negative"
        )));
    }
    let grid = spec.element.grid_points();
    let points = match &grid {
        Some(p) => p.clone(),
        None => {
            let n = samples.or(spec.samples).unwrap_or(DEFAULT_SAMPLES);
            if n == 0 {
                return Err(ConvError::Parameter("sample count must be positive".into()));
            }
            model.sample_base_points(n, spec.seed.unwrap_or(0))
        }
    };
    let report = verify_projection(&f, &points, tol)?;
    if !spec.continuity.unwrap_or(grid.is_none()) {
        return Ok(report);
    }
    let mut seqs = Vec::new();
    for c in model.branch_classes() {
        seqs.extend(model.approach_sequences(&c.name, APPROACH_STEPS, APPROACH_EPS0)?);
    }
    let defects = check_branch_continuity(&f, &seqs, CONTINUITY_TOL)?;
    Ok(report.with_continuity(defects))
}
