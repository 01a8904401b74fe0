//! Elements of `C*(R(ψ))` sampled fiberwise. Over one orbit an element is a
//! square matrix indexed by the orbit's members, and convolution
//! `(f*g)(y₁, y₂) = Σ_{z∼y₁} f(y₁, z) g(z, y₂)` is matrix multiplication.

mod region;
mod spec;
mod verify;

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::spaces::{
    BaseKey, BasePoint, ChartId, Coord, Geometry, Orbit, Pole, SpaceError, SpaceModel, SphereChart,
};

pub use region::{indicator_projection, Region};
pub use spec::{run_verification, ComplexWire, ElementSpec, GridEntry, VerifySpec};
pub use verify::{
    check_branch_continuity, richardson_sqrt, verify_fullness_witness, verify_projection,
    ContinuityDefect, VerificationReport, CONTINUITY_TOL,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConvError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("elements live on different models: {0}")]
    Incompatible(String),
    #[error("grid has no value over {0}")]
    MissingSample(String),
    #[error("region is not Hausdorff: {0}")]
    NonHausdorffRegion(String),
    #[error("invalid region: {0}")]
    Region(String),
    #[error("matrix shape: {0}")]
    Shape(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

/// The values `f(y₁, y₂)` for `y₁, y₂` in one orbit.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberMatrix {
    pub orbit: Orbit,
    pub entries: DMatrix<Complex64>,
}

impl FiberMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn adjoint(&self) -> FiberMatrix {
        FiberMatrix {
            orbit: self.orbit.clone(),
            entries: self.entries.adjoint(),
        }
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn op_norm(&self) -> f64 {
        op_norm(&self.entries)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let h = (&self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

/// Largest singular value.
pub fn op_norm(m: &DMatrix<Complex64>) -> f64 {
    if m.iter().all(|c| *c == Complex64::new(0.0, 0.0)) {
        return 0.0;
    }
    m.singular_values().max()
}

/// How an element assigns a matrix to an orbit.
#[derive(Clone, Debug)]
pub enum Rule {
    Identity,
    Zero,
    TwistedSphereProjection,
    Indicator(Region),
    Grid(Arc<HashMap<BaseKey, DMatrix<Complex64>>>),
    Perturbed {
        base: Box<Rule>,
        index: usize,
        delta: Complex64,
    },
    Adjoint(Box<Rule>),
    Product(Box<Rule>, Box<Rule>),
    Sum(Box<Rule>, Box<Rule>),
    Scaled(Complex64, Box<Rule>),
    Restricted {
        parent: Arc<SpaceModel>,
        inner: Box<Rule>,
    },
}

/// An element of `C*(R(ψ))`, known through its fiber matrices.
#[derive(Clone, Debug)]
pub struct AlgebraElement {
    model: Arc<SpaceModel>,
    rule: Rule,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

impl AlgebraElement {
    pub fn new(model: Arc<SpaceModel>, rule: Rule) -> Self {
        AlgebraElement { model, rule }
    }

    pub fn identity(model: Arc<SpaceModel>) -> Self {
        Self::new(model, Rule::Identity)
    }

    pub fn zero(model: Arc<SpaceModel>) -> Self {
        Self::new(model, Rule::Zero)
    }

    /// The full projection of the twisted sphere. Needs a folded sphere chart.
    pub fn twisted_sphere_projection(model: Arc<SpaceModel>) -> Result<Self, ConvError> {
        let folded = model
            .charts()
            .iter()
            .any(|c| c.geometry == Geometry::Sphere(SphereChart::Folded));
        if !folded {
            return Err(ConvError::Incompatible(
                "model has no folded sphere chart".into(),
            ));
        }
        Ok(Self::new(model, Rule::TwistedSphereProjection))
    }

    /// A grid element: prescribed matrices at finitely many base points.
    pub fn grid(
        model: Arc<SpaceModel>,
        values: Vec<(BasePoint, DMatrix<Complex64>)>,
    ) -> Result<Self, ConvError> {
        let mut map = HashMap::with_capacity(values.len());
        for (x, m) in values {
            let orbit = model.fiber(&x)?;
            if m.nrows() != orbit.len() || m.ncols() != orbit.len() {
                return Err(ConvError::Shape(format!(
                    "{}x{} matrix over {} (orbit of size {})",
                    m.nrows(),
                    m.ncols(),
                    orbit.base,
                    orbit.len()
                )));
            }
            if m.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(ConvError::Shape(format!(
                    "non-finite entry over {}",
                    orbit.base
                )));
            }
            map.insert(orbit.base.key(), m);
        }
        Ok(Self::new(model, Rule::Grid(Arc::new(map))))
    }

    /// A grid element filled in by `f` at each of `points`.
    pub fn grid_from_fn<F>(
        model: Arc<SpaceModel>,
        points: &[BasePoint],
        mut f: F,
    ) -> Result<Self, ConvError>
    where
        F: FnMut(&Orbit) -> DMatrix<Complex64>,
    {
        let mut values = Vec::with_capacity(points.len());
        for x in points {
            let o = model.fiber(x)?;
            let m = f(&o);
            values.push((o.base, m));
        }
        Self::grid(model, values)
    }

    pub fn model(&self) -> &Arc<SpaceModel> {
        &self.model
    }

    pub fn rule(&self) -> &Rule {
        &self.rule
    }

    pub fn evaluate(&self, x: &BasePoint) -> Result<FiberMatrix, ConvError> {
        let orbit = self.model.fiber(x)?;
        let entries = eval_rule(&self.rule, &self.model, &orbit)?;
        Ok(FiberMatrix { orbit, entries })
    }

    fn check_same_model(&self, other: &AlgebraElement) -> Result<(), ConvError> {
        if Arc::ptr_eq(&self.model, &other.model) || *self.model == *other.model {
            Ok(())
        } else {
            Err(ConvError::Incompatible(format!(
                "{:?} vs {:?}",
                self.model.kind(),
                other.model.kind()
            )))
        }
    }

    /// `self * other`.
    pub fn convolve(&self, other: &AlgebraElement) -> Result<AlgebraElement, ConvError> {
        self.check_same_model(other)?;
        Ok(Self::new(
            self.model.clone(),
            Rule::Product(Box::new(self.rule.clone()), Box::new(other.rule.clone())),
        ))
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<AlgebraElement, ConvError> {
        self.check_same_model(other)?;
        Ok(Self::new(
            self.model.clone(),
            Rule::Sum(Box::new(self.rule.clone()), Box::new(other.rule.clone())),
        ))
    }

    pub fn scale(&self, c: Complex64) -> AlgebraElement {
        Self::new(
            self.model.clone(),
            Rule::Scaled(c, Box::new(self.rule.clone())),
        )
    }

    pub fn adjoint(&self) -> AlgebraElement {
        Self::new(
            self.model.clone(),
            Rule::Adjoint(Box::new(self.rule.clone())),
        )
    }

    /// Adds `delta` to the diagonal entry `index` of every fiber matrix
    /// large enough to have one.
    pub fn perturbed(&self, index: usize, delta: Complex64) -> AlgebraElement {
        Self::new(
            self.model.clone(),
            Rule::Perturbed {
                base: Box::new(self.rule.clone()),
                index,
                delta,
            },
        )
    }

    /// The restriction homomorphism onto a closed invariant union of charts.
    pub fn restrict(&self, charts: &[ChartId]) -> Result<AlgebraElement, ConvError> {
        let sub = self.model.restrict_to(charts)?;
        Ok(Self::new(
            Arc::new(sub),
            Rule::Restricted {
                parent: self.model.clone(),
                inner: Box::new(self.rule.clone()),
            },
        ))
    }
}

/// `(f * g)` over the orbit of `x`.
pub fn convolve(
    f: &AlgebraElement,
    g: &AlgebraElement,
    x: &BasePoint,
) -> Result<FiberMatrix, ConvError> {
    f.convolve(g)?.evaluate(x)
}

fn eval_rule(
    rule: &Rule,
    model: &SpaceModel,
    orbit: &Orbit,
) -> Result<DMatrix<Complex64>, ConvError> {
    let n = orbit.len();
    Ok(match rule {
        Rule::Identity => DMatrix::identity(n, n),
        Rule::Zero => DMatrix::zeros(n, n),
        Rule::TwistedSphereProjection => twisted_sphere_matrix(model, orbit)?,
        Rule::Indicator(region) => DMatrix::from_fn(n, n, |i, j| {
            if i == j && region.contains(orbit.members[i].chart) {
                ONE
            } else {
                ZERO
            }
        }),
        Rule::Grid(map) => map
            .get(&orbit.base.key())
            .cloned()
            .ok_or_else(|| ConvError::MissingSample(orbit.base.to_string()))?,
        Rule::Perturbed { base, index, delta } => {
            let mut m = eval_rule(base, model, orbit)?;
            if *index < n {
                m[(*index, *index)] += delta;
            }
            m
        }
        Rule::Adjoint(r) => eval_rule(r, model, orbit)?.adjoint(),
        Rule::Product(a, b) => eval_rule(a, model, orbit)? * eval_rule(b, model, orbit)?,
        Rule::Sum(a, b) => eval_rule(a, model, orbit)? + eval_rule(b, model, orbit)?,
        Rule::Scaled(c, r) => eval_rule(r, model, orbit)? * *c,
        Rule::Restricted { parent, inner } => {
            let full = parent.fiber(&orbit.base)?;
            let idx: Vec<usize> = orbit
                .members
                .iter()
                .map(|y| {
                    full.index_of(y).ok_or_else(|| {
                        ConvError::Incompatible(format!("{y} is not in the parent orbit"))
                    })
                })
                .collect::<Result<_, _>>()?;
            if idx.len() != full.len() {
                return Err(ConvError::Incompatible(format!(
                    "orbit over {} is cut by the restriction",
                    orbit.base
                )));
            }
            let m = eval_rule(inner, parent, &full)?;
            DMatrix::from_fn(n, n, |i, j| m[(idx[i], idx[j])])
        }
    })
}

enum Sheet {
    U { theta: f64, z: f64 },
    V { copy: u8, z: f64 },
}

fn twisted_sphere_matrix(
    model: &SpaceModel,
    orbit: &Orbit,
) -> Result<DMatrix<Complex64>, ConvError> {
    let sheets: Vec<Sheet> = orbit
        .members
        .iter()
        .map(|y| {
            let chart = model.chart(y.chart)?;
            match (&chart.geometry, y.coord) {
                (Geometry::Sphere(SphereChart::Folded), Coord::Cyl { theta, z }) => {
                    Ok(Sheet::U { theta, z })
                }
                (Geometry::Sphere(SphereChart::Doubled { copy }), Coord::Cyl { z, .. }) => {
                    Ok(Sheet::V { copy: *copy, z })
                }
                (Geometry::Sphere(SphereChart::Doubled { copy }), Coord::Pole(p)) => Ok(Sheet::V {
                    copy: *copy,
                    z: if p == Pole::North { 1.0 } else { -1.0 },
                }),
                _ => Err(ConvError::Incompatible(format!(
                    "{y} is not a point of the twisted sphere"
                ))),
            }
        })
        .collect::<Result<_, _>>()?;
    let n = sheets.len();
    let mut m = DMatrix::zeros(n, n);
    let uv = |theta: f64, z: f64, copy: u8| {
        let a = z.abs();
        let c = Complex64::new((a * (1.0 - a) / 2.0).sqrt(), 0.0);
        if copy == 1 {
            c
        } else {
            c * Complex64::from_polar(1.0, -theta)
        }
    };
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = match (&sheets[i], &sheets[j]) {
                (Sheet::U { z, .. }, Sheet::U { .. }) if i == j => {
                    Complex64::new(1.0 - z.abs(), 0.0)
                }
                (Sheet::V { z, .. }, Sheet::V { .. }) if i == j => Complex64::new(z.abs(), 0.0),
                (Sheet::U { theta, z }, Sheet::V { copy, .. }) => uv(*theta, *z, *copy),
                (Sheet::V { copy, .. }, Sheet::U { theta, z }) => uv(*theta, *z, *copy).conj(),
                _ => ZERO,
            };
        }
    }
    Ok(m)
}
