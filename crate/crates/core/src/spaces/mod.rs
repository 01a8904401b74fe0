//! Combinatorial models of surjective local homeomorphisms `ψ: Y -> X` onto
//! compact locally Hausdorff spaces.
//!
//! `Y` is a finite list of charts (intervals, circles, sphere patches). Each
//! chart maps into `X` piecewise: every piece (a line segment, a vertex, one
//! half of a folded sphere) maps injectively. Points of `X` are
//! [`BasePoint`]s, named by stratum plus coordinates. The fiber `ψ⁻¹(x)` of a
//! base point is an [`Orbit`] of the equivalence relation `y₁ ∼ y₂ ⇔ ψ(y₁) = ψ(y₂)`.

mod build;
mod chart;
mod model;
mod spec;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use build::{
    broken_heart, broken_heart_wedge, build_cover_groupoid, chart_contains, pinch, solenoid_aab_ab,
    twisted_sphere, wedge, GraphEdge, GraphSpace, DEFAULT_EQUATOR_CLASSES,
};
pub use chart::{Chart, Geometry, Limit, LineChart, LineDomain, Segment, SphereChart};
pub use model::{
    ApproachPath, ApproachSequence, BranchClass, DerivedIncidence, Manifold, ModelKind, SpaceModel,
};
pub use spec::ModelSpec;

/// Tolerance for coordinate membership and angle comparisons.
pub const COORD_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpaceError {
    #[error("coordinate outside chart domain: {0}")]
    Domain(String),
    #[error("no chart with id {0}")]
    UnknownChart(ChartId),
    #[error("base point {0} has no preimage")]
    UnknownBasePoint(String),
    #[error("cover does not reach {0}")]
    Coverage(String),
    #[error("chart is not Hausdorff: {0}")]
    NotHausdorff(String),
    #[error("invalid wedge point: {0}")]
    InvalidWedge(String),
    #[error("unknown branch class {0:?}")]
    UnknownBranchClass(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("subset is not closed and invariant: {0}")]
    Invariance(String),
    #[error("malformed model: {0}")]
    Malformed(String),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ChartId(pub u16);

impl fmt::Display for ChartId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pole {
    North,
    South,
}

/// Chart coordinates: one real for line charts, cylindrical `(θ, z)` for
/// sphere patches, or a pole.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coord {
    Line(f64),
    Cyl { theta: f64, z: f64 },
    Pole(Pole),
}

impl Coord {
    fn rank(&self) -> u8 {
        match self {
            Coord::Line(_) => 0,
            Coord::Cyl { .. } => 1,
            Coord::Pole(_) => 2,
        }
    }

    pub fn canonical_cmp(&self, other: &Coord) -> Ordering {
        match (self, other) {
            (Coord::Line(a), Coord::Line(b)) => a.total_cmp(b),
            (Coord::Cyl { theta: t1, z: z1 }, Coord::Cyl { theta: t2, z: z2 }) => {
                t1.total_cmp(t2).then(z1.total_cmp(z2))
            }
            (Coord::Pole(a), Coord::Pole(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }

    pub fn approx_eq(&self, other: &Coord) -> bool {
        match (self, other) {
            (Coord::Line(a), Coord::Line(b)) => (a - b).abs() <= COORD_TOL,
            (Coord::Cyl { theta: t1, z: z1 }, Coord::Cyl { theta: t2, z: z2 }) => {
                angle_distance(*t1, *t2) <= COORD_TOL && (z1 - z2).abs() <= COORD_TOL
            }
            (Coord::Pole(a), Coord::Pole(b)) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::Line(t) => write!(f, "{t}"),
            Coord::Cyl { theta, z } => write!(f, "(θ={theta}, z={z})"),
            Coord::Pole(Pole::North) => write!(f, "north pole"),
            Coord::Pole(Pole::South) => write!(f, "south pole"),
        }
    }
}

/// A point `y ∈ Y`.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointRef {
    pub chart: ChartId,
    pub coord: Coord,
}

impl PointRef {
    pub fn new(chart: u16, coord: Coord) -> Self {
        PointRef {
            chart: ChartId(chart),
            coord,
        }
    }

    pub fn line(chart: u16, t: f64) -> Self {
        Self::new(chart, Coord::Line(t))
    }

    pub fn cyl(chart: u16, theta: f64, z: f64) -> Self {
        Self::new(chart, Coord::Cyl { theta, z })
    }

    /// Canonical fiber order: chart id, then coordinates lexicographically.
    pub fn canonical_cmp(&self, other: &PointRef) -> Ordering {
        self.chart
            .cmp(&other.chart)
            .then_with(|| self.coord.canonical_cmp(&other.coord))
    }

    pub fn approx_eq(&self, other: &PointRef) -> bool {
        self.chart == other.chart && self.coord.approx_eq(&other.coord)
    }
}

impl fmt::Display for PointRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.chart, self.coord)
    }
}

/// A point `x ∈ X`: a stratum label plus stratum coordinates (none for
/// isolated strata such as vertices and poles).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasePoint {
    pub stratum: String,
    #[serde(default)]
    pub coords: Vec<f64>,
}

/// Hashable form of a [`BasePoint`], coordinates quantized at [`COORD_TOL`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BaseKey(String, Vec<i64>);

impl BasePoint {
    pub fn vertex(label: impl Into<String>) -> Self {
        BasePoint {
            stratum: label.into(),
            coords: Vec::new(),
        }
    }

    pub fn on(stratum: impl Into<String>, coords: &[f64]) -> Self {
        BasePoint {
            stratum: stratum.into(),
            coords: coords.to_vec(),
        }
    }

    pub fn is_isolated(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn key(&self) -> BaseKey {
        BaseKey(
            self.stratum.clone(),
            self.coords
                .iter()
                .map(|c| (c / COORD_TOL).round() as i64)
                .collect(),
        )
    }

    pub fn approx_eq(&self, other: &BasePoint) -> bool {
        self.stratum == other.stratum
            && self.coords.len() == other.coords.len()
            && self
                .coords
                .iter()
                .zip(&other.coords)
                .all(|(a, b)| (a - b).abs() <= COORD_TOL)
    }

    /// The same point inside a wedge factor tagged `prefix`.
    pub fn prefixed(&self, prefix: &str) -> BasePoint {
        BasePoint {
            stratum: format!("{prefix}{}", self.stratum),
            coords: self.coords.clone(),
        }
    }
}

impl fmt::Display for BasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.is_empty() {
            return write!(f, "{}", self.stratum);
        }
        let c: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "{}({})", self.stratum, c.join(", "))
    }
}

/// The fiber `ψ⁻¹(x)`, members in canonical order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Orbit {
    pub base: BasePoint,
    pub members: Vec<PointRef>,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn index_of(&self, y: &PointRef) -> Option<usize> {
        self.members.iter().position(|m| m.approx_eq(y))
    }

    pub fn contains(&self, y: &PointRef) -> bool {
        self.index_of(y).is_some()
    }

    pub fn approx_eq(&self, other: &Orbit) -> bool {
        self.base.approx_eq(&other.base)
            && self.members.len() == other.members.len()
            && self
                .members
                .iter()
                .zip(&other.members)
                .all(|(a, b)| a.approx_eq(b))
    }

    pub fn is_disjoint(&self, other: &Orbit) -> bool {
        !self.members.iter().any(|m| other.contains(m))
    }
}

pub(crate) fn reduce_periodic(x: f64, period: f64) -> f64 {
    let r = x.rem_euclid(period);
    if period - r <= COORD_TOL {
        0.0
    } else {
        r
    }
}

pub(crate) fn reduce_angle(theta: f64) -> f64 {
    reduce_periodic(theta, std::f64::consts::TAU)
}

pub(crate) fn angle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d)
}
