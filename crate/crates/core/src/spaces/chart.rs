use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::{
    reduce_angle, reduce_periodic, BasePoint, ChartId, Coord, PointRef, Pole, SpaceError, COORD_TOL,
};

/// A coordinate patch of `Y` together with its piecewise map into `X`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chart {
    pub id: ChartId,
    pub name: String,
    /// Prepended to every stratum label this chart produces (used by wedges).
    #[serde(default)]
    pub prefix: String,
    pub geometry: Geometry,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    Line(LineChart),
    Sphere(SphereChart),
}

/// Sphere patches of the twisted sphere, in cylindrical coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SphereChart {
    /// The open band `|z| < 1`, folded 2-to-1 onto the sheet by `θ ↦ 2θ`
    /// away from the equator `z = 0`, which maps injectively.
    Folded,
    /// One copy of the sphere minus the equator, mapped identically onto
    /// the sheet and the poles.
    Doubled { copy: u8 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum LineDomain {
    Interval {
        lo: f64,
        hi: f64,
        lo_closed: bool,
        hi_closed: bool,
    },
    Circle {
        period: f64,
    },
}

impl LineDomain {
    pub fn normalize(&self, t: f64) -> Option<f64> {
        if !t.is_finite() {
            return None;
        }
        match *self {
            LineDomain::Interval {
                lo,
                hi,
                lo_closed,
                hi_closed,
            } => {
                if (t - lo).abs() <= COORD_TOL {
                    lo_closed.then_some(lo)
                } else if (t - hi).abs() <= COORD_TOL {
                    hi_closed.then_some(hi)
                } else if t > lo && t < hi {
                    Some(t)
                } else {
                    None
                }
            }
            LineDomain::Circle { period } => Some(reduce_periodic(t, period)),
        }
    }

    pub fn is_compact(&self) -> bool {
        match *self {
            LineDomain::Interval {
                lo_closed,
                hi_closed,
                ..
            } => lo_closed && hi_closed,
            LineDomain::Circle { .. } => true,
        }
    }

    fn period(&self) -> Option<f64> {
        match *self {
            LineDomain::Circle { period } => Some(period),
            LineDomain::Interval { .. } => None,
        }
    }

    fn bounds(&self) -> (f64, f64) {
        match *self {
            LineDomain::Interval { lo, hi, .. } => (lo, hi),
            LineDomain::Circle { period } => (0.0, period),
        }
    }
}

/// An open piece `(lo, hi)` of a line chart mapped affinely onto an edge,
/// `lo ↦ s_lo` and `hi ↦ s_hi`. On a circle chart `hi` may exceed the
/// period (the piece wraps); on a circular edge `s` is read modulo 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub edge: String,
    pub s_lo: f64,
    pub s_hi: f64,
    #[serde(default)]
    pub circular: bool,
}

impl Segment {
    pub fn new(lo: f64, hi: f64, edge: &str, s_lo: f64, s_hi: f64) -> Self {
        Segment {
            lo,
            hi,
            edge: edge.into(),
            s_lo,
            s_hi,
            circular: false,
        }
    }

    fn lift(&self, t: f64, period: Option<f64>) -> Option<f64> {
        let inside = |c: f64| c - self.lo > COORD_TOL && self.hi - c > COORD_TOL;
        if inside(t) {
            return Some(t);
        }
        period.map(|p| t + p).filter(|&c| inside(c))
    }

    fn param(&self, t: f64) -> f64 {
        let s = self.s_lo + (t - self.lo) * (self.s_hi - self.s_lo) / (self.hi - self.lo);
        if self.circular {
            reduce_periodic(s, 1.0)
        } else {
            s
        }
    }

    fn coord_of(&self, s: f64) -> f64 {
        self.lo + (s - self.s_lo) * (self.hi - self.lo) / (self.s_hi - self.s_lo)
    }
}

/// An interval or circle chart: finitely many vertices, open segments
/// between them, and joins gluing an excluded end of the domain to a point
/// of another chart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineChart {
    pub domain: LineDomain,
    #[serde(default)]
    pub vertices: Vec<(f64, String)>,
    pub segments: Vec<Segment>,
    #[serde(default)]
    pub joins: Vec<(f64, PointRef)>,
}

/// Where a convergent sequence inside a chart ends up.
#[derive(Clone, Debug, PartialEq)]
pub enum Limit {
    InChart(Coord),
    Joined(PointRef),
    Escapes,
}

impl LineChart {
    /// A vertex-free circle chart is a single segment with no ends.
    fn is_full_circle(&self) -> bool {
        self.domain.period().is_some() && self.vertices.is_empty() && self.segments.len() == 1
    }

    fn vertex_at(&self, t: f64) -> Option<&str> {
        let p = self.domain.period();
        self.vertices
            .iter()
            .find(|(v, _)| match p {
                Some(p) => {
                    let d = (t - v).rem_euclid(p);
                    d.min(p - d) <= COORD_TOL
                }
                None => (t - v).abs() <= COORD_TOL,
            })
            .map(|(_, l)| l.as_str())
    }

    fn psi_local(&self, t: f64) -> Option<(String, Vec<f64>)> {
        if let Some(l) = self.vertex_at(t) {
            return Some((l.to_string(), Vec::new()));
        }
        if self.is_full_circle() {
            let seg = &self.segments[0];
            let lifted = if t < seg.lo {
                t + self.domain.period()?
            } else {
                t
            };
            return Some((seg.edge.clone(), vec![seg.param(lifted)]));
        }
        let p = self.domain.period();
        self.segments.iter().find_map(|seg| {
            seg.lift(t, p)
                .map(|c| (seg.edge.clone(), vec![seg.param(c)]))
        })
    }

    fn preimages_local(&self, stratum: &str, coords: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        if coords.is_empty() {
            out.extend(
                self.vertices
                    .iter()
                    .filter(|(_, l)| l == stratum)
                    .map(|(t, _)| *t),
            );
        } else if coords.len() == 1 {
            let s = coords[0];
            for seg in self.segments.iter().filter(|seg| seg.edge == stratum) {
                let shifts: &[f64] = if seg.circular {
                    &[0.0, -1.0, 1.0]
                } else {
                    &[0.0]
                };
                for d in shifts {
                    let t = seg.coord_of(s + d);
                    let hit = if self.is_full_circle() {
                        let (lo, hi) = (seg.lo, seg.hi);
                        t >= lo - COORD_TOL && t < hi - COORD_TOL
                    } else {
                        seg.lift(t, None).is_some()
                    };
                    if hit {
                        if let Some(t) = self.domain.normalize(t) {
                            if self.vertex_at(t).is_none() {
                                out.push(t);
                            }
                        }
                    }
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() <= COORD_TOL);
        out
    }

    fn limit(&self, t: f64) -> Limit {
        if let Some(t) = self.domain.normalize(t) {
            return Limit::InChart(Coord::Line(t));
        }
        self.joins
            .iter()
            .find(|(j, _)| (t - j).abs() <= 1e3 * COORD_TOL)
            .map_or(Limit::Escapes, |(_, y)| Limit::Joined(*y))
    }

    /// Ends of every segment: `(segment index, t at the end, s at the end,
    /// +1 if s increases into the segment)`.
    pub(crate) fn segment_ends(&self) -> Vec<(usize, f64, f64, i8)> {
        if self.is_full_circle() {
            return Vec::new();
        }
        let mut ends = Vec::new();
        for (i, seg) in self.segments.iter().enumerate() {
            let up = if seg.s_hi > seg.s_lo { 1 } else { -1 };
            let wrap = |s: f64| {
                if seg.circular {
                    reduce_periodic(s, 1.0)
                } else {
                    s
                }
            };
            ends.push((i, seg.lo, wrap(seg.s_lo), up));
            ends.push((i, seg.hi, wrap(seg.s_hi), -up));
        }
        ends
    }
}

impl Chart {
    pub fn line(&self) -> Option<&LineChart> {
        match &self.geometry {
            Geometry::Line(l) => Some(l),
            Geometry::Sphere(_) => None,
        }
    }

    pub fn is_compact(&self) -> bool {
        match &self.geometry {
            Geometry::Line(l) => l.domain.is_compact(),
            Geometry::Sphere(_) => false,
        }
    }

    /// Reduces `c` into the chart's parameter domain.
    pub fn normalize(&self, c: &Coord) -> Result<Coord, SpaceError> {
        let bad = || SpaceError::Domain(format!("{c} in chart {} ({})", self.name, self.id));
        match (&self.geometry, *c) {
            (Geometry::Line(l), Coord::Line(t)) => {
                l.domain.normalize(t).map(Coord::Line).ok_or_else(bad)
            }
            (Geometry::Sphere(s), Coord::Cyl { theta, z }) => {
                if !theta.is_finite() || !z.is_finite() || z.abs() >= 1.0 - COORD_TOL {
                    return Err(bad());
                }
                match s {
                    SphereChart::Folded => {
                        let z = if z.abs() <= COORD_TOL { 0.0 } else { z };
                        Ok(Coord::Cyl {
                            theta: reduce_angle(theta),
                            z,
                        })
                    }
                    SphereChart::Doubled { .. } if z.abs() <= COORD_TOL => Err(bad()),
                    SphereChart::Doubled { .. } => Ok(Coord::Cyl {
                        theta: reduce_angle(theta),
                        z,
                    }),
                }
            }
            (Geometry::Sphere(SphereChart::Doubled { .. }), Coord::Pole(p)) => Ok(Coord::Pole(p)),
            _ => Err(bad()),
        }
    }

    /// `ψ` on this chart. The coordinate must already be normalized.
    pub fn psi(&self, c: &Coord) -> Result<BasePoint, SpaceError> {
        let c = self.normalize(c)?;
        let (stratum, coords) = match (&self.geometry, c) {
            (Geometry::Line(l), Coord::Line(t)) => l.psi_local(t).ok_or_else(|| {
                SpaceError::Malformed(format!("chart {} does not map t = {t}", self.name))
            })?,
            (Geometry::Sphere(SphereChart::Folded), Coord::Cyl { theta, z }) => {
                if z == 0.0 {
                    ("equator".to_string(), vec![theta])
                } else {
                    ("sheet".to_string(), vec![reduce_angle(2.0 * theta), z])
                }
            }
            (Geometry::Sphere(_), Coord::Cyl { theta, z }) => ("sheet".to_string(), vec![theta, z]),
            (Geometry::Sphere(_), Coord::Pole(Pole::North)) => ("north".to_string(), vec![]),
            (Geometry::Sphere(_), Coord::Pole(Pole::South)) => ("south".to_string(), vec![]),
            _ => unreachable!("normalize checked the coordinate kind"),
        };
        Ok(BasePoint {
            stratum: format!("{}{stratum}", self.prefix),
            coords,
        })
    }

    /// All points of this chart over `x`.
    pub fn preimages(&self, x: &BasePoint) -> Vec<Coord> {
        let Some(local) = x.stratum.strip_prefix(self.prefix.as_str()) else {
            return Vec::new();
        };
        match &self.geometry {
            Geometry::Line(l) => l
                .preimages_local(local, &x.coords)
                .into_iter()
                .map(Coord::Line)
                .collect(),
            Geometry::Sphere(kind) => {
                let cyl = |theta: f64, z: f64| self.normalize(&Coord::Cyl { theta, z }).ok();
                match (kind, local, x.coords.as_slice()) {
                    (SphereChart::Folded, "equator", [theta]) => {
                        cyl(*theta, 0.0).into_iter().collect()
                    }
                    (SphereChart::Folded, "sheet", [phi, z]) if z.abs() > COORD_TOL => {
                        let h = reduce_angle(*phi) / 2.0;
                        [cyl(h, *z), cyl(h + PI, *z)]
                            .into_iter()
                            .flatten()
                            .collect()
                    }
                    (SphereChart::Doubled { .. }, "sheet", [phi, z]) => {
                        cyl(*phi, *z).into_iter().collect()
                    }
                    (SphereChart::Doubled { .. }, "north", []) => vec![Coord::Pole(Pole::North)],
                    (SphereChart::Doubled { .. }, "south", []) => vec![Coord::Pole(Pole::South)],
                    _ => Vec::new(),
                }
            }
        }
    }

    /// Limit in `Y` of chart points converging to the (possibly
    /// out-of-domain) coordinate `c`.
    pub fn limit(&self, c: &Coord) -> Limit {
        match (&self.geometry, *c) {
            (Geometry::Line(l), Coord::Line(t)) => l.limit(t),
            (Geometry::Sphere(kind), Coord::Cyl { theta, z }) => {
                if z.abs() >= 1.0 - 1e3 * COORD_TOL {
                    return match kind {
                        SphereChart::Folded => Limit::Escapes,
                        SphereChart::Doubled { .. } => Limit::InChart(Coord::Pole(if z > 0.0 {
                            Pole::North
                        } else {
                            Pole::South
                        })),
                    };
                }
                let z = if z.abs() <= 1e3 * COORD_TOL { 0.0 } else { z };
                match self.normalize(&Coord::Cyl { theta, z }) {
                    Ok(c) => Limit::InChart(c),
                    Err(_) => Limit::Escapes,
                }
            }
            (_, c) => match self.normalize(&c) {
                Ok(c) => Limit::InChart(c),
                Err(_) => Limit::Escapes,
            },
        }
    }

    /// Quasi-uniform sample coordinates (a Kronecker sequence started at
    /// `offset`) plus every distinguished point of the chart.
    pub fn sample_coords(&self, n: usize, offset: [f64; 2]) -> Vec<Coord> {
        let mut out = Vec::with_capacity(n + 16);
        match &self.geometry {
            Geometry::Line(l) => {
                let (lo, hi) = l.domain.bounds();
                const G: f64 = 0.618_033_988_749_894_9;
                let mut i = 0usize;
                while out.len() < n && i < 4 * n + 8 {
                    let u = (offset[0] + i as f64 * G).fract();
                    i += 1;
                    if let Some(t) = l.domain.normalize(lo + (hi - lo) * u) {
                        out.push(Coord::Line(t));
                    }
                }
                out.extend(l.vertices.iter().map(|(t, _)| Coord::Line(*t)));
            }
            Geometry::Sphere(kind) => {
                const A1: f64 = 0.754_877_666_246_692_8;
                const A2: f64 = 0.569_840_290_998_053_3;
                let mut i = 0usize;
                while out.len() < n && i < 4 * n + 8 {
                    let u = (offset[0] + i as f64 * A1).fract();
                    let v = (offset[1] + i as f64 * A2).fract();
                    i += 1;
                    if let Ok(c) = self.normalize(&Coord::Cyl {
                        theta: TAU * u,
                        z: 2.0 * v - 1.0,
                    }) {
                        out.push(c);
                    }
                }
                match kind {
                    SphereChart::Folded => out.extend((0..32).map(|j| Coord::Cyl {
                        theta: TAU * j as f64 / 32.0,
                        z: 0.0,
                    })),
                    SphereChart::Doubled { .. } => {
                        out.push(Coord::Pole(Pole::North));
                        out.push(Coord::Pole(Pole::South));
                    }
                }
            }
        }
        out
    }

    /// Distance between two coordinates of this chart (circle-aware).
    pub fn distance(&self, a: &Coord, b: &Coord) -> f64 {
        match (&self.geometry, a, b) {
            (Geometry::Line(l), Coord::Line(s), Coord::Line(t)) => match l.domain.period() {
                Some(p) => {
                    let d = (s - t).rem_euclid(p);
                    d.min(p - d)
                }
                None => (s - t).abs(),
            },
            (_, Coord::Cyl { theta: t1, z: z1 }, Coord::Cyl { theta: t2, z: z2 }) => {
                super::angle_distance(*t1, *t2) + (z1 - z2).abs()
            }
            (_, Coord::Pole(p), Coord::Pole(q)) if p == q => 0.0,
            _ => f64::INFINITY,
        }
    }

    /// Linear extrapolation to `h = 0` from samples at `2h` and `h`.
    pub fn extrapolate(&self, prev: &Coord, last: &Coord) -> Coord {
        let wrap = |d: f64, p: f64| {
            let r = d.rem_euclid(p);
            if r > p / 2.0 {
                r - p
            } else {
                r
            }
        };
        match (&self.geometry, prev, last) {
            (Geometry::Line(l), Coord::Line(s), Coord::Line(t)) => {
                let d = match l.domain.period() {
                    Some(p) => wrap(t - s, p),
                    None => t - s,
                };
                Coord::Line(t + d)
            }
            (_, Coord::Cyl { theta: t1, z: z1 }, Coord::Cyl { theta: t2, z: z2 }) => Coord::Cyl {
                theta: t2 + wrap(t2 - t1, TAU),
                z: 2.0 * z2 - z1,
            },
            _ => *last,
        }
    }

    pub(crate) fn point(&self, c: Coord) -> PointRef {
        PointRef {
            chart: self.id,
            coord: c,
        }
    }
}
