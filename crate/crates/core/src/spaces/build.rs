use std::collections::{BTreeSet, HashMap};
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::chart::{Chart, Geometry, LineChart, LineDomain, Segment, SphereChart};
use super::model::{ApproachPath, BranchClass, Manifold, ModelKind, SpaceModel};
use super::{reduce_angle, BaseKey, BasePoint, ChartId, Coord, PointRef, SpaceError, COORD_TOL};

/// Sampled equator classes of the twisted sphere.
pub const DEFAULT_EQUATOR_CLASSES: usize = 8;

fn line_chart(id: u16, name: &str, chart: LineChart) -> Chart {
    Chart {
        id: ChartId(id),
        name: name.into(),
        prefix: String::new(),
        geometry: Geometry::Line(chart),
    }
}

fn open_interval(lo: f64, hi: f64) -> LineDomain {
    LineDomain::Interval {
        lo,
        hi,
        lo_closed: false,
        hi_closed: false,
    }
}

/// The circle `t ∈ [0, 3)` with vertices `ab@0`, `ba@1`, `aa@2`, the b-arc
/// `(0, 1)` and two a-arcs `(1, 2)`, `(2, 3)`. With `section`, a second
/// chart `K` (a circle of period 1 through `aa`) is a compact open lift of
/// the a-circle.
pub fn solenoid_aab_ab(section: bool) -> SpaceModel {
    let mut charts = vec![line_chart(
        0,
        "Y",
        LineChart {
            domain: LineDomain::Circle { period: 3.0 },
            vertices: vec![(0.0, "ab".into()), (1.0, "ba".into()), (2.0, "aa".into())],
            segments: vec![
                Segment::new(0.0, 1.0, "b", 0.0, 1.0),
                Segment::new(1.0, 2.0, "a", 0.0, 1.0),
                Segment::new(2.0, 3.0, "a", 0.0, 1.0),
            ],
            joins: vec![],
        },
    )];
    if section {
        charts.push(line_chart(
            1,
            "K",
            LineChart {
                domain: LineDomain::Circle { period: 1.0 },
                vertices: vec![(0.0, "aa".into())],
                segments: vec![Segment::new(0.0, 1.0, "a", 0.0, 1.0)],
                joins: vec![],
            },
        ));
    }
    SpaceModel::assemble(
        ModelKind::SolenoidAabAb { section },
        charts,
        vec![],
        vec![],
        vec![],
    )
    .expect("built-in model is well formed")
}

/// The tree `Y`: a path `(0, 8)` running up the left vertical, down to `p`,
/// up to `r` and down the right vertical, plus the central vertical `(0, 2)`
/// hanging from `p`. The three verticals map onto the edge `I`.
pub fn broken_heart() -> SpaceModel {
    let path = line_chart(
        0,
        "path",
        LineChart {
            domain: open_interval(0.0, 8.0),
            vertices: vec![(2.0, "q".into()), (4.0, "p".into()), (6.0, "r".into())],
            segments: vec![
                Segment::new(0.0, 2.0, "I", 0.0, 1.0),
                Segment::new(2.0, 4.0, "dL", 0.0, 1.0),
                Segment::new(4.0, 6.0, "dR", 1.0, 0.0),
                Segment::new(6.0, 8.0, "I", 1.0, 0.0),
            ],
            joins: vec![],
        },
    );
    let center = line_chart(
        1,
        "center",
        LineChart {
            domain: open_interval(0.0, 2.0),
            vertices: vec![],
            segments: vec![Segment::new(0.0, 2.0, "I", 0.0, 1.0)],
            joins: vec![(0.0, PointRef::line(0, 4.0))],
        },
    );
    SpaceModel::assemble(
        ModelKind::BrokenHeart,
        vec![path, center],
        vec![],
        vec![],
        vec![],
    )
    .expect("built-in model is well formed")
}

/// `Y = U ⊔ V₁ ⊔ V₂` over the twisted sphere. The non-separated equator
/// pairs `{(θ, 0), (θ + π, 0)}` form a continuum; `equator_classes` of
/// them, at `θ = πi/equator_classes`, are listed as branch classes.
pub fn twisted_sphere(equator_classes: usize) -> SpaceModel {
    let sphere = |id: u16, name: &str, kind: SphereChart| Chart {
        id: ChartId(id),
        name: name.into(),
        prefix: String::new(),
        geometry: Geometry::Sphere(kind),
    };
    let charts = vec![
        sphere(0, "U", SphereChart::Folded),
        sphere(1, "V1", SphereChart::Doubled { copy: 1 }),
        sphere(2, "V2", SphereChart::Doubled { copy: 2 }),
    ];
    let classes = (0..equator_classes)
        .map(|i| {
            let theta = PI * i as f64 / equator_classes as f64;
            let members = vec![
                BasePoint::on("equator", &[theta]),
                BasePoint::on("equator", &[reduce_angle(theta + PI)]),
            ];
            let phi = reduce_angle(2.0 * theta);
            let path = |label: &str, dz: f64| ApproachPath {
                label: label.into(),
                stratum: "sheet".into(),
                anchor: vec![phi, 0.0],
                direction: vec![0.0, dz],
                limits: members.clone(),
            };
            BranchClass {
                name: format!("equator-{i}"),
                paths: vec![path("z+", 1.0), path("z-", -1.0)],
                members,
            }
        })
        .collect();
    SpaceModel::assemble(
        ModelKind::TwistedSphere { equator_classes },
        charts,
        vec![],
        vec![],
        classes,
    )
    .expect("built-in model is well formed")
}

/// The pinched circle: `k` sheets of the trivial `k`-fold cover of the
/// circle `m = ℝ/ℤ`, identified off `A`. Each `a ∈ A` splits into the `k`
/// non-separated vertices `a{j}:{i}`.
pub fn pinch(a: &[f64], k: usize) -> Result<SpaceModel, SpaceError> {
    if k < 2 {
        return Err(SpaceError::Parameter(format!("k = {k}, need k >= 2")));
    }
    let mut pts: Vec<f64> = Vec::with_capacity(a.len());
    for &x in a {
        if !x.is_finite() {
            return Err(SpaceError::Parameter(format!(
                "point {x} of A is not finite"
            )));
        }
        pts.push(super::reduce_periodic(x, 1.0));
    }
    pts.sort_by(f64::total_cmp);
    if pts.windows(2).any(|w| w[1] - w[0] < 1e-6)
        || (pts.len() > 1 && pts[0] + 1.0 - pts[pts.len() - 1] < 1e-6)
    {
        return Err(SpaceError::Parameter("points of A must be distinct".into()));
    }
    let charts = (0..k)
        .map(|i| {
            let vertices: Vec<(f64, String)> = pts
                .iter()
                .enumerate()
                .map(|(j, &t)| (t, format!("a{j}:{}", i + 1)))
                .collect();
            let segments = if pts.is_empty() {
                vec![Segment {
                    circular: true,
                    ..Segment::new(0.0, 1.0, "m", 0.0, 1.0)
                }]
            } else {
                (0..pts.len())
                    .map(|j| {
                        let lo = pts[j];
                        let hi = if j + 1 < pts.len() {
                            pts[j + 1]
                        } else {
                            pts[0] + 1.0
                        };
                        Segment {
                            circular: true,
                            ..Segment::new(lo, hi, "m", lo, hi)
                        }
                    })
                    .collect()
            };
            line_chart(
                i as u16,
                &format!("W{}", i + 1),
                LineChart {
                    domain: LineDomain::Circle { period: 1.0 },
                    vertices,
                    segments,
                    joins: vec![],
                },
            )
        })
        .collect();
    SpaceModel::assemble(
        ModelKind::Pinch {
            manifold: Manifold::Circle,
            a: pts,
            k,
        },
        charts,
        vec![],
        vec![],
        vec![],
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub name: String,
    #[serde(default)]
    pub circular: bool,
}

/// A graph-like base space `X`: open edges parametrized by `s ∈ (0, 1)`
/// and vertices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphSpace {
    pub edges: Vec<GraphEdge>,
    pub vertices: Vec<String>,
}

const COVER_GRID: usize = 257;

/// `Y` = disjoint union of open subsets of `X`, each mapped identically.
/// Checks coverage on a grid, injectivity of each chart and that no chart
/// contains two non-separated vertices.
pub fn build_cover_groupoid(
    space: &GraphSpace,
    charts: Vec<(String, LineChart)>,
) -> Result<SpaceModel, SpaceError> {
    let edges: HashMap<&str, bool> = space
        .edges
        .iter()
        .map(|e| (e.name.as_str(), e.circular))
        .collect();
    let vertices: BTreeSet<&str> = space.vertices.iter().map(|v| v.as_str()).collect();
    let mut built = Vec::with_capacity(charts.len());
    for (i, (name, mut chart)) in charts.into_iter().enumerate() {
        for seg in &mut chart.segments {
            match edges.get(seg.edge.as_str()) {
                Some(&c) => seg.circular = c,
                None => {
                    return Err(SpaceError::Malformed(format!(
                        "chart {name} uses unknown edge {}",
                        seg.edge
                    )))
                }
            }
        }
        if let Some((_, v)) = chart
            .vertices
            .iter()
            .find(|(_, v)| !vertices.contains(v.as_str()))
        {
            return Err(SpaceError::Malformed(format!(
                "chart {name} uses unknown vertex {v}"
            )));
        }
        if !chart.joins.is_empty() {
            return Err(SpaceError::Malformed(format!(
                "cover chart {name} has joins"
            )));
        }
        let c = line_chart(i as u16, &name, chart);
        check_injective(&c)?;
        built.push(c);
    }
    let model = SpaceModel::assemble(ModelKind::Cover, built, vec![], vec![], vec![])?;
    for e in &space.edges {
        for g in 0..COVER_GRID {
            let x = BasePoint::on(e.name.clone(), &[(g as f64 + 0.5) / COVER_GRID as f64]);
            if model.fiber(&x).is_err() {
                return Err(SpaceError::Coverage(x.to_string()));
            }
        }
    }
    for v in &space.vertices {
        if model.fiber(&BasePoint::vertex(v.clone())).is_err() {
            return Err(SpaceError::Coverage(v.clone()));
        }
    }
    for class in model.branch_classes() {
        for chart in model.charts() {
            let hits = class
                .members
                .iter()
                .filter(|m| !chart.preimages(m).is_empty())
                .count();
            if hits > 1 {
                return Err(SpaceError::NotHausdorff(format!(
                    "chart {} contains {hits} points of class {}",
                    chart.name, class.name
                )));
            }
        }
    }
    Ok(model)
}

fn check_injective(chart: &Chart) -> Result<(), SpaceError> {
    let mut seen: HashMap<BaseKey, Coord> = HashMap::new();
    for c in chart.sample_coords(1024, [0.137, 0.0]) {
        let x = chart.psi(&c)?;
        if let Some(prev) = seen.insert(x.key(), c) {
            if !prev.approx_eq(&c) {
                return Err(SpaceError::Malformed(format!(
                    "chart {} maps {prev} and {c} to {x}",
                    chart.name
                )));
            }
        }
    }
    Ok(())
}

/// The wedge `Y₁ ∨ Y₂ -> X₁ ∨ X₂` glued at `y_left ~ y_right`. Strata get
/// prefixes `1.` and `2.`; right charts are renumbered after the left ones.
/// The glued point keeps its right-hand name.
pub fn wedge(
    left: &SpaceModel,
    right: &SpaceModel,
    y_left: &PointRef,
    y_right: &PointRef,
) -> Result<SpaceModel, SpaceError> {
    for (side, m, y) in [("left", left, y_left), ("right", right, y_right)] {
        let o = m.resolve_orbit(y)?;
        if o.len() != 1 {
            return Err(SpaceError::InvalidWedge(format!(
                "{side} point {y} has orbit of size {}",
                o.len()
            )));
        }
        if m.is_branch_point(&o.base) {
            return Err(SpaceError::InvalidWedge(format!(
                "{side} point {} is a branch point",
                o.base
            )));
        }
    }
    let offset = left.charts().iter().map(|c| c.id.0 + 1).max().unwrap_or(0);
    let shift = |y: &PointRef, by: u16| PointRef {
        chart: ChartId(y.chart.0 + by),
        coord: y.coord,
    };
    let mut charts = Vec::new();
    let mut point_glue = Vec::new();
    let mut base_glue = Vec::new();
    let mut classes = Vec::new();
    for (m, by, tag) in [(left, 0u16, "1."), (right, offset, "2.")] {
        for c in m.charts() {
            let mut c = c.clone();
            c.id = ChartId(c.id.0 + by);
            c.prefix = format!("{tag}{}", c.prefix);
            if let Geometry::Line(l) = &mut c.geometry {
                for (_, y) in &mut l.joins {
                    *y = shift(y, by);
                }
            }
            charts.push(c);
        }
        point_glue.extend(
            m.point_glue()
                .iter()
                .map(|(a, b)| (shift(a, by), shift(b, by))),
        );
        base_glue.extend(
            m.base_glue()
                .iter()
                .map(|(a, b)| (a.prefixed(tag), b.prefixed(tag))),
        );
        classes.extend(m.explicit_classes().iter().map(|c| {
            BranchClass {
                name: format!("{tag}{}", c.name),
                members: c.members.iter().map(|x| x.prefixed(tag)).collect(),
                paths: c
                    .paths
                    .iter()
                    .map(|p| ApproachPath {
                        stratum: format!("{tag}{}", p.stratum),
                        limits: p.limits.iter().map(|x| x.prefixed(tag)).collect(),
                        ..p.clone()
                    })
                    .collect(),
            }
        }));
    }
    let yl = left.normalize_point(y_left)?;
    let yr = shift(&right.normalize_point(y_right)?, offset);
    point_glue.push((yl, yr));
    base_glue.push((
        left.psi(y_left)?.prefixed("1."),
        right.psi(y_right)?.prefixed("2."),
    ));
    SpaceModel::assemble(
        ModelKind::Wedge {
            left: Box::new(left.kind().clone()),
            right: Box::new(right.kind().clone()),
            left_point: yl,
            right_point: yr,
        },
        charts,
        point_glue,
        base_glue,
        classes,
    )
}

/// The wedge of the solenoid (with its a-circle section) and the broken
/// heart, glued at `b(1/2)` and `p`.
pub fn broken_heart_wedge() -> SpaceModel {
    wedge(
        &solenoid_aab_ab(true),
        &broken_heart(),
        &PointRef::line(0, 0.5),
        &PointRef::line(0, 4.0),
    )
    .expect("b(1/2) and p are wedge points")
}

/// True when `x` lies in the image of `chart`, by direct comparison with the
/// chart's vertex labels and segment parameter ranges.
pub fn chart_contains(chart: &LineChart, x: &BasePoint) -> bool {
    match x.coords.as_slice() {
        [] => chart.vertices.iter().any(|(_, v)| *v == x.stratum),
        [s] => chart.segments.iter().any(|seg| {
            let (lo, hi) = if seg.s_lo < seg.s_hi {
                (seg.s_lo, seg.s_hi)
            } else {
                (seg.s_hi, seg.s_lo)
            };
            seg.edge == x.stratum && *s - lo > COORD_TOL && hi - *s > COORD_TOL
        }),
        _ => false,
    }
}
