use std::collections::{BTreeMap, BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::chart::{Chart, Geometry, Limit, SphereChart};
use super::{BaseKey, BasePoint, ChartId, Coord, Orbit, PointRef, SpaceError, COORD_TOL};
use crate::ktheory::{EdgeEnd, EndIncidence, OneDStratified, StratifiedEdge};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Manifold {
    Circle,
}

/// How a model was built.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ModelKind {
    SolenoidAabAb {
        section: bool,
    },
    BrokenHeart,
    TwistedSphere {
        equator_classes: usize,
    },
    Pinch {
        manifold: Manifold,
        a: Vec<f64>,
        k: usize,
    },
    Cover,
    Wedge {
        left: Box<ModelKind>,
        right: Box<ModelKind>,
        left_point: PointRef,
        right_point: PointRef,
    },
    Restricted {
        parent: Box<ModelKind>,
        charts: Vec<ChartId>,
    },
}

/// One way of approaching a branch class: base points `anchor + h·direction`
/// on `stratum`, accumulating on every point of `limits` as `h -> 0⁺`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproachPath {
    pub label: String,
    pub stratum: String,
    pub anchor: Vec<f64>,
    pub direction: Vec<f64>,
    pub limits: Vec<BasePoint>,
}

/// A finite set of mutually non-separated base points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchClass {
    pub name: String,
    pub members: Vec<BasePoint>,
    pub paths: Vec<ApproachPath>,
}

impl BranchClass {
    pub fn contains(&self, x: &BasePoint) -> bool {
        self.members.iter().any(|m| m.approx_eq(x))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproachSequence {
    pub class: String,
    pub path: String,
    pub limits: Vec<BasePoint>,
    pub samples: Vec<BasePoint>,
    pub distances: Vec<f64>,
}

/// An edge end `(edge, s_end)` converging to `vertex`; `inward` is the sign
/// of `ds` when moving into the edge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedIncidence {
    pub edge: String,
    pub s_end: f64,
    pub inward: i8,
    pub vertex: String,
}

/// A local homeomorphism `ψ: Y -> X` given by charts. Immutable once built.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpaceModel {
    kind: ModelKind,
    charts: Vec<Chart>,
    /// `(alias, canonical)`: two chart coordinates naming the same point of `Y`.
    point_glue: Vec<(PointRef, PointRef)>,
    /// `(alias, canonical)` names of the same point of `X`.
    base_glue: Vec<(BasePoint, BasePoint)>,
    explicit_classes: Vec<BranchClass>,
    incidence: Vec<DerivedIncidence>,
    branch_classes: Vec<BranchClass>,
}

type EndKey = (String, i64, i8);

impl SpaceModel {
    pub(crate) fn assemble(
        kind: ModelKind,
        charts: Vec<Chart>,
        point_glue: Vec<(PointRef, PointRef)>,
        base_glue: Vec<(BasePoint, BasePoint)>,
        explicit_classes: Vec<BranchClass>,
    ) -> Result<SpaceModel, SpaceError> {
        let mut seen = HashSet::new();
        for c in &charts {
            if !seen.insert(c.id) {
                return Err(SpaceError::Malformed(format!(
                    "duplicate chart id {}",
                    c.id
                )));
            }
        }
        let mut m = SpaceModel {
            kind,
            charts,
            point_glue,
            base_glue,
            explicit_classes,
            incidence: Vec::new(),
            branch_classes: Vec::new(),
        };
        m.incidence = m.derive_incidence()?;
        let mut classes = m.derive_classes();
        let explicit = std::mem::take(&mut m.explicit_classes);
        let kept: Vec<BranchClass> = explicit
            .into_iter()
            .filter(|c| c.members.iter().all(|x| m.fiber(x).is_ok()))
            .collect();
        classes.extend(kept.iter().cloned());
        m.explicit_classes = kept;
        m.branch_classes = classes;
        Ok(m)
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn chart(&self, id: ChartId) -> Result<&Chart, SpaceError> {
        self.charts
            .iter()
            .find(|c| c.id == id)
            .ok_or(SpaceError::UnknownChart(id))
    }

    pub fn chart_by_name(&self, name: &str) -> Option<&Chart> {
        self.charts.iter().find(|c| c.name == name)
    }

    pub fn branch_classes(&self) -> &[BranchClass] {
        &self.branch_classes
    }

    pub fn incidence(&self) -> &[DerivedIncidence] {
        &self.incidence
    }

    pub(crate) fn point_glue(&self) -> &[(PointRef, PointRef)] {
        &self.point_glue
    }

    pub(crate) fn base_glue(&self) -> &[(BasePoint, BasePoint)] {
        &self.base_glue
    }

    pub(crate) fn explicit_classes(&self) -> &[BranchClass] {
        &self.explicit_classes
    }

    /// Looks a class up by name or by any member's label.
    pub fn branch_class(&self, name: &str) -> Result<&BranchClass, SpaceError> {
        self.branch_classes
            .iter()
            .find(|c| c.name == name)
            .or_else(|| {
                self.branch_classes
                    .iter()
                    .find(|c| c.members.iter().any(|m| m.to_string() == name))
            })
            .ok_or_else(|| SpaceError::UnknownBranchClass(name.to_string()))
    }

    pub fn is_branch_point(&self, x: &BasePoint) -> bool {
        if self.branch_classes.iter().any(|c| c.contains(x)) {
            return true;
        }
        // every equator point of a folded patch is non-separated from its antipode
        self.fiber(x).is_ok_and(|o| {
            o.members.iter().any(|y| {
                matches!(
                    (self.chart(y.chart).map(|c| &c.geometry), y.coord),
                    (Ok(Geometry::Sphere(SphereChart::Folded)), Coord::Cyl { z, .. }) if z == 0.0
                )
            })
        })
    }

    fn canonical_point(&self, y: &PointRef) -> PointRef {
        self.point_glue
            .iter()
            .find(|(alias, _)| alias.approx_eq(y))
            .map_or(*y, |(_, c)| *c)
    }

    fn canonical_base(&self, x: &BasePoint) -> BasePoint {
        self.base_glue
            .iter()
            .find(|(alias, _)| alias.approx_eq(x))
            .map_or_else(|| x.clone(), |(_, c)| c.clone())
    }

    /// Validates `y` against its chart and reduces its coordinate.
    pub fn normalize_point(&self, y: &PointRef) -> Result<PointRef, SpaceError> {
        let chart = self.chart(y.chart)?;
        Ok(chart.point(chart.normalize(&y.coord)?))
    }

    pub fn psi(&self, y: &PointRef) -> Result<BasePoint, SpaceError> {
        let y = self.canonical_point(&self.normalize_point(y)?);
        let x = self.chart(y.chart)?.psi(&y.coord)?;
        Ok(self.canonical_base(&x))
    }

    /// The fiber `ψ⁻¹(x)` in canonical order.
    pub fn fiber(&self, x: &BasePoint) -> Result<Orbit, SpaceError> {
        let x = self.canonical_base(x);
        let mut names = vec![x.clone()];
        names.extend(
            self.base_glue
                .iter()
                .filter(|(_, c)| c.approx_eq(&x))
                .map(|(a, _)| a.clone()),
        );
        let mut members: Vec<PointRef> = Vec::new();
        for name in &names {
            for chart in &self.charts {
                for c in chart.preimages(name) {
                    let y = self.canonical_point(&chart.point(c));
                    if self.chart(y.chart).is_ok() && !members.iter().any(|m| m.approx_eq(&y)) {
                        members.push(y);
                    }
                }
            }
        }
        if members.is_empty() {
            return Err(SpaceError::UnknownBasePoint(x.to_string()));
        }
        members.sort_by(|a, b| a.canonical_cmp(b));
        let base = self.psi(&members[0])?;
        Ok(Orbit { base, members })
    }

    pub fn resolve_orbit(&self, y: &PointRef) -> Result<Orbit, SpaceError> {
        self.fiber(&self.psi(y)?)
    }

    /// Quasi-uniform base points from every chart plus all distinguished
    /// points (vertices, equator, poles, branch classes), deduplicated.
    pub fn sample_base_points(&self, n: usize, seed: u64) -> Vec<BasePoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let per_chart = n.div_ceil(self.charts.len().max(1));
        let mut seen: HashSet<BaseKey> = HashSet::new();
        let mut out = Vec::new();
        let mut push = |x: BasePoint, out: &mut Vec<BasePoint>| {
            if seen.insert(x.key()) {
                out.push(x);
            }
        };
        for chart in &self.charts {
            let offset = [rng.random::<f64>(), rng.random::<f64>()];
            for c in chart.sample_coords(per_chart, offset) {
                if let Ok(x) = self.psi(&chart.point(c)) {
                    push(x, &mut out);
                }
            }
        }
        for class in &self.branch_classes {
            for m in &class.members {
                push(self.canonical_base(m), &mut out);
            }
        }
        out
    }

    /// Limit in `Y` of chart points converging to `c`, after gluing.
    pub fn limit_point(&self, chart: ChartId, c: &Coord) -> Option<PointRef> {
        let ch = self.chart(chart).ok()?;
        let y = match ch.limit(c) {
            Limit::InChart(c) => ch.point(c),
            Limit::Joined(y) => self.normalize_point(&y).ok()?,
            Limit::Escapes => return None,
        };
        let y = self.canonical_point(&y);
        self.chart(y.chart).ok().map(|_| y)
    }

    fn derive_incidence(&self) -> Result<Vec<DerivedIncidence>, SpaceError> {
        let mut out: Vec<DerivedIncidence> = Vec::new();
        for chart in &self.charts {
            let Some(line) = chart.line() else { continue };
            for (i, t, s_end, inward) in line.segment_ends() {
                let Some(y) = self.limit_point(chart.id, &Coord::Line(t)) else {
                    continue;
                };
                let x = self.psi(&y)?;
                if !x.is_isolated() {
                    return Err(SpaceError::Malformed(format!(
                        "segment {i} of chart {} ends at non-vertex {x}",
                        chart.name
                    )));
                }
                let d = DerivedIncidence {
                    edge: format!("{}{}", chart.prefix, line.segments[i].edge),
                    s_end,
                    inward,
                    vertex: x.stratum,
                };
                if !out.contains(&d) {
                    out.push(d);
                }
            }
        }
        out.sort_by(|a, b| {
            a.edge
                .cmp(&b.edge)
                .then(a.s_end.total_cmp(&b.s_end))
                .then(a.inward.cmp(&b.inward))
                .then(a.vertex.cmp(&b.vertex))
        });
        Ok(out)
    }

    fn end_groups(&self) -> BTreeMap<EndKey, BTreeSet<String>> {
        let mut groups: BTreeMap<EndKey, BTreeSet<String>> = BTreeMap::new();
        for d in &self.incidence {
            let key = (
                d.edge.clone(),
                (d.s_end / COORD_TOL).round() as i64,
                d.inward,
            );
            groups.entry(key).or_default().insert(d.vertex.clone());
        }
        groups
    }

    /// Vertices reached by a common edge end cannot be separated; classes are
    /// the connected components of that relation with at least two members.
    fn derive_classes(&self) -> Vec<BranchClass> {
        let groups = self.end_groups();
        let mut parent: BTreeMap<String, String> = BTreeMap::new();
        fn find(p: &mut BTreeMap<String, String>, v: &str) -> String {
            let next = p.get(v).cloned().unwrap_or_else(|| v.to_string());
            if next == v {
                return next;
            }
            let root = find(p, &next);
            p.insert(v.to_string(), root.clone());
            root
        }
        for set in groups.values() {
            let mut it = set.iter();
            if let Some(first) = it.next() {
                let r0 = find(&mut parent, first);
                for v in it {
                    let r = find(&mut parent, v);
                    if r != r0 {
                        parent.insert(r, r0.clone());
                    }
                }
            }
        }
        let mut comps: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        let all: BTreeSet<String> = groups.values().flatten().cloned().collect();
        for v in &all {
            let r = find(&mut parent, v);
            comps.entry(r).or_default().insert(v.clone());
        }
        let mut classes = Vec::new();
        for members in comps.values().filter(|m| m.len() >= 2) {
            let mut paths = Vec::new();
            for ((edge, _, inward), set) in &groups {
                if set.is_disjoint(members) {
                    continue;
                }
                let d = self
                    .incidence
                    .iter()
                    .find(|d| &d.edge == edge && d.inward == *inward && set.contains(&d.vertex))
                    .expect("group built from incidence");
                let s = d.s_end;
                let label = if s.abs() <= COORD_TOL && *inward > 0 {
                    format!("{edge} start")
                } else if (s - 1.0).abs() <= COORD_TOL && *inward < 0 {
                    format!("{edge} end")
                } else {
                    format!("{edge}@{s}{}", if *inward > 0 { "+" } else { "-" })
                };
                paths.push(ApproachPath {
                    label,
                    stratum: edge.clone(),
                    anchor: vec![s],
                    direction: vec![f64::from(*inward)],
                    limits: set.iter().map(BasePoint::vertex).collect(),
                });
            }
            classes.push(BranchClass {
                name: members.iter().cloned().collect::<Vec<_>>().join(","),
                members: members.iter().map(BasePoint::vertex).collect(),
                paths,
            });
        }
        classes
    }

    /// Sequences `anchor + eps0·2⁻ⁱ·direction`, `i = 0..n`, one per
    /// approach path of the class.
    pub fn approach_sequences(
        &self,
        class: &str,
        n: usize,
        eps0: f64,
    ) -> Result<Vec<ApproachSequence>, SpaceError> {
        if n < 2 {
            return Err(SpaceError::Parameter(format!(
                "n = {n}, need at least 2 samples"
            )));
        }
        if !(eps0.is_finite() && eps0 > 0.0) {
            return Err(SpaceError::Parameter(format!(
                "eps0 = {eps0} must be positive"
            )));
        }
        let last = eps0 * 0.5f64.powi(n as i32 - 1);
        if last < 1e-8 {
            return Err(SpaceError::Parameter(format!(
                "final distance {last:e} is below resolution 1e-8"
            )));
        }
        let bc = self.branch_class(class)?;
        let mut out = Vec::with_capacity(bc.paths.len());
        for path in &bc.paths {
            let mut samples = Vec::with_capacity(n);
            let mut distances = Vec::with_capacity(n);
            for i in 0..n {
                let h = eps0 * 0.5f64.powi(i as i32);
                let coords: Vec<f64> = path
                    .anchor
                    .iter()
                    .zip(&path.direction)
                    .map(|(a, d)| a + h * d)
                    .collect();
                let x = self
                    .fiber(&BasePoint::on(path.stratum.clone(), &coords))?
                    .base;
                if path.limits.iter().any(|l| l.approx_eq(&x)) || self.is_branch_point(&x) {
                    return Err(SpaceError::Parameter(format!(
                        "sample {x} of path {} lies on the branch locus",
                        path.label
                    )));
                }
                samples.push(x);
                distances.push(h);
            }
            out.push(ApproachSequence {
                class: bc.name.clone(),
                path: path.label.clone(),
                limits: path.limits.clone(),
                samples,
                distances,
            });
        }
        Ok(out)
    }

    /// The vertex-class stratification of a graph-like model, with edges and
    /// classes in the given order. Edge ranks are generic orbit sizes.
    pub fn stratification(
        &self,
        edges: &[&str],
        classes: &[&str],
    ) -> Result<OneDStratified, SpaceError> {
        let mut out = OneDStratified {
            edges: Vec::new(),
            vertex_classes: classes.iter().map(|c| c.to_string()).collect(),
            incidence: Vec::new(),
        };
        for e in edges {
            let rank = self.fiber(&BasePoint::on(*e, &[0.5]))?.len();
            out.edges.push(StratifiedEdge {
                name: e.to_string(),
                rank,
            });
        }
        for d in &self.incidence {
            let edge = edges.iter().position(|e| *e == d.edge);
            let class = classes.iter().position(|c| *c == d.vertex);
            let (Some(edge), Some(class)) = (edge, class) else {
                return Err(SpaceError::Malformed(format!(
                    "incidence {}@{} -> {} outside the requested strata",
                    d.edge, d.s_end, d.vertex
                )));
            };
            let end = if d.s_end.abs() <= COORD_TOL && d.inward > 0 {
                EdgeEnd::Start
            } else if (d.s_end - 1.0).abs() <= COORD_TOL && d.inward < 0 {
                EdgeEnd::End
            } else {
                return Err(SpaceError::Malformed(format!(
                    "edge {} has an end at s = {}",
                    d.edge, d.s_end
                )));
            };
            out.incidence.push(EndIncidence {
                edge,
                end,
                class,
                multiplicity: 1,
            });
        }
        out.incidence.sort();
        Ok(out)
    }

    /// The sub-model on a closed invariant union of charts.
    pub fn restrict_to(&self, ids: &[ChartId]) -> Result<SpaceModel, SpaceError> {
        for id in ids {
            self.chart(*id)?;
        }
        let inside = |id: ChartId| ids.contains(&id);
        for c in self.charts.iter().filter(|c| inside(c.id)) {
            if let Some(l) = c.line() {
                for (_, y) in &l.joins {
                    if !inside(y.chart) {
                        return Err(SpaceError::Invariance(format!(
                            "chart {} is glued to chart {} outside the subset",
                            c.name, y.chart
                        )));
                    }
                }
            }
        }
        for (alias, canon) in &self.point_glue {
            if inside(alias.chart) && !inside(canon.chart) {
                return Err(SpaceError::Invariance(format!(
                    "{alias} is glued outside the subset"
                )));
            }
        }
        for x in self.sample_base_points(2000, 0) {
            let o = self.fiber(&x)?;
            let n_in = o.members.iter().filter(|y| inside(y.chart)).count();
            if n_in != 0 && n_in != o.len() {
                return Err(SpaceError::Invariance(format!(
                    "orbit over {x} has {n_in} of {} members in the subset",
                    o.len()
                )));
            }
        }
        let mut charts: Vec<ChartId> = ids.to_vec();
        charts.sort();
        charts.dedup();
        SpaceModel::assemble(
            ModelKind::Restricted {
                parent: Box::new(self.kind.clone()),
                charts: charts.clone(),
            },
            self.charts
                .iter()
                .filter(|c| inside(c.id))
                .cloned()
                .collect(),
            self.point_glue.clone(),
            self.base_glue.clone(),
            self.explicit_classes.clone(),
        )
    }
}
