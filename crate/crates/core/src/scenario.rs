//! Named end-to-end runs over the shipped examples.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog;
use crate::conv::{
    check_branch_continuity, indicator_projection, verify_projection, AlgebraElement, ConvError,
    Region, VerificationReport, CONTINUITY_TOL,
};
use crate::ktheory::{
    circle_k_theory, duality_check, finite_set_k_theory, k_homology, pinch_k_theory,
    pinch_strata_oracle, solve_six_term, vertex_class_boundary, EdgeEnd, FgAbGroup, IntMatrix,
    OneDStratified,
};
use crate::spaces::{self, BasePoint, ChartId, SpaceModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioName {
    AabAb,
    BrokenHeart,
    BrokenHeartWedge,
    TwistedSphere,
    Pinch,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 5] = [
        ScenarioName::AabAb,
        ScenarioName::BrokenHeart,
        ScenarioName::BrokenHeartWedge,
        ScenarioName::TwistedSphere,
        ScenarioName::Pinch,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioName::AabAb => "aab-ab",
            ScenarioName::BrokenHeart => "broken-heart",
            ScenarioName::BrokenHeartWedge => "broken-heart-wedge",
            ScenarioName::TwistedSphere => "twisted-sphere",
            ScenarioName::Pinch => "pinch",
        }
    }

    /// Parameter names, defaults and accepted ranges.
    pub fn parameters(self) -> &'static [ParamInfo] {
        const SAMPLES: ParamInfo = ParamInfo {
            name: "samples",
            default: "2000",
            range: "1..=1000000",
        };
        const SEED: ParamInfo = ParamInfo {
            name: "seed",
            default: "0",
            range: "any u64",
        };
        match self {
            ScenarioName::AabAb | ScenarioName::BrokenHeart | ScenarioName::BrokenHeartWedge => {
                &[SAMPLES, SEED]
            }
            ScenarioName::TwistedSphere => &[
                ParamInfo {
                    name: "samples",
                    default: "10000",
                    range: "1..=1000000",
                },
                ParamInfo {
                    name: "tol",
                    default: "1e-12",
                    range: "0..=1",
                },
                SEED,
                ParamInfo {
                    name: "classes",
                    default: "8",
                    range: "1..=64",
                },
                ParamInfo {
                    name: "n",
                    default: "12",
                    range: "2..=30",
                },
                ParamInfo {
                    name: "eps0",
                    default: "0.05",
                    range: "(0, 0.5]",
                },
            ],
            ScenarioName::Pinch => &[
                ParamInfo {
                    name: "m",
                    default: "3",
                    range: "1..=64",
                },
                ParamInfo {
                    name: "k",
                    default: "2",
                    range: "2..=16",
                },
            ],
        }
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioName {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ScenarioName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| ScenarioError::UnknownScenario(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParamInfo {
    pub name: &'static str,
    pub default: &'static str,
    pub range: &'static str,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScenarioError {
    #[error("unknown scenario {0:?}; expected one of aab-ab, broken-heart, broken-heart-wedge, twisted-sphere, pinch")]
    UnknownScenario(String),
    #[error("scenario {scenario} has no parameter {name:?}")]
    UnknownParameter {
        scenario: ScenarioName,
        name: String,
    },
    #[error("parameter {name} = {value:?} is not in {range}")]
    BadParameter {
        name: String,
        value: String,
        range: &'static str,
    },
    #[error("malformed parameter {0:?}; expected key=value")]
    Malformed(String),
}

/// A scenario and its raw `key=value` parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScenarioSpec {
    pub name: ScenarioName,
    pub params: BTreeMap<String, String>,
}

impl ScenarioSpec {
    pub fn new(name: ScenarioName) -> Self {
        ScenarioSpec {
            name,
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    /// Parses `key=value` strings; later keys override earlier ones.
    pub fn parse(name: &str, params: &[String]) -> Result<Self, ScenarioError> {
        let mut spec = ScenarioSpec::new(name.parse()?);
        for p in params {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| ScenarioError::Malformed(p.clone()))?;
            spec.params
                .insert(k.trim().to_string(), v.trim().to_string());
        }
        spec.resolve()?;
        Ok(spec)
    }

    /// Every parameter with defaults filled in, checked against its range.
    pub fn resolve(&self) -> Result<Params, ScenarioError> {
        let known = self.name.parameters();
        for k in self.params.keys() {
            if !known.iter().any(|p| p.name == k) {
                return Err(ScenarioError::UnknownParameter {
                    scenario: self.name,
                    name: k.clone(),
                });
            }
        }
        let get = |name: &str| -> (&ParamInfo, &str) {
            let info = known
                .iter()
                .find(|p| p.name == name)
                .expect("declared parameter");
            let v = self.params.get(name).map_or(info.default, |s| s.as_str());
            (info, v)
        };
        let bad = |info: &ParamInfo, v: &str| ScenarioError::BadParameter {
            name: info.name.to_string(),
            value: v.to_string(),
            range: info.range,
        };
        let int = |name: &str, lo: usize, hi: usize| -> Result<usize, ScenarioError> {
            let (info, v) = get(name);
            v.parse::<usize>()
                .ok()
                .filter(|n| (lo..=hi).contains(n))
                .ok_or_else(|| bad(info, v))
        };
        let seed = |name: &str| -> Result<u64, ScenarioError> {
            let (info, v) = get(name);
            v.parse::<u64>().map_err(|_| bad(info, v))
        };
        let real = |name: &str, ok: fn(f64) -> bool| -> Result<f64, ScenarioError> {
            let (info, v) = get(name);
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite() && ok(*x))
                .ok_or_else(|| bad(info, v))
        };
        Ok(match self.name {
            ScenarioName::AabAb | ScenarioName::BrokenHeart | ScenarioName::BrokenHeartWedge => {
                Params::Sampled {
                    samples: int("samples", 1, 1_000_000)?,
                    seed: seed("seed")?,
                }
            }
            ScenarioName::TwistedSphere => Params::TwistedSphere {
                samples: int("samples", 1, 1_000_000)?,
                tol: real("tol", |t| (0.0..=1.0).contains(&t))?,
                seed: seed("seed")?,
                classes: int("classes", 1, 64)?,
                n: int("n", 2, 30)?,
                eps0: real("eps0", |e| e > 0.0 && e <= 0.5)?,
            },
            ScenarioName::Pinch => Params::Pinch {
                m: int("m", 1, 64)?,
                k: int("k", 2, 16)?,
            },
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Params {
    Sampled {
        samples: usize,
        seed: u64,
    },
    TwistedSphere {
        samples: usize,
        tol: f64,
        seed: u64,
        classes: usize,
        n: usize,
        eps0: f64,
    },
    Pinch {
        m: usize,
        k: usize,
    },
}

/// Where an expected value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    /// Transcribed data shipped with the example.
    Stored,
    /// Recomputed from the model.
    Derived,
    /// An independent computation of the same quantity.
    Oracle,
    /// A numerical tolerance.
    Bound,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Stored => "stored",
            Source::Derived => "derived",
            Source::Oracle => "oracle",
            Source::Bound => "bound",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub source: Source,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub scenario: ScenarioName,
    pub parameters: Params,
    pub checks: Vec<Check>,
    pub flags: BTreeMap<String, bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationReport>,
    pub passed: bool,
}

impl ScenarioReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

/// Numbers in reports are written by this one function so the text and JSON
/// forms agree digit for digit.
pub fn fmt_num(x: f64) -> String {
    serde_json::to_string(&x).unwrap_or_else(|_| x.to_string())
}

#[derive(Default)]
struct Checks {
    checks: Vec<Check>,
    flags: BTreeMap<String, bool>,
    verification: Option<VerificationReport>,
}

impl Checks {
    fn eq<T: PartialEq + fmt::Display>(
        &mut self,
        name: &str,
        source: Source,
        expected: T,
        observed: T,
    ) {
        self.checks.push(Check {
            name: name.to_string(),
            passed: expected == observed,
            expected: expected.to_string(),
            observed: observed.to_string(),
            source,
        });
    }

    fn at_most(&mut self, name: &str, bound: f64, observed: f64) {
        self.checks.push(Check {
            name: name.to_string(),
            expected: format!("<= {}", fmt_num(bound)),
            observed: fmt_num(observed),
            source: Source::Bound,
            passed: observed <= bound,
        });
    }

    fn at_least(&mut self, name: &str, bound: f64, observed: f64) {
        self.checks.push(Check {
            name: name.to_string(),
            expected: format!(">= {}", fmt_num(bound)),
            observed: fmt_num(observed),
            source: Source::Bound,
            passed: observed >= bound,
        });
    }

    fn count_at_least(&mut self, name: &str, bound: usize, observed: usize) {
        self.checks.push(Check {
            name: name.to_string(),
            expected: format!(">= {bound}"),
            observed: observed.to_string(),
            source: Source::Bound,
            passed: observed >= bound,
        });
    }

    /// A step that could not run: recorded as a failed check.
    fn error(&mut self, name: &str, e: impl fmt::Display) {
        self.checks.push(Check {
            name: name.to_string(),
            expected: "no error".into(),
            observed: format!("error: {e}"),
            source: Source::Derived,
            passed: false,
        });
    }

    fn flag(&mut self, name: &str, v: bool) {
        self.flags.insert(name.to_string(), v);
    }
}

struct Pair<'a>(&'a FgAbGroup, &'a FgAbGroup);

impl fmt::Display for Pair<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0, self.1)
    }
}

impl PartialEq for Pair<'_> {
    fn eq(&self, o: &Self) -> bool {
        self.0 == o.0 && self.1 == o.1
    }
}

pub fn run_scenario(spec: &ScenarioSpec) -> Result<ScenarioReport, ScenarioError> {
    let params = spec.resolve()?;
    let mut c = Checks::default();
    match (&params, spec.name) {
        (Params::Sampled { samples, seed }, ScenarioName::AabAb) => aab_ab(&mut c, *samples, *seed),
        (Params::Sampled { samples, seed }, ScenarioName::BrokenHeart) => {
            broken_heart(&mut c, *samples, *seed)
        }
        (Params::Sampled { samples, seed }, ScenarioName::BrokenHeartWedge) => {
            broken_heart_wedge(&mut c, *samples, *seed)
        }
        (
            Params::TwistedSphere {
                samples,
                tol,
                seed,
                classes,
                n,
                eps0,
            },
            _,
        ) => twisted_sphere(&mut c, *samples, *tol, *seed, *classes, *n, *eps0),
        (Params::Pinch { m, k }, _) => pinch(&mut c, *m, *k),
        _ => unreachable!("parameters resolved for another scenario"),
    }
    let passed = c.checks.iter().all(|ch| ch.passed);
    Ok(ScenarioReport {
        scenario: spec.name,
        parameters: params,
        checks: c.checks,
        flags: c.flags,
        verification: c.verification,
        passed,
    })
}

fn class_members(model: &SpaceModel) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = model
        .branch_classes()
        .iter()
        .map(|cl| {
            let mut m: Vec<String> = cl.members.iter().map(|x| x.to_string()).collect();
            m.sort();
            m
        })
        .collect();
    out.sort();
    out
}

fn fmt_classes(classes: &[Vec<String>]) -> String {
    let inner: Vec<String> = classes
        .iter()
        .map(|c| format!("{{{}}}", c.join(", ")))
        .collect();
    format!("[{}]", inner.join(", "))
}

fn stored_classes(members: &[&str]) -> String {
    let mut m: Vec<String> = members.iter().map(|s| s.to_string()).collect();
    m.sort();
    fmt_classes(&[m])
}

/// `edge@0:class` for a start, `edge@1:class` for an end.
fn fmt_incidence(s: &OneDStratified) -> String {
    let parts: Vec<String> = s
        .incidence
        .iter()
        .map(|i| {
            let end = match i.end {
                EdgeEnd::Start => 0,
                EdgeEnd::End => 1,
            };
            format!(
                "{}@{end}:{}",
                s.edges[i.edge].name, s.vertex_classes[i.class]
            )
        })
        .collect();
    format!("[{}]", parts.join(", "))
}

fn fmt_matrix(m: &IntMatrix) -> String {
    match m.to_i64_rows() {
        Some(rows) => format!("{rows:?}"),
        None => m.to_string(),
    }
}

/// Largest trace of `p` over the samples, or an error.
fn max_trace(p: &AlgebraElement, xs: &[BasePoint]) -> Result<f64, ConvError> {
    let mut best: f64 = 0.0;
    for x in xs {
        best = best.max(p.evaluate(x)?.trace().re);
    }
    Ok(best)
}

/// An indicator projection over a compact region, verified exactly on
/// samples; returns its report.
fn verify_indicator(
    c: &mut Checks,
    model: &Arc<SpaceModel>,
    chart: &str,
    samples: usize,
    seed: u64,
) -> Option<(AlgebraElement, Vec<BasePoint>)> {
    let built = Region::by_names(model, &[chart]).and_then(|k| indicator_projection(model, &k));
    let p = match built {
        Ok(p) => p,
        Err(e) => {
            c.error("indicator projection", e);
            return None;
        }
    };
    let xs = model.sample_base_points(samples, seed);
    match verify_projection(&p, &xs, 0.0) {
        Ok(r) => {
            c.at_most(
                "indicator idempotency defect",
                0.0,
                r.max_idempotency_defect,
            );
            c.at_most(
                "indicator self-adjointness defect",
                0.0,
                r.max_selfadjoint_defect,
            );
            c.verification = Some(r);
        }
        Err(e) => c.error("indicator verification", e),
    }
    Some((p, xs))
}

fn aab_ab(c: &mut Checks, samples: usize, seed: u64) {
    let circle = spaces::solenoid_aab_ab(false);
    c.eq(
        "branch classes",
        Source::Stored,
        stored_classes(&catalog::AAB_AB_BRANCH_CLASS),
        fmt_classes(&class_members(&circle)),
    );

    let stored = catalog::aab_ab_incidence();
    let stored_delta = catalog::aab_ab_delta0();
    match circle.stratification(&catalog::AAB_AB_EDGES, &catalog::AAB_AB_CLASSES) {
        Ok(derived) => {
            c.eq(
                "edge-end incidence",
                Source::Stored,
                fmt_incidence(&stored),
                fmt_incidence(&derived),
            );
            let ranks = |s: &OneDStratified| {
                format!("{:?}", s.edges.iter().map(|e| e.rank).collect::<Vec<_>>())
            };
            c.eq(
                "edge ranks",
                Source::Stored,
                ranks(&stored),
                ranks(&derived),
            );
            match vertex_class_boundary(&derived) {
                Ok(d) => c.eq(
                    "delta0 from model",
                    Source::Stored,
                    fmt_matrix(&stored_delta),
                    fmt_matrix(&d),
                ),
                Err(e) => c.error("delta0 from model", e),
            }
        }
        Err(e) => c.error("edge-end incidence", e),
    }
    match vertex_class_boundary(&stored) {
        Ok(d) => c.eq(
            "delta0 from stored incidence",
            Source::Stored,
            fmt_matrix(&stored_delta),
            fmt_matrix(&d),
        ),
        Err(e) => c.error("delta0 from stored incidence", e),
    }

    let (e0, e1) = catalog::aab_ab_expected_k();
    match solve_six_term(&catalog::aab_ab_ses()) {
        Ok((k0, k1)) => {
            c.eq("K0", Source::Stored, &e0, &k0);
            c.eq("K1", Source::Stored, &e1, &k1);
            let (h0, h1) = k_homology(&stored_delta);
            c.eq("K^0", Source::Stored, &e0, &h0);
            c.eq("K^1", Source::Stored, &e1, &h1);
            let d = duality_check(&k0, &k1, &h0, &h1);
            c.eq("even self-duality", Source::Stored, true, d.even_self_dual);
            c.eq(
                "odd self-duality (rational)",
                Source::Stored,
                false,
                d.odd_self_dual_rationally,
            );
            c.flag("even_self_dual", d.even_self_dual);
            c.flag("odd_self_dual_rationally", d.odd_self_dual_rationally);
        }
        Err(e) => c.error("K-theory", e),
    }

    // The outer circle through aa carries a projection that is nonzero but
    // vanishes over b.
    let section = Arc::new(spaces::solenoid_aab_ab(true));
    if let Some((p, xs)) = verify_indicator(c, &section, "K", samples, seed) {
        match (
            max_trace(&p, &xs),
            crate::conv::verify_fullness_witness(&p, &xs),
        ) {
            (Ok(t), Ok(floor)) => {
                c.eq(
                    "indicator max trace",
                    Source::Derived,
                    fmt_num(1.0),
                    fmt_num(t),
                );
                c.eq(
                    "indicator fullness floor",
                    Source::Derived,
                    fmt_num(0.0),
                    fmt_num(floor),
                );
                c.flag("nonzero_projection", t > 0.0);
                c.flag("full_projection_witness", floor > 0.0);
            }
            (Err(e), _) | (_, Err(e)) => c.error("indicator traces", e),
        }
    }
}

fn broken_heart(c: &mut Checks, samples: usize, seed: u64) {
    let model = Arc::new(spaces::broken_heart());
    c.eq(
        "branch classes",
        Source::Stored,
        stored_classes(&catalog::BROKEN_HEART_BRANCH_CLASS),
        fmt_classes(&class_members(&model)),
    );
    // Every sampled point of the open edge I carries the full matrix block.
    let xs = model.sample_base_points(samples, seed);
    let mut sizes = Vec::new();
    for x in xs.iter().filter(|x| x.stratum == "I") {
        match model.fiber(x) {
            Ok(o) => sizes.push(o.len()),
            Err(e) => return c.error("orbit sizes", e),
        }
    }
    sizes.sort_unstable();
    sizes.dedup();
    c.eq(
        "ideal orbit sizes",
        Source::Stored,
        format!("{:?}", [catalog::BROKEN_HEART_IDEAL_RANK]),
        format!("{sizes:?}"),
    );
    match model.fiber(&BasePoint::vertex("p")) {
        Ok(o) => c.eq("quotient orbit size", Source::Derived, 1, o.len()),
        Err(e) => c.error("quotient orbit size", e),
    }

    let zero = FgAbGroup::zero();
    match solve_six_term(&catalog::broken_heart_ses()) {
        Ok((k0, k1)) => {
            c.eq("K0", Source::Stored, &zero, &k0);
            c.eq("K1", Source::Stored, &zero, &k1);
            c.flag("no_nonzero_projections", k0.is_trivial());
        }
        Err(e) => c.error("K-theory", e),
    }
    // The boundary's sign depends on an orientation choice; the groups do not.
    let mut flipped = catalog::broken_heart_ses();
    flipped.delta0 = IntMatrix::from_rows(&[[-1]]);
    match solve_six_term(&flipped) {
        Ok((k0, k1)) => c.eq(
            "K-theory with opposite orientation",
            Source::Oracle,
            Pair(&zero, &zero),
            Pair(&k0, &k1),
        ),
        Err(e) => c.error("K-theory with opposite orientation", e),
    }
}

fn broken_heart_wedge(c: &mut Checks, samples: usize, seed: u64) {
    let model = Arc::new(spaces::broken_heart_wedge());
    match model.fiber(&BasePoint::vertex("2.p")) {
        Ok(o) => c.eq("wedge point orbit size", Source::Derived, 1, o.len()),
        Err(e) => c.error("wedge point orbit size", e),
    }
    let Some((p, xs)) = verify_indicator(c, &model, "K", samples, seed) else {
        return;
    };
    let right: Vec<ChartId> = ["path", "center"]
        .iter()
        .filter_map(|n| model.chart_by_name(n).map(|ch| ch.id))
        .collect();
    let restricted = p.restrict(&right).and_then(|q| {
        let sub = q.model().clone();
        let ys = sub.sample_base_points(samples, seed);
        let mut worst: f64 = 0.0;
        for y in &ys {
            worst = worst.max(q.evaluate(y)?.max_abs_entry());
        }
        Ok(worst)
    });
    match restricted {
        Ok(w) => {
            c.eq(
                "restriction to broken heart, max entry",
                Source::Derived,
                fmt_num(0.0),
                fmt_num(w),
            );
            c.flag("zero_on_broken_heart", w == 0.0);
        }
        Err(e) => c.error("restriction to broken heart", e),
    }
    match (
        max_trace(&p, &xs),
        crate::conv::verify_fullness_witness(&p, &xs),
    ) {
        (Ok(t), Ok(floor)) => {
            c.eq(
                "indicator max trace",
                Source::Derived,
                fmt_num(1.0),
                fmt_num(t),
            );
            c.eq(
                "fullness floor",
                Source::Derived,
                fmt_num(0.0),
                fmt_num(floor),
            );
            c.flag("nonzero_projection", t > 0.0);
            c.flag("full_projection_witness", floor > 0.0);
        }
        (Err(e), _) | (_, Err(e)) => c.error("indicator traces", e),
    }
}

/// Max over samples of the gap between each fiber's trace and its expected
/// rank: 1 over a single point, 2 otherwise.
fn trace_defect(p: &AlgebraElement, xs: &[BasePoint]) -> Result<(f64, [usize; 3]), ConvError> {
    let mut worst: f64 = 0.0;
    let mut counts = [0usize; 3];
    for x in xs {
        let f = p.evaluate(x)?;
        let (want, slot) = match f.dim() {
            1 => (1.0, 0),
            2 => (2.0, 1),
            _ => (2.0, 2),
        };
        counts[slot] += 1;
        let t = f.trace();
        worst = worst.max((t.re - want).abs()).max(t.im.abs());
    }
    Ok((worst, counts))
}

fn twisted_sphere(
    c: &mut Checks,
    samples: usize,
    tol: f64,
    seed: u64,
    classes: usize,
    n: usize,
    eps0: f64,
) {
    let model = Arc::new(spaces::twisted_sphere(classes));
    let p = match AlgebraElement::twisted_sphere_projection(model.clone()) {
        Ok(p) => p,
        Err(e) => return c.error("projection", e),
    };
    let xs = model.sample_base_points(samples, seed);
    let report = match verify_projection(&p, &xs, tol) {
        Ok(r) => r,
        Err(e) => return c.error("verification", e),
    };
    c.count_at_least("samples", samples, report.samples_used);
    c.at_most("idempotency defect", tol, report.max_idempotency_defect);
    c.at_most(
        "self-adjointness defect",
        tol,
        report.max_selfadjoint_defect,
    );
    c.at_least("fullness floor", 0.25, report.fullness_floor);
    c.flag("full_projection_witness", report.fullness_floor > 0.0);
    match trace_defect(&p, &xs) {
        Ok((d, counts)) => {
            c.at_most("trace defect", tol, d);
            c.count_at_least("equator samples", 1, counts[0]);
            c.count_at_least("pole samples", 1, counts[1]);
        }
        Err(e) => c.error("traces", e),
    }
    let mut seqs = Vec::new();
    for cl in model.branch_classes() {
        match model.approach_sequences(&cl.name, n, eps0) {
            Ok(s) => seqs.extend(s),
            Err(e) => return c.error("approach sequences", e),
        }
    }
    match check_branch_continuity(&p, &seqs, CONTINUITY_TOL) {
        Ok(defects) => {
            let worst = defects.iter().map(|d| d.defect).fold(0.0, f64::max);
            c.at_most("continuity defect", CONTINUITY_TOL, worst);
            c.verification = Some(report.with_continuity(defects));
        }
        Err(e) => c.error("continuity", e),
    }
}

fn pinch(c: &mut Checks, m: usize, k: usize) {
    let a: Vec<f64> = (0..m).map(|j| (j as f64 + 0.5) / m as f64).collect();
    let model = match spaces::pinch(&a, k) {
        Ok(model) => model,
        Err(e) => return c.error("model", e),
    };
    let cls = class_members(&model);
    c.eq("branch class count", Source::Derived, m, cls.len());
    let sizes: Vec<usize> = cls.iter().map(|c| c.len()).collect();
    c.eq(
        "branch class sizes",
        Source::Derived,
        format!("{:?}", vec![k; m]),
        format!("{sizes:?}"),
    );
    match model.fiber(&BasePoint::on("m", &[0.5 / m as f64 + 0.25 / m as f64])) {
        Ok(o) => c.eq("generic orbit size", Source::Derived, k, o.len()),
        Err(e) => c.error("generic orbit size", e),
    }
    let (e0, e1) = catalog::pinch_circle_expected(m, k);
    let formula = pinch_k_theory(&circle_k_theory(), &finite_set_k_theory(m), k);
    let oracle = pinch_strata_oracle(m, k);
    match (formula, oracle) {
        (Ok((f0, f1)), Ok((o0, o1))) => {
            c.eq("K-theory", Source::Stored, Pair(&e0, &e1), Pair(&f0, &f1));
            c.eq(
                "K-theory by strata",
                Source::Oracle,
                Pair(&f0, &f1),
                Pair(&o0, &o1),
            );
        }
        (Err(e), _) | (_, Err(e)) => c.error("K-theory", e),
    }
}
