use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::spaces::{ApproachSequence, BasePoint, Orbit, PointRef};

use super::{op_norm, AlgebraElement, ConvError};

/// Default tolerance for extrapolated limits.
pub const CONTINUITY_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityDefect {
    pub class: String,
    pub path: String,
    /// Largest gap between the extrapolated entries and the value at the
    /// limit, over pairs of members that converge in `Y`.
    pub defect: f64,
    /// Largest extrapolated entry involving a member that leaves `Y`.
    pub escaping: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub max_idempotency_defect: f64,
    pub max_selfadjoint_defect: f64,
    pub fullness_floor: f64,
    pub continuity_defects: Vec<ContinuityDefect>,
    pub samples_used: usize,
    pub tolerance: f64,
    pub passed: bool,
}

impl VerificationReport {
    pub fn with_continuity(mut self, defects: Vec<ContinuityDefect>) -> Self {
        self.passed = self.passed && defects.iter().all(|d| d.passed);
        self.continuity_defects = defects;
        self
    }
}

struct SampleDefects {
    idempotency: f64,
    selfadjoint: f64,
    max_entry: f64,
}

fn sample_defects(p: &AlgebraElement, x: &BasePoint) -> Result<SampleDefects, ConvError> {
    let f = p.evaluate(x)?;
    let m = &f.entries;
    Ok(SampleDefects {
        idempotency: op_norm(&(m * m - m)),
        selfadjoint: op_norm(&(m - m.adjoint())),
        max_entry: f.max_abs_entry(),
    })
}

/// Max over samples of `‖P² − P‖` and `‖P − P*‖`, plus the fullness floor.
/// Samples are checked in parallel; the max/min reduction makes the result
/// independent of order.
pub fn verify_projection(
    p: &AlgebraElement,
    samples: &[BasePoint],
    tol: f64,
) -> Result<VerificationReport, ConvError> {
    if samples.is_empty() {
        return Err(ConvError::Parameter("no samples".into()));
    }
    let per: Vec<SampleDefects> = samples
        .par_iter()
        .map(|x| sample_defects(p, x))
        .collect::<Result<_, _>>()?;
    let idem = per.iter().map(|d| d.idempotency).fold(0.0, f64::max);
    let sa = per.iter().map(|d| d.selfadjoint).fold(0.0, f64::max);
    let floor = per
        .iter()
        .map(|d| d.max_entry)
        .fold(f64::INFINITY, f64::min);
    Ok(VerificationReport {
        max_idempotency_defect: idem,
        max_selfadjoint_defect: sa,
        fullness_floor: floor,
        continuity_defects: Vec::new(),
        samples_used: samples.len(),
        tolerance: tol,
        passed: idem <= tol && sa <= tol,
    })
}

/// `min_x max_{i,j} |p(x)_{ij}|`: positive on a stratified sample set is the
/// numerical witness that `p` is full.
pub fn verify_fullness_witness(
    p: &AlgebraElement,
    samples: &[BasePoint],
) -> Result<f64, ConvError> {
    let maxes: Vec<f64> = samples
        .par_iter()
        .map(|x| p.evaluate(x).map(|f| f.max_abs_entry()))
        .collect::<Result<_, _>>()?;
    if maxes.is_empty() {
        return Ok(0.0);
    }
    Ok(maxes.into_iter().fold(f64::INFINITY, f64::min))
}

/// Richardson extrapolation to `h = 0` of values at `h₀·2⁻ⁱ`, assuming an
/// expansion in powers of `√h`.
pub fn richardson_sqrt(values: &[Complex64]) -> Complex64 {
    let mut t = values.to_vec();
    let r = std::f64::consts::SQRT_2;
    for k in 1..values.len() {
        let rk = r.powi(k as i32);
        for i in (k..values.len()).rev() {
            t[i] = (t[i] * rk - t[i - 1]) / (rk - 1.0);
        }
    }
    t.last().copied().unwrap_or_default()
}

fn track(
    model: &crate::spaces::SpaceModel,
    prev: &[PointRef],
    orbit: &Orbit,
) -> Result<Vec<usize>, ConvError> {
    let mut used = vec![false; orbit.len()];
    let mut perm = Vec::with_capacity(prev.len());
    for y in prev {
        let chart = model.chart(y.chart)?;
        let best = orbit
            .members
            .iter()
            .enumerate()
            .filter(|(i, m)| !used[*i] && m.chart == y.chart)
            .map(|(i, m)| (i, chart.distance(&y.coord, &m.coord)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or_else(|| {
                ConvError::Parameter(format!(
                    "cannot follow {y} into the orbit over {}",
                    orbit.base
                ))
            })?;
        used[best.0] = true;
        perm.push(best.0);
    }
    Ok(perm)
}

/// For each sequence, extrapolates every fiber-matrix entry to the branch
/// locus and compares it with `f` at the limit. Pairs of members converging
/// to points of one orbit must match `f` there; pairs converging to
/// different orbits must vanish. Entries involving a member with no limit in
/// `Y` are reported separately as `escaping`.
pub fn check_branch_continuity(
    f: &AlgebraElement,
    seqs: &[ApproachSequence],
    tol: f64,
) -> Result<Vec<ContinuityDefect>, ConvError> {
    let model = f.model();
    seqs.par_iter()
        .map(|seq| {
            if seq.samples.len() < 2 {
                return Err(ConvError::Parameter(format!(
                    "sequence {} has fewer than two samples",
                    seq.path
                )));
            }
            let mats: Vec<_> = seq
                .samples
                .iter()
                .map(|x| f.evaluate(x))
                .collect::<Result<_, _>>()?;
            let n = mats[0].dim();
            if mats.iter().any(|m| m.dim() != n) {
                return Err(ConvError::Parameter(format!(
                    "orbit size changes along {}",
                    seq.path
                )));
            }
            // perms[i][j]: index in sample i of the member followed from member j of sample 0
            let mut perms: Vec<Vec<usize>> = vec![(0..n).collect()];
            let mut current = mats[0].orbit.members.clone();
            for m in &mats[1..] {
                let p = track(model, &current, &m.orbit)?;
                current = p.iter().map(|&i| m.orbit.members[i]).collect();
                perms.push(p);
            }
            let composed = perms;
            let last = mats.len() - 1;
            let limits: Vec<Option<PointRef>> = (0..n)
                .map(|j| {
                    let a = mats[last - 1].orbit.members[composed[last - 1][j]];
                    let b = mats[last].orbit.members[composed[last][j]];
                    let chart = model.chart(b.chart).ok()?;
                    model.limit_point(b.chart, &chart.extrapolate(&a.coord, &b.coord))
                })
                .collect();
            let mut at_limit = Vec::with_capacity(n);
            for l in &limits {
                at_limit.push(match l {
                    Some(y) => {
                        let x = model.psi(y)?;
                        let v = f.evaluate(&x)?;
                        let idx = v.orbit.index_of(y).ok_or_else(|| {
                            ConvError::Parameter(format!("limit {y} is not in its own orbit"))
                        })?;
                        Some((x, idx, v))
                    }
                    None => None,
                });
            }
            let mut defect = 0.0f64;
            let mut escaping = 0.0f64;
            for i in 0..n {
                for j in 0..n {
                    let vals: Vec<Complex64> = mats
                        .iter()
                        .zip(&composed)
                        .map(|(m, c)| m.get(c[i], c[j]))
                        .collect();
                    let r = richardson_sqrt(&vals);
                    match (&at_limit[i], &at_limit[j]) {
                        (Some((xi, ii, vi)), Some((xj, jj, _))) => {
                            let target = if xi.approx_eq(xj) {
                                vi.get(*ii, *jj)
                            } else {
                                Complex64::new(0.0, 0.0)
                            };
                            defect = defect.max((r - target).norm());
                        }
                        _ => escaping = escaping.max(r.norm()),
                    }
                }
            }
            Ok(ContinuityDefect {
                class: seq.class.clone(),
                path: seq.path.clone(),
                defect,
                escaping,
                passed: defect <= tol,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conv::{indicator_projection, Region};
    use crate::spaces;
    use nalgebra::DMatrix;
    use std::sync::Arc;

    #[test]
    fn richardson_removes_half_powers() {
        let vals: Vec<Complex64> = (0..10)
            .map(|i| {
                let h = 0.1 * 0.5f64.powi(i);
                Complex64::new(2.0 + 3.0 * h.sqrt() - h + 0.5 * h.powf(1.5), 0.0)
            })
            .collect();
        assert!((richardson_sqrt(&vals).re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn half_diagonal_has_quarter_defect() {
        let m = Arc::new(spaces::solenoid_aab_ab(false));
        let x = BasePoint::on("b", &[0.5]);
        let half = DMatrix::from_element(1, 1, Complex64::new(0.5, 0.0));
        let g = AlgebraElement::grid(m, vec![(x.clone(), half)]).unwrap();
        let r = verify_projection(&g, &[x], 1e-12).unwrap();
        assert_eq!(r.max_idempotency_defect, 0.25);
        assert!(!r.passed);
    }

    #[test]
    fn indicator_has_zero_defect() {
        let m = Arc::new(spaces::solenoid_aab_ab(true));
        let p = indicator_projection(&m, &Region::by_names(&m, &["K"]).unwrap()).unwrap();
        let s = m.sample_base_points(500, 3);
        let r = verify_projection(&p, &s, 0.0).unwrap();
        assert_eq!(r.max_idempotency_defect, 0.0);
        assert_eq!(r.max_selfadjoint_defect, 0.0);
        assert!(r.passed);
        assert_eq!(r.fullness_floor, 0.0);
    }

    #[test]
    fn zero_element_floor_is_zero() {
        let m = Arc::new(spaces::twisted_sphere(2));
        let z = AlgebraElement::zero(m.clone());
        assert_eq!(
            verify_fullness_witness(&z, &m.sample_base_points(50, 0)).unwrap(),
            0.0
        );
        assert!(verify_projection(&z, &[], 1e-12).is_err());
    }

    #[test]
    fn identity_is_continuous_everywhere() {
        for m in [
            spaces::solenoid_aab_ab(false),
            spaces::broken_heart(),
            spaces::twisted_sphere(4),
            spaces::pinch(&[0.2, 0.6], 3).unwrap(),
        ] {
            let m = Arc::new(m);
            let id = AlgebraElement::identity(m.clone());
            for c in m.branch_classes() {
                let seqs = m.approach_sequences(&c.name, 8, 0.05).unwrap();
                for d in check_branch_continuity(&id, &seqs, CONTINUITY_TOL).unwrap() {
                    assert!(d.passed && d.defect < 1e-12, "{d:?}");
                }
            }
        }
    }

    #[test]
    fn jump_at_branch_point_is_flagged() {
        // the indicator of the arc (1, 2) of the circle, switched off at ba
        let m = Arc::new(spaces::solenoid_aab_ab(false));
        let seqs = m.approach_sequences("ba", 10, 0.05).unwrap();
        let mut pts: Vec<BasePoint> = seqs.iter().flat_map(|s| s.samples.clone()).collect();
        pts.extend(["ab", "ba", "aa"].map(BasePoint::vertex));
        let g = AlgebraElement::grid_from_fn(m.clone(), &pts, |o| {
            DMatrix::from_fn(o.len(), o.len(), |i, j| {
                let y = o.members[i];
                let on_arc = matches!(y.coord, spaces::Coord::Line(t) if t > 1.0 && t < 2.0);
                Complex64::new(if i == j && on_arc { 1.0 } else { 0.0 }, 0.0)
            })
        })
        .unwrap();
        let d = check_branch_continuity(&g, &seqs, CONTINUITY_TOL).unwrap();
        let a_start = d.iter().find(|d| d.path == "a start").unwrap();
        assert!(!a_start.passed);
        assert!((a_start.defect - 1.0).abs() < 1e-12);
        let b_start = d.iter().find(|d| d.path == "b start").unwrap();
        assert!(b_start.passed);
    }
}
