mod common;

use std::f64::consts::PI;

use fell_core::spaces::{
    self, build_cover_groupoid, chart_contains, BasePoint, Coord, GraphEdge, GraphSpace, LineChart,
    LineDomain, PointRef, Pole, Segment, SpaceError,
};
use proptest::prelude::*;

#[test]
fn twisted_sphere_orbit_examples() {
    let m = spaces::twisted_sphere(8);
    let u = PointRef::cyl(0, 1.3, 0.0);
    assert_eq!(m.resolve_orbit(&u).unwrap().members, vec![u]);

    let o = m.resolve_orbit(&PointRef::cyl(0, 0.3, 0.5)).unwrap();
    let want = [
        PointRef::cyl(0, 0.3, 0.5),
        PointRef::cyl(0, 0.3 + PI, 0.5),
        PointRef::cyl(1, 0.6, 0.5),
        PointRef::cyl(2, 0.6, 0.5),
    ];
    assert_eq!(o.len(), 4);
    for (a, b) in o.members.iter().zip(&want) {
        assert!(a.approx_eq(b), "{a} vs {b}");
    }

    let north = PointRef::new(1, Coord::Pole(Pole::North));
    let o = m.resolve_orbit(&north).unwrap();
    assert_eq!(
        o.members,
        vec![north, PointRef::new(2, Coord::Pole(Pole::North))]
    );
}

#[test]
fn out_of_domain_is_an_error() {
    let m = spaces::twisted_sphere(4);
    assert!(matches!(
        m.resolve_orbit(&PointRef::cyl(0, 0.1, 1.5)),
        Err(SpaceError::Domain(_))
    ));
    let bh = spaces::broken_heart();
    assert!(matches!(
        bh.resolve_orbit(&PointRef::line(1, 2.5)),
        Err(SpaceError::Domain(_))
    ));
    assert!(bh.resolve_orbit(&PointRef::line(9, 0.5)).is_err());
}

fn closed_interval(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> LineDomain {
    LineDomain::Interval {
        lo,
        hi,
        lo_closed,
        hi_closed,
    }
}

fn segment_space() -> GraphSpace {
    GraphSpace {
        edges: vec![GraphEdge {
            name: "e".into(),
            circular: false,
        }],
        vertices: vec!["v".into(), "w".into()],
    }
}

#[test]
fn single_chart_cover_is_diagonal() {
    let whole = LineChart {
        domain: closed_interval(0.0, 1.0, true, true),
        vertices: vec![(0.0, "v".into()), (1.0, "w".into())],
        segments: vec![Segment::new(0.0, 1.0, "e", 0.0, 1.0)],
        joins: vec![],
    };
    let m = build_cover_groupoid(&segment_space(), vec![("X".into(), whole)]).unwrap();
    for x in m.sample_base_points(500, 3) {
        assert_eq!(m.fiber(&x).unwrap().len(), 1, "{x}");
    }
}

#[test]
fn overlap_of_two_charts_doubles_orbits() {
    let left = LineChart {
        domain: closed_interval(0.0, 0.6, true, false),
        vertices: vec![(0.0, "v".into())],
        segments: vec![Segment::new(0.0, 0.6, "e", 0.0, 0.6)],
        joins: vec![],
    };
    let right = LineChart {
        domain: closed_interval(0.4, 1.0, false, true),
        vertices: vec![(1.0, "w".into())],
        segments: vec![Segment::new(0.4, 1.0, "e", 0.4, 1.0)],
        joins: vec![],
    };
    let m = build_cover_groupoid(
        &segment_space(),
        vec![("L".into(), left), ("R".into(), right)],
    )
    .unwrap();
    assert_eq!(m.fiber(&BasePoint::on("e", &[0.5])).unwrap().len(), 2);
    assert_eq!(m.fiber(&BasePoint::on("e", &[0.2])).unwrap().len(), 1);
    assert_eq!(m.fiber(&BasePoint::vertex("w")).unwrap().len(), 1);
}

/// A neighbourhood of one vertex: the last quarter of edge `into` followed
/// by the first quarter of edge `out`.
fn star(vertex: &str, into: &str, out: &str) -> LineChart {
    LineChart {
        domain: closed_interval(-0.25, 0.25, false, false),
        vertices: vec![(0.0, vertex.into())],
        segments: vec![
            Segment::new(-0.25, 0.0, into, 0.75, 1.0),
            Segment::new(0.0, 0.25, out, 0.0, 0.25),
        ],
        joins: vec![],
    }
}

fn arc(edge: &str) -> LineChart {
    LineChart {
        domain: closed_interval(0.0, 1.0, false, false),
        vertices: vec![],
        segments: vec![Segment::new(0.0, 1.0, edge, 0.0, 1.0)],
        joins: vec![],
    }
}

/// The aab/ab quotient covered by one neighbourhood per vertex and one chart
/// per open arc.
fn aab_ab_cover() -> (GraphSpace, Vec<(String, LineChart)>) {
    let space = GraphSpace {
        edges: vec![
            GraphEdge {
                name: "a".into(),
                circular: false,
            },
            GraphEdge {
                name: "b".into(),
                circular: false,
            },
        ],
        vertices: vec!["ab".into(), "ba".into(), "aa".into()],
    };
    let charts = vec![
        ("N_ab".to_string(), star("ab", "a", "b")),
        ("N_ba".to_string(), star("ba", "b", "a")),
        ("N_aa".to_string(), star("aa", "a", "a")),
        ("A".to_string(), arc("a")),
        ("B".to_string(), arc("b")),
    ];
    (space, charts)
}

#[test]
fn aab_ab_cover_matches_brute_force_membership() {
    let (space, charts) = aab_ab_cover();
    let m = build_cover_groupoid(&space, charts.clone()).unwrap();
    let mut seen = std::collections::BTreeSet::new();
    for x in m.sample_base_points(3000, 11) {
        let count = charts.iter().filter(|(_, c)| chart_contains(c, &x)).count();
        let n = m.fiber(&x).unwrap().len();
        assert_eq!(n, count, "{x}");
        seen.insert(n);
    }
    assert_eq!(seen.into_iter().collect::<Vec<_>>(), vec![1, 2, 3]);

    // The neighbourhoods recover the non-Hausdorff class and the boundary.
    let names: Vec<&str> = m.branch_classes().iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names, ["aa,ab,ba"]);
    let s = m
        .stratification(
            &fell_core::catalog::AAB_AB_EDGES,
            &fell_core::catalog::AAB_AB_CLASSES,
        )
        .unwrap();
    assert_eq!(
        fell_core::ktheory::vertex_class_boundary(&s).unwrap(),
        fell_core::catalog::aab_ab_delta0()
    );
}

#[test]
fn cover_rejects_uncovered_points_and_non_hausdorff_charts() {
    let (space, mut charts) = aab_ab_cover();
    charts.retain(|(n, _)| n != "B");
    assert!(matches!(
        build_cover_groupoid(&space, charts),
        Err(SpaceError::Coverage(_))
    ));

    let (space, mut charts) = aab_ab_cover();
    // One chart holding ab and ba, which cannot be separated.
    charts.push((
        "bad".into(),
        LineChart {
            domain: closed_interval(-0.25, 1.25, false, false),
            vertices: vec![(0.0, "ab".into()), (1.0, "ba".into())],
            segments: vec![
                Segment::new(-0.25, 0.0, "a", 0.75, 1.0),
                Segment::new(0.0, 1.0, "b", 0.0, 1.0),
                Segment::new(1.0, 1.25, "a", 0.0, 0.25),
            ],
            joins: vec![],
        },
    ));
    assert!(matches!(
        build_cover_groupoid(&space, charts),
        Err(SpaceError::NotHausdorff(_))
    ));
}

#[test]
fn wedge_examples() {
    let w = spaces::broken_heart_wedge();
    let glued = w.fiber(&BasePoint::vertex("2.p")).unwrap();
    assert_eq!(glued.len(), 1);

    let bad = spaces::wedge(
        &spaces::solenoid_aab_ab(true),
        &spaces::broken_heart(),
        &PointRef::line(0, 0.5),
        &PointRef::line(1, 1.0),
    );
    assert!(matches!(bad, Err(SpaceError::InvalidWedge(_))));

    // Away from the wedge point, orbits are those of the factors.
    let left = spaces::solenoid_aab_ab(true);
    let right = spaces::broken_heart();
    for (factor, tag) in [(&left, "1."), (&right, "2.")] {
        for x in factor.sample_base_points(800, 5) {
            if x.stratum == "p" || (x.stratum == "b" && (x.coords[0] - 0.5).abs() < 1e-9) {
                continue;
            }
            let y = x.prefixed(tag);
            assert_eq!(
                w.fiber(&y).unwrap().len(),
                factor.fiber(&x).unwrap().len(),
                "{y}"
            );
        }
    }
}

#[test]
fn approach_sequence_examples() {
    let m = spaces::twisted_sphere(8);
    let seqs = m.approach_sequences("equator-0", 3, 0.1).unwrap();
    assert_eq!(seqs.len(), 2);
    for s in &seqs {
        assert_eq!(s.samples.len(), 3);
        assert!(s.distances.windows(2).all(|w| w[1] < w[0]));
        assert!(s.samples.iter().all(|x| !m.is_branch_point(x)));
    }

    let sol = spaces::solenoid_aab_ab(false);
    for n in [2, 5, 9] {
        let seqs = sol.approach_sequences("aa,ab,ba", n, 0.1).unwrap();
        assert_eq!(seqs.len(), 4);
        assert!(seqs.iter().all(|s| s.samples.len() == n));
    }
    assert!(sol.approach_sequences("aa,ab,ba", 0, 0.1).is_err());
    assert!(matches!(
        sol.approach_sequences("nope", 3, 0.1),
        Err(SpaceError::UnknownBranchClass(_))
    ));
}

fn model_index() -> impl Strategy<Value = usize> {
    0..common::models().len()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn orbits_partition_and_order_is_stable(i in model_index(), seed in any::<u64>()) {
        let (_, m) = common::models().swap_remove(i);
        let xs = m.sample_base_points(60, seed);
        let orbits: Vec<_> = xs.iter().map(|x| m.fiber(x).unwrap()).collect();
        for (a, oa) in orbits.iter().enumerate() {
            prop_assert!(!oa.members.is_empty());
            for y in &oa.members {
                let again = m.resolve_orbit(y).unwrap();
                prop_assert!(again.approx_eq(oa), "{} from {}", oa.base, y);
                prop_assert_eq!(m.psi(y).unwrap().key(), oa.base.key());
            }
            for ob in &orbits[a + 1..] {
                prop_assert!(oa.approx_eq(ob) || oa.is_disjoint(ob));
            }
        }
    }

    #[test]
    fn pinch_orbits_have_k_members_off_a(m in 1usize..5, k in 2usize..5, seed in any::<u64>()) {
        let a: Vec<f64> = (0..m).map(|j| (j as f64 + 0.3) / m as f64).collect();
        let model = spaces::pinch(&a, k).unwrap();
        for x in model.sample_base_points(200, seed) {
            let n = model.fiber(&x).unwrap().len();
            if x.coords.is_empty() {
                prop_assert_eq!(n, 1, "{}", x);
            } else {
                prop_assert_eq!(n, k, "{}", x);
            }
        }
    }

    #[test]
    fn cover_orbit_size_counts_charts(seed in any::<u64>()) {
        let (space, charts) = aab_ab_cover();
        let m = build_cover_groupoid(&space, charts.clone()).unwrap();
        for x in m.sample_base_points(300, seed) {
            let count = charts.iter().filter(|(_, c)| chart_contains(c, &x)).count();
            prop_assert_eq!(m.fiber(&x).unwrap().len(), count, "{}", x);
        }
    }
}
