//! Stored expected data for the shipped examples.
//!
//! Everything here is transcribed, not computed. Scenarios re-derive what
//! they can from the models and compare against these values.

use crate::ktheory::{
    EdgeEnd, EndIncidence, FgAbGroup, IntMatrix, OneDStratified, StratifiedEdge, TwoStrataSes,
};

/// Edge order of the aab/ab stratification.
pub const AAB_AB_EDGES: [&str; 2] = ["a", "b"];
/// Vertex-class order of the aab/ab stratification.
pub const AAB_AB_CLASSES: [&str; 3] = ["ab", "ba", "aa"];

pub const AAB_AB_DELTA0: [[i64; 3]; 2] = [[-1, 1, 0], [1, -1, 0]];

pub fn aab_ab_delta0() -> IntMatrix {
    IntMatrix::from_rows(&AAB_AB_DELTA0)
}

/// Ideal `C0((0,1)) ⊗ (M2 ⊕ C)`, quotient `C^3` on the three vertex classes.
pub fn aab_ab_ses() -> TwoStrataSes {
    TwoStrataSes::from_ranks(0, 2, 3, 0, Some(aab_ab_delta0()), None)
        .expect("stored aab/ab data is well formed")
}

/// Edge-end incidence of the aab/ab space, edges and classes in the orders
/// above.
pub fn aab_ab_incidence() -> OneDStratified {
    let inc = |edge, end, class| EndIncidence {
        edge,
        end,
        class,
        multiplicity: 1,
    };
    let mut incidence = vec![
        inc(0, EdgeEnd::Start, 1),
        inc(0, EdgeEnd::Start, 2),
        inc(0, EdgeEnd::End, 0),
        inc(0, EdgeEnd::End, 2),
        inc(1, EdgeEnd::Start, 0),
        inc(1, EdgeEnd::End, 1),
    ];
    incidence.sort();
    OneDStratified {
        edges: vec![
            StratifiedEdge {
                name: "a".into(),
                rank: 2,
            },
            StratifiedEdge {
                name: "b".into(),
                rank: 1,
            },
        ],
        vertex_classes: AAB_AB_CLASSES.iter().map(|s| s.to_string()).collect(),
        incidence,
    }
}

/// The three vertices that cannot be separated from one another.
pub const AAB_AB_BRANCH_CLASS: [&str; 3] = ["aa", "ab", "ba"];

pub fn aab_ab_expected_k() -> (FgAbGroup, FgAbGroup) {
    (FgAbGroup::free(2), FgAbGroup::free(1))
}

/// Ideal `C0(I) ⊗ M3` (so `K1 = Z`), quotient `C(p)`, boundary an isomorphism.
pub fn broken_heart_ses() -> TwoStrataSes {
    TwoStrataSes::from_ranks(0, 1, 1, 0, Some(IntMatrix::from_rows(&[[1]])), None)
        .expect("stored broken heart data is well formed")
}

pub const BROKEN_HEART_BRANCH_CLASS: [&str; 2] = ["q", "r"];
pub const BROKEN_HEART_IDEAL_RANK: usize = 3;

/// `(Z^{1 + m(k-1)}, Z)` for the circle with `m` points pinched `k` ways.
pub fn pinch_circle_expected(m: usize, k: usize) -> (FgAbGroup, FgAbGroup) {
    (FgAbGroup::free(1 + m * (k - 1)), FgAbGroup::free(1))
}
