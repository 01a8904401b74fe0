//! K-theory of pinched spaces: a compact manifold `M` with each point of a
//! closed subset `A` split into `k` points.

use super::group::FgAbGroup;
use super::sequence::{solve_six_term, TwoStrataSes};
use super::KTheoryError;

/// A `(K0, K1)` pair.
pub type KPair = (FgAbGroup, FgAbGroup);

/// `K*(X) = K*(M) ⊕ K*(A)^(k-1)`, degreewise.
pub fn pinch_k_theory(k_m: &KPair, k_a: &KPair, k: usize) -> Result<KPair, KTheoryError> {
    if k < 2 {
        return Err(KTheoryError::Parameter(format!(
            "sheet count k = {k} must be at least 2"
        )));
    }
    Ok((
        k_m.0.direct_sum(&k_a.0.power(k - 1)),
        k_m.1.direct_sum(&k_a.1.power(k - 1)),
    ))
}

/// K-theory of the circle.
pub fn circle_k_theory() -> KPair {
    (FgAbGroup::free(1), FgAbGroup::free(1))
}

/// K-theory of a finite set of `m` points.
pub fn finite_set_k_theory(m: usize) -> KPair {
    (FgAbGroup::free(m), FgAbGroup::zero())
}

/// Independent route for `M` = circle and `|A| = m`: the extension
/// `0 -> I -> C*(R) -> C(A)^(k-1) -> 0`, where the corner inclusion
/// `C(M) -> I` is a K-theory isomorphism and the sequence is split, solved
/// with the general six-term machinery.
pub fn pinch_strata_oracle(a_size: usize, k: usize) -> Result<KPair, KTheoryError> {
    if k < 2 {
        return Err(KTheoryError::Parameter(format!(
            "sheet count k = {k} must be at least 2"
        )));
    }
    let (i0, i1) = circle_k_theory();
    let ses = TwoStrataSes::from_ranks(i0.rank(), i1.rank(), a_size * (k - 1), 0, None, None)?;
    solve_six_term(&ses)
}
