use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use super::matrix::IntMatrix;
use super::snf::smith_normal_form;
use super::KTheoryError;

/// Finitely generated abelian group `Z^rank ⊕ Z/d_1 ⊕ ... ⊕ Z/d_k` in
/// invariant-factor form: every `d_i >= 2` and `d_i | d_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct FgAbGroup {
    rank: usize,
    torsion: Vec<BigInt>,
}

impl FgAbGroup {
    pub fn new(rank: usize, torsion: Vec<BigInt>) -> Result<Self, KTheoryError> {
        if let Some(d) = torsion.iter().find(|d| *d < &BigInt::from(2)) {
            return Err(KTheoryError::InvalidGroup(format!(
                "invariant factor {d} is less than 2"
            )));
        }
        if let Some(w) = torsion.windows(2).find(|w| !w[1].is_multiple_of(&w[0])) {
            return Err(KTheoryError::InvalidGroup(format!(
                "invariant factor {} does not divide {}",
                w[0], w[1]
            )));
        }
        Ok(FgAbGroup { rank, torsion })
    }

    pub fn free(rank: usize) -> Self {
        FgAbGroup {
            rank,
            torsion: Vec::new(),
        }
    }

    pub fn zero() -> Self {
        Self::free(0)
    }

    /// Normalizes an arbitrary list of cyclic orders (entries 0 and 1 are
    /// dropped) into invariant-factor form.
    pub fn from_cyclic_orders(rank: usize, orders: &[BigInt]) -> Self {
        let nontrivial: Vec<BigInt> = orders
            .iter()
            .map(|d| d.abs())
            .filter(|d| d > &BigInt::one())
            .collect();
        let g = cokernel(&IntMatrix::diagonal(&nontrivial));
        FgAbGroup {
            rank,
            torsion: g.torsion,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn is_free(&self) -> bool {
        self.torsion.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn direct_sum(&self, other: &FgAbGroup) -> FgAbGroup {
        let orders: Vec<BigInt> = self.torsion.iter().chain(&other.torsion).cloned().collect();
        Self::from_cyclic_orders(self.rank + other.rank, &orders)
    }

    /// `self ⊕ self ⊕ ... ` with `copies` summands (`copies = 0` gives 0).
    pub fn power(&self, copies: usize) -> FgAbGroup {
        (0..copies).fold(FgAbGroup::zero(), |acc, _| acc.direct_sum(self))
    }
}

impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" ⊕ "))
        }
    }
}

impl std::str::FromStr for FgAbGroup {
    type Err = KTheoryError;

    /// Parses the canonical string form, e.g. `0`, `Z`, `Z^3`, `Z ⊕ Z/2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "0" {
            return Ok(FgAbGroup::zero());
        }
        let mut rank = 0usize;
        let mut orders = Vec::new();
        for part in s.split('⊕').map(str::trim) {
            let bad = || KTheoryError::InvalidGroup(format!("cannot parse group summand {part:?}"));
            if part == "Z" {
                rank += 1;
            } else if let Some(r) = part.strip_prefix("Z^") {
                rank += r.parse::<usize>().map_err(|_| bad())?;
            } else if let Some(d) = part.strip_prefix("Z/") {
                orders.push(d.parse::<BigInt>().map_err(|_| bad())?);
            } else {
                return Err(bad());
            }
        }
        Ok(FgAbGroup::from_cyclic_orders(rank, &orders))
    }
}

/// Wire form: `{"rank": r, "torsion": [d1, ...]}`; a bare integer `r` is
/// accepted for a free group.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum GroupWire {
    Rank(usize),
    Full {
        rank: usize,
        #[serde(default)]
        torsion: Vec<i64>,
    },
}

impl Serialize for FgAbGroup {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use num_traits::ToPrimitive;
        let torsion = self
            .torsion
            .iter()
            .map(|d| {
                d.to_i64()
                    .ok_or_else(|| serde::ser::Error::custom("torsion exceeds i64"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        GroupWire::Full {
            rank: self.rank,
            torsion,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FgAbGroup {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match GroupWire::deserialize(deserializer)? {
            GroupWire::Rank(r) => Ok(FgAbGroup::free(r)),
            GroupWire::Full { rank, torsion } => {
                let t: Vec<BigInt> = torsion.into_iter().map(BigInt::from).collect();
                FgAbGroup::new(rank, t).map_err(serde::de::Error::custom)
            }
        }
    }
}

/// Kernel of `A: Z^cols -> Z^rows`; always free of rank `cols - rank(A)`.
pub fn kernel(a: &IntMatrix) -> FgAbGroup {
    let r = smith_normal_form(a).rank();
    FgAbGroup::free(a.cols() - r)
}

/// Cokernel `Z^rows / im(A)`.
pub fn cokernel(a: &IntMatrix) -> FgAbGroup {
    let snf = smith_normal_form(a);
    let factors = snf.invariant_factors();
    let rank = a.rows() - factors.len();
    let torsion = factors.into_iter().filter(|d| !d.is_one()).collect();
    FgAbGroup { rank, torsion }
}

/// Rank of an integer matrix (over Q).
pub fn matrix_rank(a: &IntMatrix) -> usize {
    smith_normal_form(a).rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn delta0() -> IntMatrix {
        IntMatrix::from_rows(&[[-1, 1, 0], [1, -1, 0]])
    }

    #[test]
    fn boundary_kernel_and_cokernel() {
        assert_eq!(kernel(&delta0()), FgAbGroup::free(2));
        assert_eq!(cokernel(&delta0()), FgAbGroup::free(1));
        let t = delta0().transpose();
        assert_eq!(cokernel(&t), FgAbGroup::free(2));
        assert_eq!(kernel(&t), FgAbGroup::free(1));
    }

    #[test]
    fn zero_map_from_free_module() {
        assert_eq!(kernel(&IntMatrix::zeros(0, 4)), FgAbGroup::free(4));
        assert_eq!(cokernel(&IntMatrix::zeros(0, 4)), FgAbGroup::zero());
    }

    #[test]
    fn index_two_image() {
        let g = cokernel(&IntMatrix::from_rows(&[[2]]));
        assert_eq!(g.to_string(), "Z/2");
        assert_eq!(g.rank(), 0);
    }

    #[test]
    fn display_forms() {
        assert_eq!(FgAbGroup::zero().to_string(), "0");
        assert_eq!(FgAbGroup::free(1).to_string(), "Z");
        assert_eq!(FgAbGroup::free(2).to_string(), "Z^2");
        let g = FgAbGroup::new(1, vec![BigInt::from(2)]).unwrap();
        assert_eq!(g.to_string(), "Z ⊕ Z/2");
        assert_eq!("Z ⊕ Z/2".parse::<FgAbGroup>().unwrap(), g);
        assert_eq!("Z^2 ⊕ Z".parse::<FgAbGroup>().unwrap(), FgAbGroup::free(3));
        assert!("Q".parse::<FgAbGroup>().is_err());
    }

    #[test]
    fn invariant_factor_normalization() {
        // Z/2 ⊕ Z/3 ≅ Z/6, Z/2 ⊕ Z/4 stays.
        let a = FgAbGroup::from_cyclic_orders(0, &[BigInt::from(2), BigInt::from(3)]);
        assert_eq!(a.torsion(), &[BigInt::from(6)]);
        let b = FgAbGroup::from_cyclic_orders(0, &[BigInt::from(4), BigInt::from(2)]);
        assert_eq!(b.torsion(), &[BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn invalid_chain_rejected() {
        assert!(FgAbGroup::new(0, vec![BigInt::from(4), BigInt::from(6)]).is_err());
        assert!(FgAbGroup::new(0, vec![BigInt::from(1)]).is_err());
    }

    #[test]
    fn direct_sum_and_power() {
        let z = FgAbGroup::free(1);
        assert_eq!(z.power(3), FgAbGroup::free(3));
        assert_eq!(z.power(0), FgAbGroup::zero());
        let t = FgAbGroup::new(0, vec![BigInt::from(2)]).unwrap();
        assert_eq!(z.direct_sum(&t).to_string(), "Z ⊕ Z/2");
    }

    #[test]
    fn group_wire_forms() {
        let g: FgAbGroup = serde_json::from_str("3").unwrap();
        assert_eq!(g, FgAbGroup::free(3));
        let g: FgAbGroup = serde_json::from_str(r#"{"rank":1,"torsion":[2]}"#).unwrap();
        assert_eq!(g.to_string(), "Z ⊕ Z/2");
        assert!(serde_json::from_str::<FgAbGroup>(r#"{"rank":0,"torsion":[3,4]}"#).is_err());
    }
}
