use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::matrix::IntMatrix;
use super::KTheoryError;

/// One of the two ends of an open edge parametrized by `s ∈ (0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeEnd {
    /// `s -> 0`; counted positively.
    Start,
    /// `s -> 1`; counted negatively.
    End,
}

impl EdgeEnd {
    pub fn sign(self) -> i64 {
        match self {
            EdgeEnd::Start => 1,
            EdgeEnd::End => -1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratifiedEdge {
    pub name: String,
    /// Matrix-block size of the edge's ideal summand.
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EndIncidence {
    pub edge: usize,
    pub end: EdgeEnd,
    pub class: usize,
    pub multiplicity: u32,
}

/// A one-dimensional stratified space: open edges whose ends accumulate on
/// a finite set of vertex classes. The edges carry the ideal, the vertex
/// classes the quotient.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneDStratified {
    pub edges: Vec<StratifiedEdge>,
    pub vertex_classes: Vec<String>,
    pub incidence: Vec<EndIncidence>,
}

impl OneDStratified {
    pub fn validate(&self) -> Result<(), KTheoryError> {
        let bad = |m: String| Err(KTheoryError::Validation(m));
        for e in &self.edges {
            if e.rank == 0 {
                return bad(format!("edge {} has rank 0", e.name));
            }
        }
        for inc in &self.incidence {
            if inc.edge >= self.edges.len() {
                return bad(format!("incidence refers to edge #{}", inc.edge));
            }
            if inc.class >= self.vertex_classes.len() {
                return bad(format!("incidence refers to vertex class #{}", inc.class));
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            for end in [EdgeEnd::Start, EdgeEnd::End] {
                let hit = self
                    .incidence
                    .iter()
                    .any(|inc| inc.edge == i && inc.end == end && inc.multiplicity > 0);
                if !hit {
                    return bad(format!(
                        "{:?} of edge {} meets no vertex class",
                        end, e.name
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn edge_index(&self, name: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.name == name)
    }

    pub fn class_index(&self, name: &str) -> Option<usize> {
        self.vertex_classes.iter().position(|c| c == name)
    }
}

/// Boundary matrix `K0(point classes) -> K1(edges)`: entry `(e, c)` is the
/// multiplicity of start-ends of `e` at `c` minus that of its end-ends.
pub fn vertex_class_boundary(c: &OneDStratified) -> Result<IntMatrix, KTheoryError> {
    c.validate()?;
    let mut m = IntMatrix::zeros(c.edges.len(), c.vertex_classes.len());
    for inc in &c.incidence {
        m[(inc.edge, inc.class)] += BigInt::from(inc.end.sign() * i64::from(inc.multiplicity));
    }
    Ok(m)
}
