use serde::{Deserialize, Serialize};

use super::build::{self, GraphSpace};
use super::chart::LineChart;
use super::{PointRef, SpaceError, SpaceModel};

/// File form of a model: a constructor name under `"kind"` plus its
/// parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    SolenoidAabAb {
        #[serde(default)]
        section: bool,
    },
    BrokenHeart,
    BrokenHeartWedge,
    TwistedSphere {
        #[serde(default = "default_classes")]
        equator_classes: usize,
    },
    Pinch {
        #[serde(default)]
        a: Vec<f64>,
        k: usize,
    },
    Cover {
        space: GraphSpace,
        charts: Vec<NamedChart>,
    },
    Wedge {
        left: Box<ModelSpec>,
        right: Box<ModelSpec>,
        left_point: PointRef,
        right_point: PointRef,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedChart {
    pub name: String,
    #[serde(flatten)]
    pub chart: LineChart,
}

fn default_classes() -> usize {
    build::DEFAULT_EQUATOR_CLASSES
}

impl ModelSpec {
    pub fn build(&self) -> Result<SpaceModel, SpaceError> {
        match self {
            ModelSpec::SolenoidAabAb { section } => Ok(build::solenoid_aab_ab(*section)),
            ModelSpec::BrokenHeart => Ok(build::broken_heart()),
            ModelSpec::BrokenHeartWedge => Ok(build::broken_heart_wedge()),
            ModelSpec::TwistedSphere { equator_classes } => {
                Ok(build::twisted_sphere(*equator_classes))
            }
            ModelSpec::Pinch { a, k } => build::pinch(a, *k),
            ModelSpec::Cover { space, charts } => build::build_cover_groupoid(
                space,
                charts
                    .iter()
                    .map(|c| (c.name.clone(), c.chart.clone()))
                    .collect(),
            ),
            ModelSpec::Wedge {
                left,
                right,
                left_point,
                right_point,
            } => build::wedge(&left.build()?, &right.build()?, left_point, right_point),
        }
    }
}
