use std::collections::BTreeSet;
use std::sync::Arc;

use crate::spaces::{ChartId, SpaceModel};

use super::{AlgebraElement, ConvError, Rule};

/// A compact open Hausdorff subset `K ⊆ X`, given by its lift: a set of
/// compact charts of `Y`, each mapping homeomorphically onto its image.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Region {
    charts: BTreeSet<ChartId>,
}

impl Region {
    pub fn empty() -> Self {
        Region::default()
    }

    pub fn of_charts(ids: &[ChartId]) -> Self {
        Region {
            charts: ids.iter().copied().collect(),
        }
    }

    pub fn by_names(model: &SpaceModel, names: &[&str]) -> Result<Self, ConvError> {
        let mut charts = BTreeSet::new();
        for n in names {
            let c = model
                .chart_by_name(n)
                .ok_or_else(|| ConvError::Region(format!("no chart named {n}")))?;
            charts.insert(c.id);
        }
        Ok(Region { charts })
    }

    pub fn contains(&self, id: ChartId) -> bool {
        self.charts.contains(&id)
    }

    pub fn charts(&self) -> impl Iterator<Item = ChartId> + '_ {
        self.charts.iter().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.charts.is_empty()
    }
}

const LIFT_SAMPLES: usize = 4000;

/// The projection `1_K`: entry 1 at `(y, y)` for `y` in the lift of `K`.
pub fn indicator_projection(
    model: &Arc<SpaceModel>,
    k: &Region,
) -> Result<AlgebraElement, ConvError> {
    for id in k.charts() {
        let chart = model.chart(id)?;
        let line = chart.line();
        if !chart.is_compact() || line.is_some_and(|l| !l.joins.is_empty()) {
            return Err(ConvError::Region(format!(
                "chart {} is not compact",
                chart.name
            )));
        }
    }
    for class in model.branch_classes() {
        let hits: Vec<String> = class
            .members
            .iter()
            .filter(|x| {
                model
                    .fiber(x)
                    .is_ok_and(|o| o.members.iter().any(|y| k.contains(y.chart)))
            })
            .map(|x| x.to_string())
            .collect();
        if hits.len() > 1 {
            return Err(ConvError::NonHausdorffRegion(format!(
                "contains non-separated points {}",
                hits.join(", ")
            )));
        }
    }
    for x in model.sample_base_points(LIFT_SAMPLES, 0) {
        let o = model.fiber(&x)?;
        let n = o.members.iter().filter(|y| k.contains(y.chart)).count();
        if n > 1 {
            return Err(ConvError::Region(format!(
                "lift meets the orbit over {x} in {n} points"
            )));
        }
    }
    Ok(AlgebraElement::new(
        model.clone(),
        Rule::Indicator(k.clone()),
    ))
}
