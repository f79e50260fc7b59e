use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::{generate_world_graph, run_circuit_rounds, run_selection_rounds, RoundReport, SimError, SimScenario, SimWorld};
use crate::fuzzy::FuzzyRuleSet;
use crate::propagation::propagate_all;
use crate::{Error, Graph};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    Omega,
    TsH,
    Fraction,
    /// Entity count; the graph is regenerated for every value.
    N,
}

impl SweepAxis {
    fn apply(self, scenario: &mut SimScenario, value: f64) {
        match self {
            SweepAxis::Omega => scenario.omega = value,
            SweepAxis::TsH => scenario.ts_h = value,
            SweepAxis::Fraction => scenario.fraction = value,
            SweepAxis::N => scenario.n = value.round() as usize,
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepAxis::Omega => "omega",
            SweepAxis::TsH => "ts_h",
            SweepAxis::Fraction => "fraction",
            SweepAxis::N => "n",
        })
    }
}

impl FromStr for SweepAxis {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "omega" => Ok(SweepAxis::Omega),
            "ts_h" => Ok(SweepAxis::TsH),
            "fraction" => Ok(SweepAxis::Fraction),
            "n" => Ok(SweepAxis::N),
            _ => Err(SimError::UnknownAxis(s.to_string())),
        }
    }
}

/// Where a sweep gets its graph from.
#[derive(Copy, Clone, Debug)]
pub enum GraphSource<'a> {
    /// A graph with trust values already set.
    Fixed(&'a Graph),
    /// Generate from the scenario, then evaluate links with these rules.
    Generated(&'a FuzzyRuleSet),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub axis: SweepAxis,
    pub value: f64,
    pub selection: Vec<RoundReport>,
    pub circuits: Vec<RoundReport>,
    /// `||F_i||` of the evaluated user.
    pub circle_size: usize,
    /// `||TF_i||` of the evaluated user at this point's threshold.
    pub trusted_circle_size: usize,
    /// Mean `||F_i||` over all entities; only for sweeps over `n`.
    pub mean_circle_size: Option<f64>,
    /// Mean `||TF_i||` over all entities; only for sweeps over `n`.
    pub mean_trusted_circle_size: Option<f64>,
}

fn run_point(world: &SimWorld, scenario: &SimScenario, axis: SweepAxis, value: f64) -> Result<SweepPoint, Error> {
    Ok(SweepPoint {
        axis,
        value,
        selection: run_selection_rounds(world, scenario)?,
        circuits: run_circuit_rounds(world, scenario)?,
        circle_size: world.scores.len(),
        trusted_circle_size: world.scores.trustworthy_count(scenario.ts_h),
        mean_circle_size: None,
        mean_trusted_circle_size: None,
    })
}

/// Runs `base` once per value of `axis`. Every point reuses the base seed, so
/// points differ only in the swept parameter.
pub fn sweep(source: GraphSource<'_>, base: &SimScenario, axis: SweepAxis, values: &[f64]) -> Result<Vec<SweepPoint>, Error> {
    if values.is_empty() {
        return Err(SimError::EmptySweep.into());
    }
    if values.windows(2).any(|w| w[0].partial_cmp(&w[1]).is_none_or(|o| o.is_gt())) {
        return Err(SimError::UnsortedSweep.into());
    }
    let scenarios: Vec<SimScenario> = values
        .iter()
        .map(|&v| {
            let mut s = base.clone();
            axis.apply(&mut s, v);
            s.validate().map(|_| s)
        })
        .collect::<Result<_, _>>()?;

    if axis == SweepAxis::N {
        let GraphSource::Generated(rules) = source else {
            return Err(SimError::FixedGraphSizeSweep.into());
        };
        return scenarios
            .iter()
            .zip(values)
            .map(|(s, &v)| {
                let (graph, _) = generate_world_graph(s, rules)?;
                let all = propagate_all(&graph, s.max_hops)?;
                let k = all.len().max(1) as f64;
                let mean_f = all.values().map(|t| t.len()).sum::<usize>() as f64 / k;
                let mean_tf = all.values().map(|t| t.trustworthy_count(s.ts_h)).sum::<usize>() as f64 / k;
                let world = SimWorld::new(graph, s)?;
                let mut point = run_point(&world, s, axis, v)?;
                point.mean_circle_size = Some(mean_f);
                point.mean_trusted_circle_size = Some(mean_tf);
                Ok(point)
            })
            .collect();
    }

    let graph = match source {
        GraphSource::Fixed(g) => g.clone(),
        GraphSource::Generated(rules) => generate_world_graph(base, rules)?.0,
    };
    let world = SimWorld::new(graph, base)?;
    scenarios
        .par_iter()
        .zip(values)
        .map(|(s, &v)| run_point(&world, s, axis, v))
        .collect()
}
