//! Shared inputs for the benchmarks.

use tailward_core::{make_model, DistributionModel};

/// The operand pairs of the sum and product fixtures.
pub fn operand_pairs() -> Vec<(&'static str, DistributionModel, DistributionModel)> {
    [
        ("weibull+edge", "weibull(1,2)", "edge(0,1)"),
        ("weibull+pareto", "weibull(1,2)", "pareto(1,2)"),
        ("weibull*edge", "weibull(1,2)", "edge(2,1)"),
        ("lognormal*pareto", "lognormal(0,1)", "pareto(1,2)"),
    ]
    .into_iter()
    .map(|(name, x, y)| (name, make_model(x).unwrap(), make_model(y).unwrap()))
    .collect()
}
