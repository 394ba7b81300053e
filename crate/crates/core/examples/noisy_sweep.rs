//! Monte Carlo sweep of the nested protocol under multiplicative
//! Gaussian coupling noise, printed as the same CSV the CLI emits.

use hierhop::config::{ProtocolConfig, Variant};
use hierhop::experiment::{monte_carlo, records_to_csv, ExperimentPlan, SweepAxis};

fn main() {
    for epsilon in [0.3, 0.6] {
        let plan = ExperimentPlan {
            base: ProtocolConfig::new(1, 1.0, 4, Variant::NestedIdeal)
                .with_epsilon(epsilon)
                .with_seed(42),
            axis: SweepAxis::Levels,
            values: (4..=8).map(f64::from).collect(),
            trials: 50,
        };
        println!("epsilon = {epsilon}:");
        print!("{}", records_to_csv(&monte_carlo(&plan).unwrap()));
    }
}
