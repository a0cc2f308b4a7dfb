//! Monte Carlo ROC for a homogeneous field: designed threshold against a
//! zero threshold, with the asymptotic prediction for reference.
//!
//! Run with `--release`; `ONEBIT_THREADS` caps the worker count.

use onebit::detection::noncentrality;
use onebit::harness::presets::fig2_roc;
use onebit::harness::{asymptotic_roc, decile_grid, empirical_roc, ThresholdPolicy};

fn main() -> onebit::Result<()> {
    let mut config = fig2_roc(8.0)?;
    config.trials = 500;
    let grid = decile_grid();
    for curve in empirical_roc(&config)? {
        let pds: Vec<String> = grid
            .iter()
            .map(|&p| format!("{:.3}", curve.pd_at(p)))
            .collect();
        println!(
            "{:<5} {:<8} {}",
            curve.detector,
            curve.threshold_label,
            pds.join(" ")
        );
    }
    let tau = ThresholdPolicy::Optimal.resolve(&config.scenario)?;
    let mut designed = config.scenario.clone();
    designed.field = designed.field.with_threshold(tau)?;
    let predicted = asymptotic_roc(noncentrality(&designed)?, &grid)?;
    let pds: Vec<String> = grid
        .iter()
        .map(|&p| format!("{:.3}", predicted.pd_at(p)))
        .collect();
    println!("{:<14} {}", "asymptotic", pds.join(" "));
    Ok(())
}
