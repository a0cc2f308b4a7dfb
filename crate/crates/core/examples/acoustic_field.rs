//! Sensor gains of the acoustic-style field and a reduced-trial ROC run
//! comparing GLRT and Rao.

use onebit::harness::presets::{acoustic_field, fig3_acoustic};
use onebit::harness::{decile_grid, empirical_roc};

fn main() -> onebit::Result<()> {
    let field = acoustic_field(4, 6)?;
    for i in 0..field.n() {
        let row: Vec<String> = (0..field.k())
            .map(|j| format!("{:>6.3}", field.h(i, j)))
            .collect();
        println!("{}", row.join(" "));
    }
    let mut config = fig3_acoustic()?;
    config.trials = 100;
    for curve in empirical_roc(&config)? {
        let pds: Vec<String> = decile_grid()
            .iter()
            .map(|&p| format!("{:.2}", curve.pd_at(p)))
            .collect();
        println!(
            "{:<5} {:<8} {}",
            curve.detector,
            curve.threshold_label,
            pds.join(" ")
        );
    }
    Ok(())
}
