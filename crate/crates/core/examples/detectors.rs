//! One simulated observation matrix, the ML estimate and both detection
//! statistics, next to the Fisher information that sets their scale.

use onebit::detection::{fisher_info, generate, glrt_stat, ml_estimate, noncentrality, rao_stat};
use onebit::{ChannelParams, DetectionScenario, GgnParams, Hypothesis, SensorField};

fn main() -> onebit::Result<()> {
    let noise = GgnParams::new(1.0, 8.0)?;
    let channel = ChannelParams::new(0.7, 0.0)?;
    let tau = onebit::solve_threshold(&noise, &channel)?.tau_star;
    let field = SensorField::homogeneous(2000, 1, 1.0, tau)?;
    let scenario = DetectionScenario::new(field, 0.0661, 1.0, noise, channel)?;
    println!(
        "tau* = {tau:.4}, I(0) = {:.2}, lambda = {:.3}",
        fisher_info(&scenario, 0.0)?,
        noncentrality(&scenario)?
    );
    for hyp in [Hypothesis::H0, Hypothesis::H1] {
        let u = generate(&scenario, hyp, 3);
        let ml = ml_estimate(&u, &scenario)?;
        println!(
            "{hyp}: ones {}/{}, theta_hat {:.4}, T_G {:.3}, T_R {:.3}",
            u.ones(),
            scenario.field.len(),
            ml.theta_hat,
            glrt_stat(&u, &scenario)?,
            rao_stat(&u, &scenario)?
        );
    }
    Ok(())
}
