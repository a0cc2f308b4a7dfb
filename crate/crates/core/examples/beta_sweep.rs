//! Normalized optimal threshold αx* against the shape parameter for a few
//! channels, printed as a coarse table.

use onebit::harness::presets::fig1_sweep;

fn main() {
    let spec = fig1_sweep();
    let rows = spec.run();
    for &(q0, q1) in &spec.channels {
        let series: Vec<String> = rows
            .iter()
            .filter(|r| r.q0 == q0 && r.q1 == q1 && (r.beta * 5.0).round() as i64 % 5 == 0)
            .map(|r| match &r.alpha_x_star {
                Ok(v) => format!("{v:.3}"),
                Err(e) => format!("err({e})"),
            })
            .collect();
        println!("q0={q0:<4} q1={q1:<4} beta=1..8: {}", series.join(" "));
    }
}
