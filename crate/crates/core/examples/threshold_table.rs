//! Optimal thresholds for unit-scale noise over a Z-channel that flips
//! zeros to ones with probability 0.7.

use onebit::solve;

fn main() -> onebit::Result<()> {
    println!("{:>6} {:>10} {:>10} {:>18}", "beta", "x*", "G(x*)", "case");
    for beta in [0.8, 1.5, 2.0, 4.0, 8.0] {
        let s = solve(1.0, beta, 0.7, 0.0)?;
        println!(
            "{beta:>6} {:>10.4} {:>10.4} {:>18}",
            s.x_star, s.g_value, s.case
        );
    }
    Ok(())
}
