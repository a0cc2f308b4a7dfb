//! Evaluates the asymptotic objective G and its derivative along the
//! threshold axis and shows the channel symmetry at work.

use onebit::objective::{canonicalize, eval_g, eval_g_prime};
use onebit::{ChannelParams, GgnParams};

fn main() -> onebit::Result<()> {
    let noise = GgnParams::new(1.0, 4.0)?;
    let channel = ChannelParams::new(0.1, 0.4)?;
    let canonical = canonicalize(channel)?;
    println!("canonical channel {:?}", canonical);
    for i in -10..=10 {
        let x = 0.1 * i as f64;
        let g = eval_g(x, &channel, &noise)?;
        let d = eval_g_prime(x, &channel, &noise)?;
        let bar = "#".repeat((g * 8.0) as usize);
        println!("{x:>5.1} {g:>8.4} {d:>9.4} {bar}");
    }
    let s = onebit::solve_threshold(&noise, &channel)?;
    println!("x* = {:.4}, tau* = {:.4}", s.x_star, s.tau_star);
    Ok(())
}
