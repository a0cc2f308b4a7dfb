//! Samples generalized Gaussian noise and compares the empirical CDF with
//! the closed form at a few points.

use onebit::GgnParams;

fn main() -> onebit::Result<()> {
    for beta in [0.8, 2.0, 8.0] {
        let g = GgnParams::new(1.5, beta)?;
        let draws = g.sample(11, 50_000)?;
        let var = draws.iter().map(|w| w * w).sum::<f64>() / draws.len() as f64;
        print!(
            "beta={beta}: variance {var:.4} (exact {:.4}); cdf",
            g.variance()
        );
        for x in [-1.0, -0.25, 0.0, 0.25, 1.0] {
            let empirical = draws.iter().filter(|&&w| w <= x).count() as f64 / draws.len() as f64;
            print!(" {x}:{empirical:.3}/{:.3}", g.cdf(x));
        }
        println!();
    }
    Ok(())
}
