//! Runs the structural checks on the objective over the default model
//! sweep and prints the report.

use onebit::harness::{default_sweep, verify_propositions};

fn main() -> onebit::Result<()> {
    let report = verify_propositions(&default_sweep(), &[])?;
    print!("{report}");
    if !report.passed() {
        std::process::exit(1);
    }
    Ok(())
}
