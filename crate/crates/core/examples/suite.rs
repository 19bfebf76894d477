//! Runs the randomized property suite and prints the summary table.
//!
//! `cargo run --release --example suite -- 42 200`

use econvex::verify::{run_suite, SuiteConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let mut config = SuiteConfig::default();
    if let Some(seed) = args.next().and_then(|s| s.parse().ok()) {
        config.seed = seed;
    }
    if let Some(n) = args.next().and_then(|s| s.parse().ok()) {
        config.instances = n;
    }
    let report = run_suite(&config);
    print!("{}", report.table());
    println!("seed {} instances {} all passed {}", report.seed, report.instances, report.all_passed());
}
