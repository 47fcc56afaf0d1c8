//! Runs every randomized property suite with a small sample count and prints
//! one line per property.

use superposition::verify::{run_suite, Suite};

fn main() {
    let samples = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let checks = run_suite(Suite::All, samples, 0);
    for c in &checks {
        println!("{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    println!("{} checks, {failed} failed", checks.len());
}
