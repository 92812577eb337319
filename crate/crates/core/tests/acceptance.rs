//! Runs every acceptance criterion and prints one PASS/FAIL line per criterion.

use circle_subgroups::acceptance::{run_all, DEFAULT_SEED};

fn main() {
    let seed = std::env::var("CHARSUB_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_SEED);
    println!("acceptance suite, seed {seed}");
    let outcomes = run_all(seed);
    for o in &outcomes {
        println!("{}", o.line());
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("acceptance: {} passed; {failed} failed", outcomes.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
