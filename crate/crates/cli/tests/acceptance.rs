//! Runs every acceptance criterion and prints one line each.
//! `LOCEXT_K5=1` adds the long family run with k = 5.

use locext_cli::acceptance::{run_all, AcceptanceConfig};

fn main() {
    let k5 = std::env::var("LOCEXT_K5").is_ok_and(|v| v == "1");
    let cfg = AcceptanceConfig { family_max_k: if k5 { 5 } else { 4 }, ..AcceptanceConfig::default() };
    let manifest = run_all(&cfg);
    print!("{}", manifest.text());
    if !manifest.all_passed {
        std::process::exit(1);
    }
}
