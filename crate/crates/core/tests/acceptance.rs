//! Prints one line per acceptance criterion and fails if any does.

use opencore::acceptance::run_all;

fn main() {
    let reports = run_all(2024);
    for r in &reports {
        println!("{r}");
    }
    let failed: Vec<u8> = reports.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
    println!("all {} criteria passed", reports.len());
}
