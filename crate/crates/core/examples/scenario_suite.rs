//! Run the built-in scenario catalog, optionally only the names given on the command line.

use cutlap::scenarios::{list_scenarios, run_scenario, scenario, RunOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let only: Vec<String> = std::env::args().skip(1).collect();
    let opts = RunOptions::default();
    let mut failed = 0;
    for info in list_scenarios() {
        if !only.is_empty() && !only.contains(&info.name) {
            continue;
        }
        let report = run_scenario(&scenario(&info.name)?, &opts);
        println!(
            "{} [{}] {:.1}s",
            report.name,
            if report.passed { "pass" } else { "FAIL" },
            report.elapsed_s
        );
        for c in &report.cases {
            println!("  {}: λ = {:.4?}", c.label, c.eigenvalues);
            for check in c.checks.iter().filter(|ch| !ch.passed()) {
                println!("    {:?} {}: {}", check.status, check.kind, check.detail);
            }
        }
        failed += usize::from(!report.passed);
    }
    println!("{failed} scenario(s) failed");
    Ok(())
}
