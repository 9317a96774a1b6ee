//! The full checklist on a problem file, amplified by M_n.
//!
//! Usage: cargo run --example amplification_fuzz -- [problem.json] [n]

use interactions::checklist::{self, Command, RunOptions};
use interactions::problem::Problem;

fn main() -> interactions::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/flip.json").to_string());
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(2);
    let problem = Problem::load(&path)?;

    let mut opts = RunOptions::for_problem(&problem, Command::Report, None, 1e-9);
    opts.samples = 50;
    for amplify in 1..=n {
        opts.amplify = amplify;
        let report = checklist::run(&problem, &opts);
        let v = report.to_value();
        println!("n = {amplify}: passed = {}, {}", report.passed(), v["summary"]);
        for id in report.failures() {
            println!("  failing: {id}");
        }
    }
    Ok(())
}
