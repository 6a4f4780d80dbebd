use std::process::ExitCode;

use ruleform::acceptance::{run_criterion, AcceptanceOptions, CRITERIA};

fn main() -> ExitCode {
    let opts = AcceptanceOptions::default();
    println!("acceptance, seed {}, {} cases per suite", opts.seed, opts.cases);
    let mut failed = Vec::new();
    for (id, _) in CRITERIA {
        let r = run_criterion(id, &opts);
        println!("{}", r.line());
        for c in r.failures() {
            println!("    failed: {}: {}", c.name, c.detail);
        }
        if !r.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("all {} criteria passed", CRITERIA.len());
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
