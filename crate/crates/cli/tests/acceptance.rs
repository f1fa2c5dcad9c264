//! Acceptance suite as a test target: one pass/fail line per criterion,
//! non-zero exit if any fails.

use thermolimit_cli::acceptance::{criterion_ids, run_criterion, Options};

fn main() {
    let opts = Options::default();
    let mut failed = 0;
    for id in criterion_ids() {
        let r = run_criterion(id, &opts).expect("listed criterion");
        println!("{}", r.line());
        if !r.passed() {
            failed += 1;
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
