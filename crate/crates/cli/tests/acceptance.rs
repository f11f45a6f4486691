//! Runs the fourteen acceptance criteria at their pinned tolerances and
//! prints one line per criterion.

use std::process::ExitCode;

use resqfi_cli::verify::checks;

fn main() -> ExitCode {
    let mut failed = 0;
    for check in checks().iter().filter(|c| c.criterion.is_some()) {
        let o = check.execute();
        let n = check.criterion.unwrap_or_default();
        println!(
            "criterion {n:>2} {}: {} ({:.1}s) {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.title,
            o.seconds,
            o.detail
        );
        if !o.passed {
            failed += 1;
        }
    }
    println!("{failed} of 14 criteria failed");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
