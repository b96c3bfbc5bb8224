//! Run the oracle suite against the built-in physics and networks.

use asteroid_gnc::harness::run_validate;

fn main() {
    let report = run_validate(None);
    for line in report.lines() {
        println!("{line}");
    }
    println!("{} of {} checks passed", report.checks.len() - report.failed().len(), report.checks.len());
}
