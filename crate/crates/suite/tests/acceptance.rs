//! One line per acceptance criterion; exits nonzero if any fails.
//! Pass criterion ids as arguments to run a subset.

use fliess_kit::acceptance::run_criterion;

fn main() {
    let ids: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let ids = if ids.is_empty() {
        (1..=10).collect()
    } else {
        ids
    };
    let mut failed = Vec::new();
    for id in ids {
        let report = run_criterion(id);
        if std::env::var_os("ACCEPTANCE_VERBOSE").is_some() || !report.pass() {
            print!("{}", report.render());
        } else {
            println!("{}", report.line());
        }
        if !report.pass() {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
