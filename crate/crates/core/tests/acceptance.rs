//! Acceptance gate: runs every shipped criterion at its pinned tolerance and
//! prints one pass/fail line each. Run with `-- --nocapture` to see the
//! lines; any failure fails the test.

use lseries_core::acceptance::run_all;

#[test]
fn acceptance_criteria() {
    let outcomes = run_all();
    assert_eq!(outcomes.len(), 12);
    let mut all_ok = true;
    for o in &outcomes {
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!(
            "criterion {:02} [{}] {:6.2}s  {} -- {}",
            o.id, status, o.seconds, o.name, o.detail
        );
        all_ok &= o.passed;
    }
    assert!(all_ok, "at least one acceptance criterion failed");
}
