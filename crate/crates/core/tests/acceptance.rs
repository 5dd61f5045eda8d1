//! End-to-end acceptance suite. Runs every criterion at its pinned tolerance
//! and prints one pass/fail line per criterion; the build is green only when
//! all of them hold.
//!
//! Run with `cargo test -p torbif-core --test acceptance -- --nocapture` to
//! see the per-criterion report.

use torbif_core::acceptance;

#[test]
fn acceptance_suite() {
    let results = acceptance::run_all(256);
    let mut all_passed = true;
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!("[{status}] criterion {}: {} — {}", r.id, r.name, r.detail);
        all_passed &= r.passed;
    }
    assert!(all_passed, "acceptance criteria failed; see report above");
}
