//! The membership battery must reproduce the frozen verdict table
//! bit-for-bit, timing fields aside.

use fernjac::groebner::{section5_report, Section5Options};
use serde_json::Value;

/// Zero out every `elapsed_ms` so wall-clock noise cannot fail the diff.
fn scrub(v: &mut Value) {
    match v {
        Value::Object(map) => {
            for (k, val) in map.iter_mut() {
                if k == "elapsed_ms" {
                    *val = Value::from(0u64);
                } else {
                    scrub(val);
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(scrub),
        _ => {}
    }
}

#[test]
fn default_battery_matches_the_frozen_table() {
    let report = section5_report(&Section5Options::default());
    let mut got = serde_json::to_value(&report).expect("report serializes");
    let frozen = include_str!("data/section5.json");
    let mut want: Value = serde_json::from_str(frozen).expect("frozen table parses");
    scrub(&mut got);
    scrub(&mut want);
    assert_eq!(got, want, "battery output diverged from the frozen table");
}

/// The extended battery (slow rows included) still has every verdict
/// matching. Run with `cargo test -- --ignored` when a minute of Groebner
/// time is acceptable.
#[test]
#[ignore = "about a minute of basis computation"]
fn extended_battery_all_match() {
    let opts = Section5Options { include_slow: true, ..Default::default() };
    let report = section5_report(&opts);
    for row in &report.rows {
        // Rows with no recorded expectation are informational; everything
        // else must match, and nothing may time out.
        assert!(
            row.status == "ok" || row.status == "info",
            "row {} status {}",
            row.claim_id,
            row.status
        );
    }
    assert!(report.all_match);
    assert!(report.rows.len() > 16, "slow rows should extend the table");
}
