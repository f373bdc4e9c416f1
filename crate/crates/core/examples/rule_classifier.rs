//! The decision table: every valid six-bit rule code and the label it maps to.
//!
//! ```bash
//! cargo run --example rule_classifier
//! ```

use vsi_fault::{classify, RuleCode};

fn main() {
    println!("b0 fault  b1 rms+  b2 thd  b3 neg  b4b5 phase");
    for code in RuleCode::all_valid() {
        println!("{code}  ->  {}", classify(&code));
    }
    let code: RuleCode = "101110".parse().expect("valid code");
    println!("\n101110 decodes to {:?}", code);
}
