//! Runs the acceptance criteria and prints one line per criterion. Exits
//! non-zero only when a criterion outside the known-failure list fails.

use photon_gate_core::validation::run_all;

fn main() {
    let outcomes = run_all();
    for o in &outcomes {
        println!("{}", o.line());
    }
    let unexpected: Vec<u8> = outcomes
        .iter()
        .filter(|o| !o.passed && !o.expected_failure())
        .map(|o| o.id)
        .collect();
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("{passed}/{} criteria passed", outcomes.len());
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
