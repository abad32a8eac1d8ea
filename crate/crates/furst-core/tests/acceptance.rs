//! Acceptance gate: the twelve checks at full budget, one test (and one
//! printed pass/fail line) per criterion.  Run with `--nocapture` to see the
//! lines for passing checks too; a failing check always shows its line.

use furst_core::verify::{self, CheckOutcome, Level};

fn gate(outcome: CheckOutcome) {
    println!("{}", outcome.line());
    assert!(outcome.pass, "{}", outcome.line());
}

#[test]
fn criterion_01_enumeration_oracle() {
    gate(verify::check_enumeration(Level::Full));
}

#[test]
fn criterion_02_counting_estimate() {
    gate(verify::check_counting(Level::Full));
}

#[test]
fn criterion_03_gap_structure() {
    gate(verify::check_gaps(Level::Full));
}

#[test]
fn criterion_04_net_construction() {
    gate(verify::check_nets(Level::Full));
}

#[test]
fn criterion_05_vanishing_scan() {
    gate(verify::check_vanishing(Level::Full));
}

#[test]
fn criterion_06_orbit_average_bound() {
    gate(verify::check_orbit_average(Level::Full));
}

#[test]
fn criterion_07_remainder_mean_square() {
    gate(verify::check_remainders(Level::Full));
}

#[test]
fn criterion_08_search_minimality() {
    gate(verify::check_search_minimality(Level::Full));
}

#[test]
fn criterion_09_solver_dominance() {
    gate(verify::check_dominance(Level::Full));
}

#[test]
fn criterion_10_density_trend() {
    gate(verify::check_density_trend(Level::Full));
}

#[test]
fn criterion_11_baker_probe() {
    gate(verify::check_baker(Level::Full));
}

#[test]
fn criterion_12_mutation_sentinel() {
    gate(verify::check_mutation_sentinel(Level::Full));
}
