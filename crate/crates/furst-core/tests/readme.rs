//! Keeps the README's library example compiling and telling the truth.

use furst_core::pipeline::{solve_inhomogeneous, SolveMode};
use furst_core::real::RealSpec;
use furst_core::sunits::{enumerate_sigma, SUnitParams};
use num_bigint::BigUint;

#[test]
fn readme_library_example() -> furst_core::Result<()> {
    let params = SUnitParams::new(2, 3)?;
    let sigma = enumerate_sigma(&params, &BigUint::from(1000u32))?;
    assert_eq!(sigma.len(), 40);

    let best = solve_inhomogeneous(
        &params,
        &RealSpec::parse("1/7")?,
        &RealSpec::parse("1/3")?,
        &BigUint::from(1000u32),
        SolveMode::Brute,
    )?;
    assert_eq!(best.q.value.to_string(), "2"); // ‖2·(1/7) − 1/3‖ = 1/21
    Ok(())
}
