//! Frozen desk-scale measurements.
//!
//! Every constant here was produced by the ignored generator test
//! `verify::tests::emit_regression` and cross-checked against an independent
//! implementation where one exists.  The check suite compares fresh runs
//! against these values with zero tolerance (exact rationals, bit-identical
//! floats): any drift — a changed enumeration order, a different rounding, a
//! perturbed seed — fails loudly.  Regenerate deliberately, never by hand.

/// Effective irrationality exponent for log 2/log 3: |log2/log3 − p/q| ≫ q^{−β}.
pub const BETA: f64 = 5.116201;

/// (count − estimate)/t^{1−1/(β−1)} at M = 10⁶, t = ln M, positive quadrant
/// of Σ(2, 3).  The remainder scale the two-term count is claimed to obey.
pub const REM_SCALED_23_1E6: f64 = 0.12733883528929268;

/// max gap · q^{1/(β−1)−1} over consecutive q < q′ in Σ(2, 3) up to 10¹⁰,
/// maximized at the pair below.
pub const GAP_NORM_CONSTANT_23_1E10: f64 = 0.54129338292565;

/// Number of consecutive pairs (gaps) recorded below 10¹⁰.
pub const GAP_ENTRIES_23_1E10: u64 = 376;

/// The largest gap below 10¹⁰ and the pair attaining it.
pub const GAP_MAX_23_1E10: u64 = 524_040_192;
pub const GAP_ARGMAX_23_1E10: (u64, u64) = (9_795_520_512, 10_319_560_704);

/// Certified min of q^β·|log2/log3 − p/q| over all convergents with
/// q ≤ 10¹⁰ (the enclosure collapses to one f64 at 512 bits; the value to
/// more digits is 0.3690702464285425629…).
pub const C0_LOG23: f64 = 0.3690702464285426;

/// Denominators of every convergent of log 2/log 3 with q ≤ 10¹⁰.
pub const LOG23_CONVERGENT_QS: [u64; 22] = [
    1,
    1,
    2,
    3,
    8,
    19,
    65,
    84,
    485,
    1054,
    24_727,
    50_508,
    125_743,
    176_251,
    301_994,
    16_785_921,
    17_087_915,
    85_137_581,
    272_500_658,
    357_638_239,
    630_138_897,
    9_809_721_694,
];

/// max over the seeded fibre-set matrix (100 sets × H ∈ {4, 8, 16}) of
/// mean_square·Y/‖f′‖₂² — the implicit constant in the second-moment bound.
pub const LEMMA7_ENVELOPE: f64 = 0.01351574300095479;

/// Exact dispersion of Σ_α(Q²) for Q = 10ᵏ, α = A/Q with the seeded
/// numerators of `verify::density_trial_numerators`.
pub const DENSITY_DISPERSIONS_23: [(u32, &str); 13] = [
    (3, "3/125"),
    (4, "13/625"),
    (5, "1/125"),
    (6, "1343/250000"),
    (7, "71/15625"),
    (8, "1332257/100000000"),
    (9, "7906/1953125"),
    (10, "2862361/625000000"),
    (11, "769767/390625000"),
    (12, "2193969547/1000000000000"),
    (13, "2666826/1220703125"),
    (14, "4018223607/2500000000000"),
    (15, "316097291/244140625000"),
];

/// Σ(rank(k) − rank(dispersion))² over the trend table; with n = 13 this is
/// Spearman ρ = 1 − 6·702/2184 ≈ −0.93.
pub const DENSITY_SPEARMAN_SUM_SQ: u64 = 702;

/// Brute-force minima of ‖qα − β‖ over Σ(2,3) ∩ [1, 10⁸] for the seeded β
/// matrix, both anchor irrationals.  Enclosure midpoints; q exact.
pub const BRUTE_ERRORS_JSON: &str = include_str!("../tests/data/brute_errors.json");

/// Stage values of the pipeline at A/Q = 12345/(10⁹ + 7), δ = 1/2, ε = 1/20.
pub const PIPELINE_1E9_M: u64 = 177;
pub const PIPELINE_1E9_N: u32 = 3;
pub const PIPELINE_1E9_L: u32 = 1;
pub const PIPELINE_1E9_S: u32 = 3;
pub const PIPELINE_1E9_LAMBDA: u64 = 0;
pub const PIPELINE_1E9_Y: u64 = 2;
pub const PIPELINE_1E9_H: f64 = 2.0;
pub const PIPELINE_1E9_ORDER: u64 = 1;
pub const PIPELINE_1E9_BUDGET_PASS: bool = true;

/// Per-target (z, w, y, ‖q*α − z‖) for the 10⁹-scale run above.
pub const PIPELINE_1E9_TARGETS: [(&str, u64, u64, &str); 2] = [
    ("1/3", 0, 1, "151936633/3000000021"),
    ("9/10", 0, 0, "1000123457/10000000070"),
];
