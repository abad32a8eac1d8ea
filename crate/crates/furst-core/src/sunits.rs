//! The multiplicative set Σ = {a^u b^v : u, v ∈ ℤ₊} for coprime a, b ≥ 2.
//!
//! Σ(M) = Σ ∩ [1, M] is enumerated exactly — every boundary decision
//! a^u b^v ≤ M is made in integer arithmetic, never through logarithms.
//! Counting is exposed twice: against an integer bound (`count_pow_bound`)
//! and against a real bound t on x ln a + y ln b (`count_lattice`, certified
//! interval comparisons), together with the two-term lattice estimate
//! t²/(2 ln a ln b) − t(1/(2 ln a) + 1/(2 ln b)).
//!
//! Gap statistics q_{ν+1} − q_ν over consecutive elements feed the net
//! construction; the report normalizes each gap by
//! (q_{ν+1}−q_ν)/q_ν · (ln q_ν)^{1/(β−1)}.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::util::{big_to_f64, dec_uint, gcd_u64, ln_big_f64};

/// Hard cap on materialized Σ(M) elements; |Σ(M)| grows like ln²M, so this
/// is reached only around M ≈ 10^750000.
pub const ELEMENT_BUDGET: usize = 4_000_000;

/// The coprime bases (a, b), both ≥ 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SUnitParams {
    pub a: u64,
    pub b: u64,
}

impl SUnitParams {
    pub fn new(a: u64, b: u64) -> Result<Self> {
        let p = SUnitParams { a, b };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.a < 2 || self.b < 2 {
            return Err(Error::InvalidParams(format!(
                "bases must be ≥ 2, got ({}, {})",
                self.a, self.b
            )));
        }
        if gcd_u64(self.a, self.b) != 1 {
            return Err(Error::InvalidParams(format!(
                "bases must be coprime, gcd({}, {}) = {}",
                self.a,
                self.b,
                gcd_u64(self.a, self.b)
            )));
        }
        Ok(())
    }

    /// min(a, b); the least element of Σ exceeding M lies in (M, min(a,b)·M].
    pub fn min_base(&self) -> u64 {
        self.a.min(self.b)
    }
}

/// One element a^u b^v of Σ. Coprimality makes (u, v) ↦ value injective.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SUnit {
    pub u: u32,
    pub v: u32,
    #[serde(with = "dec_uint")]
    pub value: BigUint,
}

/// Which exponent quadrant a lattice count ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quadrant {
    /// x, y ≥ 0 — counts all of Σ(M), matching |enumerate_sigma|.
    NonNeg,
    /// x, y ≥ 1 — the open quadrant the two-term estimate tracks closely.
    Positive,
}

/// Exact lattice count plus the two-term analytic estimate for the same t.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CountReport {
    pub count: u64,
    pub two_term_estimate: f64,
}

/// One consecutive gap, keyed by its left endpoint q_ν.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapEntry {
    #[serde(with = "dec_uint")]
    pub q: BigUint,
    #[serde(with = "dec_uint")]
    pub diff: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapPair {
    #[serde(with = "dec_uint")]
    pub lo: BigUint,
    #[serde(with = "dec_uint")]
    pub hi: BigUint,
}

/// Gaps of Σ(M), extended by the gap to the first element beyond M.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapReport {
    pub beta: f64,
    pub entries: Vec<GapEntry>,
    #[serde(with = "dec_uint")]
    pub max_gap: BigUint,
    pub argmax_pair: GapPair,
    /// max over ν of (q_{ν+1}−q_ν)/q_ν · (ln q_ν)^{1/(β−1)}.
    pub normalized_constant: f64,
}

/// All of Σ(M), ascending. 1 = a⁰b⁰ is always present.
pub fn enumerate_sigma(params: &SUnitParams, m: &BigUint) -> Result<Vec<SUnit>> {
    enumerate_budgeted(params, m, ELEMENT_BUDGET)
}

fn enumerate_budgeted(params: &SUnitParams, m: &BigUint, budget: usize) -> Result<Vec<SUnit>> {
    params.validate()?;
    if m.is_zero() {
        return Err(Error::Precondition("M must be ≥ 1".into()));
    }
    let a = BigUint::from(params.a);
    let b = BigUint::from(params.b);
    let mut out = Vec::new();
    let mut pow_a = BigUint::one();
    let mut u = 0u32;
    while pow_a <= *m {
        let mut value = pow_a.clone();
        let mut v = 0u32;
        while value <= *m {
            if out.len() >= budget {
                return Err(Error::Budget(format!("|Σ(M)| exceeds {budget} elements")));
            }
            out.push(SUnit { u, v, value: value.clone() });
            value *= &b;
            v += 1;
        }
        pow_a *= &a;
        u += 1;
    }
    out.sort_by(|x, y| x.value.cmp(&y.value));
    debug_assert!(out.windows(2).all(|w| w[0].value < w[1].value));
    Ok(out)
}

/// Σ(M) together with its successor, the least element > M. If q is the
/// largest element ≤ M then aq and bq both exceed M, so the successor is
/// found inside Σ(min(a,b)·M).
pub fn enumerate_with_successor(
    params: &SUnitParams,
    m: &BigUint,
) -> Result<(Vec<SUnit>, SUnit)> {
    let extended = enumerate_budgeted(params, &(m * params.min_base()), ELEMENT_BUDGET)?;
    let split = extended.partition_point(|s| s.value <= *m);
    let successor = extended
        .get(split)
        .cloned()
        .ok_or_else(|| Error::Internal("successor missing within min(a,b)·M".into()))?;
    let mut list = extended;
    list.truncate(split);
    Ok((list, successor))
}

/// t²/(2 ln a ln b) − t(1/(2 ln a) + 1/(2 ln b)).
pub fn two_term_estimate(params: &SUnitParams, t: f64) -> f64 {
    let la = (params.a as f64).ln();
    let lb = (params.b as f64).ln();
    t * t / (2.0 * la * lb) - t * (1.0 / (2.0 * la) + 1.0 / (2.0 * lb))
}

/// Exact count of (x, y) in the quadrant with a^x b^y ≤ bound, by integer
/// comparisons only. Dual route to `count_lattice` at t = ln bound.
pub fn count_pow_bound(
    params: &SUnitParams,
    bound: &BigUint,
    quadrant: Quadrant,
) -> Result<CountReport> {
    params.validate()?;
    let a = BigUint::from(params.a);
    let b = BigUint::from(params.b);
    let (x0, y0) = match quadrant {
        Quadrant::NonNeg => (BigUint::one(), BigUint::one()),
        Quadrant::Positive => (a.clone(), b.clone()),
    };
    let mut count: u64 = 0;
    let mut pow_a = x0;
    while pow_a <= *bound {
        let mut value = &pow_a * &y0;
        while value <= *bound {
            count += 1;
            if count as usize > ELEMENT_BUDGET {
                return Err(Error::Budget(format!("count exceeds {ELEMENT_BUDGET}")));
            }
            value *= &b;
        }
        pow_a *= &a;
    }
    Ok(CountReport { count, two_term_estimate: two_term_estimate(params, ln_big_f64(bound)) })
}

/// Exact count of (x, y) in the quadrant with x ln a + y ln b ≤ t, where t
/// is the exact dyadic value of the given f64. Each boundary comparison is
/// decided by certified interval arithmetic (ln of an integer ≥ 2 is
/// irrational, so against rational t it always resolves).
pub fn count_lattice(params: &SUnitParams, t: f64, quadrant: Quadrant) -> Result<CountReport> {
    use crate::real::interval::{certify, ln_uint};
    use num_bigint::BigInt;

    params.validate()?;
    if !t.is_finite() || t < 0.0 {
        return Err(Error::Precondition(format!("t must be finite and ≥ 0, got {t}")));
    }
    let t_rat = crate::real::dyadic::Dyadic::from_f64(t)
        .expect("finite f64")
        .to_rational();
    let a = BigUint::from(params.a);
    let b = BigUint::from(params.b);

    // x ln a + y ln b ≤ t, strict resolution demanded per comparison.
    let below = |x: u64, y: u64| -> Result<bool> {
        if x == 0 && y == 0 {
            return Ok(true); // 0 ≤ t already checked
        }
        certify("lattice boundary x·ln a + y·ln b vs t", |prec| {
            let la = ln_uint(&a, prec)?;
            let lb = ln_uint(&b, prec)?;
            let combo = la
                .mul_int(&BigInt::from(x), prec)
                .add(&lb.mul_int(&BigInt::from(y), prec), prec);
            Ok(combo.cmp_rational(&t_rat).map(|o| o != std::cmp::Ordering::Greater))
        })
    };

    let start = match quadrant {
        Quadrant::NonNeg => 0u64,
        Quadrant::Positive => 1u64,
    };
    let mut count: u64 = 0;
    let mut x = start;
    while below(x, start)? {
        let mut y = start;
        while below(x, y)? {
            count += 1;
            if count as usize > ELEMENT_BUDGET {
                return Err(Error::Budget(format!("count exceeds {ELEMENT_BUDGET}")));
            }
            y += 1;
        }
        x += 1;
    }
    Ok(CountReport { count, two_term_estimate: two_term_estimate(params, t) })
}

/// Consecutive gaps of Σ(M) including the jump past M, with max and the
/// β-normalized constant. β > 2 (the gap exponent being probed).
pub fn gap_report(params: &SUnitParams, m: &BigUint, beta: f64) -> Result<GapReport> {
    if !beta.is_finite() || beta <= 2.0 {
        return Err(Error::Precondition(format!("beta must be > 2, got {beta}")));
    }
    if *m < BigUint::from(2u32) {
        return Err(Error::Precondition("M must be ≥ 2".into()));
    }
    let (list, successor) = enumerate_with_successor(params, m)?;
    let exponent = 1.0 / (beta - 1.0);
    let mut entries = Vec::with_capacity(list.len());
    let mut max_gap = BigUint::zero();
    let mut argmax_pair = GapPair { lo: BigUint::one(), hi: BigUint::one() };
    let mut normalized_constant = 0.0f64;
    for (i, s) in list.iter().enumerate() {
        let next = list.get(i + 1).map_or(&successor.value, |n| &n.value);
        let diff = next - &s.value;
        if diff > max_gap {
            max_gap = diff.clone();
            argmax_pair = GapPair { lo: s.value.clone(), hi: next.clone() };
        }
        let q = big_to_f64(&s.value);
        // ln 1 = 0 kills the q_ν = 1 term, as it should.
        let c = big_to_f64(&diff) / q * q.ln().powf(exponent);
        if c > normalized_constant {
            normalized_constant = c;
        }
        entries.push(GapEntry { q: s.value.clone(), diff });
    }
    Ok(GapReport { beta, entries, max_gap, argmax_pair, normalized_constant })
}
