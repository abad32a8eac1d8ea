//! Digit-set combinatorics on a-ary expansions.
//!
//! A digit set 𝔛 ⊆ [0, aⁿ) collected as ⌊aⁿη⌋ over η ∈ Σ_α(M₁) survives projection
//! mod a^s: multiplying x/aⁿ ≤ η < (x+1)/aⁿ by a^{n−s} shows every projected residue
//! is hit by some η₁ ∈ Σ_α(M₂) with M₂ = M₁·a^{n−s}.  The projection splits into
//! strata 𝔛_{n,s,ℓ}(λ) = {x ≡ λ (mod a^{s−ℓ})}, and the a-ary shift T_a^{s−ℓ} maps the
//! chosen stratum bijectively onto 𝔜 ⊆ [0, a^ℓ) with
//!
//! ```text
//! x/a^s = γ + y/a^ℓ,   γ = λ/a^s,
//! ```
//!
//! so every y ∈ 𝔜 satisfies |y/a^ℓ + γ − {qα}| ≤ a^{−s} for some q ∈ Σ(M₂).
//! The search over the grid s = n − jℓ looks for a stratum of cardinality
//! X ≥ a^{(1/2−2ε)ℓ}; at desk scale the bound is advisory.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::circle::{frac_mul, Angle};
use crate::error::{Error, Result};
use crate::netgen::DigitSet;
use crate::sunits::{enumerate_sigma, SUnit, SUnitParams};
use crate::util::{checked_pow_u64, dec_uint, dec_uint_vec};

/// One residue class of a projected digit set: the members of 𝔛 mod a^s that
/// are ≡ λ (mod a^{s−ℓ}), kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stratum {
    pub a: u64,
    pub s: u32,
    pub l: u32,
    #[serde(with = "dec_uint")]
    pub lambda: BigUint,
    /// X = |members|.
    pub x: u64,
    #[serde(with = "dec_uint_vec")]
    pub members: Vec<BigUint>,
}

/// 𝔜 = T_a^{s−ℓ}(stratum) ⊆ [0, a^ℓ), with the phase γ = λ/a^s and the Σ-budget
/// M₂ whose elements witness each y.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct YSet {
    pub a: u64,
    pub l: u32,
    pub gamma: Angle,
    /// Y = |members| = X of the source stratum.
    pub y: u64,
    pub members: Vec<u64>,
    #[serde(with = "dec_uint")]
    pub source_m2: BigUint,
}

/// A digit set reduced mod a^s, along with the budget M₂ = M₁·a^{n−s} that
/// witnesses every surviving residue.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Projection {
    pub digits: DigitSet,
    #[serde(with = "dec_uint")]
    pub m2: BigUint,
}

/// Outcome of the stratum search over the grid s = n − jℓ.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchReport {
    pub eps: f64,
    /// The s values scanned, largest first.
    pub grid: Vec<u32>,
    /// a^{(1/2−2ε)ℓ}.
    pub threshold: f64,
    /// X ≥ threshold.  Advisory: desk-scale digit sets may be too thin.
    pub pass: bool,
    pub stratum: Stratum,
}

fn pow_big(a: u64, e: u32) -> BigUint {
    BigUint::from(a).pow(e)
}

/// T_a^k(x) = ⌊x / a^k⌋, the k-fold a-ary shift.
pub fn ta_shift(x: &BigUint, a: u64, k: u32) -> BigUint {
    assert!(a >= 1, "shift base must be positive");
    x / pow_big(a, k)
}

fn check_base(ds: &DigitSet) -> Result<()> {
    if ds.a < 2 {
        return Err(Error::Precondition(format!(
            "digit base must be at least 2, got {}",
            ds.a
        )));
    }
    Ok(())
}

/// Sorted, deduplicated residues of `ds` mod a^s.
fn residues_mod(ds: &DigitSet, s: u32) -> Vec<BigUint> {
    let modulus = pow_big(ds.a, s);
    let mut out: Vec<BigUint> = ds.residues.iter().map(|r| r % &modulus).collect();
    out.sort();
    out.dedup();
    out
}

/// Project `ds` to residues mod a^s and record the Σ-budget M₂ = M₁·a^{n−s}
/// at which every projected residue stays witnessed.
pub fn project(ds: &DigitSet, s: u32, m1: &BigUint) -> Result<Projection> {
    check_base(ds)?;
    if s > ds.n {
        return Err(Error::Precondition(format!(
            "projection depth s = {} exceeds digit length n = {}",
            s, ds.n
        )));
    }
    Ok(Projection {
        digits: DigitSet {
            a: ds.a,
            n: s,
            residues: residues_mod(ds, s),
        },
        m2: m1 * pow_big(ds.a, ds.n - s),
    })
}

/// Split the projection of `ds` mod a^s into strata by λ = x mod a^{s−ℓ}.
/// Empty strata are omitted; the result is sorted by λ and partitions the
/// projection exactly.
pub fn stratify(ds: &DigitSet, s: u32, l: u32) -> Result<Vec<Stratum>> {
    check_base(ds)?;
    if s > ds.n || l > s {
        return Err(Error::Precondition(format!(
            "need l <= s <= n, got l = {l}, s = {s}, n = {}",
            ds.n
        )));
    }
    let modulus = pow_big(ds.a, s - l);
    let mut buckets: std::collections::BTreeMap<BigUint, Vec<BigUint>> =
        std::collections::BTreeMap::new();
    for x in residues_mod(ds, s) {
        let lambda = &x % &modulus;
        buckets.entry(lambda).or_default().push(x);
    }
    Ok(buckets
        .into_iter()
        .map(|(lambda, members)| Stratum {
            a: ds.a,
            s,
            l,
            lambda,
            x: members.len() as u64,
            members,
        })
        .collect())
}

/// Scan the grid s = n − jℓ, j = 0..⌈(1−ε)n/ℓ⌉, keeping s ≥ max(εn, ℓ), and return
/// the stratum maximizing X (ties: larger s, then smaller λ).  `pass` records
/// whether X ≥ a^{(1/2−2ε)ℓ}.
pub fn combinatorial_search(ds: &DigitSet, l: u32, eps: f64) -> Result<SearchReport> {
    check_base(ds)?;
    if l < 1 || l > ds.n {
        return Err(Error::Precondition(format!(
            "need 1 <= l <= n, got l = {l}, n = {}",
            ds.n
        )));
    }
    if !(eps > 0.0 && eps < 0.25) {
        return Err(Error::Precondition(format!(
            "eps must lie in (0, 1/4), got {eps}"
        )));
    }
    if ds.residues.is_empty() {
        return Err(Error::Precondition("digit set is empty".into()));
    }
    let n = ds.n;
    let j_max = ((1.0 - eps) * f64::from(n) / f64::from(l)).ceil() as u32;
    let mut grid = Vec::new();
    let mut best: Option<Stratum> = None;
    for j in 0..=j_max {
        let Some(s) = n.checked_sub(j * l) else { break };
        if f64::from(s) < eps * f64::from(n) || s < l {
            break;
        }
        grid.push(s);
        for st in stratify(ds, s, l)? {
            let better = match &best {
                None => true,
                Some(b) => {
                    st.x > b.x
                        || (st.x == b.x && st.s > b.s)
                        || (st.x == b.x && st.s == b.s && st.lambda < b.lambda)
                }
            };
            if better {
                best = Some(st);
            }
        }
    }
    let stratum = best.ok_or_else(|| {
        Error::Precondition(format!(
            "grid s = n − jl is empty for n = {n}, l = {l}, eps = {eps}"
        ))
    })?;
    let threshold = (ds.a as f64).powf((0.5 - 2.0 * eps) * f64::from(l));
    let pass = stratum.x as f64 >= threshold;
    Ok(SearchReport {
        eps,
        grid,
        threshold,
        pass,
        stratum,
    })
}

/// Shift a stratum down to 𝔜: members (x − λ)/a^{s−ℓ}, phase γ = λ/a^s.
/// The shift is a bijection, so |𝔜| = X.
pub fn extract_y(st: &Stratum, m2: &BigUint) -> Result<YSet> {
    let a_l = checked_pow_u64(st.a, st.l).ok_or_else(|| {
        Error::InvalidParams(format!("a^l = {}^{} exceeds the u64 range", st.a, st.l))
    })?;
    if st.l > st.s {
        return Err(Error::Inconsistent(format!(
            "stratum has l = {} > s = {}",
            st.l, st.s
        )));
    }
    let modulus = pow_big(st.a, st.s - st.l);
    let mut members = Vec::with_capacity(st.members.len());
    for x in &st.members {
        if x < &st.lambda || (x - &st.lambda) % &modulus != BigUint::ZERO {
            return Err(Error::Inconsistent(format!(
                "stratum member {x} is not ≡ {} (mod a^(s−l))",
                st.lambda
            )));
        }
        let y = (x - &st.lambda) / &modulus;
        let y = y.to_u64().filter(|&y| y < a_l).ok_or_else(|| {
            Error::Inconsistent(format!("stratum member {x} does not lie below a^s"))
        })?;
        members.push(y);
    }
    let before = members.len();
    members.sort_unstable();
    members.dedup();
    if members.len() != before || before as u64 != st.x {
        return Err(Error::Inconsistent(
            "stratum members do not shift bijectively".into(),
        ));
    }
    let gamma = Angle::new(st.lambda.clone(), pow_big(st.a, st.s))?;
    Ok(YSet {
        a: st.a,
        l: st.l,
        gamma,
        y: members.len() as u64,
        members,
        source_m2: m2.clone(),
    })
}

/// For each y ∈ 𝔜, the least q ∈ Σ(M₂) with |y/a^ℓ + γ − {qα}| ≤ a^{−s},
/// or None when no element of the budget witnesses it.
pub fn y_witness_map(
    ys: &YSet,
    s: u32,
    params: &SUnitParams,
    alpha: &Angle,
) -> Result<Vec<Option<SUnit>>> {
    if s < ys.l {
        return Err(Error::Precondition(format!(
            "witness depth s = {s} is below l = {}",
            ys.l
        )));
    }
    let sigma = enumerate_sigma(params, &ys.source_m2)?;
    let orbit: Vec<BigRational> = sigma
        .iter()
        .map(|e| frac_mul(&e.value, alpha).to_rational())
        .collect();
    let a_l = BigRational::from_integer(pow_big(ys.a, ys.l).into());
    let tol = BigRational::new(One::one(), pow_big(ys.a, s).into());
    let gamma = ys.gamma.to_rational();
    Ok(ys
        .members
        .iter()
        .map(|&y| {
            let target = BigRational::from_integer(BigUint::from(y).into()) / &a_l + &gamma;
            sigma
                .iter()
                .zip(&orbit)
                .find(|(_, eta)| (*eta - &target).abs() <= tol)
                .map(|(e, _)| e.clone())
        })
        .collect())
}
