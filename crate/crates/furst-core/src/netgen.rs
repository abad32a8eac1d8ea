//! The Δ-net on \[0,1\] built from one pigeonhole pair of orbit points, and
//! the digit set it feeds.
//!
//! From the minimal positive gap η′−η″ of Σ_α(M) set d = 1/(η′−η″); the
//! scaled multiples η_j = q_j(η′−η″), q_j ∈ Σ(⌊d⌋), together with their
//! mirrors 1−η_j, cover \[0,1\] to within Δ = D_d/d, where D_d is the largest
//! consecutive gap of Σ(⌊d⌋) including the jump past d. Every η_j is a
//! difference of two fractional parts {q_j q′α} − {q_j q″α} with
//! q_j q′, q_j q″ ≤ M₁ = M·den(α), which is what makes the net usable
//! downstream.
//!
//! The digit set 𝔛_n = {⌊a^n η⌋ : η ∈ Σ_α(M₁)} discretizes the orbit to n
//! base-a digits; its size against √(a^n)/2 is the density payoff.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::circle::{dispersion, frac_mul, min_positive_gap, sigma_alpha, Angle, Metric, PointSet};
use crate::error::{Error, Result};
use crate::sunits::{enumerate_sigma, enumerate_with_successor, SUnitParams};
use crate::util::{dec_rat, dec_uint, dec_uint_vec};

/// Everything the net construction produced, self-contained.
#[derive(Clone, Debug, Serialize)]
pub struct NetReport {
    pub params: SUnitParams,
    pub alpha: Angle,
    #[serde(with = "dec_uint")]
    pub m: BigUint,
    /// M·den(α); net points are differences of orbit points from Σ_α(M₁).
    #[serde(with = "dec_uint")]
    pub m1: BigUint,
    /// Distinct fractional parts of Σ_α(M); collisions shrink this below |Σ(M)|.
    pub point_count: u64,
    pub eta_hi: Angle,
    pub eta_lo: Angle,
    /// Smallest orbit elements realizing η′ and η″.
    #[serde(with = "dec_uint")]
    pub q_hi: BigUint,
    #[serde(with = "dec_uint")]
    pub q_lo: BigUint,
    /// d = 1/(η′−η″), exact.
    #[serde(with = "dec_rat")]
    pub inv_gap: BigRational,
    /// |Σ(⌊d⌋)|.
    pub k: u64,
    /// D_d: the largest consecutive gap in Σ(⌊d⌋), successor included.
    #[serde(with = "dec_uint")]
    pub d_max: BigUint,
    /// Δ = D_d/d.
    #[serde(with = "dec_rat")]
    pub delta: BigRational,
    /// Measured dispersion of the net (≤ Δ, asserted).
    #[serde(with = "dec_rat")]
    pub net_dispersion: BigRational,
    /// Whether M < den(α), the regime where all q ∈ Σ(M) stay distinct mod den(α).
    pub m_below_q: bool,
    /// Whether η′−η″ ≤ 1/point_count held (pigeonhole upper window).
    pub pigeonhole_upper_held: bool,
    pub net: PointSet,
}

/// The n-digit discretization 𝔛_n ⊆ [0, a^n) of an orbit set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigitSet {
    pub a: u64,
    pub n: u32,
    #[serde(with = "dec_uint_vec")]
    pub residues: Vec<BigUint>,
}

/// The cardinality check record: is |𝔛_n| ≥ √(a^n)/2?
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Lemma2Check {
    pub x_n: u64,
    pub sqrt_n_half: f64,
    pub pass: bool,
}

fn angle_mod1(r: &BigRational) -> Angle {
    debug_assert!(*r >= BigRational::zero() && *r <= BigRational::one());
    Angle::new(r.numer().magnitude().clone(), r.denom().magnitude().clone())
        .expect("positive denominator")
}

/// Builds the Δ-net from the pigeonhole pair of Σ_α(M).
///
/// Tolerates fractional-part collisions (M ≥ den(α)): the pigeonhole upper
/// window is then recorded against the collapsed point count rather than
/// asserted. Hard assertions (violations are bugs): η′−η″ ≥ 1/den(α),
/// d ≤ den(α), dispersion(net) ≤ Δ.
pub fn build_net(params: &SUnitParams, alpha: &Angle, m: &BigUint) -> Result<NetReport> {
    params.validate()?;
    let points = sigma_alpha(params, m, alpha)?;
    if points.len() < 2 {
        return Err(Error::Precondition(format!(
            "need ≥ 2 distinct fractional parts, got {} (M = {m}, α = {alpha})",
            points.len()
        )));
    }
    let (eta_hi, eta_lo, gap) = min_positive_gap(&points)?;
    let q_den = alpha.den();

    // Distinct multiples of 1/den(α) differ by at least 1/den(α).
    let inv_gap = gap.recip();
    if inv_gap > BigRational::from(num_bigint::BigInt::from(q_den.clone())) {
        return Err(Error::Internal(format!(
            "gap {gap} smaller than 1/den(α) = 1/{q_den}"
        )));
    }
    let floor_d = inv_gap.to_integer().magnitude().clone();
    let (list, successor) = enumerate_with_successor(params, &floor_d)?;
    let k = list.len() as u64;
    let mut d_max = BigUint::zero();
    for (i, s) in list.iter().enumerate() {
        let next = list.get(i + 1).map_or(&successor.value, |n| &n.value);
        let diff = next - &s.value;
        if diff > d_max {
            d_max = diff;
        }
    }
    let delta = BigRational::from(num_bigint::BigInt::from(d_max.clone())) * &gap;

    let mut net_angles = Vec::with_capacity(2 * list.len());
    for s in &list {
        let eta = BigRational::from(num_bigint::BigInt::from(s.value.clone())) * &gap;
        net_angles.push(angle_mod1(&eta));
        net_angles.push(angle_mod1(&(BigRational::one() - &eta)));
    }
    let net = PointSet::from_angles(net_angles);
    let net_dispersion = dispersion(&net, Metric::Interval)?;
    if net_dispersion > delta {
        return Err(Error::Internal(format!(
            "net dispersion {net_dispersion} exceeds Δ = {delta}"
        )));
    }

    // Smallest witnesses for the pigeonhole pair.
    let sigma_m = enumerate_sigma(params, m)?;
    let witness = |target: &Angle| -> Result<BigUint> {
        sigma_m
            .iter()
            .find(|s| frac_mul(&s.value, alpha) == *target)
            .map(|s| s.value.clone())
            .ok_or_else(|| Error::Internal(format!("no q ∈ Σ(M) maps to {target}")))
    };
    let q_hi = witness(&eta_hi)?;
    let q_lo = witness(&eta_lo)?;

    let point_count = points.len() as u64;
    let pigeonhole_upper_held = &gap * BigRational::from(num_bigint::BigInt::from(point_count))
        <= BigRational::one();

    Ok(NetReport {
        params: *params,
        alpha: alpha.clone(),
        m: m.clone(),
        m1: m * q_den,
        point_count,
        eta_hi,
        eta_lo,
        q_hi,
        q_lo,
        inv_gap,
        k,
        d_max,
        delta,
        net_dispersion,
        m_below_q: m < q_den,
        pigeonhole_upper_held,
        net,
    })
}

/// Largest n ≥ 0 with a^n ≤ 1/delta (exact rational comparisons).
pub fn choose_n(delta: &BigRational, a: u64) -> Result<u32> {
    if *delta <= BigRational::zero() || *delta > BigRational::one() {
        return Err(Error::Precondition(format!("need 0 < Δ ≤ 1, got {delta}")));
    }
    if a < 2 {
        return Err(Error::InvalidParams(format!("base must be ≥ 2, got {a}")));
    }
    // a^n ≤ den/num ⟺ a^n · num ≤ den
    let num = delta.numer().magnitude();
    let den = delta.denom().magnitude();
    let mut n = 0u32;
    let mut pow = BigUint::from(a);
    while &pow * num <= *den {
        n += 1;
        pow *= a;
    }
    Ok(n)
}

/// ⌊a^n η⌋ over a finite set of exact angles.
pub fn digit_set_of_points(points: &PointSet, a: u64, n: u32) -> DigitSet {
    let scale = BigUint::from(a).pow(n);
    let mut residues: Vec<BigUint> = points
        .iter()
        .map(|p| (&scale * p.num()) / p.den())
        .collect();
    residues.sort();
    residues.dedup();
    debug_assert!(residues.iter().all(|r| *r < scale));
    DigitSet { a, n, residues }
}

/// 𝔛_n for the orbit set Σ_α(M₁).
pub fn digit_set(
    params: &SUnitParams,
    alpha: &Angle,
    m1: &BigUint,
    n: u32,
) -> Result<DigitSet> {
    let points = sigma_alpha(params, m1, alpha)?;
    Ok(digit_set_of_points(&points, params.a, n))
}

/// |𝔛_n| against √(a^n)/2, decided exactly (4·X² ≥ a^n). Advisory: a
/// failing bound is reported, never raised.
pub fn lemma2_check(ds: &DigitSet) -> Lemma2Check {
    let x_n = ds.residues.len() as u64;
    let n_val = BigUint::from(ds.a).pow(ds.n);
    let pass = BigUint::from(4u32) * BigUint::from(x_n) * BigUint::from(x_n) >= n_val;
    Lemma2Check {
        x_n,
        sqrt_n_half: crate::util::big_to_f64(&n_val).sqrt() / 2.0,
        pass,
    }
}

/// Consistency-checked cardinality record for a net's digit set: ds must
/// use the net's base and n = choose_n(Δ, a).
pub fn verify_lemma2(report: &NetReport, ds: &DigitSet) -> Result<Lemma2Check> {
    if ds.a != report.params.a {
        return Err(Error::Inconsistent(format!(
            "digit set base {} vs net base {}",
            ds.a, report.params.a
        )));
    }
    let want_n = choose_n(&report.delta, report.params.a)?;
    if ds.n != want_n {
        return Err(Error::Inconsistent(format!(
            "digit set n = {} but choose_n(Δ) = {want_n}",
            ds.n
        )));
    }
    Ok(lemma2_check(ds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn p23() -> SUnitParams {
        SUnitParams::new(2, 3).unwrap()
    }

    fn ang(s: &str) -> Angle {
        s.parse().unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn net_at_alpha_1_over_101() {
        let r = build_net(&p23(), &ang("1/101"), &10u32.into()).unwrap();
        assert_eq!((r.eta_hi, r.eta_lo), (ang("2/101"), ang("1/101")));
        assert_eq!((r.q_hi.to_u64().unwrap(), r.q_lo.to_u64().unwrap()), (2, 1));
        assert_eq!(r.inv_gap, rat(101, 1));
        assert_eq!(r.k, 20);
        assert_eq!(r.d_max, BigUint::from(15u32)); // the 81 → 96 jump
        assert_eq!(r.delta, rat(15, 101));
        assert_eq!(r.net.len(), 40);
        assert_eq!(r.net_dispersion, rat(5, 101));
        assert_eq!(r.m1, BigUint::from(1010u32));
        assert_eq!(r.point_count, 7);
        assert!(r.m_below_q && r.pigeonhole_upper_held);
    }

    #[test]
    fn net_tolerates_collisions() {
        // M = 10 ≥ den(α) = 5: orbit parts collapse to {1/5, 2/5, 3/5, 4/5}.
        let r = build_net(&p23(), &ang("1/5"), &10u32.into()).unwrap();
        assert_eq!(r.point_count, 4);
        assert_eq!(r.inv_gap, rat(5, 1));
        assert_eq!(r.k, 4); // Σ(5) = {1, 2, 3, 4}
        assert_eq!(r.d_max, BigUint::from(2u32)); // 4 → 6
        assert_eq!(r.delta, rat(2, 5));
        assert!(!r.m_below_q);
        assert!(r.pigeonhole_upper_held); // 1/5 ≤ 1/4
        assert!(r.net_dispersion <= r.delta);
    }

    #[test]
    fn degenerate_inputs_rejected() {
        assert!(matches!(
            build_net(&p23(), &ang("0/1"), &10u32.into()),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            build_net(&p23(), &ang("1/101"), &1u32.into()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn choose_n_examples() {
        assert_eq!(choose_n(&rat(1, 10), 2).unwrap(), 3);
        assert_eq!(choose_n(&rat(1, 1), 2).unwrap(), 0);
        assert_eq!(choose_n(&rat(15, 101), 2).unwrap(), 2);
        assert_eq!(choose_n(&rat(1, 8), 2).unwrap(), 3); // boundary a^n = 1/Δ included
        assert!(matches!(choose_n(&rat(0, 1), 2), Err(Error::Precondition(_))));
        assert!(matches!(choose_n(&rat(3, 2), 2), Err(Error::Precondition(_))));
    }

    #[test]
    fn digit_sets() {
        let pts = PointSet::from_angles(vec![ang("1/8"), ang("3/8"), ang("7/8")]);
        let ds = digit_set_of_points(&pts, 2, 2);
        let got: Vec<u64> = ds.residues.iter().map(|r| r.to_u64().unwrap()).collect();
        assert_eq!(got, [0, 1, 3]);

        let ds0 = digit_set_of_points(&pts, 2, 0);
        assert_eq!(ds0.residues, vec![BigUint::zero()]);

        let ds = digit_set(&p23(), &ang("1/101"), &1010u32.into(), 2).unwrap();
        assert!(ds.residues.iter().all(|r| *r < BigUint::from(4u32)));
    }

    #[test]
    fn lemma2_records() {
        let r = build_net(&p23(), &ang("1/101"), &10u32.into()).unwrap();
        let n = choose_n(&r.delta, 2).unwrap();
        assert_eq!(n, 2);
        let ds = digit_set(&p23(), &r.alpha, &r.m1, n).unwrap();
        let check = verify_lemma2(&r, &ds).unwrap();
        assert_eq!(check.sqrt_n_half, 1.0);
        assert!(check.pass);
        assert!(check.x_n >= 2);

        // mismatched n is inconsistent
        let bad = DigitSet { a: 2, n: 6, residues: vec![BigUint::from(5u32)] };
        assert!(matches!(verify_lemma2(&r, &bad), Err(Error::Inconsistent(_))));
        // but the advisory check itself never raises
        let adv = lemma2_check(&bad);
        assert_eq!(adv.x_n, 1);
        assert_eq!(adv.sqrt_n_half, 4.0);
        assert!(!adv.pass);
    }

    #[test]
    fn net_points_are_orbit_differences() {
        let r = build_net(&p23(), &ang("1/101"), &10u32.into()).unwrap();
        let list = enumerate_sigma(&p23(), &r.inv_gap.to_integer().magnitude().clone()).unwrap();
        for s in &list {
            let hi = frac_mul(&(&s.value * &r.q_hi), &r.alpha).to_rational();
            let lo = frac_mul(&(&s.value * &r.q_lo), &r.alpha).to_rational();
            let diff = hi - lo;
            let eta = BigRational::from(num_bigint::BigInt::from(s.value.clone()))
                * (r.eta_hi.to_rational() - r.eta_lo.to_rational());
            // η_j is the difference itself, or 1 − |difference| when it wraps.
            let wrapped = if diff >= BigRational::zero() { diff } else { BigRational::one() + diff };
            assert_eq!(wrapped, eta);
            assert!(&s.value * &r.q_hi <= r.m1 && &s.value * &r.q_lo <= r.m1);
        }
    }
}
