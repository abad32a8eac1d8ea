//! Rational approximation of a real α: convergents p_ν/q_ν, Dirichlet pairs
//! |α − A/Q| ≤ 1/(QN) with Q ≤ N, badness against a power law
//! ψ(t) = k₁ t^{−k₂}, and the empirical lower-bound probe
//! c₀ = min_ν q_ν^β |log a/log b − p_ν/q_ν|.
//!
//! Everything that touches an irrational is decided by certified interval
//! arithmetic; an undecidable comparison surfaces as a precision error,
//! never as a guess.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::dyadic::{Dyadic, Round};
use crate::real::interval::{certify, exp_interval, ln_rational, pow_uint, RInterval, PRECISIONS};
use crate::real::{convergents_with_next, Convergent, LogRatio, RealSource, RealSpec};
use crate::sunits::SUnitParams;
use crate::util::{dec_int, dec_uint};

/// Canonical continued fraction of a rational spec (exact Euclid; last
/// quotient ≥ 2 unless the value is an integer).
pub fn cf_expand(x: &RealSpec) -> Result<Vec<BigInt>> {
    x.validate()?;
    let r = x
        .as_rational()
        .ok_or_else(|| Error::Precondition("cf_expand needs an exact rational spec".into()))?;
    Ok(crate::real::cf_of_rational(&r))
}

/// |x − r| compared against an exact rational bound, decided exactly for
/// rational x and by escalating intervals otherwise.
fn cmp_abs_err(
    x: &dyn RealSource,
    r: &BigRational,
    bound: &BigRational,
    what: &str,
) -> Result<Ordering> {
    if let Some(exact) = x.as_rational() {
        return Ok((exact - r).abs().cmp(bound));
    }
    certify(what, |prec| {
        let err = x
            .enclosure(prec)?
            .sub(&RInterval::from_rational(r, prec), prec)
            .abs();
        Ok(err.cmp_rational(bound))
    })
}

/// All convergents with q ≤ q_limit, each re-verified to satisfy
/// |x − p/q| < 1/q² (with equality-at-zero for a rational's final row).
pub fn convergents(x: &RealSpec, q_limit: &BigUint) -> Result<Vec<Convergent>> {
    x.validate()?;
    let (within, _) = convergents_with_next(x, q_limit)?;
    for c in &within {
        let r = BigRational::new(c.p.clone(), BigInt::from(c.q.clone()));
        let bound = BigRational::new(BigInt::one(), BigInt::from(&c.q * &c.q));
        let ord = cmp_abs_err(x, &r, &bound, "convergent error vs 1/q²")?;
        if ord == Ordering::Greater {
            return Err(Error::Internal(format!(
                "convergent {}/{} violates |x − p/q| < 1/q²",
                c.p, c.q
            )));
        }
    }
    Ok(within)
}

/// The Dirichlet approximant: coprime (A, Q), 1 ≤ Q ≤ N, |x − A/Q| ≤ 1/(QN).
/// Realized by the largest convergent denominator ≤ N; the guarantee is
/// re-verified before returning.
pub fn dirichlet_approx(x: &RealSpec, n: &BigUint) -> Result<(BigInt, BigUint)> {
    x.validate()?;
    if n.is_zero() {
        return Err(Error::Precondition("N must be ≥ 1".into()));
    }
    let (within, _) = convergents_with_next(x, n)?;
    let last = within
        .last()
        .ok_or_else(|| Error::Internal("q₀ = 1 ≤ N yet no convergent returned".into()))?;
    let r = BigRational::new(last.p.clone(), BigInt::from(last.q.clone()));
    let bound = BigRational::new(BigInt::one(), BigInt::from(&last.q * n));
    let ord = cmp_abs_err(x, &r, &bound, "Dirichlet guarantee |x − A/Q| vs 1/(QN)")?;
    if ord == Ordering::Greater {
        return Err(Error::Internal(format!(
            "Dirichlet pair ({}, {}) misses 1/(QN)",
            last.p, last.q
        )));
    }
    Ok((last.p.clone(), last.q.clone()))
}

/// The power law ψ(t) = k₁ t^{−k₂}; its inverse through t ↦ 1/ψ(t) is
/// Ψ(s) = (k₁ s)^{1/k₂}.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PsiSpec {
    pub k1: f64,
    pub k2: f64,
}

impl PsiSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.k1.is_finite() && self.k1 > 0.0) {
            return Err(Error::InvalidParams(format!("k₁ must be > 0, got {}", self.k1)));
        }
        if !(self.k2.is_finite() && self.k2 >= 1.0) {
            return Err(Error::InvalidParams(format!("k₂ must be ≥ 1, got {}", self.k2)));
        }
        Ok(())
    }

    /// ψ(q) as an exact rational when k₂ is a small integer (q^{k₂} exact).
    fn psi_exact(&self, q: &BigUint) -> Option<BigRational> {
        if self.k2.fract() != 0.0 || self.k2 > 64.0 {
            return None;
        }
        let k1 = Dyadic::from_f64(self.k1)?.to_rational();
        Some(k1 / BigRational::from(BigInt::from(q.pow(self.k2 as u32))))
    }

    /// ψ(q) = k₁ / q^{k₂} as a certified enclosure.
    fn psi_interval(&self, q: &BigUint, prec: u32) -> Result<RInterval> {
        let qk = pow_uint(q, self.k2, prec)?;
        let k1 = Dyadic::from_f64(self.k1).expect("validated finite");
        Ok(RInterval::new(
            k1.div(qk.hi(), prec, Round::Down),
            k1.div(qk.lo(), prec, Round::Up),
        ))
    }

    /// Ψ(n) = (k₁ n)^{1/k₂} as a certified enclosure.
    fn psi_inverse_interval(&self, n: &BigUint, prec: u32) -> Result<RInterval> {
        let k1 = Dyadic::from_f64(self.k1).expect("validated finite");
        let arg = k1.to_rational() * BigRational::from(BigInt::from(n.clone()));
        let ln_arg = ln_rational(&arg, prec)?;
        let k2 = Dyadic::from_f64(self.k2).expect("validated finite");
        let scaled = RInterval::new(
            ln_arg.lo().div(&k2, prec, Round::Down),
            ln_arg.hi().div(&k2, prec, Round::Up),
        );
        Ok(exp_interval(&scaled, prec))
    }
}

/// Outcome of the ψ-badness scan up to N.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "lowercase")]
pub enum PsiWitness {
    /// ‖qα‖ ≥ ψ(q) held at every convergent denominator ≤ N (hence at every
    /// q ≤ N); the Dirichlet pair follows, with Q ≥ Ψ(N) forced.
    Pair {
        #[serde(serialize_with = "dec_int::serialize")]
        a: BigInt,
        #[serde(with = "dec_uint")]
        q: BigUint,
        /// Ψ(N), the proven floor under Q.
        psi_floor: f64,
    },
    /// ‖qα‖ < ψ(q) at this convergent denominator.
    Violation {
        #[serde(with = "dec_uint")]
        q: BigUint,
        norm_err: f64,
        psi_q: f64,
    },
}

/// Checks ‖qα‖ ≥ ψ(q) for all q ≤ N via convergent denominators only
/// (best approximations dominate, and ψ decreases), then hands back the
/// Dirichlet pair or the violating q.
pub fn psi_bad_witness(x: &RealSpec, psi: &PsiSpec, n: &BigUint) -> Result<PsiWitness> {
    x.validate()?;
    psi.validate()?;
    if *n < BigUint::from(2u32) {
        return Err(Error::Precondition("N must be ≥ 2".into()));
    }
    let (within, _) = convergents_with_next(x, n)?;
    for c in &within {
        // |q·x − p| = ‖qα‖ at convergent rows (the q₀ row when a₁ = 1 is an
        // overestimate, but its twin q₁ = q₀ row carries the true value).
        let q_rat = BigRational::from(BigInt::from(c.q.clone()));
        let p_rat = BigRational::from(c.p.clone());
        let holds = if let (Some(exact), Some(psi_q)) = (x.as_rational(), psi.psi_exact(&c.q)) {
            let err = (exact * &q_rat - &p_rat).abs();
            err >= psi_q
        } else {
            certify("‖qα‖ vs ψ(q) at a convergent", |prec| {
                let err = x
                    .enclosure(prec)?
                    .mul_int(&BigInt::from(c.q.clone()), prec)
                    .sub(&RInterval::from_rational(&p_rat, prec), prec)
                    .abs();
                let psi_q = psi.psi_interval(&c.q, prec)?;
                Ok(err.cmp_interval(&psi_q).map(|o| o == Ordering::Greater))
            })?
        };
        if !holds {
            let (norm_err, psi_q) = violation_diagnostics(x, c, psi)?;
            return Ok(PsiWitness::Violation { q: c.q.clone(), norm_err, psi_q });
        }
    }
    let (a, q) = dirichlet_approx(x, n)?;
    let floor = psi.psi_inverse_interval(n, 128)?;
    // Q ≥ Ψ(N) is forced by ψ-badness + Dirichlet; equality is legitimate,
    // so only a strictly-greater floor is a contradiction.
    if floor.cmp_rational(&BigRational::from(BigInt::from(q.clone()))) == Some(Ordering::Greater) {
        return Err(Error::Internal(format!("Dirichlet Q = {q} fell below Ψ(N)")));
    }
    Ok(PsiWitness::Pair { a, q, psi_floor: floor.mid_f64() })
}

fn violation_diagnostics(x: &RealSpec, c: &Convergent, psi: &PsiSpec) -> Result<(f64, f64)> {
    let p_rat = BigRational::from(c.p.clone());
    let err = match x.as_rational() {
        Some(exact) => {
            let e = (exact * BigRational::from(BigInt::from(c.q.clone())) - &p_rat).abs();
            RInterval::from_rational(&e, 64)
        }
        None => x
            .enclosure(128)?
            .mul_int(&BigInt::from(c.q.clone()), 128)
            .sub(&RInterval::from_rational(&p_rat, 128), 128)
            .abs(),
    };
    Ok((err.mid_f64(), psi.psi_interval(&c.q, 128)?.mid_f64()))
}

/// One tabulated row of the lower-bound probe.
#[derive(Clone, Debug, Serialize)]
pub struct BakerRow {
    pub index: usize,
    #[serde(serialize_with = "dec_int::serialize")]
    pub p: BigInt,
    #[serde(with = "dec_uint")]
    pub q: BigUint,
    /// Certified enclosure of q^β |log a/log b − p/q|.
    pub scaled_lo: f64,
    pub scaled_hi: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BakerReport {
    pub a: u64,
    pub b: u64,
    pub beta: f64,
    #[serde(with = "dec_uint")]
    pub q_limit: BigUint,
    pub precision_bits: u32,
    pub rows: Vec<BakerRow>,
    /// Enclosure of c₀ = min over rows; certified positive.
    pub c0_lo: f64,
    pub c0_hi: f64,
}

/// Tabulates q_ν^β |log a/log b − p_ν/q_ν| over all convergents with
/// q_ν ≤ q_limit, asserting the two-sided convergent inequality
/// 1/(q(q_{ν+1}+q_ν)) < |x − p_ν/q_ν| < 1/(q_ν q_{ν+1}) on every row, and
/// certifies c₀ = min > 0. Rows are enclosed to ~12 significant digits at
/// `precision` bits or the call fails naming sufficient bits.
pub fn baker_probe(
    params: &SUnitParams,
    beta: f64,
    q_limit: &BigUint,
    precision: u32,
) -> Result<BakerReport> {
    params.validate()?;
    if !beta.is_finite() || beta <= 0.0 {
        return Err(Error::Precondition(format!("beta must be > 0, got {beta}")));
    }
    if q_limit.is_zero() {
        return Err(Error::Precondition("q_limit must be ≥ 1".into()));
    }
    let x = LogRatio { a: params.a, b: params.b };
    let (within, beyond) = convergents_with_next(&x, q_limit)?;

    // Two-sided convergent inequality, decided at whatever precision it takes.
    for (i, c) in within.iter().enumerate() {
        let q_next = match within.get(i + 1).or(beyond.as_ref()) {
            Some(n) => &n.q,
            None => return Err(Error::Internal("infinite expansion lacks a successor".into())),
        };
        let r = BigRational::new(c.p.clone(), BigInt::from(c.q.clone()));
        let lower = BigRational::new(BigInt::one(), BigInt::from(&c.q * (q_next + &c.q)));
        let upper = BigRational::new(BigInt::one(), BigInt::from(&c.q * q_next));
        if cmp_abs_err(&x, &r, &lower, "convergent error vs lower CF bound")? != Ordering::Greater
        {
            return Err(Error::Internal(format!("row {i}: error ≤ 1/(q(q_{{ν+1}}+q_ν))")));
        }
        if cmp_abs_err(&x, &r, &upper, "convergent error vs upper CF bound")? != Ordering::Less {
            return Err(Error::Internal(format!("row {i}: error ≥ 1/(q q_{{ν+1}})")));
        }
    }

    let rows_at = |prec: u32| -> Result<Vec<RInterval>> {
        let enc = x.enclosure(prec)?;
        within
            .iter()
            .map(|c| {
                let r = BigRational::new(c.p.clone(), BigInt::from(c.q.clone()));
                let err = enc.sub(&RInterval::from_rational(&r, prec), prec).abs();
                Ok(pow_uint(&c.q, beta, prec)?.mul(&err, prec))
            })
            .collect()
    };
    let sharp_enough = |ivs: &[RInterval]| {
        ivs.iter().all(|iv| {
            let w = iv.width().to_f64();
            let lo = iv.lo().to_f64();
            lo > 0.0 && w <= lo * 1e-12
        })
    };

    let scaled = rows_at(precision)?;
    if !sharp_enough(&scaled) {
        for &p in PRECISIONS.iter().filter(|&&p| p > precision) {
            if sharp_enough(&rows_at(p)?) {
                return Err(Error::Precision {
                    bits: p,
                    context: format!("{precision} bits cannot certify the tabulated digits"),
                });
            }
        }
        return Err(Error::Precision {
            bits: *PRECISIONS.last().unwrap(),
            context: "tabulated digits undecided at the highest working precision".into(),
        });
    }

    let rows: Vec<BakerRow> = within
        .iter()
        .zip(&scaled)
        .map(|(c, iv)| BakerRow {
            index: c.index,
            p: c.p.clone(),
            q: c.q.clone(),
            scaled_lo: iv.lo().to_f64(),
            scaled_hi: iv.hi().to_f64(),
        })
        .collect();
    let c0_lo = rows.iter().map(|r| r.scaled_lo).fold(f64::INFINITY, f64::min);
    let c0_hi = rows.iter().map(|r| r.scaled_hi).fold(f64::INFINITY, f64::min);
    if !(c0_lo > 0.0) {
        return Err(Error::Internal("c₀ failed to certify positive".into()));
    }
    Ok(BakerReport {
        a: params.a,
        b: params.b,
        beta,
        q_limit: q_limit.clone(),
        precision_bits: precision,
        rows,
        c0_lo,
        c0_hi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: &str) -> RealSpec {
        RealSpec::parse(s).unwrap()
    }

    fn golden_minus_one() -> RealSpec {
        spec(r#"{"cf": [0, 1], "period_from": 1}"#)
    }

    fn sqrt2_minus_one() -> RealSpec {
        spec(r#"{"cf": [0, 2], "period_from": 1}"#)
    }

    #[test]
    fn cf_expand_examples() {
        let q: Vec<i64> = cf_expand(&spec(r#"{"rational": "5/7"}"#))
            .unwrap()
            .iter()
            .map(|x| i64::try_from(x).unwrap())
            .collect();
        assert_eq!(q, [0, 1, 2, 2]);
        let q: Vec<i64> = cf_expand(&spec(r#"{"rational": "3"}"#))
            .unwrap()
            .iter()
            .map(|x| i64::try_from(x).unwrap())
            .collect();
        assert_eq!(q, [3]);
        let q: Vec<i64> = cf_expand(&spec(r#"{"rational": "1/2"}"#))
            .unwrap()
            .iter()
            .map(|x| i64::try_from(x).unwrap())
            .collect();
        assert_eq!(q, [0, 2]);
        assert!(matches!(cf_expand(&golden_minus_one()), Err(Error::Precondition(_))));
    }

    #[test]
    fn convergents_verified() {
        let cs = convergents(&golden_minus_one(), &13u32.into()).unwrap();
        let tail: Vec<(i64, u64)> = cs
            .iter()
            .rev()
            .take(2)
            .rev()
            .map(|c| (i64::try_from(&c.p).unwrap(), u64::try_from(&c.q).unwrap()))
            .collect();
        assert_eq!(tail, [(5, 8), (8, 13)]);

        let cs = convergents(&spec(r#"{"rational": "5/7"}"#), &7u32.into()).unwrap();
        let all: Vec<(i64, u64)> = cs
            .iter()
            .map(|c| (i64::try_from(&c.p).unwrap(), u64::try_from(&c.q).unwrap()))
            .collect();
        assert_eq!(all, [(0, 1), (1, 1), (2, 3), (5, 7)]);

        let cs = convergents(&spec(r#"{"rational": "1/3"}"#), &2u32.into()).unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].q, BigUint::one());
        assert!(cs[0].p.is_zero());
    }

    #[test]
    fn dirichlet_examples() {
        let (a, q) = dirichlet_approx(&golden_minus_one(), &13u32.into()).unwrap();
        assert_eq!((i64::try_from(&a).unwrap(), u64::try_from(&q).unwrap()), (8, 13));

        let (a, q) = dirichlet_approx(&spec(r#"{"rational": "1/3"}"#), &10u32.into()).unwrap();
        assert_eq!((i64::try_from(&a).unwrap(), u64::try_from(&q).unwrap()), (1, 3));

        let (a, q) = dirichlet_approx(&spec(r#"{"rational": "5/7"}"#), &2u32.into()).unwrap();
        assert_eq!((i64::try_from(&a).unwrap(), u64::try_from(&q).unwrap()), (1, 1));
    }

    #[test]
    fn psi_badness_scan() {
        // golden − 1 is badly approximable with constant ≈ 1/√5 ≈ 0.447 > 0.2
        let w = psi_bad_witness(&golden_minus_one(), &PsiSpec { k1: 0.2, k2: 1.0 }, &100u32.into())
            .unwrap();
        match w {
            PsiWitness::Pair { a, q, psi_floor } => {
                assert_eq!(u64::try_from(&q).unwrap(), 89);
                assert_eq!(i64::try_from(&a).unwrap(), 55);
                assert!((psi_floor - 20.0).abs() < 1e-9);
            }
            other => panic!("expected pair, got {other:?}"),
        }

        // a huge early partial quotient forces ‖1·x‖ ≈ 10⁻⁶ < 1/3
        let narrow = spec(r#"{"cf": [0, 1, 1000000]}"#);
        let w = psi_bad_witness(&narrow, &PsiSpec { k1: 1.0 / 3.0, k2: 1.0 }, &10u32.into())
            .unwrap();
        match w {
            PsiWitness::Violation { q, norm_err, psi_q } => {
                assert_eq!(u64::try_from(&q).unwrap(), 1);
                assert!(norm_err < 1.1e-6 && psi_q > 0.3);
            }
            other => panic!("expected violation, got {other:?}"),
        }

        // √2 − 1: ‖q(√2−1)‖ ≥ ~0.3536/q > 0.3/q
        let w = psi_bad_witness(&sqrt2_minus_one(), &PsiSpec { k1: 0.3, k2: 1.0 }, &1000u32.into())
            .unwrap();
        match w {
            PsiWitness::Pair { q, .. } => assert_eq!(u64::try_from(&q).unwrap(), 985),
            other => panic!("expected pair, got {other:?}"),
        }
    }

    #[test]
    fn baker_probe_tabulates() {
        let p = SUnitParams::new(2, 3).unwrap();
        let rep = baker_probe(&p, 5.116201, &20u32.into(), 128).unwrap();
        let qs: Vec<u64> = rep.rows.iter().map(|r| u64::try_from(&r.q).unwrap()).collect();
        assert_eq!(qs, [1, 1, 2, 3, 8, 19]);
        let last = rep.rows.last().unwrap();
        assert_eq!(i64::try_from(&last.p).unwrap(), 12);
        // c₀ attained at the 1/1 row: |log 2/log 3 − 1|
        assert!(rep.c0_lo > 0.0);
        assert!((rep.c0_lo - 0.369_070_246_428_542_56).abs() < 1e-10);
        assert!(rep.c0_hi - rep.c0_lo < 1e-11);

        assert!(matches!(
            baker_probe(&SUnitParams { a: 2, b: 4 }, 5.116201, &20u32.into(), 128),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn psi_spec_validation() {
        assert!(PsiSpec { k1: 0.0, k2: 1.0 }.validate().is_err());
        assert!(PsiSpec { k1: 1.0, k2: 0.5 }.validate().is_err());
        assert!(PsiSpec { k1: 0.25, k2: 2.0 }.validate().is_ok());
    }
}
