//! Real numbers as *specifications* that can be interrogated to any needed
//! precision: exact rationals, (eventually periodic) continued fractions, and
//! decimal strings of stated accuracy. Partial quotients of a non-rational
//! source are extracted through the Möbius form of the continued-fraction
//! tail evaluated over a certified enclosure — a quotient is emitted only
//! when both interval endpoints agree on its floor, so a wrong quotient is
//! impossible, and insufficient precision surfaces as an error instead.

pub mod dyadic;
pub mod interval;

pub use dyadic::{Dyadic, Round};
pub use interval::{certify, exp_interval, floor_pow, ln2, ln_rational, ln_uint, pow_uint, RInterval, PRECISIONS};

use crate::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::str::FromStr;

/// How a real number is described. `Rational` and finite `Cf` are exact;
/// `Cf` with a period is exact too (quadratic irrational); `Decimal` carries
/// its own precision and refuses requests beyond it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RealSpec {
    Rational {
        #[serde(with = "crate::util::dec_rat")]
        rational: BigRational,
    },
    Cf {
        cf: Vec<i64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        period_from: Option<usize>,
    },
    Decimal {
        decimal: String,
        bits: u32,
    },
}

impl RealSpec {
    pub fn rational(r: BigRational) -> Self {
        RealSpec::Rational { rational: r }
    }

    /// Parse either a bare rational (`"5/7"`, `"-2"`) or the JSON forms
    /// `{"rational":"5/7"}`, `{"cf":[0,1],"period_from":1}`,
    /// `{"decimal":"0.6309...","bits":128}`.
    pub fn parse(s: &str) -> Result<RealSpec> {
        let s = s.trim();
        let spec = if s.starts_with('{') {
            serde_json::from_str::<RealSpec>(s).map_err(|e| Error::Parse(format!("real spec: {e}")))?
        } else {
            RealSpec::Rational {
                rational: crate::util::parse_rational(s).map_err(Error::Parse)?,
            }
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            RealSpec::Rational { .. } => Ok(()),
            RealSpec::Cf { cf, period_from } => {
                if cf.is_empty() {
                    return Err(Error::InvalidParams("empty continued fraction".into()));
                }
                if cf.iter().skip(1).any(|&a| a < 1) {
                    return Err(Error::InvalidParams(
                        "continued fraction quotients after the first must be ≥ 1".into(),
                    ));
                }
                if let Some(p) = period_from {
                    if *p == 0 || *p >= cf.len() {
                        return Err(Error::InvalidParams(format!(
                            "period_from {p} outside 1..{}",
                            cf.len()
                        )));
                    }
                }
                Ok(())
            }
            RealSpec::Decimal { decimal, bits } => {
                parse_decimal(decimal)?;
                if *bits < 64 {
                    return Err(Error::InvalidParams(format!(
                        "decimal spec claims only {bits} bits; at least 64 required"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Exact rational value, when the spec is exact and finite.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self {
            RealSpec::Rational { rational } => Some(rational.clone()),
            RealSpec::Cf { cf, period_from: None } => {
                let mut v = BigRational::from(BigInt::from(*cf.last().unwrap()));
                for &a in cf.iter().rev().skip(1) {
                    v = BigRational::from(BigInt::from(a)) + v.recip();
                }
                Some(v)
            }
            _ => None,
        }
    }

    /// The `k`-th partial quotient, if the spec determines one (rationals are
    /// handled by exact Euclid elsewhere; this serves `Cf` specs).
    fn cf_term(&self, k: usize) -> Option<i64> {
        match self {
            RealSpec::Cf { cf, period_from } => {
                if k < cf.len() {
                    Some(cf[k])
                } else if let Some(p) = period_from {
                    let cycle = cf.len() - p;
                    Some(cf[p + (k - p) % cycle])
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Certified enclosure at roughly `bits` of precision.
    pub fn enclosure(&self, bits: u32) -> Result<RInterval> {
        match self {
            RealSpec::Rational { rational } => Ok(RInterval::from_rational(rational, bits + 8)),
            RealSpec::Cf { .. } => {
                if let Some(r) = self.as_rational() {
                    return Ok(RInterval::from_rational(&r, bits + 8));
                }
                // Consecutive convergents bracket the value; widen until the
                // bracket is below 2^-bits.
                let (mut p2, mut q2) = (BigInt::zero(), BigInt::one()); // (p_{-2}, q_{-2})
                let (mut p1, mut q1) = (BigInt::one(), BigInt::zero()); // (p_{-1}, q_{-1})
                let target = BigRational::new(BigInt::one(), BigInt::one() << bits as u64);
                for k in 0.. {
                    let a = BigInt::from(self.cf_term(k).expect("periodic cf is infinite"));
                    let p = &a * &p1 + &p2;
                    let q = &a * &q1 + &q2;
                    if k >= 1 {
                        // |x − p/q| < 1/(q·q_prev)… the bracket [p/q, p1/q1] works directly.
                        let lo_r = BigRational::new(p.clone(), q.clone());
                        let hi_r = BigRational::new(p1.clone(), q1.clone());
                        let (lo_r, hi_r) = if lo_r <= hi_r { (lo_r, hi_r) } else { (hi_r, lo_r) };
                        if &hi_r - &lo_r <= target {
                            let lo = RInterval::from_rational(&lo_r, bits + 8);
                            let hi = RInterval::from_rational(&hi_r, bits + 8);
                            return Ok(RInterval::new(lo.lo().clone(), hi.hi().clone()));
                        }
                    }
                    (p2, q2) = (p1, q1);
                    (p1, q1) = (p, q);
                }
                unreachable!()
            }
            RealSpec::Decimal { decimal, bits: avail } => {
                let (value, scale) = parse_decimal(decimal)?;
                // The string is trusted to its last printed digit ±1.
                let radius = BigRational::new(BigInt::one(), BigInt::from(10u32).pow(scale));
                let intrinsic_bits = (scale as f64 * std::f64::consts::LOG2_10).floor() as u32;
                let usable = (*avail).min(intrinsic_bits.max(1));
                if bits > usable {
                    return Err(Error::Precision {
                        bits: usable,
                        context: format!(
                            "decimal spec provides ~{usable} bits but {bits} were requested"
                        ),
                    });
                }
                let lo = RInterval::from_rational(&(&value - &radius), bits + 8);
                let hi = RInterval::from_rational(&(&value + &radius), bits + 8);
                Ok(RInterval::new(lo.lo().clone(), hi.hi().clone()))
            }
        }
    }

    /// Highest precision this spec can certify, if bounded.
    pub fn bits_cap(&self) -> Option<u32> {
        match self {
            RealSpec::Decimal { decimal, bits } => {
                let scale = decimal.split('.').nth(1).map_or(0, |f| f.len()) as u32;
                let intrinsic = (scale as f64 * std::f64::consts::LOG2_10).floor() as u32;
                Some((*bits).min(intrinsic.max(1)))
            }
            _ => None,
        }
    }
}

/// `"-12.345"` → (−12345/1000, 3).
fn parse_decimal(s: &str) -> Result<(BigRational, u32)> {
    let s = s.trim();
    let (int_part, frac_part) = match s.split_once('.') {
        Some((i, f)) => (i, f),
        None => (s, ""),
    };
    if frac_part.is_empty() {
        return Err(Error::InvalidParams(format!(
            "decimal spec {s:?} has no fractional digits; use a rational spec instead"
        )));
    }
    let joined = format!("{int_part}{frac_part}");
    let digits = BigInt::from_str(&joined)
        .map_err(|e| Error::Parse(format!("decimal {s:?}: {e}")))?;
    let scale = frac_part.len() as u32;
    Ok((
        BigRational::new(digits, BigInt::from(10u32).pow(scale)),
        scale,
    ))
}

/// A source of certified enclosures for partial-quotient extraction.
pub trait RealSource {
    fn enclosure(&self, bits: u32) -> Result<RInterval>;
    /// Exact value, when there is one (switches the walk to exact Euclid).
    fn as_rational(&self) -> Option<BigRational>;
    fn describe(&self) -> String;
}

impl RealSource for RealSpec {
    fn enclosure(&self, bits: u32) -> Result<RInterval> {
        RealSpec::enclosure(self, bits)
    }

    fn as_rational(&self) -> Option<BigRational> {
        RealSpec::as_rational(self)
    }

    fn describe(&self) -> String {
        match self {
            RealSpec::Rational { rational } => format!("{rational}"),
            RealSpec::Cf { cf, period_from } => format!("cf {cf:?} period_from {period_from:?}"),
            RealSpec::Decimal { decimal, .. } => format!("decimal {decimal}"),
        }
    }
}

/// `ln a / ln b` for integer `a, b ≥ 2` — the irrational probed by the
/// Baker-style lower-bound experiment.
pub struct LogRatio {
    pub a: u64,
    pub b: u64,
}

impl RealSource for LogRatio {
    fn enclosure(&self, bits: u32) -> Result<RInterval> {
        let p = bits + 16;
        let la = ln_uint(&BigUint::from(self.a), p)?;
        let lb = ln_uint(&BigUint::from(self.b), p)?;
        // ln a / ln b with directed endpoint division; both logs are positive.
        let lo = la.lo().div(lb.hi(), p, Round::Down);
        let hi = la.hi().div(lb.lo(), p, Round::Up);
        Ok(RInterval::new(lo, hi))
    }

    fn as_rational(&self) -> Option<BigRational> {
        None // log_b a is irrational for multiplicatively independent a, b
    }

    fn describe(&self) -> String {
        format!("ln {} / ln {}", self.a, self.b)
    }
}

/// One convergent `p_k / q_k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Convergent {
    pub index: usize,
    #[serde(serialize_with = "crate::util::dec_int::serialize")]
    pub p: BigInt,
    #[serde(with = "crate::util::dec_uint")]
    pub q: BigUint,
}

/// Canonical continued fraction of an exact rational (last quotient ≥ 2
/// except for integers, which is what plain Euclid produces).
pub fn cf_of_rational(x: &BigRational) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut num = x.numer().clone();
    let mut den = x.denom().clone();
    loop {
        let (q, r) = num.div_mod_floor(&den);
        out.push(q);
        if r.is_zero() {
            return out;
        }
        num = den;
        den = r;
    }
}

/// Partial quotients of `source`, as many as needed to push the convergent
/// denominator beyond `q_limit` (or the exact full expansion for rationals,
/// whichever ends sooner). Also returns one convergent *past* the limit when
/// the expansion continues, which two-sided error bounds need.
fn quotients_to_q_limit(source: &dyn RealSource, q_limit: &BigUint) -> Result<Vec<BigInt>> {
    if let Some(r) = source.as_rational() {
        let mut terms = Vec::new();
        // q_{-2} = 1, q_{-1} = 0, so q₀ = a₀·0 + 1 = 1.
        let mut q_prev = BigInt::one();
        let mut q_cur = BigInt::zero();
        for a in cf_of_rational(&r) {
            let q_next = &a * &q_cur + &q_prev;
            terms.push(a);
            q_prev = std::mem::replace(&mut q_cur, q_next);
            if q_cur.magnitude() > q_limit {
                break;
            }
        }
        return Ok(terms);
    }
    // Interval walk: emit a quotient only when both endpoints of the Möbius
    // tail agree on its floor.
    certify(&format!("partial quotients of {}", source.describe()), |bits| {
        let x = source.enclosure(bits)?;
        let xl = x.lo().to_rational();
        let xh = x.hi().to_rational();
        let mut terms: Vec<BigInt> = Vec::new();
        // p_{-2}=0, q_{-2}=1; p_{-1}=1, q_{-1}=0.
        let (mut p2, mut q2) = (BigInt::zero(), BigInt::one());
        let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
        let rat = |i: &BigInt| BigRational::from(i.clone());
        loop {
            // tail t_k = (p_{k-2} − q_{k-2}·x)/(q_{k-1}·x − p_{k-1})
            let den_at = |x: &BigRational| rat(&q1) * x - rat(&p1);
            let eval = |x: &BigRational| -> Option<BigRational> {
                let den = den_at(x);
                if den.is_zero() {
                    return None;
                }
                Some((rat(&p2) - rat(&q2) * x) / den)
            };
            let (tl, th) = match (eval(&xl), eval(&xh)) {
                (Some(a), Some(b)) => (a, b),
                _ => return Ok(None),
            };
            let (tl, th) = if tl <= th { (tl, th) } else { (th, tl) };
            // Pole inside the enclosure shows up as a sign flip of the denominator.
            if !q1.is_zero() && den_at(&xl).signum() != den_at(&xh).signum() {
                return Ok(None);
            }
            let fl = tl.floor().to_integer();
            let fh = th.floor().to_integer();
            if fl != fh {
                return Ok(None);
            }
            if !terms.is_empty() && fl < BigInt::one() {
                // The true tail is > 1; an apparent quotient < 1 means the
                // enclosure is too loose to trust.
                return Ok(None);
            }
            let p = &fl * &p1 + &p2;
            let q = &fl * &q1 + &q2;
            terms.push(fl);
            let done = q.magnitude() > q_limit;
            (p2, q2) = (p1, q1);
            (p1, q1) = (p, q);
            if done {
                return Ok(Some(terms));
            }
        }
    })
}

/// All convergents of `source` with `q ≤ q_limit`, plus (second return) the
/// first convergent beyond the limit when the expansion continues that far.
pub fn convergents_with_next(
    source: &dyn RealSource,
    q_limit: &BigUint,
) -> Result<(Vec<Convergent>, Option<Convergent>)> {
    if q_limit.is_zero() {
        return Err(Error::InvalidParams("q_limit must be ≥ 1".into()));
    }
    let terms = quotients_to_q_limit(source, q_limit)?;
    let mut within = Vec::new();
    let mut beyond = None;
    let (mut p2, mut q2) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    for (index, a) in terms.iter().enumerate() {
        let p = a * &p1 + &p2;
        let q = a * &q1 + &q2;
        let qm = q.magnitude().clone();
        if &qm <= q_limit {
            within.push(Convergent { index, p: p.clone(), q: qm });
        } else {
            beyond = Some(Convergent { index, p: p.clone(), q: qm });
            break;
        }
        (p2, q2) = (p1, q1);
        (p1, q1) = (p, q);
    }
    Ok((within, beyond))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cmp::Ordering;

    fn rat(s: &str) -> BigRational {
        crate::util::parse_rational(s).unwrap()
    }

    #[test]
    fn cf_of_five_sevenths() {
        let cf = cf_of_rational(&rat("5/7"));
        assert_eq!(cf, vec![BigInt::from(0), 1.into(), 2.into(), 2.into()]);
        // Canonical: last quotient ≥ 2.
    }

    #[test]
    fn cf_of_integers_and_negatives() {
        assert_eq!(cf_of_rational(&rat("3")), vec![BigInt::from(3)]);
        // Euclid with floor division: -5/7 = [-1; 2, 2] ... check identity instead = -1 + 1/(2+1/2) wait: -1 + 2/5? Recompute via evaluation below.
        let cf = cf_of_rational(&rat("-5/7"));
        let mut v = BigRational::from(cf.last().unwrap().clone());
        for a in cf.iter().rev().skip(1) {
            v = BigRational::from(a.clone()) + v.recip();
        }
        assert_eq!(v, rat("-5/7"));
        assert!(cf.iter().skip(1).all(|a| a >= &BigInt::one()));
    }

    #[test]
    fn convergents_of_rational() {
        let spec = RealSpec::rational(rat("5/7"));
        let (within, beyond) = convergents_with_next(&spec, &BigUint::from(7u32)).unwrap();
        let got: Vec<(String, String)> =
            within.iter().map(|c| (c.p.to_string(), c.q.to_string())).collect();
        assert_eq!(
            got,
            vec![
                ("0".into(), "1".into()),
                ("1".into(), "1".into()),
                ("2".into(), "3".into()),
                ("5".into(), "7".into())
            ]
        );
        assert!(beyond.is_none());
    }

    #[test]
    fn convergents_of_improper_rational() {
        // x > 1: numerators outrun denominators, so the cutoff must watch q,
        // not p. cf = [16,1,18,2,2,8,3,1,...], q: 1,1,19,39,97,815,2542,3357.
        let spec = RealSpec::rational(rat("984333/58078"));
        let (within, beyond) = convergents_with_next(&spec, &BigUint::from(3057u32)).unwrap();
        assert_eq!(within.last().unwrap().q, BigUint::from(2542u32));
        assert_eq!(beyond.unwrap().q, BigUint::from(3357u32));
    }

    #[test]
    fn golden_minus_one_convergents_are_fibonacci() {
        let spec = RealSpec::parse(r#"{"cf":[0,1],"period_from":1}"#).unwrap();
        let (within, beyond) = convergents_with_next(&spec, &BigUint::from(13u32)).unwrap();
        let qs: Vec<u32> = within.iter().map(|c| c.q.to_string().parse().unwrap()).collect();
        assert_eq!(qs, vec![1, 1, 2, 3, 5, 8, 13]);
        assert_eq!(beyond.unwrap().q, BigUint::from(21u32));
    }

    #[test]
    fn sqrt2_minus_one_enclosure() {
        // [0; 2, 2, 2, ...] = √2 − 1 = 0.41421356237309504880…
        let spec = RealSpec::parse(r#"{"cf":[0,2],"period_from":1}"#).unwrap();
        let e = spec.enclosure(128).unwrap();
        assert_eq!(e.cmp_rational(&rat("41421356237/100000000000")), Some(Ordering::Greater));
        assert_eq!(e.cmp_rational(&rat("41421356238/100000000000")), Some(Ordering::Less));
        assert!(e.width().to_f64() < 2.0f64.powi(-128));
    }

    #[test]
    fn log_ratio_quotients_match_reference() {
        // ln2/ln3 = [0; 1, 1, 1, 2, 2, 3, 1, 5, 2, 23, 2, 2, 1, 1, 55, ...]
        let src = LogRatio { a: 2, b: 3 };
        let (within, _) = convergents_with_next(&src, &BigUint::from(1_000_000u32)).unwrap();
        let terms: Vec<(String, String)> = within
            .iter()
            .map(|c| (c.p.to_string(), c.q.to_string()))
            .collect();
        assert_eq!(terms[0], ("0".to_string(), "1".to_string()));
        assert_eq!(terms[4], ("5".to_string(), "8".to_string()));
        assert_eq!(terms[5], ("12".to_string(), "19".to_string()));
        assert_eq!(terms[10], ("15601".to_string(), "24727".to_string()));
        assert_eq!(terms.last().unwrap(), &("190537".to_string(), "301994".to_string()));
    }

    #[test]
    fn decimal_spec_caps_precision() {
        let spec = RealSpec::parse(r#"{"decimal":"0.6309297535714574","bits":256}"#).unwrap();
        assert!(spec.enclosure(32).is_ok());
        let err = spec.enclosure(256).unwrap_err();
        assert!(matches!(err, Error::Precision { .. }));
    }

    #[test]
    fn spec_validation_rejects_junk() {
        assert!(RealSpec::parse(r#"{"cf":[]}"#).is_err());
        assert!(RealSpec::parse(r#"{"cf":[0,0]}"#).is_err());
        assert!(RealSpec::parse(r#"{"cf":[0,1],"period_from":5}"#).is_err());
        assert!(RealSpec::parse(r#"{"decimal":"0.5","bits":8}"#).is_err());
        assert!(RealSpec::parse("1/0").is_err());
    }

    #[test]
    fn finite_cf_is_exact() {
        let spec = RealSpec::parse(r#"{"cf":[0,1,2,2]}"#).unwrap();
        assert_eq!(spec.as_rational().unwrap(), rat("5/7"));
    }
}
