//! Exact arithmetic on ℚ/ℤ: the orbit points {qα}, dispersion of a finite
//! set on the circle, and the minimal positive gap used by pigeonhole.
//!
//! Every angle is a reduced fraction num/den with 0 ≤ num < den, and every
//! dispersion or gap is an exact rational — no floating point can enter a
//! density decision. Dispersion in the interval metric is
//! max(p₁, 1 − p_k, max_i (p_{i+1} − p_i)/2); in the circular metric it is
//! half the largest circular gap.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::sunits::{enumerate_sigma, SUnitParams};

/// A point of ℚ/ℤ as a reduced fraction in [0, 1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Angle {
    num: BigUint,
    den: BigUint,
}

impl Angle {
    /// Canonicalizes: reduces num mod den, then divides out the gcd.
    pub fn new(num: BigUint, den: BigUint) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidParams("angle denominator must be ≥ 1".into()));
        }
        let num = num % &den;
        let g = num.gcd(&den);
        Ok(Angle { num: &num / &g, den: den / g })
    }

    pub fn zero() -> Self {
        Angle { num: BigUint::zero(), den: BigUint::one() }
    }

    pub fn num(&self) -> &BigUint {
        &self.num
    }

    pub fn den(&self) -> &BigUint {
        &self.den
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.num.clone()),
            BigInt::from(self.den.clone()),
        )
    }

    /// A rational r with 0 ≤ r < 1, already reduced.
    pub fn from_unit_rational(r: &BigRational) -> Result<Self> {
        if r < &BigRational::zero() || r >= &BigRational::one() {
            return Err(Error::InvalidParams(format!("{r} outside [0, 1)")));
        }
        Ok(Angle {
            num: r.numer().magnitude().clone(),
            den: r.denom().magnitude().clone(),
        })
    }
}

impl Ord for Angle {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl PartialOrd for Angle {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Angle {
    type Err = Error;

    /// "num/den" (or a bare integer, which is 0 mod 1).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num = BigUint::from_str(n)
            .map_err(|_| Error::Parse(format!("bad angle numerator {n:?}")))?;
        let den = BigUint::from_str(d)
            .map_err(|_| Error::Parse(format!("bad angle denominator {d:?}")))?;
        Angle::new(num, den)
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A finite subset of the circle: strictly ascending, deduplicated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSet(Vec<Angle>);

impl PointSet {
    pub fn from_angles(mut angles: Vec<Angle>) -> Self {
        angles.sort();
        angles.dedup();
        PointSet(angles)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Angle] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Angle> {
        self.0.iter()
    }
}

/// Which covering notion dispersion uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    /// Covering [0, 1] with endpoints as hard walls.
    Interval,
    /// Covering ℝ/ℤ.
    Circular,
}

/// {q·α}: the reduced form of (q·num mod den)/den.
pub fn frac_mul(q: &BigUint, alpha: &Angle) -> Angle {
    let num = (q * &alpha.num) % &alpha.den;
    let g = num.gcd(&alpha.den);
    Angle { num: &num / &g, den: &alpha.den / &g }
}

/// { {qα} : q ∈ Σ(M) }, deduplicated and sorted.
pub fn sigma_alpha(params: &SUnitParams, m: &BigUint, alpha: &Angle) -> Result<PointSet> {
    let list = enumerate_sigma(params, m)?;
    Ok(PointSet::from_angles(
        list.iter().map(|s| frac_mul(&s.value, alpha)).collect(),
    ))
}

/// Least δ such that every z in \[0,1\] (interval) or ℝ/ℤ (circular) lies
/// within δ of the set. Exact.
pub fn dispersion(points: &PointSet, metric: Metric) -> Result<BigRational> {
    if points.is_empty() {
        return Err(Error::Precondition("dispersion of an empty set".into()));
    }
    let p: Vec<BigRational> = points.iter().map(Angle::to_rational).collect();
    let last = p.len() - 1;
    let two = BigRational::from(BigInt::from(2));
    let max_half_internal = p
        .windows(2)
        .map(|w| (&w[1] - &w[0]) / &two)
        .max()
        .unwrap_or_else(BigRational::zero);
    Ok(match metric {
        Metric::Interval => {
            let left = p[0].clone();
            let right = BigRational::one() - &p[last];
            max_half_internal.max(left).max(right)
        }
        Metric::Circular => {
            let wrap = (BigRational::one() - &p[last] + &p[0]) / &two;
            max_half_internal.max(wrap)
        }
    })
}

/// Distance from z to the nearest point in the interval metric.
pub fn nearest_distance(points: &PointSet, z: &BigRational) -> Result<BigRational> {
    if points.is_empty() {
        return Err(Error::Precondition("distance to an empty set".into()));
    }
    points
        .iter()
        .map(|a| {
            let d = z - a.to_rational();
            if d < BigRational::zero() {
                -d
            } else {
                d
            }
        })
        .min()
        .ok_or_else(|| Error::Internal("nonempty set had no minimum".into()))
}

/// The adjacent pair (η′, η″), η′ > η″, of minimal positive difference;
/// ties take the smallest η″. Returns (eta_hi, eta_lo, gap).
pub fn min_positive_gap(points: &PointSet) -> Result<(Angle, Angle, BigRational)> {
    if points.len() < 2 {
        return Err(Error::Precondition(format!(
            "need ≥ 2 points for a gap, got {}",
            points.len()
        )));
    }
    let mut best: Option<(usize, BigRational)> = None;
    for (i, w) in points.as_slice().windows(2).enumerate() {
        let d = w[1].to_rational() - w[0].to_rational();
        // strict < keeps the first (smallest η″) on ties
        if best.as_ref().is_none_or(|(_, bd)| d < *bd) {
            best = Some((i, d));
        }
    }
    let (i, gap) = best.expect("≥ 1 adjacent pair");
    Ok((points.as_slice()[i + 1].clone(), points.as_slice()[i].clone(), gap))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ang(s: &str) -> Angle {
        s.parse().unwrap()
    }

    fn set(ss: &[&str]) -> PointSet {
        PointSet::from_angles(ss.iter().map(|s| ang(s)).collect())
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn angle_canonical_form() {
        assert_eq!(ang("60/7"), ang("4/7")); // reduced mod 1
        assert_eq!(ang("6/8"), ang("3/4"));
        assert_eq!(ang("7"), Angle::zero());
        assert_eq!(ang("3/8").to_string(), "3/8");
        assert!(Angle::new(1u32.into(), 0u32.into()).is_err());
        assert!("1/0".parse::<Angle>().is_err());
        assert!("x/2".parse::<Angle>().is_err());
    }

    #[test]
    fn frac_mul_examples() {
        assert_eq!(frac_mul(&12u32.into(), &ang("5/7")), ang("4/7"));
        assert_eq!(frac_mul(&7u32.into(), &ang("5/7")), Angle::zero());
        assert_eq!(frac_mul(&1u32.into(), &ang("3/8")), ang("3/8"));
        // result reduces: 2·3/8 = 6/8 = 3/4
        assert_eq!(frac_mul(&2u32.into(), &ang("3/8")), ang("3/4"));
    }

    #[test]
    fn sigma_alpha_examples() {
        let p = SUnitParams::new(2, 3).unwrap();
        let s = sigma_alpha(&p, &4u32.into(), &ang("1/101")).unwrap();
        assert_eq!(s, set(&["1/101", "2/101", "3/101", "4/101"]));

        let s10 = sigma_alpha(&p, &10u32.into(), &ang("1/101")).unwrap();
        let want: Vec<Angle> = [1u32, 2, 3, 4, 6, 8, 9]
            .iter()
            .map(|k| Angle::new((*k).into(), 101u32.into()).unwrap())
            .collect();
        assert_eq!(s10.as_slice(), &want[..]);

        // collisions collapse
        let half = sigma_alpha(&p, &10u32.into(), &ang("1/2")).unwrap();
        assert_eq!(half, set(&["0", "1/2"]));
    }

    #[test]
    fn dispersion_examples() {
        let s = set(&["1/4", "3/4"]);
        assert_eq!(dispersion(&s, Metric::Interval).unwrap(), rat(1, 4));

        let single = set(&["0"]);
        assert_eq!(dispersion(&single, Metric::Interval).unwrap(), rat(1, 1));
        assert_eq!(dispersion(&single, Metric::Circular).unwrap(), rat(1, 2));

        let halves = set(&["0", "1/2"]);
        assert_eq!(dispersion(&halves, Metric::Interval).unwrap(), rat(1, 2));
        assert_eq!(dispersion(&halves, Metric::Circular).unwrap(), rat(1, 4));

        assert!(matches!(
            dispersion(&PointSet::from_angles(vec![]), Metric::Interval),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn dispersion_covers_every_point() {
        let s = set(&["1/101", "2/101", "3/101", "4/101", "6/101", "8/101", "9/101"]);
        let d = dispersion(&s, Metric::Interval).unwrap();
        assert_eq!(d, rat(92, 101)); // dominated by the right wall 1 − 9/101
        for z in [rat(0, 1), rat(1, 1), rat(1, 2), rat(95, 101), rat(3, 7)] {
            assert!(nearest_distance(&s, &z).unwrap() <= d);
        }
    }

    #[test]
    fn min_gap_and_tie_break() {
        let (hi, lo, g) = min_positive_gap(&set(&["1/101", "2/101", "50/101"])).unwrap();
        assert_eq!((hi, lo, g), (ang("2/101"), ang("1/101"), rat(1, 101)));

        let (hi, lo, g) = min_positive_gap(&set(&["1/3", "2/3"])).unwrap();
        assert_eq!((hi, lo, g), (ang("2/3"), ang("1/3"), rat(1, 3)));

        // Σ_α(10), α = 1/101: diffs 1,1,1,2,2,1 — tie broken at the leftmost pair.
        let p = SUnitParams::new(2, 3).unwrap();
        let s10 = sigma_alpha(&p, &10u32.into(), &ang("1/101")).unwrap();
        let (hi, lo, g) = min_positive_gap(&s10).unwrap();
        assert_eq!((hi, lo, g), (ang("2/101"), ang("1/101"), rat(1, 101)));

        assert!(matches!(
            min_positive_gap(&set(&["1/2"])),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn frac_mul_composes() {
        // {q₁q₂α} = {q₁{q₂α}}
        let alpha = ang("355/1130");
        for (q1, q2) in [(7u32, 12u32), (101, 3), (2, 2), (1, 999)] {
            let lhs = frac_mul(&(q1 * q2).into(), &alpha);
            let rhs = frac_mul(&q1.into(), &frac_mul(&q2.into(), &alpha));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn pointset_dedups_and_sorts() {
        let s = PointSet::from_angles(vec![ang("3/4"), ang("1/2"), ang("6/8"), ang("0")]);
        assert_eq!(s, set(&["0", "1/2", "3/4"]));
        // serde round-trip as num/den strings
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"["0/1","1/2","3/4"]"#);
        assert_eq!(serde_json::from_str::<PointSet>(&json).unwrap(), s);
    }
}
