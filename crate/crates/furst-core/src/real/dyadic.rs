//! Dyadic big-floats `mant · 2^exp` with exact ring operations and directed
//! rounding. These are the endpoints of [`super::interval::RInterval`]; every
//! `f64` entering the crate is converted here *exactly* (every finite `f64`
//! is a dyadic rational), so no input is ever silently perturbed.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

/// Rounding direction for operations that drop bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    /// Toward −∞ (lower endpoint).
    Down,
    /// Toward +∞ (upper endpoint).
    Up,
}

/// `mant · 2^exp`, normalized so `mant` is odd or zero (zero has `exp = 0`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic { mant: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { mant: BigInt::one(), exp: 0 }
    }

    pub fn new(mant: BigInt, exp: i64) -> Self {
        Dyadic { mant, exp }.normalize()
    }

    fn normalize(mut self) -> Self {
        if self.mant.is_zero() {
            self.exp = 0;
            return self;
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mant >>= tz;
            self.exp += tz as i64;
        }
        self
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Dyadic::new(n, 0)
    }

    pub fn from_u64(n: u64) -> Self {
        Dyadic::new(BigInt::from(n), 0)
    }

    /// Exact conversion; every finite `f64` is a dyadic rational.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Dyadic::zero());
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { Sign::Minus } else { Sign::Plus };
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, exp) = if biased == 0 {
            (frac, -1074) // subnormal
        } else {
            (frac | (1u64 << 52), biased - 1075)
        };
        Some(Dyadic::new(BigInt::from_biguint(sign, BigUint::from(mant)), exp))
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn mant_bits(&self) -> u64 {
        self.mant.bits()
    }

    pub fn neg(&self) -> Self {
        Dyadic { mant: -&self.mant, exp: self.exp }
    }

    pub fn abs(&self) -> Self {
        Dyadic { mant: self.mant.abs(), exp: self.exp }
    }

    pub fn signum(&self) -> i8 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// Exact addition (no rounding; mantissas grow as needed).
    pub fn add(&self, other: &Dyadic) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << u64::try_from(self.exp - e).expect("exponent spread");
        let b = &other.mant << u64::try_from(other.exp - e).expect("exponent spread");
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, other: &Dyadic) -> Self {
        self.add(&other.neg())
    }

    /// Exact multiplication.
    pub fn mul(&self, other: &Dyadic) -> Self {
        Dyadic::new(&self.mant * &other.mant, self.exp + other.exp)
    }

    /// Exact multiplication by `2^k`.
    pub fn shl(&self, k: i64) -> Self {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic { mant: self.mant.clone(), exp: self.exp + k }
    }

    /// Keep at most `prec` mantissa bits, rounding in direction `dir`.
    pub fn round(&self, prec: u32, dir: Round) -> Self {
        let bits = self.mant.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let drop = bits - prec as u64;
        let m = match dir {
            // BigInt shr is an arithmetic shift: floor division by 2^drop.
            Round::Down => &self.mant >> drop,
            Round::Up => -((-&self.mant) >> drop),
        };
        Dyadic::new(m, self.exp + drop as i64)
    }

    /// `self / other` to `prec` significant bits, rounded in direction `dir`.
    /// `other` must be nonzero.
    pub fn div(&self, other: &Dyadic, prec: u32, dir: Round) -> Self {
        assert!(!other.is_zero(), "division by zero dyadic");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let scale = prec as i64 + 2 + other.mant.bits() as i64 - self.mant.bits() as i64;
        let (num, shift) = if scale >= 0 {
            (&self.mant << scale as u64, scale)
        } else {
            (self.mant.clone(), 0)
        };
        let q = match dir {
            Round::Down => num.div_floor(&other.mant),
            Round::Up => num.div_ceil(&other.mant),
        };
        Dyadic::new(q, self.exp - other.exp - shift)
    }

    /// Exact value as a rational.
    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from(&self.mant << self.exp as u64)
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    /// Nearest-ish `f64`, for display only (saturates to ±∞ out of range).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        // Take the top 64 bits so the conversion never overflows BigInt→f64.
        let bits = self.mant.bits();
        let (top, e) = if bits > 64 {
            ((&self.mant >> (bits - 64)).to_f64().unwrap_or(f64::NAN), self.exp + (bits - 64) as i64)
        } else {
            (self.mant.to_f64().unwrap_or(f64::NAN), self.exp)
        };
        if e > 2000 {
            return if top > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
        }
        if e < -2000 {
            return if top > 0.0 { 0.0 } else { -0.0 };
        }
        // Split the scale so neither factor over/underflows prematurely.
        let h = e.clamp(-900, 900);
        top * 2f64.powi(h as i32) * 2f64.powi((e - h) as i32)
    }

    /// Floor to an integer.
    pub fn floor_int(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            &self.mant >> (-self.exp) as u64
        }
    }

    /// Exact comparison.
    pub fn cmp(&self, other: &Dyadic) -> Ordering {
        match (self.signum(), other.signum()) {
            (a, b) if a != b => a.cmp(&b),
            (0, 0) => Ordering::Equal,
            _ => {
                let e = self.exp.min(other.exp);
                let a = &self.mant << u64::try_from(self.exp - e).expect("exponent spread");
                let b = &other.mant << u64::try_from(other.exp - e).expect("exponent spread");
                a.cmp(&b)
            }
        }
    }

    /// Exact comparison against a rational.
    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        // mant·2^exp vs p/q  ⇔  mant·2^exp·q vs p (q > 0 after reduction).
        let q = r.denom();
        debug_assert!(q.is_positive());
        let lhs = &self.mant * q;
        let (lhs, rhs) = if self.exp >= 0 {
            (lhs << self.exp as u64, r.numer().clone())
        } else {
            (lhs, r.numer() << (-self.exp) as u64)
        };
        lhs.cmp(&rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(x: f64) -> Dyadic {
        Dyadic::from_f64(x).unwrap()
    }

    #[test]
    fn f64_roundtrip_is_exact() {
        for x in [0.0, 1.0, -1.5, 0.1, 1e-300, 12345.6789, f64::MIN_POSITIVE] {
            let r = d(x).to_rational();
            // 0.1 as f64 is NOT 1/10; check we captured the exact dyadic.
            let back = d(x).to_f64();
            assert_eq!(back, x);
            assert_eq!(Dyadic::from_f64(back).unwrap().to_rational(), r);
        }
        assert!(Dyadic::from_f64(f64::INFINITY).is_none());
    }

    #[test]
    fn point_one_is_not_one_tenth() {
        let tenth = BigRational::new(BigInt::from(1), BigInt::from(10));
        assert_ne!(d(0.1).to_rational(), tenth);
        assert_eq!(d(0.1).cmp_rational(&tenth), Ordering::Greater); // 0.1f64 = 0.1000…000055…
    }

    #[test]
    fn directed_rounding_brackets() {
        let x = d(1.0).div(&d(3.0), 16, Round::Down);
        let y = d(1.0).div(&d(3.0), 16, Round::Up);
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        assert_eq!(x.cmp_rational(&third), Ordering::Less);
        assert_eq!(y.cmp_rational(&third), Ordering::Greater);
        // Bracket is one ulp wide at 16 bits.
        let width = y.sub(&x);
        assert!(width.cmp(&d(2.0f64.powi(-16))) != Ordering::Greater);
    }

    #[test]
    fn round_direction() {
        // 21 = 0b10101; at 3 significant bits the neighbours are 20 = 101·2^2 and 24 = 110·2^2
        // (22 = 1011·2 needs four bits).
        let x = Dyadic::new(BigInt::from(0b10101), 0);
        assert_eq!(x.round(3, Round::Down).to_rational(), BigRational::from(BigInt::from(20)));
        assert_eq!(x.round(3, Round::Up).to_rational(), BigRational::from(BigInt::from(24)));
        let neg = x.neg();
        assert_eq!(neg.round(3, Round::Down).to_rational(), BigRational::from(BigInt::from(-24)));
        assert_eq!(neg.round(3, Round::Up).to_rational(), BigRational::from(BigInt::from(-20)));
    }

    #[test]
    fn floor_int() {
        assert_eq!(d(2.75).floor_int(), BigInt::from(2));
        assert_eq!(d(-2.75).floor_int(), BigInt::from(-3));
        assert_eq!(d(8.0).floor_int(), BigInt::from(8));
    }
}
