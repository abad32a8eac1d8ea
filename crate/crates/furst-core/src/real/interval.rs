//! Outward-rounded interval arithmetic over [`Dyadic`] endpoints, with `ln`
//! and `exp` enclosures whose series truncation is bounded explicitly. A
//! comparison against an interval either returns a decided `Ordering` or
//! `None` ("widen the precision and retry"); nothing here ever guesses.
//!
//! `ln` reduces its argument to `m·2^k` with `m ∈ (2/3, 4/3]` and evaluates
//! `ln m = 2·atanh((m−1)/(m+1))` with `|z| ≤ 1/5`; `ln 2 = 2·atanh(1/3)`.
//! `exp` reduces modulo `ln 2` to `|r| ≤ 3/4`. In both series the loop runs
//! until the current term is below `2^−(p+6)` and the remaining tail is
//! covered by a factor-4 widening, which dominates the true tail since the
//! terms shrink at least geometrically with ratio ≤ 3/4.

use super::dyadic::{Dyadic, Round};
use crate::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

/// Working precisions tried by [`certify`], in order.
pub const PRECISIONS: [u32; 8] = [64, 128, 256, 512, 1024, 2048, 4096, 8192];

/// A closed interval `[lo, hi]` of dyadic rationals, `lo ≤ hi`.
#[derive(Clone, Debug)]
pub struct RInterval {
    lo: Dyadic,
    hi: Dyadic,
}

impl RInterval {
    pub fn point(d: Dyadic) -> Self {
        RInterval { lo: d.clone(), hi: d }
    }

    pub fn zero() -> Self {
        RInterval::point(Dyadic::zero())
    }

    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        debug_assert!(lo.cmp(&hi) != Ordering::Greater, "inverted interval");
        RInterval { lo, hi }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    /// Tightest dyadic enclosure of a rational at `prec` bits.
    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        let num = Dyadic::from_bigint(r.numer().clone());
        let den = Dyadic::from_bigint(r.denom().clone());
        RInterval {
            lo: num.div(&den, prec, Round::Down),
            hi: num.div(&den, prec, Round::Up),
        }
    }

    pub fn from_f64(x: f64) -> Option<Self> {
        Dyadic::from_f64(x).map(RInterval::point)
    }

    pub fn add(&self, o: &RInterval, prec: u32) -> Self {
        RInterval {
            lo: self.lo.add(&o.lo).round(prec, Round::Down),
            hi: self.hi.add(&o.hi).round(prec, Round::Up),
        }
    }

    pub fn neg(&self) -> Self {
        RInterval { lo: self.hi.neg(), hi: self.lo.neg() }
    }

    pub fn sub(&self, o: &RInterval, prec: u32) -> Self {
        self.add(&o.neg(), prec)
    }

    pub fn mul(&self, o: &RInterval, prec: u32) -> Self {
        let cands = [
            self.lo.mul(&o.lo),
            self.lo.mul(&o.hi),
            self.hi.mul(&o.lo),
            self.hi.mul(&o.hi),
        ];
        let mut lo = cands[0].clone();
        let mut hi = cands[0].clone();
        for c in &cands[1..] {
            if c.cmp(&lo) == Ordering::Less {
                lo = c.clone();
            }
            if c.cmp(&hi) == Ordering::Greater {
                hi = c.clone();
            }
        }
        RInterval { lo: lo.round(prec, Round::Down), hi: hi.round(prec, Round::Up) }
    }

    /// Multiply by an exact integer.
    pub fn mul_int(&self, k: &BigInt, prec: u32) -> Self {
        self.mul(&RInterval::point(Dyadic::from_bigint(k.clone())), prec)
    }

    /// Divide by a positive integer (exact direction handling).
    pub fn div_uint(&self, k: u64, prec: u32) -> Self {
        let d = Dyadic::from_u64(k);
        RInterval {
            lo: self.lo.div(&d, prec, Round::Down),
            hi: self.hi.div(&d, prec, Round::Up),
        }
    }

    /// Symmetric widening by `2^k` on both sides.
    pub fn widen_2pow(&self, k: i64) -> Self {
        let eps = Dyadic::new(BigInt::one(), k);
        RInterval { lo: self.lo.sub(&eps), hi: self.hi.add(&eps) }
    }

    /// Exact multiplication by `2^k`.
    pub fn shl(&self, k: i64) -> Self {
        RInterval { lo: self.lo.shl(k), hi: self.hi.shl(k) }
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    pub fn mid_f64(&self) -> f64 {
        (self.lo.to_f64() + self.hi.to_f64()) / 2.0
    }

    /// Enclosure of |x| over the interval.
    pub fn abs(&self) -> RInterval {
        match (self.lo.signum(), self.hi.signum()) {
            (s, _) if s >= 0 => self.clone(),
            (_, s) if s <= 0 => self.neg(),
            _ => RInterval { lo: Dyadic::zero(), hi: self.abs_hi() },
        }
    }

    /// Largest magnitude in the interval, as an upper-bound dyadic.
    pub fn abs_hi(&self) -> Dyadic {
        let a = self.lo.abs();
        let b = self.hi.abs();
        if a.cmp(&b) == Ordering::Greater {
            a
        } else {
            b
        }
    }

    /// Decided comparison against an exact rational, if the interval permits one.
    pub fn cmp_rational(&self, r: &BigRational) -> Option<Ordering> {
        if self.hi.cmp_rational(r) == Ordering::Less {
            return Some(Ordering::Less);
        }
        if self.lo.cmp_rational(r) == Ordering::Greater {
            return Some(Ordering::Greater);
        }
        if self.lo.cmp(&self.hi) == Ordering::Equal && self.lo.cmp_rational(r) == Ordering::Equal {
            return Some(Ordering::Equal);
        }
        None
    }

    /// Decided comparison against another interval (disjoint or both points).
    pub fn cmp_interval(&self, o: &RInterval) -> Option<Ordering> {
        if self.hi.cmp(&o.lo) == Ordering::Less {
            return Some(Ordering::Less);
        }
        if self.lo.cmp(&o.hi) == Ordering::Greater {
            return Some(Ordering::Greater);
        }
        if self.lo.cmp(&self.hi) == Ordering::Equal
            && o.lo.cmp(&o.hi) == Ordering::Equal
            && self.lo.cmp(&o.lo) == Ordering::Equal
        {
            return Some(Ordering::Equal);
        }
        None
    }

    /// Decided sign, if zero is excluded (or the interval is exactly zero).
    pub fn sign(&self) -> Option<Ordering> {
        self.cmp_rational(&BigRational::zero())
    }

    /// `floor` if both endpoints agree on it.
    pub fn floor(&self) -> Option<BigInt> {
        let f = self.lo.floor_int();
        if self.hi.floor_int() == f {
            Some(f)
        } else {
            None
        }
    }
}

/// Run `f` at escalating precisions until it decides; `Ok(None)` means
/// "undecided, escalate". Exhausting [`PRECISIONS`] is a precision error.
pub fn certify<T>(context: &str, mut f: impl FnMut(u32) -> Result<Option<T>>) -> Result<T> {
    for &prec in PRECISIONS.iter() {
        if let Some(v) = f(prec)? {
            return Ok(v);
        }
    }
    Err(Error::Precision {
        bits: *PRECISIONS.last().unwrap(),
        context: context.to_string(),
    })
}

/// `atanh` over an interval with `|z| ≤ zmax < 1`, `zmax ≤ 3/4`.
fn atanh(z: &RInterval, prec: u32) -> RInterval {
    let p = prec + 8;
    let zsq = z.mul(z, p);
    let mut pow = z.clone();
    let mut acc = z.clone();
    let threshold = Dyadic::new(BigInt::one(), -(p as i64 + 6));
    let mut i = 1u64;
    loop {
        pow = pow.mul(&zsq, p);
        let term = pow.div_uint(2 * i + 1, p);
        acc = acc.add(&term, p);
        if term.abs_hi().cmp(&threshold) != Ordering::Greater {
            break;
        }
        i += 1;
        assert!(i < 1_000_000, "atanh series failed to converge");
    }
    // Remaining tail < term·Σ zmax^{2j} ≤ term·4 for zmax ≤ √(3)/2; we only
    // call this with zmax ≤ 1/3, where the factor is 9/8.
    acc.widen_2pow(-(p as i64 + 4))
}

/// Rigorous enclosure of `ln 2`.
pub fn ln2(prec: u32) -> RInterval {
    let third = BigRational::new(BigInt::one(), BigInt::from(3));
    let z = RInterval::from_rational(&third, prec + 8);
    atanh(&z, prec).shl(1)
}

/// Rigorous enclosure of `ln x` for a positive rational `x`.
pub fn ln_rational(x: &BigRational, prec: u32) -> Result<RInterval> {
    if !x.is_positive() {
        return Err(Error::InvalidParams(format!("ln of non-positive rational {x}")));
    }
    if x.is_one() {
        return Ok(RInterval::zero());
    }
    let p = prec + 16;
    // Reduce to m·2^k with m ∈ (2/3, 4/3].
    let mut k: i64 = x.numer().bits() as i64 - x.denom().bits() as i64;
    let two = BigRational::from(BigInt::from(2));
    let four_thirds = BigRational::new(BigInt::from(4), BigInt::from(3));
    let two_thirds = BigRational::new(BigInt::from(2), BigInt::from(3));
    let pow2 = |k: i64| -> BigRational {
        if k >= 0 {
            BigRational::from(BigInt::one() << k as u64)
        } else {
            BigRational::new(BigInt::one(), BigInt::one() << (-k) as u64)
        }
    };
    let mut m = x / pow2(k);
    while m > four_thirds {
        m /= &two;
        k += 1;
    }
    while m <= two_thirds {
        m *= &two;
        k -= 1;
    }
    let z = (&m - BigRational::one()) / (&m + BigRational::one());
    debug_assert!(z.abs() <= BigRational::new(BigInt::one(), BigInt::from(5)));
    let zi = RInterval::from_rational(&z, p);
    let lnm = atanh(&zi, p).shl(1);
    let out = if k == 0 {
        lnm
    } else {
        lnm.add(&ln2(p).mul_int(&BigInt::from(k), p), p)
    };
    Ok(out)
}

/// `ln n` for a positive integer.
pub fn ln_uint(n: &BigUint, prec: u32) -> Result<RInterval> {
    ln_rational(&BigRational::from(BigInt::from(n.clone())), prec)
}

/// Rigorous enclosure of `exp(x)` for a dyadic point `x` with `|x| < 2^40`.
fn exp_point(x: &Dyadic, prec: u32) -> RInterval {
    if x.is_zero() {
        return RInterval::point(Dyadic::one());
    }
    let p = prec + 16;
    let approx = x.to_f64();
    assert!(approx.abs() < 2f64.powi(40), "exp argument out of supported range");
    let k = (approx / std::f64::consts::LN_2).round() as i64;
    let l2 = ln2(p + 64);
    let r = RInterval::point(x.clone()).sub(&l2.mul_int(&BigInt::from(k), p + 64), p + 64);
    // |r| ≤ ln2/2 plus enclosure slop; 3/4 is a safe cap for the tail factor.
    debug_assert!(
        r.abs_hi().cmp(&Dyadic::from_f64(0.75).unwrap()) != Ordering::Greater,
        "exp range reduction failed"
    );
    let mut acc = RInterval::point(Dyadic::one());
    let mut term = RInterval::point(Dyadic::one());
    let threshold = Dyadic::new(BigInt::one(), -(p as i64 + 6));
    let mut n = 1u64;
    loop {
        term = term.mul(&r, p).div_uint(n, p);
        acc = acc.add(&term, p);
        if term.abs_hi().cmp(&threshold) != Ordering::Greater {
            break;
        }
        n += 1;
        assert!(n < 1_000_000, "exp series failed to converge");
    }
    // Tail ≤ |term|·Σ (3/4)^j = 4·|term|.
    acc.widen_2pow(-(p as i64 + 4)).shl(k)
}

/// Rigorous enclosure of `exp` over an interval (monotone in the argument).
pub fn exp_interval(x: &RInterval, prec: u32) -> RInterval {
    let lo = exp_point(x.lo(), prec);
    let hi = exp_point(x.hi(), prec);
    RInterval::new(lo.lo().clone(), hi.hi().clone())
}

/// Enclosure of `base^e` for integer `base ≥ 1` and finite `e` (as the exact
/// dyadic value of the given `f64`).
pub fn pow_uint(base: &BigUint, e: f64, prec: u32) -> Result<RInterval> {
    if base.is_zero() {
        return Err(Error::InvalidParams("0 has no real power here".into()));
    }
    let ed = Dyadic::from_f64(e)
        .ok_or_else(|| Error::InvalidParams(format!("non-finite exponent {e}")))?;
    if base.is_one() || ed.is_zero() {
        return Ok(RInterval::point(Dyadic::one()));
    }
    let lnb = ln_uint(base, prec + 16)?;
    Ok(exp_interval(&lnb.mul(&RInterval::point(ed), prec + 16), prec))
}

/// Exact `⌊base^e⌋` for integer `base ≥ 1`, `e ≥ 0` finite.
///
/// `e` is taken at its exact dyadic value `m/2^k`. Small `m` with `k ≤ 6`
/// goes through exact integer `nth_root`; everything else is certified by
/// escalating-precision enclosures, which decides whenever `base^e` is not
/// itself an integer straddled by the enclosure.
pub fn floor_pow(base: &BigUint, e: f64) -> Result<BigUint> {
    if !(e.is_finite() && e >= 0.0) {
        return Err(Error::InvalidParams(format!("floor_pow exponent {e} out of domain")));
    }
    if base.is_zero() {
        return Err(Error::InvalidParams("floor_pow of base 0".into()));
    }
    if base.is_one() || e == 0.0 {
        return Ok(BigUint::one());
    }
    // Budget: the result has about e·bits(base) bits.
    let out_bits = e * base.bits() as f64;
    if out_bits > 1e7 {
        return Err(Error::Budget(format!(
            "floor_pow result would need ~{out_bits:.0} bits"
        )));
    }
    let ed = Dyadic::from_f64(e).unwrap();
    let er = ed.to_rational();
    let (m, twok) = (er.numer().to_biguint().unwrap(), er.denom().to_biguint().unwrap());
    if let (Some(m64), Some(n64)) = (m.to_u64(), twok.to_u64()) {
        if m64 <= 64 && n64 <= 64 {
            // floor(base^(m/n)) = floor((base^m)^(1/n)) exactly.
            let powed = base.pow(m64 as u32);
            return Ok(powed.nth_root(n64 as u32));
        }
    }
    certify(&format!("floor of {base}^{e}"), |prec| {
        let encl = pow_uint(base, e, prec)?;
        Ok(encl.floor().map(|f| f.to_biguint().expect("positive power")))
    })
}
