//! Small shared plumbing: decimal-string serde for bignums (reports must be
//! byte-stable and readable, so no binary or float encodings), u64 modular
//! arithmetic, and deterministic factorization for order computations.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use std::collections::BTreeMap;
use std::str::FromStr;

/// `BigUint` as a decimal string in JSON.
pub mod dec_uint {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let raw = String::deserialize(d)?;
        BigUint::from_str(&raw).map_err(de::Error::custom)
    }
}

/// `BigInt` as a decimal string in JSON (serialize side only; nothing
/// deserializes signed big integers yet).
pub mod dec_int {
    use super::*;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }
}

/// `Vec<BigUint>` as decimal strings in JSON.
pub mod dec_uint_vec {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| BigUint::from_str(s).map_err(de::Error::custom))
            .collect()
    }
}

/// `Vec<BigRational>` as `["num/den", …]` in JSON.
pub mod dec_rat_vec {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&format!("{}/{}", x.numer(), x.denom()))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse_rational(s).map_err(de::Error::custom))
            .collect()
    }
}

/// `BigRational` as `"num/den"` in JSON.
pub mod dec_rat {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", v.numer(), v.denom()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let raw = String::deserialize(d)?;
        parse_rational(&raw).map_err(de::Error::custom)
    }
}

/// Parse `"p/q"`, or a bare integer, into a rational.
pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n = BigInt::from_str(num.trim()).map_err(|e| format!("bad numerator {num:?}: {e}"))?;
        let d = BigInt::from_str(den.trim()).map_err(|e| format!("bad denominator {den:?}: {e}"))?;
        if d == BigInt::from(0) {
            return Err("zero denominator".into());
        }
        Ok(BigRational::new(n, d))
    } else {
        let n = BigInt::from_str(s).map_err(|e| format!("bad integer {s:?}: {e}"))?;
        Ok(BigRational::from(n))
    }
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for u64 (the first 12 primes cover the range).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u64) -> u64 {
    debug_assert!(n > 1 && !is_prime_u64(n) && n % 2 == 1);
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd_u64(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

/// Full factorization of a u64 (trial division + Pollard rho).
pub fn factor_u64(mut n: u64) -> BTreeMap<u64, u32> {
    let mut out = BTreeMap::new();
    if n < 2 {
        return out;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while n % p == 0 {
            *out.entry(p).or_insert(0) += 1;
            n /= p;
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime_u64(m) {
            *out.entry(m).or_insert(0) += 1;
            continue;
        }
        let d = pollard_rho(m);
        stack.push(d);
        stack.push(m / d);
    }
    out
}

/// `base^exp` if it fits in u64.
pub fn checked_pow_u64(base: u64, exp: u32) -> Option<u64> {
    base.checked_pow(exp)
}

/// Lossy conversion; saturates to +∞ beyond f64 range.
pub fn big_to_f64(x: &BigUint) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// ln x as f64, safe for x far beyond f64 range (top 64 bits + 2-power tail).
pub fn ln_big_f64(x: &BigUint) -> f64 {
    use num_traits::ToPrimitive;
    let bits = x.bits();
    if bits <= 512 {
        return big_to_f64(x).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit top fits");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_checks() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(1_000_000_007));
        assert!(is_prime_u64(18_446_744_073_709_551_557)); // largest u64 prime
        assert!(!is_prime_u64(1));
        assert!(!is_prime_u64(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
    }

    #[test]
    fn factor_roundtrip() {
        for n in [2u64, 12, 97, 1 << 40, 999_999_999_989, 600_851_475_143] {
            let f = factor_u64(n);
            let back: u64 = f.iter().map(|(p, e)| p.pow(*e)).product();
            assert_eq!(back, n);
            assert!(f.keys().all(|&p| is_prime_u64(p)));
        }
    }

    #[test]
    fn pow_mod_agrees_with_bigint() {
        use num_traits::ToPrimitive;
        let m = 0xffff_ffff_ffff_fffb; // big odd modulus exercises mul_mod
        let got = pow_mod(1_234_567_890_123, 987_654_321, m);
        let want = BigUint::from(1_234_567_890_123u64)
            .modpow(&BigUint::from(987_654_321u64), &BigUint::from(m));
        assert_eq!(got, want.to_u64().unwrap());
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("5/7").unwrap(), BigRational::new(5.into(), 7.into()));
        assert_eq!(parse_rational("-3 / 4").unwrap(), BigRational::new((-3).into(), 4.into()));
        assert_eq!(parse_rational("12").unwrap(), BigRational::from(BigInt::from(12)));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
