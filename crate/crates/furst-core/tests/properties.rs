//! Randomized structural invariants with shrinking: enumeration order and
//! closure, net windows, digit-set partitions, phase periodicity, parser
//! round trips, and the Dirichlet guarantee.

use num_bigint::{BigInt, BigUint};
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;

use furst_core::alpha::dirichlet_approx;
use furst_core::circle::{frac_mul, Angle};
use furst_core::digits::{project, stratify};
use furst_core::harmonics::{exp_sum, subgroup};
use furst_core::netgen::{build_net, DigitSet};
use furst_core::real::{floor_pow, RealSpec};
use furst_core::sunits::{enumerate_sigma, enumerate_with_successor, SUnitParams};

fn coprime_pair() -> impl Strategy<Value = (u64, u64)> {
    (2u64..=12, 2u64..=12).prop_filter("coprime", |(a, b)| a.gcd(b) == 1)
}

proptest! {
    #[test]
    fn sigma_matches_double_loop((a, b) in coprime_pair(), m in 1u64..=20_000) {
        let params = SUnitParams::new(a, b).unwrap();
        let got: Vec<u64> = enumerate_sigma(&params, &m.into())
            .unwrap()
            .iter()
            .map(|e| e.value.to_u64().unwrap())
            .collect();
        let mut want = Vec::new();
        let mut pa = 1u128;
        while pa <= m as u128 {
            let mut x = pa;
            while x <= m as u128 {
                want.push(x as u64);
                x *= b as u128;
            }
            pa *= a as u128;
        }
        want.sort_unstable();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn sigma_is_ascending_closed_and_capped((a, b) in coprime_pair(), m in 1u64..=50_000) {
        let params = SUnitParams::new(a, b).unwrap();
        let m_big = BigUint::from(m);
        let (list, successor) = enumerate_with_successor(&params, &m_big).unwrap();
        prop_assert_eq!(&list, &enumerate_sigma(&params, &m_big).unwrap());
        prop_assert_eq!(&list[0].value, &BigUint::one());
        for pair in list.windows(2) {
            prop_assert!(pair[0].value < pair[1].value);
        }
        // Closure under both generators, as long as the product stays ≤ M.
        let values: Vec<&BigUint> = list.iter().map(|e| &e.value).collect();
        for e in &list {
            for g in [a, b] {
                let prod = &e.value * g;
                if prod <= m_big {
                    prop_assert!(values.binary_search(&&prod).is_ok());
                }
            }
        }
        // Exponents reproduce the value.
        for e in &list {
            prop_assert_eq!(
                BigUint::from(a).pow(e.u) * BigUint::from(b).pow(e.v),
                e.value.clone()
            );
        }
        prop_assert!(successor.value > m_big);
        prop_assert!(successor.value <= m_big * params.min_base());
    }

    #[test]
    fn projected_strata_partition_the_digit_set(
        a in 2u64..=5,
        n in 1u32..=10,
        raw in prop::collection::vec(any::<u64>(), 1..=64),
        s_pct in 0u32..=100,
        l_pct in 0u32..=100,
    ) {
        let modulus = BigUint::from(a).pow(n);
        let mut residues: Vec<BigUint> =
            raw.iter().map(|r| BigUint::from(*r) % &modulus).collect();
        residues.sort();
        residues.dedup();
        let ds = DigitSet { a, n, residues };
        let s = (s_pct * n).div_ceil(100);
        let l = (l_pct * s) / 100;

        let m1 = BigUint::from(7u32);
        let proj = project(&ds, s, &m1).unwrap();
        prop_assert_eq!(&proj.m2, &(m1 * BigUint::from(a).pow(n - s)));
        let a_s = BigUint::from(a).pow(s);
        for pair in proj.digits.residues.windows(2) {
            prop_assert!(pair[0] < pair[1]);
        }
        prop_assert!(proj.digits.residues.iter().all(|r| *r < a_s));

        let strata = stratify(&ds, s, l).unwrap();
        let step = BigUint::from(a).pow(s - l);
        for pair in strata.windows(2) {
            prop_assert!(pair[0].lambda < pair[1].lambda);
        }
        let mut union = Vec::new();
        for st in &strata {
            prop_assert_eq!(st.x, st.members.len() as u64);
            prop_assert!(!st.members.is_empty());
            for x in &st.members {
                prop_assert_eq!(&(x % &step), &st.lambda);
            }
            union.extend(st.members.iter().cloned());
        }
        union.sort();
        prop_assert_eq!(union, proj.digits.residues);
    }

    #[test]
    fn fractional_multiples_are_periodic_in_q(
        num in 0u64..=1000,
        den in 1u64..=1000,
        q in 0u64..=10_000,
    ) {
        let alpha = Angle::new(num.into(), den.into()).unwrap();
        let lhs = frac_mul(&BigUint::from(q), &alpha);
        let rhs = frac_mul(&BigUint::from(q + den), &alpha);
        prop_assert_eq!(&lhs, &rhs);
        let r = lhs.to_rational();
        prop_assert!(r >= BigRational::zero() && r < BigRational::one());
    }

    #[test]
    fn exponential_sums_are_bounded_and_periodic(l in 3u32..=12, m in 0u64..=(1 << 40)) {
        let desc = subgroup(&SUnitParams::new(2, 3).unwrap(), l).unwrap();
        let v = exp_sum(&desc, m);
        prop_assert!(v.abs() <= desc.order as f64 * (1.0 + 1e-9) + 1e-9);
        let w = exp_sum(&desc, m + desc.modulus());
        prop_assert_eq!(v.re.to_bits(), w.re.to_bits());
        prop_assert_eq!(v.im.to_bits(), w.im.to_bits());
    }

    #[test]
    fn rational_specs_round_trip(num in -1_000_000i64..=1_000_000, den in 1i64..=1_000_000) {
        let r = BigRational::new(num.into(), den.into());
        let parsed = RealSpec::parse(&format!("{num}/{den}")).unwrap();
        prop_assert_eq!(parsed.as_rational(), Some(r.clone()));
        let spec = RealSpec::rational(r);
        let json = serde_json::to_string(&spec).unwrap();
        let back: RealSpec = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, spec);
    }

    #[test]
    fn angles_reduce_and_round_trip(num in 0u64..=1_000_000, den in 1u64..=1_000_000) {
        let angle = Angle::new(num.into(), den.into()).unwrap();
        let r = angle.to_rational();
        prop_assert!(r >= BigRational::zero() && r < BigRational::one());
        prop_assert_eq!(
            r,
            BigRational::new(BigInt::from(num % den), BigInt::from(den))
        );
        let json = serde_json::to_string(&angle).unwrap();
        let back: Angle = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, angle);
    }

    #[test]
    fn dirichlet_pairs_meet_their_guarantee(
        num in 0u64..=1_000_000,
        den in 1u64..=1_000_000,
        n in 1u64..=1_000_000,
    ) {
        let x = BigRational::new(BigInt::from(num), BigInt::from(den));
        let spec = RealSpec::rational(x.clone());
        let (a, q) = dirichlet_approx(&spec, &n.into()).unwrap();
        prop_assert!(q >= BigUint::one() && q <= BigUint::from(n));
        prop_assert_eq!(a.magnitude().gcd(&q), BigUint::one());
        let err = (x - BigRational::new(a, BigInt::from(q.clone()))).abs();
        let bound = BigRational::new(BigInt::one(), BigInt::from(q * n));
        prop_assert!(err <= bound);
    }

    #[test]
    fn floored_powers_agree_with_integer_powers(q in 1u64..=1_000_000_000, k in 0u32..=3) {
        let q_big = BigUint::from(q);
        prop_assert_eq!(floor_pow(&q_big, k as f64).unwrap(), q_big.pow(k));
        // Half-integer exponent: ⌊q^{3/2}⌋ = ⌊√(q³)⌋.
        prop_assert_eq!(floor_pow(&q_big, 1.5).unwrap(), q_big.pow(3).sqrt());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn nets_keep_their_exact_windows(q in 16u64..=100_000, raw in 1u64..=u64::MAX) {
        let a_num = 1 + raw % (q - 1);
        prop_assume!(a_num.gcd(&q) == 1);
        let params = SUnitParams::new(2, 3).unwrap();
        let alpha = Angle::new(a_num.into(), q.into()).unwrap();
        let m = q.sqrt().max(2);
        let rep = build_net(&params, &alpha, &m.into()).unwrap();
        prop_assert!(rep.net_dispersion <= rep.delta);
        prop_assert!(rep.inv_gap >= BigRational::one());
        prop_assert!(rep.inv_gap <= BigRational::from_integer(BigInt::from(q)));
        let points = BigRational::from_integer(BigInt::from(rep.point_count));
        prop_assert_eq!(rep.pigeonhole_upper_held, rep.inv_gap >= points);
        prop_assert_eq!(rep.m_below_q, BigUint::from(m) < BigUint::from(q));
        prop_assert!(rep.k >= 1 && !rep.d_max.is_zero());
    }
}
