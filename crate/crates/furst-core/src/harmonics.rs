//! The cyclic subgroup 𝔖 = ⟨b⟩ ⊂ (ℤ/a^ℓ)^× and its exponential sums.
//!
//! S denotes the multiplicative order of b mod a^ℓ, so 𝔖 = {b^w : 0 ≤ w < S} and
//! S | φ(a^ℓ).  𝔖 contains every residue ≡ 1 (mod a^{ℓ₁}) once ℓ₁ = ℓ − ϰ ≥ 0 with
//! ϰ = ⌈a³·log_a b⌉, which forces the complete sums to vanish:
//!
//! ```text
//! |Σ_{w<S} e(m·b^w/a^ℓ)| = 0   for m ≢ 0 (mod a^{ℓ₁}),
//! ```
//!
//! and in turn bounds the quadratic average of σ(m) = Σ_{y∈𝔜} e(m(y/a^ℓ + γ)) over
//! the subgroup orbit: Σ_{s∈𝔖} |σ(ms)|² ≤ w_m·S·Y with w_m = a^ϰ·gcd(a^{ℓ₁}, m).
//! Feeding the Fejér bump f (support 1/H, f₀ = 1/H, ‖f′‖₂² = 2H) through that bound
//! controls the equidistribution remainders
//!
//! ```text
//! R_{b^w} = (1/Y)·Σ_y f_z(b^w(y/a^ℓ + γ)) − 1/H
//! ```
//!
//! in quadratic mean, which is what guarantees the final search a hit:
//! some w < S and x = λ + y·a^{s−ℓ} with ‖b^w·x/a^s − z‖ ≤ 1/H once H = o(Y^{1/4}).

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::digits::YSet;
use crate::error::{Error, Result};
use crate::real::interval::{certify, ln_uint};
use crate::sunits::SUnitParams;
use crate::util::{
    checked_pow_u64, dec_rat, dec_uint, factor_u64, gcd_u64, mul_mod, pow_mod,
};

/// Hard cap on a^ℓ·S work in the exhaustive vanishing scan.
const SCAN_BUDGET: u64 = 1 << 30;

/// 𝔖 = ⟨b⟩ mod a^ℓ: the order S, the certified ϰ = ⌈a³·log_a b⌉, and ℓ₁ = max(ℓ−ϰ, 0).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SubgroupDescriptor {
    pub a: u64,
    pub b: u64,
    pub l: u32,
    /// S, the multiplicative order of b mod a^ℓ.
    pub order: u64,
    pub kappa: u32,
    pub l1: u32,
}

impl SubgroupDescriptor {
    /// a^ℓ.
    pub fn modulus(&self) -> u64 {
        checked_pow_u64(self.a, self.l).expect("modulus fits u64 for a valid descriptor")
    }

    /// b^0, b^1, …, b^{S−1} mod a^ℓ, in exponent order.
    pub fn elements(&self) -> impl Iterator<Item = u64> {
        let m = self.modulus();
        let b = self.b % m;
        (0..self.order).scan(1u64, move |cur, _| {
            let out = *cur;
            *cur = mul_mod(*cur, b, m);
            Some(out)
        })
    }

    /// S/a^ℓ, the empirical density of the subgroup in ℤ/a^ℓ.
    pub fn density(&self) -> f64 {
        self.order as f64 / self.modulus() as f64
    }
}

/// A complex exponential sum value with its term count.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ExpSumValue {
    pub re: f64,
    pub im: f64,
    pub term_count: u64,
}

impl ExpSumValue {
    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// Triangle (Fejér) bump of height 1 supported on ‖t‖ < 1/H: f(t) = max(0, 1 − H‖t‖).
/// Fourier side: f₀ = 1/H, f_m = H(sin(πm/H)/(πm))² ≤ min(1/H, H/(π²m²)), ‖f′‖₂² = 2H.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BumpSpec {
    pub h: f64,
}

impl BumpSpec {
    pub fn new(h: f64) -> Result<Self> {
        if !(h > 1.0) || !h.is_finite() {
            return Err(Error::InvalidParams(format!(
                "bump width parameter must satisfy H > 1, got {h}"
            )));
        }
        Ok(BumpSpec { h })
    }

    /// f(t), periodized: distance to the nearest integer decides.
    pub fn eval(&self, t: f64) -> f64 {
        (1.0 - self.h * circ_norm(t)).max(0.0)
    }

    /// f_m.
    pub fn fourier(&self, m: i64) -> f64 {
        if m == 0 {
            return 1.0 / self.h;
        }
        let mf = m as f64;
        let s = (std::f64::consts::PI * mf / self.h).sin() / (std::f64::consts::PI * mf);
        self.h * s * s
    }

    /// ‖f′‖₂² = 2H, exactly.
    pub fn norm_fprime_sq(&self) -> f64 {
        2.0 * self.h
    }
}

/// ‖t‖, the distance from t to the nearest integer.
fn circ_norm(t: f64) -> f64 {
    (t - t.round()).abs()
}

#[derive(Default)]
struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }
}

fn lcm(x: u64, y: u64) -> u64 {
    x / gcd_u64(x, y) * y
}

/// λ(m), the Carmichael function, from the factorization of m.
fn carmichael(m: u64) -> u64 {
    factor_u64(m)
        .iter()
        .map(|(&p, &e)| {
            if p == 2 {
                match e {
                    1 => 1,
                    2 => 2,
                    _ => 1u64 << (e - 2),
                }
            } else {
                p.pow(e - 1) * (p - 1)
            }
        })
        .fold(1, lcm)
}

fn euler_phi(m: u64) -> u64 {
    factor_u64(m)
        .iter()
        .map(|(&p, &e)| p.pow(e - 1) * (p - 1))
        .product()
}

/// The multiplicative order of b mod a^ℓ, by dividing primes out of λ(a^ℓ).
pub fn mult_order(b: u64, a: u64, l: u32) -> Result<u64> {
    if a < 2 || l < 1 {
        return Err(Error::InvalidParams(format!(
            "order needs a ≥ 2 and l ≥ 1, got a = {a}, l = {l}"
        )));
    }
    if gcd_u64(a, b) != 1 {
        return Err(Error::InvalidParams(format!(
            "b must be invertible mod a^l: gcd({a}, {b}) ≠ 1"
        )));
    }
    let m = checked_pow_u64(a, l).ok_or_else(|| {
        Error::InvalidParams(format!("modulus a^l = {a}^{l} exceeds the u64 range"))
    })?;
    let b = b % m;
    let mut ord = carmichael(m);
    for &p in factor_u64(ord).keys() {
        while ord % p == 0 && pow_mod(b, ord / p, m) == 1 {
            ord /= p;
        }
    }
    if pow_mod(b, ord, m) != 1 {
        return Err(Error::Internal(format!(
            "order computation failed for {b} mod {m}"
        )));
    }
    Ok(ord)
}

/// ⌈a³·log_a b⌉ with a certified bracket (k−1)·ln a < a³·ln b < k·ln a, so the
/// ceiling is exact.  log_a b is irrational for multiplicatively independent a, b,
/// hence the bracket always resolves at some precision.
fn certified_kappa(a: u64, b: u64) -> Result<u32> {
    let a3 = a.checked_pow(3).ok_or_else(|| {
        Error::InvalidParams(format!("a = {a} too large for the subgroup exponent bound"))
    })?;
    let guess = (a3 as f64 * (b as f64).ln() / (a as f64).ln()).ceil() as i64;
    let a3_big = BigInt::from(a3);
    let (a_big, b_big) = (BigUint::from(a), BigUint::from(b));
    certify("kappa = ceil(a^3 log_a b)", |prec| {
        let la = ln_uint(&a_big, prec)?;
        let target = ln_uint(&b_big, prec)?.mul_int(&a3_big, prec);
        for k in guess.saturating_sub(2).max(1)..=guess + 2 {
            let above = la.mul_int(&BigInt::from(k), prec);
            let below = la.mul_int(&BigInt::from(k - 1), prec);
            if target.cmp_interval(&above) == Some(Ordering::Less)
                && target.cmp_interval(&below) == Some(Ordering::Greater)
            {
                return Ok(Some(k as u32));
            }
        }
        Ok(None)
    })
}

/// Describe ⟨b⟩ mod a^ℓ: order, certified ϰ, and the clamp ℓ₁ = max(ℓ − ϰ, 0).
pub fn subgroup(params: &SUnitParams, l: u32) -> Result<SubgroupDescriptor> {
    let order = mult_order(params.b, params.a, l)?;
    let kappa = certified_kappa(params.a, params.b)?;
    let l1 = l.saturating_sub(kappa);
    let m = checked_pow_u64(params.a, l).expect("checked by mult_order");
    if euler_phi(m) % order != 0 {
        return Err(Error::Internal(format!(
            "order {order} does not divide phi({m})"
        )));
    }
    Ok(SubgroupDescriptor {
        a: params.a,
        b: params.b,
        l,
        order,
        kappa,
        l1,
    })
}

/// Σ_{w<S} e(m·b^w/a^ℓ), by compensated summation over exact residues m·b^w mod a^ℓ.
pub fn exp_sum(desc: &SubgroupDescriptor, m: u64) -> ExpSumValue {
    let modulus = desc.modulus();
    let m = m % modulus;
    let scale = std::f64::consts::TAU / modulus as f64;
    let (mut re, mut im) = (Kahan::default(), Kahan::default());
    for el in desc.elements() {
        let theta = mul_mod(m, el, modulus) as f64 * scale;
        re.add(theta.cos());
        im.add(theta.sin());
    }
    let out = ExpSumValue {
        re: re.sum,
        im: im.sum,
        term_count: desc.order,
    };
    debug_assert!(out.abs() <= desc.order as f64 * (1.0 + 1e-9) + 1e-9);
    out
}

/// Exhaustive vanishing scan over m ∈ [1, a^ℓ).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Lemma5Report {
    pub l1: u32,
    /// ℓ₁ = 0: the claim constrains nothing, nothing is scanned.
    pub vacuous: bool,
    pub tolerance: f64,
    /// Number of m in the claim domain m ≢ 0 (mod a^{ℓ₁}).
    pub scanned: u64,
    /// m in the claim domain with |sum| > tolerance·S.  Expected empty.
    pub violations: Vec<u64>,
    /// max |sum|/S over the claim domain.
    pub max_ratio: f64,
    /// Entry v: max |sum|/S over all m ∈ [1, a^ℓ) with a-adic valuation exactly v.
    pub valuation_profile: Vec<f64>,
    /// Least valuation whose profile entry exceeds the tolerance — the empirically
    /// observed vanishing threshold, recorded next to the claimed ℓ₁.
    pub empirical_l1: Option<u32>,
}

/// Scan every m ∈ [1, a^ℓ): the sums with m ≢ 0 (mod a^{ℓ₁}) must vanish to
/// within tolerance·S.  Also records at which a-adic valuation the sums stop
/// vanishing, which may be well above ℓ₁.
pub fn lemma5_scan(desc: &SubgroupDescriptor, tolerance: f64) -> Result<Lemma5Report> {
    if desc.l1 == 0 {
        return Ok(Lemma5Report {
            l1: 0,
            vacuous: true,
            tolerance,
            scanned: 0,
            violations: Vec::new(),
            max_ratio: 0.0,
            valuation_profile: Vec::new(),
            empirical_l1: None,
        });
    }
    let modulus = desc.modulus();
    if modulus.saturating_mul(desc.order) > SCAN_BUDGET {
        return Err(Error::Budget(format!(
            "vanishing scan needs {} × {} terms, over the {} cap",
            modulus, desc.order, SCAN_BUDGET
        )));
    }
    let s = desc.order as f64;
    let ratios: Vec<f64> = (1..modulus)
        .into_par_iter()
        .map(|m| exp_sum(desc, m).abs() / s)
        .collect();

    let a_l1 = checked_pow_u64(desc.a, desc.l1).expect("l1 ≤ l");
    let mut profile = vec![0.0f64; desc.l as usize];
    let mut violations = Vec::new();
    let mut max_ratio = 0.0f64;
    let mut scanned = 0u64;
    for (ratio, m) in ratios.iter().zip(1..modulus) {
        let mut v = 0usize;
        let mut r = m;
        while r % desc.a == 0 {
            v += 1;
            r /= desc.a;
        }
        profile[v] = profile[v].max(*ratio);
        if m % a_l1 != 0 {
            scanned += 1;
            max_ratio = max_ratio.max(*ratio);
            if *ratio > tolerance {
                violations.push(m);
            }
        }
    }
    let empirical_l1 = profile
        .iter()
        .position(|&r| r > tolerance)
        .map(|v| v as u32);
    Ok(Lemma5Report {
        l1: desc.l1,
        vacuous: false,
        tolerance,
        scanned,
        violations,
        max_ratio,
        valuation_profile: profile,
        empirical_l1,
    })
}

fn check_pair(y: &YSet, desc: &SubgroupDescriptor) -> Result<()> {
    if y.a != desc.a || y.l != desc.l {
        return Err(Error::Precondition(format!(
            "set lives mod {}^{}, subgroup mod {}^{}",
            y.a, y.l, desc.a, desc.l
        )));
    }
    Ok(())
}

/// frac(m·γ) as f64, with m·num(γ) reduced mod den(γ) in integer arithmetic.
fn gamma_shift(y: &YSet, m: &BigUint) -> f64 {
    let den = y.gamma.den();
    if den.is_one() {
        return 0.0;
    }
    let r = (y.gamma.num() * m) % den;
    BigRational::new(r.into(), den.clone().into())
        .to_f64()
        .unwrap_or(0.0)
}

fn sigma_sum_big(y: &YSet, m: &BigUint) -> ExpSumValue {
    let a_l = checked_pow_u64(y.a, y.l).expect("a^l fits u64 for a well-formed set");
    let m_red = (m % a_l).to_u64().expect("reduced below a^l");
    let shift = gamma_shift(y, m);
    let scale = 1.0 / a_l as f64;
    let (mut re, mut im) = (Kahan::default(), Kahan::default());
    for &yy in &y.members {
        let t = mul_mod(m_red, yy, a_l) as f64 * scale + shift;
        let theta = std::f64::consts::TAU * (t - t.floor());
        re.add(theta.cos());
        im.add(theta.sin());
    }
    let out = ExpSumValue {
        re: re.sum,
        im: im.sum,
        term_count: y.members.len() as u64,
    };
    debug_assert!(out.abs() <= out.term_count as f64 * (1.0 + 1e-9) + 1e-9);
    out
}

/// σ(m) = Σ_{y∈𝔜} e(m(y/a^ℓ + γ)), with both phase parts reduced mod 1 exactly.
pub fn sigma_sum(y: &YSet, m: u64) -> ExpSumValue {
    sigma_sum_big(y, &BigUint::from(m))
}

/// |χ̂_𝔜(k)|² for all k mod a^ℓ, via one FFT of length a^ℓ.
pub fn power_spectrum(y: &YSet) -> Result<Vec<f64>> {
    let a_l = checked_pow_u64(y.a, y.l)
        .filter(|&m| m <= 1 << 26)
        .ok_or_else(|| {
            Error::Budget(format!(
                "spectrum needs a dense table of a^l = {}^{} bins",
                y.a, y.l
            ))
        })?;
    let mut buf = vec![Complex64::ZERO; a_l as usize];
    for &yy in &y.members {
        if yy >= a_l {
            return Err(Error::Precondition(format!(
                "member {yy} outside [0, a^l = {a_l})"
            )));
        }
        if buf[yy as usize].re != 0.0 {
            return Err(Error::Precondition(format!("member {yy} repeats")));
        }
        buf[yy as usize].re = 1.0;
    }
    FftPlanner::new().plan_fft_forward(a_l as usize).process(&mut buf);
    Ok(buf.iter().map(|c| c.norm_sqr()).collect())
}

/// One orbit-average bound Σ_{s∈𝔖}|σ(ms)|² ≤ w_m·S·Y, w_m = a^ϰ·gcd(a^{ℓ₁}, m).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Lemma6Check {
    pub m: u64,
    #[serde(with = "dec_uint")]
    pub w_m: BigUint,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub pass: bool,
}

/// Check the orbit-average bound for each m, sharing one power spectrum:
/// |σ(ms)| depends on ms mod a^ℓ only, so the left side is S table lookups.
pub fn lemma6_batch(
    y: &YSet,
    desc: &SubgroupDescriptor,
    ms: &[u64],
) -> Result<Vec<Lemma6Check>> {
    check_pair(y, desc)?;
    let spectrum = power_spectrum(y)?;
    let modulus = desc.modulus();
    let orbit: Vec<u64> = desc.elements().collect();
    let a_l1 = checked_pow_u64(desc.a, desc.l1).expect("l1 ≤ l");
    let a_kappa = BigUint::from(desc.a).pow(desc.kappa);
    let sy = desc.order as f64 * y.members.len() as f64;
    Ok(ms
        .iter()
        .map(|&m| {
            let mut lhs = Kahan::default();
            for &el in &orbit {
                lhs.add(spectrum[mul_mod(m % modulus, el, modulus) as usize]);
            }
            let w_m = &a_kappa * gcd_u64(a_l1, m);
            let rhs = crate::util::big_to_f64(&w_m) * sy;
            let ratio = if rhs.is_finite() { lhs.sum / rhs } else { 0.0 };
            Lemma6Check {
                m,
                w_m,
                lhs: lhs.sum,
                rhs,
                ratio,
                pass: lhs.sum <= rhs * (1.0 + 1e-9),
            }
        })
        .collect())
}

/// Single-m form of [`lemma6_batch`].
pub fn lemma6_check(y: &YSet, desc: &SubgroupDescriptor, m: u64) -> Result<Lemma6Check> {
    Ok(lemma6_batch(y, desc, &[m])?.pop().expect("one check"))
}

/// R_{b^w} = (1/Y)·Σ_{y∈𝔜} f_z(b^w(y/a^ℓ + γ)) − 1/H.  Both residues b^w·y mod a^ℓ
/// and b^w·num(γ) mod den(γ) are reduced in integer arithmetic before the kernel
/// is evaluated.
pub fn remainder(
    y: &YSet,
    desc: &SubgroupDescriptor,
    w: u64,
    spec: &BumpSpec,
    z: &BigRational,
) -> Result<f64> {
    check_pair(y, desc)?;
    if w >= desc.order {
        return Err(Error::Precondition(format!(
            "exponent w = {w} outside [0, S = {})",
            desc.order
        )));
    }
    if y.members.is_empty() {
        return Err(Error::Precondition("empty set has no remainder".into()));
    }
    let a_l = desc.modulus();
    let bw = pow_mod(desc.b % a_l, w, a_l);
    let shift = gamma_shift(y, &BigUint::from(desc.b).modpow(&BigUint::from(w), y.gamma.den()));
    let zf = z
        .to_f64()
        .ok_or_else(|| Error::InvalidParams("shift z is not representable".into()))?;
    Ok(remainder_inner(y, spec, a_l, bw, shift, zf))
}

fn remainder_inner(y: &YSet, spec: &BumpSpec, a_l: u64, bw: u64, shift: f64, zf: f64) -> f64 {
    let scale = 1.0 / a_l as f64;
    let mut acc = Kahan::default();
    for &yy in &y.members {
        let t = mul_mod(bw, yy, a_l) as f64 * scale + shift;
        acc.add(spec.eval((t - t.floor()) - zf));
    }
    acc.sum / y.members.len() as f64 - 1.0 / spec.h
}

/// Quadratic-mean remainder over the whole orbit, and its pointwise minimizer.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Lemma7Check {
    /// (1/S)·Σ_w R_{b^w}².
    pub mean_square: f64,
    /// ‖f′‖₂²/Y, the claimed scale of mean_square up to a constant.
    pub bound_scale: f64,
    /// mean_square/bound_scale — the implicit constant, recorded not asserted.
    pub ratio: f64,
    pub best_w: u64,
    pub best_r: f64,
}

/// Scan w = 0..S−1: mean square of R_{b^w}, plus the w minimizing |R|.
/// |R_best| ≤ √mean_square holds by construction and is re-asserted.
pub fn lemma7_check(
    y: &YSet,
    desc: &SubgroupDescriptor,
    spec: &BumpSpec,
    z: &BigRational,
) -> Result<Lemma7Check> {
    check_pair(y, desc)?;
    if y.members.is_empty() {
        return Err(Error::Precondition("empty set has no remainder".into()));
    }
    let a_l = desc.modulus();
    let zf = z
        .to_f64()
        .ok_or_else(|| Error::InvalidParams("shift z is not representable".into()))?;
    let s = desc.order;
    let bw_table: Vec<u64> = desc.elements().collect();
    let gden = y.gamma.den().clone();
    let shifts: Vec<f64> = if gden.is_one() {
        vec![0.0; s as usize]
    } else {
        let b_big = BigUint::from(desc.b) % &gden;
        let mut cur = BigUint::one();
        (0..s)
            .map(|_| {
                let out = gamma_shift(y, &cur);
                cur = &cur * &b_big % &gden;
                out
            })
            .collect()
    };
    let rs: Vec<f64> = (0..s as usize)
        .into_par_iter()
        .map(|w| remainder_inner(y, spec, a_l, bw_table[w], shifts[w], zf))
        .collect();
    let mut sq = Kahan::default();
    for r in &rs {
        sq.add(r * r);
    }
    let mean_square = sq.sum / s as f64;
    let (best_w, best_r) = rs
        .iter()
        .enumerate()
        .min_by(|(_, x), (_, y)| x.abs().total_cmp(&y.abs()))
        .map(|(w, r)| (w as u64, *r))
        .expect("S ≥ 1");
    if best_r * best_r > mean_square * (1.0 + 1e-9) + f64::MIN_POSITIVE {
        return Err(Error::Internal(
            "pointwise minimum exceeded the quadratic mean".into(),
        ));
    }
    let bound_scale = spec.norm_fprime_sq() / y.members.len() as f64;
    Ok(Lemma7Check {
        mean_square,
        bound_scale,
        ratio: mean_square / bound_scale,
        best_w,
        best_r,
    })
}

/// Outcome of the exhaustive ‖b^w·x/a^s − z‖ minimization.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Lemma8Outcome {
    /// err ≤ 1/H, checked in exact rational arithmetic.
    pub success: bool,
    pub w: u64,
    pub y: u64,
    #[serde(with = "dec_uint")]
    pub x: BigUint,
    #[serde(with = "dec_rat")]
    pub err: BigRational,
    pub h: f64,
    /// S·Y pairs examined.
    pub scanned: u64,
}

/// ‖t‖ for rational t, as an exact rational in [0, 1/2].
pub(crate) fn circ_dist(t: &BigRational) -> BigRational {
    let fr = t - t.floor();
    let inv = BigRational::one() - &fr;
    if fr <= inv {
        fr
    } else {
        inv
    }
}

/// Exhaustive scan of w = 0..S−1 (S the order mod a^ℓ) and x = λ + y·a^{s−ℓ} for
/// the global minimum of ‖b^w·x/a^s − z‖, everything in exact arithmetic with
/// b^w·x reduced mod a^s.  Ties resolve to the smallest w, then the smallest y.
pub fn lemma8_search(
    y: &YSet,
    desc: &SubgroupDescriptor,
    s_digits: u32,
    z: &BigRational,
    h: f64,
) -> Result<Lemma8Outcome> {
    check_pair(y, desc)?;
    if y.members.is_empty() {
        return Err(Error::Precondition("empty set leaves nothing to scan".into()));
    }
    if !(h > 1.0) || !h.is_finite() {
        return Err(Error::InvalidParams(format!("need H > 1, got {h}")));
    }
    if s_digits < y.l {
        return Err(Error::Precondition(format!(
            "digit depth s = {s_digits} is below l = {}",
            y.l
        )));
    }
    let a_s = BigUint::from(y.a).pow(s_digits);
    let step = BigUint::from(y.a).pow(s_digits - y.l);
    if &a_s % y.gamma.den() != BigUint::ZERO {
        return Err(Error::Precondition(format!(
            "phase denominator {} does not divide a^s",
            y.gamma.den()
        )));
    }
    let lambda = y.gamma.num() * (&a_s / y.gamma.den());
    if lambda >= step {
        return Err(Error::Precondition(format!(
            "phase {} ≥ a^(s−l): members would overflow a^s",
            y.gamma
        )));
    }
    let xs: Vec<BigUint> = y.members.iter().map(|&yy| &lambda + yy * &step).collect();
    let b_big = BigUint::from(desc.b) % &a_s;
    let mut bw = BigUint::one();
    let mut best: Option<(u64, u64, &BigUint, BigRational)> = None;
    for w in 0..desc.order {
        for (&yy, x) in y.members.iter().zip(&xs) {
            let r = &bw * x % &a_s;
            let err = circ_dist(&(BigRational::new(r.into(), a_s.clone().into()) - z));
            if best.as_ref().is_none_or(|(_, _, _, e)| err < *e) {
                best = Some((w, yy, x, err));
            }
        }
        bw = bw * &b_big % &a_s;
    }
    let (w, yy, x, err) = best.expect("nonempty scan");
    let threshold = BigRational::from_float(h)
        .expect("finite H")
        .recip();
    Ok(Lemma8Outcome {
        success: err <= threshold,
        w,
        y: yy,
        x: x.clone(),
        err,
        h,
        scanned: desc.order * y.members.len() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::Angle;

    fn yset(a: u64, l: u32, members: &[u64], gamma: Angle) -> YSet {
        YSet {
            a,
            l,
            gamma,
            y: members.len() as u64,
            members: members.to_vec(),
            source_m2: BigUint::from(1u32),
        }
    }

    fn angle(n: u64, d: u64) -> Angle {
        Angle::new(n.into(), d.into()).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn orders_by_divisor_descent() {
        assert_eq!(mult_order(3, 2, 3).unwrap(), 2); // 3² = 9 ≡ 1 (mod 8)
        assert_eq!(mult_order(3, 2, 5).unwrap(), 8);
        assert_eq!(mult_order(2, 3, 2).unwrap(), 6); // 2,4,8,7,5,1
        assert_eq!(mult_order(1, 2, 4).unwrap(), 1);
        assert_eq!(mult_order(7, 10, 2).unwrap(), 4); // 7,49,43,1 mod 100
        assert!(mult_order(6, 2, 3).is_err());

        // Against the naive order for every invertible b mod 3^4.
        for b in 1..81u64 {
            if gcd_u64(b, 3) != 1 {
                continue;
            }
            let (mut cur, mut naive) = (b % 81, 1);
            while cur != 1 {
                cur = cur * b % 81;
                naive += 1;
            }
            assert_eq!(mult_order(b, 3, 4).unwrap(), naive);
        }
    }

    #[test]
    fn subgroup_descriptors() {
        let p23 = SUnitParams::new(2, 3).unwrap();
        let d = subgroup(&p23, 3).unwrap();
        assert_eq!(d.order, 2);
        assert_eq!(d.elements().collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(d.kappa, 13); // ⌈8·log₂3⌉ = ⌈12.6797…⌉
        assert_eq!(d.l1, 0);

        let d = subgroup(&p23, 14).unwrap();
        assert_eq!(d.order, 4096);
        assert_eq!(d.l1, 1);
        assert_eq!(euler_phi(d.modulus()) % d.order, 0);

        let p32 = SUnitParams::new(3, 2).unwrap();
        assert_eq!(subgroup(&p32, 2).unwrap().kappa, 18); // ⌈27·log₃2⌉ = ⌈17.035…⌉
        assert_eq!(subgroup(&p32, 2).unwrap().order, 6);
        let p25 = SUnitParams::new(2, 5).unwrap();
        assert_eq!(subgroup(&p25, 1).unwrap().kappa, 19); // ⌈8·log₂5⌉ = ⌈18.575…⌉
    }

    #[test]
    fn subgroup_density_stays_bounded() {
        // S/a^ℓ over ℓ = 2..14 for (2,3): 1/2 at ℓ = 2, then exactly 1/4.
        let p23 = SUnitParams::new(2, 3).unwrap();
        for l in 2..=14 {
            let d = subgroup(&p23, l).unwrap();
            let expect = if l == 2 { 0.5 } else { 0.25 };
            assert_eq!(d.density(), expect, "l = {l}");
        }
        // 2 generates (ℤ/3^ℓ)^× in full: density 2/3 throughout ℓ = 2..9.
        let p32 = SUnitParams::new(3, 2).unwrap();
        for l in 2..=9 {
            let d = subgroup(&p32, l).unwrap();
            assert_eq!(d.order, euler_phi(d.modulus()));
        }
    }

    #[test]
    fn complete_sums_vanish_off_the_threshold() {
        let p23 = SUnitParams::new(2, 3).unwrap();
        let d = subgroup(&p23, 3).unwrap();
        assert!((exp_sum(&d, 0).abs() - 2.0).abs() < 1e-12);
        assert!(exp_sum(&d, 2).abs() < 1e-12); // e(2/8) + e(6/8) = i − i
        let s1 = exp_sum(&d, 1);
        assert!(s1.re.abs() < 1e-12 && (s1.im - 2f64.sqrt()).abs() < 1e-12);

        // ℓ = 14: spot-check the valuation ladder of |sum|/S.
        let d = subgroup(&p23, 14).unwrap();
        let ratio = |m: u64| exp_sum(&d, m).abs() / d.order as f64;
        for m in [1u64, 3, 777, 12345] {
            assert!(ratio(m) < 1e-9, "odd m = {m} must vanish");
        }
        assert!(ratio(2048) > 0.70 && ratio(2048) < 0.71); // v = 11: √2/2
        assert!(ratio(4096) < 1e-9); // v = 12
        assert!((ratio(8192) - 1.0).abs() < 1e-12); // v = 13: all terms −1
    }

    #[test]
    fn vanishing_scan_at_desk_scale() {
        let p23 = SUnitParams::new(2, 3).unwrap();
        let vac = lemma5_scan(&subgroup(&p23, 3).unwrap(), 1e-6).unwrap();
        assert!(vac.vacuous && vac.violations.is_empty());

        let rep = lemma5_scan(&subgroup(&p23, 14).unwrap(), 1e-6).unwrap();
        assert!(!rep.vacuous);
        assert_eq!(rep.l1, 1);
        assert_eq!(rep.scanned, 8192); // the odd m below 2^14
        assert!(rep.violations.is_empty());
        assert!(rep.max_ratio < 1e-9);
        assert_eq!(rep.empirical_l1, Some(11));
        assert!((rep.valuation_profile[11] - 0.5f64.sqrt()).abs() < 1e-9);
        assert!(rep.valuation_profile[12] < 1e-9);
        assert!((rep.valuation_profile[13] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pointwise_sums_over_y() {
        let single = yset(2, 3, &[0], Angle::zero());
        for m in [0u64, 1, 5, 100] {
            let s = sigma_sum(&single, m);
            assert!((s.re - 1.0).abs() < 1e-12 && s.im.abs() < 1e-12);
        }
        let full: Vec<u64> = (0..8).collect();
        let fy = yset(2, 3, &full, Angle::zero());
        assert!(sigma_sum(&fy, 1).abs() < 1e-12);
        let s = sigma_sum(&fy, 8);
        assert!((s.re - 8.0).abs() < 1e-12);

        // γ = 3/16, m = a^ℓ: σ = Y·e(a^ℓ·γ) = 4·e(3/4) = −4i.
        let q = yset(2, 2, &[0, 1, 2, 3], angle(3, 16));
        let s = sigma_sum(&q, 4);
        assert!(s.re.abs() < 1e-12 && (s.im + 4.0).abs() < 1e-12);
    }

    #[test]
    fn orbit_average_bound() {
        let p23 = SUnitParams::new(2, 3).unwrap();
        let d = subgroup(&p23, 6).unwrap();
        assert_eq!(d.order, 16);

        let single = yset(2, 6, &[0], Angle::zero());
        let c = lemma6_check(&single, &d, 7).unwrap();
        assert!((c.lhs - d.order as f64).abs() < 1e-9);
        assert!(c.pass);

        // Spectrum route against the direct big-integer double sum.
        let y = yset(2, 6, &[1, 5, 12, 30, 31, 47, 60], angle(5, 128));
        for m in [1u64, 3, 6, 16, 64] {
            let c = lemma6_check(&y, &d, m).unwrap();
            let mut direct = Kahan::default();
            let mut bw = BigUint::one();
            for _ in 0..d.order {
                let s = sigma_sum_big(&y, &(&bw * m));
                direct.add(s.re * s.re + s.im * s.im);
                bw *= BigUint::from(3u32);
            }
            assert!(
                (c.lhs - direct.sum).abs() <= 1e-9 * direct.sum.max(1.0),
                "m = {m}: {} vs {}",
                c.lhs,
                direct.sum
            );
            assert!(c.pass);
        }

        // m a multiple of a^ℓ: |σ| = Y everywhere, lhs = S·Y².
        let d4 = subgroup(&p23, 4).unwrap();
        let fy = yset(2, 4, &(0..16).collect::<Vec<_>>(), Angle::zero());
        let c = lemma6_check(&fy, &d4, 16).unwrap();
        assert!((c.lhs - d4.order as f64 * 256.0).abs() < 1e-6);
        assert!(c.pass);

        assert!(lemma6_check(&single, &d4, 1).is_err()); // ℓ mismatch
    }

    #[test]
    fn bump_kernel_shape() {
        let f = BumpSpec::new(4.0).unwrap();
        assert_eq!(f.eval(0.0), 1.0);
        assert!((f.eval(0.125) - 0.5).abs() < 1e-15);
        assert!((f.eval(7.875) - 0.5).abs() < 1e-12); // periodized
        assert_eq!(f.eval(0.25), 0.0);
        assert_eq!(f.eval(0.5), 0.0);
        assert!((f.fourier(0) - 0.25).abs() < 1e-15);
        assert!(BumpSpec::new(1.0).is_err());

        for h in [2.0f64, 4.0, 16.0, 64.0] {
            let f = BumpSpec::new(h).unwrap();
            for m in [1i64, 2, 7, 100, 9999] {
                let fm = f.fourier(m);
                let cap = (1.0 / h).min(h / (std::f64::consts::PI.powi(2) * (m * m) as f64));
                assert!(fm >= 0.0 && fm <= cap * (1.0 + 1e-12));
            }
            // Parseval: Σ_{m≠0} (2πm·f_m)² = ‖f′‖₂² = 2H, to the m ≤ 10⁴ tail.
            let mut parseval = Kahan::default();
            for m in 1..=10_000i64 {
                let t = std::f64::consts::TAU * m as f64 * f.fourier(m);
                parseval.add(2.0 * t * t);
            }
            assert!(parseval.sum <= f.norm_fprime_sq() * (1.0 + 1e-9));
            assert!(parseval.sum >= 0.99 * f.norm_fprime_sq());
        }
    }

    #[test]
    fn remainder_against_closed_forms() {
        let p23 = SUnitParams::new(2, 3).unwrap();
        let spec = BumpSpec::new(4.0).unwrap();

        // Single point at 0: R = f(−z) − 1/H.
        let d = subgroup(&p23, 3).unwrap();
        let single = yset(2, 3, &[0], Angle::zero());
        let r = remainder(&single, &d, 0, &spec, &rat(1, 3)).unwrap();
        assert!((r - (-0.25)).abs() < 1e-12); // f(−1/3) = 0
        let r = remainder(&single, &d, 1, &spec, &rat(1, 8)).unwrap();
        assert!((r - (0.5 - 0.25)).abs() < 1e-12);

        // Full set: the Riemann sum of the triangle is exact, R = 0.
        let d8 = subgroup(&p23, 8).unwrap();
        let fy = yset(2, 8, &(0..256).collect::<Vec<_>>(), Angle::zero());
        let r = remainder(&fy, &d8, 0, &spec, &rat(0, 1)).unwrap();
        assert!(r.abs() < 1e-12);

        assert!(remainder(&single, &d, 2, &spec, &rat(0, 1)).is_err()); // w ≥ S
    }

    #[test]
    fn quadratic_mean_dominates_best_remainder() {
        let p23 = SUnitParams::new(2, 3).unwrap();
        let spec = BumpSpec::new(4.0).unwrap();

        let d = subgroup(&p23, 3).unwrap();
        let single = yset(2, 3, &[0], Angle::zero());
        let c = lemma7_check(&single, &d, &spec, &rat(1, 8)).unwrap();
        assert!((c.mean_square - 0.0625).abs() < 1e-12); // (1/2 − 1/4)², w-independent
        assert_eq!(c.best_w, 0);

        let d8 = subgroup(&p23, 8).unwrap();
        let y = yset(
            2,
            8,
            &[3, 17, 30, 51, 64, 77, 98, 120, 133, 160, 171, 200, 222, 251],
            angle(7, 512),
        );
        let c = lemma7_check(&y, &d8, &spec, &rat(1, 3)).unwrap();
        assert!(c.best_r * c.best_r <= c.mean_square * (1.0 + 1e-9));
        assert!(c.best_w < d8.order);
        assert!(c.ratio.is_finite() && c.mean_square >= 0.0);
    }

    #[test]
    fn exhaustive_search_minimizes_exactly() {
        let p23 = SUnitParams::new(2, 3).unwrap();
        let d = subgroup(&p23, 3).unwrap();
        let fy = yset(2, 3, &(0..8).collect::<Vec<_>>(), Angle::zero());
        let out = lemma8_search(&fy, &d, 3, &rat(3, 10), 4.0).unwrap();
        assert!(out.success);
        assert_eq!((out.w, out.y), (0, 2));
        assert_eq!(out.x, BigUint::from(2u32));
        assert_eq!(out.err, rat(1, 20));
        assert_eq!(out.scanned, 16);

        // Degenerate singleton: err = ‖−1/2‖ = 1/2, success only when H ≤ 2.
        let single = yset(2, 3, &[0], Angle::zero());
        let out = lemma8_search(&single, &d, 3, &rat(1, 2), 2.0).unwrap();
        assert!(out.success && out.err == rat(1, 2));
        let out = lemma8_search(&single, &d, 3, &rat(1, 2), 4.0).unwrap();
        assert!(!out.success);

        // Phase γ = 3/16 on s = 4 digits: x = 3 + 4y.
        let q = yset(2, 2, &[0, 1, 2, 3], angle(3, 16));
        let d2 = subgroup(&p23, 2).unwrap();
        let out = lemma8_search(&q, &d2, 4, &rat(7, 16), 3.0).unwrap();
        assert!(out.success && out.err == rat(0, 1));
        assert_eq!(out.x, BigUint::from(7u32)); // 7/16 hit exactly by y = 1
    }
}
