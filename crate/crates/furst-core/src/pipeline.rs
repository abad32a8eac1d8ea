//! End-to-end solvers chaining the net, digit, and harmonic stages.
//!
//! For a rational anchor α = A/Q the run fixes M = ⌊Q^{δ/2}⌋, builds the
//! Δ-net from Σ_α(M), discretizes to the digit set 𝔛_n ⊆ [0, a^n), picks a
//! dense stratum (s, λ) whose fibre 𝔜 ⊆ [0, a^ℓ) carries γ = λ/a^s, and asks
//! the b-orbit search for (w, y) with ‖b^w(y/a^ℓ + γ) − z‖ ≤ 1/H.  The
//! element q ∈ Σ(M₂) witnessing the chosen fibre point then yields
//! q* = b^w·q with
//!
//!   ‖q*α − z‖ ≤ ‖b^w(y/a^ℓ + γ) − z‖ + b^w/a^s,
//!   q* ≤ M₁·a^{n−s}·b^{a^ℓ},
//!
//! both checked exactly at output time, never assumed.  Every advisory
//! inequality (stratum size, pigeonhole window, budget, b^{a^ℓ} ≤ a^{s/2})
//! is reported as a flag; only structural contradictions abort a run.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alpha::{dirichlet_approx, psi_bad_witness, PsiSpec, PsiWitness};
use crate::circle::{dispersion, sigma_alpha, Angle, Metric};
use crate::digits::{combinatorial_search, extract_y, project, stratify, SearchReport, YSet};
use crate::error::{Error, Result};
use crate::harmonics::{circ_dist, lemma8_search, subgroup, Lemma8Outcome, SubgroupDescriptor};
use crate::netgen::{build_net, choose_n, digit_set, verify_lemma2, Lemma2Check, NetReport};
use crate::real::{certify, floor_pow, Dyadic, RInterval, RealSpec};
use crate::sunits::{enumerate_sigma, SUnit, SUnitParams};
use crate::util::{checked_pow_u64, dec_rat, dec_rat_vec, dec_uint, ln_big_f64};

/// Defaults used when a solver has to pick the exponent budget itself:
/// q* ≤ Q^{1+δ} with δ = 1 is the Q² window, and ε = 1/20 keeps
/// H = ⌊Y^{1/4−ε}⌋ comfortably inside the o(Y^{1/4}) regime.
pub const DEFAULT_DELTA: f64 = 1.0;
pub const DEFAULT_EPS: f64 = 0.05;

/// Explicit stage choices that replace the derived ones when present.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Overrides {
    /// Net budget M as a decimal string (must stay < Q).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<String>,
    /// Digit depth n.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    /// Stratum depth s (skips the grid search; the densest stratum at this
    /// depth is taken).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<u32>,
    /// Fibre width exponent ℓ.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<u32>,
    /// Bump sharpness H (> 1).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
}

/// One full run request: the pair (a, b), the anchor α = A/Q, the exponent
/// budget δ, the slack ε, and the rational targets z to hit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub params: SUnitParams,
    #[serde(rename = "A", with = "dec_uint")]
    pub a_num: BigUint,
    #[serde(rename = "Q", with = "dec_uint")]
    pub q_den: BigUint,
    pub delta: f64,
    pub eps: f64,
    #[serde(default, with = "dec_rat_vec")]
    pub targets: Vec<BigRational>,
    #[serde(default)]
    pub overrides: Overrides,
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.q_den < BigUint::from(3u32) {
            return Err(Error::Precondition(format!(
                "Q must be ≥ 3, got {}",
                self.q_den
            )));
        }
        if self.a_num.gcd(&self.q_den) != BigUint::one() {
            return Err(Error::InvalidParams(format!(
                "A = {} and Q = {} must be coprime",
                self.a_num, self.q_den
            )));
        }
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(Error::InvalidParams(format!("δ must be > 0, got {}", self.delta)));
        }
        if !(self.eps.is_finite() && self.eps > 0.0 && self.eps < 0.125) {
            return Err(Error::InvalidParams(format!(
                "ε must lie in (0, 1/8), got {}",
                self.eps
            )));
        }
        for z in &self.targets {
            if z.is_negative() || *z > BigRational::one() {
                return Err(Error::InvalidParams(format!("target z = {z} outside [0, 1]")));
            }
        }
        if let Some(h) = self.overrides.h {
            if !(h.is_finite() && h > 1.0) {
                return Err(Error::InvalidParams(format!("override H must be > 1, got {h}")));
            }
        }
        Ok(())
    }
}

/// The exact budget comparison M₁·a^{n−s}·b^{a^ℓ} ≤ ⌊Q^{1+δ}⌋.
#[derive(Clone, Debug, Serialize)]
pub struct BudgetCheck {
    #[serde(with = "dec_uint")]
    pub lhs: BigUint,
    #[serde(with = "dec_uint")]
    pub rhs: BigUint,
    pub pass: bool,
}

/// One target z: the b-orbit search outcome, the Σ(M₂) witness of the chosen
/// fibre point, and the assembled q* = b^w·q with its exact circle error.
#[derive(Clone, Debug, Serialize)]
pub struct TargetResult {
    #[serde(with = "dec_rat")]
    pub z: BigRational,
    pub search: Lemma8Outcome,
    pub witness: SUnit,
    pub q_star: SUnit,
    /// ‖q*·A/Q − z‖, exact.
    #[serde(with = "dec_rat")]
    pub error: BigRational,
    /// The triangle bound ‖b^w(y/a^ℓ+γ) − z‖ + b^w/a^s; `error` never
    /// exceeds it (checked).
    #[serde(with = "dec_rat")]
    pub guaranteed: BigRational,
    /// Whether the headline claim error ≤ 1/H + a^{−s/2} held (needs the
    /// search to succeed and b^w to stay under a^{s/2}).
    pub within_claimed: bool,
}

/// Everything a run measured, stage by stage.
#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub schema: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub config: PipelineConfig,
    pub alpha: Angle,
    /// M = ⌊Q^{δ/2}⌋ (or the override).
    #[serde(with = "dec_uint")]
    pub m: BigUint,
    pub net: NetReport,
    pub lemma2: Lemma2Check,
    pub n: u32,
    /// a^n.
    #[serde(with = "dec_uint")]
    pub n_value: BigUint,
    /// ⌊log_a(n·ln a / (2 ln b))⌋ before clamping to [1, n].
    pub l_raw: i64,
    pub l: u32,
    pub l_clamped: bool,
    pub search: SearchReport,
    /// M₂ = M₁·a^{n−s}.
    #[serde(with = "dec_uint")]
    pub m2: BigUint,
    pub y_set: YSet,
    /// Σ(M₂) witnesses, aligned with `y_set.members`.
    pub witnesses: Vec<SUnit>,
    pub subgroup: SubgroupDescriptor,
    pub h: f64,
    pub budget: BudgetCheck,
    /// b^{a^ℓ} ≤ a^{s/2}, the inequality that makes a^{−s/2} the carry scale.
    pub bw_cap_ok: bool,
    pub targets: Vec<TargetResult>,
}

/// Mode tag for the inhomogeneous solvers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMode {
    Brute,
    Pipeline,
}

impl std::str::FromStr for SolveMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" => Ok(SolveMode::Brute),
            "pipeline" => Ok(SolveMode::Pipeline),
            other => Err(Error::Parse(format!("unknown mode {other:?} (brute|pipeline)"))),
        }
    }
}

/// An error value: exact when α and β are both rational, otherwise a
/// certified enclosure of width ≤ 2⁻⁶⁴.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ErrorValue {
    Exact {
        #[serde(with = "dec_rat")]
        value: BigRational,
    },
    Interval {
        #[serde(with = "dec_rat")]
        lo: BigRational,
        #[serde(with = "dec_rat")]
        hi: BigRational,
    },
}

impl ErrorValue {
    pub fn lo(&self) -> BigRational {
        match self {
            ErrorValue::Exact { value } => value.clone(),
            ErrorValue::Interval { lo, .. } => lo.clone(),
        }
    }

    pub fn hi(&self) -> BigRational {
        match self {
            ErrorValue::Exact { value } => value.clone(),
            ErrorValue::Interval { hi, .. } => hi.clone(),
        }
    }
}

/// Best approximant found: q ∈ Σ with its circle error and how it was found.
#[derive(Clone, Debug, Serialize)]
pub struct SolveResult {
    pub mode: SolveMode,
    pub q: SUnit,
    pub error: ErrorValue,
    /// Set when the pipeline declined and the scan answered instead.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fallback: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<Box<PipelineReport>>,
}

/// Dispersion of Σ_α(Q^e) against the asymptotic 1/(logloglog Q)^{1/8−ε}.
#[derive(Clone, Debug, Serialize)]
pub struct DensityReport {
    pub alpha: Angle,
    pub exponent: f64,
    pub eps: f64,
    /// ⌊Q^e⌋, the enumeration budget.
    #[serde(with = "dec_uint")]
    pub m: BigUint,
    pub point_count: u64,
    #[serde(with = "dec_rat")]
    pub dispersion: BigRational,
    /// None when logloglog Q ≤ 1 (the bound is not yet defined there).
    pub paper_bound: Option<f64>,
    /// Whether the defined bound is ≥ 1/2 and hence says nothing.
    pub vacuous: Option<bool>,
}

/// ψ-badness certificate plus the run it licenses.
#[derive(Clone, Debug, Serialize)]
pub struct UniformReport {
    pub witness: PsiWitness,
    #[serde(with = "dec_uint")]
    pub n: BigUint,
    pub delta: f64,
    pub eps: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pipeline: Option<Box<PipelineReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density: Option<DensityReport>,
    /// 1/(logloglog Ψ(N))^{1/8−ε} where defined: the bound in terms of the
    /// proven floor Ψ(N) ≤ Q.
    pub psi_bound: Option<f64>,
    pub psi_bound_vacuous: Option<bool>,
}

fn big_rat(x: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(x.clone()))
}

/// ‖v·α − z‖ for exact rational α, z.
fn exact_circ_err(value: &BigUint, alpha: &BigRational, z: &BigRational) -> BigRational {
    circ_dist(&(alpha * big_rat(value) - z))
}

/// 1/(t^{1/8−ε}) through the triple logarithm, when that is > 1.
fn tail_bound(x: f64, eps: f64) -> Option<f64> {
    if !(x.is_finite() && x > 0.0) {
        return None;
    }
    let lll = x.ln().ln().ln();
    (lll.is_finite() && lll > 1.0).then(|| lll.powf(-(0.125 - eps)))
}

/// Runs every stage for α = A/Q and solves each target z from the config.
///
/// Fails only on malformed input or structural contradictions (a fibre point
/// with no Σ(M₂) witness would be one); advisory inequalities land in the
/// report as flags.
pub fn run_theorem1(cfg: &PipelineConfig) -> Result<PipelineReport> {
    cfg.validate()?;
    let params = &cfg.params;
    let (a, b) = (params.a, params.b);
    let alpha = Angle::new(cfg.a_num.clone(), cfg.q_den.clone())?;

    let m = match &cfg.overrides.m {
        Some(s) => s
            .parse::<BigUint>()
            .map_err(|e| Error::Parse(format!("override M: {e}")))?,
        None => floor_pow(&cfg.q_den, cfg.delta / 2.0)?,
    };
    if m.is_zero() {
        return Err(Error::Precondition("M must be ≥ 1".into()));
    }
    if m >= cfg.q_den {
        return Err(Error::Precondition(format!(
            "net budget M = {m} must stay below Q = {} (raise Q or lower δ)",
            cfg.q_den
        )));
    }

    let net = build_net(params, &alpha, &m)?;

    let n = match cfg.overrides.n {
        Some(n) => n,
        None => choose_n(&net.delta, a)?,
    };
    if n == 0 {
        return Err(Error::Precondition(
            "digit depth n = 0: the net gap Δ is coarser than 1/a, nothing to stratify".into(),
        ));
    }
    let ds = digit_set(params, &alpha, &net.m1, n)?;
    let lemma2 = verify_lemma2(&net, &ds)?;

    // ℓ ≈ log_a(s·ln a / (2 ln b)) keeps b^{a^ℓ} near a^{s/2}; with s not yet
    // chosen the depth n stands in for it.  Values outside [1, n] are clamped
    // and flagged.
    let l_arg = (n as f64) * (a as f64).ln() / (2.0 * (b as f64).ln());
    let l_raw = (l_arg.ln() / (a as f64).ln()).floor() as i64;
    let (l, l_clamped) = match cfg.overrides.l {
        Some(l) => {
            if l < 1 || l > n {
                return Err(Error::InvalidParams(format!("override ℓ = {l} outside [1, {n}]")));
            }
            (l, false)
        }
        None => {
            let clamped = l_raw.clamp(1, n as i64) as u32;
            (clamped, i64::from(clamped) != l_raw)
        }
    };

    let search = match cfg.overrides.s {
        Some(s) => {
            let strata = stratify(&ds, s, l)?;
            let best = strata
                .iter()
                .max_by_key(|st| (st.x, std::cmp::Reverse(st.lambda.clone())))
                .cloned()
                .ok_or_else(|| Error::Inconsistent("no stratum at the requested depth".into()))?;
            let threshold = (a as f64).powf((0.5 - 2.0 * cfg.eps) * l as f64);
            SearchReport {
                eps: cfg.eps,
                grid: vec![s],
                threshold,
                pass: best.members.len() as f64 >= threshold,
                stratum: best,
            }
        }
        None => combinatorial_search(&ds, l, cfg.eps)?,
    };
    let s = search.stratum.s;

    let proj = project(&ds, s, &net.m1)?;
    let ys = extract_y(&search.stratum, &proj.m2)?;
    let witnesses: Vec<SUnit> = crate::digits::y_witness_map(&ys, s, params, &alpha)?
        .into_iter()
        .enumerate()
        .map(|(i, w)| {
            w.ok_or_else(|| {
                Error::Inconsistent(format!(
                    "fibre point y = {} has no witness in Σ({})",
                    ys.members[i], ys.source_m2
                ))
            })
        })
        .collect::<Result<_>>()?;

    let desc = subgroup(params, l)?;

    let y_count = ys.members.len() as f64;
    let h = match cfg.overrides.h {
        Some(h) => h,
        None => y_count.powf(0.25 - cfg.eps).floor().max(2.0),
    };

    let a_pow_l = checked_pow_u64(a, l)
        .filter(|&v| v <= 1u64 << 20)
        .ok_or_else(|| Error::Budget(format!("orbit cap b^(a^{l}) is too large to materialize")))?;
    let bw_cap = BigUint::from(b).pow(a_pow_l as u32);
    let budget_lhs = &proj.m2 * &bw_cap;
    let budget_rhs = floor_pow(&cfg.q_den, 1.0 + cfg.delta)?;
    let budget = BudgetCheck {
        pass: budget_lhs <= budget_rhs,
        lhs: budget_lhs,
        rhs: budget_rhs,
    };
    let bw_cap_ok = bw_cap.pow(2) <= BigUint::from(a).pow(s);

    let alpha_rat = alpha.to_rational();
    let a_pow_s = BigUint::from(a).pow(s);
    let h_rat = Dyadic::from_f64(h)
        .ok_or_else(|| Error::InvalidParams(format!("H = {h} is not finite")))?
        .to_rational();
    let targets: Vec<TargetResult> = cfg
        .targets
        .par_iter()
        .map(|z| -> Result<TargetResult> {
            let outcome = lemma8_search(&ys, &desc, s, z, h)?;
            let idx = ys
                .members
                .iter()
                .position(|&yy| yy == outcome.y)
                .ok_or_else(|| Error::Internal("search returned a fibre point outside 𝔜".into()))?;
            let witness = witnesses[idx].clone();
            let w = u32::try_from(outcome.w)
                .map_err(|_| Error::Internal("orbit exponent w does not fit u32".into()))?;
            let v = witness
                .v
                .checked_add(w)
                .ok_or_else(|| Error::Internal("exponent v + w overflows u32".into()))?;
            let bw = BigUint::from(b).pow(w);
            let q_star = SUnit {
                u: witness.u,
                v,
                value: &witness.value * &bw,
            };
            // Re-derive the value from the exponent pair so the report is
            // checkable from (u, v) alone.
            if BigUint::from(a).pow(q_star.u) * BigUint::from(b).pow(q_star.v) != q_star.value {
                return Err(Error::Internal("q* value disagrees with its exponents".into()));
            }
            let error = exact_circ_err(&q_star.value, &alpha_rat, z);
            let guaranteed = &outcome.err + BigRational::new(BigInt::from(bw), BigInt::from(a_pow_s.clone()));
            if error > guaranteed {
                return Err(Error::Internal(format!(
                    "final error {error} exceeds the carry bound {guaranteed}"
                )));
            }
            if budget.pass && q_star.value > budget.rhs {
                return Err(Error::Internal(format!(
                    "q* = {} escapes the passed budget {}",
                    q_star.value, budget.rhs
                )));
            }
            let r = &error - BigRational::one() / &h_rat;
            let within_claimed = outcome.success
                && (r.is_negative()
                    || r.is_zero()
                    || &r * &r <= BigRational::new(BigInt::one(), BigInt::from(a_pow_s.clone())));
            Ok(TargetResult {
                z: z.clone(),
                search: outcome,
                witness,
                q_star,
                error,
                guaranteed,
                within_claimed,
            })
        })
        .collect::<Result<_>>()?;

    Ok(PipelineReport {
        schema: 1,
        seed: None,
        config: cfg.clone(),
        alpha,
        m,
        net,
        lemma2,
        n,
        n_value: BigUint::from(a).pow(n),
        l_raw,
        l,
        l_clamped,
        search,
        m2: proj.m2,
        y_set: ys,
        witnesses,
        subgroup: desc,
        h,
        budget,
        bw_cap_ok,
        targets,
    })
}

fn min_dy(x: &Dyadic, y: &Dyadic) -> Dyadic {
    if x.sub(y).signum() <= 0 {
        x.clone()
    } else {
        y.clone()
    }
}

fn max_dy(x: &Dyadic, y: &Dyadic) -> Dyadic {
    if x.sub(y).signum() >= 0 {
        x.clone()
    } else {
        y.clone()
    }
}

/// Enclosure of ‖t‖ = dist(t, ℤ), clamped to [0, 1/2].
fn circ_norm_interval(t: &RInterval, prec: u32) -> RInterval {
    let k = BigRational::from_integer(
        BigInt::from(t.mid_f64().round() as i128),
    );
    let u = t.sub(&RInterval::from_rational(&k, prec), prec).abs();
    let one = RInterval::from_rational(&BigRational::one(), prec);
    let comp = one.sub(&u, prec);
    let zero = Dyadic::from_f64(0.0).expect("exact");
    let half = Dyadic::from_f64(0.5).expect("exact");
    let lo = max_dy(&min_dy(u.lo(), comp.lo()), &zero);
    let hi = min_dy(&min_dy(u.hi(), comp.hi()), &half);
    RInterval::new(lo, hi)
}

/// ‖v·α − β‖ as an exact rational or a certified enclosure of width ≤ 2⁻⁶⁴.
fn error_of(value: &BigUint, alpha: &RealSpec, beta: &RealSpec) -> Result<ErrorValue> {
    if let (Some(ar), Some(br)) = (alpha.as_rational(), beta.as_rational()) {
        return Ok(ErrorValue::Exact {
            value: exact_circ_err(value, &ar, &br),
        });
    }
    let cap = Dyadic::from_f64(2f64.powi(-64)).expect("exact");
    let enc = certify("circle error enclosure", |prec| {
        let ax = alpha.enclosure(prec)?;
        let bx = beta.enclosure(prec)?;
        let t = ax.mul_int(&BigInt::from(value.clone()), prec).sub(&bx, prec);
        let d = circ_norm_interval(&t, prec);
        Ok((d.width().sub(&cap).signum() <= 0).then_some(d))
    })?;
    Ok(ErrorValue::Interval {
        lo: enc.lo().to_rational(),
        hi: enc.hi().to_rational(),
    })
}

/// Scans all of Σ(N) for the q minimizing ‖qα − β‖.
///
/// Rational α, β are ranked exactly with ties going to the smaller q.
/// Otherwise candidates are ranked by certified intervals at escalating
/// precision; two candidates with genuinely equal errors exhaust the
/// precision ladder and come back as a precision error.
pub fn brute_force_best(
    params: &SUnitParams,
    alpha: &RealSpec,
    beta: &RealSpec,
    n: &BigUint,
) -> Result<SolveResult> {
    alpha.validate()?;
    beta.validate()?;
    let sigma = enumerate_sigma(params, n)?;

    if let (Some(ar), Some(br)) = (alpha.as_rational(), beta.as_rational()) {
        let mut best: Option<(&SUnit, BigRational)> = None;
        for e in &sigma {
            let d = exact_circ_err(&e.value, &ar, &br);
            if best.as_ref().is_none_or(|(_, bd)| d < *bd) {
                best = Some((e, d));
            }
        }
        let (e, d) = best.expect("Σ(N) is nonempty for N ≥ 1");
        // Independent recomputation from the exponent pair.
        let v2 = BigUint::from(params.a).pow(e.u) * BigUint::from(params.b).pow(e.v);
        if exact_circ_err(&v2, &ar, &br) != d {
            return Err(Error::Internal("best error failed recomputation".into()));
        }
        return Ok(SolveResult {
            mode: SolveMode::Brute,
            q: e.clone(),
            error: ErrorValue::Exact { value: d },
            fallback: None,
            report: None,
        });
    }

    let (idx, enc) = certify("brute-force candidate ranking", |prec| {
        let ax = alpha.enclosure(prec)?;
        let bx = beta.enclosure(prec)?;
        let ds: Vec<RInterval> = sigma
            .iter()
            .map(|e| {
                let t = ax.mul_int(&BigInt::from(e.value.clone()), prec).sub(&bx, prec);
                circ_norm_interval(&t, prec)
            })
            .collect();
        let mut best = 0;
        for i in 1..ds.len() {
            if ds[i].hi().sub(ds[best].hi()).signum() < 0 {
                best = i;
            }
        }
        for (j, d) in ds.iter().enumerate() {
            if j != best && ds[best].hi().sub(d.lo()).signum() >= 0 {
                return Ok(None);
            }
        }
        Ok(Some((best, ds[best].clone())))
    })?;
    let e = sigma[idx].clone();
    // Independent recomputation from the exponent pair, tightened to the
    // reporting width; it must overlap the interval that won the ranking.
    let v2 = BigUint::from(params.a).pow(e.u) * BigUint::from(params.b).pow(e.v);
    let error = error_of(&v2, alpha, beta)?;
    if error.lo() > enc.hi().to_rational() || enc.lo().to_rational() > error.hi() {
        return Err(Error::Internal("best error enclosure failed recomputation".into()));
    }
    Ok(SolveResult {
        mode: SolveMode::Brute,
        q: e,
        error,
        fallback: None,
        report: None,
    })
}

/// Solves ‖qα − β‖ → min over q ∈ Σ(N), either by the full scan or through
/// the staged run anchored at a Dirichlet pair with Q^{1+δ} ≤ N.
///
/// The pipeline aims at z = β mod 1 (the midpoint of a certified enclosure
/// when β is irrational; the final error is measured against the true β
/// either way) and reports the scan's answer with an explicit reason
/// whenever it has to decline.  A pipeline answer is never better than the
/// scan's — that ordering is asserted before returning.
pub fn solve_inhomogeneous(
    params: &SUnitParams,
    alpha: &RealSpec,
    beta: &RealSpec,
    n: &BigUint,
    mode: SolveMode,
) -> Result<SolveResult> {
    if mode == SolveMode::Brute {
        return brute_force_best(params, alpha, beta, n);
    }
    let fallback = |reason: String| -> Result<SolveResult> {
        let mut r = brute_force_best(params, alpha, beta, n)?;
        r.fallback = Some(reason);
        Ok(r)
    };

    // A Dirichlet pair with denominator ≤ N^{1/(1+δ)} keeps Q^{1+δ} ≤ N.
    let n1 = floor_pow(n, 1.0 / (1.0 + DEFAULT_DELTA))?;
    if n1 < BigUint::from(3u32) {
        return fallback(format!("N = {n} leaves no room for an anchor with Q ≥ 3"));
    }
    let (a_int, q_den) = dirichlet_approx(alpha, &n1)?;
    if q_den < BigUint::from(3u32) {
        return fallback(format!("Dirichlet anchor denominator Q = {q_den} is below 3"));
    }
    let a_red = ((&a_int % BigInt::from(q_den.clone())) + BigInt::from(q_den.clone()))
        % BigInt::from(q_den.clone());
    let a_num = a_red.to_biguint().expect("reduced residue is nonnegative");

    // z = β mod 1; for irrational β the midpoint of a certified enclosure
    // stands in, and the final error below is measured against the true β,
    // which absorbs the midpoint radius.
    let z = match beta.as_rational() {
        Some(br) => &br - br.floor(),
        None => {
            let enc = beta.enclosure(192)?;
            let mid = (enc.lo().to_rational() + enc.hi().to_rational()) / BigRational::from_integer(2.into());
            &mid - mid.floor()
        }
    };

    let cfg = PipelineConfig {
        params: params.clone(),
        a_num,
        q_den,
        delta: DEFAULT_DELTA,
        eps: DEFAULT_EPS,
        targets: vec![z],
        overrides: Overrides::default(),
    };
    let report = match run_theorem1(&cfg) {
        Ok(r) => r,
        Err(Error::Internal(msg)) => return Err(Error::Internal(msg)),
        Err(e) => return fallback(format!("pipeline declined: {e}")),
    };
    let tr = &report.targets[0];
    if tr.q_star.value > *n {
        return fallback(format!("assembled q* = {} exceeds N = {n}", tr.q_star.value));
    }
    let q_star = tr.q_star.clone();
    let error = error_of(&q_star.value, alpha, beta)?;

    // The full scan can only do better; a certified reversal is a bug.
    let brute = brute_force_best(params, alpha, beta, n)?;
    if error.hi() < brute.error.lo() {
        return Err(Error::Internal(
            "pipeline answer certified below the exhaustive minimum".into(),
        ));
    }

    Ok(SolveResult {
        mode: SolveMode::Pipeline,
        q: q_star,
        error,
        fallback: None,
        report: Some(Box::new(report)),
    })
}

/// Certifies ‖qα‖ ≥ ψ(q) up to N, then runs the staged pipeline from the
/// resulting Dirichlet anchor and measures how dense Σ_α(Q^{1+δ}) came out.
///
/// A ψ violation is an answer, not an error: the report carries the
/// violating q and skips the run.
pub fn solve_uniform(
    params: &SUnitParams,
    alpha: &RealSpec,
    psi: &PsiSpec,
    n: &BigUint,
    delta: f64,
    eps: f64,
) -> Result<UniformReport> {
    psi.validate()?;
    let witness = psi_bad_witness(alpha, psi, n)?;
    let (a_int, q_den, psi_floor) = match &witness {
        PsiWitness::Violation { .. } => {
            return Ok(UniformReport {
                witness,
                n: n.clone(),
                delta,
                eps,
                pipeline: None,
                density: None,
                psi_bound: None,
                psi_bound_vacuous: None,
            });
        }
        PsiWitness::Pair { a, q, psi_floor } => (a.clone(), q.clone(), *psi_floor),
    };
    let a_red = ((&a_int % BigInt::from(q_den.clone())) + BigInt::from(q_den.clone()))
        % BigInt::from(q_den.clone());
    let cfg = PipelineConfig {
        params: params.clone(),
        a_num: a_red.to_biguint().expect("reduced residue is nonnegative"),
        q_den: q_den.clone(),
        delta,
        eps,
        targets: Vec::new(),
        overrides: Overrides::default(),
    };
    let report = run_theorem1(&cfg)?;
    let anchor = Angle::new(cfg.a_num.clone(), q_den)?;
    let density = measure_density(params, &anchor, 1.0 + delta, eps)?;
    let psi_bound = tail_bound(psi_floor, eps);
    Ok(UniformReport {
        witness,
        n: n.clone(),
        delta,
        eps,
        pipeline: Some(Box::new(report)),
        density: Some(density),
        psi_bound,
        psi_bound_vacuous: psi_bound.map(|b| b >= 0.5),
    })
}

/// Enumerates Σ_α(Q^e) and measures its exact dispersion in [0, 1], next to
/// the asymptotic bound 1/(logloglog Q)^{1/8−ε} where that is defined.
pub fn measure_density(
    params: &SUnitParams,
    alpha: &Angle,
    exponent: f64,
    eps: f64,
) -> Result<DensityReport> {
    if !(exponent.is_finite() && exponent >= 1.0) {
        return Err(Error::InvalidParams(format!("exponent must be ≥ 1, got {exponent}")));
    }
    if !(eps.is_finite() && eps > 0.0 && eps < 0.125) {
        return Err(Error::InvalidParams(format!("ε must lie in (0, 1/8), got {eps}")));
    }
    let q = alpha.den();
    if *q < BigUint::from(2u32) {
        return Err(Error::InvalidParams("α must have denominator ≥ 2".into()));
    }
    let m = floor_pow(q, exponent)?;
    let points = sigma_alpha(params, &m, alpha)?;
    let disp = dispersion(&points, Metric::Interval)?;
    let paper_bound = tail_bound(ln_big_f64(q).exp(), eps);
    Ok(DensityReport {
        alpha: alpha.clone(),
        exponent,
        eps,
        m,
        point_count: points.len() as u64,
        dispersion: disp,
        paper_bound,
        vacuous: paper_bound.map(|b| b >= 0.5),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn u(x: u64) -> BigUint {
        BigUint::from(x)
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn cfg_101(targets: Vec<BigRational>) -> PipelineConfig {
        PipelineConfig {
            params: SUnitParams::new(2, 3).unwrap(),
            a_num: u(1),
            q_den: u(101),
            delta: 1.0,
            eps: 0.05,
            targets,
            overrides: Overrides::default(),
        }
    }

    #[test]
    fn config_validation_rejects_bad_inputs() {
        let mut c = cfg_101(vec![]);
        c.a_num = u(0);
        assert!(c.validate().is_err()); // gcd(0, 101) = 101

        let mut c = cfg_101(vec![]);
        c.q_den = u(2);
        assert!(matches!(c.validate(), Err(Error::Precondition(_))));

        let mut c = cfg_101(vec![]);
        c.delta = 0.0;
        assert!(c.validate().is_err());

        let mut c = cfg_101(vec![]);
        c.eps = 0.125;
        assert!(c.validate().is_err());

        let c = cfg_101(vec![rat(3, 2)]);
        assert!(c.validate().is_err());

        // δ large enough that M = ⌊Q^{δ/2}⌋ ≥ Q: the net budget refuses.
        let mut c = cfg_101(vec![]);
        c.delta = 4.0;
        assert!(matches!(run_theorem1(&c), Err(Error::Precondition(_))));
    }

    #[test]
    fn theorem1_trace_at_small_scale() {
        // α = 1/101, δ = 1, ε = 0.05: M = 10, M₁ = 1010, Δ = 15/101, n = 2,
        // ℓ clamps −1 → 1, the densest stratum is (s, λ) = (2, 0) with fibre
        // 𝔜 = {0, 1}, and the whole budget is 1010·3² = 9090 ≤ 101².
        let r = run_theorem1(&cfg_101(vec![BigRational::zero(), rat(3, 10)])).unwrap();
        assert_eq!(r.schema, 1);
        assert_eq!(r.m, u(10));
        assert_eq!(r.net.m1, u(1010));
        assert_eq!(r.net.delta, rat(15, 101));
        assert_eq!((r.n, r.n_value.clone()), (2, u(4)));
        assert_eq!((r.l_raw, r.l, r.l_clamped), (-1, 1, true));
        assert_eq!(
            (r.search.stratum.s, r.search.stratum.lambda.clone(), r.search.stratum.x),
            (2, u(0), 2)
        );
        assert_eq!(r.m2, u(1010));
        assert_eq!(r.y_set.members, vec![0, 1]);
        let wv: Vec<&BigUint> = r.witnesses.iter().map(|w| &w.value).collect();
        assert_eq!(wv, vec![&u(1), &u(27)]);
        assert_eq!(r.subgroup.order, 1);
        assert_eq!(r.h, 2.0);
        assert_eq!((r.budget.lhs.clone(), r.budget.rhs.clone(), r.budget.pass),
                   (u(9090), u(10201), true));
        assert!(!r.bw_cap_ok); // 3² = 9 > 2^{s/2} = 2 at this tiny scale
        assert!(r.lemma2.pass);

        // z = 0 is hit by the fibre point y = 0 whose witness is q = 1.
        let t0 = &r.targets[0];
        assert!(t0.search.success);
        assert_eq!((t0.search.w, t0.search.y, t0.search.x.clone()), (0, 0, u(0)));
        assert_eq!(t0.q_star.value, u(1));
        assert_eq!(t0.error, rat(1, 101));
        assert_eq!(t0.guaranteed, rat(1, 4));
        assert!(t0.within_claimed);

        // z = 3/10 lands on y = 1 (grid point 1/2), witnessed by q = 27.
        let t1 = &r.targets[1];
        assert!(t1.search.success);
        assert_eq!((t1.search.w, t1.search.y, t1.search.x.clone()), (0, 1, u(2)));
        assert_eq!(t1.search.err, rat(1, 5));
        assert_eq!((t1.q_star.u, t1.q_star.v, t1.q_star.value.clone()), (0, 3, u(27)));
        assert_eq!(t1.error, rat(33, 1010));
        assert_eq!(t1.guaranteed, rat(9, 20));
        assert!(t1.within_claimed);
    }

    #[test]
    fn overrides_pin_stage_choices() {
        let mut c = cfg_101(vec![rat(3, 10)]);
        c.overrides = Overrides {
            m: Some("10".into()),
            n: Some(2),
            s: Some(2),
            l: Some(1),
            h: Some(2.0),
        };
        let r = run_theorem1(&c).unwrap();
        assert!(!r.l_clamped); // explicit ℓ is taken as-is
        assert_eq!(r.search.grid, vec![2]);
        assert_eq!(r.targets[0].error, rat(33, 1010));

        let mut c = cfg_101(vec![]);
        c.overrides.l = Some(5); // n = 2, so ℓ = 5 is inconsistent
        assert!(run_theorem1(&c).is_err());
    }

    #[test]
    fn brute_force_matches_hand_scan() {
        // Σ(10) = {1,2,3,4,6,8,9}; ‖q·5/7‖ is minimized at q = 3 and q = 4
        // (both 1/7); the tie goes to the smaller element.
        let params = SUnitParams::new(2, 3).unwrap();
        let alpha = RealSpec::rational(rat(5, 7));
        let r = brute_force_best(&params, &alpha, &RealSpec::rational(BigRational::zero()), &u(10))
            .unwrap();
        assert_eq!(r.q.value, u(3));
        assert!(matches!(r.error, ErrorValue::Exact { ref value } if *value == rat(1, 7)));
        assert_eq!(r.mode, SolveMode::Brute);

        // β = α: q = 1 hits exactly.
        let r = brute_force_best(&params, &alpha, &alpha, &u(1000)).unwrap();
        assert_eq!(r.q.value, u(1));
        assert!(matches!(r.error, ErrorValue::Exact { ref value } if value.is_zero()));

        assert!(brute_force_best(&params, &alpha, &alpha, &u(0)).is_err());
    }

    #[test]
    fn brute_force_certifies_irrational_input() {
        // α = √2 − 1, β = 1/2, N = 100: the closest orbit point is
        // {64α} = 64√2 − 90 ≈ 0.509667, within 0.0096679 of 1/2.
        let params = SUnitParams::new(2, 3).unwrap();
        let alpha = RealSpec::Cf { cf: vec![0, 2], period_from: Some(1) };
        let beta = RealSpec::rational(rat(1, 2));
        let r = brute_force_best(&params, &alpha, &beta, &u(100)).unwrap();
        assert_eq!((r.q.u, r.q.v, r.q.value.clone()), (6, 0, u(64)));
        let (lo, hi) = (r.error.lo(), r.error.hi());
        let lo = lo.to_f64().unwrap();
        let hi = hi.to_f64().unwrap();
        assert!(lo <= 0.009668 && 0.009667 <= hi, "enclosure [{lo}, {hi}]");
        assert!(hi - lo <= 2f64.powi(-64));
    }

    #[test]
    fn inhomogeneous_pipeline_dominates_brute() {
        // N = 101² lets the Dirichlet anchor recover Q = 101 exactly, so the
        // pipeline answer is the trace's q* = 27; the exhaustive scan over
        // all of Σ(N) can only improve on it.
        let params = SUnitParams::new(2, 3).unwrap();
        let alpha = RealSpec::rational(rat(1, 101));
        let beta = RealSpec::rational(rat(3, 10));
        let p = solve_inhomogeneous(&params, &alpha, &beta, &u(10201), SolveMode::Pipeline).unwrap();
        assert_eq!(p.mode, SolveMode::Pipeline);
        assert!(p.fallback.is_none());
        assert_eq!(p.q.value, u(27));
        assert!(matches!(p.error, ErrorValue::Exact { ref value } if *value == rat(33, 1010)));
        assert!(p.report.is_some());

        let b = solve_inhomogeneous(&params, &alpha, &beta, &u(10201), SolveMode::Brute).unwrap();
        assert!(b.error.hi() <= p.error.lo());
    }

    #[test]
    fn tiny_denominators_fall_back_with_a_reason() {
        // α = 1/3 pins the anchor at Q = 3, whose net budget M = 1 has a
        // single orbit point — the pipeline declines and says why.
        let params = SUnitParams::new(2, 3).unwrap();
        let alpha = RealSpec::rational(rat(1, 3));
        let beta = RealSpec::rational(rat(1, 5));
        let r = solve_inhomogeneous(&params, &alpha, &beta, &u(1000), SolveMode::Pipeline).unwrap();
        assert_eq!(r.mode, SolveMode::Brute);
        assert!(r.fallback.is_some(), "expected an explicit decline reason");
        // The scan still answers exactly: ‖q/3 − 1/5‖ by residue class is
        // 1/5 (q ≡ 0), 2/15 (q ≡ 1), 7/15 (q ≡ 2); the first q ≡ 1 is q = 1.
        assert_eq!(r.q.value, u(1));
        assert!(matches!(r.error, ErrorValue::Exact { ref value } if *value == rat(2, 15)));
    }

    #[test]
    fn uniform_solver_tracks_fibonacci_anchors() {
        // α = golden − 1 = [0; 1, 1, 1, …]: every convergent denominator is
        // a Fibonacci number, and ‖qα‖ ≥ 0.2/q holds everywhere (q‖qα‖ stays
        // above 1/√5 − o(1)), so the anchor is the largest Fibonacci ≤ 10⁴.
        let params = SUnitParams::new(2, 3).unwrap();
        let alpha = RealSpec::Cf { cf: vec![0, 1], period_from: Some(1) };
        let psi = PsiSpec { k1: 0.2, k2: 1.0 };
        let r = solve_uniform(&params, &alpha, &psi, &u(10_000), 1.0, 0.05).unwrap();
        match &r.witness {
            PsiWitness::Pair { q, .. } => assert_eq!(*q, u(6765)),
            other => panic!("expected a pair, got {other:?}"),
        }
        assert!(r.pipeline.is_some());
        let d = r.density.as_ref().unwrap();
        assert_eq!(d.m, floor_pow(&u(6765), 2.0).unwrap());
        // logloglog 6765 ≈ 0.778 ≤ 1: the asymptotic bound is not defined yet.
        assert!(d.paper_bound.is_none());
        assert!(r.psi_bound.is_none()); // Ψ(10⁴) = 2000 is likewise too small

        // ψ(t) = 1/t is violated immediately: ‖α‖ ≈ 0.382 < 1.
        let psi = PsiSpec { k1: 1.0, k2: 1.0 };
        let r = solve_uniform(&params, &alpha, &psi, &u(10_000), 1.0, 0.05).unwrap();
        assert!(matches!(r.witness, PsiWitness::Violation { .. }));
        assert!(r.pipeline.is_none() && r.density.is_none());
    }

    #[test]
    fn density_report_flags_vacuous_bounds() {
        let params = SUnitParams::new(2, 3).unwrap();
        let alpha = Angle::new(u(1), u(101)).unwrap();
        let d = measure_density(&params, &alpha, 2.0, 0.05).unwrap();
        assert_eq!(d.m, u(10201));
        assert!(d.paper_bound.is_none()); // logloglog 101 ≈ 0.42
        assert!(d.vacuous.is_none());
        assert!(d.point_count >= 2);
        assert!(d.dispersion > BigRational::zero() && d.dispersion < BigRational::one());

        // Q = 5,000,003 clears e^{e^e} ≈ 3,814,279, so the bound exists —
        // at ≈ 0.9995 it is flagged as saying nothing.
        let alpha = Angle::new(u(1), u(5_000_003)).unwrap();
        let d = measure_density(&params, &alpha, 1.0, 0.05).unwrap();
        let b = d.paper_bound.unwrap();
        assert!(b > 0.99 && b < 1.0, "bound {b}");
        assert_eq!(d.vacuous, Some(true));

        assert!(measure_density(&params, &alpha, 0.5, 0.05).is_err());
        let int = Angle::new(u(0), u(1)).unwrap();
        assert!(measure_density(&params, &int, 2.0, 0.05).is_err());
    }

    #[test]
    fn theorem1_stage_values_at_a_billion_scale() {
        use crate::regression as frozen;
        let cfg = PipelineConfig {
            params: SUnitParams::new(2, 3).unwrap(),
            a_num: u(12_345),
            q_den: u(1_000_000_007),
            delta: 0.5,
            eps: 0.05,
            targets: vec![rat(1, 3), rat(9, 10)],
            overrides: Overrides::default(),
        };
        let r = run_theorem1(&cfg).unwrap();
        assert_eq!(r.m, u(frozen::PIPELINE_1E9_M));
        // Δ = 5184·12345/(10⁹ + 7) ≈ 0.064, so three binary digits resolve it;
        // ⌊log₂(3 ln2 / (2 ln3))⌋ = −1 clamps up to ℓ = 1 and ⟨3⟩ mod 2 is
        // trivial (S = 1).
        assert_eq!((r.n, r.l_raw, r.l, r.l_clamped), (frozen::PIPELINE_1E9_N, -1, frozen::PIPELINE_1E9_L, true));
        assert_eq!(r.search.stratum.s, frozen::PIPELINE_1E9_S);
        assert_eq!(r.search.stratum.lambda, u(frozen::PIPELINE_1E9_LAMBDA));
        assert_eq!(r.y_set.y, frozen::PIPELINE_1E9_Y);
        assert_eq!(r.subgroup.order, frozen::PIPELINE_1E9_ORDER);
        assert_eq!(r.h, frozen::PIPELINE_1E9_H);
        // M₂·3^{2¹} = 177000001239·9 against ⌊Q^{3/2}⌋.
        assert_eq!(r.budget.lhs, u(1_593_000_011_151));
        assert_eq!(r.budget.rhs, u(31_622_776_933_722));
        assert_eq!(r.budget.pass, frozen::PIPELINE_1E9_BUDGET_PASS);
        assert!(!r.bw_cap_ok); // 3² > 2^{3/2}: the w-range cap fails at this scale
        for (t, (z, w, y, err)) in r.targets.iter().zip(frozen::PIPELINE_1E9_TARGETS) {
            assert_eq!(t.z, crate::util::parse_rational(z).unwrap());
            assert_eq!((t.search.w, t.search.y), (w, y));
            assert_eq!(t.error, crate::util::parse_rational(err).unwrap());
            assert!(t.search.success && t.within_claimed);
        }
        // z = 1/3 lands on q* = 2⁷·3⁵ = 31104 via the witness at digit x = 4.
        assert_eq!(r.targets[0].q_star.value, u(31_104));
        assert_eq!((r.targets[0].q_star.u, r.targets[0].q_star.v), (7, 5));
        assert_eq!(r.targets[1].q_star.value, u(1));
    }
}
