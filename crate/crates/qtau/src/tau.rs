//! The tau-function series engine.
//!
//! Each family's tau function is a Fourier-type sum over a window of
//! integers n,
//!
//!   tau = sum_n s^n t^{e(sigma+n)} C[sigma+n] Z[sigma+n, t],
//!
//! with e(x) = x^2 - theta_t^2 - theta_0^2 for the VI and V families and
//! e(x) = x^2 for the III families. C is a ratio of q-Barnes functions
//! (kept in log space), and Z is the instanton-type double sum over
//! partition pairs truncated at total weight `n_max` — an exact truncation
//! of the series at order t^{n_max}.
//!
//! Summation order is fixed: n ascending over the window, partition pairs
//! grouped by ascending total weight, so results are bit-reproducible.

use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::nekrasov::{cs_factor, nekrasov_factor, nekrasov_factor_guarded};
use crate::partitions::{enumerate_pairs_upto, Partition};
use crate::qcore::{cpow, log_barnes_q, LogComplex, QContext};

/// Truncation of the two infinite sums: Z-series exact to O(t^{n_max}),
/// Fourier window |n| <= w.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TruncationSpec {
    n_max: u32,
    w: u32,
}

impl TruncationSpec {
    pub fn new(n_max: u32, w: u32) -> Result<Self> {
        if n_max > crate::partitions::ENUM_CEILING {
            return Err(Error::CeilingExceeded {
                requested: n_max,
                ceiling: crate::partitions::ENUM_CEILING,
            });
        }
        if w > 16 {
            return Err(Error::InvalidParameter {
                what: "Fourier window w must be <= 16",
            });
        }
        Ok(TruncationSpec { n_max, w })
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn w(&self) -> u32 {
        self.w
    }
}

impl Default for TruncationSpec {
    /// n_max = 10, w = 5: VI residual checks at |t| <= 0.03 reach 1e-6
    /// within seconds at these settings.
    fn default() -> Self {
        TruncationSpec { n_max: 10, w: 5 }
    }
}

/// Which q-Painleve family a parameter set belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyId {
    VI,
    V,
    III1,
    III2,
    /// q-P III_3 of surface type A7' (first Section 6 tau function).
    III3A7Prime,
    /// q-P III_3 of surface type A7 (alternating-sign tau function).
    III3A7,
}

impl FamilyId {
    pub fn as_str(&self) -> &'static str {
        match self {
            FamilyId::VI => "VI",
            FamilyId::V => "V",
            FamilyId::III1 => "III1",
            FamilyId::III2 => "III2",
            FamilyId::III3A7Prime => "III3A",
            FamilyId::III3A7 => "III3B",
        }
    }

    /// Number of entries in the family's shifted-tau table.
    pub fn shift_count(&self) -> u32 {
        match self {
            FamilyId::VI => 8,
            FamilyId::V => 6,
            FamilyId::III1 => 4,
            FamilyId::III2 => 3,
            FamilyId::III3A7Prime | FamilyId::III3A7 => 2,
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FamilyId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "VI" => Ok(FamilyId::VI),
            "V" => Ok(FamilyId::V),
            "III1" => Ok(FamilyId::III1),
            "III2" => Ok(FamilyId::III2),
            "III3A" => Ok(FamilyId::III3A7Prime),
            "III3B" => Ok(FamilyId::III3A7),
            _ => Err(Error::InvalidParameter {
                what: "unknown family (expected VI, V, III1, III2, III3A or III3B)",
            }),
        }
    }
}

/// q-P VI parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamsVI {
    pub theta1: Complex64,
    pub theta_t: Complex64,
    pub theta_inf: Complex64,
    pub theta0: Complex64,
    pub sigma: Complex64,
    pub s: Complex64,
}

/// q-P V parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamsV {
    pub theta_star: Complex64,
    pub theta_t: Complex64,
    pub theta0: Complex64,
    pub sigma: Complex64,
    pub s: Complex64,
}

/// q-P III_1 parameters (`theta_star2` is the second star-type parameter).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamsIII1 {
    pub theta_star: Complex64,
    pub theta_star2: Complex64,
    pub sigma: Complex64,
    pub s: Complex64,
}

/// q-P III_2 parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamsIII2 {
    pub theta_star: Complex64,
    pub sigma: Complex64,
    pub s: Complex64,
}

/// Surface-type variant of the III_3 tau function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Iii3Variant {
    A7Prime,
    A7,
}

/// q-P III_3 parameters. The A7 variant weights the n-th Fourier term by
/// (-1)^{n^2} = (-1)^n and its Z-series carries inverse Chern-Simons
/// factors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamsIII3 {
    pub sigma: Complex64,
    pub s: Complex64,
    pub variant: Iii3Variant,
}

/// Parameter record of one tau-function family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FamilyParams {
    VI(ParamsVI),
    V(ParamsV),
    III1(ParamsIII1),
    III2(ParamsIII2),
    III3(ParamsIII3),
}

impl FamilyParams {
    pub fn family(&self) -> FamilyId {
        match self {
            FamilyParams::VI(_) => FamilyId::VI,
            FamilyParams::V(_) => FamilyId::V,
            FamilyParams::III1(_) => FamilyId::III1,
            FamilyParams::III2(_) => FamilyId::III2,
            FamilyParams::III3(p) => match p.variant {
                Iii3Variant::A7Prime => FamilyId::III3A7Prime,
                Iii3Variant::A7 => FamilyId::III3A7,
            },
        }
    }

    pub fn sigma(&self) -> Complex64 {
        match self {
            FamilyParams::VI(p) => p.sigma,
            FamilyParams::V(p) => p.sigma,
            FamilyParams::III1(p) => p.sigma,
            FamilyParams::III2(p) => p.sigma,
            FamilyParams::III3(p) => p.sigma,
        }
    }

    pub fn s(&self) -> Complex64 {
        match self {
            FamilyParams::VI(p) => p.s,
            FamilyParams::V(p) => p.s,
            FamilyParams::III1(p) => p.s,
            FamilyParams::III2(p) => p.s,
            FamilyParams::III3(p) => p.s,
        }
    }

    pub fn with_sigma(mut self, sigma: Complex64) -> Self {
        match &mut self {
            FamilyParams::VI(p) => p.sigma = sigma,
            FamilyParams::V(p) => p.sigma = sigma,
            FamilyParams::III1(p) => p.sigma = sigma,
            FamilyParams::III2(p) => p.sigma = sigma,
            FamilyParams::III3(p) => p.sigma = sigma,
        }
        self
    }

    pub fn with_s(mut self, s: Complex64) -> Self {
        match &mut self {
            FamilyParams::VI(p) => p.s = s,
            FamilyParams::V(p) => p.s = s,
            FamilyParams::III1(p) => p.s = s,
            FamilyParams::III2(p) => p.s = s,
            FamilyParams::III3(p) => p.s = s,
        }
        self
    }

    /// t-power exponent of the n-th Fourier term, as a function of
    /// x = sigma + n.
    pub fn t_exponent(&self, x: Complex64) -> Complex64 {
        match self {
            FamilyParams::VI(p) => x * x - p.theta_t * p.theta_t - p.theta0 * p.theta0,
            FamilyParams::V(p) => x * x - p.theta_t * p.theta_t - p.theta0 * p.theta0,
            _ => x * x,
        }
    }
}

/// Rescaling applied to the time variable by a shifted-tau table entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TShift {
    One,
    SqrtQ,
    InvSqrtQ,
}

impl TShift {
    pub fn apply(&self, ctx: &QContext, t: Complex64) -> Complex64 {
        match self {
            TShift::One => t,
            TShift::SqrtQ => t * ctx.sqrt_q(),
            TShift::InvSqrtQ => t / ctx.sqrt_q(),
        }
    }
}

const HALF: Complex64 = Complex64::new(0.5, 0.0);

/// Parameter substitutions of the family's shifted-tau table: returns the
/// substituted parameter record and the t-rescaling. Indices are 1-based
/// (VI: 1-8, V: 1-6, III1: 1-4, III2: 1-3, III3: 1-2).
pub fn shifted_params(params: &FamilyParams, index: u32) -> Result<(FamilyParams, TShift)> {
    let bad = || Error::InvalidIndex {
        family: params.family().as_str(),
        index,
    };
    match params {
        FamilyParams::VI(p) => {
            let mut p = *p;
            let shift = match index {
                1 => {
                    p.theta_inf += HALF;
                    TShift::One
                }
                2 => {
                    p.theta_inf -= HALF;
                    TShift::One
                }
                3 => {
                    p.theta0 += HALF;
                    p.sigma += HALF;
                    TShift::One
                }
                4 => {
                    p.theta0 -= HALF;
                    p.sigma -= HALF;
                    TShift::One
                }
                5 => {
                    p.theta1 -= HALF;
                    TShift::One
                }
                6 => {
                    p.theta1 += HALF;
                    TShift::One
                }
                7 => {
                    p.theta_t -= HALF;
                    p.sigma += HALF;
                    TShift::One
                }
                8 => {
                    p.theta_t += HALF;
                    p.sigma -= HALF;
                    TShift::One
                }
                _ => return Err(bad()),
            };
            Ok((FamilyParams::VI(p), shift))
        }
        FamilyParams::V(p) => {
            let mut p = *p;
            let shift = match index {
                1 => {
                    p.theta_star -= HALF;
                    TShift::InvSqrtQ
                }
                2 => {
                    p.theta_star += HALF;
                    TShift::SqrtQ
                }
                3 => {
                    p.theta0 += HALF;
                    p.sigma += HALF;
                    TShift::One
                }
                4 => {
                    p.theta0 -= HALF;
                    p.sigma -= HALF;
                    TShift::One
                }
                5 => {
                    p.theta_t -= HALF;
                    p.sigma += HALF;
                    TShift::One
                }
                6 => {
                    p.theta_t += HALF;
                    p.sigma -= HALF;
                    TShift::One
                }
                _ => return Err(bad()),
            };
            Ok((FamilyParams::V(p), shift))
        }
        FamilyParams::III1(p) => {
            let mut p = *p;
            let shift = match index {
                1 => {
                    p.theta_star -= HALF;
                    TShift::InvSqrtQ
                }
                2 => {
                    p.theta_star += HALF;
                    TShift::SqrtQ
                }
                3 => {
                    p.theta_star2 -= HALF;
                    p.sigma += HALF;
                    TShift::InvSqrtQ
                }
                4 => {
                    p.theta_star2 += HALF;
                    p.sigma -= HALF;
                    TShift::SqrtQ
                }
                _ => return Err(bad()),
            };
            Ok((FamilyParams::III1(p), shift))
        }
        FamilyParams::III2(p) => {
            let mut p = *p;
            let shift = match index {
                1 => {
                    p.theta_star -= HALF;
                    TShift::InvSqrtQ
                }
                2 => {
                    p.theta_star += HALF;
                    p.sigma += Complex64::ONE;
                    TShift::SqrtQ
                }
                3 => {
                    p.sigma += HALF;
                    TShift::One
                }
                _ => return Err(bad()),
            };
            Ok((FamilyParams::III2(p), shift))
        }
        FamilyParams::III3(p) => {
            let mut p = *p;
            let shift = match (p.variant, index) {
                (Iii3Variant::A7Prime, 1) => TShift::One,
                (Iii3Variant::A7Prime, 2) => {
                    p.sigma += HALF;
                    TShift::One
                }
                (Iii3Variant::A7, 1) => TShift::InvSqrtQ,
                (Iii3Variant::A7, 2) => {
                    // The half-shifted member of the A7 family is the plain
                    // (unweighted) sum; with the (-1)^n convention of the
                    // base tau this is realized by flipping the sign of s.
                    p.sigma += HALF;
                    p.s = -p.s;
                    TShift::One
                }
                _ => return Err(bad()),
            };
            Ok((FamilyParams::III3(p), shift))
        }
    }
}

/// log(q - 1) with the principal branch (q - 1 is negative real).
pub(crate) fn log_qm1(ctx: &QContext) -> LogComplex {
    LogComplex::new(libm::log(1.0 - ctx.q()), core::f64::consts::PI)
}

/// The structure constant C of the family at the given sigma (callers pass
/// sigma + n), in log space.
pub fn cconst(ctx: &QContext, params: &FamilyParams, sigma: Complex64) -> Result<LogComplex> {
    let g = |u: Complex64| log_barnes_q(ctx, u);
    let one = Complex64::ONE;
    let two = Complex64::new(2.0, 0.0);
    match params {
        FamilyParams::VI(p) => {
            let mut acc = LogComplex::ZERO;
            for eps in [1.0, -1.0] {
                for eps2 in [1.0, -1.0] {
                    acc += g(one + eps * p.theta_inf - p.theta1 + eps2 * sigma)?;
                    acc += g(one + eps * sigma - p.theta_t + eps2 * p.theta0)?;
                }
            }
            acc -= g(one + two * sigma)?;
            acc -= g(one - two * sigma)?;
            Ok(acc)
        }
        FamilyParams::V(p) => {
            let mut acc = log_qm1(ctx).scaled(-(sigma * sigma));
            for eps in [1.0, -1.0] {
                acc += g(one - p.theta_star + eps * sigma)?;
                acc -= g(one + eps * two * sigma)?;
                for eps2 in [1.0, -1.0] {
                    acc += g(one + eps * sigma - p.theta_t + eps2 * p.theta0)?;
                }
            }
            Ok(acc)
        }
        FamilyParams::III1(p) => {
            let mut acc = log_qm1(ctx).scaled(-(sigma * sigma) * 2.0);
            for eps in [1.0, -1.0] {
                acc += g(one - p.theta_star + eps * sigma)?;
                acc += g(one + eps * sigma - p.theta_star2)?;
                acc -= g(one + eps * two * sigma)?;
            }
            Ok(acc)
        }
        FamilyParams::III2(p) => {
            let mut acc = log_qm1(ctx).scaled(-(sigma * sigma) * 3.0);
            for eps in [1.0, -1.0] {
                acc += g(one - p.theta_star + eps * sigma)?;
                acc -= g(one + eps * two * sigma)?;
            }
            Ok(acc)
        }
        FamilyParams::III3(_) => {
            let mut acc = log_qm1(ctx).scaled(-(sigma * sigma) * 4.0);
            acc -= g(one + two * sigma)?;
            acc -= g(one - two * sigma)?;
            Ok(acc)
        }
    }
}

/// The four-factor Nekrasov denominator of every Z-series, with the
/// vanishing-factor guard that enforces genericity of sigma.
fn z_denominator(
    ctx: &QContext,
    lp: &Partition,
    lm: &Partition,
    u_plus: Complex64,
    u_minus: Complex64,
) -> Result<Complex64> {
    Ok(nekrasov_factor_guarded(ctx, lp, lp, Complex64::ONE)?
        * nekrasov_factor_guarded(ctx, lm, lm, Complex64::ONE)?
        * nekrasov_factor_guarded(ctx, lp, lm, u_plus)?
        * nekrasov_factor_guarded(ctx, lm, lp, u_minus)?)
}

/// Per-pair numerator of the family's Z-series.
fn z_numerator(
    ctx: &QContext,
    params: &FamilyParams,
    sigma: Complex64,
    pair: (&Partition, &Partition),
) -> Result<Complex64> {
    let empty = Partition::empty();
    let lam = |eps: f64| if eps > 0.0 { pair.0 } else { pair.1 };
    let mut acc = Complex64::ONE;
    match params {
        FamilyParams::VI(p) => {
            for eps in [1.0, -1.0] {
                for eps2 in [1.0, -1.0] {
                    let u1 = ctx.q_powc(eps * p.theta_inf - p.theta1 - eps2 * sigma);
                    acc *= nekrasov_factor(ctx, &empty, lam(eps2), u1);
                    let u2 = ctx.q_powc(eps * sigma - p.theta_t - eps2 * p.theta0);
                    acc *= nekrasov_factor(ctx, lam(eps), &empty, u2);
                }
            }
        }
        FamilyParams::V(p) => {
            for eps in [1.0, -1.0] {
                let u1 = ctx.q_powc(-p.theta_star - eps * sigma);
                acc *= nekrasov_factor(ctx, &empty, lam(eps), u1);
                acc *= cs_factor(ctx, lam(eps), ctx.q_powc(eps * sigma))?;
                for eps2 in [1.0, -1.0] {
                    let u2 = ctx.q_powc(eps * sigma - p.theta_t - eps2 * p.theta0);
                    acc *= nekrasov_factor(ctx, lam(eps), &empty, u2);
                }
            }
        }
        FamilyParams::III1(p) => {
            for eps in [1.0, -1.0] {
                let u1 = ctx.q_powc(-p.theta_star - eps * sigma);
                acc *= nekrasov_factor(ctx, &empty, lam(eps), u1);
                let u2 = ctx.q_powc(eps * sigma - p.theta_star2);
                acc *= nekrasov_factor(ctx, lam(eps), &empty, u2);
            }
        }
        FamilyParams::III2(p) => {
            for eps in [1.0, -1.0] {
                let u1 = ctx.q_powc(-p.theta_star - eps * sigma);
                acc *= nekrasov_factor(ctx, &empty, lam(eps), u1);
                acc /= cs_factor(ctx, lam(eps), ctx.q_powc(eps * sigma))?;
            }
        }
        FamilyParams::III3(p) => {
            if p.variant == Iii3Variant::A7 {
                for eps in [1.0, -1.0] {
                    acc /= cs_factor(ctx, lam(eps), ctx.q_powc(eps * sigma))?;
                }
            }
        }
    }
    Ok(acc)
}

/// The instanton-type series Z of the family at the given sigma, truncated
/// exactly at total partition weight `n_max`.
///
/// `params` supplies the family and theta-values; the explicit `sigma`
/// argument is used in place of the record's own (callers pass sigma + n).
pub fn zseries(
    ctx: &QContext,
    params: &FamilyParams,
    sigma: Complex64,
    t: Complex64,
    n_max: u32,
) -> Result<Complex64> {
    let u_plus = ctx.q_powc(2.0 * sigma);
    let u_minus = u_plus.inv();
    let mut acc = Complex64::ZERO;
    for (lp, lm) in enumerate_pairs_upto(n_max)? {
        let weight = lp.weight() + lm.weight();
        let num = z_numerator(ctx, params, sigma, (&lp, &lm))?;
        let den = z_denominator(ctx, &lp, &lm, u_plus, u_minus)?;
        acc += t.powu(weight) * num / den;
    }
    Ok(acc)
}

/// Chern-Simons-free variant of the V-family Z-series. Related to
/// [`zseries`] for the V family by the change of variables
/// Z_V[ts,tt,t0 | sigma, t] = Z_V^{CS=0}[-ts,-tt,t0 | sigma, q^{-ts-2tt} t].
pub fn zseries_v_cs0(
    ctx: &QContext,
    theta_star: Complex64,
    theta_t: Complex64,
    theta0: Complex64,
    sigma: Complex64,
    t: Complex64,
    n_max: u32,
) -> Result<Complex64> {
    let empty = Partition::empty();
    let u_plus = ctx.q_powc(2.0 * sigma);
    let u_minus = u_plus.inv();
    let mut acc = Complex64::ZERO;
    for (lp, lm) in enumerate_pairs_upto(n_max)? {
        let weight = lp.weight() + lm.weight();
        let lam = |eps: f64| if eps > 0.0 { &lp } else { &lm };
        let mut num = Complex64::ONE;
        for eps in [1.0, -1.0] {
            num *= nekrasov_factor(ctx, &empty, lam(eps), ctx.q_powc(-theta_star - eps * sigma));
            for eps2 in [1.0, -1.0] {
                let u = ctx.q_powc(eps * sigma - theta_t - eps2 * theta0);
                num *= nekrasov_factor(ctx, lam(eps), &empty, u);
            }
        }
        let den = z_denominator(ctx, &lp, &lm, u_plus, u_minus)?;
        acc += t.powu(weight) * num / den;
    }
    Ok(acc)
}

/// Chern-Simons-free variant of the III_2 Z-series:
/// Z_III2[ts | sigma, t] = Z_III2^{CS=0}[-ts | sigma, q^{-ts} t].
pub fn zseries_iii2_cs0(
    ctx: &QContext,
    theta_star: Complex64,
    sigma: Complex64,
    t: Complex64,
    n_max: u32,
) -> Result<Complex64> {
    let empty = Partition::empty();
    let u_plus = ctx.q_powc(2.0 * sigma);
    let u_minus = u_plus.inv();
    let mut acc = Complex64::ZERO;
    for (lp, lm) in enumerate_pairs_upto(n_max)? {
        let weight = lp.weight() + lm.weight();
        let num = nekrasov_factor(ctx, &empty, &lp, ctx.q_powc(-theta_star - sigma))
            * nekrasov_factor(ctx, &empty, &lm, ctx.q_powc(-theta_star + sigma));
        let den = z_denominator(ctx, &lp, &lm, u_plus, u_minus)?;
        acc += t.powu(weight) * num / den;
    }
    Ok(acc)
}

/// Tau function of the family at time t.
pub fn tau(
    ctx: &QContext,
    params: &FamilyParams,
    t: Complex64,
    trunc: &TruncationSpec,
) -> Result<Complex64> {
    tau_scaled(ctx, params, t, trunc, &LogComplex::ZERO)
}

/// Tau function with an extra log-space prefactor multiplied into every
/// Fourier term before exponentiation.
///
/// The degeneration module passes the scaling constant C_i here so that
/// C_i * tau stays within f64 range even when tau alone overflows.
pub fn tau_scaled(
    ctx: &QContext,
    params: &FamilyParams,
    t: Complex64,
    trunc: &TruncationSpec,
    extra_log: &LogComplex,
) -> Result<Complex64> {
    let sigma = params.sigma();
    let s = params.s();
    let alternating = matches!(
        params,
        FamilyParams::III3(p) if p.variant == Iii3Variant::A7
    );

    // t = 0: only the n = 0 term survives, with Z(0) = 1 and the t-power
    // resolved by cpow's conventions at zero base.
    if t == Complex64::ZERO {
        let c = cconst(ctx, params, sigma).map_err(|e| e.with_window_index(0))?;
        let tp = cpow(t, params.t_exponent(sigma))?;
        return Ok((*extra_log + c).to_complex() * tp);
    }

    let log_t = LogComplex::from_complex(t)?;
    let log_s = if s == Complex64::ZERO {
        None
    } else {
        Some(LogComplex::from_complex(s)?)
    };

    let w = trunc.w() as i32;
    let mut acc = Complex64::ZERO;
    for n in -w..=w {
        if n != 0 && log_s.is_none() {
            continue; // s = 0 collapses the window to the n = 0 term
        }
        let x = sigma + Complex64::new(n as f64, 0.0);
        let c = cconst(ctx, params, x).map_err(|e| e.with_window_index(n))?;
        let mut term_log = *extra_log + c + log_t.scaled(params.t_exponent(x));
        if let Some(ls) = log_s {
            term_log += ls.scaled_int(n);
        }
        let z = zseries(ctx, params, x, t, trunc.n_max()).map_err(|e| e.with_window_index(n))?;
        let sign = if alternating && n.rem_euclid(2) == 1 {
            -1.0
        } else {
            1.0
        };
        acc += term_log.to_complex() * z * sign;
    }
    Ok(acc)
}

/// The family's i-th shifted tau function at time t.
pub fn tau_shifted(
    ctx: &QContext,
    params: &FamilyParams,
    index: u32,
    t: Complex64,
    trunc: &TruncationSpec,
) -> Result<Complex64> {
    tau_shifted_scaled(ctx, params, index, t, trunc, &LogComplex::ZERO)
}

/// Shifted tau with an extra log-space prefactor (see [`tau_scaled`]).
pub fn tau_shifted_scaled(
    ctx: &QContext,
    params: &FamilyParams,
    index: u32,
    t: Complex64,
    trunc: &TruncationSpec,
    extra_log: &LogComplex,
) -> Result<Complex64> {
    let (shifted, tshift) = shifted_params(params, index)?;
    tau_scaled(ctx, &shifted, tshift.apply(ctx, t), trunc, extra_log)
}

/// Default generic parameter records used by tests and the CLI: a
/// documented point with irrational-looking decimals away from the
/// pole/zero lattices.
pub fn default_params(family: FamilyId) -> FamilyParams {
    let c = |x: f64| Complex64::new(x, 0.0);
    match family {
        FamilyId::VI => FamilyParams::VI(ParamsVI {
            theta1: c(0.11),
            theta_t: c(0.23),
            theta_inf: c(0.31),
            theta0: c(0.17),
            sigma: c(0.41),
            s: c(0.9),
        }),
        FamilyId::V => FamilyParams::V(ParamsV {
            theta_star: c(0.19),
            theta_t: c(0.23),
            theta0: c(0.17),
            sigma: c(0.29),
            s: c(0.9),
        }),
        FamilyId::III1 => FamilyParams::III1(ParamsIII1 {
            theta_star: c(0.19),
            theta_star2: c(0.13),
            sigma: c(0.29),
            s: c(0.9),
        }),
        FamilyId::III2 => FamilyParams::III2(ParamsIII2 {
            theta_star: c(0.19),
            sigma: c(0.29),
            s: c(0.9),
        }),
        FamilyId::III3A7Prime => FamilyParams::III3(ParamsIII3 {
            sigma: c(0.27),
            s: c(0.8),
            variant: Iii3Variant::A7Prime,
        }),
        FamilyId::III3A7 => FamilyParams::III3(ParamsIII3 {
            sigma: c(0.27),
            s: c(0.8),
            variant: Iii3Variant::A7,
        }),
    }
}

/// Default time value for the documented generic point of each family.
pub fn default_t(family: FamilyId) -> Complex64 {
    match family {
        FamilyId::VI | FamilyId::V | FamilyId::III1 | FamilyId::III2 => Complex64::new(0.03, 0.0),
        _ => Complex64::new(0.02, 0.0),
    }
}

/// All six family identifiers in report order.
pub const ALL_FAMILIES: [FamilyId; 6] = [
    FamilyId::VI,
    FamilyId::V,
    FamilyId::III1,
    FamilyId::III2,
    FamilyId::III3A7Prime,
    FamilyId::III3A7,
];

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ctx() -> QContext {
        QContext::new(0.5).unwrap()
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
    }

    #[test]
    fn zseries_at_zero_t_is_one() {
        let k = ctx();
        for fam in ALL_FAMILIES {
            let p = default_params(fam);
            let z = zseries(&k, &p, p.sigma(), Complex64::ZERO, 4).unwrap();
            assert!(rel(z, Complex64::ONE) < 1e-15, "{fam}");
        }
    }

    /// First-order coefficient of the A7' III_3 series against the closed
    /// form 2 / [(1-1/q)(1-q)(1-q^{2s})(1-q^{-2s})] from the two weight-one
    /// pairs (independent brute-force value 28.22000357878362 at q = 0.5,
    /// sigma = 0.27).
    #[test]
    fn iii3a_first_coefficient() {
        let k = ctx();
        let p = default_params(FamilyId::III3A7Prime);
        let sigma = c(0.27, 0.0);
        let z1 = zseries(&k, &p, sigma, Complex64::ONE, 1).unwrap() - Complex64::ONE;
        let q = 0.5;
        let s2 = k.q_powc(2.0 * sigma).re;
        let brute = 2.0 / ((1.0 - 1.0 / q) * (1.0 - q) * (1.0 - s2) * (1.0 - 1.0 / s2));
        assert!(rel(z1, c(brute, 0.0)) < 1e-12);
        assert!(rel(z1, c(28.22000357878362, 0.0)) < 1e-12);
    }

    /// Exact truncation: n_max = 2 and n_max = 4 agree to O(t^3).
    #[test]
    fn zseries_truncation_orders() {
        let k = ctx();
        let p = default_params(FamilyId::VI);
        let t = c(0.05, 0.0);
        let z2 = zseries(&k, &p, p.sigma(), t, 2).unwrap();
        let z4 = zseries(&k, &p, p.sigma(), t, 4).unwrap();
        let diff = (z2 - z4).norm();
        assert!(diff > 0.0 && diff < 5e-4, "diff = {diff}");
    }

    /// Z for III3 (A7') has real coefficients for real sigma and q.
    #[test]
    fn iii3a_real_coefficients() {
        let k = ctx();
        let p = default_params(FamilyId::III3A7Prime);
        let z = zseries(&k, &p, c(0.27, 0.0), c(0.04, 0.0), 8).unwrap();
        assert!(z.im.abs() < 1e-13 * z.norm());
    }

    /// CS removal for V: Z_V[ts,tt,t0|sigma,t] =
    /// Z_V^{CS=0}[-ts,-tt,t0|sigma,q^{-ts-2tt} t] at every order <= 8.
    #[test]
    fn cs_removal_v() {
        let k = ctx();
        let (ts, tt, t0) = (c(0.19, 0.0), c(0.23, 0.0), c(0.17, 0.0));
        let sigma = c(0.29, 0.0);
        let t = c(0.05, 0.0);
        let p = FamilyParams::V(ParamsV {
            theta_star: ts,
            theta_t: tt,
            theta0: t0,
            sigma,
            s: c(0.9, 0.0),
        });
        for n_max in 0u32..=8 {
            let lhs = zseries(&k, &p, sigma, t, n_max).unwrap();
            let t_resc = k.q_powc(-ts - 2.0 * tt) * t;
            let rhs = zseries_v_cs0(&k, -ts, -tt, t0, sigma, t_resc, n_max).unwrap();
            assert!(rel(lhs, rhs) < 1e-10, "order {n_max}: {}", rel(lhs, rhs));
        }
    }

    /// CS removal for III_2: Z[ts|sigma,t] = Z^{CS=0}[-ts|sigma,q^{-ts} t].
    #[test]
    fn cs_removal_iii2() {
        let k = ctx();
        let ts = c(0.19, 0.0);
        let sigma = c(0.29, 0.0);
        let t = c(0.05, 0.0);
        let p = FamilyParams::III2(ParamsIII2 {
            theta_star: ts,
            sigma,
            s: c(0.9, 0.0),
        });
        for n_max in [3u32, 6] {
            let lhs = zseries(&k, &p, sigma, t, n_max).unwrap();
            let rhs = zseries_iii2_cs0(&k, -ts, sigma, k.q_powc(-ts) * t, n_max).unwrap();
            assert!(rel(lhs, rhs) < 1e-10, "order {n_max}");
        }
    }

    /// The III_3 structure constant against a direct product of the two
    /// q-Barnes values.
    #[test]
    fn cconst_iii3_direct() {
        let k = ctx();
        let p = default_params(FamilyId::III3A7Prime);
        let sigma = c(0.17, 0.0);
        let lc = cconst(&k, &p, sigma).unwrap().to_complex();
        let g1 = crate::qcore::barnes_q(&k, Complex64::ONE + 2.0 * sigma).unwrap();
        let g2 = crate::qcore::barnes_q(&k, Complex64::ONE - 2.0 * sigma).unwrap();
        let qm1 = cpow(c(-0.5, 0.0), -4.0 * sigma * sigma).unwrap();
        assert!(rel(lc, qm1 / (g1 * g2)) < 1e-12);
    }

    /// cconst(sigma+1)/cconst(sigma) for the III_3 family against the
    /// shift identity assembled from Gamma_q factors and q-numbers.
    #[test]
    fn cconst_shift_ratio() {
        let k = ctx();
        let p = default_params(FamilyId::III3A7Prime);
        let sigma = c(0.27, 0.0);
        let lhs = (cconst(&k, &p, sigma + Complex64::ONE).unwrap()
            - cconst(&k, &p, sigma).unwrap())
        .to_complex();
        // shift identity at x = -1 (so 1 - x = 2sigma-side arguments):
        // G(1±2(sigma+1)) in terms of G(1±2sigma): with n = 2 in the
        // eq-Gqn identity at x = -1, sigma' = 2 sigma:
        let x = Complex64::ZERO;
        let s2 = 2.0 * sigma;
        let mut prod = crate::qcore::gamma_q(&k, -x + s2).unwrap().powi(2)
            * crate::qcore::gamma_q(&k, -x - s2).unwrap().powi(-2);
        for i in 0..2 {
            prod *= crate::qcore::q_number(&k, -x + s2);
            for j in 1..=i {
                prod *= crate::qcore::q_number(&k, -x + s2 + c(j as f64, 0.0))
                    * crate::qcore::q_number(&k, -x - s2 - c(j as f64, 0.0));
            }
        }
        // C ratio = (q-1)^{-4(sigma+1)^2+4 sigma^2} / prod
        let qm1 = cpow(c(-0.5, 0.0), -4.0 * (2.0 * sigma + Complex64::ONE)).unwrap();
        assert!(rel(lhs, qm1 / prod) < 1e-10, "rel {}", rel(lhs, qm1 / prod));
    }

    #[test]
    fn tau_window_basics() {
        let k = ctx();
        let p = default_params(FamilyId::III3A7Prime);
        let t = c(0.02, 0.0);
        // w = 0 reduces to the single n = 0 term
        let w0 = TruncationSpec::new(6, 0).unwrap();
        let single = tau(&k, &p, t, &w0).unwrap();
        let direct = cconst(&k, &p, p.sigma()).unwrap().to_complex()
            * cpow(t, p.t_exponent(p.sigma())).unwrap()
            * zseries(&k, &p, p.sigma(), t, 6).unwrap();
        assert!(rel(single, direct) < 1e-14);
        // s = 0 with w >= 1 also reduces to the n = 0 term
        let w3 = TruncationSpec::new(6, 3).unwrap();
        let s0 = tau(&k, &p.with_s(Complex64::ZERO), t, &w3).unwrap();
        let direct0 = tau(&k, &p.with_s(Complex64::ZERO), t, &w0).unwrap();
        assert!(rel(s0, direct0) < 1e-15);
    }

    /// Window tail: adding n = +/-(w+1) changes tau by exactly the dropped
    /// terms (checked at a time value where they resolve above rounding
    /// noise), and the tail at the default point is below the
    /// |t|^{(sigma+w+1)^2 - (sigma+w)^2} relative-scale estimate.
    #[test]
    fn tau_window_tail() {
        let k = ctx();
        let p = default_params(FamilyId::III3A7Prime);
        let t = c(0.25, 0.0);
        let w1 = TruncationSpec::new(6, 1).unwrap();
        let w2 = TruncationSpec::new(6, 2).unwrap();
        let v1 = tau(&k, &p, t, &w1).unwrap();
        let v2 = tau(&k, &p, t, &w2).unwrap();
        let mut dropped = Complex64::ZERO;
        for n in [-2i32, 2] {
            let x = p.sigma() + c(n as f64, 0.0);
            let term = cconst(&k, &p, x).unwrap().to_complex()
                * cpow(t, p.t_exponent(x)).unwrap()
                * cpow(p.s(), c(n as f64, 0.0)).unwrap()
                * zseries(&k, &p, x, t, 6).unwrap();
            dropped += term;
        }
        assert!(rel(v2 - v1, dropped) < 1e-8, "{}", rel(v2 - v1, dropped));
        // default point: widening the window w = 3 -> 4 moves tau by less
        // than |t|^{2 sigma + 7} relative to the value
        let t0 = c(0.02, 0.0);
        let v3 = tau(&k, &p, t0, &TruncationSpec::new(6, 3).unwrap()).unwrap();
        let v4 = tau(&k, &p, t0, &TruncationSpec::new(6, 4).unwrap()).unwrap();
        let bound = libm::pow(0.02, 2.0 * 0.27 + 7.0);
        assert!((v4 - v3).norm() <= bound * v3.norm());
    }

    /// Truncation exactness: raising n_max by 2 changes tau by O(t^{n_max+1}).
    #[test]
    fn tau_truncation_refinement() {
        let k = ctx();
        let p = default_params(FamilyId::VI);
        let t = c(0.05, 0.0);
        let a = tau(&k, &p, t, &TruncationSpec::new(4, 3).unwrap()).unwrap();
        let b = tau(&k, &p, t, &TruncationSpec::new(6, 3).unwrap()).unwrap();
        let c6 = tau(&k, &p, t, &TruncationSpec::new(8, 3).unwrap()).unwrap();
        let d1 = (a - b).norm();
        let d2 = (b - c6).norm();
        assert!(d2 < d1 * 0.05 / 0.1, "d1={d1} d2={d2}");
    }

    #[test]
    fn tau_shifted_tables() {
        let k = ctx();
        let t = c(0.02, 0.0);
        let trunc = TruncationSpec::new(5, 2).unwrap();
        // III2 index 3 equals tau at sigma + 1/2 unshifted otherwise
        let p2 = default_params(FamilyId::III2);
        let shifted = tau_shifted(&k, &p2, 3, t, &trunc).unwrap();
        let direct = tau(&k, &p2.with_sigma(p2.sigma() + HALF), t, &trunc).unwrap();
        assert_eq!(shifted, direct);
        // III3A index 1 is tau itself
        let p3 = default_params(FamilyId::III3A7Prime);
        assert_eq!(
            tau_shifted(&k, &p3, 1, t, &trunc).unwrap(),
            tau(&k, &p3, t, &trunc).unwrap()
        );
        // VI index 3 agrees bit-for-bit with the relabeled direct call
        let pv = default_params(FamilyId::VI);
        let FamilyParams::VI(raw) = pv else {
            unreachable!()
        };
        let direct_params = FamilyParams::VI(ParamsVI {
            theta0: raw.theta0 + HALF,
            sigma: raw.sigma + HALF,
            ..raw
        });
        assert_eq!(
            tau_shifted(&k, &pv, 3, t, &trunc).unwrap(),
            tau(&k, &direct_params, t, &trunc).unwrap()
        );
        // invalid indices
        assert!(tau_shifted(&k, &pv, 0, t, &trunc).is_err());
        assert!(tau_shifted(&k, &pv, 9, t, &trunc).is_err());
        assert!(tau_shifted(&k, &p2, 4, t, &trunc).is_err());
    }

    #[test]
    fn tau_at_zero_t() {
        let k = ctx();
        let p = default_params(FamilyId::III3A7Prime);
        let trunc = TruncationSpec::new(4, 2).unwrap();
        // exponent sigma^2 has positive real part, so the t-power vanishes
        let v = tau(&k, &p, Complex64::ZERO, &trunc).unwrap();
        assert_eq!(v, Complex64::ZERO);
    }

    /// Non-generic sigma (2 sigma integer) is rejected loudly.
    #[test]
    fn genericity_guard() {
        let k = ctx();
        let p = default_params(FamilyId::III3A7Prime).with_sigma(c(0.5, 0.0));
        let err = zseries(&k, &p, c(0.5, 0.0), c(0.02, 0.0), 2);
        assert!(matches!(err, Err(Error::DenominatorVanishing { .. })));
        let trunc = TruncationSpec::new(2, 1).unwrap();
        let err = tau(&k, &p, c(0.02, 0.0), &trunc);
        match err {
            Err(Error::DenominatorVanishing { window_index, .. })
            | Err(Error::Pole { window_index, .. }) => {
                assert!(window_index.is_some());
            }
            other => panic!("expected denominator/pole error, got {other:?}"),
        }
    }

    /// Recomputing at doubled product-tail precision moves tau by less
    /// than the prior tail bound.
    #[test]
    fn tau_tail_tol_stability() {
        let base = QContext::new(0.5)
            .unwrap()
            .with_prod_tail_tol(1e-11)
            .unwrap();
        let fine = QContext::new(0.5)
            .unwrap()
            .with_prod_tail_tol(5e-12)
            .unwrap();
        let p = default_params(FamilyId::III3A7Prime);
        let t = c(0.02, 0.0);
        let trunc = TruncationSpec::new(6, 3).unwrap();
        let a = tau(&base, &p, t, &trunc).unwrap();
        let b = tau(&fine, &p, t, &trunc).unwrap();
        assert!((a - b).norm() < 1e-9 * a.norm());
    }

    /// Reference tau values computed independently at high precision.
    #[test]
    fn tau_reference_values() {
        let k = ctx();
        let trunc = TruncationSpec::new(6, 3).unwrap();
        let p3 = default_params(FamilyId::III3A7Prime);
        let v3 = tau(&k, &p3, c(0.02, 0.0), &trunc).unwrap();
        assert!(
            rel(v3, c(-0.5614540608173631, -0.8149159269584756)) < 1e-11,
            "III3A tau = {v3}"
        );
        let pv = default_params(FamilyId::VI);
        let vv = tau(&k, &pv, c(0.03, 0.0), &trunc).unwrap();
        assert!(
            rel(vv, c(0.12913140365001627, 0.0)) < 1e-11,
            "VI tau = {vv}"
        );
    }

    /// First Z coefficients for VI and V against independently computed
    /// reference values at the default generic points.
    #[test]
    fn z_first_coefficients_reference() {
        let k = ctx();
        let pv = default_params(FamilyId::VI);
        let z = zseries(&k, &pv, pv.sigma(), Complex64::ONE, 1).unwrap() - Complex64::ONE;
        assert!(rel(z, c(-0.0030999373874474997, 0.0)) < 1e-11, "VI: {z}");
        let p_v = default_params(FamilyId::V);
        let zv = zseries(&k, &p_v, p_v.sigma(), Complex64::ONE, 1).unwrap() - Complex64::ONE;
        assert!(rel(zv, c(-0.1813983698657066, 0.0)) < 1e-11, "V: {zv}");
    }

    /// Enumerated pair order is the documented deterministic one (weight
    /// groups ascending).
    #[test]
    fn deterministic_summation() {
        let k = ctx();
        let p = default_params(FamilyId::VI);
        let t = c(0.03, 0.0);
        let trunc = TruncationSpec::new(6, 3).unwrap();
        let a = tau(&k, &p, t, &trunc).unwrap();
        let b = tau(&k, &p, t, &trunc).unwrap();
        assert_eq!(a, b);
        let _: Vec<_> = enumerate_pairs_upto(3).unwrap();
    }
}
