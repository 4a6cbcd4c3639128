//! Numerical verification of the confluence cascade
//! VI -> V -> III_1 -> III_2 -> III_3 (both variants).
//!
//! Each step substitutes Lambda-dependent parameters into the source
//! family, multiplies the source tau functions by explicit scaling
//! constants C_i, and compares against the target tau functions; the
//! mismatch decays like a power of q^Lambda. The C_i * tau products are
//! assembled per Fourier term in log space so finite-Lambda evaluation
//! stays inside f64 range even where tau alone would overflow.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::{log_gamma_q, LogComplex, QContext};
use crate::tau::{
    log_qm1, tau_shifted, tau_shifted_scaled, FamilyId, FamilyParams, ParamsIII1, ParamsIII2,
    ParamsV, ParamsVI, TruncationSpec,
};

/// One step of the degeneration cascade.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StepId {
    ViToV,
    VToIii1,
    Iii1ToIii2,
    Iii2ToIii3A,
    Iii2ToIii3B,
}

impl StepId {
    pub fn as_str(&self) -> &'static str {
        match self {
            StepId::ViToV => "VI_to_V",
            StepId::VToIii1 => "V_to_III1",
            StepId::Iii1ToIii2 => "III1_to_III2",
            StepId::Iii2ToIii3A => "III2_to_III3A",
            StepId::Iii2ToIii3B => "III2_to_III3B",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "VI_to_V" => Ok(StepId::ViToV),
            "V_to_III1" => Ok(StepId::VToIii1),
            "III1_to_III2" => Ok(StepId::Iii1ToIii2),
            "III2_to_III3A" => Ok(StepId::Iii2ToIii3A),
            "III2_to_III3B" => Ok(StepId::Iii2ToIii3B),
            _ => Err(Error::InvalidParameter {
                what: "unknown degeneration step id",
            }),
        }
    }

    /// Family of the step's target tau functions.
    pub fn target_family(&self) -> FamilyId {
        match self {
            StepId::ViToV => FamilyId::V,
            StepId::VToIii1 => FamilyId::III1,
            StepId::Iii1ToIii2 => FamilyId::III2,
            StepId::Iii2ToIii3A => FamilyId::III3A7Prime,
            StepId::Iii2ToIii3B => FamilyId::III3A7,
        }
    }

    pub const ALL: [StepId; 5] = [
        StepId::ViToV,
        StepId::VToIii1,
        StepId::Iii1ToIii2,
        StepId::Iii2ToIii3A,
        StepId::Iii2ToIii3B,
    ];
}

impl core::fmt::Display for StepId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Multiplicative time rescale of an index-map target.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TFactor {
    One,
    Q,
    InvQ,
}

impl TFactor {
    pub fn apply(&self, ctx: &QContext, t: Complex64) -> Complex64 {
        match self {
            TFactor::One => t,
            TFactor::Q => t * ctx.q(),
            TFactor::InvQ => t / ctx.q(),
        }
    }
}

/// One entry of a step's index map: C_source * tau_source converges to
/// sign * s_tilde^{s_power} * tau_target(t1 rescaled by t_factor).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IndexMapEntry {
    pub source: u32,
    pub target: u32,
    pub t_factor: TFactor,
    pub s_power: i32,
    pub sign: f64,
}

const fn entry(
    source: u32,
    target: u32,
    t_factor: TFactor,
    s_power: i32,
    sign: f64,
) -> IndexMapEntry {
    IndexMapEntry {
        source,
        target,
        t_factor,
        s_power,
        sign,
    }
}

const VI_TO_V_MAP: [IndexMapEntry; 8] = [
    entry(1, 1, TFactor::One, 0, 1.0),
    entry(2, 2, TFactor::One, 0, 1.0),
    entry(3, 3, TFactor::One, 0, 1.0),
    entry(4, 4, TFactor::One, 0, 1.0),
    entry(5, 1, TFactor::Q, 0, 1.0),
    entry(6, 2, TFactor::InvQ, 0, 1.0),
    entry(7, 5, TFactor::One, 0, 1.0),
    entry(8, 6, TFactor::One, 0, 1.0),
];

const V_TO_III1_MAP: [IndexMapEntry; 6] = [
    entry(1, 1, TFactor::One, 0, 1.0),
    entry(2, 2, TFactor::One, 0, 1.0),
    entry(3, 3, TFactor::One, 0, 1.0),
    entry(4, 4, TFactor::One, 0, 1.0),
    entry(5, 3, TFactor::Q, 0, 1.0),
    entry(6, 4, TFactor::InvQ, 0, 1.0),
];

const III1_TO_III2_MAP: [IndexMapEntry; 4] = [
    entry(1, 1, TFactor::One, 0, 1.0),
    entry(2, 2, TFactor::One, 1, 1.0),
    entry(3, 3, TFactor::One, 0, 1.0),
    entry(4, 3, TFactor::One, 1, 1.0),
];

const III2_TO_III3A_MAP: [IndexMapEntry; 3] = [
    entry(1, 1, TFactor::One, 0, 1.0),
    entry(2, 1, TFactor::One, -1, 1.0),
    entry(3, 2, TFactor::One, 0, 1.0),
];

const III2_TO_III3B_MAP: [IndexMapEntry; 3] = [
    entry(1, 1, TFactor::One, 0, 1.0),
    entry(2, 1, TFactor::Q, -1, -1.0),
    entry(3, 2, TFactor::One, 0, 1.0),
];

/// Index map of the step (source tau index, target tau index, target time
/// rescale, extra s-tilde power, sign).
pub fn index_map(step: StepId) -> &'static [IndexMapEntry] {
    match step {
        StepId::ViToV => &VI_TO_V_MAP,
        StepId::VToIii1 => &V_TO_III1_MAP,
        StepId::Iii1ToIii2 => &III1_TO_III2_MAP,
        StepId::Iii2ToIii3A => &III2_TO_III3A_MAP,
        StepId::Iii2ToIii3B => &III2_TO_III3B_MAP,
    }
}

/// A degeneration step instance: the target parameter record, the finite
/// confluence parameter Lambda, and the target-side time t1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DegenerationStep {
    step_id: StepId,
    target: FamilyParams,
    lambda: f64,
    t1: Complex64,
}

impl DegenerationStep {
    pub fn new(step_id: StepId, target: FamilyParams, lambda: f64, t1: Complex64) -> Result<Self> {
        if target.family() != step_id.target_family() {
            return Err(Error::InvalidParameter {
                what: "target parameter family does not match the step id",
            });
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter {
                what: "Lambda must be positive and finite",
            });
        }
        Ok(DegenerationStep {
            step_id,
            target,
            lambda,
            t1,
        })
    }

    pub fn step_id(&self) -> StepId {
        self.step_id
    }

    pub fn target(&self) -> &FamilyParams {
        &self.target
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn t1(&self) -> Complex64 {
        self.t1
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }
}

/// Which Gamma_q substitution pattern a step's s-formula uses.
#[allow(clippy::enum_variant_names)]
enum SubKind {
    /// s = s~ (q-1)^{-2 sigma} q^{-2 sigma Lambda} prod Gamma_q(1/2 - Lambda + eps sigma)^{-eps}
    HalfOffset,
    /// s = s~ (q-1)^{-2 sigma} q^{-sigma(2 Lambda + 1)} prod Gamma_q(-Lambda + eps sigma)^{-eps}
    ZeroOffset,
    /// s = s~ (q-1)^{-2 sigma} prod Gamma_q(1/2 + Lambda + eps sigma)^{-eps}
    PositiveOffset,
}

fn sub_kind(step: StepId) -> SubKind {
    match step {
        StepId::ViToV | StepId::Iii2ToIii3A => SubKind::HalfOffset,
        StepId::VToIii1 | StepId::Iii1ToIii2 => SubKind::ZeroOffset,
        StepId::Iii2ToIii3B => SubKind::PositiveOffset,
    }
}

/// The source-family s reproducing the target s-tilde in the limit.
pub fn substituted_s(
    ctx: &QContext,
    step: StepId,
    s_tilde: Complex64,
    sigma: Complex64,
    lambda: f64,
) -> Result<Complex64> {
    let half = Complex64::new(0.5, 0.0);
    let lam = Complex64::new(lambda, 0.0);
    let mut log = log_qm1(ctx).scaled(-2.0 * sigma);
    match sub_kind(step) {
        SubKind::HalfOffset => {
            let w = -2.0 * sigma * lambda * ctx.ln_q();
            log += LogComplex::new(w.re, w.im);
            log -= log_gamma_q(ctx, half - lam + sigma)?;
            log += log_gamma_q(ctx, half - lam - sigma)?;
        }
        SubKind::ZeroOffset => {
            let w = -sigma * (2.0 * lambda + 1.0) * ctx.ln_q();
            log += LogComplex::new(w.re, w.im);
            log -= log_gamma_q(ctx, -lam + sigma)?;
            log += log_gamma_q(ctx, -lam - sigma)?;
        }
        SubKind::PositiveOffset => {
            log -= log_gamma_q(ctx, half + lam + sigma)?;
            log += log_gamma_q(ctx, half + lam - sigma)?;
        }
    }
    Ok(s_tilde * log.to_complex())
}

/// Source-family parameter record and source time of the step.
pub fn source_params(ctx: &QContext, step: &DegenerationStep) -> Result<(FamilyParams, Complex64)> {
    let lam = Complex64::new(step.lambda, 0.0);
    let sigma = step.target.sigma();
    let s = substituted_s(ctx, step.step_id, step.target.s(), sigma, step.lambda)?;
    let q_lam = Complex64::new(ctx.q_pow(step.lambda), 0.0);
    match (step.step_id, &step.target) {
        (StepId::ViToV, FamilyParams::V(p)) => Ok((
            FamilyParams::VI(ParamsVI {
                theta1: (lam + p.theta_star) / 2.0,
                theta_inf: (lam - p.theta_star) / 2.0,
                theta_t: p.theta_t,
                theta0: p.theta0,
                sigma,
                s,
            }),
            q_lam * step.t1,
        )),
        (StepId::VToIii1, FamilyParams::III1(p)) => Ok((
            FamilyParams::V(ParamsV {
                theta_star: p.theta_star,
                theta_t: (lam + p.theta_star2) / 2.0,
                theta0: (lam - p.theta_star2) / 2.0,
                sigma,
                s,
            }),
            q_lam * step.t1,
        )),
        (StepId::Iii1ToIii2, FamilyParams::III2(p)) => Ok((
            FamilyParams::III1(ParamsIII1 {
                theta_star: p.theta_star,
                theta_star2: lam,
                sigma,
                s,
            }),
            q_lam * step.t1,
        )),
        (StepId::Iii2ToIii3A, FamilyParams::III3(_)) => Ok((
            FamilyParams::III2(ParamsIII2 {
                theta_star: lam,
                sigma,
                s,
            }),
            q_lam * step.t1,
        )),
        (StepId::Iii2ToIii3B, FamilyParams::III3(_)) => Ok((
            FamilyParams::III2(ParamsIII2 {
                theta_star: -lam,
                sigma,
                s,
            }),
            step.t1, // this step does not rescale the time variable
        )),
        _ => Err(Error::InvalidParameter {
            what: "target parameter family does not match the step id",
        }),
    }
}

/// prod_eps G_q(base + eps shift)^{-1} in log space.
fn neg_barnes_pair(ctx: &QContext, base: Complex64, shift: Complex64) -> Result<LogComplex> {
    Ok(-(crate::qcore::log_barnes_q(ctx, base + shift)?
        + crate::qcore::log_barnes_q(ctx, base - shift)?))
}

/// The scaling constant C_i of the step, in log space.
pub fn scaling_constant(ctx: &QContext, step: &DegenerationStep, index: u32) -> Result<LogComplex> {
    let bad = || Error::InvalidIndex {
        family: step.step_id.as_str(),
        index,
    };
    let one = Complex64::ONE;
    let half = Complex64::new(0.5, 0.0);
    let lam = Complex64::new(step.lambda, 0.0);
    let sigma = step.target.sigma();
    let ln_q = ctx.ln_q();
    let qp = |w: Complex64| {
        let v = w * ln_q;
        LogComplex::new(v.re, v.im)
    };
    match (step.step_id, &step.target) {
        (StepId::ViToV, FamilyParams::V(p)) => {
            let tt2 = p.theta_t * p.theta_t;
            let t02 = p.theta0 * p.theta0;
            let (qm1_exp, q_exp, base, shift) = match index {
                1 | 6 => (
                    -(sigma * sigma),
                    -(lam + half) * (sigma * sigma - tt2 - t02),
                    half - lam,
                    sigma,
                ),
                2 | 5 => (
                    -(sigma * sigma),
                    -(lam - half) * (sigma * sigma - tt2 - t02),
                    Complex64::new(1.5, 0.0) - lam,
                    sigma,
                ),
                3 | 7 => {
                    let sp = sigma + half;
                    let shifted = if index == 3 {
                        sp * sp - tt2 - (p.theta0 + half) * (p.theta0 + half)
                    } else {
                        sp * sp - (p.theta_t - half) * (p.theta_t - half) - t02
                    };
                    (-(sp * sp), -lam * shifted, one - lam, sp)
                }
                4 | 8 => {
                    let sm = sigma - half;
                    let shifted = if index == 4 {
                        sm * sm - tt2 - (p.theta0 - half) * (p.theta0 - half)
                    } else {
                        sm * sm - (p.theta_t + half) * (p.theta_t + half) - t02
                    };
                    (-(sm * sm), -lam * shifted, one - lam, sm)
                }
                _ => return Err(bad()),
            };
            Ok(log_qm1(ctx).scaled(qm1_exp) + qp(q_exp) + neg_barnes_pair(ctx, base, shift)?)
        }
        (StepId::VToIii1, FamilyParams::III1(p)) => {
            let theta_t = (lam + p.theta_star2) / 2.0;
            let theta0 = (lam - p.theta_star2) / 2.0;
            let t_src = Complex64::new(ctx.q_pow(step.lambda), 0.0) * step.t1;
            let log_t = LogComplex::from_complex(t_src)?;
            let tt2 = theta_t * theta_t;
            let t02 = theta0 * theta0;
            let (qm1_exp, q_exp, t_exp, base, shift) = match index {
                1 => (
                    -(sigma * sigma),
                    -lam * sigma * sigma - (tt2 + t02) / 2.0,
                    tt2 + t02,
                    one - lam,
                    sigma,
                ),
                2 => (
                    -(sigma * sigma),
                    -lam * sigma * sigma + (tt2 + t02) / 2.0,
                    tt2 + t02,
                    one - lam,
                    sigma,
                ),
                3 => {
                    let sp = sigma + half;
                    (
                        -(sp * sp),
                        -(lam + half) * sp * sp,
                        tt2 + (theta0 + half) * (theta0 + half),
                        half - lam,
                        sp,
                    )
                }
                4 => {
                    let sm = sigma - half;
                    (
                        -(sm * sm),
                        -(lam - half) * sm * sm,
                        tt2 + (theta0 - half) * (theta0 - half),
                        Complex64::new(1.5, 0.0) - lam,
                        sm,
                    )
                }
                5 => {
                    let sp = sigma + half;
                    (
                        -(sp * sp),
                        -(lam - half) * sp * sp,
                        (theta_t - half) * (theta_t - half) + t02,
                        Complex64::new(1.5, 0.0) - lam,
                        sp,
                    )
                }
                6 => {
                    let sm = sigma - half;
                    (
                        -(sm * sm),
                        -(lam + half) * sm * sm,
                        (theta_t + half) * (theta_t + half) + t02,
                        half - lam,
                        sm,
                    )
                }
                _ => return Err(bad()),
            };
            Ok(log_qm1(ctx).scaled(qm1_exp)
                + qp(q_exp)
                + log_t.scaled(t_exp)
                + neg_barnes_pair(ctx, base, shift)?)
        }
        (StepId::Iii1ToIii2, FamilyParams::III2(_)) => {
            let (qm1_exp, q_exp, base, shift) = match index {
                1 | 2 => (-(sigma * sigma), -lam * sigma * sigma, one - lam, sigma),
                3 => {
                    let sp = sigma + half;
                    (
                        -(sp * sp),
                        -(lam - half) * sp * sp,
                        Complex64::new(1.5, 0.0) - lam,
                        sp,
                    )
                }
                4 => {
                    let sm = sigma - half;
                    (-(sm * sm), -(lam + half) * sm * sm, half - lam, sm)
                }
                _ => return Err(bad()),
            };
            Ok(log_qm1(ctx).scaled(qm1_exp) + qp(q_exp) + neg_barnes_pair(ctx, base, shift)?)
        }
        (StepId::Iii2ToIii3A, FamilyParams::III3(_)) => {
            let (qm1_exp, q_exp, base, shift) = match index {
                1 => (
                    -(sigma * sigma),
                    -(lam - half) * sigma * sigma,
                    Complex64::new(1.5, 0.0) - lam,
                    sigma,
                ),
                2 => {
                    let sp = sigma + one;
                    (-(sp * sp), -(lam + half) * sp * sp, half - lam, sp)
                }
                3 => {
                    let sp = sigma + half;
                    (-(sp * sp), -lam * sp * sp, one - lam, sp)
                }
                _ => return Err(bad()),
            };
            Ok(log_qm1(ctx).scaled(qm1_exp) + qp(q_exp) + neg_barnes_pair(ctx, base, shift)?)
        }
        (StepId::Iii2ToIii3B, FamilyParams::III3(_)) => {
            let (qm1_exp, base, shift) = match index {
                1 => (-(sigma * sigma), Complex64::new(1.5, 0.0) + lam, sigma),
                2 => {
                    let sp = sigma + one;
                    (-(sp * sp), half + lam, sp)
                }
                3 => {
                    let sp = sigma + half;
                    (-(sp * sp), one + lam, sp)
                }
                _ => return Err(bad()),
            };
            Ok(log_qm1(ctx).scaled(qm1_exp) + neg_barnes_pair(ctx, base, shift)?)
        }
        _ => Err(Error::InvalidParameter {
            what: "target parameter family does not match the step id",
        }),
    }
}

/// Relative error of one index-map entry at finite Lambda.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IndexError {
    pub source_index: u32,
    pub target_index: u32,
    pub relative: f64,
}

/// |C_i tau_i^source - target| / |target| for every index-map entry of the
/// step, at the step's Lambda.
pub fn degeneration_error(
    ctx: &QContext,
    step: &DegenerationStep,
    trunc: &TruncationSpec,
) -> Result<Vec<IndexError>> {
    let (source, t_src) = source_params(ctx, step)?;
    let s_tilde = step.target.s();
    let mut out = Vec::new();
    for e in index_map(step.step_id) {
        let log_c = scaling_constant(ctx, step, e.source)?;
        let lhs = tau_shifted_scaled(ctx, &source, e.source, t_src, trunc, &log_c)?;
        let t_target = e.t_factor.apply(ctx, step.t1);
        let mut rhs = tau_shifted(ctx, &step.target, e.target, t_target, trunc)? * e.sign;
        if e.s_power != 0 {
            rhs *= s_tilde.powi(e.s_power);
        }
        let rel = crate::qcore::cnorm(lhs - rhs) / crate::qcore::cnorm(rhs).max(1e-300);
        out.push(IndexError {
            source_index: e.source,
            target_index: e.target,
            relative: rel,
        });
    }
    Ok(out)
}

/// Least-squares geometric decay ratio of an error sequence over a Lambda
/// grid: fits ln(err) = a + m * Lambda and reports exp(m * mean spacing),
/// i.e. the decay factor per grid step. Needs >= 3 usable points.
pub fn fit_geometric_ratio(lambdas: &[f64], errors: &[f64]) -> Option<f64> {
    if lambdas.len() != errors.len() || lambdas.len() < 3 {
        return None;
    }
    if errors.iter().any(|&e| e.is_nan() || e <= 0.0) {
        return None;
    }
    let n = lambdas.len() as f64;
    let mean_x = lambdas.iter().sum::<f64>() / n;
    let mean_y = errors.iter().map(|&e| libm::log(e)).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &e) in lambdas.iter().zip(errors) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (libm::log(e) - mean_y);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let spacing = (lambdas[lambdas.len() - 1] - lambdas[0]) / (lambdas.len() as f64 - 1.0);
    Some(libm::exp(slope * spacing))
}

/// One row of a convergence sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub lambda: f64,
    pub errors: Vec<IndexError>,
    pub max_error: Option<f64>,
    pub skip_reason: Option<String>,
}

/// Result of sweeping a degeneration step over a Lambda grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
    pub fitted_ratio: Option<f64>,
    pub convergent: bool,
}

/// Evaluate the step at each Lambda (ascending); Lambda values whose
/// finite-Lambda parameters collide with poles are skipped with a reason
/// rather than failing the sweep.
pub fn convergence_sweep(
    ctx: &QContext,
    step: &DegenerationStep,
    lambdas: &[f64],
    trunc: &TruncationSpec,
) -> Result<Sweep> {
    if lambdas.is_empty() {
        return Err(Error::InvalidParameter {
            what: "Lambda list must be nonempty",
        });
    }
    if lambdas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter {
            what: "Lambda list must be strictly increasing",
        });
    }
    let mut rows = Vec::new();
    for &lam in lambdas {
        let stepped = step.with_lambda(lam);
        match degeneration_error(ctx, &stepped, trunc) {
            Ok(errors) => {
                let max_error = errors.iter().map(|e| e.relative).fold(0.0f64, f64::max);
                rows.push(SweepRow {
                    lambda: lam,
                    errors,
                    max_error: Some(max_error),
                    skip_reason: None,
                });
            }
            Err(err) => rows.push(SweepRow {
                lambda: lam,
                errors: Vec::new(),
                max_error: None,
                skip_reason: Some(err.to_string()),
            }),
        }
    }
    let usable: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.max_error.map(|e| (r.lambda, e)))
        .collect();
    let xs: Vec<f64> = usable.iter().map(|p| p.0).collect();
    let es: Vec<f64> = usable.iter().map(|p| p.1).collect();
    let fitted_ratio = fit_geometric_ratio(&xs, &es);
    let decreasing = es.windows(2).all(|w| w[1] < w[0]) && es.len() >= 2;
    let convergent = decreasing && fitted_ratio.map(|r| r < 0.999).unwrap_or(es.len() >= 2);
    Ok(Sweep {
        rows,
        fitted_ratio,
        convergent,
    })
}
