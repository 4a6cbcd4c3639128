//! Solution pairs (y, z) built from tau-function ratios, residuals of the
//! q-Painleve equations and of every bilinear identity, the III_1 Backlund
//! transformation with its K-factor, and the reduction to the standard
//! q-P(A7) form in the g variable.
//!
//! Every identity is evaluated as "all terms moved to one side"; the
//! relative residual divides by the largest term modulus so identities
//! with large structure-constant prefactors are judged fairly.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::{cnorm, csqrt as qcsqrt, log_gamma_q, LogComplex, QContext};
use crate::tau::{
    tau, tau_shifted, FamilyId, FamilyParams, Iii3Variant, ParamsIII1, ParamsIII3, TruncationSpec,
};

/// Floor used when normalizing relative residuals.
const SCALE_FLOOR: f64 = 1e-300;

/// Guard for tau-ratio denominators.
const DIV_GUARD: f64 = 1e-250;

/// Parameters a_i, b_i of a family's q-Painleve system; slots the family
/// does not use are `None`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EquationParams {
    pub a1: Option<Complex64>,
    pub a2: Option<Complex64>,
    pub a3: Option<Complex64>,
    pub a4: Option<Complex64>,
    pub b1: Option<Complex64>,
    pub b2: Option<Complex64>,
    pub b3: Option<Complex64>,
    pub b4: Option<Complex64>,
}

/// Result of evaluating one identity at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub identity_id: String,
    pub lhs_scale: f64,
    pub residual: Complex64,
    pub relative: f64,
    pub pass: bool,
    pub trunc: TruncationSpec,
    pub t: Complex64,
}

impl ResidualReport {
    /// Build a report from the terms of an identity summing to zero.
    pub fn from_terms(
        id: &str,
        terms: &[Complex64],
        tol: f64,
        trunc: &TruncationSpec,
        t: Complex64,
    ) -> Self {
        let residual: Complex64 = terms.iter().sum();
        let scale = terms
            .iter()
            .map(|z| cnorm(*z))
            .fold(0.0f64, f64::max)
            .max(SCALE_FLOOR);
        let relative = cnorm(residual) / scale;
        ResidualReport {
            identity_id: id.to_string(),
            lhs_scale: scale,
            residual,
            relative,
            pass: relative < tol,
            trunc: *trunc,
            t,
        }
    }
}

/// Proof status of an identity, as stated by the source theorems.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdentityStatus {
    Proved,
    Conjectured,
}

/// Status of the identity with the given report ID. The VI bilinear set
/// B1-B8, the V bilinear set, and the alternative (y,z) pairs built from
/// them are conjectural; everything else is proved.
pub fn identity_status(id: &str) -> IdentityStatus {
    if id.contains(".CONJ") || id.starts_with("VI.B") || id.starts_with("V.B") {
        IdentityStatus::Conjectured
    } else {
        IdentityStatus::Proved
    }
}

/// Lazy evaluator of the family's shifted tau functions on the q-power
/// time lattice t * q^k.
struct TauEval<'a> {
    ctx: &'a QContext,
    params: &'a FamilyParams,
    trunc: &'a TruncationSpec,
    t: Complex64,
    cache: BTreeMap<(u32, i32), Complex64>,
}

impl<'a> TauEval<'a> {
    fn new(
        ctx: &'a QContext,
        params: &'a FamilyParams,
        t: Complex64,
        trunc: &'a TruncationSpec,
    ) -> Self {
        TauEval {
            ctx,
            params,
            trunc,
            t,
            cache: BTreeMap::new(),
        }
    }

    /// tau_index(t * q^k).
    fn get(&mut self, index: u32, k: i32) -> Result<Complex64> {
        if let Some(v) = self.cache.get(&(index, k)) {
            return Ok(*v);
        }
        let tk = self.t * crate::qcore::real_powi(self.ctx.q(), k);
        let v = tau_shifted(self.ctx, self.params, index, tk, self.trunc)?;
        self.cache.insert((index, k), v);
        Ok(v)
    }

    fn t_at(&self, k: i32) -> Complex64 {
        self.t * crate::qcore::real_powi(self.ctx.q(), k)
    }
}

fn guard_div(num: Complex64, den: Complex64, what: &'static str) -> Result<Complex64> {
    if cnorm(den) < DIV_GUARD {
        return Err(Error::NearZeroDivisor { what });
    }
    Ok(num / den)
}

/// sqrt(q - 1) on the principal branch: i sqrt(1 - q).
fn sqrt_qm1(ctx: &QContext) -> Complex64 {
    Complex64::new(0.0, libm::sqrt(1.0 - ctx.q()))
}

/// Principal square root of the time variable.
fn csqrt(t: Complex64) -> Complex64 {
    qcsqrt(t)
}

/// The q-Painleve (y, z) pair of the family at time t * q^k.
fn yz_at(ev: &mut TauEval<'_>, k: i32) -> Result<(Complex64, Complex64)> {
    let ctx = ev.ctx;
    let q = ctx.q();
    let tk = ev.t_at(k);
    match *ev.params {
        FamilyParams::VI(p) => {
            let pref = ctx.q_powc(-2.0 * p.theta1 - Complex64::ONE);
            let num = ev.get(3, k)? * ev.get(4, k)?;
            let den = ev.get(1, k)? * ev.get(2, k)?;
            let y = pref * tk * guard_div(num, den, "VI tau1*tau2")?;
            let a = ev.get(1, k - 1)? * ev.get(2, k)?;
            let b = ev.get(1, k)? * ev.get(2, k - 1)?;
            let zden = ctx.q_powc(Complex64::new(0.5, 0.0) + p.theta_inf) * a
                - ctx.q_powc(Complex64::new(0.5, 0.0) - p.theta_inf) * b;
            let z = guard_div(a - b, zden, "VI z denominator")?;
            Ok((y, z))
        }
        FamilyParams::V(p) => {
            let pref = ctx.q_powc(-p.theta_star - Complex64::ONE) * sqrt_qm1(ctx);
            let num = ev.get(3, k)? * ev.get(4, k)?;
            let den = ev.get(1, k)? * ev.get(2, k)?;
            let y = pref * tk * guard_div(num, den, "V tau1*tau2")?;
            let a = ev.get(1, k - 1)? * ev.get(2, k)?;
            let b = ev.get(1, k)? * ev.get(2, k - 1)?;
            let zden = ctx.q_powc(p.theta_star / 2.0 + Complex64::new(0.5, 0.0)) * b;
            let z = -guard_div(a - b, zden, "V z denominator")?;
            Ok((y, z))
        }
        FamilyParams::III1(p) => {
            let y = ctx.q_powc(-p.theta_star - Complex64::ONE)
                * csqrt(tk)
                * guard_div(
                    ev.get(3, k)? * ev.get(4, k)?,
                    ev.get(1, k)? * ev.get(2, k)?,
                    "III1 tau1*tau2",
                )?;
            let z = -ctx.q_powc(-p.theta_star / 2.0 - Complex64::new(0.75, 0.0))
                * csqrt(tk)
                * guard_div(
                    ev.get(3, k)? * ev.get(4, k - 1)?,
                    ev.get(1, k)? * ev.get(2, k - 1)?,
                    "III1 z denominator",
                )?;
            Ok((y, z))
        }
        FamilyParams::III2(p) => {
            let inv_sqm1 = sqrt_qm1(ctx).inv();
            let y = ctx.q_powc(-p.theta_star - Complex64::ONE)
                * inv_sqm1
                * csqrt(tk)
                * guard_div(
                    ev.get(3, k)? * ev.get(3, k)?,
                    ev.get(1, k)? * ev.get(2, k)?,
                    "III2 tau1*tau2",
                )?;
            let z = -ctx.q_powc(-p.theta_star / 2.0 - Complex64::new(0.75, 0.0))
                * inv_sqm1
                * csqrt(tk)
                * guard_div(
                    ev.get(3, k)? * ev.get(3, k - 1)?,
                    ev.get(1, k)? * ev.get(2, k - 1)?,
                    "III2 z denominator",
                )?;
            Ok((y, z))
        }
        FamilyParams::III3(p) => match p.variant {
            Iii3Variant::A7Prime => {
                let t1 = ev.get(1, k)?;
                let t2 = ev.get(2, k)?;
                let y = Complex64::new(1.0 / q, 0.0)
                    * csqrt(tk)
                    * p.s
                    * guard_div(t2 * t2, t1 * t1, "III3A tau1^2")?;
                let z = ctx.q_powc(Complex64::new(-0.75, 0.0))
                    * csqrt(tk)
                    * p.s
                    * guard_div(
                        t2 * ev.get(2, k - 1)?,
                        t1 * ev.get(1, k - 1)?,
                        "III3A tau1*tau1_",
                    )?;
                Ok((y, z))
            }
            Iii3Variant::A7 => {
                let t1 = ev.get(1, k)?;
                let t2 = ev.get(2, k)?;
                let y = Complex64::new(1.0 / q, 0.0)
                    * csqrt(tk)
                    * p.s
                    * guard_div(t2 * t2, t1 * ev.get(1, k + 1)?, "III3B tau1*tau1^")?;
                let z = -ctx.q_powc(Complex64::new(-0.75, 0.0))
                    * csqrt(tk)
                    * p.s
                    * guard_div(t2 * ev.get(2, k - 1)?, t1 * t1, "III3B tau1^2")?;
                Ok((y, z))
            }
        },
    }
}

/// Alternative (y, z) pair from the conjectured bilinear systems: same y,
/// z expressed through the 5-8 (VI) or 5-6 (V) shifted tau functions.
/// Only the VI and V families have one.
fn yz_conj_at(ev: &mut TauEval<'_>, k: i32) -> Result<(Complex64, Complex64)> {
    let ctx = ev.ctx;
    let tk = ev.t_at(k);
    match *ev.params {
        FamilyParams::VI(p) => {
            let y = ctx.q_powc(-2.0 * p.theta1 - Complex64::ONE)
                * tk
                * guard_div(
                    ev.get(3, k)? * ev.get(4, k)?,
                    ev.get(1, k)? * ev.get(2, k)?,
                    "VI tau1*tau2",
                )?;
            let z = -ctx.q_powc(p.theta_t - p.theta1 - Complex64::ONE)
                * tk
                * guard_div(
                    ev.get(7, k - 1)? * ev.get(8, k)?,
                    ev.get(5, k - 1)? * ev.get(6, k)?,
                    "VI conj z denominator",
                )?;
            Ok((y, z))
        }
        FamilyParams::V(p) => {
            let y = ctx.q_powc(-p.theta_star - Complex64::ONE)
                * sqrt_qm1(ctx)
                * tk
                * guard_div(
                    ev.get(3, k)? * ev.get(4, k)?,
                    ev.get(1, k)? * ev.get(2, k)?,
                    "V tau1*tau2",
                )?;
            let z = -ctx.q_powc(p.theta_t - p.theta_star / 2.0 - Complex64::ONE)
                * sqrt_qm1(ctx)
                * tk
                * guard_div(
                    ev.get(5, k - 1)? * ev.get(6, k)?,
                    ev.get(1, k)? * ev.get(2, k - 1)?,
                    "V conj z denominator",
                )?;
            Ok((y, z))
        }
        _ => Err(Error::InvalidParameter {
            what: "conjectured (y,z) form exists only for families VI and V",
        }),
    }
}

/// The (y, z) solution pair of the family at time t.
pub fn yz(
    ctx: &QContext,
    params: &FamilyParams,
    t: Complex64,
    trunc: &TruncationSpec,
) -> Result<(Complex64, Complex64)> {
    let mut ev = TauEval::new(ctx, params, t, trunc);
    yz_at(&mut ev, 0)
}

/// The conjectured alternative (y, z) pair (families VI and V).
pub fn yz_conjectured(
    ctx: &QContext,
    params: &FamilyParams,
    t: Complex64,
    trunc: &TruncationSpec,
) -> Result<(Complex64, Complex64)> {
    let mut ev = TauEval::new(ctx, params, t, trunc);
    yz_conj_at(&mut ev, 0)
}

/// The a_i, b_i parameter table of the family's q-Painleve system.
pub fn equation_params(ctx: &QContext, params: &FamilyParams) -> EquationParams {
    let one = Complex64::ONE;
    let half = Complex64::new(0.5, 0.0);
    let inv_q = Complex64::new(1.0 / ctx.q(), 0.0);
    match params {
        FamilyParams::VI(p) => EquationParams {
            a1: Some(ctx.q_powc(-2.0 * p.theta1 - one)),
            a2: Some(ctx.q_powc(-2.0 * p.theta_t - 2.0 * p.theta1 - one)),
            a3: Some(inv_q),
            a4: Some(ctx.q_powc(-2.0 * p.theta1 - one)),
            b1: Some(ctx.q_powc(-p.theta0 - p.theta_t - p.theta1)),
            b2: Some(ctx.q_powc(p.theta0 - p.theta_t - p.theta1)),
            b3: Some(ctx.q_powc(p.theta_inf - half)),
            b4: Some(ctx.q_powc(-p.theta_inf - half)),
        },
        FamilyParams::V(p) => EquationParams {
            a1: Some(ctx.q_powc(-p.theta_star - one)),
            a2: Some(ctx.q_powc(-2.0 * p.theta_t - p.theta_star - one)),
            a3: Some(inv_q),
            a4: Some(ctx.q_powc(-1.5 * p.theta_star - half)),
            b1: Some(ctx.q_powc(-p.theta0 - p.theta_t - p.theta_star / 2.0)),
            b2: Some(ctx.q_powc(p.theta0 - p.theta_t - p.theta_star / 2.0)),
            b3: Some(ctx.q_powc(-p.theta_star / 2.0 - half)),
            ..Default::default()
        },
        FamilyParams::III1(p) => EquationParams {
            a2: Some(ctx.q_powc(-p.theta_star2 - p.theta_star - one)),
            a3: Some(inv_q),
            a4: Some(ctx.q_powc(-1.5 * p.theta_star - half)),
            b2: Some(ctx.q_powc(-p.theta_star / 2.0)),
            b3: Some(ctx.q_powc(-p.theta_star / 2.0 - half)),
            ..Default::default()
        },
        FamilyParams::III2(p) => EquationParams {
            a2: Some(ctx.q_powc(-p.theta_star - one)),
            a3: Some(inv_q),
            a4: Some(ctx.q_powc(-1.5 * p.theta_star - half)),
            b2: Some(ctx.q_powc(-p.theta_star / 2.0)),
            b3: Some(ctx.q_powc(-p.theta_star / 2.0 - half)),
            ..Default::default()
        },
        FamilyParams::III3(p) => match p.variant {
            Iii3Variant::A7Prime => EquationParams {
                a2: Some(inv_q),
                a3: Some(inv_q),
                ..Default::default()
            },
            Iii3Variant::A7 => EquationParams::default(),
        },
    }
}

#[allow(clippy::too_many_arguments)]
fn residual_pair(
    family: FamilyId,
    id_prefix: &str,
    y: Complex64,
    z: Complex64,
    yb: Complex64,
    zb: Complex64,
    ep: &EquationParams,
    ctx: &QContext,
    t: Complex64,
    tol: f64,
    trunc: &TruncationSpec,
) -> Result<[ResidualReport; 2]> {
    let q = ctx.q();
    let (e1_terms, e2_terms): (Vec<Complex64>, Vec<Complex64>) = match family {
        FamilyId::VI => {
            let (a1, a2, a3, a4) = (
                ep.a1.unwrap(),
                ep.a2.unwrap(),
                ep.a3.unwrap(),
                ep.a4.unwrap(),
            );
            let (b1, b2, b3, b4) = (
                ep.b1.unwrap(),
                ep.b2.unwrap(),
                ep.b3.unwrap(),
                ep.b4.unwrap(),
            );
            let lhs1 = y * yb / (a3 * a4);
            let rhs1 = guard_div(
                (zb - b1 * t) * (zb - b2 * t),
                (zb - b3) * (zb - b4),
                "VI eq1 denominator",
            )?;
            let lhs2 = z * zb / (b3 * b4);
            let rhs2 = guard_div(
                (y - a1 * t) * (y - a2 * t),
                (y - a3) * (y - a4),
                "VI eq2 denominator",
            )?;
            (vec![lhs1, -rhs1], vec![lhs2, -rhs2])
        }
        FamilyId::V => {
            let (a1, a2, a3, a4) = (
                ep.a1.unwrap(),
                ep.a2.unwrap(),
                ep.a3.unwrap(),
                ep.a4.unwrap(),
            );
            let (b1, b2, b3) = (ep.b1.unwrap(), ep.b2.unwrap(), ep.b3.unwrap());
            let lhs1 = y * yb / (a3 * a4);
            let rhs1 = -guard_div((zb - b1 * t) * (zb - b2 * t), zb - b3, "V eq1")?;
            let lhs2 = z * zb / b3;
            let rhs2 = -guard_div((y - a1 * t) * (y - a2 * t), a4 * (y - a3), "V eq2")?;
            (vec![lhs1, -rhs1], vec![lhs2, -rhs2])
        }
        FamilyId::III1 => {
            let (a2, a3, a4) = (ep.a2.unwrap(), ep.a3.unwrap(), ep.a4.unwrap());
            let (b2, b3) = (ep.b2.unwrap(), ep.b3.unwrap());
            let lhs1 = y * yb / (a3 * a4);
            let rhs1 = -guard_div(zb * (zb - b2 * t), zb - b3, "III1 eq1")?;
            let lhs2 = z * zb / b3;
            let rhs2 = -guard_div(y * (y - a2 * t), a4 * (y - a3), "III1 eq2")?;
            (vec![lhs1, -rhs1], vec![lhs2, -rhs2])
        }
        FamilyId::III2 => {
            let (a2, a3, a4) = (ep.a2.unwrap(), ep.a3.unwrap(), ep.a4.unwrap());
            let b3 = ep.b3.unwrap();
            let lhs1 = y * yb / (a3 * a4);
            let rhs1 = -guard_div(zb * zb, zb - b3, "III2 eq1")?;
            let lhs2 = z * zb / b3;
            let rhs2 = -guard_div(y * (y - a2 * t), a4 * (y - a3), "III2 eq2")?;
            (vec![lhs1, -rhs1], vec![lhs2, -rhs2])
        }
        FamilyId::III3A7Prime => {
            let (a2, a3) = (ep.a2.unwrap(), ep.a3.unwrap());
            let lhs1 = y * yb / a3;
            let rhs1 = zb * zb;
            let lhs2 = z * zb;
            let rhs2 = -guard_div(y * (y - a2 * t), y - a3, "III3A eq2")?;
            (vec![lhs1, -rhs1], vec![lhs2, -rhs2])
        }
        FamilyId::III3A7 => {
            let lhs1 = y * yb;
            let rhs1 = -Complex64::new(libm::pow(q, -1.5), 0.0)
                * guard_div(
                    zb * zb,
                    zb - Complex64::new(libm::pow(q, -0.5), 0.0),
                    "III3B eq1",
                )?;
            let lhs2 = z * zb;
            let rhs2 = y * (q * y - t);
            (vec![lhs1, -rhs1], vec![lhs2, -rhs2])
        }
    };
    Ok([
        ResidualReport::from_terms(&alloc::format!("{id_prefix}.EQ1"), &e1_terms, tol, trunc, t),
        ResidualReport::from_terms(&alloc::format!("{id_prefix}.EQ2"), &e2_terms, tol, trunc, t),
    ])
}

/// Residuals of the family's two coupled q-Painleve equations at time t,
/// with (y, z) built from the tau ratios (the proved form).
pub fn equation_residual(
    ctx: &QContext,
    params: &FamilyParams,
    t: Complex64,
    trunc: &TruncationSpec,
    tol: f64,
) -> Result<[ResidualReport; 2]> {
    let mut ev = TauEval::new(ctx, params, t, trunc);
    let (y, z) = yz_at(&mut ev, 0)?;
    let (yb, zb) = yz_at(&mut ev, 1)?;
    let ep = equation_params(ctx, params);
    residual_pair(
        params.family(),
        params.family().as_str(),
        y,
        z,
        yb,
        zb,
        &ep,
        ctx,
        t,
        tol,
        trunc,
    )
}

/// Residuals of the VI/V equations with the conjectured alternative z.
pub fn equation_residual_conjectured(
    ctx: &QContext,
    params: &FamilyParams,
    t: Complex64,
    trunc: &TruncationSpec,
    tol: f64,
) -> Result<[ResidualReport; 2]> {
    let mut ev = TauEval::new(ctx, params, t, trunc);
    let (y, z) = yz_conj_at(&mut ev, 0)?;
    let (yb, zb) = yz_conj_at(&mut ev, 1)?;
    let ep = equation_params(ctx, params);
    let prefix = alloc::format!("{}.CONJ", params.family().as_str());
    residual_pair(
        params.family(),
        &prefix,
        y,
        z,
        yb,
        zb,
        &ep,
        ctx,
        t,
        tol,
        trunc,
    )
}

/// Residuals of every bilinear identity of the family (both proved and
/// conjectured; see [`identity_status`]). IDs follow the fixed scheme
/// "VI.B1" ... "III3B.B5".
pub fn bilinear_residuals(
    ctx: &QContext,
    params: &FamilyParams,
    t: Complex64,
    trunc: &TruncationSpec,
    tol: f64,
) -> Result<Vec<ResidualReport>> {
    let mut ev = TauEval::new(ctx, params, t, trunc);
    let one = Complex64::ONE;
    let half = Complex64::new(0.5, 0.0);
    let mut out: Vec<(String, Vec<Complex64>)> = Vec::new();
    match *ev.params {
        FamilyParams::VI(p) => {
            let [t1, t2, t3, t4, t5, t6, t7, t8] = {
                let mut v = [Complex64::ZERO; 8];
                for (i, slot) in v.iter_mut().enumerate() {
                    *slot = ev.get(i as u32 + 1, 0)?;
                }
                v
            };
            let (u1, u2) = (ev.get(1, -1)?, ev.get(2, -1)?);
            let (u3, u4) = (ev.get(3, -1)?, ev.get(4, -1)?);
            let (u5, u7) = (ev.get(5, -1)?, ev.get(7, -1)?);
            let (o6, o8) = (ev.get(6, 1)?, ev.get(8, 1)?);
            let q2t1 = ev.ctx.q_powc(-2.0 * p.theta1);
            let q2tt = ev.ctx.q_powc(-2.0 * p.theta_t);
            let q2tp = ev.ctx.q_powc(2.0 * p.theta_t);
            out.push((
                "VI.B1".into(),
                vec![t1 * t2, -q2t1 * t * t3 * t4, -(one - q2t1 * t) * t5 * t6],
            ));
            out.push((
                "VI.B2".into(),
                vec![t1 * t2, -t * t3 * t4, -(one - q2tt * t) * u5 * o6],
            ));
            out.push((
                "VI.B3".into(),
                vec![t1 * t2, -t3 * t4, (one - q2t1 * t) * q2tp * u7 * o8],
            ));
            out.push((
                "VI.B4".into(),
                vec![t1 * t2, -q2tp * t3 * t4, (one - q2tt * t) * q2tp * t7 * t8],
            ));
            let c5 = ev.ctx.q_powc(-p.theta1 - p.theta_inf + p.theta_t - half);
            let c6 = ev.ctx.q_powc(-p.theta1 + p.theta_inf + p.theta_t - half);
            out.push(("VI.B5".into(), vec![u5 * t6, c5 * t * u7 * t8, -u1 * t2]));
            out.push(("VI.B6".into(), vec![u5 * t6, c6 * t * u7 * t8, -t1 * u2]));
            let c7 = ev.ctx.q_powc(p.theta0 + 2.0 * p.theta_t);
            let c8 = ev.ctx.q_powc(-p.theta0 + 2.0 * p.theta_t);
            let qt = ev.ctx.q_powc(p.theta_t);
            out.push(("VI.B7".into(), vec![u5 * t6, c7 * u7 * t8, -qt * u3 * t4]));
            out.push(("VI.B8".into(), vec![u5 * t6, c8 * u7 * t8, -qt * t3 * u4]));
            let coef = (ev.ctx.q_powc(half + p.theta_inf) - ev.ctx.q_powc(half - p.theta_inf))
                / (ev.ctx.q_powc(-p.theta0) - ev.ctx.q_powc(p.theta0))
                * ev.ctx.q_powc(-p.theta1 - one)
                * t;
            out.push((
                "VI.FOUR".into(),
                vec![u1 * t2, -t1 * u2, -coef * (u3 * t4 - t3 * u4)],
            ));
        }
        FamilyParams::V(p) => {
            let [t1, t2, t3, t4, t5, t6] = {
                let mut v = [Complex64::ZERO; 6];
                for (i, slot) in v.iter_mut().enumerate() {
                    *slot = ev.get(i as u32 + 1, 0)?;
                }
                v
            };
            let (u1, u2, u3, u4, u5) = (
                ev.get(1, -1)?,
                ev.get(2, -1)?,
                ev.get(3, -1)?,
                ev.get(4, -1)?,
                ev.get(5, -1)?,
            );
            let (o1, o6) = (ev.get(1, 1)?, ev.get(6, 1)?);
            let sq1 = sqrt_qm1(ev.ctx);
            let qts = ev.ctx.q_powc(-p.theta_star);
            let q2tt = ev.ctx.q_powc(2.0 * p.theta_t);
            out.push((
                "V.B1".into(),
                vec![
                    t1 * t2,
                    -qts * sq1 * t * t3 * t4,
                    -(one - qts * t) * o1 * u2,
                ],
            ));
            out.push((
                "V.B3".into(),
                vec![t1 * t2 / sq1, -t3 * t4, (one - qts * t) * q2tt * u5 * o6],
            ));
            out.push((
                "V.B4".into(),
                vec![t1 * t2 / sq1, -q2tt * t3 * t4, q2tt * t5 * t6],
            ));
            let c5 = ev.ctx.q_powc(p.theta_t - half) * sq1;
            out.push(("V.B5".into(), vec![t1 * u2, c5 * t * u5 * t6, -u1 * t2]));
            let c7 = ev.ctx.q_powc(p.theta0 + 2.0 * p.theta_t);
            let c8 = ev.ctx.q_powc(-p.theta0 + 2.0 * p.theta_t);
            let qt = ev.ctx.q_powc(p.theta_t);
            out.push((
                "V.B7".into(),
                vec![t1 * u2 / sq1, c7 * u5 * t6, -qt * u3 * t4],
            ));
            out.push((
                "V.B8".into(),
                vec![t1 * u2 / sq1, c8 * u5 * t6, -qt * t3 * u4],
            ));
            let coef = ev.ctx.q_powc(-half) * sq1
                / (ev.ctx.q_powc(p.theta0) - ev.ctx.q_powc(-p.theta0))
                * t;
            out.push((
                "V.FOUR".into(),
                vec![u1 * t2, -t1 * u2, -coef * (u3 * t4 - t3 * u4)],
            ));
        }
        FamilyParams::III1(p) => {
            let (t1, t2, t3, t4) = (ev.get(1, 0)?, ev.get(2, 0)?, ev.get(3, 0)?, ev.get(4, 0)?);
            let (u1, u2, u3, u4) = (
                ev.get(1, -1)?,
                ev.get(2, -1)?,
                ev.get(3, -1)?,
                ev.get(4, -1)?,
            );
            let (o1, o3) = (ev.get(1, 1)?, ev.get(3, 1)?);
            let st = csqrt(t);
            let qts = ev.ctx.q_powc(-p.theta_star);
            let qtss = ev.ctx.q_powc(p.theta_star2);
            let q14 = Complex64::new(libm::pow(ev.ctx.q(), 0.25), 0.0);
            out.push((
                "III1.B1".into(),
                vec![t1 * t2, -qts * st * t3 * t4, -o1 * u2],
            ));
            out.push((
                "III1.B4".into(),
                vec![t1 * t2, -qtss / st * t3 * t4, qtss / st * o3 * u4],
            ));
            out.push((
                "III1.B5".into(),
                vec![t1 * u2, st / q14 * t3 * u4, -u1 * t2],
            ));
            out.push((
                "III1.B7".into(),
                vec![t1 * u2, q14 / st * t3 * u4, -q14 / st * u3 * t4],
            ));
        }
        FamilyParams::III2(p) => {
            let (t1, t2, t3) = (ev.get(1, 0)?, ev.get(2, 0)?, ev.get(3, 0)?);
            let (u1, u2, u3) = (ev.get(1, -1)?, ev.get(2, -1)?, ev.get(3, -1)?);
            let (o1, o3) = (ev.get(1, 1)?, ev.get(3, 1)?);
            let st = csqrt(t);
            let sq1 = sqrt_qm1(ev.ctx);
            let qts = ev.ctx.q_powc(-p.theta_star);
            let q14 = Complex64::new(libm::pow(ev.ctx.q(), 0.25), 0.0);
            out.push((
                "III2.B1".into(),
                vec![t1 * t2, -qts / sq1 * st * t3 * t3, -o1 * u2],
            ));
            out.push((
                "III2.B4".into(),
                vec![
                    t1 * t2,
                    -(st * sq1).inv() * t3 * t3,
                    (st * sq1).inv() * o3 * u3,
                ],
            ));
            out.push((
                "III2.B5".into(),
                vec![t1 * u2, st / (q14 * sq1) * t3 * u3, -u1 * t2],
            ));
        }
        FamilyParams::III3(p) => match p.variant {
            Iii3Variant::A7Prime => {
                let (t1, t2) = (ev.get(1, 0)?, ev.get(2, 0)?);
                let (u1, u2) = (ev.get(1, -1)?, ev.get(2, -1)?);
                let (o1, o2) = (ev.get(1, 1)?, ev.get(2, 1)?);
                let st = csqrt(t);
                out.push((
                    "III3A.B1".into(),
                    vec![p.s * st * t2 * t2, -t1 * t1, o1 * u1],
                ));
                out.push((
                    "III3A.B4".into(),
                    vec![st / p.s * t1 * t1, -t2 * t2, o2 * u2],
                ));
            }
            Iii3Variant::A7 => {
                let (t1, t2) = (ev.get(1, 0)?, ev.get(2, 0)?);
                let (u1, u2) = (ev.get(1, -1)?, ev.get(2, -1)?);
                let (o1, o2) = (ev.get(1, 1)?, ev.get(2, 1)?);
                let st = csqrt(t);
                let q14 = Complex64::new(libm::pow(ev.ctx.q(), 0.25), 0.0);
                out.push((
                    "III3B.B4".into(),
                    vec![st / p.s * t1 * o1, -t2 * t2, o2 * u2],
                ));
                out.push((
                    "III3B.B5".into(),
                    vec![t1 * t1, p.s / q14 * st * t2 * u2, -u1 * o1],
                ));
            }
        },
    }
    Ok(out
        .into_iter()
        .map(|(id, terms)| ResidualReport::from_terms(&id, &terms, tol, trunc, t))
        .collect())
}

/// K-factor of the III_1 Backlund transformation (log space):
/// K[ts, tss, sigma] = q^{-(ts+tss) sigma^2}
///   prod_{e,e'} [G_q(1+e ts+e' sigma) G_q(1+e tss+e' sigma)]^e.
pub fn k_factor(
    ctx: &QContext,
    theta_star: Complex64,
    theta_star2: Complex64,
    sigma: Complex64,
) -> Result<LogComplex> {
    let qpow = -(theta_star + theta_star2) * sigma * sigma * ctx.ln_q();
    let mut acc = LogComplex::new(qpow.re, qpow.im);
    for eps in [1i32, -1] {
        for eps2 in [1.0, -1.0] {
            let e = eps as f64;
            let g1 =
                crate::qcore::log_barnes_q(ctx, Complex64::ONE + e * theta_star + eps2 * sigma)?;
            let g2 =
                crate::qcore::log_barnes_q(ctx, Complex64::ONE + e * theta_star2 + eps2 * sigma)?;
            acc += (g1 + g2).scaled_int(eps);
        }
    }
    Ok(acc)
}

/// Parameter side of the III_1 Backlund transformation:
/// (ts, tss, sigma, s, t) -> (-tss, -ts, sigma - 1/2, C s, q^{-ts-tss+1/2} t).
pub fn backlund_transform(
    ctx: &QContext,
    params: &ParamsIII1,
    t: Complex64,
) -> Result<(ParamsIII1, Complex64)> {
    let one = Complex64::ONE;
    let half = Complex64::new(0.5, 0.0);
    let sm1 = params.sigma - one;
    let mut log_c = LogComplex::ZERO;
    let qpow = (params.sigma - one)
        * (2.0 * params.theta_star + 2.0 * params.theta_star2 + one)
        * ctx.ln_q();
    log_c += LogComplex::new(qpow.re, qpow.im);
    for eps in [1.0, -1.0] {
        for eps2 in [1.0, -1.0] {
            let k = (-eps * eps2) as i32;
            log_c += log_gamma_q(ctx, half + eps * params.theta_star + eps2 * sm1)?.scaled_int(k);
            log_c += log_gamma_q(ctx, half + eps * (params.theta_star2 + half) + eps2 * sm1)?
                .scaled_int(k);
        }
    }
    let transformed = ParamsIII1 {
        theta_star: -params.theta_star2,
        theta_star2: -params.theta_star,
        sigma: params.sigma - half,
        s: log_c.to_complex() * params.s,
    };
    let t_new = ctx.q_powc(-params.theta_star - params.theta_star2 + half) * t;
    Ok((transformed, t_new))
}

/// Residuals of the III_1 Backlund relations: the four tilde-tau identities
/// (IDs "III1.BT1".."III1.BT4") and the K-ratio identity ("III1.K1").
pub fn backlund_iii1_check(
    ctx: &QContext,
    params: &ParamsIII1,
    t: Complex64,
    trunc: &TruncationSpec,
    tol: f64,
) -> Result<Vec<ResidualReport>> {
    let half = Complex64::new(0.5, 0.0);
    let one = Complex64::ONE;
    let (ts, tss, sigma) = (params.theta_star, params.theta_star2, params.sigma);

    let mut out = Vec::new();

    // K-ratio identity:
    // K[ts,tss+1/2,s-1/2] K[ts,tss-1/2,s-1/2]
    //   / (K[ts+1/2,tss,s] K[ts-1/2,tss,s-1]) = -q^{(tss-ts)/2}
    let lhs = (k_factor(ctx, ts, tss + half, sigma - half)?
        + k_factor(ctx, ts, tss - half, sigma - half)?
        - k_factor(ctx, ts + half, tss, sigma)?
        - k_factor(ctx, ts - half, tss, sigma - one)?)
    .to_complex();
    let rhs = -ctx.q_powc((tss - ts) / 2.0);
    out.push(ResidualReport::from_terms(
        "III1.K1",
        &[lhs, -rhs],
        tol,
        trunc,
        t,
    ));

    // Tilde-tau relations against the transformed parameter set.
    let (transformed, t_new) = backlund_transform(ctx, params, t)?;
    let tilde = FamilyParams::III1(transformed);
    let orig = FamilyParams::III1(*params);
    let relations: [(u32, Complex64, u32, Complex64); 4] = [
        (
            1,
            k_factor(ctx, ts, tss + half, sigma - half)?.to_complex(),
            4,
            t,
        ),
        (
            2,
            params.s * k_factor(ctx, ts, tss - half, sigma - half)?.to_complex(),
            3,
            ctx.q() * t,
        ),
        (3, k_factor(ctx, ts + half, tss, sigma)?.to_complex(), 2, t),
        (
            4,
            params.s * k_factor(ctx, ts - half, tss, sigma - one)?.to_complex(),
            1,
            ctx.q() * t,
        ),
    ];
    for (i, factor, j, t_orig) in relations {
        let lhs = tau_shifted(ctx, &tilde, i, t_new, trunc)?;
        let rhs = factor * tau_shifted(ctx, &orig, j, t_orig, trunc)?;
        out.push(ResidualReport::from_terms(
            &alloc::format!("III1.BT{i}"),
            &[lhs, -rhs],
            tol,
            trunc,
            t,
        ));
    }
    Ok(out)
}

/// Tau function on the A7 time-evolution orbit: level k shifts sigma by
/// k/2; odd levels belong to the unweighted (plain) half-family, realized
/// by flipping the sign of s under the (-1)^n convention of the base tau.
fn orbit_tau(
    ctx: &QContext,
    params: &ParamsIII3,
    level: i32,
    t: Complex64,
    trunc: &TruncationSpec,
) -> Result<Complex64> {
    let mut p = *params;
    p.sigma += Complex64::new(level as f64 * 0.5, 0.0);
    if level.rem_euclid(2) == 1 {
        p.s = -p.s;
    }
    tau(ctx, &FamilyParams::III3(p), t, trunc)
}

/// The five-term bilinear identity on the A7 orbit,
/// tau^2 + t^{1/2} T(tau) T^{-1}(tau) - T^2(tau) T^{-2}(tau) = 0,
/// where T(f(sigma,t)) = f(sigma+1/2, sqrt(q) t). ID "III3B.FIVE".
pub fn five_term_residual(
    ctx: &QContext,
    params: &ParamsIII3,
    t: Complex64,
    trunc: &TruncationSpec,
    tol: f64,
) -> Result<ResidualReport> {
    if params.variant != Iii3Variant::A7 {
        return Err(Error::InvalidParameter {
            what: "five-term identity belongs to the III3 A7 variant",
        });
    }
    let rq = ctx.sqrt_q();
    let o0 = orbit_tau(ctx, params, 0, t, trunc)?;
    let op = orbit_tau(ctx, params, 1, t * rq, trunc)?;
    let om = orbit_tau(ctx, params, -1, t / rq, trunc)?;
    let opp = orbit_tau(ctx, params, 2, t * ctx.q(), trunc)?;
    let omm = orbit_tau(ctx, params, -2, t / ctx.q(), trunc)?;
    Ok(ResidualReport::from_terms(
        "III3B.FIVE",
        &[o0 * o0, csqrt(t) * op * om, -opp * omm],
        tol,
        trunc,
        t,
    ))
}

/// g-variable reduction to the standard q-P(A7) form: returns g and the
/// residual of T(g) g^2 T^{-1}(g) - t^2 (1 - g) (ID "III3B.G"), where
/// g = -t^{1/2} T(tau) T^{-1}(tau) / tau^2 on the A7 orbit.
pub fn g_reduction(
    ctx: &QContext,
    params: &ParamsIII3,
    t: Complex64,
    trunc: &TruncationSpec,
    tol: f64,
) -> Result<(Complex64, ResidualReport)> {
    if params.variant != Iii3Variant::A7 {
        return Err(Error::InvalidParameter {
            what: "g reduction belongs to the III3 A7 variant",
        });
    }
    let rq = ctx.sqrt_q();
    let g_at = |level: i32, x: Complex64| -> Result<Complex64> {
        let num = orbit_tau(ctx, params, level + 1, x * rq, trunc)?
            * orbit_tau(ctx, params, level - 1, x / rq, trunc)?;
        let den = orbit_tau(ctx, params, level, x, trunc)?;
        Ok(-csqrt(x) * guard_div(num, den * den, "g denominator")?)
    };
    let g0 = g_at(0, t)?;
    let gp = g_at(1, t * rq)?;
    let gm = g_at(-1, t / rq)?;
    let report = ResidualReport::from_terms(
        "III3B.G",
        &[gp * g0 * g0 * gm, -t * t * (Complex64::ONE - g0)],
        tol,
        trunc,
        t,
    );
    Ok((g0, report))
}

/// Residual of the standard q-P(A7') system satisfied by the substituted
/// pair (Y, Z) = (z(qt), y(t)) built from the III_3 (A7') solution, with
/// a4 = 1, b2 = 1, b3 = q^{-1} (ID "III3A.A7P"). Reports the worse of the
/// two equations.
pub fn a7prime_form_residual(
    ctx: &QContext,
    params: &ParamsIII3,
    t: Complex64,
    trunc: &TruncationSpec,
    tol: f64,
) -> Result<ResidualReport> {
    if params.variant != Iii3Variant::A7Prime {
        return Err(Error::InvalidParameter {
            what: "the A7' standard form belongs to the III3 A7' variant",
        });
    }
    let fp = FamilyParams::III3(*params);
    let mut ev = TauEval::new(ctx, &fp, t, trunc);
    let (y0, _) = yz_at(&mut ev, 0)?;
    let (y1, z1) = yz_at(&mut ev, 1)?;
    let (_, z2) = yz_at(&mut ev, 2)?;
    // Y(t) = z(qt), Z(t) = y(t); Ybar = z(q^2 t), Zbar = y(qt)
    let (yy, zz) = (z1, y0);
    let (yyb, zzb) = (z2, y1);
    let b3 = Complex64::new(1.0 / ctx.q(), 0.0);
    let e1 = [
        yy * yyb,
        guard_div(zzb * (zzb - t), zzb - b3, "A7' eq1 denominator")?,
    ];
    let e2 = [zz * zzb / b3, -yy * yy];
    let r1 = ResidualReport::from_terms("III3A.A7P", &e1, tol, trunc, t);
    let r2 = ResidualReport::from_terms("III3A.A7P", &e2, tol, trunc, t);
    Ok(if r1.relative >= r2.relative { r1 } else { r2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tau::{default_params, default_t, ALL_FAMILIES};

    fn ctx() -> QContext {
        QContext::new(0.5).unwrap()
    }

    fn trunc() -> TruncationSpec {
        TruncationSpec::new(6, 3).unwrap()
    }

    #[test]
    fn equation_residuals_all_families() {
        let k = ctx();
        for fam in ALL_FAMILIES {
            let p = default_params(fam);
            let t = default_t(fam);
            let reports = equation_residual(&k, &p, t, &trunc(), 1e-8).unwrap();
            for r in &reports {
                assert!(
                    r.pass,
                    "{} relative residual {} at t={}",
                    r.identity_id, r.relative, t
                );
            }
        }
    }

    #[test]
    fn conjectured_equation_residuals() {
        let k = ctx();
        for fam in [FamilyId::VI, FamilyId::V] {
            let p = default_params(fam);
            let reports =
                equation_residual_conjectured(&k, &p, default_t(fam), &trunc(), 1e-8).unwrap();
            for r in &reports {
                assert!(r.pass, "{}: {}", r.identity_id, r.relative);
            }
        }
        let p3 = default_params(FamilyId::III1);
        assert!(
            equation_residual_conjectured(&k, &p3, default_t(FamilyId::III1), &trunc(), 1e-8)
                .is_err()
        );
    }

    #[test]
    fn bilinear_residuals_all_families() {
        let k = ctx();
        let expected_counts = [9usize, 7, 4, 3, 2, 2];
        for (fam, count) in ALL_FAMILIES.iter().zip(expected_counts) {
            let p = default_params(*fam);
            let reports = bilinear_residuals(&k, &p, default_t(*fam), &trunc(), 1e-7).unwrap();
            assert_eq!(reports.len(), count, "{fam}");
            for r in &reports {
                assert!(r.pass, "{}: {}", r.identity_id, r.relative);
            }
        }
    }

    #[test]
    fn status_table() {
        assert_eq!(identity_status("VI.B3"), IdentityStatus::Conjectured);
        assert_eq!(identity_status("V.B8"), IdentityStatus::Conjectured);
        assert_eq!(identity_status("VI.CONJ.EQ1"), IdentityStatus::Conjectured);
        assert_eq!(identity_status("VI.FOUR"), IdentityStatus::Proved);
        assert_eq!(identity_status("V.FOUR"), IdentityStatus::Proved);
        assert_eq!(identity_status("III1.B5"), IdentityStatus::Proved);
        assert_eq!(identity_status("III3B.G"), IdentityStatus::Proved);
        assert_eq!(identity_status("VI.EQ1"), IdentityStatus::Proved);
    }

    /// The theorem z and the conjectured z agree up to the residual of the
    /// bilinear (B5/B6-type) identities connecting them.
    #[test]
    fn z_two_routes() {
        let k = ctx();
        for fam in [FamilyId::VI, FamilyId::V] {
            let p = default_params(fam);
            let t = default_t(fam);
            let (_, z1) = yz(&k, &p, t, &trunc()).unwrap();
            let (_, z2) = yz_conjectured(&k, &p, t, &trunc()).unwrap();
            let rel = (z1 - z2).norm() / z1.norm();
            assert!(rel < 1e-8, "{fam}: {rel}");
        }
    }

    #[test]
    fn backlund_identities() {
        let k = ctx();
        let FamilyParams::III1(p) = default_params(FamilyId::III1) else {
            unreachable!()
        };
        let t = default_t(FamilyId::III1);
        let reports = backlund_iii1_check(&k, &p, t, &trunc(), 1e-7).unwrap();
        assert_eq!(reports.len(), 5);
        for r in &reports {
            let tol = if r.identity_id == "III1.K1" {
                1e-12
            } else {
                1e-8
            };
            assert!(r.relative < tol, "{}: {}", r.identity_id, r.relative);
        }
    }

    /// Applying the Backlund transformation twice returns
    /// (ts, tss, sigma - 1, C' C s, q t) on the parameter record.
    #[test]
    fn backlund_round_trip() {
        let k = ctx();
        let FamilyParams::III1(p) = default_params(FamilyId::III1) else {
            unreachable!()
        };
        let t = default_t(FamilyId::III1);
        let (p1, t1) = backlund_transform(&k, &p, t).unwrap();
        let (p2, t2) = backlund_transform(&k, &p1, t1).unwrap();
        assert_eq!(p2.theta_star, p.theta_star);
        assert_eq!(p2.theta_star2, p.theta_star2);
        assert!((p2.sigma - (p.sigma - Complex64::ONE)).norm() < 1e-15);
        assert!((t2 - k.q() * t).norm() < 1e-16 + 1e-15 * t.norm());
    }

    #[test]
    fn g_reduction_and_five_term() {
        let k = ctx();
        let FamilyParams::III3(p) = default_params(FamilyId::III3A7) else {
            unreachable!()
        };
        let t = default_t(FamilyId::III3A7);
        let (g, report) = g_reduction(&k, &p, t, &trunc(), 1e-8).unwrap();
        assert!(report.pass, "g residual {}", report.relative);
        assert!(g.norm() > 0.0);
        let five = five_term_residual(&k, &p, t, &trunc(), 1e-7).unwrap();
        assert!(five.pass, "five-term residual {}", five.relative);
        // wrong variant rejected
        let FamilyParams::III3(pa) = default_params(FamilyId::III3A7Prime) else {
            unreachable!()
        };
        assert!(g_reduction(&k, &pa, t, &trunc(), 1e-8).is_err());
    }

    /// With a window of one term the tau values are s-independent, so the
    /// A7' y carries its explicit s-prefactor: y scales linearly in s.
    #[test]
    fn iii3a_y_linear_in_s_at_w0() {
        let k = ctx();
        let trunc = TruncationSpec::new(4, 0).unwrap();
        let t = default_t(FamilyId::III3A7Prime);
        let base = default_params(FamilyId::III3A7Prime);
        let y1 = yz(&k, &base.with_s(Complex64::new(1e-3, 0.0)), t, &trunc)
            .unwrap()
            .0;
        let y2 = yz(&k, &base.with_s(Complex64::new(2e-3, 0.0)), t, &trunc)
            .unwrap()
            .0;
        assert!((y2 - y1 * 2.0).norm() < 1e-12 * y2.norm());
        assert!(y1.norm() < 1e-3);
    }

    #[test]
    fn a7prime_standard_form() {
        let k = ctx();
        let FamilyParams::III3(p) = default_params(FamilyId::III3A7Prime) else {
            unreachable!()
        };
        let t = default_t(FamilyId::III3A7Prime);
        let report = a7prime_form_residual(&k, &p, t, &trunc(), 1e-8).unwrap();
        assert!(report.pass, "A7' residual {}", report.relative);
        let FamilyParams::III3(pb) = default_params(FamilyId::III3A7) else {
            unreachable!()
        };
        assert!(a7prime_form_residual(&k, &pb, t, &trunc(), 1e-8).is_err());
    }

    /// Residuals shrink as n_max grows (truncation refinement).
    #[test]
    fn residual_refinement() {
        let k = ctx();
        let p = default_params(FamilyId::III3A7Prime);
        let t = default_t(FamilyId::III3A7Prime);
        let coarse =
            equation_residual(&k, &p, t, &TruncationSpec::new(2, 3).unwrap(), 1.0).unwrap();
        let fine = equation_residual(&k, &p, t, &TruncationSpec::new(6, 3).unwrap(), 1.0).unwrap();
        for (c, f) in coarse.iter().zip(fine.iter()) {
            assert!(
                f.relative < c.relative,
                "{}: {} !< {}",
                f.identity_id,
                f.relative,
                c.relative
            );
        }
    }
}
