//! Nekrasov factors, Chern-Simons factors, and the rescaled forms whose
//! large-Lambda limits drive the confluence of the tau-function families.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::partitions::Partition;
use crate::qcore::{real_powi, QContext};

/// Nekrasov factor
/// N_{lambda,mu}(u) = prod_{c in lambda} (1 - q^{-leg_lambda(c)-arm_mu(c)-1} u)
///                  * prod_{c in mu}     (1 - q^{ leg_mu(c)+arm_lambda(c)+1} u),
/// evaluated cell by cell in row-major order. Zeros are legitimate values;
/// series denominators are guarded at the series level.
pub fn nekrasov_factor(
    ctx: &QContext,
    lambda: &Partition,
    mu: &Partition,
    u: Complex64,
) -> Complex64 {
    let lambda_conj = lambda.conjugate();
    let mu_conj = mu.conjugate();
    let mut acc = Complex64::ONE;
    for cell in lambda.cells() {
        let leg = lambda_conj.part(cell.col) as i32 - cell.row as i32;
        let arm = mu.part(cell.row) as i32 - cell.col as i32;
        acc *= Complex64::ONE - real_powi(ctx.q(), -leg - arm - 1) * u;
    }
    for cell in mu.cells() {
        let leg = mu_conj.part(cell.col) as i32 - cell.row as i32;
        let arm = lambda.part(cell.row) as i32 - cell.col as i32;
        acc *= Complex64::ONE - real_powi(ctx.q(), leg + arm + 1) * u;
    }
    acc
}

/// Nekrasov factor with a vanishing-factor guard: errors when any factor
/// (1 - q^e u) lies within 1e-10 relative of zero, which is the
/// non-generic-parameter condition for the Z-series denominators.
pub fn nekrasov_factor_guarded(
    ctx: &QContext,
    lambda: &Partition,
    mu: &Partition,
    u: Complex64,
) -> Result<Complex64> {
    let lambda_conj = lambda.conjugate();
    let mu_conj = mu.conjugate();
    let mut acc = Complex64::ONE;
    let mut push = |exp: i32| -> Result<()> {
        let scaled = real_powi(ctx.q(), exp) * u;
        let factor = Complex64::ONE - scaled;
        if crate::qcore::cnorm(factor) < 1e-10 * (1.0 + crate::qcore::cnorm(scaled)) {
            return Err(Error::DenominatorVanishing {
                pair: (lambda.clone(), mu.clone()),
                window_index: None,
            });
        }
        acc *= factor;
        Ok(())
    };
    for cell in lambda.cells() {
        let leg = lambda_conj.part(cell.col) as i32 - cell.row as i32;
        let arm = mu.part(cell.row) as i32 - cell.col as i32;
        push(-leg - arm - 1)?;
    }
    for cell in mu.cells() {
        let leg = mu_conj.part(cell.col) as i32 - cell.row as i32;
        let arm = lambda.part(cell.row) as i32 - cell.col as i32;
        push(leg + arm + 1)?;
    }
    Ok(acc)
}

/// Chern-Simons factor
/// f_lambda(u) = prod_{c in lambda} (-q^{leg_lambda(c)+arm_empty(c)+1} u^{-1})
///             = (-1)^{|lambda|} u^{-|lambda|} q^{sum (i-j)}.
pub fn cs_factor(ctx: &QContext, lambda: &Partition, u: Complex64) -> Result<Complex64> {
    if u == Complex64::ZERO {
        return Err(Error::Domain {
            what: "cs_factor at u = 0",
        });
    }
    let conj = lambda.conjugate();
    let mut acc = Complex64::ONE;
    for cell in lambda.cells() {
        let leg = conj.part(cell.col) as i32 - cell.row as i32;
        // arm_empty(c) = -j, so the exponent is leg - j + 1 = i - j as summed
        let exp = leg - cell.col as i32 + 1;
        acc *= -real_powi(ctx.q(), exp) / u;
    }
    Ok(acc)
}

/// Which slot of the Nekrasov factor carries the vanishing argument in the
/// rescaled limit form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LimitSlot {
    /// N_{empty,lambda}(q^{-Lambda} u) q^{Lambda |lambda|} -> f_lambda(1/u).
    VanishingFirstSlot,
    /// N_{lambda,empty}(q^{-Lambda} u) q^{Lambda |lambda|} -> 1/f_lambda(u).
    VanishingSecondSlot,
}

/// The rescaled product N_{..}(q^{-Lambda} u) q^{Lambda |lambda|} computed
/// in the factored form prod (q^Lambda - q^{...} u), which stays finite for
/// large Lambda.
pub fn scaled_limit_lhs(
    ctx: &QContext,
    kind: LimitSlot,
    lambda: &Partition,
    u: Complex64,
    big_lambda: f64,
) -> Complex64 {
    let q_lam = Complex64::new(ctx.q_pow(big_lambda), 0.0);
    let conj = lambda.conjugate();
    let mut acc = Complex64::ONE;
    for cell in lambda.cells() {
        let leg = conj.part(cell.col) as i32 - cell.row as i32;
        let arm_empty = -(cell.col as i32);
        let exp = match kind {
            LimitSlot::VanishingFirstSlot => leg + arm_empty + 1,
            LimitSlot::VanishingSecondSlot => -leg - arm_empty - 1,
        };
        acc *= q_lam - real_powi(ctx.q(), exp) * u;
    }
    acc
}

/// Convenience: the limit value of [`scaled_limit_lhs`] as Lambda -> inf.
pub fn scaled_limit_target(
    ctx: &QContext,
    kind: LimitSlot,
    lambda: &Partition,
    u: Complex64,
) -> Result<Complex64> {
    match kind {
        LimitSlot::VanishingFirstSlot => cs_factor(ctx, lambda, u.inv()),
        LimitSlot::VanishingSecondSlot => Ok(cs_factor(ctx, lambda, u)?.inv()),
    }
}
