//! Identity suites behind `qtau verify`: the q-special-function functional
//! equations, the Nekrasov factor identities, Chern-Simons removal, and
//! the per-family equation/bilinear/Backlund/reduction residuals.
//!
//! Random draws are seeded per suite so that filtering rows never changes
//! the drawn points.

use num_complex::Complex64;

use qtau::painleve::{self, identity_status, IdentityStatus, ResidualReport};
use qtau::partitions::{enumerate_partitions, Partition};
use qtau::qcore::{barnes_q, cnorm, gamma_q, q_number};
use qtau::tau::{
    default_params, default_t, zseries, zseries_iii2_cs0, zseries_v_cs0, FamilyId, FamilyParams,
    TruncationSpec,
};
use qtau::{QContext, Result};

use crate::config::Resolved;
use crate::report::VerifyRow;
use crate::rng::SplitMix64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn worst_case_report(
    id: &str,
    cases: &[(Complex64, f64)],
    tol: f64,
    trunc: &TruncationSpec,
    t: Complex64,
) -> ResidualReport {
    let mut worst = (Complex64::ZERO, 0.0f64, 0.0f64); // residual, scale, relative
    for (residual, scale) in cases {
        let rel = cnorm(*residual) / scale.max(1e-300);
        if rel >= worst.2 {
            worst = (*residual, *scale, rel);
        }
    }
    ResidualReport {
        identity_id: id.to_string(),
        lhs_scale: worst.1,
        residual: worst.0,
        relative: worst.2,
        pass: worst.2 < tol,
        trunc: *trunc,
        t,
    }
}

/// Draw u in [-3,3]^2 staying `margin` away from the non-positive integers
/// (and with u+1 safe too, for the functional equations).
fn draw_safe(rng: &mut SplitMix64, margin: f64) -> Complex64 {
    loop {
        let u = c(rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0));
        let safe = |v: Complex64| {
            let n = v.re.round();
            n > 0.0 || ((v.re - n).powi(2) + v.im * v.im).sqrt() > margin
        };
        if safe(u) && safe(u + Complex64::ONE) {
            return u;
        }
    }
}

/// Functional equations of Gamma_q and G_q over `draws` random points per
/// q in {0.3, 0.5, 0.8}; rows "QCORE.GAMMA_FE" and "QCORE.BARNES_FE".
pub fn qcore_functional_rows(
    seed: u64,
    draws: usize,
    tol: f64,
    trunc: &TruncationSpec,
) -> Result<Vec<ResidualReport>> {
    let mut gamma_cases = Vec::new();
    let mut barnes_cases = Vec::new();
    let mut rng = SplitMix64::new(seed ^ 0x51_c0de);
    for q in [0.3, 0.5, 0.8] {
        let ctx = QContext::new(q)?;
        for _ in 0..draws {
            let u = draw_safe(&mut rng, 0.05);
            let g1 = gamma_q(&ctx, u + Complex64::ONE)?;
            let g0 = gamma_q(&ctx, u)?;
            gamma_cases.push((g1 - q_number(&ctx, u) * g0, cnorm(g1)));
            let b1 = barnes_q(&ctx, u + Complex64::ONE)?;
            let b0 = barnes_q(&ctx, u)?;
            barnes_cases.push((b1 - g0 * b0, cnorm(b1)));
        }
    }
    let t0 = Complex64::ZERO;
    Ok(vec![
        worst_case_report("QCORE.GAMMA_FE", &gamma_cases, tol, trunc, t0),
        worst_case_report("QCORE.BARNES_FE", &barnes_cases, tol, trunc, t0),
    ])
}

/// G_q shift-by-integer identity (n in {-3..3}) and G_q ratio identity,
/// rows "QCORE.GQ_SHIFT" and "QCORE.GQ_RATIO".
pub fn qcore_shift_rows(
    seed: u64,
    draws: usize,
    tol: f64,
    trunc: &TruncationSpec,
) -> Result<Vec<ResidualReport>> {
    let ctx = QContext::new(0.5)?;
    let one = Complex64::ONE;
    let mut rng = SplitMix64::new(seed ^ 0x5417);
    let mut shift_cases = Vec::new();
    let mut ratio_cases = Vec::new();
    for _ in 0..draws {
        let x = c(rng.uniform(0.05, 0.45), rng.uniform(-0.2, 0.2));
        let sigma = c(rng.uniform(0.1, 0.45), rng.uniform(-0.2, 0.2));
        for n in -3i32..=3 {
            // product formula for prod_eps G_q(1 - x + eps (sigma + n))
            let nn = c(n as f64, 0.0);
            let lhs = barnes_q(&ctx, one - x + sigma + nn)? * barnes_q(&ctx, one - x - sigma - nn)?;
            let mut rhs = barnes_q(&ctx, one - x + sigma)?
                * barnes_q(&ctx, one - x - sigma)?
                * gamma_q(&ctx, -x + sigma)?.powi(n)
                * gamma_q(&ctx, -x - sigma)?.powi(-n);
            if n != 0 {
                let sig = if n > 0 { 1.0 } else { -1.0 };
                for i in 0..n.unsigned_abs() {
                    rhs *= q_number(&ctx, -x + sig * sigma);
                    for j in 1..=i {
                        let jj = sig * j as f64;
                        rhs *= q_number(&ctx, -x + sigma + c(jj, 0.0))
                            * q_number(&ctx, -x - sigma - c(jj, 0.0));
                    }
                }
            }
            shift_cases.push((lhs - rhs, cnorm(lhs).max(cnorm(rhs))));

            // G_q(1+x+n) G_q(1-x) / (G_q(1-x-n) G_q(1+x))
            //   = (-1)^{n(n+1)/2} q^{n(n+1)x/2 + (n-1)n(n+1)/6}
            //     Gamma_q(x)^n Gamma_q(1-x)^n
            let lhs = barnes_q(&ctx, one + x + nn)? * barnes_q(&ctx, one - x)?
                / (barnes_q(&ctx, one - x - nn)? * barnes_q(&ctx, one + x)?);
            let par = if (n * (n + 1) / 2).rem_euclid(2) == 1 {
                -1.0
            } else {
                1.0
            };
            let expo =
                x * (n * (n + 1)) as f64 / 2.0 + c(((n - 1) * n * (n + 1)) as f64 / 6.0, 0.0);
            let rhs = par
                * ctx.q_powc(expo)
                * gamma_q(&ctx, x)?.powi(n)
                * gamma_q(&ctx, one - x)?.powi(n);
            ratio_cases.push((lhs - rhs, cnorm(lhs).max(cnorm(rhs))));
        }
    }
    let t0 = Complex64::ZERO;
    Ok(vec![
        worst_case_report("QCORE.GQ_SHIFT", &shift_cases, tol, trunc, t0),
        worst_case_report("QCORE.GQ_RATIO", &ratio_cases, tol, trunc, t0),
    ])
}

/// Nekrasov identity suite over all pairs with |lambda|, |mu| <= max_weight
/// at `draws` random u per identity: transposition, the two Chern-Simons
/// exchange relations, and the pair relation.
pub fn nekrasov_rows(
    seed: u64,
    max_weight: u32,
    draws: usize,
    tol: f64,
    trunc: &TruncationSpec,
) -> Result<Vec<ResidualReport>> {
    use qtau::nekrasov::{cs_factor, nekrasov_factor};
    let ctx = QContext::new(0.5)?;
    let mut rng = SplitMix64::new(seed ^ 0x6e6b);
    let mut us = Vec::new();
    for _ in 0..draws {
        loop {
            let u = c(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5));
            if cnorm(u) > 0.15 {
                us.push(u);
                break;
            }
        }
    }
    let parts: Vec<Partition> = (0..=max_weight)
        .flat_map(|w| enumerate_partitions(w).unwrap())
        .collect();
    let empty = Partition::empty();
    let mut transpose = Vec::new();
    let mut ex1 = Vec::new();
    let mut ex2 = Vec::new();
    let mut pair = Vec::new();
    for lam in &parts {
        let lc = lam.conjugate();
        for mu in &parts {
            let mc = mu.conjugate();
            for &u in &us {
                let a = nekrasov_factor(&ctx, lam, mu, u);
                let b = nekrasov_factor(&ctx, &mc, &lc, u);
                transpose.push((a - b, cnorm(a).max(cnorm(b))));
            }
        }
        for &u in &us {
            let a = nekrasov_factor(&ctx, &empty, lam, u);
            let b = cs_factor(&ctx, lam, u.inv())? * nekrasov_factor(&ctx, lam, &empty, u.inv());
            ex1.push((a - b, cnorm(a).max(cnorm(b))));
            let a2 = nekrasov_factor(&ctx, lam, &empty, u);
            let b2 = nekrasov_factor(&ctx, &empty, lam, u.inv()) / cs_factor(&ctx, lam, u)?;
            ex2.push((a2 - b2, cnorm(a2).max(cnorm(b2))));
            let w = u * c(0.31, 0.77) + c(0.2, -0.1);
            let lhs = nekrasov_factor(&ctx, &empty, lam, u) * nekrasov_factor(&ctx, lam, &empty, w);
            let rhs = (u * w).powu(lam.weight())
                * nekrasov_factor(&ctx, &empty, lam, w.inv())
                * nekrasov_factor(&ctx, lam, &empty, u.inv());
            pair.push((lhs - rhs, cnorm(lhs).max(cnorm(rhs))));
        }
    }
    let t0 = Complex64::ZERO;
    Ok(vec![
        worst_case_report("NEK.TRANSPOSE", &transpose, tol, trunc, t0),
        worst_case_report("NEK.CS_EXCHANGE1", &ex1, tol, trunc, t0),
        worst_case_report("NEK.CS_EXCHANGE2", &ex2, tol, trunc, t0),
        worst_case_report("NEK.PAIR", &pair, tol, trunc, t0),
    ])
}

/// Chern-Simons removal rows ("V.CS0", "III2.CS0"): Z with CS factors
/// equals the CS-free series under the change of variables, at truncation
/// order `n_max` and `draws` random parameter draws.
pub fn cs_removal_rows(
    seed: u64,
    n_max: u32,
    draws: usize,
    tol: f64,
    trunc: &TruncationSpec,
) -> Result<Vec<ResidualReport>> {
    let ctx = QContext::new(0.5)?;
    let mut rng = SplitMix64::new(seed ^ 0xc50);
    let mut v_cases = Vec::new();
    let mut iii2_cases = Vec::new();
    let t = c(0.05, 0.0);
    for _ in 0..draws {
        let ts = c(rng.uniform(0.1, 0.3), 0.0);
        let tt = c(rng.uniform(0.1, 0.3), 0.0);
        let t0 = c(rng.uniform(0.1, 0.3), 0.0);
        let sigma = c(rng.uniform(0.2, 0.4), 0.0);
        let pv = FamilyParams::V(qtau::tau::ParamsV {
            theta_star: ts,
            theta_t: tt,
            theta0: t0,
            sigma,
            s: c(0.9, 0.0),
        });
        let lhs = zseries(&ctx, &pv, sigma, t, n_max)?;
        let rhs = zseries_v_cs0(
            &ctx,
            -ts,
            -tt,
            t0,
            sigma,
            ctx.q_powc(-ts - 2.0 * tt) * t,
            n_max,
        )?;
        v_cases.push((lhs - rhs, cnorm(lhs).max(cnorm(rhs))));

        let p2 = FamilyParams::III2(qtau::tau::ParamsIII2 {
            theta_star: ts,
            sigma,
            s: c(0.9, 0.0),
        });
        let lhs = zseries(&ctx, &p2, sigma, t, n_max)?;
        let rhs = zseries_iii2_cs0(&ctx, -ts, sigma, ctx.q_powc(-ts) * t, n_max)?;
        iii2_cases.push((lhs - rhs, cnorm(lhs).max(cnorm(rhs))));
    }
    Ok(vec![
        worst_case_report("V.CS0", &v_cases, tol, trunc, t),
        worst_case_report("III2.CS0", &iii2_cases, tol, trunc, t),
    ])
}

/// Per-family equation, bilinear, Backlund and reduction rows at the
/// family's generic point (or the config override for the configured
/// family).
pub fn family_rows(cfg: &Resolved) -> Result<Vec<(FamilyId, ResidualReport)>> {
    let ctx = QContext::new(cfg.q)?.with_prod_tail_tol(cfg.prod_tail_tol)?;
    let mut rows = Vec::new();
    for fam in qtau::tau::ALL_FAMILIES {
        let (params, t) = if cfg.has_params_override && fam == cfg.family {
            (cfg.params, cfg.t_grid[0])
        } else {
            (default_params(fam), default_t(fam))
        };
        for r in painleve::equation_residual(&ctx, &params, t, &cfg.trunc, cfg.tolerance)? {
            rows.push((fam, r));
        }
        if matches!(fam, FamilyId::VI | FamilyId::V) {
            for r in painleve::equation_residual_conjectured(
                &ctx,
                &params,
                t,
                &cfg.trunc,
                cfg.tolerance,
            )? {
                rows.push((fam, r));
            }
        }
        for r in painleve::bilinear_residuals(&ctx, &params, t, &cfg.trunc, cfg.tolerance)? {
            rows.push((fam, r));
        }
        match (fam, &params) {
            (FamilyId::III1, FamilyParams::III1(p)) => {
                for r in painleve::backlund_iii1_check(&ctx, p, t, &cfg.trunc, cfg.tolerance)? {
                    rows.push((fam, r));
                }
            }
            (FamilyId::III3A7Prime, FamilyParams::III3(p)) => {
                rows.push((
                    fam,
                    painleve::a7prime_form_residual(&ctx, p, t, &cfg.trunc, cfg.tolerance)?,
                ));
            }
            (FamilyId::III3A7, FamilyParams::III3(p)) => {
                rows.push((
                    fam,
                    painleve::five_term_residual(&ctx, p, t, &cfg.trunc, cfg.tolerance)?,
                ));
                let (_, g_report) = painleve::g_reduction(&ctx, p, t, &cfg.trunc, cfg.tolerance)?;
                rows.push((fam, g_report));
            }
            _ => {}
        }
    }
    Ok(rows)
}

/// All verify rows in report order.
pub fn verify_rows(cfg: &Resolved) -> Result<Vec<VerifyRow>> {
    let mut out: Vec<VerifyRow> = Vec::new();
    let mut push = |family: &'static str, r: ResidualReport| {
        let status = match identity_status(&r.identity_id) {
            IdentityStatus::Proved => "proved",
            IdentityStatus::Conjectured => "conjectured",
        };
        out.push(VerifyRow {
            family,
            status,
            report: r,
        });
    };
    for r in qcore_functional_rows(cfg.seed, 100, cfg.tolerance, &cfg.trunc)? {
        push("-", r);
    }
    for r in qcore_shift_rows(cfg.seed, 10, cfg.tolerance, &cfg.trunc)? {
        push("-", r);
    }
    for r in nekrasov_rows(cfg.seed, 6, 10, cfg.tolerance, &cfg.trunc)? {
        push("-", r);
    }
    for r in cs_removal_rows(cfg.seed, 8, 5, cfg.tolerance, &cfg.trunc)? {
        push("-", r);
    }
    for (fam, r) in family_rows(cfg)? {
        push(fam.as_str(), r);
    }
    Ok(out)
}
