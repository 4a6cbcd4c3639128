//! Truncation-refinement oracle: every equation and bilinear residual
//! decreases (within floating-point noise) as n_max grows 6 -> 8 -> 10,
//! across q in {0.4, 0.5, 0.6} at the generic points with |t| <= 0.05.

use std::collections::BTreeMap;

use num_complex::Complex64;
use qtau::painleve::{bilinear_residuals, equation_residual};
use qtau::tau::{default_params, default_t, FamilyId, TruncationSpec, ALL_FAMILIES};
use qtau::QContext;

/// Below this the residual has reached the accumulated-rounding floor of
/// the log-space pipeline (about 1e3 floating-point operations feed each
/// tau value) and monotone decrease is no longer meaningful.
const FLOOR: f64 = 1e-11;

fn residual_table(
    ctx: &QContext,
    family: FamilyId,
    t: Complex64,
    n_max: u32,
) -> BTreeMap<String, f64> {
    let params = default_params(family);
    let trunc = TruncationSpec::new(n_max, 4).unwrap();
    let mut out = BTreeMap::new();
    for r in equation_residual(ctx, &params, t, &trunc, 1.0).unwrap() {
        out.insert(r.identity_id, r.relative);
    }
    for r in bilinear_residuals(ctx, &params, t, &trunc, 1.0).unwrap() {
        out.insert(r.identity_id, r.relative);
    }
    out
}

#[test]
fn residuals_decrease_with_n_max() {
    for q in [0.4, 0.5, 0.6] {
        let ctx = QContext::new(q).unwrap();
        for family in ALL_FAMILIES {
            // the families' documented generic points (|t| <= 0.05);
            // w = 4 keeps the Fourier-window tail below the n_max
            // truncation signal for every family
            let t = default_t(family);
            let r6 = residual_table(&ctx, family, t, 6);
            let r8 = residual_table(&ctx, family, t, 8);
            let r10 = residual_table(&ctx, family, t, 10);
            for (id, &v6) in &r6 {
                let v8 = r8[id];
                let v10 = r10[id];
                // each refinement shrinks the residual until it reaches
                // the floating-point floor
                assert!(
                    v8 < v6 || v8 < FLOOR,
                    "q={q} {id}: n_max 6 -> 8 did not improve ({v6} -> {v8})"
                );
                assert!(
                    v10 < v8 || v10 < FLOOR,
                    "q={q} {id}: n_max 8 -> 10 did not improve ({v8} -> {v10})"
                );
            }
        }
    }
}
