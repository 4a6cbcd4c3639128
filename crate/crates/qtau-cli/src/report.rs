//! Deterministic report serialization.
//!
//! JSON is written by hand so that every float carries exactly 17
//! significant digits and field order is fixed: identical runs produce
//! byte-identical output. Complex values are {"re": .., "im": ..} pairs.
//! CSV uses RFC 4180 quoting with a mandatory header row.

use num_complex::Complex64;

use qtau::degeneration::Sweep;
use qtau::painleve::ResidualReport;

use crate::config::{OutputFormat, Resolved};

/// 17-significant-digit scientific form, valid as a JSON number.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_complex(z: Complex64) -> String {
    format!("{{\"re\":{},\"im\":{}}}", fmt_f64(z.re), fmt_f64(z.im))
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') || s.contains('\r') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// The fully-resolved config echo embedded in every report.
pub fn config_json(cfg: &Resolved, command: &str) -> String {
    use qtau::tau::FamilyParams;
    let mut params_fields: Vec<(&str, Complex64)> = Vec::new();
    match &cfg.params {
        FamilyParams::VI(p) => {
            params_fields.push(("theta1", p.theta1));
            params_fields.push(("theta_t", p.theta_t));
            params_fields.push(("theta_inf", p.theta_inf));
            params_fields.push(("theta0", p.theta0));
        }
        FamilyParams::V(p) => {
            params_fields.push(("theta_star", p.theta_star));
            params_fields.push(("theta_t", p.theta_t));
            params_fields.push(("theta0", p.theta0));
        }
        FamilyParams::III1(p) => {
            params_fields.push(("theta_star", p.theta_star));
            params_fields.push(("theta_star2", p.theta_star2));
        }
        FamilyParams::III2(p) => {
            params_fields.push(("theta_star", p.theta_star));
        }
        FamilyParams::III3(_) => {}
    }
    params_fields.push(("sigma", cfg.params.sigma()));
    params_fields.push(("s", cfg.params.s()));
    let params = params_fields
        .iter()
        .map(|(k, v)| format!("{}:{}", json_string(k), fmt_complex(*v)))
        .collect::<Vec<_>>()
        .join(",");
    let t_grid = cfg
        .t_grid
        .iter()
        .map(|t| fmt_complex(*t))
        .collect::<Vec<_>>()
        .join(",");
    let lambdas = cfg
        .lambdas
        .iter()
        .map(|l| fmt_f64(*l))
        .collect::<Vec<_>>()
        .join(",");
    let filter = cfg
        .filter
        .iter()
        .map(|f| json_string(f))
        .collect::<Vec<_>>()
        .join(",");
    format!(
        concat!(
            "{{\"command\":{},\"family\":{},\"params\":{{{}}},\"q\":{},",
            "\"t_grid\":[{}],\"truncation\":{{\"n_max\":{},\"w\":{}}},",
            "\"tolerance\":{},\"filter\":[{}],\"format\":{},\"seed\":{},",
            "\"prod_tail_tol\":{},\"step\":{},\"lambdas\":[{}],\"t1\":{},",
            "\"single_thread\":{}}}"
        ),
        json_string(command),
        json_string(cfg.family.as_str()),
        params,
        fmt_f64(cfg.q),
        t_grid,
        cfg.trunc.n_max(),
        cfg.trunc.w(),
        fmt_f64(cfg.tolerance),
        filter,
        json_string(cfg.format.as_str()),
        cfg.seed,
        fmt_f64(cfg.prod_tail_tol),
        json_string(cfg.step.as_str()),
        lambdas,
        fmt_complex(cfg.t1),
        cfg.single_thread,
    )
}

/// One eval row: tau (and, away from t = 0, the (y, z) pair) at a grid
/// point.
pub struct EvalRow {
    pub t: Complex64,
    pub tau: Complex64,
    pub yz: Option<(Complex64, Complex64)>,
}

pub fn eval_report(cfg: &Resolved, rows: &[EvalRow]) -> String {
    match cfg.format {
        OutputFormat::Json => {
            let body = rows
                .iter()
                .map(|r| {
                    let yz = match r.yz {
                        Some((y, z)) => {
                            format!(",\"y\":{},\"z\":{}", fmt_complex(y), fmt_complex(z))
                        }
                        None => ",\"y\":null,\"z\":null".to_string(),
                    };
                    format!(
                        "{{\"t\":{},\"tau\":{}{}}}",
                        fmt_complex(r.t),
                        fmt_complex(r.tau),
                        yz
                    )
                })
                .collect::<Vec<_>>()
                .join(",");
            format!(
                "{{\"config\":{},\"rows\":[{}]}}\n",
                config_json(cfg, "eval"),
                body
            )
        }
        OutputFormat::Csv => {
            let mut out = String::from("t_re,t_im,tau_re,tau_im,y_re,y_im,z_re,z_im\n");
            for r in rows {
                let (y, z) = match r.yz {
                    Some((y, z)) => (
                        (fmt_f64(y.re), fmt_f64(y.im)),
                        (fmt_f64(z.re), fmt_f64(z.im)),
                    ),
                    None => (
                        (String::new(), String::new()),
                        (String::new(), String::new()),
                    ),
                };
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    fmt_f64(r.t.re),
                    fmt_f64(r.t.im),
                    fmt_f64(r.tau.re),
                    fmt_f64(r.tau.im),
                    y.0,
                    y.1,
                    z.0,
                    z.1
                ));
            }
            out
        }
    }
}

/// One verify row: a residual report plus its family and proof status.
pub struct VerifyRow {
    pub family: &'static str,
    pub status: &'static str,
    pub report: ResidualReport,
}

pub fn verify_report(cfg: &Resolved, rows: &[VerifyRow]) -> String {
    match cfg.format {
        OutputFormat::Json => {
            let body = rows
                .iter()
                .map(|r| {
                    format!(
                        concat!(
                            "{{\"id\":{},\"family\":{},\"status\":{},",
                            "\"lhs_scale\":{},\"residual\":{},\"relative\":{},\"pass\":{}}}"
                        ),
                        json_string(&r.report.identity_id),
                        json_string(r.family),
                        json_string(r.status),
                        fmt_f64(r.report.lhs_scale),
                        fmt_complex(r.report.residual),
                        fmt_f64(r.report.relative),
                        r.report.pass
                    )
                })
                .collect::<Vec<_>>()
                .join(",");
            let proved_failed = rows
                .iter()
                .filter(|r| r.status == "proved" && !r.report.pass)
                .count();
            let conj_failed = rows
                .iter()
                .filter(|r| r.status == "conjectured" && !r.report.pass)
                .count();
            format!(
                "{{\"config\":{},\"rows\":[{}],\"summary\":{{\"rows\":{},\"proved_failed\":{},\"conjectured_failed\":{}}}}}\n",
                config_json(cfg, "verify"),
                body,
                rows.len(),
                proved_failed,
                conj_failed,
            )
        }
        OutputFormat::Csv => {
            let mut out =
                String::from("id,family,status,lhs_scale,residual_re,residual_im,relative,pass\n");
            for r in rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    csv_field(&r.report.identity_id),
                    r.family,
                    r.status,
                    fmt_f64(r.report.lhs_scale),
                    fmt_f64(r.report.residual.re),
                    fmt_f64(r.report.residual.im),
                    fmt_f64(r.report.relative),
                    r.report.pass
                ));
            }
            out
        }
    }
}

pub fn degenerate_report(cfg: &Resolved, sweep: &Sweep) -> String {
    let ratio_str = match sweep.fitted_ratio {
        Some(r) => fmt_f64(r),
        None => "".to_string(),
    };
    match cfg.format {
        OutputFormat::Json => {
            let rows = sweep
                .rows
                .iter()
                .map(|row| {
                    let errors = row
                        .errors
                        .iter()
                        .map(|e| {
                            format!(
                                "{{\"source\":{},\"target\":{},\"relative\":{}}}",
                                e.source_index,
                                e.target_index,
                                fmt_f64(e.relative)
                            )
                        })
                        .collect::<Vec<_>>()
                        .join(",");
                    let max_err = match row.max_error {
                        Some(e) => fmt_f64(e),
                        None => "null".to_string(),
                    };
                    let skip = match &row.skip_reason {
                        Some(r) => json_string(r),
                        None => "null".to_string(),
                    };
                    format!(
                        "{{\"lambda\":{},\"errors\":[{}],\"max_error\":{},\"skip_reason\":{}}}",
                        fmt_f64(row.lambda),
                        errors,
                        max_err,
                        skip
                    )
                })
                .collect::<Vec<_>>()
                .join(",");
            let ratio_json = match sweep.fitted_ratio {
                Some(r) => fmt_f64(r),
                None => "null".to_string(),
            };
            format!(
                "{{\"config\":{},\"rows\":[{}],\"fitted_ratio\":{},\"convergent\":{}}}\n",
                config_json(cfg, "degenerate"),
                rows,
                ratio_json,
                sweep.convergent
            )
        }
        OutputFormat::Csv => {
            let mut out = String::from(
                "lambda,source_index,target_index,relative,max_error,fitted_ratio,skip_reason\n",
            );
            for row in &sweep.rows {
                let max_err = row.max_error.map(fmt_f64).unwrap_or_default();
                if row.errors.is_empty() {
                    out.push_str(&format!(
                        "{},,,,{},{},{}\n",
                        fmt_f64(row.lambda),
                        max_err,
                        ratio_str,
                        csv_field(row.skip_reason.as_deref().unwrap_or("")),
                    ));
                }
                for e in &row.errors {
                    out.push_str(&format!(
                        "{},{},{},{},{},{},\n",
                        fmt_f64(row.lambda),
                        e.source_index,
                        e.target_index,
                        fmt_f64(e.relative),
                        max_err,
                        ratio_str,
                    ));
                }
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting() {
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(-0.25), "-2.5000000000000000e-1");
        // round-trips through parse
        for x in [1.0 / 3.0, 2.0_f64.sqrt(), 1e-300, 12345.6789] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }

    #[test]
    fn json_escaping() {
        assert_eq!(json_string("a\"b"), "\"a\\\"b\"");
        assert_eq!(json_string("x\ny"), "\"x\\ny\"");
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }
}
