//! Command implementations behind the `qtau` binary: evaluate tau
//! functions on a t-grid, run the identity/residual verification suite,
//! and sweep degeneration steps over Lambda. Exposed as a library so the
//! integration and acceptance tests can drive the same code paths.

pub mod config;
pub mod report;
pub mod rng;
pub mod suites;

use num_complex::Complex64;

use qtau::degeneration::{convergence_sweep, DegenerationStep};
use qtau::painleve::yz;
use qtau::tau::tau;
use qtau::QContext;

use config::{keep_id, Resolved};
use report::{EvalRow, VerifyRow};

/// Failure modes mapped to process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Exit code 2: configuration/schema problem.
    Config(String),
    /// Exit code 3: numerical failure (pole, vanishing denominator, ...).
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) => m,
            CliError::Numerical(m) => m,
        }
    }
}

fn num_err(e: qtau::Error) -> CliError {
    CliError::Numerical(format!("{e}"))
}

/// Outcome of a command: the rendered report plus the exit code.
pub struct Outcome {
    pub output: String,
    pub exit_code: i32,
}

/// `qtau eval`: tau (and (y, z) away from t = 0) at each grid point.
pub fn run_eval(cfg: &Resolved) -> Result<Outcome, CliError> {
    let ctx = QContext::new(cfg.q)
        .and_then(|c| c.with_prod_tail_tol(cfg.prod_tail_tol))
        .map_err(num_err)?;
    let mut rows = Vec::new();
    for &t in &cfg.t_grid {
        let tau_val = tau(&ctx, &cfg.params, t, &cfg.trunc).map_err(num_err)?;
        let yz_val = if t == Complex64::ZERO {
            None
        } else {
            Some(yz(&ctx, &cfg.params, t, &cfg.trunc).map_err(num_err)?)
        };
        rows.push(EvalRow {
            t,
            tau: tau_val,
            yz: yz_val,
        });
    }
    Ok(Outcome {
        output: report::eval_report(cfg, &rows),
        exit_code: 0,
    })
}

/// `qtau verify`: one row per identity; exit code 1 iff a proved identity
/// fails at the configured tolerance.
pub fn run_verify(cfg: &Resolved) -> Result<Outcome, CliError> {
    let rows: Vec<VerifyRow> = suites::verify_rows(cfg)
        .map_err(num_err)?
        .into_iter()
        .filter(|r| keep_id(&cfg.filter, &r.report.identity_id))
        .collect();
    let proved_failed = rows.iter().any(|r| r.status == "proved" && !r.report.pass);
    Ok(Outcome {
        output: report::verify_report(cfg, &rows),
        exit_code: if proved_failed { 1 } else { 0 },
    })
}

/// `qtau degenerate`: sweep the configured step over the Lambda list.
pub fn run_degenerate(cfg: &Resolved) -> Result<Outcome, CliError> {
    let ctx = QContext::new(cfg.q)
        .and_then(|c| c.with_prod_tail_tol(cfg.prod_tail_tol))
        .map_err(num_err)?;
    let target_family = cfg.step.target_family();
    let target = if cfg.has_params_override && cfg.family == target_family {
        cfg.params
    } else {
        qtau::tau::default_params(target_family)
    };
    let step = DegenerationStep::new(cfg.step, target, cfg.lambdas[0], cfg.t1)
        .map_err(|e| CliError::Config(format!("{e}")))?;
    let sweep = convergence_sweep(&ctx, &step, &cfg.lambdas, &cfg.trunc).map_err(num_err)?;
    Ok(Outcome {
        output: report::degenerate_report(cfg, &sweep),
        exit_code: 0,
    })
}
