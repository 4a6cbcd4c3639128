//! Run configuration: JSON schema, validation, and resolution against the
//! documented defaults. Unknown keys are rejected at parse time.

use num_complex::Complex64;
use serde::Deserialize;

use qtau::degeneration::StepId;
use qtau::tau::{default_params, default_t, FamilyId, FamilyParams, TruncationSpec};
use qtau::QContext;

/// Command-dependent output format.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(format!(
                "unknown output format {other:?} (expected json or csv)"
            )),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        }
    }
}

/// A complex number in config files: either a bare number (real) or an
/// {"re": .., "im": ..} object.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum ComplexIn {
    Real(f64),
    Pair { re: f64, im: f64 },
}

impl ComplexIn {
    pub fn to_complex(self) -> Complex64 {
        match self {
            ComplexIn::Real(x) => Complex64::new(x, 0.0),
            ComplexIn::Pair { re, im } => Complex64::new(re, im),
        }
    }
}

/// Parameter record keyed by ASCII symbol names (see README for the
/// mapping to the usual theta symbols).
#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsIn {
    pub theta1: Option<ComplexIn>,
    pub theta_t: Option<ComplexIn>,
    pub theta_inf: Option<ComplexIn>,
    pub theta0: Option<ComplexIn>,
    pub theta_star: Option<ComplexIn>,
    pub theta_star2: Option<ComplexIn>,
    pub sigma: Option<ComplexIn>,
    pub s: Option<ComplexIn>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncIn {
    pub n_max: u32,
    pub w: u32,
}

/// Raw run configuration as read from the JSON file. Every field is
/// optional; defaults are materialized during resolution.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigIn {
    pub family: Option<String>,
    pub params: Option<ParamsIn>,
    pub q: Option<f64>,
    pub t: Option<ComplexIn>,
    pub t_grid: Option<Vec<ComplexIn>>,
    pub truncation: Option<TruncIn>,
    pub tolerance: Option<f64>,
    pub filter: Option<Vec<String>>,
    pub format: Option<String>,
    pub seed: Option<u64>,
    pub prod_tail_tol: Option<f64>,
    pub step: Option<String>,
    pub lambdas: Option<Vec<f64>>,
    pub t1: Option<ComplexIn>,
}

/// Command-line overrides applied on top of the config file.
#[derive(Clone, Debug, Default)]
pub struct CliOverrides {
    pub format: Option<OutputFormat>,
    pub tolerance: Option<f64>,
    pub filter: Option<String>,
    pub single_thread: bool,
}

/// Fully-resolved configuration, echoed verbatim into every report.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub family: FamilyId,
    pub params: FamilyParams,
    pub q: f64,
    pub t_grid: Vec<Complex64>,
    pub trunc: TruncationSpec,
    pub tolerance: f64,
    pub filter: Vec<String>,
    pub format: OutputFormat,
    pub seed: u64,
    pub prod_tail_tol: f64,
    pub step: StepId,
    pub lambdas: Vec<f64>,
    pub t1: Complex64,
    pub single_thread: bool,
    /// Whether the config carries a point override for `family` (verify
    /// applies it to that family's rows only).
    pub has_params_override: bool,
}

fn apply_params(family: FamilyId, overrides: &ParamsIn) -> Result<FamilyParams, String> {
    let mut p = default_params(family);
    let reject = |name: &str| -> Result<(), String> {
        Err(format!("parameter {name:?} is not used by family {family}"))
    };
    match &mut p {
        FamilyParams::VI(v) => {
            if let Some(x) = overrides.theta1 {
                v.theta1 = x.to_complex();
            }
            if let Some(x) = overrides.theta_t {
                v.theta_t = x.to_complex();
            }
            if let Some(x) = overrides.theta_inf {
                v.theta_inf = x.to_complex();
            }
            if let Some(x) = overrides.theta0 {
                v.theta0 = x.to_complex();
            }
            if overrides.theta_star.is_some() {
                reject("theta_star")?;
            }
            if overrides.theta_star2.is_some() {
                reject("theta_star2")?;
            }
        }
        FamilyParams::V(v) => {
            if let Some(x) = overrides.theta_star {
                v.theta_star = x.to_complex();
            }
            if let Some(x) = overrides.theta_t {
                v.theta_t = x.to_complex();
            }
            if let Some(x) = overrides.theta0 {
                v.theta0 = x.to_complex();
            }
            if overrides.theta1.is_some() {
                reject("theta1")?;
            }
            if overrides.theta_inf.is_some() {
                reject("theta_inf")?;
            }
            if overrides.theta_star2.is_some() {
                reject("theta_star2")?;
            }
        }
        FamilyParams::III1(v) => {
            if let Some(x) = overrides.theta_star {
                v.theta_star = x.to_complex();
            }
            if let Some(x) = overrides.theta_star2 {
                v.theta_star2 = x.to_complex();
            }
            for (name, set) in [
                ("theta1", overrides.theta1.is_some()),
                ("theta_t", overrides.theta_t.is_some()),
                ("theta_inf", overrides.theta_inf.is_some()),
                ("theta0", overrides.theta0.is_some()),
            ] {
                if set {
                    reject(name)?;
                }
            }
        }
        FamilyParams::III2(v) => {
            if let Some(x) = overrides.theta_star {
                v.theta_star = x.to_complex();
            }
            for (name, set) in [
                ("theta1", overrides.theta1.is_some()),
                ("theta_t", overrides.theta_t.is_some()),
                ("theta_inf", overrides.theta_inf.is_some()),
                ("theta0", overrides.theta0.is_some()),
                ("theta_star2", overrides.theta_star2.is_some()),
            ] {
                if set {
                    reject(name)?;
                }
            }
        }
        FamilyParams::III3(_) => {
            for (name, set) in [
                ("theta1", overrides.theta1.is_some()),
                ("theta_t", overrides.theta_t.is_some()),
                ("theta_inf", overrides.theta_inf.is_some()),
                ("theta0", overrides.theta0.is_some()),
                ("theta_star", overrides.theta_star.is_some()),
                ("theta_star2", overrides.theta_star2.is_some()),
            ] {
                if set {
                    reject(name)?;
                }
            }
        }
    }
    if let Some(x) = overrides.sigma {
        p = p.with_sigma(x.to_complex());
    }
    if let Some(x) = overrides.s {
        p = p.with_s(x.to_complex());
    }
    Ok(p)
}

/// Which subcommand a configuration is resolved for (truncation defaults
/// differ: eval/verify use n_max=10, w=4; degenerate uses n_max=8, w=3).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Eval,
    Verify,
    Degenerate,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Eval => "eval",
            Command::Verify => "verify",
            Command::Degenerate => "degenerate",
        }
    }
}

/// Resolve the raw configuration against defaults and CLI overrides.
pub fn resolve(
    raw: &RunConfigIn,
    cli: &CliOverrides,
    command: Command,
) -> Result<Resolved, String> {
    let family: FamilyId = match &raw.family {
        Some(s) => s.parse().map_err(|e| format!("{e}"))?,
        None => FamilyId::III3A7Prime,
    };
    let has_params_override = raw.params.is_some() || raw.family.is_some();
    let params = apply_params(family, &raw.params.unwrap_or_default())?;

    let q = raw.q.unwrap_or(0.5);
    QContext::new(q).map_err(|e| format!("{e}"))?;

    let t_default = default_t(family);
    let t_grid: Vec<Complex64> = match (&raw.t_grid, raw.t) {
        (Some(grid), _) => grid.iter().map(|x| x.to_complex()).collect(),
        (None, Some(t)) => vec![t.to_complex()],
        (None, None) => vec![t_default],
    };
    if t_grid.is_empty() {
        return Err("t_grid must not be empty".into());
    }

    let step = match &raw.step {
        Some(s) => StepId::parse(s).map_err(|e| format!("{e}"))?,
        None => StepId::Iii2ToIii3A,
    };
    let lambdas = raw.lambdas.clone().unwrap_or_else(|| vec![6.0, 9.0, 12.0]);
    if lambdas.is_empty() {
        return Err("lambdas must not be empty".into());
    }
    if lambdas.windows(2).any(|w| w[0] >= w[1]) {
        return Err("lambdas must be strictly increasing".into());
    }
    if lambdas.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
        return Err("lambdas must be positive and finite".into());
    }

    let trunc_in = raw.truncation;
    let trunc = match trunc_in {
        Some(TruncIn { n_max, w }) => TruncationSpec::new(n_max, w).map_err(|e| format!("{e}"))?,
        None => match command {
            Command::Degenerate => TruncationSpec::new(8, 3).expect("default truncation"),
            _ => TruncationSpec::new(10, 4).expect("default truncation"),
        },
    };

    let tolerance = cli.tolerance.or(raw.tolerance).unwrap_or(1e-6);
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err("tolerance must be positive".into());
    }

    let mut filter: Vec<String> = raw.filter.clone().unwrap_or_default();
    if let Some(f) = &cli.filter {
        filter = vec![f.clone()];
    }

    let format = match cli.format {
        Some(f) => f,
        None => match &raw.format {
            Some(s) => OutputFormat::parse(s)?,
            None => OutputFormat::Json,
        },
    };

    let mut prod_tail_tol = raw
        .prod_tail_tol
        .unwrap_or(qtau::qcore::DEFAULT_PROD_TAIL_TOL);
    if let Ok(env_tol) = std::env::var("QTAU_PROD_TAIL_TOL") {
        prod_tail_tol = env_tol
            .parse::<f64>()
            .map_err(|_| "QTAU_PROD_TAIL_TOL must be a float".to_string())?;
    }
    if !(prod_tail_tol > 0.0 && prod_tail_tol < 1.0) {
        return Err("prod_tail_tol must lie in (0, 1)".into());
    }

    Ok(Resolved {
        family,
        params,
        q,
        t_grid,
        trunc,
        tolerance,
        filter,
        format,
        seed: raw.seed.unwrap_or(20190923),
        prod_tail_tol,
        step,
        lambdas,
        t1: raw
            .t1
            .map(|x| x.to_complex())
            .unwrap_or(Complex64::new(0.02, 0.0)),
        single_thread: cli.single_thread,
        has_params_override,
    })
}

/// Parse the config file contents (strict JSON, unknown keys rejected).
pub fn parse_config(text: &str) -> Result<RunConfigIn, String> {
    serde_json::from_str(text).map_err(|e| format!("config parse error: {e}"))
}

/// Match an identity ID against a glob pattern ('*' wildcards only).
pub fn glob_match(pattern: &str, s: &str) -> bool {
    fn rec(p: &[u8], s: &[u8]) -> bool {
        match p.first() {
            None => s.is_empty(),
            Some(b'*') => (0..=s.len()).any(|k| rec(&p[1..], &s[k..])),
            Some(&c) => s.first() == Some(&c) && rec(&p[1..], &s[1..]),
        }
    }
    rec(pattern.as_bytes(), s.as_bytes())
}

/// True when the ID passes the filter list (empty list = keep everything).
pub fn keep_id(filter: &[String], id: &str) -> bool {
    filter.is_empty() || filter.iter().any(|p| glob_match(p, id))
}
