//! Complex q-special functions: q-numbers, q-Pochhammer symbols, the
//! q-Gamma function and the q-Barnes function.
//!
//! All infinite products are truncated by an explicit geometric tail bound
//! controlled by [`QContext::prod_tail_tol`], so results are deterministic
//! for fixed inputs. The q-Gamma and q-Barnes functions are evaluated in
//! log space ([`LogComplex`]) because the structure constants of the tau
//! series need them at arguments like 1-Lambda+sigma where the value
//! overflows f64 magnitude long before the final combination does.
//!
//! Branch convention: every complex power and logarithm is principal
//! (imaginary part of the log in (-pi, pi]), applied per factor and summed.
//! Exponentiating a [`LogComplex`] removes the inherent 2*pi*i ambiguity.

use core::fmt;
use core::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Branch convention for complex powers and logarithms.
///
/// v1 supports the principal branch only; the field exists so that a
/// complex-q extension can carry its own convention.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[non_exhaustive]
pub enum Branch {
    /// Principal: Im(log z) in (-pi, pi].
    #[default]
    Principal,
}

/// Default relative tail bound for truncated infinite products.
pub const DEFAULT_PROD_TAIL_TOL: f64 = 1e-13;

/// Arguments of `gamma_q`/`barnes_q` closer than this to a non-positive
/// integer are rejected as poles.
pub const POLE_TOL: f64 = 1e-8;

/// Evaluation context: the base q, the product tail tolerance and the
/// branch convention.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QContext {
    q: f64,
    prod_tail_tol: f64,
    branch: Branch,
}

impl QContext {
    /// New context with the default tail tolerance. Requires 0 < q < 1.
    pub fn new(q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidParameter {
                what: "q must lie in the open interval (0, 1)",
            });
        }
        Ok(QContext {
            q,
            prod_tail_tol: DEFAULT_PROD_TAIL_TOL,
            branch: Branch::Principal,
        })
    }

    /// Replace the product tail tolerance (must be positive and < 1).
    pub fn with_prod_tail_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::InvalidParameter {
                what: "prod_tail_tol must lie in (0, 1)",
            });
        }
        self.prod_tail_tol = tol;
        Ok(self)
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn prod_tail_tol(&self) -> f64 {
        self.prod_tail_tol
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    /// ln q (negative).
    pub fn ln_q(&self) -> f64 {
        libm::log(self.q)
    }

    /// q^x for real x.
    pub fn q_pow(&self, x: f64) -> f64 {
        libm::exp(x * self.ln_q())
    }

    /// q^u for complex u (principal branch; exact for q real in (0,1)).
    pub fn q_powc(&self, u: Complex64) -> Complex64 {
        cexp(u * self.ln_q())
    }

    /// sqrt(q) (positive root).
    pub fn sqrt_q(&self) -> f64 {
        libm::sqrt(self.q)
    }
}

/// A complex value stored as log modulus plus accumulated argument.
///
/// `exp(log_modulus) * e^{i*argument}` reconstructs the value; the
/// argument is summed per factor and deliberately not reduced mod 2*pi,
/// so two `LogComplex` values differing by 2*pi*i exponentiate to the
/// same complex number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogComplex {
    pub log_modulus: f64,
    pub argument: f64,
}

impl LogComplex {
    /// log(1) = 0.
    pub const ZERO: LogComplex = LogComplex {
        log_modulus: 0.0,
        argument: 0.0,
    };

    pub fn new(log_modulus: f64, argument: f64) -> Self {
        LogComplex {
            log_modulus,
            argument,
        }
    }

    /// Principal log of a nonzero complex value.
    pub fn from_complex(z: Complex64) -> Result<Self> {
        if z == Complex64::ZERO {
            return Err(Error::Domain {
                what: "log of zero",
            });
        }
        Ok(LogComplex {
            log_modulus: libm::log(cnorm(z)),
            argument: carg(z),
        })
    }

    /// Exponentiate back to a complex number.
    pub fn to_complex(&self) -> Complex64 {
        let m = libm::exp(self.log_modulus);
        Complex64::new(m * libm::cos(self.argument), m * libm::sin(self.argument))
    }

    /// View as the complex number log_modulus + i*argument.
    pub fn as_log_value(&self) -> Complex64 {
        Complex64::new(self.log_modulus, self.argument)
    }

    /// Log of value^w for complex w: complex multiplication of the stored
    /// log by w (a branch choice inherited from the stored argument).
    pub fn scaled(&self, w: Complex64) -> Self {
        let l = self.as_log_value() * w;
        LogComplex::new(l.re, l.im)
    }

    /// Log of value^k for integer k.
    pub fn scaled_int(&self, k: i32) -> Self {
        LogComplex::new(self.log_modulus * k as f64, self.argument * k as f64)
    }
}

impl Add for LogComplex {
    type Output = LogComplex;
    fn add(self, rhs: LogComplex) -> LogComplex {
        LogComplex::new(
            self.log_modulus + rhs.log_modulus,
            self.argument + rhs.argument,
        )
    }
}

impl Sub for LogComplex {
    type Output = LogComplex;
    fn sub(self, rhs: LogComplex) -> LogComplex {
        LogComplex::new(
            self.log_modulus - rhs.log_modulus,
            self.argument - rhs.argument,
        )
    }
}

impl AddAssign for LogComplex {
    fn add_assign(&mut self, rhs: LogComplex) {
        self.log_modulus += rhs.log_modulus;
        self.argument += rhs.argument;
    }
}

impl SubAssign for LogComplex {
    fn sub_assign(&mut self, rhs: LogComplex) {
        self.log_modulus -= rhs.log_modulus;
        self.argument -= rhs.argument;
    }
}

impl Neg for LogComplex {
    type Output = LogComplex;
    fn neg(self) -> LogComplex {
        LogComplex::new(-self.log_modulus, -self.argument)
    }
}

impl fmt::Display for LogComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exp({} + {}i)", self.log_modulus, self.argument)
    }
}

/// |z| via libm::hypot. All complex transcendentals in this crate go
/// through these explicit libm routines so that results do not depend on
/// which float backend dependency feature unification happens to enable.
pub fn cnorm(z: Complex64) -> f64 {
    libm::hypot(z.re, z.im)
}

/// Principal argument of z via libm::atan2.
pub fn carg(z: Complex64) -> f64 {
    libm::atan2(z.im, z.re)
}

/// Complex exponential via libm.
pub fn cexp(z: Complex64) -> Complex64 {
    let m = libm::exp(z.re);
    Complex64::new(m * libm::cos(z.im), m * libm::sin(z.im))
}

/// Principal complex square root via libm (polar form).
pub fn csqrt(z: Complex64) -> Complex64 {
    if z == Complex64::ZERO {
        return Complex64::ZERO;
    }
    let m = libm::sqrt(cnorm(z));
    let a = 0.5 * carg(z);
    Complex64::new(m * libm::cos(a), m * libm::sin(a))
}

/// x^k for real x and integer k by squaring (core-only, deterministic).
pub(crate) fn real_powi(x: f64, k: i32) -> f64 {
    if k < 0 {
        return 1.0 / real_powi(x, -k);
    }
    let mut base = x;
    let mut n = k as u32;
    let mut acc = 1.0;
    while n > 0 {
        if n & 1 == 1 {
            acc *= base;
        }
        base *= base;
        n >>= 1;
    }
    acc
}

/// Principal-branch complex power base^exponent.
///
/// 0^0 = 1; 0^w = 0 when Re w > 0; 0^w with Re w <= 0 (w != 0) is a
/// domain error. Integer real exponents take the exact repeated-product
/// path, so e.g. cpow(-0.5, 2) = 0.25 exactly.
pub fn cpow(base: Complex64, exponent: Complex64) -> Result<Complex64> {
    if base == Complex64::ZERO {
        if exponent == Complex64::ZERO {
            return Ok(Complex64::ONE);
        }
        if exponent.re > 0.0 {
            return Ok(Complex64::ZERO);
        }
        return Err(Error::Domain {
            what: "0 raised to an exponent with non-positive real part",
        });
    }
    if exponent.im == 0.0 {
        let k = libm::round(exponent.re);
        if k == exponent.re && libm::fabs(k) <= i32::MAX as f64 {
            return Ok(base.powi(k as i32));
        }
    }
    let log = Complex64::new(libm::log(cnorm(base)), carg(base));
    Ok(cexp(exponent * log))
}

/// q-number \[u\] = (1 - q^u) / (1 - q).
pub fn q_number(ctx: &QContext, u: Complex64) -> Complex64 {
    (Complex64::ONE - ctx.q_powc(u)) / (1.0 - ctx.q())
}

/// Finite q-Pochhammer symbol (a;q)_N.
pub fn q_pochhammer(ctx: &QContext, a: Complex64, n: u32) -> Complex64 {
    let mut acc = Complex64::ONE;
    let mut aq = a;
    for _ in 0..n {
        acc *= Complex64::ONE - aq;
        aq *= ctx.q();
    }
    acc
}

/// Number of factors needed so the relative tail |a| q^J / (1-q) of the
/// single infinite product drops below the context tolerance.
fn poch_inf_len(ctx: &QContext, a_norm: f64) -> u32 {
    let q = ctx.q();
    let mut j = 0u32;
    let mut bound = a_norm / (1.0 - q);
    while bound >= ctx.prod_tail_tol() && j < 100_000 {
        bound *= q;
        j += 1;
    }
    j
}

/// Infinite q-Pochhammer symbol (a;q)_inf, truncated by the tail bound.
pub fn q_pochhammer_inf(ctx: &QContext, a: Complex64) -> Complex64 {
    q_pochhammer(ctx, a, poch_inf_len(ctx, cnorm(a)))
}

/// Log-space (a;q)_inf with per-factor principal logs.
///
/// Errors if some factor vanishes exactly (a on the pole lattice).
pub fn log_q_pochhammer_inf(ctx: &QContext, a: Complex64) -> Result<LogComplex> {
    let mut acc = LogComplex::ZERO;
    let mut aq = a;
    for _ in 0..poch_inf_len(ctx, cnorm(a)) {
        let factor = Complex64::ONE - aq;
        if factor == Complex64::ZERO {
            return Err(Error::Domain {
                what: "vanishing factor in (a;q)_inf",
            });
        }
        acc += LogComplex::from_complex(factor)?;
        aq *= ctx.q();
    }
    Ok(acc)
}

/// Factor count for the double product (a;q,q)_inf = prod_m (1-a q^m)^{m+1},
/// tail bound (m+1) |a| q^m / (1-q)^2.
fn poch2_inf_len(ctx: &QContext, a_norm: f64) -> u32 {
    let q = ctx.q();
    let scale = a_norm / ((1.0 - q) * (1.0 - q));
    let mut m = 0u32;
    while (m + 1) as f64 * scale * ctx.q_pow(m as f64) >= ctx.prod_tail_tol() && m < 100_000 {
        m += 1;
    }
    m
}

/// Double infinite q-Pochhammer symbol (a;q,q)_inf, truncated.
pub fn q_double_pochhammer_inf(ctx: &QContext, a: Complex64) -> Complex64 {
    let mut acc = Complex64::ONE;
    let mut aq = a;
    for m in 0..poch2_inf_len(ctx, cnorm(a)) {
        acc *= (Complex64::ONE - aq).powu(m + 1);
        aq *= ctx.q();
    }
    acc
}

/// Log-space (a;q,q)_inf.
pub fn log_q_double_pochhammer_inf(ctx: &QContext, a: Complex64) -> Result<LogComplex> {
    let mut acc = LogComplex::ZERO;
    let mut aq = a;
    for m in 0..poch2_inf_len(ctx, cnorm(a)) {
        let factor = Complex64::ONE - aq;
        if factor == Complex64::ZERO {
            return Err(Error::Domain {
                what: "vanishing factor in (a;q,q)_inf",
            });
        }
        acc += LogComplex::from_complex(factor)?.scaled_int(m as i32 + 1);
        aq *= ctx.q();
    }
    Ok(acc)
}

/// Reject arguments within `POLE_TOL` of a non-positive integer, where the
/// defining products of the q-Gamma/q-Barnes functions degenerate.
fn check_pole(function: &'static str, u: Complex64) -> Result<()> {
    let nearest = libm::round(u.re);
    if nearest <= 0.0 {
        let d = libm::hypot(u.re - nearest, u.im);
        if d < POLE_TOL {
            return Err(Error::Pole {
                function,
                argument: u,
                window_index: None,
            });
        }
    }
    Ok(())
}

/// log Gamma_q(u) where Gamma_q(u) = (q;q)_inf / (q^u;q)_inf * (1-q)^{1-u}.
pub fn log_gamma_q(ctx: &QContext, u: Complex64) -> Result<LogComplex> {
    check_pole("gamma_q", u)?;
    let q = Complex64::new(ctx.q(), 0.0);
    let num = log_q_pochhammer_inf(ctx, q)?;
    let den = log_q_pochhammer_inf(ctx, ctx.q_powc(u))?;
    let ln_1mq = libm::log(1.0 - ctx.q());
    let pow = (Complex64::ONE - u) * ln_1mq;
    Ok(num - den + LogComplex::new(pow.re, pow.im))
}

/// Gamma_q(u) as a complex value.
pub fn gamma_q(ctx: &QContext, u: Complex64) -> Result<Complex64> {
    Ok(log_gamma_q(ctx, u)?.to_complex())
}

/// log G_q(u) where
/// G_q(u) = (q^u;q,q)_inf / (q;q,q)_inf * (q;q)_inf^{u-1} * (1-q)^{-(u-1)(u-2)/2}.
pub fn log_barnes_q(ctx: &QContext, u: Complex64) -> Result<LogComplex> {
    check_pole("barnes_q", u)?;
    let q = Complex64::new(ctx.q(), 0.0);
    let num = log_q_double_pochhammer_inf(ctx, ctx.q_powc(u))?;
    let den = log_q_double_pochhammer_inf(ctx, q)?;
    let log_poch_q = log_q_pochhammer_inf(ctx, q)?;
    let ln_1mq = libm::log(1.0 - ctx.q());
    let um1 = u - Complex64::ONE;
    let um2 = u - Complex64::new(2.0, 0.0);
    let pow = -(um1 * um2) * (0.5 * ln_1mq);
    Ok(num - den + log_poch_q.scaled(um1) + LogComplex::new(pow.re, pow.im))
}

/// G_q(u) as a complex value.
pub fn barnes_q(ctx: &QContext, u: Complex64) -> Result<Complex64> {
    Ok(log_barnes_q(ctx, u)?.to_complex())
}
