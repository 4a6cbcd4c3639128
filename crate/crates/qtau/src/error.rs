//! Error type shared by all evaluation routines.

use core::fmt;

use num_complex::Complex64;

use crate::partitions::Partition;

/// Library-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Evaluation errors.
///
/// Numerical routines fail loudly instead of returning polluted values:
/// a q-Gamma/q-Barnes argument near a non-positive integer, a vanishing
/// Nekrasov denominator, or an invalid parameter all abort the evaluation
/// with enough context to name the offending input.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Invalid construction parameter (context, truncation, step, ...).
    InvalidParameter { what: &'static str },
    /// Domain error of a scalar operation (e.g. 0 raised to a power with
    /// negative real part).
    Domain { what: &'static str },
    /// Argument of `gamma_q`/`barnes_q` within tolerance of a pole/zero of
    /// the defining infinite product. `window_index` is the Fourier index n
    /// at which a tau-series evaluation hit the pole, when applicable.
    Pole {
        function: &'static str,
        argument: Complex64,
        window_index: Option<i32>,
    },
    /// A Nekrasov denominator of a Z-series vanished (non-generic sigma).
    DenominatorVanishing {
        pair: (Partition, Partition),
        window_index: Option<i32>,
    },
    /// A tau ratio or equation denominator is too close to zero.
    NearZeroDivisor { what: &'static str },
    /// Shift-table or index-map index outside the family's valid range.
    InvalidIndex { family: &'static str, index: u32 },
    /// Partition enumeration beyond the configured ceiling.
    CeilingExceeded { requested: u32, ceiling: u32 },
}

impl Error {
    /// Attach the Fourier window index n to pole/denominator errors
    /// propagating out of a tau-series term.
    pub(crate) fn with_window_index(mut self, n: i32) -> Self {
        match &mut self {
            Error::Pole { window_index, .. } | Error::DenominatorVanishing { window_index, .. } => {
                *window_index = Some(n);
            }
            _ => {}
        }
        self
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { what } => write!(f, "invalid parameter: {what}"),
            Error::Domain { what } => write!(f, "domain error: {what}"),
            Error::Pole {
                function,
                argument,
                window_index,
            } => {
                write!(f, "{function} pole near argument {argument}")?;
                if let Some(n) = window_index {
                    write!(f, " (window index n={n})")?;
                }
                Ok(())
            }
            Error::DenominatorVanishing { pair, window_index } => {
                write!(
                    f,
                    "vanishing Nekrasov denominator at partition pair ({}, {})",
                    pair.0, pair.1
                )?;
                if let Some(n) = window_index {
                    write!(f, " (window index n={n})")?;
                }
                Ok(())
            }
            Error::NearZeroDivisor { what } => write!(f, "near-zero divisor: {what}"),
            Error::InvalidIndex { family, index } => {
                write!(f, "invalid tau index {index} for family {family}")
            }
            Error::CeilingExceeded { requested, ceiling } => {
                write!(
                    f,
                    "partition weight {requested} exceeds enumeration ceiling {ceiling}"
                )
            }
        }
    }
}

impl core::error::Error for Error {}
