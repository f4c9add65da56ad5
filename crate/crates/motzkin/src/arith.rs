//! Arithmetic backends for walk counts.
//!
//! Counts grow like (2*sqrt(s)+1)^n, so anything past toy sizes needs either
//! exact big integers or a log/extended-float representation. Both are kept
//! behind `WalkCount` so callers can pick a mode once and forget about it.

use rug::ops::CompleteRound;
use rug::{Float, Integer};
use std::fmt;

/// Default mantissa bits used when a caller does not pin a precision.
/// Chains up to n ~ 10^4 are comfortable at 128 bits; the large-n correlator
/// paths bump this to 256 (see `correlations`).
pub const DEFAULT_PRECISION_BITS: u32 = 128;

/// Minimum mantissa width accepted for the log-float mode.
pub const MIN_PRECISION_BITS: u32 = 53;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithmeticMode {
    Exact,
    LogFloat { precision_bits: u32 },
}

impl ArithmeticMode {
    pub fn log_float(precision_bits: u32) -> Result<Self, ArithError> {
        if precision_bits < MIN_PRECISION_BITS {
            return Err(ArithError::PrecisionTooLow(precision_bits));
        }
        Ok(ArithmeticMode::LogFloat { precision_bits })
    }

    pub fn precision_bits(&self) -> u32 {
        match self {
            ArithmeticMode::Exact => u32::MAX,
            ArithmeticMode::LogFloat { precision_bits } => *precision_bits,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ArithError {
    #[error("log-float precision must be at least {MIN_PRECISION_BITS} bits, got {0}")]
    PrecisionTooLow(u32),
    #[error("mixed arithmetic modes in one expression")]
    ModeMismatch,
}

/// A nonnegative count in one of the two arithmetic modes.
///
/// The log representation keeps the count itself (not its logarithm) in an
/// extended-exponent float; MPFR's exponent range covers everything this
/// crate ever counts, so no explicit log-shift bookkeeping is needed. Zero is
/// a dedicated variant rather than a -inf sentinel.
#[derive(Clone, Debug)]
pub struct WalkCount {
    repr: Repr,
}

#[derive(Clone, Debug)]
enum Repr {
    Int(Integer),
    Flt(Float),
    Zero { precision_bits: u32 },
}

impl WalkCount {
    pub fn zero(mode: ArithmeticMode) -> Self {
        match mode {
            ArithmeticMode::Exact => WalkCount {
                repr: Repr::Int(Integer::new()),
            },
            ArithmeticMode::LogFloat { precision_bits } => WalkCount {
                repr: Repr::Zero { precision_bits },
            },
        }
    }

    pub fn one(mode: ArithmeticMode) -> Self {
        WalkCount::from_u64(1, mode)
    }

    pub fn from_u64(v: u64, mode: ArithmeticMode) -> Self {
        WalkCount::from_integer(Integer::from(v), mode)
    }

    pub fn from_integer(v: Integer, mode: ArithmeticMode) -> Self {
        assert!(v >= 0, "walk counts are nonnegative");
        match mode {
            ArithmeticMode::Exact => WalkCount { repr: Repr::Int(v) },
            ArithmeticMode::LogFloat { precision_bits } => {
                if v == 0 {
                    WalkCount {
                        repr: Repr::Zero { precision_bits },
                    }
                } else {
                    WalkCount {
                        repr: Repr::Flt(Float::with_val(precision_bits, v)),
                    }
                }
            }
        }
    }

    pub(crate) fn from_float(v: Float) -> Self {
        if v.is_zero() {
            WalkCount {
                repr: Repr::Zero {
                    precision_bits: v.prec(),
                },
            }
        } else {
            assert!(v.is_sign_positive() && v.is_finite());
            WalkCount { repr: Repr::Flt(v) }
        }
    }

    pub fn mode(&self) -> ArithmeticMode {
        match &self.repr {
            Repr::Int(_) => ArithmeticMode::Exact,
            Repr::Flt(f) => ArithmeticMode::LogFloat {
                precision_bits: f.prec(),
            },
            Repr::Zero { precision_bits } => ArithmeticMode::LogFloat {
                precision_bits: *precision_bits,
            },
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Int(i) => *i == 0,
            Repr::Flt(_) => false,
            Repr::Zero { .. } => true,
        }
    }

    /// Exact integer value, if this count is in exact mode.
    pub fn as_integer(&self) -> Option<&Integer> {
        match &self.repr {
            Repr::Int(i) => Some(i),
            _ => None,
        }
    }

    /// Natural log of the count as f64; `None` for zero counts.
    pub fn ln(&self) -> Option<f64> {
        match &self.repr {
            Repr::Int(i) => {
                if *i == 0 {
                    None
                } else {
                    Some(Float::with_val(DEFAULT_PRECISION_BITS, i).ln().to_f64())
                }
            }
            Repr::Flt(f) => Some(f.ln_ref().complete(f.prec()).to_f64()),
            Repr::Zero { .. } => None,
        }
    }

    /// Value as f64 (may overflow to inf for huge exact counts; prefer `ln`).
    pub fn to_f64(&self) -> f64 {
        match &self.repr {
            Repr::Int(i) => i.to_f64(),
            Repr::Flt(f) => f.to_f64(),
            Repr::Zero { .. } => 0.0,
        }
    }

    /// Lossless conversion exact -> log at the given precision.
    pub fn to_log(&self, precision_bits: u32) -> WalkCount {
        match &self.repr {
            Repr::Int(i) => WalkCount::from_integer(
                i.clone(),
                ArithmeticMode::LogFloat { precision_bits },
            ),
            _ => self.clone(),
        }
    }

    pub fn checked_add(&self, other: &WalkCount) -> Result<WalkCount, ArithError> {
        match (&self.repr, &other.repr) {
            (Repr::Int(a), Repr::Int(b)) => Ok(WalkCount {
                repr: Repr::Int((a + b).into()),
            }),
            (Repr::Zero { .. }, _) => Ok(other.clone()),
            (_, Repr::Zero { .. }) => Ok(self.clone()),
            (Repr::Flt(a), Repr::Flt(b)) => Ok(WalkCount::from_float((a + b).complete(a.prec()))),
            _ => Err(ArithError::ModeMismatch),
        }
    }

    pub fn checked_mul(&self, other: &WalkCount) -> Result<WalkCount, ArithError> {
        match (&self.repr, &other.repr) {
            (Repr::Int(a), Repr::Int(b)) => Ok(WalkCount {
                repr: Repr::Int((a * b).into()),
            }),
            (Repr::Zero { precision_bits }, _) | (_, Repr::Zero { precision_bits }) => {
                Ok(WalkCount::zero(ArithmeticMode::LogFloat {
                    precision_bits: *precision_bits,
                }))
            }
            (Repr::Flt(a), Repr::Flt(b)) => Ok(WalkCount::from_float((a * b).complete(a.prec()))),
            _ => Err(ArithError::ModeMismatch),
        }
    }
}

impl fmt::Display for WalkCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Int(i) => write!(f, "{i}"),
            Repr::Flt(v) => write!(f, "{v}"),
            Repr::Zero { .. } => write!(f, "0"),
        }
    }
}

impl PartialEq for WalkCount {
    fn eq(&self, other: &Self) -> bool {
        match (&self.repr, &other.repr) {
            (Repr::Int(a), Repr::Int(b)) => a == b,
            (Repr::Zero { .. }, Repr::Zero { .. }) => true,
            (Repr::Flt(a), Repr::Flt(b)) => a == b,
            _ => false,
        }
    }
}

/// Sum of strictly positive high-precision terms with a running bound on the
/// accumulated relative rounding error.
///
/// Every add of a correctly rounded positive term to a positive partial sum
/// keeps the relative error below (ops + terms) * 2^(1-prec), since positive
/// sums cannot cancel. `term_op_bound` lets callers charge extra rounding
/// steps per term (for the multiplies that built it).
pub struct PosSum {
    acc: Float,
    rounding_ops: u64,
}

impl PosSum {
    pub fn new(precision_bits: u32) -> Self {
        PosSum {
            acc: Float::with_val(precision_bits, 0),
            rounding_ops: 0,
        }
    }

    pub fn add(&mut self, term: &Float, term_op_bound: u64) {
        debug_assert!(!term.is_sign_negative());
        self.acc += term;
        self.rounding_ops += 1 + term_op_bound;
    }

    pub fn value(&self) -> &Float {
        &self.acc
    }

    pub fn into_value(self) -> Float {
        self.acc
    }

    /// Upper bound on the relative error of the accumulated sum.
    pub fn rel_error_bound(&self) -> f64 {
        self.rounding_ops as f64 * (2.0f64).powi(1 - self.acc.prec() as i32)
    }
}

/// Compensated (Kahan) f64 accumulator for entropy-style sums where terms may
/// have either sign.
#[derive(Clone, Copy, Debug, Default)]
pub struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    pub fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// log(sum of exp(terms)) over f64 log-domain terms, max-shifted.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let mut acc = Kahan::default();
    for &t in terms {
        acc.add((t - max).exp());
    }
    max + acc.value().ln()
}
