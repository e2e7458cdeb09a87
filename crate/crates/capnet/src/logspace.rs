//! Nonnegative reals carried in log-space.
//!
//! Admittances scale like `exp(-F(z)/eps)` and routinely underflow an
//! `f64`, so every exponentially scaled quantity in this crate is a
//! [`LogVal`]: the natural log of a nonnegative number, with zero
//! represented by `-inf`.

use std::cmp::Ordering;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogVal {
    ln: f64,
}

impl LogVal {
    pub const ZERO: LogVal = LogVal {
        ln: f64::NEG_INFINITY,
    };
    pub const ONE: LogVal = LogVal { ln: 0.0 };

    /// Wraps a plain nonnegative number. Panics on negative or NaN input.
    pub fn from_f64(v: f64) -> LogVal {
        assert!(v >= 0.0, "LogVal requires a nonnegative value, got {v}");
        LogVal { ln: v.ln() }
    }

    pub fn from_ln(ln: f64) -> LogVal {
        assert!(!ln.is_nan(), "LogVal log-scale must not be NaN");
        LogVal { ln }
    }

    pub fn ln(&self) -> f64 {
        self.ln
    }

    /// Back to linear scale; may overflow to `inf` or underflow to 0.
    pub fn to_f64(&self) -> f64 {
        self.ln.exp()
    }

    pub fn is_zero(&self) -> bool {
        self.ln == f64::NEG_INFINITY
    }

    /// Decomposition `mantissa * exp(log_scale)` with mantissa in [1, e).
    pub fn mantissa_exp(&self) -> (f64, f64) {
        if self.is_zero() {
            return (0.0, 0.0);
        }
        let scale = self.ln.floor();
        ((self.ln - scale).exp(), scale)
    }

    pub fn mul(&self, other: LogVal) -> LogVal {
        if self.is_zero() || other.is_zero() {
            return LogVal::ZERO;
        }
        LogVal::from_ln(self.ln + other.ln)
    }

    pub fn div(&self, other: LogVal) -> LogVal {
        assert!(!other.is_zero(), "division of LogVal by zero");
        if self.is_zero() {
            return LogVal::ZERO;
        }
        LogVal::from_ln(self.ln - other.ln)
    }

    /// log-sum-exp addition.
    pub fn add(&self, other: LogVal) -> LogVal {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return *self;
        }
        let (hi, lo) = if self.ln >= other.ln {
            (self.ln, other.ln)
        } else {
            (other.ln, self.ln)
        };
        LogVal::from_ln(hi + (lo - hi).exp().ln_1p())
    }

    pub fn recip(&self) -> LogVal {
        assert!(!self.is_zero(), "reciprocal of LogVal zero");
        LogVal::from_ln(-self.ln)
    }

    pub fn powi(&self, n: i32) -> LogVal {
        if self.is_zero() {
            return if n == 0 { LogVal::ONE } else { LogVal::ZERO };
        }
        LogVal::from_ln(self.ln * n as f64)
    }
}

impl PartialOrd for LogVal {
    fn partial_cmp(&self, other: &LogVal) -> Option<Ordering> {
        self.ln.partial_cmp(&other.ln)
    }
}

impl fmt::Display for LogVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "0")
        } else {
            write!(f, "exp({})", self.ln)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_arithmetic() {
        let a = LogVal::from_f64(3.0);
        let b = LogVal::from_f64(4.0);
        assert!((a.mul(b).to_f64() - 12.0).abs() < 1e-12);
        assert!((a.add(b).to_f64() - 7.0).abs() < 1e-12);
        assert!((b.div(a).to_f64() - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn zero_is_absorbing() {
        let a = LogVal::from_f64(2.5);
        assert!(LogVal::ZERO.mul(a).is_zero());
        assert_eq!(LogVal::ZERO.add(a), a);
        assert_eq!(LogVal::from_f64(0.0), LogVal::ZERO);
    }

    #[test]
    fn survives_underflow_scale() {
        // e^{-2000} underflows f64 but stays exact in log space.
        let tiny = LogVal::from_ln(-2000.0);
        let ratio = tiny.div(LogVal::from_ln(-2000.0 + 1.5));
        assert!((ratio.to_f64() - (-1.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn mantissa_exp_decomposition() {
        let v = LogVal::from_ln(-1234.567);
        let (m, s) = v.mantissa_exp();
        assert!(m >= 1.0 && m < std::f64::consts::E);
        assert!((m.ln() + s - v.ln()).abs() < 1e-12);
    }
}
